//! Resumable campaigns over ranges of N with atomic checkpoints.

use std::collections::BTreeMap;
use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use singval::apnum::PrecisionContext;
use singval::latrel::unit_test_lambda;
use singval::polybuild::{generator_check, weber_candidates};
use singval::quadforms::is_prime;
use singval::{Error, Result};

use crate::envelope::{to_value, write_atomic, Envelope, TOOL, VERSION};
use crate::{EXIT_INCONSISTENT, EXIT_OK, EXIT_PRECISION};

/// Conjecture 1 starts its unit tests at this precision or above.
const CONJECTURE1_MIN_BITS: u32 = 512;

/// Largest N with a known failure of `f` or `g` to generate the class field.
const LAST_KNOWN_EXCEPTION: u64 = 1099;

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Record {
    pub n: u64,
    pub h: u64,
    /// `pass`, `fail`, `inconclusive`, `exception` or `error`.
    pub status: String,
    pub detail: Value,
}

#[derive(Debug, Serialize, Deserialize)]
pub struct Checkpoint {
    pub tool: String,
    pub version: String,
    pub conjecture: u8,
    pub from: u64,
    pub to: u64,
    pub records: BTreeMap<u64, Record>,
}

fn targets(conjecture: u8, from: u64, to: u64) -> Vec<u64> {
    match conjecture {
        1 => (from.max(3)..=to).filter(|&n| n % 4 == 3 && is_prime(n)).collect(),
        _ => weber_candidates(from, to),
    }
}

fn conjecture1(n: u64, ctx: &PrecisionContext) -> Record {
    match unit_test_lambda(n, ctx) {
        Ok(r) => {
            let constant = r.poly.as_ref().map(|p| p.coeffs()[0].to_string());
            let good = r.is_unit
                && r.degree_found == Some(r.h as usize)
                && constant.as_deref() == Some("-1");
            let status = if r.inconclusive {
                "inconclusive"
            } else if good {
                "pass"
            } else {
                "fail"
            };
            Record {
                n,
                h: r.h,
                status: status.into(),
                detail: json!({
                    "poly": r.poly.as_ref().map(|p| p.to_string()),
                    "constant": constant,
                    "precision_bits": r.precision_bits,
                    "used_square": r.used_square,
                }),
            }
        }
        Err(e) => error_record(n, &e),
    }
}

fn conjecture2(n: u64, ctx: &PrecisionContext) -> Record {
    match generator_check(n, ctx) {
        Ok(c) => {
            let status = match (c.exception, n <= LAST_KNOWN_EXCEPTION) {
                (false, _) => "pass",
                (true, true) => "exception",
                (true, false) => "fail",
            };
            Record {
                n,
                h: c.h,
                status: status.into(),
                detail: json!({
                    "min_f": c.f.to_string(),
                    "min_g": c.g.to_string(),
                    "deg_f": c.f.degree(),
                    "deg_g": c.g.degree(),
                }),
            }
        }
        Err(e) => error_record(n, &e),
    }
}

fn error_record(n: u64, e: &Error) -> Record {
    let status = if e.is_precision_related() { "inconclusive" } else { "error" };
    Record { n, h: 0, status: status.into(), detail: json!({ "error": e.to_string() }) }
}

fn load(path: &Path, conjecture: u8, from: u64, to: u64) -> Result<Checkpoint> {
    if !path.exists() {
        return Ok(Checkpoint {
            tool: TOOL.into(),
            version: VERSION.into(),
            conjecture,
            from,
            to,
            records: BTreeMap::new(),
        });
    }
    let text = std::fs::read_to_string(path)
        .map_err(|e| Error::Inconsistency(format!("checkpoint {}: {e}", path.display())))?;
    let cp: Checkpoint = serde_json::from_str(&text)
        .map_err(|e| Error::Inconsistency(format!("checkpoint {} is corrupt: {e}", path.display())))?;
    if cp.conjecture != conjecture || cp.from != from || cp.to != to {
        return Err(Error::Inconsistency(format!(
            "checkpoint {} is for conjecture {} over [{}, {}]",
            path.display(),
            cp.conjecture,
            cp.from,
            cp.to
        )));
    }
    if cp.records.iter().any(|(k, r)| *k != r.n) {
        return Err(Error::Inconsistency(format!("checkpoint {} is corrupt: key mismatch", path.display())));
    }
    Ok(cp)
}

fn save(path: &Path, cp: &Checkpoint) -> Result<()> {
    let text = serde_json::to_string_pretty(cp).map_err(|e| Error::Parse(e.to_string()))?;
    write_atomic(path, &text).map_err(|e| Error::domain(format!("checkpoint {}: {e}", path.display())))
}

pub fn run(conjecture: u8, from: u64, to: u64, checkpoint: &Path, prec: u32) -> Envelope {
    let inputs = json!({
        "conjecture": conjecture,
        "from": from,
        "to": to,
        "checkpoint": checkpoint.display().to_string(),
        "prec": prec,
    });
    let start = Instant::now();
    match campaign(conjecture, from, to, checkpoint, prec) {
        Ok((outputs, code, resumed)) => Envelope {
            tool: TOOL,
            version: VERSION,
            command: "campaign".into(),
            inputs,
            outputs,
            certificates: Value::Null,
            timings: json!({ "elapsed_ms": start.elapsed().as_secs_f64() * 1e3, "resumed_records": resumed }),
            cached: false,
            error: None,
            exit_code: code,
        },
        Err(e) => Envelope::failure("campaign", inputs, &e, start.elapsed().as_secs_f64() * 1e3),
    }
}

fn campaign(conjecture: u8, from: u64, to: u64, path: &Path, prec: u32) -> Result<(Value, u8, usize)> {
    if from > to {
        return Err(Error::domain(format!("empty range [{from}, {to}]")));
    }
    let mut cp = load(path, conjecture, from, to)?;
    let resumed = cp.records.len();
    let base = PrecisionContext::from_digits(prec)?;
    let ctx = if conjecture == 1 { base.at_least(CONJECTURE1_MIN_BITS) } else { base };
    let todo: Vec<u64> = targets(conjecture, from, to)
        .into_iter()
        .filter(|n| !cp.records.contains_key(n))
        .collect();
    let chunk = (rayon::current_num_threads() * 2).max(1);
    for batch in todo.chunks(chunk) {
        let records: Vec<Record> = batch
            .par_iter()
            .map(|&n| if conjecture == 1 { conjecture1(n, &ctx) } else { conjecture2(n, &ctx) })
            .collect();
        for r in records {
            cp.records.insert(r.n, r);
        }
        save(path, &cp)?;
    }
    if todo.is_empty() {
        save(path, &cp)?;
    }

    let with = |s: &str| -> Vec<u64> { cp.records.values().filter(|r| r.status == s).map(|r| r.n).collect() };
    let (fail, error, inconclusive) = (with("fail"), with("error"), with("inconclusive"));
    let mut outputs = json!({
        "checked": cp.records.len(),
        "passed": with("pass").len(),
        "failed": fail,
        "errors": error,
        "inconclusive": inconclusive,
        "records": to_value(&cp.records.values().collect::<Vec<_>>()),
    });
    if conjecture == 2 {
        outputs["exceptions"] = json!(with("exception"));
        outputs["class_number_one"] = json!(cp.records.values().filter(|r| r.h == 1).map(|r| r.n).collect::<Vec<_>>());
    }
    let code = if !fail.is_empty() || !error.is_empty() {
        EXIT_INCONSISTENT
    } else if !inconclusive.is_empty() {
        EXIT_PRECISION
    } else {
        EXIT_OK
    };
    Ok((outputs, code, resumed))
}
