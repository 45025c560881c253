//! One function per subcommand, each returning a finished envelope.

use std::path::Path;

use rug::Float;
use serde::Serialize;
use serde_json::{json, Value};
use singval::apnum::{DecimalValue, PrecisionContext};
use singval::chowla::{class_number, eq_w_check, elliptic_k, k_relation_residual, lambda as lambda_value, singular_k};
use singval::exactpoly::{
    cubic_radicals, derive_modular_relation, discriminant, radical_eval, relation_terms, ResolventData,
};
use singval::fixtures::{load_radicals, min_g_1571, radicals_2317723, RadicalFixture, RelationFixture, RelationTerm};
use singval::invariants::{check_weber_n, fg_pair, signature};
use singval::latrel::unit_test_lambda;
use singval::polybuild::{f_poly, g_poly, hilbert_poly, poly_height, poly_index, weber_poly, CertifiedPoly, IntPoly};
use singval::quadforms::{class_number_by_kronecker, enumerate};
use singval::{Error, Result};

use crate::envelope::{to_value, write_atomic, Cache, Envelope, Outcome};
use crate::{Which, Suite, EXIT_INCONSISTENT, EXIT_OK};

fn ctx(digits: u32) -> Result<PrecisionContext> {
    PrecisionContext::from_digits(digits)
}

fn decimal(x: &Float) -> DecimalValue {
    DecimalValue::from_float(x, 0)
}

/// `log10 |x|`, or negative infinity for zero.
fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    (m.abs().log2() + f64::from(e)) * std::f64::consts::LOG10_2
}

fn disc_of(n: u64, disc4: bool) -> rug::Integer {
    rug::Integer::from(n) * if disc4 { -4i32 } else { -1i32 }
}

pub fn classgroup(n: u64, disc4: bool, cache: Option<&Cache>) -> Envelope {
    let inputs = json!({ "N": n, "disc4": disc4 });
    Envelope::run("classgroup", inputs, cache, || {
        let group = enumerate(&disc_of(n, disc4))?;
        let orders: Vec<u64> = group.generators.iter().map(|g| g.order).collect();
        Ok(Outcome::ok(json!({
            "discriminant": group.discriminant.to_string(),
            "h": group.h,
            "cyclic": group.is_cyclic(),
            "structure": orders,
            "generators": to_value(&group.generators),
            "classes": to_value(&group.classes),
        })))
    })
}

pub fn invariant(n: u64, prec: u32, cache: Option<&Cache>) -> Envelope {
    let inputs = json!({ "N": n, "prec": prec });
    Envelope::run("invariant", inputs, cache, || {
        let c = ctx(prec)?;
        let b = fg_pair(n, &c)?;
        let rounded = |x: &singval::apnum::RealAP| -> Value {
            let (i, dist) = x.round_to_integer();
            if log10_abs(&dist) < -f64::from(c.digits()) / 2.0 {
                Value::String(i.to_string())
            } else {
                Value::Null
            }
        };
        let res = b.residuals();
        Ok(Outcome::certified(
            json!({
                "N": n,
                "signature": signature(n)?.as_array(),
                "r": to_value(&b.r),
                "s": to_value(&b.s),
                "f": to_value(&b.f),
                "g": to_value(&b.g),
                "f_integer": rounded(&b.f),
                "g_integer": rounded(&b.g),
                "gamma2": to_value(&b.gamma2),
                "j": to_value(&b.j),
                "outside_conjecture": b.outside_conjecture,
            }),
            json!({
                "bits": b.bits,
                "residual_log2": { "cubic": res.cubic, "zero": res.zero, "gamma2": res.gamma2 },
            }),
        ))
    })
}

fn poly_json(p: &CertifiedPoly) -> (Value, Value) {
    let (height, digits) = poly_height(&p.poly);
    (
        json!({
            "degree": p.poly.degree(),
            "coeffs": p.poly.coeffs().iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            "height": height.to_string(),
            "height_digits": digits,
        }),
        to_value(&p.certificate),
    )
}

pub fn polys(n: u64, which: Which, prec: u32, cache: Option<&Cache>) -> Envelope {
    let name = match which {
        Which::G => "G",
        Which::F => "F",
        Which::Weber => "weber",
        Which::Hilbert => "hilbert",
    };
    let inputs = json!({ "N": n, "which": name, "prec": prec });
    Envelope::run("polys", inputs, cache, || {
        let c = ctx(prec)?;
        let p = match which {
            Which::G => g_poly(n, &c)?,
            Which::F => f_poly(n, &c)?,
            Which::Weber => weber_poly(n, &c)?,
            Which::Hilbert => hilbert_poly(n, &c)?,
        };
        let (out, cert) = poly_json(&p);
        Ok(Outcome::certified(out, cert))
    })
}

pub fn lambda(n: u64, unit: bool, prec: u32, cache: Option<&Cache>) -> Envelope {
    let inputs = json!({ "N": n, "unit": unit, "prec": prec });
    Envelope::run("lambda", inputs, cache, || {
        let c = ctx(prec)?;
        let h = class_number(n)?;
        let value = lambda_value(n, &c)?;
        let mut out = json!({ "N": n, "h": h, "lambda": to_value(&value) });
        if unit {
            let report = unit_test_lambda(n, &c)?;
            let code = if report.inconclusive { crate::EXIT_PRECISION } else { EXIT_OK };
            out["unit_test"] = to_value(&report);
            return Ok(Outcome { outputs: out, certificates: Value::Null, exit_code: code });
        }
        Ok(Outcome::ok(out))
    })
}

pub fn kn(n: u64, prec: u32, cache: Option<&Cache>) -> Envelope {
    let inputs = json!({ "N": n, "prec": prec });
    Envelope::run("kn", inputs, cache, || {
        let c = ctx(prec)?;
        let k = singular_k(n, &c)?;
        let resid = k_relation_residual(n, &c)?;
        Ok(Outcome::certified(
            json!({ "N": n, "k": to_value(&k) }),
            json!({ "agm_relation_residual": decimal(&resid), "residual_log10": log10_abs(&resid) }),
        ))
    })
}

pub fn big_kn(n: u64, prec: u32, cache: Option<&Cache>) -> Envelope {
    let inputs = json!({ "N": n, "prec": prec });
    Envelope::run("KN", inputs, cache, || {
        let c = ctx(prec)?;
        let big_k = elliptic_k(n, &c)?;
        let w = eq_w_check(n, &c)?;
        Ok(Outcome::certified(
            json!({ "N": n, "K": to_value(&big_k) }),
            json!({ "eta_product_residual": to_value(&w), "residual_log10": log10_abs(w.value()) }),
        ))
    })
}

pub fn modrel(out: Option<&Path>) -> Envelope {
    let inputs = json!({ "out": out.map(|p| p.display().to_string()) });
    Envelope::run("modrel", inputs, None, || {
        let rel = derive_modular_relation()?;
        let terms: Vec<RelationTerm> = relation_terms(&rel.phi)
            .into_iter()
            .map(|(deg_j, deg_g, c)| RelationTerm { deg_j, deg_g, coeff: c.to_string() })
            .collect();
        let fixture = RelationFixture { variables: vec!["J".into(), "g".into()], terms };
        let mut outputs = json!({
            "degree_g": rel.degree_g,
            "degree_J": rel.degree_j,
            "terms": fixture.terms.len(),
            "removed_content": rel.removed_content,
        });
        let text = serde_json::to_string_pretty(&fixture).map_err(|e| Error::Parse(e.to_string()))?;
        match out {
            Some(path) => {
                write_atomic(path, &text).map_err(|e| Error::domain(format!("{}: {e}", path.display())))?;
                outputs["written"] = json!(path.display().to_string());
            }
            None => outputs["relation"] = to_value(&fixture),
        }
        Ok(Outcome::ok(outputs))
    })
}

#[derive(Serialize)]
struct Check {
    name: String,
    pass: bool,
    detail: Value,
}

impl Check {
    fn new(name: &str, pass: bool, detail: Value) -> Check {
        Check { name: name.into(), pass, detail }
    }

    fn from_result(name: &str, r: Result<(bool, Value)>) -> Check {
        match r {
            Ok((pass, detail)) => Check::new(name, pass, detail),
            Err(e) => Check::new(name, false, json!({ "error": e.to_string() })),
        }
    }
}

fn outcome_from_checks(mut outputs: Value, checks: Vec<Check>) -> Outcome {
    let all = checks.iter().all(|c| c.pass);
    outputs["checks"] = to_value(&checks);
    outputs["all_pass"] = json!(all);
    Outcome {
        outputs,
        certificates: Value::Null,
        exit_code: if all { EXIT_OK } else { EXIT_INCONSISTENT },
    }
}

fn poly_of(fx: &RadicalFixture, name: &str) -> Result<IntPoly> {
    IntPoly::new(fx.polynomial(name)?)
}

/// Cardano parameters, resolvent evaluations and indices of a radical fixture.
fn radical_checks(fx: &RadicalFixture, prec: u32) -> Vec<Check> {
    let mut checks = Vec::new();
    let digits = prec.max(crate::MIN_DIGITS);
    checks.push(Check::from_result("cubic_radicals", (|| {
        let c = ctx(digits)?;
        let r = cubic_radicals(&poly_of(fx, "q3")?, &c)?;
        let want = (
            singval::fixtures::parse_rational(&fx.cubic.u)?,
            singval::fixtures::parse_rational(&fx.cubic.a)?,
            singval::fixtures::parse_rational(&fx.cubic.b)?,
        );
        let pass = (r.u.clone(), r.a.clone(), r.b.clone()) == want;
        Ok((pass, json!({ "radical": r.to_string(), "value": to_value(&r.value) })))
    })()));
    for res in &fx.resolvents {
        let name = format!("resolvent_{}", res.polynomial);
        checks.push(Check::from_result(&name, (|| {
            let c = ctx(digits)?;
            let q = poly_of(fx, &res.polynomial)?;
            let data = ResolventData::from_fixture(fx.n, res)?;
            let x = radical_eval(&data, &q, &c)?;
            let resid = Float::with_val(c.bits(), q.eval_real(x.value())).abs();
            let lg = log10_abs(&resid);
            Ok((lg < -30.0, json!({ "value": to_value(&x), "residual_log10": lg })))
        })()));
    }
    for (name, p) in [("q3", 3u32), ("q5", 5), ("q7", 7)] {
        checks.push(Check::from_result(&format!("index_{name}"), (|| {
            let q = poly_of(fx, name)?;
            let f = fx.index(name)?;
            let disc = discriminant(&q.to_zpoly())?;
            let field = rug::Integer::from(fx.n) * -1i32;
            let expected = rug::Integer::from(f.square_ref()) * rug::ops::Pow::pow(field, (p - 1) / 2);
            let index = poly_index(&q, fx.n)?;
            Ok((disc == expected && index == f, json!({ "index": index.to_string(), "discriminant": disc.to_string() })))
        })()));
    }
    checks
}

pub fn radical(fixture: &Path, prec: u32) -> Envelope {
    let inputs = json!({ "fixture": fixture.display().to_string(), "prec": prec });
    Envelope::run("radical", inputs, None, || {
        let text = std::fs::read_to_string(fixture)
            .map_err(|e| Error::domain(format!("{}: {e}", fixture.display())))?;
        let fx = load_radicals(&text)?;
        Ok(outcome_from_checks(json!({ "N": fx.n }), radical_checks(&fx, prec)))
    })
}

pub fn verify(n: u64, suite: Suite, prec: u32) -> Envelope {
    let inputs = json!({ "N": n, "suite": "paper", "prec": prec });
    let Suite::Paper = suite;
    Envelope::run("verify", inputs, None, || {
        let c = ctx(prec)?;
        let h = class_number(n)?;
        let mut checks = Vec::new();
        checks.push(Check::from_result("class_number", (|| {
            let by_sum = class_number_by_kronecker(n)?;
            Ok((by_sum == h, json!({ "forms": h, "kronecker_sum": by_sum })))
        })()));
        if check_weber_n(n).is_ok() {
            checks.push(Check::from_result("k_relation", (|| {
                let r = k_relation_residual(n, &c)?;
                let lg = log10_abs(&r);
                Ok((lg < -(f64::from(prec) - 10.0), json!({ "residual_log10": lg })))
            })()));
            checks.push(Check::from_result("eq_w", (|| {
                let r = eq_w_check(n, &c)?;
                let lg = log10_abs(r.value());
                Ok((lg < -(f64::from(prec) - 20.0), json!({ "residual_log10": lg })))
            })()));
        }
        if let Ok(fx) = min_g_1571() {
            if fx.n == n {
                checks.push(Check::from_result("min_g", (|| {
                    let p = g_poly(n, &c)?;
                    let same = p.poly.coeffs() == fx.coefficients()?.as_slice();
                    let index = poly_index(&p.poly, n)?;
                    Ok((same && index.to_string() == fx.index, json!({ "index": index.to_string() })))
                })()));
            }
        }
        let fx = radicals_2317723()?;
        if fx.n == n {
            checks.push(Check::new("class_number_fixture", h == fx.class_number, json!({ "h": h })));
            checks.push(Check::from_result("g_height", (|| {
                let p = g_poly(n, &c)?;
                let (_, digits) = poly_height(&p.poly);
                let pass = p.poly.degree() as u64 == fx.class_number && p.poly.is_monic() && digits == 65;
                Ok((pass, json!({ "degree": p.poly.degree(), "height_digits": digits })))
            })()));
            checks.extend(radical_checks(&fx, prec));
        }
        Ok(outcome_from_checks(json!({ "N": n, "h": h }), checks))
    })
}
