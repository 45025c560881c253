//! Integer relations among real numbers by exact lattice reduction.

use rug::float::Round;
use rug::{Float, Integer};
use serde::Serialize;

use crate::apnum::{PrecisionContext, RealAP};
use crate::error::{Error, Result};
use crate::exactpoly::{gcd, primitive_part, ZPoly};
use crate::polybuild::IntPoly;

/// Lovász parameter `p / q`.
pub const DELTA: (u32, u32) = (99, 100);

/// Acceptance threshold on `log2` of the gap between relation and non-relation vectors.
pub const MIN_GAP_LOG2: f64 = 16.0;

/// Precision doublings allowed before a recognition is declared inconclusive.
pub const MAX_ESCALATIONS: u32 = 3;

fn dot(a: &[Integer], b: &[Integer]) -> Integer {
    let mut s = Integer::new();
    for (x, y) in a.iter().zip(b) {
        s += Integer::from(x * y);
    }
    s
}

fn exact_div(num: Integer, den: &Integer) -> Integer {
    debug_assert!(num.is_divisible(den));
    num.div_exact(den)
}

/// LLL reduction with `delta = 0.99`.
pub fn lll_reduce(basis: &[Vec<Integer>]) -> Result<Vec<Vec<Integer>>> {
    lll_reduce_with(basis, DELTA)
}

/// Integral LLL: Gram–Schmidt data kept as exact integers `d_i` and
/// `lambda_{k,j}`, so no rounding ever enters the reduction.
pub fn lll_reduce_with(basis: &[Vec<Integer>], delta: (u32, u32)) -> Result<Vec<Vec<Integer>>> {
    let n = basis.len();
    if n == 0 {
        return Ok(Vec::new());
    }
    let dim = basis[0].len();
    if basis.iter().any(|r| r.len() != dim) {
        return Err(Error::domain("basis rows have different lengths"));
    }
    let (p, q) = delta;
    if !(4 * p > q && p < q) {
        return Err(Error::domain("LLL parameter must lie in (1/4, 1)"));
    }
    let dependent = || Error::Degenerate("basis rows are linearly dependent".into());

    // 1-based indices throughout, following the textbook recurrences
    let mut b: Vec<Vec<Integer>> = basis.to_vec();
    let mut d = vec![Integer::new(); n + 1];
    let mut lam = vec![vec![Integer::new(); n + 1]; n + 1];
    d[0] = Integer::from(1);
    d[1] = dot(&b[0], &b[0]);
    if d[1] == 0 {
        return Err(dependent());
    }
    if n == 1 {
        return Ok(b);
    }

    let red = |b: &mut Vec<Vec<Integer>>, lam: &mut Vec<Vec<Integer>>, d: &[Integer], k: usize, l: usize| {
        let twice = Integer::from(&lam[k][l] * 2u32);
        if Integer::from(twice.abs_ref()) <= d[l] {
            return;
        }
        // nearest integer to lam / d
        let num = twice + &d[l];
        let den = Integer::from(&d[l] * 2u32);
        let qk = num.div_rem_floor(den).0;
        let (head, tail) = b.split_at_mut(k - 1);
        for (x, y) in tail[0].iter_mut().zip(&head[l - 1]) {
            *x -= Integer::from(&qk * y);
        }
        lam[k][l] -= Integer::from(&qk * &d[l]);
        for i in 1..l {
            let t = Integer::from(&qk * &lam[l][i]);
            lam[k][i] -= t;
        }
    };

    let mut k = 2;
    let mut kmax = 1;
    while k <= n {
        if k > kmax {
            kmax = k;
            for j in 1..=k {
                let mut u = dot(&b[k - 1], &b[j - 1]);
                for i in 1..j {
                    let num = Integer::from(&d[i] * &u) - Integer::from(&lam[k][i] * &lam[j][i]);
                    u = exact_div(num, &d[i - 1]);
                }
                if j < k {
                    lam[k][j] = u;
                } else {
                    if u == 0 {
                        return Err(dependent());
                    }
                    d[k] = u;
                }
            }
        }
        red(&mut b, &mut lam, &d, k, k - 1);
        let lhs = Integer::from(&d[k] * &d[k - 2]) * q;
        let rhs = Integer::from(d[k - 1].square_ref()) * p - Integer::from(lam[k][k - 1].square_ref()) * q;
        if lhs < rhs {
            b.swap(k - 1, k - 2);
            for j in 1..k - 1 {
                let t = std::mem::take(&mut lam[k][j]);
                lam[k][j] = std::mem::replace(&mut lam[k - 1][j], t);
            }
            let l = lam[k][k - 1].clone();
            let bb = exact_div(
                Integer::from(&d[k - 2] * &d[k]) + Integer::from(l.square_ref()),
                &d[k - 1],
            );
            for i in k + 1..=kmax {
                let t = lam[i][k].clone();
                let new_k = exact_div(
                    Integer::from(&d[k] * &lam[i][k - 1]) - Integer::from(&l * &t),
                    &d[k - 1],
                );
                let new_k1 = exact_div(Integer::from(&bb * &t) + Integer::from(&l * &new_k), &d[k]);
                lam[i][k] = new_k;
                lam[i][k - 1] = new_k1;
            }
            d[k - 1] = bb;
            k = (k - 1).max(2);
        } else {
            for l in (1..k - 1).rev() {
                red(&mut b, &mut lam, &d, k, l);
            }
            k += 1;
        }
    }
    Ok(b)
}

/// Squared Euclidean norm of an integer vector.
pub fn norm2(v: &[Integer]) -> Integer {
    dot(v, v)
}

fn log2_int(x: &Integer) -> f64 {
    if *x == 0 {
        return f64::NEG_INFINITY;
    }
    let bits = x.significant_bits();
    if bits <= 1000 {
        x.to_f64().abs().log2()
    } else {
        let shifted = Integer::from(x >> (bits - 64));
        shifted.to_f64().abs().log2() + f64::from(bits - 64)
    }
}

fn log2_float(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + f64::from(e)
}

#[derive(Debug, Clone, Serialize)]
pub struct RelationResult {
    pub coefficients: Vec<String>,
    /// `log2 |sum m_i v_i|` after scaling the values to a maximum modulus of one.
    pub residual_log2: f64,
    /// `log2` of the norm ratio between the shortest non-relation vector and
    /// the longest relation vector.
    pub confidence_gap_log2: f64,
    pub relations_found: usize,
    pub precision_bits: u32,
    #[serde(skip)]
    pub relations: Vec<Vec<Integer>>,
}

impl RelationResult {
    pub fn coefficients(&self) -> Vec<Integer> {
        self.relations[0].clone()
    }
}

/// Reduce the relation lattice and sort its rows into relations and the rest.
///
/// `err_exp` bounds the relative error of every value; a row counts as a
/// relation when its residual at full precision is within that noise.
fn search(values: &[Float], err_exp: i64, ctx: &PrecisionContext) -> Result<RelationResult> {
    let n = values.len();
    if n < 2 {
        return Err(Error::domain("an integer relation needs at least two values"));
    }
    let prec = ctx.bits();
    let max = values
        .iter()
        .map(|v| Float::with_val(prec, v.abs_ref()))
        .fold(Float::new(prec), |a, b| if b > a { b } else { a });
    if max.is_zero() {
        return Err(Error::Degenerate("all values are zero".into()));
    }
    let normalized: Vec<Float> = values.iter().map(|v| Float::with_val(prec, v / &max)).collect();
    let scale_bits = prec.saturating_sub(2 * ctx.guard_bits()).max(16);
    // every nonzero value must keep some significant bits after scaling
    let smallest = normalized
        .iter()
        .filter_map(|v| v.get_exp())
        .min()
        .unwrap_or(0);
    if i64::from(scale_bits) + i64::from(smallest) < 32 {
        return Err(Error::precision(format!(
            "values span 2^{} in magnitude, beyond the {scale_bits}-bit lattice scale",
            -smallest
        )));
    }
    let basis: Vec<Vec<Integer>> = normalized
        .iter()
        .enumerate()
        .map(|(i, v)| {
            let mut row = vec![Integer::new(); n + 1];
            row[i] = Integer::from(1);
            let scaled = Float::with_val(prec + 8, v << scale_bits);
            row[n] = scaled
                .to_integer_round(Round::Nearest)
                .map(|(z, _)| z)
                .unwrap_or_default();
            row
        })
        .collect();
    let reduced = lll_reduce(&basis)?;

    let half = -f64::from(prec) / 2.0;
    let noise = (err_exp.max(ctx.accuracy_exp()) as f64).min(half);
    let mut rel_rows = Vec::new();
    let mut other_norms = Vec::new();
    for row in &reduced {
        let m = &row[..n];
        let norm = log2_int(&norm2(row)) / 2.0;
        if m.iter().all(|c| *c == 0) {
            other_norms.push(norm);
            continue;
        }
        let mut s = Float::new(prec);
        for (c, v) in m.iter().zip(&normalized) {
            s += Float::with_val(prec, c * v);
        }
        let res = log2_float(&s);
        let l1 = m.iter().fold(Integer::new(), |acc, c| acc + Integer::from(c.abs_ref()));
        if res < noise + log2_int(&l1) + 2.0 && res < half {
            rel_rows.push((norm, res, m.to_vec()));
        } else {
            other_norms.push(norm);
        }
    }
    if rel_rows.is_empty() {
        return Err(Error::NotFound(format!("no integer relation at {prec} bits")));
    }
    rel_rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let longest = rel_rows.last().map(|r| r.0).unwrap_or(0.0);
    let shortest_other = other_norms.iter().copied().fold(f64::INFINITY, f64::min);
    let gap = shortest_other - longest;
    let residual = rel_rows[0].1;
    let relations: Vec<Vec<Integer>> = rel_rows.into_iter().map(|r| r.2).collect();
    Ok(RelationResult {
        coefficients: relations[0].iter().map(Integer::to_string).collect(),
        residual_log2: residual,
        confidence_gap_log2: gap,
        relations_found: relations.len(),
        precision_bits: prec,
        relations,
    })
}

/// A small integer vector `m` with `sum m_i v_i` below `2^(-bits/2)`.
pub fn lindep(values: &[RealAP], ctx: &PrecisionContext) -> Result<RelationResult> {
    let raw: Vec<Float> = values.iter().map(|v| v.value().clone()).collect();
    let err = values.iter().map(RealAP::err_exp).max().unwrap_or(i64::MIN);
    let res = search(&raw, err, ctx)?;
    if res.confidence_gap_log2 < MIN_GAP_LOG2 {
        return Err(Error::NotFound(format!(
            "relation at {} bits is not isolated (gap 2^{:.1})",
            ctx.bits(),
            res.confidence_gap_log2
        )));
    }
    Ok(res)
}

/// `lindep` on values recomputed at increasing precision, verified at 1.25x.
pub fn lindep_with<F>(values: F, ctx: &PrecisionContext) -> Result<RelationResult>
where
    F: Fn(&PrecisionContext) -> Result<Vec<RealAP>>,
{
    let mut c = *ctx;
    let mut last = None;
    for _ in 0..=MAX_ESCALATIONS {
        match lindep(&values(&c)?, &c) {
            Ok(res) => {
                let check = c.scaled(1.25);
                let vals = values(&check)?;
                let m = res.coefficients();
                let max = vals
                    .iter()
                    .map(|v| Float::with_val(check.bits(), v.value().abs_ref()))
                    .fold(Float::new(check.bits()), |a, b| if b > a { b } else { a });
                let mut s = Float::new(check.bits());
                for (k, v) in m.iter().zip(&vals) {
                    s += Float::with_val(check.bits(), k * v.value());
                }
                s /= &max;
                if log2_float(&s) < -f64::from(check.bits()) / 2.0 {
                    return Ok(res);
                }
                last = Some(Error::NotFound(format!(
                    "relation found at {} bits fails at {} bits",
                    c.bits(),
                    check.bits()
                )));
            }
            Err(e @ (Error::NotFound(_) | Error::Degenerate(_) | Error::Precision(_))) => last = Some(e),
            Err(e) => return Err(e),
        }
        c = c.doubled();
    }
    Err(last.unwrap_or_else(|| Error::NotFound("no relation".into())))
}

#[derive(Debug, Clone, Serialize)]
pub struct AlgdepResult {
    pub poly: IntPoly,
    pub residual_log2: f64,
    pub confidence_gap_log2: f64,
    pub precision_bits: u32,
}

fn powers(x: &Float, d: usize) -> Vec<Float> {
    let prec = x.prec();
    let mut out = Vec::with_capacity(d + 1);
    let mut p = Float::with_val(prec, 1);
    for _ in 0..=d {
        out.push(p.clone());
        p *= x;
    }
    out
}

fn relative_residual(p: &IntPoly, x: &Float) -> f64 {
    let v = p.eval_real(x);
    log2_float(&v) - log2_float(&p.abs_scale(x))
}

/// Degree of `poly` must be at most `d`; the polynomial is the gcd of all
/// short relations, so multiples of a lower-degree minimal polynomial
/// collapse onto it.
pub fn algdep_report(x: &RealAP, d: usize, ctx: &PrecisionContext) -> Result<AlgdepResult> {
    if d == 0 {
        return Err(Error::domain("algdep needs degree at least 1"));
    }
    let xv = Float::with_val(ctx.bits(), x.value());
    let err = x.err_exp().saturating_add(2 + (d as f64).log2().ceil() as i64);
    let res = search(&powers(&xv, d), err, ctx)?;
    if res.confidence_gap_log2 < MIN_GAP_LOG2 {
        return Err(Error::NotFound(format!(
            "degree-{d} relation at {} bits is not isolated (gap 2^{:.1})",
            ctx.bits(),
            res.confidence_gap_log2
        )));
    }
    let mut g: Option<ZPoly> = None;
    for rel in &res.relations {
        let p = ZPoly::new(rel.clone());
        g = Some(match g {
            None => primitive_part(&p),
            Some(acc) => gcd(&acc, &p)?,
        });
    }
    let g = g.ok_or_else(|| Error::NotFound("no relation".into()))?;
    let poly = IntPoly::from_zpoly(&primitive_part(&g))?.normalized();
    if poly.degree() == 0 {
        return Err(Error::NotFound("relations have no common factor".into()));
    }
    let residual = relative_residual(&poly, &xv);
    if residual >= -f64::from(ctx.bits()) / 2.0 {
        return Err(Error::NotFound(format!("candidate {poly} does not vanish at x")));
    }
    // a near-miss polynomial would not pull Newton's iteration back onto x
    let dp = poly
        .derivative()
        .ok_or_else(|| Error::NotFound("constant candidate".into()))?;
    let mut y = xv.clone();
    for _ in 0..3 {
        let step = Float::with_val(ctx.bits(), poly.eval_real(&y) / dp.eval_real(&y));
        y -= step;
    }
    let drift = log2_float(&Float::with_val(ctx.bits(), &y - &xv)) - log2_float(&xv).max(0.0);
    if drift >= -f64::from(ctx.bits()) / 2.0 {
        return Err(Error::NotFound(format!("Newton refinement of {poly} leaves x")));
    }
    Ok(AlgdepResult {
        poly,
        residual_log2: residual,
        confidence_gap_log2: res.confidence_gap_log2,
        precision_bits: ctx.bits(),
    })
}

pub fn algdep(x: &RealAP, d: usize, ctx: &PrecisionContext) -> Result<IntPoly> {
    algdep_report(x, d, ctx).map(|r| r.poly)
}

/// `algdep` on a value recomputed at increasing precision; every candidate
/// is re-checked on a fresh evaluation at 1.25x precision.
pub fn algdep_with<F>(x: F, d: usize, ctx: &PrecisionContext) -> Result<AlgdepResult>
where
    F: Fn(&PrecisionContext) -> Result<RealAP>,
{
    algdep_budgeted(x, d, ctx, ctx.bits() << MAX_ESCALATIONS)
}

/// As `algdep_with`, doubling precision while it stays within `max_bits`.
pub fn algdep_budgeted<F>(x: F, d: usize, ctx: &PrecisionContext, max_bits: u32) -> Result<AlgdepResult>
where
    F: Fn(&PrecisionContext) -> Result<RealAP>,
{
    let mut c = *ctx;
    let mut last;
    loop {
        match algdep_report(&x(&c)?, d, &c) {
            Ok(res) => {
                let check = c.scaled(1.25);
                let xv = x(&check)?;
                let r = relative_residual(&res.poly, xv.value());
                if r < -f64::from(check.bits()) / 2.0 {
                    return Ok(res);
                }
                last = Error::NotFound(format!(
                    "{} found at {} bits fails at {} bits",
                    res.poly,
                    c.bits(),
                    check.bits()
                ));
            }
            Err(e @ (Error::NotFound(_) | Error::Degenerate(_) | Error::Precision(_))) => last = e,
            Err(e) => return Err(e),
        }
        if c.bits() * 2 > max_bits {
            break;
        }
        c = c.doubled();
    }
    Err(last)
}

#[derive(Debug, Clone, Serialize)]
pub struct UnitReport {
    pub n: u64,
    pub h: u64,
    pub degree_found: Option<usize>,
    pub poly: Option<IntPoly>,
    pub is_unit: bool,
    pub used_square: bool,
    pub inconclusive: bool,
    pub precision_bits: u32,
    /// One line per recognition attempt, in order.
    pub attempts: Vec<String>,
}

fn is_unit_poly(p: &IntPoly) -> bool {
    p.is_monic() && Integer::from(p.coeffs()[0].abs_ref()) == 1
}

/// Conjecture 1 check with the default budget of three doublings.
pub fn unit_test_lambda(n: u64, ctx: &PrecisionContext) -> Result<UnitReport> {
    unit_test_lambda_budgeted(n, ctx, ctx.bits() << MAX_ESCALATIONS)
}

/// Recognise `lambda` at degree `h`; for composite `N` then `lambda^2` at
/// degree `h`; finally `lambda` at degree `2h`.
pub fn unit_test_lambda_budgeted(n: u64, ctx: &PrecisionContext, max_bits: u32) -> Result<UnitReport> {
    let h = crate::chowla::class_number(n)?;
    let mut report = UnitReport {
        n,
        h,
        degree_found: None,
        poly: None,
        is_unit: false,
        used_square: false,
        inconclusive: true,
        precision_bits: ctx.bits(),
        attempts: Vec::new(),
    };
    if h == 1 {
        let one = IntPoly::from_i64(&[-1, 1])?;
        report.degree_found = Some(1);
        report.is_unit = true;
        report.inconclusive = false;
        report.attempts.push("h = 1: lambda = 1 exactly".into());
        report.poly = Some(one);
        return Ok(report);
    }
    let hd = h as usize;
    let lam = |c: &PrecisionContext| crate::chowla::lambda(n, c);
    let lam2 = |c: &PrecisionContext| {
        let l = crate::chowla::lambda(n, c)?;
        Ok(l.pow_u(2))
    };
    let composite = !crate::quadforms::is_prime(n);
    let mut plan: Vec<(&str, usize, bool)> = vec![("lambda", hd, false)];
    if composite {
        plan.push(("lambda^2", hd, true));
    }
    plan.push(("lambda", 2 * hd, false));
    for (name, d, square) in plan {
        let found = if square {
            algdep_budgeted(lam2, d, ctx, max_bits)
        } else {
            algdep_budgeted(lam, d, ctx, max_bits)
        };
        match found {
            Ok(res) => {
                let unit = is_unit_poly(&res.poly);
                report.attempts.push(format!(
                    "{name} at degree {d}: {} ({} bits, unit: {unit})",
                    res.poly, res.precision_bits
                ));
                report.precision_bits = report.precision_bits.max(res.precision_bits);
                if unit {
                    report.degree_found = Some(res.poly.degree());
                    report.poly = Some(res.poly);
                    report.is_unit = true;
                    report.used_square = square;
                    report.inconclusive = false;
                    return Ok(report);
                }
                if report.poly.is_none() {
                    report.degree_found = Some(res.poly.degree());
                    report.poly = Some(res.poly);
                    report.inconclusive = false;
                }
            }
            Err(e) if matches!(e, Error::NotFound(_) | Error::Degenerate(_) | Error::Precision(_)) => {
                report.attempts.push(format!("{name} at degree {d}: {e}"));
                report.precision_bits = report.precision_bits.max(max_bits);
            }
            Err(e) => return Err(e),
        }
    }
    Ok(report)
}
