//! Radical expressions for the real roots of cubic, quintic and septic
//! sub-field polynomials.

use std::fmt;

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::apnum::{pi_raw, real_root_raw, ComplexAP, PrecisionContext, RealAP};
use crate::error::{Error, Result};
use crate::fixtures::{parse_integer, ResolventFixture};
use crate::latrel::lindep;
use crate::polybuild::{complex_roots, IntPoly};

/// `u + (A + sqrt(B))^(1/3) + (A - sqrt(B))^(1/3)` with real cube roots.
#[derive(Debug, Clone)]
pub struct CubicRadical {
    pub u: Rational,
    pub a: Rational,
    pub b: Rational,
    pub value: RealAP,
}

impl fmt::Display for CubicRadical {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "{} + ({} + sqrt({}))^(1/3) + ({} - sqrt({}))^(1/3)",
            self.u, self.a, self.b, self.a, self.b
        )
    }
}

/// Cardano's formula for a monic cubic with one real root.
pub fn cubic_radicals(p: &IntPoly, ctx: &PrecisionContext) -> Result<CubicRadical> {
    if p.degree() != 3 || !p.is_monic() {
        return Err(Error::domain(format!("{p} is not a monic cubic")));
    }
    let c = p.coeffs();
    let (a2, a1, a0) = (Rational::from(&c[2]), Rational::from(&c[1]), Rational::from(&c[0]));
    // x = t - a2/3 gives t^3 + s t + q
    let u = Rational::from(-&a2) / 3u32;
    let a2sq = Rational::from(a2.square_ref());
    let s = Rational::from(&a1 - Rational::from(&a2sq / 3u32));
    let q = Rational::from(&a2sq * &a2) * 2u32 / 27u32 - Rational::from(&a2 * &a1) / 3u32 + &a0;
    let big_a = Rational::from(-&q) / 2u32;
    let s3 = Rational::from(s.square_ref()) * &s / 27u32;
    let big_b = Rational::from(big_a.square_ref()) + s3;
    if big_b < 0 {
        return Err(Error::Unsupported(format!(
            "{p} has three real roots; real radicals are not attempted"
        )));
    }

    let work = ctx.bits() + 32;
    let sqrt_b = Float::with_val(work, &big_b).sqrt();
    let fa = Float::with_val(work, &big_a);
    let plus = real_root_raw(&Float::with_val(work, &fa + &sqrt_b), 3);
    let minus = real_root_raw(&Float::with_val(work, &fa - &sqrt_b), 3);
    let x = Float::with_val(work, &u) + plus + minus;

    let resid = Float::with_val(work, p.eval_real(&x) / p.abs_scale(&x)).abs();
    let tol = Float::with_val(64, 1) >> (ctx.bits() - ctx.guard_bits());
    if resid >= tol {
        return Err(Error::Inconsistency(format!("Cardano value fails {p}")));
    }
    Ok(CubicRadical {
        u,
        a: big_a,
        b: big_b,
        value: RealAP::from_computed(Float::with_val(ctx.bits(), x), ctx),
    })
}

/// Real parts `u_n = Re[sum_k (A_k + B_k sqrt(-N)) zeta^(kn)]`, `zeta = exp(2 pi i/p)`,
/// whose real `p`-th roots give `p x = rational_term + sum_n u_n^(1/p)`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ResolventData {
    pub n: u64,
    pub p: u32,
    pub rational_term: String,
    /// `(A_k, B_k)` for `k = 1 .. (p-1)/2`.
    pub pairs: Vec<(String, String)>,
}

impl ResolventData {
    pub fn new(n: u64, p: u32, rational_term: Integer, pairs: Vec<(Integer, Integer)>) -> Result<Self> {
        if p < 3 || p % 2 == 0 {
            return Err(Error::domain(format!("p = {p} is not an odd prime")));
        }
        if pairs.len() != (p as usize - 1) / 2 {
            return Err(Error::domain(format!("{} pairs for p = {p}", pairs.len())));
        }
        Ok(ResolventData {
            n,
            p,
            rational_term: rational_term.to_string(),
            pairs: pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect(),
        })
    }

    pub fn from_fixture(n: u64, fx: &ResolventFixture) -> Result<Self> {
        let pairs = fx
            .pairs
            .iter()
            .map(|(a, b)| Ok((parse_integer(a)?, parse_integer(b)?)))
            .collect::<Result<_>>()?;
        ResolventData::new(n, fx.p, parse_integer(&fx.rational_term)?, pairs)
    }

    pub fn integer_pairs(&self) -> Result<Vec<(Integer, Integer)>> {
        self.pairs
            .iter()
            .map(|(a, b)| Ok((parse_integer(a)?, parse_integer(b)?)))
            .collect()
    }

    /// Coefficient of `zeta^j` for `j = 1 .. p-1` (upper half conjugated).
    fn coefficient(&self, j: u32) -> Result<(Integer, Integer)> {
        let pairs = self.integer_pairs()?;
        let j = j % self.p;
        let half = (self.p - 1) / 2;
        Ok(if j <= half {
            pairs[j as usize - 1].clone()
        } else {
            let (a, b) = pairs[(self.p - j) as usize - 1].clone();
            (a, -b)
        })
    }

    /// Equal up to replacing `zeta` by `zeta^m`.
    pub fn equivalent(&self, other: &ResolventData) -> Result<bool> {
        if self.n != other.n || self.p != other.p || self.rational_term != other.rational_term {
            return Ok(false);
        }
        for m in 1..self.p {
            let mut same = true;
            for j in 1..=(self.p - 1) / 2 {
                if self.coefficient(j * m)? != other.coefficient(j)? {
                    same = false;
                    break;
                }
            }
            if same {
                return Ok(true);
            }
        }
        Ok(false)
    }
}

fn unit_roots(p: u32, prec: u32) -> Vec<(Float, Float)> {
    // (cos, sin) of 2 pi k / p
    (0..p)
        .map(|k| {
            let angle = pi_raw(prec) * 2u32 * k / p;
            let (s, c) = angle.sin_cos(Float::new(prec));
            (c, s)
        })
        .collect()
}

/// `u_n` for `n = 1 .. p-1`.
pub fn resolvent_powers(data: &ResolventData, ctx: &PrecisionContext) -> Result<Vec<RealAP>> {
    let work = ctx.bits() + 32;
    let pairs = data.integer_pairs()?;
    let zeta = unit_roots(data.p, work);
    let sqrt_n = Float::with_val(work, data.n).sqrt();
    Ok((1..data.p)
        .map(|n| {
            let mut u = Float::new(work);
            for (k, (a, b)) in pairs.iter().enumerate() {
                let (c, s) = &zeta[((k as u32 + 1) * n % data.p) as usize];
                u += Float::with_val(work, a * c);
                u -= Float::with_val(work, b * s) * &sqrt_n;
            }
            RealAP::from_computed(u, ctx)
        })
        .collect())
}

/// `(rational_term + sum_n u_n^(1/p)) / p` with real `p`-th roots.
pub fn radical_value(data: &ResolventData, ctx: &PrecisionContext) -> Result<RealAP> {
    let work = ctx.bits() + 32;
    let mut sum = Float::with_val(work, &parse_integer(&data.rational_term)?);
    for u in resolvent_powers(data, ctx)? {
        sum += real_root_raw(&Float::with_val(work, u.value()), data.p);
    }
    sum /= data.p;
    Ok(RealAP::from_computed(sum, ctx))
}

/// `radical_value`, checked to be a root of `q`.
pub fn radical_eval(data: &ResolventData, q: &IntPoly, ctx: &PrecisionContext) -> Result<RealAP> {
    if q.degree() != data.p as usize {
        return Err(Error::domain(format!("{q} does not have degree {}", data.p)));
    }
    let x = radical_value(data, ctx)?;
    let rel = relative_residual(q, x.value());
    if rel >= -f64::from(ctx.bits() - ctx.guard_bits()) {
        return Err(Error::Inconsistency(format!(
            "radical value is not a root of {q} (relative residual 2^{rel:.1}); data or sign error"
        )));
    }
    Ok(x)
}

/// `log2 |q(x)| / sum |c_i x^i|`.
pub fn relative_residual(q: &IntPoly, x: &Float) -> f64 {
    let prec = x.prec();
    let r = Float::with_val(prec, q.eval_real(x) / q.abs_scale(x)).abs();
    if r.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = r.to_f64_exp();
    m.log2() + f64::from(e)
}

/// Precision doublings tried by `derive_resolvents`.
pub const MAX_RESOLVENT_ESCALATIONS: u32 = 4;

fn lagrange_power(order: &[usize], roots: &[Complex], zeta: &[(Float, Float)], n: u32, p: u32, prec: u32) -> Complex {
    let mut l = Complex::new(prec);
    for (k, &i) in order.iter().enumerate() {
        let (c, s) = &zeta[(k as u32 * n % p) as usize];
        let z = Complex::with_val(prec, (c, s));
        l += Complex::with_val(prec, &z * &roots[i]);
    }
    Complex::with_val(prec, l.pow(p))
}

/// Orderings `y_0 .. y_{p-1}` with `y_0` real and `conj(y_k) = y_{p-k}`.
fn conjugate_orderings(roots: &[Complex], real: usize, tol: f64) -> Result<Vec<Vec<usize>>> {
    let p = roots.len();
    let half = (p - 1) / 2;
    let upper: Vec<usize> = (0..p).filter(|&i| i != real && roots[i].imag().is_sign_positive()).collect();
    if upper.len() != half {
        return Err(Error::domain("expected exactly one real root"));
    }
    let dist = |a: usize, c: &Complex| -> f64 {
        let d = Float::with_val(64, Complex::with_val(c.prec(), &roots[a] - c).abs_ref());
        if d.is_zero() {
            f64::NEG_INFINITY
        } else {
            d.to_f64().log2()
        }
    };
    let conj: Vec<usize> = upper
        .iter()
        .map(|&i| {
            let c = Complex::with_val(roots[i].prec(), roots[i].conj_ref());
            (0..p)
                .filter(|&j| j != i && dist(j, &c) < tol)
                .next()
                .ok_or_else(|| Error::Inconsistency("roots are not closed under conjugation".into()))
        })
        .collect::<Result<_>>()?;
    let mut out = Vec::new();
    let mut perm: Vec<usize> = (0..half).collect();
    permutations(&mut perm, 0, &mut |perm| {
        for signs in 0..(1u32 << half) {
            let mut order = vec![real; p];
            for k in 0..half {
                let (mut i, mut j) = (upper[perm[k]], conj[perm[k]]);
                if signs >> k & 1 == 1 {
                    std::mem::swap(&mut i, &mut j);
                }
                order[k + 1] = i;
                order[p - 1 - k] = j;
            }
            out.push(order);
        }
    });
    Ok(out)
}

fn permutations(v: &mut Vec<usize>, k: usize, f: &mut dyn FnMut(&[usize])) {
    if k == v.len() {
        f(v);
        return;
    }
    for i in k..v.len() {
        v.swap(k, i);
        permutations(v, k + 1, f);
        v.swap(k, i);
    }
}

fn recognize(u1: &Float, p: u32, n: u64, ctx: &PrecisionContext) -> Result<Option<Vec<(Integer, Integer)>>> {
    let work = ctx.bits() + 32;
    let zeta = unit_roots(p, work);
    let sqrt_n = Float::with_val(work, n).sqrt();
    let half = (p as usize - 1) / 2;
    let mut vals = vec![RealAP::from_computed(u1.clone(), ctx)];
    for k in 1..=half {
        vals.push(RealAP::from_computed(zeta[k].0.clone(), ctx));
    }
    for k in 1..=half {
        vals.push(RealAP::from_computed(Float::with_val(work, &zeta[k].1 * &sqrt_n), ctx));
    }
    let rel = match lindep(&vals, ctx) {
        Ok(r) => r.coefficients(),
        Err(Error::NotFound(_) | Error::Degenerate(_) | Error::Precision(_)) => return Ok(None),
        Err(e) => return Err(e),
    };
    let m0 = rel[0].clone();
    if m0 != 1 && m0 != -1 {
        return Ok(None);
    }
    Ok(Some(
        (0..half)
            .map(|k| {
                let a = Integer::from(-&rel[1 + k]) * &m0;
                let b = Integer::from(&rel[1 + half + k] * &m0);
                (a, b)
            })
            .collect(),
    ))
}

/// Search orderings of the roots of `q` whose Lagrange resolvents have
/// `p`-th powers of the form `Re[sum (A + B sqrt(-N)) zeta^k]`.
pub fn derive_resolvents(q: &IntPoly, n: u64, ctx: &PrecisionContext) -> Result<ResolventData> {
    let p = q.degree() as u32;
    if p != 5 && p != 7 && p != 3 {
        return Err(Error::domain(format!("degree {p} is not 3, 5 or 7")));
    }
    if !q.is_monic() {
        return Err(Error::domain(format!("{q} is not monic")));
    }
    let trace = Integer::from(-&q.coeffs()[p as usize - 1]);
    let mut c = *ctx;
    for _ in 0..=MAX_RESOLVENT_ESCALATIONS {
        let work = c.bits() + 32;
        let roots: Vec<Complex> = complex_roots(q, &c)?
            .into_iter()
            .map(ComplexAP::into_value)
            .map(|z| Complex::with_val(work, z))
            .collect();
        let reals: Vec<usize> = (0..roots.len()).filter(|&i| roots[i].imag().is_zero()).collect();
        if reals.len() != 1 {
            return Err(Error::domain(format!("{q} has {} real roots, expected 1", reals.len())));
        }
        let orders = conjugate_orderings(&roots, reals[0], -f64::from(c.bits()) / 2.0)?;
        let zeta = unit_roots(p, work);
        let found = orders
            .par_iter()
            .map(|order| {
                let u1 = lagrange_power(order, &roots, &zeta, 1, p, work);
                match recognize(u1.real(), p, n, &c)? {
                    Some(pairs) => {
                        let data = ResolventData::new(n, p, trace.clone(), pairs)?;
                        // every power must match, not just the first
                        let expected = resolvent_powers(&data, &c)?;
                        for (k, e) in expected.iter().enumerate() {
                            let got = lagrange_power(order, &roots, &zeta, k as u32 + 1, p, work);
                            let diff = Float::with_val(work, got.real() - e.value()).abs();
                            let scale = Float::with_val(work, e.value().abs_ref()).max(&Float::with_val(work, 1));
                            let rel = Float::with_val(work, diff / scale);
                            if !rel.is_zero() && rel.to_f64().log2() > -f64::from(c.bits()) / 2.0 {
                                return Ok(None);
                            }
                        }
                        Ok(Some(data))
                    }
                    None => Ok(None),
                }
            })
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .flatten()
            .next();
        if let Some(data) = found {
            radical_eval(&data, q, &c)?;
            return Ok(data);
        }
        c = c.doubled();
    }
    Err(Error::NotFound(format!(
        "no root ordering of {q} gave recognizable resolvents up to {} bits",
        c.bits() / 2
    )))
}
