//! Chowla–Selberg products, the algebraic factor `lambda`, the singular
//! modulus `k_N` and the complete elliptic integral `K_N`.

use rayon::prelude::*;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::apnum::{agm_raw, eta_raw, pi_raw, sum_exp, ImagFloor, PrecisionContext, RealAP};
use crate::error::{Error, Result};
use crate::invariants::{check_weber_n, weber_r};
use crate::quadforms::{is_squarefree, kronecker_i64, reduced_forms, Form};

/// Largest `N` for which the direct Gamma product is attempted.
pub const GN_DIRECT_LIMIT: u64 = 200;

fn check_n(n: u64) -> Result<()> {
    if n % 4 != 3 {
        return Err(Error::domain(format!("{n} is not congruent to 3 mod 4")));
    }
    if !is_squarefree(n) {
        return Err(Error::domain(format!("{n} is not squarefree")));
    }
    Ok(())
}

fn log2_ceil(n: u64) -> u32 {
    64 - n.max(1).leading_zeros()
}

fn classes(n: u64) -> Result<Vec<Form>> {
    let disc = Integer::from(n) * -1i32;
    reduced_forms(&disc)
}

/// `h(-N)` by counting reduced forms.
pub fn class_number(n: u64) -> Result<u64> {
    check_n(n)?;
    Ok(classes(n)?.len() as u64)
}

/// `(b + sqrt(-N)) / 2a` for a reduced form of discriminant `-N`.
fn cm_point(f: &Form, n: u64, prec: u32) -> Complex {
    let re = Float::with_val(prec, &f.b) / Float::with_val(prec, &f.a) / 2u32;
    let im = Float::with_val(prec, n).sqrt() / Float::with_val(prec, &f.a) / 2u32;
    Complex::with_val(prec, (re, im))
}

fn eta_abs(f: &Form, n: u64, prec: u32, guard: u32) -> Result<Float> {
    let z = cm_point(f, n, prec);
    let e = eta_raw(&z, prec, guard, ImagFloor::Reduced)?;
    Ok(Float::with_val(prec, e.abs_ref()))
}

/// `prod_{k=1}^{N-1} Gamma(k/N)^((-N/k))`.
pub fn gn_direct(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    check_n(n)?;
    if n > GN_DIRECT_LIMIT {
        return Err(Error::Refused(format!(
            "direct Gamma product for N = {n} exceeds the limit {GN_DIRECT_LIMIT}"
        )));
    }
    let work = ctx.bits() + 32 + log2_ceil(n);
    let nn = i64::try_from(n).map_err(|_| Error::domain("N out of range"))?;
    let log = (1..n)
        .into_par_iter()
        .filter_map(|k| {
            let chi = kronecker_i64(-nn, k);
            if chi == 0 {
                return None;
            }
            let x = Float::with_val(work, k) / n;
            let lg = x.ln_gamma();
            Some(if chi > 0 { lg } else { -lg })
        })
        .reduce(|| Float::new(work), |a, b| a + b);
    let value = Float::with_val(ctx.bits(), log.exp());
    Ok(RealAP::with_error(value, ctx.accuracy_exp() + i64::from(log2_ceil(n))))
}

/// `(2 pi N)^h prod (1/a) |eta((b + sqrt(-N)) / 2a)|^4` over reduced classes.
pub fn gn_eta(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    check_n(n)?;
    if n <= 3 {
        return Err(Error::domain("the eta route needs N > 3"));
    }
    let forms = classes(n)?;
    let h = forms.len() as u32;
    let work = ctx.bits() + 32 + log2_ceil(u64::from(h));
    let guard = ctx.guard_bits();
    let factors: Vec<Float> = forms
        .par_iter()
        .map(|f| {
            let e = eta_abs(f, n, work, guard)?;
            let e4 = Float::with_val(work, e.square_ref()).square();
            Ok(e4 / Float::with_val(work, &f.a))
        })
        .collect::<Result<_>>()?;
    let mut prod = Float::with_val(work, pi_raw(work) * 2u32 * n);
    prod = prod.pow(h);
    for f in factors {
        prod *= f;
    }
    let err = ctx.accuracy_exp() + i64::from(log2_ceil(u64::from(h))) + 4;
    Ok(RealAP::with_error(Float::with_val(ctx.bits(), prod), err))
}

/// `prod a^(1/4) |eta((1 + sqrt(-N))/2) / eta((b + sqrt(-N)) / 2a)|`.
pub fn lambda(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    check_n(n)?;
    let forms = classes(n)?;
    if forms.len() == 1 {
        return Ok(RealAP::exact(Float::with_val(ctx.bits(), 1)));
    }
    let h = forms.len() as u64;
    let work = ctx.bits() + 32 + log2_ceil(h);
    let guard = ctx.guard_bits();
    let principal = forms
        .iter()
        .find(|f| f.a == 1)
        .ok_or_else(|| Error::Inconsistency("no principal form".into()))?;
    let e0 = eta_abs(principal, n, work, guard)?;
    let logs: Vec<Float> = forms
        .par_iter()
        .map(|f| {
            let e = eta_abs(f, n, work, guard)?;
            let a = Float::with_val(work, &f.a).ln() / 4u32;
            Ok(a + Float::with_val(work, &e0 / e).ln())
        })
        .collect::<Result<_>>()?;
    let sum = logs.into_iter().fold(Float::new(work), |acc, x| acc + x);
    let err = ctx.accuracy_exp() + i64::from(log2_ceil(h)) + 4;
    Ok(RealAP::with_error(Float::with_val(ctx.bits(), sum.exp()), err))
}

#[derive(Debug, Clone)]
struct Singular {
    k: Float,
    kp: Float,
    r: Float,
    residual: Float,
}

fn singular_raw(n: u64, ctx: &PrecisionContext) -> Result<Singular> {
    check_weber_n(n)?;
    let work = ctx.bits() + 32;
    let wctx = ctx.widened(32);
    let r = Float::with_val(work, weber_r(n, &wctx)?.value());
    // k^2 = 1/2 - sqrt(1/4 - 16/r^24), written without cancellation
    let eps = Float::with_val(work, 16u32 / Float::with_val(work, (&r).pow(24u32)));
    let quarter = Float::with_val(work, 0.25);
    let root = Float::with_val(work, &quarter - &eps).sqrt();
    let k2 = Float::with_val(work, &eps / (root + 0.5f64));
    let k = Float::with_val(work, k2.sqrt_ref());
    let kp = Float::with_val(work, 1u32 - &k2).sqrt();
    let lhs = agm_raw(&Float::with_val(work, 1), &kp, work);
    let rhs = agm_raw(&Float::with_val(work, 1), &k, work) * Float::with_val(work, n).sqrt();
    let residual = Float::with_val(work, lhs - rhs).abs();
    let tol = Float::with_val(work, 1) >> (ctx.bits() - ctx.guard_bits());
    if residual >= tol {
        return Err(Error::precision(format!(
            "k_{n} fails AGM(1, k') = sqrt(N) AGM(1, k) (residual 2^{})",
            residual.get_exp().unwrap_or(0)
        )));
    }
    Ok(Singular { k, kp, r, residual })
}

/// The singular modulus `k_N`, checked against its defining AGM relation.
pub fn singular_k(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    let s = singular_raw(n, ctx)?;
    Ok(RealAP::with_error(Float::with_val(ctx.bits(), s.k), ctx.accuracy_exp() + 8))
}

/// `|AGM(1, sqrt(1 - k^2)) - sqrt(N) AGM(1, k)|`.
pub fn k_relation_residual(n: u64, ctx: &PrecisionContext) -> Result<Float> {
    Ok(singular_raw(n, ctx)?.residual)
}

/// `K_N = (pi/2) / AGM(1, sqrt(1 - k_N^2))`.
pub fn elliptic_k(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    let s = singular_raw(n, ctx)?;
    let work = s.k.prec();
    let m = agm_raw(&Float::with_val(work, 1), &s.kp, work);
    let value = pi_raw(work) / 2u32 / m;
    Ok(RealAP::with_error(Float::with_val(ctx.bits(), value), ctx.accuracy_exp() + 4))
}

/// `|K_N - (r/2)^2 sqrt((2 pi / N) (lambda^4 G_N)^(1/h))|`, the two sides
/// coming from independent pipelines (AGM versus eta products).
pub fn eq_w_check(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    let wctx = ctx.widened(32);
    let work = wctx.bits();
    let s = singular_raw(n, ctx)?;
    let big_k = {
        let m = agm_raw(&Float::with_val(work, 1), &s.kp, work);
        pi_raw(work) / 2u32 / m
    };
    let h = class_number(n)? as u32;
    let lam = lambda(n, &wctx)?;
    let g = gn_eta(n, &wctx)?;
    let lam4 = Float::with_val(work, lam.value().pow(4u32));
    let inner = Float::with_val(work, lam4 * g.value()).root(h);
    let two_pi_over_n = pi_raw(work) * 2u32 / n;
    let sq = Float::with_val(work, two_pi_over_n * inner).sqrt();
    let half_r = Float::with_val(work, &s.r / 2u32);
    let rhs = Float::with_val(work, half_r.square_ref()) * sq;
    let diff = Float::with_val(ctx.bits(), big_k - rhs).abs();
    let err = sum_exp(&[lam.err_exp(), g.err_exp(), ctx.accuracy_exp()]);
    Ok(RealAP::with_error(diff, err))
}

#[derive(Debug, Clone, Serialize)]
pub struct ChowlaResult {
    pub n: u64,
    pub h: u64,
    pub g_n: RealAP,
    pub lambda: RealAP,
    pub k_n: RealAP,
    pub big_k_n: RealAP,
    pub eq_w_residual: RealAP,
}

pub fn chowla(n: u64, ctx: &PrecisionContext) -> Result<ChowlaResult> {
    Ok(ChowlaResult {
        n,
        h: class_number(n)?,
        g_n: gn_eta(n, ctx)?,
        lambda: lambda(n, ctx)?,
        k_n: singular_k(n, ctx)?,
        big_k_n: elliptic_k(n, ctx)?,
        eq_w_residual: eq_w_check(n, ctx)?,
    })
}
