//! All complex roots of a squarefree integer polynomial (Aberth iteration).

use rug::{Complex, Float};

use super::IntPoly;
use crate::apnum::{ComplexAP, PrecisionContext};
use crate::error::{Error, Result};
use crate::exactpoly::discriminant;

const MAX_ITERATIONS: usize = 4000;

fn log2_rel(corr: &Complex, z: &Complex) -> f64 {
    let prec = z.prec().0;
    let c = Float::with_val(prec, corr.abs_ref());
    if c.is_zero() {
        return f64::NEG_INFINITY;
    }
    let zabs = Float::with_val(prec, z.abs_ref()).max(&Float::with_val(prec, 1));
    let r = Float::with_val(prec, c / zabs);
    let (m, e) = r.to_f64_exp();
    m.log2() + f64::from(e)
}

fn horner(coeffs: &[Float], z: &Complex, prec: u32) -> (Complex, Complex) {
    // value and derivative
    let mut v = Complex::with_val(prec, coeffs.last().unwrap());
    let mut d = Complex::new(prec);
    for c in coeffs.iter().rev().skip(1) {
        d = Complex::with_val(prec, &d * z) + &v;
        v = Complex::with_val(prec, &v * z) + c;
    }
    (v, d)
}

fn aberth(coeffs: &[Float], z: &mut [Complex], prec: u32) -> Result<()> {
    let target = -f64::from(prec) + 12.0;
    for z in z.iter_mut() {
        z.set_prec(prec);
    }
    for _ in 0..MAX_ITERATIONS {
        let mut worst = f64::NEG_INFINITY;
        for k in 0..z.len() {
            let (v, d) = horner(coeffs, &z[k], prec);
            if v.real().is_zero() && v.imag().is_zero() {
                continue;
            }
            let w = Complex::with_val(prec, &v / &d);
            let mut s = Complex::new(prec);
            for j in 0..z.len() {
                if j != k {
                    s += Complex::with_val(prec, &z[k] - &z[j]).recip();
                }
            }
            let denom = Complex::with_val(prec, 1) - Complex::with_val(prec, &w * &s);
            let corr = Complex::with_val(prec, w / denom);
            if !corr.real().is_finite() || !corr.imag().is_finite() {
                return Err(Error::precision("root iteration diverged"));
            }
            worst = worst.max(log2_rel(&corr, &z[k]));
            z[k] -= corr;
        }
        if worst < target {
            return Ok(());
        }
    }
    Err(Error::precision(format!("root iteration did not converge at {prec} bits")))
}

/// All complex roots of a squarefree `p`, each to the context's accuracy.
/// Roots whose imaginary part is below the accuracy are returned as real.
pub fn complex_roots(p: &IntPoly, ctx: &PrecisionContext) -> Result<Vec<ComplexAP>> {
    let d = p.degree();
    if d == 0 {
        return Ok(Vec::new());
    }
    if d >= 2 && discriminant(&p.to_zpoly())? == 0 {
        return Err(Error::Degenerate(format!("{p} has a repeated root")));
    }
    let work = ctx.bits() + 32;
    let lead = Float::with_val(work, p.lead());
    let coeffs: Vec<Float> = p
        .coeffs()
        .iter()
        .map(|c| Float::with_val(work, c) / &lead)
        .collect();

    // Fujiwara bound on the root moduli
    let bound = (0..d)
        .map(|i| {
            let a = coeffs[i].to_f64().abs();
            if a == 0.0 {
                0.0
            } else {
                (a.ln() / (d - i) as f64).exp()
            }
        })
        .fold(0.0f64, f64::max)
        * 2.0;
    let radius = bound.max(1.0);
    let mut z: Vec<Complex> = (0..d)
        .map(|k| {
            let t = std::f64::consts::TAU * k as f64 / d as f64 + 0.4;
            Complex::with_val(64, (radius * t.cos(), radius * t.sin()))
        })
        .collect();

    let mut prec = 128.min(work);
    loop {
        let stage: Vec<Float> = coeffs.iter().map(|c| Float::with_val(prec, c)).collect();
        aberth(&stage, &mut z, prec)?;
        if prec == work {
            break;
        }
        prec = (prec * 2).min(work);
    }

    let tol = -f64::from(ctx.bits()) / 2.0;
    Ok(z
        .into_iter()
        .map(|mut r| {
            let im = Float::with_val(work, r.imag().abs_ref());
            let scale = Float::with_val(work, r.abs_ref()).max(&Float::with_val(work, 1));
            let rel = Float::with_val(work, im / scale);
            let small = rel.is_zero() || {
                let (m, e) = rel.to_f64_exp();
                m.log2() + f64::from(e) < tol
            };
            if small {
                *r.mut_imag() = Float::new(work);
            }
            ComplexAP::from_computed(r, ctx)
        })
        .collect())
}

/// The real roots of `p`, ascending.
pub fn real_roots(p: &IntPoly, ctx: &PrecisionContext) -> Result<Vec<Float>> {
    let mut out: Vec<Float> = complex_roots(p, ctx)?
        .into_iter()
        .filter(|z| z.value().imag().is_zero())
        .map(|z| z.into_value().into_real_imag().0)
        .collect();
    out.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
    Ok(out)
}
