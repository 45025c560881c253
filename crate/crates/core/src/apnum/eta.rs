use std::f64::consts::{LN_2, PI};

use rug::float::Constant;
use rug::{Complex, Float};

use super::context::PrecisionContext;
use super::value::{sum_exp, ComplexAP};
use crate::error::{Error, Result};

/// Lower bound on `Im z` accepted by the theta-series evaluation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImagFloor {
    /// `sqrt(3)/2`: points coming from reduced forms.
    Reduced,
    /// `sqrt(3)/4`: half-arguments of reduced-form points.
    Half,
}

impl ImagFloor {
    pub fn value(self) -> f64 {
        match self {
            ImagFloor::Reduced => 3f64.sqrt() / 2.0,
            ImagFloor::Half => 3f64.sqrt() / 4.0,
        }
    }
}

/// Last index `k` of the pentagonal sum needed for a tail below `2^-(bits+guard)`.
pub fn theta_term_count(im: f64, bits: u32, guard: u32) -> usize {
    let target = f64::from(bits + guard) * LN_2 / (2.0 * PI * im);
    let mut k = 0usize;
    loop {
        k += 1;
        let pent = (k * (3 * k - 1) / 2) as f64;
        if pent > target {
            return k;
        }
    }
}

fn check_floor(z: &Complex, floor: ImagFloor) -> Result<f64> {
    let im = z.imag().to_f64();
    // slack for points sitting exactly on the boundary of the fundamental domain
    if !(im >= floor.value() - 1e-12) {
        return Err(Error::domain(format!(
            "eta argument has imaginary part {im} below {}",
            floor.value()
        )));
    }
    Ok(im)
}

/// Theta-series evaluation of eta at `prec` bits.
///
/// `eta(z) = q^(1/24) * sum_k (-1)^k q^(k(3k-1)/2)` with `q = exp(2 pi i z)`,
/// which is the series over `(6n+1)^2` rewritten with pentagonal exponents.
pub(crate) fn eta_raw(z: &Complex, prec: u32, guard: u32, floor: ImagFloor) -> Result<Complex> {
    let im = check_floor(z, floor)?;
    let work = prec + 16;
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let i_z = Complex::with_val(work, (-z.imag(), z.real()));
    let q = Complex::with_val(work, &i_z * &two_pi).exp();
    let q24 = (Complex::with_val(work, &i_z * &two_pi) / 24u32).exp();
    let kmax = theta_term_count(im, prec, guard);

    let mut sum = Complex::with_val(work, 1);
    // pos = q^P(k), neg = q^P(-k) = pos * q^k, step = q^(3k+1)
    let mut pos = Complex::with_val(work, 1);
    let mut step = q.clone();
    let mut q_k = Complex::with_val(work, 1);
    let q3 = Complex::with_val(work, q.square_ref()) * &q;
    for k in 1..=kmax {
        pos *= &step;
        q_k *= &q;
        let neg = Complex::with_val(work, &pos * &q_k);
        let pair = Complex::with_val(work, &pos + &neg);
        if k % 2 == 1 {
            sum -= pair;
        } else {
            sum += pair;
        }
        step *= &q3;
    }
    Ok(Complex::with_val(prec, sum * q24))
}

fn eta_checked(z: &ComplexAP, ctx: &PrecisionContext, floor: ImagFloor) -> Result<ComplexAP> {
    let value = eta_raw(z.value(), ctx.bits(), ctx.guard_bits(), floor)?;
    // eta is smooth in z; relative error of the argument scales by |d log eta / dz| <= 2 pi |z| here
    let zmag = z.value().real().to_f64().abs() + z.value().imag().to_f64().abs();
    let arg_err = z.err_exp() + ((zmag * 2.0 * PI).max(1.0)).log2().ceil() as i64 + 1;
    Ok(ComplexAP::with_error(value, sum_exp(&[arg_err, ctx.accuracy_exp()])))
}

/// Dedekind eta for `Im z >= sqrt(3)/2`.
pub fn eta(z: &ComplexAP, ctx: &PrecisionContext) -> Result<ComplexAP> {
    eta_checked(z, ctx, ImagFloor::Reduced)
}

/// Dedekind eta for `Im z >= sqrt(3)/4`, the half-argument call path.
pub fn eta_relaxed(z: &ComplexAP, ctx: &PrecisionContext) -> Result<ComplexAP> {
    eta_checked(z, ctx, ImagFloor::Half)
}

/// Dedekind eta from the infinite product `q^(1/24) prod (1 - q^k)`.
///
/// Slower than the theta series; kept as an independent route for checks.
pub fn eta_product(z: &ComplexAP, ctx: &PrecisionContext) -> Result<ComplexAP> {
    let im = check_floor(z.value(), ImagFloor::Half)?;
    let prec = ctx.bits();
    let work = prec + 32;
    let two_pi = Float::with_val(work, Constant::Pi) * 2u32;
    let zv = z.value();
    let i_z = Complex::with_val(work, (-zv.imag(), zv.real()));
    let q = Complex::with_val(work, &i_z * &two_pi).exp();
    let q24 = (Complex::with_val(work, &i_z * &two_pi) / 24u32).exp();
    let factors = (f64::from(prec + ctx.guard_bits()) * LN_2 / (2.0 * PI * im)).ceil() as usize + 2;
    let mut prod = Complex::with_val(work, 1);
    let mut qk = Complex::with_val(work, 1);
    for _ in 0..factors {
        qk *= &q;
        let factor = Complex::with_val(work, 1 - &qk);
        prod *= factor;
    }
    let value = Complex::with_val(prec, prod * q24);
    Ok(ComplexAP::with_error(value, sum_exp(&[z.err_exp() + 8, ctx.accuracy_exp()])))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::apnum::value::mag_exp;

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn point(re: f64, im: Float, prec: u32) -> Complex {
        Complex::with_val(prec, (re, im))
    }

    #[test]
    fn leading_term_on_imaginary_axis() {
        let c = ctx(256);
        let t = 6.0f64;
        let z = ComplexAP::from_computed(point(0.0, Float::with_val(256, t), 256), &c);
        let e = eta(&z, &c).unwrap();
        let lead = Float::with_val(256, -PI * t / 12.0).exp();
        let rel = Float::with_val(256, e.value().real() / &lead) - 1u32;
        assert!(rel.to_f64().abs() < 3.0 * (-2.0 * PI * t).exp());
        assert!(e.value().imag().to_f64().abs() < 1e-70);
    }

    #[test]
    fn theta_series_matches_product() {
        let c = ctx(600);
        let prec = c.bits();
        let im = Float::with_val(prec, 163).sqrt() / 2u32;
        let z = ComplexAP::from_computed(point(0.5, im, prec), &c);
        let a = eta(&z, &c).unwrap();
        let b = eta_product(&z, &c).unwrap();
        let diff = Complex::with_val(prec, a.value() - b.value()).abs().real().clone();
        let scale = mag_exp(a.value().real()).unwrap();
        assert!(mag_exp(&diff).unwrap_or(i64::MIN) < scale - 520);
    }

    #[test]
    fn rejects_points_below_the_floor() {
        let c = ctx(256);
        let z = ComplexAP::from_computed(point(0.1, Float::with_val(256, 0.5), 256), &c);
        assert!(eta(&z, &c).is_err());
        assert!(eta_relaxed(&z, &c).is_ok());
        let low = ComplexAP::from_computed(point(0.1, Float::with_val(256, 0.3), 256), &c);
        assert!(eta_relaxed(&low, &c).is_err());
    }

    #[test]
    fn term_count_grows_with_precision() {
        let small = theta_term_count(0.866, 256, 64);
        let large = theta_term_count(0.866, 4096, 64);
        assert!(small < large);
        assert!(large < 60);
    }
}
