//! Arbitrary-precision real and complex arithmetic.
//!
//! Values are MPFR/MPC numbers (through `rug`) tagged with a relative error
//! bound. On top of that sit the AGM, the elementary functions the rest of
//! the crate needs, and the Dedekind eta function evaluated by its theta
//! series.

mod context;
mod eta;
mod value;

pub use context::{bits_to_digits, digits_to_bits, PrecisionContext, DEFAULT_GUARD_BITS, MIN_BITS};
pub use eta::{eta, eta_product, eta_relaxed, theta_term_count, ImagFloor};
pub use value::{ComplexAP, ComplexDecimal, DecimalValue, RealAP, EXACT};

pub(crate) use eta::eta_raw;
pub(crate) use value::{mag_exp, sum_exp};

use rug::float::Constant;
use rug::{Complex, Float};

use crate::error::{Error, Result};

/// Arithmetic-geometric mean of two positive reals.
pub fn agm(a: &RealAP, b: &RealAP, ctx: &PrecisionContext) -> Result<RealAP> {
    if !a.is_positive() || !b.is_positive() {
        return Err(Error::domain("AGM needs positive arguments"));
    }
    let value = agm_raw(a.value(), b.value(), ctx.bits());
    let err = sum_exp(&[a.err_exp().max(b.err_exp()), ctx.accuracy_exp()]);
    Ok(RealAP::with_error(value, err))
}

/// AGM on raw floats at `prec` bits. Symmetric in its arguments.
pub(crate) fn agm_raw(a: &Float, b: &Float, prec: u32) -> Float {
    let work = prec + 32;
    // order the pair so the iteration is independent of argument order
    let (mut x, mut y) = if a >= b {
        (Float::with_val(work, a), Float::with_val(work, b))
    } else {
        (Float::with_val(work, b), Float::with_val(work, a))
    };
    let tol_exp = -(work as i32) + 4;
    for _ in 0..10_000 {
        let diff = Float::with_val(work, &x - &y).abs();
        if diff.is_zero() {
            break;
        }
        let rel_exp = diff.get_exp().unwrap_or(i32::MIN) - x.get_exp().unwrap_or(0);
        let mean = Float::with_val(work, &x + &y) / 2u32;
        let geo = Float::with_val(work, &x * &y).sqrt();
        x = mean;
        y = geo;
        if rel_exp < tol_exp {
            break;
        }
    }
    Float::with_val(prec, &x + &y) / 2u32
}

/// Elementary function selector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Elementary {
    Exp,
    Log,
    Sqrt,
    NthRoot(u32),
    Cos,
    Pi,
}

/// Evaluate an elementary function on real arguments.
pub fn elementary(kind: Elementary, args: &[RealAP], ctx: &PrecisionContext) -> Result<RealAP> {
    let arg = |i: usize| -> Result<&RealAP> {
        args.get(i)
            .ok_or_else(|| Error::domain(format!("{kind:?} needs an argument")))
    };
    match kind {
        Elementary::Pi => Ok(pi(ctx)),
        Elementary::Exp => Ok(arg(0)?.exp()),
        Elementary::Log => arg(0)?.ln(),
        Elementary::Sqrt => arg(0)?.sqrt(),
        Elementary::NthRoot(n) => arg(0)?.nth_root(n),
        Elementary::Cos => Ok(arg(0)?.cos()),
    }
}

pub fn pi(ctx: &PrecisionContext) -> RealAP {
    RealAP::from_computed(pi_raw(ctx.bits()), ctx)
}

pub(crate) fn pi_raw(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Principal complex `n`-th root.
pub fn complex_nth_root(z: &ComplexAP, n: u32, ctx: &PrecisionContext) -> Result<ComplexAP> {
    if n == 0 {
        return Err(Error::domain("zeroth root"));
    }
    let prec = ctx.bits();
    let w = z.value();
    if w.real().is_zero() && w.imag().is_zero() {
        return Ok(ComplexAP::with_error(Complex::new(prec), EXACT));
    }
    let ln = Complex::with_val(prec + 16, w.ln_ref());
    let root = Complex::with_val(prec, (ln / n).exp());
    Ok(ComplexAP::with_error(root, sum_exp(&[z.err_exp(), ctx.accuracy_exp()])))
}

/// Real `n`-th root of a raw float (odd roots of negatives allowed).
pub(crate) fn real_root_raw(x: &Float, n: u32) -> Float {
    Float::with_val(x.prec(), x.root_ref(n))
}

/// `exp(pi i * num / den)` at `prec` bits, reducing the angle exactly.
pub(crate) fn exp_pi_i_rational(num: &rug::Integer, den: u32, prec: u32) -> Complex {
    let period = rug::Integer::from(2 * den);
    let reduced = rug::Integer::from(num.modulo_ref(&period));
    let angle = pi_raw(prec + 8) * Float::with_val(prec + 8, &reduced) / den;
    let (s, c) = angle.sin_cos(Float::new(prec + 8));
    Complex::with_val(prec, (c, s))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx(bits: u32) -> PrecisionContext {
        PrecisionContext::new(bits).unwrap()
    }

    fn int(n: i64, c: &PrecisionContext) -> RealAP {
        RealAP::from_int(n, c)
    }

    #[test]
    fn agm_fixed_point_and_domain() {
        let c = ctx(256);
        let one = int(1, &c);
        let r = agm(&one, &one, &c).unwrap();
        assert_eq!(r.to_f64(), 1.0);
        assert!(agm(&int(0, &c), &one, &c).is_err());
        assert!(agm(&int(-1, &c), &one, &c).is_err());
    }

    #[test]
    fn agm_symmetric_under_complementary_modulus() {
        // k = 1/sqrt2 is its own complement: N = 1 case of the defining relation
        let c = ctx(256);
        let half = RealAP::from_rational(&rug::Rational::from((1, 2)), &c);
        let k = half.sqrt().unwrap();
        let kp = (&int(1, &c) - &(&k * &k)).sqrt().unwrap();
        let one = int(1, &c);
        let lhs = agm(&one, &k, &c).unwrap();
        let rhs = agm(&one, &kp, &c).unwrap();
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn agm_self_convergence() {
        let c1 = ctx(256);
        let c2 = ctx(512);
        let a = agm(&int(1, &c1), &int(2, &c1), &c1).unwrap();
        let b = agm(&int(1, &c2), &int(2, &c2), &c2).unwrap();
        let diff = Float::with_val(512, a.value() - b.value()).abs();
        assert!(diff < Float::with_val(64, Float::i_exp(1, -240)));
    }

    #[test]
    fn nthroot_negative_odd() {
        let c = ctx(256);
        let r = elementary(Elementary::NthRoot(3), &[int(-8, &c)], &c).unwrap();
        let diff = Float::with_val(256, r.value() + 2).abs();
        assert!(diff < 1e-70);
    }

    #[test]
    fn four_cos_pi_over_five() {
        let c = ctx(256);
        let p = pi(&c);
        let arg = &p / &int(5, &c);
        let lhs = &elementary(Elementary::Cos, &[arg], &c).unwrap() * &int(4, &c);
        let rhs = &int(1, &c) + &int(5, &c).sqrt().unwrap();
        assert!(lhs.agrees_with(&rhs));
    }

    #[test]
    fn six_cos_pi_over_seven_by_cube_roots() {
        let c = ctx(256);
        let prec = c.bits();
        let s27 = Float::with_val(prec, 27).sqrt();
        let plus = Complex::with_val(prec, (-3.5, Float::with_val(prec, &s27 * 3.5)));
        let minus = Complex::with_val(prec, (-3.5, Float::with_val(prec, &s27 * -3.5)));
        let a = complex_nth_root(&ComplexAP::from_computed(plus, &c), 3, &c).unwrap();
        let b = complex_nth_root(&ComplexAP::from_computed(minus, &c), 3, &c).unwrap();
        let sum = Complex::with_val(prec, a.value() + b.value());
        let lhs = Float::with_val(prec, pi_raw(prec) / 7u32).cos() * 6u32 - 1u32;
        let diff = Float::with_val(prec, sum.real() - &lhs).abs();
        assert!(diff < 1e-70, "diff {diff}");
        assert!(sum.imag().clone().abs() < 1e-70);
    }

    #[test]
    fn domain_errors() {
        let c = ctx(256);
        assert!(elementary(Elementary::Log, &[int(0, &c)], &c).is_err());
        assert!(elementary(Elementary::Sqrt, &[int(-1, &c)], &c).is_err());
        assert!(elementary(Elementary::Exp, &[], &c).is_err());
    }

    #[test]
    fn exact_angle_reduction() {
        let z = exp_pi_i_rational(&rug::Integer::from(-96 * 1000 + 24), 48, 200);
        // exp(pi i / 2) = i
        assert!(z.real().clone().abs() < 1e-55);
        assert!((z.imag().to_f64() - 1.0).abs() < 1e-15);
    }
}
