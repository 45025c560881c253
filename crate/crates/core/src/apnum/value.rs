use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float, Integer, Rational};
use serde::{Deserialize, Serialize};

use super::context::PrecisionContext;
use crate::error::{Error, Result};

const LOG10_2: f64 = std::f64::consts::LOG10_2;

/// Exponent used to mark an exact value (no error at all).
pub const EXACT: i64 = i64::MIN / 4;

/// `ceil(log2(sum 2^e))`, conservative.
pub(crate) fn sum_exp(exps: &[i64]) -> i64 {
    let max = exps.iter().copied().max().unwrap_or(EXACT);
    if max <= EXACT {
        return EXACT;
    }
    let live: Vec<i64> = exps.iter().copied().filter(|&e| e > EXACT).collect();
    if live.len() == 1 {
        return max;
    }
    let total: f64 = live.iter().map(|&e| ((e - max) as f64).exp2()).sum();
    // tiny terms vanish in f64; never report a sum as equal to its largest term
    max + (total.log2().ceil() as i64).max(1)
}

/// Upper bound `e` with `|x| < 2^e`; `None` for zero.
pub(crate) fn mag_exp(x: &Float) -> Option<i64> {
    x.get_exp().map(i64::from)
}

fn rounding_exp(prec: u32) -> i64 {
    1 - i64::from(prec)
}

/// Real number at a working precision with a relative error bound.
///
/// The bound is `|x - value| <= 2^err_exp * |value|`; for a zero value it is
/// read as an absolute bound.
#[derive(Debug, Clone, PartialEq)]
pub struct RealAP {
    value: Float,
    err_exp: i64,
}

impl RealAP {
    /// Wrap a value computed under `ctx`; the context accuracy is claimed.
    pub fn from_computed(value: Float, ctx: &PrecisionContext) -> Self {
        RealAP {
            value,
            err_exp: ctx.accuracy_exp(),
        }
    }

    pub fn with_error(value: Float, err_exp: i64) -> Self {
        RealAP { value, err_exp }
    }

    pub fn exact(value: Float) -> Self {
        RealAP {
            value,
            err_exp: EXACT,
        }
    }

    pub fn from_int(n: impl Into<Integer>, ctx: &PrecisionContext) -> Self {
        let n: Integer = n.into();
        let value = Float::with_val(ctx.bits(), &n);
        let exact = value == n;
        RealAP {
            value,
            err_exp: if exact { EXACT } else { rounding_exp(ctx.bits()) },
        }
    }

    pub fn from_rational(q: &Rational, ctx: &PrecisionContext) -> Self {
        let value = Float::with_val(ctx.bits(), q);
        RealAP {
            value,
            err_exp: rounding_exp(ctx.bits()),
        }
    }

    pub fn value(&self) -> &Float {
        &self.value
    }

    pub fn into_value(self) -> Float {
        self.value
    }

    pub fn prec(&self) -> u32 {
        self.value.prec()
    }

    pub fn err_exp(&self) -> i64 {
        self.err_exp
    }

    pub fn is_exact(&self) -> bool {
        self.err_exp <= EXACT
    }

    /// Decimal digits covered by the error bound.
    pub fn certified_digits(&self) -> u64 {
        certified_digits_from_exp(self.err_exp, self.value.prec())
    }

    /// Absolute error bound as a float at the value's precision.
    pub fn abs_error(&self) -> Float {
        let prec = self.value.prec();
        if self.is_exact() {
            return Float::new(prec);
        }
        let base = match mag_exp(&self.value) {
            Some(m) => m + self.err_exp,
            None => self.err_exp,
        };
        Float::with_val(prec, Float::i_exp(1, base.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
    }

    /// True when `|self - other|` is within the combined error bounds.
    pub fn agrees_with(&self, other: &RealAP) -> bool {
        let prec = self.prec().max(other.prec());
        let diff = Float::with_val(prec, &self.value - &other.value).abs();
        let tol = Float::with_val(prec, self.abs_error() + other.abs_error());
        diff <= tol
    }

    pub fn is_positive(&self) -> bool {
        self.value.is_sign_positive() && !self.value.is_zero()
    }

    pub fn sqrt(&self) -> Result<RealAP> {
        if self.value.is_sign_negative() && !self.value.is_zero() {
            return Err(Error::domain("square root of a negative number"));
        }
        let prec = self.prec();
        Ok(RealAP {
            value: Float::with_val(prec, self.value.sqrt_ref()),
            err_exp: sum_exp(&[self.err_exp - 1, rounding_exp(prec)]),
        })
    }

    /// Real `n`-th root; negative radicands are allowed for odd `n`.
    pub fn nth_root(&self, n: u32) -> Result<RealAP> {
        if n == 0 {
            return Err(Error::domain("zeroth root"));
        }
        let negative = self.value.is_sign_negative() && !self.value.is_zero();
        if negative && n % 2 == 0 {
            return Err(Error::domain("even root of a negative number"));
        }
        let prec = self.prec();
        let value = Float::with_val(prec, self.value.root_ref(n));
        Ok(RealAP {
            value,
            err_exp: sum_exp(&[self.err_exp, rounding_exp(prec)]),
        })
    }

    pub fn exp(&self) -> RealAP {
        let prec = self.prec();
        let abs_in = match mag_exp(&self.value) {
            Some(m) => m + self.err_exp,
            None => self.err_exp,
        };
        RealAP {
            value: Float::with_val(prec, self.value.exp_ref()),
            err_exp: sum_exp(&[abs_in + 1, rounding_exp(prec)]),
        }
    }

    pub fn ln(&self) -> Result<RealAP> {
        if !self.is_positive() {
            return Err(Error::domain("logarithm of a nonpositive number"));
        }
        let prec = self.prec();
        let value = Float::with_val(prec, self.value.ln_ref());
        let err = match mag_exp(&value) {
            Some(m) => sum_exp(&[self.err_exp + 2 - m, rounding_exp(prec)]),
            None => sum_exp(&[self.err_exp + 1, rounding_exp(prec)]),
        };
        Ok(RealAP {
            value,
            err_exp: err,
        })
    }

    pub fn cos(&self) -> RealAP {
        let prec = self.prec();
        let abs_in = match mag_exp(&self.value) {
            Some(m) => m + self.err_exp,
            None => self.err_exp,
        };
        let value = Float::with_val(prec, self.value.cos_ref());
        let err = match mag_exp(&value) {
            Some(m) => sum_exp(&[abs_in + 1 - m, rounding_exp(prec)]),
            None => abs_in,
        };
        RealAP {
            value,
            err_exp: err,
        }
    }

    pub fn pow_u(&self, n: u32) -> RealAP {
        let prec = self.prec();
        let value = Float::with_val(prec, (&self.value).pow(n));
        let err = if self.is_exact() {
            rounding_exp(prec)
        } else {
            let n_exp = (f64::from(n.max(1))).log2().ceil() as i64;
            sum_exp(&[self.err_exp + n_exp + 1, rounding_exp(prec) + n_exp])
        };
        RealAP {
            value,
            err_exp: err,
        }
    }

    pub fn abs(&self) -> RealAP {
        RealAP {
            value: self.value.clone().abs(),
            err_exp: self.err_exp,
        }
    }

    /// Nearest integer and the distance to it.
    pub fn round_to_integer(&self) -> (Integer, Float) {
        let prec = self.prec();
        let rounded = self.value.to_integer_round(Round::Nearest).map(|(i, _)| i).unwrap_or_default();
        let dist = Float::with_val(prec, &self.value - &rounded).abs();
        (rounded, dist)
    }

    pub fn to_f64(&self) -> f64 {
        self.value.to_f64()
    }

    pub fn to_decimal(&self) -> DecimalValue {
        DecimalValue::from_float(&self.value, self.certified_digits())
    }
}

pub(crate) fn certified_digits_from_exp(err_exp: i64, prec: u32) -> u64 {
    let bound = if err_exp <= EXACT {
        i64::from(prec)
    } else {
        (-err_exp).min(i64::from(prec))
    };
    if bound <= 0 {
        0
    } else {
        (bound as f64 * LOG10_2).floor() as u64
    }
}

fn add_like(a: &RealAP, b: &RealAP, value: Float) -> RealAP {
    let prec = value.prec();
    let ea = mag_exp(&a.value).map(|m| m + a.err_exp).unwrap_or(a.err_exp);
    let eb = mag_exp(&b.value).map(|m| m + b.err_exp).unwrap_or(b.err_exp);
    let abs_err = sum_exp(&[ea, eb]);
    let err_exp = match mag_exp(&value) {
        Some(m) => sum_exp(&[abs_err - (m - 1), rounding_exp(prec)]),
        None => abs_err,
    };
    let err_exp = if a.is_exact() && b.is_exact() {
        if Float::with_val(prec + 64, &a.value + &b.value) == value {
            EXACT
        } else {
            rounding_exp(prec)
        }
    } else {
        err_exp
    };
    RealAP { value, err_exp }
}

impl Add for &RealAP {
    type Output = RealAP;
    fn add(self, rhs: &RealAP) -> RealAP {
        let prec = self.prec().max(rhs.prec());
        let value = Float::with_val(prec, &self.value + &rhs.value);
        add_like(self, rhs, value)
    }
}

impl Sub for &RealAP {
    type Output = RealAP;
    fn sub(self, rhs: &RealAP) -> RealAP {
        let prec = self.prec().max(rhs.prec());
        let value = Float::with_val(prec, &self.value - &rhs.value);
        add_like(self, rhs, value)
    }
}

impl Mul for &RealAP {
    type Output = RealAP;
    fn mul(self, rhs: &RealAP) -> RealAP {
        let prec = self.prec().max(rhs.prec());
        let value = Float::with_val(prec, &self.value * &rhs.value);
        let err_exp = if self.is_exact() && rhs.is_exact() {
            rounding_exp(prec)
        } else {
            sum_exp(&[self.err_exp, rhs.err_exp, self.err_exp + rhs.err_exp, rounding_exp(prec)])
        };
        RealAP { value, err_exp }
    }
}

impl Div for &RealAP {
    type Output = RealAP;
    fn div(self, rhs: &RealAP) -> RealAP {
        let prec = self.prec().max(rhs.prec());
        let value = Float::with_val(prec, &self.value / &rhs.value);
        let err_exp = sum_exp(&[self.err_exp, rhs.err_exp + 1, rounding_exp(prec)]);
        RealAP { value, err_exp }
    }
}

impl Neg for &RealAP {
    type Output = RealAP;
    fn neg(self) -> RealAP {
        RealAP {
            value: Float::with_val(self.prec(), -&self.value),
            err_exp: self.err_exp,
        }
    }
}

impl PartialOrd for RealAP {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        self.value.partial_cmp(&other.value)
    }
}

impl fmt::Display for RealAP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.certified_digits() as usize).max(1);
        let shown = f.precision().map(|p| p.min(digits)).unwrap_or(digits);
        write!(f, "{}", self.value.to_string_radix(10, Some(shown)))
    }
}

/// Complex number at a working precision with a relative error bound.
#[derive(Debug, Clone, PartialEq)]
pub struct ComplexAP {
    value: Complex,
    err_exp: i64,
}

fn complex_mag_exp(z: &Complex) -> Option<i64> {
    match (mag_exp(z.real()), mag_exp(z.imag())) {
        (None, None) => None,
        (Some(a), None) | (None, Some(a)) => Some(a),
        (Some(a), Some(b)) => Some(a.max(b) + 1),
    }
}

fn complex_min_exp(z: &Complex) -> Option<i64> {
    match (mag_exp(z.real()), mag_exp(z.imag())) {
        (None, None) => None,
        (Some(a), None) | (None, Some(a)) => Some(a - 1),
        (Some(a), Some(b)) => Some(a.max(b) - 1),
    }
}

impl ComplexAP {
    pub fn from_computed(value: Complex, ctx: &PrecisionContext) -> Self {
        ComplexAP {
            value,
            err_exp: ctx.accuracy_exp(),
        }
    }

    pub fn with_error(value: Complex, err_exp: i64) -> Self {
        ComplexAP { value, err_exp }
    }

    pub fn value(&self) -> &Complex {
        &self.value
    }

    pub fn into_value(self) -> Complex {
        self.value
    }

    pub fn prec(&self) -> u32 {
        self.value.prec().0
    }

    pub fn err_exp(&self) -> i64 {
        self.err_exp
    }

    pub fn real(&self) -> RealAP {
        self.project(self.value.real().clone())
    }

    pub fn imag(&self) -> RealAP {
        self.project(self.value.imag().clone())
    }

    fn project(&self, part: Float) -> RealAP {
        // absolute error of the whole value, re-expressed relative to the part
        let abs = complex_mag_exp(&self.value).map(|m| m + self.err_exp).unwrap_or(self.err_exp);
        let err_exp = match mag_exp(&part) {
            Some(m) => abs - (m - 1),
            None => abs,
        };
        RealAP::with_error(part, err_exp)
    }

    /// Absolute error bound.
    pub fn abs_error(&self) -> Float {
        let prec = self.prec();
        if self.err_exp <= EXACT {
            return Float::new(prec);
        }
        let base = complex_mag_exp(&self.value).map(|m| m + self.err_exp).unwrap_or(self.err_exp);
        Float::with_val(prec, Float::i_exp(1, base.clamp(i32::MIN as i64, i32::MAX as i64) as i32))
    }

    pub fn certified_digits(&self) -> u64 {
        certified_digits_from_exp(self.err_exp, self.prec())
    }

    /// Real part if the imaginary part is below `2^(-bits/2)` relative to the value.
    pub fn to_real_checked(&self, ctx: &PrecisionContext) -> Result<RealAP> {
        let im = self.value.imag().clone().abs();
        if !im.is_zero() {
            let scale = complex_mag_exp(&self.value).unwrap_or(0);
            let limit = scale - i64::from(ctx.bits() / 2);
            if mag_exp(&im).unwrap_or(i64::MIN) > limit {
                return Err(Error::precision(format!(
                    "imaginary part {:.3e} is not negligible",
                    im.to_f64()
                )));
            }
        }
        Ok(self.real())
    }

    pub fn mul(&self, rhs: &ComplexAP) -> ComplexAP {
        let prec = self.prec().max(rhs.prec());
        let value = Complex::with_val(prec, &self.value * &rhs.value);
        ComplexAP {
            value,
            err_exp: sum_exp(&[self.err_exp, rhs.err_exp, rounding_exp(prec) + 1]),
        }
    }

    pub fn div(&self, rhs: &ComplexAP) -> ComplexAP {
        let prec = self.prec().max(rhs.prec());
        let value = Complex::with_val(prec, &self.value / &rhs.value);
        ComplexAP {
            value,
            err_exp: sum_exp(&[self.err_exp, rhs.err_exp + 1, rounding_exp(prec) + 2]),
        }
    }

    pub fn add(&self, rhs: &ComplexAP) -> ComplexAP {
        let prec = self.prec().max(rhs.prec());
        let value = Complex::with_val(prec, &self.value + &rhs.value);
        let ea = complex_mag_exp(&self.value).map(|m| m + self.err_exp).unwrap_or(self.err_exp);
        let eb = complex_mag_exp(&rhs.value).map(|m| m + rhs.err_exp).unwrap_or(rhs.err_exp);
        let abs_err = sum_exp(&[ea, eb]);
        let err_exp = match complex_min_exp(&value) {
            Some(m) => sum_exp(&[abs_err - m, rounding_exp(prec) + 1]),
            None => abs_err,
        };
        ComplexAP { value, err_exp }
    }

    pub fn to_decimal(&self) -> ComplexDecimal {
        let digits = self.certified_digits();
        ComplexDecimal {
            re: DecimalValue::from_float(self.value.real(), digits),
            im: DecimalValue::from_float(self.value.imag(), digits),
        }
    }
}

impl fmt::Display for ComplexAP {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let digits = (self.certified_digits() as usize).clamp(1, 40);
        write!(
            f,
            "({} + {}i)",
            self.value.real().to_string_radix(10, Some(digits)),
            self.value.imag().to_string_radix(10, Some(digits))
        )
    }
}

/// Decimal serialization: `sign 0.digits x 10^exponent`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct DecimalValue {
    pub sign: String,
    pub digits: String,
    pub exponent: i64,
    pub certified_digits: u64,
}

impl DecimalValue {
    pub fn from_float(x: &Float, certified_digits: u64) -> Self {
        if x.is_zero() {
            return DecimalValue {
                sign: "+".into(),
                digits: "0".into(),
                exponent: 0,
                certified_digits,
            };
        }
        let shown = ((f64::from(x.prec()) * LOG10_2).floor() as usize).max(1);
        let (negative, digits, exp) = x.to_sign_string_exp(10, Some(shown));
        let digits = digits.trim_end_matches('0').to_string();
        DecimalValue {
            sign: if negative { "-".into() } else { "+".into() },
            digits: if digits.is_empty() { "0".into() } else { digits },
            exponent: i64::from(exp.unwrap_or(0)),
            certified_digits,
        }
    }

    pub fn to_float(&self, prec: u32) -> Result<Float> {
        if !self.digits.chars().all(|c| c.is_ascii_digit()) || self.digits.is_empty() {
            return Err(Error::Parse(format!("invalid digit string {:?}", self.digits)));
        }
        let sign = match self.sign.as_str() {
            "+" | "" => "",
            "-" => "-",
            other => return Err(Error::Parse(format!("invalid sign {other:?}"))),
        };
        let text = format!("{sign}0.{}e{}", self.digits, self.exponent);
        let parsed = Float::parse(&text).map_err(|e| Error::Parse(e.to_string()))?;
        Ok(Float::with_val(prec, parsed))
    }

    /// Plain scientific notation, e.g. `-6.40320e5`.
    pub fn to_scientific(&self) -> String {
        let mut it = self.digits.chars();
        let lead = it.next().unwrap_or('0');
        let rest: String = it.collect();
        let sign = if self.sign == "-" { "-" } else { "" };
        if rest.is_empty() {
            format!("{sign}{lead}e{}", self.exponent - 1)
        } else {
            format!("{sign}{lead}.{rest}e{}", self.exponent - 1)
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ComplexDecimal {
    pub re: DecimalValue,
    pub im: DecimalValue,
}

impl Serialize for RealAP {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal().serialize(s)
    }
}

impl Serialize for ComplexAP {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_decimal().serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ctx() -> PrecisionContext {
        PrecisionContext::new(256).unwrap()
    }

    #[test]
    fn sum_exp_is_conservative() {
        assert_eq!(sum_exp(&[-10, -10]), -9);
        assert_eq!(sum_exp(&[-10, -100]), -9);
        assert_eq!(sum_exp(&[EXACT, -20]), -20);
        assert_eq!(sum_exp(&[EXACT]), EXACT);
    }

    #[test]
    fn integers_are_exact() {
        let a = RealAP::from_int(7, &ctx());
        let b = RealAP::from_int(-3, &ctx());
        assert!(a.is_exact());
        let s = &a + &b;
        assert!(s.is_exact());
        assert_eq!(s.value().to_f64(), 4.0);
    }

    #[test]
    fn cancellation_inflates_relative_error() {
        let c = ctx();
        let one = RealAP::from_computed(Float::with_val(256, 1), &c);
        let almost = RealAP::from_computed(Float::with_val(256, 1) - Float::with_val(256, Float::i_exp(1, -100)), &c);
        let diff = &one - &almost;
        // absolute error ~2^-192 against a value of 2^-100
        assert!(diff.err_exp() > c.accuracy_exp() + 90);
    }

    #[test]
    fn decimal_round_trip() {
        let c = ctx();
        let x = RealAP::from_computed(Float::with_val(256, Float::parse("-1234.56789").unwrap()), &c);
        let dec = x.to_decimal();
        assert_eq!(dec.sign, "-");
        assert_eq!(dec.exponent, 4);
        assert!(dec.digits.starts_with("123456789"));
        let back = dec.to_float(256).unwrap();
        let diff = Float::with_val(256, &back - x.value()).abs();
        assert!(diff < 1e-60);
        assert_eq!(dec.certified_digits, x.certified_digits());
        assert_eq!(dec.to_scientific()[..10].to_string(), "-1.2345678");
    }

    #[test]
    fn roots_of_negative_numbers() {
        let m8 = RealAP::from_int(-8, &ctx());
        let r = m8.nth_root(3).unwrap();
        assert!((r.to_f64() + 2.0).abs() < 1e-30);
        assert!(m8.nth_root(2).is_err());
        assert!(m8.sqrt().is_err());
    }

    #[test]
    fn real_projection_checks_imaginary_part() {
        let c = ctx();
        let z = ComplexAP::from_computed(Complex::with_val(256, (2.5, 1e-70)), &c);
        assert!(z.to_real_checked(&c).is_ok());
        let w = ComplexAP::from_computed(Complex::with_val(256, (2.5, 1e-10)), &c);
        assert!(w.to_real_checked(&c).is_err());
    }
}
