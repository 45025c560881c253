//! Weber's `r`, the mod-64 signature, the class-invariant pair `[f, g]`,
//! `gamma_2`, Klein's `j` and the roots of the degree-`3h` Weber polynomial.

use std::fmt;
use std::ops::{Add, Mul, Sub};

use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::Serialize;

use crate::apnum::{
    eta_raw, exp_pi_i_rational, mag_exp, pi_raw, ComplexAP, ImagFloor, PrecisionContext, RealAP,
};
use crate::error::{Error, Result};
use crate::quadforms::{is_squarefree, Form};

/// Sign triple `[S1, S2, S3]` attached to `N mod 64`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
pub struct Signature {
    pub s1: i8,
    pub s2: i8,
    pub s3: i8,
}

impl Signature {
    pub fn new(s1: i8, s2: i8, s3: i8) -> Signature {
        Signature { s1, s2, s3 }
    }

    /// All eight sign choices, in the order of the residue table.
    pub fn all() -> [Signature; 8] {
        let mut out = [Signature::new(1, 1, 1); 8];
        for (i, sig) in out.iter_mut().enumerate() {
            let bit = |k: usize| if i >> (2 - k) & 1 == 0 { -1 } else { 1 };
            *sig = Signature::new(bit(0), bit(1), bit(2));
        }
        out
    }

    pub fn as_array(&self) -> [i8; 3] {
        [self.s1, self.s2, self.s3]
    }
}

impl fmt::Display for Signature {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = |x: i8| if x < 0 { "-1" } else { "+1" };
        write!(f, "[{},{},{}]", s(self.s1), s(self.s2), s(self.s3))
    }
}

// (residue mod 64, signature, k in alpha = sqrt2 cos(k pi / 16))
const RESIDUE_TABLE: [(u64, [i8; 3], u32); 8] = [
    (35, [-1, -1, -1], 11),
    (11, [-1, -1, 1], 9),
    (51, [-1, 1, -1], 13),
    (59, [-1, 1, 1], 15),
    (3, [1, -1, -1], 5),
    (43, [1, -1, 1], 7),
    (19, [1, 1, -1], 3),
    (27, [1, 1, 1], 1),
];

fn table_row(n: u64) -> Result<(u64, [i8; 3], u32)> {
    if n % 8 != 3 {
        return Err(Error::domain(format!("{n} is not congruent to 3 mod 8")));
    }
    let r = n % 64;
    RESIDUE_TABLE
        .iter()
        .copied()
        .find(|row| row.0 == r)
        .ok_or_else(|| Error::Inconsistency(format!("no signature row for {r} mod 64")))
}

pub fn signature(n: u64) -> Result<Signature> {
    let (_, s, _) = table_row(n)?;
    Ok(Signature::new(s[0], s[1], s[2]))
}

/// True for `N = 3` and `N = 27`, where `f = g = 0`.
pub fn outside_conjecture(n: u64) -> bool {
    n == 3 || n == 27
}

/// Admissible `N` for the Weber invariants: squarefree, `N = 3 mod 8`,
/// coprime to 3; `N = 3` and `N = 27` are accepted as edge cases.
pub fn check_weber_n(n: u64) -> Result<()> {
    if outside_conjecture(n) {
        return Ok(());
    }
    if n % 8 != 3 {
        return Err(Error::domain(format!("{n} is not congruent to 3 mod 8")));
    }
    if n % 3 == 0 {
        return Err(Error::domain(format!("{n} is divisible by 3")));
    }
    if !is_squarefree(n) {
        return Err(Error::domain(format!("{n} is not squarefree")));
    }
    Ok(())
}

/// `R(a, b, c)` at `prec` bits for a form of discriminant `-4N` with `b` even.
pub(crate) fn broker_root_raw(f: &Form, n: u64, prec: u32, guard: u32) -> Result<Complex> {
    if f.b.is_odd() {
        return Err(Error::domain(format!("{f} has odd middle coefficient")));
    }
    let work = prec + 32;
    let (a, b, c) = (&f.a, &f.b, &f.c);
    let sqrt_n = Float::with_val(work, n).sqrt();
    let half_b = Float::with_val(work, b) / 2u32;
    let z = Complex::with_val(work, (half_b / a, sqrt_n / a));
    let eta_z = eta_raw(&z, work, guard, ImagFloor::Reduced)?;

    let sign_of = |m: &Integer| -> i32 {
        // (-1)^((m^2-1)/8) for odd m
        let e = (Integer::from(m.square_ref()) - 1u32) / 8u32;
        if e.is_even() {
            1
        } else {
            -1
        }
    };

    let value = if c.is_even() {
        let ac2 = Integer::from(a * Integer::from(c.square_ref()));
        let num = -(b.clone() * (ac2 - a - Integer::from(c * 2u32)));
        let phase = exp_pi_i_rational(&num, 48, work);
        let half = Complex::with_val(work, &z / 2u32);
        let eta_half = eta_raw(&half, work, guard, ImagFloor::Half)?;
        let ratio = Complex::with_val(work, eta_half / &eta_z);
        -(phase * ratio) * sign_of(a)
    } else if a.is_even() {
        let ac2 = Integer::from(a * Integer::from(c.square_ref()));
        let num = -(b.clone() * (c.clone() - a - ac2 * 5u32));
        let phase = exp_pi_i_rational(&num, 48, work);
        let double = Complex::with_val(work, &z * 2u32);
        let eta_double = eta_raw(&double, work, guard, ImagFloor::Reduced)?;
        let ratio = Complex::with_val(work, eta_double / &eta_z) * Float::with_val(work, 2).sqrt();
        -(phase * ratio) * sign_of(c)
    } else {
        let a2c = Integer::from(a.square_ref()) * c;
        let num = -(b.clone() * (c.clone() - a - a2c) + 2u32);
        let phase = exp_pi_i_rational(&num, 48, work);
        let shifted = Complex::with_val(work, &z + 1u32) / 2u32;
        let eta_shift = eta_raw(&shifted, work, guard, ImagFloor::Half)?;
        phase * Complex::with_val(work, eta_shift / &eta_z)
    };
    Ok(Complex::with_val(prec, value))
}

/// Root `R(a, b, c)` of the degree-`3h` Weber polynomial for the class of `f`.
pub fn broker_root(f: &Form, n: u64, ctx: &PrecisionContext) -> Result<ComplexAP> {
    let disc = Integer::from(-4) * n;
    if f.discriminant() != disc {
        return Err(Error::domain(format!("{f} does not have discriminant {disc}")));
    }
    if f.a.is_even() && f.c.is_even() {
        return Err(Error::domain(format!("{f} has both outer coefficients even")));
    }
    let value = broker_root_raw(f, n, ctx.bits(), ctx.guard_bits())?;
    Ok(ComplexAP::from_computed(value, ctx))
}

/// Weber's `r = exp(-pi i/24) eta((1+sqrt(-N))/2) / eta(sqrt(-N))`.
pub fn weber_r(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    check_weber_n(n)?;
    let principal = Form {
        a: Integer::from(1),
        b: Integer::new(),
        c: Integer::from(n),
    };
    let root = broker_root(&principal, n, ctx)?;
    let r = root.to_real_checked(ctx)?;
    let quarter = Float::with_val(ctx.bits(), 2).root(4);
    if *r.value() <= quarter {
        return Err(Error::Inconsistency(format!("r({n}) is not above 2^(1/4)")));
    }
    Ok(r)
}

/// Ring operations shared by exact and floating evaluation of the identities.
pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Mul<i32, Output = Self>
{
}

impl<T> Scalar for T where
    T: Clone + Add<Output = T> + Sub<Output = T> + Mul<Output = T> + Mul<i32, Output = T>
{
}

fn powers<T: Scalar>(x: &T, n: usize) -> Vec<T> {
    // [x, x^2, ..., x^n]
    let mut out = Vec::with_capacity(n);
    out.push(x.clone());
    for i in 1..n {
        let next = out[i - 1].clone() * x.clone();
        out.push(next);
    }
    out
}

fn eval_terms<T: Scalar>(f: &T, g: &T, terms: &[(i32, usize, usize)]) -> T {
    let fp = powers(f, 8);
    let gp = powers(g, 8);
    let mono = |i: usize, j: usize| -> Option<T> {
        match (i, j) {
            (0, 0) => None,
            (0, j) => Some(gp[j - 1].clone()),
            (i, 0) => Some(fp[i - 1].clone()),
            (i, j) => Some(fp[i - 1].clone() * gp[j - 1].clone()),
        }
    };
    let mut acc: Option<T> = None;
    for &(coef, i, j) in terms {
        let term = mono(i, j).expect("constant terms are not used") * coef;
        acc = Some(match acc {
            None => term,
            Some(a) => a + term,
        });
    }
    acc.expect("nonempty polynomial")
}

// 2f^4 - 16f^3g^2 + 20f^2g^4 - 12f^2g - 8fg^6 + 16fg^3 - 2f + g^8 - 4g^5 + 3g^2
const ZERO_TERMS: [(i32, usize, usize); 10] = [
    (2, 4, 0),
    (-16, 3, 2),
    (20, 2, 4),
    (-12, 2, 1),
    (-8, 1, 6),
    (16, 1, 3),
    (-2, 1, 0),
    (1, 0, 8),
    (-4, 0, 5),
    (3, 0, 2),
];

// 8f^8 + 32f^6g + 16f^5 + 40f^4g^2 + 32f^3g + 16f^2g^3 + 6f^2 + 12fg^2 + g^4 + 2g
const GAMMA2_TERMS: [(i32, usize, usize); 10] = [
    (8, 8, 0),
    (32, 6, 1),
    (16, 5, 0),
    (40, 4, 2),
    (32, 3, 1),
    (16, 2, 3),
    (6, 2, 0),
    (12, 1, 2),
    (1, 0, 4),
    (2, 0, 1),
];

/// The constraint polynomial between `f` and `g`; vanishes on class-invariant pairs.
pub fn constraint_zero<T: Scalar>(f: &T, g: &T) -> T {
    eval_terms(f, g, &ZERO_TERMS)
}

/// `gamma_2` as a polynomial in `f` and `g`, free of `r`.
pub fn gamma2_from_fg<T: Scalar>(f: &T, g: &T) -> T {
    eval_terms(f, g, &GAMMA2_TERMS) * -32
}

/// Coefficients of the constraint polynomial as `(coef, deg_f, deg_g)`.
pub fn constraint_terms() -> &'static [(i32, usize, usize)] {
    &ZERO_TERMS
}

/// Coefficients of `-gamma_2/32` as `(coef, deg_f, deg_g)`.
pub fn gamma2_terms() -> &'static [(i32, usize, usize)] {
    &GAMMA2_TERMS
}

/// `s`, `f`, `g` from `r` and a sign triple, at the precision of `r`.
pub fn fg_from_r(r: &Float, sig: Signature) -> Result<(Float, Float, Float)> {
    let prec = r.prec();
    let r12 = Float::with_val(prec, (&r).pow(12u32));
    let inner = Float::with_val(prec, 1) / 8u32 - Float::with_val(prec, r12.recip_ref());
    if inner.is_sign_negative() {
        return Err(Error::domain("r is below 2^(1/4)"));
    }
    let t3 = inner.sqrt() * i32::from(sig.s3);
    let t2 = (Float::with_val(prec, 0.5) + t3).sqrt() * i32::from(sig.s2);
    let s = (Float::with_val(prec, 1) + t2).sqrt() * i32::from(sig.s1);
    let sqrt_r = Float::with_val(prec, r.sqrt_ref());
    let f = Float::with_val(prec, r / 2u32) - Float::with_val(prec, &s / &sqrt_r);
    let g = Float::with_val(prec, &s * &sqrt_r) - Float::with_val(prec, r.recip_ref());
    Ok((s, f, g))
}

/// `256/r^16 - r^8`.
pub fn gamma2_from_r(r: &Float) -> Float {
    let prec = r.prec();
    let r8 = Float::with_val(prec, (&r).pow(8u32));
    let r16 = Float::with_val(prec, r8.square_ref());
    Float::with_val(prec, 256u32 / r16) - r8
}

/// Everything attached to a single `N`.
#[derive(Debug, Clone, Serialize)]
pub struct InvariantBundle {
    pub n: u64,
    pub signature: Signature,
    pub r: RealAP,
    pub s: RealAP,
    pub f: RealAP,
    pub g: RealAP,
    pub gamma2: RealAP,
    pub j: RealAP,
    /// `N = 3` or `N = 27`: accepted, but outside the range of the conjecture.
    pub outside_conjecture: bool,
    pub bits: u32,
}

/// Residuals of the defining identities, as exponents relative to the
/// dominant term.
#[derive(Debug, Clone, Copy)]
pub struct BundleResiduals {
    pub cubic: i64,
    pub zero: i64,
    pub gamma2: i64,
}

fn relative_exp(residual: &Float, scale: &[&Float]) -> i64 {
    let top = scale.iter().filter_map(|x| mag_exp(x)).max().unwrap_or(0);
    match mag_exp(residual) {
        Some(m) => m - top.max(0),
        None => i64::MIN / 2,
    }
}

impl InvariantBundle {
    /// Residual exponents of the cubic, the constraint and the two routes to `gamma_2`.
    pub fn residuals(&self) -> BundleResiduals {
        let prec = self.r.prec();
        let (r, f, g) = (self.r.value(), self.f.value(), self.g.value());
        let r2 = Float::with_val(prec, r.square_ref());
        let r3 = Float::with_val(prec, &r2 * r);
        let fr2 = Float::with_val(prec, f * &r2);
        let gr = Float::with_val(prec, g * r);
        let cubic = Float::with_val(prec, &r3 - (Float::with_val(prec, &fr2 + &gr) + 1u32) * 2u32);
        let cubic_exp = relative_exp(&cubic, &[&r3, &fr2, &gr]);

        // the constraint is dominated by its largest monomial
        let zero = constraint_zero(f, g);
        let scale = ZERO_TERMS
            .iter()
            .map(|&(c, i, j)| {
                Float::with_val(prec, (&f).pow(i as u32)) * Float::with_val(prec, (&g).pow(j as u32)) * c
            })
            .collect::<Vec<_>>();
        let refs: Vec<&Float> = scale.iter().collect();
        let zero_exp = relative_exp(&zero, &refs);

        let via_fg = gamma2_from_fg(f, g);
        let diff = Float::with_val(prec, &via_fg - self.gamma2.value());
        let scale = GAMMA2_TERMS
            .iter()
            .map(|&(c, i, j)| {
                Float::with_val(prec, (&f).pow(i as u32)) * Float::with_val(prec, (&g).pow(j as u32)) * (32 * c)
            })
            .collect::<Vec<_>>();
        let mut refs: Vec<&Float> = scale.iter().collect();
        refs.push(self.gamma2.value());
        let gamma_exp = relative_exp(&diff, &refs);
        BundleResiduals {
            cubic: cubic_exp,
            zero: zero_exp,
            gamma2: gamma_exp,
        }
    }
}

fn fg_pair_at(n: u64, ctx: &PrecisionContext) -> Result<InvariantBundle> {
    let sig = signature(n)?;
    let r = weber_r(n, ctx)?;
    let (s, f, g) = fg_from_r(r.value(), sig)?;
    let gamma2 = gamma2_from_r(r.value());
    let j = Float::with_val(ctx.bits(), (&gamma2).pow(3u32));
    // each derived quantity loses a few bits to the handful of operations above
    let claim = |x: Float, loss: i64| RealAP::with_error(x, r.err_exp() + loss);
    let bundle = InvariantBundle {
        n,
        signature: sig,
        s: claim(s, 8),
        f: claim(f, 8),
        g: claim(g, 8),
        gamma2: claim(gamma2, 20),
        j: claim(j, 24),
        r,
        outside_conjecture: outside_conjecture(n),
        bits: ctx.bits(),
    };
    let res = bundle.residuals();
    let bits = i64::from(ctx.bits());
    let guard = i64::from(ctx.guard_bits());
    if res.cubic > -bits + guard {
        return Err(Error::precision(format!(
            "cubic residual 2^{} for N = {n} exceeds tolerance",
            res.cubic
        )));
    }
    if res.zero > -bits + 2 * guard || res.gamma2 > -bits + 2 * guard {
        return Err(Error::precision(format!(
            "constraint residuals 2^{}, 2^{} for N = {n} exceed tolerance",
            res.zero, res.gamma2
        )));
    }
    Ok(bundle)
}

/// The pair `[f, g]` with `r`, `s`, `gamma_2` and `j`; escalates precision on failure.
pub fn fg_pair(n: u64, ctx: &PrecisionContext) -> Result<InvariantBundle> {
    check_weber_n(n)?;
    let mut cur = *ctx;
    let mut last = None;
    for _ in 0..=4 {
        match fg_pair_at(n, &cur) {
            Ok(b) => return Ok(b),
            Err(e) if e.is_precision_related() => {
                last = Some(e);
                cur = cur.doubled();
            }
            Err(e) => return Err(e),
        }
    }
    Err(last.unwrap_or_else(|| Error::precision("escalation exhausted")))
}

/// Klein's `j` from the eta quotient at `z` and `z/2`.
pub fn klein_j(z: &ComplexAP, ctx: &PrecisionContext) -> Result<ComplexAP> {
    let work = ctx.bits() + 32;
    let zv = Complex::with_val(work, z.value());
    let eta_z = eta_raw(&zv, work, ctx.guard_bits(), ImagFloor::Reduced)?;
    let half = Complex::with_val(work, &zv / 2u32);
    let eta_half = eta_raw(&half, work, ctx.guard_bits(), ImagFloor::Half)?;
    let ratio = Complex::with_val(work, eta_half / &eta_z);
    let r8 = Complex::with_val(work, (&ratio).pow(8u32));
    let r16 = Complex::with_val(work, r8.square_ref());
    let inner = r16 + Complex::with_val(work, 16u32 / r8);
    let j = Complex::with_val(ctx.bits(), (&inner).pow(3u32));
    let err = crate::apnum::sum_exp(&[z.err_exp() + 8, ctx.accuracy_exp() + 4]);
    Ok(ComplexAP::with_error(j, err))
}

/// `j((1 + sqrt(-N))/2)` for odd `N`.
pub fn j_at_principal(n: u64, ctx: &PrecisionContext) -> Result<ComplexAP> {
    let prec = ctx.bits() + 16;
    let im = Float::with_val(prec, n).sqrt() / 2u32;
    let z = Complex::with_val(prec, (0.5, im));
    klein_j(&ComplexAP::from_computed(z, ctx), ctx)
}

/// The asymptotic prefactor `alpha(N) = sqrt2 cos(k pi/16)`.
#[derive(Debug, Clone, Serialize)]
pub struct Alpha {
    pub k: u32,
    /// Nested-radical form in terms of `beta_+-`.
    pub radical: String,
    pub value: RealAP,
}

/// `beta_+-` = sqrt(1/2 +- sqrt(1/8)).
pub fn beta(plus: bool, ctx: &PrecisionContext) -> RealAP {
    let prec = ctx.bits();
    let root8 = Float::with_val(prec, 8).sqrt().recip();
    let inner = if plus {
        Float::with_val(prec, 0.5) + root8
    } else {
        Float::with_val(prec, 0.5) - root8
    };
    RealAP::from_computed(inner.sqrt(), ctx)
}

pub fn alpha(n: u64, ctx: &PrecisionContext) -> Result<Alpha> {
    let (_, sig, k) = table_row(n)?;
    // sign from S1, +-beta from S2, beta_+ vs beta_- from S3
    let sign = if sig[0] < 0 { "-" } else { "+" };
    let pm = if sig[1] < 0 { "-" } else { "+" };
    let which = if sig[2] < 0 { "beta_-" } else { "beta_+" };
    let radical = format!("{sign}sqrt(1{pm}{which})");
    let prec = ctx.bits();
    let angle = pi_raw(prec + 8) * k / 16u32;
    let value = Float::with_val(prec, angle.cos() * Float::with_val(prec + 8, 2).sqrt());
    Ok(Alpha {
        k,
        radical,
        value: RealAP::from_computed(value, ctx),
    })
}

/// `alpha(N)` evaluated from its nested-radical form.
pub fn alpha_by_radicals(n: u64, ctx: &PrecisionContext) -> Result<RealAP> {
    let (_, sig, _) = table_row(n)?;
    let b = beta(sig[2] > 0, ctx);
    let one = RealAP::from_int(1, ctx);
    let inner = if sig[1] > 0 { &one + &b } else { &one - &b };
    let root = inner.sqrt()?;
    Ok(if sig[0] > 0 { root } else { -&root })
}
