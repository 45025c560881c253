//! Integer polynomials from high-precision conjugates with certified rounding.

mod intpoly;
mod roots;

use rayon::prelude::*;
use rug::float::Round;
use rug::ops::Pow;
use rug::{Complex, Float, Integer};
use serde::Serialize;

pub use intpoly::IntPoly;
pub use roots::{complex_roots, real_roots};

use crate::apnum::{ComplexAP, PrecisionContext};
use crate::error::{Error, Result};
use crate::exactpoly::{discriminant, squarefree_part};
use crate::invariants::{broker_root, check_weber_n, klein_j};
use crate::quadforms::{enumerate, is_squarefree, power, reduce, Form};

/// Precision of the pass that only measures root sizes.
const MAGNITUDE_BITS: u32 = 192;

/// Precision doublings allowed after the initial estimate.
pub const MAX_ESCALATIONS: u32 = 4;

#[derive(Debug, Clone, Serialize)]
pub struct RoundingCertificate {
    /// `log2` of the largest distance from a coefficient to its integer.
    pub max_distance_log2: f64,
    /// `log2` of the a-priori bound on coefficient error.
    pub error_bound_log2: f64,
    pub bits_used: u32,
    pub escalations: u32,
    /// Precision at which the coefficients were recomputed and matched.
    pub verified_bits: Option<u32>,
}

#[derive(Debug, Clone, Serialize)]
pub struct CertifiedPoly {
    #[serde(flatten)]
    pub poly: IntPoly,
    pub certificate: RoundingCertificate,
}

fn log2_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let (m, e) = x.to_f64_exp();
    m.abs().log2() + f64::from(e)
}

fn log2_abs_c(z: &Complex) -> f64 {
    log2_abs(&Float::with_val(z.prec().0, z.abs_ref()))
}

/// `sum log2(1 + |root|)`, bounding `log2` of every coefficient.
pub fn coefficient_bits(roots: &[Complex]) -> f64 {
    roots
        .iter()
        .map(|r| {
            let a = log2_abs_c(r);
            if a < 0.0 {
                (1.0 + a.exp2()).log2()
            } else {
                a + (1.0 + (-a).exp2()).log2()
            }
        })
        .sum()
}

fn mul_poly(a: &[Complex], b: &[Complex], prec: u32) -> Vec<Complex> {
    let mut out = vec![Complex::new(prec); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += Complex::with_val(prec, x * y);
        }
    }
    out
}

/// `prod (x - r)` by a balanced product tree, constant term first.
fn product_tree(roots: &[Complex], prec: u32) -> Vec<Complex> {
    match roots.len() {
        0 => vec![Complex::with_val(prec, 1)],
        1 => vec![Complex::with_val(prec, -&roots[0]), Complex::with_val(prec, 1)],
        n => {
            let (l, r) = roots.split_at(n / 2);
            let (a, b) = if n > 16 {
                rayon::join(|| product_tree(l, prec), || product_tree(r, prec))
            } else {
                (product_tree(l, prec), product_tree(r, prec))
            };
            mul_poly(&a, &b, prec)
        }
    }
}

/// Monic integer polynomial with the given roots, rounded with a certificate.
pub fn poly_from_roots(roots: &[ComplexAP], ctx: &PrecisionContext) -> Result<(IntPoly, RoundingCertificate)> {
    if roots.is_empty() {
        return Err(Error::domain("no roots given"));
    }
    let prec = ctx.bits() + 16;
    let raw: Vec<Complex> = roots.iter().map(|r| Complex::with_val(prec, r.value())).collect();
    let coeffs = product_tree(&raw, prec);
    let deg = roots.len() as f64;
    let root_err = roots.iter().map(ComplexAP::err_exp).max().unwrap_or(0).max(ctx.accuracy_exp());
    let error_bound = root_err as f64 + coefficient_bits(&raw) + deg.log2() + 2.0;
    let limit = -f64::from(ctx.guard_bits()) / 2.0;

    let mut ints = Vec::with_capacity(coeffs.len());
    let mut max_dist = f64::NEG_INFINITY;
    for c in &coeffs {
        let re = c.real();
        let n = re
            .to_integer_round(Round::Nearest)
            .map(|(z, _)| z)
            .ok_or_else(|| Error::precision("non-finite coefficient"))?;
        let dist = log2_abs(&Float::with_val(prec, re - &n));
        let im = log2_abs(c.imag());
        max_dist = max_dist.max(dist).max(im);
        ints.push(n);
    }
    if error_bound >= limit || max_dist >= limit {
        return Err(Error::precision(format!(
            "rounding margin too small at {} bits (error bound 2^{:.1}, distance 2^{:.1})",
            ctx.bits(),
            error_bound,
            max_dist
        )));
    }
    let poly = IntPoly::new(ints)?;
    Ok((
        poly,
        RoundingCertificate {
            max_distance_log2: max_dist,
            error_bound_log2: error_bound,
            bits_used: ctx.bits(),
            escalations: 0,
            verified_bits: None,
        },
    ))
}

/// Run `roots_at` at a size-derived precision, escalate on rounding
/// failure, and accept only when a 1.25x recomputation agrees.
fn build<F>(roots_at: F, ctx: &PrecisionContext) -> Result<CertifiedPoly>
where
    F: Fn(&PrecisionContext) -> Result<Vec<ComplexAP>>,
{
    let probe = PrecisionContext::with_guard(MAGNITUDE_BITS, ctx.guard_bits().min(MAGNITUDE_BITS / 2))?;
    let sizes: Vec<Complex> = roots_at(&probe)?.into_iter().map(ComplexAP::into_value).collect();
    let deg = sizes.len().max(2) as f64;
    let need = coefficient_bits(&sizes) + f64::from(2 * ctx.guard_bits()) + 64.0 + 2.0 * deg.log2();
    let mut c = ctx.at_least(need.ceil() as u32);
    let mut last = None;
    for escalation in 0..=MAX_ESCALATIONS {
        match poly_from_roots(&roots_at(&c)?, &c) {
            Ok((poly, mut cert)) => {
                let check = c.scaled(1.25);
                match poly_from_roots(&roots_at(&check)?, &check) {
                    Ok((again, _)) if again == poly => {
                        cert.escalations = escalation;
                        cert.verified_bits = Some(check.bits());
                        return Ok(CertifiedPoly { poly, certificate: cert });
                    }
                    Ok(_) => {
                        last = Some(Error::precision(format!(
                            "coefficients at {} bits change at {} bits",
                            c.bits(),
                            check.bits()
                        )))
                    }
                    Err(e) => last = Some(e),
                }
            }
            Err(e @ Error::Precision(_)) => last = Some(e),
            Err(e) => return Err(e),
        }
        c = c.doubled();
    }
    Err(last.unwrap_or_else(|| Error::precision("precision escalation exhausted")))
}

fn check_hilbert_n(n: u64) -> Result<()> {
    if n <= 3 || n % 4 != 3 {
        return Err(Error::domain(format!("{n} is not a discriminant -N with N = 3 mod 4, N > 3")));
    }
    if !is_squarefree(n) {
        return Err(Error::domain(format!("{n} is not squarefree")));
    }
    Ok(())
}

/// `j((b + sqrt(-N)) / 2a)` over the reduced forms of discriminant `-N`.
pub fn hilbert_roots(n: u64, ctx: &PrecisionContext) -> Result<Vec<ComplexAP>> {
    check_hilbert_n(n)?;
    let group = enumerate(&(Integer::from(n) * -1i32))?;
    group
        .classes
        .par_iter()
        .map(|f| {
            let prec = ctx.bits() + 16;
            let re = Float::with_val(prec, &f.b) / Float::with_val(prec, &f.a) / 2u32;
            let im = Float::with_val(prec, n).sqrt() / Float::with_val(prec, &f.a) / 2u32;
            let z = ComplexAP::from_computed(Complex::with_val(prec, (re, im)), ctx);
            klein_j(&z, ctx)
        })
        .collect()
}

/// Hilbert class polynomial of `Q(sqrt(-N))`.
pub fn hilbert_poly(n: u64, ctx: &PrecisionContext) -> Result<CertifiedPoly> {
    check_hilbert_n(n)?;
    build(|c| hilbert_roots(n, c), ctx)
}

/// The `3h` roots `R(a, b, c)` over the reduced forms of discriminant `-4N`.
pub fn weber_roots(n: u64, ctx: &PrecisionContext) -> Result<Vec<ComplexAP>> {
    check_weber_n(n)?;
    let group = enumerate(&(Integer::from(n) * -4i32))?;
    group.classes.par_iter().map(|f| broker_root(f, n, ctx)).collect()
}

/// Degree-`3h` polynomial whose roots are the conjugates of `r`.
pub fn weber_poly(n: u64, ctx: &PrecisionContext) -> Result<CertifiedPoly> {
    build(|c| weber_roots(n, c), ctx)
}

fn gamma2_of(r: &Complex) -> Complex {
    let prec = r.prec().0;
    let r8 = Complex::with_val(prec, r.pow(8u32));
    let r16 = Complex::with_val(prec, r8.square_ref());
    Complex::with_val(prec, 256u32 / r16) - r8
}

fn close(a: &Complex, b: &Complex, tol_log2: f64) -> bool {
    let prec = a.prec().0;
    let diff = log2_abs_c(&Complex::with_val(prec, a - b));
    let scale = log2_abs_c(a).max(log2_abs_c(b)).max(0.0);
    diff - scale < tol_log2
}

/// How the `3h` roots were sorted into triples.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum Grouping {
    /// `r_{j,k} = R(gamma^(j + (k-1)h))` for a cyclic generator `gamma`.
    Cyclic,
    /// Triples of equal `gamma_2` found by clustering.
    Clustered,
}

/// Roots of the minimal polynomial of `r` in triples sharing `gamma_2`.
pub fn grouped_roots(n: u64, ctx: &PrecisionContext, allow_cyclic: bool) -> Result<(Vec<[Complex; 3]>, Grouping)> {
    check_weber_n(n)?;
    let group = enumerate(&(Integer::from(n) * -4i32))?;
    let h3 = group.h;
    if h3 % 3 != 0 {
        return Err(Error::Inconsistency(format!("h(-4N) = {h3} is not divisible by 3")));
    }
    let h = h3 / 3;
    let tol = -f64::from(ctx.bits()) / 2.0;

    if allow_cyclic {
        if let Some(gen) = group.cyclic_generator() {
            let gen = gen.clone();
            let triples: Vec<[Complex; 3]> = (1..=h)
                .into_par_iter()
                .map(|j| {
                    let mut out = Vec::with_capacity(3);
                    for k in 0..3 {
                        let f = reduce(&power(&gen, j + k * h)?)?;
                        out.push(broker_root(&f, n, ctx)?.into_value());
                    }
                    Ok([out[0].clone(), out[1].clone(), out[2].clone()])
                })
                .collect::<Result<_>>()?;
            let consistent = triples.iter().all(|t| {
                let g0 = gamma2_of(&t[0]);
                close(&g0, &gamma2_of(&t[1]), tol) && close(&g0, &gamma2_of(&t[2]), tol)
            });
            if consistent {
                return Ok((triples, Grouping::Cyclic));
            }
            return Err(Error::Grouping(format!(
                "cyclic labelling for N = {n} does not give equal gamma_2 triples"
            )));
        }
    }

    let roots: Vec<Complex> = group
        .classes
        .par_iter()
        .map(|f: &Form| Ok(broker_root(f, n, ctx)?.into_value()))
        .collect::<Result<_>>()?;
    let g2: Vec<Complex> = roots.iter().map(gamma2_of).collect();
    let mut order: Vec<usize> = (0..roots.len()).collect();
    order.sort_by(|&a, &b| {
        g2[a]
            .real()
            .partial_cmp(g2[b].real())
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(g2[a].imag().is_sign_negative().cmp(&g2[b].imag().is_sign_negative()))
    });
    let mut used = vec![false; roots.len()];
    let mut triples = Vec::with_capacity(h as usize);
    for &i in &order {
        if used[i] {
            continue;
        }
        let members: Vec<usize> = order
            .iter()
            .copied()
            .filter(|&k| !used[k] && close(&g2[i], &g2[k], tol))
            .collect();
        if members.len() != 3 {
            return Err(Error::Grouping(format!(
                "a gamma_2 cluster for N = {n} has {} roots instead of 3",
                members.len()
            )));
        }
        for &k in &members {
            used[k] = true;
        }
        triples.push([
            roots[members[0]].clone(),
            roots[members[1]].clone(),
            roots[members[2]].clone(),
        ]);
    }
    Ok((triples, Grouping::Clustered))
}

fn f_root(t: &[Complex; 3]) -> Complex {
    let prec = t[0].prec().0;
    Complex::with_val(prec, &t[0] + &t[1]) / 2u32 + Complex::with_val(prec, &t[2] / 2u32)
}

fn g_root(t: &[Complex; 3]) -> Complex {
    let prec = t[0].prec().0;
    let s = Complex::with_val(prec, t[0].recip_ref())
        + Complex::with_val(prec, t[1].recip_ref())
        + Complex::with_val(prec, t[2].recip_ref());
    -s
}

fn invariant_roots(n: u64, ctx: &PrecisionContext) -> Result<(Vec<ComplexAP>, Vec<ComplexAP>)> {
    let (triples, _) = grouped_roots(n, &ctx.widened(16), true)?;
    // three roots enter each sum, so allow a few extra bits of error
    let wrap = |z: Complex| ComplexAP::with_error(z, ctx.accuracy_exp() + 4);
    let f = triples.iter().map(|t| wrap(f_root(t))).collect();
    let g = triples.iter().map(|t| wrap(g_root(t))).collect();
    Ok((f, g))
}

#[derive(Debug, Clone, Serialize)]
pub struct InvariantPolys {
    pub n: u64,
    pub h: u64,
    pub f: CertifiedPoly,
    pub g: CertifiedPoly,
}

/// `F(x) = prod (x - sum r/2)` and `G(x) = prod (x + sum 1/r)` over the triples.
pub fn invariant_polys(n: u64, ctx: &PrecisionContext) -> Result<InvariantPolys> {
    check_weber_n(n)?;
    let f = build(|c| Ok(invariant_roots(n, c)?.0), ctx)?;
    let g = build(|c| Ok(invariant_roots(n, c)?.1), ctx)?;
    Ok(InvariantPolys { n, h: g.poly.degree() as u64, f, g })
}

/// Only `G`, for callers that do not need `F`.
pub fn g_poly(n: u64, ctx: &PrecisionContext) -> Result<CertifiedPoly> {
    check_weber_n(n)?;
    build(|c| Ok(invariant_roots(n, c)?.1), ctx)
}

/// Only `F`.
pub fn f_poly(n: u64, ctx: &PrecisionContext) -> Result<CertifiedPoly> {
    check_weber_n(n)?;
    build(|c| Ok(invariant_roots(n, c)?.0), ctx)
}

/// Minimal polynomial of a root of `p` when `p` is a power of an
/// irreducible polynomial (the roots form complete Galois orbits, each
/// repeated equally); checked exactly.
pub fn minimal_from_power(p: &IntPoly) -> Result<IntPoly> {
    let m = IntPoly::from_zpoly(&squarefree_part(&p.to_zpoly())?)?.normalized();
    let k = p.degree() / m.degree();
    if k * m.degree() != p.degree() {
        return Err(Error::Inconsistency(format!(
            "degree {} is not a multiple of {}",
            p.degree(),
            m.degree()
        )));
    }
    let mut acc = m.to_zpoly();
    for _ in 1..k {
        acc = acc.mul(&m.to_zpoly());
    }
    if acc != p.to_zpoly() {
        return Err(Error::Inconsistency(format!("{p} is not a power of {m}")));
    }
    Ok(m)
}

#[derive(Debug, Clone, Serialize)]
pub struct MinimalPolys {
    pub n: u64,
    pub h: u64,
    pub f: IntPoly,
    pub g: IntPoly,
}

impl MinimalPolys {
    /// Both `f` and `g` generate the class field (degree `h`).
    pub fn both_full(&self) -> bool {
        self.f.degree() as u64 == self.h && self.g.degree() as u64 == self.h
    }
}

pub fn minimal_polys(n: u64, ctx: &PrecisionContext) -> Result<MinimalPolys> {
    let polys = invariant_polys(n, ctx)?;
    Ok(MinimalPolys {
        n,
        h: polys.h,
        f: minimal_from_power(&polys.f.poly)?,
        g: minimal_from_power(&polys.g.poly)?,
    })
}

/// Largest absolute coefficient and its decimal digit count.
pub fn poly_height(p: &IntPoly) -> (Integer, usize) {
    let h = p.height();
    let digits = Integer::from(h.abs_ref()).to_string().len();
    (h, digits)
}

/// Index `sqrt(disc(p) / (-N)^((d-1)/2))`, assuming that field discriminant.
pub fn poly_index(p: &IntPoly, n: u64) -> Result<Integer> {
    let d = p.degree();
    if d % 2 == 0 {
        return Err(Error::Assumption(format!(
            "index needs odd degree; degree {d} has no stated field discriminant"
        )));
    }
    if !p.is_monic() {
        return Err(Error::Assumption("index needs a monic polynomial".into()));
    }
    let disc = discriminant(&p.to_zpoly())?;
    let field = (-Integer::from(n)).pow(((d - 1) / 2) as u32);
    if !disc.is_divisible(&field) {
        return Err(Error::Assumption(format!(
            "discriminant is not divisible by (-{n})^{}",
            (d - 1) / 2
        )));
    }
    let q = disc.div_exact(&field);
    if q < 0 || !q.is_perfect_square() {
        return Err(Error::Assumption(format!(
            "disc / (-{n})^{} is not a square",
            (d - 1) / 2
        )));
    }
    Ok(q.sqrt())
}

/// Squarefree `N = 3 mod 8` coprime to 3 in `[from, to]`.
pub fn weber_candidates(from: u64, to: u64) -> Vec<u64> {
    (from.max(4)..=to)
        .filter(|&n| n % 8 == 3 && n % 3 != 0 && is_squarefree(n))
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct GeneratorCheck {
    pub n: u64,
    pub h: u64,
    pub f: IntPoly,
    pub g: IntPoly,
    /// `h > 1` and `f` or `g` has a minimal polynomial of degree below `h`.
    pub exception: bool,
}

/// Whether `f` and `g` both generate the class field for this `N`.
pub fn generator_check(n: u64, ctx: &PrecisionContext) -> Result<GeneratorCheck> {
    let m = minimal_polys(n, ctx)?;
    let exception = m.h > 1 && !m.both_full();
    Ok(GeneratorCheck { n, h: m.h, f: m.f, g: m.g, exception })
}
