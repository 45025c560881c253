use std::fmt::Debug;

use rug::Integer;

use crate::error::{Error, Result};

/// Commutative ring with exact division, enough for fraction-free elimination.
pub trait Ring: Clone + PartialEq + Debug + Send + Sync {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, other: &Self) -> Self;
    fn sub(&self, other: &Self) -> Self;
    fn mul(&self, other: &Self) -> Self;
    fn neg(&self) -> Self;
    /// `self / other`, failing when the division is not exact.
    fn div_exact(&self, other: &Self) -> Result<Self>;

    fn pow(&self, n: u32) -> Self {
        let mut acc = Self::one();
        let mut base = self.clone();
        let mut e = n;
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }
}

impl Ring for Integer {
    fn zero() -> Self {
        Integer::new()
    }
    fn one() -> Self {
        Integer::from(1)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn add(&self, other: &Self) -> Self {
        Integer::from(self + other)
    }
    fn sub(&self, other: &Self) -> Self {
        Integer::from(self - other)
    }
    fn mul(&self, other: &Self) -> Self {
        Integer::from(self * other)
    }
    fn neg(&self) -> Self {
        Integer::from(-self)
    }
    fn div_exact(&self, other: &Self) -> Result<Self> {
        if other.is_zero() || !self.is_divisible(other) {
            return Err(Error::Inconsistency(format!("{self} is not divisible by {other}")));
        }
        Ok(Integer::from(self.div_exact_ref(other)))
    }
}

/// Dense univariate polynomial over a ring, constant term first.
#[derive(Debug, Clone, PartialEq)]
pub struct UPoly<R: Ring> {
    coeffs: Vec<R>,
}

impl<R: Ring> UPoly<R> {
    pub fn new(mut coeffs: Vec<R>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { coeffs }
    }

    pub fn zero() -> Self {
        UPoly { coeffs: Vec::new() }
    }

    pub fn constant(c: R) -> Self {
        UPoly::new(vec![c])
    }

    pub fn coeffs(&self) -> &[R] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<R> {
        self.coeffs
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// Degree; `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn lead(&self) -> R {
        self.coeffs.last().cloned().unwrap_or_else(R::zero)
    }

    pub fn coeff(&self, i: usize) -> R {
        self.coeffs.get(i).cloned().unwrap_or_else(R::zero)
    }

    pub fn add(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i).add(&other.coeff(i))).collect())
    }

    pub fn sub(&self, other: &Self) -> Self {
        let n = self.coeffs.len().max(other.coeffs.len());
        UPoly::new((0..n).map(|i| self.coeff(i).sub(&other.coeff(i))).collect())
    }

    pub fn neg(&self) -> Self {
        UPoly::new(self.coeffs.iter().map(R::neg).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return UPoly::zero();
        }
        let mut out = vec![R::zero(); self.coeffs.len() + other.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].add(&a.mul(b));
            }
        }
        UPoly::new(out)
    }

    pub fn scale(&self, c: &R) -> Self {
        UPoly::new(self.coeffs.iter().map(|a| a.mul(c)).collect())
    }

    pub fn div_exact_scalar(&self, c: &R) -> Result<Self> {
        Ok(UPoly::new(
            self.coeffs.iter().map(|a| a.div_exact(c)).collect::<Result<_>>()?,
        ))
    }

    /// Multiply by `x^k`.
    pub fn shift(&self, k: usize) -> Self {
        if self.is_zero() {
            return UPoly::zero();
        }
        let mut coeffs = vec![R::zero(); k];
        coeffs.extend(self.coeffs.iter().cloned());
        UPoly::new(coeffs)
    }

    pub fn derivative(&self) -> Self {
        UPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| {
                    let mut acc = R::zero();
                    for _ in 0..i {
                        acc = acc.add(c);
                    }
                    acc
                })
                .collect(),
        )
    }

    /// Horner evaluation.
    pub fn eval(&self, x: &R) -> R {
        let mut acc = R::zero();
        for c in self.coeffs.iter().rev() {
            acc = acc.mul(x).add(c);
        }
        acc
    }

    /// Pseudo-remainder: `lead(b)^(deg a - deg b + 1) a = q b + r`.
    pub fn pseudo_rem(&self, b: &Self) -> Result<Self> {
        let db = b
            .degree()
            .ok_or_else(|| Error::domain("pseudo-division by the zero polynomial"))?;
        let Some(da) = self.degree() else {
            return Ok(UPoly::zero());
        };
        if da < db {
            return Ok(self.clone());
        }
        let lb = b.lead();
        let mut r = self.clone();
        let mut steps = da - db + 1;
        while let Some(dr) = r.degree() {
            if dr < db {
                break;
            }
            let lr = r.lead();
            // r <- lb * r - lr * x^(dr-db) * b
            r = r.scale(&lb).sub(&b.scale(&lr).shift(dr - db));
            steps -= 1;
        }
        if steps > 0 {
            r = r.scale(&lb.pow(steps as u32));
        }
        Ok(r)
    }
}

/// Resultant by the subresultant PRS, without content extraction.
///
/// Convention: `Res(A, B) = lead(A)^deg(B) * prod B(alpha)` over the roots
/// of `A`, which is the determinant of the Sylvester matrix with the rows of
/// `A` first. In particular `Res(x - 1, x + 1) = 2`.
pub fn resultant_subres<R: Ring>(a: &UPoly<R>, b: &UPoly<R>) -> Result<R> {
    let (Some(da), Some(db)) = (a.degree(), b.degree()) else {
        return Ok(R::zero());
    };
    let mut s_neg = false;
    let (mut a, mut b) = if da < db {
        if da % 2 == 1 && db % 2 == 1 {
            s_neg = true;
        }
        (b.clone(), a.clone())
    } else {
        (a.clone(), b.clone())
    };
    if b.degree() == Some(0) {
        let da = a.degree().unwrap_or(0) as u32;
        let r = b.lead().pow(da);
        return Ok(if s_neg { r.neg() } else { r });
    }
    let mut g = R::one();
    let mut h = R::one();
    loop {
        let da = a.degree().unwrap();
        let db = b.degree().unwrap();
        let delta = (da - db) as u32;
        if da % 2 == 1 && db % 2 == 1 {
            s_neg = !s_neg;
        }
        let r = a.pseudo_rem(&b)?;
        if r.is_zero() {
            return Ok(R::zero());
        }
        a = b;
        let divisor = g.mul(&h.pow(delta));
        b = r.div_exact_scalar(&divisor)?;
        g = a.lead();
        // h <- h^(1-delta) g^delta
        h = if delta == 0 {
            h
        } else {
            g.pow(delta).div_exact(&h.pow(delta - 1))?
        };
        let dnew = b.degree().unwrap();
        if dnew == 0 {
            let dega = a.degree().unwrap() as u32;
            let lb = b.lead();
            let res = if dega == 0 {
                R::one()
            } else {
                lb.pow(dega).div_exact(&h.pow(dega - 1))?
            };
            return Ok(if s_neg { res.neg() } else { res });
        }
    }
}

/// Sylvester matrix with the `deg b` shifted rows of `a` first.
pub fn sylvester_matrix<R: Ring>(a: &UPoly<R>, b: &UPoly<R>) -> Vec<Vec<R>> {
    let m = a.degree().unwrap_or(0);
    let n = b.degree().unwrap_or(0);
    let size = m + n;
    let mut rows = Vec::with_capacity(size);
    for i in 0..n {
        let mut row = vec![R::zero(); size];
        for (k, c) in a.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    for i in 0..m {
        let mut row = vec![R::zero(); size];
        for (k, c) in b.coeffs().iter().rev().enumerate() {
            row[i + k] = c.clone();
        }
        rows.push(row);
    }
    rows
}

/// Determinant by fraction-free (Bareiss) elimination.
pub fn bareiss_det<R: Ring>(mut m: Vec<Vec<R>>) -> Result<R> {
    let n = m.len();
    if n == 0 {
        return Ok(R::one());
    }
    let mut negate = false;
    let mut prev = R::one();
    for k in 0..n - 1 {
        if m[k][k].is_zero() {
            let Some(swap) = (k + 1..n).find(|&i| !m[i][k].is_zero()) else {
                return Ok(R::zero());
            };
            m.swap(k, swap);
            negate = !negate;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                let num = m[i][j].mul(&m[k][k]).sub(&m[i][k].mul(&m[k][j]));
                m[i][j] = num.div_exact(&prev)?;
            }
            m[i][k] = R::zero();
        }
        prev = m[k][k].clone();
    }
    let det = m[n - 1][n - 1].clone();
    Ok(if negate { det.neg() } else { det })
}

/// Resultant as the Bareiss determinant of the Sylvester matrix.
pub fn resultant_sylvester<R: Ring>(a: &UPoly<R>, b: &UPoly<R>) -> Result<R> {
    if a.is_zero() || b.is_zero() {
        return Ok(R::zero());
    }
    if a.degree() == Some(0) && b.degree() == Some(0) {
        return Ok(R::one());
    }
    bareiss_det(sylvester_matrix(a, b))
}

/// Integer polynomial helpers.
pub type ZPoly = UPoly<Integer>;

pub fn zpoly(coeffs: &[i64]) -> ZPoly {
    UPoly::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
}

pub fn content(p: &ZPoly) -> Integer {
    let mut g = Integer::new();
    for c in p.coeffs() {
        g.gcd_mut(c);
    }
    g
}

/// Primitive part with positive leading coefficient.
pub fn primitive_part(p: &ZPoly) -> ZPoly {
    if p.is_zero() {
        return p.clone();
    }
    let mut c = content(p);
    if p.lead() < 0 {
        c = -c;
    }
    p.div_exact_scalar(&c).expect("content divides every coefficient")
}

/// Greatest common divisor in `Z[x]` (primitive, positive leading coefficient).
pub fn gcd(a: &ZPoly, b: &ZPoly) -> Result<ZPoly> {
    if a.is_zero() {
        return Ok(primitive_part(b));
    }
    if b.is_zero() {
        return Ok(primitive_part(a));
    }
    let cont = Integer::from(content(a).gcd_ref(&content(b)));
    let (mut x, mut y) = if a.degree() >= b.degree() {
        (primitive_part(a), primitive_part(b))
    } else {
        (primitive_part(b), primitive_part(a))
    };
    while !y.is_zero() {
        let r = x.pseudo_rem(&y)?;
        x = y;
        y = primitive_part(&r);
    }
    Ok(primitive_part(&x).scale(&cont))
}

/// Exact quotient `a / b` in `Z[x]`; fails when `b` does not divide `a`.
pub fn div_exact(a: &ZPoly, b: &ZPoly) -> Result<ZPoly> {
    let db = b
        .degree()
        .ok_or_else(|| Error::domain("division by the zero polynomial"))?;
    let Some(da) = a.degree() else {
        return Ok(UPoly::zero());
    };
    if da < db {
        return Err(Error::Inconsistency("polynomial division is not exact".into()));
    }
    let lb = b.lead();
    let mut r = a.clone();
    let mut q = vec![Integer::new(); da - db + 1];
    while let Some(dr) = r.degree() {
        if dr < db {
            break;
        }
        let c = Ring::div_exact(&r.lead(), &lb)?;
        r = r.sub(&b.scale(&c).shift(dr - db));
        q[dr - db] = c;
    }
    if !r.is_zero() {
        return Err(Error::Inconsistency("polynomial division is not exact".into()));
    }
    Ok(UPoly::new(q))
}

/// Squarefree part `p / gcd(p, p')`, primitive.
pub fn squarefree_part(p: &ZPoly) -> Result<ZPoly> {
    let g = gcd(p, &p.derivative())?;
    if g.degree() == Some(0) {
        return Ok(primitive_part(p));
    }
    Ok(primitive_part(&div_exact(&primitive_part(p), &g)?))
}

/// `(-1)^(d(d-1)/2) Res(p, p') / lead(p)`.
pub fn discriminant(p: &ZPoly) -> Result<Integer> {
    let d = p
        .degree()
        .filter(|&d| d >= 1)
        .ok_or_else(|| Error::domain("discriminant needs degree at least 1"))?;
    if d == 1 {
        return Ok(Integer::from(1));
    }
    let res = resultant_subres(p, &p.derivative())?;
    let q = Ring::div_exact(&res, &p.lead())?;
    Ok(if (d * (d - 1) / 2) % 2 == 1 { -q } else { q })
}

/// Squarefreeness test modulo a prime `p` not dividing the leading coefficient.
/// A `true` answer proves `f` squarefree over the rationals.
pub fn squarefree_mod(f: &ZPoly, p: u64) -> bool {
    let red = |c: &Integer| c.mod_u(p as u32) as u64;
    let fp: Vec<u64> = f.coeffs().iter().map(red).collect();
    if fp.last().copied().unwrap_or(0) == 0 {
        return false;
    }
    let dfp: Vec<u64> = fp
        .iter()
        .enumerate()
        .skip(1)
        .map(|(i, &c)| c * (i as u64 % p) % p)
        .collect();
    let g = gcd_mod(fp, dfp, p);
    g.len() == 1
}

fn trim_mod(mut v: Vec<u64>) -> Vec<u64> {
    while v.last() == Some(&0) {
        v.pop();
    }
    v
}

fn inv_mod(a: u64, p: u64) -> u64 {
    let mut r = 1u64;
    let mut b = a % p;
    let mut e = p - 2;
    while e > 0 {
        if e & 1 == 1 {
            r = (r as u128 * b as u128 % p as u128) as u64;
        }
        b = (b as u128 * b as u128 % p as u128) as u64;
        e >>= 1;
    }
    r
}

fn gcd_mod(a: Vec<u64>, b: Vec<u64>, p: u64) -> Vec<u64> {
    let mut x = trim_mod(a);
    let mut y = trim_mod(b);
    while !y.is_empty() {
        // x <- x mod y
        let inv = inv_mod(*y.last().unwrap(), p);
        while x.len() >= y.len() && !x.is_empty() {
            let shift = x.len() - y.len();
            let c = (*x.last().unwrap() as u128 * inv as u128 % p as u128) as u64;
            for (i, &yc) in y.iter().enumerate() {
                let sub = (c as u128 * yc as u128 % p as u128) as u64;
                x[i + shift] = (x[i + shift] + p - sub) % p;
            }
            x = trim_mod(x);
        }
        std::mem::swap(&mut x, &mut y);
    }
    x
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn resultant_convention() {
        let a = zpoly(&[-1, 1]);
        let b = zpoly(&[1, 1]);
        assert_eq!(resultant_subres(&a, &b).unwrap(), 2);
        assert_eq!(resultant_sylvester(&a, &b).unwrap(), 2);
        assert_eq!(resultant_subres(&b, &a).unwrap(), -2);
    }

    #[test]
    fn common_root_gives_zero() {
        let p = zpoly(&[-2, 0, 1]);
        assert_eq!(resultant_subres(&p, &p).unwrap(), 0);
        assert_eq!(resultant_sylvester(&p, &p).unwrap(), 0);
    }

    #[test]
    fn discriminant_of_weber_cubic() {
        // x^3 - 6x^2 + 4x - 2
        let p = zpoly(&[-2, 4, -6, 1]);
        assert_eq!(discriminant(&p).unwrap(), -652);
        assert_eq!(discriminant(&zpoly(&[-2, 0, 1])).unwrap(), 8);
    }

    #[test]
    fn gcd_and_squarefree() {
        let m = zpoly(&[-1, 1, 1]); // x^2 + x - 1
        let g = m.mul(&m);
        assert_eq!(squarefree_part(&g).unwrap(), m);
        assert!(!squarefree_mod(&g, 101));
        assert!(squarefree_mod(&m, 101));
        let h = zpoly(&[2, 1]).mul(&m);
        assert_eq!(gcd(&h, &g).unwrap(), m);
        assert_eq!(div_exact(&h, &m).unwrap(), zpoly(&[2, 1]));
        assert!(div_exact(&h, &zpoly(&[3, 1])).is_err());
    }

    #[test]
    fn bareiss_on_integer_matrix() {
        let m = vec![
            vec![Integer::from(0), Integer::from(2), Integer::from(1)],
            vec![Integer::from(3), Integer::from(1), Integer::from(0)],
            vec![Integer::from(1), Integer::from(0), Integer::from(4)],
        ];
        // 0(4) - 2(12) + 1(-1) = -25
        assert_eq!(bareiss_det(m).unwrap(), -25);
    }
}
