use std::collections::BTreeMap;
use std::fmt;

use rug::ops::Pow;
use rug::Integer;

use super::upoly::{Ring, UPoly};
use crate::error::{Error, Result};

/// Sparse multivariate polynomial with integer coefficients.
///
/// Exponent vectors are indexed by position in `vars`; terms are kept in
/// lexicographic order, so the last entry is the leading term.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MultiPoly {
    vars: Vec<String>,
    terms: BTreeMap<Vec<u32>, Integer>,
}

impl MultiPoly {
    pub fn zero(vars: &[&str]) -> Self {
        MultiPoly {
            vars: vars.iter().map(|s| s.to_string()).collect(),
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(vars: &[&str], c: impl Into<Integer>) -> Self {
        let mut p = MultiPoly::zero(vars);
        p.add_term(vec![0; vars.len()], c.into());
        p
    }

    /// The variable `name` as a polynomial.
    pub fn var(vars: &[&str], name: &str) -> Result<Self> {
        let idx = vars
            .iter()
            .position(|v| *v == name)
            .ok_or_else(|| Error::domain(format!("unknown variable {name}")))?;
        let mut exp = vec![0; vars.len()];
        exp[idx] = 1;
        let mut p = MultiPoly::zero(vars);
        p.add_term(exp, Integer::from(1));
        Ok(p)
    }

    /// Build from `(coefficient, exponents)` pairs.
    pub fn from_terms(vars: &[&str], terms: &[(i64, &[u32])]) -> Self {
        let mut p = MultiPoly::zero(vars);
        for (c, e) in terms {
            p.add_term(e.to_vec(), Integer::from(*c));
        }
        p
    }

    pub fn vars(&self) -> Vec<&str> {
        self.vars.iter().map(String::as_str).collect()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Vec<u32>, &Integer)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add_term(&mut self, exp: Vec<u32>, c: Integer) {
        debug_assert_eq!(exp.len(), self.vars.len());
        if c == 0 {
            return;
        }
        match self.terms.get_mut(&exp) {
            Some(existing) => {
                *existing += c;
                if *existing == 0 {
                    self.terms.remove(&exp);
                }
            }
            None => {
                self.terms.insert(exp, c);
            }
        }
    }

    pub fn coeff(&self, exp: &[u32]) -> Integer {
        self.terms.get(exp).cloned().unwrap_or_default()
    }

    fn index(&self, var: &str) -> Result<usize> {
        self.vars
            .iter()
            .position(|v| v == var)
            .ok_or_else(|| Error::domain(format!("unknown variable {var}")))
    }

    pub fn degree_in(&self, var: &str) -> Result<u32> {
        let i = self.index(var)?;
        Ok(self.terms.keys().map(|e| e[i]).max().unwrap_or(0))
    }

    fn leading(&self) -> Option<(&Vec<u32>, &Integer)> {
        self.terms.iter().next_back()
    }

    /// Coefficients with respect to `var`, lowest power first.
    pub fn to_univariate(&self, var: &str) -> Result<UPoly<MultiPoly>> {
        let i = self.index(var)?;
        let deg = self.degree_in(var)? as usize;
        let vars = self.vars();
        let mut out = vec![MultiPoly::zero(&vars); deg + 1];
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let k = e2[i] as usize;
            e2[i] = 0;
            out[k].add_term(e2, c.clone());
        }
        Ok(UPoly::new(out))
    }

    /// Inverse of `to_univariate`.
    pub fn from_univariate(p: &UPoly<MultiPoly>, var: &str, vars: &[&str]) -> Result<Self> {
        let mut out = MultiPoly::zero(vars);
        let i = out.index(var)?;
        for (k, c) in p.coeffs().iter().enumerate() {
            for (e, v) in &c.terms {
                let mut e2 = e.clone();
                e2[i] += k as u32;
                out.add_term(e2, v.clone());
            }
        }
        Ok(out)
    }

    /// Substitute integer values for some variables.
    pub fn substitute(&self, values: &[(&str, Integer)]) -> Result<Self> {
        let idx: Vec<(usize, &Integer)> = values
            .iter()
            .map(|(v, x)| Ok((self.index(v)?, x)))
            .collect::<Result<_>>()?;
        let mut out = MultiPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (e, c) in &self.terms {
            let mut e2 = e.clone();
            let mut coef = c.clone();
            for &(i, x) in &idx {
                coef *= x.clone().pow(e[i]);
                e2[i] = 0;
            }
            out.add_term(e2, coef);
        }
        Ok(out)
    }

    /// Value at integer points for every variable.
    pub fn eval(&self, values: &[(&str, Integer)]) -> Result<Integer> {
        let sub = self.substitute(values)?;
        if sub.terms.keys().any(|e| e.iter().any(|&d| d > 0)) {
            return Err(Error::domain("not every variable was given a value"));
        }
        Ok(sub.coeff(&vec![0; self.vars.len()]))
    }

    pub fn content(&self) -> Integer {
        let mut g = Integer::new();
        for c in self.terms.values() {
            g.gcd_mut(c);
        }
        g
    }

    /// Divide out the content; leading coefficient made positive.
    pub fn primitive_part(&self) -> Self {
        let mut c = self.content();
        if c == 0 {
            return self.clone();
        }
        if self.leading().is_some_and(|(_, v)| *v < 0) {
            c = -c;
        }
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), Integer::from(v.div_exact_ref(&c))))
                .collect(),
        }
    }

    pub fn scale(&self, c: &Integer) -> Self {
        let mut out = MultiPoly {
            vars: self.vars.clone(),
            terms: BTreeMap::new(),
        };
        for (e, v) in &self.terms {
            out.add_term(e.clone(), Integer::from(v * c));
        }
        out
    }

    fn same_vars(&self, other: &Self) -> Vec<String> {
        if self.vars.is_empty() {
            other.vars.clone()
        } else {
            self.vars.clone()
        }
    }
}

impl Ring for MultiPoly {
    fn zero() -> Self {
        MultiPoly {
            vars: Vec::new(),
            terms: BTreeMap::new(),
        }
    }

    fn one() -> Self {
        // variable-free constant; adopts the other operand's variables on use
        let mut terms = BTreeMap::new();
        terms.insert(Vec::new(), Integer::from(1));
        MultiPoly {
            vars: Vec::new(),
            terms,
        }
    }

    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    fn add(&self, other: &Self) -> Self {
        let (a, b) = (lift(self, other), lift(other, self));
        let mut out = a;
        for (e, v) in b.terms {
            out.add_term(e, v);
        }
        out
    }

    fn sub(&self, other: &Self) -> Self {
        self.add(&other.neg())
    }

    fn mul(&self, other: &Self) -> Self {
        let (a, b) = (lift(self, other), lift(other, self));
        let mut out = MultiPoly {
            vars: a.same_vars(&b),
            terms: BTreeMap::new(),
        };
        for (ea, va) in &a.terms {
            for (eb, vb) in &b.terms {
                let e: Vec<u32> = ea.iter().zip(eb).map(|(x, y)| x + y).collect();
                out.add_term(e, Integer::from(va * vb));
            }
        }
        out
    }

    fn neg(&self) -> Self {
        MultiPoly {
            vars: self.vars.clone(),
            terms: self
                .terms
                .iter()
                .map(|(e, v)| (e.clone(), Integer::from(-v)))
                .collect(),
        }
    }

    fn div_exact(&self, other: &Self) -> Result<Self> {
        let (num, den) = (lift(self, other), lift(other, self));
        let Some((lead_e, lead_c)) = den.leading().map(|(e, c)| (e.clone(), c.clone())) else {
            return Err(Error::domain("division by the zero polynomial"));
        };
        let mut rem = num;
        let mut quot = MultiPoly {
            vars: rem.same_vars(&den),
            terms: BTreeMap::new(),
        };
        while let Some((e, c)) = rem.leading().map(|(e, c)| (e.clone(), c.clone())) {
            if e.iter().zip(&lead_e).any(|(a, b)| a < b) || !c.is_divisible(&lead_c) {
                return Err(Error::Inconsistency(
                    "multivariate division is not exact".into(),
                ));
            }
            let qe: Vec<u32> = e.iter().zip(&lead_e).map(|(a, b)| a - b).collect();
            let qc = Integer::from(c.div_exact_ref(&lead_c));
            for (de, dc) in &den.terms {
                let te: Vec<u32> = de.iter().zip(&qe).map(|(a, b)| a + b).collect();
                rem.add_term(te, -Integer::from(dc * &qc));
            }
            quot.add_term(qe, qc);
        }
        Ok(quot)
    }
}

/// Give a variable-free constant the variables of `like`.
fn lift(p: &MultiPoly, like: &MultiPoly) -> MultiPoly {
    if !p.vars.is_empty() || like.vars.is_empty() {
        return p.clone();
    }
    let n = like.vars.len();
    MultiPoly {
        vars: like.vars.clone(),
        terms: p.terms.values().map(|v| (vec![0; n], v.clone())).collect(),
    }
}

impl fmt::Display for MultiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, c) in self.terms.iter().rev() {
            let sign = if *c < 0 { "-" } else { "+" };
            let abs = Integer::from(c.abs_ref());
            if first {
                if *c < 0 {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            first = false;
            let mono: Vec<String> = e
                .iter()
                .zip(&self.vars)
                .filter(|(d, _)| **d > 0)
                .map(|(d, v)| if *d == 1 { v.clone() } else { format!("{v}^{d}") })
                .collect();
            if mono.is_empty() {
                write!(f, "{abs}")?;
            } else if abs == 1 {
                write!(f, "{}", mono.join("*"))?;
            } else {
                write!(f, "{abs}*{}", mono.join("*"))?;
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const V: [&str; 2] = ["x", "y"];

    #[test]
    fn exact_division_round_trip() {
        let a = MultiPoly::from_terms(&V, &[(1, &[1, 0]), (2, &[0, 1]), (-3, &[0, 0])]);
        let b = MultiPoly::from_terms(&V, &[(4, &[2, 1]), (-1, &[0, 3]), (7, &[0, 0])]);
        let prod = a.mul(&b);
        assert_eq!(prod.div_exact(&a).unwrap(), b);
        assert_eq!(prod.div_exact(&b).unwrap(), a);
        let c = MultiPoly::from_terms(&V, &[(1, &[1, 1]), (1, &[0, 0])]);
        assert!(prod.div_exact(&c).is_err());
    }

    #[test]
    fn univariate_view_round_trip() {
        let p = MultiPoly::from_terms(&V, &[(3, &[2, 1]), (-1, &[0, 2]), (5, &[1, 0])]);
        let u = p.to_univariate("x").unwrap();
        assert_eq!(u.degree(), Some(2));
        assert_eq!(MultiPoly::from_univariate(&u, "x", &V).unwrap(), p);
    }

    #[test]
    fn evaluation_and_display() {
        let p = MultiPoly::from_terms(&V, &[(3, &[2, 1]), (-1, &[0, 2]), (5, &[1, 0])]);
        let v = p.eval(&[("x", Integer::from(2)), ("y", Integer::from(-1))]).unwrap();
        assert_eq!(v, 3 * 4 * -1 - 1 + 10);
        assert_eq!(p.to_string(), "3*x^2*y + 5*x - y^2");
    }

    #[test]
    fn constants_adopt_variables() {
        let p = MultiPoly::var(&V, "x").unwrap();
        let one = <MultiPoly as Ring>::one();
        assert_eq!(p.mul(&one), p);
        assert_eq!(one.mul(&p), p);
        assert_eq!(p.div_exact(&one).unwrap(), p);
    }
}
