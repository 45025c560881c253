use std::fmt;

use rug::{Complex, Float, Integer};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::exactpoly::ZPoly;

/// Integer polynomial, constant term first.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct IntPoly {
    coeffs: Vec<Integer>,
}

impl IntPoly {
    /// Trailing zeros are dropped; the zero polynomial is rejected.
    pub fn new(mut coeffs: Vec<Integer>) -> Result<Self> {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        if coeffs.is_empty() {
            return Err(Error::domain("the zero polynomial has no degree"));
        }
        Ok(IntPoly { coeffs })
    }

    pub fn from_i64(coeffs: &[i64]) -> Result<Self> {
        IntPoly::new(coeffs.iter().map(|&c| Integer::from(c)).collect())
    }

    /// From coefficients listed highest degree first.
    pub fn from_high(coeffs: &[i64]) -> Result<Self> {
        IntPoly::new(coeffs.iter().rev().map(|&c| Integer::from(c)).collect())
    }

    pub fn coeffs(&self) -> &[Integer] {
        &self.coeffs
    }

    pub fn degree(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn lead(&self) -> &Integer {
        self.coeffs.last().expect("nonzero polynomial")
    }

    pub fn is_monic(&self) -> bool {
        *self.lead() == 1
    }

    pub fn height(&self) -> Integer {
        self.coeffs
            .iter()
            .map(|c| Integer::from(c.abs_ref()))
            .max()
            .unwrap_or_default()
    }

    pub fn eval_int(&self, x: &Integer) -> Integer {
        let mut acc = Integer::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_real(&self, x: &Float) -> Float {
        let mut acc = Float::new(x.prec());
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &Complex) -> Complex {
        let mut acc = Complex::new(z.prec());
        for c in self.coeffs.iter().rev() {
            acc *= z;
            acc += c;
        }
        acc
    }

    /// Sum of `|c_i x^i|`, the natural scale for a residual `p(x)`.
    pub fn abs_scale(&self, x: &Float) -> Float {
        let ax = Float::with_val(x.prec(), x.abs_ref());
        let mut acc = Float::new(x.prec());
        for c in self.coeffs.iter().rev() {
            acc *= &ax;
            acc += Integer::from(c.abs_ref());
        }
        acc
    }

    pub fn derivative(&self) -> Option<IntPoly> {
        IntPoly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| Integer::from(c * i as u64))
                .collect(),
        )
        .ok()
    }

    pub fn to_zpoly(&self) -> ZPoly {
        ZPoly::new(self.coeffs.clone())
    }

    pub fn from_zpoly(p: &ZPoly) -> Result<Self> {
        IntPoly::new(p.coeffs().to_vec())
    }

    /// Sign-normalised so that the leading coefficient is positive.
    pub fn normalized(mut self) -> Self {
        if *self.lead() < 0 {
            for c in &mut self.coeffs {
                *c = Integer::from(-&*c);
            }
        }
        self
    }
}

impl fmt::Display for IntPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if *c == 0 {
                continue;
            }
            let neg = *c < 0;
            let abs = Integer::from(c.abs_ref());
            match (first, neg) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let show_coeff = abs != 1 || i == 0;
            if show_coeff {
                write!(f, "{abs}")?;
            }
            match i {
                0 => {}
                1 => write!(f, "x")?,
                _ => write!(f, "x^{i}")?,
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct IntPolyRepr {
    degree: usize,
    coeffs: Vec<String>,
}

impl Serialize for IntPoly {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        IntPolyRepr {
            degree: self.degree(),
            coeffs: self.coeffs.iter().map(Integer::to_string).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntPoly {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = IntPolyRepr::deserialize(d)?;
        let coeffs = repr
            .coeffs
            .iter()
            .map(|c| Integer::from_str_radix(c, 10).map_err(D::Error::custom))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        let p = IntPoly::new(coeffs).map_err(D::Error::custom)?;
        if p.degree() != repr.degree {
            return Err(D::Error::custom("degree does not match the coefficient list"));
        }
        Ok(p)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn display_and_height() {
        let p = IntPoly::from_high(&[1, -6, 4, -2]).unwrap();
        assert_eq!(p.to_string(), "x^3 - 6x^2 + 4x - 2");
        assert_eq!(p.height(), 6);
        assert_eq!(IntPoly::from_high(&[-1, 0, 1]).unwrap().to_string(), "-x^2 + 1");
    }

    #[test]
    fn json_round_trip() {
        let p = IntPoly::from_high(&[1, 0, -2]).unwrap();
        let s = serde_json::to_string(&p).unwrap();
        assert_eq!(s, r#"{"degree":2,"coeffs":["-2","0","1"]}"#);
        assert_eq!(serde_json::from_str::<IntPoly>(&s).unwrap(), p);
    }
}
