//! Published reference data shipped with the crate.

use rug::ops::Pow;
use rug::{Integer, Rational};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub const MODULAR_RELATION_JSON: &str = include_str!("../fixtures/modular_relation.json");
pub const RADICALS_2317723_JSON: &str = include_str!("../fixtures/radicals_2317723.json");
pub const MIN_G_1571_JSON: &str = include_str!("../fixtures/min_g_1571.json");

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationTerm {
    #[serde(rename = "deg_J")]
    pub deg_j: u32,
    pub deg_g: u32,
    pub coeff: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RelationFixture {
    pub variables: Vec<String>,
    pub terms: Vec<RelationTerm>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QPolynomials {
    pub q3: Vec<String>,
    pub q5: Vec<String>,
    pub q7: Vec<String>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct QIndices {
    pub q3: Vec<(u64, u32)>,
    pub q5: Vec<(u64, u32)>,
    pub q7: Vec<(u64, u32)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct CubicFixture {
    pub u: String,
    pub a: String,
    pub b: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ResolventFixture {
    pub p: u32,
    pub polynomial: String,
    pub rational_term: String,
    /// `(A, B)` meaning `A + B sqrt(-N)`, one per power of the root of unity.
    pub pairs: Vec<(String, String)>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RadicalFixture {
    pub n: u64,
    pub class_number: u64,
    pub working_digits: u32,
    pub polynomials: QPolynomials,
    pub indices: QIndices,
    pub cubic: CubicFixture,
    pub resolvents: Vec<ResolventFixture>,
}

impl RadicalFixture {
    pub fn polynomial(&self, name: &str) -> Result<Vec<Integer>> {
        let coeffs = match name {
            "q3" => &self.polynomials.q3,
            "q5" => &self.polynomials.q5,
            "q7" => &self.polynomials.q7,
            _ => return Err(Error::Parse(format!("unknown polynomial {name}"))),
        };
        coeffs.iter().map(|c| parse_integer(c)).collect()
    }

    pub fn index(&self, name: &str) -> Result<Integer> {
        let factors = match name {
            "q3" => &self.indices.q3,
            "q5" => &self.indices.q5,
            "q7" => &self.indices.q7,
            _ => return Err(Error::Parse(format!("unknown polynomial {name}"))),
        };
        Ok(from_factors(factors))
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct MinPolyFixture {
    pub n: u64,
    pub class_number: u64,
    pub coeffs: Vec<String>,
    pub index: String,
    pub index_factors: Vec<(u64, u32)>,
    pub height: String,
}

impl MinPolyFixture {
    pub fn coefficients(&self) -> Result<Vec<Integer>> {
        self.coeffs.iter().map(|c| parse_integer(c)).collect()
    }
}

pub fn parse_integer(s: &str) -> Result<Integer> {
    Integer::from_str_radix(s.trim(), 10).map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

pub fn parse_rational(s: &str) -> Result<Rational> {
    s.trim()
        .parse::<Rational>()
        .map_err(|e| Error::Parse(format!("{s:?}: {e}")))
}

pub fn from_factors(factors: &[(u64, u32)]) -> Integer {
    factors.iter().fold(Integer::from(1), |acc, &(p, e)| {
        acc * Integer::from(p).pow(e)
    })
}

fn parse<T: for<'de> Deserialize<'de>>(src: &str, what: &str) -> Result<T> {
    serde_json::from_str(src).map_err(|e| Error::Parse(format!("{what}: {e}")))
}

pub fn modular_relation() -> Result<RelationFixture> {
    parse(MODULAR_RELATION_JSON, "modular relation fixture")
}

pub fn radicals_2317723() -> Result<RadicalFixture> {
    parse(RADICALS_2317723_JSON, "radical fixture")
}

pub fn min_g_1571() -> Result<MinPolyFixture> {
    parse(MIN_G_1571_JSON, "minimal polynomial fixture")
}

pub fn load_radicals(src: &str) -> Result<RadicalFixture> {
    parse(src, "radical fixture")
}

pub fn load_relation(src: &str) -> Result<RelationFixture> {
    parse(src, "modular relation fixture")
}
