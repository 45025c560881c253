use rug::Integer;
use serde::Serialize;

use super::multi::MultiPoly;
use super::upoly::{resultant_subres, resultant_sylvester, squarefree_mod, Ring, UPoly};
use crate::error::{Error, Result};
use crate::invariants::{constraint_terms, gamma2_from_fg, gamma2_terms};

const VARS: [&str; 4] = ["f", "g", "t", "J"];

fn from_fg_terms(terms: &[(i32, usize, usize)]) -> MultiPoly {
    let mut p = MultiPoly::zero(&VARS);
    for &(c, i, j) in terms {
        p.add_term(vec![i as u32, j as u32, 0, 0], Integer::from(c));
    }
    p
}

/// The constraint `Z(f, g)` as a polynomial.
pub fn constraint_poly() -> MultiPoly {
    from_fg_terms(constraint_terms())
}

/// `T(f, g) = -gamma_2 / 32` as a polynomial.
pub fn gamma2_poly() -> MultiPoly {
    from_fg_terms(gamma2_terms())
}

/// Integer points `(J, g)` from the five class-number-one pairs.
pub fn class_number_one_points() -> Vec<(u64, Integer, Integer)> {
    [(11u64, 1i64, -1i64), (19, 0, 1), (43, 1, 0), (67, 1, 1), (163, 3, -2)]
        .into_iter()
        .map(|(n, f, g)| {
            let g2 = gamma2_from_fg(&Integer::from(f), &Integer::from(g));
            let j = Integer::from(&g2 * &g2) * &g2;
            (n, j, Integer::from(g))
        })
        .collect()
}

#[derive(Debug, Clone, Serialize)]
pub struct ModularRelation {
    /// `Phi(J, g)` over the variables `[J, g]`.
    #[serde(skip)]
    pub phi: MultiPoly,
    pub degree_g: u32,
    pub degree_j: u32,
    /// Content divided out of the raw resultant.
    pub removed_content: String,
    /// Degrees of the intermediate `R1(g, t)`.
    pub intermediate_degrees: (u32, u32),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EliminationPath {
    Subresultant,
    Sylvester,
}

fn eliminate(p: &MultiPoly, q: &MultiPoly, var: &str, path: EliminationPath) -> Result<MultiPoly> {
    let up: UPoly<MultiPoly> = p.to_univariate(var)?;
    let uq: UPoly<MultiPoly> = q.to_univariate(var)?;
    let r = match path {
        EliminationPath::Subresultant => resultant_subres(&up, &uq)?,
        EliminationPath::Sylvester => resultant_sylvester(&up, &uq)?,
    };
    // constants produced by the ring identity carry no variables yet
    Ok(r.mul(&MultiPoly::constant(&VARS, 1)))
}

/// Resultant of two multivariate polynomials with respect to `var`.
pub fn resultant(p: &MultiPoly, q: &MultiPoly, var: &str) -> Result<MultiPoly> {
    if p.is_zero() || q.is_zero() {
        return Err(Error::domain("resultant of a zero polynomial"));
    }
    let up = p.to_univariate(var)?;
    let uq = q.to_univariate(var)?;
    let r = resultant_subres(&up, &uq)?;
    let vars = p.vars();
    Ok(r.mul(&MultiPoly::constant(&vars, 1)))
}

/// Eliminate `f` between the constraint and `gamma_2`, then `t` against
/// `J = gamma_2^3 = -32768 t^3`, leaving a relation between `J` and `g`.
pub fn derive_modular_relation_with(path: EliminationPath) -> Result<ModularRelation> {
    let z = constraint_poly();
    let t = MultiPoly::var(&VARS, "t")?;
    let tt = gamma2_poly().sub(&t);
    let r1 = eliminate(&z, &tt, "f", path)?;
    let deg_t = r1.degree_in("t")?;
    let deg_g1 = r1.degree_in("g")?;

    let mut cubic = MultiPoly::zero(&VARS);
    cubic.add_term(vec![0, 0, 3, 0], Integer::from(32768));
    cubic.add_term(vec![0, 0, 0, 1], Integer::from(1));
    let phi0 = eliminate(&r1, &cubic, "t", path)?;
    let content = phi0.content();
    let phi4 = phi0.primitive_part();

    // project onto [J, g]
    let mut phi = MultiPoly::zero(&["J", "g"]);
    for (e, c) in phi4.terms() {
        if e[0] != 0 || e[2] != 0 {
            return Err(Error::Derivation("elimination left f or t behind".into()));
        }
        phi.add_term(vec![e[3], e[1]], c.clone());
    }
    check_relation(&phi)?;
    Ok(ModularRelation {
        degree_g: phi.degree_in("g")?,
        degree_j: phi.degree_in("J")?,
        phi,
        removed_content: content.to_string(),
        intermediate_degrees: (deg_t, deg_g1),
    })
}

pub fn derive_modular_relation() -> Result<ModularRelation> {
    derive_modular_relation_with(EliminationPath::Subresultant)
}

/// Vanishing at the class-number-one points and squarefreeness under
/// specialisation in each variable.
pub fn check_relation(phi: &MultiPoly) -> Result<()> {
    for (n, j, g) in class_number_one_points() {
        let v = phi.eval(&[("J", j), ("g", g)])?;
        if v != 0 {
            return Err(Error::Derivation(format!(
                "relation does not vanish at the N = {n} point"
            )));
        }
    }
    let to_zpoly = |p: &MultiPoly, var: &str| -> Result<UPoly<Integer>> {
        let i = p.vars().iter().position(|v| *v == var).unwrap();
        let deg = p.degree_in(var)? as usize;
        let mut coeffs = vec![Integer::new(); deg + 1];
        for (e, c) in p.terms() {
            coeffs[e[i] as usize] += c;
        }
        Ok(UPoly::new(coeffs))
    };
    let in_g = to_zpoly(&phi.substitute(&[("J", Integer::from(1))])?, "g")?;
    let in_j = to_zpoly(&phi.substitute(&[("g", Integer::from(1))])?, "J")?;
    let primes = [1_000_003u64, 1_000_033, 1_000_037, 1_000_039];
    let sq_g = primes.iter().any(|&p| squarefree_mod(&in_g, p));
    let sq_j = primes.iter().any(|&p| squarefree_mod(&in_j, p));
    if in_g.degree() != Some(phi.degree_in("g")? as usize) || !sq_g || !sq_j {
        return Err(Error::Derivation(
            "relation is not squarefree under specialisation".into(),
        ));
    }
    Ok(())
}

/// Sparse `(deg_J, deg_g, coefficient)` listing.
pub fn relation_terms(phi: &MultiPoly) -> Vec<(u32, u32, Integer)> {
    let vars = phi.vars();
    let ij = vars.iter().position(|v| *v == "J").unwrap_or(0);
    let ig = vars.iter().position(|v| *v == "g").unwrap_or(1);
    let mut out: Vec<_> = phi
        .terms()
        .map(|(e, c)| (e[ij], e[ig], c.clone()))
        .collect();
    out.sort_by_key(|t| (t.0, t.1));
    out
}
