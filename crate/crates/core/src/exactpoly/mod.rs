//! Exact polynomial algebra over the integers: resultants, discriminants,
//! the elimination relating `g` to `j`, and radical expressions for the
//! real roots of the cubic, quintic and septic sub-field polynomials.

mod modrel;
mod multi;
mod radicals;
mod upoly;

pub use modrel::{
    check_relation, class_number_one_points, constraint_poly, derive_modular_relation,
    derive_modular_relation_with, gamma2_poly, relation_terms, resultant, EliminationPath,
    ModularRelation,
};
pub use multi::MultiPoly;
pub use radicals::{
    cubic_radicals, derive_resolvents, radical_eval, radical_value, relative_residual, resolvent_powers,
    CubicRadical, ResolventData, MAX_RESOLVENT_ESCALATIONS,
};
pub use upoly::{
    bareiss_det, content, discriminant, div_exact, gcd, primitive_part, resultant_subres,
    resultant_sylvester, squarefree_mod, squarefree_part, sylvester_matrix, zpoly, Ring, UPoly,
    ZPoly,
};
