use rug::ops::Pow;
use rug::Float;
use singval::apnum::PrecisionContext;
use singval::chowla::{
    class_number, eq_w_check, elliptic_k, gn_direct, gn_eta, k_relation_residual, lambda, singular_k,
};
use singval::Error;

fn digits(d: u32) -> PrecisionContext {
    PrecisionContext::from_digits(d).unwrap()
}

fn shared_digits(a: &Float, b: &Float) -> f64 {
    let diff = Float::with_val(a.prec(), a - b).abs();
    if diff.is_zero() {
        return f64::INFINITY;
    }
    let rel = Float::with_val(a.prec(), diff / a.clone().abs());
    let (m, e) = rel.to_f64_exp();
    -(m.log2() + f64::from(e)) * std::f64::consts::LOG10_2
}

#[test]
fn gn_direct_for_3_is_a_gamma_ratio() {
    let c = digits(60);
    let g = gn_direct(3, &c).unwrap();
    let third = Float::with_val(300, 1) / 3u32;
    let two_thirds = Float::with_val(300, 2) / 3u32;
    let want = third.gamma() / two_thirds.gamma();
    assert!(shared_digits(g.value(), &want) > 55.0);
}

#[test]
fn gamma_and_eta_routes_agree() {
    let c = digits(220);
    for n in [7u64, 11, 19, 23, 31] {
        let a = gn_direct(n, &c).unwrap();
        let b = gn_eta(n, &c).unwrap();
        let shared = shared_digits(a.value(), b.value());
        assert!(shared >= 200.0, "N = {n}: {shared:.1} digits");
    }
}

#[test]
fn gn_direct_refuses_large_n() {
    assert!(matches!(gn_direct(211, &digits(40)), Err(Error::Refused(_))));
}

#[test]
fn lambda_is_one_for_class_number_one() {
    let c = digits(50);
    for n in [7u64, 11, 19, 43, 67, 163] {
        assert_eq!(class_number(n).unwrap(), 1);
        let l = lambda(n, &c).unwrap();
        assert!(l.is_exact());
        assert_eq!(*l.value(), 1);
    }
    let l = lambda(23, &c).unwrap();
    assert!(l.is_positive() && *l.value() != 1);
}

#[test]
fn singular_modulus_relation() {
    let c = digits(60);
    for n in [3u64, 11, 19, 43, 163, 1571] {
        let res = k_relation_residual(n, &c).unwrap();
        assert!(res < Float::with_val(64, 10).pow(-50), "N = {n}");
        let k = singular_k(n, &c).unwrap();
        assert!(k.is_positive() && *k.value() < 1);
    }
    // k_3 = sin(15 degrees) = (sqrt(6) - sqrt(2)) / 4
    let k3 = singular_k(3, &c).unwrap();
    let want = (Float::with_val(300, 6).sqrt() - Float::with_val(300, 2).sqrt()) / 4u32;
    assert!(shared_digits(k3.value(), &want) > 55.0);
}

#[test]
fn elliptic_k_for_n_3() {
    // K(k_3) = 3^(1/4) Gamma(1/3)^3 / (2^(7/3) pi)
    let c = digits(60);
    let k = elliptic_k(3, &c).unwrap();
    let p = 300;
    let g = (Float::with_val(p, 1) / 3u32).gamma();
    let want = Float::with_val(p, 3).root(4) * g.pow(3u32)
        / (Float::with_val(p, 2).pow(Float::with_val(p, 7) / 3u32) * Float::with_val(p, rug::float::Constant::Pi));
    assert!(shared_digits(k.value(), &want) > 55.0);
}

#[test]
fn eq_w_identity_for_small_n() {
    let d = 120;
    let c = digits(d);
    for n in [11u64, 19, 43, 67, 163, 59, 83, 1571] {
        let w = eq_w_check(n, &c).unwrap();
        let tol = Float::with_val(64, 10).pow(-(d as i32 - 20));
        assert!(*w.value() < tol, "N = {n}: {}", w.value().to_f64());
    }
}
