use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use singval::apnum::PrecisionContext;
use singval::exactpoly::{
    cubic_radicals, derive_resolvents, discriminant, radical_eval, radical_value, ResolventData,
};
use singval::fixtures::radicals_2317723;
use singval::latrel::algdep;
use singval::polybuild::{hilbert_poly, poly_index, real_roots, IntPoly};

const N: u64 = 2317723;

fn ctx(bits: u32) -> PrecisionContext {
    PrecisionContext::new(bits).unwrap()
}

fn q(name: &str) -> IntPoly {
    IntPoly::new(radicals_2317723().unwrap().polynomial(name).unwrap()).unwrap()
}

fn rational(s: &str) -> Rational {
    s.parse().unwrap()
}

#[test]
fn cubic_q3_has_the_published_cardano_form() {
    let fx = radicals_2317723().unwrap();
    let r = cubic_radicals(&q("q3"), &ctx(256)).unwrap();
    assert_eq!(r.u, rational(&fx.cubic.u));
    assert_eq!(r.a, rational(&fx.cubic.a));
    assert_eq!(r.b, rational(&fx.cubic.b));
    let roots = real_roots(&q("q3"), &ctx(256)).unwrap();
    assert_eq!(roots.len(), 1);
    let d = Float::with_val(256, r.value.value() - &roots[0]).abs();
    assert!(d < Float::with_val(64, 1) >> 200);
}

#[test]
fn cubic_degenerate_and_rational_cases() {
    let c = ctx(256);
    let r = cubic_radicals(&IntPoly::from_high(&[1, 0, 0, -2]).unwrap(), &c).unwrap();
    assert_eq!((r.u.clone(), r.a.clone(), r.b.clone()), (Rational::new(), Rational::from(1), Rational::from(1)));
    let cube = Float::with_val(256, r.value.value() * r.value.value()) * r.value.value();
    assert!(Float::with_val(256, cube - 2u32).abs() < Float::with_val(64, 1) >> 200);

    let r = cubic_radicals(&IntPoly::from_high(&[1, 0, 3, -4]).unwrap(), &c).unwrap();
    assert!(Float::with_val(256, r.value.value() - 1u32).abs() < Float::with_val(64, 1) >> 200);

    // three real roots
    assert!(cubic_radicals(&IntPoly::from_high(&[1, 0, -3, 1]).unwrap(), &c).is_err());
}

#[test]
fn published_resolvents_solve_q5_and_q7_at_38_digits() {
    let fx = radicals_2317723().unwrap();
    let c = PrecisionContext::from_digits(38).unwrap();
    for r in &fx.resolvents {
        let data = ResolventData::from_fixture(N, r).unwrap();
        let poly = q(&r.polynomial);
        let x = radical_eval(&data, &poly, &c).unwrap();
        let resid = Float::with_val(c.bits(), poly.eval_real(x.value())).abs();
        assert!(resid < Float::with_val(64, 10).pow(-30i32), "{}", r.polynomial);
        let real = real_roots(&poly, &c).unwrap();
        assert_eq!(real.len(), 1);
    }
}

#[test]
fn wrong_sign_is_detected() {
    let fx = radicals_2317723().unwrap();
    let r = &fx.resolvents[0];
    let mut data = ResolventData::from_fixture(N, r).unwrap();
    data.pairs[0].1 = format!("-{}", data.pairs[0].1);
    assert!(radical_eval(&data, &q(&r.polynomial), &ctx(256)).is_err());
}

#[test]
fn zero_data_gives_the_rational_term() {
    let data = ResolventData::new(N, 5, Integer::from(1), vec![(Integer::new(), Integer::new()); 2]).unwrap();
    let x = radical_value(&data, &ctx(128)).unwrap();
    assert_eq!(x.value().to_f64(), 0.2);
}

#[test]
fn discriminants_match_published_indices() {
    let fx = radicals_2317723().unwrap();
    for (name, p) in [("q3", 3u32), ("q5", 5), ("q7", 7)] {
        let f = fx.index(name).unwrap();
        let disc = discriminant(&q(name).to_zpoly()).unwrap();
        let expected = Integer::from(f.square_ref()) * Integer::from(-(N as i64)).pow((p - 1) / 2);
        assert_eq!(disc, expected, "{name}");
        assert_eq!(poly_index(&q(name), N).unwrap(), f, "{name}");
    }
}

#[test]
fn resolvents_are_recovered_from_q5_and_q7() {
    let fx = radicals_2317723().unwrap();
    for r in &fx.resolvents {
        let expected = ResolventData::from_fixture(N, r).unwrap();
        let found = derive_resolvents(&q(&r.polynomial), N, &ctx(256)).unwrap();
        assert!(found.equivalent(&expected).unwrap(), "{found:?}");
    }
}

#[test]
fn quintic_for_disc_minus_47_is_solved() {
    let c = ctx(512);
    let p = hilbert_poly(47, &c).unwrap().poly;
    let j = real_roots(&p, &c.doubled()).unwrap();
    assert_eq!(j.len(), 1);
    let real = singval::apnum::RealAP::from_computed(j[0].clone(), &c.doubled());
    let q = algdep(&real, 5, &c.doubled()).unwrap();
    assert_eq!(q, p);
    let data = derive_resolvents(&q, 47, &c).unwrap();
    radical_eval(&data, &q, &c.doubled()).unwrap();
}
