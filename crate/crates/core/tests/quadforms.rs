use proptest::prelude::*;
use rug::Integer;
use singval::quadforms::{
    class_number_by_kronecker, compose, element_order, enumerate, is_squarefree, kronecker,
    kronecker_i64, power, reduce, Form,
};

fn form(a: i64, b: i64, c: i64) -> Form {
    Form::new(a, b, c).unwrap()
}

fn eval(f: (i64, i64, i64), x: i64, y: i64) -> i64 {
    f.0 * x * x + f.1 * x * y + f.2 * y * y
}

/// Image of `f` under the unimodular substitution `(x, y) -> (p x + q y, r x + s y)`.
fn act(f: (i64, i64, i64), p: i64, q: i64, r: i64, s: i64) -> (i64, i64, i64) {
    let a = eval(f, p, r);
    let c = eval(f, q, s);
    let b = 2 * (f.0 * p * q + f.2 * r * s) + f.1 * (p * s + q * r);
    (a, b, c)
}

/// Gauss reduction by single translations `x -> x +- y` and the swap
/// `(x, y) -> (-y, x)`, one elementary move at a time.
fn naive_reduce(mut f: (i64, i64, i64)) -> (i64, i64, i64) {
    loop {
        if f.1 > f.0 {
            f = act(f, 1, -1, 0, 1);
        } else if f.1 <= -f.0 {
            f = act(f, 1, 1, 0, 1);
        } else if f.0 > f.2 || (f.0 == f.2 && f.1 < 0) {
            f = act(f, 0, -1, 1, 0);
        } else {
            return f;
        }
    }
}

/// Equivalence test: bring `f` down by elementary moves, then search small
/// SL2(Z) matrices exhaustively.
fn equivalent(f: (i64, i64, i64), g: (i64, i64, i64)) -> bool {
    let f = naive_reduce(f);
    let r = 7;
    for p in -r..=r {
        for q in -r..=r {
            for rr in -r..=r {
                for s in -r..=r {
                    if p * s - q * rr == 1 && act(f, p, q, rr, s) == g {
                        return true;
                    }
                }
            }
        }
    }
    false
}

/// Dirichlet composition by brute force: find B with B = b1 mod 2a1,
/// B = b2 mod 2a2, B^2 = D mod 4 a1 a2, after moving f2 to a representative
/// with gcd(a1, a2, (b1+b2)/2) = 1.
fn united(f1: (i64, i64, i64), f2: (i64, i64, i64)) -> (i64, i64, i64) {
    let d = f1.1 * f1.1 - 4 * f1.0 * f1.2;
    let gcd = |mut x: i64, mut y: i64| {
        x = x.abs();
        y = y.abs();
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    };
    let mut candidates = vec![f2];
    for p in -3i64..=3 {
        for r in -3i64..=3 {
            for q in -3i64..=3 {
                for s in -3i64..=3 {
                    if p * s - q * r == 1 {
                        candidates.push(act(f2, p, q, r, s));
                    }
                }
            }
        }
    }
    for g in candidates {
        if g.0 <= 0 {
            continue;
        }
        let e = (f1.1 + g.1) / 2;
        if gcd(gcd(f1.0, g.0), e) != 1 {
            continue;
        }
        let m = 4 * f1.0 * g.0;
        for b in 0..m {
            if (b - f1.1).rem_euclid(2 * f1.0) == 0
                && (b - g.1).rem_euclid(2 * g.0) == 0
                && (b * b - d).rem_euclid(m) == 0
            {
                return (f1.0 * g.0, b, (b * b - d) / m);
            }
        }
    }
    panic!("no united representative found");
}

fn triple(f: &Form) -> (i64, i64, i64) {
    (f.a.to_i64().unwrap(), f.b.to_i64().unwrap(), f.c.to_i64().unwrap())
}

#[test]
fn multiplication_table_disc_minus_23_by_exhaustive_equivalence() {
    let group = enumerate(&Integer::from(-23)).unwrap();
    assert_eq!(group.h, 3);
    let reps: Vec<_> = group.classes.iter().map(triple).collect();
    assert_eq!(reps, vec![(1, 1, 6), (2, -1, 3), (2, 1, 3)]);
    for f in &reps {
        for g in &reps {
            let u = united(*f, *g);
            let matches: Vec<_> = reps.iter().filter(|r| equivalent(u, **r)).collect();
            assert_eq!(matches.len(), 1, "{f:?} * {g:?}");
            let got = compose(&form(f.0, f.1, f.2), &form(g.0, g.1, g.2)).unwrap();
            assert_eq!(triple(&got), *matches[0], "{f:?} * {g:?}");
        }
    }
    assert_eq!(
        compose(&form(2, 1, 3), &form(2, 1, 3)).unwrap(),
        form(2, -1, 3)
    );
}

#[test]
fn composition_agrees_with_dirichlet_oracle_on_small_discriminants() {
    for d in [-47i64, -56, -71, -84, -104, -151, -420] {
        let group = enumerate(&Integer::from(d)).unwrap();
        let reps: Vec<_> = group.classes.iter().map(triple).collect();
        for f in &reps {
            for g in &reps {
                let u = united(*f, *g);
                let got = triple(&compose(&form(f.0, f.1, f.2), &form(g.0, g.1, g.2)).unwrap());
                assert!(equivalent(u, got), "disc {d}: {f:?} * {g:?} -> {got:?}, oracle {u:?}");
            }
        }
    }
}

#[test]
fn reduction_agrees_with_exhaustive_equivalence() {
    let f = (3, 11, 12); // disc -23
    let r = triple(&reduce(&Form::new(3, 11, 12).unwrap()).unwrap());
    assert!(equivalent(f, r));
}

#[test]
fn group_axioms_on_enumerated_groups() {
    for d in [-23i64, -84, -163, -420, -1571, -4 * 1771] {
        let group = enumerate(&Integer::from(d)).unwrap();
        let principal = &group.classes[0];
        assert!(principal.is_principal());
        for f in &group.classes {
            assert!(f.is_reduced());
            assert_eq!(&compose(principal, f).unwrap(), f);
            assert!(compose(f, &f.inverse()).unwrap().is_principal());
            for g in group.classes.iter().take(6) {
                let prod = compose(f, g).unwrap();
                assert!(group.index_of(&prod).is_some(), "closure fails");
                assert_eq!(prod, compose(g, f).unwrap());
            }
        }
        let prod: u64 = group.generators.iter().map(|g| g.order).product();
        assert_eq!(prod, group.h, "disc {d}");
    }
}

fn sampled_group() -> singval::quadforms::ClassGroup {
    enumerate(&Integer::from(-4 * 19019)).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]
    #[test]
    fn associativity_on_sampled_triples(i in 0usize..1000, j in 0usize..1000, k in 0usize..1000) {
        let group = sampled_group();
        let n = group.classes.len();
        let (f, g, h) = (&group.classes[i % n], &group.classes[j % n], &group.classes[k % n]);
        let left = compose(&compose(f, g).unwrap(), h).unwrap();
        let right = compose(f, &compose(g, h).unwrap()).unwrap();
        prop_assert_eq!(left, right);
    }

    #[test]
    fn kronecker_is_multiplicative(d in -5000i64..5000, m in 1u64..300, n in 1u64..300) {
        let lhs = kronecker_i64(d, m * n);
        let rhs = kronecker_i64(d, m) * kronecker_i64(d, n);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn kronecker_big_path_matches_small(d in -100000i64..100000, k in 1u64..5000) {
        let big = Integer::from(d) * Integer::from(1u64 << 40) * 4u32 * 2u32;
        let small = d.wrapping_mul(1 << 43);
        prop_assert_eq!(kronecker(&big, k), kronecker_i64(small, k));
    }
}

/// Kronecker symbol from the prime factorisation and Euler's criterion.
fn kronecker_oracle(d: i64, k: u64) -> i32 {
    let mut result = 1;
    let mut m = k;
    let mut p = 2u64;
    while m > 1 {
        while m % p == 0 {
            m /= p;
            let sym = if p == 2 {
                match d.rem_euclid(8) {
                    1 | 7 => 1,
                    3 | 5 => -1,
                    _ => 0,
                }
            } else {
                let base = d.rem_euclid(p as i64) as u128;
                let mut acc = 1u128;
                for _ in 0..(p - 1) / 2 {
                    acc = acc * base % p as u128;
                }
                match acc {
                    0 => 0,
                    1 => 1,
                    _ => -1,
                }
            };
            result *= sym;
        }
        p += 1;
    }
    result
}

#[test]
fn kronecker_matches_euler_criterion() {
    for d in -400i64..=400 {
        for k in 1u64..=120 {
            assert_eq!(kronecker_i64(d, k), kronecker_oracle(d, k), "({d}/{k})");
        }
    }
    // (-11/p) for odd primes p by listing squares mod p; (-11/2) from -11 = 5 mod 8
    let is_square_mod = |x: i64, p: i64| (0..p).any(|y| (y * y - x).rem_euclid(p) == 0);
    let leg = |p: i64| if is_square_mod(-11, p) { 1 } else { -1 };
    let two = -1;
    let by_residues = vec![1, two, leg(3), two * two, leg(5)];
    assert_eq!(by_residues, vec![1, -1, 1, 1, 1]);
}

#[test]
fn class_numbers_match_kronecker_sums_up_to_3000() {
    for n in (7u64..=3000).step_by(4) {
        if !is_squarefree(n) {
            continue;
        }
        let h = enumerate(&Integer::from(-(n as i64))).unwrap().h;
        assert_eq!(class_number_by_kronecker(n).unwrap(), h, "N = {n}");
    }
}

#[test]
fn degree_tripling_for_weber_discriminants() {
    for n in (11u64..=3000).step_by(8) {
        if n % 3 == 0 || !is_squarefree(n) {
            continue;
        }
        let h = enumerate(&Integer::from(-(n as i64))).unwrap().h;
        let h4 = enumerate(&(Integer::from(-4) * n)).unwrap().h;
        assert_eq!(h4, 3 * h, "N = {n}");
    }
}

#[test]
fn large_printed_class_numbers() {
    assert_eq!(class_number_by_kronecker(2317723).unwrap(), 105);
    assert_eq!(class_number_by_kronecker(2140807).unwrap(), 309);
    let f = form(151, -91, 3851);
    assert_eq!(element_order(&f, 1000).unwrap(), 105);
    assert!(power(&f, 105).unwrap().is_principal());
}

#[test]
fn order_315_group_with_printed_generator() {
    let disc = Integer::from(-4) * 2317723;
    let group = enumerate(&disc).unwrap();
    assert_eq!(group.h, 315);
    assert!(group.is_cyclic());
    let g = form(604, 422, 3911);
    let group = group.with_generator(&g).unwrap();
    assert_eq!(group.cyclic_generator().unwrap(), &reduce(&g).unwrap());
    // a non-generator is refused
    let sq = power(&g, 3).unwrap();
    assert!(enumerate(&disc).unwrap().with_generator(&sq).is_err());
}

#[test]
fn class_group_json_round_trip() {
    let group = enumerate(&Integer::from(-23)).unwrap();
    let text = serde_json::to_string(&group).unwrap();
    assert!(text.contains(r#""discriminant":"-23""#));
    assert!(text.contains(r#""h":3"#));
    let back: singval::quadforms::ClassGroup = serde_json::from_str(&text).unwrap();
    assert_eq!(back.classes, group.classes);
}
