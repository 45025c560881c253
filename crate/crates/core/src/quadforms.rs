//! Binary quadratic forms of negative discriminant: reduction, composition,
//! class-group enumeration and Kronecker symbols.

use std::collections::HashMap;
use std::fmt;

use rayon::prelude::*;
use rug::{Assign, Integer};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Primitive positive definite form `a x^2 + b x y + c y^2`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Form {
    pub a: Integer,
    pub b: Integer,
    pub c: Integer,
}

impl Form {
    /// Validated constructor: negative discriminant, `a > 0`, primitive.
    pub fn new(a: impl Into<Integer>, b: impl Into<Integer>, c: impl Into<Integer>) -> Result<Form> {
        let form = Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        };
        if form.discriminant() >= 0 {
            return Err(Error::domain(format!("{form} has nonnegative discriminant")));
        }
        if form.a <= 0 {
            return Err(Error::domain(format!("{form} is not positive definite")));
        }
        let g = Integer::from(form.a.gcd_ref(&form.b)).gcd(&form.c);
        if g != 1 {
            return Err(Error::domain(format!("{form} is not primitive")));
        }
        Ok(form)
    }

    pub fn discriminant(&self) -> Integer {
        Integer::from(self.b.square_ref()) - Integer::from(4) * &self.a * &self.c
    }

    /// The identity class `[1, b0, (b0^2 - D)/4]` with `b0 = D mod 2`.
    pub fn principal(disc: &Integer) -> Result<Form> {
        check_discriminant(disc)?;
        let b = Integer::from(disc.is_odd() as u32);
        let c = (Integer::from(b.square_ref()) - disc) / 4u32;
        Ok(Form { a: Integer::from(1), b, c })
    }

    pub fn is_reduced(&self) -> bool {
        let abs_b = Integer::from(self.b.abs_ref());
        if abs_b > self.a || self.a > self.c {
            return false;
        }
        if (abs_b == self.a || self.a == self.c) && self.b < 0 {
            return false;
        }
        true
    }

    /// Inverse class representative `[a, -b, c]`.
    pub fn inverse(&self) -> Form {
        Form {
            a: self.a.clone(),
            b: Integer::from(-&self.b),
            c: self.c.clone(),
        }
    }

    pub fn is_principal(&self) -> bool {
        self.a == 1
    }

    fn key(&self) -> (Integer, Integer) {
        (self.a.clone(), self.b.clone())
    }
}

impl fmt::Display for Form {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}, {}]", self.a, self.b, self.c)
    }
}

#[derive(Serialize, Deserialize)]
struct FormJson {
    a: String,
    b: String,
    c: String,
}

impl Serialize for Form {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        FormJson {
            a: self.a.to_string(),
            b: self.b.to_string(),
            c: self.c.to_string(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Form {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = FormJson::deserialize(d)?;
        let parse = |s: &str| Integer::from_str_radix(s, 10).map_err(serde::de::Error::custom);
        Ok(Form {
            a: parse(&raw.a)?,
            b: parse(&raw.b)?,
            c: parse(&raw.c)?,
        })
    }
}

fn check_discriminant(disc: &Integer) -> Result<()> {
    if *disc >= 0 {
        return Err(Error::domain(format!("discriminant {disc} is not negative")));
    }
    let r = Integer::from(disc.mod_u(4));
    if r != 0 && r != 1 {
        return Err(Error::domain(format!("discriminant {disc} is not 0 or 1 mod 4")));
    }
    Ok(())
}

/// Reduced representative of the class of `f`.
pub fn reduce(f: &Form) -> Result<Form> {
    let disc = f.discriminant();
    if disc >= 0 {
        return Err(Error::domain(format!("{f} has nonnegative discriminant")));
    }
    if f.a <= 0 {
        return Err(Error::domain(format!("{f} is not positive definite")));
    }
    let mut a = f.a.clone();
    let mut b = f.b.clone();
    let mut c = f.c.clone();
    let mut t = Integer::new();
    loop {
        // bring b into (-a, a]
        let neg_a = Integer::from(-&a);
        if !(b > neg_a && b <= a) {
            let two_a = Integer::from(&a * 2u32);
            t.assign(&a - &b);
            let k = t.clone().div_rem_floor(two_a).0;
            // c += k (b + a k), b += 2 a k
            let ak = Integer::from(&a * &k);
            c += Integer::from(&b + &ak) * &k;
            b += Integer::from(&ak * 2u32);
        }
        if a > c {
            std::mem::swap(&mut a, &mut c);
            b = -b;
            continue;
        }
        if a == c && b < 0 {
            b = -b;
        }
        break;
    }
    Ok(Form { a, b, c })
}

/// Gauss composition followed by reduction.
pub fn compose(f1: &Form, f2: &Form) -> Result<Form> {
    let disc = f1.discriminant();
    if disc != f2.discriminant() {
        return Err(Error::domain(format!(
            "cannot compose {f1} and {f2}: discriminants differ"
        )));
    }
    let (f1, f2) = if f1.a > f2.a { (f2, f1) } else { (f1, f2) };
    let s = Integer::from(&f1.b + &f2.b) / 2u32;
    let n = Integer::from(&f2.b - &s);

    let (y1, d) = if f2.a.is_divisible(&f1.a) {
        (Integer::new(), f1.a.clone())
    } else {
        let (d, u, _v) = f2.a.clone().extended_gcd(f1.a.clone(), Integer::new());
        (u, d)
    };
    let (x2, y2, d1) = if s.is_divisible(&d) {
        (Integer::new(), Integer::from(-1), d.clone())
    } else {
        let (d1, x2, y2) = s.clone().extended_gcd(d.clone(), Integer::new());
        (x2, -y2, d1)
    };
    let v1 = Integer::from(&f1.a / &d1);
    let v2 = Integer::from(&f2.a / &d1);
    let r = (y1 * y2 * &n - x2 * &f2.c).modulo(&v1);
    let b3 = Integer::from(&f2.b + Integer::from(&v2 * &r) * 2u32);
    let a3 = Integer::from(&v1 * &v2);
    let num = Integer::from(b3.square_ref()) - &disc;
    let four_a = Integer::from(&a3 * 4u32);
    if !num.is_divisible(&four_a) {
        return Err(Error::Inconsistency(format!(
            "composition of {f1} and {f2} produced a non-integral form"
        )));
    }
    let c3 = num / four_a;
    reduce(&Form { a: a3, b: b3, c: c3 })
}

/// `f^n` for `n >= 0`, by square-and-multiply.
pub fn power(f: &Form, n: u64) -> Result<Form> {
    let mut result = Form::principal(&f.discriminant())?;
    let mut base = reduce(f)?;
    let mut e = n;
    while e > 0 {
        if e & 1 == 1 {
            result = compose(&result, &base)?;
        }
        e >>= 1;
        if e > 0 {
            base = compose(&base, &base)?;
        }
    }
    Ok(result)
}

/// Order of the class of `f`, capped at `limit`.
pub fn element_order(f: &Form, limit: u64) -> Result<u64> {
    let start = reduce(f)?;
    let mut cur = start.clone();
    for k in 1..=limit {
        if cur.is_principal() {
            return Ok(k);
        }
        cur = compose(&cur, &start)?;
    }
    Err(Error::Inconsistency(format!(
        "class of {f} has order above {limit}"
    )))
}

/// Class group of a negative discriminant.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ClassGroup {
    #[serde(with = "int_string")]
    pub discriminant: Integer,
    pub h: u64,
    pub classes: Vec<Form>,
    /// Generators with the order each adds on top of the previous ones.
    pub generators: Vec<Generator>,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Generator {
    pub form: Form,
    pub order: u64,
}

mod int_string {
    use rug::Integer;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(v: &Integer, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Integer, D::Error> {
        let s = String::deserialize(d)?;
        Integer::from_str_radix(&s, 10).map_err(serde::de::Error::custom)
    }
}

impl ClassGroup {
    pub fn is_cyclic(&self) -> bool {
        self.generators.len() <= 1
    }

    /// Index of a reduced form in `classes`.
    pub fn index_of(&self, f: &Form) -> Option<usize> {
        self.classes
            .binary_search_by(|g| (&g.a, &g.b).cmp(&(&f.a, &f.b)))
            .ok()
    }

    /// Replace the generator list by `g` when `g` generates the whole group.
    pub fn with_generator(mut self, g: &Form) -> Result<ClassGroup> {
        let g = reduce(g)?;
        if g.discriminant() != self.discriminant {
            return Err(Error::domain(format!(
                "{g} does not have discriminant {}",
                self.discriminant
            )));
        }
        let order = element_order(&g, self.h)?;
        if order != self.h {
            return Err(Error::domain(format!(
                "{g} has order {order}, not {}",
                self.h
            )));
        }
        self.generators = vec![Generator { form: g, order }];
        Ok(self)
    }

    /// Cyclic generator, when the group is cyclic.
    pub fn cyclic_generator(&self) -> Option<&Form> {
        match self.generators.as_slice() {
            [g] if g.order == self.h => Some(&g.form),
            [] => self.classes.first(),
            _ => None,
        }
    }
}

/// Reduced primitive forms of discriminant `disc`, sorted by `(a, b)`.
pub fn reduced_forms(disc: &Integer) -> Result<Vec<Form>> {
    check_discriminant(disc)?;
    let d = disc.to_i64().ok_or_else(|| {
        Error::Refused(format!("discriminant {disc} is too large to enumerate"))
    })?;
    let abs_d = d.unsigned_abs();
    let a_max = ((abs_d as f64 / 3.0).sqrt() as u64) + 1;
    let parity = (abs_d % 2) as i64;
    let mut forms: Vec<(i64, i64, i64)> = (1..=a_max as i64)
        .into_par_iter()
        .flat_map_iter(|a| {
            let mut out = Vec::new();
            if 3 * a * a > abs_d as i64 {
                return out;
            }
            let mut b = -a + 1;
            if (b - parity).rem_euclid(2) != 0 {
                b += 1;
            }
            while b <= a {
                let num = (b as i128) * (b as i128) - d as i128;
                let four_a = 4 * a as i128;
                if num % four_a == 0 {
                    let c = (num / four_a) as i64;
                    let ok = c >= a && !(b < 0 && a == c) && gcd3(a, b, c) == 1;
                    if ok {
                        out.push((a, b, c));
                    }
                }
                b += 2;
            }
            out
        })
        .collect();
    forms.sort();
    Ok(forms
        .into_iter()
        .map(|(a, b, c)| Form {
            a: a.into(),
            b: b.into(),
            c: c.into(),
        })
        .collect())
}

fn gcd3(a: i64, b: i64, c: i64) -> i64 {
    fn g(mut x: i64, mut y: i64) -> i64 {
        x = x.abs();
        y = y.abs();
        while y != 0 {
            let t = x % y;
            x = y;
            y = t;
        }
        x
    }
    g(g(a, b), c)
}

/// Enumerate the class group of `disc` and find generators.
pub fn enumerate(disc: &Integer) -> Result<ClassGroup> {
    let classes = reduced_forms(disc)?;
    let h = classes.len() as u64;
    let generators = find_generators(&classes, h)?;
    Ok(ClassGroup {
        discriminant: disc.clone(),
        h,
        classes,
        generators,
    })
}

fn find_generators(classes: &[Form], h: u64) -> Result<Vec<Generator>> {
    if h == 1 {
        return Ok(Vec::new());
    }
    // a single element of order h makes the group cyclic
    for f in classes.iter().skip(1) {
        if element_order(f, h)? == h {
            return Ok(vec![Generator {
                form: f.clone(),
                order: h,
            }]);
        }
    }
    // generic accumulation: add the first class outside the current subgroup
    let mut subgroup: HashMap<(Integer, Integer), Form> = HashMap::new();
    let principal = classes[0].clone();
    subgroup.insert(principal.key(), principal);
    let mut generators = Vec::new();
    for f in classes.iter().skip(1) {
        if subgroup.contains_key(&f.key()) {
            continue;
        }
        // relative order: smallest k with f^k in the subgroup
        let mut k = 1u64;
        let mut cur = f.clone();
        while !subgroup.contains_key(&cur.key()) {
            cur = compose(&cur, f)?;
            k += 1;
        }
        let old: Vec<Form> = subgroup.values().cloned().collect();
        let mut power = f.clone();
        for _ in 1..k {
            for g in &old {
                let prod = compose(g, &power)?;
                subgroup.insert(prod.key(), prod);
            }
            power = compose(&power, f)?;
        }
        generators.push(Generator {
            form: f.clone(),
            order: k,
        });
        if subgroup.len() as u64 == h {
            break;
        }
    }
    if subgroup.len() as u64 != h {
        return Err(Error::Inconsistency(
            "generators do not span the class group".into(),
        ));
    }
    Ok(generators)
}

/// Kronecker symbol `(d / k)` for `k > 0`.
pub fn kronecker(d: &Integer, k: u64) -> i32 {
    if let Some(small) = d.to_i64() {
        return kronecker_i64(small, k);
    }
    if k == 0 {
        return 0;
    }
    let mut twos = 0u32;
    let mut odd = k;
    while odd % 2 == 0 && odd > 0 {
        odd /= 2;
        twos += 1;
    }
    let mut result = 1;
    if twos > 0 {
        let two = kronecker_two(i64::from(d.mod_u(8)));
        if two == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            result *= two;
        }
    }
    if odd == 1 {
        return result;
    }
    let residue = Integer::from(d.modulo_ref(&Integer::from(odd))).to_i64().unwrap();
    result * jacobi(residue, odd)
}

fn kronecker_two(d_mod_8: i64) -> i32 {
    match d_mod_8.rem_euclid(8) {
        1 | 7 => 1,
        3 | 5 => -1,
        _ => 0,
    }
}

/// Jacobi symbol `(a / n)` for odd positive `n`.
fn jacobi(a: i64, n: u64) -> i32 {
    debug_assert!(n % 2 == 1);
    let mut a = a.rem_euclid(n as i64) as u64;
    let mut n = n;
    let mut result = 1;
    while a != 0 {
        while a % 2 == 0 {
            a /= 2;
            let r = n % 8;
            if r == 3 || r == 5 {
                result = -result;
            }
        }
        std::mem::swap(&mut a, &mut n);
        if a % 4 == 3 && n % 4 == 3 {
            result = -result;
        }
        a %= n;
    }
    if n == 1 {
        result
    } else {
        0
    }
}

/// Kronecker symbol for machine-size arguments.
pub fn kronecker_i64(d: i64, k: u64) -> i32 {
    if k == 0 {
        return if d == 1 || d == -1 { 1 } else { 0 };
    }
    let mut odd = k;
    let mut twos = 0u32;
    while odd % 2 == 0 {
        odd /= 2;
        twos += 1;
    }
    let mut result = 1;
    if twos > 0 {
        let two = kronecker_two(d);
        if two == 0 {
            return 0;
        }
        if twos % 2 == 1 {
            result *= two;
        }
    }
    if odd == 1 {
        return result;
    }
    result * jacobi(d, odd)
}

pub fn is_squarefree(n: u64) -> bool {
    if n == 0 {
        return false;
    }
    let mut m = n;
    let mut p = 2u64;
    while p * p <= m {
        if m % p == 0 {
            m /= p;
            if m % p == 0 {
                return false;
            }
        }
        p += if p == 2 { 1 } else { 2 };
    }
    true
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut p = 2u64;
    while p * p <= n {
        if n % p == 0 {
            return false;
        }
        p += 1;
    }
    true
}

/// `h(-N)` from the Kronecker-symbol sum over `1 <= k <= (N-1)/2`.
pub fn class_number_by_kronecker(n: u64) -> Result<u64> {
    if n <= 3 || n % 4 != 3 || !is_squarefree(n) {
        return Err(Error::domain(format!(
            "{n} is not a squarefree integer > 3 congruent to 3 mod 4"
        )));
    }
    let d = -(n as i64);
    let half = (n - 1) / 2;
    let sum: i64 = (1..=half)
        .into_par_iter()
        .map(|k| i64::from(kronecker_i64(d, k)))
        .sum();
    let divisor = if n % 8 == 3 { 3 } else { 1 };
    if sum <= 0 || sum % divisor != 0 {
        return Err(Error::Inconsistency(format!(
            "Kronecker sum {sum} for N = {n} is not a positive multiple of {divisor}"
        )));
    }
    Ok((sum / divisor) as u64)
}
