//! Arithmetic in GF(p^m) through discrete-log tables.
//!
//! A [`Field`] is built from a monic primitive polynomial over Z_p. Its root
//! `a` generates the multiplicative group, so every nonzero element is some
//! `a^k`. Elements are plain [`FieldElement`] values holding that exponent;
//! all arithmetic goes through the owning field's tables.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Largest field order accepted when building tables.
pub const MAX_FIELD_ORDER: u64 = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FieldError {
    #[error("{0} is not a prime")]
    NotPrime(u32),
    #[error("polynomial must have degree {expected}, got {actual} coefficients")]
    BadDegree { expected: u32, actual: usize },
    #[error("polynomial is not monic")]
    NotMonic,
    #[error("coefficient {0} is not in Z_p")]
    CoefficientOutOfRange(u32),
    #[error("field order {0} exceeds the table limit")]
    TooLarge(u64),
    #[error("polynomial is not irreducible")]
    NotIrreducible,
    #[error("polynomial is not primitive: root has order {order}")]
    NotPrimitive { order: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{r} does not divide the multiplicative group order {group_order}")]
    OrderNotDividing { r: u32, group_order: u32 },
    #[error("{0} is not the size of a subfield")]
    BadSubfield(u32),
    #[error("cannot parse field element {0:?}")]
    Parse(String),
}

/// Serialized field description: `{p, m, poly: [c0, ..., cm]}` with `cm = 1`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FieldConfig {
    pub p: u32,
    pub m: u32,
    pub poly: Vec<u32>,
}

impl FieldConfig {
    pub fn build(&self) -> Result<Field, FieldError> {
        Field::new(self.p, self.m, &self.poly)
    }
}

/// An element of a finite field: zero, or `a^k` with `k` reduced modulo the
/// multiplicative group order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FieldElement(Option<u32>);

impl FieldElement {
    pub const ZERO: FieldElement = FieldElement(None);
    pub const ONE: FieldElement = FieldElement(Some(0));

    pub fn is_zero(self) -> bool {
        self.0.is_none()
    }

    pub fn is_one(self) -> bool {
        self.0 == Some(0)
    }

    /// Discrete log with respect to the primitive root, `None` for zero.
    pub fn log(self) -> Option<u32> {
        self.0
    }
}

impl fmt::Display for FieldElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            None => write!(f, "0"),
            Some(k) => write!(f, "a^{k}"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct Field {
    p: u32,
    m: u32,
    poly: Vec<u32>,
    order: u32,
    // k -> packed base-p coefficient vector of a^k
    antilog: Vec<u32>,
    // packed vector -> k; entry 0 is unused
    log: Vec<u32>,
}

impl PartialEq for Field {
    fn eq(&self, other: &Self) -> bool {
        self.p == other.p && self.m == other.m && self.poly == other.poly
    }
}

impl Eq for Field {}

fn is_prime(n: u32) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2u32;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

impl Field {
    /// Builds GF(p^m) from `poly = [c0, ..., cm]`, checking that its root is
    /// a primitive element.
    pub fn new(p: u32, m: u32, poly: &[u32]) -> Result<Self, FieldError> {
        if !is_prime(p) {
            return Err(FieldError::NotPrime(p));
        }
        if m == 0 || poly.len() != m as usize + 1 {
            return Err(FieldError::BadDegree {
                expected: m,
                actual: poly.len(),
            });
        }
        if let Some(&c) = poly.iter().find(|&&c| c >= p) {
            return Err(FieldError::CoefficientOutOfRange(c));
        }
        if poly[m as usize] != 1 {
            return Err(FieldError::NotMonic);
        }
        let order = (p as u64).checked_pow(m).unwrap_or(u64::MAX);
        if order > MAX_FIELD_ORDER {
            return Err(FieldError::TooLarge(order));
        }
        if poly[0] == 0 {
            // x divides the polynomial
            return Err(FieldError::NotIrreducible);
        }
        let order = order as u32;
        let group = order - 1;

        let mut antilog = vec![0u32; group as usize];
        let mut log = vec![u32::MAX; order as usize];
        let mut digits = vec![0u32; m as usize];
        digits[0] = 1;
        for k in 0..group {
            let packed = pack(&digits, p);
            if packed == 0 {
                return Err(FieldError::NotIrreducible);
            }
            if log[packed as usize] != u32::MAX {
                return Err(FieldError::NotPrimitive { order: k });
            }
            log[packed as usize] = k;
            antilog[k as usize] = packed;
            // multiply by x and reduce with x^m = -(c0 + ... + c_{m-1} x^{m-1})
            let top = digits[m as usize - 1];
            for i in (1..m as usize).rev() {
                digits[i] = digits[i - 1];
            }
            digits[0] = 0;
            if top != 0 {
                for (i, d) in digits.iter_mut().enumerate() {
                    let sub = (top * poly[i]) % p;
                    *d = (*d + p - sub) % p;
                }
            }
        }
        if pack(&digits, p) != 1 {
            return Err(FieldError::NotPrimitive { order: group });
        }
        Ok(Field {
            p,
            m,
            poly: poly.to_vec(),
            order,
            antilog,
            log,
        })
    }

    pub fn config(&self) -> FieldConfig {
        FieldConfig {
            p: self.p,
            m: self.m,
            poly: self.poly.clone(),
        }
    }

    pub fn characteristic(&self) -> u32 {
        self.p
    }

    pub fn degree(&self) -> u32 {
        self.m
    }

    /// Number of elements, p^m.
    pub fn order(&self) -> u32 {
        self.order
    }

    /// Order of the multiplicative group, p^m - 1.
    pub fn group_order(&self) -> u32 {
        self.order - 1
    }

    /// The primitive root `a`.
    pub fn generator(&self) -> FieldElement {
        self.alpha_pow(1)
    }

    /// `a^k` for any integer `k`.
    pub fn alpha_pow(&self, k: i64) -> FieldElement {
        let g = self.group_order() as i64;
        FieldElement(Some(k.rem_euclid(g) as u32))
    }

    /// Image of an integer in the prime subfield.
    pub fn from_int(&self, n: i64) -> FieldElement {
        let r = n.rem_euclid(self.p as i64) as u32;
        self.unpack(r)
    }

    fn unpack(&self, packed: u32) -> FieldElement {
        if packed == 0 {
            FieldElement::ZERO
        } else {
            FieldElement(Some(self.log[packed as usize]))
        }
    }

    fn packed(&self, x: FieldElement) -> u32 {
        match x.0 {
            None => 0,
            Some(k) => self.antilog[k as usize],
        }
    }

    /// Coefficients of `x` as a polynomial in `a` of degree < m.
    pub fn coordinates(&self, x: FieldElement) -> Vec<u32> {
        let mut v = self.packed(x);
        (0..self.m)
            .map(|_| {
                let d = v % self.p;
                v /= self.p;
                d
            })
            .collect()
    }

    pub fn add(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        if x.is_zero() {
            return y;
        }
        if y.is_zero() {
            return x;
        }
        let (a, b) = (self.packed(x), self.packed(y));
        let sum = if self.p == 2 {
            a ^ b
        } else {
            digitwise(a, b, self.p, self.m, |u, v| (u + v) % self.p)
        };
        self.unpack(sum)
    }

    pub fn neg(&self, x: FieldElement) -> FieldElement {
        if self.p == 2 || x.is_zero() {
            return x;
        }
        // -1 = a^{(q-1)/2} for odd characteristic
        self.mul(x, self.alpha_pow(self.group_order() as i64 / 2))
    }

    pub fn sub(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        self.add(x, self.neg(y))
    }

    pub fn mul(&self, x: FieldElement, y: FieldElement) -> FieldElement {
        match (x.0, y.0) {
            (Some(i), Some(j)) => {
                FieldElement(Some(((i as u64 + j as u64) % self.group_order() as u64) as u32))
            }
            _ => FieldElement::ZERO,
        }
    }

    pub fn inv(&self, x: FieldElement) -> Result<FieldElement, FieldError> {
        match x.0 {
            None => Err(FieldError::DivisionByZero),
            Some(k) => Ok(self.alpha_pow(-(k as i64))),
        }
    }

    pub fn div(&self, x: FieldElement, y: FieldElement) -> Result<FieldElement, FieldError> {
        Ok(self.mul(x, self.inv(y)?))
    }

    /// `x^e`; negative exponents require `x != 0`, and `0^0 = 1`.
    pub fn pow(&self, x: FieldElement, e: i64) -> Result<FieldElement, FieldError> {
        match x.0 {
            None if e == 0 => Ok(FieldElement::ONE),
            None if e < 0 => Err(FieldError::DivisionByZero),
            None => Ok(FieldElement::ZERO),
            Some(k) => {
                let g = self.group_order() as i128;
                let prod = (k as i128 * e as i128).rem_euclid(g);
                Ok(FieldElement(Some(prod as u32)))
            }
        }
    }

    /// A primitive `r`-th root of unity, `a^{(p^m - 1) / r}`.
    pub fn root_of_unity(&self, r: u32) -> Result<FieldElement, FieldError> {
        let g = self.group_order();
        if r == 0 || !g.is_multiple_of(r) {
            return Err(FieldError::OrderNotDividing { r, group_order: g });
        }
        Ok(self.alpha_pow((g / r) as i64))
    }

    /// Multiplicative order of a nonzero element.
    pub fn multiplicative_order(&self, x: FieldElement) -> Option<u32> {
        let k = x.0?;
        let g = self.group_order();
        Some(g / gcd(g, k))
    }

    /// Whether `q` is the size of a subfield of this field.
    pub fn is_subfield_size(&self, q: u32) -> bool {
        let mut d = 0;
        let mut v = 1u64;
        while v < q as u64 {
            v *= self.p as u64;
            d += 1;
        }
        v == q as u64 && d >= 1 && self.m.is_multiple_of(d)
    }

    /// True iff `x` lies in the subfield GF(q), i.e. `x^q = x`.
    pub fn in_base_field(&self, x: FieldElement, q: u32) -> Result<bool, FieldError> {
        if !self.is_subfield_size(q) {
            return Err(FieldError::BadSubfield(q));
        }
        Ok(match x.0 {
            None => true,
            Some(k) => (k as u64 * (q as u64 - 1)).is_multiple_of(self.group_order() as u64),
        })
    }

    /// All elements of the subfield GF(q), zero first.
    pub fn subfield_elements(&self, q: u32) -> Result<Vec<FieldElement>, FieldError> {
        if !self.is_subfield_size(q) {
            return Err(FieldError::BadSubfield(q));
        }
        let step = self.group_order() / (q - 1);
        let mut out = vec![FieldElement::ZERO];
        out.extend((0..q - 1).map(|i| self.alpha_pow((i * step) as i64)));
        Ok(out)
    }

    pub fn elements(&self) -> impl Iterator<Item = FieldElement> + '_ {
        std::iter::once(FieldElement::ZERO).chain((0..self.group_order()).map(|k| FieldElement(Some(k))))
    }

    /// Renders `x` as `0` or `a^k`.
    pub fn format_element(&self, x: FieldElement) -> String {
        x.to_string()
    }

    /// Parses `0`, `1`, `a` or `a^k` (k may be negative or unreduced).
    pub fn parse_element(&self, text: &str) -> Result<FieldElement, FieldError> {
        let s = text.trim();
        match s {
            "0" => return Ok(FieldElement::ZERO),
            "1" => return Ok(FieldElement::ONE),
            "a" => return Ok(self.alpha_pow(1)),
            _ => {}
        }
        let k = s
            .strip_prefix("a^")
            .and_then(|rest| rest.trim().parse::<i64>().ok())
            .ok_or_else(|| FieldError::Parse(text.to_string()))?;
        Ok(self.alpha_pow(k))
    }
}

fn pack(digits: &[u32], p: u32) -> u32 {
    digits.iter().rev().fold(0, |acc, &d| acc * p + d)
}

fn digitwise(a: u32, b: u32, p: u32, m: u32, op: impl Fn(u32, u32) -> u32) -> u32 {
    let (mut a, mut b) = (a, b);
    let mut out = 0;
    let mut scale = 1;
    for _ in 0..m {
        out += op(a % p, b % p) * scale;
        a /= p;
        b /= p;
        scale *= p;
    }
    out
}

pub(crate) fn gcd(a: u32, b: u32) -> u32 {
    if b == 0 {
        a
    } else {
        gcd(b, a % b)
    }
}

/// GF(16) from x^4 + x + 1.
pub fn gf16() -> Field {
    Field::new(2, 4, &[1, 1, 0, 0, 1]).expect("x^4+x+1 is primitive")
}

/// GF(4096) from x^12 + x^7 + x^6 + x^5 + x^3 + x + 1.
pub fn gf4096() -> Field {
    Field::new(2, 12, &[1, 1, 0, 1, 0, 1, 1, 1, 0, 0, 0, 0, 1])
        .expect("x^12+x^7+x^6+x^5+x^3+x+1 is primitive")
}

/// GF(4) from x^2 + x + 1.
pub fn gf4() -> Field {
    Field::new(2, 2, &[1, 1, 1]).expect("x^2+x+1 is primitive")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builds_example_fields() {
        assert_eq!(gf16().order(), 16);
        assert_eq!(gf4096().order(), 4096);
        let gf2 = Field::new(2, 1, &[1, 1]).unwrap();
        assert_eq!(gf2.order(), 2);
        assert_eq!(gf2.generator(), FieldElement::ONE);
    }

    #[test]
    fn rejects_bad_polynomials() {
        // x^4 + x^3 + x^2 + x + 1 is irreducible but its root has order 5
        assert_eq!(
            Field::new(2, 4, &[1, 1, 1, 1, 1]),
            Err(FieldError::NotPrimitive { order: 5 })
        );
        // x^2 + 1 = (x + 1)^2
        assert!(matches!(
            Field::new(2, 2, &[1, 0, 1]),
            Err(FieldError::NotPrimitive { .. }) | Err(FieldError::NotIrreducible)
        ));
        assert_eq!(Field::new(2, 2, &[0, 1, 1]), Err(FieldError::NotIrreducible));
        assert_eq!(Field::new(4, 1, &[1, 1]), Err(FieldError::NotPrime(4)));
        assert_eq!(Field::new(2, 2, &[1, 1, 0]), Err(FieldError::NotMonic));
        assert_eq!(
            Field::new(3, 1, &[1, 5]),
            Err(FieldError::CoefficientOutOfRange(5))
        );
        assert!(matches!(
            Field::new(2, 21, &[1; 22]),
            Err(FieldError::TooLarge(_))
        ));
    }

    #[test]
    fn a4_reduces_to_a_plus_one() {
        let f = gf16();
        let a4 = f.alpha_pow(4);
        assert_eq!(f.coordinates(a4), vec![1, 1, 0, 0]);
        assert_eq!(a4, f.add(f.generator(), FieldElement::ONE));
    }

    #[test]
    fn inverse_and_order() {
        let f = gf16();
        for x in f.elements().skip(1) {
            assert_eq!(f.mul(x, f.inv(x).unwrap()), FieldElement::ONE);
        }
        assert_eq!(f.pow(f.generator(), 15).unwrap(), FieldElement::ONE);
        assert_eq!(f.inv(FieldElement::ZERO), Err(FieldError::DivisionByZero));
    }

    #[test]
    fn roots_of_unity() {
        let big = gf4096();
        assert_eq!(big.root_of_unity(5).unwrap(), big.alpha_pow(819));
        assert_eq!(big.root_of_unity(7).unwrap(), big.alpha_pow(585));
        let f = gf16();
        assert_eq!(f.root_of_unity(5).unwrap(), f.alpha_pow(3));
        assert!(matches!(
            f.root_of_unity(7),
            Err(FieldError::OrderNotDividing { r: 7, .. })
        ));
        for r in [1u32, 3, 5, 15] {
            let w = f.root_of_unity(r).unwrap();
            assert_eq!(f.multiplicative_order(w), Some(r));
            assert_eq!(f.pow(w, r as i64).unwrap(), FieldElement::ONE);
            for k in 1..r {
                assert_ne!(f.pow(w, k as i64).unwrap(), FieldElement::ONE);
            }
        }
    }

    #[test]
    fn base_field_membership() {
        let f = gf16();
        assert!(f.in_base_field(FieldElement::ZERO, 2).unwrap());
        assert!(f.in_base_field(FieldElement::ONE, 2).unwrap());
        assert!(!f.in_base_field(f.generator(), 2).unwrap());
        assert!(f.in_base_field(f.alpha_pow(5), 4).unwrap());
        assert_eq!(f.in_base_field(f.generator(), 8), Err(FieldError::BadSubfield(8)));
        assert_eq!(f.in_base_field(f.generator(), 3), Err(FieldError::BadSubfield(3)));
        // exhaustive: the subfield is exactly the set closed under x -> x^q
        for q in [2u32, 4, 16] {
            let sub = f.subfield_elements(q).unwrap();
            assert_eq!(sub.len(), q as usize);
            for x in f.elements() {
                let expected = sub.contains(&x);
                assert_eq!(f.in_base_field(x, q).unwrap(), expected);
                assert_eq!(f.pow(x, q as i64).unwrap() == x, expected);
            }
        }
    }

    #[test]
    fn format_and_parse() {
        let f = gf16();
        assert_eq!(f.format_element(FieldElement::ZERO), "0");
        assert_eq!(f.format_element(FieldElement::ONE), "a^0");
        assert_eq!(f.format_element(f.alpha_pow(8)), "a^8");
        assert_eq!(f.parse_element("a^23").unwrap(), f.alpha_pow(8));
        assert_eq!(f.parse_element("a").unwrap(), f.generator());
        assert_eq!(f.parse_element("1").unwrap(), FieldElement::ONE);
        assert!(f.parse_element("b^2").is_err());
        for x in f.elements() {
            assert_eq!(f.parse_element(&f.format_element(x)).unwrap(), x);
        }
    }

    #[test]
    fn odd_characteristic() {
        // GF(9) from x^2 + 2x + 2 (primitive over Z_3)
        let f = Field::new(3, 2, &[2, 2, 1]).unwrap();
        let two = f.from_int(2);
        assert_eq!(f.add(FieldElement::ONE, FieldElement::ONE), two);
        assert_eq!(f.add(two, FieldElement::ONE), FieldElement::ZERO);
        assert_eq!(f.neg(FieldElement::ONE), two);
        for x in f.elements() {
            assert_eq!(f.sub(x, x), FieldElement::ZERO);
        }
    }
}
