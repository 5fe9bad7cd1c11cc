//! The quaternion algebra `(a, b | Q)` with basis `1, i, j, k`,
//! `i^2 = a`, `j^2 = b`, `k = ij = -ji`.

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};
use std::fmt;
use std::ops::{Add, Neg, Sub};

use crate::error::{Error, ParseError, Result};
use crate::rational::{format_rational, int, parse_rational, serde_rational, Rational};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "AlgebraRepr", into = "AlgebraRepr")]
pub struct QuatAlgebra {
    a: Rational,
    b: Rational,
}

#[derive(Serialize, Deserialize)]
struct AlgebraRepr {
    #[serde(with = "serde_rational")]
    a: Rational,
    #[serde(with = "serde_rational")]
    b: Rational,
}

impl TryFrom<AlgebraRepr> for QuatAlgebra {
    type Error = Error;
    fn try_from(r: AlgebraRepr) -> Result<Self> {
        QuatAlgebra::new(r.a, r.b)
    }
}

impl From<QuatAlgebra> for AlgebraRepr {
    fn from(q: QuatAlgebra) -> Self {
        AlgebraRepr { a: q.a, b: q.b }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct QuatElement(pub [Rational; 4]);

impl QuatAlgebra {
    pub fn new(a: Rational, b: Rational) -> Result<Self> {
        if a.is_zero() || b.is_zero() {
            return Err(Error::InvalidAlgebra);
        }
        Ok(QuatAlgebra { a, b })
    }

    pub fn from_ints(a: i64, b: i64) -> Result<Self> {
        Self::new(int(a), int(b))
    }

    pub fn a(&self) -> &Rational {
        &self.a
    }

    pub fn b(&self) -> &Rational {
        &self.b
    }

    /// Structure constants scaled to integers: `(1, a, b, ab)` times `den(a) den(b)`.
    fn integer_constants(&self) -> [BigInt; 4] {
        let (ad, bd) = (self.a.denom(), self.b.denom());
        let (an, bn) = (self.a.numer(), self.b.numer());
        [ad * bd, an * bd, bn * ad, an * bn]
    }

    pub fn mul(&self, x: &QuatElement, y: &QuatElement) -> QuatElement {
        let (dx, [x0, x1, x2, x3]) = x.integer_parts();
        let (dy, [y0, y1, y2, y3]) = y.integer_parts();
        let [one, a, b, ab] = self.integer_constants();
        let den = dx * dy * &one;
        let c = [
            &one * (&x0 * &y0) + &a * (&x1 * &y1) + &b * (&x2 * &y2) - &ab * (&x3 * &y3),
            &one * (&x0 * &y1 + &x1 * &y0) - &b * (&x2 * &y3 - &x3 * &y2),
            &one * (&x0 * &y2 + &x2 * &y0) + &a * (&x1 * &y3 - &x3 * &y1),
            &one * (&x0 * &y3 + &x3 * &y0 + &x1 * &y2 - &x2 * &y1),
        ];
        QuatElement(c.map(|v| Rational::new(v, den.clone())))
    }

    pub fn norm(&self, x: &QuatElement) -> Rational {
        let (d, [x0, x1, x2, x3]) = x.integer_parts();
        let [one, a, b, ab] = self.integer_constants();
        let num = &one * &x0 * &x0 - a * &x1 * &x1 - b * &x2 * &x2 + ab * &x3 * &x3;
        Rational::new(num, &d * &d * one)
    }

    pub fn inverse(&self, x: &QuatElement) -> Result<QuatElement> {
        let n = self.norm(x);
        if n.is_zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(x.conjugate().scale(&n.recip()))
    }

    /// Bilinear form `(x, y) -> Tr(x * conj(y))`, the polar form of the norm.
    pub fn trace_pairing(&self, x: &QuatElement, y: &QuatElement) -> Rational {
        let ab = &self.a * &self.b;
        let two = int(2);
        two * (&x.0[0] * &y.0[0] - &self.a * (&x.0[1] * &y.0[1]) - &self.b * (&x.0[2] * &y.0[2])
            + ab * (&x.0[3] * &y.0[3]))
    }

    /// Bilinear form `(x, y) -> Tr(x * y)`.
    pub fn trace_product(&self, x: &QuatElement, y: &QuatElement) -> Rational {
        self.trace_pairing(x, &y.conjugate())
    }

    /// True when the norm form is definite, i.e. the algebra ramifies at infinity.
    pub fn is_definite(&self) -> bool {
        self.a.is_negative() && self.b.is_negative()
    }

    pub fn i(&self) -> QuatElement {
        QuatElement::basis(1)
    }

    pub fn j(&self) -> QuatElement {
        QuatElement::basis(2)
    }

    pub fn k(&self) -> QuatElement {
        QuatElement::basis(3)
    }
}

impl fmt::Display for QuatAlgebra {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {} | Q)", format_rational(&self.a), format_rational(&self.b))
    }
}

impl QuatElement {
    /// `(d, c)` with `self = c / d` and `d` the least common denominator.
    pub fn integer_parts(&self) -> (BigInt, [BigInt; 4]) {
        let d = crate::rational::common_denominator(self.0.iter());
        let c = std::array::from_fn(|k| self.0[k].numer() * (&d / self.0[k].denom()));
        (d, c)
    }

    pub fn new(x0: Rational, x1: Rational, x2: Rational, x3: Rational) -> Self {
        QuatElement([x0, x1, x2, x3])
    }

    pub fn from_ints(c: [i64; 4]) -> Self {
        QuatElement(c.map(int))
    }

    pub fn zero() -> Self {
        QuatElement::from_ints([0; 4])
    }

    pub fn one() -> Self {
        QuatElement::from_ints([1, 0, 0, 0])
    }

    pub fn scalar(c: Rational) -> Self {
        QuatElement([c, Rational::zero(), Rational::zero(), Rational::zero()])
    }

    pub fn basis(idx: usize) -> Self {
        let mut c = [0; 4];
        c[idx] = 1;
        Self::from_ints(c)
    }

    pub fn coeffs(&self) -> &[Rational; 4] {
        &self.0
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(Zero::is_zero)
    }

    pub fn is_scalar(&self) -> bool {
        self.0[1..].iter().all(Zero::is_zero)
    }

    pub fn conjugate(&self) -> Self {
        let [x0, x1, x2, x3] = &self.0;
        QuatElement([x0.clone(), -x1, -x2, -x3])
    }

    pub fn reduced_trace(&self) -> Rational {
        &self.0[0] * int(2)
    }

    pub fn scale(&self, c: &Rational) -> Self {
        QuatElement(self.0.clone().map(|x| x * c))
    }

    pub fn to_strings(&self) -> [String; 4] {
        self.0.clone().map(|x| format_rational(&x))
    }

    pub fn parse(parts: &[String]) -> Result<Self, ParseError> {
        if parts.len() != 4 {
            return Err(ParseError::Malformed(format!(
                "quaternion needs 4 coefficients, got {}",
                parts.len()
            )));
        }
        Ok(QuatElement([
            parse_rational(&parts[0])?,
            parse_rational(&parts[1])?,
            parse_rational(&parts[2])?,
            parse_rational(&parts[3])?,
        ]))
    }
}

impl fmt::Display for QuatElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names = ["", "i", "j", "k"];
        let mut first = true;
        for (c, name) in self.0.iter().zip(names) {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let mag = c.abs();
            if !first {
                f.write_str(if neg { " - " } else { " + " })?;
            } else if neg {
                f.write_str("-")?;
            }
            if name.is_empty() || !mag.is_one() {
                f.write_str(&format_rational(&mag))?;
            }
            f.write_str(name)?;
            first = false;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

impl Add for &QuatElement {
    type Output = QuatElement;
    fn add(self, rhs: &QuatElement) -> QuatElement {
        QuatElement(std::array::from_fn(|r| &self.0[r] + &rhs.0[r]))
    }
}

impl Sub for &QuatElement {
    type Output = QuatElement;
    fn sub(self, rhs: &QuatElement) -> QuatElement {
        QuatElement(std::array::from_fn(|r| &self.0[r] - &rhs.0[r]))
    }
}

impl Neg for &QuatElement {
    type Output = QuatElement;
    fn neg(self) -> QuatElement {
        QuatElement(self.0.clone().map(|x| -x))
    }
}

impl Serialize for QuatElement {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        self.to_strings().serialize(s)
    }
}

impl<'de> Deserialize<'de> for QuatElement {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let parts = Vec::<String>::deserialize(d)?;
        QuatElement::parse(&parts).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::rat;

    fn alg(a: i64, b: i64) -> QuatAlgebra {
        QuatAlgebra::from_ints(a, b).unwrap()
    }

    #[test]
    fn structure_constants() {
        let h = alg(-1, -1);
        let (i, j, k) = (h.i(), h.j(), h.k());
        assert_eq!(h.mul(&i, &j), k);
        assert_eq!(h.mul(&j, &i), -&k);
        assert_eq!(h.mul(&i, &i), QuatElement::from_ints([-1, 0, 0, 0]));
        assert_eq!(h.mul(&k, &k), QuatElement::from_ints([-1, 0, 0, 0]));

        let split = alg(1, 1);
        assert_eq!(split.mul(&split.i(), &split.i()), QuatElement::one());
    }

    #[test]
    fn one_plus_i_times_one_minus_i() {
        let q = QuatAlgebra::new(rat(5, 3), int(-7)).unwrap();
        let x = QuatElement::from_ints([1, 1, 0, 0]);
        let y = QuatElement::from_ints([1, -1, 0, 0]);
        assert_eq!(q.mul(&x, &y), QuatElement::scalar(int(1) - rat(5, 3)));
    }

    #[test]
    fn trace_norm_basics() {
        let q = alg(3, -5);
        assert_eq!(QuatElement::one().reduced_trace(), int(2));
        assert_eq!(q.i().reduced_trace(), int(0));
        assert_eq!(q.norm(&QuatElement::one()), int(1));
        assert_eq!(q.norm(&q.i()), int(-3));
        assert_eq!(QuatElement::one().conjugate(), QuatElement::one());
        assert_eq!(q.i().conjugate(), -&q.i());
    }

    #[test]
    fn inverse() {
        let q = alg(2, 3);
        assert_eq!(q.inverse(&QuatElement::one()).unwrap(), QuatElement::one());
        assert_eq!(q.inverse(&q.i()).unwrap(), q.i().scale(&rat(1, 2)));
        // 1 + i has norm 1 - 2 = -1, nonzero; i + ... zero divisor in a split algebra:
        let split = alg(1, 1);
        let z = QuatElement::from_ints([1, 1, 0, 0]);
        assert_eq!(split.inverse(&z), Err(Error::ZeroNorm));
        assert_eq!(q.inverse(&QuatElement::zero()), Err(Error::ZeroNorm));
    }

    #[test]
    fn degenerate_algebra_rejected() {
        assert_eq!(QuatAlgebra::from_ints(0, 1), Err(Error::InvalidAlgebra));
        assert_eq!(QuatAlgebra::from_ints(2, 0), Err(Error::InvalidAlgebra));
    }

    #[test]
    fn display() {
        let x = QuatElement::new(rat(1, 2), int(-1), int(0), int(3));
        assert_eq!(x.to_string(), "1/2 - i + 3k");
        assert_eq!(QuatElement::zero().to_string(), "0");
    }

    #[test]
    fn json_round_trip() {
        let x = QuatElement::new(rat(1, 2), int(-1), int(0), rat(-7, 3));
        let s = serde_json::to_string(&x).unwrap();
        assert_eq!(s, r#"["1/2","-1","0","-7/3"]"#);
        assert_eq!(serde_json::from_str::<QuatElement>(&s).unwrap(), x);
        let q = alg(-1, 3);
        let s = serde_json::to_string(&q).unwrap();
        assert_eq!(s, r#"{"a":"-1","b":"3"}"#);
        assert_eq!(serde_json::from_str::<QuatAlgebra>(&s).unwrap(), q);
        assert!(serde_json::from_str::<QuatAlgebra>(r#"{"a":"0","b":"3"}"#).is_err());
    }
}
