//! Local invariants of `(a, b | Q)`: Hilbert symbols and the discriminant.
//!
//! Both parameters are first replaced by signed squarefree integers in the
//! same square class; the symbol is then read off the explicit formulas
//! (Legendre symbols at odd primes, residues mod 8 at 2).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive};
use serde::{Serialize, Serializer};
use std::fmt;

use crate::arith::{legendre, prime_divisors, squarefree_part, valuation};
use crate::quat::QuatAlgebra;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Place {
    Prime(BigUint),
    Infinity,
}

impl Place {
    pub fn prime(p: u64) -> Self {
        Place::Prime(BigUint::from(p))
    }
}

impl fmt::Display for Place {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Place::Prime(p) => write!(f, "{p}"),
            Place::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for Place {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

/// Signed squarefree integer in the square class of a nonzero rational.
fn square_class(x: &Rational) -> BigInt {
    squarefree_part(&(x.numer() * x.denom()))
}

/// `(a, b)_v` as +1 or -1. Both arguments must be nonzero.
pub fn hilbert_symbol(a: &Rational, b: &Rational, place: &Place) -> i8 {
    let a = square_class(a);
    let b = square_class(b);
    match place {
        Place::Infinity => {
            if a.is_negative() && b.is_negative() {
                -1
            } else {
                1
            }
        }
        Place::Prime(p) => hilbert_at_prime(&a, &b, p),
    }
}

fn hilbert_at_prime(a: &BigInt, b: &BigInt, p: &BigUint) -> i8 {
    let pi = BigInt::from(p.clone());
    let alpha = valuation(a, p);
    let beta = valuation(b, p);
    let u = a / pi.pow(alpha);
    let v = b / pi.pow(beta);
    if p == &BigUint::from(2u32) {
        let eps = |x: &BigInt| -> u32 { ((x.mod_floor(&BigInt::from(4)) - BigInt::one()) / BigInt::from(2)).to_u32().unwrap() };
        let omega = |x: &BigInt| -> u32 {
            let r = x.mod_floor(&BigInt::from(8)).to_u32().unwrap();
            u32::from(r == 3 || r == 5)
        };
        let e = eps(&u) * eps(&v) + alpha * omega(&v) + beta * omega(&u);
        if e % 2 == 0 {
            1
        } else {
            -1
        }
    } else {
        let half: BigInt = ((&pi - 1) / 2) % 2u32;
        let mut s: i8 = if (alpha * beta) % 2 == 1 && half.is_one() { -1 } else { 1 };
        if beta % 2 == 1 {
            s *= legendre(&u, p);
        }
        if alpha % 2 == 1 {
            s *= legendre(&v, p);
        }
        s
    }
}

/// Finite primes at which `(a, b)` may ramify: the divisors of
/// `2 * num(a) * den(a) * num(b) * den(b)`.
pub fn candidate_primes(a: &Rational, b: &Rational) -> Vec<BigUint> {
    let prod = BigInt::from(2) * a.numer() * a.denom() * b.numer() * b.denom();
    prime_divisors(&prod)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AlgebraDiscriminant {
    #[serde(serialize_with = "crate::rational::serde_bigint::serialize")]
    pub disc: BigInt,
    pub ramified: Vec<Place>,
}

impl AlgebraDiscriminant {
    pub fn is_definite(&self) -> bool {
        self.ramified.contains(&Place::Infinity)
    }

    pub fn disc_u64(&self) -> u64 {
        self.disc.to_u64().expect("discriminant fits in u64")
    }
}

/// Product of the finite ramified primes, and the full ramified place list
/// (finite primes ascending, then `inf` when definite).
pub fn algebra_discriminant(alg: &QuatAlgebra) -> AlgebraDiscriminant {
    let (a, b) = (alg.a(), alg.b());
    let mut ramified = Vec::new();
    let mut disc = BigInt::one();
    for p in candidate_primes(a, b) {
        let place = Place::Prime(p.clone());
        if hilbert_symbol(a, b, &place) == -1 {
            disc *= BigInt::from(p);
            ramified.push(place);
        }
    }
    if hilbert_symbol(a, b, &Place::Infinity) == -1 {
        ramified.push(Place::Infinity);
    }
    AlgebraDiscriminant { disc, ramified }
}
