//! Integer helpers: factorization, squarefree parts, Legendre symbols and
//! small modular arithmetic.

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

/// Trial-division factorization. Intended for the desk-scale integers that
/// show up as algebra parameters and cocycle values.
pub fn factorize(n: &BigUint) -> Vec<(BigUint, u32)> {
    let mut out = Vec::new();
    if n.is_zero() {
        return out;
    }
    let mut m = n.clone();
    if let Some(small) = m.to_u64() {
        for (p, e) in factorize_u64(small) {
            out.push((BigUint::from(p), e));
        }
        return out;
    }
    let mut d = BigUint::from(2u32);
    while &d * &d <= m {
        let mut e = 0;
        while (&m % &d).is_zero() {
            m /= &d;
            e += 1;
        }
        if e > 0 {
            out.push((d.clone(), e));
        }
        d += 1u32;
    }
    if !m.is_one() {
        out.push((m, 1));
    }
    out
}

pub fn factorize_u64(mut n: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut d = 2u64;
    while d.saturating_mul(d) <= n {
        let mut e = 0;
        while n % d == 0 {
            n /= d;
            e += 1;
        }
        if e > 0 {
            out.push((d, e));
        }
        d += if d == 2 { 1 } else { 2 };
    }
    if n > 1 {
        out.push((n, 1));
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<BigUint> {
    factorize(n.magnitude()).into_iter().map(|(p, _)| p).collect()
}

/// Signed squarefree part: `n = s * m^2` with `s` squarefree.
pub fn squarefree_part(n: &BigInt) -> BigInt {
    assert!(!n.is_zero(), "squarefree part of zero");
    let mut s = BigInt::one();
    for (p, e) in factorize(n.magnitude()) {
        if e % 2 == 1 {
            s *= BigInt::from(p);
        }
    }
    if n.sign() == Sign::Minus {
        -s
    } else {
        s
    }
}

pub fn is_squarefree(n: &BigUint) -> bool {
    factorize(n).iter().all(|(_, e)| *e == 1)
}

/// p-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: &BigUint) -> u32 {
    let p = BigInt::from(p.clone());
    let mut m = n.clone();
    let mut v = 0;
    while !m.is_zero() && (&m % &p).is_zero() {
        m /= &p;
        v += 1;
    }
    v
}

/// Legendre symbol (a/p) for an odd prime p, as -1, 0 or 1.
pub fn legendre(a: &BigInt, p: &BigUint) -> i8 {
    let pi = BigInt::from(p.clone());
    let r = a.mod_floor(&pi);
    if r.is_zero() {
        return 0;
    }
    let e = (&pi - 1) / 2;
    let t = r.modpow(&e, &pi);
    if t.is_one() {
        1
    } else {
        -1
    }
}

pub fn exact_sqrt(n: &BigInt) -> Option<BigInt> {
    if n.is_negative() {
        return None;
    }
    let r = n.sqrt();
    if &r * &r == *n {
        Some(r)
    } else {
        None
    }
}

pub fn gcd_u64(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Inverse of `a` modulo `m`, if it exists. `m = 1` has the trivial inverse 0.
pub fn inv_mod(a: u64, m: u64) -> Option<u64> {
    if m == 1 {
        return Some(0);
    }
    let e = (a as i128).extended_gcd(&(m as i128));
    if e.gcd != 1 {
        return None;
    }
    Some(e.x.rem_euclid(m as i128) as u64)
}

/// Reduce a rational modulo `m`; fails when the denominator is not invertible.
pub fn reduce_rational(x: &crate::Rational, m: u64) -> Option<u64> {
    let mm = BigInt::from(m);
    let n = x.numer().mod_floor(&mm).to_u64()?;
    let d = x.denom().mod_floor(&mm).to_u64()?;
    let di = inv_mod(d, m)?;
    Some(mulmod(n, di, m))
}

pub fn reduce_int(x: &BigInt, m: u64) -> u64 {
    x.mod_floor(&BigInt::from(m)).to_u64().expect("residue fits in u64")
}

#[inline]
pub fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

/// Symmetric representative of a residue in `(-m/2, m/2]`.
pub fn signed_residue(r: u64, m: u64) -> i64 {
    let r = r % m;
    if 2 * r > m {
        r as i64 - m as i64
    } else {
        r as i64
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factor_and_squarefree() {
        assert_eq!(factorize_u64(360), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize_u64(1), vec![]);
        assert_eq!(squarefree_part(&BigInt::from(-72)), BigInt::from(-2));
        assert_eq!(squarefree_part(&BigInt::from(49)), BigInt::from(1));
        assert!(is_squarefree(&BigUint::from(30u32)));
        assert!(!is_squarefree(&BigUint::from(12u32)));
    }

    #[test]
    fn legendre_small() {
        let p = BigUint::from(7u32);
        let squares: Vec<i64> = (1..7).filter(|x| legendre(&BigInt::from(*x), &p) == 1).collect();
        assert_eq!(squares, vec![1, 2, 4]);
        assert_eq!(legendre(&BigInt::from(-1), &p), -1);
        assert_eq!(legendre(&BigInt::from(14), &p), 0);
    }

    #[test]
    fn modular() {
        assert_eq!(inv_mod(3, 10), Some(7));
        assert_eq!(inv_mod(4, 10), None);
        assert_eq!(inv_mod(5, 1), Some(0));
        assert_eq!(reduce_rational(&crate::rational::rat(1, 3), 5), Some(2));
        assert_eq!(reduce_rational(&crate::rational::rat(1, 5), 5), None);
        assert_eq!(signed_residue(4, 5), -1);
        assert_eq!(signed_residue(2, 4), 2);
    }
}
