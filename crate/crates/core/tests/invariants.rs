use num_bigint::BigInt;
use proptest::prelude::*;

use qmi_core::fixtures::fixture;
use qmi_core::hilbert::{candidate_primes, hilbert_symbol, Place};
use qmi_core::level::{LevelRing, TorsionPoint, WeilPairing};
use qmi_core::{QuatAlgebra, QuatElement, Rational};

fn nonzero() -> impl Strategy<Value = i64> {
    prop_oneof![-30i64..=-1, 1i64..=30]
}

fn rat() -> impl Strategy<Value = Rational> {
    (-40i64..=40, 1i64..=6).prop_map(|(n, d)| Rational::new(BigInt::from(n), BigInt::from(d)))
}

fn elt() -> impl Strategy<Value = QuatElement> {
    (rat(), rat(), rat(), rat()).prop_map(|(a, b, c, d)| QuatElement::new(a, b, c, d))
}

fn alg() -> impl Strategy<Value = QuatAlgebra> {
    (nonzero(), nonzero()).prop_map(|(a, b)| QuatAlgebra::from_ints(a, b).unwrap())
}

fn product_formula(a: &Rational, b: &Rational) -> i8 {
    candidate_primes(a, b)
        .into_iter()
        .map(|p| hilbert_symbol(a, b, &Place::Prime(p)))
        .chain(std::iter::once(hilbert_symbol(a, b, &Place::Infinity)))
        .product()
}

proptest! {
    #[test]
    fn norm_is_multiplicative(q in alg(), x in elt(), y in elt()) {
        prop_assert_eq!(q.norm(&q.mul(&x, &y)), q.norm(&x) * q.norm(&y));
    }

    #[test]
    fn multiplication_is_associative(q in alg(), x in elt(), y in elt(), z in elt()) {
        prop_assert_eq!(q.mul(&q.mul(&x, &y), &z), q.mul(&x, &q.mul(&y, &z)));
    }

    #[test]
    fn conjugation_is_an_anti_involution(q in alg(), x in elt(), y in elt()) {
        prop_assert_eq!(q.mul(&x, &x.conjugate()), QuatElement::scalar(q.norm(&x)));
        prop_assert_eq!(q.mul(&x, &y).conjugate(), q.mul(&y.conjugate(), &x.conjugate()));
    }

    #[test]
    fn inverse_roundtrips(q in alg(), x in elt()) {
        match q.inverse(&x) {
            Ok(inv) => prop_assert_eq!(q.mul(&x, &inv), QuatElement::one()),
            Err(_) => prop_assert_eq!(q.norm(&x), Rational::from_integer(0.into())),
        }
    }

    #[test]
    fn hilbert_symbols_are_symmetric_and_satisfy_the_product_formula(a in nonzero(), b in nonzero()) {
        let (a, b) = (Rational::from_integer(a.into()), Rational::from_integer(b.into()));
        prop_assert_eq!(product_formula(&a, &b), 1);
        for p in candidate_primes(&a, &b) {
            let place = Place::Prime(p);
            prop_assert_eq!(hilbert_symbol(&a, &b, &place), hilbert_symbol(&b, &a, &place));
        }
    }

    #[test]
    fn hilbert_symbol_is_bimultiplicative(a1 in nonzero(), a2 in nonzero(), b in nonzero(), p in prop::sample::select(vec![2u64, 3, 5, 7])) {
        let r = |n: i64| Rational::from_integer(n.into());
        let place = Place::prime(p);
        prop_assert_eq!(
            hilbert_symbol(&r(a1 * a2), &r(b), &place),
            hilbert_symbol(&r(a1), &r(b), &place) * hilbert_symbol(&r(a2), &r(b), &place)
        );
    }

    #[test]
    fn level_arithmetic_matches_the_algebra(
        name in prop::sample::select(vec!["split-maximal", "hurwitz", "lipschitz", "maximal-d6"]),
        n in 2u64..=7,
        x in prop::array::uniform4(0u64..7),
        y in prop::array::uniform4(0u64..7),
    ) {
        let o = fixture(name).unwrap();
        let ring = LevelRing::new(&o, n).unwrap();
        let (x, y) = (TorsionPoint(x.map(|c| c % n)), TorsionPoint(y.map(|c| c % n)));
        let lifted = o.algebra().mul(&ring.lift(&x), &ring.lift(&y));
        prop_assert_eq!(ring.mul(&x, &y), ring.reduce(&lifted).unwrap());
        prop_assert_eq!(ring.nrd(&ring.mul(&x, &y)), ring.nrd(&x) * ring.nrd(&y) % n);
    }

    #[test]
    fn weil_pairing_is_additive(
        n in 2u64..=5,
        x in prop::array::uniform4(0u64..5),
        x2 in prop::array::uniform4(0u64..5),
        y in prop::array::uniform4(0u64..5),
    ) {
        let o = fixture("hurwitz").unwrap();
        let ring = LevelRing::new(&o, n).unwrap();
        let w = WeilPairing::new(&ring);
        let p = |c: [u64; 4]| TorsionPoint(c.map(|v| v % n));
        let (x, x2, y) = (p(x), p(x2), p(y));
        prop_assert_eq!(w.pair(&ring.add(&x, &x2), &y), (w.pair(&x, &y) + w.pair(&x2, &y)) % n);
        prop_assert_eq!(w.pair(&x, &ring.add(&y, &x2)), (w.pair(&x, &y) + w.pair(&x, &x2)) % n);
    }
}
