//! Imaginary quadratic subfields `Q(x)` with `x^2 = -d`, anticommuting
//! elements, the normalizer split at level N, and optimal embeddings.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::arith::{exact_sqrt, squarefree_part};
use crate::error::{Error, Result};
use crate::level::{LevelRing, TorsionPoint, UnitLevel};
use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::order::Order;
use crate::quat::{QuatAlgebra, QuatElement};
use crate::rational::{common_denominator, from_bigint, int, serde_bigint};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CMEmbedding {
    pub d: u64,
    pub x: QuatElement,
    #[serde(skip)]
    pub algebra: QuatAlgebra,
}

impl CMEmbedding {
    /// Checks `Tr(x) = 0` and `x^2 = -d`.
    pub fn new(algebra: QuatAlgebra, d: u64, x: QuatElement) -> Result<Self> {
        if d == 0 {
            return Err(Error::InvalidEmbedding("d must be positive".into()));
        }
        if !x.reduced_trace().is_zero() {
            return Err(Error::InvalidEmbedding(format!("{x} has nonzero trace")));
        }
        if algebra.mul(&x, &x) != QuatElement::scalar(int(-(d as i64))) {
            return Err(Error::InvalidEmbedding(format!("{x} does not square to -{d}")));
        }
        Ok(CMEmbedding { d, x, algebra })
    }
}

/// Search order for integers: 0, 1, -1, 2, -2, ...
fn zigzag_rank(n: i64) -> u64 {
    if n > 0 {
        2 * n as u64 - 1
    } else {
        2 * n.unsigned_abs()
    }
}

fn zigzag(bound: i64) -> Vec<i64> {
    let mut v = vec![0];
    for h in 1..=bound {
        v.push(h);
        v.push(-h);
    }
    v
}

/// Bounded search for `x = (x1 i + x2 j + x3 k) / q` with `nrd(x) = d`.
///
/// Candidates are taken by denominator `q = 1..=bound`, then height
/// `max |n_i| <= bound`, then `(n3, n2, n1)` in the order 0, 1, -1, 2, ...
pub fn find_imaginary_embedding(alg: &QuatAlgebra, d: u64, bound: u64) -> Result<CMEmbedding> {
    if d == 0 {
        return Err(Error::InvalidEmbedding("d must be positive".into()));
    }
    let b = bound as i64;
    let (a, bb) = (alg.a().clone(), alg.b().clone());
    let ab = &a * &bb;
    let target_num = BigInt::from(d);
    for q in 1..=b {
        let q2 = BigInt::from(q * q);
        let target = &target_num * &q2;
        for h in 0..=b {
            for &n3 in &zigzag(h) {
                for &n2 in &zigzag(h) {
                    for &n1 in &zigzag(h) {
                        if n1.abs().max(n2.abs()).max(n3.abs()) != h {
                            continue;
                        }
                        if q > 1 && [n1, n2, n3].iter().fold(q, |g, &n| g.gcd(&n)) != 1 {
                            continue;
                        }
                        let (m1, m2, m3) = (BigInt::from(n1), BigInt::from(n2), BigInt::from(n3));
                        // Numerators of -a x1^2 - b x2^2 + ab x3^2 over q^2.
                        let norm = -(&a * &m1 * &m1) - &bb * &m2 * &m2 + &ab * &m3 * &m3;
                        if norm.denom().is_one() && norm.numer() == &target {
                            let x = QuatElement([
                                Rational::zero(),
                                Rational::new(m1, q.into()),
                                Rational::new(m2, q.into()),
                                Rational::new(m3, q.into()),
                            ]);
                            return CMEmbedding::new(alg.clone(), d, x);
                        }
                    }
                }
            }
        }
    }
    Err(Error::SearchExhausted(bound))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AnticommutingJ {
    pub j: QuatElement,
    #[serde(serialize_with = "crate::rational::serde_rational::serialize")]
    pub j_squared: Rational,
}

#[cfg(test)]
/// Integer coefficients of `q` in the standard basis, if integral.
fn integral_coords(q: &QuatElement) -> Option<[BigInt; 4]> {
    q.coeffs().iter().all(|c| c.is_integer()).then(|| std::array::from_fn(|k| q.coeffs()[k].to_integer()))
}

fn height(v: &[BigInt]) -> BigInt {
    v.iter().map(|c| c.abs()).max().unwrap_or_default()
}

/// Ordering key: height, then `(c3, c2, c1, c0)` in the order 0, 1, -1, 2, ...
fn canonical_key(v: &[BigInt; 4]) -> (BigInt, [u64; 4]) {
    let z = |c: &BigInt| zigzag_rank(c.to_i64().unwrap_or(i64::MAX));
    (height(v), [z(&v[3]), z(&v[2]), z(&v[1]), z(&v[0])])
}

/// Integer matrix of `y -> y x + x y` on standard coordinates (columns = inputs).
fn anticommutator_matrix(alg: &QuatAlgebra, x: &QuatElement) -> IntMatrix {
    let cols: Vec<QuatElement> = (0..4)
        .map(|r| {
            let e = QuatElement::basis(r);
            &alg.mul(&e, x) + &alg.mul(x, &e)
        })
        .collect();
    let den = common_denominator(cols.iter().flat_map(|c| c.coeffs().iter()));
    let scale = from_bigint(den);
    (0..4)
        .map(|row| (0..4).map(|c| (&cols[c].coeffs()[row] * &scale).to_integer()).collect())
        .collect()
}

fn lagrange_reduce(mut b1: Vec<BigInt>, mut b2: Vec<BigInt>) -> (Vec<BigInt>, Vec<BigInt>) {
    let dot = |u: &[BigInt], v: &[BigInt]| -> BigInt { u.iter().zip(v).map(|(a, b)| a * b).sum() };
    loop {
        if dot(&b1, &b1) > dot(&b2, &b2) {
            std::mem::swap(&mut b1, &mut b2);
        }
        let n1 = dot(&b1, &b1);
        // Nearest integer to <b1,b2>/<b1,b1>.
        let num = dot(&b1, &b2);
        let two = BigInt::from(2);
        let mu: BigInt = (&two * &num + &n1).div_floor(&(&two * &n1));
        if mu.is_zero() {
            return (b1, b2);
        }
        b2 = b2.iter().zip(&b1).map(|(v, u)| v - &mu * u).collect();
    }
}

/// Rank of the solution space of `y x = -x y` over Q.
pub fn anticommutant_rank(alg: &QuatAlgebra, x: &QuatElement) -> usize {
    linalg::integer_kernel(&anticommutator_matrix(alg, x)).len()
}

/// Canonical integral `j` with `j x = -x j` and `nrd(j) != 0`.
///
/// The integral solutions form a rank-2 lattice. In a split algebra the
/// plane can contain isotropic lines, which are skipped. With a
/// Lagrange-reduced basis `b1, b2`, a solution of height `H` has
/// coefficients with `c1^2 + c2^2 <= 8 H^2 / |b1|^2`, so a box of that
/// radius around a known candidate is searched exhaustively.
pub fn anticommutant(alg: &QuatAlgebra, x: &QuatElement) -> Result<AnticommutingJ> {
    let kernel = linalg::integer_kernel(&anticommutator_matrix(alg, x));
    if kernel.len() != 2 {
        return Err(Error::NoSolution(format!("solution space has rank {} for {x}", kernel.len())));
    }
    let (b1, b2) = lagrange_reduce(kernel[0].clone(), kernel[1].clone());
    let combo = |c1: &BigInt, c2: &BigInt| -> [BigInt; 4] { std::array::from_fn(|k| c1 * &b1[k] + c2 * &b2[k]) };
    let anisotropic = |v: &[BigInt; 4]| !alg.norm(&QuatElement(v.clone().map(from_bigint))).is_zero();
    // At most two isotropic lines, so one of b1, b2, b1 + b2 will do.
    let one = BigInt::one();
    let zero = BigInt::zero();
    let start = [combo(&one, &zero), combo(&zero, &one), combo(&one, &one)]
        .into_iter()
        .find(|v| anisotropic(v))
        .ok_or_else(|| Error::NoSolution(format!("anticommuting plane of {x} is totally isotropic")))?;
    let h = height(&start);
    let b1_sq: BigInt = b1.iter().map(|c| c * c).sum();
    let bound = &h * &h * 8;
    let mut r = BigInt::one();
    while &r * &r * &b1_sq < bound {
        r += 1;
    }
    let r = r.to_i64().ok_or_else(|| Error::NoSolution("search radius overflow".into()))?;
    let mut best = start;
    for c1 in -r..=r {
        for c2 in -r..=r {
            if c1 == 0 && c2 == 0 {
                continue;
            }
            let v = combo(&BigInt::from(c1), &BigInt::from(c2));
            if canonical_key(&v) < canonical_key(&best) && anisotropic(&v) {
                best = v;
            }
        }
    }
    let j = QuatElement(best.map(from_bigint));
    let sq = alg.mul(&j, &j);
    debug_assert!(sq.is_scalar());
    Ok(AnticommutingJ { j_squared: sq.coeffs()[0].clone(), j })
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct NormalizerPartition {
    pub k_part: Vec<UnitLevel>,
    pub jk_part: Vec<UnitLevel>,
    pub neither: Vec<UnitLevel>,
}

/// Sort units by `u x = x u` (K) or `u x = conj(x) u` (jK). When both
/// hold, as happens if `2x` vanishes mod N, the unit goes to K.
pub fn normalizer_split(ring: &LevelRing, units: &[UnitLevel], x: &TorsionPoint) -> NormalizerPartition {
    let xbar = ring.conj(x);
    let mut out = NormalizerPartition::default();
    for u in units {
        let ux = ring.mul(u, x);
        if ux == ring.mul(x, u) {
            out.k_part.push(*u);
        } else if ux == ring.mul(&xbar, u) {
            out.jk_part.push(*u);
        } else {
            out.neither.push(*u);
        }
    }
    out
}

/// The quadratic order `(Q + Qx) ∩ O`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct QuadraticOrder {
    pub basis: [QuatElement; 2],
    #[serde(serialize_with = "serde_bigint::serialize")]
    pub discriminant: BigInt,
    #[serde(serialize_with = "serde_bigint::serialize")]
    pub field_discriminant: BigInt,
    #[serde(serialize_with = "serde_bigint::serialize")]
    pub conductor: BigInt,
}

/// Discriminant of `Z + Z w` under `(u, v) -> trd(u v)`.
fn trace_form_det(alg: &QuatAlgebra, w: &[QuatElement; 2]) -> Rational {
    let t = |u: &QuatElement, v: &QuatElement| alg.mul(u, v).reduced_trace();
    let m: RatMatrix = vec![vec![t(&w[0], &w[0]), t(&w[0], &w[1])], vec![t(&w[1], &w[0]), t(&w[1], &w[1])]];
    linalg::rat_det(&m)
}

/// Discriminant of `Q(sqrt(-d))`.
pub fn field_discriminant(d: u64) -> BigInt {
    let s = squarefree_part(&BigInt::from(d));
    let m = -s;
    if m.mod_floor(&BigInt::from(4)) == BigInt::one() {
        m
    } else {
        4 * m
    }
}

/// `Tr(x)^2 - 4 nrd(x)`, the discriminant of `Z[x]`.
pub fn monogenic_discriminant(alg: &QuatAlgebra, x: &QuatElement) -> Rational {
    let t = x.reduced_trace();
    &t * &t - int(4) * alg.norm(x)
}

pub fn optimal_embedding_order(order: &Order, emb: &CMEmbedding) -> Result<QuadraticOrder> {
    let alg = order.algebra();
    if alg != &emb.algebra {
        return Err(Error::InvalidEmbedding("embedding lives in a different algebra".into()));
    }
    // Functionals on standard coordinates that cut out Q + Qx.
    let span: RatMatrix = vec![QuatElement::one().coeffs().to_vec(), emb.x.coeffs().to_vec()];
    let annihilator = linalg::rat_kernel(&span);
    // Integer combinations of the order basis killed by both functionals.
    let basis = order.basis();
    let cols: Vec<Vec<Rational>> = basis
        .iter()
        .map(|b| annihilator.iter().map(|w| w.iter().zip(b.coeffs()).map(|(p, q)| p * q).sum()).collect())
        .collect();
    let den = common_denominator(cols.iter().flatten());
    let scale = from_bigint(den);
    let a: IntMatrix = (0..annihilator.len())
        .map(|r| (0..4).map(|c| (&cols[c][r] * &scale).to_integer()).collect())
        .collect();
    let kernel = linalg::integer_kernel(&a);
    if kernel.len() != 2 {
        return Err(Error::InvalidEmbedding(format!("intersection has rank {}", kernel.len())));
    }
    let w: [QuatElement; 2] = std::array::from_fn(|i| order.element(&kernel[i]));
    let disc = trace_form_det(alg, &w).to_integer();
    let field = field_discriminant(emb.d);
    let ratio = &disc / &field;
    let conductor = exact_sqrt(&ratio).ok_or_else(|| Error::NotASquare(ratio.to_string()))?;
    Ok(QuadraticOrder { basis: w, discriminant: disc, field_discriminant: field, conductor })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::level::enumerate_units;
    use crate::rational::rat;
    use rand::{Rng, SeedableRng};

    fn alg(a: i64, b: i64) -> QuatAlgebra {
        QuatAlgebra::from_ints(a, b).unwrap()
    }

    #[test]
    fn embeddings_in_hamilton() {
        let h = alg(-1, -1);
        assert_eq!(find_imaginary_embedding(&h, 1, 3).unwrap().x, h.i());
        assert_eq!(find_imaginary_embedding(&h, 2, 3).unwrap().x, &h.i() + &h.j());
        let x3 = find_imaginary_embedding(&h, 3, 3).unwrap().x;
        assert_eq!(h.mul(&x3, &x3), QuatElement::scalar(int(-3)));
        // Sums of three squares never equal 7.
        assert_eq!(find_imaginary_embedding(&h, 7, 2), Err(Error::SearchExhausted(2)));
    }

    #[test]
    fn split_algebra_embedding_matches_search_oracle() {
        let m = alg(1, 1);
        let e = find_imaginary_embedding(&m, 1, 2).unwrap();
        assert_eq!(e.x, m.k());
        // Oracle: -x1^2 - x2^2 + x3^2 = 1 over integer points of height <= 2.
        let hits: Vec<_> = (-2i64..=2)
            .flat_map(|a| (-2i64..=2).flat_map(move |b| (-2i64..=2).map(move |c| (a, b, c))))
            .filter(|&(a, b, c)| -a * a - b * b + c * c == 1)
            .collect();
        assert!(hits.contains(&(0, 0, 1)));
    }

    #[test]
    fn rational_embedding_needs_denominators() {
        // In (-2, -3), nrd = 2 x1^2 + 3 x2^2 + 6 x3^2 never equals 1 on
        // integers; the first hit is (j + k)/3.
        let b = alg(-2, -3);
        let e = find_imaginary_embedding(&b, 1, 4).unwrap();
        assert_eq!(e.x, QuatElement([int(0), int(0), rat(1, 3), rat(1, 3)]));
        assert_eq!(find_imaginary_embedding(&b, 1, 2), Err(Error::SearchExhausted(2)));
    }

    #[test]
    fn invalid_embedding() {
        let h = alg(-1, -1);
        assert!(matches!(CMEmbedding::new(h.clone(), 2, h.i()), Err(Error::InvalidEmbedding(_))));
        assert!(matches!(CMEmbedding::new(h.clone(), 1, QuatElement::one()), Err(Error::InvalidEmbedding(_))));
    }

    #[test]
    fn anticommutant_of_i() {
        let h = alg(-1, -1);
        let j = anticommutant(&h, &h.i()).unwrap();
        assert_eq!(j.j, h.j());
        assert_eq!(j.j_squared, int(-1));
        assert!(matches!(anticommutant(&h, &QuatElement::one()), Err(Error::NoSolution(_))));
    }

    #[test]
    fn anticommutant_random() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for (a, b) in [(-1, -1), (1, 1), (-1, 3), (2, 5)] {
            let q = alg(a, b);
            for _ in 0..20 {
                let x = QuatElement([
                    int(0),
                    rat(rng.gen_range(-5..=5), rng.gen_range(1..=3)),
                    int(rng.gen_range(-5..=5)),
                    int(rng.gen_range(-5..=5)),
                ]);
                if x.is_zero() || q.norm(&x).is_zero() {
                    continue;
                }
                assert_eq!(anticommutant_rank(&q, &x), 2);
                let j = anticommutant(&q, &x).unwrap();
                assert_eq!(q.mul(&j.j, &x), -&q.mul(&x, &j.j));
                assert!(!j.j_squared.is_zero());
                assert_eq!(q.mul(&j.j, &j.j), QuatElement::scalar(j.j_squared.clone()));
                // j k j^-1 = conj(k) for k = u + v x.
                let (u, v) = (int(rng.gen_range(-4..=4)), int(rng.gen_range(-4..=4)));
                let k = &QuatElement::scalar(u) + &x.scale(&v);
                assert_eq!(q.mul(&j.j, &k), q.mul(&k.conjugate(), &j.j));
                // Brute force: nothing in the kernel beats the choice on height.
                let h = height(&integral_coords(&j.j).unwrap()).to_i64().unwrap();
                if h <= 3 {
                    for c in 0..7i64.pow(4) {
                        let v: [BigInt; 4] = std::array::from_fn(|t| BigInt::from((c / 7i64.pow(t as u32)) % 7 - 3));
                        if v.iter().all(Zero::is_zero) {
                            continue;
                        }
                        let y = QuatElement(v.clone().map(from_bigint));
                        if q.mul(&y, &x) == -&q.mul(&x, &y) && !q.norm(&y).is_zero() {
                            assert!(canonical_key(&v) >= canonical_key(&integral_coords(&j.j).unwrap()));
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn normalizer_partition_at_three() {
        let o = fixture("split-maximal").unwrap();
        let ring = LevelRing::new(&o, 3).unwrap();
        let alg = o.algebra();
        let e = find_imaginary_embedding(alg, 1, 2).unwrap();
        let x = ring.reduce(&e.x).unwrap();
        let j = anticommutant(alg, &e.x).unwrap();
        let units = enumerate_units(&ring, 12).unwrap();
        let p = normalizer_split(&ring, &units, &x);
        assert_eq!(p.k_part.len() + p.jk_part.len() + p.neither.len(), units.len());
        assert!(p.k_part.contains(&ring.one()));
        assert!(p.jk_part.contains(&ring.reduce(&j.j).unwrap()));
        // (Z/3)[i] has 8 units; the coset j K^x has as many.
        assert_eq!((p.k_part.len(), p.jk_part.len()), (8, 8));
        let part = |u: &TorsionPoint| {
            if p.k_part.contains(u) {
                0
            } else if p.jk_part.contains(u) {
                1
            } else {
                2
            }
        };
        for u in &p.k_part {
            for v in &p.k_part {
                assert_eq!(part(&ring.mul(u, v)), 0);
            }
            for v in &p.jk_part {
                assert_eq!(part(&ring.mul(u, v)), 1);
            }
        }
        for u in &p.jk_part {
            for v in &p.jk_part {
                assert_eq!(part(&ring.mul(u, v)), 0);
            }
        }
    }

    #[test]
    fn optimal_orders() {
        let hur = fixture("hurwitz").unwrap();
        let e = find_imaginary_embedding(hur.algebra(), 1, 2).unwrap();
        let q = optimal_embedding_order(&hur, &e).unwrap();
        assert_eq!(q.discriminant, BigInt::from(-4));
        assert_eq!(q.conductor, BigInt::one());

        let sm = fixture("split-maximal").unwrap();
        let e = find_imaginary_embedding(sm.algebra(), 1, 2).unwrap();
        assert_eq!(optimal_embedding_order(&sm, &e).unwrap().discriminant, BigInt::from(-4));

        // x = i + j + k in Hurwitz: (1 + x)/2 is integral, so the optimal
        // order is the maximal order of Q(sqrt(-3)).
        let h = hur.algebra();
        let x = &(&h.i() + &h.j()) + &h.k();
        let e = CMEmbedding::new(h.clone(), 3, x.clone()).unwrap();
        let q = optimal_embedding_order(&hur, &e).unwrap();
        assert_eq!(q.discriminant, BigInt::from(-3));
        // Z[x] sits inside with index 2, and Z[cx] scales by c^2.
        assert_eq!(monogenic_discriminant(h, &x), int(-12));
        assert_eq!(monogenic_discriminant(h, &x.scale(&int(3))), int(-108));
        // Scaling x does not change Q + Qx.
        let lip = fixture("lipschitz").unwrap();
        let q = optimal_embedding_order(&lip, &e).unwrap();
        assert_eq!((q.discriminant, q.conductor), (BigInt::from(-12), BigInt::from(2)));
    }

    #[test]
    fn field_discriminants() {
        assert_eq!(field_discriminant(1), BigInt::from(-4));
        assert_eq!(field_discriminant(3), BigInt::from(-3));
        assert_eq!(field_discriminant(12), BigInt::from(-3));
        assert_eq!(field_discriminant(2), BigInt::from(-8));
    }
}
