//! Full-rank lattices in B, stored as one positive denominator over an
//! integer row HNF. The pair is normalised so the denominator is minimal,
//! which makes structural equality the same as lattice equality.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};
use crate::linalg::{self, IntMatrix, RatMatrix};
use crate::quat::{QuatAlgebra, QuatElement};
use crate::rational::{common_denominator, from_bigint, int};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Lattice4 {
    den: BigInt,
    hnf: IntMatrix,
}

impl Lattice4 {
    /// Canonical lattice spanned by `rows`. Fails unless they have rank 4.
    pub fn from_rows(rows: &[QuatElement]) -> Result<Self> {
        let den = common_denominator(rows.iter().flat_map(|r| r.0.iter()));
        let scale = from_bigint(den.clone());
        let ints: IntMatrix = rows
            .iter()
            .map(|r| r.0.iter().map(|x| (x * &scale).to_integer()).collect())
            .collect();
        let hnf = linalg::hnf_rows(ints);
        if hnf.len() < 4 {
            return Err(Error::RankDeficient(hnf.len()));
        }
        Ok(Self::normalised(den, hnf))
    }

    fn normalised(den: BigInt, mut hnf: IntMatrix) -> Self {
        let content = hnf.iter().flatten().fold(BigInt::zero(), |g, x| g.gcd(x));
        let g = den.gcd(&content);
        if g.is_one() {
            return Lattice4 { den, hnf };
        }
        for x in hnf.iter_mut().flatten() {
            *x /= &g;
        }
        Lattice4 { den: den / g, hnf }
    }

    /// The standard lattice `Z<1, i, j, k>`.
    pub fn standard() -> Self {
        Lattice4 { den: BigInt::one(), hnf: linalg::identity(4) }
    }

    pub fn denominator(&self) -> &BigInt {
        &self.den
    }

    pub fn integer_basis(&self) -> &IntMatrix {
        &self.hnf
    }

    pub fn basis(&self) -> Vec<QuatElement> {
        self.hnf
            .iter()
            .map(|row| {
                QuatElement(std::array::from_fn(|c| Rational::new(row[c].clone(), self.den.clone())))
            })
            .collect()
    }

    pub fn basis_matrix(&self) -> RatMatrix {
        self.basis().into_iter().map(|q| q.0.to_vec()).collect()
    }

    /// Covolume: absolute determinant of a basis.
    pub fn covolume(&self) -> Rational {
        let diag = (0..4).fold(BigInt::one(), |acc, i| acc * &self.hnf[i][i]);
        Rational::new(diag, self.den.pow(4))
    }

    /// Integer coordinates of `x` in the canonical basis, if `x` lies in the lattice.
    pub fn coords(&self, x: &QuatElement) -> Option<[BigInt; 4]> {
        let den = from_bigint(self.den.clone());
        let mut v: Vec<Rational> = x.0.iter().map(|c| c * &den).collect();
        let mut out: [BigInt; 4] = Default::default();
        for r in 0..4 {
            let q = &v[r] / from_bigint(self.hnf[r][r].clone());
            if !q.is_integer() {
                return None;
            }
            let q = q.to_integer();
            for c in r..4 {
                v[c] -= from_bigint(&q * &self.hnf[r][c]);
            }
            out[r] = q;
        }
        Some(out)
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.coords(x).is_some()
    }

    pub fn contains_lattice(&self, other: &Lattice4) -> bool {
        other.basis().iter().all(|b| self.contains(b))
    }

    pub fn scale(&self, c: &Rational) -> Lattice4 {
        assert!(!c.is_zero(), "scaling a lattice by zero");
        let rows: Vec<QuatElement> = self.basis().iter().map(|b| b.scale(c)).collect();
        Lattice4::from_rows(&rows).expect("nonzero scaling keeps rank")
    }

    pub fn sum(&self, other: &Lattice4) -> Lattice4 {
        let mut rows = self.basis();
        rows.extend(other.basis());
        Lattice4::from_rows(&rows).expect("sum of full lattices is full")
    }

    pub fn conjugate(&self) -> Lattice4 {
        let rows: Vec<QuatElement> = self.basis().iter().map(QuatElement::conjugate).collect();
        Lattice4::from_rows(&rows).expect("conjugation keeps rank")
    }

    /// `{b : Tr(b * conj(x)) in Z for all x in L}`.
    pub fn sharp_dual(&self, alg: &QuatAlgebra) -> Lattice4 {
        let g = gram_diagonal(alg);
        // D = (G * B^T)^-1; its rows are the dual basis.
        let b = self.basis_matrix();
        let gbt: RatMatrix = (0..4).map(|r| (0..4).map(|c| &g[r] * &b[c][r]).collect()).collect();
        let d = linalg::rat_inverse(&gbt).expect("trace form is nondegenerate");
        let rows: Vec<QuatElement> = d.into_iter().map(|r| QuatElement(r.try_into().unwrap())).collect();
        Lattice4::from_rows(&rows).expect("dual basis has full rank")
    }

    /// `{b : Tr(b * x) in Z for all x in L}`; equals the sharp dual of the conjugate.
    pub fn trace_dual(&self, alg: &QuatAlgebra) -> Lattice4 {
        self.conjugate().sharp_dual(alg)
    }

    pub fn intersect(&self, other: &Lattice4, alg: &QuatAlgebra) -> Lattice4 {
        self.sharp_dual(alg).sum(&other.sharp_dual(alg)).sharp_dual(alg)
    }
}

/// Diagonal of the Gram matrix of `Tr(x * conj(y))` on `1, i, j, k`.
fn gram_diagonal(alg: &QuatAlgebra) -> [Rational; 4] {
    let two = int(2);
    [two.clone(), -&two * alg.a(), -&two * alg.b(), two * alg.a() * alg.b()]
}

/// Generalised index `[l1 : l2] = covol(l2) / covol(l1)`.
pub fn lattice_index(l1: &Lattice4, l2: &Lattice4) -> Rational {
    l2.covolume() / l1.covolume()
}

#[derive(Serialize, Deserialize)]
struct LatticeRepr {
    den: String,
    rows: Vec<Vec<String>>,
}

impl Serialize for Lattice4 {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        LatticeRepr {
            den: self.den.to_string(),
            rows: self.hnf.iter().map(|r| r.iter().map(ToString::to_string).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Lattice4 {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = LatticeRepr::deserialize(d)?;
        let big = |t: &str| t.trim().parse::<BigInt>().map_err(D::Error::custom);
        let den = big(&repr.den)?;
        if !den.is_positive() {
            return Err(D::Error::custom("denominator must be positive"));
        }
        let rows = repr
            .rows
            .iter()
            .map(|r| {
                if r.len() != 4 {
                    return Err(D::Error::custom("lattice rows need 4 entries"));
                }
                let c = r.iter().map(|t| big(t)).collect::<std::result::Result<Vec<_>, _>>()?;
                Ok(QuatElement(std::array::from_fn(|k| Rational::new(c[k].clone(), den.clone()))))
            })
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Lattice4::from_rows(&rows).map_err(D::Error::custom)
    }
}

/// `sup / sub` as an abstract finite abelian group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct KernelModule {
    /// Nontrivial elementary divisors, each dividing the next.
    #[serde(serialize_with = "ser_bigints")]
    pub elementary_divisors: Vec<BigInt>,
    /// Generators matching the divisors, as elements of the larger lattice.
    pub generators: Vec<QuatElement>,
}

fn ser_bigints<S: Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(ToString::to_string))
}

impl KernelModule {
    pub fn order(&self) -> BigInt {
        self.elementary_divisors.iter().product()
    }

    /// All elements `sum c_i g_i` with `0 <= c_i < d_i`, in lexicographic
    /// order of the coefficient vectors. `None` if there are more than `limit`.
    pub fn representatives(&self, limit: usize) -> Option<Vec<QuatElement>> {
        let ds: Vec<usize> = self.elementary_divisors.iter().map(|d| d.to_usize()).collect::<Option<_>>()?;
        let total = ds.iter().try_fold(1usize, |acc, &d| acc.checked_mul(d))?;
        if total > limit {
            return None;
        }
        let mut out = Vec::with_capacity(total);
        let mut c = vec![0usize; ds.len()];
        loop {
            let mut x = QuatElement::zero();
            for (ci, g) in c.iter().zip(&self.generators) {
                x = &x + &g.scale(&int(*ci as i64));
            }
            out.push(x);
            let mut pos = ds.len();
            loop {
                if pos == 0 {
                    return Some(out);
                }
                pos -= 1;
                c[pos] += 1;
                if c[pos] < ds[pos] {
                    break;
                }
                c[pos] = 0;
            }
        }
    }
}

/// Structure of `sup / sub` via the Smith form of the change of basis.
pub fn kernel_module(sub: &Lattice4, sup: &Lattice4) -> Result<KernelModule> {
    if !sup.contains_lattice(sub) {
        return Err(Error::NotContained("smaller lattice is not inside the larger one".into()));
    }
    let sub_basis = sub.basis();
    let c: IntMatrix = sub_basis
        .iter()
        .map(|b| sup.coords(b).expect("containment checked").to_vec())
        .collect();
    let snf = linalg::smith(&c);
    // U C V = D: the rows of V^-1 (times the sup basis) are an adapted basis.
    let vq: RatMatrix = snf.v.iter().map(|r| r.iter().cloned().map(from_bigint).collect()).collect();
    let vinv = linalg::rat_inverse(&vq).expect("V is unimodular");
    let sup_basis = sup.basis();
    let mut divisors = Vec::new();
    let mut generators = Vec::new();
    for (i, d) in snf.diag.iter().enumerate() {
        if d.is_one() {
            continue;
        }
        let mut g = QuatElement::zero();
        for (coef, b) in vinv[i].iter().zip(&sup_basis) {
            g = &g + &b.scale(coef);
        }
        divisors.push(d.abs());
        generators.push(g);
    }
    Ok(KernelModule { elementary_divisors: divisors, generators })
}
