//! Projective representations `G -> (O/NO)^x` and the norm compatibility
//! `nrd(r(s)) = deg(s) chi(s)`.

use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::arith::{inv_mod, mulmod, reduce_rational, signed_residue};
use crate::cohomology::{Cochain1, Cocycle2, RationalUnit};
use crate::error::{Error, Result};
use crate::group::FiniteGroupTable;
use crate::level::{LevelRing, TorsionPoint};
use crate::quat::QuatElement;
use crate::rational::{format_rational, parse_rational};
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ProjectiveRepData {
    pub group: FiniteGroupTable,
    pub r: Vec<TorsionPoint>,
    #[serde(serialize_with = "ser_rats", deserialize_with = "de_rats")]
    pub deg: Vec<Rational>,
    pub chi: Vec<u64>,
}

fn ser_rats<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(format_rational))
}

fn de_rats<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
    Vec::<String>::deserialize(d)?
        .iter()
        .map(|s| parse_rational(s).map_err(serde::de::Error::custom))
        .collect()
}

impl ProjectiveRepData {
    pub fn validate(&self, ring: &LevelRing) -> Result<()> {
        let n = self.group.order();
        for (what, len) in [("r", self.r.len()), ("deg", self.deg.len()), ("chi", self.chi.len())] {
            if len != n {
                return Err(Error::SizeMismatch(format!("{what} has {len} entries for a group of order {n}")));
            }
        }
        for x in &self.r {
            ring.point(&x.0)?;
            if !ring.is_unit(x) {
                return Err(Error::NotAUnit);
            }
        }
        Ok(())
    }
}

/// `r(s) r(t) r(st)^-1` as a scalar residue, for every pair.
pub fn cocycle_defect(ring: &LevelRing, data: &ProjectiveRepData) -> Result<Vec<Vec<u64>>> {
    data.validate(ring)?;
    let g = &data.group;
    let n = g.order();
    let inv: Vec<TorsionPoint> = data.r.iter().map(|x| ring.unit_inverse(x)).collect::<Result<_>>()?;
    let mut out = vec![vec![0; n]; n];
    for s in 0..n {
        for t in 0..n {
            let d = ring.mul(&ring.mul(&data.r[s], &data.r[t]), &inv[g.mul(s, t)]);
            if !ring.is_central(&d) {
                return Err(Error::NotCentral(s, t));
            }
            if !ring.is_scalar(&d) {
                return Err(Error::NotScalar(s, t));
            }
            out[s][t] = d.0[0];
        }
    }
    Ok(out)
}

/// The defect lifted to `Q^x` through symmetric residues.
pub fn defect_cocycle(ring: &LevelRing, data: &ProjectiveRepData) -> Result<Cocycle2> {
    let d = cocycle_defect(ring, data)?;
    let n = ring.n();
    let values = d
        .iter()
        .map(|row| {
            row.iter()
                .map(|&v| if n == 1 { Ok(RationalUnit::one()) } else { RationalUnit::from_i64(signed_residue(v, n)) })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Cocycle2::new(&data.group, values)
}

fn deg_residue(data: &ProjectiveRepData, s: usize, n: u64) -> Result<u64> {
    reduce_rational(&data.deg[s], n).ok_or(Error::DegNotReducible(s))
}

/// `nrd(r(s)) == deg(s) chi(s) (mod N)` for each group element.
pub fn norm_compat_check(ring: &LevelRing, data: &ProjectiveRepData) -> Result<Vec<bool>> {
    data.validate(ring)?;
    let n = ring.n();
    (0..data.group.order())
        .map(|s| {
            let deg = deg_residue(data, s, n)?;
            Ok(ring.nrd(&data.r[s]) == mulmod(deg, data.chi[s] % n, n))
        })
        .collect()
}

/// `nrd(r(s)) alpha(s)^-2 == chi(s) deg(s) alpha(s)^-2 (mod N)`.
pub fn det_formula_check(ring: &LevelRing, data: &ProjectiveRepData, alpha: &Cochain1) -> Result<Vec<bool>> {
    data.validate(ring)?;
    if alpha.values.len() != data.group.order() {
        return Err(Error::SizeMismatch("alpha and the group differ in size".into()));
    }
    let n = ring.n();
    (0..data.group.order())
        .map(|s| {
            let a = reduce_rational(&alpha.values[s].to_rational(), n).ok_or(Error::AlphaNotReducible(s))?;
            let ainv = inv_mod(a, n).ok_or(Error::AlphaNotReducible(s))?;
            let ainv2 = mulmod(ainv, ainv, n);
            let deg = deg_residue(data, s, n)?;
            let lhs = mulmod(ring.nrd(&data.r[s]), ainv2, n);
            let rhs = mulmod(mulmod(data.chi[s] % n, deg, n), ainv2, n);
            Ok(lhs == rhs)
        })
        .collect()
}

/// Klein four-group acting through `1, j, x, x j` for anticommuting `x`, `j`
/// in the order. Degrees are `|nrd|`, and `chi` records the sign of `nrd`.
pub fn klein_example(ring: &LevelRing, x: &QuatElement, j: &QuatElement) -> Result<ProjectiveRepData> {
    let alg = ring.order().algebra();
    let group = FiniteGroupTable::parse_spec("klein")?;
    // Index 2a + b stands for a^a b^b.
    let lifts = [QuatElement::one(), j.clone(), x.clone(), alg.mul(x, j)];
    let r = lifts.iter().map(|q| ring.reduce(q)).collect::<Result<Vec<_>>>()?;
    let n = ring.n();
    let mut deg = Vec::new();
    let mut chi = Vec::new();
    for q in &lifts {
        let nrd = alg.norm(q);
        deg.push(num_traits::Signed::abs(&nrd));
        chi.push(if num_traits::Signed::is_negative(&nrd) { n - 1 } else { 1 % n });
    }
    Ok(ProjectiveRepData { group, r, deg, chi })
}
