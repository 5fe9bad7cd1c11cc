//! Double cosets `Gamma \ (O/NO)^x / H` and the right action on them.

use serde::{Deserialize, Serialize};
use std::collections::HashSet;

use crate::error::{Error, Result};
use crate::level::{enumerate_units, LevelRing, TorsionPoint, UnitLevel};
use crate::quat::QuatElement;

/// Left subgroup.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum GammaSpec {
    All,
    Trivial,
    /// Units congruent to 1 modulo a divisor `m` of the level.
    Congruence(u64),
    Generators(Vec<TorsionPoint>),
}

/// Right subgroup, the image of the endomorphism units.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind", content = "value")]
pub enum EndoSpec {
    Trivial,
    Scalars,
    All,
    Generators(Vec<TorsionPoint>),
    /// Units of the image of `Z[x]` for an element `x` of the order.
    QuadraticImage(QuatElement),
}

fn malformed(msg: String) -> Error {
    Error::Parse(crate::ParseError::Malformed(msg))
}

fn parse_points(what: &str, s: &str) -> Result<Vec<TorsionPoint>> {
    serde_json::from_str(s).map_err(|e| malformed(format!("{what} generators: {e}")))
}

/// `all`, `trivial`, `congruence:M` or `gens:[[..], ..]`.
impl std::str::FromStr for GammaSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "all" => Ok(GammaSpec::All),
            None if s == "trivial" => Ok(GammaSpec::Trivial),
            Some(("congruence", m)) => {
                m.parse().map(GammaSpec::Congruence).map_err(|_| malformed(format!("bad congruence modulus {m:?}")))
            }
            Some(("gens", g)) => Ok(GammaSpec::Generators(parse_points("gamma", g)?)),
            _ => Err(malformed(format!("gamma: expected all, trivial, congruence:M or gens:JSON, got {s:?}"))),
        }
    }
}

/// `trivial`, `scalars`, `all`, `quadratic:x0,x1,x2,x3` or `gens:[[..], ..]`.
impl std::str::FromStr for EndoSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.split_once(':') {
            None if s == "trivial" => Ok(EndoSpec::Trivial),
            None if s == "scalars" => Ok(EndoSpec::Scalars),
            None if s == "all" => Ok(EndoSpec::All),
            Some(("quadratic", x)) => {
                let parts: Vec<String> = x.split(',').map(|p| p.trim().to_string()).collect();
                Ok(EndoSpec::QuadraticImage(QuatElement::parse(&parts)?))
            }
            Some(("gens", g)) => Ok(EndoSpec::Generators(parse_points("endo", g)?)),
            _ => Err(malformed(format!("endo: expected trivial, scalars, all, quadratic:X or gens:JSON, got {s:?}"))),
        }
    }
}

/// A subgroup of `(O/NO)^x`, kept both as a member set and a small generating set.
#[derive(Clone, Debug)]
pub struct Subgroup {
    pub elements: Vec<UnitLevel>,
    pub generators: Vec<UnitLevel>,
    members: HashSet<UnitLevel>,
}

impl Subgroup {
    pub fn contains(&self, x: &UnitLevel) -> bool {
        self.members.contains(x)
    }

    pub fn order(&self) -> usize {
        self.elements.len()
    }

    /// Closure of `gens` under multiplication; elements sorted.
    pub fn generated(ring: &LevelRing, gens: &[UnitLevel]) -> Result<Self> {
        for g in gens {
            if !ring.is_unit(g) {
                return Err(Error::InvalidSubgroup(format!("generator {:?} is not a unit", g.0)));
            }
        }
        let mut members: HashSet<UnitLevel> = HashSet::from([ring.one()]);
        let mut frontier = vec![ring.one()];
        while let Some(x) = frontier.pop() {
            for g in gens {
                let y = ring.mul(&x, g);
                if members.insert(y) {
                    frontier.push(y);
                }
            }
        }
        let mut elements: Vec<UnitLevel> = members.iter().copied().collect();
        elements.sort();
        Ok(Subgroup { elements, generators: minimal_generators(ring, gens), members })
    }

    /// Subgroup given by an explicit member list, which must be closed.
    pub fn from_elements(ring: &LevelRing, elems: Vec<UnitLevel>) -> Result<Self> {
        let members: HashSet<UnitLevel> = elems.iter().copied().collect();
        if !members.contains(&ring.one()) {
            return Err(Error::InvalidSubgroup("missing the identity".into()));
        }
        for x in &elems {
            if !ring.is_unit(x) {
                return Err(Error::InvalidSubgroup(format!("{:?} is not a unit", x.0)));
            }
        }
        let mut elements: Vec<UnitLevel> = members.iter().copied().collect();
        elements.sort();
        let generators = minimal_generators(ring, &elements);
        if Subgroup::generated(ring, &generators)?.order() != elements.len() {
            return Err(Error::InvalidSubgroup("element list is not closed under multiplication".into()));
        }
        Ok(Subgroup { elements, generators, members })
    }
}

/// Greedy generating set: keep each element not already generated.
fn minimal_generators(ring: &LevelRing, cands: &[UnitLevel]) -> Vec<UnitLevel> {
    let mut gens: Vec<UnitLevel> = Vec::new();
    let mut span: HashSet<UnitLevel> = HashSet::from([ring.one()]);
    for c in cands {
        if span.contains(c) {
            continue;
        }
        gens.push(*c);
        let mut frontier: Vec<UnitLevel> = span.iter().copied().collect();
        while let Some(x) = frontier.pop() {
            for g in &gens {
                let y = ring.mul(&x, g);
                if span.insert(y) {
                    frontier.push(y);
                }
            }
        }
    }
    gens
}

pub fn materialise_gamma(ring: &LevelRing, spec: &GammaSpec, units: &[UnitLevel]) -> Result<Subgroup> {
    match spec {
        GammaSpec::All => Subgroup::from_elements(ring, units.to_vec()),
        GammaSpec::Trivial => Subgroup::generated(ring, &[]),
        GammaSpec::Congruence(m) => {
            if *m == 0 || ring.n() % m != 0 {
                return Err(Error::InvalidSubgroup(format!("{m} does not divide the level {}", ring.n())));
            }
            let one = ring.one();
            let elems = units
                .iter()
                .filter(|u| u.0.iter().zip(one.0).all(|(a, b)| (a % m) == (b % m)))
                .copied()
                .collect();
            Subgroup::from_elements(ring, elems)
        }
        GammaSpec::Generators(g) => Subgroup::generated(ring, g),
    }
}

pub fn materialise_endo(ring: &LevelRing, spec: &EndoSpec, units: &[UnitLevel]) -> Result<Subgroup> {
    match spec {
        EndoSpec::Trivial => Subgroup::generated(ring, &[]),
        EndoSpec::Scalars => {
            let elems = units.iter().filter(|u| ring.is_scalar(u)).copied().collect();
            Subgroup::from_elements(ring, elems)
        }
        EndoSpec::All => Subgroup::from_elements(ring, units.to_vec()),
        EndoSpec::Generators(g) => Subgroup::generated(ring, g),
        EndoSpec::QuadraticImage(x) => {
            let xr = ring.reduce(x)?;
            let n = ring.n();
            let mut elems = HashSet::new();
            for u in 0..n {
                for v in 0..n {
                    let e = ring.add(&ring.scalar(u), &ring.scale(v, &xr));
                    if ring.is_unit(&e) {
                        elems.insert(e);
                    }
                }
            }
            Subgroup::from_elements(ring, elems.into_iter().collect())
        }
    }
}

struct UnionFind(Vec<usize>);

impl UnionFind {
    fn find(&mut self, mut x: usize) -> usize {
        while self.0[x] != x {
            self.0[x] = self.0[self.0[x]];
            x = self.0[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        // Keep the smaller index as root so the root is the least member.
        if ra < rb {
            self.0[rb] = ra;
        } else if rb < ra {
            self.0[ra] = rb;
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct DoubleCosetSpace {
    #[serde(rename = "N")]
    pub n: u64,
    /// Lexicographically least member of each double coset, in increasing order.
    pub reps: Vec<UnitLevel>,
    /// Size of each double coset.
    pub sizes: Vec<usize>,
    #[serde(skip)]
    gamma: Subgroup,
    #[serde(skip)]
    endo: Subgroup,
    #[serde(skip)]
    coset_of: Vec<Option<usize>>,
}

impl DoubleCosetSpace {
    pub fn gamma(&self) -> &Subgroup {
        &self.gamma
    }

    pub fn endo(&self) -> &Subgroup {
        &self.endo
    }

    /// Index of the double coset containing a unit.
    pub fn coset_of(&self, ring: &LevelRing, u: &UnitLevel) -> Option<usize> {
        self.coset_of.get(ring.index(u)).copied().flatten()
    }
}

pub fn double_cosets(ring: &LevelRing, gamma: &GammaSpec, endo: &EndoSpec, max_level: u64) -> Result<DoubleCosetSpace> {
    let units = enumerate_units(ring, max_level)?;
    let g = materialise_gamma(ring, gamma, &units)?;
    let h = materialise_endo(ring, endo, &units)?;
    double_cosets_from(ring, &units, g, h)
}

pub fn double_cosets_from(ring: &LevelRing, units: &[UnitLevel], gamma: Subgroup, endo: Subgroup) -> Result<DoubleCosetSpace> {
    let size = ring.size();
    let mut slot = vec![usize::MAX; size];
    for (i, u) in units.iter().enumerate() {
        slot[ring.index(u)] = i;
    }
    let mut uf = UnionFind((0..units.len()).collect());
    for (i, u) in units.iter().enumerate() {
        for gm in &gamma.generators {
            uf.union(i, slot[ring.index(&ring.mul(gm, u))]);
        }
        for hm in &endo.generators {
            uf.union(i, slot[ring.index(&ring.mul(u, hm))]);
        }
    }
    let mut root_to_coset = vec![usize::MAX; units.len()];
    let mut reps = Vec::new();
    let mut sizes = Vec::new();
    let mut coset_of = vec![None; size];
    // Units are in increasing order and each root is its class minimum,
    // so the first visit of a root is at the root itself.
    for (i, u) in units.iter().enumerate() {
        let r = uf.find(i);
        if root_to_coset[r] == usize::MAX {
            root_to_coset[r] = reps.len();
            reps.push(units[r]);
            sizes.push(0);
        }
        let c = root_to_coset[r];
        sizes[c] += 1;
        coset_of[ring.index(u)] = Some(c);
    }
    Ok(DoubleCosetSpace { n: ring.n(), reps, sizes, gamma, endo, coset_of })
}

/// True when `rho^-1 H rho = H`, checked on generators.
pub fn normalises(ring: &LevelRing, endo: &Subgroup, rho: &UnitLevel) -> Result<bool> {
    let inv = ring.unit_inverse(rho)?;
    Ok(endo.generators.iter().all(|h| endo.contains(&ring.mul(&ring.mul(&inv, h), rho))))
}

/// Permutation `[b] -> [b rho]` of the coset representatives.
pub fn galois_act(ring: &LevelRing, space: &DoubleCosetSpace, rho: &UnitLevel) -> Result<Vec<usize>> {
    if space.n != ring.n() {
        return Err(Error::LevelMismatch(space.n, ring.n()));
    }
    if !normalises(ring, &space.endo, rho)? {
        return Err(Error::NotInNormalizer);
    }
    Ok(space
        .reps
        .iter()
        .map(|b| space.coset_of(ring, &ring.mul(b, rho)).expect("product of units is a unit"))
        .collect())
}
