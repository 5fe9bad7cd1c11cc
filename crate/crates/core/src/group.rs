//! Finite groups given by multiplication tables.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct FiniteGroupTable {
    table: Vec<Vec<usize>>,
    identity: usize,
    #[serde(skip)]
    inverse: Vec<usize>,
}

impl<'de> Deserialize<'de> for FiniteGroupTable {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Repr {
            Bare(Vec<Vec<usize>>),
            Full { table: Vec<Vec<usize>> },
        }
        let table = match Repr::deserialize(d)? {
            Repr::Bare(t) | Repr::Full { table: t } => t,
        };
        FiniteGroupTable::new(table).map_err(serde::de::Error::custom)
    }
}

impl FiniteGroupTable {
    /// Validates closure, associativity, identity and inverses.
    pub fn new(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table must be n x n with entries below n".into()));
        }
        let identity = (0..n)
            .find(|&e| (0..n).all(|g| table[e][g] == g && table[g][e] == g))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if table[table[a][b]][c] != table[a][table[b][c]] {
                        return Err(Error::InvalidGroup(format!("not associative at ({a}, {b}, {c})")));
                    }
                }
            }
        }
        let inverse = (0..n)
            .map(|g| {
                (0..n)
                    .find(|&h| table[g][h] == identity)
                    .ok_or_else(|| Error::InvalidGroup(format!("element {g} has no inverse")))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(FiniteGroupTable { table, identity, inverse })
    }

    pub fn cyclic(n: usize) -> Self {
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::new(table).expect("cyclic table is a group")
    }

    /// Pairs `(g, h)` indexed as `g * |H| + h`.
    pub fn direct_product(g: &Self, h: &Self) -> Self {
        let (m, k) = (g.order(), h.order());
        let table = (0..m * k)
            .map(|x| (0..m * k).map(|y| g.mul(x / k, y / k) * k + h.mul(x % k, y % k)).collect())
            .collect();
        Self::new(table).expect("product of groups is a group")
    }

    /// Dihedral group of order `2n`: index `s * n + r` stands for `s^s r^r`
    /// with `r` a rotation and `s` a reflection.
    pub fn dihedral(n: usize) -> Self {
        let idx = |s: usize, r: usize| s * n + r;
        let table = (0..2 * n)
            .map(|x| {
                let (s1, r1) = (x / n, x % n);
                (0..2 * n)
                    .map(|y| {
                        let (s2, r2) = (y / n, y % n);
                        // r^a s = s r^-a
                        let r = if s2 == 0 { (r1 + r2) % n } else { (n - r1 % n + r2) % n };
                        idx((s1 + s2) % 2, r)
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("dihedral table is a group")
    }

    /// Quaternion group `{±1, ±i, ±j, ±k}` in that index order.
    pub fn quaternion() -> Self {
        // (sign, unit) with unit 0..4 = 1, i, j, k.
        let prod = |a: usize, b: usize| -> (usize, usize) {
            match (a, b) {
                (0, x) | (x, 0) => (0, x),
                (x, y) if x == y => (1, 0),
                (1, 2) => (0, 3),
                (2, 3) => (0, 1),
                (3, 1) => (0, 2),
                (2, 1) => (1, 3),
                (3, 2) => (1, 1),
                (1, 3) => (1, 2),
                _ => unreachable!(),
            }
        };
        let enc = |s: usize, u: usize| 2 * u + s;
        let table = (0..8)
            .map(|x| {
                (0..8)
                    .map(|y| {
                        let (s, u) = prod(x / 2, y / 2);
                        enc((s + x % 2 + y % 2) % 2, u)
                    })
                    .collect()
            })
            .collect();
        Self::new(table).expect("quaternion table is a group")
    }

    /// `cyclic:n`, `dihedral:n`, `quaternion`, `klein`, or products joined with `x`.
    pub fn parse_spec(spec: &str) -> Result<Self> {
        let bad = || Error::InvalidGroup(format!("unrecognised group spec {spec:?}"));
        let mut acc: Option<Self> = None;
        for part in spec.split('x') {
            let part = part.trim();
            let g = match part.split_once(':') {
                Some(("cyclic", n)) => Self::cyclic(n.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad)?),
                Some(("dihedral", n)) => Self::dihedral(n.parse::<usize>().ok().filter(|&n| n >= 1).ok_or_else(bad)?),
                None if part == "quaternion" => Self::quaternion(),
                None if part == "klein" => Self::direct_product(&Self::cyclic(2), &Self::cyclic(2)),
                None if part == "trivial" => Self::cyclic(1),
                _ => return Err(bad()),
            };
            acc = Some(match acc {
                None => g,
                Some(a) => Self::direct_product(&a, &g),
            });
        }
        acc.ok_or_else(bad)
    }

    pub fn order(&self) -> usize {
        self.table.len()
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.table[a][b]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn table(&self) -> &[Vec<usize>] {
        &self.table
    }

    pub fn is_abelian(&self) -> bool {
        (0..self.order()).all(|a| (0..self.order()).all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}
