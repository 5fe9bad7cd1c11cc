//! The finite ring `O/NO`, its units, the trace pairing against
//! `O#/NO#`, and the constructive basis attached to four functionals.
//!
//! Points are coordinate vectors in the order's working basis (first basis
//! element 1), with residues in `[0, N)`.

use num_bigint::BigInt;
use num_traits::Zero;
use serde::{Deserialize, Serialize};

use crate::arith::{gcd_u64, inv_mod, mulmod, reduce_int};
use crate::error::{Error, ParseError, Result};
use crate::lattice::Lattice4;
use crate::order::Order;
use crate::quat::QuatElement;

pub type Mat4 = [[u64; 4]; 4];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct TorsionPoint(pub [u64; 4]);

/// A point whose reduced norm is invertible modulo the level.
pub type UnitLevel = TorsionPoint;

#[derive(Clone, Debug)]
pub struct LevelRing {
    n: u64,
    order: Order,
    table: [[TorsionPoint; 4]; 4],
    conj: [TorsionPoint; 4],
    trace: [u64; 4],
    form: Mat4,
}

fn reduce_coords(c: &[BigInt; 4], n: u64) -> TorsionPoint {
    TorsionPoint(std::array::from_fn(|r| reduce_int(&c[r], n)))
}

impl LevelRing {
    pub fn new(order: &Order, n: u64) -> Result<Self> {
        if n == 0 {
            return Err(ParseError::Malformed("level must be positive".into()).into());
        }
        let alg = order.algebra();
        let b = order.basis();
        let coords = |x: &QuatElement| {
            reduce_coords(&order.coords(x).expect("order is closed under the operation"), n)
        };
        let table = std::array::from_fn(|r| std::array::from_fn(|s| coords(&alg.mul(&b[r], &b[s]))));
        let conj = std::array::from_fn(|r| coords(&b[r].conjugate()));
        let as_int = |x: crate::Rational| reduce_int(&x.to_integer(), n);
        let trace = std::array::from_fn(|r| as_int(b[r].reduced_trace()));
        let mut form = [[0u64; 4]; 4];
        for r in 0..4 {
            form[r][r] = as_int(alg.norm(&b[r]));
            for s in r + 1..4 {
                form[r][s] = as_int(alg.trace_pairing(&b[r], &b[s]));
            }
        }
        Ok(LevelRing { n, order: order.clone(), table, conj, trace, form })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    pub fn zero(&self) -> TorsionPoint {
        TorsionPoint([0; 4])
    }

    pub fn one(&self) -> TorsionPoint {
        self.scalar(1)
    }

    pub fn scalar(&self, c: u64) -> TorsionPoint {
        TorsionPoint([c % self.n, 0, 0, 0])
    }

    pub fn is_scalar(&self, x: &TorsionPoint) -> bool {
        x.0[1..].iter().all(|&c| c % self.n == 0)
    }

    /// Validate raw residues as a point of this ring.
    pub fn point(&self, c: &[u64]) -> Result<TorsionPoint> {
        if c.len() != 4 {
            return Err(ParseError::Malformed(format!("a point needs 4 residues, got {}", c.len())).into());
        }
        if let Some(bad) = c.iter().find(|&&x| x >= self.n) {
            return Err(Error::NotReducible(bad.to_string(), self.n));
        }
        Ok(TorsionPoint([c[0], c[1], c[2], c[3]]))
    }

    /// Image of an element of O.
    pub fn reduce(&self, x: &QuatElement) -> Result<TorsionPoint> {
        let c = self.order.coords(x).ok_or_else(|| Error::NotReducible(x.to_string(), self.n))?;
        Ok(reduce_coords(&c, self.n))
    }

    /// Smallest nonnegative lift to O.
    pub fn lift(&self, x: &TorsionPoint) -> QuatElement {
        let c: Vec<BigInt> = x.0.iter().map(|&v| BigInt::from(v)).collect();
        self.order.element(&c)
    }

    pub fn add(&self, x: &TorsionPoint, y: &TorsionPoint) -> TorsionPoint {
        TorsionPoint(std::array::from_fn(|r| ((x.0[r] as u128 + y.0[r] as u128) % self.n as u128) as u64))
    }

    pub fn neg(&self, x: &TorsionPoint) -> TorsionPoint {
        TorsionPoint(x.0.map(|c| (self.n - c % self.n) % self.n))
    }

    pub fn sub(&self, x: &TorsionPoint, y: &TorsionPoint) -> TorsionPoint {
        self.add(x, &self.neg(y))
    }

    pub fn scale(&self, c: u64, x: &TorsionPoint) -> TorsionPoint {
        TorsionPoint(x.0.map(|v| mulmod(c % self.n, v, self.n)))
    }

    pub fn mul(&self, x: &TorsionPoint, y: &TorsionPoint) -> TorsionPoint {
        let n = self.n;
        let mut acc = [0u128; 4];
        for r in 0..4 {
            if x.0[r] == 0 {
                continue;
            }
            for s in 0..4 {
                let c = mulmod(x.0[r], y.0[s], n);
                if c == 0 {
                    continue;
                }
                for (t, a) in acc.iter_mut().enumerate() {
                    *a = (*a + mulmod(c, self.table[r][s].0[t], n) as u128) % n as u128;
                }
            }
        }
        TorsionPoint(acc.map(|a| a as u64))
    }

    pub fn conj(&self, x: &TorsionPoint) -> TorsionPoint {
        let mut out = self.zero();
        for r in 0..4 {
            out = self.add(&out, &self.scale(x.0[r], &self.conj[r]));
        }
        out
    }

    pub fn trace(&self, x: &TorsionPoint) -> u64 {
        (0..4).fold(0, |acc, r| (acc + mulmod(x.0[r], self.trace[r], self.n)) % self.n)
    }

    pub fn nrd(&self, x: &TorsionPoint) -> u64 {
        let n = self.n;
        let mut acc = 0u64;
        for r in 0..4 {
            for s in r..4 {
                let t = mulmod(mulmod(x.0[r], x.0[s], n), self.form[r][s], n);
                acc = (acc + t) % n;
            }
        }
        acc
    }

    pub fn is_unit(&self, x: &TorsionPoint) -> bool {
        gcd_u64(self.nrd(x), self.n) == 1
    }

    pub fn unit_inverse(&self, x: &TorsionPoint) -> Result<TorsionPoint> {
        let inv = inv_mod(self.nrd(x), self.n).ok_or(Error::NotAUnit)?;
        Ok(self.scale(inv, &self.conj(x)))
    }

    pub fn commutes(&self, x: &TorsionPoint, y: &TorsionPoint) -> bool {
        self.mul(x, y) == self.mul(y, x)
    }

    pub fn is_central(&self, x: &TorsionPoint) -> bool {
        (0..4).all(|r| {
            let mut e = self.zero();
            e.0[r] = 1 % self.n;
            self.commutes(x, &e)
        })
    }

    /// Dense index in `0..N^4`, matching lexicographic order.
    pub fn index(&self, x: &TorsionPoint) -> usize {
        x.0.iter().fold(0usize, |acc, &c| acc * self.n as usize + c as usize)
    }

    pub fn size(&self) -> usize {
        (self.n as usize).pow(4)
    }

    pub fn from_index(&self, mut idx: usize) -> TorsionPoint {
        let n = self.n as usize;
        let mut c = [0u64; 4];
        for r in (0..4).rev() {
            c[r] = (idx % n) as u64;
            idx /= n;
        }
        TorsionPoint(c)
    }

    /// All `N^4` points in lexicographic order.
    pub fn points(&self) -> impl Iterator<Item = TorsionPoint> + '_ {
        (0..self.size()).map(|i| self.from_index(i))
    }

    /// Matrix `M` with `coords(x * g) = coords(x) * M` (row vectors).
    pub fn right_mul_matrix(&self, g: &TorsionPoint) -> Mat4 {
        std::array::from_fn(|r| {
            let mut e = self.zero();
            e.0[r] = 1 % self.n;
            self.mul(&e, g).0
        })
    }

    pub fn pow(&self, x: &TorsionPoint, mut e: u64) -> TorsionPoint {
        let mut base = *x;
        let mut acc = self.one();
        while e > 0 {
            if e & 1 == 1 {
                acc = self.mul(&acc, &base);
            }
            base = self.mul(&base, &base);
            e >>= 1;
        }
        acc
    }
}

/// Unit group of `O/NO`, scanned in lexicographic order.
pub fn enumerate_units(ring: &LevelRing, max_level: u64) -> Result<Vec<UnitLevel>> {
    if ring.n() > max_level {
        return Err(Error::LevelTooLarge { level: ring.n(), max: max_level });
    }
    let n = ring.n() as usize;
    let block = n.pow(3);
    let scan = |c0: usize| -> Vec<TorsionPoint> {
        (c0 * block..(c0 + 1) * block)
            .map(|i| ring.from_index(i))
            .filter(|x| ring.is_unit(x))
            .collect()
    };
    #[cfg(feature = "parallel")]
    {
        use rayon::prelude::*;
        Ok((0..n).into_par_iter().map(scan).collect::<Vec<_>>().concat())
    }
    #[cfg(not(feature = "parallel"))]
    {
        Ok((0..n).flat_map(scan).collect())
    }
}

/// The pairing `(x, y) -> Tr(x * conj(y)) / N mod 1` between `O/NO` and
/// `O#/NO#`. Values are returned as residues `r`, meaning `r / N`.
#[derive(Clone, Debug)]
pub struct WeilPairing {
    n: u64,
    dual: Lattice4,
    pairing: Mat4,
    /// `f_s * e_t` in dual coordinates.
    dual_right: [[TorsionPoint; 4]; 4],
    /// `e_r` in dual coordinates.
    inclusion: [TorsionPoint; 4],
}

impl WeilPairing {
    pub fn new(ring: &LevelRing) -> Self {
        let order = ring.order();
        let alg = order.algebra();
        let n = ring.n();
        let dual = order.sharp_dual();
        let f = dual.basis();
        let e = order.basis();
        let red = |x: crate::Rational| {
            debug_assert!(x.is_integer());
            reduce_int(&x.to_integer(), n)
        };
        let dcoords = |x: &QuatElement| reduce_coords(&dual.coords(x).expect("dual is a right O-module"), n);
        let pairing = std::array::from_fn(|r| std::array::from_fn(|s| red(alg.trace_pairing(&e[r], &f[s]))));
        let dual_right = std::array::from_fn(|s| std::array::from_fn(|t| dcoords(&alg.mul(&f[s], &e[t]))));
        let inclusion = std::array::from_fn(|r| dcoords(&e[r]));
        WeilPairing { n, dual, pairing, dual_right, inclusion }
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn dual_lattice(&self) -> &Lattice4 {
        &self.dual
    }

    pub fn pair(&self, x: &TorsionPoint, y: &TorsionPoint) -> u64 {
        let n = self.n;
        let mut acc = 0u64;
        for r in 0..4 {
            for s in 0..4 {
                acc = (acc + mulmod(mulmod(x.0[r], y.0[s], n), self.pairing[r][s], n)) % n;
            }
        }
        acc
    }

    /// Right action of `O/NO` on `O#/NO#`.
    pub fn right_mul(&self, y: &TorsionPoint, g: &TorsionPoint) -> TorsionPoint {
        let n = self.n;
        let mut out = [0u64; 4];
        for s in 0..4 {
            for t in 0..4 {
                let c = mulmod(y.0[s], g.0[t], n);
                for (u, o) in out.iter_mut().enumerate() {
                    *o = (*o + mulmod(c, self.dual_right[s][t].0[u], n)) % n;
                }
            }
        }
        TorsionPoint(out)
    }

    /// Image of `O/NO` in `O#/NO#`.
    pub fn include(&self, x: &TorsionPoint) -> TorsionPoint {
        let n = self.n;
        let mut out = [0u64; 4];
        for r in 0..4 {
            for (u, o) in out.iter_mut().enumerate() {
                *o = (*o + mulmod(x.0[r], self.inclusion[r].0[u], n)) % n;
            }
        }
        TorsionPoint(out)
    }

    /// The full `N^4 x N^4` table, rows indexed by `O/NO`, columns by `O#/NO#`.
    pub fn table(&self, ring: &LevelRing) -> Vec<Vec<u64>> {
        ring.points().map(|x| ring.points().map(|y| self.pair(&x, &y)).collect()).collect()
    }
}

pub fn weil_pairing(w: &WeilPairing, ring: &LevelRing, x: &TorsionPoint, y: &TorsionPoint) -> Result<u64> {
    if w.n() != ring.n() {
        return Err(Error::LevelMismatch(w.n(), ring.n()));
    }
    Ok(w.pair(x, y))
}

/// `w(x g, y g) == nrd(g) w(x, y)`.
pub fn pairing_norm_equivariance(
    w: &WeilPairing,
    ring: &LevelRing,
    x: &TorsionPoint,
    y: &TorsionPoint,
    g: &TorsionPoint,
) -> Result<bool> {
    if w.n() != ring.n() {
        return Err(Error::LevelMismatch(w.n(), ring.n()));
    }
    let lhs = w.pair(&ring.mul(x, g), &w.right_mul(y, g));
    let rhs = mulmod(ring.nrd(g), w.pair(x, y), ring.n());
    Ok(lhs == rhs)
}

/// Four functionals `O/NO -> Z/N`; row `r` holds the coefficients of `phi_r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FunctionalQuadruple {
    pub n: u64,
    pub rows: Mat4,
}

impl FunctionalQuadruple {
    pub fn identity(n: u64) -> Self {
        let mut rows = [[0; 4]; 4];
        for (r, row) in rows.iter_mut().enumerate() {
            row[r] = 1 % n;
        }
        FunctionalQuadruple { n, rows }
    }

    pub fn apply(&self, p: &TorsionPoint) -> [u64; 4] {
        mat_vec_mod(&self.rows, &p.0, self.n)
    }

    /// `C * phi` for a matrix `C` acting on the functional index.
    pub fn mix(&self, c: &Mat4) -> Self {
        FunctionalQuadruple { n: self.n, rows: mat_mul_mod(c, &self.rows, self.n) }
    }

    /// `Q -> phi(Q * g)`.
    pub fn twisted(ring: &LevelRing, g: &TorsionPoint) -> Self {
        let m = ring.right_mul_matrix(g);
        // phi_r(Q) = sum_s Q_s m[s][r], so the row for phi_r is column r of m.
        let rows = std::array::from_fn(|r| std::array::from_fn(|s| m[s][r]));
        FunctionalQuadruple { n: ring.n(), rows }
    }
}

pub fn mat_vec_mod(m: &Mat4, v: &[u64; 4], n: u64) -> [u64; 4] {
    std::array::from_fn(|r| (0..4).fold(0, |acc, s| (acc + mulmod(m[r][s], v[s], n)) % n))
}

pub fn mat_mul_mod(a: &Mat4, b: &Mat4, n: u64) -> Mat4 {
    std::array::from_fn(|r| std::array::from_fn(|c| (0..4).fold(0, |acc, k| (acc + mulmod(a[r][k], b[k][c], n)) % n)))
}

/// Inverse modulo `n` via the adjugate, if the determinant is a unit.
pub fn mat_inv_mod(m: &Mat4, n: u64) -> Option<Mat4> {
    let big: Vec<Vec<BigInt>> = m.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    let det = det_int(&big);
    let dinv = inv_mod(reduce_int(&det, n), n)?;
    let mut out = [[0u64; 4]; 4];
    for (r, row) in out.iter_mut().enumerate() {
        for (c, o) in row.iter_mut().enumerate() {
            // adj[r][c] = (-1)^(r+c) * minor(c, r)
            let minor: Vec<Vec<BigInt>> = (0..4)
                .filter(|&i| i != c)
                .map(|i| (0..4).filter(|&j| j != r).map(|j| big[i][j].clone()).collect())
                .collect();
            let mut cof = det_int(&minor);
            if (r + c) % 2 == 1 {
                cof = -cof;
            }
            *o = mulmod(reduce_int(&cof, n), dinv, n);
        }
    }
    Some(out)
}

fn det_int(m: &[Vec<BigInt>]) -> BigInt {
    if m.is_empty() {
        return BigInt::from(1);
    }
    if m.len() == 1 {
        return m[0][0].clone();
    }
    (0..m.len()).fold(BigInt::zero(), |acc, c| {
        if m[0][c].is_zero() {
            return acc;
        }
        let minor: Vec<Vec<BigInt>> = m[1..]
            .iter()
            .map(|row| row.iter().enumerate().filter(|&(j, _)| j != c).map(|(_, x)| x.clone()).collect())
            .collect();
        let t = &m[0][c] * det_int(&minor);
        if c % 2 == 0 {
            acc + t
        } else {
            acc - t
        }
    })
}

/// Basis `e_1..e_4` of `O/NO` attached to the functionals, with `e_1 = 1`.
///
/// With `P` the point where `phi = (1, 0, 0, 0)`, the basis is
/// `e_j = phi^-1(u_j) * P^-1`, so that `sum_i phi_i(Q) e_i = Q * P^-1`
/// for every `Q`. `P` must be a unit for `e_1 = 1` to be reachable.
pub fn basis_from_functionals(ring: &LevelRing, phi: &FunctionalQuadruple) -> Result<[TorsionPoint; 4]> {
    if phi.n != ring.n() {
        return Err(Error::LevelMismatch(phi.n, ring.n()));
    }
    let n = ring.n();
    let inv = mat_inv_mod(&phi.rows, n).ok_or(Error::SingularFunctionals)?;
    let column = |j: usize| TorsionPoint(std::array::from_fn(|r| inv[r][j]));
    let p = column(0);
    let pinv = ring
        .unit_inverse(&p)
        .map_err(|_| Error::NotEquivariant("the preimage of (1,0,0,0) is not a unit".into()))?;
    Ok(std::array::from_fn(|j| ring.mul(&column(j), &pinv)))
}

/// Checks `sum_i phi_i(Q) e_i == Q * P^-1` for every `Q`, where `P^-1 = `
/// the unique unit making the identity hold at `Q = P`.
pub fn reconstruction_holds(ring: &LevelRing, phi: &FunctionalQuadruple, e: &[TorsionPoint; 4]) -> bool {
    let n = ring.n();
    let Some(inv) = mat_inv_mod(&phi.rows, n) else { return false };
    let p = TorsionPoint(std::array::from_fn(|r| inv[r][0]));
    let Ok(pinv) = ring.unit_inverse(&p) else { return false };
    if e[0] != ring.one() {
        return false;
    }
    ring.points().all(|q| {
        let v = phi.apply(&q);
        let mut s = ring.zero();
        for (c, ei) in v.iter().zip(e) {
            s = ring.add(&s, &ring.scale(*c, ei));
        }
        s == ring.mul(&q, &pinv)
    })
}
