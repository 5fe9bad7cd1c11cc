//! Change of moduli between an order `O` and an overorder `O0`, on
//! `1/N`-torsion: `b + O -> b + O0` and its dual `b + O0 -> [O0:O] b + O`.

use num_bigint::BigInt;
use num_traits::ToPrimitive;

use crate::arith::reduce_int;
use crate::error::{Error, Result};
use crate::lattice::{kernel_module, lattice_index, KernelModule};
use crate::level::{mat_vec_mod, Mat4, TorsionPoint};
use crate::order::Order;
use crate::rational::from_bigint;

#[derive(Clone, Debug)]
pub struct ModuliChange {
    n: u64,
    index: BigInt,
    // Rows: coordinates of the small basis in the big basis, mod N.
    push: Mat4,
    // Rows: coordinates of index * (big basis) in the small basis, mod N.
    pull: Mat4,
}

fn row_action(m: &Mat4, x: &TorsionPoint, n: u64) -> TorsionPoint {
    // x . M as a row vector.
    let mut t = [[0u64; 4]; 4];
    for r in 0..4 {
        for s in 0..4 {
            t[s][r] = m[r][s];
        }
    }
    TorsionPoint(mat_vec_mod(&t, &x.0, n))
}

impl ModuliChange {
    pub fn new(small: &Order, big: &Order, n: u64) -> Result<Self> {
        if small.algebra() != big.algebra() {
            return Err(Error::NotContained("orders live in different algebras".into()));
        }
        if !big.lattice().contains_lattice(small.lattice()) {
            return Err(Error::NotContained("O is not inside O0".into()));
        }
        if n == 0 {
            return Err(crate::ParseError::Malformed("level must be positive".into()).into());
        }
        let index = lattice_index(big.lattice(), small.lattice()).to_integer();
        let red = |c: [BigInt; 4]| -> [u64; 4] { std::array::from_fn(|k| reduce_int(&c[k], n)) };
        let push = std::array::from_fn(|r| red(big.coords(&small.basis()[r]).expect("containment checked")));
        let scale = from_bigint(index.clone());
        let pull = std::array::from_fn(|s| {
            red(small.coords(&big.basis()[s].scale(&scale)).expect("the index annihilates O0/O"))
        });
        Ok(ModuliChange { n, index, push, pull })
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    pub fn index(&self) -> &BigInt {
        &self.index
    }

    /// Index reduced modulo the level.
    pub fn index_mod(&self) -> u64 {
        reduce_int(&self.index, self.n)
    }

    pub fn lambda(&self, x: &TorsionPoint) -> TorsionPoint {
        row_action(&self.push, x, self.n)
    }

    pub fn lambda_vee(&self, y: &TorsionPoint) -> TorsionPoint {
        row_action(&self.pull, y, self.n)
    }
}

pub fn lambda_push(small: &Order, big: &Order, n: u64, x: &TorsionPoint) -> Result<TorsionPoint> {
    Ok(ModuliChange::new(small, big, n)?.lambda(x))
}

pub fn lambda_vee(small: &Order, big: &Order, n: u64, y: &TorsionPoint) -> Result<TorsionPoint> {
    Ok(ModuliChange::new(small, big, n)?.lambda_vee(y))
}

/// Kernel of `lambda` on `(1/N)O / O`, namely `((1/N)O ∩ O0) / O`.
pub fn lambda_kernel(small: &Order, big: &Order, n: u64) -> Result<KernelModule> {
    if !big.lattice().contains_lattice(small.lattice()) {
        return Err(Error::NotContained("O is not inside O0".into()));
    }
    let tors = small.lattice().scale(&crate::Rational::new(BigInt::from(1), BigInt::from(n)));
    let meet = tors.intersect(big.lattice(), small.algebra());
    kernel_module(small.lattice(), &meet)
}

/// `|ker lambda|` as a machine integer when it fits.
pub fn kernel_order(k: &KernelModule) -> Option<u64> {
    k.order().to_u64()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures::fixture;
    use crate::level::LevelRing;

    fn pair() -> (Order, Order) {
        (fixture("split-eichler-2").unwrap(), fixture("split-maximal").unwrap())
    }

    #[test]
    fn identity_when_equal() {
        let o = fixture("hurwitz").unwrap();
        let m = ModuliChange::new(&o, &o, 3).unwrap();
        assert_eq!(m.index(), &BigInt::from(1));
        let ring = LevelRing::new(&o, 3).unwrap();
        for p in ring.points() {
            assert_eq!(m.lambda(&p), p);
            assert_eq!(m.lambda_vee(&p), p);
        }
        assert_eq!(lambda_kernel(&o, &o, 3).unwrap().order(), BigInt::from(1));
    }

    #[test]
    fn compositions_are_multiplication_by_index() {
        let (small, big) = pair();
        let m = ModuliChange::new(&small, &big, 4).unwrap();
        assert_eq!(m.index_mod(), 2);
        let rs = LevelRing::new(&small, 4).unwrap();
        let rb = LevelRing::new(&big, 4).unwrap();
        for p in rs.points() {
            assert_eq!(m.lambda_vee(&m.lambda(&p)), rs.scale(2, &p));
        }
        for p in rb.points() {
            assert_eq!(m.lambda(&m.lambda_vee(&p)), rb.scale(2, &p));
        }
    }

    #[test]
    fn lambda_matches_lift_oracle() {
        // b + O -> b + O0 computed by lifting and re-reducing in O0.
        let (small, big) = pair();
        let m = ModuliChange::new(&small, &big, 4).unwrap();
        let rs = LevelRing::new(&small, 4).unwrap();
        let rb = LevelRing::new(&big, 4).unwrap();
        for p in rs.points().step_by(7) {
            assert_eq!(m.lambda(&p), rb.reduce(&rs.lift(&p)).unwrap());
        }
    }

    #[test]
    fn kernel_has_index_order() {
        let (small, big) = pair();
        for n in [2u64, 4, 6] {
            let k = lambda_kernel(&small, &big, n).unwrap();
            assert_eq!(kernel_order(&k), Some(2));
            // Exhaustive count of points of (1/N)O/O that vanish in O0/NO0.
            let m = ModuliChange::new(&small, &big, n).unwrap();
            let rs = LevelRing::new(&small, n).unwrap();
            let zeros = rs.points().filter(|p| m.lambda(p) == TorsionPoint([0; 4])).count();
            assert_eq!(zeros, 2);
        }
        // Odd level: the index is invertible, so the kernel is trivial.
        assert_eq!(kernel_order(&lambda_kernel(&small, &big, 3).unwrap()), Some(1));
    }

    #[test]
    fn wrong_direction() {
        let (small, big) = pair();
        assert!(matches!(ModuliChange::new(&big, &small, 2), Err(Error::NotContained(_))));
        assert!(matches!(lambda_kernel(&big, &small, 2), Err(Error::NotContained(_))));
    }
}
