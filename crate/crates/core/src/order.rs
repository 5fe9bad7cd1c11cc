//! Orders and their left ideals.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::exact_sqrt;
use crate::error::{Error, Result};
use crate::hilbert::algebra_discriminant;
use crate::lattice::{kernel_module, lattice_index, KernelModule, Lattice4};
use crate::linalg::{self, RatMatrix};
use crate::quat::{QuatAlgebra, QuatElement};
use crate::rational::{common_denominator, format_rational, from_bigint};
use crate::Rational;

/// An order together with a working basis whose first element is 1.
#[derive(Clone, Debug)]
pub struct Order {
    algebra: QuatAlgebra,
    basis: Vec<QuatElement>,
    lattice: Lattice4,
    basis_inv: RatMatrix,
}

#[derive(Serialize)]
struct OrderOut<'a> {
    algebra: &'a QuatAlgebra,
    #[serde(flatten)]
    lattice: &'a Lattice4,
    basis: &'a [QuatElement],
}

#[derive(Deserialize)]
struct OrderIn {
    algebra: QuatAlgebra,
    #[serde(default)]
    basis: Option<Vec<QuatElement>>,
    #[serde(default)]
    den: Option<String>,
    #[serde(default)]
    rows: Option<Vec<Vec<String>>>,
}

impl Serialize for Order {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        OrderOut { algebra: &self.algebra, lattice: &self.lattice, basis: &self.basis }.serialize(s)
    }
}

/// Accepts generators under `basis` (kept as the working basis when they
/// start with 1) or a lattice given by `den` and `rows`.
impl<'de> Deserialize<'de> for Order {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        use serde::de::Error as _;
        let repr = OrderIn::deserialize(d)?;
        let gens = match (repr.basis, repr.den, repr.rows) {
            (Some(b), _, _) => b,
            (None, Some(den), Some(rows)) => {
                let v = serde_json::json!({ "den": den, "rows": rows });
                serde_json::from_value::<Lattice4>(v).map_err(D::Error::custom)?.basis()
            }
            _ => return Err(D::Error::custom("order needs \"basis\" or \"den\" and \"rows\"")),
        };
        Order::new(repr.algebra, &gens).map_err(D::Error::custom)
    }
}

impl PartialEq for Order {
    fn eq(&self, other: &Self) -> bool {
        self.algebra == other.algebra && self.lattice == other.lattice
    }
}

impl Eq for Order {}

/// First failing order axiom, if any.
pub fn order_defect(l: &Lattice4, alg: &QuatAlgebra) -> Option<String> {
    if !l.contains(&QuatElement::one()) {
        return Some("does not contain 1".into());
    }
    let b = l.basis();
    for (r, x) in b.iter().enumerate() {
        for (s, y) in b.iter().enumerate() {
            if !l.contains(&alg.mul(x, y)) {
                return Some(format!("product of basis elements {r} and {s} leaves the lattice"));
            }
        }
    }
    None
}

pub fn is_order(l: &Lattice4, alg: &QuatAlgebra) -> bool {
    order_defect(l, alg).is_none()
}

impl Order {
    /// Order spanned by `gens`. When `gens` is exactly a basis starting
    /// with 1 it is kept as the working basis; otherwise one is derived.
    pub fn new(algebra: QuatAlgebra, gens: &[QuatElement]) -> Result<Self> {
        let lattice = Lattice4::from_rows(gens)?;
        if let Some(why) = order_defect(&lattice, &algebra) {
            return Err(Error::NotAnOrder(why));
        }
        let basis = if gens.len() == 4 && gens[0] == QuatElement::one() {
            gens.to_vec()
        } else {
            unit_first_basis(&lattice)
        };
        Ok(Self::assemble(algebra, lattice, basis))
    }

    pub fn from_lattice(algebra: QuatAlgebra, lattice: &Lattice4) -> Result<Self> {
        Self::new(algebra, &lattice.basis())
    }

    fn assemble(algebra: QuatAlgebra, lattice: Lattice4, basis: Vec<QuatElement>) -> Self {
        let m: RatMatrix = basis.iter().map(|b| b.0.to_vec()).collect();
        let basis_inv = linalg::rat_inverse(&m).expect("basis is independent");
        Order { algebra, basis, lattice, basis_inv }
    }

    pub fn algebra(&self) -> &QuatAlgebra {
        &self.algebra
    }

    pub fn lattice(&self) -> &Lattice4 {
        &self.lattice
    }

    pub fn basis(&self) -> &[QuatElement] {
        &self.basis
    }

    /// Coordinates of any element of B in the working basis.
    pub fn rational_coords(&self, x: &QuatElement) -> [Rational; 4] {
        std::array::from_fn(|c| (0..4).fold(Rational::zero(), |acc, r| acc + &x.0[r] * &self.basis_inv[r][c]))
    }

    /// Integer coordinates in the working basis, if `x` lies in the order.
    pub fn coords(&self, x: &QuatElement) -> Option<[BigInt; 4]> {
        let q = self.rational_coords(x);
        if q.iter().all(Rational::is_integer) {
            Some(q.map(|c| c.to_integer()))
        } else {
            None
        }
    }

    pub fn element(&self, coords: &[BigInt]) -> QuatElement {
        coords.iter().zip(&self.basis).fold(QuatElement::zero(), |acc, (c, b)| {
            &acc + &b.scale(&from_bigint(c.clone()))
        })
    }

    pub fn contains(&self, x: &QuatElement) -> bool {
        self.lattice.contains(x)
    }

    /// `det(Tr(e_r * e_s))`.
    pub fn gram_determinant(&self) -> Rational {
        let g: RatMatrix = self
            .basis
            .iter()
            .map(|x| self.basis.iter().map(|y| self.algebra.trace_product(x, y)).collect())
            .collect();
        linalg::rat_det(&g)
    }

    pub fn reduced_discriminant(&self) -> Result<BigInt> {
        let det = self.gram_determinant().abs();
        if !det.is_integer() {
            return Err(Error::NotASquare(format_rational(&det)));
        }
        exact_sqrt(det.numer()).ok_or_else(|| Error::NotASquare(format_rational(&det)))
    }

    pub fn eichler_level(&self) -> Result<BigInt> {
        let d = self.reduced_discriminant()?;
        let disc = algebra_discriminant(&self.algebra).disc;
        if !(&d % &disc).is_zero() {
            return Err(Error::NotDivisible(d.to_string(), disc.to_string()));
        }
        Ok(d / disc)
    }

    pub fn sharp_dual(&self) -> Lattice4 {
        self.lattice.sharp_dual(&self.algebra)
    }
}

/// A basis of `l` whose first vector is 1 (which is primitive in any order).
fn unit_first_basis(l: &Lattice4) -> Vec<QuatElement> {
    let v = l.coords(&QuatElement::one()).expect("order contains 1");
    let snf = linalg::smith(&vec![v.to_vec()]);
    let vq: RatMatrix = snf.v.iter().map(|r| r.iter().cloned().map(from_bigint).collect()).collect();
    let vinv = linalg::rat_inverse(&vq).expect("unimodular");
    let hb = l.basis();
    let mut out: Vec<QuatElement> = vinv
        .iter()
        .map(|row| row.iter().zip(&hb).fold(QuatElement::zero(), |acc, (c, b)| &acc + &b.scale(c)))
        .collect();
    if out[0] != QuatElement::one() {
        out[0] = -&out[0];
    }
    debug_assert_eq!(out[0], QuatElement::one());
    out
}

/// A lattice `I` with `O * I` contained in `I`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeftIdeal {
    #[serde(flatten)]
    lattice: Lattice4,
    #[serde(skip)]
    order: Order,
}

impl LeftIdeal {
    pub fn new(order: &Order, lattice: Lattice4) -> Result<Self> {
        let alg = order.algebra();
        for e in order.basis() {
            for x in lattice.basis() {
                if !lattice.contains(&alg.mul(e, &x)) {
                    return Err(Error::NotLeftIdeal);
                }
            }
        }
        Ok(LeftIdeal { lattice, order: order.clone() })
    }

    /// `O * g`.
    pub fn principal(order: &Order, g: &QuatElement) -> Result<Self> {
        let alg = order.algebra();
        if alg.norm(g).is_zero() {
            return Err(Error::ZeroNorm);
        }
        let rows: Vec<QuatElement> = order.basis().iter().map(|e| alg.mul(e, g)).collect();
        Ok(LeftIdeal { lattice: Lattice4::from_rows(&rows)?, order: order.clone() })
    }

    /// `c * O` for a nonzero rational `c`.
    pub fn scalar(order: &Order, c: &Rational) -> Result<Self> {
        if c.is_zero() {
            return Err(Error::ZeroNorm);
        }
        Ok(LeftIdeal { lattice: order.lattice().scale(c), order: order.clone() })
    }

    pub fn lattice(&self) -> &Lattice4 {
        &self.lattice
    }

    pub fn order(&self) -> &Order {
        &self.order
    }

    /// Reduced norm: with `m` the least positive integer putting `m I` inside
    /// `O`, `nrd(I) = sqrt([O : m I]) / m^2`.
    pub fn nrd(&self) -> Result<Rational> {
        let o = &self.order;
        let m = common_denominator(self.lattice.basis().iter().flat_map(|b| o.rational_coords(b)).collect::<Vec<_>>().iter());
        let scaled = self.lattice.scale(&from_bigint(m.clone()));
        let idx = lattice_index(o.lattice(), &scaled);
        debug_assert!(idx.is_integer());
        let root = exact_sqrt(&idx.to_integer()).ok_or_else(|| Error::NotLocallyPrincipal(format_rational(&idx)))?;
        Ok(Rational::new(root, m.pow(2)))
    }

    fn require_contains_order(&self) -> Result<()> {
        if self.lattice.contains_lattice(self.order.lattice()) {
            Ok(())
        } else {
            Err(Error::NotContained("ideal does not contain its left order".into()))
        }
    }

    /// `nrd(I)^-1`, for ideals containing their order.
    pub fn isogeny_degree(&self) -> Result<Rational> {
        self.require_contains_order()?;
        Ok(self.nrd()?.recip())
    }

    /// `I / O`.
    pub fn kernel(&self) -> Result<KernelModule> {
        kernel_module(self.order.lattice(), &self.lattice)
    }

    /// `I` lies inside `nrd(I) * O`.
    pub fn dual_inclusion_check(&self) -> Result<bool> {
        self.require_contains_order()?;
        let n = self.nrd()?;
        Ok(self.order.lattice().scale(&n).contains_lattice(&self.lattice))
    }
}

/// Generalised index `[O : L]` for a lattice measured against an order.
pub fn order_index(o: &Order, l: &Lattice4) -> Rational {
    lattice_index(o.lattice(), l)
}
