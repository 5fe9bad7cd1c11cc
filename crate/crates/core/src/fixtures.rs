//! Named test orders.
//!
//! The split algebra `(1, 1)` is identified with 2x2 matrices through
//! `i = diag(1, -1)`, `j = [[0, 1], [1, 0]]`, so that
//! `e11 = (1+i)/2`, `e22 = (1-i)/2`, `e12 = (j+k)/2`, `e21 = (j-k)/2`.

use serde::Serialize;

use crate::error::{Error, ParseError, Result};
use crate::order::Order;
use crate::quat::{QuatAlgebra, QuatElement};
use crate::rational::{int, rat};

pub const NAMES: &[&str] = &["split-maximal", "split-eichler-N", "lipschitz", "hurwitz", "maximal-d6"];

#[derive(Clone, Debug, Serialize)]
pub struct FixtureData {
    pub name: String,
    pub algebra: QuatAlgebra,
    pub basis: Vec<QuatElement>,
    /// Reduced discriminant the basis must produce.
    pub discriminant: u64,
}

fn half(c: [i64; 4]) -> QuatElement {
    QuatElement(c.map(|x| rat(x, 2)))
}

fn split_basis(level: i64) -> Vec<QuatElement> {
    vec![
        QuatElement::one(),
        half([1, 1, 0, 0]),
        half([0, 0, 1, 1]),
        half([0, 0, level, -level]),
    ]
}

fn hurwitz_type(a: i64, b: i64) -> (QuatAlgebra, Vec<QuatElement>) {
    let alg = QuatAlgebra::from_ints(a, b).expect("nonzero parameters");
    let basis = vec![
        QuatElement::one(),
        QuatElement::from_ints([0, 1, 0, 0]),
        QuatElement::from_ints([0, 0, 1, 0]),
        half([1, 1, 1, 1]),
    ];
    (alg, basis)
}

fn unknown(name: &str) -> Error {
    Error::Parse(ParseError::Malformed(format!(
        "unknown fixture {name:?}; expected one of {}",
        NAMES.join(", ")
    )))
}

pub fn fixture_data(name: &str) -> Result<FixtureData> {
    let (algebra, basis, discriminant) = match name {
        "split-maximal" => (QuatAlgebra::from_ints(1, 1)?, split_basis(1), 1),
        "lipschitz" => (
            QuatAlgebra::from_ints(-1, -1)?,
            (0..4).map(QuatElement::basis).collect(),
            4,
        ),
        "hurwitz" => {
            let (a, b) = hurwitz_type(-1, -1);
            (a, b, 2)
        }
        "maximal-d6" => {
            let (a, b) = hurwitz_type(-1, 3);
            (a, b, 6)
        }
        _ => {
            let level = name
                .strip_prefix("split-eichler-")
                .and_then(|n| n.parse::<u32>().ok())
                .filter(|&n| n >= 1)
                .ok_or_else(|| unknown(name))?;
            (QuatAlgebra::from_ints(1, 1)?, split_basis(level as i64), level as u64)
        }
    };
    Ok(FixtureData { name: name.to_string(), algebra, basis, discriminant })
}

pub fn fixture(name: &str) -> Result<Order> {
    let d = fixture_data(name)?;
    Order::new(d.algebra, &d.basis)
}

/// Fixture lookup with an optional deliberately broken entry, used as a
/// negative control by the self test.
#[derive(Clone, Debug, Default)]
pub struct Catalog {
    corrupt: Option<String>,
}

impl Catalog {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_corrupted(name: &str) -> Self {
        Catalog { corrupt: Some(name.to_string()) }
    }

    pub fn data(&self, name: &str) -> Result<FixtureData> {
        let mut d = fixture_data(name)?;
        if self.corrupt.as_deref() == Some(name) {
            // Nudge the last generator off the lattice; the result is no longer an order.
            let last = d.basis.last_mut().expect("four generators");
            last.0[1] += rat(1, 3);
        }
        Ok(d)
    }

    pub fn order(&self, name: &str) -> Result<Order> {
        let d = self.data(name)?;
        Order::new(d.algebra, &d.basis)
    }
}

/// The split matrix units `e11, e12, e21, e22`.
pub fn matrix_units() -> [QuatElement; 4] {
    [half([1, 1, 0, 0]), half([0, 0, 1, 1]), half([0, 0, 1, -1]), half([1, -1, 0, 0])]
}

/// Image of the integer matrix `[[p, q], [r, s]]` in the split algebra.
pub fn split_matrix(p: i64, q: i64, r: i64, s: i64) -> QuatElement {
    let [e11, e12, e21, e22] = matrix_units();
    let mut x = QuatElement::zero();
    for (c, e) in [(p, e11), (q, e12), (r, e21), (s, e22)] {
        if c != 0 {
            x = &x + &e.scale(&int(c));
        }
    }
    x
}
