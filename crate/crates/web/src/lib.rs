//! WebAssembly bindings for the browser demo in `www/`.
//!
//! Each export takes plain strings and numbers and returns a JSON string;
//! failures surface as a JS exception carrying `{"error", "detail"}`.

use serde_json::{json, Value};
use wasm_bindgen::prelude::*;

use qmi_core::cosets::{double_cosets, galois_act, EndoSpec, GammaSpec};
use qmi_core::fixtures::fixture;
use qmi_core::hilbert::algebra_discriminant;
use qmi_core::level::{LevelRing, TorsionPoint, WeilPairing};
use qmi_core::rational::parse_rational;
use qmi_core::{Error, QuatAlgebra};

/// The pairing table is `N^4 x N^4`; keep it drawable.
pub const MAX_PAIRING_LEVEL: u64 = 4;
pub const MAX_COSET_LEVEL: u64 = 6;

fn fail(e: Error) -> String {
    json!({ "error": e.code(), "detail": e.to_string() }).to_string()
}

fn level(n: u32, max: u64) -> Result<u64, String> {
    let n = u64::from(n);
    if n == 0 {
        return Err(fail(Error::Parse(qmi_core::ParseError::Malformed("level must be positive".into()))));
    }
    if n > max {
        return Err(fail(Error::LevelTooLarge { level: n, max }));
    }
    Ok(n)
}

pub fn algebra_info_json(a: &str, b: &str) -> Result<String, String> {
    let a = parse_rational(a).map_err(|e| fail(e.into()))?;
    let b = parse_rational(b).map_err(|e| fail(e.into()))?;
    let alg = QuatAlgebra::new(a, b).map_err(fail)?;
    let d = algebra_discriminant(&alg);
    Ok(json!({
        "disc": d.disc.to_string(),
        "ramified": d.ramified,
        "definite": d.is_definite(),
    })
    .to_string())
}

pub fn pairing_table_json(order: &str, n: u32) -> Result<String, String> {
    let n = level(n, MAX_PAIRING_LEVEL)?;
    let o = fixture(order).map_err(fail)?;
    let ring = LevelRing::new(&o, n).map_err(fail)?;
    let w = WeilPairing::new(&ring);
    let labels: Vec<[u64; 4]> = ring.points().map(|p| p.0).collect();
    Ok(json!({ "N": n, "points": labels, "table": w.table(&ring) }).to_string())
}

/// Double cosets for `(gamma, endo)` and the permutation induced by `rho`
/// (four residues separated by commas).
pub fn coset_action_json(order: &str, n: u32, gamma: &str, endo: &str, rho: &str) -> Result<String, String> {
    let n = level(n, MAX_COSET_LEVEL)?;
    let o = fixture(order).map_err(fail)?;
    let ring = LevelRing::new(&o, n).map_err(fail)?;
    let gamma: GammaSpec = gamma.parse().map_err(fail)?;
    let endo: EndoSpec = endo.parse().map_err(fail)?;
    let space = double_cosets(&ring, &gamma, &endo, MAX_COSET_LEVEL).map_err(fail)?;
    let coords: Vec<u64> = rho
        .split(',')
        .map(|s| s.trim().parse::<u64>())
        .collect::<Result<_, _>>()
        .map_err(|_| fail(Error::Parse(qmi_core::ParseError::Malformed(format!("rho: {rho:?}")))))?;
    let rho: TorsionPoint = ring.point(&coords).map_err(fail)?;
    let perm = galois_act(&ring, &space, &rho).map_err(fail)?;
    let mut v: Value = serde_json::to_value(&space).expect("serializable");
    v["permutation"] = json!(perm);
    Ok(v.to_string())
}

fn js(r: Result<String, String>) -> Result<String, JsValue> {
    r.map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen]
pub fn algebra_info(a: &str, b: &str) -> Result<String, JsValue> {
    js(algebra_info_json(a, b))
}

#[wasm_bindgen]
pub fn pairing_table(order: &str, n: u32) -> Result<String, JsValue> {
    js(pairing_table_json(order, n))
}

#[wasm_bindgen]
pub fn coset_action(order: &str, n: u32, gamma: &str, endo: &str, rho: &str) -> Result<String, JsValue> {
    js(coset_action_json(order, n, gamma, endo, rho))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn info() {
        let v: Value = serde_json::from_str(&algebra_info_json("-1", "-3").unwrap()).unwrap();
        assert_eq!(v["disc"], "3");
        assert_eq!(v["definite"], true);
        assert!(algebra_info_json("0", "1").unwrap_err().contains("InvalidAlgebra"));
    }

    #[test]
    fn pairing_sizes() {
        let v: Value = serde_json::from_str(&pairing_table_json("split-maximal", 2).unwrap()).unwrap();
        assert_eq!(v["table"].as_array().unwrap().len(), 16);
        assert!(pairing_table_json("split-maximal", 5).unwrap_err().contains("LevelTooLarge"));
    }

    #[test]
    fn action_is_a_permutation() {
        let s = coset_action_json("split-maximal", 3, "trivial", "scalars", "1,1,0,1").unwrap();
        let v: Value = serde_json::from_str(&s).unwrap();
        let mut p: Vec<u64> = v["permutation"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
        p.sort();
        assert_eq!(p, (0..v["reps"].as_array().unwrap().len() as u64).collect::<Vec<_>>());
        assert!(coset_action_json("split-maximal", 3, "sometimes", "scalars", "1,0,0,0").is_err());
    }
}
