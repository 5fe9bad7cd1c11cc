use serde_json::Value;

use qmi_web::{algebra_info_json, coset_action_json, pairing_table_json, MAX_COSET_LEVEL, MAX_PAIRING_LEVEL};

fn parse(s: String) -> Value {
    serde_json::from_str(&s).unwrap()
}

#[test]
fn every_demo_fixture_draws_a_nondegenerate_table() {
    for name in ["split-maximal", "split-eichler-2", "split-eichler-3", "lipschitz", "hurwitz", "maximal-d6"] {
        for n in 1..=3u32 {
            let v = parse(pairing_table_json(name, n).unwrap());
            let table = v["table"].as_array().unwrap();
            let size = (n as usize).pow(4);
            assert_eq!(table.len(), size, "{name} N={n}");
            assert_eq!(v["points"].as_array().unwrap().len(), size);
            // perfect pairing: rows are pairwise distinct
            let mut rows: Vec<String> = table.iter().map(|r| r.to_string()).collect();
            rows.sort();
            rows.dedup();
            assert_eq!(rows.len(), size, "{name} N={n}");
        }
    }
}

#[test]
fn bounds_and_bad_input_are_reported_as_json() {
    let e: Value = serde_json::from_str(&pairing_table_json("hurwitz", MAX_PAIRING_LEVEL as u32 + 1).unwrap_err()).unwrap();
    assert_eq!(e["error"], "LevelTooLarge");
    let e: Value = serde_json::from_str(&coset_action_json("hurwitz", MAX_COSET_LEVEL as u32 + 1, "all", "scalars", "1,0,0,0").unwrap_err()).unwrap();
    assert_eq!(e["error"], "LevelTooLarge");
    assert!(pairing_table_json("no-such-order", 2).is_err());
    assert!(coset_action_json("hurwitz", 3, "all", "scalars", "1,x,0,0").is_err());
    assert!(algebra_info_json("1/0", "1").is_err());
}

#[test]
fn identity_acts_trivially() {
    let v = parse(coset_action_json("split-eichler-2", 4, "congruence:2", "scalars", "1,0,0,0").unwrap());
    let perm: Vec<u64> = v["permutation"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).collect();
    assert_eq!(perm, (0..perm.len() as u64).collect::<Vec<_>>());
}
