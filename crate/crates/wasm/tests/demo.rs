use drol_wasm::{route_map_json, theory_curves_json, train_bandit_json};
use serde_json::{json, Value};

#[test]
fn route_map_splits_the_line_at_midpoints() {
    let v: Value = serde_json::from_str(&route_map_json(&[-1.0, 1.0], &[-0.9, 0.8, 1.1], -2.0, 2.0, 4).unwrap()).unwrap();
    assert_eq!(v["grid"], json!([0, 0, 1, 1]));
    assert_eq!(v["wins"], json!([1, 2]));
    assert!(route_map_json(&[], &[0.0], -1.0, 1.0, 4).is_err());
}

#[test]
fn theory_curves_are_ordered() {
    let v: Value = serde_json::from_str(&theory_curves_json(&[0.5, 0.5], 5, 0.1, 3).unwrap()).unwrap();
    for row in v["coverage"].as_array().unwrap() {
        assert!(row["bound"].as_f64().unwrap() >= row["exp_bound"].as_f64().unwrap());
    }
    assert!(v["collapsed"].as_f64().unwrap() > v["optimal"].as_f64().unwrap());
}

#[test]
fn short_training_demo_runs() {
    let v: Value = serde_json::from_str(&train_bandit_json("bandit3", "drol", 4, 1.0, 20, 1).unwrap()).unwrap();
    assert_eq!(v["policy"].as_array().unwrap().iter().map(|x| x.as_u64().unwrap()).sum::<u64>(), 4000);
    assert!(train_bandit_json("gridnav", "drol", 4, 1.0, 20, 1).is_err());
}
