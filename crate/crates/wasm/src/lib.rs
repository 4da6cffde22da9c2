//! Browser bindings. Every export takes and returns JSON text; failures come
//! back as `{"error": "..."}`.

use serde_json::{json, Value};
use stab_core::scenario::{self, Overrides};
use wasm_bindgen::prelude::*;

fn respond(r: Result<Value, String>) -> String {
    match r {
        Ok(v) => v.to_string(),
        Err(e) => json!({ "error": e }).to_string(),
    }
}

pub fn snf_json(matrix: &str) -> Result<Value, String> {
    scenario::compute("snf", matrix).map_err(|e| e.to_string())
}

pub fn scan_json(scenario_text: &str) -> Result<Value, String> {
    let (_, out) = scenario::run_text(scenario_text, Overrides::default()).map_err(|e| e.to_string())?;
    Ok(json!({ "summary": out.summary, "rows": out.rows, "exit_code": out.exit_code() }))
}

/// Scans `F(Z/p^n)` for the oscillating functor with exponent set `set`.
pub fn oscillating_json(prime: u32, set: &str, horizon: u32) -> Result<Value, String> {
    let set: Value = serde_json::from_str(set).map_err(|e| format!("exponent set: {e}"))?;
    let sc = json!({
        "name": format!("oscillating_{prime}"),
        "backend": { "kind": "integers" },
        "modules": { "R": { "rank": 1 } },
        "family": { "kind": "quotient_powers", "module": "R", "ideal": prime },
        "functor": { "kind": "oscillating", "prime": prime, "set": set },
        "horizon": horizon.clamp(2, 200),
        "window": 6
    });
    scan_json(&sc.to_string())
}

#[wasm_bindgen]
pub fn snf(matrix: &str) -> String {
    respond(snf_json(matrix))
}

#[wasm_bindgen]
pub fn scan(scenario_text: &str) -> String {
    respond(scan_json(scenario_text))
}

#[wasm_bindgen]
pub fn oscillating(prime: u32, set: &str, horizon: u32) -> String {
    respond(oscillating_json(prime, set, horizon))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn snf_diagonal() {
        let v: Value = serde_json::from_str(&snf("[[2,4],[6,8]]")).unwrap();
        assert_eq!(v["diagonal"], json!([2, 4]));
    }

    #[test]
    fn errors_are_json() {
        let v: Value = serde_json::from_str(&snf("[[1,2],[3]]")).unwrap();
        assert!(v["error"].is_string());
        let v: Value = serde_json::from_str(&scan("{")).unwrap();
        assert!(v["error"].as_str().unwrap().contains("parse"));
    }

    #[test]
    fn even_pattern() {
        let v: Value = serde_json::from_str(&oscillating(2, r#"{"parity":"even"}"#, 12)).unwrap();
        assert_eq!(v["summary"]["ass"]["status"], "oscillating-with-period");
        assert_eq!(v["summary"]["ass"]["period"], 2);
        assert_eq!(v["rows"][1]["ass"], "(2)");
        assert_eq!(v["rows"][0]["ass"], "");
    }

    #[test]
    fn scan_embedded_scenario() {
        let text = stab_core::suite::text("brodmann_identity").unwrap();
        let v: Value = serde_json::from_str(&scan(text)).unwrap();
        assert_eq!(v["exit_code"], 0);
        assert_eq!(v["rows"].as_array().unwrap().len(), 50);
    }
}
