//! Browser bindings: run a family on a small model, tabulate the deformation
//! phases, and inspect the closed-form modular examples.

use serde_json::json;
use wasm_bindgen::prelude::*;
use wedgewave::harness::{run_experiment, ExperimentConfig, Family};
use wedgewave::modular::{modular_objects, worked_examples};
use wedgewave::net::TwoDNet;
use wedgewave::Mat;

/// Small enough to finish in a browser tab.
pub const DEMO_CONFIG: &str = r#"seed = 7

[model]
spacing = 1.0
modes = 2
per_mode_cap = 1

[deformation]
kappa = [0.5, 1.0]

[commutant]
kappa = [0.0]
diagnostic_kappa = []
caps = [1, 2]

[samples]
factorization = 3
clustering = 4
"#;

pub fn run_family_json(family: &str, config: &str) -> Result<String, String> {
    let family: Family = family
        .parse()
        .map_err(|e: wedgewave::Error| e.to_string())?;
    let cfg = ExperimentConfig::from_toml_str(config).map_err(|e| e.to_string())?;
    let report = run_experiment(&cfg, family).map_err(|e| e.to_string())?;
    let checks: Vec<_> = report
        .checks
        .iter()
        .map(|c| json!({ "name": c.name, "value": c.value, "bound": c.bound, "comparison": c.comparison, "pass": c.pass }))
        .collect();
    Ok(json!({
        "family": report.family,
        "passed": report.passed(),
        "checks": checks,
        "diagnostics": report.diagnostics,
    })
    .to_string())
}

/// `e^{iκM²}` on every basis vector of `symmetric(spacing, modes, cap, None)`.
pub fn phase_table_json(
    kappa: f64,
    spacing: f64,
    modes: usize,
    per_mode_cap: u8,
) -> Result<String, String> {
    if !(kappa.is_finite() && kappa >= 0.0) {
        return Err(format!("kappa must be finite and ≥ 0, got {kappa}"));
    }
    let net = TwoDNet::symmetric(spacing, modes, per_mode_cap, None).map_err(|e| e.to_string())?;
    let rows: Vec<_> = (0..net.dim())
        .map(|i| {
            let (a, b) = net.chiral_momenta(i);
            let m2 = net.mass_squared(i);
            let (s, c) = (kappa * m2).sin_cos();
            json!({ "key": net.key(i), "p_plus": a, "p_minus": b, "mass_squared": m2, "re": c, "im": s })
        })
        .collect();
    Ok(json!({ "kappa": kappa, "dim": net.dim(), "rows": rows }).to_string())
}

fn max_entry(m: &Mat) -> f64 {
    m.iter().map(|z| z.norm()).fold(0.0, f64::max)
}

pub fn modular_example_json(name: &str) -> Result<String, String> {
    let ex = worked_examples()
        .into_iter()
        .find(|e| e.name == name)
        .ok_or_else(|| format!("unknown example `{name}`"))?;
    let data = modular_objects(&ex.algebra, &ex.omega).map_err(|e| e.to_string())?;
    let eigen: Vec<f64> = data.delta.diagonal().iter().map(|z| z.re).collect();
    Ok(json!({
        "name": ex.name,
        "dim": ex.algebra.dim,
        "algebra_dim": ex.algebra.len(),
        "delta_diagonal": eigen,
        "delta_error": max_entry(&(&data.delta - &ex.delta)),
        "j_error": max_entry(&(&data.j_mod.matrix - &ex.j_matrix)),
        "residuals": data.residuals,
    })
    .to_string())
}

#[wasm_bindgen(js_name = demoConfig)]
pub fn demo_config() -> String {
    DEMO_CONFIG.to_string()
}

#[wasm_bindgen(js_name = runFamily)]
pub fn run_family(family: &str, config: &str) -> Result<String, JsValue> {
    run_family_json(family, config).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = phaseTable)]
pub fn phase_table(
    kappa: f64,
    spacing: f64,
    modes: usize,
    per_mode_cap: u8,
) -> Result<String, JsValue> {
    phase_table_json(kappa, spacing, modes, per_mode_cap).map_err(|e| JsValue::from_str(&e))
}

#[wasm_bindgen(js_name = modularExample)]
pub fn modular_example(name: &str) -> Result<String, JsValue> {
    modular_example_json(name).map_err(|e| JsValue::from_str(&e))
}
