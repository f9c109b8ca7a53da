//! Browser bindings: witness summary, phase fringes and a witness map over
//! the real state octant.

use ctxscope::sweep::{summarize, sweep};
use ctxscope::linalg::ComplexAmplitude as Complex64;
use ctxscope::{build_network, phase_scan, witness_report, PathLabel, StateVector, SweepGrid};
use serde_json::json;
use wasm_bindgen::prelude::*;

/// Largest map resolution accepted from the page.
pub const MAX_MAP_RESOLUTION: usize = 400;

fn state_from(amps: &[f64]) -> Result<StateVector, String> {
    let z = match *amps {
        [a, b, c] => [Complex64::new(a, 0.0), Complex64::new(b, 0.0), Complex64::new(c, 0.0)],
        [ar, ai, br, bi, cr, ci] => [Complex64::new(ar, ai), Complex64::new(br, bi), Complex64::new(cr, ci)],
        _ => return Err(format!("expected 3 real or 6 re/im amplitudes, got {}", amps.len())),
    };
    StateVector::new(z[0], z[1], z[2]).normalized().map_err(|e| e.to_string())
}

pub fn summary(amps: &[f64]) -> Result<String, String> {
    let psi = state_from(amps)?;
    let r = witness_report(&build_network(), &psi).map_err(|e| e.to_string())?;
    Ok(json!({
        "blocked": r.blocked.probabilities(),
        "free": r.free.probabilities(),
        "gain": r.gain,
        "p_d1": r.p_d1,
        "p_d2": r.p_d2,
        "p_f": r.p_f,
        "survival_blocked": r.blocked.survival,
        "witness": r.witness_direct,
        "witness_from_outputs": r.witness_from_outputs,
    })
    .to_string())
}

/// Flat `[phi, p1, p2, p3]` rows for a phase scan of `f` over one period.
pub fn fringe(amps: &[f64], steps: usize) -> Result<Vec<f64>, String> {
    let psi = state_from(amps)?;
    let grid = ctxscope::interferometer::linear_grid(0.0, std::f64::consts::TAU, steps).map_err(|e| e.to_string())?;
    let data = phase_scan(&build_network(), &psi, PathLabel::F, &grid).map_err(|e| e.to_string())?;
    Ok(data
        .points
        .iter()
        .flat_map(|p| [p.setting, p.values[0], p.values[1], p.values[2]])
        .collect())
}

/// Flat `[witness, gain]` pairs in grid order (alpha-major), followed by
/// the maximum witness and its `(alpha, beta)`.
pub fn map(resolution: usize) -> Result<Vec<f64>, String> {
    if resolution > MAX_MAP_RESOLUTION {
        return Err(format!("resolution {resolution} exceeds {MAX_MAP_RESOLUTION}"));
    }
    let grid = SweepGrid::new(resolution).map_err(|e| e.to_string())?;
    let rows = sweep(&build_network(), &grid);
    let s = summarize(&rows).ok_or("empty grid")?;
    let mut out: Vec<f64> = rows.iter().flat_map(|r| [r.witness, r.gain]).collect();
    out.extend([s.max_witness, s.argmax_alpha, s.argmax_beta]);
    Ok(out)
}

#[wasm_bindgen]
pub fn witness_summary(amps: &[f64]) -> Result<String, JsError> {
    summary(amps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn phase_fringe(amps: &[f64], steps: usize) -> Result<Vec<f64>, JsError> {
    fringe(amps, steps).map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn witness_map(resolution: usize) -> Result<Vec<f64>, JsError> {
    map(resolution).map_err(|e| JsError::new(&e))
}
