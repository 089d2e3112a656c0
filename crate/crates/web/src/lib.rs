//! Browser bindings for lopsim. Every export returns a JSON string; errors
//! surface as thrown strings on the JS side.

use lopsim::fock::{transition_amplitude, FockState, Limits};
use lopsim::gates::{bit_string, cz_network_with, logical_map, QubitLayout};
use lopsim::mesh::{build_network, phase_solve, theta_for_transmittance, Arm, NetworkElement, NetworkSpec};
use lopsim::solver::{cz_residuals, ConditionProblem};
use serde::Serialize;
use wasm_bindgen::prelude::*;

#[derive(Serialize)]
struct Entry {
    input: String,
    output: String,
    re: f64,
    im: f64,
}

#[derive(Serialize)]
struct CzView {
    t: [f64; 3],
    residuals: [f64; 3],
    residual_norm: f64,
    success_amplitude: f64,
    success_probability: f64,
    /// Full post-selected 4×4 map, row-major over (input, output).
    map: Vec<Entry>,
}

#[derive(Serialize)]
struct HomCurve {
    t: Vec<f64>,
    coincidence: Vec<f64>,
}

#[derive(Serialize)]
struct Calibration {
    target_theta: f64,
    theta1: f64,
    theta2: f64,
    drive: f64,
    realised_t: f64,
}

fn json<T: Serialize>(v: &T) -> Result<String, String> {
    serde_json::to_string(v).map_err(|e| e.to_string())
}

fn err(e: lopsim::Error) -> String {
    e.to_string()
}

/// Post-selected CZ behaviour for the three core transmittances.
#[wasm_bindgen]
pub fn cz_explore(t1: f64, t2: f64, t3: f64) -> Result<String, String> {
    let t = [t1, t2, t3];
    let residuals = cz_residuals(&t).map_err(err)?;
    let amp = ConditionProblem::Cz.success_amplitude(&t).map_err(err)?;
    let u = build_network(&cz_network_with(&t)).map_err(err)?;
    let m = logical_map(&u, &QubitLayout::standard(2), Limits::default()).map_err(err)?;
    let mut map = Vec::with_capacity(16);
    for i in 0..4 {
        for o in 0..4 {
            let z = m[(o, i)];
            map.push(Entry { input: bit_string(i, 2), output: bit_string(o, 2), re: z.re, im: z.im });
        }
    }
    json(&CzView {
        t,
        residuals,
        residual_norm: residuals.iter().map(|r| r * r).sum::<f64>().sqrt(),
        success_amplitude: amp.norm(),
        success_probability: amp.norm_sqr(),
        map,
    })
}

/// Coincidence probability for |1,1⟩ through one MZI, sampled at `points`
/// transmittances across [0, 1].
#[wasm_bindgen]
pub fn hom_curve(points: usize) -> Result<String, String> {
    if !(2..=10_000).contains(&points) {
        return Err(format!("points must lie in 2..=10000, got {points}"));
    }
    let both = FockState::new(vec![1, 1]);
    let mut curve = HomCurve { t: Vec::with_capacity(points), coincidence: Vec::with_capacity(points) };
    for i in 0..points {
        let t = i as f64 / (points - 1) as f64;
        let u = build_network(&NetworkSpec::new(2).push(NetworkElement::mzi(1, t, 0.0))).map_err(err)?;
        curve.t.push(t);
        curve.coincidence.push(transition_amplitude(&u, &both, &both).map_err(err)?.norm_sqr());
    }
    json(&curve)
}

/// Shifter values that realise transmittance `t`, driving `arm`
/// ("upper"/"lower") from offsets `theta1`, `theta2`.
#[wasm_bindgen]
pub fn calibrate(t: f64, theta1: f64, theta2: f64, arm: &str) -> Result<String, String> {
    let arm: Arm = arm.parse().map_err(err)?;
    let theta = theta_for_transmittance(t).map_err(err)?;
    let s = phase_solve(theta, theta1, theta2, arm).map_err(err)?;
    let drive = match arm {
        Arm::Upper => s.theta1 - theta1,
        Arm::Lower => s.theta2 - theta2,
    };
    json(&Calibration { target_theta: theta, theta1: s.theta1, theta2: s.theta2, drive, realised_t: s.transmittance() })
}
