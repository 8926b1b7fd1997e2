//! WebAssembly bindings behind `www/index.html`. Each export takes plain
//! numbers and returns a JSON document; non-finite values become `null`.
//! The `*_json` functions carry the logic so they can be tested natively.

use serde::Serialize;
use wasm_bindgen::prelude::*;

use fluxonium::circuit::{all_transitions, spectrum_vs_flux, transition_label, CircuitParams, EigenSystem};
use fluxonium::dissipation::{transition_budget, ChannelName, NoiseEnvironment, RateBudget};
use fluxonium::protocols::linear_grid;
use fluxonium::pumping::{effective_rate, invert_t102, p0_saturation, simulate_qutrit, QutritRates, T102};

/// Upper limit on flux or time samples, to keep the page responsive.
pub const MAX_POINTS: usize = 1001;

#[derive(Debug, Serialize)]
pub struct SpectrumCurves {
    pub flux: Vec<f64>,
    pub labels: Vec<String>,
    /// `ghz[t][k]` is transition `t` at `flux[k]`.
    pub ghz: Vec<Vec<f64>>,
}

#[derive(Debug, Default, Serialize)]
pub struct LifetimeCurves {
    pub total: Vec<f64>,
    pub dielectric: Vec<f64>,
    pub qp_junction: Vec<f64>,
    pub qp_array: Vec<f64>,
}

#[derive(Debug, Serialize)]
pub struct BudgetCurves {
    pub flux: Vec<f64>,
    /// ms
    pub t1_01: LifetimeCurves,
    /// ms
    pub t1_02: LifetimeCurves,
}

#[derive(Debug, Serialize)]
pub struct PumpingCurves {
    pub t_us: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub t_eff_ms: f64,
    pub p0_saturation: f64,
    /// T1^02 recovered from T_eff; absent when the inversion is unbounded.
    pub t1_02_recovered_ms: Option<f64>,
}

fn flux_grid(flux_min: f64, flux_max: f64, points: usize) -> Result<Vec<f64>, String> {
    if !(flux_min.is_finite() && flux_max.is_finite()) || flux_max < flux_min {
        return Err(format!("invalid flux range {flux_min}..{flux_max}"));
    }
    if !(1..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 1..={MAX_POINTS}, got {points}"));
    }
    Ok(linear_grid(flux_min, flux_max, points))
}

pub fn spectrum_curves(
    circuit: &CircuitParams,
    flux_min: f64,
    flux_max: f64,
    points: usize,
    levels: usize,
) -> Result<SpectrumCurves, String> {
    let flux = flux_grid(flux_min, flux_max, points)?;
    if !(2..=6).contains(&levels) {
        return Err(format!("levels must be in 2..=6, got {levels}"));
    }
    let transitions = all_transitions(levels);
    let table = spectrum_vs_flux(circuit, &flux, &transitions).map_err(|e| e.to_string())?;
    let ghz = (0..transitions.len())
        .map(|t| table.rows.iter().map(|row| row[t]).collect())
        .collect();
    Ok(SpectrumCurves {
        flux,
        labels: transitions.iter().map(|&(i, j)| transition_label(i, j)).collect(),
        ghz,
    })
}

fn push_lifetimes(curves: &mut LifetimeCurves, b: &RateBudget) {
    let t1 = |name| {
        b.channel(name)
            .map_or(f64::INFINITY, |c| if c.rate_per_ms > 0.0 { 1.0 / c.rate_per_ms } else { f64::INFINITY })
    };
    curves.total.push(b.t1_ms.unwrap_or(f64::INFINITY));
    curves.dielectric.push(t1(ChannelName::Dielectric));
    curves.qp_junction.push(t1(ChannelName::QpJunction));
    curves.qp_array.push(t1(ChannelName::QpArray));
}

pub fn budget_curves(
    circuit: &CircuitParams,
    env: &NoiseEnvironment,
    flux_min: f64,
    flux_max: f64,
    points: usize,
) -> Result<BudgetCurves, String> {
    let flux = flux_grid(flux_min, flux_max, points)?;
    let mut out = BudgetCurves {
        flux: flux.clone(),
        t1_01: LifetimeCurves::default(),
        t1_02: LifetimeCurves::default(),
    };
    for &x in &flux {
        let eig = EigenSystem::solve(&circuit.with_flux(x), 3).map_err(|e| format!("flux {x}: {e}"))?;
        let b01 = transition_budget(&eig, env, 0, 1, None).map_err(|e| e.to_string())?;
        let b02 = transition_budget(&eig, env, 0, 2, None).map_err(|e| e.to_string())?;
        push_lifetimes(&mut out.t1_01, &b01);
        push_lifetimes(&mut out.t1_02, &b02);
    }
    Ok(out)
}

/// Drive on the 1-2 transition switched on at t = 0 from thermal equilibrium.
pub fn pumping_curves(
    t1_01_ms: f64,
    p0_th: f64,
    t1_02_ms: f64,
    omega_12: f64,
    points: usize,
) -> Result<PumpingCurves, String> {
    if !(t1_02_ms > 0.0) {
        return Err(format!("T1^02 must be positive, got {t1_02_ms}"));
    }
    if !(2..=MAX_POINTS).contains(&points) {
        return Err(format!("points must be in 2..={MAX_POINTS}, got {points}"));
    }
    let rates = QutritRates::new(t1_01_ms, p0_th, 1.0 / t1_02_ms, omega_12).map_err(|e| e.to_string())?;
    let t_eff_ms = 1.0 / effective_rate(&rates);
    let grid = linear_grid(0.0, 5e3 * t_eff_ms, points);
    let trace = simulate_qutrit(&rates, [rates.p0_th, rates.p1_th, 0.0], &grid).map_err(|e| e.to_string())?;
    let recovered = match invert_t102(t_eff_ms, t1_01_ms, p0_th).map_err(|e| e.to_string())? {
        T102::Finite(t) => Some(t),
        _ => None,
    };
    Ok(PumpingCurves {
        t_us: trace.times,
        p0: trace.p0,
        p1: trace.p1,
        p2: trace.p2,
        t_eff_ms,
        p0_saturation: p0_saturation(&rates),
        t1_02_recovered_ms: recovered,
    })
}

fn to_json<T: Serialize>(r: Result<T, String>) -> Result<String, JsError> {
    r.and_then(|v| serde_json::to_string(&v).map_err(|e| e.to_string()))
        .map_err(|e| JsError::new(&e))
}

#[wasm_bindgen]
pub fn spectrum(
    e_c: f64,
    e_l: f64,
    e_j: f64,
    flux_min: f64,
    flux_max: f64,
    points: usize,
    levels: usize,
) -> Result<String, JsError> {
    let circuit = CircuitParams::new(e_c, e_l, e_j, 0.5);
    to_json(spectrum_curves(&circuit, flux_min, flux_max, points, levels))
}

/// Loss tangent, quasiparticle density and temperature (mK) override the
/// default environment.
#[wasm_bindgen]
#[allow(clippy::too_many_arguments)]
pub fn budget(
    e_c: f64,
    e_l: f64,
    e_j: f64,
    tan_delta: f64,
    x_qp: f64,
    temperature_mk: f64,
    flux_min: f64,
    flux_max: f64,
    points: usize,
) -> Result<String, JsError> {
    let circuit = CircuitParams::new(e_c, e_l, e_j, 0.5);
    let env = NoiseEnvironment {
        tan_delta_c: tan_delta,
        x_qp,
        temperature: temperature_mk * 1e-3,
        ..NoiseEnvironment::default()
    };
    to_json(budget_curves(&circuit, &env, flux_min, flux_max, points))
}

#[wasm_bindgen]
pub fn pumping(t1_01_ms: f64, p0_th: f64, t1_02_ms: f64, omega_12: f64, points: usize) -> Result<String, JsError> {
    to_json(pumping_curves(t1_01_ms, p0_th, t1_02_ms, omega_12, points))
}
