//! Closed-form decoherence rates and their composition into T1/T2 budgets.
//!
//! Every rate is returned in 1/ms. Inputs keep the units they are usually
//! quoted in (GHz for E/h and transition frequencies, µeV for the gap, MHz
//! for ν/2π cavity parameters); conversion happens in [`crate::units`].
//!
//! Each rate is linear in its loss parameter (tanδ_C, x_qp, n_th), so the
//! inverse problems ("which x_qp would produce this T1?") are solved in
//! closed form by dividing by the rate at unit loss.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::circuit::{EigenSystem, OperatorKind};
use crate::error::{check_nonnegative, check_positive, invalid, Result};
use crate::units::{
    boltzmann_exponent, ghz_to_joules, mhz_to_angular, micro_ev_to_joules, per_second_to_per_ms, GHZ,
};

/// Environment parameters feeding the rate models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseEnvironment {
    /// K
    pub temperature: f64,
    pub tan_delta_c: f64,
    /// Effective normalized quasiparticle density (resident plus any
    /// photon-assisted contribution).
    pub x_qp: f64,
    /// µeV
    pub gap_delta: f64,
    /// κ/2π, MHz
    pub kappa: f64,
    /// χ01/2π, MHz
    pub chi01: f64,
    pub n_th: f64,
    /// g/2π, MHz. Informational only.
    pub g_coupling: f64,
}

impl Default for NoiseEnvironment {
    fn default() -> Self {
        Self {
            temperature: 0.025,
            tan_delta_c: 1.5e-6,
            x_qp: 5e-9,
            gap_delta: 180.0,
            kappa: 20.2,
            chi01: 1.3,
            n_th: 4e-4,
            g_coupling: 40.0,
        }
    }
}

impl NoiseEnvironment {
    pub fn validate(&self) -> Result<()> {
        check_nonnegative("temperature", self.temperature)?;
        check_nonnegative("tan_delta_c", self.tan_delta_c)?;
        check_nonnegative("x_qp", self.x_qp)?;
        check_positive("gap_delta", self.gap_delta)?;
        check_nonnegative("kappa", self.kappa)?;
        check_nonnegative("chi01", self.chi01)?;
        check_nonnegative("n_th", self.n_th)?;
        check_nonnegative("g_coupling", self.g_coupling)?;
        Ok(())
    }
}

/// 1 + coth(h f / 2 k_B T); equals 2 at T = 0.
pub fn stimulated_emission_factor(f_ghz: f64, temperature: f64) -> f64 {
    let half = 0.5 * boltzmann_exponent(f_ghz, temperature);
    1.0 + 1.0 / half.tanh()
}

/// Dielectric-loss relaxation rate of a transition at finite temperature,
/// Γ = 16π (E_C/h) |⟨j|n|i⟩|² tanδ_C (1 + coth(h f / 2 k_B T)).
pub fn dielectric_rate(e_c: f64, n_elem: f64, f_ij: f64, temperature: f64, tan_delta: f64) -> Result<f64> {
    check_positive("f_ij", f_ij)?;
    check_positive("e_c", e_c)?;
    check_nonnegative("tan_delta", tan_delta)?;
    check_nonnegative("temperature", temperature)?;
    let per_s = 16.0 * PI * e_c * GHZ * n_elem * n_elem * tan_delta * stimulated_emission_factor(f_ij, temperature);
    Ok(per_second_to_per_ms(per_s))
}

/// √(2Δ / h f), the quasiparticle density-of-states enhancement.
fn gap_ratio(gap_delta: f64, f_ij: f64) -> f64 {
    (2.0 * micro_ev_to_joules(gap_delta) / ghz_to_joules(f_ij)).sqrt()
}

/// Zero-temperature quasiparticle tunneling across the small junction,
/// Γ = (16 E_J / π ħ) √(2Δ/h f) |⟨j|sin((φ−φ_e)/2)|i⟩|² x_qp.
pub fn qp_junction_rate(e_j: f64, gap_delta: f64, f_ij: f64, halfsin_elem: f64, x_qp: f64) -> Result<f64> {
    check_positive("f_ij", f_ij)?;
    check_positive("gap_delta", gap_delta)?;
    check_nonnegative("e_j", e_j)?;
    check_nonnegative("x_qp", x_qp)?;
    // 16 E_J/(π ħ) = 32 (E_J/h)
    let per_s = 32.0 * e_j * GHZ * gap_ratio(gap_delta, f_ij) * halfsin_elem * halfsin_elem * x_qp;
    Ok(per_second_to_per_ms(per_s))
}

/// Zero-temperature quasiparticle tunneling across the array junctions,
/// Γ = (16 E_L / π ħ) √(2Δ/h f) |⟨1|φ/2|0⟩|² x_qp.
pub fn qp_array_rate(e_l: f64, gap_delta: f64, f_ij: f64, half_phi_elem: f64, x_qp: f64) -> Result<f64> {
    check_positive("f_ij", f_ij)?;
    check_positive("gap_delta", gap_delta)?;
    check_positive("e_l", e_l)?;
    check_nonnegative("x_qp", x_qp)?;
    let per_s = 32.0 * e_l * GHZ * gap_ratio(gap_delta, f_ij) * half_phi_elem * half_phi_elem * x_qp;
    Ok(per_second_to_per_ms(per_s))
}

/// κχ²/(κ² + χ²) in 1/ms per thermal photon.
fn photon_dephasing_per_photon(kappa: f64, chi01: f64) -> f64 {
    let k = mhz_to_angular(kappa);
    let c = mhz_to_angular(chi01);
    let denom = k * k + c * c;
    if denom == 0.0 {
        0.0
    } else {
        per_second_to_per_ms(k * c * c / denom)
    }
}

/// Dephasing from residual thermal photons in the readout cavity,
/// Γ_φ = n_th κ χ² / (κ² + χ²), valid for n_th ≪ 1.
pub fn thermal_photon_dephasing(n_th: f64, kappa: f64, chi01: f64) -> Result<f64> {
    check_nonnegative("n_th", n_th)?;
    check_nonnegative("kappa", kappa)?;
    check_nonnegative("chi01", chi01)?;
    Ok(n_th * photon_dephasing_per_photon(kappa, chi01))
}

/// Thermal photon number that yields a pure dephasing time `t_phi_ms`.
pub fn thermal_photon_number(t_phi_ms: f64, kappa: f64, chi01: f64) -> Result<f64> {
    check_positive("t_phi_ms", t_phi_ms)?;
    let per_photon = photon_dephasing_per_photon(kappa, chi01);
    if per_photon == 0.0 {
        return Err(invalid("kappa/chi01", "no cavity coupling, photon number undefined"));
    }
    Ok(1.0 / (t_phi_ms * per_photon))
}

/// Upward rate from a downward rate through the two-level Boltzmann weight
/// e^{−hf/kT}/(1 + e^{−hf/kT}).
pub fn thermal_excitation_rate(downward_rate: f64, f_ij: f64, temperature: f64) -> Result<f64> {
    check_nonnegative("downward_rate", downward_rate)?;
    check_positive("f_ij", f_ij)?;
    check_nonnegative("temperature", temperature)?;
    if temperature == 0.0 {
        return Ok(0.0);
    }
    let b = (-boltzmann_exponent(f_ij, temperature)).exp();
    Ok(b / (1.0 + b) * downward_rate)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ChannelName {
    Dielectric,
    QpJunction,
    QpArray,
    ThermalPhotonDephasing,
    ThermalExcitation,
}

impl ChannelName {
    pub fn as_str(self) -> &'static str {
        match self {
            ChannelName::Dielectric => "dielectric",
            ChannelName::QpJunction => "qp_junction",
            ChannelName::QpArray => "qp_array",
            ChannelName::ThermalPhotonDephasing => "thermal_photon_dephasing",
            ChannelName::ThermalExcitation => "thermal_excitation",
        }
    }

    pub fn is_dephasing(self) -> bool {
        matches!(self, ChannelName::ThermalPhotonDephasing)
    }
}

/// One decoherence channel in a budget.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Channel {
    pub name: ChannelName,
    pub rate_per_ms: f64,
    /// Rate at x_qp = 1, for channels linear in the quasiparticle density.
    pub rate_per_unit_xqp: Option<f64>,
}

impl Channel {
    pub fn new(name: ChannelName, rate_per_ms: f64) -> Self {
        Self {
            name,
            rate_per_ms,
            rate_per_unit_xqp: None,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct XqpBound {
    pub channel: ChannelName,
    pub x_qp_max: f64,
}

/// Channel rates composed into lifetimes. `None` lifetimes are unbounded
/// (no contributing channel).
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RateBudget {
    pub channels: Vec<Channel>,
    pub gamma_1_per_ms: f64,
    pub gamma_phi_per_ms: f64,
    pub t1_ms: Option<f64>,
    pub t_phi_ms: Option<f64>,
    pub t2_ms: Option<f64>,
    /// Present when a measured T1 was supplied.
    pub xqp_bounds: Vec<XqpBound>,
}

impl RateBudget {
    pub fn t1_unbounded(&self) -> bool {
        self.t1_ms.is_none()
    }

    pub fn channel(&self, name: ChannelName) -> Option<&Channel> {
        self.channels.iter().find(|c| c.name == name)
    }
}

fn lifetime(rate: f64) -> Option<f64> {
    (rate > 0.0).then(|| 1.0 / rate)
}

/// T1 = 1/ΣΓ_relax, T_φ = 1/ΣΓ_φ, 1/T2 = 1/(2T1) + 1/T_φ.
///
/// With `t1_measured_ms`, each quasiparticle channel also yields the x_qp at
/// which it alone would produce the measured T1.
pub fn compose_budget(channels: &[Channel], t1_measured_ms: Option<f64>) -> Result<RateBudget> {
    for c in channels {
        check_nonnegative("rate_per_ms", c.rate_per_ms)?;
    }
    let gamma_1: f64 = channels.iter().filter(|c| !c.name.is_dephasing()).map(|c| c.rate_per_ms).sum();
    let gamma_phi: f64 = channels.iter().filter(|c| c.name.is_dephasing()).map(|c| c.rate_per_ms).sum();
    let mut xqp_bounds = Vec::new();
    if let Some(t1) = t1_measured_ms {
        check_positive("t1_measured_ms", t1)?;
        for c in channels {
            if let Some(unit) = c.rate_per_unit_xqp.filter(|u| *u > 0.0) {
                xqp_bounds.push(XqpBound {
                    channel: c.name,
                    x_qp_max: xqp_upper_bound(unit, t1),
                });
            }
        }
    }
    Ok(RateBudget {
        channels: channels.to_vec(),
        gamma_1_per_ms: gamma_1,
        gamma_phi_per_ms: gamma_phi,
        t1_ms: lifetime(gamma_1),
        t_phi_ms: lifetime(gamma_phi),
        t2_ms: lifetime(0.5 * gamma_1 + gamma_phi),
        xqp_bounds,
    })
}

/// x_qp at which a channel with rate `rate_per_unit_xqp`·x_qp equals 1/T1.
pub fn xqp_upper_bound(rate_per_unit_xqp: f64, t1_ms: f64) -> f64 {
    1.0 / (t1_ms * rate_per_unit_xqp)
}

/// T_φ from 1/T_φ = 1/T2 − 1/(2T1). `None` when T2 = 2T1 exactly.
pub fn pure_dephasing_time(t1_ms: f64, t2_ms: f64) -> Result<Option<f64>> {
    check_positive("t1_ms", t1_ms)?;
    check_positive("t2_ms", t2_ms)?;
    let rate = 1.0 / t2_ms - 0.5 / t1_ms;
    if rate < 0.0 {
        return Err(invalid("t2_ms", format!("T2 = {t2_ms} ms exceeds 2·T1 = {} ms", 2.0 * t1_ms)));
    }
    Ok(lifetime(rate))
}

/// T2 from T1 and an optional (None = infinite) T_φ.
pub fn t2_from(t1_ms: f64, t_phi_ms: Option<f64>) -> f64 {
    1.0 / (0.5 / t1_ms + t_phi_ms.map_or(0.0, |t| 1.0 / t))
}

/// Relaxation channels of transition i↔j for a solved circuit.
pub fn transition_channels(eig: &EigenSystem, env: &NoiseEnvironment, i: usize, j: usize) -> Result<Vec<Channel>> {
    env.validate()?;
    let p = &eig.params;
    let f = eig.transition_frequency(i, j)?;
    let n = eig.matrix_element(OperatorKind::Charge, i, j)?.magnitude;
    let s = eig.matrix_element(OperatorKind::HalfSin, i, j)?.magnitude;
    let half_phi = 0.5 * eig.matrix_element(OperatorKind::Phase, i, j)?.magnitude;

    let junction_unit = qp_junction_rate(p.e_j, env.gap_delta, f, s, 1.0)?;
    let array_unit = qp_array_rate(p.e_l, env.gap_delta, f, half_phi, 1.0)?;
    Ok(vec![
        Channel::new(
            ChannelName::Dielectric,
            dielectric_rate(p.e_c, n, f, env.temperature, env.tan_delta_c)?,
        ),
        Channel {
            name: ChannelName::QpJunction,
            rate_per_ms: junction_unit * env.x_qp,
            rate_per_unit_xqp: Some(junction_unit),
        },
        Channel {
            name: ChannelName::QpArray,
            rate_per_ms: array_unit * env.x_qp,
            rate_per_unit_xqp: Some(array_unit),
        },
    ])
}

/// Budget of the i↔j transition. The qubit transition (0,1) also carries
/// thermal-photon dephasing.
pub fn transition_budget(
    eig: &EigenSystem,
    env: &NoiseEnvironment,
    i: usize,
    j: usize,
    t1_measured_ms: Option<f64>,
) -> Result<RateBudget> {
    let mut channels = transition_channels(eig, env, i, j)?;
    if (i.min(j), i.max(j)) == (0, 1) {
        channels.push(Channel::new(
            ChannelName::ThermalPhotonDephasing,
            thermal_photon_dephasing(env.n_th, env.kappa, env.chi01)?,
        ));
    }
    compose_budget(&channels, t1_measured_ms)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn forbidden_transition_has_zero_rate() {
        assert_eq!(dielectric_rate(1.08, 0.0, 5.0, 0.025, 1e-6).unwrap(), 0.0);
        assert_eq!(qp_junction_rate(5.57, 180.0, 5.0, 0.3, 0.0).unwrap(), 0.0);
        assert_eq!(qp_array_rate(0.64, 180.0, 0.16, 1.3, 0.0).unwrap(), 0.0);
        assert_eq!(thermal_photon_dephasing(0.0, 20.2, 1.3).unwrap(), 0.0);
    }

    #[test]
    fn zero_temperature_limit_is_finite() {
        let n = 0.3;
        let r0 = dielectric_rate(1.08, n, 5.0, 0.0, 1e-6).unwrap();
        let expected = per_second_to_per_ms(32.0 * PI * 1.08e9 * n * n * 1e-6);
        assert!((r0 - expected).abs() < 1e-12 * expected);
        assert_eq!(thermal_excitation_rate(10.0, 1.66, 0.0).unwrap(), 0.0);
    }

    #[test]
    fn no_cavity_gives_zero_not_nan() {
        assert_eq!(thermal_photon_dephasing(1e-3, 0.0, 0.0).unwrap(), 0.0);
        assert!(thermal_photon_number(1.0, 0.0, 0.0).is_err());
    }

    #[test]
    fn preconditions() {
        assert!(qp_junction_rate(5.57, 180.0, 0.0, 0.3, 1e-9).is_err());
        assert!(qp_junction_rate(5.57, 180.0, -1.0, 0.3, 1e-9).is_err());
        assert!(dielectric_rate(1.08, 0.1, 0.0, 0.02, 1e-6).is_err());
        assert!(thermal_excitation_rate(1.0, 1.0, -0.01).is_err());
    }

    #[test]
    fn linear_and_quadratic_scaling() {
        let r1 = qp_junction_rate(5.57, 180.0, 5.0, 0.37, 3e-9).unwrap();
        let r2 = qp_junction_rate(5.57, 180.0, 5.0, 0.37, 6e-9).unwrap();
        assert_eq!(r2 / r1, 2.0);
        let a1 = qp_array_rate(0.64, 180.0, 0.163, 1.3, 1e-9).unwrap();
        let a2 = qp_array_rate(0.64, 180.0, 0.163, 0.65, 1e-9).unwrap();
        assert!((a1 / a2 - 4.0).abs() < 1e-12);
    }

    #[test]
    fn budget_single_channel() {
        let b = compose_budget(&[Channel::new(ChannelName::Dielectric, 0.8)], None).unwrap();
        assert!((b.t1_ms.unwrap() - 1.25).abs() < 1e-15);
        assert_eq!(b.t_phi_ms, None);
        assert!((b.t2_ms.unwrap() - 2.5).abs() < 1e-15);
    }

    #[test]
    fn budget_without_relaxation_is_unbounded() {
        let b = compose_budget(&[Channel::new(ChannelName::ThermalPhotonDephasing, 0.2)], None).unwrap();
        assert!(b.t1_unbounded());
        assert!((b.t2_ms.unwrap() - 5.0).abs() < 1e-12);
        let empty = compose_budget(&[], Some(1.0)).unwrap();
        assert!(empty.t1_unbounded() && empty.t2_ms.is_none());
        assert!(compose_budget(&[Channel::new(ChannelName::Dielectric, -1.0)], None).is_err());
    }

    #[test]
    fn dephasing_time_rejects_t2_above_twice_t1() {
        assert!(pure_dephasing_time(1.0, 2.5).is_err());
        assert_eq!(pure_dephasing_time(1.0, 2.0).unwrap(), None);
    }
}
