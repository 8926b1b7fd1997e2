use fluxonium::circuit::{CircuitParams, EigenSystem, OperatorKind};
use fluxonium::dissipation::*;
use proptest::prelude::*;

const H: f64 = 6.626_070_15e-34;
const KB: f64 = 1.380_649e-23;
const EV: f64 = 1.602_176_634e-19;

fn coth(x: f64) -> f64 {
    x.cosh() / x.sinh()
}

fn oracle_dielectric(e_c: f64, n: f64, f: f64, t: f64, tan: f64) -> f64 {
    let x = H * f * 1e9 / (2.0 * KB * t);
    16.0 * std::f64::consts::PI * e_c * 1e9 * n * n * tan * (1.0 + coth(x)) * 1e-3
}

fn oracle_qp(e: f64, gap_uev: f64, f: f64, elem: f64, x: f64) -> f64 {
    32.0 * e * 1e9 * (2.0 * gap_uev * 1e-6 * EV / (H * f * 1e9)).sqrt() * elem * elem * x * 1e-3
}

fn sweet() -> EigenSystem {
    EigenSystem::solve(&CircuitParams::default(), 4).unwrap()
}

#[test]
fn rates_match_closed_forms() {
    let eig = sweet();
    let env = NoiseEnvironment::default();
    let f01 = eig.transition_frequency(0, 1).unwrap();
    let n01 = eig.matrix_element(OperatorKind::Charge, 0, 1).unwrap().magnitude;
    let s01 = eig.matrix_element(OperatorKind::HalfSin, 0, 1).unwrap().magnitude;
    let p01 = eig.matrix_element(OperatorKind::Phase, 0, 1).unwrap().magnitude;
    let d = dielectric_rate(1.08, n01, f01, 0.025, 1.5e-6).unwrap();
    assert!((d / oracle_dielectric(1.08, n01, f01, 0.025, 1.5e-6) - 1.0).abs() < 1e-12);
    let j = qp_junction_rate(5.57, env.gap_delta, f01, s01, 5e-9).unwrap();
    assert!((j / oracle_qp(5.57, 180.0, f01, s01, 5e-9) - 1.0).abs() < 1e-12);
    let a = qp_array_rate(0.64, env.gap_delta, f01, 0.5 * p01, 5e-9).unwrap();
    assert!((a / oracle_qp(0.64, 180.0, f01, 0.5 * p01, 5e-9) - 1.0).abs() < 1e-12);
}

#[test]
fn zero_temperature_limit_is_main_text_form() {
    let (n, f) = (0.3, 5.0);
    let r = dielectric_rate(1.08, n, f, 1e-6, 2e-6).unwrap();
    let main = 32.0 * std::f64::consts::PI * 1.08e9 * n * n * 2e-6 * 1e-3;
    assert!((r / main - 1.0).abs() < 1e-12);
}

#[test]
fn dielectric_t102_bracket_and_divergence() {
    let fluxes = [0.40, 0.45, 0.48, 0.49, 0.495, 0.499];
    let t1 = |flux: f64, tan: f64| {
        let eig = EigenSystem::solve(&CircuitParams::default().with_flux(flux), 3).unwrap();
        let n = eig.matrix_element(OperatorKind::Charge, 0, 2).unwrap().magnitude;
        1.0 / dielectric_rate(1.08, n, eig.transition_frequency(0, 2).unwrap(), 0.025, tan).unwrap()
    };
    let lo: Vec<f64> = fluxes.iter().map(|&f| t1(f, 1.5e-6)).collect();
    let hi: Vec<f64> = fluxes.iter().map(|&f| t1(f, 4.5e-6)).collect();
    for (a, b) in lo.iter().zip(&hi) {
        assert!((a / b - 3.0).abs() < 1e-9);
    }
    assert!(lo.windows(2).all(|w| w[1] > w[0]), "{lo:?}");
    // spans the 0.1–1.5 ms window across the scan
    assert!(hi[0] < 0.1 && lo[fluxes.len() - 1] > 1.5);
    let eig = sweet();
    let n02 = eig.matrix_element(OperatorKind::Charge, 0, 2).unwrap().magnitude;
    let r = dielectric_rate(1.08, n02, eig.transition_frequency(0, 2).unwrap(), 0.025, 1.5e-6).unwrap();
    assert!(r < 1e-12);
}

#[test]
fn junction_qp_t102_stays_finite_at_sweet_spot() {
    let env = NoiseEnvironment::default();
    for flux in [0.45, 0.48, 0.5] {
        let eig = EigenSystem::solve(&CircuitParams::default().with_flux(flux), 3).unwrap();
        let c = transition_channels(&eig, &env, 0, 2).unwrap();
        let t = 1.0 / c.iter().find(|c| c.name == ChannelName::QpJunction).unwrap().rate_per_ms;
        assert!((1.0..5.0).contains(&t), "flux {flux}: {t} ms");
    }
}

#[test]
fn thermal_photon_dephasing_time() {
    let g = thermal_photon_dephasing(4e-4, 20.2, 1.3).unwrap();
    assert!(((1.0 / g) / 4.5 - 1.0).abs() < 0.1, "{}", 1.0 / g);
    let n = thermal_photon_number(1.0 / g, 20.2, 1.3).unwrap();
    assert!((n / 4e-4 - 1.0).abs() < 1e-12);
    assert_eq!(thermal_photon_dephasing(4e-4, 0.0, 0.0).unwrap(), 0.0);
}

#[test]
fn xqp_bounds_within_factor_two() {
    let eig = sweet();
    let env = NoiseEnvironment::default();
    let b01 = transition_budget(&eig, &env, 0, 1, Some(1.0)).unwrap();
    let array = b01.xqp_bounds.iter().find(|b| b.channel == ChannelName::QpArray).unwrap();
    let r = array.x_qp_max / 6e-10;
    assert!((0.5..=2.0).contains(&r), "array bound {}", array.x_qp_max);
    let b02 = transition_budget(&eig, &env, 0, 2, Some(1.5)).unwrap();
    let junction = b02.xqp_bounds.iter().find(|b| b.channel == ChannelName::QpJunction).unwrap();
    let r = junction.x_qp_max / 5e-9;
    assert!((0.5..=2.0).contains(&r), "junction bound {}", junction.x_qp_max);
}

#[test]
fn stimulated_emission_factor_between_two_and_four() {
    let eig = sweet();
    let n = eig.matrix_element(OperatorKind::Charge, 0, 1).unwrap().magnitude;
    let f = 0.163;
    let cold = dielectric_rate(1.08, n, f, 0.010, 1e-6).unwrap();
    let warm = dielectric_rate(1.08, n, f, 0.050, 1e-6).unwrap();
    let ratio = warm / cold;
    assert!((2.0..=4.0).contains(&ratio), "{ratio}");
}

#[test]
fn pure_dephasing_arithmetic() {
    // 1/(1/1.16 − 1/2.4)
    let t = pure_dephasing_time(1.2, 1.16).unwrap().unwrap();
    assert!((t - 1.0 / (1.0 / 1.16 - 1.0 / 2.4)).abs() < 1e-12);
    // the 4.5 ms dephasing time corresponds to T2* = 1.48 ms with T1 near 1.1 ms
    let longer_t1 = pure_dephasing_time(1.2, 1.48).unwrap().unwrap();
    let shorter_t1 = pure_dephasing_time(1.0, 1.48).unwrap().unwrap();
    assert!(longer_t1 < 4.5 && 4.5 < shorter_t1, "{longer_t1} {shorter_t1}");
    assert!(pure_dephasing_time(1.0, 2.5).is_err());
    assert_eq!(pure_dephasing_time(1.0, 2.0).unwrap(), None);
}

#[test]
fn single_channel_and_unbounded_budget() {
    let b = compose_budget(&[Channel::new(ChannelName::Dielectric, 0.8)], None).unwrap();
    assert_eq!(b.t1_ms, Some(1.25));
    let empty = compose_budget(&[Channel::new(ChannelName::Dielectric, 0.0)], None).unwrap();
    assert!(empty.t1_unbounded());
    assert_eq!(empty.t2_ms, None);
}

proptest! {
    #[test]
    fn budget_composition_identity(rates in prop::collection::vec(0.0f64..10.0, 5)) {
        let names = [
            ChannelName::Dielectric,
            ChannelName::QpJunction,
            ChannelName::QpArray,
            ChannelName::ThermalPhotonDephasing,
            ChannelName::ThermalExcitation,
        ];
        let ch: Vec<Channel> = names.iter().zip(&rates).map(|(&n, &r)| Channel::new(n, r)).collect();
        let b = compose_budget(&ch, None).unwrap();
        prop_assert!(b.gamma_1_per_ms >= 0.0 && b.gamma_phi_per_ms >= 0.0);
        if let (Some(t1), Some(t2)) = (b.t1_ms, b.t2_ms) {
            let t_phi_inv = b.t_phi_ms.map_or(0.0, |t| 1.0 / t);
            prop_assert!((1.0 / t2 - (0.5 / t1 + t_phi_inv)).abs() < 1e-12 * (1.0 / t2));
        }
    }

    #[test]
    fn dephasing_round_trip(t1 in 0.1f64..10.0, frac in 0.05f64..0.99) {
        let t2 = 2.0 * t1 * frac;
        let t_phi = pure_dephasing_time(t1, t2).unwrap();
        let back = t2_from(t1, t_phi);
        prop_assert!((back / t2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rates_linear_and_nonnegative(n in 0.0f64..1.0, f in 0.05f64..10.0, t in 0.0f64..0.1, scale in 0.1f64..10.0) {
        let a = dielectric_rate(1.08, n, f, t, 1e-6).unwrap();
        let b = dielectric_rate(1.08, n, f, t, 1e-6 * scale).unwrap();
        prop_assert!(a >= 0.0);
        prop_assert!((b - scale * a).abs() <= 1e-12 * b.max(1e-300));
        let up = thermal_excitation_rate(a, f, t).unwrap();
        prop_assert!(up <= 0.5 * a + 1e-300);
    }
}
