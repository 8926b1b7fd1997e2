use fluxonium::circuit::{spectrum_vs_flux, CircuitParams};
use fluxonium::fitting::*;
use fluxonium::Error;
use proptest::prelude::*;

fn flux_grid() -> Vec<f64> {
    (0..=8).map(|k| 0.42 + 0.02 * k as f64).collect()
}

#[test]
fn spectroscopy_round_trip() {
    let truth = CircuitParams::default().with_basis_dim(80);
    let transitions = [(0, 1), (1, 2), (0, 3)];
    let data = synthesize_spectroscopy(&truth, &flux_grid(), &transitions, 0.0, 0).unwrap();
    let start = CircuitParams::new(1.0, 0.7, 5.2, 0.5).with_basis_dim(80);
    let fit = fit_spectroscopy(&data, &start).unwrap();
    assert!((fit.e_c - 1.08).abs() < 1e-4 && (fit.e_l - 0.64).abs() < 1e-4 && (fit.e_j - 5.57).abs() < 1e-4);
    let table = spectrum_vs_flux(&fit.params(&truth), &flux_grid(), &transitions).unwrap();
    let truth_table = spectrum_vs_flux(&truth, &flux_grid(), &transitions).unwrap();
    for (a, b) in table.rows.iter().zip(&truth_table.rows) {
        for (x, y) in a.iter().zip(b) {
            assert!((x - y).abs() < 1e-3);
        }
    }
}

#[test]
fn noisy_spectroscopy_within_error_bars() {
    let truth = CircuitParams::default().with_basis_dim(80);
    let data = synthesize_spectroscopy(&truth, &flux_grid(), &[(0, 1), (1, 2), (0, 3)], 0.005, 3).unwrap();
    let fit = fit_spectroscopy(&data, &CircuitParams::new(1.0, 0.7, 5.2, 0.5).with_basis_dim(80)).unwrap();
    for (got, want, err) in [(fit.e_c, 1.08, fit.stderr[0]), (fit.e_l, 0.64, fit.stderr[1]), (fit.e_j, 5.57, fit.stderr[2])] {
        assert!(err > 0.0 && err < 0.05);
        assert!((got - want).abs() < 4.0 * err, "{got} vs {want} ± {err}");
    }
}

#[test]
fn single_flux_point_is_rank_deficient() {
    let truth = CircuitParams::default().with_basis_dim(60);
    let data = synthesize_spectroscopy(&truth, &[0.5], &[(0, 1), (1, 2), (0, 3), (2, 3), (0, 2), (1, 3)], 0.0, 0).unwrap();
    assert!(matches!(fit_spectroscopy(&data, &truth), Err(Error::RankDeficient(_))));
}

#[test]
fn spectroscopy_csv_round_trip() {
    let data = synthesize_spectroscopy(&CircuitParams::default().with_basis_dim(60), &[0.45, 0.5], &[(0, 1), (1, 2)], 0.0, 0).unwrap();
    let back = parse_spectroscopy_csv(&spectroscopy_to_csv(&data)).unwrap();
    assert_eq!(back, data);
    assert_eq!(parse_transition("0-3").unwrap(), (0, 3));
    assert_eq!(parse_transition("12").unwrap(), (1, 2));
    assert!(parse_transition("1").is_err());
}

#[test]
fn non_convergence_is_reported() {
    let problem = FitProblem::new(|x: &[f64]| Ok(vec![x[0].sin() + 2.0, x[0].cos()]), vec![0.3]).with_max_iterations(1);
    let fit = nlls_fit(&problem).unwrap();
    assert!(matches!(fit.require_converged(), Err(Error::NotConverged { .. })));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    /// Straight-line fit against the closed-form normal equations.
    #[test]
    fn line_fit_matches_normal_equations(
        a in -5.0f64..5.0, b in -5.0f64..5.0, noise in prop::collection::vec(-0.1f64..0.1, 12)
    ) {
        let xs: Vec<f64> = (0..12).map(|k| k as f64 * 0.5).collect();
        let ys: Vec<f64> = xs.iter().zip(&noise).map(|(x, e)| a + b * x + e).collect();
        let n = xs.len() as f64;
        let (sx, sy) = (xs.iter().sum::<f64>(), ys.iter().sum::<f64>());
        let sxx = xs.iter().map(|x| x * x).sum::<f64>();
        let sxy = xs.iter().zip(&ys).map(|(x, y)| x * y).sum::<f64>();
        let slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
        let icpt = (sy - slope * sx) / n;
        let resid: f64 = xs.iter().zip(&ys).map(|(x, y)| (icpt + slope * x - y).powi(2)).sum();
        let se_slope = (resid / (n - 2.0) * n / (n * sxx - sx * sx)).sqrt();

        let (xs2, ys2) = (xs.clone(), ys.clone());
        let problem = FitProblem::new(
            move |p: &[f64]| Ok(xs2.iter().zip(&ys2).map(|(x, y)| p[0] + p[1] * x - y).collect()),
            vec![0.0, 0.0],
        );
        let fit = nlls_fit(&problem).unwrap().require_converged().unwrap();
        prop_assert!((fit.params[0] - icpt).abs() < 1e-7);
        prop_assert!((fit.params[1] - slope).abs() < 1e-7);
        prop_assert!((fit.stderr[1] / se_slope - 1.0).abs() < 1e-5);
    }

    #[test]
    fn bounds_are_respected(target in -3.0f64..3.0) {
        let problem = FitProblem::new(move |x: &[f64]| Ok(vec![x[0] - target]), vec![0.5])
            .with_bounds(vec![0.0], vec![1.0]);
        let fit = nlls_fit(&problem).unwrap();
        prop_assert!((fit.params[0] - target.clamp(0.0, 1.0)).abs() < 1e-8);
    }
}
