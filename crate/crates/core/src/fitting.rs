//! Levenberg-Marquardt least squares and the spectroscopy fit of the circuit
//! energies.
//!
//! The engine is a damped Gauss-Newton iteration with Marquardt diagonal
//! scaling. The Jacobian comes from central finite differences (relative step
//! 1e-6, absolute floor 1e-9, one-sided next to a bound). Damping is divided
//! by 3 after an accepted step and multiplied by 3 after a rejected one.
//! Parameter standard errors are `sqrt(diag(s²·(JᵀJ)⁻¹))` with `s²` the
//! residual variance; directions the data do not constrain get an infinite
//! standard error.

use std::collections::BTreeMap;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use rand_distr::{Distribution, Normal};
use serde::Serialize;

use crate::circuit::{diagonalize, CircuitParams, OscillatorBasis};
use crate::error::{check_finite, invalid, Error, Result};
use crate::rng::task_rng;

const REL_STEP: f64 = 1e-6;
const ABS_STEP: f64 = 1e-9;
const INITIAL_DAMPING: f64 = 1e-6;
const DAMPING_FACTOR: f64 = 3.0;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerances {
    /// Cosine between residual and any Jacobian column.
    pub gradient: f64,
    /// Relative parameter step.
    pub step: f64,
    /// Relative cost reduction on an accepted step.
    pub cost: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            gradient: 1e-12,
            step: 1e-13,
            cost: 1e-15,
        }
    }
}

/// A box-bounded least-squares problem: minimize ½‖r(x)‖².
pub struct FitProblem<F> {
    pub residual: F,
    pub initial: Vec<f64>,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub tolerances: Tolerances,
    pub max_iterations: usize,
}

impl<F> FitProblem<F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    pub fn new(residual: F, initial: Vec<f64>) -> Self {
        let n = initial.len();
        Self {
            residual,
            initial,
            lower: vec![f64::NEG_INFINITY; n],
            upper: vec![f64::INFINITY; n],
            tolerances: Tolerances::default(),
            max_iterations: 200,
        }
    }

    pub fn with_bounds(mut self, lower: Vec<f64>, upper: Vec<f64>) -> Self {
        self.lower = lower;
        self.upper = upper;
        self
    }

    pub fn with_tolerances(mut self, tolerances: Tolerances) -> Self {
        self.tolerances = tolerances;
        self
    }

    pub fn with_max_iterations(mut self, max_iterations: usize) -> Self {
        self.max_iterations = max_iterations;
        self
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Termination {
    ZeroResidual,
    Gradient,
    Step,
    Cost,
    /// Damping grew without finding a downhill step.
    Stalled,
    MaxIterations,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FitResult {
    pub params: Vec<f64>,
    pub stderr: Vec<f64>,
    /// ½‖r‖²
    pub cost: f64,
    pub residuals: Vec<f64>,
    /// Accepted steps.
    pub iterations: usize,
    pub evaluations: usize,
    pub converged: bool,
    pub termination: Termination,
}

impl FitResult {
    /// Turns a non-converged result into [`Error::NotConverged`].
    pub fn require_converged(self) -> Result<Self> {
        if self.converged {
            Ok(self)
        } else {
            Err(Error::NotConverged {
                iterations: self.iterations,
                cost: self.cost,
            })
        }
    }

    /// Root-mean-square residual.
    pub fn rms(&self) -> f64 {
        (2.0 * self.cost / self.residuals.len().max(1) as f64).sqrt()
    }
}

struct Evaluator<'a, F> {
    f: &'a F,
    lower: &'a [f64],
    upper: &'a [f64],
    evaluations: usize,
}

impl<F> Evaluator<'_, F>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    fn residual(&mut self, x: &[f64]) -> Result<DVector<f64>> {
        self.evaluations += 1;
        let r = (self.f)(x)?;
        if r.iter().any(|v| !v.is_finite()) {
            return Err(invalid("residual", "non-finite residual"));
        }
        Ok(DVector::from_vec(r))
    }

    fn column(&self, x: &[f64], j: usize) -> Result<DVector<f64>> {
        let h = (REL_STEP * x[j].abs()).max(ABS_STEP);
        let (lo, hi) = (self.lower[j], self.upper[j]);
        let (minus, plus) = if x[j] + h > hi {
            (x[j] - h, x[j])
        } else if x[j] - h < lo {
            (x[j], x[j] + h)
        } else {
            (x[j] - h, x[j] + h)
        };
        let eval = |v: f64| -> Result<DVector<f64>> {
            let mut p = x.to_vec();
            p[j] = v;
            Ok(DVector::from_vec((self.f)(&p)?))
        };
        let rp = eval(plus)?;
        let rm = eval(minus)?;
        Ok((rp - rm) / (plus - minus))
    }

    fn jacobian(&mut self, x: &[f64], m: usize) -> Result<DMatrix<f64>> {
        let n = x.len();
        self.evaluations += 2 * n;

        #[cfg(feature = "parallel")]
        let cols: Result<Vec<DVector<f64>>> = {
            use rayon::prelude::*;
            (0..n).into_par_iter().map(|j| self.column(x, j)).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let cols: Result<Vec<DVector<f64>>> = (0..n).map(|j| self.column(x, j)).collect();

        let cols = cols?;
        let mut jac = DMatrix::zeros(m, n);
        for (j, c) in cols.iter().enumerate() {
            if c.len() != m {
                return Err(invalid("residual", "residual length changed between evaluations"));
            }
            jac.set_column(j, c);
        }
        Ok(jac)
    }
}

/// Central-difference Jacobian of `f` at `x` with the engine's step rule.
pub fn finite_difference_jacobian<F>(f: &F, x: &[f64]) -> Result<DMatrix<f64>>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let n = x.len();
    let lower = vec![f64::NEG_INFINITY; n];
    let upper = vec![f64::INFINITY; n];
    let m = f(x)?.len();
    let mut ev = Evaluator {
        f,
        lower: &lower,
        upper: &upper,
        evaluations: 0,
    };
    ev.jacobian(x, m)
}

fn clamp_into(x: &mut [f64], lower: &[f64], upper: &[f64]) {
    for ((v, lo), hi) in x.iter_mut().zip(lower).zip(upper) {
        *v = v.clamp(*lo, *hi);
    }
}

fn standard_errors(jac: &DMatrix<f64>, cost: f64) -> Vec<f64> {
    let (m, n) = jac.shape();
    let dof = m.saturating_sub(n).max(1) as f64;
    let variance = 2.0 * cost / dof;
    // unit column norms keep the cutoff independent of parameter units
    let norms: Vec<f64> = (0..n).map(|j| jac.column(j).norm()).collect();
    let scaled = DMatrix::from_fn(m, n, |i, j| if norms[j] > 0.0 { jac[(i, j)] / norms[j] } else { 0.0 });
    let eig = SymmetricEigen::new(scaled.transpose() * &scaled);
    let lam_max = eig.eigenvalues.amax();
    let cutoff = lam_max * 1e-14;
    let mut stderr = vec![0.0; n];
    for (k, &lam) in eig.eigenvalues.iter().enumerate() {
        let v = eig.eigenvectors.column(k);
        for (i, s) in stderr.iter_mut().enumerate() {
            if lam <= cutoff || lam_max == 0.0 {
                if v[i].abs() > 1e-6 {
                    *s = f64::INFINITY;
                }
            } else {
                *s += v[i] * v[i] / lam;
            }
        }
    }
    stderr
        .iter()
        .zip(&norms)
        .map(|(s, &c)| if c > 0.0 { (s * variance).sqrt() / c } else { f64::INFINITY })
        .collect()
}

/// Minimizes ½‖r(x)‖² from `problem.initial`.
///
/// Setup errors (bad bounds, failing residual) are returned as `Err`; running
/// out of iterations is reported through [`FitResult::converged`].
pub fn nlls_fit<F>(problem: &FitProblem<F>) -> Result<FitResult>
where
    F: Fn(&[f64]) -> Result<Vec<f64>> + Sync,
{
    let n = problem.initial.len();
    if n == 0 {
        return Err(invalid("initial", "no parameters"));
    }
    if problem.lower.len() != n || problem.upper.len() != n {
        return Err(invalid("bounds", "length differs from parameter count"));
    }
    for i in 0..n {
        check_finite("initial", problem.initial[i])?;
        if !(problem.lower[i] <= problem.initial[i] && problem.initial[i] <= problem.upper[i]) {
            return Err(invalid("initial", format!("parameter {i} outside its bounds")));
        }
    }
    let tol = problem.tolerances;
    let mut ev = Evaluator {
        f: &problem.residual,
        lower: &problem.lower,
        upper: &problem.upper,
        evaluations: 0,
    };

    let mut x = problem.initial.clone();
    let mut r = ev.residual(&x)?;
    let m = r.len();
    if m < n {
        return Err(Error::RankDeficient(format!("{m} residuals for {n} parameters")));
    }
    let mut cost = 0.5 * r.norm_squared();
    let mut damping: Option<f64> = None;
    let mut termination = Termination::MaxIterations;
    let mut iterations = 0;
    let mut rounds = 0;

    'outer: while rounds < problem.max_iterations {
        rounds += 1;
        if cost <= f64::MIN_POSITIVE * m as f64 {
            termination = Termination::ZeroResidual;
            break;
        }
        let jac = ev.jacobian(&x, m)?;
        let mut a = jac.transpose() * &jac;
        let mut g = jac.transpose() * &r;
        // parameters pinned at a bound with the descent direction pointing
        // outward are frozen for this round
        for j in 0..n {
            let pinned = (x[j] <= problem.lower[j] && g[j] > 0.0) || (x[j] >= problem.upper[j] && g[j] < 0.0);
            if pinned {
                g[j] = 0.0;
                for k in 0..n {
                    a[(j, k)] = 0.0;
                    a[(k, j)] = 0.0;
                }
                a[(j, j)] = 1.0;
            }
        }

        let rnorm = r.norm();
        let grad_cos = (0..n)
            .map(|j| {
                let cn = a[(j, j)].sqrt();
                if cn == 0.0 {
                    0.0
                } else {
                    g[j].abs() / (cn * rnorm)
                }
            })
            .fold(0.0_f64, f64::max);
        if grad_cos <= tol.gradient {
            termination = Termination::Gradient;
            break;
        }

        let max_diag = (0..n).map(|j| a[(j, j)]).fold(0.0_f64, f64::max);
        let scale: Vec<f64> = (0..n).map(|j| a[(j, j)].max(max_diag * 1e-12).max(f64::MIN_POSITIVE)).collect();
        let mu = damping.get_or_insert(INITIAL_DAMPING);

        loop {
            let mut lhs = a.clone();
            for j in 0..n {
                lhs[(j, j)] += *mu * scale[j];
            }
            let step = match lhs.cholesky() {
                Some(ch) => ch.solve(&(-&g)),
                None => {
                    *mu *= DAMPING_FACTOR;
                    if *mu > 1e30 {
                        termination = Termination::Stalled;
                        break 'outer;
                    }
                    continue;
                }
            };
            let mut trial: Vec<f64> = x.iter().zip(step.iter()).map(|(a, b)| a + b).collect();
            clamp_into(&mut trial, &problem.lower, &problem.upper);

            let xnorm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let dnorm = trial.iter().zip(&x).map(|(a, b)| (a - b) * (a - b)).sum::<f64>().sqrt();
            if dnorm <= tol.step * (xnorm + tol.step) {
                termination = Termination::Step;
                break 'outer;
            }

            let r_trial = ev.residual(&trial)?;
            let cost_trial = 0.5 * r_trial.norm_squared();
            if cost_trial < cost {
                let reduction = cost - cost_trial;
                x = trial;
                r = r_trial;
                cost = cost_trial;
                iterations += 1;
                *mu /= DAMPING_FACTOR;
                if reduction <= tol.cost * (cost + reduction) {
                    termination = Termination::Cost;
                    break 'outer;
                }
                break;
            }
            *mu *= DAMPING_FACTOR;
            if *mu > 1e30 {
                termination = Termination::Stalled;
                break 'outer;
            }
        }
    }

    let converged = !matches!(termination, Termination::MaxIterations | Termination::Stalled);
    let stderr = if cost == 0.0 {
        vec![0.0; n]
    } else {
        let jac = ev.jacobian(&x, m)?;
        standard_errors(&jac, cost)
    };
    Ok(FitResult {
        params: x,
        stderr,
        cost,
        residuals: r.iter().copied().collect(),
        iterations,
        evaluations: ev.evaluations,
        converged,
        termination,
    })
}

/// One measured transition frequency.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct SpectroscopyPoint {
    pub flux: f64,
    pub transition: (usize, usize),
    pub freq_ghz: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectroscopyFit {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    /// Standard errors of (E_C, E_L, E_J), GHz.
    pub stderr: [f64; 3],
    pub fit: FitResult,
}

impl SpectroscopyFit {
    pub fn params(&self, template: &CircuitParams) -> CircuitParams {
        CircuitParams {
            e_c: self.e_c,
            e_l: self.e_l,
            e_j: self.e_j,
            ..*template
        }
    }
}

/// Flux and the (data index, transition) pairs measured there.
type FluxGroup = (f64, Vec<(usize, (usize, usize))>);

/// Data grouped by flux: each group needs one diagonalization.
struct FluxGroups {
    groups: Vec<FluxGroup>,
    levels: usize,
}

impl FluxGroups {
    fn new(data: &[SpectroscopyPoint]) -> Self {
        let mut map: BTreeMap<u64, FluxGroup> = BTreeMap::new();
        for (k, p) in data.iter().enumerate() {
            map.entry(p.flux.to_bits())
                .or_insert_with(|| (p.flux, Vec::new()))
                .1
                .push((k, p.transition));
        }
        let levels = data
            .iter()
            .map(|p| p.transition.0.max(p.transition.1))
            .max()
            .unwrap_or(0)
            + 1;
        Self {
            groups: map.into_values().collect(),
            levels,
        }
    }

    /// Model frequencies in data order.
    fn model(&self, params: &CircuitParams, n_points: usize) -> Result<Vec<f64>> {
        let basis = OscillatorBasis::new(params)?;
        let solve = |(flux, items): &FluxGroup| -> Result<Vec<(usize, f64)>> {
            let h = basis.hamiltonian(params.e_j, *flux);
            let e = diagonalize(&h, self.levels)
                .map_err(|e| Error::AtFlux {
                    flux: *flux,
                    source: Box::new(e),
                })?
                .energies;
            Ok(items.iter().map(|&(k, (i, j))| (k, (e[j] - e[i]).abs())).collect())
        };

        #[cfg(feature = "parallel")]
        let parts: Result<Vec<Vec<(usize, f64)>>> = {
            use rayon::prelude::*;
            self.groups.par_iter().map(solve).collect()
        };
        #[cfg(not(feature = "parallel"))]
        let parts: Result<Vec<Vec<(usize, f64)>>> = self.groups.iter().map(solve).collect();

        let mut out = vec![0.0; n_points];
        for (k, v) in parts?.into_iter().flatten() {
            out[k] = v;
        }
        Ok(out)
    }
}

/// Fits (E_C, E_L, E_J) to transition frequencies measured versus flux.
///
/// `init` supplies the starting energies and the basis size.
pub fn fit_spectroscopy(data: &[SpectroscopyPoint], init: &CircuitParams) -> Result<SpectroscopyFit> {
    init.validate()?;
    if data.len() < 6 {
        return Err(invalid("data", format!("need at least 6 points, got {}", data.len())));
    }
    for p in data {
        check_finite("flux", p.flux)?;
        check_finite("freq_ghz", p.freq_ghz)?;
        if p.transition.0 == p.transition.1 {
            return Err(invalid("transition", "transition between a level and itself"));
        }
    }
    let mut transitions: Vec<(usize, usize)> = data.iter().map(|p| p.transition).collect();
    transitions.sort_unstable();
    transitions.dedup();
    if transitions.len() < 2 {
        return Err(invalid("data", "need at least two distinct transitions"));
    }
    let groups = FluxGroups::new(data);
    if groups.groups.len() < 2 {
        return Err(Error::RankDeficient(
            "all points share one flux value; E_C, E_L, E_J are not separable".into(),
        ));
    }

    let residual = |x: &[f64]| -> Result<Vec<f64>> {
        let params = CircuitParams {
            e_c: x[0],
            e_l: x[1],
            e_j: x[2],
            ..*init
        };
        let model = groups.model(&params, data.len())?;
        Ok(model.iter().zip(data).map(|(m, p)| m - p.freq_ghz).collect())
    };
    let problem = FitProblem::new(residual, vec![init.e_c, init.e_l, init.e_j])
        .with_bounds(vec![1e-6, 1e-6, 0.0], vec![f64::INFINITY; 3])
        .with_tolerances(Tolerances {
            gradient: 1e-10,
            step: 1e-12,
            cost: 1e-14,
        })
        .with_max_iterations(100);
    let fit = nlls_fit(&problem)?.require_converged()?;
    Ok(SpectroscopyFit {
        e_c: fit.params[0],
        e_l: fit.params[1],
        e_j: fit.params[2],
        stderr: [fit.stderr[0], fit.stderr[1], fit.stderr[2]],
        fit,
    })
}

/// Synthetic spectroscopy data with optional Gaussian frequency noise (GHz).
pub fn synthesize_spectroscopy(
    params: &CircuitParams,
    flux_grid: &[f64],
    transitions: &[(usize, usize)],
    noise_ghz: f64,
    seed: u64,
) -> Result<Vec<SpectroscopyPoint>> {
    let table = crate::circuit::spectrum_vs_flux(params, flux_grid, transitions)?;
    let normal = Normal::new(0.0, noise_ghz.max(0.0)).map_err(|e| invalid("noise_ghz", e.to_string()))?;
    let mut rng = task_rng(seed, 0);
    let mut out = Vec::with_capacity(flux_grid.len() * transitions.len());
    for (flux, row) in table.flux.iter().zip(&table.rows) {
        for (&t, &f) in transitions.iter().zip(row) {
            let noise = if noise_ghz > 0.0 { normal.sample(&mut rng) } else { 0.0 };
            out.push(SpectroscopyPoint {
                flux: *flux,
                transition: t,
                freq_ghz: f + noise,
            });
        }
    }
    Ok(out)
}

/// Parses a transition id written as `01`, `0-1` or `0_1`.
pub fn parse_transition(s: &str) -> Result<(usize, usize)> {
    let s = s.trim().trim_start_matches('f');
    let parse = |t: &str| t.parse::<usize>().map_err(|_| invalid("transition", format!("bad transition `{s}`")));
    if let Some((a, b)) = s.split_once(['-', '_']) {
        return Ok((parse(a)?, parse(b)?));
    }
    if s.len() == 2 && s.chars().all(|c| c.is_ascii_digit()) {
        return Ok((parse(&s[..1])?, parse(&s[1..])?));
    }
    Err(invalid("transition", format!("bad transition `{s}`")))
}

/// Reads CSV `flux,transition,freq_ghz` (header required).
pub fn parse_spectroscopy_csv(text: &str) -> Result<Vec<SpectroscopyPoint>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| invalid("csv", "empty input"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["flux", "transition", "freq_ghz"] {
        return Err(invalid("csv", format!("expected header `flux,transition,freq_ghz`, got `{header}`")));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let f: Vec<&str> = line.split(',').map(str::trim).collect();
            if f.len() != 3 {
                return Err(invalid("csv", format!("line {}: expected 3 fields", k + 2)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| invalid("csv", format!("line {}: bad number `{s}`", k + 2)));
            Ok(SpectroscopyPoint {
                flux: num(f[0])?,
                transition: parse_transition(f[1])?,
                freq_ghz: num(f[2])?,
            })
        })
        .collect()
}

pub fn spectroscopy_to_csv(data: &[SpectroscopyPoint]) -> String {
    let mut out = String::from("flux,transition,freq_ghz\n");
    for p in data {
        out.push_str(&format!("{},{}-{},{}\n", p.flux, p.transition.0, p.transition.1, p.freq_ghz));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn linear_model_is_exact_in_few_iterations() {
        let xs: Vec<f64> = (0..12).map(|k| k as f64 * 0.7).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.5 * x - 1.25).collect();
        let problem = FitProblem::new(
            |p: &[f64]| Ok(xs.iter().zip(&ys).map(|(x, y)| p[0] * x + p[1] - y).collect()),
            vec![0.0, 0.0],
        );
        let fit = nlls_fit(&problem).unwrap();
        assert!(fit.converged);
        assert!(fit.iterations <= 3, "iterations {}", fit.iterations);
        assert!((fit.params[0] - 2.5).abs() < 1e-10);
        assert!((fit.params[1] + 1.25).abs() < 1e-10);
    }

    #[test]
    fn rosenbrock_valley() {
        let problem = FitProblem::new(|p: &[f64]| Ok(vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]]), vec![-1.2, 1.0])
            .with_max_iterations(500);
        let fit = nlls_fit(&problem).unwrap();
        assert!(fit.converged, "{:?}", fit.termination);
        assert!((fit.params[0] - 1.0).abs() < 1e-8);
        assert!((fit.params[1] - 1.0).abs() < 1e-8);
    }

    #[test]
    fn bounds_are_respected() {
        // unconstrained minimum at 3, bounded above by 2
        let problem = FitProblem::new(|p: &[f64]| Ok(vec![p[0] - 3.0, 0.0]), vec![0.0])
            .with_bounds(vec![-1.0], vec![2.0]);
        let fit = nlls_fit(&problem).unwrap();
        assert!((fit.params[0] - 2.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_setup() {
        let f = |p: &[f64]| Ok(vec![p[0]]);
        assert!(nlls_fit(&FitProblem::new(f, vec![5.0]).with_bounds(vec![0.0], vec![1.0])).is_err());
        let under = |p: &[f64]| Ok(vec![p[0] + p[1]]);
        assert!(matches!(
            nlls_fit(&FitProblem::new(under, vec![0.0, 0.0])),
            Err(Error::RankDeficient(_))
        ));
    }

    #[test]
    fn max_iterations_reported_not_silent() {
        let problem = FitProblem::new(|p: &[f64]| Ok(vec![10.0 * (p[1] - p[0] * p[0]), 1.0 - p[0]]), vec![-1.2, 1.0])
            .with_max_iterations(2);
        let fit = nlls_fit(&problem).unwrap();
        assert!(!fit.converged);
        assert_eq!(fit.termination, Termination::MaxIterations);
        assert!(matches!(fit.require_converged(), Err(Error::NotConverged { .. })));
    }

    #[test]
    fn unconstrained_direction_gets_infinite_error() {
        let problem = FitProblem::new(|p: &[f64]| Ok(vec![p[0] + p[1] - 1.0, p[0] + p[1] - 1.2]), vec![0.0, 0.0]);
        let fit = nlls_fit(&problem).unwrap();
        assert!(fit.stderr.iter().all(|s| s.is_infinite()));
    }

    #[test]
    fn transition_ids() {
        assert_eq!(parse_transition("01").unwrap(), (0, 1));
        assert_eq!(parse_transition("f12").unwrap(), (1, 2));
        assert_eq!(parse_transition("3-10").unwrap(), (3, 10));
        assert!(parse_transition("x").is_err());
    }

    #[test]
    fn csv_round_trip() {
        let data = vec![
            SpectroscopyPoint {
                flux: 0.5,
                transition: (0, 1),
                freq_ghz: 0.16,
            },
            SpectroscopyPoint {
                flux: 0.45,
                transition: (1, 2),
                freq_ghz: 4.3,
            },
        ];
        assert_eq!(parse_spectroscopy_csv(&spectroscopy_to_csv(&data)).unwrap(), data);
        assert!(parse_spectroscopy_csv("a,b,c\n").is_err());
    }
}
