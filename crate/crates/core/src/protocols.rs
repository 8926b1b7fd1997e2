//! Time-domain experiments: T1 and Ramsey traces, decay fits, π/2
//! pulse-train amplitude calibration and the driven-saturation T1^02
//! protocol.
//!
//! Trace times are µs. Coherence times passed in are ms, detunings kHz.

use std::f64::consts::PI;

use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::circuit::{CircuitParams, EigenSystem, OperatorKind};
use crate::dissipation::{dielectric_rate, thermal_excitation_rate, transition_channels, NoiseEnvironment};
use crate::error::{check_finite, check_nonnegative, check_positive, invalid, Error, Result};
use crate::fitting::{nlls_fit, FitProblem, Tolerances};
use crate::pumping::{cooling_analysis, effective_rate, invert_t102, simulate_qutrit, QutritRates, T102};
use crate::readout::populations_from_temperature;
use crate::rng::task_rng;

/// Smallest T1^01/T1^12 for which the saturation protocol is meaningful.
pub const MIN_T1_RATIO: f64 = 20.0;
pub const MIN_TRACE_POINTS: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct TraceMeta {
    pub protocol: String,
    pub flux: Option<f64>,
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TraceData {
    /// µs, strictly increasing.
    pub times: Vec<f64>,
    pub signal: Vec<f64>,
    pub meta: TraceMeta,
}

impl TraceData {
    pub fn new(times: Vec<f64>, signal: Vec<f64>, meta: TraceMeta) -> Result<Self> {
        let trace = Self { times, signal, meta };
        trace.validate()?;
        Ok(trace)
    }

    pub fn validate(&self) -> Result<()> {
        if self.times.len() != self.signal.len() {
            return Err(invalid("trace", "times and signal differ in length"));
        }
        if self.times.iter().chain(&self.signal).any(|v| !v.is_finite()) {
            return Err(invalid("trace", "non-finite value"));
        }
        if self.times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(invalid("trace", "times must be strictly increasing"));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn span(&self) -> f64 {
        match (self.times.first(), self.times.last()) {
            (Some(a), Some(b)) => b - a,
            _ => 0.0,
        }
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_us,signal\n");
        for (t, s) in self.times.iter().zip(&self.signal) {
            out.push_str(&format!("{t},{s}\n"));
        }
        out
    }

    /// Reads CSV `t_us,signal`.
    pub fn from_csv(text: &str, meta: TraceMeta) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines.next().ok_or_else(|| invalid("csv", "empty input"))?;
        let cols: Vec<&str> = header.split(',').map(str::trim).collect();
        if cols != ["t_us", "signal"] {
            return Err(invalid("csv", format!("expected header `t_us,signal`, got `{header}`")));
        }
        let (mut times, mut signal) = (Vec::new(), Vec::new());
        for (k, line) in lines.enumerate() {
            let fields: Vec<&str> = line.split(',').map(str::trim).collect();
            if fields.len() != 2 {
                return Err(invalid("csv", format!("line {}: expected 2 fields", k + 2)));
            }
            let num = |s: &str| s.parse::<f64>().map_err(|_| invalid("csv", format!("line {}: bad number `{s}`", k + 2)));
            times.push(num(fields[0])?);
            signal.push(num(fields[1])?);
        }
        Self::new(times, signal, meta)
    }
}

/// State-preparation and measurement scaling: signal = offset + contrast·p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Spam {
    pub contrast: f64,
    pub offset: f64,
}

impl Default for Spam {
    fn default() -> Self {
        Self {
            contrast: 0.8,
            offset: 0.1,
        }
    }
}

impl Spam {
    pub fn validate(&self) -> Result<()> {
        check_finite("contrast", self.contrast)?;
        check_finite("offset", self.offset)
    }
}

/// `n` points evenly spaced over [start, stop].
pub fn linear_grid(start: f64, stop: f64, n: usize) -> Vec<f64> {
    match n {
        0 => vec![],
        1 => vec![start],
        _ => (0..n).map(|k| start + (stop - start) * k as f64 / (n - 1) as f64).collect(),
    }
}

fn check_grid(t_grid: &[f64]) -> Result<()> {
    if t_grid.is_empty() {
        return Err(invalid("t_grid", "empty"));
    }
    if t_grid.iter().any(|t| !t.is_finite()) || t_grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("t_grid", "times must be finite and strictly increasing"));
    }
    Ok(())
}

fn add_noise(signal: &mut [f64], sigma: f64, seed: u64) -> Result<()> {
    check_nonnegative("noise_sigma", sigma)?;
    if sigma > 0.0 {
        let normal = Normal::new(0.0, sigma).map_err(|e| invalid("noise_sigma", e.to_string()))?;
        let mut rng = task_rng(seed, 0);
        for s in signal {
            *s += normal.sample(&mut rng);
        }
    }
    Ok(())
}

pub fn simulate_t1(t1_ms: f64, spam: Spam, t_grid: &[f64], noise_sigma: f64, seed: u64) -> Result<TraceData> {
    check_positive("t1_ms", t1_ms)?;
    spam.validate()?;
    check_grid(t_grid)?;
    let tau = t1_ms * 1e3;
    let mut signal: Vec<f64> = t_grid.iter().map(|t| spam.offset + spam.contrast * (-t / tau).exp()).collect();
    add_noise(&mut signal, noise_sigma, seed)?;
    TraceData::new(
        t_grid.to_vec(),
        signal,
        TraceMeta {
            protocol: "t1".into(),
            flux: None,
            seed: Some(seed),
        },
    )
}

/// Fringes offset + contrast·e^{−t/T2*}·cos(2πΔν t + φ0).
pub fn simulate_ramsey(
    t2_ms: f64,
    detuning_khz: f64,
    phase: f64,
    spam: Spam,
    t_grid: &[f64],
    noise_sigma: f64,
    seed: u64,
) -> Result<TraceData> {
    check_positive("t2_ms", t2_ms)?;
    check_finite("detuning_khz", detuning_khz)?;
    check_finite("phase", phase)?;
    spam.validate()?;
    check_grid(t_grid)?;
    let tau = t2_ms * 1e3;
    let omega = 2.0 * PI * detuning_khz * 1e-3;
    let mut signal: Vec<f64> = t_grid
        .iter()
        .map(|t| spam.offset + spam.contrast * (-t / tau).exp() * (omega * t + phase).cos())
        .collect();
    add_noise(&mut signal, noise_sigma, seed)?;
    TraceData::new(
        t_grid.to_vec(),
        signal,
        TraceMeta {
            protocol: "ramsey".into(),
            flux: None,
            seed: Some(seed),
        },
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DecayModel {
    /// offset + amplitude·e^{−t/τ}
    Exponential,
    /// offset + amplitude·e^{−t/τ}·cos(2πf t + φ)
    DampedCosine,
}

impl std::str::FromStr for DecayModel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "exponential" | "exp" | "t1" => Ok(Self::Exponential),
            "damped-cosine" | "damped_cosine" | "ramsey" => Ok(Self::DampedCosine),
            _ => Err(invalid("model", format!("unknown decay model `{s}`"))),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DecayFit {
    pub model: DecayModel,
    pub amplitude: f64,
    pub offset: f64,
    pub tau_us: f64,
    /// Damped cosine only.
    pub frequency_hz: Option<f64>,
    pub phase: Option<f64>,
    pub amplitude_err: f64,
    pub offset_err: f64,
    pub tau_err_us: f64,
    pub frequency_err_hz: Option<f64>,
    pub rms_residual: f64,
    pub iterations: usize,
}

impl DecayFit {
    pub fn tau_ms(&self) -> f64 {
        self.tau_us * 1e-3
    }
}

/// Best (τ, linear coefficients, sse) over a log grid of τ with the linear
/// parameters solved exactly for each candidate.
fn scan_tau(times: &[f64], y: &[f64], span: f64, basis: impl Fn(f64, f64) -> Vec<f64>) -> (f64, Vec<f64>, f64) {
    let mut best = (span, vec![], f64::INFINITY);
    let steps = 200;
    for k in 0..=steps {
        let tau = span * 10f64.powf(-2.0 + 4.0 * k as f64 / steps as f64);
        let rows: Vec<Vec<f64>> = times.iter().map(|&t| basis(t, tau)).collect();
        let p = rows[0].len();
        let a = nalgebra::DMatrix::from_fn(times.len(), p, |i, j| rows[i][j]);
        let b = nalgebra::DVector::from_column_slice(y);
        let Ok(coef) = a.clone().svd(true, true).solve(&b, 1e-12) else { continue };
        let sse = (&a * &coef - &b).norm_squared();
        if sse < best.2 {
            best = (tau, coef.iter().copied().collect(), sse);
        }
    }
    best
}

/// Dominant frequency (cycles/µs) of the mean-subtracted signal.
fn periodogram_peak(times: &[f64], y: &[f64]) -> f64 {
    let mean = y.iter().sum::<f64>() / y.len() as f64;
    let span = times[times.len() - 1] - times[0];
    let nyquist = 0.5 * (times.len() - 1) as f64 / span;
    let steps = 8 * times.len();
    let mut best = (0.0, 0.0);
    for k in 0..=steps {
        let f = nyquist * k as f64 / steps as f64;
        let (mut c, mut s) = (0.0, 0.0);
        for (&t, &v) in times.iter().zip(y) {
            let arg = 2.0 * PI * f * t;
            c += (v - mean) * arg.cos();
            s += (v - mean) * arg.sin();
        }
        let power = c * c + s * s;
        if power > best.1 {
            best = (f, power);
        }
    }
    best.0
}

pub fn fit_decay(trace: &TraceData, model: DecayModel) -> Result<DecayFit> {
    trace.validate()?;
    if trace.len() < MIN_TRACE_POINTS {
        return Err(invalid(
            "trace",
            format!("need at least {MIN_TRACE_POINTS} points, got {}", trace.len()),
        ));
    }
    let (t, y) = (&trace.times, &trace.signal);
    let span = trace.span();
    let scale = y.iter().fold(0.0_f64, |m, v| m.max(v.abs())).max(1e-300);
    let tolerances = Tolerances {
        gradient: 1e-14,
        step: 1e-14,
        cost: 1e-16,
    };

    let fit = match model {
        DecayModel::Exponential => {
            let (tau, coef, _) = scan_tau(t, y, span, |t, tau| vec![1.0, (-t / tau).exp()]);
            let residual = |p: &[f64]| -> Result<Vec<f64>> {
                Ok(t.iter().zip(y).map(|(&t, &y)| (p[1] + p[0] * (-t / p[2]).exp() - y) / scale).collect())
            };
            let problem = FitProblem::new(residual, vec![coef[1], coef[0], tau])
                .with_bounds(
                    vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 1e-6 * span],
                    vec![f64::INFINITY; 3],
                )
                .with_tolerances(tolerances)
                .with_max_iterations(200);
            nlls_fit(&problem)?
        }
        DecayModel::DampedCosine => {
            let f0 = periodogram_peak(t, y);
            let w0 = 2.0 * PI * f0;
            let (tau, coef, _) = scan_tau(t, y, span, |t, tau| {
                let e = (-t / tau).exp();
                vec![1.0, e * (w0 * t).cos(), e * (w0 * t).sin()]
            });
            // c·cos(wt) + s·sin(wt) = A cos(wt + φ) with A cos φ = c, A sin φ = −s
            let amp = coef[1].hypot(coef[2]);
            let phase = (-coef[2]).atan2(coef[1]);
            let residual = |p: &[f64]| -> Result<Vec<f64>> {
                Ok(t.iter()
                    .zip(y)
                    .map(|(&t, &y)| (p[1] + p[0] * (-t / p[2]).exp() * (2.0 * PI * p[3] * t + p[4]).cos() - y) / scale)
                    .collect())
            };
            let problem = FitProblem::new(residual, vec![amp, coef[0], tau, f0, phase])
                .with_bounds(
                    vec![0.0, f64::NEG_INFINITY, 1e-6 * span, f64::NEG_INFINITY, f64::NEG_INFINITY],
                    vec![f64::INFINITY; 5],
                )
                .with_tolerances(tolerances)
                .with_max_iterations(300);
            nlls_fit(&problem)?
        }
    };
    let fit = fit.require_converged()?;
    let p = &fit.params;
    let e = &fit.stderr;
    let tau_us = p[2];
    if tau_us > 50.0 * span {
        return Err(Error::NonIdentifiable(format!(
            "time constant {tau_us:.4e} µs far exceeds the trace span {span:.4e} µs"
        )));
    }
    // stderr is invariant under the residual scaling, so e is in signal units
    if !(p[0].abs() > 2.0 * e[0]) || p[0].abs() < 1e-9 * scale || !e[2].is_finite() {
        return Err(Error::NonIdentifiable(format!(
            "decay amplitude {:.3e} not resolved (standard error {:.3e})",
            p[0], e[0]
        )));
    }
    let rms_residual = fit.rms() * scale;
    let (mut amplitude, mut phase) = (p[0], None);
    let (mut frequency_hz, mut frequency_err_hz) = (None, None);
    if model == DecayModel::DampedCosine {
        // f < 0 is the mirror solution; report |f| with conjugated phase
        let (f, ph) = if p[3] < 0.0 { (-p[3], -p[4]) } else { (p[3], p[4]) };
        let mut ph = ph.rem_euclid(2.0 * PI);
        if amplitude < 0.0 {
            amplitude = -amplitude;
            ph = (ph + PI).rem_euclid(2.0 * PI);
        }
        phase = Some(ph);
        frequency_hz = Some(f * 1e6);
        frequency_err_hz = Some(e[3] * 1e6);
    }
    Ok(DecayFit {
        model,
        amplitude,
        offset: p[1],
        tau_us,
        frequency_hz,
        phase,
        amplitude_err: e[0],
        offset_err: e[1],
        tau_err_us: e[2],
        frequency_err_hz,
        rms_residual,
        iterations: fit.iterations,
    })
}

/// p1 after `n` pulses of nominal angle π/2 scaled by (1 + ε), from |0⟩.
pub fn pulse_train_population(n: usize, epsilon: f64) -> f64 {
    (n as f64 * 0.25 * PI * (1.0 + epsilon)).sin().powi(2)
}

/// Pulse counts of the calibration train: 0, 12, …, 120.
pub fn pulse_counts() -> Vec<usize> {
    (0..=120).step_by(12).collect()
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PulseCalibration {
    pub amplitude_grid: Vec<f64>,
    /// Standard deviation of the measured signal across the train, per grid
    /// amplitude.
    pub spread: Vec<f64>,
    pub optimum: f64,
    pub optimum_index: usize,
}

/// Scans drive amplitudes, each giving a relative rotation error
/// ε = amplitude/true_amplitude − 1, and returns the amplitude whose pulse
/// train shows the smallest signal spread.
pub fn calibrate_pulse_train(
    amplitude_grid: &[f64],
    true_amplitude: f64,
    spam: Spam,
    noise_sigma: f64,
    seed: u64,
) -> Result<PulseCalibration> {
    check_positive("true_amplitude", true_amplitude)?;
    spam.validate()?;
    if amplitude_grid.len() < 3 {
        return Err(invalid("amplitude_grid", "need at least 3 amplitudes"));
    }
    check_grid(amplitude_grid)?;
    let counts = pulse_counts();
    let mut spread = Vec::with_capacity(amplitude_grid.len());
    for (k, &a) in amplitude_grid.iter().enumerate() {
        let eps = a / true_amplitude - 1.0;
        let mut signal: Vec<f64> = counts
            .iter()
            .map(|&n| spam.offset + spam.contrast * pulse_train_population(n, eps))
            .collect();
        add_noise(&mut signal, noise_sigma, seed.wrapping_add(k as u64))?;
        let mean = signal.iter().sum::<f64>() / signal.len() as f64;
        let var = signal.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / signal.len() as f64;
        spread.push(var.sqrt());
    }
    let optimum_index = spread
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(k, _)| k)
        .unwrap_or(0);
    let optimum = amplitude_grid[optimum_index];
    if optimum_index == 0 || optimum_index + 1 == amplitude_grid.len() {
        return Err(Error::NotBracketed { amplitude: optimum });
    }
    Ok(PulseCalibration {
        amplitude_grid: amplitude_grid.to_vec(),
        spread,
        optimum,
        optimum_index,
    })
}

/// Inputs of the saturation protocol for one flux point.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct T102Context {
    pub t1_01_ms: f64,
    pub t1_12_ms: f64,
    pub p0_th: f64,
    /// Γ02 seen by the protocol, 1/ms; includes any indirect 2→3→0 path.
    pub gamma_02: f64,
    /// 1↔2 drive rate, 1/µs.
    pub omega_12: f64,
    pub spam: Spam,
    /// Per-point readout noise on the measured p0.
    pub noise_sigma: f64,
    /// p0 resolution defining the blind window.
    pub precision: f64,
}

impl T102Context {
    /// Context with nominal protocol settings: strong drive, 1.5 µs T1^12,
    /// noiseless readout, precision 0.005.
    pub fn new(t1_01_ms: f64, p0_th: f64, gamma_02: f64) -> Self {
        Self {
            t1_01_ms,
            t1_12_ms: 0.0015,
            p0_th,
            gamma_02,
            omega_12: 5.0,
            spam: Spam {
                contrast: 1.0,
                offset: 0.0,
            },
            noise_sigma: 0.0,
            precision: 0.005,
        }
    }

    /// Rates predicted for a device at `params.flux`: Γ02 from the dielectric
    /// and quasiparticle channels, T1^12 likewise, p0_th from the
    /// temperature. With `tan_delta_23` the thermally activated 2→3 rate,
    /// its relaxation taken as dielectric with that loss tangent, is added to
    /// Γ02 (|3⟩ decays to |0⟩ quickly). `t1_01_ms` overrides the predicted
    /// T1^01, which is usually dominated by unmodeled loss.
    pub fn from_device(
        params: &CircuitParams,
        env: &NoiseEnvironment,
        t1_01_ms: Option<f64>,
        tan_delta_23: Option<f64>,
    ) -> Result<Self> {
        env.validate()?;
        let eig = EigenSystem::solve(params, 4)?;
        let relax = |i: usize, j: usize| -> Result<f64> {
            Ok(transition_channels(&eig, env, i, j)?.iter().map(|c| c.rate_per_ms).sum())
        };
        let mut gamma_02 = relax(0, 2)?;
        if let Some(tan_delta) = tan_delta_23 {
            let f23 = eig.transition_frequency(2, 3)?;
            let n23 = eig.matrix_element(OperatorKind::Charge, 2, 3)?.magnitude;
            let down = dielectric_rate(params.e_c, n23, f23, env.temperature, tan_delta)?;
            gamma_02 += thermal_excitation_rate(down, f23, env.temperature)?;
        }
        let t1_01_ms = match t1_01_ms {
            Some(t) => t,
            None => 1.0 / relax(0, 1)?,
        };
        let f01 = eig.transition_frequency(0, 1)?;
        let (p0_th, _) = populations_from_temperature(env.temperature, f01)?;
        let mut ctx = Self::new(t1_01_ms, p0_th, gamma_02);
        ctx.t1_12_ms = 1.0 / relax(1, 2)?;
        Ok(ctx)
    }

    pub fn rates(&self) -> Result<QutritRates> {
        QutritRates::new(self.t1_01_ms, self.p0_th, self.gamma_02, self.omega_12)
    }

    /// Durations (µs) spanning four expected saturation time constants.
    pub fn default_drive_grid(&self, points: usize) -> Result<Vec<f64>> {
        let t_eff_us = 1e3 / effective_rate(&self.rates()?);
        Ok(linear_grid(0.0, 4.0 * t_eff_us, points.max(MIN_TRACE_POINTS)))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum T102Outcome {
    Estimate { t1_02_ms: f64, stderr_ms: f64 },
    /// Saturation signal too weak to resolve T1^02; only a lower bound holds.
    LowerBound { t1_02_ms: f64 },
}

impl T102Outcome {
    pub fn value_ms(&self) -> f64 {
        match self {
            Self::Estimate { t1_02_ms, .. } | Self::LowerBound { t1_02_ms } => *t1_02_ms,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct T102Result {
    pub outcome: T102Outcome,
    pub t_eff_ms: f64,
    pub t_eff_err_ms: f64,
    pub p0_saturation: f64,
    pub trace: TraceData,
}

/// Drives 1↔2 for each duration in `drive_grid` (µs), reads p0, fits the
/// exponential approach to saturation and inverts T_eff for T1^02.
pub fn run_t102_protocol(ctx: &T102Context, drive_grid: &[f64], seed: u64) -> Result<T102Result> {
    check_positive("t1_12_ms", ctx.t1_12_ms)?;
    let ratio = ctx.t1_01_ms / ctx.t1_12_ms;
    if !(ratio > MIN_T1_RATIO) {
        return Err(invalid(
            "t1_12_ms",
            format!("T1^01/T1^12 = {ratio:.3} must exceed {MIN_T1_RATIO}"),
        ));
    }
    ctx.spam.validate()?;
    let rates = ctx.rates()?;
    let traj = simulate_qutrit(&rates, [rates.p0_th, rates.p1_th, 0.0], drive_grid)?;
    let mut signal: Vec<f64> = traj.p0.iter().map(|p| ctx.spam.offset + ctx.spam.contrast * p).collect();
    add_noise(&mut signal, ctx.noise_sigma, seed)?;
    let trace = TraceData::new(
        drive_grid.to_vec(),
        signal,
        TraceMeta {
            protocol: "t102".into(),
            flux: None,
            seed: Some(seed),
        },
    )?;

    let cooling = cooling_analysis(ctx.t1_01_ms, ctx.p0_th, ctx.precision)?;
    let blind = || T102Outcome::LowerBound {
        t1_02_ms: cooling.blind_window_ms.0,
    };
    let fit = match fit_decay(&trace, DecayModel::Exponential) {
        Ok(fit) => fit,
        Err(Error::NonIdentifiable(_)) | Err(Error::NotConverged { .. }) => {
            return Ok(T102Result {
                outcome: blind(),
                t_eff_ms: f64::INFINITY,
                t_eff_err_ms: f64::INFINITY,
                p0_saturation: traj.p0[traj.len() - 1],
                trace,
            })
        }
        Err(e) => return Err(e),
    };
    let t_eff = fit.tau_ms();
    let t_eff_err = fit.tau_err_us * 1e-3;
    let p0_saturation = (fit.offset - ctx.spam.offset) / ctx.spam.contrast;
    let signal_size = (fit.amplitude / ctx.spam.contrast).abs();

    let outcome = if signal_size < ctx.precision {
        blind()
    } else {
        match invert_t102(t_eff, ctx.t1_01_ms, ctx.p0_th)? {
            T102::Finite(t) if !cooling.in_blind_window(t) => {
                let denom = 2.0 * ctx.t1_01_ms - (2.0 - ctx.p0_th) * t_eff;
                let slope = 2.0 * ctx.t1_01_ms * ctx.t1_01_ms / (denom * denom);
                T102Outcome::Estimate {
                    t1_02_ms: t,
                    stderr_ms: slope * t_eff_err,
                }
            }
            T102::Finite(_) => blind(),
            T102::Unbounded | T102::BeyondPrecision => {
                // two standard errors below T_eff still bound T1^02 from below
                let low = (t_eff - 2.0 * t_eff_err).max(f64::MIN_POSITIVE);
                match invert_t102(low, ctx.t1_01_ms, ctx.p0_th)? {
                    T102::Finite(t) => T102Outcome::LowerBound { t1_02_ms: t },
                    _ => blind(),
                }
            }
        }
    };
    Ok(T102Result {
        outcome,
        t_eff_ms: t_eff,
        t_eff_err_ms: t_eff_err,
        p0_saturation,
        trace,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t1_at_tau_is_offset_plus_contrast_over_e() {
        let spam = Spam::default();
        let tr = simulate_t1(1.2, spam, &[0.0, 1200.0], 0.0, 0).unwrap();
        assert!((tr.signal[1] - (0.1 + 0.8 / std::f64::consts::E)).abs() < 1e-15);
    }

    #[test]
    fn zero_detuning_is_exponential() {
        let grid = linear_grid(0.0, 3000.0, 31);
        let a = simulate_ramsey(1.48, 0.0, 0.0, Spam::default(), &grid, 0.0, 0).unwrap();
        let b = simulate_t1(1.48, Spam::default(), &grid, 0.0, 0).unwrap();
        for (x, y) in a.signal.iter().zip(&b.signal) {
            assert!((x - y).abs() < 1e-15);
        }
    }

    #[test]
    fn trace_validation() {
        assert!(TraceData::new(vec![0.0, 0.0], vec![1.0, 1.0], TraceMeta::default()).is_err());
        assert!(TraceData::new(vec![0.0], vec![1.0, 1.0], TraceMeta::default()).is_err());
        assert!(simulate_t1(0.0, Spam::default(), &[0.0, 1.0], 0.0, 0).is_err());
    }

    #[test]
    fn csv_round_trip() {
        let tr = simulate_t1(1.0, Spam::default(), &linear_grid(0.0, 100.0, 5), 0.01, 4).unwrap();
        let back = TraceData::from_csv(&tr.to_csv(), tr.meta.clone()).unwrap();
        assert_eq!(back, tr);
    }

    #[test]
    fn too_few_points() {
        let tr = simulate_t1(1.0, Spam::default(), &linear_grid(0.0, 100.0, 5), 0.0, 0).unwrap();
        assert!(fit_decay(&tr, DecayModel::Exponential).is_err());
    }

    #[test]
    fn twelve_pulses_is_six_pi() {
        for n in pulse_counts() {
            assert!(pulse_train_population(n, 0.0) < 1e-24);
        }
        assert!(pulse_train_population(120, 0.01) > 0.5);
    }

    #[test]
    fn calibration_edge_is_flagged() {
        let grid = linear_grid(1.0, 1.05, 6);
        assert!(matches!(
            calibrate_pulse_train(&grid, 1.0, Spam::default(), 0.0, 0),
            Err(Error::NotBracketed { .. })
        ));
    }

    #[test]
    fn ratio_precondition() {
        let mut ctx = T102Context::new(1.0, 0.58, 2.0);
        ctx.t1_12_ms = 0.1;
        let grid = ctx.default_drive_grid(20).unwrap();
        assert!(run_t102_protocol(&ctx, &grid, 0).is_err());
    }
}
