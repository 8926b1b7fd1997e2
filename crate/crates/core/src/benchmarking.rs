//! Single-qubit Clifford group and Monte-Carlo randomized, interleaved and
//! purity benchmarking.
//!
//! States are Bloch vectors r with ρ = (I + r·σ)/2, which is an exact
//! single-qubit density-matrix representation: unitaries act as rotations,
//! CPTP noise as affine maps r ↦ M r + t. |0⟩ sits at z = +1.

use std::sync::OnceLock;

use nalgebra::{Complex, Matrix3, Vector3};
use rand::Rng;
use rand_distr::{Binomial, Distribution};
use serde::{Deserialize, Serialize};

use crate::error::{check_nonnegative, invalid, Error, Result};
use crate::fitting::{nlls_fit, FitProblem, Tolerances};
use crate::rng::task_rng;

pub const CLIFFORD_COUNT: usize = 24;
/// Sequence lengths used when none are given; an artifact choice.
pub const DEFAULT_LENGTHS: [usize; 7] = [2, 25, 50, 100, 200, 400, 800];

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhysicalGate {
    I,
    X,
    #[serde(rename = "-X")]
    MinusX,
    Y,
    #[serde(rename = "-Y")]
    MinusY,
    #[serde(rename = "X/2")]
    X2,
    #[serde(rename = "-X/2")]
    MinusX2,
    #[serde(rename = "Y/2")]
    Y2,
    #[serde(rename = "-Y/2")]
    MinusY2,
}

impl PhysicalGate {
    /// Search order; ties between equal-length decompositions resolve
    /// lexicographically in this order.
    pub const GENERATORS: [PhysicalGate; 8] = [
        Self::X,
        Self::MinusX,
        Self::Y,
        Self::MinusY,
        Self::X2,
        Self::MinusX2,
        Self::Y2,
        Self::MinusY2,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Self::I => "I",
            Self::X => "X",
            Self::MinusX => "-X",
            Self::Y => "Y",
            Self::MinusY => "-Y",
            Self::X2 => "X/2",
            Self::MinusX2 => "-X/2",
            Self::Y2 => "Y/2",
            Self::MinusY2 => "-Y/2",
        }
    }

    /// Number of π/2 pulses; π rotations are two concatenated π/2 pulses.
    pub fn pulses(self) -> usize {
        match self {
            Self::I => 0,
            Self::X | Self::MinusX | Self::Y | Self::MinusY => 2,
            _ => 1,
        }
    }

    /// Signed π/2 pulse: (axis index, ±1).
    fn pulse(self) -> Option<(usize, f64)> {
        match self {
            Self::I => None,
            Self::X | Self::X2 => Some((0, 1.0)),
            Self::MinusX | Self::MinusX2 => Some((0, -1.0)),
            Self::Y | Self::Y2 => Some((1, 1.0)),
            Self::MinusY | Self::MinusY2 => Some((1, -1.0)),
        }
    }

    pub fn rotation(self) -> Matrix3<f64> {
        match self.pulse() {
            None => Matrix3::identity(),
            Some((axis, sign)) => {
                let r = axis_rotation(axis, sign * std::f64::consts::FRAC_PI_2);
                if self.pulses() == 2 {
                    r * r
                } else {
                    r
                }
            }
        }
    }

    /// SU(2) matrix exp(−iθ n·σ/2).
    pub fn unitary(self) -> [[Complex<f64>; 2]; 2] {
        let z = Complex::new(0.0, 0.0);
        let Some((axis, sign)) = self.pulse() else {
            return [[Complex::new(1.0, 0.0), z], [z, Complex::new(1.0, 0.0)]];
        };
        let theta = sign * std::f64::consts::FRAC_PI_2 * self.pulses() as f64;
        let (c, s) = ((0.5 * theta).cos(), (0.5 * theta).sin());
        let cc = Complex::new(c, 0.0);
        match axis {
            0 => [[cc, Complex::new(0.0, -s)], [Complex::new(0.0, -s), cc]],
            _ => [[cc, Complex::new(-s, 0.0)], [Complex::new(s, 0.0), cc]],
        }
    }
}

impl std::str::FromStr for PhysicalGate {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        std::iter::once(Self::I)
            .chain(Self::GENERATORS)
            .find(|g| g.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| invalid("gate", format!("unknown gate `{s}`")))
    }
}

fn axis_rotation(axis: usize, angle: f64) -> Matrix3<f64> {
    let (c, s) = (angle.cos(), angle.sin());
    match axis {
        0 => Matrix3::new(1.0, 0.0, 0.0, 0.0, c, -s, 0.0, s, c),
        1 => Matrix3::new(c, 0.0, s, 0.0, 1.0, 0.0, -s, 0.0, c),
        _ => Matrix3::new(c, -s, 0.0, s, c, 0.0, 0.0, 0.0, 1.0),
    }
}

fn rounded(m: &Matrix3<f64>) -> [[i8; 3]; 3] {
    let mut out = [[0i8; 3]; 3];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, v) in row.iter_mut().enumerate() {
            *v = m[(i, j)].round() as i8;
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CliffordElement {
    pub index: usize,
    /// Bloch-sphere rotation, entries in {−1, 0, 1}.
    pub rotation: [[i8; 3]; 3],
    /// Gates in application order; `[I]` for the identity.
    pub decomposition: Vec<PhysicalGate>,
}

impl CliffordElement {
    /// Physical gates excluding the identity.
    pub fn gate_count(&self) -> usize {
        self.decomposition.iter().filter(|g| **g != PhysicalGate::I).count()
    }

    pub fn pulse_count(&self) -> usize {
        self.decomposition.iter().map(|g| g.pulses()).sum()
    }

    pub fn rotation_matrix(&self) -> Matrix3<f64> {
        Matrix3::from_fn(|i, j| self.rotation[i][j] as f64)
    }

    /// Product of the decomposition's SU(2) matrices (later gates on the left).
    pub fn unitary(&self) -> [[Complex<f64>; 2]; 2] {
        let mul = |a: &[[Complex<f64>; 2]; 2], b: &[[Complex<f64>; 2]; 2]| {
            let mut c = [[Complex::new(0.0, 0.0); 2]; 2];
            for i in 0..2 {
                for j in 0..2 {
                    c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
                }
            }
            c
        };
        self.decomposition
            .iter()
            .fold(PhysicalGate::I.unitary(), |acc, g| mul(&g.unitary(), &acc))
    }
}

/// The 24 single-qubit Cliffords with composition and inverse tables.
#[derive(Clone, Debug)]
pub struct CliffordTable {
    pub elements: Vec<CliffordElement>,
    /// `compose[a][b]`: apply `a`, then `b`.
    compose: Vec<[usize; CLIFFORD_COUNT]>,
    inverse: [usize; CLIFFORD_COUNT],
}

impl CliffordTable {
    /// Breadth-first search over generator strings; each element keeps the
    /// first (shortest, then lexicographically smallest) string reaching it.
    pub fn build() -> Self {
        let mut elements = vec![CliffordElement {
            index: 0,
            rotation: rounded(&Matrix3::identity()),
            decomposition: vec![PhysicalGate::I],
        }];
        let mut frontier = vec![(Matrix3::<f64>::identity(), Vec::<PhysicalGate>::new())];
        while elements.len() < CLIFFORD_COUNT && !frontier.is_empty() {
            let mut next = Vec::new();
            for (rot, word) in &frontier {
                for g in PhysicalGate::GENERATORS {
                    let r = g.rotation() * rot;
                    let key = rounded(&r);
                    if elements.iter().any(|e| e.rotation == key) {
                        continue;
                    }
                    let mut w = word.clone();
                    w.push(g);
                    elements.push(CliffordElement {
                        index: elements.len(),
                        rotation: key,
                        decomposition: w.clone(),
                    });
                    next.push((r, w));
                }
            }
            frontier = next;
        }
        let find = |m: &Matrix3<f64>| {
            let key = rounded(m);
            elements.iter().position(|e| e.rotation == key).expect("Clifford group is closed")
        };
        let compose: Vec<[usize; CLIFFORD_COUNT]> = elements
            .iter()
            .map(|a| {
                let mut row = [0; CLIFFORD_COUNT];
                for (b, slot) in elements.iter().zip(row.iter_mut()) {
                    *slot = find(&(b.rotation_matrix() * a.rotation_matrix()));
                }
                row
            })
            .collect();
        let mut inverse = [0; CLIFFORD_COUNT];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..CLIFFORD_COUNT).find(|&b| compose[a][b] == 0).expect("every element has an inverse");
        }
        Self {
            elements,
            compose,
            inverse,
        }
    }

    /// Shared instance.
    pub fn get() -> &'static Self {
        static TABLE: OnceLock<CliffordTable> = OnceLock::new();
        TABLE.get_or_init(Self::build)
    }

    pub fn compose(&self, first: usize, then: usize) -> usize {
        self.compose[first][then]
    }

    pub fn inverse(&self, a: usize) -> usize {
        self.inverse[a]
    }

    /// Index of the element equal to `gate`.
    pub fn index_of(&self, gate: PhysicalGate) -> usize {
        let key = rounded(&gate.rotation());
        self.elements.iter().position(|e| e.rotation == key).expect("generators are Cliffords")
    }

    /// Mean physical gates per Clifford, identity counted as zero.
    pub fn average_gate_count(&self) -> f64 {
        self.elements.iter().map(|e| e.gate_count()).sum::<usize>() as f64 / CLIFFORD_COUNT as f64
    }
}

/// Mean physical gates per Clifford (44/24).
pub fn gates_per_clifford() -> f64 {
    CliffordTable::get().average_gate_count()
}

/// Noise applied after every π/2 pulse. Components compose as
/// overrotation, then amplitude damping, then dephasing, then depolarizing.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NoiseChannel {
    /// Bloch-vector shrink factor 1 − λ.
    pub depolarizing: f64,
    /// Relative rotation-angle error ε (coherent).
    pub overrotation: f64,
    /// Decay probability γ towards |0⟩.
    pub amplitude_damping: f64,
    /// Transverse shrink 1 − λ_φ.
    pub dephasing: f64,
}

impl NoiseChannel {
    pub fn depolarizing(lambda: f64) -> Result<Self> {
        Self { depolarizing: lambda, ..Default::default() }.validated()
    }

    pub fn overrotation(epsilon: f64) -> Result<Self> {
        Self { overrotation: epsilon, ..Default::default() }.validated()
    }

    pub fn amplitude_dephasing(gamma: f64, lambda_phi: f64) -> Result<Self> {
        Self {
            amplitude_damping: gamma,
            dephasing: lambda_phi,
            ..Default::default()
        }
        .validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    /// Probabilities must lie in [0, 1]; these are exactly the CPTP ranges.
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("depolarizing", self.depolarizing),
            ("amplitude_damping", self.amplitude_damping),
            ("dephasing", self.dephasing),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return Err(invalid(name, format!("must lie in [0, 1], got {v}")));
            }
        }
        if !self.overrotation.is_finite() {
            return Err(invalid("overrotation", "must be finite"));
        }
        Ok(())
    }

    pub fn is_unitary(&self) -> bool {
        self.depolarizing == 0.0 && self.amplitude_damping == 0.0 && self.dephasing == 0.0
    }

    fn apply(&self, r: &mut Vector3<f64>) {
        let g = self.amplitude_damping;
        if g > 0.0 {
            let s = (1.0 - g).sqrt();
            r.x *= s;
            r.y *= s;
            r.z = (1.0 - g) * r.z + g;
        }
        if self.dephasing > 0.0 {
            r.x *= 1.0 - self.dephasing;
            r.y *= 1.0 - self.dephasing;
        }
        if self.depolarizing > 0.0 {
            *r *= 1.0 - self.depolarizing;
        }
    }
}

/// Per-Clifford depolarization parameter for pure depolarizing noise:
/// mean over the table of (1 − λ)^{pulses}.
pub fn analytic_clifford_depolarization(lambda: f64) -> f64 {
    let t = CliffordTable::get();
    t.elements.iter().map(|e| (1.0 - lambda).powi(e.pulse_count() as i32)).sum::<f64>() / CLIFFORD_COUNT as f64
}

/// Precomputed noisy pulses for one channel.
struct NoisyPulses {
    /// [axis][sign]: rotation by ±(π/2)(1 + ε).
    rot: [[Matrix3<f64>; 2]; 2],
    noise: NoiseChannel,
}

impl NoisyPulses {
    fn new(noise: NoiseChannel) -> Self {
        let angle = std::f64::consts::FRAC_PI_2 * (1.0 + noise.overrotation);
        let r = |axis, sign: f64| axis_rotation(axis, sign * angle);
        Self {
            rot: [[r(0, 1.0), r(0, -1.0)], [r(1, 1.0), r(1, -1.0)]],
            noise,
        }
    }

    fn apply_gate(&self, g: PhysicalGate, r: &mut Vector3<f64>) {
        let Some((axis, sign)) = g.pulse() else { return };
        let m = &self.rot[axis][usize::from(sign < 0.0)];
        for _ in 0..g.pulses() {
            *r = m * *r;
            self.noise.apply(r);
        }
    }

    fn apply_clifford(&self, table: &CliffordTable, c: usize, r: &mut Vector3<f64>) {
        for &g in &table.elements[c].decomposition {
            self.apply_gate(g, r);
        }
    }
}

/// Readout scaling of p(|1⟩): signal = offset + contrast·p.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbSpam {
    pub contrast: f64,
    pub offset: f64,
}

impl Default for RbSpam {
    /// Gives A ≈ 0.45, B ≈ 0.35 for depolarizing decay.
    fn default() -> Self {
        Self {
            contrast: 0.7,
            offset: 0.1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RbConfig {
    pub lengths: Vec<usize>,
    pub n_random: usize,
    pub noise: NoiseChannel,
    /// Gate inserted after every random Clifford (interleaved RB).
    pub interleaved: Option<PhysicalGate>,
    pub spam: RbSpam,
    /// Measurement shots per sequence; 0 reads expectation values exactly.
    pub shots: u64,
    pub seed: u64,
}

impl Default for RbConfig {
    fn default() -> Self {
        Self {
            lengths: DEFAULT_LENGTHS.to_vec(),
            n_random: 50,
            noise: NoiseChannel::default(),
            interleaved: None,
            spam: RbSpam::default(),
            shots: 0,
            seed: 0,
        }
    }
}

impl RbConfig {
    fn validate(&self) -> Result<()> {
        self.noise.validate()?;
        if self.n_random == 0 {
            return Err(invalid("n_random", "must be at least 1"));
        }
        if self.lengths.is_empty() || self.lengths.contains(&0) {
            return Err(invalid("lengths", "need nonempty lengths, each ≥ 1"));
        }
        if self.lengths.windows(2).any(|w| w[1] <= w[0]) {
            return Err(invalid("lengths", "must be strictly increasing"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BenchmarkKind {
    Rb,
    InterleavedRb,
    Purity,
}

/// Fit of `a + b·decay^{m − shift}`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct DecayParams {
    pub a: f64,
    pub b: f64,
    pub decay: f64,
    pub a_err: f64,
    pub b_err: f64,
    pub decay_err: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RbOutcome {
    pub kind: BenchmarkKind,
    pub lengths: Vec<usize>,
    /// Mean survival p(|1⟩) signal, or mean purity tr ρ².
    pub mean: Vec<f64>,
    pub stderr: Vec<f64>,
    pub n_random: usize,
    pub lengths_are_defaults: bool,
}

impl RbOutcome {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("m,mean,stderr\n");
        for ((m, v), e) in self.lengths.iter().zip(&self.mean).zip(&self.stderr) {
            out.push_str(&format!("{m},{v},{e}\n"));
        }
        out
    }
}

fn mean_and_stderr(v: &[f64]) -> (f64, f64) {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    if v.len() < 2 {
        return (mean, 0.0);
    }
    let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

fn sample_mean(shots: u64, p: f64, rng: &mut impl Rng) -> f64 {
    if shots == 0 {
        return p;
    }
    let p = p.clamp(0.0, 1.0);
    Binomial::new(shots, p).map(|b| b.sample(rng) as f64 / shots as f64).unwrap_or(p)
}

/// One value per (length, randomization), deterministic per task.
fn run_tasks<F>(cfg: &RbConfig, task: F) -> Vec<Vec<f64>>
where
    F: Fn(usize, &mut rand_chacha::ChaCha8Rng) -> f64 + Sync,
{
    let n = cfg.n_random;
    let indices: Vec<usize> = (0..cfg.lengths.len() * n).collect();
    let run = |&k: &usize| {
        let mut rng = task_rng(cfg.seed, k as u64);
        task(cfg.lengths[k / n], &mut rng)
    };
    #[cfg(feature = "parallel")]
    let flat: Vec<f64> = {
        use rayon::prelude::*;
        indices.par_iter().map(run).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let flat: Vec<f64> = indices.iter().map(run).collect();
    flat.chunks(n).map(<[f64]>::to_vec).collect()
}

fn outcome(cfg: &RbConfig, kind: BenchmarkKind, values: Vec<Vec<f64>>) -> RbOutcome {
    let (mean, stderr) = values.iter().map(|v| mean_and_stderr(v)).unzip();
    RbOutcome {
        kind,
        lengths: cfg.lengths.clone(),
        mean,
        stderr,
        n_random: cfg.n_random,
        lengths_are_defaults: cfg.lengths == DEFAULT_LENGTHS,
    }
}

/// Standard (or interleaved) RB starting from |1⟩ and measuring p(|1⟩)
/// after the recovery Clifford.
pub fn run_rb(cfg: &RbConfig) -> Result<RbOutcome> {
    cfg.validate()?;
    let table = CliffordTable::get();
    let pulses = NoisyPulses::new(cfg.noise);
    let inter = cfg.interleaved.map(|g| (g, table.index_of(g)));
    let values = run_tasks(cfg, |m, rng| {
        let mut r = Vector3::new(0.0, 0.0, -1.0);
        let mut net = 0;
        for _ in 0..m {
            let c = rng.random_range(0..CLIFFORD_COUNT);
            pulses.apply_clifford(table, c, &mut r);
            net = table.compose(net, c);
            if let Some((g, gi)) = inter {
                pulses.apply_gate(g, &mut r);
                net = table.compose(net, gi);
            }
        }
        pulses.apply_clifford(table, table.inverse(net), &mut r);
        let p1 = 0.5 * (1.0 - r.z);
        sample_mean(cfg.shots, cfg.spam.offset + cfg.spam.contrast * p1, rng)
    });
    let kind = if inter.is_some() { BenchmarkKind::InterleavedRb } else { BenchmarkKind::Rb };
    Ok(outcome(cfg, kind, values))
}

/// Purity benchmarking: tomography replaces the recovery gate and the
/// purity tr ρ² = (1 + |r|²)/2 is recorded. With shots, each Pauli
/// expectation is estimated from that many binomial samples.
pub fn run_pb(cfg: &RbConfig) -> Result<RbOutcome> {
    cfg.validate()?;
    if cfg.interleaved.is_some() {
        return Err(invalid("interleaved", "purity benchmarking takes no interleaved gate"));
    }
    let table = CliffordTable::get();
    let pulses = NoisyPulses::new(cfg.noise);
    let values = run_tasks(cfg, |m, rng| {
        let mut r = Vector3::new(0.0, 0.0, -1.0);
        for _ in 0..m {
            let c = rng.random_range(0..CLIFFORD_COUNT);
            pulses.apply_clifford(table, c, &mut r);
        }
        let est = r.map(|x| 2.0 * sample_mean(cfg.shots, 0.5 * (1.0 + x), rng) - 1.0);
        0.5 * (1.0 + est.norm_squared())
    });
    Ok(outcome(cfg, BenchmarkKind::Purity, values))
}

/// Fits `a + b·decay^{m − shift}` with decay ∈ [0, 1].
fn fit_power_decay(lengths: &[usize], values: &[f64], shift: f64) -> Result<DecayParams> {
    if lengths.len() < 4 || lengths.len() != values.len() {
        return Err(invalid("lengths", "need at least 4 sequence lengths with one value each"));
    }
    let x: Vec<f64> = lengths.iter().map(|&m| m as f64 - shift).collect();
    let (lo, hi) = values.iter().fold((f64::MAX, f64::MIN), |(l, h), &v| (l.min(v), h.max(v)));
    if hi - lo <= 1e-12 * hi.abs().max(1.0) {
        // flat curve: no decay to resolve
        return Ok(DecayParams {
            a: values.iter().sum::<f64>() / values.len() as f64,
            b: 0.0,
            decay: 1.0,
            a_err: 0.0,
            b_err: 0.0,
            decay_err: 0.0,
        });
    }
    // decay grid dense near 1, linear (a, b) solved per candidate
    let mut best = (1.0, 0.0, 0.0, f64::INFINITY);
    for k in 0..=400 {
        let q = 1.0 - 10f64.powf(-0.1 - 7.9 * k as f64 / 400.0);
        let basis: Vec<f64> = x.iter().map(|&m| q.powf(m)).collect();
        let n = x.len() as f64;
        let (sb, sy) = (basis.iter().sum::<f64>(), values.iter().sum::<f64>());
        let sbb = basis.iter().map(|b| b * b).sum::<f64>();
        let sby = basis.iter().zip(values).map(|(b, y)| b * y).sum::<f64>();
        let det = n * sbb - sb * sb;
        if det.abs() < 1e-300 {
            continue;
        }
        let b = (n * sby - sb * sy) / det;
        let a = (sy - b * sb) / n;
        let sse: f64 = basis.iter().zip(values).map(|(bb, y)| (a + b * bb - y).powi(2)).sum();
        if sse < best.3 {
            best = (q, a, b, sse);
        }
    }
    let residual = |p: &[f64]| -> Result<Vec<f64>> {
        Ok(x.iter().zip(values).map(|(&m, &y)| p[0] + p[1] * p[2].powf(m) - y).collect())
    };
    let problem = FitProblem::new(residual, vec![best.1, best.2, best.0])
        .with_bounds(vec![f64::NEG_INFINITY, f64::NEG_INFINITY, 0.0], vec![f64::INFINITY, f64::INFINITY, 1.0])
        .with_tolerances(Tolerances {
            gradient: 1e-15,
            step: 1e-15,
            cost: 1e-20,
        })
        .with_max_iterations(300);
    let fit = nlls_fit(&problem)?.require_converged()?;
    let decay = fit.params[2];
    if !(decay > 0.0 && decay <= 1.0) {
        return Err(Error::FitRejected(format!("decay parameter {decay} outside (0, 1]")));
    }
    Ok(DecayParams {
        a: fit.params[0],
        b: fit.params[1],
        decay,
        a_err: fit.stderr[0],
        b_err: fit.stderr[1],
        decay_err: fit.stderr[2],
    })
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct RbRates {
    pub fit: DecayParams,
    /// (1 − p)/2
    pub r_cliff: f64,
    pub r_cliff_err: f64,
    /// 1 − r_cliff / gates per Clifford
    pub f_gate_avg: f64,
}

/// Fits A + B·p^m.
pub fn fit_rb(outcome: &RbOutcome) -> Result<RbRates> {
    let fit = fit_power_decay(&outcome.lengths, &outcome.mean, 0.0)?;
    let r_cliff = clifford_error(fit.decay);
    Ok(RbRates {
        fit,
        r_cliff,
        r_cliff_err: 0.5 * fit.decay_err,
        f_gate_avg: gate_fidelity(r_cliff),
    })
}

/// r = (1 − p)/2 for a single qubit.
pub fn clifford_error(p: f64) -> f64 {
    0.5 * (1.0 - p)
}

/// Average physical-gate fidelity 1 − r_cliff / (gates per Clifford).
pub fn gate_fidelity(r_cliff: f64) -> f64 {
    1.0 - r_cliff / gates_per_clifford()
}

/// r_gate = (1 − p_gate/p)/2 from interleaved and reference decays.
pub fn interleaved_gate_error(p_interleaved: f64, p_reference: f64) -> Result<f64> {
    if !(p_reference > 0.0) {
        return Err(invalid("p_reference", "must be positive"));
    }
    check_nonnegative("p_interleaved", p_interleaved)?;
    Ok(0.5 * (1.0 - p_interleaved / p_reference))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct PbRates {
    pub fit: DecayParams,
    /// (1 − √u)/2
    pub r_dec_cliff: f64,
    pub r_dec_gate: f64,
    /// Fidelity bound 1 − r_dec_gate.
    pub f_gate_bound: f64,
}

/// Fits A' + B'·u^{m−1}.
pub fn fit_pb(outcome: &RbOutcome) -> Result<PbRates> {
    let fit = fit_power_decay(&outcome.lengths, &outcome.mean, 1.0)?;
    Ok(pb_rates_from_unitarity(fit))
}

fn pb_rates_from_unitarity(fit: DecayParams) -> PbRates {
    let r_dec_cliff = 0.5 * (1.0 - fit.decay.sqrt());
    let r_dec_gate = r_dec_cliff / gates_per_clifford();
    PbRates {
        fit,
        r_dec_cliff,
        r_dec_gate,
        f_gate_bound: 1.0 - r_dec_gate,
    }
}

/// Decoherence-limited rates for a given unitarity u.
pub fn decoherence_rates(u: f64) -> Result<PbRates> {
    if !(u > 0.0 && u <= 1.0) {
        return Err(Error::FitRejected(format!("unitarity {u} outside (0, 1]")));
    }
    Ok(pb_rates_from_unitarity(DecayParams {
        a: f64::NAN,
        b: f64::NAN,
        decay: u,
        a_err: f64::NAN,
        b_err: f64::NAN,
        decay_err: f64::NAN,
    }))
}
