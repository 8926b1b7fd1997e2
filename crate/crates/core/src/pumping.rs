//! Three-level rate model of the |2⟩→|0⟩ lifetime measurement.
//!
//! A saturating drive on the 1–2 transition equalizes p1 and p2 while p0 is
//! monitored. With qubit rates Γ↓ = p0_th·Γ01, Γ↑ = p1_th·Γ01, direct decay
//! Γ02 and an incoherent drive rate Ω12:
//!
//! ```text
//! dp0/dt = −Γ↑ p0 + Γ↓ p1 + Γ02 p2
//! dp1/dt =  Γ↑ p0 − Γ↓ p1 + Ω12 (p2 − p1)
//! dp2/dt = −Γ02 p2 − Ω12 (p2 − p1)
//! ```
//!
//! Once p1 ≈ p2, p0 relaxes at Γ_eff = Γ↑ + (Γ↓ + Γ02)/2, which inverts to
//! `T1^02 = T1^01 T_eff / (2 T1^01 − (2 − p0_th) T_eff)`.
//!
//! Rates are in 1/ms except Ω12 (1/µs); trace times are in µs.

use serde::Serialize;

use crate::error::{check_nonnegative, check_positive, invalid, Error, Result};

/// Drive-to-relaxation ratio above which the drive counts as saturating.
pub const SATURATION_RATIO: f64 = 50.0;
/// RK4 stability limit on h·|λ_max|, with a small margin.
const RK4_STABILITY: f64 = 2.5;

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct QutritRates {
    /// Γ01 = Γ↓ + Γ↑, 1/ms
    pub gamma_01: f64,
    pub p0_th: f64,
    pub p1_th: f64,
    /// Direct |2⟩→|0⟩ rate, 1/ms
    pub gamma_02: f64,
    /// Incoherent 1↔2 drive rate, 1/µs
    pub omega_12: f64,
}

impl QutritRates {
    /// Two-level thermal populations: p1_th = 1 − p0_th.
    pub fn new(t1_01_ms: f64, p0_th: f64, gamma_02: f64, omega_12: f64) -> Result<Self> {
        check_positive("t1_01_ms", t1_01_ms)?;
        let rates = Self {
            gamma_01: 1.0 / t1_01_ms,
            p0_th,
            p1_th: 1.0 - p0_th,
            gamma_02,
            omega_12,
        };
        rates.validate()?;
        Ok(rates)
    }

    pub fn validate(&self) -> Result<()> {
        check_nonnegative("gamma_01", self.gamma_01)?;
        check_nonnegative("gamma_02", self.gamma_02)?;
        check_nonnegative("omega_12", self.omega_12)?;
        for (name, p) in [("p0_th", self.p0_th), ("p1_th", self.p1_th)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(invalid(name, format!("must lie in [0, 1], got {p}")));
            }
        }
        if (self.p0_th + self.p1_th - 1.0).abs() > 1e-12 {
            return Err(invalid("p1_th", "p0_th + p1_th must equal 1"));
        }
        Ok(())
    }

    pub fn gamma_up(&self) -> f64 {
        self.p1_th * self.gamma_01
    }

    pub fn gamma_down(&self) -> f64 {
        self.p0_th * self.gamma_01
    }

    pub fn t1_01_ms(&self) -> f64 {
        1.0 / self.gamma_01
    }

    /// Adds a parity-violating path (e.g. thermal 2→3 excitation followed by
    /// fast 3→0 decay) into the effective Γ02.
    pub fn with_extra_gamma_02(self, extra: f64) -> Self {
        Self {
            gamma_02: self.gamma_02 + extra,
            ..self
        }
    }

    /// Ω12 over the largest relaxation rate.
    pub fn drive_ratio(&self) -> f64 {
        let fastest = self.gamma_01.max(self.gamma_02);
        if fastest == 0.0 {
            f64::INFINITY
        } else {
            self.omega_12 * 1e3 / fastest
        }
    }

    pub fn is_saturating(&self) -> bool {
        self.drive_ratio() > SATURATION_RATIO
    }

    /// Generator M of dp/dt = M p, in 1/µs.
    pub fn generator(&self) -> [[f64; 3]; 3] {
        let up = self.gamma_up() * 1e-3;
        let down = self.gamma_down() * 1e-3;
        let g02 = self.gamma_02 * 1e-3;
        let w = self.omega_12;
        [
            [-up, down, g02],
            [up, -down - w, w],
            [0.0, w, -g02 - w],
        ]
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct PopulationTrace {
    /// µs
    pub times: Vec<f64>,
    pub p0: Vec<f64>,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
}

impl PopulationTrace {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn at(&self, k: usize) -> [f64; 3] {
        [self.p0[k], self.p1[k], self.p2[k]]
    }

    /// CSV `t_us,p0,p1,p2`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("t_us,p0,p1,p2\n");
        for k in 0..self.len() {
            out.push_str(&format!("{},{},{},{}\n", self.times[k], self.p0[k], self.p1[k], self.p2[k]));
        }
        out
    }
}

fn apply(m: &[[f64; 3]; 3], p: &[f64; 3]) -> [f64; 3] {
    let mut out = [0.0; 3];
    for (r, row) in m.iter().enumerate() {
        out[r] = row[0] * p[0] + row[1] * p[1] + row[2] * p[2];
    }
    out
}

fn axpy(p: &[f64; 3], h: f64, k: &[f64; 3]) -> [f64; 3] {
    [p[0] + h * k[0], p[1] + h * k[1], p[2] + h * k[2]]
}

fn rk4_step(m: &[[f64; 3]; 3], p: &[f64; 3], h: f64) -> [f64; 3] {
    let k1 = apply(m, p);
    let k2 = apply(m, &axpy(p, 0.5 * h, &k1));
    let k3 = apply(m, &axpy(p, 0.5 * h, &k2));
    let k4 = apply(m, &axpy(p, h, &k3));
    let mut out = *p;
    for i in 0..3 {
        out[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    }
    out
}

/// Integrates the rate equations from `initial` at t = 0 and samples at
/// every time in `t_grid` (µs, nondecreasing, ≥ 0).
///
/// Fixed-step RK4 with h = min(1/(20 Ω12), span/2000), shortened to land on
/// each grid point. RK4 preserves the linear invariant p0 + p1 + p2.
pub fn simulate_qutrit(rates: &QutritRates, initial: [f64; 3], t_grid: &[f64]) -> Result<PopulationTrace> {
    rates.validate()?;
    if initial.iter().any(|p| !(0.0..=1.0).contains(p)) || (initial.iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        return Err(invalid("initial", format!("populations {initial:?} must be in [0,1] and sum to 1")));
    }
    if t_grid.is_empty() {
        return Err(invalid("t_grid", "empty"));
    }
    if t_grid[0] < 0.0 || t_grid.windows(2).any(|w| !(w[1] >= w[0])) || t_grid.iter().any(|t| !t.is_finite()) {
        return Err(invalid("t_grid", "times must be finite, nonnegative and nondecreasing"));
    }
    let span = *t_grid.last().unwrap();
    let m = rates.generator();
    let mut h = if span > 0.0 { span / 2000.0 } else { 1.0 };
    if rates.omega_12 > 0.0 {
        h = h.min(1.0 / (20.0 * rates.omega_12));
    }
    let lambda_max = (0..3).map(|i| 2.0 * m[i][i].abs()).fold(0.0_f64, f64::max);
    if h * lambda_max > RK4_STABILITY {
        return Err(Error::StepFailure { ratio: h * lambda_max });
    }

    let mut trace = PopulationTrace {
        times: Vec::with_capacity(t_grid.len()),
        p0: Vec::with_capacity(t_grid.len()),
        p1: Vec::with_capacity(t_grid.len()),
        p2: Vec::with_capacity(t_grid.len()),
    };
    let mut p = initial;
    let mut t = 0.0;
    for &target in t_grid {
        let dt = target - t;
        if dt > 0.0 {
            let n = (dt / h).ceil().max(1.0) as usize;
            let step = dt / n as f64;
            for _ in 0..n {
                p = rk4_step(&m, &p, step);
            }
            t = target;
        }
        trace.times.push(target);
        trace.p0.push(p[0]);
        trace.p1.push(p[1]);
        trace.p2.push(p[2]);
    }
    Ok(trace)
}

/// Γ_eff = Γ↑ + (Γ↓ + Γ02)/2, 1/ms.
pub fn effective_rate(rates: &QutritRates) -> f64 {
    rates.gamma_up() + 0.5 * (rates.gamma_down() + rates.gamma_02)
}

/// Steady-state p0 of the saturated (p1 = p2) system.
pub fn p0_saturation(rates: &QutritRates) -> f64 {
    let a = 0.5 * (rates.gamma_down() + rates.gamma_02);
    let total = a + rates.gamma_up();
    if total == 0.0 {
        rates.p0_th
    } else {
        a / total
    }
}

/// Result of inverting a measured saturation time constant.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
#[serde(tag = "kind", content = "t1_02_ms", rename_all = "snake_case")]
pub enum T102 {
    /// T1^02 in ms.
    Finite(f64),
    /// T_eff equals the Γ02 = 0 value: no direct decay resolved.
    Unbounded,
    /// T_eff longer than any Γ02 ≥ 0 allows; the measurement cannot resolve
    /// T1^02.
    BeyondPrecision,
}

impl T102 {
    pub fn finite(self) -> Option<f64> {
        match self {
            T102::Finite(t) => Some(t),
            _ => None,
        }
    }
}

/// T1^02 = T1^01 T_eff / (2 T1^01 − (2 − p0_th) T_eff).
pub fn invert_t102(t_eff_ms: f64, t1_01_ms: f64, p0_th: f64) -> Result<T102> {
    check_positive("t_eff_ms", t_eff_ms)?;
    check_positive("t1_01_ms", t1_01_ms)?;
    if !(0.0..=1.0).contains(&p0_th) {
        return Err(invalid("p0_th", format!("must lie in [0, 1], got {p0_th}")));
    }
    let denom = 2.0 * t1_01_ms - (2.0 - p0_th) * t_eff_ms;
    if denom.abs() <= 1e-12 * 2.0 * t1_01_ms {
        Ok(T102::Unbounded)
    } else if denom < 0.0 {
        Ok(T102::BeyondPrecision)
    } else {
        Ok(T102::Finite(t1_01_ms * t_eff_ms / denom))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct CoolingPoint {
    pub t1_02_ms: f64,
    pub p0_saturation: f64,
}

/// Saturation p0 versus T1^02 and the window where it is indistinguishable
/// from p0_th.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CoolingAnalysis {
    pub t1_01_ms: f64,
    pub p0_th: f64,
    pub precision: f64,
    /// Ascending in T1^02.
    pub curve: Vec<CoolingPoint>,
    /// p0 saturation with no direct decay (T1^02 → ∞).
    pub p0_saturation_unbounded: f64,
    /// T1^02 range (ms) inside which |p0_sat − p0_th| < precision. The upper
    /// end is infinite when even T1^02 = ∞ stays within precision.
    pub blind_window_ms: (f64, f64),
    /// T1^01/T1^02 at which p0_sat = p0_th exactly.
    pub blind_ratio_center: f64,
}

impl CoolingAnalysis {
    pub fn in_blind_window(&self, t1_02_ms: f64) -> bool {
        t1_02_ms >= self.blind_window_ms.0 && t1_02_ms <= self.blind_window_ms.1
    }
}

/// Γ02 (1/ms) that makes the saturated p0 equal `p`.
fn gamma_02_for_saturation(rates: &QutritRates, p: f64) -> f64 {
    2.0 * rates.gamma_up() * p / (1.0 - p) - rates.gamma_down()
}

pub fn cooling_analysis(t1_01_ms: f64, p0_th: f64, precision: f64) -> Result<CoolingAnalysis> {
    check_positive("precision", precision)?;
    let base = QutritRates::new(t1_01_ms, p0_th, 0.0, 0.0)?;
    if p0_th + precision >= 1.0 {
        return Err(invalid("p0_th", "p0_th + precision must stay below 1"));
    }
    let to_t1 = |g: f64| if g > 0.0 { 1.0 / g } else { f64::INFINITY };
    let hi = to_t1(gamma_02_for_saturation(&base, p0_th + precision));
    let lo_p = (p0_th - precision).max(0.0);
    let lo = to_t1(gamma_02_for_saturation(&base, lo_p));

    let points = 121;
    let curve = (0..points)
        .map(|k| {
            let t1_02 = t1_01_ms * 10f64.powf(-2.0 + 4.0 * k as f64 / (points - 1) as f64);
            CoolingPoint {
                t1_02_ms: t1_02,
                p0_saturation: p0_saturation(&QutritRates {
                    gamma_02: 1.0 / t1_02,
                    ..base
                }),
            }
        })
        .collect();

    Ok(CoolingAnalysis {
        t1_01_ms,
        p0_th,
        precision,
        curve,
        p0_saturation_unbounded: p0_saturation(&base),
        blind_window_ms: (hi, lo),
        blind_ratio_center: t1_01_ms * gamma_02_for_saturation(&base, p0_th),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilibrium_is_fixed_point_without_drive() {
        let rates = QutritRates::new(1.0, 0.58, 0.0, 0.0).unwrap();
        let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 100.0).collect();
        let tr = simulate_qutrit(&rates, [0.58, 0.42, 0.0], &grid).unwrap();
        for k in 0..tr.len() {
            assert!((tr.p0[k] - 0.58).abs() < 1e-12);
            assert!(tr.p2[k].abs() < 1e-15);
        }
    }

    #[test]
    fn worked_effective_rate() {
        let rates = QutritRates::new(1.0, 0.58, 2.0, 1.0).unwrap();
        assert!((effective_rate(&rates) - 1.71).abs() < 1e-12);
    }

    #[test]
    fn no_direct_decay_limit() {
        let rates = QutritRates::new(1.3, 0.58, 0.0, 1.0).unwrap();
        let t_eff = 1.0 / effective_rate(&rates);
        assert!((t_eff - 2.0 * 1.3 / (2.0 - 0.58)).abs() < 1e-12);
        assert_eq!(invert_t102(t_eff, 1.3, 0.58).unwrap(), T102::Unbounded);
        assert_eq!(invert_t102(1.5 * t_eff, 1.3, 0.58).unwrap(), T102::BeyondPrecision);
    }

    #[test]
    fn figure_trace_constants() {
        let a = invert_t102(0.338, 1.0, 0.58).unwrap().finite().unwrap();
        let b = invert_t102(0.651, 1.0, 0.58).unwrap().finite().unwrap();
        assert!((a - 0.338 / (2.0 - 1.42 * 0.338)).abs() < 1e-12);
        assert!((a - 0.222).abs() < 1e-3, "{a}");
        assert!((b - 0.605).abs() < 1e-3, "{b}");
    }

    #[test]
    fn rejects_bad_initial_state_and_grid() {
        let rates = QutritRates::new(1.0, 0.58, 1.0, 1.0).unwrap();
        assert!(simulate_qutrit(&rates, [0.5, 0.4, 0.0], &[0.0, 1.0]).is_err());
        assert!(simulate_qutrit(&rates, [1.0, 0.0, 0.0], &[2.0, 1.0]).is_err());
        assert!(QutritRates::new(1.0, 1.2, 0.0, 0.0).is_err());
    }

    #[test]
    fn unstable_step_is_reported() {
        // no drive, so h = span/2000 = 5 µs against Γ02 = 1/µs
        let rates = QutritRates::new(1.0, 0.58, 1000.0, 0.0).unwrap();
        let err = simulate_qutrit(&rates, [0.0, 0.0, 1.0], &[0.0, 10_000.0]).unwrap_err();
        assert!(matches!(err, Error::StepFailure { ratio } if ratio > 2.5));
    }

    #[test]
    fn heating_without_direct_decay() {
        let c = cooling_analysis(1.0, 0.58, 0.005).unwrap();
        assert!(c.p0_saturation_unbounded < 0.58);
        assert!(c.curve.windows(2).all(|w| w[1].p0_saturation < w[0].p0_saturation));
        assert!(c.curve[0].p0_saturation > 0.95);
        assert!(c.blind_window_ms.0 < c.blind_window_ms.1);
    }
}
