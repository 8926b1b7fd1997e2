//! Single-shot readout analysis: double-Gaussian histogram fits, dispersive
//! shift from blob geometry, qubit temperature, and correction for decay
//! induced by the readout pulse itself.

use std::f64::consts::PI;

use nalgebra::{Matrix2, SymmetricEigen, Vector2};
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_nonnegative, check_positive, invalid, Error, Result};
use crate::fitting::{nlls_fit, FitProblem};
use crate::rng::task_rng;
use crate::units::ghz_to_kelvin;

/// Minority population below which a blob counts as absent.
const MIN_BLOB_FRACTION: f64 = 0.01;
/// Minimum blob separation, in units of the fitted width σ, for a fit
/// without calibrated centers to count as two blobs.
const MIN_SEPARATION: f64 = 1.5;

/// Shot counts binned over the IQ plane.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct IQHistogram {
    pub i_edges: Vec<f64>,
    pub q_edges: Vec<f64>,
    /// Row-major: `counts[a * q_bins + b]` for I bin `a`, Q bin `b`.
    pub counts: Vec<u64>,
    pub total: u64,
}

impl IQHistogram {
    /// Bins `shots` on a `bins`×`bins` grid spanning the data.
    pub fn from_shots(shots: &[(f64, f64)], bins: usize) -> Result<Self> {
        if shots.is_empty() {
            return Err(invalid("shots", "empty"));
        }
        let (mut imin, mut imax, mut qmin, mut qmax) = (f64::MAX, f64::MIN, f64::MAX, f64::MIN);
        for &(i, q) in shots {
            check_finite("shot", i)?;
            check_finite("shot", q)?;
            imin = imin.min(i);
            imax = imax.max(i);
            qmin = qmin.min(q);
            qmax = qmax.max(q);
        }
        let pad = |lo: f64, hi: f64| {
            let w = (hi - lo).max(1e-12) * 1e-6;
            (lo - w, hi + w)
        };
        Self::with_range(shots, bins, pad(imin, imax), pad(qmin, qmax))
    }

    /// Bins shots on a fixed grid; shots outside it are dropped.
    pub fn with_range(shots: &[(f64, f64)], bins: usize, i_range: (f64, f64), q_range: (f64, f64)) -> Result<Self> {
        if bins < 4 {
            return Err(invalid("bins", "need at least 4 bins per axis"));
        }
        if !(i_range.1 > i_range.0 && q_range.1 > q_range.0) {
            return Err(invalid("range", "empty histogram range"));
        }
        let edges = |(lo, hi): (f64, f64)| -> Vec<f64> {
            (0..=bins).map(|k| lo + (hi - lo) * k as f64 / bins as f64).collect()
        };
        let index = |v: f64, (lo, hi): (f64, f64)| -> Option<usize> {
            let k = ((v - lo) / (hi - lo) * bins as f64).floor();
            (k >= 0.0 && k < bins as f64).then_some(k as usize)
        };
        let mut counts = vec![0u64; bins * bins];
        let mut total = 0;
        for &(i, q) in shots {
            if let (Some(a), Some(b)) = (index(i, i_range), index(q, q_range)) {
                counts[a * bins + b] += 1;
                total += 1;
            }
        }
        Ok(Self {
            i_edges: edges(i_range),
            q_edges: edges(q_range),
            counts,
            total,
        })
    }

    pub fn i_bins(&self) -> usize {
        self.i_edges.len() - 1
    }

    pub fn q_bins(&self) -> usize {
        self.q_edges.len() - 1
    }

    fn centers(&self) -> impl Iterator<Item = (Vector2<f64>, f64)> + '_ {
        let nq = self.q_bins();
        self.counts.iter().enumerate().filter(|(_, &c)| c > 0).map(move |(k, &c)| {
            let (a, b) = (k / nq, k % nq);
            let i = 0.5 * (self.i_edges[a] + self.i_edges[a + 1]);
            let q = 0.5 * (self.q_edges[b] + self.q_edges[b + 1]);
            (Vector2::new(i, q), c as f64)
        })
    }
}

/// Known blob centers, e.g. from a calibration with the qubit prepared.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ReadoutInit {
    pub center0: (f64, f64),
    pub center1: (f64, f64),
}

/// Result of the two-Gaussian fit A0 e^{−|x−x0|²/σ²} + A1 e^{−|x−x1|²/σ²}.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReadoutFit {
    pub center0: (f64, f64),
    pub center1: (f64, f64),
    /// Shared width in the e^{−d²/σ²} convention (σ = √2 × standard deviation).
    pub sigma: f64,
    pub a0: f64,
    pub a1: f64,
    pub p0: f64,
    pub p1: f64,
    /// Angle between the two blob centers seen from the IQ origin, rad.
    pub blob_angle: f64,
    /// Set when one blob has (almost) no population, so its center and the
    /// angle only echo the supplied initial guess.
    pub single_blob: bool,
    pub p0_stderr: f64,
}

/// Weighted 1-D two-means split; returns (centers, weights, spread).
fn two_means(xs: &[(f64, f64)]) -> ((f64, f64), (f64, f64), f64) {
    let total: f64 = xs.iter().map(|p| p.1).sum();
    let mean = xs.iter().map(|p| p.0 * p.1).sum::<f64>() / total;
    let (lo, hi) = xs.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.0), h.max(p.0)));
    let (mut c0, mut c1) = (0.5 * (lo + mean), 0.5 * (hi + mean));
    let mut w = (0.0, 0.0);
    let mut spread = 0.0;
    for _ in 0..100 {
        let (mut s0, mut s1, mut w0, mut w1, mut var) = (0.0, 0.0, 0.0, 0.0, 0.0);
        let split = 0.5 * (c0 + c1);
        for &(x, c) in xs {
            if x < split {
                s0 += x * c;
                w0 += c;
                var += c * (x - c0) * (x - c0);
            } else {
                s1 += x * c;
                w1 += c;
                var += c * (x - c1) * (x - c1);
            }
        }
        let (n0, n1) = (if w0 > 0.0 { s0 / w0 } else { c0 }, if w1 > 0.0 { s1 / w1 } else { c1 });
        w = (w0, w1);
        spread = (var / total).sqrt();
        if (n0 - c0).abs() + (n1 - c1).abs() < 1e-12 * (hi - lo) {
            break;
        }
        c0 = n0;
        c1 = n1;
    }
    ((c0, c1), w, spread)
}

fn angle_between(a: (f64, f64), b: (f64, f64)) -> f64 {
    let cross = a.0 * b.1 - a.1 * b.0;
    let dot = a.0 * b.0 + a.1 * b.1;
    cross.atan2(dot).abs()
}

/// Fits the histogram's projection onto the inter-blob axis.
///
/// Without `init` the axis is the principal axis of the shot cloud and the
/// blob with more population is labeled |0⟩ (thermal state, p0 > ½). Data
/// without two resolvable blobs are rejected as non-identifiable. With `init`
/// the axis and labels come from the given centers, and a vanishing blob is
/// flagged through [`ReadoutFit::single_blob`] instead.
pub fn fit_double_gaussian(hist: &IQHistogram, init: Option<&ReadoutInit>) -> Result<ReadoutFit> {
    if hist.total < 1000 {
        return Err(invalid("hist", format!("need at least 1000 shots, got {}", hist.total)));
    }
    let total = hist.total as f64;
    let mut mean = Vector2::zeros();
    for (x, c) in hist.centers() {
        mean += x * c;
    }
    mean /= total;

    let axis = match init {
        Some(init) => {
            let d = Vector2::new(init.center1.0 - init.center0.0, init.center1.1 - init.center0.1);
            if d.norm() == 0.0 {
                return Err(invalid("init", "blob centers coincide"));
            }
            d.normalize()
        }
        None => {
            let mut cov = Matrix2::zeros();
            for (x, c) in hist.centers() {
                let d = x - mean;
                cov += d * d.transpose() * c;
            }
            let eig = SymmetricEigen::new(cov / total);
            let k = eig.eigenvalues.imax();
            eig.eigenvectors.column(k).into_owned()
        }
    };
    let normal = Vector2::new(-axis.y, axis.x);

    // 1-D histogram along the axis
    let bins = hist.i_bins().max(hist.q_bins());
    let proj: Vec<(f64, f64)> = hist.centers().map(|(x, c)| ((x - mean).dot(&axis), c)).collect();
    let (lo, hi) = proj.iter().fold((f64::MAX, f64::MIN), |(l, h), p| (l.min(p.0), h.max(p.0)));
    let width = (hi - lo).max(1e-12) / bins as f64;
    let mut line = vec![0.0; bins];
    for &(x, c) in &proj {
        let k = (((x - lo) / width).floor() as usize).min(bins - 1);
        line[k] += c;
    }
    let xs: Vec<f64> = (0..bins).map(|k| lo + (k as f64 + 0.5) * width).collect();
    let perp = hist.centers().map(|(x, c)| (x - mean).dot(&normal) * c).sum::<f64>() / total;

    let (x0, x1, sigma0, w0, w1) = match init {
        Some(init) => {
            let p = |c: (f64, f64)| (Vector2::new(c.0, c.1) - mean).dot(&axis);
            let (x0, x1) = (p(init.center0), p(init.center1));
            let mid = 0.5 * (x0 + x1);
            let (mut w0, mut w1, mut var) = (0.0, 0.0, 0.0);
            for &(x, c) in &proj {
                let near = if (x < mid) == (x0 < mid) { x0 } else { x1 };
                if near == x0 {
                    w0 += c;
                } else {
                    w1 += c;
                }
                var += c * (x - near) * (x - near);
            }
            (x0, x1, (2.0 * var / total).sqrt(), w0, w1)
        }
        None => {
            let ((c0, c1), (w0, w1), spread) = two_means(&proj);
            (c0, c1, std::f64::consts::SQRT_2 * spread, w0, w1)
        }
    };
    let sigma0 = sigma0.max(width);
    let amp = |w: f64| w * width / (sigma0 * PI.sqrt());

    let model = move |p: &[f64], x: f64| {
        let g = |a: f64, c: f64| a * (-((x - c) / p[4]).powi(2)).exp();
        g(p[0], p[1]) + g(p[2], p[3])
    };
    // Calibrated centers stay fixed; otherwise an empty blob drifts onto the other one.
    let fixed = init.map(|_| (x0, x1));
    let expand = move |q: &[f64]| -> [f64; 5] {
        match fixed {
            Some((c0, c1)) => [q[0], c0, q[1], c1, q[2]],
            None => [q[0], q[1], q[2], q[3], q[4]],
        }
    };
    let residual = |q: &[f64]| -> Result<Vec<f64>> {
        let p = expand(q);
        Ok(xs.iter().zip(&line).map(|(&x, &y)| model(&p, x) - y).collect())
    };
    let s_min = 1e-3 * width;
    let (start, lower) = match fixed {
        Some(_) => (vec![amp(w0), amp(w1), sigma0], vec![0.0, 0.0, s_min]),
        None => (
            vec![amp(w0), x0, amp(w1), x1, sigma0],
            vec![0.0, f64::NEG_INFINITY, 0.0, f64::NEG_INFINITY, s_min],
        ),
    };
    let n_par = start.len();
    let problem = FitProblem::new(residual, start)
        .with_bounds(lower, vec![f64::INFINITY; n_par])
        .with_max_iterations(300);
    let fit = nlls_fit(&problem)?.require_converged()?;
    let [mut a0, mut x0, mut a1, mut x1, sigma] = expand(&fit.params);
    let (i0, i1) = if fixed.is_some() { (0, 1) } else { (0, 2) };
    let (mut s_a0, mut s_a1) = (fit.stderr[i0], fit.stderr[i1]);

    let minority = a0.min(a1) / (a0 + a1);
    let single_blob = minority < MIN_BLOB_FRACTION;
    if init.is_none() {
        let sum = a0 + a1;
        let minority_err = ((a1 * s_a0).powi(2) + (a0 * s_a1).powi(2)).sqrt() / (sum * sum);
        let separation = (x1 - x0).abs() / sigma;
        if single_blob || separation < MIN_SEPARATION || minority < 2.0 * minority_err {
            return Err(Error::NonIdentifiable(format!(
                "no second blob: separation {separation:.3} σ, minority fraction {minority:.4} ± {minority_err:.4}"
            )));
        }
        if a1 > a0 {
            std::mem::swap(&mut a0, &mut a1);
            std::mem::swap(&mut x0, &mut x1);
            std::mem::swap(&mut s_a0, &mut s_a1);
        }
    }
    let to_iq = |x: f64| {
        let v = mean + axis * x + normal * perp;
        (v.x, v.y)
    };
    let (center0, center1) = match (init, single_blob) {
        (Some(init), true) if a1 < a0 => (to_iq(x0), init.center1),
        (Some(init), true) => (init.center0, to_iq(x1)),
        _ => (to_iq(x0), to_iq(x1)),
    };
    let sum = a0 + a1;
    let p0 = a0 / sum;
    // ∂p0/∂a0 = a1/sum², ∂p0/∂a1 = −a0/sum², covariance ignored
    let p0_stderr = ((a1 * s_a0).powi(2) + (a0 * s_a1).powi(2)).sqrt() / (sum * sum);
    Ok(ReadoutFit {
        center0,
        center1,
        sigma,
        a0,
        a1,
        p0,
        p1: 1.0 - p0,
        blob_angle: angle_between(center0, center1),
        single_blob,
        p0_stderr,
    })
}

/// χ01/2π (MHz) from the blob angle, with χ/κ = tan(angle/2)/2.
pub fn dispersive_shift_from_angle(blob_angle: f64, kappa: f64) -> Result<f64> {
    check_nonnegative("kappa", kappa)?;
    if !(0.0..PI).contains(&blob_angle) {
        return Err(invalid("blob_angle", format!("must lie in [0, π), got {blob_angle}")));
    }
    Ok(kappa * 0.5 * (0.5 * blob_angle).tan())
}

/// Inverse of [`dispersive_shift_from_angle`].
pub fn angle_from_dispersive_shift(chi01: f64, kappa: f64) -> Result<f64> {
    check_nonnegative("chi01", chi01)?;
    check_positive("kappa", kappa)?;
    Ok(2.0 * (2.0 * chi01 / kappa).atan())
}

/// Effective temperature (K) of a two-level Boltzmann distribution with
/// ground population `p0` and splitting `f01_ghz`.
pub fn temperature_from_populations(p0: f64, f01_ghz: f64) -> Result<f64> {
    check_positive("f01_ghz", f01_ghz)?;
    if !(p0 > 0.5) {
        return Err(Error::PopulationInversion(p0));
    }
    if p0 >= 1.0 {
        return Ok(0.0);
    }
    Ok(ghz_to_kelvin(f01_ghz) / (p0 / (1.0 - p0)).ln())
}

/// Thermal (p0, p1) at `temperature` (K).
pub fn populations_from_temperature(temperature: f64, f01_ghz: f64) -> Result<(f64, f64)> {
    check_nonnegative("temperature", temperature)?;
    check_positive("f01_ghz", f01_ghz)?;
    if temperature == 0.0 {
        return Ok((1.0, 0.0));
    }
    let b = (-ghz_to_kelvin(f01_ghz) / temperature).exp();
    let p0 = 1.0 / (1.0 + b);
    Ok((p0, 1.0 - p0))
}

/// (T1^RO / T_RO)(1 − e^{−T_RO/T1^RO}): weight of the initial deviation in
/// the window average. Tends to 1 as T1^RO → ∞.
fn averaging_weight(t1_ro: f64, t_ro: f64) -> f64 {
    let x = t_ro / t1_ro;
    if x < 1e-8 {
        1.0 - 0.5 * x
    } else {
        -(-x).exp_m1() / x
    }
}

/// Average of p0(t) = p0(∞) + (p0(0) − p0(∞)) e^{−t/T1^RO} over [0, T_RO].
pub fn average_readout_population(p0_zero: f64, p0_infinity: f64, t1_ro_us: f64, t_ro_us: f64) -> Result<f64> {
    check_positive("t1_ro_us", t1_ro_us)?;
    check_positive("t_ro_us", t_ro_us)?;
    Ok(p0_infinity + (p0_zero - p0_infinity) * averaging_weight(t1_ro_us, t_ro_us))
}

/// Population before the readout pulse from the window-averaged measurement.
pub fn deconvolve_readout_decay(p0_measured: f64, p0_infinity: f64, t1_ro_us: f64, t_ro_us: f64) -> Result<f64> {
    check_positive("t1_ro_us", t1_ro_us)?;
    check_positive("t_ro_us", t_ro_us)?;
    Ok(p0_infinity + (p0_measured - p0_infinity) / averaging_weight(t1_ro_us, t_ro_us))
}

/// Initial (p0, p1) after readout-induced pumping into |1⟩ with the given
/// preparation fidelity.
pub fn reset_populations(fidelity: f64) -> Result<(f64, f64)> {
    if !(0.0..=1.0).contains(&fidelity) {
        return Err(invalid("fidelity", format!("must lie in [0, 1], got {fidelity}")));
    }
    Ok((1.0 - fidelity, fidelity))
}

/// Generator of synthetic IQ shots: two isotropic Gaussian blobs.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ShotModel {
    pub p0: f64,
    pub center0: (f64, f64),
    pub center1: (f64, f64),
    /// Per-quadrature standard deviation.
    pub std: f64,
}

impl ShotModel {
    /// Blobs `separation_std` standard deviations apart, placed so that the
    /// angle seen from the origin matches `blob_angle`.
    pub fn with_angle(p0: f64, blob_angle: f64, separation_std: f64, std: f64) -> Self {
        let d = separation_std * std;
        let r = 0.5 * d / (0.5 * blob_angle).sin();
        let half = 0.5 * blob_angle;
        Self {
            p0,
            center0: (r * half.cos(), -r * half.sin()),
            center1: (r * half.cos(), r * half.sin()),
            std,
        }
    }

    pub fn init(&self) -> ReadoutInit {
        ReadoutInit {
            center0: self.center0,
            center1: self.center1,
        }
    }
}

pub fn synthesize_shots(model: &ShotModel, shots: usize, seed: u64) -> Result<Vec<(f64, f64)>> {
    check_positive("std", model.std)?;
    if !(0.0..=1.0).contains(&model.p0) {
        return Err(invalid("p0", "must lie in [0, 1]"));
    }
    let noise = Normal::new(0.0, model.std).map_err(|e| invalid("std", e.to_string()))?;
    let mut rng = task_rng(seed, 0);
    Ok((0..shots)
        .map(|_| {
            let c = if rng.random::<f64>() < model.p0 { model.center0 } else { model.center1 };
            (c.0 + noise.sample(&mut rng), c.1 + noise.sample(&mut rng))
        })
        .collect())
}

/// Reads CSV `I,Q` (header required).
pub fn parse_shots_csv(text: &str) -> Result<Vec<(f64, f64)>> {
    let mut lines = text.lines().filter(|l| !l.trim().is_empty());
    let header = lines.next().ok_or_else(|| invalid("csv", "empty input"))?;
    let cols: Vec<&str> = header.split(',').map(str::trim).collect();
    if cols != ["I", "Q"] {
        return Err(invalid("csv", format!("expected header `I,Q`, got `{header}`")));
    }
    lines
        .enumerate()
        .map(|(k, line)| {
            let (i, q) = line
                .split_once(',')
                .ok_or_else(|| invalid("csv", format!("line {}: expected 2 fields", k + 2)))?;
            let num = |s: &str| {
                s.trim()
                    .parse::<f64>()
                    .map_err(|_| invalid("csv", format!("line {}: bad number `{}`", k + 2, s.trim())))
            };
            Ok((num(i)?, num(q)?))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_angle_gives_zero_shift() {
        assert_eq!(dispersive_shift_from_angle(0.0, 20.2).unwrap(), 0.0);
        assert!(dispersive_shift_from_angle(PI, 20.2).is_err());
        assert!(dispersive_shift_from_angle(-0.1, 20.2).is_err());
    }

    #[test]
    fn paper_ratio_maps_to_shift() {
        let angle = 2.0 * (2.0 * 0.064_f64).atan();
        let chi = dispersive_shift_from_angle(angle, 20.2).unwrap();
        assert!((chi - 0.064 * 20.2).abs() < 1e-12);
        assert!((chi - 1.29).abs() < 0.01);
    }

    #[test]
    fn inversion_is_rejected() {
        assert!(matches!(
            temperature_from_populations(0.5, 0.163),
            Err(Error::PopulationInversion(_))
        ));
        assert!(temperature_from_populations(0.3, 0.163).is_err());
        assert!(temperature_from_populations(1.0 - 1e-12, 0.163).unwrap() < 3e-4);
    }

    #[test]
    fn no_decay_during_readout() {
        let p = deconvolve_readout_decay(0.558, 0.166, 1e12, 20.0).unwrap();
        assert!((p - 0.558).abs() < 1e-9);
    }

    #[test]
    fn reset_helper() {
        assert_eq!(reset_populations(0.8).unwrap(), (1.0 - 0.8, 0.8));
        assert!(reset_populations(1.1).is_err());
    }

    #[test]
    fn shots_csv() {
        let s = parse_shots_csv("I,Q\n1.0,2.0\n-3,4e-1\n").unwrap();
        assert_eq!(s, vec![(1.0, 2.0), (-3.0, 0.4)]);
        assert!(parse_shots_csv("x,y\n").is_err());
    }

    #[test]
    fn histogram_totals() {
        let shots = synthesize_shots(&ShotModel::with_angle(0.6, 0.25, 4.0, 1.0), 5000, 1).unwrap();
        let h = IQHistogram::from_shots(&shots, 40).unwrap();
        assert_eq!(h.total, 5000);
        assert_eq!(h.counts.iter().sum::<u64>(), h.total);
    }

    #[test]
    fn too_few_shots() {
        let shots = synthesize_shots(&ShotModel::with_angle(0.6, 0.25, 4.0, 1.0), 500, 1).unwrap();
        let h = IQHistogram::from_shots(&shots, 40).unwrap();
        assert!(fit_double_gaussian(&h, None).is_err());
    }
}
