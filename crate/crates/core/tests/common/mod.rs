//! Independent oracles shared by the integration tests. None of them touch
//! the crate's linear algebra.
#![allow(clippy::needless_range_loop)]
#![allow(dead_code)]

use std::f64::consts::PI;

/// Uniform phase-grid discretization of
/// H = −4E_C d²/dφ² + ½E_L φ² − E_J cos(φ − 2π flux) on [−L, L].
pub struct PhaseGrid {
    pub h: f64,
    pub phi: Vec<f64>,
    pub diag: Vec<f64>,
    pub off: f64,
}

impl PhaseGrid {
    pub fn new(e_c: f64, e_l: f64, e_j: f64, flux: f64, half_width: f64, h: f64) -> Self {
        let n = (2.0 * half_width / h).round() as usize + 1;
        let phi: Vec<f64> = (0..n).map(|k| -half_width + k as f64 * h).collect();
        let kin = 4.0 * e_c / (h * h);
        let diag = phi
            .iter()
            .map(|&p| 2.0 * kin + 0.5 * e_l * p * p - e_j * (p - 2.0 * PI * flux).cos())
            .collect();
        Self {
            h,
            phi,
            diag,
            off: -kin,
        }
    }

    /// Number of eigenvalues below `x` (Sturm sequence).
    fn count_below(&self, x: f64) -> usize {
        let mut count = 0;
        let mut q = self.diag[0] - x;
        if q < 0.0 {
            count += 1;
        }
        for &d in &self.diag[1..] {
            let prev = if q == 0.0 { 1e-300 } else { q };
            q = d - x - self.off * self.off / prev;
            if q < 0.0 {
                count += 1;
            }
        }
        count
    }

    /// k-th smallest eigenvalue by bisection.
    pub fn eigenvalue(&self, k: usize) -> f64 {
        let (mut lo, mut hi) = (
            self.diag.iter().cloned().fold(f64::MAX, f64::min) - 4.0 * self.off.abs(),
            self.diag.iter().cloned().fold(f64::MIN, f64::max) + 4.0 * self.off.abs(),
        );
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if self.count_below(mid) > k {
                hi = mid;
            } else {
                lo = mid;
            }
            if hi - lo < 1e-13 * hi.abs().max(1.0) {
                break;
            }
        }
        0.5 * (lo + hi)
    }

    /// Normalized eigenvector (∑ψ² h = 1) by inverse iteration.
    pub fn eigenvector(&self, lambda: f64) -> Vec<f64> {
        let n = self.diag.len();
        let shift = lambda + 1e-10 * lambda.abs().max(1.0);
        let mut x: Vec<f64> = (0..n).map(|k| 1.0 + 0.1 * ((k * 7919) % 13) as f64).collect();
        for _ in 0..4 {
            // Thomas algorithm on (T − shift)
            let mut c = vec![0.0; n];
            let mut d = vec![0.0; n];
            let mut b = self.diag[0] - shift;
            c[0] = self.off / b;
            d[0] = x[0] / b;
            for i in 1..n {
                b = self.diag[i] - shift - self.off * c[i - 1];
                c[i] = self.off / b;
                d[i] = (x[i] - self.off * d[i - 1]) / b;
            }
            let mut y = vec![0.0; n];
            y[n - 1] = d[n - 1];
            for i in (0..n - 1).rev() {
                y[i] = d[i] - c[i] * y[i + 1];
            }
            let norm = (y.iter().map(|v| v * v).sum::<f64>() * self.h).sqrt();
            x = y.iter().map(|v| v / norm).collect();
        }
        x
    }

    /// ∫ψ_a f(φ) ψ_b dφ
    pub fn expectation(&self, a: &[f64], b: &[f64], f: impl Fn(f64) -> f64) -> f64 {
        a.iter().zip(b).zip(&self.phi).map(|((x, y), &p)| x * f(p) * y).sum::<f64>() * self.h
    }

    /// |∫ψ_a (d/dφ) ψ_b dφ|, central differences.
    pub fn derivative_element(&self, a: &[f64], b: &[f64]) -> f64 {
        let n = a.len();
        let mut s = 0.0;
        for k in 1..n - 1 {
            s += a[k] * (b[k + 1] - b[k - 1]) / (2.0 * self.h);
        }
        (s * self.h).abs()
    }
}

/// Lowest `k` energies, Richardson-extrapolated over grid spacings h and h/2.
pub fn grid_energies(e_c: f64, e_l: f64, e_j: f64, flux: f64, k: usize) -> Vec<f64> {
    let coarse = PhaseGrid::new(e_c, e_l, e_j, flux, 30.0, 0.02);
    let fine = PhaseGrid::new(e_c, e_l, e_j, flux, 30.0, 0.01);
    (0..k)
        .map(|i| (4.0 * fine.eigenvalue(i) - coarse.eigenvalue(i)) / 3.0)
        .collect()
}

/// Matrix elements between grid eigenstates: (|⟨i|n|j⟩|, |⟨i|φ|j⟩|,
/// |⟨i|sin((φ−φ_e)/2)|j⟩|, |⟨i|cos((φ−φ_e)/2)|j⟩|).
pub fn grid_elements(e_c: f64, e_l: f64, e_j: f64, flux: f64, i: usize, j: usize) -> [f64; 4] {
    let g = PhaseGrid::new(e_c, e_l, e_j, flux, 30.0, 0.005);
    let a = g.eigenvector(g.eigenvalue(i));
    let b = g.eigenvector(g.eigenvalue(j));
    let phase = 2.0 * PI * flux;
    [
        g.derivative_element(&a, &b),
        g.expectation(&a, &b, |p| p).abs(),
        g.expectation(&a, &b, |p| (0.5 * (p - phase)).sin()).abs(),
        g.expectation(&a, &b, |p| (0.5 * (p - phase)).cos()).abs(),
    ]
}

/// Eigenvalues of a small dense symmetric matrix by bisection on the
/// LDLᵀ inertia (Sylvester's law).
pub fn symmetric_eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let bound: f64 = a.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max);
    let negatives = |x: f64| -> usize {
        let mut m: Vec<Vec<f64>> = a.to_vec();
        for (i, row) in m.iter_mut().enumerate() {
            row[i] -= x;
        }
        let mut count = 0;
        for k in 0..n {
            let mut pivot = m[k][k];
            if pivot == 0.0 {
                pivot = 1e-300;
            }
            if pivot < 0.0 {
                count += 1;
            }
            for i in k + 1..n {
                let f = m[i][k] / pivot;
                for j in k + 1..n {
                    m[i][j] -= f * m[k][j];
                }
            }
        }
        count
    };
    (0..n)
        .map(|k| {
            let (mut lo, mut hi) = (-bound - 1.0, bound + 1.0);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                if negatives(mid) > k {
                    hi = mid;
                } else {
                    lo = mid;
                }
            }
            0.5 * (lo + hi)
        })
        .collect()
}

pub type M3 = [[f64; 3]; 3];

fn mul3(a: &M3, b: &M3) -> M3 {
    let mut c = [[0.0; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            c[i][j] = (0..3).map(|k| a[i][k] * b[k][j]).sum();
        }
    }
    c
}

/// exp(m t) by scaling and squaring with a 30-term Taylor series.
pub fn expm3(m: &M3, t: f64) -> M3 {
    let norm: f64 = m.iter().map(|r| r.iter().map(|v| v.abs()).sum::<f64>()).fold(0.0, f64::max) * t.abs();
    let squarings = if norm > 0.5 { (norm / 0.5).log2().ceil() as u32 } else { 0 };
    let scale = t / 2f64.powi(squarings as i32);
    let a: M3 = m.map(|r| r.map(|v| v * scale));
    let mut result = [[1.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 1.0]];
    let mut term = result;
    for k in 1..30 {
        term = mul3(&term, &a).map(|r| r.map(|v| v / k as f64));
        for i in 0..3 {
            for j in 0..3 {
                result[i][j] += term[i][j];
            }
        }
    }
    for _ in 0..squarings {
        result = mul3(&result, &result);
    }
    result
}

pub fn apply3(m: &M3, p: &[f64; 3]) -> [f64; 3] {
    [0, 1, 2].map(|i| (0..3).map(|k| m[i][k] * p[k]).sum())
}

pub fn rel_close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(a.abs())
}
