//! Fluxonium Hamiltonian, its diagonalization, and operator matrix elements.
//!
//! The circuit Hamiltonian is
//!
//! ```text
//! H = 4 E_C n² + ½ E_L φ² − E_J cos(φ − 2π Φ_e/Φ_0)
//! ```
//!
//! written in the ladder basis of its quadratic part. With
//! `s = (8 E_C / E_L)^¼` the phase and charge operators are
//! `φ = s (a + a†)/√2` and `n = i (a† − a)/(√2 s)`, so `[φ, n] = i` and the
//! quadratic part is exactly diagonal, `ω (a†a + ½)` with `ω = √(8 E_L E_C)`.
//! Functions of φ (the junction cosine and the half-angle operators used by
//! the quasiparticle rates) are applied through the spectral decomposition of
//! the tridiagonal φ matrix, which avoids any series truncation.
//!
//! All matrices are real: φ is real symmetric and `n = i·N` with `N` real
//! antisymmetric. Charge matrix elements are therefore purely imaginary in
//! the (real) eigenbasis and [`MatrixElement::value`] stores their imaginary
//! part.

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::error::{check_finite, check_nonnegative, check_positive, invalid, Error, Result};

pub const MIN_BASIS_DIM: usize = 10;
pub const DEFAULT_BASIS_DIM: usize = 120;
/// 1 kHz, the largest transition shift tolerated when the basis is doubled.
pub const CONVERGENCE_THRESHOLD_GHZ: f64 = 1e-6;

/// Circuit energies (E/h, GHz), external flux (units of Φ_0) and basis size.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CircuitParams {
    pub e_c: f64,
    pub e_l: f64,
    pub e_j: f64,
    pub flux: f64,
    #[serde(default = "default_basis_dim")]
    pub basis_dim: usize,
}

fn default_basis_dim() -> usize {
    DEFAULT_BASIS_DIM
}

impl Default for CircuitParams {
    /// The measured device, biased at the half-flux sweet spot.
    fn default() -> Self {
        Self {
            e_c: 1.08,
            e_l: 0.64,
            e_j: 5.57,
            flux: 0.5,
            basis_dim: DEFAULT_BASIS_DIM,
        }
    }
}

impl CircuitParams {
    pub fn new(e_c: f64, e_l: f64, e_j: f64, flux: f64) -> Self {
        Self {
            e_c,
            e_l,
            e_j,
            flux,
            basis_dim: DEFAULT_BASIS_DIM,
        }
    }

    pub fn with_flux(self, flux: f64) -> Self {
        Self { flux, ..self }
    }

    pub fn with_basis_dim(self, basis_dim: usize) -> Self {
        Self { basis_dim, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        check_positive("e_c", self.e_c)?;
        check_positive("e_l", self.e_l)?;
        check_nonnegative("e_j", self.e_j)?;
        check_finite("flux", self.flux)?;
        if self.basis_dim < MIN_BASIS_DIM {
            return Err(Error::BasisTooSmall(self.basis_dim));
        }
        Ok(())
    }

    /// Level spacing of the quadratic part, √(8 E_L E_C).
    pub fn plasma_frequency(&self) -> f64 {
        (8.0 * self.e_l * self.e_c).sqrt()
    }

    /// External phase 2π Φ_e/Φ_0.
    pub fn external_phase(&self) -> f64 {
        2.0 * PI * self.flux
    }
}

/// Operators whose matrix elements enter the decoherence rates.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OperatorKind {
    /// n̂, Cooper-pair number.
    Charge,
    /// φ̂, phase across the inductance.
    Phase,
    /// sin((φ̂ − φ_e)/2)
    HalfSin,
    /// cos((φ̂ − φ_e)/2)
    HalfCos,
}

impl OperatorKind {
    pub const ALL: [OperatorKind; 4] = [
        OperatorKind::Charge,
        OperatorKind::Phase,
        OperatorKind::HalfSin,
        OperatorKind::HalfCos,
    ];

    fn slot(self) -> usize {
        match self {
            OperatorKind::Charge => 0,
            OperatorKind::Phase => 1,
            OperatorKind::HalfSin => 2,
            OperatorKind::HalfCos => 3,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            OperatorKind::Charge => "charge",
            OperatorKind::Phase => "phase",
            OperatorKind::HalfSin => "halfsin",
            OperatorKind::HalfCos => "halfcos",
        }
    }
}

impl std::str::FromStr for OperatorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "charge" | "n" => Ok(OperatorKind::Charge),
            "phase" | "phi" => Ok(OperatorKind::Phase),
            "halfsin" => Ok(OperatorKind::HalfSin),
            "halfcos" => Ok(OperatorKind::HalfCos),
            other => Err(invalid("operator", format!("unknown operator `{other}`"))),
        }
    }
}

/// Ladder-basis operators for fixed (E_C, E_L, basis_dim).
///
/// Everything here is independent of E_J and flux, so one basis can be
/// reused across a flux sweep or across residual evaluations that only move
/// E_J.
#[derive(Clone, Debug)]
pub struct OscillatorBasis {
    dim: usize,
    plasma: f64,
    phi: DMatrix<f64>,
    /// Real antisymmetric N with n̂ = i·N.
    charge: DMatrix<f64>,
    phi_values: DVector<f64>,
    phi_vectors: DMatrix<f64>,
}

impl OscillatorBasis {
    pub fn new(params: &CircuitParams) -> Result<Self> {
        params.validate()?;
        let dim = params.basis_dim;
        let scale = (8.0 * params.e_c / params.e_l).powf(0.25);
        let mut phi = DMatrix::zeros(dim, dim);
        let mut charge = DMatrix::zeros(dim, dim);
        for m in 1..dim {
            let amp = (m as f64).sqrt() / std::f64::consts::SQRT_2;
            // a[m-1, m] = √m
            phi[(m - 1, m)] = scale * amp;
            phi[(m, m - 1)] = scale * amp;
            charge[(m - 1, m)] = -amp / scale;
            charge[(m, m - 1)] = amp / scale;
        }
        let eig = SymmetricEigen::try_new(phi.clone(), f64::EPSILON, 100_000)
            .ok_or(Error::EigenSolver { dim })?;
        Ok(Self {
            dim,
            plasma: params.plasma_frequency(),
            phi,
            charge,
            phi_values: eig.eigenvalues,
            phi_vectors: eig.eigenvectors,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn phase(&self) -> &DMatrix<f64> {
        &self.phi
    }

    /// Real antisymmetric `N` such that n̂ = i·N.
    pub fn charge_imag(&self) -> &DMatrix<f64> {
        &self.charge
    }

    /// f(φ̂) through the spectral decomposition of φ̂.
    pub fn function_of_phase(&self, f: impl Fn(f64) -> f64) -> DMatrix<f64> {
        let weights = self.phi_values.map(&f);
        let mut scaled = self.phi_vectors.clone();
        for (mut col, w) in scaled.column_iter_mut().zip(weights.iter()) {
            col *= *w;
        }
        symmetrized(scaled * self.phi_vectors.transpose())
    }

    pub fn hamiltonian(&self, e_j: f64, flux: f64) -> DMatrix<f64> {
        let phase_e = 2.0 * PI * flux;
        let mut h = self.function_of_phase(|p| -e_j * (p - phase_e).cos());
        for m in 0..self.dim {
            h[(m, m)] += self.plasma * (m as f64 + 0.5);
        }
        h
    }

    /// Matrix of `kind` in the ladder basis. For [`OperatorKind::Charge`] this
    /// is the real antisymmetric part `N` of n̂ = i·N.
    pub fn operator(&self, kind: OperatorKind, flux: f64) -> DMatrix<f64> {
        let phase_e = 2.0 * PI * flux;
        match kind {
            OperatorKind::Charge => self.charge.clone(),
            OperatorKind::Phase => self.phi.clone(),
            OperatorKind::HalfSin => self.function_of_phase(|p| ((p - phase_e) / 2.0).sin()),
            OperatorKind::HalfCos => self.function_of_phase(|p| ((p - phase_e) / 2.0).cos()),
        }
    }
}

fn symmetrized(m: DMatrix<f64>) -> DMatrix<f64> {
    (&m + m.transpose()) * 0.5
}

/// The Hamiltonian in the ladder basis, GHz.
pub fn build_hamiltonian(params: &CircuitParams) -> Result<DMatrix<f64>> {
    let basis = OscillatorBasis::new(params)?;
    Ok(basis.hamiltonian(params.e_j, params.flux))
}

/// Lowest eigenpairs of a real symmetric matrix.
#[derive(Clone, Debug)]
pub struct EigenPairs {
    /// Ascending.
    pub energies: Vec<f64>,
    /// One column per eigenvalue; the largest-magnitude entry of each column
    /// is positive.
    pub vectors: DMatrix<f64>,
}

/// The `k` lowest eigenpairs of the real symmetric `h`.
pub fn diagonalize(h: &DMatrix<f64>, k: usize) -> Result<EigenPairs> {
    let dim = h.nrows();
    if h.ncols() != dim {
        return Err(invalid("h", format!("not square: {}x{}", dim, h.ncols())));
    }
    if k == 0 || k > dim {
        return Err(invalid("k", format!("need 1 <= k <= {dim}, got {k}")));
    }
    if h.iter().any(|x| !x.is_finite()) {
        return Err(invalid("h", "contains non-finite entries"));
    }
    let eig = SymmetricEigen::try_new(h.clone(), f64::EPSILON, 100_000)
        .ok_or(Error::EigenSolver { dim })?;
    if eig.eigenvalues.iter().any(|x| !x.is_finite()) {
        return Err(Error::EigenSolver { dim });
    }
    let mut order: Vec<usize> = (0..dim).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    order.truncate(k);

    let energies = order.iter().map(|&i| eig.eigenvalues[i]).collect();
    let mut vectors = DMatrix::zeros(dim, k);
    for (col, &src) in order.iter().enumerate() {
        let v = eig.eigenvectors.column(src);
        let pivot = v.iamax();
        let sign = if v[pivot] < 0.0 { -1.0 } else { 1.0 };
        vectors.set_column(col, &(v * sign));
    }
    Ok(EigenPairs { energies, vectors })
}

/// A signed matrix element and its magnitude.
#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct MatrixElement {
    /// ⟨i|Ô|j⟩ for real operators; the imaginary part for [`OperatorKind::Charge`].
    pub value: f64,
    pub magnitude: f64,
}

/// Lowest levels of the fluxonium at one operating point, with the
/// eigenbasis matrices of every [`OperatorKind`] cached.
#[derive(Clone, Debug)]
pub struct EigenSystem {
    pub params: CircuitParams,
    /// GHz, ascending.
    pub energies: Vec<f64>,
    /// Ladder-basis coefficients, one column per level.
    pub eigvecs: DMatrix<f64>,
    elements: [DMatrix<f64>; 4],
}

impl EigenSystem {
    pub fn solve(params: &CircuitParams, levels: usize) -> Result<Self> {
        let basis = OscillatorBasis::new(params)?;
        Self::solve_in(&basis, params, levels)
    }

    /// Solves with a prebuilt basis; `params` must share its E_C, E_L and
    /// basis_dim.
    pub fn solve_in(basis: &OscillatorBasis, params: &CircuitParams, levels: usize) -> Result<Self> {
        params.validate()?;
        if basis.dim() != params.basis_dim {
            return Err(invalid("basis", "basis dimension does not match params"));
        }
        let h = basis.hamiltonian(params.e_j, params.flux);
        let pairs = diagonalize(&h, levels)?;
        let v = &pairs.vectors;
        let vt = v.transpose();
        let elements = OperatorKind::ALL.map(|kind| &vt * basis.operator(kind, params.flux) * v);
        Ok(Self {
            params: *params,
            energies: pairs.energies,
            eigvecs: pairs.vectors,
            elements,
        })
    }

    pub fn levels(&self) -> usize {
        self.energies.len()
    }

    fn check_level(&self, index: usize) -> Result<()> {
        if index < self.levels() {
            Ok(())
        } else {
            Err(Error::LevelOutOfRange {
                index,
                available: self.levels(),
            })
        }
    }

    /// |E_j − E_i| in GHz.
    pub fn transition_frequency(&self, i: usize, j: usize) -> Result<f64> {
        self.check_level(i)?;
        self.check_level(j)?;
        Ok((self.energies[j] - self.energies[i]).abs())
    }

    pub fn matrix_element(&self, op: OperatorKind, i: usize, j: usize) -> Result<MatrixElement> {
        self.check_level(i)?;
        self.check_level(j)?;
        let value = self.elements[op.slot()][(i, j)];
        Ok(MatrixElement {
            value,
            magnitude: value.abs(),
        })
    }

    /// Full k×k eigenbasis matrix of `op` (imaginary part for charge).
    pub fn operator_in_eigenbasis(&self, op: OperatorKind) -> &DMatrix<f64> {
        &self.elements[op.slot()]
    }
}

/// E_j − E_i for the eigen-system, free-function form.
pub fn transition_frequency(eig: &EigenSystem, i: usize, j: usize) -> Result<f64> {
    eig.transition_frequency(i, j)
}

pub fn matrix_element(eig: &EigenSystem, op: OperatorKind, i: usize, j: usize) -> Result<MatrixElement> {
    eig.matrix_element(op, i, j)
}

/// Transition frequencies on a flux grid.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SpectrumTable {
    pub transitions: Vec<(usize, usize)>,
    pub flux: Vec<f64>,
    /// `rows[k][t]` is transition `t` at `flux[k]`, GHz.
    pub rows: Vec<Vec<f64>>,
}

impl SpectrumTable {
    pub fn column(&self, transition: (usize, usize)) -> Option<Vec<f64>> {
        let t = self.transitions.iter().position(|&x| x == transition)?;
        Some(self.rows.iter().map(|r| r[t]).collect())
    }

    /// CSV with header `flux,f01,f12,...`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("flux");
        for &(i, j) in &self.transitions {
            out.push(',');
            out.push_str(&transition_label(i, j));
        }
        out.push('\n');
        for (flux, row) in self.flux.iter().zip(&self.rows) {
            out.push_str(&flux.to_string());
            for v in row {
                out.push(',');
                out.push_str(&v.to_string());
            }
            out.push('\n');
        }
        out
    }
}

/// `f01` style label; levels ≥ 10 are separated by an underscore.
pub fn transition_label(i: usize, j: usize) -> String {
    if i < 10 && j < 10 {
        format!("f{i}{j}")
    } else {
        format!("f{i}_{j}")
    }
}

/// All pairs i < j among the lowest `levels` levels.
pub fn all_transitions(levels: usize) -> Vec<(usize, usize)> {
    (0..levels)
        .flat_map(|i| (i + 1..levels).map(move |j| (i, j)))
        .collect()
}

pub fn spectrum_vs_flux(
    params: &CircuitParams,
    flux_grid: &[f64],
    transitions: &[(usize, usize)],
) -> Result<SpectrumTable> {
    if flux_grid.is_empty() {
        return Err(invalid("flux_grid", "empty"));
    }
    if transitions.is_empty() {
        return Err(invalid("transitions", "empty"));
    }
    for &f in flux_grid {
        check_finite("flux", f)?;
    }
    let levels = transitions.iter().map(|&(i, j)| i.max(j)).max().unwrap_or(0) + 1;
    let basis = OscillatorBasis::new(params)?;
    let row_at = |flux: f64| -> Result<Vec<f64>> {
        let eig = EigenSystem::solve_in(&basis, &params.with_flux(flux), levels).map_err(|e| Error::AtFlux {
            flux,
            source: Box::new(e),
        })?;
        transitions
            .iter()
            .map(|&(i, j)| eig.transition_frequency(i, j))
            .collect()
    };

    #[cfg(feature = "parallel")]
    let rows: Result<Vec<Vec<f64>>> = {
        use rayon::prelude::*;
        flux_grid.par_iter().map(|&f| row_at(f)).collect()
    };
    #[cfg(not(feature = "parallel"))]
    let rows: Result<Vec<Vec<f64>>> = flux_grid.iter().map(|&f| row_at(f)).collect();

    Ok(SpectrumTable {
        transitions: transitions.to_vec(),
        flux: flux_grid.to_vec(),
        rows: rows?,
    })
}

/// Largest shift (GHz) of any transition among the lowest `levels` levels
/// when the basis is doubled. Errors if it exceeds 1 kHz.
pub fn check_basis_convergence(params: &CircuitParams, levels: usize) -> Result<f64> {
    let base = EigenSystem::solve(params, levels)?;
    let doubled = EigenSystem::solve(&params.with_basis_dim(2 * params.basis_dim), levels)?;
    let shift = all_transitions(levels)
        .into_iter()
        .map(|(i, j)| {
            let a = base.energies[j] - base.energies[i];
            let b = doubled.energies[j] - doubled.energies[i];
            (a - b).abs()
        })
        .fold(0.0_f64, f64::max);
    if shift > CONVERGENCE_THRESHOLD_GHZ {
        return Err(Error::BasisNotConverged {
            shift_khz: shift * 1e6,
        });
    }
    Ok(shift)
}

/// Solves at `params` after asserting basis convergence.
pub fn solve_converged(params: &CircuitParams, levels: usize) -> Result<EigenSystem> {
    check_basis_convergence(params, levels.max(2))?;
    EigenSystem::solve(params, levels)
}
