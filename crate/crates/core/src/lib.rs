//! Modeling and analysis toolkit for a fluxonium superconducting qubit.
//!
//! The crate is organized around the data flow of a coherence study:
//!
//! - [`circuit`] builds and diagonalizes the fluxonium Hamiltonian and exposes
//!   transition frequencies and operator matrix elements versus flux.
//! - [`dissipation`] turns matrix elements into relaxation and dephasing rates
//!   (dielectric loss, quasiparticle tunneling, thermal photons) and inverts
//!   measured lifetimes into loss bounds.
//! - [`pumping`] is the three-level rate-equation model behind the |2⟩→|0⟩
//!   lifetime measurement.
//! - [`readout`] covers single-shot histogram fitting, temperature extraction
//!   and readout-induced decay deconvolution.
//! - [`protocols`] simulates and fits T1, Ramsey and pulse-train experiments.
//! - [`benchmarking`] is single-qubit Clifford machinery with randomized,
//!   interleaved and purity benchmarking.
//! - [`fitting`] is the shared Levenberg-Marquardt engine and the
//!   spectroscopy fit for the circuit energies.
//! - [`config`] loads the JSON device configuration.
//!
//! Units throughout: energies as E/h in GHz, times in µs unless a name says
//! otherwise (`_ms`), rates in 1/ms, flux in units of the flux quantum.

pub mod benchmarking;
pub mod circuit;
pub mod config;
pub mod dissipation;
mod error;
pub mod fitting;
pub mod protocols;
pub mod pumping;
pub mod readout;
pub(crate) mod rng;
pub mod units;

pub use error::{Error, Result};
