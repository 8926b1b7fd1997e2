//! Physical constants and the unit conversions every rate formula goes through.
//!
//! Energies enter as E/h in GHz, gaps in µeV, cavity parameters as ν/2π in
//! MHz. Rates leave in 1/ms.

use std::f64::consts::PI;

/// Planck constant, J·s (exact SI).
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Reduced Planck constant, J·s.
pub const HBAR: f64 = PLANCK / (2.0 * PI);
/// Boltzmann constant, J/K (exact SI).
pub const BOLTZMANN: f64 = 1.380_649e-23;
/// Elementary charge, C (exact SI).
pub const ELEMENTARY_CHARGE: f64 = 1.602_176_634e-19;

pub const GHZ: f64 = 1e9;
pub const MHZ: f64 = 1e6;

/// Energy in joules of a frequency given in GHz.
pub fn ghz_to_joules(f_ghz: f64) -> f64 {
    PLANCK * f_ghz * GHZ
}

/// Energy in joules of a value given in µeV.
pub fn micro_ev_to_joules(e_uev: f64) -> f64 {
    e_uev * 1e-6 * ELEMENTARY_CHARGE
}

/// Angular frequency (rad/s) of a frequency ν given in MHz.
pub fn mhz_to_angular(f_mhz: f64) -> f64 {
    2.0 * PI * f_mhz * MHZ
}

pub fn per_second_to_per_ms(rate: f64) -> f64 {
    rate * 1e-3
}

pub fn per_ms_to_per_second(rate: f64) -> f64 {
    rate * 1e3
}

/// Dimensionless ratio h·f / (k_B·T). Infinite at `temperature_k == 0`.
pub fn boltzmann_exponent(f_ghz: f64, temperature_k: f64) -> f64 {
    if temperature_k == 0.0 {
        f64::INFINITY
    } else {
        ghz_to_joules(f_ghz) / (BOLTZMANN * temperature_k)
    }
}

/// Temperature in kelvin of an energy h·f.
pub fn ghz_to_kelvin(f_ghz: f64) -> f64 {
    ghz_to_joules(f_ghz) / BOLTZMANN
}
