//! Physical constants and unit conventions.
//!
//! Internal unit system: energies in meV, times in ps, lengths in nm where
//! not stated otherwise. Angular frequencies are energies divided by ħ, i.e.
//! rad/ps. Bath material parameters keep their customary SI units and are
//! converted on evaluation.

use crate::real::Real;

/// Reduced Planck constant, meV·ps.
pub const HBAR_MEV_PS: f64 = 0.6582119569;

/// Boltzmann constant, meV/K.
pub const KB_MEV_PER_K: f64 = 0.08617333262;

/// Reduced Planck constant, J·s.
pub const HBAR_SI: f64 = 1.054571817e-34;

/// Elementary charge, C (also J per eV).
pub const E_CHARGE: f64 = 1.602176634e-19;

/// Speed of light, m/s.
pub const C_LIGHT: f64 = 299_792_458.0;

/// ħ in meV·ps for a generic scalar.
#[inline]
pub fn hbar<S: Real>() -> S {
    S::of(HBAR_MEV_PS)
}

/// k_B in meV/K for a generic scalar.
#[inline]
pub fn kb<S: Real>() -> S {
    S::of(KB_MEV_PER_K)
}

/// Convert an energy in meV to an angular frequency in rad/ps.
#[inline]
pub fn mev_to_radps<S: Real>(e: S) -> S {
    e / hbar::<S>()
}

/// Convert an angular frequency in rad/ps to an energy in meV.
#[inline]
pub fn radps_to_mev<S: Real>(w: S) -> S {
    w * hbar::<S>()
}
