//! Simulation core for chirped-pulse biexciton preparation in a three-level
//! quantum dot coupled to longitudinal-acoustic phonons.
//!
//! The crate covers:
//!
//! * chirped Gaussian pulses and the grating-stretcher dispersion ([`pulse`]),
//! * the rotating-frame ladder Hamiltonian and dressed-state analysis
//!   ([`dot`], [`dressed`]),
//! * the deformation-potential phonon environment ([`phonon`]),
//! * four propagators: phonon-free unitary, the two-phonon correlation
//!   expansion, an exact few-mode oracle, and a dressed-state rate model
//!   ([`dynamics`]).
//!
//! Everything is generic over the scalar type through [`real::Real`]
//! (`f32` or `f64`); the `*64` aliases below pick the double-precision
//! instantiations used by the command-line tools.
//!
//! Units: energies in meV, times in ps, hbar = 0.6582119569 meV ps.

pub mod consts;
pub mod dot;
pub mod dressed;
pub mod dynamics;
pub mod error;
pub mod mat3;
pub mod phonon;
pub mod pulse;
pub mod real;

pub use error::{CoreError, Result};
pub use real::Real;

pub type Pulse64 = pulse::ChirpedPulse<f64>;
pub type Dot64 = dot::DotModel<f64>;
pub type Bath64 = phonon::PhononBath<f64>;
pub type Modes64 = phonon::BathModes<f64>;
pub type Trajectory64 = dynamics::Trajectory<f64>;
pub type DressedTrajectory64 = dressed::DressedTrajectory<f64>;
pub type TimeGrid64 = dynamics::TimeGrid<f64>;

pub type Pulse32 = pulse::ChirpedPulse<f32>;
pub type Dot32 = dot::DotModel<f32>;
pub type Bath32 = phonon::PhononBath<f32>;
pub type Modes32 = phonon::BathModes<f32>;
pub type Trajectory32 = dynamics::Trajectory<f32>;
pub type DressedTrajectory32 = dressed::DressedTrajectory<f32>;
pub type TimeGrid32 = dynamics::TimeGrid<f32>;
