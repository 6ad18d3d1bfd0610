//! Three-level quantum-dot model (ground, exciton, biexciton) and its
//! rotating-frame Hamiltonian.

use crate::consts;
use crate::error::{CoreError, Result};
use crate::mat3::Sym3;
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Bare-state indices.
pub const G: usize = 0;
pub const X: usize = 1;
pub const XX: usize = 2;

/// Short names of the bare states.
pub const STATE_NAMES: [&str; 3] = ["g", "x", "xx"];

/// Exciton number of each bare state; the phonon coupling operator is
/// diagonal in this.
pub const EXCITON_NUMBER: [f64; 3] = [0.0, 1.0, 2.0];

/// Ladder model of the dot: ground state, exciton, and a bound biexciton.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DotModel<S> {
    /// Biexciton binding energy (hbar * Delta_B), meV; positive for a bound
    /// biexciton.
    pub binding_energy: S,
}

impl<S: Real> Default for DotModel<S> {
    fn default() -> Self {
        Self { binding_energy: S::of(4.0) }
    }
}

impl<S: Real> DotModel<S> {
    pub fn new(binding_energy: S) -> Result<Self> {
        if !binding_energy.is_finite() {
            return Err(CoreError::invalid("binding energy must be finite"));
        }
        Ok(Self { binding_energy })
    }

    /// Hamiltonian in the frame rotating with the instantaneous laser
    /// frequency, in meV.
    ///
    /// In this frame the couplings are real,
    /// H_gx = H_x,xx = -(hbar/2) |Omega(t)|, and the diagonal carries the
    /// instantaneous detunings: E_g = 0, E_x = hbar Delta_B / 2 - hbar
    /// delta(t), E_xx = -2 hbar delta(t), with delta(t) = Delta/hbar + a t.
    pub fn rotating_frame_hamiltonian(&self, pulse: &ChirpedPulse<S>, t: S) -> Sym3<S> {
        let hbar = consts::hbar::<S>();
        let delta = pulse.instantaneous_detuning(t); // rad/ps
        let hd = hbar * delta; // meV
        let off = -(hbar * S::half()) * pulse.envelope_mag(t);
        Sym3::new(
            [S::zero(), self.binding_energy * S::half() - hd, -S::two() * hd],
            [off, S::zero(), off],
        )
    }
}
