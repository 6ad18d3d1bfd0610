//! Time propagation of the driven three-level system: unitary (phonon-free),
//! the correlation-expansion hierarchy (production method), an exact few-mode
//! oracle, and a dressed-state rate model.

pub mod fewmode;
pub mod hierarchy;
mod kernels;
mod ode;
pub mod rates;
pub mod unitary;

pub use fewmode::{propagate_fewmode_exact, FewModeOptions};
pub use hierarchy::{
    propagate_correlation_expansion, HierarchyOptions, HierarchyState, TruncationOrder,
};
pub use rates::propagate_dressed_rates;
pub use unitary::{propagate_unitary, propagate_unitary_in_frame, Frame};

use num_complex::Complex;

use crate::consts;
use crate::error::{CoreError, Result};
use crate::mat3::{eigvals_hermitian3, hermiticity_defect, trace9};
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Density-matrix eigenvalues below this are flagged as truncation-induced
/// negativity.
pub const NEGATIVITY_THRESHOLD: f64 = -1e-6;

/// Uniform time grid for fixed-step propagation.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct TimeGrid<S> {
    pub t0: S,
    pub dt: S,
    /// Number of RK4 steps; the grid has `steps + 1` nodes.
    pub steps: usize,
}

impl<S: Real> TimeGrid<S> {
    pub fn new(t0: S, t1: S, dt: S) -> Result<Self> {
        if !(dt > S::zero()) || !(t1 > t0) {
            return Err(CoreError::invalid("time grid needs t1 > t0 and dt > 0"));
        }
        let steps = ((t1 - t0) / dt).ceil().to_f64().unwrap() as usize;
        Ok(Self { t0, dt, steps: steps.max(1) })
    }

    /// Default step for system-only propagation: sigma0/50, tightened to 40
    /// points per period of the fastest system frequency (peak dressed
    /// splitting or twice the detuning sweep over the active window).
    pub fn default_dt(pulse: &ChirpedPulse<S>) -> S {
        let forty = S::of(40.0);
        let base = pulse.sigma0 / S::of(50.0);
        let rabi = S::SQRT_2() * pulse.peak_rabi();
        let sweep = S::two()
            * (pulse.detuning.abs() / consts::hbar::<S>()
                + pulse.chirp_rate.abs() * S::two() * pulse.sigma);
        let w_sys = rabi.max(sweep);
        if w_sys > S::zero() {
            base.min(S::two() * S::PI() / (forty * w_sys))
        } else {
            base
        }
    }

    /// Default step when a bath with cutoff `omega_max` (meV) is coupled:
    /// additionally 40 points per period at omega_max.
    pub fn default_dt_with_bath(pulse: &ChirpedPulse<S>, omega_max_mev: S) -> S {
        let base = Self::default_dt(pulse);
        if omega_max_mev <= S::zero() {
            return base;
        }
        let w = consts::mev_to_radps(omega_max_mev);
        base.min(S::two() * S::PI() / (S::of(40.0) * w))
    }

    /// Symmetric grid covering the full pulse support.
    pub fn spanning_pulse(pulse: &ChirpedPulse<S>, dt: S) -> Result<Self> {
        let half = pulse.support();
        Self::new(-half, half, dt)
    }

    pub fn t_end(&self) -> S {
        self.t0 + self.dt * S::of(self.steps as f64)
    }

    pub fn halved(&self) -> Self {
        Self { t0: self.t0, dt: self.dt * S::half(), steps: self.steps * 2 }
    }
}

/// Time-resolved occupations and coherences of one propagation.
#[derive(Clone, Debug)]
pub struct Trajectory<S> {
    pub times: Vec<S>,
    /// Populations [P_g, P_x, P_xx] per time.
    pub populations: Vec<[S; 3]>,
    /// Coherence magnitudes [|rho_gx|, |rho_gxx|, |rho_xxx|] per time.
    pub coherences: Vec<[S; 3]>,
    pub final_populations: [S; 3],
    /// Largest |trace(rho) - 1| seen.
    pub trace_defect: S,
    /// Largest Hermiticity defect seen.
    pub hermiticity_defect: S,
    /// Most negative density-matrix eigenvalue seen.
    pub min_eigenvalue: S,
    /// True if `min_eigenvalue` fell below the negativity threshold.
    pub negativity_flagged: bool,
}

impl<S: Real> Trajectory<S> {
    pub fn final_pg(&self) -> S {
        self.final_populations[0]
    }
    pub fn final_px(&self) -> S {
        self.final_populations[1]
    }
    pub fn final_pxx(&self) -> S {
        self.final_populations[2]
    }
}

/// Incremental [`Trajectory`] builder fed one density matrix per step.
pub(crate) struct Recorder<S> {
    times: Vec<S>,
    populations: Vec<[S; 3]>,
    coherences: Vec<[S; 3]>,
    trace_defect: S,
    herm_defect: S,
    min_eig: S,
}

impl<S: Real> Recorder<S> {
    pub fn with_capacity(n: usize) -> Self {
        Self {
            times: Vec::with_capacity(n),
            populations: Vec::with_capacity(n),
            coherences: Vec::with_capacity(n),
            trace_defect: S::zero(),
            herm_defect: S::zero(),
            min_eig: S::infinity(),
        }
    }

    /// Record a flat 3×3 density matrix; returns an error message when the
    /// state left the physical ball (propagation should abort).
    pub fn push_rho(&mut self, t: S, rho: &[Complex<S>]) -> Option<String> {
        let pg = rho[0].re;
        let px = rho[4].re;
        let pxx = rho[8].re;
        if !(pg.is_finite() && px.is_finite() && pxx.is_finite()) {
            return Some("non-finite occupation".to_string());
        }
        let tr = trace9(rho).re;
        if (tr - S::one()).abs() > S::half() {
            return Some(format!("trace diverged to {tr}"));
        }
        self.times.push(t);
        self.populations.push([pg, px, pxx]);
        self.coherences.push([rho[1].norm(), rho[2].norm(), rho[5].norm()]);
        self.trace_defect = self.trace_defect.max((tr - S::one()).abs());
        self.herm_defect = self.herm_defect.max(hermiticity_defect(rho));
        let eigs = eigvals_hermitian3(rho);
        self.min_eig = self.min_eig.min(eigs[0]);
        None
    }

    /// Record bare populations directly (rate model).
    pub fn push_populations(&mut self, t: S, p: [S; 3]) -> Option<String> {
        if p.iter().any(|v| !v.is_finite()) {
            return Some("non-finite population".to_string());
        }
        let tr = p[0] + p[1] + p[2];
        if (tr - S::one()).abs() > S::half() {
            return Some(format!("population sum diverged to {tr}"));
        }
        self.times.push(t);
        self.populations.push(p);
        self.coherences.push([S::zero(); 3]);
        self.trace_defect = self.trace_defect.max((tr - S::one()).abs());
        self.min_eig = self.min_eig.min(p[0].min(p[1]).min(p[2]));
        None
    }

    pub fn finish(self) -> Trajectory<S> {
        let final_populations = *self.populations.last().expect("empty trajectory");
        let min_eig = if self.min_eig.is_finite() { self.min_eig } else { S::zero() };
        Trajectory {
            times: self.times,
            populations: self.populations,
            coherences: self.coherences,
            final_populations,
            trace_defect: self.trace_defect,
            hermiticity_defect: self.herm_defect,
            min_eigenvalue: min_eig,
            negativity_flagged: min_eig < S::of(NEGATIVITY_THRESHOLD),
        }
    }
}

/// Final transfer probability of a two-level flat-top sweep through
/// resonance: H/hbar = [[0, omega/2], [omega/2, -rate*t]], started in state 0
/// at -t_half and read out at +t_half.
///
/// Validation configuration for the integrator; the asymptotic analytic
/// transfer is 1 - exp(-pi omega^2 / (2 rate)).
pub fn two_level_sweep_transfer<S: Real>(omega: S, rate: S, t_half: S, dt: S) -> Result<S> {
    if !(omega > S::zero()) || !(rate > S::zero()) || !(t_half > S::zero()) {
        return Err(CoreError::invalid("omega, rate, t_half must be > 0"));
    }
    let steps = ((S::two() * t_half / dt).ceil()).to_f64().unwrap() as usize;
    let mut psi = vec![Complex::new(S::one(), S::zero()), Complex::new(S::zero(), S::zero())];
    let half = S::half();
    let mut rhs = |t: S, y: &[Complex<S>], dy: &mut [Complex<S>]| {
        let c = omega * half;
        let e1 = -rate * t;
        // dpsi = -i H psi
        let h0 = y[1] * c;
        let h1 = y[0] * c + y[1] * e1;
        dy[0] = Complex::new(h0.im, -h0.re);
        dy[1] = Complex::new(h1.im, -h1.re);
    };
    ode::rk4(&mut psi, -t_half, dt, steps, &mut rhs, &mut |_, _, _| None)
        .map_err(|(t, reason)| CoreError::IntegrationFailure {
            last_good_t: t.to_f64().unwrap_or(f64::NAN),
            reason,
        })?;
    Ok(psi[1].norm_sqr())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn grid_construction() {
        let pulse = ChirpedPulse::<f64>::from_area_pi(20.0, 1.62, 40.0, 0.0).unwrap();
        let g = TimeGrid::spanning_pulse(&pulse, TimeGrid::default_dt(&pulse)).unwrap();
        assert!(g.t0 < -148.0 && g.t_end() > 148.0);
        assert!(TimeGrid::new(0.0, 1.0, -0.1).is_err());
        assert!(TimeGrid::new(1.0, 0.0, 0.1).is_err());
        let with_bath = TimeGrid::default_dt_with_bath(&pulse, 6.0);
        assert!((with_bath - 0.017232).abs() < 1e-5, "dt = {with_bath}");
    }

    #[test]
    fn landau_zener_analytic_agreement() {
        // 10-point (omega, rate) grid, 1% absolute tolerance
        let omegas = [0.25, 0.4, 0.6, 0.9, 1.3];
        let rates = [0.35, 0.8];
        for &w in &omegas {
            for &a in &rates {
                let expect = 1.0 - (-std::f64::consts::PI * w * w / (2.0 * a)).exp();
                let t_half: f64 = (30.0 * w + 60.0) / a;
                // keep the fastest phase step small: RK4 amplitude decay goes
                // like (omega dt)^6 per step at the sweep edges
                let dt = (0.04 / (a * t_half)).min(1e-3);
                let got = two_level_sweep_transfer(w, a, t_half, dt).unwrap();
                assert!(
                    (got - expect).abs() < 0.01,
                    "omega={w} rate={a}: got {got}, expect {expect}"
                );
            }
        }
    }
}
