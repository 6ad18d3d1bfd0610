//! Longitudinal-acoustic phonon environment: deformation-potential spectral
//! density, linear-grid mode discretization, thermal occupations and the
//! polaron shift.
//!
//! The pure-dephasing coupling acts on the exciton number, i.e. with factor 1
//! on |x> and factor 2 on |xx>; the propagators own that operator, this
//! module only describes the bath.

use crate::consts::{self, HBAR_MEV_PS};
use crate::error::{CoreError, Result};
use crate::real::Real;

/// Bulk GaAs mass density, kg/m³.
pub const GAAS_MASS_DENSITY: f64 = 5370.0;
/// Longitudinal sound velocity in GaAs, m/s.
pub const GAAS_SOUND_VELOCITY: f64 = 5110.0;
/// Electron deformation potential, eV.
pub const GAAS_DEFORMATION_E: f64 = 7.0;
/// Hole deformation potential, eV.
pub const GAAS_DEFORMATION_H: f64 = -3.5;

/// Localization length (nm) for which the spectral density of a dot with
/// equal electron/hole envelopes peaks at `peak_mev`.
///
/// For a_e = a_h = a the spectral density reduces to
/// omega^3 * exp(-omega^2 a^2 / (2 v^2)) whose maximum sits at
/// omega* = sqrt(3) v / a.
pub fn localization_for_peak(peak_mev: f64) -> f64 {
    let v_nm_ps = GAAS_SOUND_VELOCITY * 1e-3; // nm/ps
    3f64.sqrt() * HBAR_MEV_PS * v_nm_ps / peak_mev
}

/// LA-phonon bath of a spherical GaAs-like quantum dot.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct PhononBath<S> {
    /// Mass density, kg/m³.
    pub mass_density: S,
    /// Longitudinal sound velocity, m/s.
    pub sound_velocity: S,
    /// Electron deformation potential, eV.
    pub deformation_e: S,
    /// Hole deformation potential, eV.
    pub deformation_h: S,
    /// Electron localization length, nm.
    pub loc_e: S,
    /// Hole localization length, nm.
    pub loc_h: S,
    /// Lattice temperature, K.
    pub temperature: S,
    /// Number of discretized modes.
    pub n_modes: usize,
    /// Discretization cutoff, meV.
    pub omega_max: S,
}

impl<S: Real> Default for PhononBath<S> {
    /// GaAs defaults for a ~5 nm dot, localization calibrated so that the
    /// spectral density peaks at 1.2 meV; T = 1 K, 128 modes up to 6 meV.
    fn default() -> Self {
        let a = S::of(localization_for_peak(1.2));
        Self {
            mass_density: S::of(GAAS_MASS_DENSITY),
            sound_velocity: S::of(GAAS_SOUND_VELOCITY),
            deformation_e: S::of(GAAS_DEFORMATION_E),
            deformation_h: S::of(GAAS_DEFORMATION_H),
            loc_e: a,
            loc_h: a,
            temperature: S::one(),
            n_modes: 128,
            omega_max: S::of(6.0),
        }
    }
}

impl<S: Real> PhononBath<S> {
    pub fn with_temperature(mut self, t: S) -> Self {
        self.temperature = t;
        self
    }

    pub fn with_modes(mut self, n_modes: usize, omega_max: S) -> Self {
        self.n_modes = n_modes;
        self.omega_max = omega_max;
        self
    }

    /// Bath with the couplings switched off (unitary limit).
    pub fn decoupled(mut self) -> Self {
        self.deformation_e = S::zero();
        self.deformation_h = S::zero();
        self
    }

    /// Phonon spectral density J(omega) in 1/ps at energy `omega_mev`.
    ///
    /// J = omega^3 / (4 pi^2 rho hbar v^5)
    ///     * (D_e exp(-omega^2 a_e^2/(4 v^2)) - D_h exp(-omega^2 a_h^2/(4 v^2)))^2
    pub fn spectral_density(&self, omega_mev: S) -> Result<S> {
        if omega_mev < S::zero() {
            return Err(CoreError::invalid(format!("omega must be >= 0, got {omega_mev}")));
        }
        Ok(self.spectral_density_unchecked(omega_mev))
    }

    /// As [`Self::spectral_density`] but clamping negative arguments to zero;
    /// used in rate expressions where gaps can touch zero.
    pub fn spectral_density_unchecked(&self, omega_mev: S) -> S {
        if omega_mev <= S::zero() {
            return S::zero();
        }
        // SI evaluation, converted to 1/ps at the end.
        let mev_to_j = S::of(consts::E_CHARGE * 1e-3);
        let hbar_si = S::of(consts::HBAR_SI);
        let omega = omega_mev * mev_to_j / hbar_si; // rad/s
        let v = self.sound_velocity; // m/s
        let de = self.deformation_e * S::of(consts::E_CHARGE); // J
        let dh = self.deformation_h * S::of(consts::E_CHARGE);
        let ae = self.loc_e * S::of(1e-9); // m
        let ah = self.loc_h * S::of(1e-9);
        let four = S::of(4.0);
        let quad = |a: S| (-(omega * omega * a * a) / (four * v * v)).exp();
        let form = de * quad(ae) - dh * quad(ah);
        let denom = four * S::PI() * S::PI() * self.mass_density * hbar_si * v.powi(5);
        let j_si = omega.powi(3) / denom * form * form; // 1/s
        j_si * S::of(1e-12)
    }

    /// Discretize the continuum on a linear grid over (0, omega_max].
    ///
    /// Mode energies sit at k * omega_max / n for k = 1..=n and couplings obey
    /// |g_q|^2 = J(omega_q) * d_omega / hbar, so that sums over modes
    /// approximate angular-frequency integrals of J.
    pub fn discretize(&self) -> Result<BathModes<S>> {
        if self.n_modes == 0 {
            return Ok(BathModes { omega_mev: Vec::new(), g: Vec::new(), temperature: self.temperature });
        }
        if !(self.omega_max > S::zero()) {
            return Err(CoreError::invalid(format!(
                "omega_max must be > 0, got {}",
                self.omega_max
            )));
        }
        let n = self.n_modes;
        let de = self.omega_max / S::of(n as f64);
        let mut omega_mev = Vec::with_capacity(n);
        let mut g = Vec::with_capacity(n);
        for k in 1..=n {
            let e = de * S::of(k as f64);
            let j = self.spectral_density_unchecked(e);
            omega_mev.push(e);
            g.push((j * de / consts::hbar::<S>()).sqrt());
        }
        Ok(BathModes { omega_mev, g, temperature: self.temperature })
    }

    /// Static polaron shift n_excitons^2 * hbar * integral(J(omega)/omega),
    /// in meV, by adaptive quadrature of the continuum spectral density.
    pub fn polaron_shift(&self, n_excitons: u8) -> Result<S> {
        if !(n_excitons == 1 || n_excitons == 2) {
            return Err(CoreError::invalid("n_excitons must be 1 or 2"));
        }
        // J/omega ~ omega^2 near zero; integrate over the discretization
        // support plus the Gaussian tail region.
        let upper = self.omega_max.max(S::of(12.0));
        let f = |e: S| {
            if e <= S::zero() {
                S::zero()
            } else {
                self.spectral_density_unchecked(e) / e
            }
        };
        let integral = adaptive_simpson(&f, S::zero(), upper, S::of(1e-12), 24);
        let shift1 = consts::hbar::<S>() * integral;
        let n = S::of(n_excitons as f64);
        Ok(n * n * shift1)
    }
}

/// Discretized bath: mode energies (meV) and coupling amplitudes (1/ps).
#[derive(Clone, Debug, PartialEq)]
pub struct BathModes<S> {
    pub omega_mev: Vec<S>,
    pub g: Vec<S>,
    /// Temperature carried along for thermal initial conditions, K.
    pub temperature: S,
}

impl<S: Real> BathModes<S> {
    pub fn len(&self) -> usize {
        self.omega_mev.len()
    }

    pub fn is_empty(&self) -> bool {
        self.omega_mev.is_empty()
    }

    /// Hand-built mode list, e.g. for few-mode oracles.
    pub fn from_list(modes: &[(S, S)], temperature: S) -> Self {
        Self {
            omega_mev: modes.iter().map(|m| m.0).collect(),
            g: modes.iter().map(|m| m.1).collect(),
            temperature,
        }
    }

    /// Sum of |g_q|^2, 1/ps².
    pub fn coupling_weight(&self) -> S {
        self.g.iter().map(|&g| g * g).sum()
    }

    /// Single-exciton polaron shift hbar * sum(g^2 / omega) of this mode
    /// list, meV. The multi-exciton shift scales with the square of the
    /// exciton number.
    pub fn polaron_shift_single(&self) -> S {
        let hbar = consts::hbar::<S>();
        self.omega_mev
            .iter()
            .zip(&self.g)
            .map(|(&e, &g)| {
                if e > S::zero() {
                    hbar * hbar * g * g / e
                } else {
                    S::zero()
                }
            })
            .sum()
    }

    /// Thermal occupation of each mode.
    pub fn occupations(&self) -> Result<Vec<S>> {
        self.omega_mev.iter().map(|&e| bose_occupation(e, self.temperature)).collect()
    }
}

/// Bose-Einstein occupation of a mode at energy `omega_mev` and temperature
/// `temperature` (K); zero at T = 0.
pub fn bose_occupation<S: Real>(omega_mev: S, temperature: S) -> Result<S> {
    if !(omega_mev > S::zero()) {
        return Err(CoreError::invalid(format!(
            "bose occupation diverges at omega = {omega_mev}"
        )));
    }
    if temperature < S::zero() {
        return Err(CoreError::invalid("temperature must be >= 0"));
    }
    if temperature == S::zero() {
        return Ok(S::zero());
    }
    let x = omega_mev / (consts::kb::<S>() * temperature);
    Ok((x.exp_m1()).recip())
}

/// Adaptive Simpson quadrature on [a, b].
pub(crate) fn adaptive_simpson<S: Real>(
    f: &impl Fn(S) -> S,
    a: S,
    b: S,
    tol: S,
    depth: usize,
) -> S {
    fn simpson<S: Real>(f: &impl Fn(S) -> S, a: S, m: S, b: S) -> S {
        (b - a) / S::of(6.0) * (f(a) + S::of(4.0) * f(m) + f(b))
    }
    fn rec<S: Real>(
        f: &impl Fn(S) -> S,
        a: S,
        m: S,
        b: S,
        whole: S,
        tol: S,
        depth: usize,
    ) -> S {
        let lm = (a + m) * S::half();
        let rm = (m + b) * S::half();
        let left = simpson(f, a, lm, m);
        let right = simpson(f, m, rm, b);
        let err = left + right - whole;
        if depth == 0 || err.abs() <= S::of(15.0) * tol {
            left + right + err / S::of(15.0)
        } else {
            rec(f, a, lm, m, left, tol * S::half(), depth - 1)
                + rec(f, m, rm, b, right, tol * S::half(), depth - 1)
        }
    }
    let m = (a + b) * S::half();
    rec(f, a, m, b, simpson(f, a, m, b), tol, depth)
}
