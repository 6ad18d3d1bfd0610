//! Chirped Gaussian pulses and the folded-grating-stretcher dispersion.
//!
//! Conventions: the field-envelope standard deviation `sigma` is the primary
//! duration; intensity-FWHM views are `tau = 2*sqrt(ln 2)*sigma`. Pulse areas
//! are in radians. Group delay dispersion (GDD) `phi2` is in ps².

use num_complex::Complex;

use crate::consts;
use crate::error::{CoreError, Result};
use crate::real::Real;

/// Number of standard deviations after which the envelope is treated as
/// exactly zero. Truncates the pulse area below 1e-7 relative.
pub const SUPPORT_SIGMAS: f64 = 6.0;

/// A transform-limited or chirped Gaussian pulse in the rotating frame of its
/// central frequency.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct ChirpedPulse<S> {
    /// Nominal pulse area of the transform-limited pulse, rad.
    pub theta_nominal: S,
    /// Transform-limited field-envelope standard deviation, ps.
    pub sigma0: S,
    /// Group delay dispersion phi2, ps².
    pub gdd: S,
    /// Detuning of the central laser frequency from the two-photon
    /// resonance, Delta = hbar*(omega_c - omega_TPE), meV.
    pub detuning: S,
    /// Chirped field-envelope standard deviation, ps.
    pub sigma: S,
    /// Temporal chirp rate a, rad/ps².
    pub chirp_rate: S,
    /// Time-integrated area of the chirped envelope, rad.
    pub theta_effective: S,
}

impl<S: Real> ChirpedPulse<S> {
    /// Build a pulse and populate the derived quantities.
    ///
    /// The temporal chirp is `a = phi2 / (phi2^2 + sigma0^4)`. (A variant
    /// with `sigma0^2` in the denominator circulates but is dimensionally
    /// inconsistent in ps-units; the `sigma0^4` form is used throughout.)
    pub fn new(theta_nominal: S, sigma0: S, gdd: S, detuning: S) -> Result<Self> {
        if !(sigma0 > S::zero()) || !sigma0.is_finite() {
            return Err(CoreError::invalid(format!("sigma0 must be > 0, got {sigma0}")));
        }
        if theta_nominal < S::zero() || !theta_nominal.is_finite() {
            return Err(CoreError::invalid(format!(
                "theta_nominal must be >= 0, got {theta_nominal}"
            )));
        }
        if !gdd.is_finite() || !detuning.is_finite() {
            return Err(CoreError::invalid("gdd and detuning must be finite"));
        }
        let sigma = (sigma0 * sigma0 + (gdd / sigma0) * (gdd / sigma0)).sqrt();
        let chirp_rate = if gdd == S::zero() {
            S::zero()
        } else {
            gdd / (gdd * gdd + sigma0.powi(4))
        };
        let theta_effective = theta_nominal * (sigma / sigma0).sqrt();
        Ok(Self { theta_nominal, sigma0, gdd, detuning, sigma, chirp_rate, theta_effective })
    }

    /// Pulse area given in multiples of pi.
    pub fn from_area_pi(theta_pi: S, sigma0: S, gdd: S, detuning: S) -> Result<Self> {
        Self::new(theta_pi * S::PI(), sigma0, gdd, detuning)
    }

    /// Intensity FWHM of the transform-limited pulse, ps.
    pub fn tau0(&self) -> S {
        S::two() * S::LN_2().sqrt() * self.sigma0
    }

    /// Intensity FWHM of the chirped pulse, ps.
    pub fn tau_p(&self) -> S {
        S::two() * S::LN_2().sqrt() * self.sigma
    }

    /// Peak Rabi amplitude Theta / sqrt(2 pi sigma sigma0), rad/ps.
    pub fn peak_rabi(&self) -> S {
        self.theta_nominal / (S::two() * S::PI() * self.sigma * self.sigma0).sqrt()
    }

    /// Half-width of the support window outside which the envelope is zero, ps.
    pub fn support(&self) -> S {
        S::of(SUPPORT_SIGMAS) * self.sigma
    }

    /// Complex Rabi amplitude Omega_X(t) in the rotating frame of the central
    /// laser frequency, rad/ps. Exactly zero for |t| > 6 sigma.
    pub fn envelope_at(&self, t: S) -> Complex<S> {
        if t.abs() > self.support() {
            return Complex::new(S::zero(), S::zero());
        }
        let mag = self.peak_rabi() * (-(t * t) / (S::two() * self.sigma * self.sigma)).exp();
        let phase = -self.chirp_rate * S::half() * t * t;
        Complex::from_polar(mag, phase)
    }

    /// Envelope magnitude |Omega_X(t)|, rad/ps.
    pub fn envelope_mag(&self, t: S) -> S {
        if t.abs() > self.support() {
            return S::zero();
        }
        self.peak_rabi() * (-(t * t) / (S::two() * self.sigma * self.sigma)).exp()
    }

    /// Instantaneous laser detuning from the two-photon resonance,
    /// delta(t) = Delta/hbar + a*t, rad/ps.
    pub fn instantaneous_detuning(&self, t: S) -> S {
        self.detuning / consts::hbar::<S>() + self.chirp_rate * t
    }

    /// Candidate transform-limited durations consistent with a stretched
    /// duration and a GDD, sorted ascending.
    ///
    /// `sigma^2 = sigma0^2 + (gdd/sigma0)^2` is quadratic in `sigma0^2`, so a
    /// stretched pulse generally has two transform-limited preimages (a short
    /// pulse strongly stretched and a long one barely stretched).
    pub fn sigma0_candidates(sigma: S, gdd: S) -> Result<(S, S)> {
        if !(sigma > S::zero()) {
            return Err(CoreError::invalid("sigma must be > 0"));
        }
        let s2 = sigma * sigma;
        let disc = s2 * s2 - S::of(4.0) * gdd * gdd;
        if disc < S::zero() {
            return Err(CoreError::invalid("no transform-limited pulse: sigma^2 < 2|gdd|"));
        }
        let root = disc.sqrt();
        let hi = ((s2 + root) * S::half()).sqrt();
        // product of the two roots equals |gdd|, which avoids cancellation
        let lo = if hi > S::zero() { gdd.abs() / hi } else { S::zero() };
        Ok((lo, hi))
    }
}

/// GDD of a folded (double-pass) single-grating stretcher, ps².
///
/// `lambda0_nm`: central wavelength (nm); `focal_mm`: lens focal length (mm);
/// `grating_mm`: lens-grating distance s (mm); `grooves_per_mm`: groove
/// density (1/mm); `incidence_deg`: angle of incidence (degrees).
///
/// phi2 = -lambda0^3 * L_g / (pi c^2 d^2) * [1 - (lambda/d - sin theta_i)^2]^(-3/2)
/// with the effective grating distance L_g = -2 (f - s).
pub fn stretcher_gdd<S: Real>(
    lambda0_nm: S,
    focal_mm: S,
    grating_mm: S,
    grooves_per_mm: S,
    incidence_deg: S,
) -> Result<S> {
    if !(grooves_per_mm > S::zero()) {
        return Err(CoreError::invalid("groove density must be > 0"));
    }
    if !(focal_mm > S::zero()) {
        return Err(CoreError::invalid("focal length must be > 0"));
    }
    if !(lambda0_nm > S::zero()) {
        return Err(CoreError::invalid("wavelength must be > 0"));
    }
    let lambda = lambda0_nm * S::of(1e-9); // m
    let d = S::of(1e-3) / grooves_per_mm; // m
    let theta = incidence_deg * S::PI() / S::of(180.0);
    let bracket = lambda / d - theta.sin();
    if !(bracket > S::zero() && bracket < S::one()) {
        return Err(CoreError::EvanescentOrder {
            bracket: bracket.to_f64().unwrap_or(f64::NAN),
        });
    }
    let lg = -S::two() * (focal_mm - grating_mm) * S::of(1e-3); // m
    let c = S::of(consts::C_LIGHT);
    let geom = (S::one() - bracket * bracket).powf(-S::of(1.5));
    let phi2_s2 = -(lambda.powi(3) * lg) / (S::PI() * c * c * d * d) * geom;
    Ok(phi2_s2 * S::of(1e24)) // s² -> ps²
}
