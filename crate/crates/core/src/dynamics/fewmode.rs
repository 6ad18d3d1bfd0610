//! Exact propagation in a truncated system ⊗ Fock Hilbert space.
//!
//! Brute-force oracle for small mode counts: the driven three-level system is
//! coupled to a handful of explicit phonon modes with at most `n_max` quanta
//! each, and the Schrödinger equation is integrated in the product space.
//! Finite temperature is handled by mixing propagations of thermally weighted
//! initial Fock states. Uses the same polaron-shift convention as the
//! correlation expansion.

use num_complex::Complex;

use super::{ode, Recorder, TimeGrid, Trajectory};
use crate::consts;
use crate::dot::DotModel;
use crate::error::{CoreError, Result};
use crate::phonon::BathModes;
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Hard caps from the oracle's intended scale.
pub const MAX_MODES: usize = 4;
pub const MAX_QUANTA: usize = 6;

#[derive(Clone, Debug)]
pub struct FewModeOptions<S> {
    /// Initial system state vector; ground state if `None`.
    pub initial_psi: Option<[Complex<S>; 3]>,
    /// Thermal Fock tuples with weight below this are dropped (the kept set
    /// is renormalized).
    pub weight_cutoff: S,
    /// Hilbert-space dimension cap.
    pub dim_cap: usize,
}

impl<S: Real> Default for FewModeOptions<S> {
    fn default() -> Self {
        Self { initial_psi: None, weight_cutoff: S::of(1e-12), dim_cap: 3 * 7usize.pow(4) }
    }
}

/// Propagate exactly in the truncated product space.
pub fn propagate_fewmode_exact<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    modes: &BathModes<S>,
    n_max: usize,
    grid: &TimeGrid<S>,
) -> Result<Trajectory<S>> {
    propagate_fewmode_exact_with(dot, pulse, modes, n_max, grid, &FewModeOptions::default())
}

pub fn propagate_fewmode_exact_with<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    modes: &BathModes<S>,
    n_max: usize,
    grid: &TimeGrid<S>,
    opts: &FewModeOptions<S>,
) -> Result<Trajectory<S>> {
    let m = modes.len();
    if m > MAX_MODES {
        return Err(CoreError::invalid(format!("at most {MAX_MODES} explicit modes, got {m}")));
    }
    if n_max > MAX_QUANTA {
        return Err(CoreError::invalid(format!("at most {MAX_QUANTA} quanta per mode")));
    }
    let levels = n_max + 1;
    let fdim = levels.pow(m as u32);
    let dim = 3 * fdim;
    if dim > opts.dim_cap {
        return Err(CoreError::DimensionCap { dim, cap: opts.dim_cap });
    }

    let kappa: Vec<S> = modes.g.clone();
    let nu: Vec<S> = modes.omega_mev.iter().map(|&e| consts::mev_to_radps(e)).collect();
    let s1h: S = kappa
        .iter()
        .zip(&nu)
        .map(|(&k, &v)| if v > S::zero() { k * k / v } else { S::zero() })
        .sum();
    let hb2 = dot.binding_energy * S::half() / consts::hbar::<S>();
    let shift = [S::zero(), s1h, S::of(4.0) * s1h];

    // mode occupation of each Fock index, and free phonon energy
    let mut occ_of = vec![[0usize; MAX_MODES]; fdim];
    let mut free_nu = vec![S::zero(); fdim];
    for f in 0..fdim {
        let mut rem = f;
        let mut e = S::zero();
        for k in 0..m {
            let n = rem % levels;
            rem /= levels;
            occ_of[f][k] = n;
            e = e + nu[k] * S::of(n as f64);
        }
        free_nu[f] = e;
    }
    let sqrt_n: Vec<S> = (0..=levels).map(|n| S::of(n as f64).sqrt()).collect();
    let mut stride = [0usize; MAX_MODES];
    for k in 0..m {
        stride[k] = 3 * levels.pow(k as u32);
    }

    // thermal initial mixture over Fock tuples
    let occ_th = modes.occupations()?;
    let mut tuples: Vec<(usize, S)> = Vec::new();
    let mut total_w = S::zero();
    for f in 0..fdim {
        let mut w = S::one();
        for k in 0..m {
            let x = if occ_th[k] > S::zero() {
                occ_th[k] / (S::one() + occ_th[k]) // e^{-E/kT}
            } else {
                S::zero()
            };
            let p = (S::one() - x) * x.powi(occ_of[f][k] as i32);
            w = w * p;
        }
        if w > opts.weight_cutoff {
            tuples.push((f, w));
            total_w = total_w + w;
        }
    }
    if tuples.is_empty() {
        tuples.push((0, S::one()));
        total_w = S::one();
    }

    let psi_sys = opts.initial_psi.unwrap_or([
        Complex::new(S::one(), S::zero()),
        Complex::new(S::zero(), S::zero()),
        Complex::new(S::zero(), S::zero()),
    ]);

    let n_t = grid.steps + 1;
    let zero = Complex::new(S::zero(), S::zero());
    // accumulated reduced density matrix per time step
    let mut rho_acc = vec![[zero; 9]; n_t];
    let mut times = vec![S::zero(); n_t];

    for &(f0, w) in &tuples {
        let weight = w / total_w;
        let mut psi = vec![zero; dim];
        for s in 0..3 {
            psi[3 * f0 + s] = psi_sys[s];
        }
        let mut rhs = |t: S, y: &[Complex<S>], dy: &mut [Complex<S>]| {
            let delta = pulse.instantaneous_detuning(t);
            let e = [
                shift[0],
                hb2 + shift[1] - delta,
                shift[2] - S::two() * delta,
            ];
            let o = -pulse.envelope_mag(t) * S::half();
            for f in 0..fdim {
                let base = 3 * f;
                let pg = y[base];
                let px = y[base + 1];
                let pxx = y[base + 2];
                let ef = free_nu[f];
                // H psi, system part
                let mut hg = pg * (e[0] + ef) + px * o;
                let mut hx = px * (e[1] + ef) + (pg + pxx) * o;
                let mut hxx = pxx * (e[2] + ef) + px * o;
                // phonon coupling: n_s * sum_k kappa_k (sqrt(n) psi_- + sqrt(n+1) psi_+)
                for k in 0..m {
                    let n = occ_of[f][k];
                    let mut amp_x = zero;
                    let mut amp_xx = zero;
                    if n > 0 {
                        let lower = base - stride[k];
                        let fac = kappa[k] * sqrt_n[n];
                        amp_x += y[lower + 1] * fac;
                        amp_xx += y[lower + 2] * fac;
                    }
                    if n + 1 < levels {
                        let upper = base + stride[k];
                        let fac = kappa[k] * sqrt_n[n + 1];
                        amp_x += y[upper + 1] * fac;
                        amp_xx += y[upper + 2] * fac;
                    }
                    hx += amp_x;
                    hxx += amp_xx * S::two();
                }
                let _ = &mut hg;
                dy[base] = Complex::new(hg.im, -hg.re);
                dy[base + 1] = Complex::new(hx.im, -hx.re);
                dy[base + 2] = Complex::new(hxx.im, -hxx.re);
            }
        };
        let mut observe = |step: usize, t: S, y: &[Complex<S>]| {
            times[step] = t;
            let acc = &mut rho_acc[step];
            let mut norm = S::zero();
            for f in 0..fdim {
                let base = 3 * f;
                for s in 0..3 {
                    for r in 0..3 {
                        acc[3 * s + r] += y[base + s] * y[base + r].conj() * weight;
                    }
                    norm = norm + y[base + s].norm_sqr();
                }
            }
            if !norm.is_finite() {
                return Some("non-finite norm".to_string());
            }
            None
        };
        ode::rk4(&mut psi, grid.t0, grid.dt, grid.steps, &mut rhs, &mut observe).map_err(
            |(t, reason)| CoreError::IntegrationFailure {
                last_good_t: t.to_f64().unwrap_or(f64::NAN),
                reason,
            },
        )?;
    }

    let mut rec = Recorder::with_capacity(n_t);
    for (k, rho) in rho_acc.iter().enumerate() {
        if let Some(msg) = rec.push_rho(times[k], rho) {
            return Err(CoreError::IntegrationFailure {
                last_good_t: times[k].to_f64().unwrap_or(f64::NAN),
                reason: msg,
            });
        }
    }
    Ok(rec.finish())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::hierarchy::{propagate_correlation_expansion, HierarchyOptions};
    use crate::dynamics::propagate_unitary;

    type Dot = DotModel<f64>;
    type Pulse = ChirpedPulse<f64>;

    #[test]
    fn zero_modes_equal_unitary() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(6.0, 2.0, 6.0, 0.1).unwrap();
        let grid = TimeGrid::spanning_pulse(&pulse, 0.002).unwrap();
        let unit = propagate_unitary(&dot, &pulse, &grid).unwrap();
        let empty = BathModes::from_list(&[], 0.0);
        let few = propagate_fewmode_exact(&dot, &pulse, &empty, 3, &grid).unwrap();
        for s in 0..3 {
            assert!(
                (unit.final_populations[s] - few.final_populations[s]).abs() < 1e-10,
                "state {s}: {:?} vs {:?}",
                unit.final_populations,
                few.final_populations
            );
        }
    }

    #[test]
    fn weak_coupling_two_modes_match_hierarchy() {
        // reference point: the exact oracle bounds the truncation error
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(8.0, 1.62, 10.0, 0.3).unwrap();
        let modes = BathModes::from_list(&[(0.8, 0.05), (1.2, 0.05)], 0.0);
        let grid = TimeGrid::spanning_pulse(
            &pulse,
            TimeGrid::default_dt_with_bath(&pulse, 1.2),
        )
        .unwrap();
        let exact = propagate_fewmode_exact(&dot, &pulse, &modes, 4, &grid).unwrap();
        let hier = propagate_correlation_expansion(
            &dot,
            &pulse,
            &modes,
            &grid,
            &HierarchyOptions::default(),
        )
        .unwrap();
        for s in 0..3 {
            let d = (exact.final_populations[s] - hier.final_populations[s]).abs();
            assert!(d < 0.02, "state {s}: exact {:?} vs hierarchy {:?}", exact.final_populations, hier.final_populations);
        }
    }

    #[test]
    fn quanta_cutoff_converged_at_weak_coupling() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(8.0, 1.62, 10.0, 0.3).unwrap();
        let modes = BathModes::from_list(&[(0.8, 0.05), (1.2, 0.05)], 0.0);
        let grid = TimeGrid::spanning_pulse(
            &pulse,
            TimeGrid::default_dt_with_bath(&pulse, 1.2),
        )
        .unwrap();
        let four = propagate_fewmode_exact(&dot, &pulse, &modes, 4, &grid).unwrap();
        let six = propagate_fewmode_exact(&dot, &pulse, &modes, 6, &grid).unwrap();
        for s in 0..3 {
            assert!(
                (four.final_populations[s] - six.final_populations[s]).abs() < 1e-3,
                "state {s}"
            );
        }
    }

    #[test]
    fn caps_are_enforced() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(1.0, 1.0, 0.0, 0.0).unwrap();
        let grid = TimeGrid::spanning_pulse(&pulse, 0.1).unwrap();
        let five = BathModes::from_list(
            &[(0.5, 0.01), (0.6, 0.01), (0.7, 0.01), (0.8, 0.01), (0.9, 0.01)],
            0.0,
        );
        assert!(propagate_fewmode_exact(&dot, &pulse, &five, 2, &grid).is_err());
        let two = BathModes::from_list(&[(0.5, 0.01), (0.6, 0.01)], 0.0);
        assert!(propagate_fewmode_exact(&dot, &pulse, &two, 7, &grid).is_err());
        let opts = FewModeOptions { dim_cap: 10, ..Default::default() };
        assert!(matches!(
            propagate_fewmode_exact_with(&dot, &pulse, &two, 4, &grid, &opts),
            Err(CoreError::DimensionCap { .. })
        ));
    }

    #[test]
    fn thermal_mixture_sums_to_unit_trace() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(4.0, 1.62, 5.0, 0.0).unwrap();
        // soft mode with appreciable occupation at 2 K
        let modes = BathModes::from_list(&[(0.15, 0.03)], 2.0);
        let grid = TimeGrid::spanning_pulse(&pulse, 0.01).unwrap();
        let traj = propagate_fewmode_exact(&dot, &pulse, &modes, 6, &grid).unwrap();
        assert!(traj.trace_defect < 1e-6, "trace defect {}", traj.trace_defect);
        assert!(traj.min_eigenvalue > -1e-6);
    }

    #[test]
    fn independent_boson_dephasing_matches_analytic() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(0.0, 1.0, 0.0, 0.0).unwrap();
        let grid = TimeGrid::new(0.0, 10.0, 0.004).unwrap();
        let modes = BathModes::from_list(&[(0.9, 0.12), (1.4, 0.10)], 0.0);
        let s = 0.5f64.sqrt();
        let opts = FewModeOptions {
            initial_psi: Some([
                Complex::new(s, 0.0),
                Complex::new(s, 0.0),
                Complex::new(0.0, 0.0),
            ]),
            ..Default::default()
        };
        let traj =
            propagate_fewmode_exact_with(&dot, &pulse, &modes, 6, &grid, &opts).unwrap();
        for (k, &t) in traj.times.iter().enumerate().step_by(200) {
            let mut gamma = 0.0;
            for (i, &e) in modes.omega_mev.iter().enumerate() {
                let nu = e / consts::HBAR_MEV_PS;
                let r = modes.g[i] / nu;
                gamma += r * r * (1.0 - (nu * t).cos());
            }
            let expect = 0.5 * (-gamma).exp();
            let got = traj.coherences[k][0];
            assert!((got - expect).abs() < 1e-6, "t={t}: got {got}, expect {expect}");
        }
    }
}
