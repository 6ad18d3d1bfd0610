//! Classical rate equation on the instantaneous dressed-state populations.
//!
//! Populations ride the branch labels (adiabatic transport through
//! anticrossings, diabatic through true crossings, both inherited from the
//! overlap continuation). Phonon transitions between branches i -> j enter
//! with Fermi-golden-rule rates
//!
//! Gamma_{i->j}(t) = 2 pi |M_ij(t)|^2 J(gap) (n(gap) + 1)   downhill,
//! Gamma_{i->j}(t) = 2 pi |M_ij(t)|^2 J(gap) n(gap)          uphill,
//!
//! where M_ij is the matrix element of the exciton-number coupling operator
//! diag(0, 1, 2) between the dressed states and `gap` the branch separation.

use super::{Recorder, TimeGrid, Trajectory};
use crate::dot::{DotModel, G};
use crate::dressed::{dressed_trajectory, DressedTrajectory};
use crate::error::{CoreError, Result};
use crate::phonon::{bose_occupation, PhononBath};
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Rate generator A at one node: dp_i/dt = sum_j A[i][j] p_j.
fn generator_at<S: Real>(
    traj: &DressedTrajectory<S>,
    bath: &PhononBath<S>,
    k: usize,
) -> [[S; 3]; 3] {
    let mut a = [[S::zero(); 3]; 3];
    let e = &traj.energies[k];
    let v = &traj.vectors[k];
    let two_pi = S::two() * S::PI();
    for i in 0..3 {
        for j in 0..3 {
            if i == j {
                continue;
            }
            let gap = e[i] - e[j];
            if gap.abs() <= S::of(1e-12) {
                continue;
            }
            // M_ij = <i| diag(0,1,2) |j>
            let m = v[1][i] * v[1][j] + S::two() * v[2][i] * v[2][j];
            let m2 = m * m;
            if m2 == S::zero() {
                continue;
            }
            let j_sd = bath.spectral_density_unchecked(gap.abs());
            if j_sd == S::zero() {
                continue;
            }
            let n = if bath.temperature > S::zero() {
                bose_occupation(gap.abs(), bath.temperature).unwrap_or(S::zero())
            } else {
                S::zero()
            };
            let rate = if gap > S::zero() {
                two_pi * m2 * j_sd * (n + S::one()) // emission i -> j
            } else {
                two_pi * m2 * j_sd * n // absorption i -> j
            };
            a[j][i] += rate;
            a[i][i] -= rate;
        }
    }
    a
}

/// Propagate dressed-branch populations with time-dependent phonon rates and
/// report bare-state occupations.
pub fn propagate_dressed_rates<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    bath: &PhononBath<S>,
    grid: &TimeGrid<S>,
) -> Result<Trajectory<S>> {
    let n_t = grid.steps + 1;
    let times: Vec<S> =
        (0..n_t).map(|k| grid.t0 + grid.dt * S::of(k as f64)).collect();
    let dressed = dressed_trajectory(dot, pulse, &times)?;

    // populations start on the branch carrying the ground state
    let g_branch = dressed
        .branch_of(G)
        .ok_or_else(|| CoreError::invalid("no branch with ground-state character"))?;
    let mut p = [S::zero(); 3];
    for b in 0..3 {
        p[b] = dressed.weights[0][b][G];
    }
    let _ = g_branch;

    let bare_populations = |k: usize, p: &[S; 3]| -> [S; 3] {
        let mut out = [S::zero(); 3];
        for s in 0..3 {
            for b in 0..3 {
                out[s] = out[s] + p[b] * dressed.weights[k][b][s];
            }
        }
        out
    };

    let mut rec = Recorder::with_capacity(n_t);
    if let Some(msg) = rec.push_populations(times[0], bare_populations(0, &p)) {
        return Err(CoreError::IntegrationFailure { last_good_t: times[0].to_f64().unwrap_or(f64::NAN), reason: msg });
    }

    let apply = |a: &[[S; 3]; 3], p: &[S; 3]| -> [S; 3] {
        let mut out = [S::zero(); 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i] = out[i] + a[i][j] * p[j];
            }
        }
        out
    };
    let mix = |a: &[[S; 3]; 3], b: &[[S; 3]; 3]| -> [[S; 3]; 3] {
        let mut out = [[S::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                out[i][j] = (a[i][j] + b[i][j]) * S::half();
            }
        }
        out
    };

    let mut a_k = generator_at(&dressed, bath, 0);
    let dt = grid.dt;
    let sixth = S::one() / S::of(6.0);
    let mut next_event = 0usize;
    for k in 0..grid.steps {
        // population exchange at branch approaches: the fraction not
        // following the label continuation hops branches (labels are
        // diabatic through crossings, adiabatic through anticrossings)
        while next_event < dressed.events.len()
            && dressed.events[next_event].time <= times[k + 1]
        {
            let ev = &dressed.events[next_event];
            if ev.time > times[k] {
                let f = match ev.kind {
                    crate::dressed::EventKind::Crossing => ev.adiabaticity,
                    crate::dressed::EventKind::Anticrossing => S::one() - ev.adiabaticity,
                };
                let (i, j) = ev.branches;
                let pi = p[i];
                let pj = p[j];
                p[i] = (S::one() - f) * pi + f * pj;
                p[j] = (S::one() - f) * pj + f * pi;
            }
            next_event += 1;
        }
        let a_next = generator_at(&dressed, bath, k + 1);
        let a_mid = mix(&a_k, &a_next);
        // RK4 with the generator linearly interpolated over the step
        let k1 = apply(&a_k, &p);
        let y2 = [p[0] + dt * S::half() * k1[0], p[1] + dt * S::half() * k1[1], p[2] + dt * S::half() * k1[2]];
        let k2 = apply(&a_mid, &y2);
        let y3 = [p[0] + dt * S::half() * k2[0], p[1] + dt * S::half() * k2[1], p[2] + dt * S::half() * k2[2]];
        let k3 = apply(&a_mid, &y3);
        let y4 = [p[0] + dt * k3[0], p[1] + dt * k3[1], p[2] + dt * k3[2]];
        let k4 = apply(&a_next, &y4);
        for i in 0..3 {
            p[i] = p[i] + dt * sixth * (k1[i] + S::two() * (k2[i] + k3[i]) + k4[i]);
        }
        a_k = a_next;
        if let Some(msg) = rec.push_populations(times[k + 1], bare_populations(k + 1, &p)) {
            return Err(CoreError::IntegrationFailure {
                last_good_t: times[k].to_f64().unwrap_or(f64::NAN),
                reason: msg,
            });
        }
    }
    Ok(rec.finish())
}
