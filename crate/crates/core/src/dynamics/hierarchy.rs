//! Correlation expansion of the exciton-phonon problem.
//!
//! Tracks the system density matrix together with phonon-assisted matrices
//!
//! * `B_q  = Tr_ph(b_q R)`          (one phonon),
//! * `C_qp = Tr_ph(b_q b_p R)`      (two phonons, symmetric in q, p),
//! * `D_qp = Tr_ph(b†_q b_p R)`     (two phonons, `D_qp† = D_pq`),
//!
//! each a 3×3 matrix over the system indices. Moments with three phonon
//! operators are factorized into thermal bath pairings times one-phonon
//! matrices (connected three-phonon correlations dropped), which closes the
//! hierarchy at the two-phonon level. The coupling operator is the exciton
//! number n = diag(0, 1, 2).
//!
//! The static polaron shift of the discretized modes is added back to the
//! exciton/biexciton diagonals (with factors 1 and 4) so that the effective
//! transition energies match the phonon-free model.

use num_complex::Complex;

use super::kernels::{minus_i_comm_tridiag, rotate_add};
use super::{ode, Recorder, TimeGrid, Trajectory};
use crate::consts;
use crate::dot::DotModel;
use crate::error::{CoreError, Result};
use crate::phonon::BathModes;
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Highest phonon-assisted tier kept in the equations of motion.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum TruncationOrder {
    /// Keep only `B_q`; two-phonon moments are factorized thermally.
    OnePhonon,
    /// Keep `B_q`, `C_qp`, `D_qp` (fourth-order Born level). Default.
    TwoPhonon,
}

#[derive(Clone, Debug)]
pub struct HierarchyOptions<S> {
    pub truncation: TruncationOrder,
    /// Upper bound on the propagation working set, bytes.
    pub memory_cap_bytes: usize,
    /// Initial system density matrix (flat 3×3); ground state if `None`.
    pub initial_rho: Option<[Complex<S>; 9]>,
}

impl<S: Real> Default for HierarchyOptions<S> {
    fn default() -> Self {
        Self {
            truncation: TruncationOrder::TwoPhonon,
            memory_cap_bytes: 256 * 1024 * 1024,
            initial_rho: None,
        }
    }
}

/// Flat layout of the hierarchy state vector.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub struct HierarchyLayout {
    pub n_modes: usize,
    pub n_pairs: usize,
    pub two_phonon: bool,
}

impl HierarchyLayout {
    fn new(n_modes: usize, truncation: TruncationOrder) -> Self {
        let two_phonon = matches!(truncation, TruncationOrder::TwoPhonon) && n_modes > 0;
        let n_pairs = if two_phonon { n_modes * (n_modes + 1) / 2 } else { 0 };
        Self { n_modes, n_pairs, two_phonon }
    }

    /// Number of complex entries in the state vector.
    pub fn len(&self) -> usize {
        9 * (1 + self.n_modes + 2 * self.n_pairs)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    #[inline]
    fn b_off(&self, q: usize) -> usize {
        9 * (1 + q)
    }

    /// Triangular pair index for q <= p.
    #[inline]
    fn pair(&self, q: usize, p: usize) -> usize {
        debug_assert!(q <= p);
        q * self.n_modes - q * (q + 1) / 2 + p
    }

    #[inline]
    fn c_off(&self, q: usize, p: usize) -> usize {
        9 * (1 + self.n_modes + self.pair(q, p))
    }

    #[inline]
    fn d_off(&self, q: usize, p: usize) -> usize {
        9 * (1 + self.n_modes + self.n_pairs + self.pair(q, p))
    }
}

/// Full hierarchy state at one instant.
#[derive(Clone, Debug)]
pub struct HierarchyState<S> {
    pub time: S,
    pub layout: HierarchyLayout,
    pub data: Vec<Complex<S>>,
}

impl<S: Real> HierarchyState<S> {
    pub fn rho(&self) -> [Complex<S>; 9] {
        self.data[0..9].try_into().unwrap()
    }

    /// One-phonon-assisted matrix `B_q`.
    pub fn one_phonon(&self, q: usize) -> [Complex<S>; 9] {
        let off = self.layout.b_off(q);
        self.data[off..off + 9].try_into().unwrap()
    }

    /// Two-phonon matrix `C_qp` (any index order; symmetric).
    pub fn two_phonon_bb(&self, q: usize, p: usize) -> [Complex<S>; 9] {
        let (a, b) = if q <= p { (q, p) } else { (p, q) };
        let off = self.layout.c_off(a, b);
        self.data[off..off + 9].try_into().unwrap()
    }

    /// Two-phonon matrix `D_qp` (any index order; `D_qp = D_pq†`).
    pub fn two_phonon_bdag_b(&self, q: usize, p: usize) -> [Complex<S>; 9] {
        if q <= p {
            let off = self.layout.d_off(q, p);
            self.data[off..off + 9].try_into().unwrap()
        } else {
            let off = self.layout.d_off(p, q);
            let m = &self.data[off..off + 9];
            let mut out = [Complex::new(S::zero(), S::zero()); 9];
            for i in 0..3 {
                for j in 0..3 {
                    out[3 * i + j] = m[3 * j + i].conj();
                }
            }
            out
        }
    }
}

/// Propagate the driven dot coupled to the discretized bath.
pub fn propagate_correlation_expansion<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    modes: &BathModes<S>,
    grid: &TimeGrid<S>,
    opts: &HierarchyOptions<S>,
) -> Result<Trajectory<S>> {
    propagate_correlation_expansion_full(dot, pulse, modes, grid, opts).map(|(t, _)| t)
}

/// As [`propagate_correlation_expansion`], also returning the final state of
/// all tracked correlations.
pub fn propagate_correlation_expansion_full<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    modes: &BathModes<S>,
    grid: &TimeGrid<S>,
    opts: &HierarchyOptions<S>,
) -> Result<(Trajectory<S>, HierarchyState<S>)> {
    let nq = modes.len();
    let layout = HierarchyLayout::new(nq, opts.truncation);

    let bytes_per = std::mem::size_of::<Complex<S>>();
    // state + three integrator buffers + per-mode workspace
    let working_set = layout.len() * bytes_per * 4 + 5 * 9 * nq * bytes_per;
    if working_set > opts.memory_cap_bytes {
        return Err(CoreError::MemoryBudget {
            needed: working_set,
            cap: opts.memory_cap_bytes,
        });
    }

    let kappa: Vec<S> = modes.g.clone();
    let nu: Vec<S> = modes.omega_mev.iter().map(|&e| consts::mev_to_radps(e)).collect();
    let occ: Vec<S> = modes.occupations()?;
    let w: Vec<S> = kappa.iter().zip(&occ).map(|(&k, &n)| k * n).collect();

    // counter-shift of the diagonal, rad/ps
    let s1h: S = kappa
        .iter()
        .zip(&nu)
        .map(|(&k, &v)| if v > S::zero() { k * k / v } else { S::zero() })
        .sum();
    let hb2 = dot.binding_energy * S::half() / consts::hbar::<S>();

    let zero = Complex::new(S::zero(), S::zero());
    let mut y = vec![zero; layout.len()];
    match &opts.initial_rho {
        Some(r) => y[0..9].copy_from_slice(r),
        None => y[0] = Complex::new(S::one(), S::zero()),
    }
    if layout.two_phonon {
        // thermal initial condition: D_qq = n_q * rho(0)
        for q in 0..nq {
            let off = layout.d_off(q, q);
            for k in 0..9 {
                y[off + k] = y[k] * occ[q];
            }
        }
    }

    // per-mode workspace: u = n B, v = [n, B], ud = n B†, vd = [n, B†], bn = B n
    let mut ws = vec![zero; 5 * 9 * nq];
    let mut rec = Recorder::with_capacity(grid.steps + 1);

    let mut rhs = |t: S, y: &[Complex<S>], dy: &mut [Complex<S>]| {
        let delta = pulse.instantaneous_detuning(t);
        let e = [
            S::zero(),
            hb2 + s1h - delta,
            S::of(4.0) * s1h - S::two() * delta,
        ];
        let o = -pulse.envelope_mag(t) * S::half();
        let two = S::two();

        // per-mode precomputes
        {
            let (us, rest) = ws.split_at_mut(9 * nq);
            let (vs, rest) = rest.split_at_mut(9 * nq);
            let (uds, rest) = rest.split_at_mut(9 * nq);
            let (vds, bns) = rest.split_at_mut(9 * nq);
            for q in 0..nq {
                let b = &y[layout.b_off(q)..layout.b_off(q) + 9];
                let u = &mut us[9 * q..9 * q + 9];
                let v = &mut vs[9 * q..9 * q + 9];
                let ud = &mut uds[9 * q..9 * q + 9];
                let vd = &mut vds[9 * q..9 * q + 9];
                let bn = &mut bns[9 * q..9 * q + 9];
                for j in 0..3 {
                    // rows scaled by n = (0, 1, 2)
                    u[j] = zero;
                    u[3 + j] = b[3 + j];
                    u[6 + j] = b[6 + j] * two;
                    // adjoint rows
                    ud[j] = zero;
                    ud[3 + j] = b[3 * j + 1].conj();
                    ud[6 + j] = b[3 * j + 2].conj() * two;
                }
                for i in 0..3 {
                    for j in 0..3 {
                        let nij = S::of(i as f64 - j as f64);
                        v[3 * i + j] = b[3 * i + j] * nij;
                        vd[3 * i + j] = b[3 * j + i].conj() * nij;
                        bn[3 * i + j] = b[3 * i + j] * S::of(j as f64);
                    }
                }
            }
        }
        let (us, rest) = ws.split_at(9 * nq);
        let (vs, rest) = rest.split_at(9 * nq);
        let (uds, rest) = rest.split_at(9 * nq);
        let (vds, bns) = rest.split_at(9 * nq);

        // rho: -i[h, rho] - i [n, sum_q kappa_q (B_q + B_q†)]
        let rho = &y[0..9];
        minus_i_comm_tridiag(&e, o, S::zero(), rho, &mut dy[0..9]);
        let mut tmp = [zero; 9];
        let mut sum_b = [zero; 9];
        for q in 0..nq {
            let b = &y[layout.b_off(q)..layout.b_off(q) + 9];
            let kq = kappa[q];
            for i in 0..3 {
                for j in 0..3 {
                    sum_b[3 * i + j] += (b[3 * i + j] + b[3 * j + i].conj()) * kq;
                }
            }
        }
        for i in 0..3 {
            for j in 0..3 {
                tmp[3 * i + j] = sum_b[3 * i + j] * S::of(i as f64 - j as f64);
            }
        }
        rotate_add(&mut dy[0..9], &tmp);

        // n * rho, reused as the B source
        let mut nrho = [zero; 9];
        for j in 0..3 {
            nrho[3 + j] = rho[3 + j];
            nrho[6 + j] = rho[6 + j] * two;
        }

        // B_q
        for q in 0..nq {
            let off = layout.b_off(q);
            let b = &y[off..off + 9];
            let (head, dyq) = dy.split_at_mut(off);
            let _ = head;
            let dyq = &mut dyq[0..9];
            minus_i_comm_tridiag(&e, o, nu[q], b, dyq);
            let kq = kappa[q];
            if layout.two_phonon {
                // S_q = sum_p kappa_p (C_qp + D_pq), then source kq*n*rho + [n, S_q]
                let mut s = [zero; 9];
                for p in 0..nq {
                    let kp = kappa[p];
                    if p <= q {
                        let c = &y[layout.c_off(p, q)..layout.c_off(p, q) + 9];
                        let d = &y[layout.d_off(p, q)..layout.d_off(p, q) + 9];
                        for k in 0..9 {
                            s[k] += (c[k] + d[k]) * kp;
                        }
                    } else {
                        let c = &y[layout.c_off(q, p)..layout.c_off(q, p) + 9];
                        let d = &y[layout.d_off(q, p)..layout.d_off(q, p) + 9];
                        for i in 0..3 {
                            for j in 0..3 {
                                s[3 * i + j] += (c[3 * i + j] + d[3 * j + i].conj()) * kp;
                            }
                        }
                    }
                }
                for i in 0..3 {
                    for j in 0..3 {
                        tmp[3 * i + j] =
                            nrho[3 * i + j] * kq + s[3 * i + j] * S::of(i as f64 - j as f64);
                    }
                }
            } else {
                // one-phonon closure: two-phonon moments factorized thermally
                let wq = w[q];
                for i in 0..3 {
                    for j in 0..3 {
                        tmp[3 * i + j] = nrho[3 * i + j] * kq
                            + rho[3 * i + j] * (wq * S::of(i as f64 - j as f64));
                    }
                }
            }
            rotate_add(dyq, &tmp);
        }

        if !layout.two_phonon {
            return;
        }

        // pairs q <= p
        for q in 0..nq {
            let uq = &us[9 * q..9 * q + 9];
            let vq = &vs[9 * q..9 * q + 9];
            let udq = &uds[9 * q..9 * q + 9];
            let vdq = &vds[9 * q..9 * q + 9];
            let (kq, wq, nuq) = (kappa[q], w[q], nu[q]);
            for p in q..nq {
                let up = &us[9 * p..9 * p + 9];
                let vp = &vs[9 * p..9 * p + 9];
                let bnp = &bns[9 * p..9 * p + 9];
                let (kp, wp, nup) = (kappa[p], w[p], nu[p]);

                let coff = layout.c_off(q, p);
                let cm = &y[coff..coff + 9];
                let (head, dyc) = dy.split_at_mut(coff);
                let _ = head;
                let dyc = &mut dyc[0..9];
                minus_i_comm_tridiag(&e, o, nuq + nup, cm, dyc);
                for k in 0..9 {
                    tmp[k] = uq[k] * kp + up[k] * kq + vp[k] * wq + vq[k] * wp;
                }
                rotate_add(dyc, &tmp);

                let doff = layout.d_off(q, p);
                let dm = &y[doff..doff + 9];
                let (head, dyd) = dy.split_at_mut(doff);
                let _ = head;
                let dyd = &mut dyd[0..9];
                minus_i_comm_tridiag(&e, o, nup - nuq, dm, dyd);
                for k in 0..9 {
                    tmp[k] = udq[k] * kp + vp[k] * wq + vdq[k] * wp - bnp[k] * kq;
                }
                rotate_add(dyd, &tmp);
            }
        }
    };

    let mut observe = |_step: usize, t: S, y: &[Complex<S>]| rec.push_rho(t, &y[0..9]);
    ode::rk4(&mut y, grid.t0, grid.dt, grid.steps, &mut rhs, &mut observe).map_err(
        |(t, reason)| CoreError::IntegrationFailure {
            last_good_t: t.to_f64().unwrap_or(f64::NAN),
            reason,
        },
    )?;

    let traj = rec.finish();
    let state = HierarchyState { time: grid.t_end(), layout, data: y };
    Ok((traj, state))
}
