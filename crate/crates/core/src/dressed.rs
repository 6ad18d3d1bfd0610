//! Dressed states: instantaneous eigenvalues of the rotating-frame
//! Hamiltonian, branch continuation by eigenvector overlap, and detection of
//! crossings vs. anticrossings.

use crate::consts;
use crate::dot::DotModel;
use crate::error::{CoreError, Result};
use crate::pulse::ChirpedPulse;
use crate::real::Real;

/// Gap below which a closest approach counts as a true crossing, meV. Well
/// below any physical anticrossing gap at the pulse areas of interest.
pub const GAP_TOLERANCE: f64 = 1e-4;

/// Overlap-difference below which branch assignment ties are broken by
/// keeping ascending-eigenvalue order.
const TIE_TOLERANCE: f64 = 1e-6;

/// Kind of a branch-pair closest-approach event.
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum EventKind {
    /// The branch energies become degenerate (gap below tolerance or an
    /// interpolated sign change); compositions pass through unchanged.
    Crossing,
    /// Finite minimal gap with the bare-state compositions of the two
    /// branches exchanged across the approach.
    Anticrossing,
}

/// A detected closest approach between two branches.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct DressedEvent<S> {
    pub time: S,
    /// Gap at closest approach, meV.
    pub gap: S,
    pub kind: EventKind,
    /// Branch indices involved, (lower, higher) by branch id.
    pub branches: (usize, usize),
    /// Dominant bare characters of the two branches just before the event.
    pub characters: (usize, usize),
    /// Landau-Zener probability of following the adiabatic path through this
    /// approach (near 0 for true crossings, near 1 for strong anticrossings).
    pub adiabaticity: S,
}

/// Time-resolved dressed-state data with continued branch labels.
#[derive(Clone, Debug)]
pub struct DressedTrajectory<S> {
    pub times: Vec<S>,
    /// Branch energies per time, meV; branch identity is continued in time,
    /// so columns may cross in value.
    pub energies: Vec<[S; 3]>,
    /// Composition weights |<bare s|dressed b>|^2 per time: `weights[k][b][s]`.
    pub weights: Vec<[[S; 3]; 3]>,
    /// Branch eigenvectors per time: `vectors[k][r][b]` is component r (bare
    /// basis) of branch b. Signs are arbitrary per node.
    pub vectors: Vec<[[S; 3]; 3]>,
    /// Dominant bare state of each branch at the first grid point.
    pub initial_character: [usize; 3],
    /// Per-step minimal eigenvector overlap used in the continuation
    /// (index 0 is 1 by convention).
    pub overlaps: Vec<S>,
    pub events: Vec<DressedEvent<S>>,
}

impl<S: Real> DressedTrajectory<S> {
    /// Branch whose initial dominant character is the given bare state.
    pub fn branch_of(&self, bare: usize) -> Option<usize> {
        self.initial_character.iter().position(|&c| c == bare)
    }

    /// Events whose two branches carry the given bare characters at the time
    /// of the event (branch labels can have traded characters at earlier
    /// events, so matching by instantaneous character is the physical query).
    pub fn events_between(&self, bare_a: usize, bare_b: usize) -> Vec<&DressedEvent<S>> {
        self.events
            .iter()
            .filter(|e| {
                let (ca, cb) = e.characters;
                (ca == bare_a && cb == bare_b) || (ca == bare_b && cb == bare_a)
            })
            .collect()
    }

    /// Dominant bare state of branch `b` at time index `k`.
    pub fn dominant(&self, k: usize, b: usize) -> usize {
        let w = &self.weights[k][b];
        let mut best = 0;
        for s in 1..3 {
            if w[s] > w[best] {
                best = s;
            }
        }
        best
    }
}

/// Uniform symmetric grid covering the pulse support.
pub fn dressed_grid<S: Real>(pulse: &ChirpedPulse<S>, n: usize) -> Vec<S> {
    let half = pulse.support();
    let n = n.max(2);
    let step = S::two() * half / S::of((n - 1) as f64);
    (0..n).map(|k| -half + step * S::of(k as f64)).collect()
}

/// Diagonalize the rotating-frame Hamiltonian along `tgrid` and continue the
/// branches by maximal eigenvector overlap.
pub fn dressed_trajectory<S: Real>(
    dot: &DotModel<S>,
    pulse: &ChirpedPulse<S>,
    tgrid: &[S],
) -> Result<DressedTrajectory<S>> {
    if tgrid.len() < 2 {
        return Err(CoreError::invalid("time grid needs at least 2 points"));
    }
    if tgrid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(CoreError::invalid("time grid must be strictly increasing"));
    }

    let n = tgrid.len();
    let mut energies = Vec::with_capacity(n);
    let mut weights = Vec::with_capacity(n);
    let mut vectors = Vec::with_capacity(n);
    let mut overlaps = Vec::with_capacity(n);

    // vecs_prev[r][b]: component r of the eigenvector continued as branch b
    let mut vecs_prev = [[S::zero(); 3]; 3];

    for (k, &t) in tgrid.iter().enumerate() {
        let h = dot.rotating_frame_hamiltonian(pulse, t);
        let (vals, vecs) = h.eigh();
        let perm = if k == 0 {
            overlaps.push(S::one());
            [0usize, 1, 2]
        } else {
            // overlap[b][c] = |<branch b (prev) | eigenvector c (now)>|
            let mut ov = [[S::zero(); 3]; 3];
            for (b, row) in ov.iter_mut().enumerate() {
                for (c, entry) in row.iter_mut().enumerate() {
                    let mut dot_bc = S::zero();
                    for r in 0..3 {
                        dot_bc = dot_bc + vecs_prev[r][b] * vecs[r][c];
                    }
                    *entry = dot_bc.abs();
                }
            }
            const PERMS: [[usize; 3]; 6] =
                [[0, 1, 2], [0, 2, 1], [1, 0, 2], [1, 2, 0], [2, 0, 1], [2, 1, 0]];
            let score =
                |p: &[usize; 3]| ov[0][p[0]] + ov[1][p[1]] + ov[2][p[2]];
            let mut best = PERMS[0];
            let mut best_score = score(&PERMS[0]);
            for p in PERMS.iter().skip(1) {
                let s = score(p);
                if s > best_score + S::of(TIE_TOLERANCE) {
                    best = *p;
                    best_score = s;
                }
            }
            let min_ov =
                ov[0][best[0]].min(ov[1][best[1]]).min(ov[2][best[2]]);
            overlaps.push(min_ov);
            best
        };

        let mut e = [S::zero(); 3];
        let mut w = [[S::zero(); 3]; 3];
        let mut v = [[S::zero(); 3]; 3];
        for b in 0..3 {
            let c = perm[b];
            e[b] = vals[c];
            for r in 0..3 {
                vecs_prev[r][b] = vecs[r][c];
                v[r][b] = vecs[r][c];
                w[b][r] = vecs[r][c] * vecs[r][c];
            }
        }
        energies.push(e);
        weights.push(w);
        vectors.push(v);
    }

    let mut initial_character = [0usize; 3];
    for b in 0..3 {
        let w = &weights[0][b];
        let mut best = 0;
        for s in 1..3 {
            if w[s] > w[best] {
                best = s;
            }
        }
        initial_character[b] = best;
    }

    let mut traj = DressedTrajectory {
        times: tgrid.to_vec(),
        energies,
        weights,
        vectors,
        initial_character,
        overlaps,
        events: Vec::new(),
    };

    // Overlap continuation follows eigenvectors adiabatically through every
    // avoided gap the grid resolves, however small. A closest approach that
    // the sweep passes diabatically (Landau-Zener transfer below one half)
    // is relabeled so that branch identity follows the diabatic state, which
    // then shows up as a plain sign change of the branch-energy difference.
    loop {
        let mut first: Option<(usize, usize, usize)> = None;
        for i in 0..3 {
            for j in (i + 1)..3 {
                let d = pair_series(&traj, i, j);
                for cl in find_clusters(&d) {
                    if cl.has_sign_change {
                        continue;
                    }
                    let slope = edge_slope(&d, &traj.times, &cl);
                    if lz_adiabaticity(cl.gap, slope) < S::half()
                        && first.map_or(true, |(k, _, _)| cl.kmin < k)
                    {
                        first = Some((cl.kmin, i, j));
                    }
                }
            }
        }
        let Some((kmin, i, j)) = first else { break };
        for k in (kmin + 1)..traj.times.len() {
            traj.energies[k].swap(i, j);
            traj.weights[k].swap(i, j);
            for r in 0..3 {
                traj.vectors[k][r].swap(i, j);
            }
        }
    }

    // refresh continuation overlaps for the final labeling
    for k in 1..traj.times.len() {
        let mut min_ov = S::infinity();
        for b in 0..3 {
            let mut dot_b = S::zero();
            for r in 0..3 {
                dot_b = dot_b + traj.vectors[k - 1][r][b] * traj.vectors[k][r][b];
            }
            min_ov = min_ov.min(dot_b.abs());
        }
        traj.overlaps[k] = min_ov;
    }

    traj.events = detect_events(&traj);
    Ok(traj)
}

struct Cluster<S> {
    lo: usize,
    hi: usize,
    kmin: usize,
    gap: S,
    has_sign_change: bool,
}

fn pair_series<S: Real>(traj: &DressedTrajectory<S>, i: usize, j: usize) -> Vec<S> {
    (0..traj.times.len()).map(|k| traj.energies[k][i] - traj.energies[k][j]).collect()
}

/// Interior local minima of |d| with escape windows, merged where the
/// windows overlap. A window climbs away from the minimum until the gap has
/// tripled or |d| turns over (nearest local maximum), whichever comes first.
fn find_clusters<S: Real>(d: &[S]) -> Vec<Cluster<S>> {
    let n = d.len();
    let mut raw: Vec<(usize, usize, usize)> = Vec::new();
    for k in 1..n - 1 {
        let a = d[k].abs();
        if a < d[k - 1].abs() && a <= d[k + 1].abs() {
            let escape = a.max(S::of(1e-12)) * S::of(3.0);
            let mut lo = k;
            while lo > 0 && d[lo].abs() < escape && d[lo - 1].abs() >= d[lo].abs() {
                lo -= 1;
            }
            let mut hi = k;
            while hi + 1 < n && d[hi].abs() < escape && d[hi + 1].abs() >= d[hi].abs() {
                hi += 1;
            }
            raw.push((lo, hi, k));
        }
    }
    raw.sort_by_key(|c| c.0);
    let mut merged: Vec<Cluster<S>> = Vec::new();
    for (lo, hi, k) in raw {
        let gap = refined_gap(d, k);
        if let Some(last) = merged.last_mut() {
            if lo <= last.hi {
                last.hi = last.hi.max(hi);
                if gap < last.gap {
                    last.gap = gap;
                    last.kmin = k;
                }
                continue;
            }
        }
        merged.push(Cluster { lo, hi, kmin: k, gap, has_sign_change: false });
    }
    for cl in merged.iter_mut() {
        cl.has_sign_change =
            (cl.lo..cl.hi).any(|k| d[k] != S::zero() && d[k] * d[k + 1] < S::zero());
    }
    merged
}

/// Parabolic refinement of the minimal |d| around node k, so that a linear
/// crossing sampled off its zero reports a gap near zero rather than the
/// grid-resolution floor.
fn refined_gap<S: Real>(d: &[S], k: usize) -> S {
    let sampled = d[k].abs();
    if k == 0 || k + 1 >= d.len() {
        return sampled;
    }
    let ym = d[k - 1] * d[k - 1];
    let y0 = d[k] * d[k];
    let yp = d[k + 1] * d[k + 1];
    let den = yp + ym - S::two() * y0;
    if den <= S::zero() {
        return sampled;
    }
    let vertex = y0 - (yp - ym) * (yp - ym) / (S::of(8.0) * den);
    vertex.max(S::zero()).sqrt()
}

/// Diabatic slope of the pair energy difference across the cluster, from the
/// hyperbola model d^2 = gap^2 + (s (t - t0))^2 evaluated at the window
/// edges.
fn edge_slope<S: Real>(d: &[S], times: &[S], cl: &Cluster<S>) -> S {
    let t0 = times[cl.kmin];
    let est = |k: usize| -> S {
        let dt = (times[k] - t0).abs();
        if dt <= S::zero() {
            return S::zero();
        }
        (d[k] * d[k] - cl.gap * cl.gap).max(S::zero()).sqrt() / dt
    };
    est(cl.lo).max(est(cl.hi))
}

/// Landau-Zener adiabatic transfer probability for a closest approach with
/// the given minimal gap (meV) and diabatic slope (meV/ps).
fn lz_adiabaticity<S: Real>(gap: S, slope: S) -> S {
    if slope <= S::zero() {
        return S::one(); // degenerate sweep, treat as adiabatic
    }
    let x = S::PI() * gap * gap / (S::two() * consts::hbar::<S>() * slope);
    S::one() - (-x).exp()
}

fn detect_events<S: Real>(traj: &DressedTrajectory<S>) -> Vec<DressedEvent<S>> {
    let n = traj.times.len();
    let gap_tol = S::of(GAP_TOLERANCE);
    let mut events = Vec::new();
    for i in 0..3 {
        for j in (i + 1)..3 {
            let d = pair_series(traj, i, j);
            let clusters = find_clusters(&d);
            // sign changes: true crossings resolved between grid points; the
            // physical gap and adiabaticity come from the enclosing cluster
            for k in 1..n {
                if d[k - 1] != S::zero() && d[k - 1] * d[k] < S::zero() {
                    let f = d[k - 1].abs() / (d[k - 1].abs() + d[k].abs());
                    let time =
                        traj.times[k - 1] + f * (traj.times[k] - traj.times[k - 1]);
                    let enclosing = clusters.iter().find(|cl| cl.lo <= k - 1 && k <= cl.hi);
                    let (gap, adiabaticity, k_ref) = enclosing
                        .map(|cl| {
                            let slope = edge_slope(&d, &traj.times, cl);
                            (cl.gap, lz_adiabaticity(cl.gap, slope), cl.lo)
                        })
                        .unwrap_or((d[k - 1].abs().min(d[k].abs()), S::zero(), k - 1));
                    events.push(DressedEvent {
                        time,
                        gap,
                        kind: EventKind::Crossing,
                        branches: (i, j),
                        characters: (traj.dominant(k_ref, i), traj.dominant(k_ref, j)),
                        adiabaticity,
                    });
                }
            }
            for cl in &clusters {
                if cl.has_sign_change {
                    continue;
                }
                let slope = edge_slope(&d, &traj.times, cl);
                let adiabaticity = lz_adiabaticity(cl.gap, slope);
                let characters = (traj.dominant(cl.lo, i), traj.dominant(cl.lo, j));
                if cl.gap < gap_tol {
                    events.push(DressedEvent {
                        time: traj.times[cl.kmin],
                        gap: cl.gap,
                        kind: EventKind::Crossing,
                        branches: (i, j),
                        characters,
                        adiabaticity,
                    });
                } else if let Some(time) = swap_time(traj, i, j, cl) {
                    events.push(DressedEvent {
                        time,
                        gap: cl.gap,
                        kind: EventKind::Anticrossing,
                        branches: (i, j),
                        characters,
                        adiabaticity,
                    });
                }
            }
        }
    }
    events.sort_by(|a, b| a.time.partial_cmp(&b.time).unwrap());
    events
}

/// If branches i and j exchange their dominant bare composition across the
/// cluster, return the time where the exchange happens.
fn swap_time<S: Real>(
    traj: &DressedTrajectory<S>,
    i: usize,
    j: usize,
    cl: &Cluster<S>,
) -> Option<S> {
    let di_lo = traj.dominant(cl.lo, i);
    let dj_lo = traj.dominant(cl.lo, j);
    let di_hi = traj.dominant(cl.hi, i);
    let dj_hi = traj.dominant(cl.hi, j);
    let swapped = di_lo != di_hi && di_lo == dj_hi && dj_lo == di_hi;
    if !swapped {
        return None;
    }
    let mut flip = cl.kmin;
    for k in cl.lo..=cl.hi {
        if traj.dominant(k, i) != di_lo {
            flip = k;
            break;
        }
    }
    let prev = flip.saturating_sub(1).max(cl.lo);
    Some((traj.times[flip] + traj.times[prev]) * S::half())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dot::{G, X, XX};

    type Dot = DotModel<f64>;
    type Pulse = ChirpedPulse<f64>;

    fn paper_pulse(detuning: f64, gdd: f64) -> Pulse {
        Pulse::from_area_pi(20.0, 1.62, gdd, detuning).unwrap()
    }

    #[test]
    fn resonant_chirp_shows_single_gxx_anticrossing() {
        let dot = Dot::default();
        let pulse = paper_pulse(0.0, 40.0);
        let grid = dressed_grid(&pulse, 2001);
        let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
        let events = traj.events_between(G, XX);
        let anti: Vec<_> =
            events.iter().filter(|e| e.kind == EventKind::Anticrossing).collect();
        assert_eq!(anti.len(), 1, "events: {events:?}");
        assert!(anti[0].time.abs() < 2.0, "anticrossing at t = {}", anti[0].time);
        assert!(anti[0].gap > 0.1);
    }

    #[test]
    fn anticrossing_gap_shrinks_with_area() {
        let dot = Dot::default();
        let gap_for = |theta_pi: f64| {
            let pulse = Pulse::from_area_pi(theta_pi, 1.62, 40.0, 0.0).unwrap();
            let grid = dressed_grid(&pulse, 2001);
            let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
            traj.events_between(G, XX)
                .iter()
                .find(|e| e.kind == EventKind::Anticrossing)
                .map(|e| e.gap)
                .unwrap()
        };
        assert!(gap_for(10.0) < gap_for(20.0));
        assert!(gap_for(5.0) < gap_for(10.0));
    }

    #[test]
    fn detuned_chirp_crosses_without_swap() {
        let dot = Dot::default();
        for &(detuning, expect_sign) in &[(1.0, -1.0), (-1.0, 1.0)] {
            let pulse = paper_pulse(detuning, 40.0);
            let grid = dressed_grid(&pulse, 4001);
            let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
            let events = traj.events_between(G, XX);
            let crossings: Vec<_> =
                events.iter().filter(|e| e.kind == EventKind::Crossing).collect();
            assert_eq!(crossings.len(), 1, "events: {events:?}");
            let t = crossings[0].time;
            assert!((t.abs() - 61.0).abs() < 3.0, "crossing at {t}");
            assert!(t * expect_sign > 0.0, "crossing side, t = {t}");
            assert!(events.iter().all(|e| e.kind != EventKind::Anticrossing));
        }
    }

    #[test]
    fn zero_drive_gives_bare_energies_and_no_events() {
        let dot = Dot::default();
        let pulse = Pulse::from_area_pi(0.0, 1.62, 40.0, 0.3).unwrap();
        let grid = dressed_grid(&pulse, 801);
        let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let h = dot.rotating_frame_hamiltonian(&pulse, t);
            let mut bare = h.diag;
            bare.sort_by(|a, b| a.partial_cmp(b).unwrap());
            let mut got = traj.energies[k];
            got.sort_by(|a, b| a.partial_cmp(b).unwrap());
            for s in 0..3 {
                assert!((got[s] - bare[s]).abs() < 1e-12);
            }
        }
        // bare diagonals do cross in time; those are crossings, never
        // anticrossings
        assert!(traj.events.iter().all(|e| e.kind == EventKind::Crossing));
        let x_branch = traj.branch_of(X).unwrap();
        for k in 0..traj.times.len() {
            assert_eq!(traj.dominant(k, x_branch), X);
        }
    }

    #[test]
    fn eigenvalue_sum_matches_trace() {
        let dot = Dot::default();
        let pulse = paper_pulse(0.7, 40.0);
        let grid = dressed_grid(&pulse, 801);
        let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
        for (k, &t) in traj.times.iter().enumerate() {
            let h = dot.rotating_frame_hamiltonian(&pulse, t);
            let sum: f64 = traj.energies[k].iter().sum();
            assert!((sum - h.trace()).abs() < 1e-10);
        }
    }

    #[test]
    fn weights_normalized_and_overlaps_continuous() {
        let dot = Dot::default();
        let pulse = paper_pulse(1.0, 40.0);
        let grid = dressed_grid(&pulse, 4001);
        let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
        for w in &traj.weights {
            for b in 0..3 {
                let sum: f64 = w[b].iter().sum();
                assert!((sum - 1.0).abs() < 1e-10);
            }
        }
        // overlaps stay high except right at the flagged true crossings
        let cross_times: Vec<f64> = traj
            .events
            .iter()
            .filter(|e| e.kind == EventKind::Crossing)
            .map(|e| e.time)
            .collect();
        let dt = traj.times[1] - traj.times[0];
        for (k, &ov) in traj.overlaps.iter().enumerate() {
            let near_crossing =
                cross_times.iter().any(|&tc| (traj.times[k] - tc).abs() < 2.0 * dt);
            if !near_crossing {
                assert!(ov >= 0.5, "overlap {ov} at t = {}", traj.times[k]);
            }
        }
    }

    #[test]
    fn refinement_tightens_branch_energy_steps() {
        let dot = Dot::default();
        let pulse = paper_pulse(0.0, 40.0);
        let max_step = |n: usize| -> f64 {
            let grid = dressed_grid(&pulse, n);
            let traj = dressed_trajectory(&dot, &pulse, &grid).unwrap();
            let mut worst: f64 = 0.0;
            for k in 1..traj.times.len() {
                for b in 0..3 {
                    worst = worst.max((traj.energies[k][b] - traj.energies[k - 1][b]).abs());
                }
            }
            worst
        };
        let coarse = max_step(2001);
        let fine = max_step(4001);
        assert!(fine < 0.75 * coarse, "coarse {coarse}, fine {fine}");
    }

    #[test]
    fn chirp_sign_mirrors_time_axis() {
        let dot = Dot::default();
        let plus = paper_pulse(0.6, 40.0);
        let minus = paper_pulse(0.6, -40.0);
        let grid = dressed_grid(&plus, 2001); // symmetric grid
        let tp = dressed_trajectory(&dot, &plus, &grid).unwrap();
        let tm = dressed_trajectory(&dot, &minus, &grid).unwrap();
        let n = grid.len();
        for k in 0..n {
            let mut a = tp.energies[k];
            let mut b = tm.energies[n - 1 - k];
            a.sort_by(|x, y| x.partial_cmp(y).unwrap());
            b.sort_by(|x, y| x.partial_cmp(y).unwrap());
            for s in 0..3 {
                assert!((a[s] - b[s]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn rejects_bad_grids() {
        let dot = Dot::default();
        let pulse = paper_pulse(0.0, 40.0);
        assert!(dressed_trajectory(&dot, &pulse, &[0.0]).is_err());
        assert!(dressed_trajectory(&dot, &pulse, &[0.0, 0.0, 1.0]).is_err());
        assert!(dressed_trajectory(&dot, &pulse, &[1.0, 0.0]).is_err());
    }
}
