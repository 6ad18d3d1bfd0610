//! Minimal fixed-size linear algebra for the three-level system.
//!
//! The rotating-frame Hamiltonian is real symmetric, so the dressed-state
//! machinery only needs a real symmetric 3×3 eigensolver. Density matrices
//! are complex Hermitian 3×3 and are stored as flat row-major `[Complex; 9]`
//! slices by the propagators.

use num_complex::Complex;

use crate::real::Real;

/// Real symmetric 3×3 matrix.
#[derive(Copy, Clone, Debug, PartialEq)]
pub struct Sym3<S> {
    /// Diagonal entries (0,0), (1,1), (2,2).
    pub diag: [S; 3],
    /// Off-diagonal entries (0,1), (0,2), (1,2).
    pub off: [S; 3],
}

impl<S: Real> Sym3<S> {
    pub fn new(diag: [S; 3], off: [S; 3]) -> Self {
        Self { diag, off }
    }

    pub fn zero() -> Self {
        Self { diag: [S::zero(); 3], off: [S::zero(); 3] }
    }

    /// Entry (i, j).
    pub fn get(&self, i: usize, j: usize) -> S {
        if i == j {
            self.diag[i]
        } else {
            let (a, b) = if i < j { (i, j) } else { (j, i) };
            match (a, b) {
                (0, 1) => self.off[0],
                (0, 2) => self.off[1],
                (1, 2) => self.off[2],
                _ => unreachable!(),
            }
        }
    }

    pub fn trace(&self) -> S {
        self.diag[0] + self.diag[1] + self.diag[2]
    }

    /// Dense row-major copy.
    pub fn to_dense(&self) -> [[S; 3]; 3] {
        let mut m = [[S::zero(); 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                m[i][j] = self.get(i, j);
            }
        }
        m
    }

    /// Eigen-decomposition by cyclic Jacobi rotations.
    ///
    /// Returns eigenvalues in ascending order and the matching orthonormal
    /// eigenvectors as columns of the returned matrix (`vecs[r][c]` is row r
    /// of eigenvector c).
    pub fn eigh(&self) -> ([S; 3], [[S; 3]; 3]) {
        let mut a = self.to_dense();
        let mut v = [[S::zero(); 3]; 3];
        for (i, row) in v.iter_mut().enumerate() {
            row[i] = S::one();
        }

        // Off-diagonal norm that "converged" is measured against.
        let scale = {
            let mut s = S::zero();
            for i in 0..3 {
                for j in 0..3 {
                    s = s + a[i][j] * a[i][j];
                }
            }
            s.sqrt()
        };
        let tol = S::epsilon() * (scale + S::one());

        for _sweep in 0..64 {
            let mut offdiag = S::zero();
            for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                offdiag = offdiag + a[p][q].abs();
            }
            if offdiag <= tol {
                break;
            }
            for &(p, q) in &[(0usize, 1usize), (0, 2), (1, 2)] {
                let apq = a[p][q];
                if apq.abs() <= tol * S::of(1e-3) {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (S::two() * apq);
                // tan of the rotation angle, smaller root for stability
                let t = {
                    let s = if theta >= S::zero() { S::one() } else { -S::one() };
                    s / (theta.abs() + (S::one() + theta * theta).sqrt())
                };
                let c = S::one() / (S::one() + t * t).sqrt();
                let s = t * c;

                let app = a[p][p];
                let aqq = a[q][q];
                a[p][p] = app - t * apq;
                a[q][q] = aqq + t * apq;
                a[p][q] = S::zero();
                a[q][p] = S::zero();
                for r in 0..3 {
                    if r != p && r != q {
                        let arp = a[r][p];
                        let arq = a[r][q];
                        a[r][p] = c * arp - s * arq;
                        a[p][r] = a[r][p];
                        a[r][q] = s * arp + c * arq;
                        a[q][r] = a[r][q];
                    }
                }
                for row in v.iter_mut() {
                    let vp = row[p];
                    let vq = row[q];
                    row[p] = c * vp - s * vq;
                    row[q] = s * vp + c * vq;
                }
            }
        }

        let mut vals = [a[0][0], a[1][1], a[2][2]];
        let mut order = [0usize, 1, 2];
        // sort ascending (3 elements)
        for i in 0..2 {
            for j in 0..2 - i {
                if vals[j] > vals[j + 1] {
                    vals.swap(j, j + 1);
                    order.swap(j, j + 1);
                }
            }
        }
        let mut vecs = [[S::zero(); 3]; 3];
        for (c, &oc) in order.iter().enumerate() {
            for r in 0..3 {
                vecs[r][c] = v[r][oc];
            }
        }
        (vals, vecs)
    }
}

/// Flat row-major complex 3×3, entry (i, j) at index 3*i + j.
pub type C9<S> = [Complex<S>; 9];

pub fn czero9<S: Real>() -> C9<S> {
    [Complex::new(S::zero(), S::zero()); 9]
}

/// Trace of a flat complex 3×3.
#[inline]
pub fn trace9<S: Real>(m: &[Complex<S>]) -> Complex<S> {
    m[0] + m[4] + m[8]
}

/// Max absolute deviation from Hermiticity.
pub fn hermiticity_defect<S: Real>(m: &[Complex<S>]) -> S {
    let mut worst = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            let d = (m[3 * i + j] - m[3 * j + i].conj()).norm_sqr().sqrt();
            if d > worst {
                worst = d;
            }
        }
    }
    worst
}

/// Eigenvalues of a Hermitian 3×3 given as a flat slice, ascending.
///
/// Closed-form solution of the characteristic cubic; adequate for monitoring
/// positivity of a density matrix.
pub fn eigvals_hermitian3<S: Real>(m: &[Complex<S>]) -> [S; 3] {
    let third = S::one() / S::of(3.0);
    let tr = trace9(m).re;
    let q = tr * third;
    // B = M - q*I; p = sqrt(tr(B^2)/6)
    let mut b = [Complex::new(S::zero(), S::zero()); 9];
    b.copy_from_slice(&m[..9]);
    b[0] -= Complex::new(q, S::zero());
    b[4] -= Complex::new(q, S::zero());
    b[8] -= Complex::new(q, S::zero());
    let mut tr_b2 = S::zero();
    for i in 0..3 {
        for j in 0..3 {
            // (B^2)_{ii} summed = sum_{ij} B_ij B_ji = sum |B_ij|^2 for Hermitian B
            tr_b2 = tr_b2 + b[3 * i + j].norm_sqr();
        }
    }
    let p = (tr_b2 / S::of(6.0)).sqrt();
    if p <= S::epsilon() * (S::one() + q.abs()) {
        return [q, q, q];
    }
    // det(B/p), real for Hermitian B
    let d = |i: usize, j: usize| b[3 * i + j] / p;
    let det = d(0, 0) * (d(1, 1) * d(2, 2) - d(1, 2) * d(2, 1))
        - d(0, 1) * (d(1, 0) * d(2, 2) - d(1, 2) * d(2, 0))
        + d(0, 2) * (d(1, 0) * d(2, 1) - d(1, 1) * d(2, 0));
    let r = (det.re * S::half()).max(-S::one()).min(S::one());
    let phi = r.acos() * third;
    let two_p = S::two() * p;
    let e1 = q + two_p * phi.cos();
    let e3 = q + two_p * (phi + S::two() * S::PI() * third).cos();
    let e2 = tr - e1 - e3;
    let mut vals = [e1, e2, e3];
    vals.sort_by(|a, b| a.partial_cmp(b).unwrap());
    vals
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::rngs::StdRng;
    use rand::{Rng, SeedableRng};

    fn reconstruct(vals: &[f64; 3], vecs: &[[f64; 3]; 3]) -> [[f64; 3]; 3] {
        let mut m = [[0.0; 3]; 3];
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    m[i][j] += vecs[i][k] * vals[k] * vecs[j][k];
                }
            }
        }
        m
    }

    #[test]
    fn eigh_random_matrices() {
        let mut rng = StdRng::seed_from_u64(42);
        for _ in 0..500 {
            let m: Sym3<f64> = Sym3::new(
                [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
                [rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0), rng.gen_range(-5.0..5.0)],
            );
            let (vals, vecs) = m.eigh();
            assert!(vals[0] <= vals[1] && vals[1] <= vals[2]);
            // eigen-decomposition reproduces the matrix
            let rec = reconstruct(&vals, &vecs);
            let dense = m.to_dense();
            for i in 0..3 {
                for j in 0..3 {
                    assert!((rec[i][j] - dense[i][j]).abs() < 1e-12, "reconstruction off");
                }
            }
            // orthonormal columns
            for a in 0..3 {
                for b in 0..3 {
                    let dot: f64 = (0..3).map(|r| vecs[r][a] * vecs[r][b]).sum();
                    let want = if a == b { 1.0 } else { 0.0 };
                    assert!((dot - want).abs() < 1e-13);
                }
            }
            // eigenvalue sum equals trace
            assert!((vals.iter().sum::<f64>() - m.trace()).abs() < 1e-12);
        }
    }

    #[test]
    fn eigh_degenerate() {
        let m: Sym3<f64> = Sym3::new([2.0, 2.0, 2.0], [0.0, 0.0, 0.0]);
        let (vals, _) = m.eigh();
        assert_eq!(vals, [2.0, 2.0, 2.0]);

        let m = Sym3::new([1.0, 1.0, 5.0], [0.5, 0.0, 0.0]);
        let (vals, vecs) = m.eigh();
        let rec = reconstruct(&vals, &vecs);
        let dense = m.to_dense();
        for i in 0..3 {
            for j in 0..3 {
                assert!((rec[i][j] - dense[i][j]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn hermitian_eigvals_match_real_solver() {
        let mut rng = StdRng::seed_from_u64(7);
        for _ in 0..200 {
            let m: Sym3<f64> = Sym3::new(
                [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
                [rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0), rng.gen_range(-3.0..3.0)],
            );
            let (vals, _) = m.eigh();
            let mut flat = czero9::<f64>();
            for i in 0..3 {
                for j in 0..3 {
                    flat[3 * i + j] = Complex::new(m.get(i, j), 0.0);
                }
            }
            let hvals = eigvals_hermitian3(&flat);
            for k in 0..3 {
                assert!((vals[k] - hvals[k]).abs() < 1e-10, "{vals:?} vs {hvals:?}");
            }
        }
    }

    #[test]
    fn hermitian_eigvals_complex_offdiag() {
        // 2x2 block with complex coupling embedded in 3x3: analytic check
        let g = Complex::new(0.3, 0.4); // |g| = 0.5
        let mut m = czero9::<f64>();
        m[0] = Complex::new(1.0, 0.0);
        m[4] = Complex::new(2.0, 0.0);
        m[8] = Complex::new(5.0, 0.0);
        m[1] = g;
        m[3] = g.conj();
        let vals = eigvals_hermitian3(&m);
        // block eigenvalues 1.5 ± sqrt(0.25 + 0.25)
        let lo = 1.5 - 0.5f64.sqrt();
        let hi = 1.5 + 0.5f64.sqrt();
        assert!((vals[0] - lo).abs() < 1e-12);
        assert!((vals[1] - hi).abs() < 1e-12);
        assert!((vals[2] - 5.0).abs() < 1e-12);
    }
}
