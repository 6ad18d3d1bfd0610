//! Shared 3×3 right-hand-side kernels.
//!
//! States are flat row-major complex 3×3 slices (index 3*i + j). Hamiltonians
//! are ladder tridiagonal (no direct g <-> xx element), given in rad/ps.

use num_complex::Complex;

use crate::real::Real;

#[inline]
fn times_minus_i<S: Real>(z: Complex<S>) -> Complex<S> {
    Complex::new(z.im, -z.re)
}

/// out = -i ( [H, m] + nu * m ), H = tridiag(diagonal e, real coupling o).
#[inline]
pub(crate) fn minus_i_comm_tridiag<S: Real>(
    e: &[S; 3],
    o: S,
    nu: S,
    m: &[Complex<S>],
    out: &mut [Complex<S>],
) {
    let d01 = e[0] - e[1];
    let d02 = e[0] - e[2];
    let d12 = e[1] - e[2];
    let c00 = (m[3] - m[1]) * o;
    let c01 = m[1] * d01 + (m[4] - m[0] - m[2]) * o;
    let c02 = m[2] * d02 + (m[5] - m[1]) * o;
    let c10 = m[3] * (-d01) + (m[0] + m[6] - m[4]) * o;
    let c11 = (m[1] + m[7] - m[3] - m[5]) * o;
    let c12 = m[5] * d12 + (m[2] + m[8] - m[4]) * o;
    let c20 = m[6] * (-d02) + (m[3] - m[7]) * o;
    let c21 = m[7] * (-d12) + (m[4] - m[6] - m[8]) * o;
    let c22 = (m[5] - m[7]) * o;
    out[0] = times_minus_i(c00 + m[0] * nu);
    out[1] = times_minus_i(c01 + m[1] * nu);
    out[2] = times_minus_i(c02 + m[2] * nu);
    out[3] = times_minus_i(c10 + m[3] * nu);
    out[4] = times_minus_i(c11 + m[4] * nu);
    out[5] = times_minus_i(c12 + m[5] * nu);
    out[6] = times_minus_i(c20 + m[6] * nu);
    out[7] = times_minus_i(c21 + m[7] * nu);
    out[8] = times_minus_i(c22 + m[8] * nu);
}

/// out = -i [H, m], H = tridiag(diagonal d, complex coupling c on both
/// ladder steps, Hermitian).
#[inline]
pub(crate) fn minus_i_comm_tridiag_complex<S: Real>(
    d: &[S; 3],
    c: Complex<S>,
    m: &[Complex<S>],
    out: &mut [Complex<S>],
) {
    let cc = c.conj();
    let d01 = d[0] - d[1];
    let d02 = d[0] - d[2];
    let d12 = d[1] - d[2];
    let c00 = c * m[3] - cc * m[1];
    let c01 = m[1] * d01 + c * (m[4] - m[0]) - cc * m[2];
    let c02 = m[2] * d02 + c * (m[5] - m[1]);
    let c10 = m[3] * (-d01) + cc * (m[0] - m[4]) + c * m[6];
    let c11 = cc * (m[1] - m[5]) + c * (m[7] - m[3]);
    let c12 = m[5] * d12 + cc * m[2] + c * (m[8] - m[4]);
    let c20 = m[6] * (-d02) + cc * (m[3] - m[7]);
    let c21 = m[7] * (-d12) + cc * (m[4] - m[8]) - c * m[6];
    let c22 = cc * m[5] - c * m[7];
    out[0] = times_minus_i(c00);
    out[1] = times_minus_i(c01);
    out[2] = times_minus_i(c02);
    out[3] = times_minus_i(c10);
    out[4] = times_minus_i(c11);
    out[5] = times_minus_i(c12);
    out[6] = times_minus_i(c20);
    out[7] = times_minus_i(c21);
    out[8] = times_minus_i(c22);
}

/// out += -i * src, elementwise.
#[inline]
pub(crate) fn rotate_add<S: Real>(out: &mut [Complex<S>], src: &[Complex<S>]) {
    for (o, &s) in out.iter_mut().zip(src) {
        o.re += s.im;
        o.im -= s.re;
    }
}
