//! Fixed-step classical Runge-Kutta driver over flat complex state vectors.

use num_complex::Complex;

use crate::real::Real;

#[inline]
fn axpy<S: Real>(out: &mut [Complex<S>], a: S, x: &[Complex<S>]) {
    for (o, &v) in out.iter_mut().zip(x) {
        *o += v * a;
    }
}

#[inline]
fn copy_axpy<S: Real>(out: &mut [Complex<S>], y: &[Complex<S>], a: S, x: &[Complex<S>]) {
    for ((o, &yy), &xx) in out.iter_mut().zip(y).zip(x) {
        *o = yy + xx * a;
    }
}

/// Advance `y` over `steps` steps of size `dt`. The observer sees the state
/// after every step (and the initial state as step 0); returning `Some(msg)`
/// aborts with the last good time.
pub(crate) fn rk4<S, F, O>(
    y: &mut Vec<Complex<S>>,
    t0: S,
    dt: S,
    steps: usize,
    rhs: &mut F,
    observe: &mut O,
) -> Result<(), (S, String)>
where
    S: Real,
    F: FnMut(S, &[Complex<S>], &mut [Complex<S>]),
    O: FnMut(usize, S, &[Complex<S>]) -> Option<String>,
{
    let n = y.len();
    let zero = Complex::new(S::zero(), S::zero());
    let mut k = vec![zero; n];
    let mut tmp = vec![zero; n];
    let mut acc = vec![zero; n];

    if let Some(msg) = observe(0, t0, y) {
        return Err((t0, msg));
    }

    let half = S::half();
    let sixth = S::one() / S::of(6.0);
    let third = S::one() / S::of(3.0);
    let mut t = t0;
    for step in 0..steps {
        // stage 1
        rhs(t, y, &mut k);
        copy_axpy(&mut acc, y, dt * sixth, &k);
        copy_axpy(&mut tmp, y, dt * half, &k);
        // stage 2
        rhs(t + dt * half, &tmp, &mut k);
        axpy(&mut acc, dt * third, &k);
        copy_axpy(&mut tmp, y, dt * half, &k);
        // stage 3
        rhs(t + dt * half, &tmp, &mut k);
        axpy(&mut acc, dt * third, &k);
        copy_axpy(&mut tmp, y, dt, &k);
        // stage 4
        rhs(t + dt, &tmp, &mut k);
        axpy(&mut acc, dt * sixth, &k);

        std::mem::swap(y, &mut acc);
        let t_next = t0 + dt * S::of((step + 1) as f64);
        if let Some(msg) = observe(step + 1, t_next, y) {
            return Err((t, msg));
        }
        t = t_next;
    }
    Ok(())
}
