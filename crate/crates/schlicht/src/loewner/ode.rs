//! Adaptive Dormand-Prince 5(4) integration over small complex states.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::tol;

/// Step-control parameters for the embedded pair.
#[derive(Debug, Clone, PartialEq)]
pub struct StepControl {
    pub rel_tol: f64,
    pub abs_tol: f64,
    pub initial_step: f64,
    pub max_step: f64,
    pub max_steps: usize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl {
            rel_tol: tol::ODE_REL,
            abs_tol: tol::ODE_ABS,
            initial_step: 1e-3,
            max_step: 1.0,
            max_steps: 1_000_000,
        }
    }
}

impl StepControl {
    /// Tightened control for quadratures that resolve cancellations.
    pub fn tight() -> Self {
        StepControl { rel_tol: 1e-12, abs_tol: 1e-14, ..StepControl::default() }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 6] = [
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B: [f64; 7] =
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B_HAT: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

fn axpy<const N: usize>(y: &[Complex64; N], coeffs: &[(f64, [Complex64; N])], h: f64) -> [Complex64; N] {
    let mut out = *y;
    for (c, k) in coeffs {
        for i in 0..N {
            out[i] += h * c * k[i];
        }
    }
    out
}

/// Integrates y' = rhs(t, y) from t0 to t1 (t1 >= t0) with the embedded
/// 5(4) pair; the right-hand side may fail, which aborts the solve.
pub fn integrate<const N: usize, F>(
    rhs: F,
    t0: f64,
    t1: f64,
    y0: [Complex64; N],
    ctrl: &StepControl,
) -> Result<[Complex64; N]>
where
    F: Fn(f64, &[Complex64; N]) -> Result<[Complex64; N]>,
{
    if !(t1 >= t0) {
        return Err(Error::InvalidInput("integration span must be forward".into()));
    }
    if t1 == t0 {
        return Ok(y0);
    }
    let span = t1 - t0;
    let mut t = t0;
    let mut y = y0;
    let mut h = ctrl.initial_step.min(ctrl.max_step).min(span);
    let mut k1 = rhs(t, &y)?;

    for _ in 0..ctrl.max_steps {
        if t >= t1 {
            return Ok(y);
        }
        h = h.min(t1 - t);
        if h < 1e-14 * t.abs().max(1.0) {
            return Err(Error::StepLimitExceeded { t });
        }

        let k2 = rhs(t + C[1] * h, &axpy(&y, &[(A[0][0], k1)], h))?;
        let k3 = rhs(t + C[2] * h, &axpy(&y, &[(A[1][0], k1), (A[1][1], k2)], h))?;
        let k4 = rhs(t + C[3] * h, &axpy(&y, &[(A[2][0], k1), (A[2][1], k2), (A[2][2], k3)], h))?;
        let k5 = rhs(
            t + C[4] * h,
            &axpy(&y, &[(A[3][0], k1), (A[3][1], k2), (A[3][2], k3), (A[3][3], k4)], h),
        )?;
        let k6 = rhs(
            t + C[5] * h,
            &axpy(
                &y,
                &[(A[4][0], k1), (A[4][1], k2), (A[4][2], k3), (A[4][3], k4), (A[4][4], k5)],
                h,
            ),
        )?;
        let y_new = axpy(
            &y,
            &[(A[5][0], k1), (A[5][1], k2), (A[5][2], k3), (A[5][3], k4), (A[5][4], k5), (A[5][5], k6)],
            h,
        );
        let k7 = rhs(t + C[6] * h, &y_new)?;

        let ks = [k1, k2, k3, k4, k5, k6, k7];
        let mut err_sq = 0.0;
        for i in 0..N {
            let mut e = Complex64::new(0.0, 0.0);
            for s in 0..7 {
                e += (B[s] - B_HAT[s]) * ks[s][i];
            }
            let sc = ctrl.abs_tol + ctrl.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = (h * e).norm() / sc;
            err_sq += r * r;
        }
        let err = (err_sq / N as f64).sqrt();

        if err <= 1.0 {
            t += h;
            y = y_new;
            k1 = k7; // first-same-as-last
        }
        let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
        h = (h * factor).min(ctrl.max_step);
    }
    Err(Error::StepLimitExceeded { t })
}
