//! Adaptive Dormand-Prince 5(4) integration of complex-valued systems.
//!
//! Integration may run in either direction; the Weyl engine integrates
//! backward from the truncation point towards the left endpoint.

use num_complex::Complex64;

use super::ToleranceConfig;
use crate::error::{Error, Result};

/// Dormand-Prince 5(4) tableau (FSAL).
mod dp54 {
    pub const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];

    pub const A: [[f64; 6]; 7] = [
        [0.0; 6],
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];

    /// Difference between the 5th and embedded 4th order weights.
    pub const E: [f64; 7] = [
        71.0 / 57600.0,
        0.0,
        -71.0 / 16695.0,
        71.0 / 1920.0,
        -17253.0 / 339200.0,
        22.0 / 525.0,
        -1.0 / 40.0,
    ];
}

/// PI step-size controller constants (Hairer, Nørsett & Wanner, DOPRI5).
const SAFETY: f64 = 0.9;
const BETA: f64 = 0.04;
const EXPO1: f64 = 0.2 - BETA * 0.75;
const FAC_MIN: f64 = 0.2;
const FAC_MAX: f64 = 10.0;

const MAX_STEPS: usize = 2_000_000;
/// States beyond this magnitude are treated as having left the finite range.
const STATE_LIMIT: f64 = 1e150;

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct OdeStats {
    pub accepted: usize,
    pub rejected: usize,
    pub evaluations: usize,
}

/// Integrates `y' = f(x, y)` from `x_from` to `x_to` and returns `y(x_to)`.
///
/// `f(x, y, dy)` writes the derivative into `dy`. The local error of each
/// step is kept below `abs_tol + rel_tol·|y|` componentwise (RMS norm).
pub fn integrate_complex_ode<F>(
    f: F,
    x_from: f64,
    x_to: f64,
    y0: &[Complex64],
    tol: &ToleranceConfig,
) -> Result<Vec<Complex64>>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    integrate_with_stats(f, x_from, x_to, y0, tol).map(|(y, _)| y)
}

pub(crate) fn integrate_with_stats<F>(
    mut f: F,
    x_from: f64,
    x_to: f64,
    y0: &[Complex64],
    tol: &ToleranceConfig,
) -> Result<(Vec<Complex64>, OdeStats)>
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    if !(x_from.is_finite() && x_to.is_finite()) {
        return Err(Error::invalid("integration bounds must be finite"));
    }
    let n = y0.len();
    let mut y = y0.to_vec();
    let mut stats = OdeStats::default();
    if x_from == x_to || n == 0 {
        return Ok((y, stats));
    }
    if !all_finite(&y) {
        return Err(Error::NonFinite { x: x_from });
    }

    let dir = (x_to - x_from).signum();
    let span = (x_to - x_from).abs();
    let zero = Complex64::new(0.0, 0.0);
    let mut k = vec![vec![zero; n]; 7];
    let mut y_stage = vec![zero; n];
    let mut y_new = vec![zero; n];

    f(x_from, &y, &mut k[0]);
    stats.evaluations += 1;
    if !all_finite(&k[0]) {
        return Err(Error::NonFinite { x: x_from });
    }

    let mut x = x_from;
    let mut h = dir * initial_step(&mut f, x, &y, &k[0], dir, span, tol, &mut stats);
    let mut fac_old = 1e-4_f64;
    let mut last_rejected = false;

    loop {
        if stats.accepted + stats.rejected >= MAX_STEPS {
            return Err(Error::MaxStepsExceeded { steps: MAX_STEPS });
        }
        if (x + h - x_to) * dir > 0.0 {
            h = x_to - x;
        }
        if h.abs() <= 16.0 * f64::EPSILON * x.abs().max(1.0) {
            return Err(Error::StepUnderflow { x });
        }

        for s in 1..7 {
            for i in 0..n {
                let mut acc = y[i];
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = dp54::A[s][j];
                    if a != 0.0 {
                        acc += kj[i] * (h * a);
                    }
                }
                y_stage[i] = acc;
            }
            if s == 6 {
                y_new.copy_from_slice(&y_stage);
            }
            f(x + dp54::C[s] * h, &y_stage, &mut k[s]);
            stats.evaluations += 1;
        }

        let mut err_sq = 0.0;
        let mut finite = all_finite(&y_new);
        for i in 0..n {
            let mut e = zero;
            for (s, ks) in k.iter().enumerate() {
                e += ks[i] * (h * dp54::E[s]);
            }
            let scale = tol.abs_tol + tol.rel_tol * y[i].norm().max(y_new[i].norm());
            let r = e.norm() / scale;
            err_sq += r * r;
        }
        let err = (err_sq / n as f64).sqrt();
        finite &= err.is_finite() && all_finite(&k[6]);

        if !finite {
            // non-finite trial step: shrink hard and retry
            stats.rejected += 1;
            last_rejected = true;
            h *= 0.1;
            continue;
        }

        let fac11 = err.powf(EXPO1);
        if err <= 1.0 {
            stats.accepted += 1;
            x += h;
            y.copy_from_slice(&y_new);
            if y.iter().any(|v| v.norm() > STATE_LIMIT) {
                return Err(Error::NonFinite { x });
            }
            // FSAL: the last stage is the first stage of the next step
            k.rotate_right(1);
            if (x - x_to) * dir >= 0.0 {
                return Ok((y, stats));
            }
            let mut fac = fac11 / fac_old.powf(BETA);
            fac = (fac / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
            let mut h_new = h / fac;
            if last_rejected {
                h_new = dir * h_new.abs().min(h.abs());
            }
            fac_old = err.max(1e-4);
            h = h_new;
            last_rejected = false;
        } else {
            stats.rejected += 1;
            last_rejected = true;
            h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
        }
    }
}

fn all_finite(v: &[Complex64]) -> bool {
    v.iter().all(|c| c.re.is_finite() && c.im.is_finite())
}

/// Starting step size following Hairer's heuristic: an explicit Euler step
/// sized by the solution and derivative norms, refined with a second-derivative
/// estimate.
#[allow(clippy::too_many_arguments)]
fn initial_step<F>(
    f: &mut F,
    x: f64,
    y: &[Complex64],
    dy: &[Complex64],
    dir: f64,
    span: f64,
    tol: &ToleranceConfig,
    stats: &mut OdeStats,
) -> f64
where
    F: FnMut(f64, &[Complex64], &mut [Complex64]),
{
    let n = y.len() as f64;
    let scale: Vec<f64> = y.iter().map(|v| tol.abs_tol + tol.rel_tol * v.norm()).collect();
    let rms = |v: &[Complex64]| -> f64 {
        (v.iter()
            .zip(&scale)
            .map(|(c, s)| (c.norm() / s).powi(2))
            .sum::<f64>()
            / n)
            .sqrt()
    };
    let d0 = rms(y);
    let d1 = rms(dy);
    let h0 = if d0 < 1e-5 || d1 < 1e-5 { 1e-6 } else { 0.01 * d0 / d1 };
    let h0 = h0.min(span);

    let probe: Vec<Complex64> = y.iter().zip(dy).map(|(a, b)| a + b * (dir * h0)).collect();
    let mut dy1 = vec![Complex64::new(0.0, 0.0); y.len()];
    f(x + dir * h0, &probe, &mut dy1);
    stats.evaluations += 1;
    let diff: Vec<Complex64> = dy1.iter().zip(dy).map(|(a, b)| a - b).collect();
    let d2 = rms(&diff) / h0;
    let d2 = if d2.is_finite() { d2 } else { f64::MAX };

    let h1 = if d1.max(d2) <= 1e-15 {
        (h0 * 1e-3).max(1e-6)
    } else {
        (0.01 / d1.max(d2)).powf(1.0 / 5.0)
    };
    (100.0 * h0).min(h1).min(span)
}
