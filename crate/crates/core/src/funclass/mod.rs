//! Sampling tests for function classes and extraction of the representing
//! measure of an inverse Stieltjes function
//!
//! ```text
//! V(z) = γ + ∫₀^∞ (1/(t − z) − 1/t) dG(t),   γ ≤ 0.
//! ```
//!
//! These are numerical certificates on finite point sets, not proofs.

use std::f64::consts::PI;
use std::io::Write;
use std::sync::Arc;

use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malpha::{neg_m_alpha, AlphaParam};
use crate::numerics::{extrapolate_limit, ToleranceConfig};
use crate::weyl::MFunction;

/// Largest kernel size accepted by [`sectorial_kernel_psd`].
pub const MAX_KERNEL_POINTS: usize = 16;

/// Geometric schedule of radii `R` for limits `x → −∞`.
pub const MINUS_INF_SCHEDULE: [f64; 5] = [1e2, 1e3, 1e4, 1e5, 1e6];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum DomainTag {
    /// Holomorphic on `ℂ ∖ [0, ∞)`.
    ExtNonnegAxis,
    UpperHalfPlane,
}

type EvalFn = Arc<dyn Fn(Complex64) -> Result<Complex64> + Send + Sync>;

#[derive(Clone)]
pub struct SampledFunction {
    eval: EvalFn,
    pub domain_tag: DomainTag,
}

impl std::fmt::Debug for SampledFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SampledFunction").field("domain_tag", &self.domain_tag).finish()
    }
}

impl SampledFunction {
    pub fn new(domain_tag: DomainTag, f: impl Fn(Complex64) -> Result<Complex64> + Send + Sync + 'static) -> Self {
        SampledFunction {
            eval: Arc::new(f),
            domain_tag,
        }
    }

    pub fn eval(&self, z: Complex64) -> Result<Complex64> {
        (self.eval)(z)
    }

    pub fn constant(c: Complex64) -> Self {
        Self::new(DomainTag::ExtNonnegAxis, move |_| Ok(c))
    }

    pub fn m_infinity(mf: MFunction) -> Self {
        Self::new(DomainTag::ExtNonnegAxis, move |z| mf.value(z))
    }

    pub fn neg_m_infinity(mf: MFunction) -> Self {
        Self::new(DomainTag::ExtNonnegAxis, move |z| mf.value(z).map(|m| -m))
    }

    pub fn recip_m_infinity(mf: MFunction) -> Self {
        Self::new(DomainTag::ExtNonnegAxis, move |z| {
            let m = mf.value(z)?;
            if m.norm() < mf.tol.abs_tol {
                return Err(Error::PoleHit { denominator: m.norm() });
            }
            Ok(m.inv())
        })
    }

    pub fn neg_m_alpha(mf: MFunction, a: AlphaParam) -> Self {
        Self::new(DomainTag::ExtNonnegAxis, move |z| neg_m_alpha(mf.value(z)?, a, &mf.tol))
    }
}

/// 100 points `r e^{iθ}` with `r` log-spaced in `[1e-2, 1e2]` and
/// `θ = π(k + 1/2)/10`.
pub fn default_grid() -> Vec<Complex64> {
    let mut g = Vec::with_capacity(100);
    for i in 0..10 {
        let r = 10f64.powf(-2.0 + 4.0 * i as f64 / 9.0);
        for k in 0..10 {
            g.push(Complex64::from_polar(r, PI * (k as f64 + 0.5) / 10.0));
        }
    }
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CheckResult {
    pub pass: bool,
    pub min_value: f64,
}

fn min_over_grid(
    f: &SampledFunction,
    grid: &[Complex64],
    tol: &ToleranceConfig,
    key: impl Fn(Complex64, Complex64) -> f64,
) -> Result<CheckResult> {
    let mut min_value = f64::INFINITY;
    for &z in grid {
        if !(z.im > 0.0) {
            return Err(Error::invalid(format!("grid point {z} is not in the upper half plane")));
        }
        min_value = min_value.min(key(z, f.eval(z)?));
    }
    Ok(CheckResult {
        pass: min_value >= -tol.psd_slack,
        min_value,
    })
}

/// `Im f(z) ≥ 0` on the grid.
pub fn herglotz_check(f: &SampledFunction, grid: &[Complex64], tol: &ToleranceConfig) -> Result<CheckResult> {
    min_over_grid(f, grid, tol, |_, v| v.im)
}

/// `Im[z f(z)]/Im z ≥ 0` on the grid.
pub fn stieltjes_check(f: &SampledFunction, grid: &[Complex64], tol: &ToleranceConfig) -> Result<CheckResult> {
    min_over_grid(f, grid, tol, |z, v| (z * v).im / z.im)
}

/// `Im[f(z)/z]/Im z ≥ 0` on the grid.
pub fn inverse_stieltjes_check(f: &SampledFunction, grid: &[Complex64], tol: &ToleranceConfig) -> Result<CheckResult> {
    min_over_grid(f, grid, tol, |z, v| (v / z).im / z.im)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct KernelResult {
    pub pass: bool,
    pub min_eig: f64,
}

/// Minimal eigenvalue of the Hermitian kernel
///
/// ```text
/// K[k,l] = (g_k − ḡ_l)/(z_k − z̄_l) − cot β · g_k ḡ_l,   g = f(z)/z,
/// ```
///
/// which is positive semidefinite for every finite point set exactly when
/// `f` belongs to the sectorial class of angle `β`. Uses `f(z̄) = conj f(z)`.
pub fn sectorial_kernel_psd(
    f: &SampledFunction,
    beta: f64,
    points: &[Complex64],
    tol: &ToleranceConfig,
) -> Result<KernelResult> {
    let n = points.len();
    if n == 0 || n > MAX_KERNEL_POINTS {
        return Err(Error::invalid(format!(
            "kernel needs 1..={MAX_KERNEL_POINTS} points, got {n}"
        )));
    }
    if !(beta > 0.0 && beta <= PI / 2.0) {
        return Err(Error::invalid(format!("beta must lie in (0, pi/2], got {beta}")));
    }
    for (k, z) in points.iter().enumerate() {
        if !(z.im > 0.0) {
            return Err(Error::invalid(format!("kernel point {z} is not in the upper half plane")));
        }
        for (l, w) in points.iter().enumerate().take(k) {
            if (z - w).norm() <= 4.0 * f64::EPSILON * z.norm().max(w.norm()) {
                return Err(Error::DegeneratePoints { first: l, second: k });
            }
        }
    }
    let cot = beta.cos() / beta.sin();
    let g: Vec<Complex64> = points
        .iter()
        .map(|&z| f.eval(z).map(|v| v / z))
        .collect::<Result<_>>()?;
    let k = DMatrix::from_fn(n, n, |a, b| {
        (g[a] - g[b].conj()) / (points[a] - points[b].conj()) - cot * g[a] * g[b].conj()
    });
    let k = (&k + k.adjoint()) * Complex64::new(0.5, 0.0);
    let min_eig = k.symmetric_eigenvalues().min();
    Ok(KernelResult {
        pass: min_eig >= -tol.psd_slack,
        min_eig,
    })
}

/// Random upper-half-plane points `r e^{iθ}` with `log10 r ~ U(−3, 3)` and
/// `θ ~ U(0.01, π − 0.01)`.
pub fn random_points(rng: &mut impl Rng, n: usize) -> Vec<Complex64> {
    (0..n)
        .map(|_| {
            let r = 10f64.powf(rng.gen_range(-3.0..3.0));
            let theta = rng.gen_range(0.01..PI - 0.01);
            Complex64::from_polar(r, theta)
        })
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TrialSummary {
    pub pass: bool,
    pub min_eig: f64,
    pub worst_trial: usize,
    pub trials: usize,
}

/// [`sectorial_kernel_psd`] over `trials` independent random point sets of
/// size `n` drawn from a ChaCha8 stream seeded with `seed`.
pub fn sectorial_kernel_trials(
    f: &SampledFunction,
    beta: f64,
    n: usize,
    trials: usize,
    seed: u64,
    tol: &ToleranceConfig,
) -> Result<TrialSummary> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = (f64::INFINITY, 0);
    for trial in 0..trials {
        let pts = random_points(&mut rng, n);
        let r = sectorial_kernel_psd(f, beta, &pts, tol)?;
        if r.min_eig < worst.0 {
            worst = (r.min_eig, trial);
        }
    }
    Ok(TrialSummary {
        pass: worst.0 >= -tol.psd_slack,
        min_eig: worst.0,
        worst_trial: worst.1,
        trials,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MeasureTable {
    pub t_grid: Vec<f64>,
    /// `dG/dt`.
    pub density: Vec<f64>,
    /// `G(t) − G(t_grid[0])` by the trapezoid rule.
    pub cumulative: Vec<f64>,
    pub gamma: f64,
    pub gamma_err: f64,
}

fn trapezoid_cumulative(t: &[f64], y: &[f64]) -> Vec<f64> {
    let mut c = Vec::with_capacity(t.len());
    let mut acc = 0.0;
    for i in 0..t.len() {
        if i > 0 {
            acc += 0.5 * (y[i] + y[i - 1]) * (t[i] - t[i - 1]);
        }
        c.push(acc);
    }
    c
}

/// Recovers `γ` and the density of `G` from boundary values:
/// `dG/dt = (1/π) lim_{ε→0} Im f(t + iε)` and `γ = f(−0)`.
///
/// The limits are extrapolated over `eps_schedule` (in `ε` for the density,
/// in `√ε` for `γ`). Fails with `NotInverseStieltjes` when `f` does not pass
/// [`inverse_stieltjes_check`] on the default grid.
pub fn extract_measure(
    f: &SampledFunction,
    t_grid: &[f64],
    eps_schedule: &[f64],
    tol: &ToleranceConfig,
) -> Result<MeasureTable> {
    if t_grid.is_empty() {
        return Err(Error::invalid("t grid is empty"));
    }
    if t_grid.windows(2).any(|w| !(w[1] > w[0])) || !(t_grid[0] > 0.0) || !t_grid[t_grid.len() - 1].is_finite() {
        return Err(Error::invalid("t grid must be positive, finite and strictly increasing"));
    }
    let check = inverse_stieltjes_check(f, &default_grid(), tol)?;
    if !check.pass {
        return Err(Error::NotInverseStieltjes {
            min_value: check.min_value,
        });
    }
    let mut density = Vec::with_capacity(t_grid.len());
    for &t in t_grid {
        let samples: Vec<(f64, Complex64)> = eps_schedule
            .iter()
            .map(|&e| f.eval(Complex64::new(t, e)).map(|v| (e, Complex64::new(v.im, 0.0))))
            .collect::<Result<_>>()?;
        let r = extrapolate_limit(&samples, tol.divergence_bound)?;
        density.push(r.value.re / PI);
    }
    let samples: Vec<(f64, Complex64)> = eps_schedule
        .iter()
        .map(|&e| f.eval(Complex64::new(-e, 0.0)).map(|v| (e.sqrt(), Complex64::new(v.re, 0.0))))
        .collect::<Result<_>>()?;
    let g = extrapolate_limit(&samples, tol.divergence_bound)?;
    let cumulative = trapezoid_cumulative(t_grid, &density);
    Ok(MeasureTable {
        t_grid: t_grid.to_vec(),
        density,
        cumulative,
        gamma: g.value.re,
        gamma_err: g.err_estimate,
    })
}

impl MeasureTable {
    /// Table with a prescribed density, e.g. for quadrature checks.
    pub fn from_density(t_grid: Vec<f64>, density: Vec<f64>, gamma: f64) -> Result<Self> {
        if t_grid.len() != density.len() {
            return Err(Error::invalid("t grid and density differ in length"));
        }
        let cumulative = trapezoid_cumulative(&t_grid, &density);
        Ok(MeasureTable {
            t_grid,
            density,
            cumulative,
            gamma,
            gamma_err: 0.0,
        })
    }

    /// Piecewise-linear interpolation of `cumulative` at `t`, clamped to the
    /// grid.
    pub fn cumulative_at(&self, t: f64) -> f64 {
        interp(&self.t_grid, &self.cumulative, t)
    }

    /// CSV with header `t,density,cumulative`.
    pub fn write_csv<W: Write>(&self, w: W) -> Result<()> {
        let mut wtr = csv::Writer::from_writer(w);
        let io = |e: csv::Error| Error::invalid(format!("csv write failed: {e}"));
        wtr.write_record(["t", "density", "cumulative"]).map_err(io)?;
        for i in 0..self.t_grid.len() {
            wtr.serialize((self.t_grid[i], self.density[i], self.cumulative[i]))
                .map_err(io)?;
        }
        wtr.flush().map_err(|e| Error::invalid(format!("csv write failed: {e}")))?;
        Ok(())
    }
}

fn interp(xs: &[f64], ys: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return ys[0];
    }
    if x >= xs[n - 1] {
        return ys[n - 1];
    }
    let i = xs.partition_point(|&v| v <= x);
    let t = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
    ys[i - 1] + t * (ys[i] - ys[i - 1])
}

/// Trapezoid estimate of `∫ dG(t)/t` over `[t_min, t_max] ∩ grid range`,
/// with the integrand `density/t` interpolated linearly at the ends.
pub fn integral_dg_over_t(mt: &MeasureTable, t_min: f64, t_max: f64) -> Result<f64> {
    if !(t_min > 0.0 && t_max > t_min) {
        return Err(Error::invalid(format!("need 0 < t_min < t_max, got [{t_min}, {t_max}]")));
    }
    let ts = &mt.t_grid;
    let ys: Vec<f64> = ts.iter().zip(&mt.density).map(|(t, d)| d / t).collect();
    let lo = t_min.max(ts[0]);
    let hi = t_max.min(ts[ts.len() - 1]);
    if hi <= lo {
        return Ok(0.0);
    }
    let mut nodes = vec![(lo, interp(ts, &ys, lo))];
    for (t, y) in ts.iter().zip(&ys) {
        if *t > lo && *t < hi {
            nodes.push((*t, *y));
        }
    }
    nodes.push((hi, interp(ts, &ys, hi)));
    Ok(nodes
        .windows(2)
        .map(|w| 0.5 * (w[0].1 + w[1].1) * (w[1].0 - w[0].0))
        .sum())
}

/// Whether `G` keeps growing at the end of the table:
/// `G(t_max) − G(t_max/10) > growth_threshold · G(t_max/10)`, with `G`
/// measured from the start of the grid.
pub fn class_s01r_check(mt: &MeasureTable, growth_threshold: f64) -> bool {
    let t_max = mt.t_grid[mt.t_grid.len() - 1];
    let upper = mt.cumulative_at(t_max);
    let lower = mt.cumulative_at(t_max / 10.0);
    upper - lower > growth_threshold * lower && upper > lower
}

/// One-sided limits of `f` along the negative real axis. Infinite limits are
/// reported as signed infinities.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassLimits {
    pub lim_at_zero: f64,
    pub err_at_zero: f64,
    pub lim_at_minus_inf: f64,
    pub err_at_minus_inf: f64,
}

fn limit_or_signed_infinity(samples: &[(f64, Complex64)], bound: f64) -> Result<(f64, f64)> {
    match extrapolate_limit(samples, bound) {
        Ok(r) => Ok((r.value.re, r.err_estimate)),
        Err(Error::Divergent) => {
            let last = samples
                .iter()
                .min_by(|a, b| a.0.total_cmp(&b.0))
                .map(|s| s.1.re)
                .unwrap_or(1.0);
            Ok((f64::INFINITY.copysign(last), 0.0))
        }
        Err(e) => Err(e),
    }
}

/// `lim_{x→0⁻} f(x)` (extrapolated in `√eps` over `eps_schedule`) and
/// `lim_{x→−∞} f(x)` (extrapolated in `1/√R` over [`MINUS_INF_SCHEDULE`]).
pub fn class_limits(f: &SampledFunction, eps_schedule: &[f64], tol: &ToleranceConfig) -> Result<ClassLimits> {
    let zero: Vec<(f64, Complex64)> = eps_schedule
        .iter()
        .map(|&e| f.eval(Complex64::new(-e, 0.0)).map(|v| (e.sqrt(), Complex64::new(v.re, 0.0))))
        .collect::<Result<_>>()?;
    let inf: Vec<(f64, Complex64)> = MINUS_INF_SCHEDULE
        .iter()
        .map(|&r| f.eval(Complex64::new(-r, 0.0)).map(|v| (1.0 / r.sqrt(), Complex64::new(v.re, 0.0))))
        .collect::<Result<_>>()?;
    let (lim_at_zero, err_at_zero) = limit_or_signed_infinity(&zero, tol.divergence_bound)?;
    let (lim_at_minus_inf, err_at_minus_inf) = limit_or_signed_infinity(&inf, tol.divergence_bound)?;
    Ok(ClassLimits {
        lim_at_zero,
        err_at_zero,
        lim_at_minus_inf,
        err_at_minus_inf,
    })
}
