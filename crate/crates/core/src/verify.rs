//! End-to-end verification suite on the Bessel (ν = 3/2) and free catalog
//! potentials.
//!
//! Each criterion compares library output with an independent closed-form
//! reference. The Riccati engine is exercised with the configured truncation
//! radius, so a radius that is too small makes the engine criteria fail.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, FRAC_PI_8, PI};

use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::classify::{classify_lsystem_alpha, classify_th, LSystemClass};
use crate::error::Result;
use crate::funclass::{
    class_limits, class_s01r_check, default_grid, extract_measure, herglotz_check, integral_dg_over_t,
    inverse_stieltjes_check, random_points, sectorial_kernel_psd, SampledFunction,
};
use crate::lsystem::{impedance_from_m, transfer_from_m, vw_residual};
use crate::malpha::{neg_m_alpha, AlphaParam};
use crate::numerics::{ExtendedReal, ToleranceConfig};
use crate::potentials::{bessel_potential, bessel_three_halves_m, free_potential, Potential};
use crate::weyl::{EvalMode, MFunction};

#[derive(Debug, Clone, Default)]
pub struct VerifyConfig {
    /// Truncation radius for the engine criteria; `None` uses the default.
    pub x_max: Option<f64>,
    pub tol: ToleranceConfig,
    pub seed: u64,
}

#[derive(Debug, Clone, Serialize)]
pub struct CriterionResult {
    pub id: u32,
    pub name: String,
    pub pass: bool,
    /// Worst observed value of the criterion's metric.
    pub metric: f64,
    pub threshold: f64,
    pub detail: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerificationReport {
    pub criteria: Vec<CriterionResult>,
    pub notes: Vec<String>,
    pub all_pass: bool,
}

/// Upper-half-plane grid `a + bi`, `a` in 33 steps over `[-5, 5]`,
/// `b ∈ {0.1, 1, 10}`.
pub fn oracle_grid_upper() -> Vec<Complex64> {
    let mut g = Vec::with_capacity(99);
    for i in 0..33 {
        let a = -5.0 + 10.0 * i as f64 / 32.0;
        for b in [0.1, 1.0, 10.0] {
            g.push(Complex64::new(a, b));
        }
    }
    g
}

/// 20 log-spaced points on `[-10, -0.01]`.
pub fn oracle_grid_negative() -> Vec<Complex64> {
    (0..20)
        .map(|i| Complex64::new(-(0.01f64.ln() + (10f64.ln() - 0.01f64.ln()) * i as f64 / 19.0).exp(), 0.0))
        .collect()
}

/// `α_k = −π/2 + π(k+1)/n`, `k = 0..n`; contains `π/2` and, for `n`
/// divisible by 4, also `−π/4`, `0` and `π/4`.
pub fn alpha_grid(n: usize) -> Vec<f64> {
    (0..n).map(|k| -FRAC_PI_2 + PI * (k + 1) as f64 / n as f64).collect()
}

/// 20 points `r e^{iθ}` with `r ∈ {0.1, 0.5, 1, 2, 5}` and
/// `θ ∈ {π/8, 3π/8, 5π/8, 7π/8}`.
pub fn realization_z_grid() -> Vec<Complex64> {
    let mut g = Vec::with_capacity(20);
    for r in [0.1, 0.5, 1.0, 2.0, 5.0] {
        for k in [1.0, 3.0, 5.0, 7.0] {
            g.push(Complex64::from_polar(r, k * FRAC_PI_8));
        }
    }
    g
}

/// Log-polar grid with `r ∈ [1e-4, 1e4]` (41 radii) and 25 angles.
pub fn wide_grid() -> Vec<Complex64> {
    let mut g = Vec::with_capacity(41 * 25);
    for i in 0..41 {
        let r = 10f64.powf(-4.0 + 8.0 * i as f64 / 40.0);
        for k in 0..25 {
            g.push(Complex64::from_polar(r, PI * (k as f64 + 0.5) / 25.0));
        }
    }
    g
}

fn geom(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a * (b / a).powf(i as f64 / (n - 1) as f64)).collect()
}

struct Ctx {
    cfg: VerifyConfig,
}

impl Ctx {
    fn engine(&self, p: Potential) -> Result<MFunction> {
        MFunction::new(p, EvalMode::RiccatiEngine, self.cfg.x_max, self.cfg.tol.clone())
    }

    fn closed(&self, p: Potential) -> Result<MFunction> {
        MFunction::closed_form(p, self.cfg.tol.clone())
    }
}

fn result(id: u32, name: &str, pass: bool, metric: f64, threshold: f64, detail: String) -> CriterionResult {
    CriterionResult {
        id,
        name: name.to_string(),
        pass,
        metric,
        threshold,
        detail,
    }
}

/// Runs the whole suite. Library errors inside a criterion mark that
/// criterion as failed rather than aborting the run.
pub fn run_verification(cfg: &VerifyConfig) -> Result<VerificationReport> {
    cfg.tol.validate()?;
    let ctx = Ctx { cfg: cfg.clone() };
    let mut criteria = Vec::new();
    let mut notes = Vec::new();
    type Check = fn(&Ctx, &mut Vec<String>) -> Result<CriterionResult>;
    let checks: [(u32, &str, Check); 11] = [
        (1, "engine_vs_bessel_closed_form", c1_engine_oracle),
        (2, "boundary_value_m_minus_zero", c2_boundary_values),
        (3, "realization_identities", c3_realization),
        (4, "vw_round_trip_and_contractivity", c4_vw),
        (5, "exact_sectoriality_angle", c5_angle),
        (6, "region_boundaries", c6_regions),
        (7, "class_limit_consistency", c7_limits),
        (8, "sectorial_kernel_psd", c8_kernel),
        (9, "measure_extraction", c9_measure),
        (10, "bessel_limit_at_zero_discrepancy", c10_discrepancy),
        (11, "class_monotonicity_suite", c11_monotonicity),
    ];
    for (id, name, check) in checks {
        let r = check(&ctx, &mut notes)
            .unwrap_or_else(|e| result(id, name, false, f64::NAN, f64::NAN, format!("error: {e}")));
        criteria.push(r);
    }
    let all_pass = criteria.iter().all(|c| c.pass);
    Ok(VerificationReport {
        criteria,
        notes,
        all_pass,
    })
}

fn c1_engine_oracle(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let mf = ctx.engine(bessel_potential(1.5)?)?;
    let mut worst: f64 = 0.0;
    let mut n = 0;
    for z in oracle_grid_upper().into_iter().chain(oracle_grid_negative()) {
        let v = mf.value(z)?;
        worst = worst.max((v - bessel_three_halves_m(z)).norm());
        n += 1;
    }
    Ok(result(
        1,
        "engine_vs_bessel_closed_form",
        worst <= 1e-6,
        worst,
        1e-6,
        format!("max |m_engine - m_closed| over {n} points, x_max = {}", mf.x_max),
    ))
}

fn c2_boundary_values(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let b = ctx.engine(bessel_potential(1.5)?)?.m_minus_zero()?;
    let f = ctx.engine(free_potential(0.0)?)?.m_minus_zero()?;
    let eb = (b.to_f64() - 1.0).abs();
    let ef = f.to_f64().abs();
    let worst = eb.max(ef);
    Ok(result(
        2,
        "boundary_value_m_minus_zero",
        worst <= 1e-4,
        worst,
        1e-4,
        format!("bessel m(-0) = {b}, free m(-0) = {f}"),
    ))
}

fn c3_realization(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let i = Complex64::i();
    let mut worst: f64 = 0.0;
    for alpha in alpha_grid(32) {
        let a = AlphaParam::new(alpha)?;
        for z in realization_z_grid() {
            let m = bessel_three_halves_m(z);
            let scale = 1.0 + m.norm();
            let v = impedance_from_m(a.tan_alpha, i, m, tol)?;
            let target = neg_m_alpha(m, a, tol)?;
            worst = worst.max((v - target).norm() / scale);
            let w = transfer_from_m(a.tan_alpha, i, m, tol)?;
            let phase = -Complex64::from_polar(1.0, 2.0 * a.alpha) * (m - i) / (m + i);
            worst = worst.max((w - phase).norm() / scale);
        }
    }
    Ok(result(
        3,
        "realization_identities",
        worst <= 1e-12,
        worst,
        1e-12,
        "max relative defect of V = -m_alpha and of the phase-factor form of W over 32 x 20".into(),
    ))
}

/// The V-W relations make `W` contractive where `V` has nonpositive imaginary
/// part. For the Herglotz impedances here that is the lower half plane:
/// `|W(z̄)| = 1/|W(z)| ≤ 1` for `Im z > 0`, while `|W(z)| ≥ 1` above the axis.
fn c4_vw(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let i = Complex64::i();
    let mut worst_res: f64 = 0.0;
    let mut max_w_lower: f64 = 0.0;
    let mut min_w_upper = f64::INFINITY;
    for alpha in alpha_grid(32) {
        let a = AlphaParam::new(alpha)?;
        for z in realization_z_grid() {
            for point in [z, z.conj()] {
                let m = bessel_three_halves_m(point);
                let v = impedance_from_m(a.tan_alpha, i, m, tol)?;
                let w = transfer_from_m(a.tan_alpha, i, m, tol)?;
                worst_res = worst_res.max(vw_residual(v, w));
                if point.im < 0.0 {
                    max_w_lower = max_w_lower.max(w.norm());
                } else {
                    min_w_upper = min_w_upper.min(w.norm());
                }
            }
        }
    }
    let pass = worst_res <= 1e-12 && max_w_lower <= 1.0 + 1e-12 && min_w_upper >= 1.0 - 1e-12;
    Ok(result(
        4,
        "vw_round_trip_and_contractivity",
        pass,
        worst_res,
        1e-12,
        format!(
            "max V-W residual {worst_res:e}; max |W| for Im z < 0: {max_w_lower}; min |W| for Im z > 0: {min_w_upper}"
        ),
    ))
}

fn c5_angle(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let v = classify_th(Complex64::i(), ExtendedReal::Finite(1.0), &ctx.cfg.tol);
    let tb = v.tan_exact_angle.unwrap_or(f64::NAN);
    let b = v.exact_angle.unwrap_or(f64::NAN);
    let err = (tb - 1.0).abs().max((b - FRAC_PI_4).abs());
    Ok(result(
        5,
        "exact_sectoriality_angle",
        v.sectorial && err <= 1e-15,
        err,
        1e-15,
        format!("T_i with m0 = 1: tan beta = {tb}, beta = {b}"),
    ))
}

fn c6_regions(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    // with α_k = −π/2 + π(k+1)/256: tan α = −1 at k = 63, 0 at k = 127, 1 at k = 191
    let m0 = ExtendedReal::Finite(1.0);
    let mut mismatches = 0;
    for (k, alpha) in alpha_grid(256).into_iter().enumerate() {
        let got = classify_lsystem_alpha(AlphaParam::new(alpha)?, m0, &ctx.cfg.tol);
        let expect = if k >= 191 {
            LSystemClass::Accretive
        } else if k == 127 {
            LSystemClass::AccumulativeExtremal
        } else if (63..127).contains(&k) {
            LSystemClass::AccumulativeSectorial
        } else {
            LSystemClass::Neither
        };
        if got != expect {
            mismatches += 1;
        }
    }
    Ok(result(
        6,
        "region_boundaries",
        mismatches == 0,
        mismatches as f64,
        0.0,
        "misclassified points on the 256-point alpha grid (m0 = 1)".into(),
    ))
}

fn c7_limits(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let mut worst: f64 = 0.0;
    for (p, m0) in [(bessel_potential(1.5)?, 1.0), (free_potential(0.0)?, 0.0)] {
        let mf = ctx.engine(p)?;
        for t in [-1.0, -0.75, -0.5, -0.25] {
            let a = AlphaParam::from_tan(ExtendedReal::Finite(t))?;
            let l = class_limits(&SampledFunction::neg_m_alpha(mf.clone(), a), &tol.limit_eps_schedule, tol)?;
            let neg_tan_beta1 = -(t + m0) / (1.0 - t * m0);
            let neg_tan_beta2 = 1.0 / t;
            worst = worst
                .max((l.lim_at_zero - neg_tan_beta1).abs())
                .max((l.lim_at_minus_inf - neg_tan_beta2).abs());
        }
    }
    Ok(result(
        7,
        "class_limit_consistency",
        worst <= 1e-4,
        worst,
        1e-4,
        "max deviation of engine limits of -m_alpha from -tan beta1, -tan beta2".into(),
    ))
}

fn c8_kernel(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let a = AlphaParam::from_tan(ExtendedReal::Finite(-1.0))?;
    let f = SampledFunction::neg_m_alpha(ctx.closed(bessel_potential(1.5)?)?, a);
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed);
    let mut min_exact = f64::INFINITY;
    let mut min_small = f64::INFINITY;
    for _ in 0..100 {
        let pts = random_points(&mut rng, 8);
        min_exact = min_exact.min(sectorial_kernel_psd(&f, FRAC_PI_4, &pts, tol)?.min_eig);
        min_small = min_small.min(sectorial_kernel_psd(&f, FRAC_PI_8, &pts, tol)?.min_eig);
    }
    let pass = min_exact >= -1e-8 && min_small < -1e-4;
    Ok(result(
        8,
        "sectorial_kernel_psd",
        pass,
        min_exact,
        -1e-8,
        format!("min eig at beta = pi/4: {min_exact:e}; at beta = pi/8: {min_small:e} (seed {})", ctx.cfg.seed),
    ))
}

fn c9_measure(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let f = SampledFunction::neg_m_infinity(ctx.closed(bessel_potential(1.5)?)?);
    let t_grid = geom(0.1, 1000.0, 321);
    let mt = extract_measure(&f, &t_grid, &tol.limit_eps_schedule, tol)?;
    let mut worst: f64 = 0.0;
    for (t, d) in mt.t_grid.iter().zip(&mt.density) {
        if *t <= 10.0 * (1.0 + 1e-12) {
            let exact = t.powf(1.5) / (1.0 + t) / PI;
            worst = worst.max((d - exact).abs() / exact);
        }
    }
    let gamma_err = (mt.gamma + 1.0).abs();
    let s01r = class_s01r_check(&mt, 0.5);
    let i10 = integral_dg_over_t(&mt, 0.1, 10.0)?;
    let i100 = integral_dg_over_t(&mt, 0.1, 100.0)?;
    let i1000 = integral_dg_over_t(&mt, 0.1, 1000.0)?;
    // no plateau: increments over successive decades do not shrink
    let growing = i100 > i10 && i1000 - i100 >= i100 - i10;
    let pass = worst <= 1e-3 && gamma_err <= 1e-3 && s01r && growing;
    Ok(result(
        9,
        "measure_extraction",
        pass,
        worst,
        1e-3,
        format!(
            "density rel err {worst:e}, gamma = {}, unbounded G = {s01r}, int dG/t to 10/100/1000 = {i10:.4}/{i100:.4}/{i1000:.4}",
            mt.gamma
        ),
    ))
}

fn c10_discrepancy(ctx: &Ctx, notes: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let f = SampledFunction::neg_m_infinity(ctx.closed(bessel_potential(1.5)?)?);
    let l = class_limits(&f, &tol.limit_eps_schedule, tol)?;
    let err = (l.lim_at_zero + 1.0).abs();
    let beta1 = (-l.lim_at_zero).atan();
    notes.push(format!(
        "-m_inf for the Bessel potential has lim_(x->0-) = {:.6}, so tan(pi - beta1) = -1 and beta1 = {:.6} (pi/4), \
         while lim_(x->-inf) = {}; its limit-based class is S^(-1, pi/4, pi/2), not S^(-1, 0, pi/2).",
        l.lim_at_zero, beta1, l.lim_at_minus_inf
    ));
    Ok(result(
        10,
        "bessel_limit_at_zero_discrepancy",
        err <= 1e-4 && l.lim_at_minus_inf == f64::NEG_INFINITY,
        err,
        1e-4,
        format!("lim at 0- = {}, lim at -inf = {}", l.lim_at_zero, l.lim_at_minus_inf),
    ))
}

fn c11_monotonicity(ctx: &Ctx, _: &mut Vec<String>) -> Result<CriterionResult> {
    let tol = &ctx.cfg.tol;
    let bessel = ctx.closed(bessel_potential(1.5)?)?;
    let free = ctx.closed(free_potential(0.0)?)?;
    let mut failures = Vec::new();

    // nesting of sectorial classes on shared point sets
    let betas: Vec<f64> = (1..=8).map(|k| k as f64 * PI / 16.0).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(ctx.cfg.seed ^ 0x5eed);
    let mut nesting_violations = 0;
    for t in [-1.0, -0.5, -0.1] {
        let f = SampledFunction::neg_m_alpha(bessel.clone(), AlphaParam::from_tan(ExtendedReal::Finite(t))?);
        for _ in 0..20 {
            let pts = random_points(&mut rng, 6);
            let mut passed = false;
            for &b in &betas {
                let ok = sectorial_kernel_psd(&f, b, &pts, tol)?.pass;
                if passed && !ok {
                    nesting_violations += 1;
                }
                passed |= ok;
            }
        }
    }
    if nesting_violations > 0 {
        failures.push(format!("{nesting_violations} nesting violations"));
    }

    // Herglotz property of −m_α for all α
    let grid = default_grid();
    let mut min_im = f64::INFINITY;
    for alpha in alpha_grid(32) {
        let a = AlphaParam::new(alpha)?;
        for mf in [&bessel, &free] {
            let r = herglotz_check(&SampledFunction::neg_m_alpha(mf.clone(), a), &grid, tol)?;
            min_im = min_im.min(r.min_value);
        }
    }
    if min_im < -1e-10 {
        failures.push(format!("Herglotz min Im = {min_im:e}"));
    }

    // inverse Stieltjes exactly for −1 ≤ tan α ≤ 0 (indices 63..=127)
    let wide = wide_grid();
    let mut is_mismatch = 0;
    for (k, alpha) in alpha_grid(256).into_iter().enumerate() {
        let f = SampledFunction::neg_m_alpha(bessel.clone(), AlphaParam::new(alpha)?);
        let pass = inverse_stieltjes_check(&f, &wide, tol)?.pass;
        if pass != (63..=127).contains(&k) {
            is_mismatch += 1;
        }
    }
    if is_mismatch > 0 {
        failures.push(format!("{is_mismatch} inverse Stieltjes mismatches"));
    }

    Ok(result(
        11,
        "class_monotonicity_suite",
        failures.is_empty(),
        (nesting_violations + is_mismatch) as f64,
        0.0,
        if failures.is_empty() {
            format!("nesting, Herglotz (min Im {min_im:e}) and inverse Stieltjes range all hold")
        } else {
            failures.join("; ")
        },
    ))
}
