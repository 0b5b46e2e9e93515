//! Structural properties of the engine, the classification maps and the
//! function-class tests, checked against independent references.

use std::f64::consts::PI;

use num_complex::Complex64;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use weylsys::classify::{class_angles, classify_lsystem_alpha, classify_th, LSystemClass};
use weylsys::funclass::{
    class_limits, default_grid, extract_measure, herglotz_check, inverse_stieltjes_check, sectorial_kernel_psd,
    SampledFunction,
};
use weylsys::malpha::AlphaParam;
use weylsys::numerics::integrate_complex_ode;
use weylsys::potentials::{bessel_potential, free_potential, Potential};
use weylsys::weyl::MFunction;
use weylsys::{ExtendedReal, ToleranceConfig};

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn root_upper(z: Complex64) -> Complex64 {
    let s = z.sqrt();
    if s.im < 0.0 {
        -s
    } else {
        s
    }
}

/// `−ψ'(1)/ψ(1)` for `ψ(x) = e^{ikx}(1 + i/(kx))`.
fn bessel_oracle(z: Complex64) -> Complex64 {
    let k = root_upper(z);
    let i = Complex64::i();
    -(i * k - (i / k) / (1.0 + i / k))
}

fn free_oracle(z: Complex64) -> Complex64 {
    -Complex64::i() * root_upper(z)
}

fn test_grid() -> Vec<Complex64> {
    let mut g = Vec::new();
    for a in -5..=5 {
        for b in [0.1, 1.0, 10.0] {
            g.push(c(a as f64, b));
        }
    }
    for k in 0..20 {
        g.push(c(-(0.01f64.ln() + 1000f64.ln() * k as f64 / 19.0).exp(), 0.0));
    }
    g
}

type Oracle = fn(Complex64) -> Complex64;

fn catalog() -> Vec<(Potential, Oracle)> {
    vec![
        (bessel_potential(1.5).unwrap(), bessel_oracle as Oracle),
        (free_potential(0.0).unwrap(), free_oracle),
    ]
}

#[test]
fn engine_matches_oracles_on_both_catalog_potentials() {
    for (p, oracle) in catalog() {
        let label = p.label.clone();
        let mf = MFunction::engine(p, ToleranceConfig::default());
        for z in test_grid() {
            // any RiccatiBlowup off the spectrum would surface here
            let v = mf.eval(z).unwrap_or_else(|e| panic!("{label} at {z}: {e}"));
            assert!((v.value - oracle(z)).norm() <= 1e-6, "{label} at {z}: {} vs {}", v.value, oracle(z));
        }
    }
}

#[test]
fn engine_minus_m_is_herglotz() {
    for (p, _) in catalog() {
        let mf = MFunction::engine(p, ToleranceConfig::default());
        let r = herglotz_check(&SampledFunction::neg_m_infinity(mf), &default_grid(), &ToleranceConfig::default())
            .unwrap();
        assert!(r.pass && r.min_value >= -1e-10, "min Im = {}", r.min_value);
    }
}

#[test]
fn doubling_radius_stays_within_error_estimate() {
    for (p, _) in catalog() {
        let mf = MFunction::engine(p, ToleranceConfig::default());
        let wide = mf.clone().with_x_max(2.0 * mf.x_max).unwrap();
        for z in test_grid() {
            let v = mf.eval(z).unwrap();
            let d = (wide.value(z).unwrap() - v.value).norm();
            assert!(d < v.err_estimate, "z = {z}: change {d:e}, estimate {:e}", v.err_estimate);
        }
    }
}

fn rotation_error(abs_tol: f64) -> f64 {
    let tol = ToleranceConfig {
        abs_tol,
        rel_tol: 1e-15,
        ..Default::default()
    };
    let y = integrate_complex_ode(
        |_, y, dy| dy[0] = Complex64::i() * y[0],
        0.0,
        1.0,
        &[c(1.0, 0.0)],
        &tol,
    )
    .unwrap();
    (y[0] - Complex64::from_polar(1.0, 1.0)).norm()
}

fn constant_error(abs_tol: f64) -> f64 {
    let tol = ToleranceConfig {
        abs_tol,
        rel_tol: 1e-15,
        ..Default::default()
    };
    let y0 = c(0.3, -2.0);
    let y = integrate_complex_ode(|_, _, dy| dy[0] = c(0.0, 0.0), -3.0, 7.0, &[y0], &tol).unwrap();
    (y[0] - y0).norm()
}

/// Backward Riccati `w' = 2/x² − z − w²` from `x = 60` with the asymptotic
/// seed, compared against the decaying-solution log derivative at `x = 1`.
fn riccati_error(abs_tol: f64) -> f64 {
    let tol = ToleranceConfig {
        abs_tol,
        rel_tol: 1e-15,
        ..Default::default()
    };
    let z = Complex64::i();
    let x0 = 60.0;
    let seed = Complex64::i() * root_upper(z - 2.0 / (x0 * x0));
    let w = integrate_complex_ode(
        move |x, w, dw| dw[0] = 2.0 / (x * x) - z - w[0] * w[0],
        x0,
        1.0,
        &[seed],
        &tol,
    )
    .unwrap();
    (w[0] + bessel_oracle(z)).norm()
}

/// Checked from `abs_tol = 1e-7` down to `1e-13`, which brackets the
/// default. With only a handful of steps (coarser tolerances) the signed
/// local errors do not accumulate monotonically.
#[test]
fn halving_abs_tol_never_increases_error() {
    for (name, err) in [
        ("rotation", rotation_error as fn(f64) -> f64),
        ("constant", constant_error),
        ("riccati", riccati_error),
    ] {
        let errors: Vec<f64> = (0..20).map(|k| err(1e-7 / 2f64.powi(k))).collect();
        for pair in errors.windows(2) {
            assert!(pair[1] <= pair[0], "{name}: {errors:?}");
        }
    }
}

#[test]
fn measure_resynthesizes_bessel_impedance() {
    let tol = ToleranceConfig::default();
    let mf = MFunction::closed_form(bessel_potential(1.5).unwrap(), tol.clone()).unwrap();
    let f = SampledFunction::neg_m_infinity(mf);
    let n = 1201;
    let t_grid: Vec<f64> = (0..n).map(|k| 1e-6 * 10f64.powf(12.0 * k as f64 / (n - 1) as f64)).collect();
    let mt = extract_measure(&f, &t_grid, &tol.limit_eps_schedule, &tol).unwrap();
    for z in [c(0.0, 1.0), c(0.0, 2.0), c(-1.0, 1.0)] {
        // trapezoid in log t of (1/(t − z) − 1/t) g(t) t
        let h: Vec<Complex64> = mt
            .t_grid
            .iter()
            .zip(&mt.density)
            .map(|(&t, &g)| (1.0 / (t - z) - 1.0 / t) * g * t)
            .collect();
        let mut integral = c(0.0, 0.0);
        for k in 1..n {
            let du = (mt.t_grid[k] / mt.t_grid[k - 1]).ln();
            integral += 0.5 * du * (h[k] + h[k - 1]);
        }
        let v = mt.gamma + integral;
        let exact = -bessel_oracle(z);
        let rel = (v - exact).norm() / exact.norm();
        assert!(rel <= 1e-2, "z = {z}: {v} vs {exact} (rel {rel:e})");
    }
}

#[test]
fn class_limits_follow_angle_formulas_across_accumulative_range() {
    let tol = ToleranceConfig::default();
    for (p, oracle) in catalog() {
        let m0 = oracle(c(-1e-16, 0.0)).re;
        let mf = MFunction::engine(p, tol.clone());
        for k in 1..=10 {
            let t = -0.1 * k as f64;
            let a = AlphaParam::from_tan(ExtendedReal::Finite(t)).unwrap();
            let l = class_limits(&SampledFunction::neg_m_alpha(mf.clone(), a), &tol.limit_eps_schedule, &tol).unwrap();
            let tan_beta1 = (t + m0) / (1.0 - t * m0);
            let tan_beta2 = -1.0 / t;
            assert!((l.lim_at_zero + tan_beta1).abs() <= 1e-4, "tan a = {t}: {} vs {}", l.lim_at_zero, -tan_beta1);
            assert!((l.lim_at_minus_inf + tan_beta2).abs() <= 1e-4, "tan a = {t}: {}", l.lim_at_minus_inf);
        }
    }
}

#[test]
fn single_point_kernel_agrees_with_inverse_stieltjes() {
    let tol = ToleranceConfig::default();
    let mf = MFunction::closed_form(bessel_potential(1.5).unwrap(), tol.clone()).unwrap();
    let functions = [
        SampledFunction::neg_m_infinity(mf.clone()),
        SampledFunction::neg_m_alpha(mf.clone(), AlphaParam::from_tan(ExtendedReal::Finite(0.5)).unwrap()),
        SampledFunction::neg_m_alpha(mf, AlphaParam::from_tan(ExtendedReal::Finite(-2.0)).unwrap()),
    ];
    let mut rng = ChaCha8Rng::seed_from_u64(1000);
    let mut disagreements = 0;
    let mut failures = 0;
    for k in 0..1000 {
        let z = Complex64::from_polar(10f64.powf(rng.gen_range(-3.0..3.0)), rng.gen_range(0.01..PI - 0.01));
        let f = &functions[k % functions.len()];
        let kernel = sectorial_kernel_psd(f, PI / 2.0, &[z], &tol).unwrap().pass;
        let direct = inverse_stieltjes_check(f, &[z], &tol).unwrap().pass;
        disagreements += usize::from(kernel != direct);
        failures += usize::from(!direct);
    }
    assert_eq!(disagreements, 0);
    assert!(failures > 0, "the sample should include points outside the class");
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn alpha_regions_partition_consistently(m0 in 0.05f64..20.0) {
        let tol = ToleranceConfig::default();
        let m = ExtendedReal::Finite(m0);
        let mut last_rank = 0;
        for k in 0..512 {
            let alpha = -PI / 2.0 + PI * (k as f64 + 0.5) / 512.0;
            let t = alpha.tan();
            let class = classify_lsystem_alpha(AlphaParam::new(alpha).unwrap(), m, &tol);
            let near = |b: f64| (t - b).abs() <= 1e-7 * (1.0 + b.abs());
            if near(-m0) || near(0.0) || near(1.0 / m0) {
                continue;
            }
            let expect = if t > 1.0 / m0 {
                LSystemClass::Accretive
            } else if -m0 < t && t < 0.0 {
                LSystemClass::AccumulativeSectorial
            } else {
                LSystemClass::Neither
            };
            prop_assert_eq!(class, expect);
            // along increasing α: neither, accumulative, neither, accretive
            let rank = match (class, t < 0.0) {
                (LSystemClass::Neither, true) => 0,
                (LSystemClass::AccumulativeSectorial, _) => 1,
                (LSystemClass::Neither, false) => 2,
                _ => 3,
            };
            prop_assert!(rank >= last_rank);
            last_rank = rank;
        }
        let at = |t: f64| classify_lsystem_alpha(AlphaParam::from_tan(ExtendedReal::Finite(t)).unwrap(), m, &tol);
        prop_assert_eq!(at(1.0 / m0), LSystemClass::Accretive);
        prop_assert_eq!(at(-m0), LSystemClass::AccumulativeSectorial);
        prop_assert_eq!(at(0.0), LSystemClass::AccumulativeExtremal);
    }

    #[test]
    fn lower_endpoint_angles_collapse(m0 in 0.01f64..50.0) {
        let tol = ToleranceConfig::default();
        let a = AlphaParam::from_tan(ExtendedReal::Finite(-m0)).unwrap();
        let s = class_angles(a, m0, &tol).unwrap();
        prop_assert_eq!(s.tan_beta1, 0.0);
        prop_assert_eq!(s.beta_class, Some(s.beta2));
        let th = classify_th(Complex64::i(), ExtendedReal::Finite(m0), &tol);
        let exact = th.exact_angle.unwrap();
        prop_assert!((s.main_operator_angle - exact).abs() <= 1e-12);
    }

    #[test]
    fn upper_endpoint_angle_is_right_angle(m0 in 0.01f64..50.0) {
        let tol = ToleranceConfig::default();
        let s = class_angles(AlphaParam::new(0.0).unwrap(), m0, &tol).unwrap();
        prop_assert_eq!(s.beta2, PI / 2.0);
        prop_assert!(s.beta_class.is_none() && s.beta_universal.is_none());
        let near = class_angles(AlphaParam::new(-1e-9).unwrap(), m0, &tol).unwrap();
        prop_assert!(PI / 2.0 - near.beta2 < 1e-8);
    }
}
