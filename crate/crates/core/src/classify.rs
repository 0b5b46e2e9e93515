//! Accretivity, accumulativity and sectoriality of `T_h` and of the L-systems
//! `Θ_{μ,h}`, in terms of `m0 = m_∞(-0)`.
//!
//! All criteria are comparisons of tangents. Boundary cases are decided with
//! the relative slack `ToleranceConfig::boundary_tol`, so that for example
//! `tan(π/4) = 0.9999999999999999` lands on the boundary `tan α = 1`.
//!
//! `m0 = ∞` is the divergent boundary value. Then the Friedrichs and
//! Kreĭn-von Neumann extensions coincide and no `T_h` with finite `h` is
//! accretive, so every criterion below reports "not accretive" / `Neither`.

use std::f64::consts::FRAC_PI_2;

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malpha::AlphaParam;
use crate::numerics::{ExtendedReal, ToleranceConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum StarExtClass {
    Accretive,
    Accumulative,
    ExtremalAccretiveBoundary,
    Neither,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum LSystemClass {
    Accretive,
    AccumulativeSectorial,
    AccumulativeExtremal,
    Neither,
}

impl LSystemClass {
    pub fn is_accumulative(self) -> bool {
        matches!(self, LSystemClass::AccumulativeSectorial | LSystemClass::AccumulativeExtremal)
    }

    pub fn as_str(self) -> &'static str {
        match self {
            LSystemClass::Accretive => "accretive",
            LSystemClass::AccumulativeSectorial => "accumulative_sectorial",
            LSystemClass::AccumulativeExtremal => "accumulative_extremal",
            LSystemClass::Neither => "neither",
        }
    }
}

/// Properties of the main operator `T_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThVerdict {
    pub accretive: bool,
    pub sectorial: bool,
    /// Accretive but not sectorial for any angle below `π/2`.
    pub extremal: bool,
    pub tan_exact_angle: Option<f64>,
    pub exact_angle: Option<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClassVerdict {
    pub operator_accretive: bool,
    pub operator_sectorial: bool,
    pub operator_extremal: bool,
    pub operator_tan_exact_angle: Option<f64>,
    pub operator_exact_angle: Option<f64>,
    /// Absent when `T_h` is not accretive.
    pub star_ext_class: Option<StarExtClass>,
    pub lsystem_class: LSystemClass,
}

/// Angles attached to an accumulative L-system `Θ_{tan α, i}`; tangents are
/// primary, radians are derived.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AngleSet {
    pub tan_beta1: f64,
    pub beta1: f64,
    pub tan_beta2: ExtendedReal,
    pub beta2: f64,
    /// `tan β = tan β2 + 2√(tan β1 (tan β2 − tan β1))`; absent when `β2 = π/2`.
    pub tan_beta_class: Option<f64>,
    pub beta_class: Option<f64>,
    /// `tan β = tan β1 + 2√(tan β1 tan β2)`; absent when `β2 = π/2`.
    pub tan_beta_universal: Option<f64>,
    pub beta_universal: Option<f64>,
    /// `β2 − β1`, the sectoriality angle of `T_i`.
    pub main_operator_angle: f64,
}

fn slack(tol: &ToleranceConfig, scale: f64) -> f64 {
    tol.boundary_tol * scale.abs().max(1.0)
}

/// `T_h` is accretive iff `Re h ≥ −m0`, sectorial iff `Re h > −m0`, with
/// exact angle `tan β = Im h/(Re h + m0)`.
pub fn classify_th(h: Complex64, m0: ExtendedReal, tol: &ToleranceConfig) -> ThVerdict {
    let m0 = match m0 {
        ExtendedReal::Finite(v) => v,
        ExtendedReal::Infinity => {
            return ThVerdict {
                accretive: false,
                sectorial: false,
                extremal: false,
                tan_exact_angle: None,
                exact_angle: None,
            }
        }
    };
    let s = h.re + m0;
    let eps = slack(tol, h.re.abs().max(m0.abs()));
    let accretive = s >= -eps;
    let dissipative = h.im != 0.0;
    let extremal = dissipative && s.abs() <= eps;
    let sectorial = dissipative && accretive && !extremal;
    let tan_exact_angle = sectorial.then(|| h.im.abs() / s);
    ThVerdict {
        accretive,
        sectorial,
        extremal,
        tan_exact_angle,
        exact_angle: tan_exact_angle.map(f64::atan),
    }
}

/// Class of the (*)-extension `A_{μ,h}`: accretive iff
/// `μ ≥ (Im h)²/(m0 + Re h) + Re h` (equality is the extremal boundary),
/// accumulative iff `−m0 ≤ μ ≤ Re h`.
pub fn classify_star_extension(
    mu: ExtendedReal,
    h: Complex64,
    m0: ExtendedReal,
    tol: &ToleranceConfig,
) -> Result<StarExtClass> {
    let th = classify_th(h, m0, tol);
    if !th.accretive {
        return Err(Error::InvalidBase);
    }
    // accretive T_h implies a finite m0
    let m0 = m0.to_f64();
    let s = h.re + m0;
    let threshold = if th.extremal {
        f64::INFINITY
    } else {
        h.im * h.im / s + h.re
    };
    let mu = match mu {
        ExtendedReal::Infinity => return Ok(StarExtClass::Accretive),
        ExtendedReal::Finite(v) => v,
    };
    if threshold.is_finite() && (mu - threshold).abs() <= slack(tol, threshold) {
        return Ok(StarExtClass::ExtremalAccretiveBoundary);
    }
    if mu > threshold {
        return Ok(StarExtClass::Accretive);
    }
    if mu >= -m0 - slack(tol, m0) && mu <= h.re + slack(tol, h.re) {
        return Ok(StarExtClass::Accumulative);
    }
    Ok(StarExtClass::Neither)
}

/// Class of the L-system `Θ_{μ,h}`. Accumulative systems are sectorial for
/// `−m0 ≤ μ < Re h` and extremal at `μ = Re h`.
pub fn classify_system(mu: ExtendedReal, h: Complex64, m0: ExtendedReal, tol: &ToleranceConfig) -> ClassVerdict {
    let th = classify_th(h, m0, tol);
    let star = classify_star_extension(mu, h, m0, tol).ok();
    let lsystem_class = match star {
        Some(StarExtClass::Accretive | StarExtClass::ExtremalAccretiveBoundary) => LSystemClass::Accretive,
        Some(StarExtClass::Accumulative) => {
            let mu = mu.to_f64();
            if (mu - h.re).abs() <= slack(tol, h.re) {
                LSystemClass::AccumulativeExtremal
            } else {
                LSystemClass::AccumulativeSectorial
            }
        }
        Some(StarExtClass::Neither) | None => LSystemClass::Neither,
    };
    ClassVerdict {
        operator_accretive: th.accretive,
        operator_sectorial: th.sectorial,
        operator_extremal: th.extremal,
        operator_tan_exact_angle: th.tan_exact_angle,
        operator_exact_angle: th.exact_angle,
        star_ext_class: star,
        lsystem_class,
    }
}

/// Class of `Θ_{tan α, i}`, the realization of `−m_α`: accretive iff
/// `tan α ≥ 1/m0`, accumulative sectorial iff `−m0 ≤ tan α < 0`,
/// accumulative extremal iff `tan α = 0`.
///
/// Requires `m0 ≥ 0`; for `m0 < 0` or `m0 = ∞` the main operator `T_i` is not
/// accretive and the result is `Neither`.
pub fn classify_lsystem_alpha(a: AlphaParam, m0: ExtendedReal, tol: &ToleranceConfig) -> LSystemClass {
    let m0 = match m0 {
        ExtendedReal::Finite(v) if v >= 0.0 => v,
        _ => return LSystemClass::Neither,
    };
    let t = match a.tan_alpha {
        ExtendedReal::Infinity => return LSystemClass::Accretive,
        ExtendedReal::Finite(t) => t,
    };
    if m0 > 0.0 {
        let bound = 1.0 / m0;
        if t >= bound - slack(tol, bound) {
            return LSystemClass::Accretive;
        }
    }
    if t.abs() <= tol.boundary_tol {
        return LSystemClass::AccumulativeExtremal;
    }
    if t < 0.0 && t >= -m0 - slack(tol, m0) {
        return LSystemClass::AccumulativeSectorial;
    }
    LSystemClass::Neither
}

/// Full verdict for `Θ_{tan α, i}`.
pub fn classify_alpha_system(a: AlphaParam, m0: ExtendedReal, tol: &ToleranceConfig) -> ClassVerdict {
    let mut v = classify_system(a.tan_alpha, Complex64::i(), m0, tol);
    v.lsystem_class = classify_lsystem_alpha(a, m0, tol);
    v
}

/// Angles of `Θ_{tan α, i}` for `−m0 ≤ tan α ≤ 0`:
/// `tan β1 = (tan α + m0)/(1 − tan α · m0)` and `tan β2 = −cot α`.
///
/// At `tan α = 0` the angle `β2` is `π/2` and the two combined angles are
/// absent.
pub fn class_angles(a: AlphaParam, m0: f64, tol: &ToleranceConfig) -> Result<AngleSet> {
    if !(m0.is_finite() && m0 >= 0.0) {
        return Err(Error::invalid(format!("m0 must be finite and >= 0, got {m0}")));
    }
    let out_of_range = |t: f64| Error::OutOfRange {
        tan_alpha: t,
        lower: -m0,
    };
    let t = match a.tan_alpha {
        ExtendedReal::Infinity => return Err(out_of_range(f64::INFINITY)),
        ExtendedReal::Finite(t) => t,
    };
    if t > tol.boundary_tol || t < -m0 - slack(tol, m0) {
        return Err(out_of_range(t));
    }
    let at_zero = t.abs() <= tol.boundary_tol;
    let tan_beta1 = ((t + m0) / (1.0 - t * m0)).max(0.0);
    let beta1 = tan_beta1.atan();
    let (tan_beta2, beta2) = if at_zero {
        (ExtendedReal::Infinity, FRAC_PI_2)
    } else {
        let v = -1.0 / t;
        (ExtendedReal::Finite(v), v.atan())
    };
    let (tan_beta_class, tan_beta_universal) = match tan_beta2 {
        ExtendedReal::Finite(t2) => (
            Some(t2 + 2.0 * (tan_beta1 * (t2 - tan_beta1)).max(0.0).sqrt()),
            Some(tan_beta1 + 2.0 * (tan_beta1 * t2).sqrt()),
        ),
        ExtendedReal::Infinity => (None, None),
    };
    Ok(AngleSet {
        tan_beta1,
        beta1,
        tan_beta2,
        beta2,
        tan_beta_class,
        beta_class: tan_beta_class.map(f64::atan),
        tan_beta_universal,
        beta_universal: tan_beta_universal.map(f64::atan),
        main_operator_angle: beta2 - beta1,
    })
}

/// The real `h` for which `T_h` is the Kreĭn-von Neumann extension.
pub fn krein_vonneumann_h(m0: f64) -> f64 {
    -m0
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_4, FRAC_PI_8};

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    const ONE: ExtendedReal = ExtendedReal::Finite(1.0);

    #[test]
    fn th_examples() {
        let v = classify_th(Complex64::i(), ONE, &tol());
        assert!(v.accretive && v.sectorial && !v.extremal);
        assert_eq!(v.tan_exact_angle, Some(1.0));
        assert!((v.exact_angle.unwrap() - FRAC_PI_4).abs() < 1e-15);

        let v = classify_th(c(-1.0, 1.0), ONE, &tol());
        assert!(v.accretive && v.extremal && !v.sectorial);
        assert_eq!(v.exact_angle, None);

        let v = classify_th(c(-2.0, 1.0), ONE, &tol());
        assert!(!v.accretive && !v.sectorial);

        let v = classify_th(Complex64::i(), ExtendedReal::Infinity, &tol());
        assert!(!v.accretive);
    }

    #[test]
    fn star_examples() {
        let i = Complex64::i();
        let f = ExtendedReal::Finite;
        assert_eq!(classify_star_extension(f(2.0), i, ONE, &tol()).unwrap(), StarExtClass::Accretive);
        assert_eq!(
            classify_star_extension(f(1.0), i, ONE, &tol()).unwrap(),
            StarExtClass::ExtremalAccretiveBoundary
        );
        assert_eq!(classify_star_extension(f(-0.5), i, ONE, &tol()).unwrap(), StarExtClass::Accumulative);
        assert_eq!(classify_star_extension(f(0.5), i, ONE, &tol()).unwrap(), StarExtClass::Neither);
        assert_eq!(classify_star_extension(f(-1.5), i, ONE, &tol()).unwrap(), StarExtClass::Neither);
        assert_eq!(
            classify_star_extension(ExtendedReal::Infinity, i, ONE, &tol()).unwrap(),
            StarExtClass::Accretive
        );
        assert_eq!(
            classify_star_extension(f(2.0), c(-2.0, 1.0), ONE, &tol()),
            Err(Error::InvalidBase)
        );
    }

    #[test]
    fn alpha_grid() {
        let grid = [-3.0 * FRAC_PI_8, -FRAC_PI_4, 0.0, FRAC_PI_8, FRAC_PI_4, FRAC_PI_2];
        let expect = [
            LSystemClass::Neither,
            LSystemClass::AccumulativeSectorial,
            LSystemClass::AccumulativeExtremal,
            LSystemClass::Neither,
            LSystemClass::Accretive,
            LSystemClass::Accretive,
        ];
        for (alpha, e) in grid.iter().zip(expect) {
            let a = AlphaParam::new(*alpha).unwrap();
            assert_eq!(classify_lsystem_alpha(a, ONE, &tol()), e, "alpha = {alpha}");
            assert_eq!(classify_alpha_system(a, ONE, &tol()).lsystem_class, e);
        }
    }

    #[test]
    fn alpha_zero_m0() {
        let zero = ExtendedReal::Finite(0.0);
        let a = AlphaParam::new(0.0).unwrap();
        assert_eq!(classify_lsystem_alpha(a, zero, &tol()), LSystemClass::AccumulativeExtremal);
        assert_eq!(
            classify_lsystem_alpha(AlphaParam::right_angle(), zero, &tol()),
            LSystemClass::Accretive
        );
        let a = AlphaParam::new(-0.1).unwrap();
        assert_eq!(classify_lsystem_alpha(a, zero, &tol()), LSystemClass::Neither);
        let a = AlphaParam::new(1.0).unwrap();
        assert_eq!(classify_lsystem_alpha(a, zero, &tol()), LSystemClass::Neither);
    }

    #[test]
    fn general_system_agrees_with_alpha_form() {
        for k in 0..200 {
            let alpha = -1.55 + 3.1 * k as f64 / 199.0;
            let a = AlphaParam::new(alpha).unwrap();
            for m0 in [0.25, 1.0, 3.0] {
                let m0 = ExtendedReal::Finite(m0);
                let g = classify_system(a.tan_alpha, Complex64::i(), m0, &tol()).lsystem_class;
                assert_eq!(g, classify_lsystem_alpha(a, m0, &tol()), "alpha = {alpha}");
            }
        }
    }

    #[test]
    fn angles_at_lower_endpoint() {
        let a = AlphaParam::from_tan(ExtendedReal::Finite(-1.0)).unwrap();
        let s = class_angles(a, 1.0, &tol()).unwrap();
        assert_eq!(s.tan_beta1, 0.0);
        assert_eq!(s.beta1, 0.0);
        assert_eq!(s.tan_beta2, ExtendedReal::Finite(1.0));
        assert!((s.beta2 - FRAC_PI_4).abs() < 1e-15);
        assert_eq!(s.tan_beta_class, Some(1.0));
        assert!((s.main_operator_angle - FRAC_PI_4).abs() < 1e-15);
        let th = classify_th(Complex64::i(), ONE, &tol());
        assert!((s.main_operator_angle - th.exact_angle.unwrap()).abs() < 1e-15);
    }

    #[test]
    fn angles_interior() {
        let a = AlphaParam::from_tan(ExtendedReal::Finite(-0.5)).unwrap();
        let s = class_angles(a, 1.0, &tol()).unwrap();
        assert!((s.tan_beta1 - 1.0 / 3.0).abs() < 1e-15);
        assert_eq!(s.tan_beta2, ExtendedReal::Finite(2.0));
        assert!((s.tan_beta_class.unwrap() - 3.4907119849998596).abs() < 1e-12);
        assert!((s.tan_beta_universal.unwrap() - 1.9663264951887).abs() < 1e-12);
    }

    #[test]
    fn angles_at_zero_and_out_of_range() {
        let s = class_angles(AlphaParam::new(0.0).unwrap(), 1.0, &tol()).unwrap();
        assert_eq!(s.tan_beta2, ExtendedReal::Infinity);
        assert_eq!(s.beta2, FRAC_PI_2);
        assert_eq!(s.tan_beta_class, None);
        assert_eq!(s.beta_universal, None);
        let bad = AlphaParam::from_tan(ExtendedReal::Finite(-1.5)).unwrap();
        assert!(matches!(class_angles(bad, 1.0, &tol()), Err(Error::OutOfRange { .. })));
        let bad = AlphaParam::from_tan(ExtendedReal::Finite(0.5)).unwrap();
        assert!(matches!(class_angles(bad, 1.0, &tol()), Err(Error::OutOfRange { .. })));
        assert!(class_angles(AlphaParam::right_angle(), 1.0, &tol()).is_err());
    }

    #[test]
    fn angles_near_zero_approach_right_angle() {
        let mut prev = 0.0;
        for t in [-0.1, -0.01, -0.001, -1e-6] {
            let s = class_angles(AlphaParam::from_tan(ExtendedReal::Finite(t)).unwrap(), 1.0, &tol()).unwrap();
            assert!(s.beta2 > prev);
            prev = s.beta2;
        }
        assert!(FRAC_PI_2 - prev < 1e-5);
    }

    #[test]
    fn krein() {
        assert_eq!(krein_vonneumann_h(1.0), -1.0);
        assert_eq!(krein_vonneumann_h(0.0), -0.0);
        assert_eq!(krein_vonneumann_h(2.5), -2.5);
    }
}
