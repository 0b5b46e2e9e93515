//! The family `m_α(z) = (sin α + m_∞ cos α)/(cos α − m_∞ sin α)` and its
//! negative.

use std::f64::consts::{FRAC_PI_2, PI};

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{ExtendedReal, ToleranceConfig};

/// An angle `α`, reduced modulo `π` to `(−π/2, π/2]`, together with `tan α`.
///
/// `m_α` depends on `α` only modulo `π`, so `α = π` is stored as `0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct AlphaParam {
    pub alpha: f64,
    pub tan_alpha: ExtendedReal,
}

impl AlphaParam {
    pub fn new(alpha: f64) -> Result<Self> {
        if !alpha.is_finite() {
            return Err(Error::invalid(format!("alpha must be finite, got {alpha}")));
        }
        // reduce to (−π/2, π/2]
        let mut a = alpha - PI * (alpha / PI).round();
        if a <= -FRAC_PI_2 {
            a += PI;
        }
        if (a - FRAC_PI_2).abs() <= 4.0 * f64::EPSILON {
            return Ok(Self::right_angle());
        }
        Ok(AlphaParam {
            alpha: a,
            tan_alpha: ExtendedReal::Finite(a.tan()),
        })
    }

    /// `α = π/2`, `tan α = ∞`.
    pub fn right_angle() -> Self {
        AlphaParam {
            alpha: FRAC_PI_2,
            tan_alpha: ExtendedReal::Infinity,
        }
    }

    pub fn from_tan(t: ExtendedReal) -> Result<Self> {
        match t {
            ExtendedReal::Infinity => Ok(Self::right_angle()),
            ExtendedReal::Finite(t) if t.is_finite() => Ok(AlphaParam {
                alpha: t.atan(),
                tan_alpha: ExtendedReal::Finite(t),
            }),
            ExtendedReal::Finite(t) => Err(Error::invalid(format!("tan(alpha) must be finite or inf, got {t}"))),
        }
    }

    /// `cos α − m sin α`, up to the positive factor `1/cos α` or `1/sin α`
    /// avoided by the exact sentinel cases.
    fn denominator(&self, m: Complex64) -> Complex64 {
        match self.tan_alpha {
            ExtendedReal::Infinity => -m,
            ExtendedReal::Finite(0.0) => Complex64::new(1.0, 0.0),
            ExtendedReal::Finite(_) => self.alpha.cos() - m * self.alpha.sin(),
        }
    }

    fn check_pole(&self, m: Complex64, tol: &ToleranceConfig) -> Result<()> {
        let d = self.denominator(m).norm();
        if d < tol.abs_tol {
            Err(Error::PoleHit { denominator: d })
        } else {
            Ok(())
        }
    }
}

/// `m_α` from a value of `m_∞`. Exact at `α ≡ 0` (returns `m_∞`) and at
/// `α = π/2` (returns `−1/m_∞`).
pub fn m_alpha(m: Complex64, a: AlphaParam, tol: &ToleranceConfig) -> Result<Complex64> {
    a.check_pole(m, tol)?;
    Ok(match a.tan_alpha {
        ExtendedReal::Infinity => -m.inv(),
        ExtendedReal::Finite(0.0) => m,
        ExtendedReal::Finite(_) => {
            let (s, c) = a.alpha.sin_cos();
            (s + m * c) / (c - m * s)
        }
    })
}

/// `−m_α = (tan α + m_∞)/(tan α · m_∞ − 1)`, evaluated in the cotangent form
/// `(1 + m_∞ cot α)/(m_∞ − cot α)` when `|tan α| > 1`.
pub fn neg_m_alpha(m: Complex64, a: AlphaParam, tol: &ToleranceConfig) -> Result<Complex64> {
    a.check_pole(m, tol)?;
    Ok(match a.tan_alpha {
        ExtendedReal::Infinity => m.inv(),
        ExtendedReal::Finite(t) if t.abs() <= 1.0 => (t + m) / (t * m - 1.0),
        ExtendedReal::Finite(t) => {
            let ct = 1.0 / t;
            (1.0 + m * ct) / (m - ct)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potentials::{bessel_three_halves_m, free_m};
    use proptest::prelude::*;
    use std::f64::consts::FRAC_PI_4;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn tol() -> ToleranceConfig {
        ToleranceConfig::default()
    }

    #[test]
    fn reduction() {
        let a = AlphaParam::new(PI).unwrap();
        assert_eq!(a.alpha, 0.0);
        assert_eq!(a.tan_alpha, ExtendedReal::Finite(0.0));
        assert!(AlphaParam::new(FRAC_PI_2).unwrap().tan_alpha.is_infinite());
        assert!(AlphaParam::new(-FRAC_PI_2).unwrap().tan_alpha.is_infinite());
        let a = AlphaParam::new(3.0 * FRAC_PI_4).unwrap();
        assert!((a.alpha + FRAC_PI_4).abs() < 1e-15);
        assert!(AlphaParam::new(f64::NAN).is_err());
        let a = AlphaParam::from_tan(ExtendedReal::Finite(1.0)).unwrap();
        assert!((a.alpha - FRAC_PI_4).abs() < 1e-15);
    }

    #[test]
    fn identity_and_reciprocal() {
        let m = c(1.2, -0.5);
        assert_eq!(m_alpha(m, AlphaParam::new(PI).unwrap(), &tol()).unwrap(), m);
        let v = m_alpha(Complex64::i(), AlphaParam::new(FRAC_PI_2).unwrap(), &tol()).unwrap();
        assert!((v - Complex64::i()).norm() < 1e-15);
        let v = m_alpha(c(0.0, 2.0), AlphaParam::new(FRAC_PI_4).unwrap(), &tol()).unwrap();
        assert!((v - c(-0.6, 0.8)).norm() < 1e-15);
    }

    #[test]
    fn negative_family() {
        let m = c(1.2, -0.5);
        let v = neg_m_alpha(m, AlphaParam::from_tan(ExtendedReal::Finite(0.0)).unwrap(), &tol()).unwrap();
        assert_eq!(v, -m);
        let mb = bessel_three_halves_m(Complex64::i());
        let v = neg_m_alpha(mb, AlphaParam::new(FRAC_PI_2).unwrap(), &tol()).unwrap();
        // 1/m(i) = 1/√2 + (1 − 1/√2) i
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert!((v - c(r, 1.0 - r)).norm() < 1e-12);
        let v = neg_m_alpha(c(1.0, 0.0), AlphaParam::from_tan(ExtendedReal::Finite(-1.0)).unwrap(), &tol()).unwrap();
        assert_eq!(v, c(0.0, 0.0));
    }

    #[test]
    fn pole_is_reported() {
        // cos α − m sin α = 0 at α = π/4, m = 1
        let r = m_alpha(c(1.0, 0.0), AlphaParam::new(FRAC_PI_4).unwrap(), &tol());
        assert!(matches!(r, Err(Error::PoleHit { .. })));
        let r = neg_m_alpha(c(0.0, 0.0), AlphaParam::right_angle(), &tol());
        assert!(matches!(r, Err(Error::PoleHit { .. })));
    }

    proptest! {
        #[test]
        fn negative_matches_direct(alpha in -4.0f64..4.0, re in -3.0f64..3.0, im in -3.0f64..3.0) {
            let a = AlphaParam::new(alpha).unwrap();
            let m = c(re, im);
            prop_assume!(a.denominator(m).norm() > 1e-3);
            let x = m_alpha(m, a, &tol()).unwrap();
            let y = neg_m_alpha(m, a, &tol()).unwrap();
            prop_assert!((x + y).norm() <= 1e-12 * x.norm().max(1.0));
        }

        #[test]
        fn alpha_then_minus_alpha_is_identity(alpha in -1.5f64..1.5, re in -3.0f64..3.0, im in 0.05f64..3.0) {
            // the matrices [[c, s], [-s, c]] and [[c, -s], [s, c]] are inverse
            let m = c(re, im);
            let a = AlphaParam::new(alpha).unwrap();
            let b = AlphaParam::new(-alpha).unwrap();
            let back = m_alpha(m_alpha(m, a, &tol()).unwrap(), b, &tol()).unwrap();
            prop_assert!((back - m).norm() <= 1e-12 * m.norm().max(1.0) * (1.0 + m.norm()));
        }

        #[test]
        fn herglotz_for_catalog(alpha in -4.0f64..4.0, x in -5.0f64..5.0, y in 0.01f64..10.0) {
            let a = AlphaParam::new(alpha).unwrap();
            let z = c(x, y);
            for m in [bessel_three_halves_m(z), free_m(z)] {
                let v = neg_m_alpha(m, a, &tol()).unwrap();
                prop_assert!(v.im >= -1e-10, "{v}");
            }
        }
    }
}
