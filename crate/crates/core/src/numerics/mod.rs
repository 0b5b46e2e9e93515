//! Numerical building blocks shared by every other module.

mod extrapolate;
mod ode;

pub use extrapolate::{extrapolate_limit, Extrapolated};
pub use ode::{integrate_complex_ode, OdeStats};

use std::fmt;

use num_complex::Complex64;
use serde::{Serialize, Serializer};

use crate::error::{Error, Result};

/// A real number or the (unsigned) point at infinity.
///
/// Used for `μ ∈ ℝ ∪ {∞}`, `tan α`, the quasi-kernel parameter `ξ` and the
/// boundary value `m_∞(-0)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtendedReal {
    Finite(f64),
    Infinity,
}

impl ExtendedReal {
    pub fn is_infinite(self) -> bool {
        matches!(self, ExtendedReal::Infinity)
    }

    pub fn finite(self) -> Option<f64> {
        match self {
            ExtendedReal::Finite(v) => Some(v),
            ExtendedReal::Infinity => None,
        }
    }

    /// Lossy conversion; the infinity sentinel maps to `f64::INFINITY`.
    pub fn to_f64(self) -> f64 {
        self.finite().unwrap_or(f64::INFINITY)
    }

    /// Parses a decimal number or one of `inf`, `+inf`, `infinity`, `∞`.
    pub fn parse(s: &str) -> Result<Self> {
        let t = s.trim().to_ascii_lowercase();
        match t.as_str() {
            "inf" | "+inf" | "infinity" | "+infinity" | "∞" => Ok(ExtendedReal::Infinity),
            _ => t
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .map(ExtendedReal::Finite)
                .ok_or_else(|| Error::invalid(format!("not an extended real: '{s}'"))),
        }
    }
}

impl From<f64> for ExtendedReal {
    /// Non-finite floats become the infinity sentinel.
    fn from(v: f64) -> Self {
        if v.is_finite() {
            ExtendedReal::Finite(v)
        } else {
            ExtendedReal::Infinity
        }
    }
}

impl fmt::Display for ExtendedReal {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtendedReal::Finite(v) if *v != 0.0 && !(1e-5..1e16).contains(&v.abs()) => write!(f, "{v:e}"),
            ExtendedReal::Finite(v) => write!(f, "{v}"),
            ExtendedReal::Infinity => f.write_str("inf"),
        }
    }
}

impl Serialize for ExtendedReal {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtendedReal::Finite(v) => s.serialize_f64(*v),
            ExtendedReal::Infinity => s.serialize_str("inf"),
        }
    }
}

/// Tolerances shared by the integrator, the pole tests, the PSD tests and
/// the limit extrapolation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ToleranceConfig {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub psd_slack: f64,
    /// Strictly decreasing positive offsets used for one-sided limits.
    pub limit_eps_schedule: Vec<f64>,
    /// Magnitude beyond which an extrapolated limit is reported as divergent.
    pub divergence_bound: f64,
    /// Relative slack for inclusive boundary comparisons of tangents in the
    /// classification criteria.
    pub boundary_tol: f64,
}

impl Default for ToleranceConfig {
    fn default() -> Self {
        Self {
            abs_tol: 1e-12,
            rel_tol: 1e-12,
            psd_slack: 1e-8,
            limit_eps_schedule: vec![1e-2, 1e-3, 1e-4, 1e-5],
            divergence_bound: 1e8,
            boundary_tol: 1e-9,
        }
    }
}

impl ToleranceConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v.is_finite() && v > 0.0 {
                Ok(())
            } else {
                Err(Error::invalid(format!("{name} must be finite and > 0, got {v}")))
            }
        };
        positive("abs_tol", self.abs_tol)?;
        positive("rel_tol", self.rel_tol)?;
        positive("divergence_bound", self.divergence_bound)?;
        if !(self.psd_slack.is_finite() && self.psd_slack >= 0.0) {
            return Err(Error::invalid("psd_slack must be finite and >= 0"));
        }
        if !(self.boundary_tol.is_finite() && self.boundary_tol >= 0.0) {
            return Err(Error::invalid("boundary_tol must be finite and >= 0"));
        }
        if self.limit_eps_schedule.len() < 3 {
            return Err(Error::invalid("limit_eps_schedule needs at least 3 entries"));
        }
        let mut prev = f64::INFINITY;
        for &e in &self.limit_eps_schedule {
            if !(e.is_finite() && e > 0.0 && e < prev) {
                return Err(Error::invalid(
                    "limit_eps_schedule must be positive and strictly decreasing",
                ));
            }
            prev = e;
        }
        Ok(())
    }

    /// Same configuration with the integrator tolerances scaled by `factor`.
    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            abs_tol: self.abs_tol * factor,
            rel_tol: self.rel_tol * factor,
            ..self.clone()
        }
    }
}

/// Square root with `Im w ≥ 0`.
///
/// The branch cut lies on `[0, +∞)`; on the positive axis the nonnegative real
/// root is returned, which is the limit from the upper half plane. With this
/// branch `z ↦ i√z` maps the upper half plane into itself.
pub fn principal_sqrt_upper(z: Complex64) -> Complex64 {
    let w = z.sqrt();
    if w.im < 0.0 {
        -w
    } else {
        w
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    #[test]
    fn sqrt_examples() {
        let w = principal_sqrt_upper(Complex64::new(-4.0, 0.0));
        assert_relative_eq!(w.re, 0.0);
        assert_relative_eq!(w.im, 2.0);
        let w = principal_sqrt_upper(Complex64::new(-4.0, -0.0));
        assert_relative_eq!(w.im, 2.0);
        let w = principal_sqrt_upper(Complex64::i());
        let r = std::f64::consts::FRAC_1_SQRT_2;
        assert_relative_eq!(w.re, r, epsilon = 1e-15);
        assert_relative_eq!(w.im, r, epsilon = 1e-15);
        assert_eq!(principal_sqrt_upper(Complex64::new(4.0, 0.0)), Complex64::new(2.0, 0.0));
        assert_eq!(principal_sqrt_upper(Complex64::new(0.0, 0.0)), Complex64::new(0.0, 0.0));
    }

    #[test]
    fn sqrt_cut_on_positive_axis() {
        let above = principal_sqrt_upper(Complex64::new(4.0, 1e-12));
        let below = principal_sqrt_upper(Complex64::new(4.0, -1e-12));
        assert!((above - 2.0).norm() < 1e-9);
        assert!((below + 2.0).norm() < 1e-9);
        // continuous across the negative axis
        let a = principal_sqrt_upper(Complex64::new(-4.0, 1e-12));
        let b = principal_sqrt_upper(Complex64::new(-4.0, -1e-12));
        assert!((a - b).norm() < 1e-9);
    }

    #[test]
    fn extended_real_parse() {
        assert_eq!(ExtendedReal::parse("inf").unwrap(), ExtendedReal::Infinity);
        assert_eq!(ExtendedReal::parse(" -2.5").unwrap(), ExtendedReal::Finite(-2.5));
        assert!(ExtendedReal::parse("nan").is_err());
        assert!(ExtendedReal::parse("x").is_err());
    }

    #[test]
    fn tolerance_validation() {
        assert!(ToleranceConfig::default().validate().is_ok());
        let t = ToleranceConfig {
            limit_eps_schedule: vec![1e-2, 1e-2, 1e-3],
            ..Default::default()
        };
        assert!(t.validate().is_err());
        let t = ToleranceConfig {
            abs_tol: 0.0,
            ..Default::default()
        };
        assert!(t.validate().is_err());
        let t = ToleranceConfig {
            psd_slack: 0.0,
            ..Default::default()
        };
        assert!(t.validate().is_ok());
    }

    proptest! {
        #[test]
        fn sqrt_squares_back(logr in -8.0f64..8.0, theta in -std::f64::consts::PI..std::f64::consts::PI) {
            let z = Complex64::from_polar(10f64.powf(logr), theta);
            let w = principal_sqrt_upper(z);
            prop_assert!(w.im >= 0.0);
            prop_assert!((w * w - z).norm() <= 4.0 * f64::EPSILON * z.norm());
        }
    }
}
