//! Evaluation of the Weyl-Titchmarsh function `m_∞(z)`.
//!
//! Normalization: with `φ(ℓ) = 0, φ'(ℓ) = 1` and `θ(ℓ) = -1, θ'(ℓ) = 0`, the
//! combination `ψ = θ + m φ` is square integrable at infinity. Hence
//! `ψ(ℓ) = -1`, `ψ'(ℓ) = m`, so `m = -w(ℓ)` where `w = ψ'/ψ` solves the
//! Riccati equation `w' = q - z - w²`.
//!
//! The engine integrates that equation backward from a truncation radius
//! `x_max` seeded with the frozen-coefficient decaying branch
//! `w(x_max) = i√(z - q(x_max))`.

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::numerics::{extrapolate_limit, integrate_complex_ode, principal_sqrt_upper, ExtendedReal, ToleranceConfig};
use crate::potentials::Potential;

/// Decay lengths `1/√eps` covered by the truncation radius when sampling
/// `m(-eps)` for the boundary value at zero.
const DECAY_LENGTHS: f64 = 20.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum EvalMode {
    ClosedForm,
    RiccatiEngine,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MValue {
    pub value: Complex64,
    pub err_estimate: f64,
}

#[derive(Debug, Clone)]
pub struct MFunction {
    pub potential: Potential,
    pub mode: EvalMode,
    pub x_max: f64,
    pub tol: ToleranceConfig,
}

pub fn default_x_max(ell: f64) -> f64 {
    60.0 * ell.max(1.0)
}

fn on_spectrum(z: Complex64) -> bool {
    z.im == 0.0 && z.re >= 0.0
}

impl MFunction {
    pub fn new(potential: Potential, mode: EvalMode, x_max: Option<f64>, tol: ToleranceConfig) -> Result<Self> {
        tol.validate()?;
        if mode == EvalMode::ClosedForm && potential.closed_form_m.is_none() {
            return Err(Error::NoClosedForm {
                label: potential.label.clone(),
            });
        }
        let x_max = x_max.unwrap_or_else(|| default_x_max(potential.ell));
        if !(x_max.is_finite() && x_max > potential.ell) {
            return Err(Error::invalid(format!(
                "x_max = {x_max} must exceed the left endpoint {}",
                potential.ell
            )));
        }
        Ok(MFunction {
            potential,
            mode,
            x_max,
            tol,
        })
    }

    /// Riccati engine with the default truncation radius.
    ///
    /// # Panics
    /// If `tol` is invalid.
    pub fn engine(potential: Potential, tol: ToleranceConfig) -> Self {
        Self::new(potential, EvalMode::RiccatiEngine, None, tol).expect("invalid tolerance configuration")
    }

    pub fn closed_form(potential: Potential, tol: ToleranceConfig) -> Result<Self> {
        Self::new(potential, EvalMode::ClosedForm, None, tol)
    }

    /// Closed form when one is attached, otherwise the engine.
    pub fn auto(potential: Potential, tol: ToleranceConfig) -> Result<Self> {
        let mode = if potential.closed_form_m.is_some() {
            EvalMode::ClosedForm
        } else {
            EvalMode::RiccatiEngine
        };
        Self::new(potential, mode, None, tol)
    }

    pub fn with_x_max(self, x_max: f64) -> Result<Self> {
        Self::new(self.potential, self.mode, Some(x_max), self.tol)
    }

    /// `m_∞(z)` with an error estimate.
    ///
    /// In engine mode the estimate is the change of the result when the
    /// truncation radius is halved, plus a floor proportional to the
    /// integrator tolerance.
    pub fn eval(&self, z: Complex64) -> Result<MValue> {
        if !(z.re.is_finite() && z.im.is_finite()) {
            return Err(Error::invalid(format!("non-finite z = {z}")));
        }
        if on_spectrum(z) {
            return Err(Error::OnSpectrum { z });
        }
        match self.mode {
            EvalMode::ClosedForm => {
                let f = self.potential.closed_form_m.as_ref().ok_or_else(|| Error::NoClosedForm {
                    label: self.potential.label.clone(),
                })?;
                Ok(MValue {
                    value: f(z),
                    err_estimate: 0.0,
                })
            }
            EvalMode::RiccatiEngine => {
                let m = self.riccati_m(z, self.x_max)?;
                let m_half = self.riccati_m(z, self.half_radius())?;
                let floor = 100.0 * (self.tol.abs_tol + self.tol.rel_tol * m.norm());
                Ok(MValue {
                    value: m,
                    err_estimate: (m - m_half).norm() + floor,
                })
            }
        }
    }

    /// `m_∞(z)` without the error estimate (one integration instead of two).
    pub fn value(&self, z: Complex64) -> Result<Complex64> {
        match self.mode {
            EvalMode::ClosedForm => self.eval(z).map(|v| v.value),
            EvalMode::RiccatiEngine => {
                if !(z.re.is_finite() && z.im.is_finite()) {
                    return Err(Error::invalid(format!("non-finite z = {z}")));
                }
                if on_spectrum(z) {
                    return Err(Error::OnSpectrum { z });
                }
                self.riccati_m(z, self.x_max)
            }
        }
    }

    fn half_radius(&self) -> f64 {
        let ell = self.potential.ell;
        if self.x_max / 2.0 > ell {
            self.x_max / 2.0
        } else {
            ell + (self.x_max - ell) / 2.0
        }
    }

    fn riccati_m(&self, z: Complex64, x_max: f64) -> Result<Complex64> {
        let p = &self.potential;
        let w0 = Complex64::i() * principal_sqrt_upper(z - p.q(x_max));
        let rhs = |x: f64, w: &[Complex64], dw: &mut [Complex64]| {
            dw[0] = p.q(x) - z - w[0] * w[0];
        };
        let w = integrate_complex_ode(rhs, x_max, p.ell, &[w0], &self.tol).map_err(|e| match e {
            Error::StepUnderflow { .. } | Error::NonFinite { .. } | Error::MaxStepsExceeded { .. } => {
                Error::RiccatiBlowup { z, reason: e.to_string() }
            }
            other => other,
        })?;
        Ok(-w[0])
    }

    /// `m_∞(-0)`; the infinity sentinel when the one-sided limit diverges.
    pub fn m_minus_zero(&self) -> Result<ExtendedReal> {
        self.m_minus_zero_estimate().map(|(v, _)| v)
    }

    /// `m_∞(-0)` together with the extrapolation error estimate (zero for an
    /// attached closed form or the divergent sentinel).
    ///
    /// Samples `m(-eps)` over the eps schedule and extrapolates in `√eps`,
    /// since `m(-s²)` is analytic in `s` near zero for the catalog potentials.
    /// In engine mode each sample uses a truncation radius of at least
    /// `ℓ + 20/√eps` so the decaying solution has fully separated from the
    /// growing one.
    pub fn m_minus_zero_estimate(&self) -> Result<(ExtendedReal, f64)> {
        if self.mode == EvalMode::ClosedForm {
            if let Some(v) = self.potential.closed_form_m_minus_zero {
                return Ok((v, 0.0));
            }
        }
        let mut samples = Vec::with_capacity(self.tol.limit_eps_schedule.len());
        for &eps in &self.tol.limit_eps_schedule {
            let z = Complex64::new(-eps, 0.0);
            let s = eps.sqrt();
            let v = match self.mode {
                EvalMode::ClosedForm => self.value(z)?,
                EvalMode::RiccatiEngine => {
                    let radius = self.x_max.max(self.potential.ell + DECAY_LENGTHS / s);
                    self.riccati_m(z, radius)?
                }
            };
            samples.push((s, Complex64::new(v.re, 0.0)));
        }
        match extrapolate_limit(&samples, self.tol.divergence_bound) {
            Ok(r) => Ok((ExtendedReal::Finite(r.value.re), r.err_estimate)),
            Err(Error::Divergent) => Ok((ExtendedReal::Infinity, 0.0)),
            Err(e) => Err(e),
        }
    }
}
