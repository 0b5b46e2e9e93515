//! Schrödinger L-systems `Θ_{μ,h}` represented by their parameters.
//!
//! An L-system is determined by `μ ∈ ℝ ∪ {∞}`, a boundary value `h` with
//! `Im h > 0` and the m-function of the underlying symmetric operator. Its
//! impedance and transfer functions are explicit linear-fractional functions
//! of `m_∞(z)`:
//!
//! ```text
//! V(z) = ((m + μ) Im h) / ((μ − Re h) m + μ Re h − |h|²)
//! W(z) = (μ − h)/(μ − h̄) · (m + h̄)/(m + h)
//! ```

use num_complex::Complex64;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::malpha::AlphaParam;
use crate::numerics::{ExtendedReal, ToleranceConfig};
use crate::weyl::MFunction;

#[derive(Debug, Clone)]
pub struct LSystemParams {
    pub mu: ExtendedReal,
    pub h: Complex64,
    pub mf: MFunction,
}

/// Boundary condition `y'(ℓ) = ξ y(ℓ)` of the quasi-kernel of `Re A_{μ,h}`;
/// `ξ = ∞` encodes `y(ℓ) = 0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasiKernelBC {
    pub xi: ExtendedReal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RealizationTarget {
    /// `−m_∞(z)`
    NegMInfinity,
    /// `1/m_∞(z)`
    RecipMInfinity,
    /// `−m_α(z)`
    NegMAlpha(AlphaParam),
}

fn pole_check(d: Complex64, tol: &ToleranceConfig) -> Result<()> {
    let n = d.norm();
    if n < tol.abs_tol {
        Err(Error::PoleHit { denominator: n })
    } else {
        Ok(())
    }
}

/// Impedance `V` as a function of a value `m` of `m_∞`.
pub fn impedance_from_m(mu: ExtendedReal, h: Complex64, m: Complex64, tol: &ToleranceConfig) -> Result<Complex64> {
    match mu {
        ExtendedReal::Infinity => {
            let d = m + h.re;
            pole_check(d, tol)?;
            Ok(h.im / d)
        }
        ExtendedReal::Finite(mu) => {
            let d = (mu - h.re) * m + mu * h.re - h.norm_sqr();
            pole_check(d, tol)?;
            Ok((m + mu) * h.im / d)
        }
    }
}

/// Transfer function `W` as a function of a value `m` of `m_∞`.
pub fn transfer_from_m(mu: ExtendedReal, h: Complex64, m: Complex64, tol: &ToleranceConfig) -> Result<Complex64> {
    let d = m + h;
    pole_check(d, tol)?;
    let prefactor = match mu {
        ExtendedReal::Infinity => Complex64::new(1.0, 0.0),
        ExtendedReal::Finite(mu) => (mu - h) / (mu - h.conj()),
    };
    Ok(prefactor * (m + h.conj()) / d)
}

/// `|V − i(W+1)⁻¹(W−1)| + |W − (1+iV)⁻¹(1−iV)|`.
pub fn vw_residual(v: Complex64, w: Complex64) -> f64 {
    let i = Complex64::i();
    (v - i * (w - 1.0) / (w + 1.0)).norm() + (w - (1.0 - i * v) / (1.0 + i * v)).norm()
}

impl LSystemParams {
    pub fn new(mu: ExtendedReal, h: Complex64, mf: MFunction) -> Result<Self> {
        if !(h.im > 0.0 && h.re.is_finite() && h.im.is_finite()) {
            return Err(Error::invalid(format!("h must satisfy Im h > 0, got {h}")));
        }
        if let ExtendedReal::Finite(m) = mu {
            if !m.is_finite() {
                return Err(Error::invalid("mu must be finite or inf"));
            }
        }
        Ok(LSystemParams { mu, h, mf })
    }

    pub fn impedance(&self, z: Complex64) -> Result<Complex64> {
        let m = self.mf.value(z)?;
        impedance_from_m(self.mu, self.h, m, &self.mf.tol)
    }

    pub fn transfer(&self, z: Complex64) -> Result<Complex64> {
        let m = self.mf.value(z)?;
        transfer_from_m(self.mu, self.h, m, &self.mf.tol)
    }

    pub fn vw_consistency(&self, z: Complex64) -> Result<f64> {
        let m = self.mf.value(z)?;
        let v = impedance_from_m(self.mu, self.h, m, &self.mf.tol)?;
        let w = transfer_from_m(self.mu, self.h, m, &self.mf.tol)?;
        Ok(vw_residual(v, w))
    }

    pub fn quasi_kernel_xi(&self) -> QuasiKernelBC {
        quasi_kernel_xi(self.mu, self.h)
    }
}

/// `ξ = (μ Re h − |h|²)/(μ − Re h)`, with `ξ = ∞` at `μ = Re h` and
/// `ξ = Re h` at `μ = ∞`.
pub fn quasi_kernel_xi(mu: ExtendedReal, h: Complex64) -> QuasiKernelBC {
    let xi = match mu {
        ExtendedReal::Infinity => ExtendedReal::Finite(h.re),
        ExtendedReal::Finite(mu) if mu == h.re => ExtendedReal::Infinity,
        ExtendedReal::Finite(mu) => ExtendedReal::Finite((mu * h.re - h.norm_sqr()) / (mu - h.re)),
    };
    QuasiKernelBC { xi }
}

/// The unique L-system with `h = i` whose impedance is the target function.
pub fn realize(target: RealizationTarget, mf: MFunction) -> LSystemParams {
    let mu = match target {
        RealizationTarget::NegMInfinity => ExtendedReal::Finite(0.0),
        RealizationTarget::RecipMInfinity => ExtendedReal::Infinity,
        RealizationTarget::NegMAlpha(a) => a.tan_alpha,
    };
    LSystemParams {
        mu,
        h: Complex64::i(),
        mf,
    }
}
