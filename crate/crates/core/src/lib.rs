//! Weyl-Titchmarsh m-functions of half-line Schrödinger operators and the
//! L-systems that realize them.
//!
//! The crate is organised bottom-up:
//!
//! - [`numerics`]: branch-consistent complex square root, an adaptive
//!   Dormand-Prince integrator for complex ODEs and Neville limit extrapolation.
//! - [`potentials`]: the potentials `q(x)` on `[ℓ, ∞)` (Bessel, free, tabulated).
//! - [`weyl`]: evaluation of `m_∞(z)` either from a closed form or by backward
//!   Riccati integration, plus the boundary value `m_∞(-0)`.
//! - [`malpha`]: the linear-fractional family `m_α(z)` and `-m_α(z)`.
//! - [`lsystem`]: Schrödinger L-systems `Θ_{μ,h}` at parameter level, with their
//!   impedance and transfer functions.
//! - [`classify`]: accretive / accumulative / sectorial criteria and angle formulas.
//! - [`funclass`]: sampling tests for Herglotz, Stieltjes, inverse Stieltjes and
//!   sectorial classes, and extraction of the representing measure.
//! - [`verify`]: the end-to-end verification report used by the CLI.
//!
//! ```
//! use weylsys::{potentials, weyl::MFunction, Complex64};
//!
//! let mf = MFunction::engine(potentials::bessel_potential(1.5).unwrap(), Default::default());
//! let m = mf.eval(Complex64::new(0.0, 1.0)).unwrap();
//! assert!((m.value - Complex64::new(1.207106781186548, -0.5)).norm() < 1e-6);
//! ```

// `!(x > 0.0)` style tests are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]
#![allow(clippy::needless_range_loop)] // index loops read closer to the matrix formulas

pub mod classify;
pub mod error;
pub mod funclass;
pub mod lsystem;
pub mod malpha;
pub mod numerics;
pub mod potentials;
pub mod verify;
pub mod weyl;

pub use error::{Error, Result};
pub use num_complex::Complex64;
pub use numerics::{ExtendedReal, ToleranceConfig};
