//! Half-line potentials `q(x)` on `[ℓ, ∞)`.
//!
//! All potentials are assumed to be in the limit-point case at infinity, so
//! that the minimal operator has deficiency indices (1,1). This is not checked.
//! Tabulated potentials with growth or oscillation at infinity may silently
//! violate it; the engine then reports whatever the truncated problem gives.

use std::fmt;
use std::io::Read;
use std::sync::Arc;

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numerics::{principal_sqrt_upper, ExtendedReal};

pub type ClosedForm = Arc<dyn Fn(Complex64) -> Complex64 + Send + Sync>;

#[derive(Clone)]
pub enum QProfile {
    /// `c / x²`
    InverseSquare { c: f64 },
    Zero,
    /// Linear interpolation of `(x, q)` samples, constant beyond both ends.
    Table { xs: Vec<f64>, qs: Vec<f64> },
    Custom(Arc<dyn Fn(f64) -> f64 + Send + Sync>),
}

impl QProfile {
    pub fn eval(&self, x: f64) -> f64 {
        match self {
            QProfile::InverseSquare { c } => c / (x * x),
            QProfile::Zero => 0.0,
            QProfile::Table { xs, qs } => interpolate(xs, qs, x),
            QProfile::Custom(f) => f(x),
        }
    }
}

fn interpolate(xs: &[f64], qs: &[f64], x: f64) -> f64 {
    let n = xs.len();
    if x <= xs[0] {
        return qs[0];
    }
    if x >= xs[n - 1] {
        return qs[n - 1];
    }
    // first index with xs[i] > x; 1 <= i <= n-1
    let i = xs.partition_point(|&v| v <= x);
    let (x0, x1) = (xs[i - 1], xs[i]);
    let t = (x - x0) / (x1 - x0);
    qs[i - 1] + t * (qs[i] - qs[i - 1])
}

#[derive(Clone)]
pub struct Potential {
    pub ell: f64,
    pub q: QProfile,
    pub label: String,
    pub closed_form_m: Option<ClosedForm>,
    pub closed_form_m_minus_zero: Option<ExtendedReal>,
}

impl fmt::Debug for Potential {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Potential")
            .field("ell", &self.ell)
            .field("label", &self.label)
            .field("closed_form", &self.closed_form_m.is_some())
            .finish()
    }
}

impl Potential {
    pub fn q(&self, x: f64) -> f64 {
        self.q.eval(x)
    }

    /// A potential given by an arbitrary function, without closed form.
    pub fn custom(ell: f64, label: impl Into<String>, q: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Result<Self> {
        check_ell(ell)?;
        Ok(Potential {
            ell,
            q: QProfile::Custom(Arc::new(q)),
            label: label.into(),
            closed_form_m: None,
            closed_form_m_minus_zero: None,
        })
    }
}

fn check_ell(ell: f64) -> Result<()> {
    if ell.is_finite() && ell >= 0.0 {
        Ok(())
    } else {
        Err(Error::invalid(format!("left endpoint must be finite and >= 0, got {ell}")))
    }
}

/// `m(z) = 1 − iz/(√z + i)`, the m-function of the Bessel expression of
/// order 3/2 on `[1, ∞)`.
pub fn bessel_three_halves_m(z: Complex64) -> Complex64 {
    let i = Complex64::i();
    1.0 - i * z / (principal_sqrt_upper(z) + i)
}

/// `m(z) = −i√z`, the m-function of `q = 0` on `[0, ∞)`.
pub fn free_m(z: Complex64) -> Complex64 {
    -Complex64::i() * principal_sqrt_upper(z)
}

/// Bessel potential `q(x) = (ν² − 1/4)/x²` on `[1, ∞)`.
///
/// The closed form is attached only for `ν = 3/2`.
pub fn bessel_potential(nu: f64) -> Result<Potential> {
    if !(nu.is_finite() && nu > 0.0) {
        return Err(Error::invalid(format!("Bessel order must be > 0, got {nu}")));
    }
    let c = nu * nu - 0.25;
    let q = if c == 0.0 { QProfile::Zero } else { QProfile::InverseSquare { c } };
    let three_halves = nu == 1.5;
    Ok(Potential {
        ell: 1.0,
        q,
        label: format!("bessel:{nu}"),
        closed_form_m: three_halves.then(|| Arc::new(bessel_three_halves_m) as ClosedForm),
        closed_form_m_minus_zero: three_halves.then_some(ExtendedReal::Finite(1.0)),
    })
}

/// `q ≡ 0` on `[ℓ, ∞)`. The closed form is attached for `ℓ = 0`.
pub fn free_potential(ell: f64) -> Result<Potential> {
    check_ell(ell)?;
    let at_zero = ell == 0.0;
    Ok(Potential {
        ell,
        q: QProfile::Zero,
        label: format!("free:{ell}"),
        closed_form_m: at_zero.then(|| Arc::new(free_m) as ClosedForm),
        closed_form_m_minus_zero: at_zero.then_some(ExtendedReal::Finite(0.0)),
    })
}

/// Tabulated potential on `[ℓ, ∞)` from `(x, q)` samples with strictly
/// increasing `x`.
pub fn table_potential(ell: f64, samples: &[(f64, f64)]) -> Result<Potential> {
    check_ell(ell)?;
    if samples.is_empty() {
        return Err(Error::EmptyTable);
    }
    for (row, &(x, q)) in samples.iter().enumerate() {
        if !x.is_finite() || !q.is_finite() {
            return Err(Error::invalid(format!("non-finite table entry at row {row}")));
        }
        if row > 0 && x <= samples[row - 1].0 {
            return Err(Error::UnsortedTable { row });
        }
    }
    Ok(Potential {
        ell,
        q: QProfile::Table {
            xs: samples.iter().map(|s| s.0).collect(),
            qs: samples.iter().map(|s| s.1).collect(),
        },
        label: "table".to_string(),
        closed_form_m: None,
        closed_form_m_minus_zero: None,
    })
}

/// Reads `(x, q)` samples from CSV with header `x,q`.
pub fn read_table_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
    let headers = rdr
        .headers()
        .map_err(|e| Error::invalid(format!("table csv: {e}")))?
        .clone();
    if headers.len() != 2 || &headers[0] != "x" || &headers[1] != "q" {
        return Err(Error::invalid("table csv header must be 'x,q'"));
    }
    let mut out = Vec::new();
    for (row, rec) in rdr.deserialize::<(f64, f64)>().enumerate() {
        let rec = rec.map_err(|e| Error::invalid(format!("table csv row {row}: {e}")))?;
        out.push(rec);
    }
    Ok(out)
}
