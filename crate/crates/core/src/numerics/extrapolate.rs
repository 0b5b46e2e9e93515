//! Polynomial (Neville) extrapolation of sampled values to a vanishing
//! parameter.
//!
//! Callers pick the extrapolation variable: `eps` itself for quantities that
//! are analytic in `eps`, `√eps` for m-function boundary values (which carry
//! half-integer powers), `1/√R` for limits at `-∞`.

use num_complex::Complex64;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Extrapolated {
    pub value: Complex64,
    /// Difference between the two highest-order extrapolants.
    pub err_estimate: f64,
}

/// Extrapolates `(eps, value)` samples to `eps → 0`.
///
/// Samples are sorted by decreasing `eps` internally. The result is the value
/// at zero of the interpolating polynomial through all samples; the error
/// estimate compares it with the polynomial through all but the coarsest
/// sample.
///
/// Returns [`Error::Divergent`] when the sample magnitudes grow strictly as
/// `eps` shrinks and either the extrapolant exceeds `divergence_bound`, or the
/// reciprocal samples extrapolate to zero within their own error estimate and
/// fit a polynomial more consistently (smaller relative error estimate) than
/// the direct samples do.
pub fn extrapolate_limit(samples: &[(f64, Complex64)], divergence_bound: f64) -> Result<Extrapolated> {
    if samples.len() < 3 {
        return Err(Error::invalid("extrapolation needs at least 3 samples"));
    }
    let mut pts: Vec<(f64, Complex64)> = samples.to_vec();
    if pts
        .iter()
        .any(|(e, v)| !e.is_finite() || !v.re.is_finite() || !v.im.is_finite())
    {
        return Err(Error::invalid("extrapolation samples must be finite"));
    }
    pts.sort_by(|a, b| b.0.total_cmp(&a.0));
    if pts.windows(2).any(|w| w[0].0 == w[1].0) {
        return Err(Error::invalid("extrapolation nodes must be distinct"));
    }

    let direct = neville_at_zero(&pts);

    let growing = pts.windows(2).all(|w| w[1].1.norm() > w[0].1.norm());
    if growing {
        if direct.value.norm() > divergence_bound {
            return Err(Error::Divergent);
        }
        let recip: Vec<(f64, Complex64)> = pts.iter().map(|(e, v)| (*e, v.inv())).collect();
        let r = neville_at_zero(&recip);
        let recip_vanishes = r.value.norm() <= (1.0 / divergence_bound).max(3.0 * r.err_estimate);
        let recip_scale = recip.iter().map(|(_, v)| v.norm()).fold(0.0, f64::max);
        let rel_recip = r.err_estimate / recip_scale;
        let rel_direct = direct.err_estimate / direct.value.norm().max(f64::MIN_POSITIVE);
        if recip_vanishes && rel_recip < rel_direct {
            return Err(Error::Divergent);
        }
    }
    Ok(direct)
}

fn neville_at_zero(pts: &[(f64, Complex64)]) -> Extrapolated {
    let n = pts.len();
    let mut p: Vec<Complex64> = pts.iter().map(|(_, v)| *v).collect();
    let mut runner_up = p[n - 1];
    for level in 1..n {
        for i in 0..n - level {
            let xi = pts[i].0;
            let xj = pts[i + level].0;
            p[i] = (p[i + 1] * xi - p[i] * xj) / (xi - xj);
        }
        if level == n - 2 {
            // polynomial through samples 1..n-1 (drops the coarsest)
            runner_up = p[1];
        }
    }
    Extrapolated {
        value: p[0],
        err_estimate: (p[0] - runner_up).norm(),
    }
}
