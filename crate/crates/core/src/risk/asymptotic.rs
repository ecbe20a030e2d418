//! Closed-form limit of the thresholding risk.
//!
//! In the Gaussian limit the entries of the scaled cross-covariance are
//! independent `N(m_ij, 1)`, with `m_ij = √n0 · ω_ij` on the signal rows and
//! zero on the `p_u` noise rows. Thresholding picks a noise feature exactly
//! when the largest squared noise entry exceeds every squared signal entry:
//!
//! ```text
//! E[L] = ∫₀^∞ N F(x)^{N−1} f(x) Π_ij F_{m_ij²}(x) dx,   N = p_u · q
//! ```
//!
//! with `F`, `f` the central χ²₁ CDF and density and `F_λ` the noncentral
//! CDF. Substituting `x = t²` removes the `x^{-1/2}` singularity of `f` at 0:
//! `f(t²) · 2t = 2φ(t)` and `F(t²) = erf(t/√2)`.

use std::f64::consts::FRAC_1_SQRT_2;

use nalgebra::DMatrix;

use crate::error::{Error, Result};
use crate::quadrature::{integrate, QuadratureConfig};
use crate::special::{chisq1_cdf_sqrt, normal_pdf};

/// Noise-tail mass allowed beyond the upper integration limit.
const TAIL_MASS: f64 = 1e-13;

/// Limit of `E[L_thres]` for a `p_t × q` matrix of scaled means.
///
/// Returns 0 when `p_u = 0`.
pub fn asymptotic_thresholding_risk(scaled_signal: &DMatrix<f64>, p_u: usize, q: usize, config: &QuadratureConfig) -> Result<f64> {
    if q == 0 || scaled_signal.ncols() != q {
        return Err(Error::InvalidDimension(format!(
            "signal matrix has {} columns, expected q = {q} >= 1",
            scaled_signal.ncols()
        )));
    }
    if let Some(bad) = scaled_signal.iter().find(|v| !v.is_finite()) {
        return Err(Error::Domain(format!("non-finite signal entry {bad}")));
    }
    if p_u == 0 {
        return Ok(0.0);
    }
    let noise_count = (p_u * q) as f64;
    let shifts: Vec<f64> = scaled_signal.iter().map(|m| m.abs()).collect();
    let max_shift = shifts.iter().copied().fold(0.0, f64::max);

    let upper = noise_upper_limit(noise_count).max(max_shift + 8.0);
    let integrand = |t: f64| {
        let central = libm::erf(t * FRAC_1_SQRT_2);
        let noise_max_density = noise_count * central.powf(noise_count - 1.0) * 2.0 * normal_pdf(t);
        if noise_max_density == 0.0 {
            return 0.0;
        }
        let signal_below: f64 = shifts.iter().map(|&a| chisq1_cdf_sqrt(t, a)).product();
        noise_max_density * signal_below
    };
    let r = integrate(integrand, 0.0, upper, config)?;
    Ok(r.value.clamp(0.0, 1.0))
}

/// Smallest `t` (to a coarse grid) with `N · P[|Z| > t] ≤ TAIL_MASS`.
fn noise_upper_limit(noise_count: f64) -> f64 {
    let mut t = 1.0;
    while noise_count * libm::erfc(t * FRAC_1_SQRT_2) > TAIL_MASS {
        t += 0.25;
    }
    t
}
