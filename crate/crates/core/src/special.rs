//! Normal and noncentral χ²₁ distribution functions.

use std::f64::consts::{FRAC_1_SQRT_2, PI};

use crate::error::{Error, Result};

/// Standard normal CDF via `erfc`, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x * FRAC_1_SQRT_2)
}

pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * PI).sqrt()
}

/// `P[Z² ≤ x]` for `Z ~ N(√λ, 1)`.
pub fn noncentral_chisq1_cdf(x: f64, lambda: f64) -> Result<f64> {
    if !(x >= 0.0) || !(lambda >= 0.0) {
        return Err(Error::Domain(format!("noncentral chi-squared cdf needs x >= 0 and lambda >= 0, got x = {x}, lambda = {lambda}")));
    }
    Ok(chisq1_cdf_sqrt(x.sqrt(), lambda.sqrt()))
}

/// `Φ(t − a) − Φ(−t − a)` for `t, a ≥ 0`, i.e. the noncentral χ²₁ CDF at
/// `t²` with noncentrality `a²`.
pub(crate) fn chisq1_cdf_sqrt(t: f64, a: f64) -> f64 {
    let lower = normal_cdf(-t - a);
    let v = if t > a {
        // 1 − Φ(a − t) − Φ(−t − a), both terms small.
        1.0 - normal_cdf(a - t) - lower
    } else {
        normal_cdf(t - a) - lower
    };
    v.clamp(0.0, 1.0)
}

/// Central χ²₁ density `x^{-1/2} e^{-x/2} / √(2π)`.
pub fn chisq1_pdf(x: f64) -> f64 {
    if x <= 0.0 {
        return if x == 0.0 { f64::INFINITY } else { 0.0 };
    }
    (-0.5 * x).exp() / (2.0 * PI * x).sqrt()
}
