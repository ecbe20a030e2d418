#![allow(dead_code)]

use featsel::rng::{Rng, StreamSeed};
use featsel::DataMatrix;
use nalgebra::DMatrix;
use rand_distr::{Distribution, StandardNormal};

pub fn normal_matrix(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| StandardNormal.sample(rng))
}

/// Independent standard normal `X` (n × p) and `Y` (n × q).
pub fn independent_pair(n: usize, p: usize, q: usize, seed: StreamSeed) -> (DataMatrix, DataMatrix) {
    let mut rng = seed.rng();
    let x = normal_matrix(n, p, &mut rng);
    let y = normal_matrix(n, q, &mut rng);
    (DataMatrix::from_values(x).unwrap(), DataMatrix::from_values(y).unwrap())
}

/// One shared factor drives the first `planted` features of `X` and the
/// first `planted` variates of `Y`; every planted pair has correlation `rho`.
pub fn planted_pair(n: usize, p: usize, q: usize, planted: usize, rho: f64, seed: StreamSeed) -> (DataMatrix, DataMatrix) {
    let mut rng = seed.rng();
    let z: Vec<f64> = (0..n).map(|_| StandardNormal.sample(&mut rng)).collect();
    let (a, b) = (rho.sqrt(), (1.0 - rho).sqrt());
    let mut x = normal_matrix(n, p, &mut rng);
    let mut y = normal_matrix(n, q, &mut rng);
    for i in 0..n {
        for k in 0..planted {
            x[(i, k)] = a * z[i] + b * x[(i, k)];
            y[(i, k)] = a * z[i] + b * y[(i, k)];
        }
    }
    (DataMatrix::from_values(x).unwrap(), DataMatrix::from_values(y).unwrap())
}

/// One-sample Kolmogorov–Smirnov statistic against Uniform(0, 1).
pub fn ks_uniform_statistic(values: &[f64]) -> f64 {
    let mut u = values.to_vec();
    u.sort_by(|a, b| a.total_cmp(b));
    let n = u.len() as f64;
    u.iter()
        .enumerate()
        .map(|(i, &v)| ((i + 1) as f64 / n - v).max(v - i as f64 / n))
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov–Smirnov statistic.
pub fn ks_two_sample_statistic(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(|x, y| x.total_cmp(y));
    b.sort_by(|x, y| x.total_cmp(y));
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let v = a[i].min(b[j]);
        while i < a.len() && a[i] <= v {
            i += 1;
        }
        while j < b.len() && b[j] <= v {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov tail `P[K > λ]`.
fn kolmogorov_tail(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let term = (-2.0 * (k * k) as f64 * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Approximate KS p-value with the small-sample correction
/// `λ = (√n + 0.12 + 0.11/√n) D`.
pub fn ks_pvalue(d: f64, effective_n: f64) -> f64 {
    let s = effective_n.sqrt();
    kolmogorov_tail((s + 0.12 + 0.11 / s) * d)
}

/// Loss of thresholding in the Gaussian limit, by direct simulation: signal
/// rows are `N(m_ij, 1)`, noise rows `N(0, 1)`.
pub fn thresholding_limit_oracle(means: &DMatrix<f64>, p_u: usize, draws: u64, seed: StreamSeed) -> (f64, f64) {
    let mut rng = seed.rng();
    let q = means.ncols();
    let mut losses = 0u64;
    for _ in 0..draws {
        let mut signal_max = 0.0f64;
        for v in means.iter() {
            let z: f64 = StandardNormal.sample(&mut rng);
            signal_max = signal_max.max((v + z).abs());
        }
        let mut noise_max = 0.0f64;
        for _ in 0..p_u * q {
            let z: f64 = StandardNormal.sample(&mut rng);
            noise_max = noise_max.max(z.abs());
        }
        losses += u64::from(noise_max > signal_max);
    }
    let l = losses as f64 / draws as f64;
    (l, (l * (1.0 - l) / draws as f64).sqrt())
}
