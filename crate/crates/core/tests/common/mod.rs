//! Independent oracles and random generators shared by the integration tests.
#![allow(dead_code)]

use std::path::PathBuf;

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sarima_impact::sarima::transform::pacf_to_ar;
use sarima_impact::sarima::{SarimaOrder, SarimaParams};

pub fn published_dir() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("data/published")
}

/// Product of `1 + sum c_i L^(i*stride)` factors by direct convolution.
pub fn convolve(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Lag polynomial `1 + sign * sum c_i L^(i*stride)`.
pub fn lag_polynomial(coeffs: &[f64], stride: usize, sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() * stride + 1];
    out[0] = 1.0;
    for (i, c) in coeffs.iter().enumerate() {
        out[(i + 1) * stride] = sign * c;
    }
    out
}

/// Recurrence AR coefficients and MA coefficients of the reduced form.
pub fn reduced_form(order: &SarimaOrder, params: &SarimaParams) -> (Vec<f64>, Vec<f64>) {
    let ar_poly = convolve(
        &lag_polynomial(&params.phi, 1, -1.0),
        &lag_polynomial(&params.seasonal_phi, order.period, -1.0),
    );
    let ma_poly = convolve(
        &lag_polynomial(&params.theta, 1, 1.0),
        &lag_polynomial(&params.seasonal_theta, order.period, 1.0),
    );
    let ar = ar_poly[1..].iter().map(|c| -c).collect();
    let ma = ma_poly[1..].to_vec();
    (ar, ma)
}

/// Autocovariances `gamma(0..=lags)` from a long psi-weight expansion.
pub fn psi_autocovariances(ar: &[f64], ma: &[f64], sigma2: f64, lags: usize) -> Vec<f64> {
    let mut psi: Vec<f64> = Vec::new();
    let mut quiet = 0;
    for j in 0..200_000 {
        let mut v = if j == 0 {
            1.0
        } else {
            ma.get(j - 1).copied().unwrap_or(0.0)
        };
        for (i, a) in ar.iter().enumerate() {
            if j > i {
                v += a * psi[j - i - 1];
            }
        }
        psi.push(v);
        // stop once a full window of weights is negligible
        quiet = if v.abs() < 1e-18 { quiet + 1 } else { 0 };
        if quiet > ar.len() + ma.len() + 1 {
            break;
        }
    }
    (0..=lags)
        .map(|h| {
            sigma2
                * psi
                    .iter()
                    .zip(psi.iter().skip(h))
                    .map(|(a, b)| a * b)
                    .sum::<f64>()
        })
        .collect()
}

/// Exact Gaussian log-likelihood by dense Cholesky of the Toeplitz covariance.
pub fn dense_log_likelihood(order: &SarimaOrder, params: &SarimaParams, w: &[f64]) -> f64 {
    let (ar, ma) = reduced_form(order, params);
    let n = w.len();
    let gamma = psi_autocovariances(&ar, &ma, params.sigma2, n);
    let cov = DMatrix::from_fn(n, n, |i, j| gamma[i.abs_diff(j)]);
    let chol = cov
        .cholesky()
        .expect("autocovariance matrix is positive definite");
    let centered = DVector::from_iterator(n, w.iter().map(|x| x - params.mu));
    let solved = chol.solve(&centered);
    let log_det: f64 = 2.0 * chol.l().diagonal().iter().map(|d| d.ln()).sum::<f64>();
    -0.5 * (n as f64 * (2.0 * std::f64::consts::PI).ln() + log_det + centered.dot(&solved))
}

fn stable(rng: &mut ChaCha8Rng, k: usize, bound: f64) -> Vec<f64> {
    let pacf: Vec<f64> = (0..k).map(|_| rng.random_range(-bound..bound)).collect();
    pacf_to_ar(&pacf)
}

/// A random order up to (3,1,3)x(2,1,1,4) with stationary, invertible parameters.
pub fn random_model(rng: &mut ChaCha8Rng) -> (SarimaOrder, SarimaParams) {
    let order = SarimaOrder::new(
        (
            rng.random_range(0..=3),
            rng.random_range(0..=1),
            rng.random_range(0..=3),
        ),
        (
            rng.random_range(0..=2),
            rng.random_range(0..=1),
            rng.random_range(0..=1),
        ),
        4,
    )
    .expect("valid order");
    let params = SarimaParams {
        phi: stable(rng, order.p, 0.8),
        theta: stable(rng, order.q, 0.8).iter().map(|c| -c).collect(),
        seasonal_phi: stable(rng, order.seasonal_p, 0.7),
        seasonal_theta: stable(rng, order.seasonal_q, 0.8)
            .iter()
            .map(|c| -c)
            .collect(),
        mu: rng.random_range(-1.0..1.0),
        sigma2: rng.random_range(0.2..3.0),
    };
    (order, params)
}

pub fn gaussian(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    (0..n).map(|_| StandardNormal.sample(rng)).collect()
}

/// ARCH(1): `e_t = z_t sqrt(omega + alpha e_(t-1)^2)` after a burn-in.
pub fn arch1(rng: &mut ChaCha8Rng, n: usize, omega: f64, alpha: f64) -> Vec<f64> {
    let mut prev: f64 = 0.0;
    let mut out = Vec::with_capacity(n);
    for t in 0..n + 100 {
        let z: f64 = StandardNormal.sample(rng);
        prev = z * (omega + alpha * prev * prev).sqrt();
        if t >= 100 {
            out.push(prev);
        }
    }
    out
}
