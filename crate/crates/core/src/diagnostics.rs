//! Residual tests: ARCH-LM for conditional heteroscedasticity and
//! Ljung-Box for autocorrelation. Both report upper-tail chi-square p-values.

use crate::error::{Error, Result};
use crate::linalg::least_squares;
use crate::stats::chi_square_sf;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TestResult {
    pub statistic: f64,
    pub p_value: f64,
    pub lags: usize,
    pub df: usize,
}

impl TestResult {
    fn new(statistic: f64, lags: usize, df: usize) -> Self {
        let statistic = statistic.max(0.0);
        Self {
            statistic,
            p_value: chi_square_sf(statistic, df),
            lags,
            df,
        }
    }
}

/// Engle's LM test: `nobs * R^2` from regressing `e_t^2` on a constant and
/// `e_{t-1}^2 .. e_{t-lags}^2`, where `nobs = n - lags`.
pub fn arch_lm(residuals: &[f64], lags: usize) -> Result<TestResult> {
    if lags == 0 {
        return Err(Error::InvalidArgument(
            "ARCH-LM needs at least one lag".into(),
        ));
    }
    if residuals.len() <= 2 * lags + 1 {
        return Err(Error::TooShort {
            len: residuals.len(),
            needed: 2 * lags + 1,
        });
    }
    let sq: Vec<f64> = residuals.iter().map(|e| e * e).collect();
    let y = &sq[lags..];
    let nobs = y.len() as f64;
    let mean = y.iter().sum::<f64>() / nobs;
    let sst: f64 = y.iter().map(|v| (v - mean).powi(2)).sum();
    let scale = sq.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if sst <= 1e-24 * scale * scale * nobs || scale == 0.0 {
        return Ok(TestResult::new(0.0, lags, lags));
    }
    let rows: Vec<Vec<f64>> = (lags..sq.len())
        .map(|t| {
            std::iter::once(1.0)
                .chain((1..=lags).map(|j| sq[t - j]))
                .collect()
        })
        .collect();
    let beta = least_squares(&rows, y)
        .ok_or_else(|| Error::InvalidArgument("ARCH-LM auxiliary regression is singular".into()))?;
    let ssr: f64 = rows
        .iter()
        .zip(y)
        .map(|(x, v)| {
            let fitted: f64 = x.iter().zip(&beta).map(|(a, b)| a * b).sum();
            (v - fitted).powi(2)
        })
        .sum();
    let r2 = (1.0 - ssr / sst).clamp(0.0, 1.0);
    Ok(TestResult::new(nobs * r2, lags, lags))
}

/// Sample autocorrelations `rho_1..=rho_lags` around the mean.
pub fn autocorrelations(x: &[f64], lags: usize) -> Vec<f64> {
    let n = x.len();
    let mean = x.iter().sum::<f64>() / n as f64;
    let c0: f64 = x.iter().map(|v| (v - mean).powi(2)).sum();
    (1..=lags)
        .map(|j| {
            if c0 == 0.0 {
                return 0.0;
            }
            let cj: f64 = (j..n).map(|t| (x[t] - mean) * (x[t - j] - mean)).sum();
            cj / c0
        })
        .collect()
}

/// Ljung-Box `Q = n(n+2) sum rho_j^2 / (n-j)` with `df = lags`.
pub fn ljung_box(residuals: &[f64], lags: usize) -> Result<TestResult> {
    ljung_box_adjusted(residuals, lags, 0)
}

/// Ljung-Box with `df = lags - fitted_params` for ARMA residuals.
pub fn ljung_box_adjusted(
    residuals: &[f64],
    lags: usize,
    fitted_params: usize,
) -> Result<TestResult> {
    if lags == 0 {
        return Err(Error::InvalidArgument(
            "Ljung-Box needs at least one lag".into(),
        ));
    }
    if residuals.len() <= lags {
        return Err(Error::TooShort {
            len: residuals.len(),
            needed: lags,
        });
    }
    if fitted_params >= lags {
        return Err(Error::InvalidArgument(format!(
            "df adjustment {fitted_params} leaves no degrees of freedom at {lags} lags"
        )));
    }
    let n = residuals.len() as f64;
    let q: f64 = autocorrelations(residuals, lags)
        .iter()
        .enumerate()
        .map(|(i, r)| r * r / (n - (i + 1) as f64))
        .sum::<f64>()
        * n
        * (n + 2.0);
    Ok(TestResult::new(q, lags, lags - fitted_params))
}
