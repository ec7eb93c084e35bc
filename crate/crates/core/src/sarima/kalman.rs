//! Forward Kalman filter and exact Gaussian likelihood.
//!
//! The filter runs with unit innovation variance; every covariance it
//! carries is proportional to `sigma2`, which lets the variance be
//! concentrated out of the likelihood.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::series::QuarterlySeries;

use super::order::{SarimaOrder, SarimaParams};
use super::state_space::{state_space, StateSpaceSystem};

const MIN_PREDICTION_VARIANCE: f64 = 1e-12;

/// One-step prediction errors and the predicted state after the last step.
#[derive(Debug, Clone)]
pub(crate) struct FilterRun {
    /// `y_t - E[y_t | y_1..y_{t-1}]`.
    pub errors: Vec<f64>,
    /// Prediction variances in units of `sigma2`.
    pub variances: Vec<f64>,
    /// `E[alpha_{n+1} | y_1..y_n]`.
    pub state: Vec<f64>,
    /// `Var[alpha_{n+1} | y_1..y_n] / sigma2`, row-major.
    pub cov: Vec<f64>,
}

impl FilterRun {
    /// `sum ln f_t` and `sum v_t^2 / f_t`.
    fn sums(&self) -> (f64, f64) {
        self.errors
            .iter()
            .zip(&self.variances)
            .fold((0.0, 0.0), |(l, s), (v, f)| (l + f.ln(), s + v * v / f))
    }
}

/// `a <- T a`.
pub(crate) fn predict_state(ar: &[f64], a: &mut [f64]) {
    let m = ar.len();
    let head = a[0];
    for i in 0..m {
        let next = if i + 1 < m { a[i + 1] } else { 0.0 };
        a[i] = ar[i] * head + next;
    }
}

pub(crate) fn run_filter(sys: &StateSpaceSystem, data: &[f64]) -> Result<FilterRun> {
    let m = sys.dim();
    let ar = sys.ar();
    let r = sys.selection();
    let mut a = vec![0.0; m];
    let mut p = sys.unit_initial_covariance()?;
    let mut col = vec![0.0; m + 1];
    let mut errors = Vec::with_capacity(data.len());
    let mut variances = Vec::with_capacity(data.len());
    let mut steady = false;
    for (t, &y) in data.iter().enumerate() {
        let v = (y - sys.mu) - a[0];
        let f = p[0];
        if !(f >= MIN_PREDICTION_VARIANCE) || !v.is_finite() {
            return Err(Error::VarianceUnderflow(t));
        }
        errors.push(v);
        variances.push(f);
        let scaled = v / f;
        for i in 0..m {
            col[i] = p[i * m];
            a[i] += col[i] * scaled;
        }
        predict_state(ar, &mut a);
        if steady {
            continue;
        }
        // The update zeroes the first row and column of P, so
        // T (P - c c'/f) T' + R R' reduces to a shift plus rank-one terms.
        let mut moved = 0.0f64;
        for i in 0..m {
            let ci = col[i + 1] / f;
            let ri = r[i];
            let (head, tail) = p.split_at_mut((i + 1) * m);
            let row = &mut head[i * m..];
            if i + 1 < m {
                let below = &tail[..m];
                for j in i..m - 1 {
                    let next = below[j + 1] - ci * col[j + 1] + ri * r[j];
                    moved = moved.max((next - row[j]).abs());
                    row[j] = next;
                }
            }
            let next = ri * r[m - 1];
            moved = moved.max((next - row[m - 1]).abs());
            row[m - 1] = next;
        }
        for i in 1..m {
            for j in 0..i {
                p[i * m + j] = p[j * m + i];
            }
        }
        steady = moved <= 1e-13 * f;
    }
    Ok(FilterRun {
        errors,
        variances,
        state: a,
        cov: p,
    })
}

/// `sum ln f_t` and `sum v_t^2 / f_t` through the low-rank covariance
/// recursion.
///
/// Starting from the stationary covariance, `P_{t+1} - P_t` stays rank one,
/// so the filter only carries the gain and a single direction instead of the
/// full covariance matrix. Agrees with [`run_filter`] to rounding.
pub(crate) fn innovation_sums(sys: &StateSpaceSystem, data: &[f64]) -> Result<(f64, f64)> {
    let m = sys.dim();
    let ar = sys.ar();
    let p0 = sys.unit_initial_first_column()?;
    let mut f = p0[0];
    // g = T P e1, the unnormalized gain.
    let mut g = p0;
    predict_state(ar, &mut g);
    // P_{t+1} - P_t = scale * w w'.
    let mut w = g.clone();
    let mut scale = -1.0 / f;
    let mut a = vec![0.0; m];
    let mut tw = vec![0.0; m];
    let mut steady = false;
    let (mut log_det, mut quad) = (0.0, 0.0);
    for (t, &y) in data.iter().enumerate() {
        let v = (y - sys.mu) - a[0];
        if !(f >= MIN_PREDICTION_VARIANCE) || !v.is_finite() {
            return Err(Error::VarianceUnderflow(t));
        }
        log_det += f.ln();
        quad += v * v / f;
        predict_state(ar, &mut a);
        let scaled = v / f;
        for (ai, gi) in a.iter_mut().zip(&g) {
            *ai += gi * scaled;
        }
        if steady {
            continue;
        }
        let u = w[0];
        tw.copy_from_slice(&w);
        predict_state(ar, &mut tw);
        let df = scale * u * u;
        let f_next = f + df;
        let gu = scale * u;
        for (gi, twi) in g.iter_mut().zip(&tw) {
            *gi += gu * twi;
        }
        let ratio = u / f_next;
        for ((wi, twi), gi) in w.iter_mut().zip(&tw).zip(&g) {
            *wi = twi - ratio * gi;
        }
        scale *= f_next / f;
        f = f_next;
        let size = w.iter().map(|x| x * x).sum::<f64>() * scale.abs();
        steady = size <= 1e-13 * f;
    }
    Ok((log_det, quad))
}

/// Exact log-likelihood at the system's own `sigma2`.
pub(crate) fn system_log_likelihood(sys: &StateSpaceSystem, data: &[f64]) -> Result<f64> {
    let run = run_filter(sys, data)?;
    let (log_det, quad) = run.sums();
    let n = data.len() as f64;
    Ok(-0.5 * n * (2.0 * PI).ln() - 0.5 * (log_det + n * sys.sigma2.ln() + quad / sys.sigma2))
}

/// Likelihood with the innovation variance replaced by its maximizer.
#[derive(Debug, Clone, Copy)]
pub(crate) struct Concentrated {
    pub loglik: f64,
    pub sigma2: f64,
    /// True when the variance estimate hit the floor.
    pub floored: bool,
}

pub(crate) fn concentrated_log_likelihood(
    sys: &StateSpaceSystem,
    data: &[f64],
    sigma2_floor: f64,
) -> Result<Concentrated> {
    let (log_det, quad) = innovation_sums(sys, data)?;
    let n = data.len() as f64;
    let raw = quad / n;
    let sigma2 = raw.max(sigma2_floor);
    let loglik = -0.5 * n * (2.0 * PI).ln() - 0.5 * (log_det + n * sigma2.ln() + quad / sigma2);
    Ok(Concentrated {
        loglik,
        sigma2,
        floored: raw <= sigma2_floor,
    })
}

/// Exact Gaussian log-likelihood of an already differenced series.
pub fn log_likelihood(
    order: &SarimaOrder,
    params: &SarimaParams,
    diffed: &QuarterlySeries,
) -> Result<f64> {
    let sys = state_space(order, params)?;
    system_log_likelihood(&sys, diffed.values())
}

/// Standardized one-step prediction errors `v_t / sqrt(sigma2 f_t)`.
pub fn standardized_residuals(
    order: &SarimaOrder,
    params: &SarimaParams,
    diffed: &[f64],
) -> Result<Vec<f64>> {
    let sys = state_space(order, params)?;
    let run = run_filter(&sys, diffed)?;
    Ok(run
        .errors
        .iter()
        .zip(&run.variances)
        .map(|(v, f)| v / (params.sigma2 * f).sqrt())
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::series::{QuarterIndex, Scale};

    fn series(values: &[f64]) -> QuarterlySeries {
        QuarterlySeries::new(
            QuarterIndex::new(2000, 1).unwrap(),
            values.to_vec(),
            Scale::Differenced,
        )
        .unwrap()
    }

    const DATA: [f64; 10] = [0.3, -1.2, 0.8, 0.05, -0.4, 1.9, -0.7, 0.2, 0.6, -1.1];

    #[test]
    fn white_noise_closed_form() {
        let order = SarimaOrder::arima(0, 0, 0);
        let s2 = 0.8;
        let params = SarimaParams::zeros(&order, s2);
        let ll = log_likelihood(&order, &params, &series(&DATA)).unwrap();
        let n = DATA.len() as f64;
        let ss: f64 = DATA.iter().map(|z| z * z).sum();
        let expected = -0.5 * n * ((2.0 * PI).ln() + s2.ln()) - ss / (2.0 * s2);
        assert!((ll - expected).abs() < 1e-10);
    }

    #[test]
    fn ar1_with_zero_coefficient_is_white_noise() {
        let wn = SarimaOrder::arima(0, 0, 0);
        let ar = SarimaOrder::arima(1, 0, 0);
        let a = log_likelihood(&wn, &SarimaParams::zeros(&wn, 1.3), &series(&DATA)).unwrap();
        let b = log_likelihood(&ar, &SarimaParams::zeros(&ar, 1.3), &series(&DATA)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn seasonal_relabeling_matches_ar1() {
        let ar = SarimaOrder::arima(1, 0, 0);
        let seasonal = SarimaOrder::new((0, 0, 0), (1, 0, 0), 1).unwrap();
        let pa = SarimaParams {
            phi: vec![0.45],
            ..SarimaParams::zeros(&ar, 0.9)
        };
        let ps = SarimaParams {
            seasonal_phi: vec![0.45],
            ..SarimaParams::zeros(&seasonal, 0.9)
        };
        let a = log_likelihood(&ar, &pa, &series(&DATA)).unwrap();
        let b = log_likelihood(&seasonal, &ps, &series(&DATA)).unwrap();
        assert!((a - b).abs() < 1e-12);
    }

    #[test]
    fn concentrated_matches_profile() {
        let order = SarimaOrder::arima(1, 0, 1);
        let mut params = SarimaParams {
            phi: vec![0.3],
            theta: vec![0.2],
            ..SarimaParams::zeros(&order, 1.0)
        };
        let sys = state_space(&order, &params).unwrap();
        let c = concentrated_log_likelihood(&sys, &DATA, 1e-12).unwrap();
        params.sigma2 = c.sigma2;
        let direct = log_likelihood(&order, &params, &series(&DATA)).unwrap();
        assert!((c.loglik - direct).abs() < 1e-10);
        for bump in [0.9, 1.1] {
            params.sigma2 = c.sigma2 * bump;
            assert!(log_likelihood(&order, &params, &series(&DATA)).unwrap() < c.loglik);
        }
    }

    #[test]
    fn residuals_of_white_noise_are_scaled_data() {
        let order = SarimaOrder::arima(0, 0, 0);
        let params = SarimaParams::zeros(&order, 4.0);
        let res = standardized_residuals(&order, &params, &DATA).unwrap();
        for (r, z) in res.iter().zip(DATA) {
            assert!((r - z / 2.0).abs() < 1e-15);
        }
    }

    #[test]
    fn low_rank_recursion_matches_full_filter() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let order = SarimaOrder::new((2, 0, 3), (1, 0, 1), 4).unwrap();
        let data: Vec<f64> = (0..40).map(|_| rng.random_range(-1.0..1.0)).collect();
        let mut checked = 0;
        while checked < 50 {
            let mut draw = |n: usize| {
                (0..n)
                    .map(|_| rng.random_range(-0.9..0.9))
                    .collect::<Vec<f64>>()
            };
            let params = SarimaParams {
                phi: draw(2),
                theta: draw(3),
                seasonal_phi: draw(1),
                seasonal_theta: draw(1),
                mu: 0.1,
                sigma2: 1.0,
            };
            let Ok(sys) = state_space(&order, &params) else {
                continue;
            };
            let full = run_filter(&sys, &data).unwrap().sums();
            let fast = innovation_sums(&sys, &data).unwrap();
            assert!(
                (full.0 - fast.0).abs() < 1e-9 * (1.0 + full.0.abs()),
                "{full:?} {fast:?}"
            );
            assert!(
                (full.1 - fast.1).abs() < 1e-9 * (1.0 + full.1.abs()),
                "{full:?} {fast:?}"
            );
            let col = sys.unit_initial_first_column().unwrap();
            let p0 = sys.unit_initial_covariance().unwrap();
            let m = sys.dim();
            for i in 0..m {
                assert!((col[i] - p0[i * m]).abs() < 1e-12 * (1.0 + p0[0]));
            }
            checked += 1;
        }
    }
}
