use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use crate::error::{Error, Result};
use crate::series::{integrate_values, QuarterIndex, QuarterlySeries, Scale};

use super::order::{SarimaOrder, SarimaParams};
use super::polynomial::expand_polynomials;

/// Draws `n` observations of the integrated process, starting 2000Q1.
///
/// The stationary part runs through a burn-in before integration starts
/// from zeros; the returned series is on log scale so it can be passed
/// straight to [`fit`](super::fit).
pub fn simulate(
    order: &SarimaOrder,
    params: &SarimaParams,
    n: usize,
    seed: u64,
) -> Result<QuarterlySeries> {
    let rf = expand_polynomials(order, params)?;
    if n == 0 {
        return Err(Error::InvalidArgument("n must be at least 1".into()));
    }
    if !params.is_admissible() {
        return Err(Error::NonStationary);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sd = params.sigma2.sqrt();
    let burn = 500 + 10 * order.state_dim();
    let total = burn + n;
    let mut eps = Vec::with_capacity(total);
    let mut w: Vec<f64> = Vec::with_capacity(total);
    for t in 0..total {
        let z: f64 = StandardNormal.sample(&mut rng);
        let e = sd * z;
        eps.push(e);
        let mut x = e;
        for (j, a) in rf.ar.iter().enumerate() {
            if let Some(prev) = t.checked_sub(j + 1) {
                x += a * w[prev];
            }
        }
        for (j, b) in rf.ma.iter().enumerate() {
            if let Some(prev) = t.checked_sub(j + 1) {
                x += b * eps[prev];
            }
        }
        w.push(x);
    }
    let spec = order.difference_spec();
    let stationary: Vec<f64> = w[burn..].iter().map(|x| x + params.mu).collect();
    let values = if spec.span() == 0 {
        stationary
    } else {
        let full = integrate_values(&stationary, &vec![0.0; spec.span()], spec)?;
        full[full.len() - n..].to_vec()
    };
    QuarterlySeries::new(QuarterIndex::new(2000, 1)?, values, Scale::Log)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn white_noise_variance() {
        let order = SarimaOrder::arima(0, 0, 0);
        let y = simulate(&order, &SarimaParams::zeros(&order, 1.0), 10_000, 1).unwrap();
        let v = y.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let var = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (v.len() - 1) as f64;
        assert!((0.94..=1.06).contains(&var), "{var}");
    }

    #[test]
    fn same_seed_same_draws() {
        let order = SarimaOrder::new((1, 1, 1), (0, 1, 1), 4).unwrap();
        let params = SarimaParams {
            phi: vec![0.2],
            theta: vec![0.3],
            seasonal_theta: vec![-0.4],
            ..SarimaParams::zeros(&order, 1.0)
        };
        let a = simulate(&order, &params, 50, 9).unwrap();
        let b = simulate(&order, &params, 50, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.len(), 50);
        assert_ne!(a, simulate(&order, &params, 50, 10).unwrap());
    }

    #[test]
    fn ar1_lag_one_autocorrelation() {
        let order = SarimaOrder::arima(1, 0, 0);
        let params = SarimaParams {
            phi: vec![0.8],
            ..SarimaParams::zeros(&order, 1.0)
        };
        let y = simulate(&order, &params, 5_000, 2).unwrap();
        let v = y.values();
        let mean = v.iter().sum::<f64>() / v.len() as f64;
        let c0: f64 = v.iter().map(|x| (x - mean).powi(2)).sum();
        let c1: f64 = v.windows(2).map(|w| (w[0] - mean) * (w[1] - mean)).sum();
        let rho = c1 / c0;
        assert!((0.75..=0.85).contains(&rho), "{rho}");
    }

    #[test]
    fn rejects_nonstationary() {
        let order = SarimaOrder::arima(1, 0, 0);
        let params = SarimaParams {
            phi: vec![1.01],
            ..SarimaParams::zeros(&order, 1.0)
        };
        assert!(matches!(
            simulate(&order, &params, 10, 0),
            Err(Error::NonStationary)
        ));
    }
}
