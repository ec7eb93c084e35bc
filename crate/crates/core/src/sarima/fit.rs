use crate::error::{Error, Result};
use crate::optim::{minimize, Minimum, OptimizerOptions};
use crate::selection::aic;
use crate::series::{QuarterlySeries, Scale};

use super::kalman::{concentrated_log_likelihood, run_filter};
use super::order::{SarimaOrder, SarimaParams};
use super::polynomial::expand_polynomials;
use super::state_space::StateSpaceSystem;
use super::transform::{constrain_ar, constrain_ma};

/// Estimation settings.
#[derive(Debug, Clone, PartialEq)]
pub struct FitConfig {
    /// Estimate a mean; `None` picks it when the order has no differencing.
    pub intercept: Option<bool>,
    pub optimizer: OptimizerOptions,
    pub sigma2_floor: f64,
    /// Offsets added to every unconstrained coefficient, one optimizer run each.
    pub starts: Vec<f64>,
}

impl Default for FitConfig {
    fn default() -> Self {
        Self {
            intercept: None,
            optimizer: OptimizerOptions::default(),
            sigma2_floor: 1e-12,
            starts: vec![0.0, 0.1, -0.1],
        }
    }
}

/// A maximum-likelihood fit of one order to one series.
#[derive(Debug, Clone, PartialEq)]
pub struct FittedModel {
    pub order: SarimaOrder,
    pub params: SarimaParams,
    pub intercept: bool,
    pub loglik: f64,
    pub aic: f64,
    /// Standardized one-step prediction errors, one per differenced observation.
    pub residuals: Vec<f64>,
    pub n_used: usize,
    pub converged: bool,
    pub iterations: usize,
    differenced: QuarterlySeries,
}

impl FittedModel {
    pub fn parameter_count(&self) -> usize {
        self.order.parameter_count(self.intercept)
    }

    /// The stationary series the likelihood was evaluated on.
    pub fn differenced(&self) -> &QuarterlySeries {
        &self.differenced
    }
}

/// Layout of the unconstrained optimizer vector.
struct Layout {
    order: SarimaOrder,
    intercept: bool,
}

impl Layout {
    fn len(&self) -> usize {
        self.order.coefficient_count() + usize::from(self.intercept)
    }

    fn params(&self, x: &[f64], sigma2: f64) -> SarimaParams {
        let o = &self.order;
        let (phi, rest) = x.split_at(o.p);
        let (theta, rest) = rest.split_at(o.q);
        let (sphi, rest) = rest.split_at(o.seasonal_p);
        let (stheta, rest) = rest.split_at(o.seasonal_q);
        SarimaParams {
            phi: constrain_ar(phi),
            theta: constrain_ma(theta),
            seasonal_phi: constrain_ar(sphi),
            seasonal_theta: constrain_ma(stheta),
            mu: if self.intercept { rest[0] } else { 0.0 },
            sigma2,
        }
    }

    fn system(&self, x: &[f64]) -> StateSpaceSystem {
        let params = self.params(x, 1.0);
        let rf = expand_polynomials(&self.order, &params).expect("layout matches order");
        StateSpaceSystem::from_reduced(&rf, params.mu, 1.0)
    }
}

/// Fits `order` to a log-scale level series by exact maximum likelihood.
///
/// Differencing is applied first; the ARMA part is estimated on the
/// differenced data with the innovation variance concentrated out.
/// Optimizer failure is reported through `converged`, not as an error.
pub fn fit(
    series: &QuarterlySeries,
    order: &SarimaOrder,
    config: &FitConfig,
) -> Result<FittedModel> {
    if series.scale() != Scale::Log {
        return Err(Error::WrongScale {
            expected: "log",
            actual: if series.scale() == Scale::Level {
                "level"
            } else {
                "differenced"
            },
        });
    }
    let spec = order.difference_spec();
    let intercept = config
        .intercept
        .unwrap_or_else(|| order.default_intercept());
    let k = order.parameter_count(intercept);
    let needed = k + 5;
    if series.len() < spec.span() + needed {
        return Err(Error::TooShort {
            len: series.len(),
            needed: spec.span() + needed - 1,
        });
    }
    let differenced = series.difference(spec)?;
    let data = differenced.values();
    let layout = Layout {
        order: *order,
        intercept,
    };
    let floor = config.sigma2_floor;

    let objective = |x: &[f64]| -> f64 {
        match concentrated_log_likelihood(&layout.system(x), data, floor) {
            Ok(c) => -c.loglik,
            Err(_) => f64::INFINITY,
        }
    };

    let mean = data.iter().sum::<f64>() / data.len() as f64;
    let mut best: Option<Minimum> = None;
    for &offset in &config.starts {
        let mut x0 = vec![offset; layout.len()];
        if intercept {
            x0[layout.len() - 1] = mean;
        }
        let run = minimize(objective, &x0, &config.optimizer);
        let better = match &best {
            None => true,
            Some(b) => match (run.converged, b.converged) {
                (true, false) => true,
                (false, true) => false,
                _ => run.value < b.value,
            },
        };
        if better {
            best = Some(run);
        }
    }
    let best =
        best.ok_or_else(|| Error::InvalidArgument("no starting points configured".into()))?;

    let sys = layout.system(&best.x);
    let conc = concentrated_log_likelihood(&sys, data, floor)?;
    let params = layout.params(&best.x, conc.sigma2);
    let run = run_filter(&sys, data)?;
    let residuals = run
        .errors
        .iter()
        .zip(&run.variances)
        .map(|(v, f)| v / (conc.sigma2 * f).sqrt())
        .collect();

    Ok(FittedModel {
        order: *order,
        params,
        intercept,
        loglik: conc.loglik,
        aic: aic(conc.loglik, k),
        residuals,
        n_used: data.len(),
        converged: best.converged && !conc.floored && conc.loglik.is_finite(),
        iterations: best.iterations,
        differenced,
    })
}
