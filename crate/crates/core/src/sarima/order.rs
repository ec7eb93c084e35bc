use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::DifferenceSpec;

/// A seasonal ARIMA order `(p,d,q)x(P,D,Q)_s`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SarimaOrder {
    pub p: usize,
    pub d: usize,
    pub q: usize,
    pub seasonal_p: usize,
    pub seasonal_d: usize,
    pub seasonal_q: usize,
    pub period: usize,
}

impl SarimaOrder {
    pub fn new(
        (p, d, q): (usize, usize, usize),
        (seasonal_p, seasonal_d, seasonal_q): (usize, usize, usize),
        period: usize,
    ) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument(
                "seasonal period must be >= 1".into(),
            ));
        }
        Ok(Self {
            p,
            d,
            q,
            seasonal_p,
            seasonal_d,
            seasonal_q,
            period,
        })
    }

    /// Nonseasonal ARIMA(p,d,q).
    pub fn arima(p: usize, d: usize, q: usize) -> Self {
        Self {
            p,
            d,
            q,
            seasonal_p: 0,
            seasonal_d: 0,
            seasonal_q: 0,
            period: 1,
        }
    }

    pub fn difference_spec(&self) -> DifferenceSpec {
        DifferenceSpec {
            d: self.d,
            seasonal_d: self.seasonal_d,
            period: self.period,
        }
    }

    /// Lag length of the expanded AR polynomial, `p + P*s`.
    pub fn ar_len(&self) -> usize {
        self.p + self.seasonal_p * self.period
    }

    /// Lag length of the expanded MA polynomial, `q + Q*s`.
    pub fn ma_len(&self) -> usize {
        self.q + self.seasonal_q * self.period
    }

    pub fn state_dim(&self) -> usize {
        self.ar_len().max(self.ma_len() + 1)
    }

    pub fn coefficient_count(&self) -> usize {
        self.p + self.q + self.seasonal_p + self.seasonal_q
    }

    /// Whether the mean is estimated by default: only for undifferenced models.
    pub fn default_intercept(&self) -> bool {
        self.d + self.seasonal_d == 0
    }

    /// Parameter count used by AIC: coefficients, intercept and variance.
    pub fn parameter_count(&self, intercept: bool) -> usize {
        self.coefficient_count() + usize::from(intercept) + 1
    }
}

impl fmt::Display for SarimaOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "({},{},{})x({},{},{},{})",
            self.p, self.d, self.q, self.seasonal_p, self.seasonal_d, self.seasonal_q, self.period
        )
    }
}

impl FromStr for SarimaOrder {
    type Err = Error;

    /// Accepts `(p,d,q)x(P,D,Q,s)`, `(p,d,q)x(P,D,Q)s` or seven bare
    /// comma-separated integers.
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::InvalidArgument(format!("cannot parse SARIMA order `{s}`"));
        let cleaned: String = s
            .chars()
            .map(|c| if c.is_ascii_digit() { c } else { ' ' })
            .collect();
        let nums = cleaned
            .split_whitespace()
            .map(|t| t.parse::<usize>().map_err(|_| bad()))
            .collect::<Result<Vec<_>>>()?;
        match *nums.as_slice() {
            [p, d, q, sp, sd, sq, period] => {
                // "(P,D,Q,0)" means no seasonal component
                let period = if period == 0 && sp + sd + sq == 0 {
                    1
                } else {
                    period
                };
                SarimaOrder::new((p, d, q), (sp, sd, sq), period)
            }
            [p, d, q] => Ok(SarimaOrder::arima(p, d, q)),
            _ => Err(bad()),
        }
    }
}

/// Coefficients of a seasonal ARIMA model in recurrence convention:
/// `x_t = mu + sum phi_i x_{t-i} + eps_t + sum theta_j eps_{t-j}` for each block.
#[derive(Debug, Clone, PartialEq)]
pub struct SarimaParams {
    pub phi: Vec<f64>,
    pub theta: Vec<f64>,
    pub seasonal_phi: Vec<f64>,
    pub seasonal_theta: Vec<f64>,
    pub mu: f64,
    pub sigma2: f64,
}

impl SarimaParams {
    /// All coefficients zero, zero mean.
    pub fn zeros(order: &SarimaOrder, sigma2: f64) -> Self {
        Self {
            phi: vec![0.0; order.p],
            theta: vec![0.0; order.q],
            seasonal_phi: vec![0.0; order.seasonal_p],
            seasonal_theta: vec![0.0; order.seasonal_q],
            mu: 0.0,
            sigma2,
        }
    }

    pub fn check_dims(&self, order: &SarimaOrder) -> Result<()> {
        if self.phi.len() != order.p
            || self.theta.len() != order.q
            || self.seasonal_phi.len() != order.seasonal_p
            || self.seasonal_theta.len() != order.seasonal_q
        {
            return Err(Error::DimensionMismatch(order.to_string()));
        }
        if !(self.sigma2 > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "innovation variance must be positive, got {}",
                self.sigma2
            )));
        }
        Ok(())
    }

    /// Stationarity of both AR blocks and invertibility of both MA blocks.
    pub fn is_admissible(&self) -> bool {
        use super::transform::is_stable;
        let neg = |v: &[f64]| v.iter().map(|x| -x).collect::<Vec<_>>();
        is_stable(&self.phi)
            && is_stable(&self.seasonal_phi)
            && is_stable(&neg(&self.theta))
            && is_stable(&neg(&self.seasonal_theta))
    }
}
