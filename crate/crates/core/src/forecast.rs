//! Out-of-sample forecasts with level-scale prediction intervals.
//!
//! Forecasts are produced on the differenced scale from the filtered state,
//! integrated back to log levels, and exponentiated. The log-scale forecast
//! variance is exact for the finite sample: it combines the filtered state
//! covariance with the moving-average weights of future innovations and
//! propagates both through the integration polynomial.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::sarima::{predict_state, run_filter, state_space, FittedModel};
use crate::series::{integrate_values, QuarterIndex, QuarterlySeries, Scale};
use crate::stats::normal_quantile;

/// How a log-scale forecast becomes a level-scale point value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BackTransform {
    /// `exp(mean)`, the lognormal median.
    #[default]
    Median,
    /// `exp(mean + var / 2)`, the lognormal mean.
    Mean,
}

impl fmt::Display for BackTransform {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            BackTransform::Median => "median",
            BackTransform::Mean => "mean",
        })
    }
}

impl FromStr for BackTransform {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "median" | "naive" => Ok(BackTransform::Median),
            "mean" | "lognormal" => Ok(BackTransform::Mean),
            other => Err(Error::InvalidArgument(format!(
                "unknown back-transform {other:?} (expected median or mean)"
            ))),
        }
    }
}

/// An `h`-step forecast path.
#[derive(Debug, Clone, PartialEq)]
pub struct Forecast {
    /// First forecast quarter.
    pub start: QuarterIndex,
    /// Tail mass outside the interval (0.05 for 95%).
    pub alpha: f64,
    pub back_transform: BackTransform,
    pub mean_log: Vec<f64>,
    pub var_log: Vec<f64>,
    pub expected_level: Vec<f64>,
    pub lower_level: Vec<f64>,
    pub upper_level: Vec<f64>,
}

impl Forecast {
    pub fn horizon(&self) -> usize {
        self.mean_log.len()
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterIndex> + '_ {
        (0..self.horizon()).map(|i| self.start.offset(i as i64))
    }

    /// Step index of quarter `q`, if it lies inside the horizon.
    pub fn step_of(&self, q: QuarterIndex) -> Option<usize> {
        let i = q.quarters_since(self.start);
        (0..self.horizon() as i64)
            .contains(&i)
            .then_some(i as usize)
    }

    /// `(lower, expected, upper)` at quarter `q`.
    pub fn level_at(&self, q: QuarterIndex) -> Option<(f64, f64, f64)> {
        self.step_of(q).map(|i| {
            (
                self.lower_level[i],
                self.expected_level[i],
                self.upper_level[i],
            )
        })
    }
}

/// Forecasts `h` quarters past the end of `history`.
///
/// `history` is the log-scale series the model was fitted to. It may run past
/// the estimation window, in which case the extra observations are filtered
/// with the fitted parameters held fixed and the forecast conditions on them.
pub fn forecast(
    model: &FittedModel,
    history: &QuarterlySeries,
    h: usize,
    alpha: f64,
    back_transform: BackTransform,
) -> Result<Forecast> {
    if !model.converged {
        return Err(Error::NotConverged);
    }
    if h == 0 {
        return Err(Error::InvalidArgument(
            "forecast horizon must be at least 1".into(),
        ));
    }
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "alpha must lie in (0, 1), got {alpha}"
        )));
    }
    if history.scale() != Scale::Log {
        return Err(Error::WrongScale {
            expected: "log",
            actual: if history.scale() == Scale::Level {
                "level"
            } else {
                "differenced"
            },
        });
    }
    let spec = model.order.difference_spec();
    let span = spec.span();
    let fitted = model.differenced();
    let expected_start = fitted.start().offset(-(span as i64));
    if history.start() != expected_start {
        return Err(Error::Misaligned {
            expected: expected_start,
            actual: history.start(),
        });
    }
    if history.end() < fitted.end() {
        return Err(Error::Misaligned {
            expected: fitted.end(),
            actual: history.end(),
        });
    }

    let diffed = history.difference(spec)?;
    let sys = state_space(&model.order, &model.params)?;
    let run = run_filter(&sys, diffed.values())?;
    let m = sys.dim();
    let ar = sys.ar();

    // Differenced-scale means and the rows Z T^{i} used for error covariances.
    let mut state = run.state.clone();
    let mut w_mean = Vec::with_capacity(h);
    let mut loadings: Vec<Vec<f64>> = Vec::with_capacity(h);
    let mut row = vec![0.0; m];
    row[0] = 1.0;
    for _ in 0..h {
        w_mean.push(sys.mu + state[0]);
        loadings.push(row.clone());
        predict_state(ar, &mut state);
        // row <- row T, with T = [ar | shift]
        let mut next = vec![0.0; m];
        for j in 0..m {
            next[j] = row[0] * ar[j] + if j > 0 { row[j - 1] } else { 0.0 };
        }
        row = next;
    }
    let psi = sys.psi_weights(h);
    let p = &run.cov;
    let mut err_cov = vec![0.0; h * h];
    for i in 0..h {
        let pg: Vec<f64> = (0..m)
            .map(|r| (0..m).map(|c| p[r * m + c] * loadings[i][c]).sum())
            .collect();
        for j in i..h {
            let mut c: f64 = loadings[j].iter().zip(&pg).map(|(a, b)| a * b).sum();
            // future innovations entering both steps
            for l in 1..=i {
                c += psi[i - l] * psi[j - l];
            }
            err_cov[i * h + j] = c;
            err_cov[j * h + i] = c;
        }
    }

    let anchors = &history.values()[history.len() - span..];
    let mean_log = integrate_values(&w_mean, anchors, spec)?[span..].to_vec();

    // Weights of 1/delta(L) carry differenced errors into log levels.
    let poly = spec.polynomial();
    let mut xi = vec![0.0; h];
    xi[0] = 1.0;
    for k in 1..h {
        xi[k] = -(1..poly.len().min(k + 1))
            .map(|j| poly[j] * xi[k - j])
            .sum::<f64>();
    }
    let var_log: Vec<f64> = (0..h)
        .map(|t| {
            let mut v = 0.0;
            for i in 0..=t {
                for j in 0..=t {
                    v += xi[t - i] * xi[t - j] * err_cov[i * h + j];
                }
            }
            v * model.params.sigma2
        })
        .collect();

    let z = normal_quantile(1.0 - alpha / 2.0);
    let offset = history.offset();
    let level = |x: f64| x.exp() - offset;
    let expected_level = mean_log
        .iter()
        .zip(&var_log)
        .map(|(m, v)| match back_transform {
            BackTransform::Median => level(*m),
            BackTransform::Mean => level(m + v / 2.0),
        })
        .collect();
    let lower_level = mean_log
        .iter()
        .zip(&var_log)
        .map(|(m, v)| level(m - z * v.sqrt()))
        .collect();
    let upper_level = mean_log
        .iter()
        .zip(&var_log)
        .map(|(m, v)| level(m + z * v.sqrt()))
        .collect();

    Ok(Forecast {
        start: history.end().succ(),
        alpha,
        back_transform,
        mean_log,
        var_log,
        expected_level,
        lower_level,
        upper_level,
    })
}

/// One row of an expected-versus-realized comparison, in level units.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HoldoutRow {
    pub quarter: QuarterIndex,
    pub expected: f64,
    pub realized: f64,
    /// `realized - expected`.
    pub difference: f64,
}

/// Pairs every realized observation with the forecast for the same quarter.
pub fn holdout_compare(forecast: &Forecast, realized: &QuarterlySeries) -> Result<Vec<HoldoutRow>> {
    if realized.scale() != Scale::Level {
        return Err(Error::WrongScale {
            expected: "level",
            actual: if realized.scale() == Scale::Log {
                "log"
            } else {
                "differenced"
            },
        });
    }
    realized
        .quarters()
        .zip(realized.values())
        .map(|(q, &real)| {
            let i = forecast.step_of(q).ok_or(Error::Misaligned {
                expected: forecast.start,
                actual: q,
            })?;
            let expected = forecast.expected_level[i];
            Ok(HoldoutRow {
                quarter: q,
                expected,
                realized: real,
                difference: real - expected,
            })
        })
        .collect()
}
