//! Seasonal ARIMA counterfactual-impact engine for quarterly activity data.
//!
//! The crate fits per-series seasonal ARIMA models on log-transformed
//! quarterly values, selects orders by AIC, checks residuals, forecasts a
//! counterfactual baseline with prediction intervals, and measures the
//! gap between expected and realized values.
//!
//! | Module | Purpose |
//! |--------|---------|
//! | [`series`] | quarter calendar, log transform, differencing, growth rates |
//! | [`sarima`] | lag polynomials, state space, Kalman likelihood, fitting, simulation |
//! | [`selection`] | AIC grid search |
//! | [`diagnostics`] | ARCH-LM and Ljung-Box tests |
//! | [`forecast`] | h-step forecasts with level-scale intervals |
//! | [`impact`] | relative errors, nominal shortfalls, shares |
//! | [`pipeline`] | CSV ingestion, configuration, full report |

// `!(x > 0.0)` is used on purpose so that NaN fails the check.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod diagnostics;
pub mod error;
pub mod forecast;
pub mod impact;
mod linalg;
pub mod optim;
pub mod pipeline;
pub mod sarima;
pub mod selection;
pub mod series;
pub mod stats;

pub use error::{Error, Result};
