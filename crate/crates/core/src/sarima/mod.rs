//! Seasonal ARIMA specification, exact likelihood and estimation.

mod fit;
mod kalman;
mod order;
mod polynomial;
mod simulate;
mod state_space;
pub mod transform;

pub use fit::{fit, FitConfig, FittedModel};
pub use kalman::{log_likelihood, standardized_residuals};
pub(crate) use kalman::{predict_state, run_filter};
pub use order::{SarimaOrder, SarimaParams};
pub use polynomial::{expand_polynomials, ReducedForm};
pub use simulate::simulate;
pub use state_space::{state_space, StateSpaceSystem};
