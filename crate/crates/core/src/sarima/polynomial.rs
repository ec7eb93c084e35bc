use crate::error::Result;
use crate::series::multiply;

use super::order::{SarimaOrder, SarimaParams};

/// Expanded lag polynomials of a multiplicative seasonal model.
///
/// `ar[j-1]` is the recurrence coefficient on lag `j` of the stationary
/// variable; `ma[j-1]` the coefficient on `eps_{t-j}`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReducedForm {
    pub ar: Vec<f64>,
    pub ma: Vec<f64>,
}

/// `1 - sum c_i L^{i*stride}` as a dense coefficient vector.
fn lag_poly(coeffs: &[f64], stride: usize, sign: f64) -> Vec<f64> {
    let mut out = vec![0.0; coeffs.len() * stride + 1];
    out[0] = 1.0;
    for (i, &c) in coeffs.iter().enumerate() {
        out[(i + 1) * stride] = sign * c;
    }
    out
}

/// Multiplies the nonseasonal and seasonal polynomials.
pub fn expand_polynomials(order: &SarimaOrder, params: &SarimaParams) -> Result<ReducedForm> {
    params.check_dims(order)?;
    let ar = multiply(
        &lag_poly(&params.phi, 1, -1.0),
        &lag_poly(&params.seasonal_phi, order.period, -1.0),
    );
    let ma = multiply(
        &lag_poly(&params.theta, 1, 1.0),
        &lag_poly(&params.seasonal_theta, order.period, 1.0),
    );
    Ok(ReducedForm {
        ar: ar[1..].iter().map(|c| -c).collect(),
        ma: ma[1..].to_vec(),
    })
}
