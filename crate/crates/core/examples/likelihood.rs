//! Exact Gaussian log-likelihood of a simulated series evaluated on a grid
//! of AR coefficients; the maximum sits near the simulating value.
//!
//! ```bash
//! cargo run --release --example likelihood
//! ```

use sarima_impact::sarima::{log_likelihood, simulate, SarimaOrder, SarimaParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let order: SarimaOrder = "(1,0,0)x(0,0,1,4)".parse()?;
    let truth = SarimaParams {
        phi: vec![0.7],
        seasonal_theta: vec![0.4],
        ..SarimaParams::zeros(&order, 0.5)
    };
    let y = simulate(&order, &truth, 400, 11)?;
    let diffed = y.difference(order.difference_spec())?;

    println!("{:>6} {:>14}", "phi", "log-likelihood");
    let mut best = (f64::NAN, f64::NEG_INFINITY);
    for i in 0..=18 {
        let phi = -0.9 + 0.1 * f64::from(i);
        let params = SarimaParams {
            phi: vec![phi],
            ..truth.clone()
        };
        let ll = log_likelihood(&order, &params, &diffed)?;
        if ll > best.1 {
            best = (phi, ll);
        }
        println!("{phi:>6.2} {ll:>14.3}");
    }
    println!("grid maximum at phi = {:.2} (simulated with 0.70)", best.0);
    Ok(())
}
