//! Simulates seasonal ARIMA paths and recovers their parameters by maximum
//! likelihood.
//!
//! ```bash
//! cargo run --release --example fit_simulated
//! ```

use sarima_impact::sarima::{fit, simulate, FitConfig, SarimaOrder, SarimaParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let cases = [
        ("(1,0,0)x(0,1,0,4)", vec![0.6], vec![], vec![], vec![]),
        ("(0,1,1)x(0,1,1,4)", vec![], vec![-0.4], vec![], vec![-0.5]),
        ("(1,0,0)x(1,1,0,4)", vec![0.5], vec![], vec![-0.3], vec![]),
    ];
    for (text, phi, theta, seasonal_phi, seasonal_theta) in cases {
        let order: SarimaOrder = text.parse()?;
        let truth = SarimaParams {
            phi,
            theta,
            seasonal_phi,
            seasonal_theta,
            ..SarimaParams::zeros(&order, 0.01)
        };
        let y = simulate(&order, &truth, 300, 5)?;
        let model = fit(&y, &order, &FitConfig::default())?;
        println!(
            "{order}  n = {}  converged = {}",
            model.n_used, model.converged
        );
        let pairs = [
            ("ar", &truth.phi, &model.params.phi),
            ("ma", &truth.theta, &model.params.theta),
            ("sar", &truth.seasonal_phi, &model.params.seasonal_phi),
            ("sma", &truth.seasonal_theta, &model.params.seasonal_theta),
        ];
        for (name, t, e) in pairs {
            for (i, (t, e)) in t.iter().zip(e.iter()).enumerate() {
                println!("  {name}{}: true {t:+.3}  estimated {e:+.3}", i + 1);
            }
        }
        println!(
            "  sigma2: true {:.4}  estimated {:.4}  loglik {:.2}  aic {:.2}",
            truth.sigma2, model.params.sigma2, model.loglik, model.aic
        );
    }
    Ok(())
}
