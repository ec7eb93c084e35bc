//! Fits a seasonal model to a simulated log series, forecasts eight
//! quarters ahead, and compares median and mean back-transforms.
//!
//! ```bash
//! cargo run --release --example forecast_intervals
//! ```

use sarima_impact::forecast::{forecast, BackTransform};
use sarima_impact::sarima::{fit, simulate, FitConfig, SarimaOrder, SarimaParams};
use sarima_impact::series::QuarterlySeries;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let order: SarimaOrder = "(1,0,0)x(0,1,0,4)".parse()?;
    let truth = SarimaParams {
        phi: vec![0.6],
        ..SarimaParams::zeros(&order, 0.004)
    };
    let sim = simulate(&order, &truth, 31, 17)?;
    let shifted: Vec<f64> = sim.values().iter().map(|v| v + 11.0).collect();
    let history = QuarterlySeries::new(sim.start(), shifted, sim.scale())?;
    let model = fit(&history, &order, &FitConfig::default())?;
    println!(
        "fitted {order}: phi {:.3}, sigma2 {:.5}",
        model.params.phi[0], model.params.sigma2
    );

    let median = forecast(&model, &history, 8, 0.05, BackTransform::Median)?;
    let mean = forecast(&model, &history, 8, 0.05, BackTransform::Mean)?;
    let narrow = forecast(&model, &history, 8, 0.32, BackTransform::Median)?;
    println!(
        "{:<8} {:>12} {:>12} {:>12} {:>12} {:>12} {:>12}",
        "quarter", "lower95", "lower68", "median", "mean", "upper68", "upper95"
    );
    for (i, q) in median.quarters().enumerate() {
        println!(
            "{q:<8} {:>12.0} {:>12.0} {:>12.0} {:>12.0} {:>12.0} {:>12.0}",
            median.lower_level[i],
            narrow.lower_level[i],
            median.expected_level[i],
            mean.expected_level[i],
            narrow.upper_level[i],
            median.upper_level[i],
        );
    }
    println!("log-scale forecast sd grows with the horizon:");
    let sd: Vec<String> = median
        .var_log
        .iter()
        .map(|v| format!("{:.4}", v.sqrt()))
        .collect();
    println!("  {}", sd.join(" "));
    Ok(())
}
