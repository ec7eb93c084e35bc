//! AIC grid search over the default candidate space on a simulated
//! quarterly series of 31 observations.
//!
//! ```bash
//! cargo run --release --example grid_search
//! ```

use std::time::Instant;

use sarima_impact::sarima::{simulate, FitConfig, SarimaOrder, SarimaParams};
use sarima_impact::selection::{grid_search, SearchGrid};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth = SarimaOrder::new((1, 0, 0), (0, 1, 0), 4)?;
    let params = SarimaParams {
        phi: vec![0.6],
        mu: 0.0,
        ..SarimaParams::zeros(&truth, 0.004)
    };
    let mut series = simulate(&truth, &params, 31, 2024)?;
    // shift onto a realistic log-level
    let shifted: Vec<f64> = series.values().iter().map(|v| v + 12.0).collect();
    series = sarima_impact::series::QuarterlySeries::new(series.start(), shifted, series.scale())?;

    let grid = SearchGrid::default();
    let started = Instant::now();
    let result = grid_search(&series, &grid, &FitConfig::default())?;
    println!(
        "{} candidates fitted, {} skipped in {:.2?}",
        result.ranked.len(),
        result.skipped.len(),
        started.elapsed()
    );
    println!(
        "true order {truth}, rank {:?}",
        result.rank_of(&truth).map(|r| r + 1)
    );
    println!(
        "{:<22} {:>10} {:>4} {:>9}",
        "order", "AIC", "k", "converged"
    );
    for c in result.ranked.iter().take(10) {
        println!(
            "{:<22} {:>10.2} {:>4} {:>9}",
            c.order.to_string(),
            c.aic,
            c.parameter_count,
            c.converged
        );
    }
    println!(
        "winner {} phi = {:?}",
        result.best.order, result.best.params.phi
    );
    Ok(())
}
