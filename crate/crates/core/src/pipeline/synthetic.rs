//! Seeded synthetic panels with the shape of a quarterly activity dataset.
//!
//! Each series is a simulated seasonal ARIMA path on log scale around a
//! class-specific level; the holdout quarters are scaled by a shock factor so
//! the counterfactual forecasts have a known gap to find.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::Result;
use crate::sarima::{simulate, SarimaOrder, SarimaParams};
use crate::series::{QuarterIndex, QuarterlySeries};

use super::dataset::{ClassSeries, Dataset};

/// Shape of a synthetic panel.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticSpec {
    pub classes: usize,
    pub start: QuarterIndex,
    /// Observations per series, holdout included.
    pub len: usize,
    /// Trailing quarters multiplied by `shock`.
    pub holdout: usize,
    /// Multiplier applied to holdout values (0.85 = 15% below trend).
    pub shock: f64,
    pub seed: u64,
}

impl Default for SyntheticSpec {
    fn default() -> Self {
        Self {
            classes: 11,
            start: QuarterIndex::new(2012, 2).expect("valid quarter"),
            len: 33,
            holdout: 2,
            shock: 0.85,
            seed: 2020,
        }
    }
}

fn draw_series(rng: &mut ChaCha8Rng, spec: &SyntheticSpec) -> Result<Vec<f64>> {
    let order = match rng.random_range(0..3) {
        0 => SarimaOrder::new((1, 0, 0), (0, 1, 0), 4)?,
        1 => SarimaOrder::new((0, 1, 1), (0, 1, 0), 4)?,
        _ => SarimaOrder::new((1, 0, 0), (1, 1, 0), 4)?,
    };
    let mut params = SarimaParams::zeros(&order, rng.random_range(0.001..0.02));
    params.phi = (0..order.p).map(|_| rng.random_range(0.2..0.8)).collect();
    params.theta = (0..order.q).map(|_| rng.random_range(-0.6..0.3)).collect();
    params.seasonal_phi = (0..order.seasonal_p)
        .map(|_| rng.random_range(-0.5..0.3))
        .collect();
    let path = simulate(&order, &params, spec.len, rng.random())?;
    let level: f64 = rng.random_range(8.0..14.0);
    let drift: f64 = rng.random_range(0.0..0.02);
    // seasonal profile of activity within a year
    let profile: Vec<f64> = (0..4).map(|_| rng.random_range(-0.3..0.3)).collect();
    let start_q = spec.start.quarter() as usize - 1;
    Ok(path
        .values()
        .iter()
        .enumerate()
        .map(|(t, x)| {
            let mut v = (level + drift * t as f64 + profile[(start_q + t) % 4] + x).exp();
            if t + spec.holdout >= spec.len {
                v *= spec.shock;
            }
            v.round().max(1.0)
        })
        .collect())
}

/// Generates a panel of `spec.classes` classes named `Class 01`, `Class 02`, ...
pub fn synthetic_dataset(spec: &SyntheticSpec) -> Result<Dataset> {
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let classes = (0..spec.classes)
        .map(|i| {
            let gcp = draw_series(&mut rng, spec)?;
            let gwp = draw_series(&mut rng, spec)?;
            Ok(ClassSeries {
                name: format!("Class {:02}", i + 1),
                gcp: QuarterlySeries::level(spec.start, gcp)?,
                gwp: QuarterlySeries::level(spec.start, gwp)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Dataset::new(classes)
}
