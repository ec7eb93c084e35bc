//! Residual checks: ARCH-LM and Ljung-Box on a well-specified fit, on a
//! misspecified fit, and on volatility-clustered noise.
//!
//! ```bash
//! cargo run --release --example diagnostics
//! ```

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use sarima_impact::diagnostics::{arch_lm, ljung_box, ljung_box_adjusted};
use sarima_impact::sarima::{fit, simulate, FitConfig, SarimaOrder, SarimaParams};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let truth: SarimaOrder = "(2,0,0)x(0,0,0,4)".parse()?;
    let params = SarimaParams {
        phi: vec![0.5, 0.3],
        ..SarimaParams::zeros(&truth, 1.0)
    };
    let y = simulate(&truth, &params, 200, 3)?;
    for text in ["(2,0,0)x(0,0,0,4)", "(0,0,0)x(0,0,0,4)"] {
        let order: SarimaOrder = text.parse()?;
        let model = fit(&y, &order, &FitConfig::default())?;
        let arch = arch_lm(&model.residuals, 4)?;
        let lb = ljung_box(&model.residuals, 8)?;
        let lb_adj = ljung_box_adjusted(&model.residuals, 8, order.coefficient_count())?;
        println!("fit {order}");
        println!(
            "  ARCH-LM(4)   stat {:>8.3}  p {:.4}",
            arch.statistic, arch.p_value
        );
        println!(
            "  Ljung-Box(8) stat {:>8.3}  p {:.4}  df {}",
            lb.statistic, lb.p_value, lb.df
        );
        println!(
            "  adjusted     stat {:>8.3}  p {:.4}  df {}",
            lb_adj.statistic, lb_adj.p_value, lb_adj.df
        );
    }

    // ARCH(1) noise: uncorrelated, but its squares are not
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let mut e = Vec::with_capacity(300);
    let mut prev: f64 = 0.0;
    for _ in 0..300 {
        let z: f64 = StandardNormal.sample(&mut rng);
        prev = z * (0.2 + 0.7 * prev * prev).sqrt();
        e.push(prev);
    }
    let arch = arch_lm(&e, 4)?;
    let lb = ljung_box(&e, 8)?;
    println!("ARCH(1) noise");
    println!(
        "  ARCH-LM(4)   stat {:>8.3}  p {:.4}",
        arch.statistic, arch.p_value
    );
    println!(
        "  Ljung-Box(8) stat {:>8.3}  p {:.4}",
        lb.statistic, lb.p_value
    );
    Ok(())
}
