//! Quarter calendar, log transform, seasonal differencing, its inverse, and
//! growth rates on a short hand-made series.
//!
//! ```bash
//! cargo run --example transforms
//! ```

use sarima_impact::series::{integrate, DifferenceSpec, QuarterIndex, QuarterlySeries};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let start: QuarterIndex = "2018Q1".parse()?;
    let level = QuarterlySeries::level(
        start,
        vec![
            100.0, 120.0, 110.0, 140.0, 105.0, 126.0, 118.0, 150.0, 112.0, 130.0,
        ],
    )?;
    println!(
        "{} quarters from {} to {}",
        level.len(),
        level.start(),
        level.end()
    );

    let log = level.log_transform()?;
    let spec = DifferenceSpec::new(1, 1, 4)?;
    let diffed = log.difference(spec)?;
    println!(
        "(1-L)(1-L^4) log y: {} values from {}, polynomial {:?}",
        diffed.len(),
        diffed.start(),
        spec.polynomial()
    );

    let anchors = &log.values()[..spec.span()];
    let back = integrate(&diffed, anchors, spec)?.exp_transform()?;
    let worst = back
        .values()
        .iter()
        .zip(level.values())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    println!("integrate(difference(x)) recovers the levels, max error {worst:.2e}");

    let yoy = level.growth_rate(4)?;
    let qoq = level.growth_rate(1)?;
    println!("{:<8} {:>8} {:>8}", "quarter", "p.y. %", "p.q. %");
    for (i, q) in level.quarters().enumerate().skip(4) {
        println!("{q:<8} {:>8.2} {:>8.2}", yoy[i - 4], qoq[i - 1]);
    }
    Ok(())
}
