//! Rebuilds relative errors, structural shares, and the nominal shortfall
//! from the published forecast tables shipped in `data/published`.
//!
//! ```bash
//! cargo run --example impact_from_published
//! ```

use std::path::Path;

use sarima_impact::impact::{Activity, DEFAULT_MKD_PER_EUR};
use sarima_impact::pipeline::{read_forecast_tables, summarize_impact, TOTAL};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let dir = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/published");
    let summary = summarize_impact(read_forecast_tables(&dir)?, DEFAULT_MKD_PER_EUR)?;

    println!("relative error of the forecast against realized values, %");
    print!("{:<32}", "class");
    for a in Activity::ALL {
        for q in &summary.quarters {
            print!(" {:>12}", format!("{a} {q}"));
        }
    }
    println!();
    let mut names = summary.classes.clone();
    names.push(TOTAL.to_string());
    for name in &names {
        print!("{name:<32}");
        for a in Activity::ALL {
            for &q in &summary.quarters {
                let value = if name == TOTAL {
                    summary.total(a, q).map(|t| t.relative_error_pct)
                } else {
                    summary.row(name, a, q).map(|r| r.relative_error_pct)
                };
                print!(" {:>12.2}", value.unwrap_or(f64::NAN));
            }
        }
        println!();
    }

    let n = &summary.nominal;
    println!("\nnominal shortfall at {} MKD per EUR", n.mkd_per_eur);
    // inputs are thousand MKD, so converted amounts are thousand EUR
    for (label, eur) in [("GCP", n.gcp_eur), ("GWP", n.gwp_eur), ("net", n.net_eur)] {
        println!("  {label} {:>6.2} million EUR", eur / 1000.0);
    }
    println!("  {}", sarima_impact::impact::NominalImpact::NET_FORMULA);

    let first = &summary.shares[0];
    println!(
        "\nshare shifts in {} {}, percentage points",
        first.activity, first.quarter
    );
    for r in &first.rows {
        println!("  {:<32} {:+.2}", r.class_name, r.delta_pp);
    }
    Ok(())
}
