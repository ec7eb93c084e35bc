//! Table and report rendering.
//!
//! Every table is a CSV file with a fixed column order. Percentages are
//! rendered with two decimals, level values with two decimals, shares with
//! six; internal values are never rounded.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::impact::{Activity, NominalImpact};
use crate::series::parse_quarter;

use super::{ForecastRow, ImpactSummary, PipelineOutput, TOTAL};

/// Fixed-point rendering without a negative zero.
fn fixed(x: f64, digits: usize) -> String {
    if !x.is_finite() {
        return "NA".to_string();
    }
    let s = format!("{x:.digits$}");
    if s.starts_with('-') && s[1..].chars().all(|c| c == '0' || c == '.') {
        s[1..].to_string()
    } else {
        s
    }
}

fn pct(x: f64) -> String {
    fixed(x, 2)
}

fn level(x: f64) -> String {
    fixed(x, 2)
}

fn csv_table(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::WriterBuilder::new()
        .terminator(csv::Terminator::Any(b'\n'))
        .from_writer(Vec::new());
    let err = |e: csv::Error| Error::Io(e.to_string());
    w.write_record(header).map_err(err)?;
    for r in rows {
        w.write_record(r).map_err(err)?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Io(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Io(e.to_string()))
}

/// All tables as `(file name, contents)`, in a fixed order.
pub fn render_tables(out: &PipelineOutput) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();

    let rows: Vec<Vec<String>> = out
        .summary
        .iter()
        .map(|(name, gcp, gwp)| {
            vec![
                name.clone(),
                level(gcp.mean),
                level(gcp.std_dev),
                level(gwp.mean),
                level(gwp.std_dev),
            ]
        })
        .collect();
    files.push((
        "table_summary.csv".to_string(),
        csv_table(
            &["class", "gcp_mean", "gcp_sd", "gwp_mean", "gwp_sd"],
            &rows,
        )?,
    ));

    for (i, table) in out.descriptive.iter().enumerate() {
        let rows: Vec<Vec<String>> = table
            .rows
            .iter()
            .map(|(name, gcp, gwp)| {
                vec![
                    name.clone(),
                    table.quarter.to_string(),
                    pct(gcp.vs_previous_year),
                    pct(gcp.vs_previous_quarter),
                    pct(gwp.vs_previous_year),
                    pct(gwp.vs_previous_quarter),
                ]
            })
            .collect();
        files.push((
            format!("table_descriptive_q{}.csv", i + 1),
            csv_table(
                &["class", "quarter", "gcp_py", "gcp_pq", "gwp_py", "gwp_pq"],
                &rows,
            )?,
        ));
    }

    for activity in Activity::ALL {
        let rows: Vec<Vec<String>> = out
            .series
            .iter()
            .filter(|r| r.activity == activity)
            .map(|r| {
                let m = &r.model;
                vec![
                    r.class_name.clone(),
                    m.order.to_string(),
                    fixed(m.aic, 4),
                    fixed(m.loglik, 4),
                    m.parameter_count().to_string(),
                    format!("{:.6e}", m.params.sigma2),
                    fixed(r.arch.statistic, 4),
                    fixed(r.arch.p_value, 4),
                    fixed(r.ljung_box.statistic, 4),
                    fixed(r.ljung_box.p_value, 4),
                    r.search.map_or("fixed".into(), |s| s.fitted.to_string()),
                    r.search.map_or("0".into(), |s| s.skipped.to_string()),
                ]
            })
            .collect();
        files.push((
            format!("table_models_{}.csv", activity.lower()),
            csv_table(
                &[
                    "class",
                    "order",
                    "aic",
                    "loglik",
                    "parameters",
                    "sigma2",
                    "arch_lm_stat",
                    "arch_lm_p",
                    "ljung_box_stat",
                    "ljung_box_p",
                    "candidates_fitted",
                    "candidates_skipped",
                ],
                &rows,
            )?,
        ));
    }

    files.extend(render_impact_tables(&out.impact)?);

    let mut rows = Vec::new();
    for r in &out.series {
        let p = &r.model.params;
        let mut push = |name: String, value: f64| {
            rows.push(vec![
                r.class_name.clone(),
                r.activity.to_string(),
                name,
                format!("{value:.10e}"),
            ])
        };
        for (prefix, values) in [
            ("ar", &p.phi),
            ("ma", &p.theta),
            ("seasonal_ar", &p.seasonal_phi),
            ("seasonal_ma", &p.seasonal_theta),
        ] {
            for (j, v) in values.iter().enumerate() {
                push(format!("{prefix}{}", j + 1), *v);
            }
        }
        if r.model.intercept {
            push("mu".into(), p.mu);
        }
        push("sigma2".into(), p.sigma2);
    }
    files.push((
        "table_parameters.csv".to_string(),
        csv_table(&["class", "activity", "parameter", "value"], &rows)?,
    ));

    Ok(files)
}

/// Forecast, impact, share, and nominal tables of an impact summary.
pub fn render_impact_tables(summary: &ImpactSummary) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    for activity in Activity::ALL {
        for (i, &quarter) in summary.quarters.iter().enumerate() {
            let mut rows: Vec<Vec<String>> = Vec::new();
            for r in summary
                .rows
                .iter()
                .filter(|r| r.activity == activity && r.quarter == quarter)
            {
                rows.push(vec![
                    r.class_name.clone(),
                    quarter.to_string(),
                    level(r.lower),
                    level(r.expected),
                    level(r.upper),
                    level(r.realized),
                    level(r.realized - r.expected),
                ]);
            }
            if rows.is_empty() {
                continue;
            }
            if let Some(t) = summary.total(activity, quarter) {
                rows.push(vec![
                    TOTAL.to_string(),
                    quarter.to_string(),
                    level(t.lower),
                    level(t.row.expected),
                    level(t.upper),
                    level(t.row.realized),
                    level(t.row.difference),
                ]);
            }
            files.push((
                format!("table_forecast_{}_q{}.csv", activity.lower(), i + 1),
                csv_table(
                    &[
                        "class",
                        "quarter",
                        "lower",
                        "expected",
                        "upper",
                        "real",
                        "difference",
                    ],
                    &rows,
                )?,
            ));
        }
    }

    let mut header = vec!["class".to_string()];
    for activity in Activity::ALL {
        for i in 0..summary.quarters.len() {
            header.push(format!("{}_q{}", activity.lower(), i + 1));
        }
    }
    let mut rows: Vec<Vec<String>> = summary
        .classes
        .iter()
        .map(|name| {
            let mut row = vec![name.clone()];
            for activity in Activity::ALL {
                for &quarter in &summary.quarters {
                    let cell = summary
                        .row(name, activity, quarter)
                        .map_or(String::new(), |r| pct(r.relative_error_pct));
                    row.push(cell);
                }
            }
            row
        })
        .collect();
    let mut total_row = vec![TOTAL.to_string()];
    for activity in Activity::ALL {
        for &quarter in &summary.quarters {
            total_row.push(
                summary
                    .total(activity, quarter)
                    .map_or(String::new(), |t| pct(t.relative_error_pct)),
            );
        }
    }
    rows.push(total_row);
    let header_refs: Vec<&str> = header.iter().map(String::as_str).collect();
    files.push((
        "table_impact.csv".to_string(),
        csv_table(&header_refs, &rows)?,
    ));

    let mut rows = Vec::new();
    for table in &summary.shares {
        for r in &table.rows {
            rows.push(vec![
                table.activity.to_string(),
                table.quarter.to_string(),
                r.class_name.clone(),
                fixed(r.expected_share, 6),
                fixed(r.realized_share, 6),
                pct(r.delta_pp),
            ]);
        }
    }
    files.push((
        "table_shares.csv".to_string(),
        csv_table(
            &[
                "activity",
                "quarter",
                "class",
                "expected_share",
                "realized_share",
                "delta_pp",
            ],
            &rows,
        )?,
    ));

    files.push((
        "table_nominal.csv".to_string(),
        nominal_table(&summary.nominal)?,
    ));
    Ok(files)
}

/// Reads every `table_forecast_<activity>_q<i>.csv` in `dir`, skipping total rows.
pub fn read_forecast_tables(dir: impl AsRef<Path>) -> Result<Vec<ForecastRow>> {
    let dir = dir.as_ref();
    let mut names: Vec<(Activity, usize, PathBuf)> = Vec::new();
    let entries =
        std::fs::read_dir(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    for entry in entries {
        let path = entry?.path();
        let Some(name) = path.file_name().and_then(|n| n.to_str()) else {
            continue;
        };
        let Some(rest) = name
            .strip_prefix("table_forecast_")
            .and_then(|r| r.strip_suffix(".csv"))
        else {
            continue;
        };
        let Some((activity, step)) = rest.split_once("_q") else {
            continue;
        };
        let (Ok(activity), Ok(step)) = (activity.parse::<Activity>(), step.parse::<usize>()) else {
            continue;
        };
        names.push((activity, step, path));
    }
    if names.is_empty() {
        return Err(Error::Ingest(format!(
            "no table_forecast_*.csv files in {}",
            dir.display()
        )));
    }
    names.sort();
    let mut rows = Vec::new();
    for (activity, _, path) in names {
        let file = std::fs::File::open(&path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut rdr = csv::ReaderBuilder::new()
            .trim(csv::Trim::All)
            .from_reader(file);
        let header: Vec<String> = rdr
            .headers()
            .map_err(|e| Error::Ingest(e.to_string()))?
            .iter()
            .map(str::to_string)
            .collect();
        let col = |name: &str| {
            header
                .iter()
                .position(|h| h == name)
                .ok_or_else(|| Error::Ingest(format!("{}: missing column {name}", path.display())))
        };
        let (c_class, c_quarter, c_lower, c_expected, c_upper, c_real) = (
            col("class")?,
            col("quarter")?,
            col("lower")?,
            col("expected")?,
            col("upper")?,
            col("real")?,
        );
        for (i, record) in rdr.records().enumerate() {
            let record = record.map_err(|e| Error::Ingest(e.to_string()))?;
            let at =
                |what: String| Error::Ingest(format!("{} line {}: {what}", path.display(), i + 2));
            if &record[c_class] == TOTAL {
                continue;
            }
            let num = |c: usize| {
                record[c]
                    .parse::<f64>()
                    .map_err(|_| at(format!("{:?} is not a number", &record[c])))
            };
            rows.push(ForecastRow {
                class_name: record[c_class].to_string(),
                activity,
                quarter: parse_quarter(&record[c_quarter]).map_err(|e| at(e.to_string()))?,
                lower: num(c_lower)?,
                expected: num(c_expected)?,
                upper: num(c_upper)?,
                realized: num(c_real)?,
            });
        }
    }
    Ok(rows)
}

fn nominal_table(n: &NominalImpact) -> Result<String> {
    let million = |x: f64| fixed(x / 1000.0, 4);
    let mut rows: Vec<Vec<String>> = n
        .shortfalls
        .iter()
        .map(|s| {
            vec![
                "shortfall".to_string(),
                s.activity.to_string(),
                s.quarter.to_string(),
                level(s.expected),
                level(s.realized),
                level(s.shortfall_mkd),
                million(s.shortfall_eur),
            ]
        })
        .collect();
    for (item, activity, eur) in [
        ("activity_total", "GCP", n.gcp_eur),
        ("activity_total", "GWP", n.gwp_eur),
        ("gross", "GCP+GWP", n.gross_eur),
        ("net", "GWP-GCP", n.net_eur),
    ] {
        rows.push(vec![
            item.to_string(),
            activity.to_string(),
            String::new(),
            String::new(),
            String::new(),
            level(eur * n.mkd_per_eur),
            million(eur),
        ]);
    }
    csv_table(
        &[
            "item",
            "activity",
            "quarter",
            "expected",
            "realized",
            "shortfall_thousand_mkd",
            "shortfall_million_eur",
        ],
        &rows,
    )
}

/// Human-readable summary of a run.
pub fn render_report(out: &PipelineOutput) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "Seasonal ARIMA counterfactual impact report");
    let _ = writeln!(s, "============================================");
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Estimation window: {}..{} ({} quarters); holdout: {}",
        out.estimation_start,
        out.estimation_end,
        out.estimation_end.quarters_since(out.estimation_start) + 1,
        out.holdout
            .iter()
            .map(|q| q.to_string())
            .collect::<Vec<_>>()
            .join(", ")
    );
    let _ = writeln!(
        s,
        "Classes: {}; series analyzed: {}; failed: {}",
        out.classes.len(),
        out.series.len(),
        out.failures.len()
    );
    let c = &out.config;
    let _ = writeln!(
        s,
        "Intervals: {:.0}% (alpha = {}); point forecast: {}; diagnostics: ARCH-LM {} lags, Ljung-Box {} lags{}",
        100.0 * (1.0 - c.alpha),
        c.alpha,
        match c.back_transform {
            crate::forecast::BackTransform::Median => "exp(mean) (lognormal median)",
            crate::forecast::BackTransform::Mean => "exp(mean + var/2) (lognormal mean)",
        },
        c.arch_lags,
        c.ljung_box_lags,
        if c.ljung_box_adjusted { " (df adjusted)" } else { "" }
    );
    let _ = writeln!(
        s,
        "Later holdout quarters are forecast {}.",
        if c.condition_on_realized {
            "one step ahead from realized earlier quarters"
        } else {
            "from the estimation window only"
        }
    );

    if !out.failures.is_empty() {
        let _ = writeln!(s);
        let _ = writeln!(s, "FAILED SERIES (omitted from totals):");
        for f in &out.failures {
            let _ = writeln!(s, "  {} / {}: {}", f.class_name, f.activity, f.message);
        }
    }

    for activity in Activity::ALL {
        let _ = writeln!(s);
        let _ = writeln!(s, "Selected {activity} models");
        let _ = writeln!(
            s,
            "  {:<32} {:<20} {:>9} {:>9} {:>9}",
            "class", "order", "AIC", "ARCH p", "LB p"
        );
        for r in out.series.iter().filter(|r| r.activity == activity) {
            let _ = writeln!(
                s,
                "  {:<32} {:<20} {:>9.2} {:>9.2} {:>9.2}",
                r.class_name,
                r.model.order.to_string(),
                r.model.aic,
                r.arch.p_value,
                r.ljung_box.p_value
            );
        }
    }

    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Relative error of expected versus realized, 100 (expected - realized) / realized"
    );
    for t in &out.impact.totals {
        let _ = writeln!(
            s,
            "  {} {}: expected {:.0}, realized {:.0}, difference {:.0}, relative error {}%",
            t.row.activity,
            t.row.quarter,
            t.row.expected,
            t.row.realized,
            t.row.difference,
            pct(t.relative_error_pct)
        );
    }

    let n = &out.impact.nominal;
    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Nominal shortfalls at {} MKD per EUR (expected - realized)",
        n.mkd_per_eur
    );
    for sf in &n.shortfalls {
        let _ = writeln!(
            s,
            "  {} {}: {:.0} thousand MKD = {:.2} million EUR",
            sf.activity,
            sf.quarter,
            sf.shortfall_mkd,
            sf.shortfall_eur / 1000.0
        );
    }
    let _ = writeln!(
        s,
        "  gross (all four shortfalls added): {:.2} million EUR",
        n.gross_eur / 1000.0
    );
    let _ = writeln!(
        s,
        "  net industry loss: {:.2} million EUR",
        n.net_eur / 1000.0
    );
    let _ = writeln!(s, "  net formula: {}", NominalImpact::NET_FORMULA);

    let _ = writeln!(s);
    let _ = writeln!(
        s,
        "Share changes, realized minus expected share (percentage points)"
    );
    for table in &out.impact.shares {
        if let Some(top) = table
            .rows
            .iter()
            .max_by(|a, b| a.expected_share.total_cmp(&b.expected_share))
        {
            let _ = writeln!(
                s,
                "  {} {}: largest class {} expected {:.1}%, realized {:.1}%, change {} pp",
                table.activity,
                table.quarter,
                top.class_name,
                100.0 * top.expected_share,
                100.0 * top.realized_share,
                pct(top.delta_pp)
            );
        }
    }
    s
}

/// Writes every table, `report.txt`, and `config.txt` into `dir`.
///
/// Everything is rendered before the first file is written, so a rendering
/// error leaves no partial output.
pub fn write_outputs(out: &PipelineOutput, dir: impl AsRef<Path>) -> Result<Vec<PathBuf>> {
    let dir = dir.as_ref();
    let mut files = render_tables(out)?;
    files.push(("report.txt".to_string(), render_report(out)));
    files.push(("config.txt".to_string(), out.config.to_text()));
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))?;
    let mut written = Vec::with_capacity(files.len());
    for (name, contents) in files {
        let path = dir.join(name);
        std::fs::write(&path, contents)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        written.push(path);
    }
    Ok(written)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fixed_point_has_no_negative_zero() {
        assert_eq!(fixed(-0.001, 2), "0.00");
        assert_eq!(fixed(-0.005001, 2), "-0.01");
        assert_eq!(fixed(76.7649, 2), "76.76");
        assert_eq!(fixed(f64::NAN, 2), "NA");
    }

    #[test]
    fn csv_quotes_commas() {
        let t = csv_table(&["a", "b"], &[vec!["Property, other".into(), "1".into()]]).unwrap();
        assert_eq!(t, "a,b\n\"Property, other\",1\n");
    }
}
