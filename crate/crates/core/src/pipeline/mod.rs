//! End-to-end analysis: ingest, select, diagnose, forecast, measure impact.
//!
//! [`run_pipeline`] processes every (class, activity) series independently
//! (in parallel), then merges the results in dataset order so the output is
//! identical from run to run. [`write_outputs`] renders the result as one
//! CSV file per table plus a plain-text report.

mod config;
mod dataset;
mod report;
mod synthetic;

use std::collections::BTreeMap;
use std::path::Path;

use rayon::prelude::*;

pub use config::{RunConfig, KEYS};
pub use dataset::{ingest, parse_dataset, ClassSeries, Dataset, Summary, HEADER};
pub use report::{
    read_forecast_tables, render_impact_tables, render_report, render_tables, write_outputs,
};
pub use synthetic::{synthetic_dataset, SyntheticSpec};

use crate::diagnostics::{arch_lm, ljung_box, ljung_box_adjusted, TestResult};
use crate::error::{Error, Result};
use crate::forecast::{forecast, holdout_compare, Forecast, HoldoutRow};
use crate::impact::{
    growth_at, nominal_impact, structural_shares, total_relative_error, Activity, Growth,
    ImpactRow, NominalImpact, ShareTable,
};
use crate::sarima::{fit, FittedModel, SarimaOrder};
use crate::selection::grid_search;
use crate::series::{QuarterIndex, QuarterlySeries};

/// Label used for aggregate rows.
pub const TOTAL: &str = "TOTAL";

/// Orders fixed per (class, activity) instead of searched.
pub type FixedOrders = BTreeMap<(String, Activity), SarimaOrder>;

/// Reads a `class,activity,order` CSV of fixed orders.
pub fn load_orders(path: impl AsRef<Path>) -> Result<FixedOrders> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_orders(file)
}

/// Parses a `class,activity,order` CSV of fixed orders.
pub fn parse_orders(reader: impl std::io::Read) -> Result<FixedOrders> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let mut out = FixedOrders::new();
    for (i, record) in rdr.records().enumerate() {
        let record = record.map_err(|e| Error::Ingest(e.to_string()))?;
        let err = |what: String| Error::Ingest(format!("orders line {}: {what}", i + 2));
        if record.len() != 3 {
            return Err(err(format!("expected 3 fields, found {}", record.len())));
        }
        let activity: Activity = record[1].parse().map_err(|e: Error| err(e.to_string()))?;
        let order: SarimaOrder = record[2].parse().map_err(|e: Error| err(e.to_string()))?;
        if out
            .insert((record[0].to_string(), activity), order)
            .is_some()
        {
            return Err(err(format!(
                "duplicate entry for {} {activity}",
                &record[0]
            )));
        }
    }
    Ok(out)
}

/// Size of the order search behind a selected model.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SearchSummary {
    pub fitted: usize,
    pub converged: usize,
    pub skipped: usize,
}

/// Everything computed for one (class, activity) series.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesResult {
    pub class_name: String,
    pub activity: Activity,
    pub model: FittedModel,
    /// `None` when the order was fixed rather than searched.
    pub search: Option<SearchSummary>,
    pub arch: TestResult,
    pub ljung_box: TestResult,
    pub forecast: Forecast,
    pub holdout: Vec<HoldoutRow>,
}

/// A series the pipeline could not process.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesFailure {
    pub class_name: String,
    pub activity: Activity,
    pub message: String,
}

/// Growth of each class (and the total) in one holdout quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct DescriptiveTable {
    pub quarter: QuarterIndex,
    /// `(class, gcp, gwp)`, dataset order, then [`TOTAL`].
    pub rows: Vec<(String, Growth, Growth)>,
}

/// Interval forecast and realized value of one class in one quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct ForecastRow {
    pub class_name: String,
    pub activity: Activity,
    pub quarter: QuarterIndex,
    pub lower: f64,
    pub expected: f64,
    pub upper: f64,
    pub realized: f64,
}

/// Aggregate row of an activity and quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct TotalRow {
    pub row: ImpactRow,
    pub lower: f64,
    pub upper: f64,
    /// Relative error of the totals, a ratio of sums.
    pub relative_error_pct: f64,
}

/// Impact measures derived from per-class forecast rows.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactSummary {
    /// Quarters covered, ascending.
    pub quarters: Vec<QuarterIndex>,
    /// Classes in first-seen order.
    pub classes: Vec<String>,
    pub rows: Vec<ForecastRow>,
    /// One per input row, same order.
    pub impact: Vec<ImpactRow>,
    /// One per activity and quarter.
    pub totals: Vec<TotalRow>,
    pub shares: Vec<ShareTable>,
    pub nominal: NominalImpact,
}

impl ImpactSummary {
    pub fn total(&self, activity: Activity, quarter: QuarterIndex) -> Option<&TotalRow> {
        self.totals
            .iter()
            .find(|t| t.row.activity == activity && t.row.quarter == quarter)
    }

    pub fn rows_for(&self, activity: Activity, quarter: QuarterIndex) -> Vec<&ImpactRow> {
        self.impact
            .iter()
            .filter(|r| r.activity == activity && r.quarter == quarter)
            .collect()
    }

    pub fn row(
        &self,
        class: &str,
        activity: Activity,
        quarter: QuarterIndex,
    ) -> Option<&ImpactRow> {
        self.impact
            .iter()
            .find(|r| r.class_name == class && r.activity == activity && r.quarter == quarter)
    }
}

/// Relative errors, totals, shares, and nominal shortfalls of `rows`.
pub fn summarize_impact(rows: Vec<ForecastRow>, mkd_per_eur: f64) -> Result<ImpactSummary> {
    let impact = rows
        .iter()
        .map(|r| {
            ImpactRow::new(
                r.class_name.clone(),
                r.activity,
                r.quarter,
                r.expected,
                r.realized,
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let mut quarters: Vec<QuarterIndex> = rows.iter().map(|r| r.quarter).collect();
    quarters.sort();
    quarters.dedup();
    let mut classes: Vec<String> = Vec::new();
    for r in &rows {
        if !classes.contains(&r.class_name) {
            classes.push(r.class_name.clone());
        }
    }

    let mut totals = Vec::new();
    let mut shares = Vec::new();
    let mut by_activity: [Vec<ImpactRow>; 2] = [Vec::new(), Vec::new()];
    for (slot, activity) in Activity::ALL.into_iter().enumerate() {
        for &quarter in &quarters {
            let group: Vec<(&ForecastRow, &ImpactRow)> = rows
                .iter()
                .zip(&impact)
                .filter(|(r, _)| r.activity == activity && r.quarter == quarter)
                .collect();
            if group.is_empty() {
                continue;
            }
            let sum = |f: fn(&ForecastRow) -> f64| group.iter().map(|(r, _)| f(r)).sum::<f64>();
            let group_rows: Vec<ImpactRow> = group.iter().map(|(_, i)| (*i).clone()).collect();
            totals.push(TotalRow {
                row: ImpactRow::new(
                    TOTAL,
                    activity,
                    quarter,
                    sum(|r| r.expected),
                    sum(|r| r.realized),
                )?,
                lower: sum(|r| r.lower),
                upper: sum(|r| r.upper),
                relative_error_pct: total_relative_error(&group_rows)?,
            });
            shares.push(structural_shares(&group_rows)?);
            by_activity[slot].extend(group_rows);
        }
    }
    if by_activity.iter().any(|rows| rows.is_empty()) {
        return Err(Error::InvalidArgument(
            "impact needs forecasts for both GCP and GWP".into(),
        ));
    }
    let nominal = nominal_impact(&by_activity[0], &by_activity[1], mkd_per_eur)?;
    Ok(ImpactSummary {
        quarters,
        classes,
        rows,
        impact,
        totals,
        shares,
        nominal,
    })
}

/// Full result of a pipeline run.
#[derive(Debug, Clone, PartialEq)]
pub struct PipelineOutput {
    pub config: RunConfig,
    pub estimation_start: QuarterIndex,
    pub estimation_end: QuarterIndex,
    pub holdout: Vec<QuarterIndex>,
    pub classes: Vec<String>,
    /// Per-class mean and standard deviation over the estimation window.
    pub summary: Vec<(String, Summary, Summary)>,
    pub descriptive: Vec<DescriptiveTable>,
    /// Successful series: activity-major, dataset order within an activity.
    pub series: Vec<SeriesResult>,
    pub failures: Vec<SeriesFailure>,
    /// Impact measures over every successful series and holdout quarter.
    pub impact: ImpactSummary,
}

impl PipelineOutput {
    pub fn result(&self, class: &str, activity: Activity) -> Option<&SeriesResult> {
        self.series
            .iter()
            .find(|s| s.class_name == class && s.activity == activity)
    }
}

/// Log transform with the configured offset (none when the offset is zero).
pub fn log_scale(series: &QuarterlySeries, offset: f64) -> Result<QuarterlySeries> {
    if offset > 0.0 {
        series.log_transform_with_offset(offset)
    } else {
        series.log_transform()
    }
}

/// ARCH-LM and Ljung-Box tests on a fitted model's standardized residuals.
pub fn diagnose(model: &FittedModel, config: &RunConfig) -> Result<(TestResult, TestResult)> {
    let arch = arch_lm(&model.residuals, config.arch_lags)?;
    let lb = if config.ljung_box_adjusted {
        ljung_box_adjusted(
            &model.residuals,
            config.ljung_box_lags,
            model.order.coefficient_count(),
        )?
    } else {
        ljung_box(&model.residuals, config.ljung_box_lags)?
    };
    Ok((arch, lb))
}

/// Forecast of every holdout quarter, optionally conditioning each step on
/// the realized values before it.
fn holdout_forecast(
    model: &FittedModel,
    history: &QuarterlySeries,
    realized: &QuarterlySeries,
    config: &RunConfig,
) -> Result<Forecast> {
    let h = realized.len();
    if !config.condition_on_realized || h == 1 {
        return forecast(model, history, h, config.alpha, config.back_transform);
    }
    let realized_log = log_scale(realized, config.log_offset)?;
    let mut steps: Option<Forecast> = None;
    for i in 0..h {
        let extended = if i == 0 {
            history.clone()
        } else {
            history.concat(
                &realized_log.window(realized.start(), realized.start().offset(i as i64 - 1))?,
            )?
        };
        let one = forecast(model, &extended, 1, config.alpha, config.back_transform)?;
        steps = Some(match steps {
            None => one,
            Some(mut acc) => {
                acc.mean_log.extend(one.mean_log);
                acc.var_log.extend(one.var_log);
                acc.expected_level.extend(one.expected_level);
                acc.lower_level.extend(one.lower_level);
                acc.upper_level.extend(one.upper_level);
                acc
            }
        });
    }
    Ok(steps.expect("holdout is nonempty"))
}

/// Runs selection, diagnostics, and forecasting for one series.
pub fn analyze_series(
    class_name: &str,
    activity: Activity,
    series: &QuarterlySeries,
    config: &RunConfig,
    fixed: Option<SarimaOrder>,
) -> Result<SeriesResult> {
    let estimation = series.window(series.start(), config.estimation_end)?;
    if estimation.end() != config.estimation_end {
        return Err(Error::Misaligned {
            expected: config.estimation_end,
            actual: estimation.end(),
        });
    }
    if series.end() <= config.estimation_end {
        return Err(Error::InvalidArgument(format!(
            "no holdout quarters after {}",
            config.estimation_end
        )));
    }
    let realized = series.window(config.estimation_end.succ(), series.end())?;
    let history = log_scale(&estimation, config.log_offset)?;
    let fit_config = config.fit_config();

    let (model, search) = match fixed {
        Some(order) => {
            let model = fit(&history, &order, &fit_config)?;
            if !model.converged {
                return Err(Error::NotConverged);
            }
            (model, None)
        }
        None => {
            let sel = grid_search(&history, &config.grid, &fit_config)?;
            let search = SearchSummary {
                fitted: sel.ranked.len(),
                converged: sel.ranked.iter().filter(|c| c.converged).count(),
                skipped: sel.skipped.len(),
            };
            (sel.best, Some(search))
        }
    };
    let (arch, ljung_box) = diagnose(&model, config)?;
    let forecast = holdout_forecast(&model, &history, &realized, config)?;
    let holdout = holdout_compare(&forecast, &realized)?;
    Ok(SeriesResult {
        class_name: class_name.to_string(),
        activity,
        model,
        search,
        arch,
        ljung_box,
        forecast,
        holdout,
    })
}

/// Runs the full analysis on `dataset`.
pub fn run_pipeline(dataset: &Dataset, config: &RunConfig) -> Result<PipelineOutput> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Ingest("dataset is empty".into()));
    }
    let fixed = match &config.orders_file {
        Some(path) => load_orders(path)?,
        None => FixedOrders::new(),
    };
    run_pipeline_with_orders(dataset, config, &fixed)
}

/// [`run_pipeline`] with fixed orders supplied directly.
pub fn run_pipeline_with_orders(
    dataset: &Dataset,
    config: &RunConfig,
    fixed: &FixedOrders,
) -> Result<PipelineOutput> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::Ingest("dataset is empty".into()));
    }
    let estimation_start = dataset.start();
    let estimation_end = config.estimation_end;
    if estimation_end < estimation_start || estimation_end >= dataset.end() {
        return Err(Error::Config(format!(
            "estimation_end {estimation_end} must lie in {estimation_start}..{} and leave a holdout",
            dataset.end()
        )));
    }
    let holdout: Vec<QuarterIndex> = (1..=dataset.end().quarters_since(estimation_end))
        .map(|i| estimation_end.offset(i))
        .collect();
    let classes: Vec<String> = dataset.classes().iter().map(|c| c.name.clone()).collect();

    // A zero base quarter leaves growth undefined; report it as NA rather than
    // failing the whole run.
    let growth = |series: &QuarterlySeries, quarter| match growth_at(series, quarter) {
        Err(Error::ZeroRealized) => Ok(Growth {
            vs_previous_year: f64::NAN,
            vs_previous_quarter: f64::NAN,
        }),
        other => other,
    };
    let summary = dataset.summary(estimation_start, estimation_end)?;
    let totals_level = [dataset.total(Activity::Gcp)?, dataset.total(Activity::Gwp)?];
    let descriptive = holdout
        .iter()
        .map(|&quarter| {
            let mut rows = dataset
                .classes()
                .iter()
                .map(|c| {
                    Ok((
                        c.name.clone(),
                        growth(&c.gcp, quarter)?,
                        growth(&c.gwp, quarter)?,
                    ))
                })
                .collect::<Result<Vec<_>>>()?;
            rows.push((
                TOTAL.to_string(),
                growth(&totals_level[0], quarter)?,
                growth(&totals_level[1], quarter)?,
            ));
            Ok(DescriptiveTable { quarter, rows })
        })
        .collect::<Result<Vec<_>>>()?;

    let jobs: Vec<(&ClassSeries, Activity)> = Activity::ALL
        .iter()
        .flat_map(|&a| dataset.classes().iter().map(move |c| (c, a)))
        .collect();
    let outcomes: Vec<Result<SeriesResult>> = jobs
        .par_iter()
        .map(|(c, a)| {
            let order = fixed.get(&(c.name.clone(), *a)).copied();
            analyze_series(&c.name, *a, c.get(*a), config, order)
        })
        .collect();

    let mut series = Vec::new();
    let mut failures = Vec::new();
    for ((c, a), outcome) in jobs.iter().zip(outcomes) {
        match outcome {
            Ok(r) => series.push(r),
            Err(e) if config.continue_on_error => failures.push(SeriesFailure {
                class_name: c.name.clone(),
                activity: *a,
                message: e.to_string(),
            }),
            Err(e) => {
                return Err(Error::Series {
                    class: c.name.clone(),
                    activity: a.to_string(),
                    source: Box::new(e),
                })
            }
        }
    }

    let mut rows = Vec::new();
    for r in &series {
        for h in &r.holdout {
            let (lower, expected, upper) = r
                .forecast
                .level_at(h.quarter)
                .expect("holdout lies in the horizon");
            rows.push(ForecastRow {
                class_name: r.class_name.clone(),
                activity: r.activity,
                quarter: h.quarter,
                lower,
                expected,
                upper,
                realized: h.realized,
            });
        }
    }
    let impact = summarize_impact(rows, config.mkd_per_eur)?;

    Ok(PipelineOutput {
        config: config.clone(),
        estimation_start,
        estimation_end,
        holdout,
        classes,
        summary,
        descriptive,
        series,
        failures,
        impact,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::selection::SearchGrid;

    fn small_config() -> RunConfig {
        RunConfig {
            grid: SearchGrid {
                p: 0..=1,
                d: vec![0],
                q: 0..=1,
                seasonal_p: 0..=0,
                seasonal_d: vec![1],
                seasonal_q: 0..=0,
                ..SearchGrid::default()
            },
            ..RunConfig::default()
        }
    }

    fn panel(classes: usize) -> Dataset {
        synthetic_dataset(&SyntheticSpec {
            classes,
            ..SyntheticSpec::default()
        })
        .unwrap()
    }

    #[test]
    fn end_to_end_on_a_small_panel() {
        let data = panel(3);
        let config = small_config();
        let out = run_pipeline(&data, &config).unwrap();
        assert_eq!(out.series.len(), 6);
        assert!(out.failures.is_empty());
        assert_eq!(out.holdout.len(), 2);
        assert_eq!(out.descriptive.len(), 2);
        assert_eq!(out.descriptive[0].rows.len(), 4);
        assert_eq!(out.impact.impact.len(), 12);
        assert_eq!(out.impact.totals.len(), 4);
        for r in &out.impact.impact {
            let direct = 100.0 * (r.expected - r.realized) / r.realized;
            assert!((r.relative_error_pct - direct).abs() < 1e-9);
        }
        for t in &out.impact.totals {
            let rows = out.impact.rows_for(t.row.activity, t.row.quarter);
            let e: f64 = rows.iter().map(|r| r.expected).sum();
            let r: f64 = rows.iter().map(|r| r.realized).sum();
            assert!((t.relative_error_pct - 100.0 * (e - r) / r).abs() < 1e-9);
            assert!(t.lower < t.row.expected && t.row.expected < t.upper);
        }
        // a 15% shock means forecasts should mostly exceed the realized values
        let above = out
            .impact
            .impact
            .iter()
            .filter(|r| r.expected > r.realized)
            .count();
        assert!(above >= 8, "{above}");
        let again = run_pipeline(&data, &config).unwrap();
        assert_eq!(render_tables(&out).unwrap(), render_tables(&again).unwrap());
    }

    #[test]
    fn fixed_orders_skip_the_search() {
        let data = panel(2);
        let order: SarimaOrder = "(1,0,0)x(0,1,0,4)".parse().unwrap();
        let mut fixed = FixedOrders::new();
        for c in data.classes() {
            for a in Activity::ALL {
                fixed.insert((c.name.clone(), a), order);
            }
        }
        let out = run_pipeline_with_orders(&data, &small_config(), &fixed).unwrap();
        assert!(out
            .series
            .iter()
            .all(|r| r.search.is_none() && r.model.order == order));
    }

    #[test]
    fn conditioning_changes_only_later_quarters() {
        // an autoregressive term makes the second step depend on the first
        let data = panel(2);
        let order: SarimaOrder = "(1,0,0)x(0,1,0,4)".parse().unwrap();
        let fixed: FixedOrders = data
            .classes()
            .iter()
            .flat_map(|c| Activity::ALL.map(|a| ((c.name.clone(), a), order)))
            .collect();
        let plain = run_pipeline_with_orders(&data, &small_config(), &fixed).unwrap();
        let config = RunConfig {
            condition_on_realized: true,
            ..small_config()
        };
        let cond = run_pipeline_with_orders(&data, &config, &fixed).unwrap();
        for (a, b) in plain.series.iter().zip(&cond.series) {
            assert_eq!(a.forecast.expected_level[0], b.forecast.expected_level[0]);
            assert_ne!(a.forecast.expected_level[1], b.forecast.expected_level[1]);
            assert!(b.forecast.var_log[1] < a.forecast.var_log[1]);
        }
    }

    #[test]
    fn failures_abort_unless_continuing() {
        let mut data = panel(2);
        let bad = ClassSeries {
            name: "Broken".into(),
            gcp: QuarterlySeries::level(data.start(), vec![0.0; data.len()]).unwrap(),
            gwp: data.classes()[0].gwp.clone(),
        };
        let mut classes = data.classes().to_vec();
        classes.push(bad);
        data = Dataset::new(classes).unwrap();
        let err = run_pipeline(&data, &small_config())
            .unwrap_err()
            .to_string();
        assert!(err.contains("Broken") && err.contains("GCP"), "{err}");
        let config = RunConfig {
            continue_on_error: true,
            ..small_config()
        };
        let out = run_pipeline(&data, &config).unwrap();
        assert_eq!(out.failures.len(), 1);
        assert_eq!(out.series.len(), 5);
        assert!(render_report(&out).contains("FAILED SERIES"));
    }

    #[test]
    fn tables_round_trip_through_impact_reader() {
        let data = panel(3);
        let out = run_pipeline(&data, &small_config()).unwrap();
        let dir = tempfile::tempdir().unwrap();
        let written = write_outputs(&out, dir.path()).unwrap();
        assert!(written.iter().any(|p| p.ends_with("table_impact.csv")));
        let rows = read_forecast_tables(dir.path()).unwrap();
        assert_eq!(rows.len(), out.impact.rows.len());
        let again = summarize_impact(rows, out.config.mkd_per_eur).unwrap();
        let want = render_impact_tables(&out.impact).unwrap();
        let got = render_impact_tables(&again).unwrap();
        let pick = |files: &[(String, String)], name: &str| {
            files.iter().find(|f| f.0 == name).unwrap().1.clone()
        };
        // values were rounded to cents on disk, so percentages agree at two decimals
        assert_eq!(
            pick(&want, "table_impact.csv"),
            pick(&got, "table_impact.csv")
        );
    }

    #[test]
    fn orders_file_parses() {
        let text = "class,activity,order\n\"Property, other\",gwp,\"(0,1,2)x(2,1,0,4)\"\n";
        let orders = parse_orders(text.as_bytes()).unwrap();
        let o = orders[&("Property, other".to_string(), Activity::Gwp)];
        assert_eq!(o.to_string(), "(0,1,2)x(2,1,0,4)");
        assert!(parse_orders("class,activity,order\nA,gcp,(1,0,0)\n".as_bytes()).is_err());
    }
}
