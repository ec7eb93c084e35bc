//! Command-line front end: ingest checks, single-series fits, order search,
//! forecasts, impact tables, and the full report.
//!
//! Every configuration key can be set in a `key = value` file passed with
//! `--config` and overridden by a flag of the same name (`--estimation-end
//! 2019Q4` or `--estimation_end 2019Q4`).

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Arg, ArgMatches, Args, Command, FromArgMatches, Parser, Subcommand};

use sarima_impact::forecast::{forecast, holdout_compare};
use sarima_impact::impact::Activity;
use sarima_impact::pipeline::{
    diagnose, ingest, log_scale, read_forecast_tables, render_impact_tables, render_report,
    run_pipeline, summarize_impact, write_outputs, Dataset, RunConfig, KEYS,
};
use sarima_impact::sarima::{fit, FittedModel, SarimaOrder};
use sarima_impact::selection::grid_search;
use sarima_impact::series::QuarterlySeries;
use sarima_impact::{Error, Result};

#[derive(Parser, Debug)]
#[command(
    name = "sarima-impact",
    version,
    about = "Seasonal ARIMA counterfactual impact analysis"
)]
struct Cli {
    /// Configuration file of `key = value` lines
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Args, Debug)]
struct SeriesArgs {
    /// Dataset CSV (class,quarter,gcp,gwp)
    data: PathBuf,
    /// Class name as it appears in the dataset
    #[arg(long)]
    class: String,
    /// gcp or gwp
    #[arg(long)]
    activity: Activity,
}

#[derive(Subcommand, Debug)]
enum Cmd {
    /// Validate a dataset and print its shape and summary statistics
    IngestCheck { data: PathBuf },
    /// Fit one order to one series over the estimation window
    Fit {
        #[command(flatten)]
        series: SeriesArgs,
        /// Order such as (1,0,0)x(0,1,0,4)
        #[arg(long)]
        order: SarimaOrder,
    },
    /// Search the order grid for one series, or for every series
    Select {
        data: PathBuf,
        #[arg(long, requires = "activity")]
        class: Option<String>,
        #[arg(long)]
        activity: Option<Activity>,
        /// Number of ranked candidates to print per series
        #[arg(long, default_value_t = 5)]
        top: usize,
    },
    /// Forecast one series past the estimation window
    Forecast {
        #[command(flatten)]
        series: SeriesArgs,
        /// Fixed order; searched over the grid when omitted
        #[arg(long)]
        order: Option<SarimaOrder>,
        /// Quarters ahead; defaults to the quarters after the estimation window
        #[arg(long)]
        horizon: Option<usize>,
    },
    /// Build impact, share, and nominal tables from forecast tables
    Impact {
        /// Directory holding table_forecast_<activity>_q<i>.csv files
        forecasts: PathBuf,
        /// Write the tables here instead of printing them
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the full analysis and write every table and the text report
    Report {
        data: PathBuf,
        /// Print the report without writing files
        #[arg(long)]
        dry_run: bool,
    },
}

fn key_args() -> Vec<Arg> {
    KEYS.iter()
        .map(|(key, help)| {
            Arg::new(*key)
                .long(key.replace('_', "-"))
                .alias(*key)
                .value_name("VALUE")
                .help(*help)
                .global(true)
                .help_heading("Configuration")
        })
        .collect()
}

fn load_config(path: Option<&Path>, matches: &ArgMatches) -> Result<RunConfig> {
    let mut config = match path {
        Some(p) => RunConfig::from_file(p)?,
        None => RunConfig::default(),
    };
    // global args are visible on the subcommand's matches
    let sub = matches.subcommand().map(|(_, m)| m).unwrap_or(matches);
    for (key, _) in KEYS {
        if let Some(value) = sub.get_one::<String>(key) {
            config.set(key, value)?;
        }
    }
    config.validate()?;
    Ok(config)
}

fn estimation_history(
    data: &Dataset,
    args: &SeriesArgs,
    config: &RunConfig,
) -> Result<(QuarterlySeries, QuarterlySeries)> {
    let class = data
        .class(&args.class)
        .ok_or_else(|| Error::InvalidArgument(format!("no class named {:?}", args.class)))?;
    let series = class.get(args.activity);
    let window = series.window(series.start(), config.estimation_end)?;
    Ok((log_scale(&window, config.log_offset)?, series.clone()))
}

fn print_model(model: &FittedModel, config: &RunConfig) -> Result<()> {
    let p = &model.params;
    println!("order        {}", model.order);
    println!("observations {}", model.n_used);
    println!("loglik       {:.4}", model.loglik);
    println!("aic          {:.4}", model.aic);
    println!(
        "converged    {} ({} iterations)",
        model.converged, model.iterations
    );
    for (name, v) in [
        ("ar", &p.phi),
        ("ma", &p.theta),
        ("sar", &p.seasonal_phi),
        ("sma", &p.seasonal_theta),
    ] {
        for (i, c) in v.iter().enumerate() {
            println!("{name}{:<11}{c:.6}", i + 1);
        }
    }
    if model.intercept {
        println!("mean         {:.6}", p.mu);
    }
    println!("sigma2       {:.6e}", p.sigma2);
    let (arch, lb) = diagnose(model, config)?;
    println!(
        "arch_lm      stat {:.4}  p {:.4}  lags {}",
        arch.statistic, arch.p_value, arch.lags
    );
    println!(
        "ljung_box    stat {:.4}  p {:.4}  lags {}  df {}",
        lb.statistic, lb.p_value, lb.lags, lb.df
    );
    Ok(())
}

fn ingest_check(path: &Path, config: &RunConfig) -> Result<()> {
    let data = ingest(path)?;
    println!(
        "{}: {} classes, {} quarters ({} to {}), {} series",
        path.display(),
        data.classes().len(),
        data.len(),
        data.start(),
        data.end(),
        data.series_count()
    );
    let to = config.estimation_end.min(data.end());
    println!(
        "{:<32} {:>14} {:>14} {:>14} {:>14}",
        "class", "gcp_mean", "gcp_sd", "gwp_mean", "gwp_sd"
    );
    for (name, gcp, gwp) in data.summary(data.start(), to)? {
        println!(
            "{name:<32} {:>14.2} {:>14.2} {:>14.2} {:>14.2}",
            gcp.mean, gcp.std_dev, gwp.mean, gwp.std_dev
        );
    }
    Ok(())
}

fn select(
    data: &Dataset,
    class: Option<&str>,
    activity: Option<Activity>,
    top: usize,
    config: &RunConfig,
) -> Result<()> {
    let activities: Vec<Activity> = activity
        .map(|a| vec![a])
        .unwrap_or_else(|| Activity::ALL.to_vec());
    for a in activities {
        for c in data
            .classes()
            .iter()
            .filter(|c| class.is_none_or(|n| n == c.name))
        {
            let args = SeriesArgs {
                data: PathBuf::new(),
                class: c.name.clone(),
                activity: a,
            };
            let (history, _) = estimation_history(data, &args, config)?;
            let sel = grid_search(&history, &config.grid, &config.fit_config())?;
            println!(
                "{} {}: {} fitted, {} skipped",
                c.name,
                a,
                sel.ranked.len(),
                sel.skipped.len()
            );
            for (rank, cand) in sel.ranked.iter().take(top).enumerate() {
                println!(
                    "  {:>2}. {:<20} aic {:>10.4}  loglik {:>10.4}  k {}",
                    rank + 1,
                    cand.order.to_string(),
                    cand.aic,
                    cand.loglik,
                    cand.parameter_count
                );
            }
        }
    }
    Ok(())
}

fn run_forecast(
    args: &SeriesArgs,
    order: Option<SarimaOrder>,
    horizon: Option<usize>,
    config: &RunConfig,
) -> Result<()> {
    let data = ingest(&args.data)?;
    let (history, full) = estimation_history(&data, args, config)?;
    let model = match order {
        Some(o) => fit(&history, &o, &config.fit_config())?,
        None => grid_search(&history, &config.grid, &config.fit_config())?.best,
    };
    let available = full.end().quarters_since(config.estimation_end).max(0) as usize;
    let h = horizon.unwrap_or(available);
    if h == 0 {
        return Err(Error::InvalidArgument(
            "no quarters after the estimation window; pass --horizon".into(),
        ));
    }
    let fc = forecast(&model, &history, h, config.alpha, config.back_transform)?;
    println!("{} {} {}", args.class, args.activity, model.order);
    println!("quarter,lower,expected,upper,real,difference");
    let realized = if available > 0 {
        Some(full.window(config.estimation_end.succ(), full.end())?)
    } else {
        None
    };
    let compared = match &realized {
        Some(r) => holdout_compare(&fc, r)?,
        None => Vec::new(),
    };
    for (i, q) in fc.quarters().enumerate() {
        let row = compared.iter().find(|r| r.quarter == q);
        println!(
            "{q},{:.2},{:.2},{:.2},{},{}",
            fc.lower_level[i],
            fc.expected_level[i],
            fc.upper_level[i],
            row.map(|r| format!("{:.2}", r.realized))
                .unwrap_or_default(),
            row.map(|r| format!("{:.2}", r.difference))
                .unwrap_or_default(),
        );
    }
    Ok(())
}

fn impact(dir: &Path, out: Option<&Path>, config: &RunConfig) -> Result<()> {
    let summary = summarize_impact(read_forecast_tables(dir)?, config.mkd_per_eur)?;
    let files = render_impact_tables(&summary)?;
    match out {
        Some(out) => {
            std::fs::create_dir_all(out)
                .map_err(|e| Error::Io(format!("{}: {e}", out.display())))?;
            for (name, text) in files
                .iter()
                .filter(|(n, _)| !n.starts_with("table_forecast_"))
            {
                let path = out.join(name);
                std::fs::write(&path, text)
                    .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
                println!("wrote {}", path.display());
            }
        }
        None => {
            for (name, text) in files
                .iter()
                .filter(|(n, _)| !n.starts_with("table_forecast_"))
            {
                println!("== {name}\n{text}");
            }
        }
    }
    Ok(())
}

fn run(cli: Cli, matches: &ArgMatches) -> Result<()> {
    let config = load_config(cli.config.as_deref(), matches)?;
    match cli.command {
        Cmd::IngestCheck { data } => ingest_check(&data, &config),
        Cmd::Fit { series, order } => {
            let data = ingest(&series.data)?;
            let (history, _) = estimation_history(&data, &series, &config)?;
            let model = fit(&history, &order, &config.fit_config())?;
            println!("{} {}", series.class, series.activity);
            print_model(&model, &config)
        }
        Cmd::Select {
            data,
            class,
            activity,
            top,
        } => select(&ingest(&data)?, class.as_deref(), activity, top, &config),
        Cmd::Forecast {
            series,
            order,
            horizon,
        } => run_forecast(&series, order, horizon, &config),
        Cmd::Impact { forecasts, out } => impact(&forecasts, out.as_deref(), &config),
        Cmd::Report { data, dry_run } => {
            let out = run_pipeline(&ingest(&data)?, &config)?;
            if !dry_run {
                for path in write_outputs(&out, &config.output_dir)? {
                    eprintln!("wrote {}", path.display());
                }
            }
            print!("{}", render_report(&out));
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    let matches = Cli::augment_args(Command::new("sarima-impact"))
        .args(key_args())
        .get_matches();
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(cli) => cli,
        Err(e) => e.exit(),
    };
    match run(cli, &matches) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
