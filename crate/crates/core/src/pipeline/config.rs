//! Run configuration and its plain-text `key = value` format.
//!
//! Blank lines and everything after `#` are ignored. Every key can also be
//! set programmatically with [`RunConfig::set`], which is what command-line
//! overrides use.

use std::fmt::Write as _;
use std::ops::RangeInclusive;
use std::path::{Path, PathBuf};

use crate::error::{Error, Result};
use crate::forecast::BackTransform;
use crate::impact::DEFAULT_MKD_PER_EUR;
use crate::sarima::FitConfig;
use crate::selection::SearchGrid;
use crate::series::{parse_quarter, QuarterIndex};

/// Configuration keys with a one-line description each, in file order.
pub const KEYS: [(&str, &str); 21] = [
    ("p_range", "nonseasonal AR orders searched, `lo..hi`"),
    (
        "d_choices",
        "nonseasonal differencing orders searched, comma list",
    ),
    ("q_range", "nonseasonal MA orders searched, `lo..hi`"),
    ("seasonal_p_range", "seasonal AR orders searched, `lo..hi`"),
    (
        "seasonal_d_choices",
        "seasonal differencing orders searched, comma list",
    ),
    ("seasonal_q_range", "seasonal MA orders searched, `lo..hi`"),
    ("period", "seasonal period in quarters"),
    (
        "max_params_ratio",
        "skip candidates with more than n/ratio parameters",
    ),
    (
        "intercept",
        "auto (only without differencing), true or false",
    ),
    (
        "alpha",
        "tail mass outside prediction intervals (0.05 for 95%)",
    ),
    (
        "back_transform",
        "median = exp(mean), mean = exp(mean + var/2)",
    ),
    ("arch_lags", "lags in the ARCH-LM auxiliary regression"),
    ("ljung_box_lags", "lags in the Ljung-Box statistic"),
    (
        "ljung_box_adjusted",
        "subtract fitted ARMA coefficients from Ljung-Box df",
    ),
    ("mkd_per_eur", "exchange rate for nominal amounts"),
    (
        "estimation_end",
        "last quarter used for fitting; later quarters are the holdout",
    ),
    (
        "log_offset",
        "constant added before taking logs (0 disables)",
    ),
    (
        "condition_on_realized",
        "forecast later holdout quarters from realized earlier ones",
    ),
    (
        "continue_on_error",
        "omit failing series instead of aborting",
    ),
    (
        "orders_file",
        "CSV `class,activity,order` fixing orders instead of searching",
    ),
    ("output_dir", "directory receiving the tables and report"),
];

/// Everything a pipeline run needs besides the data.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub grid: SearchGrid,
    pub intercept: Option<bool>,
    pub alpha: f64,
    pub back_transform: BackTransform,
    pub arch_lags: usize,
    pub ljung_box_lags: usize,
    pub ljung_box_adjusted: bool,
    pub mkd_per_eur: f64,
    pub estimation_end: QuarterIndex,
    pub log_offset: f64,
    pub condition_on_realized: bool,
    pub continue_on_error: bool,
    pub orders_file: Option<PathBuf>,
    pub output_dir: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            grid: SearchGrid::default(),
            intercept: None,
            alpha: 0.05,
            back_transform: BackTransform::Median,
            arch_lags: 4,
            ljung_box_lags: 8,
            ljung_box_adjusted: false,
            mkd_per_eur: DEFAULT_MKD_PER_EUR,
            estimation_end: QuarterIndex::new(2019, 4).expect("valid quarter"),
            log_offset: 0.0,
            condition_on_realized: false,
            continue_on_error: false,
            orders_file: None,
            output_dir: PathBuf::from("results"),
        }
    }
}

fn bad(key: &str, value: &str, what: &str) -> Error {
    Error::Config(format!("{key} = {value:?}: {what}"))
}

fn parse_usize(key: &str, value: &str) -> Result<usize> {
    value
        .parse()
        .map_err(|_| bad(key, value, "expected a nonnegative integer"))
}

fn parse_f64(key: &str, value: &str) -> Result<f64> {
    value
        .parse::<f64>()
        .ok()
        .filter(|v| v.is_finite())
        .ok_or_else(|| bad(key, value, "expected a number"))
}

fn parse_bool(key: &str, value: &str) -> Result<bool> {
    match value.to_ascii_lowercase().as_str() {
        "true" | "yes" | "on" | "1" => Ok(true),
        "false" | "no" | "off" | "0" => Ok(false),
        _ => Err(bad(key, value, "expected true or false")),
    }
}

fn parse_range(key: &str, value: &str) -> Result<RangeInclusive<usize>> {
    let (lo, hi) = match value.split_once("..") {
        Some((lo, hi)) => (lo.trim(), hi.trim().trim_start_matches('=')),
        None => (value, value),
    };
    let lo = parse_usize(key, lo)?;
    let hi = parse_usize(key, hi)?;
    if lo > hi {
        return Err(bad(key, value, "empty range"));
    }
    Ok(lo..=hi)
}

fn parse_list(key: &str, value: &str) -> Result<Vec<usize>> {
    let mut out = value
        .split(',')
        .map(|v| parse_usize(key, v.trim()))
        .collect::<Result<Vec<_>>>()?;
    out.sort_unstable();
    out.dedup();
    Ok(out)
}

fn show_range(r: &RangeInclusive<usize>) -> String {
    format!("{}..{}", r.start(), r.end())
}

fn show_list(v: &[usize]) -> String {
    v.iter()
        .map(|x| x.to_string())
        .collect::<Vec<_>>()
        .join(",")
}

impl RunConfig {
    /// Reads a configuration file on top of the defaults.
    pub fn from_file(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        let mut config = Self::default();
        config.apply_text(&text)?;
        Ok(config)
    }

    /// Applies every `key = value` line of `text`.
    pub fn apply_text(&mut self, text: &str) -> Result<()> {
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::Config(format!(
                    "line {}: expected `key = value`, got {raw:?}",
                    i + 1
                ))
            })?;
            self.set(key.trim(), value.trim())
                .map_err(|e| Error::Config(format!("line {}: {e}", i + 1)))?;
        }
        self.validate()
    }

    /// Sets one key from its textual value.
    pub fn set(&mut self, key: &str, value: &str) -> Result<()> {
        let value = value.trim();
        match key {
            "p_range" => self.grid.p = parse_range(key, value)?,
            "d_choices" => self.grid.d = parse_list(key, value)?,
            "q_range" => self.grid.q = parse_range(key, value)?,
            "seasonal_p_range" => self.grid.seasonal_p = parse_range(key, value)?,
            "seasonal_d_choices" => self.grid.seasonal_d = parse_list(key, value)?,
            "seasonal_q_range" => self.grid.seasonal_q = parse_range(key, value)?,
            "period" => self.grid.period = parse_usize(key, value)?,
            "max_params_ratio" => self.grid.max_params_ratio = parse_f64(key, value)?,
            "intercept" => {
                self.intercept = match value.to_ascii_lowercase().as_str() {
                    "auto" => None,
                    _ => Some(parse_bool(key, value)?),
                }
            }
            "alpha" => self.alpha = parse_f64(key, value)?,
            "back_transform" => {
                self.back_transform = value
                    .parse()
                    .map_err(|_| bad(key, value, "expected median or mean"))?
            }
            "arch_lags" => self.arch_lags = parse_usize(key, value)?,
            "ljung_box_lags" => self.ljung_box_lags = parse_usize(key, value)?,
            "ljung_box_adjusted" => self.ljung_box_adjusted = parse_bool(key, value)?,
            "mkd_per_eur" => self.mkd_per_eur = parse_f64(key, value)?,
            "estimation_end" => {
                self.estimation_end =
                    parse_quarter(value).map_err(|e| bad(key, value, &e.to_string()))?
            }
            "log_offset" => self.log_offset = parse_f64(key, value)?,
            "condition_on_realized" => self.condition_on_realized = parse_bool(key, value)?,
            "continue_on_error" => self.continue_on_error = parse_bool(key, value)?,
            "orders_file" => self.orders_file = (!value.is_empty()).then(|| PathBuf::from(value)),
            "output_dir" => self.output_dir = PathBuf::from(value),
            _ => return Err(Error::Config(format!("unknown key {key:?}"))),
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::Config(format!(
                "alpha must lie in (0, 1), got {}",
                self.alpha
            )));
        }
        if !(self.mkd_per_eur > 0.0) {
            return Err(Error::Config("mkd_per_eur must be positive".into()));
        }
        if !(self.max_ratio_ok()) {
            return Err(Error::Config("max_params_ratio must be positive".into()));
        }
        if self.arch_lags == 0 || self.ljung_box_lags == 0 {
            return Err(Error::Config("diagnostic lags must be at least 1".into()));
        }
        if self.log_offset < 0.0 {
            return Err(Error::Config("log_offset must be nonnegative".into()));
        }
        self.grid
            .validate()
            .map_err(|e| Error::Config(e.to_string()))
    }

    fn max_ratio_ok(&self) -> bool {
        self.grid.max_params_ratio > 0.0
    }

    /// Estimation settings derived from this configuration.
    pub fn fit_config(&self) -> FitConfig {
        FitConfig {
            intercept: self.intercept,
            ..FitConfig::default()
        }
    }

    /// The current value of `key` in file syntax.
    pub fn get(&self, key: &str) -> Option<String> {
        Some(match key {
            "p_range" => show_range(&self.grid.p),
            "d_choices" => show_list(&self.grid.d),
            "q_range" => show_range(&self.grid.q),
            "seasonal_p_range" => show_range(&self.grid.seasonal_p),
            "seasonal_d_choices" => show_list(&self.grid.seasonal_d),
            "seasonal_q_range" => show_range(&self.grid.seasonal_q),
            "period" => self.grid.period.to_string(),
            "max_params_ratio" => self.grid.max_params_ratio.to_string(),
            "intercept" => self.intercept.map_or("auto".into(), |b| b.to_string()),
            "alpha" => self.alpha.to_string(),
            "back_transform" => self.back_transform.to_string(),
            "arch_lags" => self.arch_lags.to_string(),
            "ljung_box_lags" => self.ljung_box_lags.to_string(),
            "ljung_box_adjusted" => self.ljung_box_adjusted.to_string(),
            "mkd_per_eur" => self.mkd_per_eur.to_string(),
            "estimation_end" => self.estimation_end.to_string(),
            "log_offset" => self.log_offset.to_string(),
            "condition_on_realized" => self.condition_on_realized.to_string(),
            "continue_on_error" => self.continue_on_error.to_string(),
            "orders_file" => self
                .orders_file
                .as_ref()
                .map_or(String::new(), |p| p.display().to_string()),
            "output_dir" => self.output_dir.display().to_string(),
            _ => return None,
        })
    }

    /// Full configuration in file syntax; parsing it back gives `self`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (key, help) in KEYS {
            let value = self.get(key).expect("every listed key is readable");
            let _ = writeln!(out, "# {help}\n{key} = {value}");
        }
        out
    }
}
