//! Exhaustive AIC-ranked order search.

use std::cmp::Ordering;
use std::ops::RangeInclusive;

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::sarima::{fit, FitConfig, FittedModel, SarimaOrder};
use crate::series::QuarterlySeries;

/// Akaike information criterion, `2k - 2 loglik`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    2.0 * k as f64 - 2.0 * loglik
}

/// Candidate orders: the Cartesian product of all ranges and choices.
#[derive(Debug, Clone, PartialEq)]
pub struct SearchGrid {
    pub p: RangeInclusive<usize>,
    pub d: Vec<usize>,
    pub q: RangeInclusive<usize>,
    pub seasonal_p: RangeInclusive<usize>,
    pub seasonal_d: Vec<usize>,
    pub seasonal_q: RangeInclusive<usize>,
    pub period: usize,
    /// Candidates with more than `n_effective / max_params_ratio` parameters are skipped.
    pub max_params_ratio: f64,
}

impl Default for SearchGrid {
    fn default() -> Self {
        Self {
            p: 0..=3,
            d: vec![0, 1],
            q: 0..=4,
            seasonal_p: 0..=2,
            seasonal_d: vec![0, 1],
            seasonal_q: 0..=1,
            period: 4,
            max_params_ratio: 3.0,
        }
    }
}

impl SearchGrid {
    /// Grid containing exactly one order.
    pub fn single(order: SarimaOrder) -> Self {
        Self {
            p: order.p..=order.p,
            d: vec![order.d],
            q: order.q..=order.q,
            seasonal_p: order.seasonal_p..=order.seasonal_p,
            seasonal_d: vec![order.seasonal_d],
            seasonal_q: order.seasonal_q..=order.seasonal_q,
            period: order.period,
            max_params_ratio: 3.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.p.is_empty()
            || self.q.is_empty()
            || self.seasonal_p.is_empty()
            || self.seasonal_q.is_empty()
            || self.d.is_empty()
            || self.seasonal_d.is_empty()
        {
            return Err(Error::InvalidArgument(
                "search grid has an empty range".into(),
            ));
        }
        if self.period == 0 {
            return Err(Error::InvalidArgument(
                "seasonal period must be >= 1".into(),
            ));
        }
        Ok(())
    }

    /// All candidates in lexicographic `(p,d,q,P,D,Q)` order.
    pub fn candidates(&self) -> Vec<SarimaOrder> {
        let mut out = Vec::new();
        for p in self.p.clone() {
            for &d in &self.d {
                for q in self.q.clone() {
                    for sp in self.seasonal_p.clone() {
                        for &sd in &self.seasonal_d {
                            for sq in self.seasonal_q.clone() {
                                out.push(SarimaOrder {
                                    p,
                                    d,
                                    q,
                                    seasonal_p: sp,
                                    seasonal_d: sd,
                                    seasonal_q: sq,
                                    period: self.period,
                                });
                            }
                        }
                    }
                }
            }
        }
        out
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RankedCandidate {
    pub order: SarimaOrder,
    pub aic: f64,
    pub loglik: f64,
    pub parameter_count: usize,
    pub converged: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionResult {
    pub best: FittedModel,
    /// Every fitted candidate, ascending by AIC (ties: fewer parameters, then order).
    pub ranked: Vec<RankedCandidate>,
    pub skipped: Vec<(SarimaOrder, String)>,
}

impl SelectionResult {
    pub fn rank_of(&self, order: &SarimaOrder) -> Option<usize> {
        self.ranked.iter().position(|c| &c.order == order)
    }

    pub fn candidate(&self, order: &SarimaOrder) -> Option<&RankedCandidate> {
        self.ranked.iter().find(|c| &c.order == order)
    }
}

fn rank_cmp(a: &RankedCandidate, b: &RankedCandidate) -> Ordering {
    a.aic
        .total_cmp(&b.aic)
        .then(a.parameter_count.cmp(&b.parameter_count))
        .then(a.order.cmp(&b.order))
}

enum Outcome {
    Fitted(Box<FittedModel>),
    Skipped(String),
}

/// Fits every candidate of `grid` to a log-scale series and picks the
/// converged fit with minimal AIC.
pub fn grid_search(
    series: &QuarterlySeries,
    grid: &SearchGrid,
    config: &FitConfig,
) -> Result<SelectionResult> {
    grid.validate()?;
    let candidates = grid.candidates();
    let outcomes: Vec<(SarimaOrder, Outcome)> = candidates
        .par_iter()
        .map(|order| {
            let intercept = config
                .intercept
                .unwrap_or_else(|| order.default_intercept());
            let k = order.parameter_count(intercept);
            let n_eff = series.len().saturating_sub(order.difference_spec().span());
            if k as f64 > n_eff as f64 / grid.max_params_ratio {
                let reason = format!(
                    "{k} parameters exceed n/{} with n = {n_eff}",
                    grid.max_params_ratio
                );
                return (*order, Outcome::Skipped(reason));
            }
            match fit(series, order, config) {
                Ok(m) => (*order, Outcome::Fitted(Box::new(m))),
                Err(e) => (*order, Outcome::Skipped(e.to_string())),
            }
        })
        .collect();

    let mut fits = Vec::new();
    let mut skipped = Vec::new();
    for (order, outcome) in outcomes {
        match outcome {
            Outcome::Fitted(m) => fits.push(*m),
            Outcome::Skipped(reason) => skipped.push((order, reason)),
        }
    }
    let mut ranked: Vec<RankedCandidate> = fits
        .iter()
        .map(|m| RankedCandidate {
            order: m.order,
            aic: m.aic,
            loglik: m.loglik,
            parameter_count: m.parameter_count(),
            converged: m.converged,
        })
        .collect();
    ranked.sort_by(rank_cmp);

    let winner = ranked
        .iter()
        .find(|c| c.converged && c.aic.is_finite())
        .map(|c| c.order)
        .ok_or(Error::NoCandidateConverged {
            attempted: fits.len(),
            skipped: skipped.len(),
        })?;
    let best = fits
        .into_iter()
        .find(|m| m.order == winner)
        .expect("winner comes from the fitted set");
    Ok(SelectionResult {
        best,
        ranked,
        skipped,
    })
}
