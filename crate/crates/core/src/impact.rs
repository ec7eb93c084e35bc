//! Counterfactual impact metrics.
//!
//! Everything here is plain aggregation over expected (forecast) and
//! realized values in thousand MKD: relative percentage errors, totals taken
//! as a ratio of sums, nominal shortfalls converted to EUR, and the shares
//! of each class in the expected and realized totals.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::series::{QuarterIndex, QuarterlySeries};

/// Default exchange rate, MKD per EUR.
pub const DEFAULT_MKD_PER_EUR: f64 = 61.5;

/// Type of insurance activity.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Activity {
    /// Gross claims paid.
    Gcp,
    /// Gross written premiums.
    Gwp,
}

impl Activity {
    pub const ALL: [Activity; 2] = [Activity::Gcp, Activity::Gwp];

    pub fn lower(self) -> &'static str {
        match self {
            Activity::Gcp => "gcp",
            Activity::Gwp => "gwp",
        }
    }
}

impl fmt::Display for Activity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Activity::Gcp => "GCP",
            Activity::Gwp => "GWP",
        })
    }
}

impl FromStr for Activity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "gcp" => Ok(Activity::Gcp),
            "gwp" => Ok(Activity::Gwp),
            other => Err(Error::InvalidArgument(format!(
                "unknown activity {other:?} (expected gcp or gwp)"
            ))),
        }
    }
}

/// `100 (expected - realized) / realized`.
pub fn relative_error(expected: f64, realized: f64) -> Result<f64> {
    if realized == 0.0 {
        return Err(Error::ZeroRealized);
    }
    Ok(100.0 * (expected - realized) / realized)
}

/// Expected versus realized activity for one class in one quarter.
#[derive(Debug, Clone, PartialEq)]
pub struct ImpactRow {
    pub class_name: String,
    pub activity: Activity,
    pub quarter: QuarterIndex,
    pub expected: f64,
    pub realized: f64,
    pub relative_error_pct: f64,
    /// `realized - expected`.
    pub difference: f64,
}

impl ImpactRow {
    pub fn new(
        class_name: impl Into<String>,
        activity: Activity,
        quarter: QuarterIndex,
        expected: f64,
        realized: f64,
    ) -> Result<Self> {
        Ok(Self {
            class_name: class_name.into(),
            activity,
            quarter,
            expected,
            realized,
            relative_error_pct: relative_error(expected, realized)?,
            difference: realized - expected,
        })
    }
}

fn check_group(rows: &[ImpactRow]) -> Result<(Activity, QuarterIndex)> {
    let first = rows
        .first()
        .ok_or(Error::InvalidArgument("no impact rows".into()))?;
    if let Some(odd) = rows
        .iter()
        .find(|r| r.activity != first.activity || r.quarter != first.quarter)
    {
        return Err(Error::InvalidArgument(format!(
            "rows mix {} {} with {} {}",
            first.activity, first.quarter, odd.activity, odd.quarter
        )));
    }
    Ok((first.activity, first.quarter))
}

/// Relative error of the column totals (a ratio of sums, not a mean of ratios).
pub fn total_relative_error(rows: &[ImpactRow]) -> Result<f64> {
    check_group(rows)?;
    let expected: f64 = rows.iter().map(|r| r.expected).sum();
    let realized: f64 = rows.iter().map(|r| r.realized).sum();
    relative_error(expected, realized)
}

/// Aggregate shortfall of one activity in one quarter.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Shortfall {
    pub activity: Activity,
    pub quarter: QuarterIndex,
    pub expected: f64,
    pub realized: f64,
    /// `expected - realized`, thousand MKD.
    pub shortfall_mkd: f64,
    /// The same amount in thousand EUR.
    pub shortfall_eur: f64,
}

/// Shortfalls in EUR and the net industry figure.
#[derive(Debug, Clone, PartialEq)]
pub struct NominalImpact {
    pub mkd_per_eur: f64,
    /// One entry per (activity, quarter), GCP first, quarters ascending.
    pub shortfalls: Vec<Shortfall>,
    /// Sum of GCP shortfalls, thousand EUR.
    pub gcp_eur: f64,
    /// Sum of GWP shortfalls, thousand EUR.
    pub gwp_eur: f64,
    /// `gcp_eur + gwp_eur`.
    pub gross_eur: f64,
    /// `gwp_eur - gcp_eur`: premiums not written, net of claims not paid.
    pub net_eur: f64,
}

impl NominalImpact {
    /// Plain-language statement of how `net_eur` is computed.
    pub const NET_FORMULA: &'static str = "net = (GWP shortfall - GCP shortfall) / MKD per EUR, \
        shortfall = sum of expected - realized over quarters and classes; \
        a derived interpretation: foregone premium revenue net of claim payouts that did not occur";
}

/// Converts per-class rows to aggregate EUR shortfalls.
pub fn nominal_impact(
    gcp_rows: &[ImpactRow],
    gwp_rows: &[ImpactRow],
    mkd_per_eur: f64,
) -> Result<NominalImpact> {
    if !(mkd_per_eur > 0.0 && mkd_per_eur.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "exchange rate must be positive, got {mkd_per_eur}"
        )));
    }
    let mut shortfalls = Vec::new();
    let mut totals = [0.0; 2];
    for (slot, (activity, rows)) in [(Activity::Gcp, gcp_rows), (Activity::Gwp, gwp_rows)]
        .into_iter()
        .enumerate()
    {
        if rows.is_empty() {
            return Err(Error::InvalidArgument(format!("no {activity} rows")));
        }
        if let Some(odd) = rows.iter().find(|r| r.activity != activity) {
            return Err(Error::InvalidArgument(format!(
                "{} row for {} passed as {activity}",
                odd.activity, odd.class_name
            )));
        }
        let mut quarters: Vec<QuarterIndex> = rows.iter().map(|r| r.quarter).collect();
        quarters.sort();
        quarters.dedup();
        for quarter in quarters {
            let (expected, realized) = rows
                .iter()
                .filter(|r| r.quarter == quarter)
                .fold((0.0, 0.0), |(e, r), row| {
                    (e + row.expected, r + row.realized)
                });
            let shortfall_mkd = expected - realized;
            let shortfall_eur = shortfall_mkd / mkd_per_eur;
            totals[slot] += shortfall_eur;
            shortfalls.push(Shortfall {
                activity,
                quarter,
                expected,
                realized,
                shortfall_mkd,
                shortfall_eur,
            });
        }
    }
    let [gcp_eur, gwp_eur] = totals;
    Ok(NominalImpact {
        mkd_per_eur,
        shortfalls,
        gcp_eur,
        gwp_eur,
        gross_eur: gcp_eur + gwp_eur,
        net_eur: gwp_eur - gcp_eur,
    })
}

/// A class's share of the expected and realized column totals.
#[derive(Debug, Clone, PartialEq)]
pub struct ShareRow {
    pub class_name: String,
    pub expected_share: f64,
    pub realized_share: f64,
    /// `100 (realized_share - expected_share)`, percentage points.
    pub delta_pp: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ShareTable {
    pub activity: Activity,
    pub quarter: QuarterIndex,
    pub rows: Vec<ShareRow>,
}

/// Shares of each class in the expected and realized totals.
pub fn structural_shares(rows: &[ImpactRow]) -> Result<ShareTable> {
    let (activity, quarter) = check_group(rows)?;
    let expected: f64 = rows.iter().map(|r| r.expected).sum();
    let realized: f64 = rows.iter().map(|r| r.realized).sum();
    if expected == 0.0 || realized == 0.0 {
        return Err(Error::ZeroRealized);
    }
    let rows = rows
        .iter()
        .map(|r| {
            let expected_share = r.expected / expected;
            let realized_share = r.realized / realized;
            ShareRow {
                class_name: r.class_name.clone(),
                expected_share,
                realized_share,
                delta_pp: 100.0 * (realized_share - expected_share),
            }
        })
        .collect();
    Ok(ShareTable {
        activity,
        quarter,
        rows,
    })
}

/// Growth of quarter `q` against the same quarter a year earlier and
/// against the previous quarter, in percent.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Growth {
    pub vs_previous_year: f64,
    pub vs_previous_quarter: f64,
}

/// Year-over-year and quarter-over-quarter growth at `q` of a level series.
pub fn growth_at(series: &QuarterlySeries, q: QuarterIndex) -> Result<Growth> {
    let value = |at: QuarterIndex| {
        series.get(at).ok_or(Error::Misaligned {
            expected: at,
            actual: if at < series.start() {
                series.start()
            } else {
                series.end()
            },
        })
    };
    let now = value(q)?;
    let rate = |base: f64| {
        if base == 0.0 {
            Err(Error::ZeroRealized)
        } else {
            Ok(100.0 * (now - base) / base)
        }
    };
    Ok(Growth {
        vs_previous_year: rate(value(q.offset(-4))?)?,
        vs_previous_quarter: rate(value(q.offset(-1))?)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn q(y: i32, n: u32) -> QuarterIndex {
        QuarterIndex::new(y, n).unwrap()
    }

    fn row(name: &str, activity: Activity, quarter: QuarterIndex, e: f64, r: f64) -> ImpactRow {
        ImpactRow::new(name, activity, quarter, e, r).unwrap()
    }

    #[test]
    fn relative_error_examples() {
        assert!((relative_error(530_810.0, 486_558.0).unwrap() - 9.09).abs() < 0.005);
        assert!((relative_error(84_995.0, 109_341.0).unwrap() + 22.27).abs() < 0.005);
        assert_eq!(relative_error(5.0, 5.0).unwrap(), 0.0);
        assert!(matches!(relative_error(1.0, 0.0), Err(Error::ZeroRealized)));
    }

    #[test]
    fn totals_are_ratio_of_sums() {
        let gcp = q(2020, 1);
        let total = row("TOTAL", Activity::Gcp, gcp, 1_000_777.0, 950_488.0);
        assert!((total.relative_error_pct - 5.29).abs() < 0.005);
        let gwp = row("TOTAL", Activity::Gwp, q(2020, 2), 5_557_569.0, 4_992_469.0);
        assert!((gwp.relative_error_pct - 11.32).abs() < 0.005);

        let rows = vec![
            row("a", Activity::Gcp, gcp, 110.0, 100.0),
            row("b", Activity::Gcp, gcp, 1.0, 10.0),
        ];
        let total = total_relative_error(&rows).unwrap();
        let mean = rows.iter().map(|r| r.relative_error_pct).sum::<f64>() / 2.0;
        assert!((total - 100.0 * (111.0 - 110.0) / 110.0).abs() < 1e-12);
        assert!((total - mean).abs() > 1.0);
        assert_eq!(
            total_relative_error(&rows[..1]).unwrap(),
            rows[0].relative_error_pct
        );
    }

    #[test]
    fn mixed_groups_are_rejected() {
        let rows = vec![
            row("a", Activity::Gcp, q(2020, 1), 1.0, 1.0),
            row("a", Activity::Gcp, q(2020, 2), 1.0, 1.0),
        ];
        assert!(total_relative_error(&rows).is_err());
        assert!(structural_shares(&rows).is_err());
        assert!(total_relative_error(&[]).is_err());
    }

    fn totals() -> (Vec<ImpactRow>, Vec<ImpactRow>) {
        let gcp = vec![
            row("TOTAL", Activity::Gcp, q(2020, 1), 1_000_777.0, 950_488.0),
            row("TOTAL", Activity::Gcp, q(2020, 2), 2_020_853.0, 1_809_341.0),
        ];
        let gwp = vec![
            row("TOTAL", Activity::Gwp, q(2020, 1), 2_715_962.0, 2_512_086.0),
            row("TOTAL", Activity::Gwp, q(2020, 2), 5_557_569.0, 4_992_469.0),
        ];
        (gcp, gwp)
    }

    #[test]
    fn nominal_shortfalls_in_eur() {
        let (gcp, gwp) = totals();
        let n = nominal_impact(&gcp, &gwp, DEFAULT_MKD_PER_EUR).unwrap();
        let millions: Vec<f64> = n
            .shortfalls
            .iter()
            .map(|s| s.shortfall_eur / 1000.0)
            .collect();
        for (got, want) in millions.iter().zip([0.8, 3.4, 3.3, 9.2]) {
            assert!((got - want).abs() < 0.1, "{got} vs {want}");
        }
        let net = (203_876.0 + 565_100.0 - 50_289.0 - 211_512.0) / 61.5;
        assert!((n.net_eur - net).abs() < 1e-9);
        assert!((n.net_eur / 1000.0 - 8.2).abs() < 0.1);
        assert!((n.gross_eur / 1000.0 - 16.7).abs() < 0.1);
        assert!(nominal_impact(&gcp, &gwp, 0.0).is_err());
        assert!(nominal_impact(&[], &gwp, 61.5).is_err());
        assert!(nominal_impact(&gwp, &gwp, 61.5).is_err());
    }

    #[test]
    fn mtpl_share_drop() {
        let quarter = q(2020, 1);
        let rows = vec![
            row("MTPL (total)", Activity::Gcp, quarter, 530_810.0, 486_558.0),
            row(
                "rest",
                Activity::Gcp,
                quarter,
                1_000_777.0 - 530_810.0,
                950_488.0 - 486_558.0,
            ),
        ];
        let t = structural_shares(&rows).unwrap();
        let mtpl = &t.rows[0];
        assert!((mtpl.realized_share - 0.512).abs() < 0.0005);
        assert!((mtpl.expected_share - 0.530).abs() < 0.0005);
        assert!((mtpl.delta_pp + 1.9).abs() < 0.1);
        let single = structural_shares(&rows[..1]).unwrap();
        assert_eq!(single.rows[0].expected_share, 1.0);
        assert_eq!(single.rows[0].realized_share, 1.0);
    }

    #[test]
    fn growth_examples() {
        let s = QuarterlySeries::level(
            q(2019, 1),
            vec![100.0, 200.0, 300.0, 400.0, 486_558.0, 860_049.0],
        )
        .unwrap();
        let g = growth_at(&s, q(2020, 2)).unwrap();
        assert!((g.vs_previous_quarter - 76.76).abs() < 0.005);
        assert!((g.vs_previous_year - 100.0 * (860_049.0 - 200.0) / 200.0).abs() < 1e-9);
        assert!(growth_at(&s, q(2019, 4)).is_err());
    }

    #[test]
    fn activity_round_trip() {
        for a in Activity::ALL {
            assert_eq!(a.to_string().parse::<Activity>().unwrap(), a);
            assert_eq!(a.lower().parse::<Activity>().unwrap(), a);
        }
    }

    fn group() -> impl Strategy<Value = Vec<(f64, f64)>> {
        prop::collection::vec((1.0f64..1e6, 1.0f64..1e6), 1..12)
    }

    fn rows_of(values: &[(f64, f64)], scale: f64) -> Vec<ImpactRow> {
        values
            .iter()
            .enumerate()
            .map(|(i, (e, r))| {
                row(
                    &format!("c{i}"),
                    Activity::Gwp,
                    q(2020, 1),
                    e * scale,
                    r * scale,
                )
            })
            .collect()
    }

    proptest! {
        #[test]
        fn relative_error_is_scale_free(e in 1.0f64..1e7, r in 1.0f64..1e7, c in 0.01f64..100.0) {
            let a = relative_error(e, r).unwrap();
            let b = relative_error(c * e, c * r).unwrap();
            prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
        }

        #[test]
        fn shares_sum_to_one_and_ignore_currency(values in group(), c in 0.001f64..1000.0) {
            let t = structural_shares(&rows_of(&values, 1.0)).unwrap();
            let e: f64 = t.rows.iter().map(|r| r.expected_share).sum();
            let r: f64 = t.rows.iter().map(|r| r.realized_share).sum();
            prop_assert!((e - 1.0).abs() < 1e-9 && (r - 1.0).abs() < 1e-9);
            let scaled = structural_shares(&rows_of(&values, c)).unwrap();
            for (a, b) in t.rows.iter().zip(&scaled.rows) {
                prop_assert!((a.expected_share - b.expected_share).abs() < 1e-12);
                prop_assert!((a.realized_share - b.realized_share).abs() < 1e-12);
            }
        }

        #[test]
        fn net_ignores_row_order(values in group(), other in group(), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let gwp = rows_of(&values, 1.0);
            let gcp: Vec<ImpactRow> = other
                .iter()
                .map(|(e, r)| row("x", Activity::Gcp, q(2020, 2), *e, *r))
                .collect();
            let a = nominal_impact(&gcp, &gwp, 61.5).unwrap();
            let mut shuffled = gwp.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            let b = nominal_impact(&gcp, &shuffled, 61.5).unwrap();
            prop_assert!((a.net_eur - b.net_eur).abs() <= 1e-9 * (1.0 + a.net_eur.abs()));
        }
    }
}
