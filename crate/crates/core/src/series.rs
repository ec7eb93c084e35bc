//! Calendar-indexed quarterly series, log transforms and (inverse) differencing.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

/// A calendar quarter, ordered lexicographically on `(year, quarter)`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct QuarterIndex {
    year: i32,
    quarter: u32,
}

impl QuarterIndex {
    pub fn new(year: i32, quarter: u32) -> Result<Self> {
        if !(1..=4).contains(&quarter) {
            return Err(Error::QuarterOutOfRange {
                text: format!("{year}Q{quarter}"),
                quarter,
            });
        }
        Ok(Self { year, quarter })
    }

    pub fn year(self) -> i32 {
        self.year
    }

    pub fn quarter(self) -> u32 {
        self.quarter
    }

    pub fn succ(self) -> Self {
        self.offset(1)
    }

    /// Shifts by `n` quarters (negative moves backwards).
    pub fn offset(self, n: i64) -> Self {
        let ordinal = self.ordinal() + n;
        Self {
            year: ordinal.div_euclid(4) as i32,
            quarter: (ordinal.rem_euclid(4) + 1) as u32,
        }
    }

    /// Signed number of quarters from `other` to `self`.
    pub fn quarters_since(self, other: Self) -> i64 {
        self.ordinal() - other.ordinal()
    }

    fn ordinal(self) -> i64 {
        self.year as i64 * 4 + (self.quarter as i64 - 1)
    }
}

impl fmt::Display for QuarterIndex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}Q{}", self.year, self.quarter)
    }
}

impl FromStr for QuarterIndex {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        parse_quarter(s)
    }
}

/// Parses `YYYYQn` (n in 1..=4).
pub fn parse_quarter(text: &str) -> Result<QuarterIndex> {
    let malformed = || Error::MalformedQuarter(text.to_string());
    let t = text.trim();
    let (year, quarter) = t.split_once(['Q', 'q']).ok_or_else(malformed)?;
    if year.len() != 4 || quarter.len() != 1 || !year.bytes().all(|b| b.is_ascii_digit()) {
        return Err(malformed());
    }
    let year: i32 = year.parse().map_err(|_| malformed())?;
    let quarter: u32 = quarter.parse().map_err(|_| malformed())?;
    if !(1..=4).contains(&quarter) {
        return Err(Error::QuarterOutOfRange {
            text: text.to_string(),
            quarter,
        });
    }
    Ok(QuarterIndex { year, quarter })
}

/// Measurement scale of a series' values.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scale {
    Level,
    Log,
    Differenced,
}

impl Scale {
    fn name(self) -> &'static str {
        match self {
            Scale::Level => "level",
            Scale::Log => "log",
            Scale::Differenced => "differenced",
        }
    }
}

/// Contiguous quarterly observations starting at `start`.
///
/// `offset` is the additive constant applied before a log transform
/// (zero unless one was configured); it travels with the series so that
/// back-transforms can remove it.
#[derive(Debug, Clone, PartialEq)]
pub struct QuarterlySeries {
    start: QuarterIndex,
    values: Vec<f64>,
    scale: Scale,
    offset: f64,
}

impl QuarterlySeries {
    pub fn new(start: QuarterIndex, values: Vec<f64>, scale: Scale) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::EmptySeries);
        }
        if let Some(i) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "non-finite value at index {i}"
            )));
        }
        Ok(Self {
            start,
            values,
            scale,
            offset: 0.0,
        })
    }

    pub fn level(start: QuarterIndex, values: Vec<f64>) -> Result<Self> {
        Self::new(start, values, Scale::Level)
    }

    pub fn start(&self) -> QuarterIndex {
        self.start
    }

    /// Last quarter covered by the series.
    pub fn end(&self) -> QuarterIndex {
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn scale(&self) -> Scale {
        self.scale
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    pub fn quarters(&self) -> impl Iterator<Item = QuarterIndex> + '_ {
        (0..self.values.len()).map(|i| self.start.offset(i as i64))
    }

    pub fn get(&self, q: QuarterIndex) -> Option<f64> {
        let i = q.quarters_since(self.start);
        (i >= 0)
            .then(|| self.values.get(i as usize).copied())
            .flatten()
    }

    /// Sub-series covering `from..=to`, clipped to the available range.
    pub fn window(&self, from: QuarterIndex, to: QuarterIndex) -> Result<Self> {
        let lo = from.quarters_since(self.start).max(0) as usize;
        let hi = (to.quarters_since(self.start) + 1).min(self.values.len() as i64);
        if hi <= lo as i64 {
            return Err(Error::EmptySeries);
        }
        Ok(Self {
            start: self.start.offset(lo as i64),
            values: self.values[lo..hi as usize].to_vec(),
            scale: self.scale,
            offset: self.offset,
        })
    }

    /// Appends `next`, which must start right after `self` ends and share its scale.
    pub fn concat(&self, next: &Self) -> Result<Self> {
        if next.start != self.end().succ() {
            return Err(Error::Misaligned {
                expected: self.end().succ(),
                actual: next.start,
            });
        }
        next.require(self.scale)?;
        let mut values = self.values.clone();
        values.extend_from_slice(&next.values);
        Ok(Self {
            start: self.start,
            values,
            scale: self.scale,
            offset: self.offset,
        })
    }

    fn require(&self, scale: Scale) -> Result<()> {
        if self.scale != scale {
            return Err(Error::WrongScale {
                expected: scale.name(),
                actual: self.scale.name(),
            });
        }
        Ok(())
    }

    /// Element-wise natural log of a level series.
    pub fn log_transform(&self) -> Result<Self> {
        self.log_transform_with_offset(0.0)
    }

    /// Natural log of `value + offset`; the offset is recorded on the result.
    pub fn log_transform_with_offset(&self, offset: f64) -> Result<Self> {
        self.require(Scale::Level)?;
        let values = self
            .values
            .iter()
            .enumerate()
            .map(|(index, &v)| {
                let shifted = v + offset;
                if shifted > 0.0 {
                    Ok(shifted.ln())
                } else {
                    Err(Error::NonPositive { index, value: v })
                }
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            start: self.start,
            values,
            scale: Scale::Log,
            offset,
        })
    }

    /// Inverse of [`log_transform_with_offset`](Self::log_transform_with_offset).
    pub fn exp_transform(&self) -> Result<Self> {
        self.require(Scale::Log)?;
        Ok(Self {
            start: self.start,
            values: self.values.iter().map(|v| v.exp() - self.offset).collect(),
            scale: Scale::Level,
            offset: 0.0,
        })
    }

    /// Applies `(1-L)^d (1-L^s)^D`.
    pub fn difference(&self, spec: DifferenceSpec) -> Result<Self> {
        let span = spec.span();
        if self.values.len() <= span {
            return Err(Error::TooShort {
                len: self.values.len(),
                needed: span,
            });
        }
        let mut v = self.values.clone();
        for _ in 0..spec.d {
            v = v.windows(2).map(|w| w[1] - w[0]).collect();
        }
        for _ in 0..spec.seasonal_d {
            v = (spec.period..v.len())
                .map(|t| v[t] - v[t - spec.period])
                .collect();
        }
        Ok(Self {
            start: self.start.offset(span as i64),
            values: v,
            scale: Scale::Differenced,
            offset: self.offset,
        })
    }

    /// Growth rate in percent against the value `lag` quarters earlier.
    ///
    /// Element `i` of the result belongs to quarter `start + lag + i`.
    pub fn growth_rate(&self, lag: usize) -> Result<Vec<f64>> {
        self.require(Scale::Level)?;
        if lag == 0 {
            return Err(Error::InvalidArgument("lag must be at least 1".into()));
        }
        if self.values.len() <= lag {
            return Err(Error::TooShort {
                len: self.values.len(),
                needed: lag,
            });
        }
        (lag..self.values.len())
            .map(|t| {
                let base = self.values[t - lag];
                if base == 0.0 {
                    Err(Error::ZeroDenominator(t - lag))
                } else {
                    Ok(100.0 * (self.values[t] - base) / base)
                }
            })
            .collect()
    }
}

/// Nonseasonal order `d`, seasonal order `seasonal_d` and period `period`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct DifferenceSpec {
    pub d: usize,
    pub seasonal_d: usize,
    pub period: usize,
}

impl DifferenceSpec {
    pub fn new(d: usize, seasonal_d: usize, period: usize) -> Result<Self> {
        if period == 0 {
            return Err(Error::InvalidArgument(
                "seasonal period must be >= 1".into(),
            ));
        }
        Ok(Self {
            d,
            seasonal_d,
            period,
        })
    }

    /// Number of leading observations consumed: `d + D*s`.
    pub fn span(&self) -> usize {
        self.d + self.seasonal_d * self.period
    }

    /// Coefficients of `(1-L)^d (1-L^s)^D`, indexed by lag; element 0 is 1.
    pub fn polynomial(&self) -> Vec<f64> {
        let mut poly = vec![1.0];
        for _ in 0..self.d {
            poly = multiply(&poly, &[1.0, -1.0]);
        }
        let mut seasonal = vec![0.0; self.period + 1];
        seasonal[0] = 1.0;
        seasonal[self.period] = -1.0;
        for _ in 0..self.seasonal_d {
            poly = multiply(&poly, &seasonal);
        }
        poly
    }
}

pub(crate) fn multiply(a: &[f64], b: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0.0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

/// Integrates `values` given the `spec.span()` observations that precede them.
pub(crate) fn integrate_values(
    values: &[f64],
    anchors: &[f64],
    spec: DifferenceSpec,
) -> Result<Vec<f64>> {
    let span = spec.span();
    if anchors.len() != span {
        return Err(Error::AnchorCount {
            expected: span,
            actual: anchors.len(),
        });
    }
    let poly = spec.polynomial();
    let mut out = Vec::with_capacity(span + values.len());
    out.extend_from_slice(anchors);
    for &w in values {
        let t = out.len();
        let carried: f64 = (1..poly.len()).map(|k| poly[k] * out[t - k]).sum();
        out.push(w - carried);
    }
    Ok(out)
}

/// Inverts [`QuarterlySeries::difference`].
///
/// `anchors` are the first `d + D*s` values of the undifferenced series in
/// their original order; the result starts with them and is on log scale.
pub fn integrate(
    diffed: &QuarterlySeries,
    anchors: &[f64],
    spec: DifferenceSpec,
) -> Result<QuarterlySeries> {
    let values = integrate_values(diffed.values(), anchors, spec)?;
    Ok(QuarterlySeries {
        start: diffed.start.offset(-(spec.span() as i64)),
        values,
        scale: Scale::Log,
        offset: diffed.offset,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;
    use proptest::prelude::*;

    fn q(y: i32, n: u32) -> QuarterIndex {
        QuarterIndex::new(y, n).unwrap()
    }

    #[test]
    fn parses_quarters() {
        assert_eq!(parse_quarter("2012Q2").unwrap(), q(2012, 2));
        assert_eq!(parse_quarter("2019Q4").unwrap(), q(2019, 4));
        assert!(matches!(
            parse_quarter("2020Q5"),
            Err(Error::QuarterOutOfRange { quarter: 5, .. })
        ));
        assert!(matches!(
            parse_quarter("2020-1"),
            Err(Error::MalformedQuarter(_))
        ));
        assert!(matches!(
            parse_quarter("20Q1"),
            Err(Error::MalformedQuarter(_))
        ));
    }

    #[test]
    fn quarter_arithmetic() {
        assert_eq!(q(2019, 4).succ(), q(2020, 1));
        assert_eq!(q(2020, 1).offset(-1), q(2019, 4));
        assert_eq!(q(2012, 2).offset(32), q(2020, 2));
        assert!(q(2019, 4) < q(2020, 1));
        assert!(q(2019, 1) < q(2019, 2));
        assert_eq!(q(2020, 2).quarters_since(q(2012, 2)), 32);
        assert_eq!(q(2019, 4).to_string(), "2019Q4");
    }

    #[test]
    fn log_of_exact_powers() {
        let e = std::f64::consts::E;
        let s = QuarterlySeries::level(q(2000, 1), vec![1.0, e, e * e]).unwrap();
        let l = s.log_transform().unwrap();
        assert_eq!(l.scale(), Scale::Log);
        for (a, b) in l.values().iter().zip([0.0, 1.0, 2.0]) {
            assert_relative_eq!(*a, b, epsilon = 1e-15);
        }
    }

    #[test]
    fn log_rejects_zero_without_offset() {
        let s = QuarterlySeries::level(q(2000, 1), vec![1.0, 0.0, 2.0]).unwrap();
        assert!(matches!(
            s.log_transform(),
            Err(Error::NonPositive { index: 1, .. })
        ));
        let shifted = s.log_transform_with_offset(1.0).unwrap();
        let back = shifted.exp_transform().unwrap();
        for (a, b) in back.values().iter().zip(s.values()) {
            assert_relative_eq!(*a, *b, epsilon = 1e-12);
        }
    }

    #[test]
    fn log_of_mtpl_claims() {
        let s = QuarterlySeries::level(q(2020, 1), vec![486_558.0]).unwrap();
        let l = s.log_transform().unwrap();
        assert!((l.values()[0] - 13.0951).abs() < 5e-5);
    }

    #[test]
    fn difference_examples() {
        let spec = DifferenceSpec::new(1, 0, 4).unwrap();
        let s = QuarterlySeries::new(q(2000, 1), vec![3.0; 6], Scale::Log).unwrap();
        assert!(s
            .difference(spec)
            .unwrap()
            .values()
            .iter()
            .all(|&v| v == 0.0));

        let seasonal = DifferenceSpec::new(0, 1, 4).unwrap();
        let s = QuarterlySeries::new(
            q(2000, 1),
            vec![1.0, 5.0, 2.0, 9.0, 1.0, 5.0, 2.0, 9.0],
            Scale::Log,
        )
        .unwrap();
        let d = s.difference(seasonal).unwrap();
        assert_eq!(d.values(), &[0.0; 4]);
        assert_eq!(d.start(), q(2001, 1));

        let second = DifferenceSpec::new(2, 0, 4).unwrap();
        let s =
            QuarterlySeries::new(q(2000, 1), vec![1.0, 2.0, 4.0, 7.0, 11.0], Scale::Log).unwrap();
        assert_eq!(s.difference(second).unwrap().values(), &[1.0, 1.0, 1.0]);
    }

    #[test]
    fn difference_too_short() {
        let spec = DifferenceSpec::new(1, 1, 4).unwrap();
        let s = QuarterlySeries::new(q(2000, 1), vec![1.0; 5], Scale::Log).unwrap();
        assert!(matches!(
            s.difference(spec),
            Err(Error::TooShort { len: 5, needed: 5 })
        ));
    }

    #[test]
    fn integrate_examples() {
        let spec = DifferenceSpec::new(1, 0, 4).unwrap();
        let zeros = QuarterlySeries::new(q(2000, 2), vec![0.0; 4], Scale::Differenced).unwrap();
        let x = integrate(&zeros, &[2.5], spec).unwrap();
        assert_eq!(x.values(), &[2.5; 5]);
        assert_eq!(x.start(), q(2000, 1));

        let spec = DifferenceSpec::new(2, 0, 4).unwrap();
        let s =
            QuarterlySeries::new(q(2000, 1), vec![1.0, 2.0, 4.0, 7.0, 11.0], Scale::Log).unwrap();
        let back = integrate(&s.difference(spec).unwrap(), &s.values()[..2], spec).unwrap();
        assert_eq!(back.values(), s.values());

        assert!(matches!(
            integrate(&zeros, &[1.0, 2.0], DifferenceSpec::new(1, 0, 4).unwrap()),
            Err(Error::AnchorCount {
                expected: 1,
                actual: 2
            })
        ));
    }

    #[test]
    fn difference_polynomial() {
        let spec = DifferenceSpec::new(1, 1, 4).unwrap();
        assert_eq!(spec.polynomial(), vec![1.0, -1.0, 0.0, 0.0, -1.0, 1.0]);
    }

    #[test]
    fn growth_rates() {
        let s = QuarterlySeries::level(q(2020, 1), vec![486_558.0, 860_049.0]).unwrap();
        let r = s.growth_rate(1).unwrap();
        assert_eq!(format!("{:.2}", r[0]), "76.76");
        let flat = QuarterlySeries::level(q(2020, 1), vec![5.0; 6]).unwrap();
        assert!(flat.growth_rate(4).unwrap().iter().all(|&v| v == 0.0));
        assert!(matches!(flat.growth_rate(6), Err(Error::TooShort { .. })));
        let zero = QuarterlySeries::level(q(2020, 1), vec![0.0, 1.0]).unwrap();
        assert!(matches!(
            zero.growth_rate(1),
            Err(Error::ZeroDenominator(0))
        ));
        let logged = flat.log_transform().unwrap();
        assert!(matches!(
            logged.growth_rate(1),
            Err(Error::WrongScale { .. })
        ));
    }

    #[test]
    fn window_and_lookup() {
        let s = QuarterlySeries::level(q(2019, 3), vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        assert_eq!(s.end(), q(2020, 2));
        assert_eq!(s.get(q(2020, 1)), Some(3.0));
        assert_eq!(s.get(q(2019, 2)), None);
        let w = s.window(q(2019, 1), q(2019, 4)).unwrap();
        assert_eq!(w.values(), &[1.0, 2.0]);
        assert_eq!(w.start(), q(2019, 3));
        let rest = s.window(q(2020, 1), q(2020, 2)).unwrap();
        assert_eq!(w.concat(&rest).unwrap(), s);
        assert!(matches!(s.concat(&w), Err(Error::Misaligned { .. })));
    }

    proptest! {
        #[test]
        fn difference_integrate_round_trip(
            values in prop::collection::vec(-50.0f64..50.0, 12..60),
            d in 0usize..3,
            seasonal_d in 0usize..2,
        ) {
            let spec = DifferenceSpec::new(d, seasonal_d, 4).unwrap();
            prop_assume!(values.len() > spec.span());
            let s = QuarterlySeries::new(q(2001, 3), values.clone(), Scale::Log).unwrap();
            let diffed = s.difference(spec).unwrap();
            prop_assert_eq!(diffed.len(), values.len() - spec.span());
            let back = integrate(&diffed, &values[..spec.span()], spec).unwrap();
            prop_assert_eq!(back.start(), s.start());
            for (a, b) in back.values().iter().zip(&values) {
                prop_assert!((a - b).abs() <= 1e-10 * b.abs().max(1.0));
            }
        }

        #[test]
        fn growth_rate_is_scale_invariant(
            values in prop::collection::vec(1.0f64..1e7, 6..20),
            c in 1e-3f64..1e3,
            lag in 1usize..5,
        ) {
            let s = QuarterlySeries::level(q(2010, 1), values.clone()).unwrap();
            let scaled = QuarterlySeries::level(q(2010, 1), values.iter().map(|v| v * c).collect()).unwrap();
            for (a, b) in s.growth_rate(lag).unwrap().iter().zip(scaled.growth_rate(lag).unwrap()) {
                prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
            }
        }

        #[test]
        fn log_exp_round_trip(values in prop::collection::vec(1e-3f64..1e7, 1..30)) {
            let s = QuarterlySeries::level(q(2010, 1), values.clone()).unwrap();
            let back = s.log_transform().unwrap().exp_transform().unwrap();
            for (a, b) in back.values().iter().zip(&values) {
                prop_assert!((a - b).abs() <= 1e-12 * b);
            }
        }
    }
}
