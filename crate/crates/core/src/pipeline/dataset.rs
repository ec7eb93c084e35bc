//! Panel of quarterly activity series read from CSV.
//!
//! The input schema is fixed: a header `class,quarter,gcp,gwp`, one row per
//! class and quarter, quarters written `YYYYQn`, values in thousand MKD with
//! `.` as the decimal separator.

use std::collections::{BTreeMap, BTreeSet};
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::impact::Activity;
use crate::series::{parse_quarter, QuarterIndex, QuarterlySeries};

/// Column names, in order.
pub const HEADER: [&str; 4] = ["class", "quarter", "gcp", "gwp"];

/// Both activity series of one insurance class.
#[derive(Debug, Clone, PartialEq)]
pub struct ClassSeries {
    pub name: String,
    pub gcp: QuarterlySeries,
    pub gwp: QuarterlySeries,
}

impl ClassSeries {
    pub fn get(&self, activity: Activity) -> &QuarterlySeries {
        match activity {
            Activity::Gcp => &self.gcp,
            Activity::Gwp => &self.gwp,
        }
    }
}

/// All classes on a shared, gap-free calendar, in file order.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    classes: Vec<ClassSeries>,
}

/// Mean and sample standard deviation of one series.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std_dev: f64,
}

impl Summary {
    pub fn of(values: &[f64]) -> Self {
        let n = values.len() as f64;
        let mean = values.iter().sum::<f64>() / n;
        let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
        let std_dev = if values.len() > 1 {
            (ss / (n - 1.0)).sqrt()
        } else {
            0.0
        };
        Self { mean, std_dev }
    }
}

impl Dataset {
    /// Builds a dataset, checking that every series shares one calendar.
    pub fn new(classes: Vec<ClassSeries>) -> Result<Self> {
        let first = classes
            .first()
            .ok_or(Error::Ingest("dataset has no rows".into()))?;
        let (start, end) = (first.gcp.start(), first.gcp.end());
        for c in &classes {
            for s in [&c.gcp, &c.gwp] {
                if s.start() != start || s.end() != end {
                    return Err(Error::Ingest(format!(
                        "class {:?} spans {}..{}, expected {start}..{end}",
                        c.name,
                        s.start(),
                        s.end()
                    )));
                }
            }
        }
        Ok(Self { classes })
    }

    pub fn classes(&self) -> &[ClassSeries] {
        &self.classes
    }

    pub fn class(&self, name: &str) -> Option<&ClassSeries> {
        self.classes.iter().find(|c| c.name == name)
    }

    pub fn series(&self, name: &str, activity: Activity) -> Option<&QuarterlySeries> {
        self.class(name).map(|c| c.get(activity))
    }

    pub fn start(&self) -> QuarterIndex {
        self.classes[0].gcp.start()
    }

    pub fn end(&self) -> QuarterIndex {
        self.classes[0].gcp.end()
    }

    /// Observations per series.
    pub fn len(&self) -> usize {
        self.classes[0].gcp.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    /// Number of (class, activity) series.
    pub fn series_count(&self) -> usize {
        2 * self.classes.len()
    }

    /// Sum over all classes of one activity.
    pub fn total(&self, activity: Activity) -> Result<QuarterlySeries> {
        let mut values = vec![0.0; self.len()];
        for c in &self.classes {
            for (acc, v) in values.iter_mut().zip(c.get(activity).values()) {
                *acc += v;
            }
        }
        QuarterlySeries::level(self.start(), values)
    }

    /// Per-class mean and standard deviation over `from..=to`.
    pub fn summary(
        &self,
        from: QuarterIndex,
        to: QuarterIndex,
    ) -> Result<Vec<(String, Summary, Summary)>> {
        self.classes
            .iter()
            .map(|c| {
                let gcp = c.gcp.window(from, to)?;
                let gwp = c.gwp.window(from, to)?;
                Ok((
                    c.name.clone(),
                    Summary::of(gcp.values()),
                    Summary::of(gwp.values()),
                ))
            })
            .collect()
    }

    /// Keeps only observations in `from..=to`.
    pub fn window(&self, from: QuarterIndex, to: QuarterIndex) -> Result<Self> {
        let classes = self
            .classes
            .iter()
            .map(|c| {
                Ok(ClassSeries {
                    name: c.name.clone(),
                    gcp: c.gcp.window(from, to)?,
                    gwp: c.gwp.window(from, to)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        Self::new(classes)
    }

    /// Serializes back to the input schema.
    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(HEADER).map_err(csv_err)?;
        for c in &self.classes {
            for ((q, g), p) in c.gcp.quarters().zip(c.gcp.values()).zip(c.gwp.values()) {
                w.write_record([c.name.clone(), q.to_string(), g.to_string(), p.to_string()])
                    .map_err(csv_err)?;
            }
        }
        let bytes = w.into_inner().map_err(|e| Error::Ingest(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| Error::Ingest(e.to_string()))
    }
}

fn csv_err(e: csv::Error) -> Error {
    Error::Ingest(e.to_string())
}

/// Reads a dataset file.
pub fn ingest(path: impl AsRef<Path>) -> Result<Dataset> {
    let path = path.as_ref();
    let file =
        std::fs::File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
    parse_dataset(file)
}

/// Parses a dataset from any reader.
pub fn parse_dataset(reader: impl Read) -> Result<Dataset> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    let header = rdr.headers().map_err(csv_err)?.clone();
    if header.iter().collect::<Vec<_>>() != HEADER {
        return Err(Error::Ingest(format!(
            "header must be `{}`, found `{}`",
            HEADER.join(","),
            header.iter().collect::<Vec<_>>().join(",")
        )));
    }

    let mut order: Vec<String> = Vec::new();
    let mut rows: BTreeMap<String, BTreeMap<QuarterIndex, (f64, f64)>> = BTreeMap::new();
    for (i, record) in rdr.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(csv_err)?;
        if record.len() != 4 {
            return Err(Error::Ingest(format!(
                "line {line}: expected 4 fields, found {}",
                record.len()
            )));
        }
        let class = record[0].to_string();
        if class.is_empty() {
            return Err(Error::Ingest(format!("line {line}: empty class name")));
        }
        let quarter =
            parse_quarter(&record[1]).map_err(|e| Error::Ingest(format!("line {line}: {e}")))?;
        let number = |field: &str, col: &str| -> Result<f64> {
            field
                .parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| {
                    Error::Ingest(format!(
                        "line {line}: {col} value {field:?} is not a number"
                    ))
                })
        };
        let gcp = number(&record[2], "gcp")?;
        let gwp = number(&record[3], "gwp")?;
        if !rows.contains_key(&class) {
            order.push(class.clone());
        }
        let entry = rows.entry(class.clone()).or_default();
        if entry.insert(quarter, (gcp, gwp)).is_some() {
            return Err(Error::Ingest(format!(
                "line {line}: duplicate row for class {class:?}, quarter {quarter}"
            )));
        }
    }
    if order.is_empty() {
        return Err(Error::Ingest("dataset has no rows".into()));
    }

    let mut classes = Vec::with_capacity(order.len());
    for name in order {
        let by_quarter = &rows[&name];
        let start = *by_quarter.keys().next().expect("class has rows");
        let end = *by_quarter.keys().next_back().expect("class has rows");
        let present: BTreeSet<_> = by_quarter.keys().copied().collect();
        let mut q = start;
        while q <= end {
            if !present.contains(&q) {
                return Err(Error::Ingest(format!(
                    "class {name:?} is missing quarter {q}"
                )));
            }
            q = q.succ();
        }
        let (gcp, gwp): (Vec<f64>, Vec<f64>) = by_quarter.values().copied().unzip();
        classes.push(ClassSeries {
            gcp: QuarterlySeries::level(start, gcp)?,
            gwp: QuarterlySeries::level(start, gwp)?,
            name,
        });
    }
    Dataset::new(classes)
}
