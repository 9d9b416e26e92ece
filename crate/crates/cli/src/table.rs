//! Result rows, CSV encoding and atomic file output.

use std::collections::BTreeMap;
use std::io::Write;
use std::path::Path;

use circuitlab_core::analysis::SampleStats;
use serde::Serialize;

use crate::error::CliError;

/// Columns every table starts with.
pub const BASE_COLUMNS: [&str; 7] = ["x", "y", "yerr", "n_samples", "L", "p", "seed"];

#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub x: f64,
    pub y: f64,
    pub yerr: f64,
    pub n_samples: usize,
    pub l: usize,
    pub p: f64,
    pub seed: u64,
    pub extra: Vec<f64>,
}

impl Row {
    /// A single-realization value.
    pub fn sample(x: f64, y: f64, l: usize, p: f64, seed: u64) -> Self {
        Self { x, y, yerr: 0.0, n_samples: 1, l, p, seed, extra: Vec::new() }
    }

    pub fn with(mut self, extra: impl IntoIterator<Item = f64>) -> Self {
        self.extra.extend(extra);
        self
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ResultTable {
    pub extra_columns: Vec<&'static str>,
    pub rows: Vec<Row>,
}

impl ResultTable {
    pub fn new(extra_columns: &[&'static str], rows: Vec<Row>) -> Result<Self, CliError> {
        if let Some(r) = rows.iter().find(|r| r.extra.len() != extra_columns.len()) {
            return Err(CliError::Config(format!(
                "row has {} extra values for {} extra columns",
                r.extra.len(),
                extra_columns.len()
            )));
        }
        Ok(Self { extra_columns: extra_columns.to_vec(), rows })
    }

    pub fn columns(&self) -> Vec<&'static str> {
        BASE_COLUMNS.iter().chain(&self.extra_columns).copied().collect()
    }

    pub fn to_csv(&self) -> Vec<u8> {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(self.columns()).expect("in-memory write");
        for r in &self.rows {
            let mut rec = vec![
                r.x.to_string(),
                r.y.to_string(),
                r.yerr.to_string(),
                r.n_samples.to_string(),
                r.l.to_string(),
                r.p.to_string(),
                r.seed.to_string(),
            ];
            rec.extend(r.extra.iter().map(f64::to_string));
            w.write_record(rec).expect("in-memory write");
        }
        w.into_inner().expect("in-memory flush")
    }

    /// Mean of `y` over rows sharing `(L, p, x)`, in sorted order. Rows
    /// that already aggregate several samples keep their own error.
    pub fn aggregate(&self) -> Vec<Point> {
        self.aggregate_by(|r| r.y)
    }

    pub fn aggregate_by(&self, value: impl Fn(&Row) -> f64) -> Vec<Point> {
        let mut groups: BTreeMap<(usize, Key, Key), Vec<&Row>> = BTreeMap::new();
        for r in &self.rows {
            groups.entry((r.l, Key(r.p), Key(r.x))).or_default().push(r);
        }
        groups
            .into_iter()
            .map(|((l, p, x), rows)| {
                if let [r] = rows[..] {
                    return Point { l, p: p.0, x: x.0, y: value(r), yerr: r.yerr, n: r.n_samples };
                }
                let ys: Vec<f64> = rows.iter().map(|r| value(r)).collect();
                let s = SampleStats::from_samples(&ys);
                Point { l, p: p.0, x: x.0, y: s.mean, yerr: s.stderr, n: rows.iter().map(|r| r.n_samples).sum() }
            })
            .collect()
    }
}

/// Totally ordered float key.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Key(f64);

impl Eq for Key {}

impl PartialOrd for Key {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Key {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        self.0.total_cmp(&other.0)
    }
}

/// One aggregated point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Point {
    #[serde(rename = "L")]
    pub l: usize,
    pub p: f64,
    pub x: f64,
    pub y: f64,
    pub yerr: f64,
    pub n: usize,
}

/// Writes through a temporary file in the same directory and renames it
/// into place, so the target is either absent or complete.
pub fn write_atomic(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    let io = |source| CliError::Io { path: path.display().to_string(), source };
    let dir = path.parent().filter(|d| !d.as_os_str().is_empty()).unwrap_or(Path::new("."));
    let mut tmp = tempfile::NamedTempFile::new_in(dir).map_err(io)?;
    tmp.write_all(bytes).map_err(io)?;
    tmp.as_file().sync_all().map_err(io)?;
    tmp.persist(path).map_err(|e| io(e.error))?;
    Ok(())
}
