//! Reading point files and resolving dataset sources.
//!
//! Input files hold one point per line. Cells are separated by commas, or by
//! whitespace when a line has no comma. A first line that does not parse as
//! numbers is taken as a header and skipped. Blank lines are ignored.
//!
//! The two named datasets are read from local files:
//! - `spam`: UCI Spambase, <https://archive.ics.uci.edu/dataset/94/spambase>,
//!   4601 rows of 58 columns (57 features plus the class label, all used).
//! - `cloud`: UCI Cloud, <https://archive.ics.uci.edu/dataset/155/cloud>,
//!   1024 rows of 10 columns.

use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::bench::synth::{synth_mixture, SynthSpec};
use crate::error::{ClusterError, Result};
use crate::geometry::Dataset;

pub const SPAM_SHAPE: (usize, usize) = (4601, 58);
pub const CLOUD_SHAPE: (usize, usize) = (1024, 10);

pub const DEFAULT_SPAM_PATH: &str = "data/spambase.data";
pub const DEFAULT_CLOUD_PATH: &str = "data/cloud.data";

#[derive(Debug, Clone, PartialEq)]
pub enum DatasetSource {
    Spam(PathBuf),
    Cloud(PathBuf),
    Csv(PathBuf),
    Synth(SynthSpec),
}

impl DatasetSource {
    /// Short label used in reports.
    pub fn label(&self) -> String {
        match self {
            Self::Spam(_) => "spam".into(),
            Self::Cloud(_) => "cloud".into(),
            Self::Csv(p) => format!("csv:{}", p.display()),
            Self::Synth(s) => format!("synth:{s}"),
        }
    }
}

impl FromStr for DatasetSource {
    type Err = ClusterError;

    /// Accepts `spam`, `spam:PATH`, `cloud`, `cloud:PATH`, `csv:PATH` and
    /// `synth:SPEC` (see [`SynthSpec`]).
    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = match s.split_once(':') {
            Some((kind, rest)) => (kind, Some(rest)),
            None => (s, None),
        };
        match (kind, rest) {
            ("spam", None) => Ok(Self::Spam(DEFAULT_SPAM_PATH.into())),
            ("spam", Some(p)) => Ok(Self::Spam(p.into())),
            ("cloud", None) => Ok(Self::Cloud(DEFAULT_CLOUD_PATH.into())),
            ("cloud", Some(p)) => Ok(Self::Cloud(p.into())),
            ("csv", Some(p)) if !p.is_empty() => Ok(Self::Csv(p.into())),
            ("synth", rest) => Ok(Self::Synth(rest.unwrap_or("").parse()?)),
            _ => Err(ClusterError::UnknownSource(s.to_string())),
        }
    }
}

fn check_shape(data: &Dataset, name: &'static str, (n, d): (usize, usize)) -> Result<()> {
    if data.dim() != d {
        return Err(ClusterError::Shape {
            name,
            what: "d",
            got: data.dim(),
            expected: d,
        });
    }
    if data.len() != n {
        return Err(ClusterError::Shape {
            name,
            what: "n",
            got: data.len(),
            expected: n,
        });
    }
    Ok(())
}

/// Loads a dataset with unit weights. Named datasets must have their
/// published shape.
pub fn load_dataset(source: &DatasetSource) -> Result<Dataset> {
    match source {
        DatasetSource::Spam(path) => {
            let data = read_points(path)?;
            check_shape(&data, "spam", SPAM_SHAPE)?;
            Ok(data)
        }
        DatasetSource::Cloud(path) => {
            let data = read_points(path)?;
            check_shape(&data, "cloud", CLOUD_SHAPE)?;
            Ok(data)
        }
        DatasetSource::Csv(path) => read_points(path),
        DatasetSource::Synth(spec) => synth_mixture(spec),
    }
}

pub fn read_points(path: &Path) -> Result<Dataset> {
    let file = File::open(path).map_err(|e| {
        std::io::Error::new(e.kind(), format!("{}: {e}", path.display()))
    })?;
    parse_points(BufReader::new(file), path)
}

fn split_cells(line: &str) -> Vec<&str> {
    if line.contains(',') {
        line.split(',').map(str::trim).collect()
    } else {
        line.split_whitespace().collect()
    }
}

fn parse_cell(cell: &str) -> Option<f64> {
    cell.parse::<f64>().ok().filter(|v| v.is_finite())
}

/// Row-by-row reader over a point file, for inputs too long to hold in
/// memory. Yields one coordinate vector per data line.
pub struct PointRows<R> {
    lines: std::io::Lines<R>,
    path: PathBuf,
    lineno: usize,
    dim: Option<usize>,
    seen_first: bool,
}

impl<R: BufRead> PointRows<R> {
    /// `path` only labels error messages.
    pub fn new(reader: R, path: &Path) -> Self {
        Self {
            lines: reader.lines(),
            path: path.to_path_buf(),
            lineno: 0,
            dim: None,
            seen_first: false,
        }
    }

    /// Dimension fixed by the first data row, once one has been read.
    pub fn dim(&self) -> Option<usize> {
        self.dim
    }

    fn parse_line(&mut self, line: &str) -> Option<Result<Vec<f64>>> {
        let line = line.trim();
        if line.is_empty() {
            return None;
        }
        let cells = split_cells(line);
        let first = !self.seen_first;
        self.seen_first = true;
        if first && cells.iter().any(|c| parse_cell(c).is_none()) {
            return None;
        }
        let mut row = Vec::with_capacity(cells.len());
        for (col, cell) in cells.iter().enumerate() {
            match parse_cell(cell) {
                Some(v) => row.push(v),
                None => {
                    return Some(Err(ClusterError::Parse {
                        path: self.path.clone(),
                        row: self.lineno,
                        column: col + 1,
                        cell: cell.to_string(),
                    }))
                }
            }
        }
        let dim = *self.dim.get_or_insert(row.len());
        if row.len() != dim {
            return Some(Err(ClusterError::RaggedRow {
                path: self.path.clone(),
                row: self.lineno,
                expected: dim,
                got: row.len(),
            }));
        }
        Some(Ok(row))
    }
}

impl<R: BufRead> Iterator for PointRows<R> {
    type Item = Result<Vec<f64>>;

    fn next(&mut self) -> Option<Self::Item> {
        loop {
            let line = match self.lines.next()? {
                Ok(line) => line,
                Err(e) => return Some(Err(e.into())),
            };
            self.lineno += 1;
            if let Some(item) = self.parse_line(&line) {
                return Some(item);
            }
        }
    }
}

/// Parses points from `reader`; `path` only labels error messages.
pub fn parse_points<R: BufRead>(reader: R, path: &Path) -> Result<Dataset> {
    let mut data: Option<Dataset> = None;
    for row in PointRows::new(reader, path) {
        let row = row?;
        let data = match &mut data {
            Some(d) => d,
            None => data.insert(Dataset::empty(row.len())?),
        };
        data.push(&row, 1.0)?;
    }
    data.ok_or(ClusterError::EmptyDataset)
}
