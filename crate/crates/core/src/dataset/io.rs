use std::fs::File;
use std::io::Write;
use std::path::Path;

use ndarray::Array2;

use super::Dataset;
use crate::error::{Error, Result};

/// Which CSV column holds the class label.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum LabelColumn {
    Index(usize),
    Name(String),
    /// The rightmost column.
    Last,
}

impl std::str::FromStr for LabelColumn {
    type Err = std::convert::Infallible;

    /// Digits select by index, `last` (or an empty string) selects the final
    /// column, anything else is a header name.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        Ok(if s.is_empty() || s.eq_ignore_ascii_case("last") {
            LabelColumn::Last
        } else if let Ok(i) = s.parse() {
            LabelColumn::Index(i)
        } else {
            LabelColumn::Name(s.to_string())
        })
    }
}

impl std::fmt::Display for LabelColumn {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            LabelColumn::Index(i) => write!(f, "{i}"),
            LabelColumn::Name(n) => f.write_str(n),
            LabelColumn::Last => f.write_str("last"),
        }
    }
}

/// A parsed CSV table before the class-size invariants are checked.
#[derive(Debug, Clone, PartialEq)]
pub struct LabeledTable {
    pub name: String,
    pub feature_names: Vec<String>,
    pub features: Array2<f64>,
    pub labels: Vec<usize>,
    pub class_names: Vec<String>,
}

impl TryFrom<LabeledTable> for Dataset {
    type Error = Error;

    fn try_from(t: LabeledTable) -> Result<Self> {
        Dataset::new(t.name, t.feature_names, t.features, t.labels, t.class_names)
    }
}

/// Loads a comma-separated table into a validated [`Dataset`].
///
/// Every non-label cell must parse as a finite number; empty cells are
/// rejected. Labels are arbitrary strings, re-encoded as dense ids in order of
/// first appearance. Parse errors carry 1-based file line and column numbers.
pub fn load_csv(path: impl AsRef<Path>, label: &LabelColumn, has_header: bool) -> Result<Dataset> {
    read_table(path, label, has_header)?.try_into()
}

/// Parses a CSV file without enforcing the class-count invariants.
pub fn read_table(path: impl AsRef<Path>, label: &LabelColumn, has_header: bool) -> Result<LabeledTable> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(has_header)
        .trim(csv::Trim::All)
        .from_reader(file);

    let header: Option<Vec<String>> = if has_header {
        let h = reader.headers().map_err(|e| Error::io(path, e))?;
        Some(h.iter().map(str::to_string).collect())
    } else {
        None
    };

    let mut rows: Vec<csv::StringRecord> = Vec::new();
    for record in reader.records() {
        rows.push(record.map_err(|e| Error::io(path, e))?);
    }
    let width = match (&header, rows.first()) {
        (Some(h), _) => h.len(),
        (None, Some(r)) => r.len(),
        (None, None) => 0,
    };
    if rows.is_empty() || width < 2 {
        return Err(Error::InvalidDataset(format!(
            "{} needs at least one object, one feature and a label column",
            path.display()
        )));
    }

    let label_idx = match label {
        LabelColumn::Last => width - 1,
        LabelColumn::Index(i) if *i < width => *i,
        LabelColumn::Index(_) => return Err(Error::MissingLabelColumn(label.to_string())),
        LabelColumn::Name(name) => header
            .as_ref()
            .and_then(|h| h.iter().position(|c| c == name))
            .ok_or_else(|| Error::MissingLabelColumn(name.clone()))?,
    };

    let line_offset = if has_header { 2 } else { 1 };
    let cols = width - 1;
    let mut data = Vec::with_capacity(rows.len() * cols);
    let mut labels = Vec::with_capacity(rows.len());
    let mut class_names: Vec<String> = Vec::new();
    for (r, record) in rows.iter().enumerate() {
        let line = r + line_offset;
        if record.len() != width {
            return Err(Error::Parse {
                row: line,
                column: record.len().min(width) + 1,
                message: format!("expected {width} cells, found {}", record.len()),
            });
        }
        for (c, cell) in record.iter().enumerate() {
            if c == label_idx {
                if cell.is_empty() {
                    return Err(Error::Parse {
                        row: line,
                        column: c + 1,
                        message: "missing label".into(),
                    });
                }
                let id = match class_names.iter().position(|n| n == cell) {
                    Some(id) => id,
                    None => {
                        class_names.push(cell.to_string());
                        class_names.len() - 1
                    }
                };
                labels.push(id);
                continue;
            }
            if cell.is_empty() {
                return Err(Error::Parse {
                    row: line,
                    column: c + 1,
                    message: "missing value".into(),
                });
            }
            match cell.parse::<f64>() {
                Ok(v) if v.is_finite() => data.push(v),
                _ => {
                    return Err(Error::Parse {
                        row: line,
                        column: c + 1,
                        message: format!("{cell:?} is not a finite number"),
                    })
                }
            }
        }
    }

    let feature_names = match header {
        Some(h) => h
            .into_iter()
            .enumerate()
            .filter(|&(c, _)| c != label_idx)
            .map(|(_, n)| n)
            .collect(),
        None => (0..cols).map(|j| format!("f{j}")).collect(),
    };
    let features = Array2::from_shape_vec((rows.len(), cols), data)
        .map_err(|e| Error::InvalidDataset(e.to_string()))?;
    let name = path
        .file_stem()
        .map(|s| s.to_string_lossy().into_owned())
        .unwrap_or_default();
    Ok(LabeledTable {
        name,
        feature_names,
        features,
        labels,
        class_names,
    })
}

/// Writes a dataset with a header row and the label as the last column.
///
/// Values use the shortest decimal form that parses back to the same `f64`,
/// so [`load_csv`] with [`LabelColumn::Last`] reproduces the matrix exactly.
pub fn write_csv(ds: &Dataset, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let file = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut writer = csv::Writer::from_writer(file);
    let io_err = |e: csv::Error| Error::io(path, e);

    let mut header: Vec<&str> = ds.feature_names().iter().map(String::as_str).collect();
    header.push("label");
    writer.write_record(&header).map_err(io_err)?;
    let mut cells: Vec<String> = Vec::with_capacity(ds.feature_count() + 1);
    for (row, &y) in ds.features().rows().into_iter().zip(ds.labels()) {
        cells.clear();
        cells.extend(row.iter().map(|v| v.to_string()));
        cells.push(ds.class_names()[y].clone());
        writer.write_record(&cells).map_err(io_err)?;
    }
    let mut inner = writer
        .into_inner()
        .map_err(|e| Error::io(path, e.error()))?;
    inner.flush().map_err(|e| Error::io(path, e))
}
