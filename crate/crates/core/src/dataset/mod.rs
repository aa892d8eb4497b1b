//! Datasets, CSV loading and cross-validation splits.

mod folds;
mod io;
mod manifest;
mod synthetic;

pub use folds::{make_folds, stratified_kfold, FoldSplit, FoldStrategy};
pub use io::{load_csv, read_table, write_csv, LabelColumn, LabeledTable};
pub use manifest::{parse_manifest, ManifestEntry};
pub use synthetic::{planted, PlantedSpec};

use ndarray::{Array2, ArrayView1};

use crate::error::{Error, Result};

/// A dense numeric feature matrix with one class label per row.
///
/// Rows are objects, columns are features. Labels are dense class ids
/// `0..class_count()` and `class_names[id]` recovers the original label text.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    name: String,
    feature_names: Vec<String>,
    features: Array2<f64>,
    labels: Vec<usize>,
    class_names: Vec<String>,
}

impl Dataset {
    /// Builds a dataset and checks every invariant: matching shapes, finite
    /// values, at least two classes, and at least two objects per class.
    pub fn new(
        name: impl Into<String>,
        feature_names: Vec<String>,
        features: Array2<f64>,
        labels: Vec<usize>,
        class_names: Vec<String>,
    ) -> Result<Self> {
        let (rows, cols) = features.dim();
        if rows == 0 || cols == 0 {
            return Err(Error::InvalidDataset(format!(
                "empty feature matrix ({rows}x{cols})"
            )));
        }
        if labels.len() != rows {
            return Err(Error::InvalidDataset(format!(
                "{} labels for {rows} objects",
                labels.len()
            )));
        }
        if feature_names.len() != cols {
            return Err(Error::InvalidDataset(format!(
                "{} feature names for {cols} features",
                feature_names.len()
            )));
        }
        if let Some(((r, c), _)) = features.indexed_iter().find(|(_, v)| !v.is_finite()) {
            return Err(Error::Parse {
                row: r,
                column: c,
                message: "value is not finite".into(),
            });
        }
        let mut counts = vec![0usize; class_names.len()];
        for &y in &labels {
            if y >= class_names.len() {
                return Err(Error::InvalidDataset(format!(
                    "label id {y} out of range for {} classes",
                    class_names.len()
                )));
            }
            counts[y] += 1;
        }
        if counts.iter().filter(|&&c| c > 0).count() < 2 {
            return Err(Error::TooFewClasses);
        }
        if let Some((class, &count)) = counts.iter().enumerate().find(|(_, &c)| c < 2) {
            return Err(Error::ClassTooSmall {
                class: class_names[class].clone(),
                count,
            });
        }
        Ok(Self {
            name: name.into(),
            feature_names,
            features,
            labels,
            class_names,
        })
    }

    /// Convenience constructor with generated feature and class names.
    pub fn from_parts(name: impl Into<String>, features: Array2<f64>, labels: Vec<usize>) -> Result<Self> {
        let cols = features.ncols();
        let classes = labels.iter().copied().max().map_or(0, |m| m + 1);
        Self::new(
            name,
            (0..cols).map(|j| format!("f{j}")).collect(),
            features,
            labels,
            (0..classes).map(|c| c.to_string()).collect(),
        )
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn set_name(&mut self, name: impl Into<String>) {
        self.name = name.into();
    }

    pub fn features(&self) -> &Array2<f64> {
        &self.features
    }

    pub fn feature_names(&self) -> &[String] {
        &self.feature_names
    }

    pub fn column(&self, j: usize) -> ArrayView1<'_, f64> {
        self.features.column(j)
    }

    pub fn labels(&self) -> &[usize] {
        &self.labels
    }

    pub fn class_names(&self) -> &[String] {
        &self.class_names
    }

    pub fn class_count(&self) -> usize {
        self.class_names.len()
    }

    pub fn feature_count(&self) -> usize {
        self.features.ncols()
    }

    pub fn object_count(&self) -> usize {
        self.features.nrows()
    }

    /// Number of objects in each class, indexed by class id.
    pub fn class_sizes(&self) -> Vec<usize> {
        let mut counts = vec![0; self.class_count()];
        for &y in &self.labels {
            counts[y] += 1;
        }
        counts
    }

    /// Same dataset with feature columns reordered: new column `j` is old
    /// column `order[j]`.
    pub fn permute_features(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.feature_count() {
            return Err(Error::DimensionMismatch {
                expected: self.feature_count(),
                actual: order.len(),
            });
        }
        let features = self.features.select(ndarray::Axis(1), order);
        let names = order.iter().map(|&j| self.feature_names[j].clone()).collect();
        Self::new(
            self.name.clone(),
            names,
            features,
            self.labels.clone(),
            self.class_names.clone(),
        )
    }

    /// Same dataset with objects reordered: new row `i` is old row `order[i]`.
    pub fn permute_objects(&self, order: &[usize]) -> Result<Self> {
        if order.len() != self.object_count() {
            return Err(Error::DimensionMismatch {
                expected: self.object_count(),
                actual: order.len(),
            });
        }
        let features = self.features.select(ndarray::Axis(0), order);
        let labels = order.iter().map(|&i| self.labels[i]).collect();
        Self::new(
            self.name.clone(),
            self.feature_names.clone(),
            features,
            labels,
            self.class_names.clone(),
        )
    }
}
