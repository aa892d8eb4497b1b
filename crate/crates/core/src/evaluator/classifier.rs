//! Built-in classifiers behind a fit/predict interface.

use ndarray::{Array2, ArrayView1, ArrayView2};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A trained model.
pub trait Model: Send + Sync {
    /// One class id per row of `x`.
    fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize>;
}

/// Anything that can be trained on a feature matrix and class ids.
pub trait Classifier: Send + Sync {
    fn name(&self) -> String;

    fn fit(&self, x: ArrayView2<'_, f64>, y: &[usize]) -> Result<Box<dyn Model>>;
}

fn check_train(x: ArrayView2<'_, f64>, y: &[usize]) -> Result<Option<usize>> {
    if x.nrows() == 0 || y.is_empty() {
        return Err(Error::EmptyTrainSet);
    }
    if x.nrows() != y.len() {
        return Err(Error::LengthMismatch {
            left: x.nrows(),
            right: y.len(),
        });
    }
    if y.iter().all(|&c| c == y[0]) {
        log::warn!("training set has a single class {}, predicting it everywhere", y[0]);
        return Ok(Some(y[0]));
    }
    Ok(None)
}

struct Constant(usize);

impl Model for Constant {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        vec![self.0; x.nrows()]
    }
}

fn squared_distance(a: ArrayView1<'_, f64>, b: ArrayView1<'_, f64>) -> f64 {
    a.iter().zip(b.iter()).map(|(p, q)| (p - q) * (p - q)).sum()
}

/// Assigns each object to the class with the nearest mean (Euclidean).
#[derive(Debug, Clone, Copy, Default)]
pub struct NearestCentroid;

struct CentroidModel {
    classes: Vec<usize>,
    centroids: Array2<f64>,
}

impl Model for CentroidModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        x.rows()
            .into_iter()
            .map(|row| {
                let mut best = 0;
                let mut best_dist = f64::INFINITY;
                for (k, centroid) in self.centroids.rows().into_iter().enumerate() {
                    let d = squared_distance(row, centroid);
                    if d < best_dist {
                        best_dist = d;
                        best = k;
                    }
                }
                self.classes[best]
            })
            .collect()
    }
}

impl Classifier for NearestCentroid {
    fn name(&self) -> String {
        "nearest-centroid".into()
    }

    fn fit(&self, x: ArrayView2<'_, f64>, y: &[usize]) -> Result<Box<dyn Model>> {
        if let Some(only) = check_train(x, y)? {
            return Ok(Box::new(Constant(only)));
        }
        let mut classes: Vec<usize> = y.to_vec();
        classes.sort_unstable();
        classes.dedup();
        let mut centroids = Array2::zeros((classes.len(), x.ncols()));
        let mut counts = vec![0usize; classes.len()];
        for (row, &label) in x.rows().into_iter().zip(y) {
            let k = classes.binary_search(&label).expect("label collected above");
            counts[k] += 1;
            let mut c = centroids.row_mut(k);
            c += &row;
        }
        for (mut c, &n) in centroids.rows_mut().into_iter().zip(&counts) {
            c /= n as f64;
        }
        Ok(Box::new(CentroidModel { classes, centroids }))
    }
}

/// `k`-nearest neighbours with Euclidean distance and majority vote.
///
/// Distance ties go to the earlier training row; vote ties go to the class
/// whose nearest member is closest.
#[derive(Debug, Clone, Copy)]
pub struct Knn {
    pub k: usize,
}

impl Default for Knn {
    fn default() -> Self {
        Self { k: 5 }
    }
}

struct KnnModel {
    k: usize,
    x: Array2<f64>,
    y: Vec<usize>,
}

impl Model for KnnModel {
    fn predict(&self, x: ArrayView2<'_, f64>) -> Vec<usize> {
        let classes = self.y.iter().copied().max().unwrap_or(0) + 1;
        let mut dists: Vec<(f64, usize)> = Vec::with_capacity(self.x.nrows());
        x.rows()
            .into_iter()
            .map(|row| {
                dists.clear();
                dists.extend(
                    self.x
                        .rows()
                        .into_iter()
                        .enumerate()
                        .map(|(i, train)| (squared_distance(row, train), i)),
                );
                let k = self.k.min(dists.len());
                let cmp = |a: &(f64, usize), b: &(f64, usize)| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1));
                if k < dists.len() {
                    dists.select_nth_unstable_by(k, cmp);
                }
                let nearest = &mut dists[..k];
                nearest.sort_unstable_by(cmp);
                let mut votes = vec![0usize; classes];
                for &(_, i) in nearest.iter() {
                    votes[self.y[i]] += 1;
                }
                let top = *votes.iter().max().unwrap_or(&0);
                // first neighbour (closest) among the tied classes wins
                nearest
                    .iter()
                    .map(|&(_, i)| self.y[i])
                    .find(|&c| votes[c] == top)
                    .unwrap_or(0)
            })
            .collect()
    }
}

impl Classifier for Knn {
    fn name(&self) -> String {
        format!("knn-{}", self.k)
    }

    fn fit(&self, x: ArrayView2<'_, f64>, y: &[usize]) -> Result<Box<dyn Model>> {
        if self.k == 0 {
            return Err(Error::Config("k-NN needs k >= 1".into()));
        }
        if let Some(only) = check_train(x, y)? {
            return Ok(Box::new(Constant(only)));
        }
        Ok(Box::new(KnnModel {
            k: self.k,
            x: x.to_owned(),
            y: y.to_vec(),
        }))
    }
}

/// Classifier selection by name, as used in configuration files and flags.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase")]
pub enum ClassifierKind {
    #[serde(rename = "nc")]
    #[default]
    NearestCentroid,
    Knn { k: usize },
}

impl ClassifierKind {
    pub fn build(self) -> Box<dyn Classifier> {
        match self {
            ClassifierKind::NearestCentroid => Box::new(NearestCentroid),
            ClassifierKind::Knn { k } => Box::new(Knn { k }),
        }
    }
}

impl std::str::FromStr for ClassifierKind {
    type Err = Error;

    /// `nc`, `knn` (k = 5) or `knn:K`.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "nc" | "nearest-centroid" | "centroid" => Ok(ClassifierKind::NearestCentroid),
            "knn" => Ok(ClassifierKind::Knn { k: 5 }),
            other => other
                .strip_prefix("knn:")
                .and_then(|k| k.parse().ok())
                .filter(|&k| k > 0)
                .map(|k| ClassifierKind::Knn { k })
                .ok_or_else(|| Error::Unknown {
                    kind: "classifier",
                    name: s.to_string(),
                }),
        }
    }
}

impl std::fmt::Display for ClassifierKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            ClassifierKind::NearestCentroid => f.write_str("nc"),
            ClassifierKind::Knn { k } => write!(f, "knn:{k}"),
        }
    }
}
