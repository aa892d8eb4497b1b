//! Ranking filters: basic importance measures, their normalization and
//! weighted combination, and the top-`m` cutting rule.

mod measures;

pub use measures::{
    discretize, fit_criterion_scores, spearman_scores, symmetric_uncertainty,
    symmetric_uncertainty_scores, vdm_scores,
};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::dataset::Dataset;
use crate::error::{Error, Result};

/// A basic feature importance measure.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Measure {
    Spearman,
    #[serde(rename = "su")]
    SymmetricUncertainty,
    #[serde(rename = "fc")]
    FitCriterion,
    Vdm,
}

impl Measure {
    pub const ALL: [Measure; 4] = [
        Measure::Spearman,
        Measure::SymmetricUncertainty,
        Measure::FitCriterion,
        Measure::Vdm,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Spearman => "spearman",
            Measure::SymmetricUncertainty => "su",
            Measure::FitCriterion => "fc",
            Measure::Vdm => "vdm",
        }
    }

    /// Raw (unnormalized) scores for every feature of `ds`.
    pub fn scores(self, ds: &Dataset, params: &FilterParams) -> ImportanceVector {
        let scores = match self {
            Measure::Spearman => spearman_scores(ds),
            Measure::SymmetricUncertainty => symmetric_uncertainty_scores(ds, params.bins),
            Measure::FitCriterion => fit_criterion_scores(ds, params.fc_epsilon),
            Measure::Vdm => vdm_scores(ds, params.bins),
        };
        ImportanceVector::new(self.name(), scores)
    }

    /// Parses a comma-separated list such as `spearman,su,fc,vdm`.
    pub fn parse_list(s: &str) -> Result<Vec<Measure>> {
        s.split(',')
            .map(str::trim)
            .filter(|p| !p.is_empty())
            .map(str::parse)
            .collect()
    }
}

impl std::str::FromStr for Measure {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "spearman" => Ok(Measure::Spearman),
            "su" | "symmetric_uncertainty" => Ok(Measure::SymmetricUncertainty),
            "fc" | "fit_criterion" => Ok(Measure::FitCriterion),
            "vdm" => Ok(Measure::Vdm),
            _ => Err(Error::Unknown {
                kind: "measure",
                name: s.to_string(),
            }),
        }
    }
}

impl std::fmt::Display for Measure {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

/// Knobs shared by the measures.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterParams {
    /// Equal-width bins used by SU and VDM.
    pub bins: usize,
    /// Floor added to class standard deviations in the fit criterion.
    pub fc_epsilon: f64,
    /// Min-max normalize each measure before combining.
    pub normalize: bool,
}

impl Default for FilterParams {
    fn default() -> Self {
        Self {
            bins: 10,
            fc_epsilon: 1e-12,
            normalize: true,
        }
    }
}

/// One score per feature, tagged with the measure that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ImportanceVector {
    pub measure_name: String,
    pub scores: Vec<f64>,
}

impl ImportanceVector {
    pub fn new(measure_name: impl Into<String>, scores: Vec<f64>) -> Self {
        Self {
            measure_name: measure_name.into(),
            scores,
        }
    }

    pub fn len(&self) -> usize {
        self.scores.len()
    }

    pub fn is_empty(&self) -> bool {
        self.scores.is_empty()
    }
}

/// Min-max rescale to `[0, 1]`. A constant vector maps to all zeros.
pub fn normalize(v: &ImportanceVector) -> ImportanceVector {
    let (min, max) = v
        .scores
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &s| (lo.min(s), hi.max(s)));
    let range = max - min;
    let scores = if range > 0.0 {
        v.scores.iter().map(|&s| ((s - min) / range).clamp(0.0, 1.0)).collect()
    } else {
        vec![0.0; v.scores.len()]
    };
    ImportanceVector::new(v.measure_name.clone(), scores)
}

/// The cutting rule: keep the `m` best-ranked features.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct CuttingRule {
    pub m: usize,
}

impl CuttingRule {
    pub fn new(m: usize) -> Result<Self> {
        if m == 0 {
            return Err(Error::Config("cutting rule must keep at least one feature".into()));
        }
        Ok(Self { m })
    }

    pub fn effective(&self, feature_count: usize) -> usize {
        self.m.min(feature_count)
    }
}

/// Indices of the `m` highest scores, ordered by descending score then
/// ascending index.
pub fn cut_top_m(combined: &[f64], rule: CuttingRule) -> Vec<usize> {
    let m = rule.effective(combined.len());
    let mut order: Vec<usize> = (0..combined.len()).collect();
    let cmp = |a: &usize, b: &usize| combined[*b].total_cmp(&combined[*a]).then(a.cmp(b));
    if m < order.len() {
        order.select_nth_unstable_by(m, cmp);
        order.truncate(m);
    }
    order.sort_unstable_by(cmp);
    order
}

/// `N` normalized importance measures for one dataset. The order of
/// `measures` fixes the meaning of each weight-vector coordinate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FilterEnsemble {
    measures: Vec<String>,
    vectors: Vec<ImportanceVector>,
    feature_count: usize,
}

impl FilterEnsemble {
    /// Computes every measure on `ds` (in parallel) and normalizes them.
    pub fn build(ds: &Dataset, measures: &[Measure], params: &FilterParams) -> Result<Self> {
        if measures.is_empty() {
            return Err(Error::Config("at least one measure is required".into()));
        }
        let vectors: Vec<ImportanceVector> = measures
            .par_iter()
            .map(|m| {
                let raw = m.scores(ds, params);
                if params.normalize {
                    normalize(&raw)
                } else {
                    raw
                }
            })
            .collect();
        Self::from_vectors(vectors)
    }

    /// Wraps already-normalized vectors, which must share one length.
    pub fn from_vectors(vectors: Vec<ImportanceVector>) -> Result<Self> {
        let Some(first) = vectors.first() else {
            return Err(Error::Config("at least one measure is required".into()));
        };
        let feature_count = first.len();
        for v in &vectors {
            if v.len() != feature_count {
                return Err(Error::DimensionMismatch {
                    expected: feature_count,
                    actual: v.len(),
                });
            }
            if v.scores.iter().any(|s| !s.is_finite()) {
                return Err(Error::Config(format!(
                    "measure {} produced a non-finite score",
                    v.measure_name
                )));
            }
        }
        Ok(Self {
            measures: vectors.iter().map(|v| v.measure_name.clone()).collect(),
            vectors,
            feature_count,
        })
    }

    /// Number of measures, i.e. the dimension of the weight space.
    pub fn dim(&self) -> usize {
        self.vectors.len()
    }

    pub fn feature_count(&self) -> usize {
        self.feature_count
    }

    pub fn measures(&self) -> &[String] {
        &self.measures
    }

    pub fn vectors(&self) -> &[ImportanceVector] {
        &self.vectors
    }

    /// `combined[j] = Σ_k weights[k] · measure_k[j]`.
    pub fn combine(&self, weights: &[f64]) -> Result<Vec<f64>> {
        if weights.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                actual: weights.len(),
            });
        }
        let mut combined = vec![0.0; self.feature_count];
        for (w, v) in weights.iter().zip(&self.vectors) {
            if *w == 0.0 {
                continue;
            }
            for (c, s) in combined.iter_mut().zip(&v.scores) {
                *c += w * s;
            }
        }
        Ok(combined)
    }
}
