use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Classification quality used as the point score.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Metric {
    /// Unweighted mean of per-class F1.
    #[default]
    Macro,
    /// F1 of class id 1 only.
    Binary,
}

impl Metric {
    pub fn score(self, truth: &[usize], predicted: &[usize]) -> Result<f64> {
        match self {
            Metric::Macro => f1_macro(truth, predicted),
            Metric::Binary => f1_for_class(truth, predicted, 1),
        }
    }
}

impl std::str::FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "macro" => Ok(Metric::Macro),
            "binary" => Ok(Metric::Binary),
            _ => Err(Error::Unknown {
                kind: "metric",
                name: s.to_string(),
            }),
        }
    }
}

fn check_lengths(truth: &[usize], predicted: &[usize]) -> Result<()> {
    if truth.len() != predicted.len() {
        return Err(Error::LengthMismatch {
            left: truth.len(),
            right: predicted.len(),
        });
    }
    if truth.is_empty() {
        return Err(Error::Config("cannot score an empty prediction set".into()));
    }
    Ok(())
}

fn f1_from_counts(tp: usize, fp: usize, fn_: usize) -> f64 {
    // 2PR/(P+R) = 2tp/(2tp+fp+fn); zero when there is nothing to score
    let denom = 2 * tp + fp + fn_;
    if tp == 0 || denom == 0 {
        0.0
    } else {
        2.0 * tp as f64 / denom as f64
    }
}

/// F1 of a single class treated as positive.
pub fn f1_for_class(truth: &[usize], predicted: &[usize], class: usize) -> Result<f64> {
    check_lengths(truth, predicted)?;
    let (mut tp, mut fp, mut fn_) = (0, 0, 0);
    for (&t, &p) in truth.iter().zip(predicted) {
        match (t == class, p == class) {
            (true, true) => tp += 1,
            (false, true) => fp += 1,
            (true, false) => fn_ += 1,
            (false, false) => {}
        }
    }
    Ok(f1_from_counts(tp, fp, fn_))
}

/// Macro-averaged F1 over every class that occurs in either label list.
pub fn f1_macro(truth: &[usize], predicted: &[usize]) -> Result<f64> {
    check_lengths(truth, predicted)?;
    let classes = truth.iter().chain(predicted).copied().max().unwrap_or(0) + 1;
    let mut tp = vec![0usize; classes];
    let mut fp = vec![0usize; classes];
    let mut fn_ = vec![0usize; classes];
    let mut present = vec![false; classes];
    for (&t, &p) in truth.iter().zip(predicted) {
        present[t] = true;
        present[p] = true;
        if t == p {
            tp[t] += 1;
        } else {
            fp[p] += 1;
            fn_[t] += 1;
        }
    }
    let (sum, count) = (0..classes)
        .filter(|&c| present[c])
        .fold((0.0, 0usize), |(s, n), c| (s + f1_from_counts(tp[c], fp[c], fn_[c]), n + 1));
    Ok((sum / count as f64).clamp(0.0, 1.0))
}
