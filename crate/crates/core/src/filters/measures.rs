//! The four basic importance measures. Each maps a dataset to one raw,
//! non-negative score per feature.

use ndarray::ArrayView1;

use crate::dataset::Dataset;

/// Equal-width bin index of every value over the observed `min..=max`.
/// A constant column lands entirely in bin 0.
pub fn discretize(values: ArrayView1<'_, f64>, bins: usize) -> Vec<usize> {
    let bins = bins.max(1);
    let (min, max) = values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &v| (lo.min(v), hi.max(v)));
    let width = (max - min) / bins as f64;
    values
        .iter()
        .map(|&v| {
            if width > 0.0 {
                (((v - min) / width).floor() as usize).min(bins - 1)
            } else {
                0
            }
        })
        .collect()
}

/// Average (fractional) ranks, 1-based, ties sharing the mean of their positions.
pub(crate) fn average_ranks(values: &[f64]) -> Vec<f64> {
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_by(|&a, &b| values[a].total_cmp(&values[b]));
    let mut ranks = vec![0.0; values.len()];
    let mut start = 0;
    while start < order.len() {
        let mut end = start + 1;
        while end < order.len() && values[order[end]] == values[order[start]] {
            end += 1;
        }
        // positions start..end (0-based) share rank mean((start+1)..=end)
        let rank = (start + end + 1) as f64 / 2.0;
        for &i in &order[start..end] {
            ranks[i] = rank;
        }
        start = end;
    }
    ranks
}

fn pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx = x.iter().sum::<f64>() / n;
    let my = y.iter().sum::<f64>() / n;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (da, db) = (a - mx, b - my);
        sxy += da * db;
        sxx += da * da;
        syy += db * db;
    }
    if sxx == 0.0 || syy == 0.0 {
        0.0
    } else {
        sxy / (sxx * syy).sqrt()
    }
}

/// `|ρ|` of the Spearman rank correlation between each feature and the class
/// ids taken as numbers.
pub fn spearman_scores(ds: &Dataset) -> Vec<f64> {
    let labels: Vec<f64> = ds.labels().iter().map(|&y| y as f64).collect();
    let label_ranks = average_ranks(&labels);
    (0..ds.feature_count())
        .map(|j| {
            let column: Vec<f64> = ds.column(j).to_vec();
            pearson(&average_ranks(&column), &label_ranks).abs()
        })
        .collect()
}

/// Symmetric uncertainty `2·I(X;Y) / (H(X)+H(Y))` of two discrete variables,
/// in bits. Zero when both entropies vanish.
pub fn symmetric_uncertainty(x: &[usize], y: &[usize]) -> f64 {
    let n = x.len() as f64;
    let kx = x.iter().max().map_or(0, |m| m + 1);
    let ky = y.iter().max().map_or(0, |m| m + 1);
    let mut joint = vec![0usize; kx * ky];
    let mut px = vec![0usize; kx];
    let mut py = vec![0usize; ky];
    for (&a, &b) in x.iter().zip(y) {
        joint[a * ky + b] += 1;
        px[a] += 1;
        py[b] += 1;
    }
    let entropy = |counts: &[usize]| -> f64 {
        counts
            .iter()
            .filter(|&&c| c > 0)
            .map(|&c| {
                let p = c as f64 / n;
                -p * p.log2()
            })
            .sum()
    };
    let hx = entropy(&px);
    let hy = entropy(&py);
    if hx + hy <= 0.0 {
        return 0.0;
    }
    let mut mi = 0.0;
    for a in 0..kx {
        for b in 0..ky {
            let c = joint[a * ky + b];
            if c > 0 {
                let pab = c as f64 / n;
                mi += pab * (c as f64 * n / (px[a] as f64 * py[b] as f64)).log2();
            }
        }
    }
    (2.0 * mi / (hx + hy)).clamp(0.0, 1.0)
}

/// Symmetric uncertainty between each discretized feature and the labels.
pub fn symmetric_uncertainty_scores(ds: &Dataset, bins: usize) -> Vec<f64> {
    (0..ds.feature_count())
        .map(|j| symmetric_uncertainty(&discretize(ds.column(j), bins), ds.labels()))
        .collect()
}

/// Fraction of objects whose value is closest, in per-class standard
/// deviations, to their own class mean. Ties go to the lowest class id and
/// `epsilon` floors the deviation.
pub fn fit_criterion_scores(ds: &Dataset, epsilon: f64) -> Vec<f64> {
    let classes = ds.class_count();
    let sizes = ds.class_sizes();
    let labels = ds.labels();
    let n = ds.object_count() as f64;
    let mut means = vec![0.0; classes];
    let mut stds = vec![0.0; classes];
    (0..ds.feature_count())
        .map(|j| {
            let column = ds.column(j);
            means.iter_mut().for_each(|m| *m = 0.0);
            stds.iter_mut().for_each(|s| *s = 0.0);
            for (&v, &y) in column.iter().zip(labels) {
                means[y] += v;
            }
            for (m, &s) in means.iter_mut().zip(&sizes) {
                *m /= s as f64;
            }
            for (&v, &y) in column.iter().zip(labels) {
                stds[y] += (v - means[y]).powi(2);
            }
            for (s, &size) in stds.iter_mut().zip(&sizes) {
                *s = (*s / size as f64).sqrt();
            }
            let hits = column
                .iter()
                .zip(labels)
                .filter(|&(&v, &y)| {
                    let mut best = 0;
                    let mut best_dist = f64::INFINITY;
                    for c in 0..classes {
                        let d = (v - means[c]).abs() / (stds[c] + epsilon);
                        if d < best_dist {
                            best_dist = d;
                            best = c;
                        }
                    }
                    best == y
                })
                .count();
            hits as f64 / n
        })
        .collect()
}

/// Value difference metric: sum over unordered pairs of non-empty bins of the
/// squared distance between their class-conditional distributions.
pub fn vdm_scores(ds: &Dataset, bins: usize) -> Vec<f64> {
    let classes = ds.class_count();
    (0..ds.feature_count())
        .map(|j| {
            let codes = discretize(ds.column(j), bins);
            let mut counts = vec![0usize; bins.max(1) * classes];
            let mut totals = vec![0usize; bins.max(1)];
            for (&b, &y) in codes.iter().zip(ds.labels()) {
                counts[b * classes + y] += 1;
                totals[b] += 1;
            }
            // Σ_{pairs} |a - b|² = K Σ |a|² - |Σ a|² over the K non-empty bins
            let mut k = 0.0;
            let mut sum_sq = 0.0;
            let mut sum = vec![0.0; classes];
            for (b, &t) in totals.iter().enumerate() {
                if t == 0 {
                    continue;
                }
                k += 1.0;
                for c in 0..classes {
                    let p = counts[b * classes + c] as f64 / t as f64;
                    sum_sq += p * p;
                    sum[c] += p;
                }
            }
            let norm_sq: f64 = sum.iter().map(|s| s * s).sum();
            (k * sum_sq - norm_sq).max(0.0)
        })
        .collect()
}
