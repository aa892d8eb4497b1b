//! Naive reference implementations used to check the production code.
//! Each one follows the textbook definition with explicit loops and shares
//! no code with the library.

#![allow(dead_code)]

/// Same equal-width rule as the library: `floor((v - min) / width)`, clamped.
pub fn bin_of(values: &[f64], bins: usize) -> Vec<usize> {
    let mut min = f64::INFINITY;
    let mut max = f64::NEG_INFINITY;
    for &v in values {
        if v < min {
            min = v;
        }
        if v > max {
            max = v;
        }
    }
    let width = (max - min) / bins as f64;
    values
        .iter()
        .map(|&v| {
            if width > 0.0 {
                let b = ((v - min) / width).floor() as usize;
                if b >= bins {
                    bins - 1
                } else {
                    b
                }
            } else {
                0
            }
        })
        .collect()
}

/// Rank by counting: `1 + #less + (#equal - 1) / 2`.
pub fn naive_ranks(values: &[f64]) -> Vec<f64> {
    values
        .iter()
        .map(|&v| {
            let less = values.iter().filter(|&&w| w < v).count() as f64;
            let equal = values.iter().filter(|&&w| w == v).count() as f64;
            1.0 + less + (equal - 1.0) / 2.0
        })
        .collect()
}

pub fn naive_pearson(x: &[f64], y: &[f64]) -> f64 {
    let n = x.len() as f64;
    let mx: f64 = x.iter().sum::<f64>() / n;
    let my: f64 = y.iter().sum::<f64>() / n;
    let mut cov = 0.0;
    let mut vx = 0.0;
    let mut vy = 0.0;
    for i in 0..x.len() {
        cov += (x[i] - mx) * (y[i] - my);
        vx += (x[i] - mx) * (x[i] - mx);
        vy += (y[i] - my) * (y[i] - my);
    }
    if vx == 0.0 || vy == 0.0 {
        0.0
    } else {
        cov / (vx.sqrt() * vy.sqrt())
    }
}

pub fn spearman(feature: &[f64], labels: &[usize]) -> f64 {
    let y: Vec<f64> = labels.iter().map(|&c| c as f64).collect();
    naive_pearson(&naive_ranks(feature), &naive_ranks(&y)).abs()
}

fn entropy_of_counts(counts: &[usize], n: usize) -> f64 {
    let mut h = 0.0;
    for &c in counts {
        if c > 0 {
            let p = c as f64 / n as f64;
            h -= p * p.log2();
        }
    }
    h
}

/// `2 (H(X) + H(Y) - H(X,Y)) / (H(X) + H(Y))` from histogram entropies.
pub fn symmetric_uncertainty(feature: &[f64], labels: &[usize], bins: usize) -> f64 {
    let x = bin_of(feature, bins);
    let classes = labels.iter().max().unwrap() + 1;
    let n = x.len();
    let mut hx = vec![0usize; bins];
    let mut hy = vec![0usize; classes];
    let mut hxy = vec![vec![0usize; classes]; bins];
    for i in 0..n {
        hx[x[i]] += 1;
        hy[labels[i]] += 1;
        hxy[x[i]][labels[i]] += 1;
    }
    let flat: Vec<usize> = hxy.into_iter().flatten().collect();
    let (ex, ey, exy) = (entropy_of_counts(&hx, n), entropy_of_counts(&hy, n), entropy_of_counts(&flat, n));
    if ex + ey == 0.0 {
        0.0
    } else {
        2.0 * (ex + ey - exy) / (ex + ey)
    }
}

/// Per-object loop over classes, recomputing class statistics each time.
pub fn fit_criterion(feature: &[f64], labels: &[usize], epsilon: f64) -> f64 {
    let classes = labels.iter().max().unwrap() + 1;
    let n = feature.len();
    let mut hits = 0;
    for i in 0..n {
        let mut best_class = 0;
        let mut best_dist = f64::INFINITY;
        for c in 0..classes {
            let mut sum = 0.0;
            let mut count = 0;
            for k in 0..n {
                if labels[k] == c {
                    sum += feature[k];
                    count += 1;
                }
            }
            let mean = sum / count as f64;
            let mut ss = 0.0;
            for k in 0..n {
                if labels[k] == c {
                    ss += (feature[k] - mean) * (feature[k] - mean);
                }
            }
            let sd = (ss / count as f64).sqrt();
            let d = (feature[i] - mean).abs() / (sd + epsilon);
            if d < best_dist {
                best_dist = d;
                best_class = c;
            }
        }
        if best_class == labels[i] {
            hits += 1;
        }
    }
    hits as f64 / n as f64
}

/// Triple loop over bin pairs and classes.
pub fn vdm(feature: &[f64], labels: &[usize], bins: usize) -> f64 {
    let x = bin_of(feature, bins);
    let classes = labels.iter().max().unwrap() + 1;
    let cond = |v: usize, c: usize| -> Option<f64> {
        let in_bin = x.iter().filter(|&&b| b == v).count();
        if in_bin == 0 {
            return None;
        }
        let both = x.iter().zip(labels).filter(|&(&b, &y)| b == v && y == c).count();
        Some(both as f64 / in_bin as f64)
    };
    let mut total = 0.0;
    for v in 0..bins {
        for w in (v + 1)..bins {
            for c in 0..classes {
                if let (Some(p), Some(q)) = (cond(v, c), cond(w, c)) {
                    total += (p - q) * (p - q);
                }
            }
        }
    }
    total
}

/// Best score over the box `[-radius, radius]^dim` of grid indices.
pub fn grid_max(dim: usize, radius: i64, steps_per_unit: u32, f: &dyn Fn(&[f64]) -> f64) -> f64 {
    let mut idx = vec![-radius; dim];
    let mut best = f64::NEG_INFINITY;
    let mut w = vec![0.0; dim];
    loop {
        for k in 0..dim {
            w[k] = idx[k] as f64 / steps_per_unit as f64;
        }
        let v = f(&w);
        if v > best {
            best = v;
        }
        let mut k = 0;
        loop {
            if k == dim {
                return best;
            }
            idx[k] += 1;
            if idx[k] <= radius {
                break;
            }
            idx[k] = -radius;
            k += 1;
        }
    }
}
