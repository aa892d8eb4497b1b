use ndarray::Array2;
use rand::seq::index::sample;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::Dataset;
use crate::error::{Error, Result};

/// Parameters of a planted-signal dataset: `informative` columns carry a
/// class-dependent mean shift, every other column is pure Gaussian noise.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlantedSpec {
    pub objects: usize,
    pub features: usize,
    pub informative: usize,
    pub classes: usize,
    /// Mean shift per class step on informative columns, in noise units.
    pub shift: f64,
    pub seed: u64,
}

impl PlantedSpec {
    pub fn new(objects: usize, features: usize, informative: usize, seed: u64) -> Self {
        Self {
            objects,
            features,
            informative,
            classes: 2,
            shift: 2.0,
            seed,
        }
    }
}

impl std::str::FromStr for PlantedSpec {
    type Err = Error;

    /// `n,d,k` or `n,d,k,seed`.
    fn from_str(s: &str) -> Result<Self> {
        let parts: Vec<&str> = s.split(',').map(str::trim).collect();
        let num = |i: usize| -> Result<u64> {
            parts[i]
                .parse()
                .map_err(|_| Error::Config(format!("bad synthetic spec {s:?}: {:?} is not an integer", parts[i])))
        };
        match parts.len() {
            3 | 4 => {
                let seed = if parts.len() == 4 { num(3)? } else { 0 };
                Ok(Self::new(num(0)? as usize, num(1)? as usize, num(2)? as usize, seed))
            }
            _ => Err(Error::Config(format!(
                "bad synthetic spec {s:?}: expected n,d,k[,seed]"
            ))),
        }
    }
}

/// Generates a planted dataset and returns it with the sorted indices of the
/// informative columns. Objects are dealt to classes round robin, and the
/// informative columns sit at seeded random positions.
pub fn planted(spec: &PlantedSpec) -> Result<(Dataset, Vec<usize>)> {
    if spec.informative > spec.features {
        return Err(Error::Config(format!(
            "{} informative features requested out of {}",
            spec.informative, spec.features
        )));
    }
    if spec.classes < 2 || spec.objects < 2 * spec.classes {
        return Err(Error::Config(format!(
            "need at least two classes with two objects each, got {} objects in {} classes",
            spec.objects, spec.classes
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut informative = sample(&mut rng, spec.features, spec.informative).into_vec();
    informative.sort_unstable();
    let mut is_informative = vec![false; spec.features];
    for &j in &informative {
        is_informative[j] = true;
    }
    let labels: Vec<usize> = (0..spec.objects).map(|i| i % spec.classes).collect();
    let mut features = Array2::zeros((spec.objects, spec.features));
    for ((i, j), v) in features.indexed_iter_mut() {
        let noise: f64 = StandardNormal.sample(&mut rng);
        *v = if is_informative[j] {
            noise + spec.shift * labels[i] as f64
        } else {
            noise
        };
    }
    let name = format!(
        "planted_n{}_d{}_k{}_s{}",
        spec.objects, spec.features, spec.informative, spec.seed
    );
    let ds = Dataset::new(
        name,
        (0..spec.features).map(|j| format!("f{j}")).collect(),
        features,
        labels,
        (0..spec.classes).map(|c| format!("c{c}")).collect(),
    )?;
    Ok((ds, informative))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn planted_shape_and_determinism() {
        let spec = PlantedSpec::new(30, 50, 5, 9);
        let (a, inf_a) = planted(&spec).unwrap();
        let (b, inf_b) = planted(&spec).unwrap();
        assert_eq!(a, b);
        assert_eq!(inf_a, inf_b);
        assert_eq!(a.features().dim(), (30, 50));
        assert_eq!(inf_a.len(), 5);
        assert_eq!(a.class_sizes(), vec![15, 15]);
    }

    #[test]
    fn informative_columns_are_shifted() {
        let (ds, informative) = planted(&PlantedSpec::new(400, 20, 3, 1)).unwrap();
        for &j in &informative {
            let col = ds.column(j);
            let mean = |c: usize| {
                let v: Vec<f64> = col.iter().zip(ds.labels()).filter(|(_, &y)| y == c).map(|(v, _)| *v).collect();
                v.iter().sum::<f64>() / v.len() as f64
            };
            assert!((mean(1) - mean(0) - 2.0).abs() < 0.3);
        }
    }

    #[test]
    fn parses_spec_strings() {
        let s: PlantedSpec = "60,1000,10".parse().unwrap();
        assert_eq!((s.objects, s.features, s.informative, s.seed), (60, 1000, 10, 0));
        let s: PlantedSpec = "60,1000,10,4".parse().unwrap();
        assert_eq!(s.seed, 4);
        assert!("60,x,10".parse::<PlantedSpec>().is_err());
        assert!("60".parse::<PlantedSpec>().is_err());
    }
}
