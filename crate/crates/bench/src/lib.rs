//! Fixtures shared by the criterion benchmarks.

use melif_core::dataset::{planted, PlantedSpec};
use melif_core::filters::{FilterEnsemble, FilterParams, Measure};
use melif_core::Dataset;

/// A planted two-class dataset with 10 informative features.
pub fn dataset(objects: usize, features: usize) -> Dataset {
    planted(&PlantedSpec::new(objects, features, 10, 0))
        .expect("valid planted spec")
        .0
}

pub fn ensemble(ds: &Dataset) -> FilterEnsemble {
    FilterEnsemble::build(ds, &Measure::ALL, &FilterParams::default()).expect("ensemble")
}
