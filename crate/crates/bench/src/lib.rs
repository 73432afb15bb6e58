//! Shared fixtures for the pipeline benchmarks.

use drmat::scenarios::{generate, CovarianceKind, Dataset, ExampleId, ScenarioSpec};

/// Deterministic single-index dataset at the requested size.
pub fn fixture(n: usize, p: usize, a: f64) -> Dataset {
    let spec = ScenarioSpec::new(ExampleId::Ex1, n, p, a, CovarianceKind::Sigma1, 515151);
    generate(&spec).expect("benchmark fixture")
}
