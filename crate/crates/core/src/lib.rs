//! Heteroscedasticity testing for regression models with a dimension
//! reduction-based model-adaptive statistic, two competitor tests, and a
//! seeded Monte Carlo harness for size/power studies.
//!
//! The adaptive test estimates the central subspace of the mean function,
//! smooths on the reduced predictors, and standardizes a pair-weighted
//! second-moment statistic that is asymptotically standard normal under
//! homoscedasticity. Because every kernel runs in the estimated dimension
//! rather than the ambient one, power holds up as the number of covariates
//! grows.

pub mod error;
pub mod harness;
pub mod hypothesis;
pub mod kernels;
pub mod scenarios;
pub mod sdr;
pub mod smoothing;

pub use error::{Error, Result};
pub use harness::{ExperimentReport, RateRow, RunMeta};
pub use hypothesis::{Method, TestConfig, TestResult};
pub use scenarios::{CovarianceKind, Dataset, ErrorLaw, ExampleId, ScenarioSpec};
pub use sdr::{BasisEstimate, DeeDecomposition};
pub use smoothing::FitArtifacts;
