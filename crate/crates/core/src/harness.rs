//! Monte Carlo experiment runner: empirical rejection rates with standard
//! errors over seeded replications, plus the sweep drivers for power curves,
//! dimension grids, and bandwidth grids.
//!
//! Replications are independent units; each derives its dataset and
//! bootstrap seeds from `(master_seed, replication index)`, so a run is
//! reproducible bit-for-bit regardless of how the work is scheduled.

use std::ops::Range;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::hypothesis::{run_test, Method, TestConfig};
use crate::scenarios::{
    derive_seed, generate, ScenarioSpec, SEED_DOMAIN_BOOTSTRAP, SEED_DOMAIN_DATASET,
};

/// One empirical rejection-rate measurement.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateRow {
    pub example: String,
    pub n: usize,
    pub p: usize,
    pub a: f64,
    pub covariance: String,
    pub error: String,
    pub method: Method,
    pub alpha: f64,
    pub h_multiplier: f64,
    pub reps: u64,
    pub rejections: u64,
    /// Replications that errored; counted as non-rejections.
    pub errors: u64,
    pub rate: f64,
    pub mc_stderr: f64,
}

impl RateRow {
    fn from_counts(
        spec: &ScenarioSpec,
        method: Method,
        alpha: f64,
        h_multiplier: f64,
        reps: u64,
        rejections: u64,
        errors: u64,
    ) -> Self {
        let rate = if reps == 0 {
            0.0
        } else {
            rejections as f64 / reps as f64
        };
        let mc_stderr = if reps == 0 {
            0.0
        } else {
            (rate * (1.0 - rate) / reps as f64).sqrt()
        };
        RateRow {
            example: spec.example.as_str().to_string(),
            n: spec.n,
            p: spec.p,
            a: spec.a,
            covariance: spec.covariance.as_str().to_string(),
            error: spec.error.as_str().to_string(),
            method,
            alpha,
            h_multiplier,
            reps,
            rejections,
            errors,
            rate,
            mc_stderr,
        }
    }
}

/// Run metadata kept apart from the rows so reports stay comparable across
/// runs (wall time is informational only).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunMeta {
    pub master_seed: u64,
    pub config: serde_json::Value,
    pub wall_ms: u64,
}

/// Aggregated rejection rates plus run metadata.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub rows: Vec<RateRow>,
    pub meta: RunMeta,
}

impl ExperimentReport {
    pub fn rates(&self) -> Vec<f64> {
        self.rows.iter().map(|r| r.rate).collect()
    }

    /// True when the row rates never drop by more than `slack_mult` combined
    /// Monte Carlo standard errors from one row to the next.
    pub fn nondecreasing_within(&self, slack_mult: f64) -> bool {
        self.rows.windows(2).all(|w| {
            let slack = slack_mult * (w[0].mc_stderr.powi(2) + w[1].mc_stderr.powi(2)).sqrt();
            w[1].rate >= w[0].rate - slack
        })
    }
}

/// Rejection and error counts over a replication index range. Exposed so
/// runs can be merged: the counts over `0..r` equal the sum of the counts
/// over `0..k` and `k..r`.
pub fn rejection_counts_range(
    spec: &ScenarioSpec,
    method: Method,
    config: &TestConfig,
    alpha: f64,
    range: Range<u64>,
    master_seed: u64,
) -> (u64, u64) {
    let outcomes: Vec<(bool, bool)> = range
        .into_par_iter()
        .map(|r| {
            let rep_spec = spec.with_seed(derive_seed(master_seed, SEED_DOMAIN_DATASET, r));
            let rep_config = TestConfig {
                seed: derive_seed(master_seed, SEED_DOMAIN_BOOTSTRAP, r),
                ..*config
            };
            match generate(&rep_spec).and_then(|data| run_test(method, &data, &rep_config)) {
                Ok(result) => (result.p_value <= alpha, false),
                Err(_) => (false, true),
            }
        })
        .collect();
    let rejections = outcomes.iter().filter(|(rej, _)| *rej).count() as u64;
    let errors = outcomes.iter().filter(|(_, err)| *err).count() as u64;
    (rejections, errors)
}

/// Empirical rejection rate of one method at one nominal level.
///
/// Per-replication failures are recorded in the error column rather than
/// thrown, and count as non-rejections.
pub fn rejection_rate(
    spec: &ScenarioSpec,
    method: Method,
    config: &TestConfig,
    alpha: f64,
    reps: u64,
    master_seed: u64,
) -> RateRow {
    let (rejections, errors) =
        rejection_counts_range(spec, method, config, alpha, 0..reps, master_seed);
    RateRow::from_counts(
        spec,
        method,
        alpha,
        config.h_multiplier,
        reps,
        rejections,
        errors,
    )
}

/// One rejection-rate row per value of the variance-inflation parameter.
pub fn power_curve_a(
    base: &ScenarioSpec,
    a_grid: &[f64],
    method: Method,
    config: &TestConfig,
    alpha: f64,
    reps: u64,
    master_seed: u64,
) -> ExperimentReport {
    let start = Instant::now();
    let rows: Vec<RateRow> = a_grid
        .iter()
        .map(|&a| {
            let spec = ScenarioSpec { a, ..*base };
            rejection_rate(&spec, method, config, alpha, reps, master_seed)
        })
        .collect();
    let monotone = {
        let tmp = ExperimentReport {
            rows: rows.clone(),
            meta: RunMeta {
                master_seed,
                config: json!(null),
                wall_ms: 0,
            },
        };
        tmp.nondecreasing_within(2.0)
    };
    ExperimentReport {
        rows,
        meta: RunMeta {
            master_seed,
            config: json!({
                "sweep": "power_curve_a",
                "a_grid": a_grid,
                "base": base,
                "method": method,
                "alpha": alpha,
                "reps": reps,
                "test_config": config,
                "monotone_nondecreasing_within_2se": monotone,
            }),
            wall_ms: start.elapsed().as_millis() as u64,
        },
    }
}

/// Default grid for the dimension sweep.
pub fn default_dimension_grid() -> Vec<usize> {
    vec![2, 4, 6, 8, 10, 12]
}

/// Rejection rates over a grid of covariate dimensions, one row per
/// `(p, method)` pair. The base spec must be the single-index design, the
/// only one defined at every even dimension.
pub fn dimension_sweep(
    base: &ScenarioSpec,
    p_grid: &[usize],
    methods: &[Method],
    config: &TestConfig,
    alpha: f64,
    reps: u64,
    master_seed: u64,
) -> ExperimentReport {
    let start = Instant::now();
    let mut rows = Vec::with_capacity(p_grid.len() * methods.len());
    for &p in p_grid {
        for &method in methods {
            let spec = ScenarioSpec { p, ..*base };
            rows.push(rejection_rate(&spec, method, config, alpha, reps, master_seed));
        }
    }
    ExperimentReport {
        rows,
        meta: RunMeta {
            master_seed,
            config: json!({
                "sweep": "dimension",
                "p_grid": p_grid,
                "base": base,
                "methods": methods,
                "alpha": alpha,
                "reps": reps,
                "test_config": config,
            }),
            wall_ms: start.elapsed().as_millis() as u64,
        },
    }
}

/// Rejection rates over a grid of bandwidth multipliers.
pub fn bandwidth_sweep(
    spec: &ScenarioSpec,
    multipliers: &[f64],
    method: Method,
    config: &TestConfig,
    alpha: f64,
    reps: u64,
    master_seed: u64,
) -> ExperimentReport {
    let start = Instant::now();
    let rows: Vec<RateRow> = multipliers
        .iter()
        .map(|&m| {
            let cfg = TestConfig {
                h_multiplier: m,
                ..*config
            };
            rejection_rate(spec, method, &cfg, alpha, reps, master_seed)
        })
        .collect();
    ExperimentReport {
        rows,
        meta: RunMeta {
            master_seed,
            config: json!({
                "sweep": "bandwidth",
                "multipliers": multipliers,
                "base": spec,
                "method": method,
                "alpha": alpha,
                "reps": reps,
                "test_config": config,
            }),
            wall_ms: start.elapsed().as_millis() as u64,
        },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scenarios::{CovarianceKind, ExampleId};

    fn quick_spec() -> ScenarioSpec {
        ScenarioSpec::new(ExampleId::Ex1, 60, 2, 0.0, CovarianceKind::Sigma1, 0)
    }

    #[test]
    fn stderr_closed_forms() {
        let spec = quick_spec();
        let all = RateRow::from_counts(&spec, Method::Drmat, 0.05, 1.25, 40, 40, 0);
        assert_eq!(all.rate, 1.0);
        assert_eq!(all.mc_stderr, 0.0);

        let none = RateRow::from_counts(&spec, Method::Drmat, 0.05, 1.25, 40, 0, 0);
        assert_eq!(none.rate, 0.0);
        assert_eq!(none.mc_stderr, 0.0);

        let half = RateRow::from_counts(&spec, Method::Drmat, 0.05, 1.25, 100, 50, 0);
        assert!((half.mc_stderr - 0.05).abs() < 1e-12);
    }

    #[test]
    fn impossible_rejection_gives_zero_rate() {
        // alpha = 0 can never be met by a p-value in (0, 1]
        let row = rejection_rate(
            &quick_spec(),
            Method::Drmat,
            &TestConfig::default(),
            0.0,
            10,
            123,
        );
        assert_eq!(row.rejections, 0);
        assert_eq!(row.rate, 0.0);
    }

    #[test]
    fn runs_are_reproducible() {
        let spec = quick_spec();
        let cfg = TestConfig::default();
        let a = rejection_rate(&spec, Method::Drmat, &cfg, 0.05, 30, 99);
        let b = rejection_rate(&spec, Method::Drmat, &cfg, 0.05, 30, 99);
        assert_eq!(a, b);
    }

    #[test]
    fn split_runs_merge_to_the_full_run() {
        let spec = quick_spec();
        let cfg = TestConfig::default();
        let (r_full, e_full) =
            rejection_counts_range(&spec, Method::Drmat, &cfg, 0.05, 0..40, 7);
        let (r_a, e_a) = rejection_counts_range(&spec, Method::Drmat, &cfg, 0.05, 0..20, 7);
        let (r_b, e_b) = rejection_counts_range(&spec, Method::Drmat, &cfg, 0.05, 20..40, 7);
        assert_eq!(r_full, r_a + r_b);
        assert_eq!(e_full, e_a + e_b);
    }

    #[test]
    fn power_curve_single_point_reduces_to_rate() {
        let spec = quick_spec();
        let cfg = TestConfig::default();
        let report = power_curve_a(&spec, &[0.0], Method::Drmat, &cfg, 0.05, 15, 5);
        assert_eq!(report.rows.len(), 1);
        let direct = rejection_rate(&spec, Method::Drmat, &cfg, 0.05, 15, 5);
        assert_eq!(report.rows[0], direct);
    }

    #[test]
    fn dimension_sweep_single_point_reduces_to_rate() {
        let spec = quick_spec();
        let cfg = TestConfig::default();
        let report = dimension_sweep(&spec, &[2], &[Method::Drmat], &cfg, 0.05, 15, 5);
        assert_eq!(report.rows.len(), 1);
        let direct = rejection_rate(&spec, Method::Drmat, &cfg, 0.05, 15, 5);
        assert_eq!(report.rows[0], direct);
    }

    #[test]
    fn bandwidth_sweep_records_multipliers() {
        let spec = quick_spec();
        let cfg = TestConfig::default();
        let report = bandwidth_sweep(&spec, &[1.0, 1.5], Method::Drmat, &cfg, 0.05, 10, 5);
        assert_eq!(report.rows.len(), 2);
        assert_eq!(report.rows[0].h_multiplier, 1.0);
        assert_eq!(report.rows[1].h_multiplier, 1.5);
    }

    #[test]
    fn bandwidth_sweep_single_point_reduces_to_rate() {
        let spec = quick_spec();
        let cfg = TestConfig {
            h_multiplier: 0.75,
            ..TestConfig::default()
        };
        let report = bandwidth_sweep(&spec, &[0.75], Method::Drmat, &cfg, 0.05, 15, 5);
        let direct = rejection_rate(&spec, Method::Drmat, &cfg, 0.05, 15, 5);
        assert_eq!(report.rows, vec![direct]);
    }

    #[test]
    fn nondecreasing_check_allows_mc_noise() {
        let spec = quick_spec();
        let mk = |rate_num: u64| RateRow::from_counts(&spec, Method::Drmat, 0.05, 1.25, 100, rate_num, 0);
        let report = ExperimentReport {
            rows: vec![mk(10), mk(9), mk(30)],
            meta: RunMeta {
                master_seed: 0,
                config: json!(null),
                wall_ms: 0,
            },
        };
        assert!(report.nondecreasing_within(2.0));
        let strict = ExperimentReport {
            rows: vec![mk(50), mk(10)],
            meta: report.meta.clone(),
        };
        assert!(!strict.nondecreasing_within(2.0));
    }
}
