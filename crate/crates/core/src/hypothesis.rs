//! The heteroscedasticity tests: the dimension-reduction model-adaptive
//! statistic, the full-dimensional local-smoothing competitor, and the
//! residual-marked empirical-process competitor.
//!
//! All three share the same skeleton: estimate the mean, center the squared
//! residuals, and probe whether the centered marks still carry structure in
//! the covariates.

use nalgebra::{DMatrix, DVector};
use rand::Rng;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::kernels::{product_kernel_rows, product_kernel_rows_unscaled};
use crate::scenarios::{derive_seed, rng_from_seed, Dataset, SEED_DOMAIN_BOOTSTRAP};
use crate::sdr::{default_ridge_constant, estimate_basis, BasisEstimate};
use crate::smoothing::{bandwidth_h, bandwidth_h1, FitArtifacts};

/// Squared-residual threshold (relative to the response scale) below which
/// the data cannot support a variance test.
const DEGENERATE_FLOOR: f64 = 1e-28;

/// Which test to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Drmat,
    Zheng,
    Zfn,
    ZfnLow,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Drmat => "drmat",
            Method::Zheng => "zheng",
            Method::Zfn => "zfn",
            Method::ZfnLow => "zfn_low",
        }
    }
}

impl std::str::FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "drmat" => Ok(Method::Drmat),
            "zheng" => Ok(Method::Zheng),
            "zfn" => Ok(Method::Zfn),
            "zfn-low" | "zfn_low" => Ok(Method::ZfnLow),
            other => Err(Error::InvalidArgument(format!("unknown method `{other}`"))),
        }
    }
}

/// Tuning knobs shared by the tests. `seed` drives the wild bootstrap only.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TestConfig {
    /// Multiplier of the `n^{-1/(4+d)}` rate for the U-statistic bandwidth.
    pub h_multiplier: f64,
    /// Multiplier of the same rate for the mean-estimation bandwidth.
    pub h1_constant: f64,
    /// Ridge constant override; the pilot default is used when absent.
    pub c_n: Option<f64>,
    /// Wild-bootstrap replicates for the marked-process tests.
    pub boot_reps: usize,
    /// Master seed for the bootstrap multipliers.
    pub seed: u64,
    /// Mean-bandwidth constant of the full-dimensional marked-process test.
    /// Heavier smoothing than the one-dimensional default keeps the sign
    /// bootstrap calibrated when the mean is fitted over all covariates.
    pub zfn_h1_constant: f64,
}

impl Default for TestConfig {
    fn default() -> Self {
        TestConfig {
            h_multiplier: 1.25,
            h1_constant: 1.0,
            c_n: None,
            boot_reps: 500,
            seed: 0,
            zfn_h1_constant: 2.5,
        }
    }
}

/// Decision-ready outcome of one test run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestResult {
    pub method: Method,
    /// Standardized statistic (upper-tail normal for the kernel tests,
    /// Cramer-von Mises value for the marked-process tests).
    pub statistic: f64,
    /// The non-standardized statistic behind it.
    pub raw_stat: f64,
    /// Variance estimate used for standardization; absent for the
    /// marked-process tests.
    pub variance_est: Option<f64>,
    /// Selected structural dimension (adaptive test only).
    pub qhat: Option<usize>,
    pub p_value: f64,
    pub n: usize,
    pub p: usize,
    /// U-statistic bandwidth; absent for the marked-process tests.
    pub h: Option<f64>,
    /// Mean-estimation bandwidth.
    pub h1: f64,
}

impl TestResult {
    /// The statistic in its chi-squared(1) form.
    pub fn chi_square_statistic(&self) -> f64 {
        self.statistic * self.statistic
    }
}

/// Pipeline artifacts of the adaptive test, for callers that also want the
/// basis and the fit (residual exports, diagnostics).
#[derive(Debug, Clone)]
pub struct DrmatOutcome {
    pub result: TestResult,
    pub basis: BasisEstimate,
    pub fit: FitArtifacts,
}

/// Pair-weighted second-moment statistic
/// `S_n = (n(n-1))^{-1} sum_{i != j} K_h(z_i - z_j) mu_i mu_j`.
pub fn s_n(reduced: &DMatrix<f64>, mu: &DVector<f64>, h: f64) -> Result<f64> {
    validate_pair_inputs(reduced, mu, h)?;
    let n = reduced.nrows();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let k = product_kernel_rows(reduced, i, j, h);
            if k != 0.0 {
                acc += k * mu[i] * mu[j];
            }
        }
    }
    Ok(2.0 * acc / (n as f64 * (n as f64 - 1.0)))
}

/// Variance estimator
/// `s^2 = 2 (n(n-1))^{-1} sum_{i != j} h^{-d} K^2((z_i - z_j)/h) mu_i^2 mu_j^2`,
/// the squared kernel carrying the bandwidth scaling once so the estimator
/// is consistent for the asymptotic variance of `n h^{d/2} S_n`.
pub fn s_hat2(reduced: &DMatrix<f64>, mu: &DVector<f64>, h: f64) -> Result<f64> {
    validate_pair_inputs(reduced, mu, h)?;
    let n = reduced.nrows();
    let d = reduced.ncols();
    let mut acc = 0.0;
    for i in 0..n {
        for j in (i + 1)..n {
            let k = product_kernel_rows_unscaled(reduced, i, j, h);
            if k != 0.0 {
                acc += k * k * mu[i] * mu[i] * mu[j] * mu[j];
            }
        }
    }
    Ok(4.0 * h.powi(-(d as i32)) * acc / (n as f64 * (n as f64 - 1.0)))
}

fn validate_pair_inputs(reduced: &DMatrix<f64>, mu: &DVector<f64>, h: f64) -> Result<()> {
    let n = reduced.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if mu.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: mu.len(),
        });
    }
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be a positive finite real, got {h}"
        )));
    }
    Ok(())
}

fn upper_tail_p(t: f64) -> f64 {
    let normal = Normal::standard();
    1.0 - normal.cdf(t)
}

fn mean_square(y: &DVector<f64>) -> f64 {
    y.dot(y) / y.len() as f64
}

fn check_not_degenerate(fit: &FitArtifacts, y: &DVector<f64>, s2: f64) -> Result<()> {
    if fit.sigma2 <= DEGENERATE_FLOOR * (1.0 + mean_square(y)) {
        return Err(Error::DegenerateData(
            "squared residuals are at rounding-noise level; the response is effectively \
             deterministic"
                .into(),
        ));
    }
    if s2 <= 0.0 || !s2.is_finite() {
        return Err(Error::DegenerateData(format!(
            "variance estimate collapsed to {s2}; no kernel-overlapping residual pairs"
        )));
    }
    Ok(())
}

/// The dimension-reduction model-adaptive test: estimate the central
/// subspace, smooth on the reduced predictors, and standardize the pair
/// statistic by the estimated variance. Upper-tail standard normal p-value.
pub fn drmat(data: &Dataset, config: &TestConfig) -> Result<TestResult> {
    Ok(drmat_pipeline(data, config)?.result)
}

/// Same as [`drmat`] but returns the basis and fit alongside the result.
pub fn drmat_pipeline(data: &Dataset, config: &TestConfig) -> Result<DrmatOutcome> {
    let (n, p) = (data.n(), data.p());
    require_n_gt_p(n, p)?;

    let c_n = match config.c_n {
        Some(c) => c,
        None => default_ridge_constant(n)?,
    };
    let basis = estimate_basis(&data.x, &data.y, c_n)?;
    let reduced = &data.x * &basis.basis;

    let h1 = bandwidth_h1(n, basis.qhat, config.h1_constant)?;
    let fit = FitArtifacts::fit(reduced, &data.y, h1)?;
    let mu = fit.centered_marks();

    let h = bandwidth_h(n, basis.qhat, config.h_multiplier)?;
    let raw = s_n(&fit.reduced, &mu, h)?;
    let var = s_hat2(&fit.reduced, &mu, h)?;
    check_not_degenerate(&fit, &data.y, var)?;

    let statistic = n as f64 * h.powf(basis.qhat as f64 / 2.0) * raw / var.sqrt();
    let result = TestResult {
        method: Method::Drmat,
        statistic,
        raw_stat: raw,
        variance_est: Some(var),
        qhat: Some(basis.qhat),
        p_value: upper_tail_p(statistic),
        n,
        p,
        h: Some(h),
        h1,
    };
    Ok(DrmatOutcome { result, basis, fit })
}

/// Full-dimensional local-smoothing test: the same statistic without any
/// dimension reduction, kernels and rates taken at dimension `p`.
pub fn zheng(data: &Dataset, config: &TestConfig) -> Result<TestResult> {
    let (n, p) = (data.n(), data.p());
    require_n_gt_p(n, p)?;

    let h1 = bandwidth_h1(n, p, config.h1_constant)?;
    let fit = FitArtifacts::fit(data.x.clone(), &data.y, h1)?;
    let mu = fit.centered_marks();

    let h = bandwidth_h(n, p, config.h_multiplier)?;
    let raw = s_n(&fit.reduced, &mu, h)?;
    let var = s_hat2(&fit.reduced, &mu, h)?;
    check_not_degenerate(&fit, &data.y, var)?;

    let statistic = n as f64 * h.powf(p as f64 / 2.0) * raw / var.sqrt();
    Ok(TestResult {
        method: Method::Zheng,
        statistic,
        raw_stat: raw,
        variance_est: Some(var),
        qhat: None,
        p_value: upper_tail_p(statistic),
        n,
        p,
        h: Some(h),
        h1,
    })
}

/// Mean-estimation flavor of the marked-process test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ZfnVariant {
    /// Smooth on the full covariate vector.
    Full,
    /// Smooth on the leading estimated direction only.
    Low,
}

/// Residual-marked empirical process over componentwise half-spaces,
/// aggregated into a Cramer-von Mises statistic. Centered marks keep the
/// wild bootstrap honest; the statistic itself is invariant to centering.
pub fn zfn(data: &Dataset, config: &TestConfig, variant: ZfnVariant) -> Result<TestResult> {
    let (n, p) = (data.n(), data.p());
    require_n_gt_p(n, p)?;

    let (fit, h1) = match variant {
        ZfnVariant::Full => {
            let h1 = bandwidth_h1(n, p, config.zfn_h1_constant)?;
            (FitArtifacts::fit(data.x.clone(), &data.y, h1)?, h1)
        }
        ZfnVariant::Low => {
            let c_n = match config.c_n {
                Some(c) => c,
                None => default_ridge_constant(n)?,
            };
            let basis = estimate_basis(&data.x, &data.y, c_n)?;
            let lead = basis.basis.columns(0, 1).into_owned();
            let reduced = &data.x * lead;
            let h1 = bandwidth_h1(n, 1, config.h1_constant)?;
            (FitArtifacts::fit(reduced, &data.y, h1)?, h1)
        }
    };
    let marks = fit.centered_marks();

    let process = MarkedProcess::new(&data.x);
    let cm = process.cvm(&marks);

    // wild bootstrap with sign flips of the centered marks
    let mut exceed = 0usize;
    let mut flipped = marks.clone();
    for b in 0..config.boot_reps {
        let mut rng = rng_from_seed(derive_seed(config.seed, SEED_DOMAIN_BOOTSTRAP, b as u64));
        for i in 0..n {
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            flipped[i] = sign * marks[i];
        }
        if process.cvm(&flipped) >= cm {
            exceed += 1;
        }
    }
    let p_value = if config.boot_reps == 0 {
        1.0
    } else {
        exceed as f64 / config.boot_reps as f64
    };

    Ok(TestResult {
        method: match variant {
            ZfnVariant::Full => Method::Zfn,
            ZfnVariant::Low => Method::ZfnLow,
        },
        statistic: cm,
        raw_stat: cm,
        variance_est: None,
        qhat: None,
        p_value,
        n,
        p,
        h: None,
        h1,
    })
}

/// Run the test a [`Method`] names with one shared config.
pub fn run_test(method: Method, data: &Dataset, config: &TestConfig) -> Result<TestResult> {
    match method {
        Method::Drmat => drmat(data, config),
        Method::Zheng => zheng(data, config),
        Method::Zfn => zfn(data, config, ZfnVariant::Full),
        Method::ZfnLow => zfn(data, config, ZfnVariant::Low),
    }
}

/// Centered half-space indicators of the sample, reused across bootstrap
/// draws: column `j` holds `I(x_i <= x_j) - F_n(x_j)` over `i`.
pub struct MarkedProcess {
    centered: DMatrix<f64>,
}

impl MarkedProcess {
    pub fn new(x: &DMatrix<f64>) -> Self {
        let (n, p) = x.shape();
        let mut centered = DMatrix::zeros(n, n);
        for j in 0..n {
            let mut count = 0usize;
            for i in 0..n {
                let mut le = true;
                for k in 0..p {
                    if x[(i, k)] > x[(j, k)] {
                        le = false;
                        break;
                    }
                }
                if le {
                    centered[(i, j)] = 1.0;
                    count += 1;
                }
            }
            let fnj = count as f64 / n as f64;
            for i in 0..n {
                centered[(i, j)] -= fnj;
            }
        }
        MarkedProcess { centered }
    }

    /// `CM = n^{-1} sum_j V(x_j)^2` with `V(x_j) = n^{-1/2} sum_i m_i A_ij`.
    pub fn cvm(&self, marks: &DVector<f64>) -> f64 {
        let n = self.centered.nrows();
        let mut cm = 0.0;
        for j in 0..n {
            let v = self.centered.column(j).dot(marks);
            cm += v * v;
        }
        cm / (n as f64 * n as f64)
    }
}

/// Convenience wrapper: the Cramer-von Mises value of the marked process for
/// a given sample and mark vector.
pub fn cvm_statistic(x: &DMatrix<f64>, marks: &DVector<f64>) -> f64 {
    MarkedProcess::new(x).cvm(marks)
}

fn require_n_gt_p(n: usize, p: usize) -> Result<()> {
    if p == 0 {
        return Err(Error::InvalidArgument("covariate matrix is empty".into()));
    }
    if n <= p {
        return Err(Error::InvalidArgument(format!(
            "need more samples than covariates, got n={n}, p={p}"
        )));
    }
    Ok(())
}
