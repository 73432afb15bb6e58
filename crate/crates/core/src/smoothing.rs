//! Nadaraya-Watson mean estimation on reduced predictors, residual and
//! pooled-variance computation, and the bandwidth rules.

use nalgebra::{DMatrix, DVector};

use crate::error::{Error, Result};
use crate::kernels::product_kernel_rows;

/// Everything the mean fit produces: reduced predictors, fitted values,
/// squared residuals, their pooled mean, and the bandwidth used.
#[derive(Debug, Clone)]
pub struct FitArtifacts {
    /// `n x d` matrix of reduced predictors the fit ran on.
    pub reduced: DMatrix<f64>,
    /// Fitted conditional means, one per sample.
    pub ghat: DVector<f64>,
    /// Squared residuals, all nonnegative.
    pub resid2: DVector<f64>,
    /// Arithmetic mean of `resid2`.
    pub sigma2: f64,
    /// Bandwidth used for the mean fit.
    pub h1: f64,
}

impl FitArtifacts {
    /// Fit the mean by Nadaraya-Watson on `reduced` and derive residual
    /// quantities in one step.
    pub fn fit(reduced: DMatrix<f64>, y: &DVector<f64>, h1: f64) -> Result<Self> {
        let ghat = nw_regress(&reduced, y, h1)?;
        let (resid2, sigma2) = residuals_sigma2(y, &ghat)?;
        Ok(FitArtifacts {
            reduced,
            ghat,
            resid2,
            sigma2,
            h1,
        })
    }

    /// Centered squared residuals `e_i^2 - sigma^2`, the marks every test
    /// statistic is built from.
    pub fn centered_marks(&self) -> DVector<f64> {
        self.resid2.map(|r| r - self.sigma2)
    }
}

/// Nadaraya-Watson regression of `y` on the rows of `reduced`.
///
/// The weight sum includes the point itself, so the denominator is bounded
/// below by the kernel value at zero and never vanishes.
pub fn nw_regress(reduced: &DMatrix<f64>, y: &DVector<f64>, h1: f64) -> Result<DVector<f64>> {
    let n = reduced.nrows();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if h1 <= 0.0 || !h1.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be a positive finite real, got {h1}"
        )));
    }
    if reduced.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument(
            "reduced predictors must be finite".into(),
        ));
    }

    let mut fitted = DVector::zeros(n);
    for i in 0..n {
        let mut num = 0.0;
        let mut den = 0.0;
        for j in 0..n {
            let w = product_kernel_rows(reduced, i, j, h1);
            num += w * y[j];
            den += w;
        }
        fitted[i] = num / den;
    }
    Ok(fitted)
}

/// Squared residuals and their pooled mean.
pub fn residuals_sigma2(y: &DVector<f64>, ghat: &DVector<f64>) -> Result<(DVector<f64>, f64)> {
    if y.len() != ghat.len() {
        return Err(Error::DimensionMismatch {
            expected: y.len(),
            got: ghat.len(),
        });
    }
    let resid2 = DVector::from_fn(y.len(), |i, _| {
        let r = y[i] - ghat[i];
        r * r
    });
    let sigma2 = resid2.sum() / y.len() as f64;
    Ok((resid2, sigma2))
}

/// Test-statistic bandwidth `multiplier * n^{-1/(4+qhat)}`.
///
/// The default multiplier is 1.25; the sweep grid uses `0.5 + 0.25 i` for
/// `i = 0..=5`.
pub fn bandwidth_h(n: usize, qhat: usize, multiplier: f64) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if qhat < 1 {
        return Err(Error::InvalidArgument("qhat must be at least 1".into()));
    }
    if multiplier <= 0.0 || !multiplier.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bandwidth multiplier must be positive, got {multiplier}"
        )));
    }
    Ok(multiplier * (n as f64).powf(-1.0 / (4.0 + qhat as f64)))
}

/// Mean-estimation bandwidth `c * n^{-1/(4+qhat)}`, default constant 1.0.
pub fn bandwidth_h1(n: usize, qhat: usize, c: f64) -> Result<f64> {
    bandwidth_h(n, qhat, c)
}

/// The six-point multiplier grid `0.5, 0.75, ..., 1.75` used by the
/// bandwidth sweeps.
pub fn bandwidth_multiplier_grid() -> Vec<f64> {
    (0..6).map(|i| 0.5 + 0.25 * i as f64).collect()
}
