//! Quartic (biweight) kernel and its multivariate product form.
//!
//! The same family serves two purposes: mean estimation on the reduced
//! predictors and the pair weights of the U-statistics. Both use the scaled
//! form `K_h(v) = K(v/h) / h^d` with `K` the product of univariate quartic
//! kernels.

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Kernel families available for smoothing and test-statistic weights.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum KernelFamily {
    /// `K(u) = 15/16 (1 - u^2)^2` on `[-1, 1]`, zero outside.
    Quartic,
}

/// A product kernel: family, dimension, and bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct KernelSpec {
    pub family: KernelFamily,
    pub dimension: usize,
    pub bandwidth: f64,
}

impl KernelSpec {
    pub fn quartic(dimension: usize, bandwidth: f64) -> Result<Self> {
        if dimension == 0 {
            return Err(Error::InvalidArgument(
                "kernel dimension must be at least 1".into(),
            ));
        }
        if bandwidth <= 0.0 || !bandwidth.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "bandwidth must be a positive finite real, got {bandwidth}"
            )));
        }
        Ok(KernelSpec {
            family: KernelFamily::Quartic,
            dimension,
            bandwidth,
        })
    }

    /// Evaluate `K_h(v) = h^{-d} prod_k K(v_k / h)`.
    pub fn evaluate(&self, v: &[f64]) -> Result<f64> {
        if v.len() != self.dimension {
            return Err(Error::DimensionMismatch {
                expected: self.dimension,
                got: v.len(),
            });
        }
        product_kernel(v, self.bandwidth)
    }
}

/// Univariate quartic kernel `15/16 (1 - u^2)^2` for `|u| <= 1`, else 0.
///
/// Integrates to one over its support; bounded by `15/16`.
pub fn quartic(u: f64) -> Result<f64> {
    if !u.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "kernel argument must be finite, got {u}"
        )));
    }
    Ok(quartic_unchecked(u))
}

#[inline(always)]
pub(crate) fn quartic_unchecked(u: f64) -> f64 {
    if u.abs() >= 1.0 {
        0.0
    } else {
        let t = 1.0 - u * u;
        0.9375 * t * t
    }
}

/// `d`-dimensional product kernel with bandwidth scaling `h^{-d}`.
///
/// Zero as soon as any coordinate satisfies `|v_k| >= h`.
pub fn product_kernel(v: &[f64], h: f64) -> Result<f64> {
    if v.is_empty() {
        return Err(Error::InvalidArgument(
            "product kernel needs at least one coordinate".into(),
        ));
    }
    if h <= 0.0 || !h.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "bandwidth must be a positive finite real, got {h}"
        )));
    }
    let mut prod = h.powi(-(v.len() as i32));
    for &vk in v {
        if !vk.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "kernel argument must be finite, got {vk}"
            )));
        }
        prod *= quartic_unchecked(vk / h);
        if prod == 0.0 {
            return Ok(0.0);
        }
    }
    Ok(prod)
}

/// Scaled kernel of the difference of two rows of `m`: `K_h(m[i,·] - m[j,·])`.
///
/// Fast path for the O(n^2) loops; assumes finite entries and `h > 0`.
#[inline]
pub(crate) fn product_kernel_rows(m: &DMatrix<f64>, i: usize, j: usize, h: f64) -> f64 {
    let d = m.ncols();
    let mut prod = h.powi(-(d as i32));
    for k in 0..d {
        prod *= quartic_unchecked((m[(i, k)] - m[(j, k)]) / h);
        if prod == 0.0 {
            return 0.0;
        }
    }
    prod
}

/// Unscaled product `prod_k K(v_k / h)` without the `h^{-d}` factor, for the
/// variance estimator where the scaling is applied once to the squared kernel.
#[inline]
pub(crate) fn product_kernel_rows_unscaled(m: &DMatrix<f64>, i: usize, j: usize, h: f64) -> f64 {
    let d = m.ncols();
    let mut prod = 1.0;
    for k in 0..d {
        prod *= quartic_unchecked((m[(i, k)] - m[(j, k)]) / h);
        if prod == 0.0 {
            return 0.0;
        }
    }
    prod
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn quartic_reference_values() {
        assert_eq!(quartic(0.0).unwrap(), 0.9375);
        assert_eq!(quartic(1.0).unwrap(), 0.0);
        assert_eq!(quartic(-1.0).unwrap(), 0.0);
        assert_eq!(quartic(0.5).unwrap(), 0.52734375);
        assert_eq!(quartic(7.3).unwrap(), 0.0);
    }

    #[test]
    fn quartic_rejects_non_finite() {
        assert!(quartic(f64::NAN).is_err());
        assert!(quartic(f64::INFINITY).is_err());
    }

    #[test]
    fn product_kernel_reference_values() {
        assert_eq!(product_kernel(&[0.0], 1.0).unwrap(), 0.9375);
        assert_eq!(product_kernel(&[0.0, 0.0], 1.0).unwrap(), 0.87890625);
        assert_eq!(product_kernel(&[2.0, 0.0], 1.0).unwrap(), 0.0);
    }

    #[test]
    fn product_kernel_rejects_bad_input() {
        assert!(product_kernel(&[], 1.0).is_err());
        assert!(product_kernel(&[0.0], 0.0).is_err());
        assert!(product_kernel(&[0.0], -1.0).is_err());
        assert!(product_kernel(&[f64::NAN], 1.0).is_err());
    }

    #[test]
    fn kernel_spec_validates() {
        assert!(KernelSpec::quartic(0, 1.0).is_err());
        assert!(KernelSpec::quartic(1, 0.0).is_err());
        let k = KernelSpec::quartic(2, 0.5).unwrap();
        assert!(k.evaluate(&[0.0]).is_err());
        assert_abs_diff_eq!(
            k.evaluate(&[0.0, 0.0]).unwrap(),
            0.87890625 / 0.25,
            epsilon = 1e-12
        );
    }

    #[test]
    fn quartic_integrates_to_one() {
        // trapezoid rule on [-1, 1]
        let n = 200_000;
        let h = 2.0 / n as f64;
        let mut sum = 0.0;
        for i in 0..n {
            let a = -1.0 + i as f64 * h;
            sum += 0.5 * (quartic_unchecked(a) + quartic_unchecked(a + h)) * h;
        }
        assert_abs_diff_eq!(sum, 1.0, epsilon = 1e-8);
    }

    proptest! {
        #[test]
        fn scaling_identity(v in prop::collection::vec(-3.0f64..3.0, 1..4), h in 0.05f64..4.0) {
            let lhs = product_kernel(&v, h).unwrap();
            let scaled: Vec<f64> = v.iter().map(|x| x / h).collect();
            let rhs = product_kernel(&scaled, 1.0).unwrap() * h.powi(-(v.len() as i32));
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }

        #[test]
        fn symmetry(v in prop::collection::vec(-2.0f64..2.0, 1..4), h in 0.1f64..3.0) {
            let neg: Vec<f64> = v.iter().map(|x| -x).collect();
            prop_assert_eq!(product_kernel(&v, h).unwrap(), product_kernel(&neg, h).unwrap());
        }

        #[test]
        fn nonnegative_and_compact(v in prop::collection::vec(-5.0f64..5.0, 1..4), h in 0.1f64..2.0) {
            let val = product_kernel(&v, h).unwrap();
            prop_assert!(val >= 0.0);
            if v.iter().any(|x| x.abs() >= h) {
                prop_assert_eq!(val, 0.0);
            }
        }
    }
}
