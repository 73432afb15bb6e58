//! SIR-based discretization-expectation estimation of the central subspace
//! and ridge-type eigenvalue-ratio selection of the structural dimension.
//!
//! The response is discretized into indicators `I(y <= t)` at every observed
//! response value; averaging the resulting slice matrices gives a kernel
//! matrix whose leading eigenvectors span the central subspace. The
//! eigenproblem `Sigma^{-1} Lbar` is non-symmetric, so we solve the
//! equivalent symmetric whitened problem `Sigma^{-1/2} Lbar Sigma^{-1/2}`
//! (identical spectrum) and back-transform the eigenvectors.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Error, Result};
use crate::smoothing::bandwidth_h;

/// Relative eigenvalue floor below which the covariance counts as singular.
const COV_CONDITION_FLOOR: f64 = 1e-10;

/// Spectral decomposition of the averaged slice matrix.
#[derive(Debug, Clone)]
pub struct DeeDecomposition {
    /// Eigenvalues of the whitened matrix, sorted descending, negatives
    /// clamped to zero. These coincide with the spectrum of
    /// `Sigma^{-1} Lbar`.
    pub eigenvalues: DVector<f64>,
    /// Back-transformed directions, Euclidean-orthonormalized in eigenvalue
    /// order. Column `j` is aligned with `eigenvalues[j]`.
    pub directions: DMatrix<f64>,
    /// Back-transformed directions before orthonormalization; column `j`
    /// satisfies `Lbar b = lambda_j Sigma_hat b` up to numerical residual.
    pub raw_directions: DMatrix<f64>,
    /// Sample covariance of the covariates (divisor `n`).
    pub sigma_hat: DMatrix<f64>,
}

/// Estimated basis of the central subspace.
#[derive(Debug, Clone)]
pub struct BasisEstimate {
    /// `p x qhat` matrix with orthonormal columns.
    pub basis: DMatrix<f64>,
    /// Selected structural dimension.
    pub qhat: usize,
    /// All `p` eigenvalues of the decomposition the basis was cut from.
    pub eigenvalues: DVector<f64>,
    /// Ridge constant used for the selection.
    pub c_n: f64,
}

/// Slice moment `m_n(t) = n^{-1} sum_i (x_i - xbar) I(y_i <= t)`.
pub fn sir_moment_vector(
    x: &DMatrix<f64>,
    xbar: &DVector<f64>,
    y: &DVector<f64>,
    t: f64,
) -> Result<DVector<f64>> {
    let (n, p) = x.shape();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if y.len() != n || xbar.len() != p {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    let mut m = DVector::zeros(p);
    for i in 0..n {
        if y[i] <= t {
            for k in 0..p {
                m[k] += x[(i, k)] - xbar[k];
            }
        }
    }
    Ok(m / n as f64)
}

/// Averaged slice matrix, whitened and decomposed.
///
/// Requires `n > p` and a numerically invertible sample covariance.
pub fn dee_matrix(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<DeeDecomposition> {
    let (n, p) = x.shape();
    if p == 0 {
        return Err(Error::InvalidArgument("covariate matrix is empty".into()));
    }
    if n <= p {
        return Err(Error::InvalidArgument(format!(
            "need more samples than covariates, got n={n}, p={p}"
        )));
    }
    if y.len() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: y.len(),
        });
    }
    if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidArgument("input data must be finite".into()));
    }

    let nf = n as f64;
    let xbar = DVector::from_fn(p, |k, _| x.column(k).sum() / nf);
    let centered = {
        let mut c = x.clone();
        for k in 0..p {
            let mk = xbar[k];
            for i in 0..n {
                c[(i, k)] -= mk;
            }
        }
        c
    };

    // Slice moments for all thresholds t = y_i in one sorted sweep: the
    // moment at t is the prefix sum of centered rows with y <= t. Ties share
    // the prefix through the end of their group.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| y[a].partial_cmp(&y[b]).unwrap());

    let mut lbar = DMatrix::<f64>::zeros(p, p);
    let mut prefix = DVector::<f64>::zeros(p);
    let mut m = DVector::<f64>::zeros(p);
    let mut k = 0;
    while k < n {
        let t = y[order[k]];
        let mut end = k;
        while end < n && y[order[end]] == t {
            prefix += centered.row(order[end]).transpose();
            end += 1;
        }
        let group = (end - k) as f64;
        m.copy_from(&prefix);
        m /= nf;
        // lbar += group * m m^T, lower triangle then mirror at the end
        lbar.syger(group, &m, &m, 1.0);
        k = end;
    }
    lbar /= nf;
    // syger fills the lower triangle only
    for i in 0..p {
        for j in (i + 1)..p {
            lbar[(i, j)] = lbar[(j, i)];
        }
    }

    let sigma_hat = {
        let mut s = DMatrix::<f64>::zeros(p, p);
        s.gemm_tr(1.0 / nf, &centered, &centered, 0.0);
        symmetrize(&mut s);
        s
    };

    let cov_eig = SymmetricEigen::new(sigma_hat.clone());
    let w_max = cov_eig.eigenvalues.iter().cloned().fold(f64::MIN, f64::max);
    let w_min = cov_eig.eigenvalues.iter().cloned().fold(f64::MAX, f64::min);
    if w_max <= 0.0 || w_min <= COV_CONDITION_FLOOR * w_max || w_min.is_nan() {
        return Err(Error::IllConditionedCovariance { eigenvalue: w_min });
    }

    // Sigma^{-1/2} through the covariance eigenbasis
    let inv_sqrt = {
        let scaled = {
            let mut u = cov_eig.eigenvectors.clone();
            for j in 0..p {
                let s = cov_eig.eigenvalues[j].sqrt().recip();
                u.column_mut(j).scale_mut(s);
            }
            u
        };
        let mut m = DMatrix::<f64>::zeros(p, p);
        m.gemm(1.0, &scaled, &cov_eig.eigenvectors.transpose(), 0.0);
        symmetrize(&mut m);
        m
    };

    let mut whitened = &inv_sqrt * &lbar * &inv_sqrt;
    symmetrize(&mut whitened);

    let eig = SymmetricEigen::new(whitened);
    let mut idx: Vec<usize> = (0..p).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].partial_cmp(&eig.eigenvalues[a]).unwrap());

    let eigenvalues = DVector::from_fn(p, |j, _| eig.eigenvalues[idx[j]].max(0.0));
    let mut raw_directions = DMatrix::<f64>::zeros(p, p);
    for (j, &src) in idx.iter().enumerate() {
        let b = &inv_sqrt * eig.eigenvectors.column(src);
        raw_directions.set_column(j, &b);
    }
    let mut directions = raw_directions.clone();
    orthonormalize_columns(&mut directions)?;

    Ok(DeeDecomposition {
        eigenvalues,
        directions,
        raw_directions,
        sigma_hat,
    })
}

/// Ridge-type eigenvalue-ratio selection of the structural dimension:
/// the argmin over `j = 1..p-1` of `(lambda_{j+1}^2 + c_n)/(lambda_j^2 + c_n)`,
/// ties broken toward the smallest `j`. Returns 1 when fewer than two
/// eigenvalues are supplied.
pub fn rere(eigenvalues: &[f64], c_n: f64) -> usize {
    let p = eigenvalues.len();
    if p < 2 {
        return 1;
    }
    let sq = |v: f64| {
        let v = v.max(0.0);
        v * v
    };
    let mut best_j = 1;
    let mut best = f64::INFINITY;
    for j in 0..(p - 1) {
        let ratio = (sq(eigenvalues[j + 1]) + c_n) / (sq(eigenvalues[j]) + c_n);
        if ratio < best {
            best = ratio;
            best_j = j + 1;
        }
    }
    best_j
}

/// Ridge constant `log(n) / (n h_pilot^{q_pilot/2})`.
pub fn ridge_constant(n: usize, h_pilot: f64, q_pilot: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least 2 samples, got {n}"
        )));
    }
    if h_pilot <= 0.0 || !h_pilot.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "pilot bandwidth must be positive, got {h_pilot}"
        )));
    }
    let nf = n as f64;
    Ok(nf.ln() / (nf * h_pilot.powf(q_pilot as f64 / 2.0)))
}

/// Default ridge constant with the pilot dimension fixed at 1 and the pilot
/// bandwidth from the recommended rule. The pilot breaks the circular
/// dependence of the constant on the dimension it is used to select.
pub fn default_ridge_constant(n: usize) -> Result<f64> {
    let h_pilot = bandwidth_h(n, 1, 1.25)?;
    ridge_constant(n, h_pilot, 1)
}

/// Estimate the central-subspace basis: decompose, select the dimension,
/// and keep the leading orthonormalized directions.
pub fn estimate_basis(x: &DMatrix<f64>, y: &DVector<f64>, c_n: f64) -> Result<BasisEstimate> {
    let decomp = dee_matrix(x, y)?;
    let p = decomp.eigenvalues.len();
    let qhat = if p == 1 {
        1
    } else {
        rere(decomp.eigenvalues.as_slice(), c_n)
    };
    Ok(BasisEstimate {
        basis: decomp.directions.columns(0, qhat).into_owned(),
        qhat,
        eigenvalues: decomp.eigenvalues,
        c_n,
    })
}

/// One-step refinement of the ridge constant: select with the pilot
/// constant, recompute `c_n` with the selected dimension, and reselect from
/// the same decomposition.
pub fn estimate_basis_refined(x: &DMatrix<f64>, y: &DVector<f64>) -> Result<BasisEstimate> {
    let n = x.nrows();
    let first = estimate_basis(x, y, default_ridge_constant(n)?)?;
    let h_pilot = bandwidth_h(n, first.qhat, 1.25)?;
    let c_n = ridge_constant(n, h_pilot, first.qhat)?;
    let qhat = rere(first.eigenvalues.as_slice(), c_n);
    let decomp = dee_matrix(x, y)?;
    Ok(BasisEstimate {
        basis: decomp.directions.columns(0, qhat).into_owned(),
        qhat,
        eigenvalues: first.eigenvalues,
        c_n,
    })
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let p = m.nrows();
    for i in 0..p {
        for j in (i + 1)..p {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Modified Gram-Schmidt, two passes, in column order.
fn orthonormalize_columns(b: &mut DMatrix<f64>) -> Result<()> {
    let cols = b.ncols();
    for j in 0..cols {
        let mut v = b.column(j).clone_owned();
        for _ in 0..2 {
            for k in 0..j {
                let q = b.column(k);
                let r = q.dot(&v);
                v.axpy(-r, &q.clone_owned(), 1.0);
            }
        }
        let norm = v.norm();
        if norm <= 1e-12 {
            return Err(Error::IllConditionedCovariance { eigenvalue: norm });
        }
        v /= norm;
        b.set_column(j, &v);
    }
    Ok(())
}
