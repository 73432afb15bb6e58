//! Simulation designs, covariance structures, and seeded random-number
//! infrastructure for the Monte Carlo studies.

use nalgebra::{Cholesky, DMatrix, DVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{ChiSquared, Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::smoothing::bandwidth_h;

/// Which simulation design to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExampleId {
    /// Single-index mean with scale `0.5 (1 + a |b'x|)`.
    Ex1,
    /// Single-index mean, two-index variance `0.5 (a ((b1'x)^2 + (b2'x)^2) + 1)`, t(6) errors.
    Ex2,
    /// Two-index mean with square-root variance inflation.
    Ex3,
    /// Local alternative on the Ex1 null with `f(z) = z^2`.
    Local,
}

impl ExampleId {
    pub fn as_str(&self) -> &'static str {
        match self {
            ExampleId::Ex1 => "ex1",
            ExampleId::Ex2 => "ex2",
            ExampleId::Ex3 => "ex3",
            ExampleId::Local => "local",
        }
    }

    /// Structural dimension of the mean function under the null.
    pub fn null_dimension(&self) -> usize {
        match self {
            ExampleId::Ex3 => 2,
            _ => 1,
        }
    }

    /// Error variance of the null model (`Var` of the full error term).
    pub fn null_sigma2(&self) -> f64 {
        match self {
            // 0.5 * t(6): 0.25 * 6/4
            ExampleId::Ex2 => 0.375,
            _ => 0.25,
        }
    }
}

/// Covariance structure of the covariates.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CovarianceKind {
    /// AR(1)-style decay `0.5^{|i-j|}`.
    Sigma1,
    /// Equicorrelation 0.3 off the diagonal.
    Sigma2,
}

impl CovarianceKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CovarianceKind::Sigma1 => "sigma1",
            CovarianceKind::Sigma2 => "sigma2",
        }
    }
}

/// Error-term law.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ErrorLaw {
    StdNormal,
    StudentT6,
}

impl ErrorLaw {
    pub fn as_str(&self) -> &'static str {
        match self {
            ErrorLaw::StdNormal => "std_normal",
            ErrorLaw::StudentT6 => "student_t6",
        }
    }
}

/// A fully pinned simulation design: identical specs generate bitwise
/// identical datasets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioSpec {
    pub example: ExampleId,
    pub n: usize,
    pub p: usize,
    pub a: f64,
    pub covariance: CovarianceKind,
    pub error: ErrorLaw,
    pub seed: u64,
}

impl ScenarioSpec {
    /// Build a spec with the canonical error law of the chosen example
    /// (t(6) for ex2, standard normal otherwise).
    pub fn new(
        example: ExampleId,
        n: usize,
        p: usize,
        a: f64,
        covariance: CovarianceKind,
        seed: u64,
    ) -> Self {
        let error = match example {
            ExampleId::Ex2 => ErrorLaw::StudentT6,
            _ => ErrorLaw::StdNormal,
        };
        ScenarioSpec {
            example,
            n,
            p,
            a,
            covariance,
            error,
            seed,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = seed;
        self
    }
}

/// Covariates plus response; the universal input of every test.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    pub x: DMatrix<f64>,
    pub y: DVector<f64>,
}

impl Dataset {
    pub fn new(x: DMatrix<f64>, y: DVector<f64>) -> Result<Self> {
        if x.nrows() != y.len() {
            return Err(Error::DimensionMismatch {
                expected: x.nrows(),
                got: y.len(),
            });
        }
        if x.iter().any(|v| !v.is_finite()) || y.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidArgument("dataset entries must be finite".into()));
        }
        Ok(Dataset { x, y })
    }

    pub fn n(&self) -> usize {
        self.x.nrows()
    }

    pub fn p(&self) -> usize {
        self.x.ncols()
    }
}

const MIX_INIT: u64 = 0x6A09_E667_F3BC_C909;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed-derivation domain for per-replication dataset generation.
pub const SEED_DOMAIN_DATASET: u64 = 0;
/// Seed-derivation domain for wild-bootstrap multipliers.
pub const SEED_DOMAIN_BOOTSTRAP: u64 = 1;

/// Stable hash of `(master, domain, index)` used to seed per-replication
/// streams, so parallel and serial runs consume identical randomness.
pub fn derive_seed(master: u64, domain: u64, index: u64) -> u64 {
    let mut h = mix64(master ^ MIX_INIT);
    h = mix64(h ^ domain.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    mix64(h ^ index.wrapping_add(0x9E37_79B9_7F4A_7C15))
}

/// Deterministic generator seeded from a 64-bit value.
pub fn rng_from_seed(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// The two covariate covariance structures.
pub fn covariance_matrix(kind: CovarianceKind, p: usize) -> DMatrix<f64> {
    DMatrix::from_fn(p, p, |i, j| match kind {
        CovarianceKind::Sigma1 => 0.5f64.powi((i as i32 - j as i32).abs()),
        CovarianceKind::Sigma2 => {
            if i == j {
                1.0
            } else {
                0.3
            }
        }
    })
}

/// Multivariate normal sampler backed by a lower-triangular square root of
/// the covariance.
#[derive(Debug, Clone)]
pub struct MvnSampler {
    mean: DVector<f64>,
    lower: DMatrix<f64>,
}

impl MvnSampler {
    pub fn new(mean: DVector<f64>, cov: DMatrix<f64>) -> Result<Self> {
        if cov.nrows() != mean.len() || cov.ncols() != mean.len() {
            return Err(Error::DimensionMismatch {
                expected: mean.len(),
                got: cov.nrows(),
            });
        }
        let chol = Cholesky::new(cov).ok_or(Error::NotPositiveDefinite)?;
        Ok(MvnSampler {
            mean,
            lower: chol.l(),
        })
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> DVector<f64> {
        let z = DVector::from_fn(self.mean.len(), |_, _| StandardNormal.sample(rng));
        &self.mean + &self.lower * z
    }
}

/// One multivariate normal draw; factors the covariance on every call, so
/// prefer [`MvnSampler`] in loops.
pub fn mvn_sample<R: Rng>(rng: &mut R, mean: &DVector<f64>, cov: &DMatrix<f64>) -> Result<DVector<f64>> {
    let sampler = MvnSampler::new(mean.clone(), cov.clone())?;
    Ok(sampler.sample(rng))
}

fn draw_error<R: Rng>(rng: &mut R, law: ErrorLaw) -> f64 {
    match law {
        ErrorLaw::StdNormal => StandardNormal.sample(rng),
        ErrorLaw::StudentT6 => {
            // ratio construction: N(0,1) over sqrt(chi2(6)/6)
            let z: f64 = StandardNormal.sample(rng);
            let chi: f64 = ChiSquared::new(6.0).expect("valid dof").sample(rng);
            z / (chi / 6.0).sqrt()
        }
    }
}

fn beta_single_index(p: usize) -> DVector<f64> {
    let half = p / 2;
    let norm = (half as f64).sqrt();
    DVector::from_fn(p, |i, _| if i < half { 1.0 / norm } else { 0.0 })
}

/// `beta_1 = (1,1,0,0)/sqrt(2)` and `beta_2 = (0,0,1,1)/sqrt(2)`.
fn beta_pair() -> (DVector<f64>, DVector<f64>) {
    let s = std::f64::consts::FRAC_1_SQRT_2;
    (
        DVector::from_column_slice(&[s, s, 0.0, 0.0]),
        DVector::from_column_slice(&[0.0, 0.0, s, s]),
    )
}

fn sampler_for(spec: &ScenarioSpec) -> Result<MvnSampler> {
    MvnSampler::new(
        DVector::zeros(spec.p),
        covariance_matrix(spec.covariance, spec.p),
    )
}

/// Single-index design: mean `b'x + exp(-(b'x)^2)`, scale `0.5 (1 + a |b'x|)`.
pub fn gen_example1(spec: &ScenarioSpec) -> Result<Dataset> {
    if spec.p < 2 || spec.p % 2 != 0 {
        return Err(Error::InvalidArgument(format!(
            "example 1 needs an even number of covariates, got {}",
            spec.p
        )));
    }
    let beta = beta_single_index(spec.p);
    let sampler = sampler_for(spec)?;
    let mut rng = rng_from_seed(spec.seed);
    let mut x = DMatrix::zeros(spec.n, spec.p);
    let mut y = DVector::zeros(spec.n);
    for i in 0..spec.n {
        let xi = sampler.sample(&mut rng);
        let z = beta.dot(&xi);
        let eps = draw_error(&mut rng, spec.error);
        let mean = z + (-(z * z)).exp();
        y[i] = mean + 0.5 * (1.0 + spec.a * z.abs()) * eps;
        x.row_mut(i).copy_from(&xi.transpose());
    }
    Dataset::new(x, y)
}

/// Two-index variance design at p = 4 with t(6) errors.
pub fn gen_example2(spec: &ScenarioSpec) -> Result<Dataset> {
    if spec.p != 4 {
        return Err(Error::InvalidArgument(format!(
            "example 2 is defined for p = 4, got {}",
            spec.p
        )));
    }
    let (b1, b2) = beta_pair();
    let sampler = sampler_for(spec)?;
    let mut rng = rng_from_seed(spec.seed);
    let mut x = DMatrix::zeros(spec.n, 4);
    let mut y = DVector::zeros(spec.n);
    for i in 0..spec.n {
        let xi = sampler.sample(&mut rng);
        let z1 = b1.dot(&xi);
        let z2 = b2.dot(&xi);
        let eps = draw_error(&mut rng, spec.error);
        y[i] = z1 + 0.5 * (spec.a * (z1 * z1 + z2 * z2) + 1.0) * eps;
        x.row_mut(i).copy_from(&xi.transpose());
    }
    Dataset::new(x, y)
}

/// Two-index mean design at p = 4.
pub fn gen_example3(spec: &ScenarioSpec) -> Result<Dataset> {
    if spec.p != 4 {
        return Err(Error::InvalidArgument(format!(
            "example 3 is defined for p = 4, got {}",
            spec.p
        )));
    }
    let (b1, b2) = beta_pair();
    let sampler = sampler_for(spec)?;
    let mut rng = rng_from_seed(spec.seed);
    let mut x = DMatrix::zeros(spec.n, 4);
    let mut y = DVector::zeros(spec.n);
    for i in 0..spec.n {
        let xi = sampler.sample(&mut rng);
        let z1 = b1.dot(&xi);
        let z2 = b2.dot(&xi);
        let eps = draw_error(&mut rng, spec.error);
        let mean = z1 + 2.0 * (z2 / 2.0).sin();
        y[i] = mean + 0.5 * (spec.a * (z1 * z1 + z2 * z2) + 1.0).sqrt() * eps;
        x.row_mut(i).copy_from(&xi.transpose());
    }
    Dataset::new(x, y)
}

/// Drift rate `n^{-1/2} h^{-q1/4}` of the local alternatives, with `h` from
/// the recommended bandwidth rule at the null dimension `q1`.
pub fn local_alternative_rate(n: usize, q1: usize) -> Result<f64> {
    let h = bandwidth_h(n, q1, 1.25)?;
    Ok((n as f64).powf(-0.5) * h.powf(-(q1 as f64) / 4.0))
}

/// Local alternative around the null of `base`: the conditional variance is
/// set to exactly `sigma^2 + C_n f(z)` with `z` the first mean-index value,
/// drifting toward the null at rate `C_n`.
///
/// Draws where `sigma^2 + C_n f(z)` fails to stay positive are rejected
/// with an error naming the draw. With `f = 0` the output is bitwise the
/// base null model.
pub fn gen_local_alternative<F>(base: &ScenarioSpec, f: F) -> Result<Dataset>
where
    F: Fn(f64) -> f64,
{
    let q1 = base.example.null_dimension();
    let sigma2 = base.example.null_sigma2();
    let rate = local_alternative_rate(base.n, q1)?;

    let (b1, b2) = match base.example {
        ExampleId::Ex1 => {
            if base.p < 2 || base.p % 2 != 0 {
                return Err(Error::InvalidArgument(format!(
                    "example 1 needs an even number of covariates, got {}",
                    base.p
                )));
            }
            (beta_single_index(base.p), None)
        }
        ExampleId::Ex2 => {
            if base.p != 4 {
                return Err(Error::InvalidArgument("example 2 needs p = 4".into()));
            }
            let (a, b) = beta_pair();
            (a, Some(b))
        }
        ExampleId::Ex3 => {
            if base.p != 4 {
                return Err(Error::InvalidArgument("example 3 needs p = 4".into()));
            }
            let (a, b) = beta_pair();
            (a, Some(b))
        }
        ExampleId::Local => {
            return Err(Error::InvalidArgument(
                "local alternative needs a concrete base example".into(),
            ))
        }
    };

    // unit-variance version of the error law, so the variance target is hit
    // exactly
    let unit_sd = match base.error {
        ErrorLaw::StdNormal => 1.0,
        ErrorLaw::StudentT6 => 1.5f64.sqrt(),
    };

    let sampler = sampler_for(base)?;
    let mut rng = rng_from_seed(base.seed);
    let mut x = DMatrix::zeros(base.n, base.p);
    let mut y = DVector::zeros(base.n);
    for i in 0..base.n {
        let xi = sampler.sample(&mut rng);
        let z1 = b1.dot(&xi);
        let eps = draw_error(&mut rng, base.error);
        let mean = match base.example {
            ExampleId::Ex1 => z1 + (-(z1 * z1)).exp(),
            ExampleId::Ex2 => z1,
            ExampleId::Ex3 => {
                let z2 = b2.as_ref().expect("two-index base").dot(&xi);
                z1 + 2.0 * (z2 / 2.0).sin()
            }
            ExampleId::Local => unreachable!(),
        };
        let fz = f(z1);
        let var = sigma2 + rate * fz;
        if var <= 0.0 || var.is_nan() {
            return Err(Error::NonPositiveVariance { index: i });
        }
        y[i] = mean + var.sqrt() * (eps / unit_sd);
        x.row_mut(i).copy_from(&xi.transpose());
    }
    Dataset::new(x, y)
}

/// Generate the dataset a spec describes. `Local` draws the quadratic local
/// alternative `f(z) = z^2` around the example-1 null.
pub fn generate(spec: &ScenarioSpec) -> Result<Dataset> {
    match spec.example {
        ExampleId::Ex1 => gen_example1(spec),
        ExampleId::Ex2 => gen_example2(spec),
        ExampleId::Ex3 => gen_example3(spec),
        ExampleId::Local => {
            let base = ScenarioSpec {
                example: ExampleId::Ex1,
                a: 0.0,
                ..*spec
            };
            gen_local_alternative(&base, |z| z * z)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn covariance_fixtures() {
        let s1 = covariance_matrix(CovarianceKind::Sigma1, 2);
        assert_eq!(s1, DMatrix::from_row_slice(2, 2, &[1.0, 0.5, 0.5, 1.0]));

        let s2 = covariance_matrix(CovarianceKind::Sigma2, 3);
        assert_eq!(
            s2,
            DMatrix::from_row_slice(3, 3, &[1.0, 0.3, 0.3, 0.3, 1.0, 0.3, 0.3, 0.3, 1.0])
        );

        assert_eq!(
            covariance_matrix(CovarianceKind::Sigma1, 1),
            DMatrix::from_element(1, 1, 1.0)
        );
    }

    #[test]
    fn covariances_are_positive_definite() {
        for kind in [CovarianceKind::Sigma1, CovarianceKind::Sigma2] {
            for p in [1, 2, 4, 8, 12] {
                assert!(
                    Cholesky::new(covariance_matrix(kind, p)).is_some(),
                    "{kind:?} p={p}"
                );
            }
        }
    }

    #[test]
    fn mvn_moments_match() {
        let mut rng = rng_from_seed(99);
        let sampler = MvnSampler::new(DVector::zeros(2), covariance_matrix(CovarianceKind::Sigma1, 2))
            .unwrap();
        let reps = 100_000;
        let mut mean = DVector::zeros(2);
        for _ in 0..reps {
            mean += sampler.sample(&mut rng);
        }
        mean /= reps as f64;
        assert!(mean[0].abs() < 0.02 && mean[1].abs() < 0.02, "mean {mean:?}");

        let sampler4 = MvnSampler::new(DVector::zeros(1), DMatrix::from_element(1, 1, 4.0)).unwrap();
        let mut sum = 0.0;
        let mut sumsq = 0.0;
        for _ in 0..reps {
            let v = sampler4.sample(&mut rng)[0];
            sum += v;
            sumsq += v * v;
        }
        let var = sumsq / reps as f64 - (sum / reps as f64).powi(2);
        assert!((var - 4.0).abs() < 0.1, "variance {var}");
    }

    #[test]
    fn mvn_rejects_non_positive_definite() {
        let mut rng = rng_from_seed(0);
        let zero = DMatrix::from_element(1, 1, 0.0);
        assert!(matches!(
            mvn_sample(&mut rng, &DVector::zeros(1), &zero),
            Err(Error::NotPositiveDefinite)
        ));
    }

    #[test]
    fn datasets_are_bitwise_deterministic() {
        let spec = ScenarioSpec::new(ExampleId::Ex1, 50, 4, 0.3, CovarianceKind::Sigma1, 7);
        let d1 = generate(&spec).unwrap();
        let d2 = generate(&spec).unwrap();
        assert_eq!(d1, d2);
    }

    #[test]
    fn derived_streams_are_distinct() {
        let base = ScenarioSpec::new(ExampleId::Ex1, 200, 2, 0.0, CovarianceKind::Sigma1, 5);
        let d1 = generate(&base.with_seed(derive_seed(5, SEED_DOMAIN_DATASET, 0))).unwrap();
        let d2 = generate(&base.with_seed(derive_seed(5, SEED_DOMAIN_DATASET, 1))).unwrap();
        assert_ne!(d1, d2);

        // crude serial-correlation sanity check between consecutive streams
        let mean1 = d1.y.sum() / 200.0;
        let mean2 = d2.y.sum() / 200.0;
        let mut cov = 0.0;
        let mut v1 = 0.0;
        let mut v2 = 0.0;
        for i in 0..200 {
            let a = d1.y[i] - mean1;
            let b = d2.y[i] - mean2;
            cov += a * b;
            v1 += a * a;
            v2 += b * b;
        }
        let corr = cov / (v1.sqrt() * v2.sqrt());
        assert!(corr.abs() < 0.2, "cross-stream correlation {corr}");
    }

    #[test]
    fn example1_structure() {
        let spec = ScenarioSpec::new(ExampleId::Ex1, 100_000, 4, 0.0, CovarianceKind::Sigma1, 31);
        let data = generate(&spec).unwrap();
        let beta = beta_single_index(4);
        assert_abs_diff_eq!(beta.dot(&beta), 1.0, epsilon = 1e-12);

        // with a = 0 the residual around the true mean has variance 0.25
        let mut var = 0.0;
        for i in 0..data.n() {
            let z = beta.dot(&data.x.row(i).transpose());
            let resid = data.y[i] - (z + (-(z * z)).exp());
            var += resid * resid;
        }
        var /= data.n() as f64;
        assert!((var - 0.25).abs() < 0.01, "null variance {var}");

        assert!(gen_example1(&ScenarioSpec::new(
            ExampleId::Ex1,
            50,
            3,
            0.0,
            CovarianceKind::Sigma1,
            1
        ))
        .is_err());
    }

    #[test]
    fn example1_alternative_spreads_with_index() {
        let spec = ScenarioSpec::new(ExampleId::Ex1, 100_000, 2, 1.0, CovarianceKind::Sigma1, 13);
        let data = generate(&spec).unwrap();
        let beta = beta_single_index(2);

        // Spearman rank correlation between |z| and squared residuals
        let n = data.n();
        let mut zabs = Vec::with_capacity(n);
        let mut r2 = Vec::with_capacity(n);
        for i in 0..n {
            let z = beta.dot(&data.x.row(i).transpose());
            let resid = data.y[i] - (z + (-(z * z)).exp());
            zabs.push(z.abs());
            r2.push(resid * resid);
        }
        let rank = |v: &[f64]| {
            let mut idx: Vec<usize> = (0..v.len()).collect();
            idx.sort_by(|&a, &b| v[a].partial_cmp(&v[b]).unwrap());
            let mut r = vec![0.0; v.len()];
            for (pos, &i) in idx.iter().enumerate() {
                r[i] = pos as f64;
            }
            r
        };
        let ra = rank(&zabs);
        let rb = rank(&r2);
        let mean = (n as f64 - 1.0) / 2.0;
        let mut num = 0.0;
        let mut da = 0.0;
        let mut db = 0.0;
        for i in 0..n {
            num += (ra[i] - mean) * (rb[i] - mean);
            da += (ra[i] - mean).powi(2);
            db += (rb[i] - mean).powi(2);
        }
        let rho = num / (da.sqrt() * db.sqrt());
        assert!(rho > 0.1, "rank correlation {rho}");
    }

    #[test]
    fn example2_structure() {
        let (b1, b2) = beta_pair();
        assert_abs_diff_eq!(b1.dot(&b2), 0.0, epsilon = 1e-15);

        let spec = ScenarioSpec::new(ExampleId::Ex2, 100_000, 4, 0.0, CovarianceKind::Sigma1, 17);
        assert_eq!(spec.error, ErrorLaw::StudentT6);
        let data = generate(&spec).unwrap();
        let mut var = 0.0;
        for i in 0..data.n() {
            let z1 = b1.dot(&data.x.row(i).transpose());
            let resid = data.y[i] - z1;
            var += resid * resid;
        }
        var /= data.n() as f64;
        // 0.25 * Var(t6) = 0.375, within 5%
        assert!((var - 0.375).abs() < 0.05 * 0.375, "null variance {var}");

        assert!(gen_example2(&ScenarioSpec::new(
            ExampleId::Ex2,
            50,
            3,
            0.0,
            CovarianceKind::Sigma1,
            1
        ))
        .is_err());
    }

    #[test]
    fn example3_structure() {
        let spec = ScenarioSpec::new(ExampleId::Ex3, 100_000, 4, 0.0, CovarianceKind::Sigma1, 23);
        let data = generate(&spec).unwrap();
        let (b1, b2) = beta_pair();
        let mut var = 0.0;
        let mut max_sin_term = 0.0f64;
        for i in 0..data.n() {
            let xi = data.x.row(i).transpose();
            let sin_term = 2.0 * (b2.dot(&xi) / 2.0).sin();
            max_sin_term = max_sin_term.max(sin_term.abs());
            let mean = b1.dot(&xi) + sin_term;
            let resid = data.y[i] - mean;
            var += resid * resid;
        }
        var /= data.n() as f64;
        assert!((var - 0.25).abs() < 0.01, "null variance {var}");
        assert!(max_sin_term <= 2.0);

        assert!(gen_example3(&ScenarioSpec::new(
            ExampleId::Ex3,
            50,
            2,
            0.0,
            CovarianceKind::Sigma1,
            1
        ))
        .is_err());
    }

    #[test]
    fn local_alternative_with_zero_f_is_the_null() {
        let base = ScenarioSpec::new(ExampleId::Ex1, 300, 2, 0.0, CovarianceKind::Sigma1, 77);
        let null = gen_example1(&base).unwrap();
        let local = gen_local_alternative(&base, |_| 0.0).unwrap();
        assert_eq!(null, local);
    }

    #[test]
    fn local_alternative_rate_decreases() {
        let mut prev = f64::INFINITY;
        for k in 0..6 {
            let n = 100 * (1 << k);
            let c = local_alternative_rate(n, 1).unwrap();
            assert!(c < prev);
            prev = c;
        }
    }

    #[test]
    fn local_alternative_rejects_nonpositive_variance() {
        let base = ScenarioSpec::new(ExampleId::Ex1, 200, 2, 0.0, CovarianceKind::Sigma1, 3);
        match gen_local_alternative(&base, |_| -1.0e6) {
            Err(Error::NonPositiveVariance { index }) => assert_eq!(index, 0),
            other => panic!("expected nonpositive variance error, got {other:?}"),
        }
    }
}
