//! Target densities: Gaussian mixtures and the positive-orthant truncated
//! Gaussian, with seeded i.i.d. sampling.
//!
//! Densities are immutable after construction. Every sampling call builds its
//! own generator from an [`RngSeed`] and a stream id, so calls can run
//! concurrently and replay bit-for-bit.
//!
//! # Configuration format
//!
//! [`TargetDensity::from_config_str`] reads a plain-text key-value file. Blank
//! lines and `#` comments are ignored; keys and values are separated by `=`.
//!
//! ```text
//! family = mixture            # mixture | truncated-gaussian | random-mixture
//! dim = 2
//! # mixture: one line per component, fields separated by `|`:
//! #   weight | mean (dim numbers) | covariance (dim*dim numbers, row-major)
//! component = 0.3 | 0.0 1.0 | 1.0 0.2 0.2 0.5
//! component = 0.7 | -1.0 0.0 | 0.4 0.0 0.0 0.4
//! # random-mixture only:
//! components = 20
//! seed = 42
//! ```

use rand::distr::weighted::WeightedIndex;
use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{check_dim, Error, Result};
use crate::linalg::{Cholesky, Matrix};
use crate::rng::{streams, RngSeed};
use crate::scalar::Scalar;

/// Number of standard deviations kept when truncating an unbounded axis for
/// numerical integration.
pub const TAIL_SDS: f64 = 8.0;

#[derive(Debug, Clone)]
pub struct GaussianComponent<S> {
    weight: S,
    mean: Vec<S>,
    cov: Matrix<S>,
    chol: Cholesky<S>,
    log_norm: S,
}

impl<S: Scalar> GaussianComponent<S> {
    pub fn weight(&self) -> S {
        self.weight
    }

    pub fn mean(&self) -> &[S] {
        &self.mean
    }

    pub fn covariance(&self) -> &Matrix<S> {
        &self.cov
    }

    pub fn pdf(&self, x: &[S]) -> S {
        let diff: Vec<S> = x.iter().zip(&self.mean).map(|(&a, &m)| a - m).collect();
        let q = self.chol.solve_lower(&diff);
        let r2: S = q.iter().map(|&v| v * v).sum();
        (self.log_norm - r2 / S::lit(2.0)).exp()
    }
}

/// Finite mixture of multivariate normal densities.
#[derive(Debug, Clone)]
pub struct GaussianMixture<S> {
    dim: usize,
    components: Vec<GaussianComponent<S>>,
}

impl<S: Scalar> GaussianMixture<S> {
    /// Builds a mixture from `(weight, mean, covariance)` triples. Weights must
    /// be positive and sum to one; covariances symmetric positive definite.
    pub fn new(dim: usize, components: Vec<(S, Vec<S>, Matrix<S>)>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        if components.is_empty() {
            return Err(Error::InvalidInput("mixture needs at least one component".into()));
        }
        let mut total = 0.0f64;
        let mut out = Vec::with_capacity(components.len());
        for (weight, mean, cov) in components {
            check_dim(dim, mean.len())?;
            if cov.rows() != dim || cov.cols() != dim {
                return Err(Error::DimensionMismatch {
                    expected: dim,
                    got: cov.rows(),
                });
            }
            if !(weight > S::zero()) {
                return Err(Error::InvalidInput("mixture weights must be positive".into()));
            }
            let scale = (0..dim).map(|i| cov[(i, i)].abs()).fold(S::zero(), S::max);
            if cov.max_abs_asymmetry() > S::epsilon() * S::lit(16.0) * scale {
                return Err(Error::InvalidInput("covariance must be symmetric".into()));
            }
            let chol = Cholesky::new(&cov, S::zero()).ok_or_else(|| {
                Error::InvalidInput("covariance must be positive definite".into())
            })?;
            let log_norm = -(S::lit(dim as f64) * S::TAU().ln() + chol.log_det()) / S::lit(2.0);
            total += weight.to_f64_lossy();
            out.push(GaussianComponent {
                weight,
                mean,
                cov,
                chol,
                log_norm,
            });
        }
        let tol = if std::mem::size_of::<S>() >= 8 { 1e-12 } else { 1e-6 };
        if (total - 1.0).abs() > tol {
            return Err(Error::InvalidInput(format!(
                "mixture weights sum to {total}, not 1"
            )));
        }
        Ok(Self {
            dim,
            components: out,
        })
    }

    /// Single Gaussian `N(mean, cov)`.
    pub fn single(mean: Vec<S>, cov: Matrix<S>) -> Result<Self> {
        Self::new(mean.len(), vec![(S::one(), mean, cov)])
    }

    /// Isotropic Gaussian `N(mean, variance·I)`.
    pub fn isotropic(mean: Vec<S>, variance: S) -> Result<Self> {
        let d = mean.len();
        let mut cov = Matrix::identity(d);
        for i in 0..d {
            cov[(i, i)] = variance;
        }
        Self::single(mean, cov)
    }

    /// Reproducible random mixture: means uniform in `[-3, 3]^d`, covariances
    /// `A Aᵀ + 0.1 I` with `A` entries uniform in `[-0.7, 0.7]`, weights
    /// proportional to uniform(0.5, 1.5) draws.
    pub fn random(dim: usize, components: usize, seed: RngSeed) -> Result<Self> {
        if components == 0 {
            return Err(Error::InvalidInput("mixture needs at least one component".into()));
        }
        let mut rng = seed.rng(streams::DIRECT);
        let mean_dist = Uniform::new(-3.0f64, 3.0).expect("valid range");
        let a_dist = Uniform::new(-0.7f64, 0.7).expect("valid range");
        let w_dist = Uniform::new(0.5f64, 1.5).expect("valid range");
        let mut raw = Vec::with_capacity(components);
        for _ in 0..components {
            let mean: Vec<f64> = (0..dim).map(|_| mean_dist.sample(&mut rng)).collect();
            let a = Matrix::from_fn(dim, dim, |_, _| a_dist.sample(&mut rng));
            let mut cov = Matrix::from_fn(dim, dim, |i, j| {
                (0..dim).map(|k| a[(i, k)] * a[(j, k)]).sum::<f64>()
            });
            for i in 0..dim {
                cov[(i, i)] += 0.1;
            }
            let w = w_dist.sample(&mut rng);
            raw.push((w, mean, cov));
        }
        let total: f64 = raw.iter().map(|r| r.0).sum();
        let comps = raw
            .into_iter()
            .map(|(w, m, c)| {
                (
                    S::lit(w / total),
                    m.into_iter().map(S::lit).collect(),
                    Matrix::from_fn(dim, dim, |i, j| S::lit(c[(i, j)])),
                )
            })
            .collect();
        Self::new(dim, comps)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn components(&self) -> &[GaussianComponent<S>] {
        &self.components
    }

    pub fn pdf_unchecked(&self, x: &[S]) -> S {
        self.components.iter().map(|c| c.weight * c.pdf(x)).sum()
    }

    pub fn mean(&self) -> Vec<S> {
        let mut m = vec![S::zero(); self.dim];
        for c in &self.components {
            for (mi, &ci) in m.iter_mut().zip(&c.mean) {
                *mi += c.weight * ci;
            }
        }
        m
    }

    fn sample_into<R: Rng>(&self, rng: &mut R, count: usize, out: &mut Vec<Vec<S>>) {
        let weights: Vec<f64> = self
            .components
            .iter()
            .map(|c| c.weight.to_f64_lossy())
            .collect();
        let pick = WeightedIndex::new(&weights).expect("weights validated at construction");
        for _ in 0..count {
            let c = &self.components[pick.sample(rng)];
            let z: Vec<S> = (0..self.dim)
                .map(|_| S::lit(StandardNormal.sample(rng)))
                .collect();
            let l = c.chol.factor();
            let x = (0..self.dim)
                .map(|i| c.mean[i] + (0..=i).map(|k| l[(i, k)] * z[k]).sum::<S>())
                .collect();
            out.push(x);
        }
    }
}

/// `N(1, ½ I)` truncated to the positive orthant `[0, ∞)^d`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TruncatedGaussian<S> {
    dim: usize,
    _marker: std::marker::PhantomData<S>,
}

impl<S: Scalar> TruncatedGaussian<S> {
    pub fn new(dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Self {
            dim,
            _marker: std::marker::PhantomData,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn location() -> S {
        S::one()
    }

    pub fn variance() -> S {
        S::lit(0.5)
    }

    /// One-dimensional factor of the density.
    pub fn axis_pdf(x: S) -> S {
        if x < S::zero() {
            return S::zero();
        }
        let sd = Self::variance().sqrt();
        let mass = (Self::location() / sd).norm_cdf();
        ((x - Self::location()) / sd).norm_pdf() / (sd * mass)
    }

    pub fn pdf_unchecked(&self, x: &[S]) -> S {
        x.iter().map(|&xi| Self::axis_pdf(xi)).product()
    }

    /// Mean of each coordinate.
    pub fn axis_mean() -> S {
        let sd = Self::variance().sqrt();
        let alpha = -Self::location() / sd;
        Self::location() + sd * alpha.norm_pdf() / (-alpha).norm_cdf()
    }

    /// Per-axis rejection from the untruncated normal.
    fn sample_into<R: Rng>(&self, rng: &mut R, count: usize, out: &mut Vec<Vec<S>>) {
        let sd = 0.5f64.sqrt();
        for _ in 0..count {
            let x = (0..self.dim)
                .map(|_| loop {
                    let z: f64 = StandardNormal.sample(rng);
                    let v = 1.0 + sd * z;
                    if v >= 0.0 {
                        break S::lit(v);
                    }
                })
                .collect();
            out.push(x);
        }
    }
}

/// One-dimensional factor of a product-form density, restricted to a finite
/// interval that carries all but a negligible fraction of its mass.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AxisFactor<S> {
    Normal { mean: S, sd: S },
    Truncated,
}

impl<S: Scalar> AxisFactor<S> {
    pub fn pdf(&self, x: S) -> S {
        match *self {
            AxisFactor::Normal { mean, sd } => ((x - mean) / sd).norm_pdf() / sd,
            AxisFactor::Truncated => TruncatedGaussian::<S>::axis_pdf(x),
        }
    }

    pub fn bounds(&self) -> (S, S) {
        let t = S::lit(TAIL_SDS);
        match *self {
            AxisFactor::Normal { mean, sd } => (mean - t * sd, mean + t * sd),
            AxisFactor::Truncated => (
                S::zero(),
                TruncatedGaussian::<S>::location() + t * TruncatedGaussian::<S>::variance().sqrt(),
            ),
        }
    }
}

/// A probability density on `X ⊆ R^d` supporting evaluation and sampling.
#[derive(Debug, Clone)]
pub enum TargetDensity<S> {
    Mixture(GaussianMixture<S>),
    Truncated(TruncatedGaussian<S>),
}

impl<S: Scalar> From<GaussianMixture<S>> for TargetDensity<S> {
    fn from(m: GaussianMixture<S>) -> Self {
        TargetDensity::Mixture(m)
    }
}

impl<S: Scalar> From<TruncatedGaussian<S>> for TargetDensity<S> {
    fn from(t: TruncatedGaussian<S>) -> Self {
        TargetDensity::Truncated(t)
    }
}

impl<S: Scalar> TargetDensity<S> {
    pub fn dim(&self) -> usize {
        match self {
            TargetDensity::Mixture(m) => m.dim(),
            TargetDensity::Truncated(t) => t.dim(),
        }
    }

    pub fn pdf(&self, x: &[S]) -> Result<S> {
        check_dim(self.dim(), x.len())?;
        Ok(self.pdf_unchecked(x))
    }

    pub fn pdf_unchecked(&self, x: &[S]) -> S {
        match self {
            TargetDensity::Mixture(m) => m.pdf_unchecked(x),
            TargetDensity::Truncated(t) => t.pdf_unchecked(x),
        }
    }

    pub fn in_support(&self, x: &[S]) -> bool {
        match self {
            TargetDensity::Mixture(_) => x.iter().all(|v| v.is_finite()),
            TargetDensity::Truncated(_) => x.iter().all(|&v| v >= S::zero() && v.is_finite()),
        }
    }

    pub fn mean(&self) -> Vec<S> {
        match self {
            TargetDensity::Mixture(m) => m.mean(),
            TargetDensity::Truncated(t) => vec![TruncatedGaussian::<S>::axis_mean(); t.dim()],
        }
    }

    /// `count` i.i.d. draws, deterministic in `seed`.
    pub fn sample(&self, count: usize, seed: RngSeed) -> Vec<Vec<S>> {
        self.sample_stream(count, seed, streams::DIRECT)
    }

    /// Like [`sample`](Self::sample) but on an explicit stream, so callers can
    /// draw many independent batches from one seed.
    pub fn sample_stream(&self, count: usize, seed: RngSeed, stream: u64) -> Vec<Vec<S>> {
        let mut rng = seed.rng(stream);
        self.sample_with(&mut rng, count)
    }

    pub fn sample_with<R: Rng>(&self, rng: &mut R, count: usize) -> Vec<Vec<S>> {
        let mut out = Vec::with_capacity(count);
        match self {
            TargetDensity::Mixture(m) => m.sample_into(rng, count, &mut out),
            TargetDensity::Truncated(t) => t.sample_into(rng, count, &mut out),
        }
        out
    }

    /// Per-axis factors when the density is a product of univariate
    /// densities (truncated Gaussian, or a single Gaussian with diagonal
    /// covariance).
    pub fn axis_factors(&self) -> Option<Vec<AxisFactor<S>>> {
        match self {
            TargetDensity::Truncated(t) => Some(vec![AxisFactor::Truncated; t.dim()]),
            TargetDensity::Mixture(m) => {
                let [c] = m.components() else { return None };
                let d = m.dim();
                for i in 0..d {
                    for j in 0..d {
                        if i != j && c.cov[(i, j)] != S::zero() {
                            return None;
                        }
                    }
                }
                Some(
                    (0..d)
                        .map(|i| AxisFactor::Normal {
                            mean: c.mean[i],
                            sd: c.cov[(i, i)].sqrt(),
                        })
                        .collect(),
                )
            }
        }
    }

    /// Axis-aligned box holding essentially all of the mass, used to truncate
    /// numerical integrals.
    pub fn integration_box(&self) -> Vec<(S, S)> {
        match self {
            TargetDensity::Truncated(t) => vec![AxisFactor::<S>::Truncated.bounds(); t.dim()],
            TargetDensity::Mixture(m) => {
                let t = S::lit(TAIL_SDS);
                (0..m.dim())
                    .map(|i| {
                        m.components().iter().fold(
                            (S::infinity(), S::neg_infinity()),
                            |(lo, hi), c| {
                                let sd = c.cov[(i, i)].sqrt();
                                (lo.min(c.mean[i] - t * sd), hi.max(c.mean[i] + t * sd))
                            },
                        )
                    })
                    .collect()
            }
        }
    }

    /// Parses the key-value configuration format described in the module docs.
    pub fn from_config_str(text: &str) -> Result<Self> {
        let mut family = None;
        let mut dim = None;
        let mut comps: Vec<(S, Vec<S>, Matrix<S>)> = Vec::new();
        let mut raw_components = Vec::new();
        let mut count = None;
        let mut seed = None;
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line.split_once('=').ok_or_else(|| {
                Error::InvalidInput(format!("line {}: expected `key = value`", lineno + 1))
            })?;
            let value = value.trim();
            let bad = |what: &str| Error::InvalidInput(format!("line {}: bad {what}", lineno + 1));
            match key.trim() {
                "family" => family = Some(value.to_string()),
                "dim" => dim = Some(value.parse::<usize>().map_err(|_| bad("dim"))?),
                "components" => count = Some(value.parse::<usize>().map_err(|_| bad("components"))?),
                "seed" => seed = Some(value.parse::<u64>().map_err(|_| bad("seed"))?),
                "component" => raw_components.push((lineno + 1, value.to_string())),
                other => {
                    return Err(Error::InvalidInput(format!(
                        "line {}: unknown key `{other}`",
                        lineno + 1
                    )))
                }
            }
        }
        let dim = dim.ok_or_else(|| Error::InvalidInput("missing `dim`".into()))?;
        match family.as_deref().unwrap_or("mixture") {
            "truncated-gaussian" => Ok(TruncatedGaussian::new(dim)?.into()),
            "random-mixture" => {
                let count = count.ok_or_else(|| Error::InvalidInput("missing `components`".into()))?;
                Ok(GaussianMixture::random(dim, count, RngSeed(seed.unwrap_or(0)))?.into())
            }
            "mixture" => {
                for (lineno, raw) in raw_components {
                    let fields: Vec<&str> = raw.split('|').map(str::trim).collect();
                    let parse = |s: &str| -> Result<Vec<S>> {
                        s.split_whitespace()
                            .map(|t| {
                                t.parse::<f64>().map(S::lit).map_err(|_| {
                                    Error::InvalidInput(format!("line {lineno}: bad number `{t}`"))
                                })
                            })
                            .collect()
                    };
                    let [w, m, c] = fields.as_slice() else {
                        return Err(Error::InvalidInput(format!(
                            "line {lineno}: component needs `weight | mean | covariance`"
                        )));
                    };
                    let w = parse(w)?;
                    let m = parse(m)?;
                    let c = parse(c)?;
                    if w.len() != 1 || c.len() != dim * dim {
                        return Err(Error::InvalidInput(format!(
                            "line {lineno}: component has wrong field sizes"
                        )));
                    }
                    let cov = Matrix::from_fn(dim, dim, |i, j| c[i * dim + j]);
                    comps.push((w[0], m, cov));
                }
                Ok(GaussianMixture::new(dim, comps)?.into())
            }
            other => Err(Error::InvalidInput(format!("unknown family `{other}`"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn std_normal_1d() -> TargetDensity<f64> {
        GaussianMixture::isotropic(vec![0.0], 1.0).unwrap().into()
    }

    #[test]
    fn standard_normal_mode() {
        let p = std_normal_1d();
        assert!((p.pdf(&[0.0]).unwrap() - 0.3989422804014327).abs() < 1e-15);
    }

    #[test]
    fn truncated_outside_support_is_zero() {
        let p: TargetDensity<f64> = TruncatedGaussian::new(1).unwrap().into();
        assert_eq!(p.pdf(&[-0.5]).unwrap(), 0.0);
    }

    #[test]
    fn truncated_at_location() {
        // φ(1 | 1, ½) / Φ(√2)
        let p: TargetDensity<f64> = TruncatedGaussian::new(1).unwrap().into();
        let expected = (1.0 / std::f64::consts::PI).sqrt() / 0.9213503964748575;
        assert!((p.pdf(&[1.0]).unwrap() - expected).abs() < 1e-14);
        assert!((p.pdf(&[1.0]).unwrap() - 0.612350).abs() < 1e-6);
    }

    #[test]
    fn dimension_mismatch_is_reported() {
        let p = std_normal_1d();
        assert_eq!(
            p.pdf(&[0.0, 1.0]),
            Err(Error::DimensionMismatch { expected: 1, got: 2 })
        );
    }

    #[test]
    fn zero_count_sample_is_empty() {
        assert!(std_normal_1d().sample(0, RngSeed(1)).is_empty());
    }

    #[test]
    fn sampling_is_deterministic() {
        let p: TargetDensity<f64> = GaussianMixture::random(2, 5, RngSeed(3)).unwrap().into();
        assert_eq!(p.sample(50, RngSeed(9)), p.sample(50, RngSeed(9)));
        assert_ne!(p.sample(50, RngSeed(9)), p.sample(50, RngSeed(10)));
    }

    #[test]
    fn sample_mean_within_clt_band() {
        let p: TargetDensity<f64> = GaussianMixture::isotropic(vec![2.0], 1.0).unwrap().into();
        let xs = p.sample(100_000, RngSeed(17));
        let mean = xs.iter().map(|x| x[0]).sum::<f64>() / xs.len() as f64;
        assert!((mean - 2.0).abs() <= 0.013, "mean {mean}");
    }

    #[test]
    fn truncated_samples_stay_in_support() {
        let p: TargetDensity<f64> = TruncatedGaussian::new(3).unwrap().into();
        let xs = p.sample(20_000, RngSeed(5));
        assert!(xs.iter().all(|x| x.iter().all(|&v| v >= 0.0)));
        let m = TruncatedGaussian::<f64>::axis_mean();
        let se = (0.5f64 / 20_000.0).sqrt();
        for axis in 0..3 {
            let mean = xs.iter().map(|x| x[axis]).sum::<f64>() / xs.len() as f64;
            assert!((mean - m).abs() < 4.0 * se);
        }
    }

    #[test]
    fn truncated_pdf_normalised_numerically() {
        // Trapezoid on a fine grid is plenty for a smooth 1-D check.
        let h = 1e-4;
        let hi = 1.0 + 8.0 * 0.5f64.sqrt();
        let n = (hi / h) as usize;
        let mut total = 0.5 * (TruncatedGaussian::<f64>::axis_pdf(0.0));
        for i in 1..n {
            total += TruncatedGaussian::<f64>::axis_pdf(i as f64 * h);
        }
        assert!((total * h - 1.0).abs() < 1e-6);
    }

    #[test]
    fn component_frequencies_match_weights() {
        let mix = GaussianMixture::new(
            1,
            vec![
                (0.2, vec![-10.0], Matrix::from_rows(&[vec![0.01]]).unwrap()),
                (0.8, vec![10.0], Matrix::from_rows(&[vec![0.01]]).unwrap()),
            ],
        )
        .unwrap();
        let p: TargetDensity<f64> = mix.into();
        let n = 50_000;
        let xs = p.sample(n, RngSeed(11));
        let left = xs.iter().filter(|x| x[0] < 0.0).count() as f64 / n as f64;
        let band = 4.0 * (0.2f64 * 0.8 / n as f64).sqrt();
        assert!((left - 0.2).abs() < band);
    }

    #[test]
    fn mixture_pdf_is_weighted_component_sum() {
        let mix = GaussianMixture::<f64>::random(2, 4, RngSeed(2)).unwrap();
        let x = [0.3, -0.7];
        let direct: f64 = mix.components().iter().map(|c| c.weight() * c.pdf(&x)).sum();
        let got = mix.pdf_unchecked(&x);
        assert!((got - direct).abs() <= 1e-14 * direct);
    }

    #[test]
    fn rejects_bad_mixtures() {
        let eye = Matrix::<f64>::identity(1);
        assert!(GaussianMixture::new(1, vec![(0.5, vec![0.0], eye.clone())]).is_err());
        assert!(GaussianMixture::new(1, vec![(1.0, vec![0.0], Matrix::from_rows(&[vec![-1.0]]).unwrap())]).is_err());
        let asym = Matrix::from_rows(&[vec![1.0, 0.5], vec![0.0, 1.0]]).unwrap();
        assert!(GaussianMixture::new(2, vec![(1.0, vec![0.0, 0.0], asym)]).is_err());
    }

    #[test]
    fn parses_config_files() {
        let text = "family = mixture\ndim = 2\n\
                    component = 0.25 | 0 1 | 1 0.2 0.2 0.5  # first\n\
                    component = 0.75 | -1 0 | 0.4 0 0 0.4\n";
        let p = TargetDensity::<f64>::from_config_str(text).unwrap();
        assert_eq!(p.dim(), 2);
        let TargetDensity::Mixture(m) = &p else { panic!() };
        assert_eq!(m.components().len(), 2);

        let t = TargetDensity::<f64>::from_config_str("family = truncated-gaussian\ndim = 3").unwrap();
        assert!(matches!(t, TargetDensity::Truncated(_)));

        let r = TargetDensity::<f64>::from_config_str("family = random-mixture\ndim=2\ncomponents=20\nseed=4").unwrap();
        let TargetDensity::Mixture(m) = &r else { panic!() };
        assert_eq!(m.components().len(), 20);

        assert!(TargetDensity::<f64>::from_config_str("dim = 1\nbogus = 2").is_err());
        assert!(TargetDensity::<f64>::from_config_str("family = mixture").is_err());
    }

    #[test]
    fn f32_mixture_works() {
        let p: TargetDensity<f32> = GaussianMixture::isotropic(vec![0.0f32], 1.0).unwrap().into();
        assert!((p.pdf(&[0.0]).unwrap() - 0.398_942_3).abs() < 1e-6);
        assert_eq!(p.sample(3, RngSeed(1)).len(), 3);
    }
}
