//! Exponentiated-quadratic kernel, its random-Fourier-feature approximation,
//! and Gram-matrix assembly.

use rand_distr::{Distribution, StandardNormal, Uniform};

use crate::error::{check_dim, Error, Result};
use crate::linalg::Matrix;
use crate::rng::{streams, RngSeed};
use crate::scalar::{dot, sq_dist, Scalar};

/// `k(x, y) = λ² exp(-s ‖x − y‖²)`.
///
/// The standard form uses `s = 1/(2σ²)`. [`EqKernel::unit_exponent`] builds
/// the `s = 1` variant, i.e. `exp(-‖x − y‖²)`, which is the convention the
/// closed-form truncated-Gaussian mean element is derived under.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EqKernel<S> {
    amplitude: S,
    lengthscale: S,
    dim: usize,
    exponent_scale: S,
}

impl<S: Scalar> EqKernel<S> {
    pub fn new(amplitude: S, lengthscale: S, dim: usize) -> Result<Self> {
        let s = S::one() / (S::lit(2.0) * lengthscale * lengthscale);
        Self::with_exponent_scale(amplitude, lengthscale, dim, s)
    }

    /// `λ² exp(-‖x − y‖²)`, reported with lengthscale `1/√2`.
    pub fn unit_exponent(amplitude: S, dim: usize) -> Result<Self> {
        Self::with_exponent_scale(amplitude, S::lit(0.5).sqrt(), dim, S::one())
    }

    pub fn with_exponent_scale(amplitude: S, lengthscale: S, dim: usize, exponent_scale: S) -> Result<Self> {
        if !(amplitude > S::zero()) || !(lengthscale > S::zero()) || !(exponent_scale > S::zero()) {
            return Err(Error::InvalidInput(
                "kernel amplitude, lengthscale and exponent scale must be positive".into(),
            ));
        }
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        Ok(Self {
            amplitude,
            lengthscale,
            dim,
            exponent_scale,
        })
    }

    pub fn amplitude(&self) -> S {
        self.amplitude
    }

    pub fn lengthscale(&self) -> S {
        self.lengthscale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn exponent_scale(&self) -> S {
        self.exponent_scale
    }

    /// True when the exponent scale is the usual `1/(2σ²)`.
    pub fn is_standard(&self) -> bool {
        let s = S::one() / (S::lit(2.0) * self.lengthscale * self.lengthscale);
        (s - self.exponent_scale).abs() <= S::epsilon() * S::lit(8.0) * s
    }

    #[inline]
    pub fn value(&self, x: &[S], y: &[S]) -> S {
        self.amplitude * self.amplitude * (-self.exponent_scale * sq_dist(x, y)).exp()
    }

    /// Variance of the equivalent Gaussian smoothing, `1/(2s)` per axis.
    pub fn gaussian_variance(&self) -> S {
        S::one() / (S::lit(2.0) * self.exponent_scale)
    }
}

/// `k̂(x, y) = (λ²/D) Σ_j z_j(x) z_j(y)` with `z_j(x) = √2 cos(w_jᵀx + b_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct RffKernel<S> {
    amplitude: S,
    lengthscale: S,
    dim: usize,
    frequencies: Vec<Vec<S>>,
    phases: Vec<S>,
}

impl<S: Scalar> RffKernel<S> {
    pub fn from_parts(amplitude: S, lengthscale: S, frequencies: Vec<Vec<S>>, phases: Vec<S>) -> Result<Self> {
        if frequencies.is_empty() || frequencies.len() != phases.len() {
            return Err(Error::InvalidInput(
                "need at least one feature and one phase per frequency".into(),
            ));
        }
        let dim = frequencies[0].len();
        if dim == 0 {
            return Err(Error::InvalidInput("dimension must be positive".into()));
        }
        for w in &frequencies {
            check_dim(dim, w.len())?;
        }
        Ok(Self {
            amplitude,
            lengthscale,
            dim,
            frequencies,
            phases,
        })
    }

    pub fn amplitude(&self) -> S {
        self.amplitude
    }

    pub fn lengthscale(&self) -> S {
        self.lengthscale
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn feature_count(&self) -> usize {
        self.phases.len()
    }

    pub fn frequencies(&self) -> &[Vec<S>] {
        &self.frequencies
    }

    pub fn phases(&self) -> &[S] {
        &self.phases
    }

    /// Feature vector `(z_1(x), …, z_D(x))`.
    pub fn features(&self, x: &[S]) -> Vec<S> {
        let r2 = S::SQRT_2();
        self.frequencies
            .iter()
            .zip(&self.phases)
            .map(|(w, &b)| r2 * (dot(w, x) + b).cos())
            .collect()
    }

    /// `λ²/D`, the factor turning a feature inner product into a kernel value.
    pub fn feature_scale(&self) -> S {
        self.amplitude * self.amplitude / S::lit(self.feature_count() as f64)
    }

    pub fn value(&self, x: &[S], y: &[S]) -> S {
        let two = S::lit(2.0);
        let sum: S = self
            .frequencies
            .iter()
            .zip(&self.phases)
            .map(|(w, &b)| two * (dot(w, x) + b).cos() * (dot(w, y) + b).cos())
            .sum();
        self.feature_scale() * sum
    }
}

/// Draws an RFF approximation of the EQ kernel with amplitude `λ` and
/// lengthscale `σ`: frequencies i.i.d. `N(0, σ⁻² I)`, phases uniform on `[0, 2π]`.
pub fn rff_sample<S: Scalar>(
    lengthscale: S,
    amplitude: S,
    dim: usize,
    features: usize,
    seed: RngSeed,
) -> Result<RffKernel<S>> {
    if features == 0 {
        return Err(Error::InvalidInput("need at least one random feature".into()));
    }
    if dim == 0 || !(lengthscale > S::zero()) || !(amplitude > S::zero()) {
        return Err(Error::InvalidInput("invalid RFF parameters".into()));
    }
    let mut rng = seed.rng(streams::DIRECT);
    let inv = 1.0 / lengthscale.to_f64_lossy();
    let phase = Uniform::new_inclusive(0.0f64, std::f64::consts::TAU).expect("valid range");
    let mut frequencies = Vec::with_capacity(features);
    let mut phases = Vec::with_capacity(features);
    for _ in 0..features {
        let w = (0..dim)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut rng);
                S::lit(z * inv)
            })
            .collect();
        frequencies.push(w);
        phases.push(S::lit(phase.sample(&mut rng)));
    }
    RffKernel::from_parts(amplitude, lengthscale, frequencies, phases)
}

/// Positive-definite kernel: exact EQ or its RFF approximation.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel<S> {
    Eq(EqKernel<S>),
    Rff(RffKernel<S>),
}

impl<S: Scalar> From<EqKernel<S>> for Kernel<S> {
    fn from(k: EqKernel<S>) -> Self {
        Kernel::Eq(k)
    }
}

impl<S: Scalar> From<RffKernel<S>> for Kernel<S> {
    fn from(k: RffKernel<S>) -> Self {
        Kernel::Rff(k)
    }
}

impl<S: Scalar> Kernel<S> {
    pub fn dim(&self) -> usize {
        match self {
            Kernel::Eq(k) => k.dim(),
            Kernel::Rff(k) => k.dim(),
        }
    }

    pub fn amplitude(&self) -> S {
        match self {
            Kernel::Eq(k) => k.amplitude(),
            Kernel::Rff(k) => k.amplitude(),
        }
    }

    /// `λ²`, the scale every absolute tolerance is measured against.
    pub fn scale(&self) -> S {
        let a = self.amplitude();
        a * a
    }

    pub fn eval(&self, x: &[S], y: &[S]) -> Result<S> {
        check_dim(self.dim(), x.len())?;
        check_dim(self.dim(), y.len())?;
        Ok(self.value(x, y))
    }

    /// Unchecked evaluation.
    #[inline]
    pub fn value(&self, x: &[S], y: &[S]) -> S {
        match self {
            Kernel::Eq(k) => k.value(x, y),
            Kernel::Rff(k) => k.value(x, y),
        }
    }

    /// `k(x, x)`.
    pub fn diag(&self, x: &[S]) -> S {
        match self {
            Kernel::Eq(k) => k.amplitude() * k.amplitude(),
            Kernel::Rff(k) => k.value(x, x),
        }
    }

    /// Dense Gram matrix `K_ij = k(x_i, x_j)`, exactly symmetric.
    pub fn gram(&self, points: &[Vec<S>]) -> Matrix<S> {
        let n = points.len();
        let mut k = Matrix::zeros(n, n);
        match self {
            Kernel::Eq(eq) => {
                for i in 0..n {
                    for j in 0..=i {
                        let v = eq.value(&points[i], &points[j]);
                        k[(i, j)] = v;
                        k[(j, i)] = v;
                    }
                }
            }
            Kernel::Rff(rff) => {
                let feats: Vec<Vec<S>> = points.iter().map(|p| rff.features(p)).collect();
                let c = rff.feature_scale();
                for i in 0..n {
                    for j in 0..=i {
                        let v = c * dot(&feats[i], &feats[j]);
                        k[(i, j)] = v;
                        k[(j, i)] = v;
                    }
                }
            }
        }
        k
    }

    /// `(k(x_1, x), …, k(x_n, x))`.
    pub fn cross(&self, points: &[Vec<S>], x: &[S]) -> Vec<S> {
        match self {
            Kernel::Eq(eq) => points.iter().map(|p| eq.value(p, x)).collect(),
            Kernel::Rff(rff) => {
                let fx = rff.features(x);
                let c = rff.feature_scale();
                points.iter().map(|p| c * dot(&rff.features(p), &fx)).collect()
            }
        }
    }

    /// Representation of `g = Σ_l w_l k(·, x_l)` that can be evaluated and
    /// updated without revisiting every atom for feature-based kernels.
    pub fn combination(&self, points: &[Vec<S>], weights: &[S]) -> KernelCombination<'_, S> {
        let mut g = KernelCombination::empty(self);
        for (p, &w) in points.iter().zip(weights) {
            g.add(p, w);
        }
        g
    }
}

/// A finite kernel expansion `g = Σ_l w_l k(·, x_l)`.
#[derive(Debug, Clone)]
pub struct KernelCombination<'k, S> {
    kernel: &'k Kernel<S>,
    points: Vec<Vec<S>>,
    weights: Vec<S>,
    /// Weighted feature sum; only used for RFF kernels.
    features: Vec<S>,
}

impl<'k, S: Scalar> KernelCombination<'k, S> {
    pub fn empty(kernel: &'k Kernel<S>) -> Self {
        let features = match kernel {
            Kernel::Rff(r) => vec![S::zero(); r.feature_count()],
            Kernel::Eq(_) => Vec::new(),
        };
        Self {
            kernel,
            points: Vec::new(),
            weights: Vec::new(),
            features,
        }
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    /// `g ← g + w k(·, x)`.
    pub fn add(&mut self, x: &[S], w: S) {
        if let Kernel::Rff(r) = self.kernel {
            for (f, z) in self.features.iter_mut().zip(r.features(x)) {
                *f += w * z;
            }
        }
        self.points.push(x.to_vec());
        self.weights.push(w);
    }

    /// `g ← c g`.
    pub fn scale(&mut self, c: S) {
        self.weights.iter_mut().for_each(|w| *w *= c);
        self.features.iter_mut().for_each(|f| *f *= c);
    }

    /// `g(x)`.
    pub fn eval(&self, x: &[S]) -> S {
        match self.kernel {
            Kernel::Eq(eq) => self
                .points
                .iter()
                .zip(&self.weights)
                .map(|(p, &w)| w * eq.value(p, x))
                .sum(),
            Kernel::Rff(r) => r.feature_scale() * dot(&self.features, &r.features(x)),
        }
    }
}
