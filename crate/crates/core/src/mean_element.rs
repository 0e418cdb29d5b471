//! Kernel mean elements `μ_p(x) = ∫ k(x, x') p(x') dx'` and initial errors
//! `p[μ_p] = ∫∫ k(x, x') p(x) p(x') dx dx'`.
//!
//! Closed forms exist for three (density, kernel) pairs:
//!
//! * Gaussian mixture with an EQ kernel, where the kernel acts as a Gaussian
//!   smoothing of each component;
//! * the positive-orthant truncated Gaussian `N(1, ½ I)` with the unit-exponent
//!   kernel `exp(-‖x − x'‖²)`, as a product of error-function terms;
//! * Gaussian mixture with an RFF kernel, through the characteristic function
//!   of each component.
//!
//! [`numeric_mean_element`] is a brute-force oracle for any supported pair,
//! used to cross-check the closed forms.

use std::fmt;
use std::sync::Arc;

use crate::density::{AxisFactor, GaussianMixture, TargetDensity};
use crate::error::{check_dim, Error, Result};
use crate::integrate::{adaptive, adaptive_box, DEFAULT_MAX_INTERVALS};
use crate::kernel::{EqKernel, Kernel, RffKernel};
use crate::linalg::{Cholesky, Matrix};
use crate::scalar::{dot, Scalar};

/// `∫∫ exp(-(x − x')²) p(x) p(x') dx dx'` for the one-dimensional truncated
/// Gaussian `N(1, ½)` on `[0, ∞)`, to double precision. The `d`-dimensional
/// value is its `d`-th power.
pub const TRUNC_INITIAL_ERROR_1D: f64 = 0.629_908_394_588_042_0;

/// Default absolute tolerance of the numerical oracle.
pub const DEFAULT_ORACLE_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Provenance {
    Analytic,
    NumericalOracle,
}

type EvalFn<S> = dyn Fn(&[S]) -> Result<S> + Send + Sync;

/// The pair `(x ↦ μ_p(x), p[μ_p])` for one density and kernel.
#[derive(Clone)]
pub struct MeanElement<S> {
    dim: usize,
    eval: Arc<EvalFn<S>>,
    initial_error: S,
    provenance: Provenance,
    /// `E_p[z(x)]` when the kernel is a finite feature expansion.
    feature_mean: Option<Arc<Vec<S>>>,
}

impl<S: Scalar> fmt::Debug for MeanElement<S> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("MeanElement")
            .field("dim", &self.dim)
            .field("initial_error", &self.initial_error)
            .field("provenance", &self.provenance)
            .finish_non_exhaustive()
    }
}

impl<S: Scalar> MeanElement<S> {
    /// Wraps an arbitrary evaluation function, e.g. for tests or for targets
    /// whose embedding is computed elsewhere.
    pub fn from_fn<F>(dim: usize, initial_error: S, provenance: Provenance, eval: F) -> Self
    where
        F: Fn(&[S]) -> Result<S> + Send + Sync + 'static,
    {
        Self {
            dim,
            eval: Arc::new(eval),
            initial_error,
            provenance,
            feature_mean: None,
        }
    }

    /// Attaches the expected feature vector of an RFF kernel under `p`.
    pub fn with_feature_mean(mut self, mean: Vec<S>) -> Self {
        self.feature_mean = Some(Arc::new(mean));
        self
    }

    pub fn feature_mean(&self) -> Option<&[S]> {
        self.feature_mean.as_deref().map(Vec::as_slice)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn evaluate(&self, x: &[S]) -> Result<S> {
        check_dim(self.dim, x.len())?;
        (self.eval)(x)
    }

    /// Unchecked evaluation; NaN if the underlying computation failed.
    #[inline]
    pub fn value(&self, x: &[S]) -> S {
        (self.eval)(x).unwrap_or_else(|_| S::nan())
    }

    pub fn initial_error(&self) -> S {
        self.initial_error
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }
}

/// Closed-form mean element for a Gaussian mixture under an EQ kernel:
/// `μ_p(x) = λ² (2πv)^{d/2} Σ_l ρ_l φ(x | μ_l, Σ_l + v I)` with `v = 1/(2s)`
/// the variance equivalent to the kernel's exponent scale.
pub fn mixture_eq_mean_element<S: Scalar>(p: &GaussianMixture<S>, k: &EqKernel<S>) -> Result<MeanElement<S>> {
    check_dim(p.dim(), k.dim())?;
    let d = p.dim();
    let v = k.gaussian_variance();
    let lam2 = k.amplitude() * k.amplitude();
    let prefactor = lam2 * (S::TAU() * v).powf(S::lit(d as f64 / 2.0));

    let shifted = |extra: &Matrix<S>, with_v: bool| -> Result<(Cholesky<S>, S)> {
        let mut c = extra.clone();
        if with_v {
            for i in 0..d {
                c[(i, i)] += v;
            }
        }
        let chol = Cholesky::new(&c, S::zero())
            .ok_or_else(|| Error::InvalidInput("smoothed covariance not positive definite".into()))?;
        let log_norm = -(S::lit(d as f64) * S::TAU().ln() + chol.log_det()) / S::lit(2.0);
        Ok((chol, log_norm))
    };
    let gauss = |chol: &Cholesky<S>, log_norm: S, x: &[S], m: &[S]| -> S {
        let diff: Vec<S> = x.iter().zip(m).map(|(&a, &b)| a - b).collect();
        let q = chol.solve_lower(&diff);
        (log_norm - dot(&q, &q) / S::lit(2.0)).exp()
    };

    let mut comps = Vec::with_capacity(p.components().len());
    for c in p.components() {
        let (chol, log_norm) = shifted(c.covariance(), true)?;
        comps.push((c.weight(), c.mean().to_vec(), chol, log_norm));
    }

    let mut initial = S::zero();
    for a in p.components() {
        for b in p.components() {
            let mut cov = a.covariance().clone();
            for i in 0..d {
                for j in 0..d {
                    cov[(i, j)] += b.covariance()[(i, j)];
                }
            }
            let (chol, log_norm) = shifted(&cov, true)?;
            initial += a.weight() * b.weight() * gauss(&chol, log_norm, a.mean(), b.mean());
        }
    }
    initial *= prefactor;

    Ok(MeanElement::from_fn(d, initial, Provenance::Analytic, move |x| {
        Ok(prefactor
            * comps
                .iter()
                .map(|(w, m, chol, ln)| *w * gauss(chol, *ln, x, m))
                .sum::<S>())
    }))
}

/// Closed-form mean element of the truncated Gaussian `N(1, ½ I)` on
/// `[0, ∞)^d` under `k(x, x') = exp(-‖x − x'‖²)`:
///
/// `μ_p(x) = 2^{-d/2} (1 + erf 1)^{-d} ∏_i exp(-(x_i − 1)²/2) (1 + erf((x_i + 1)/√2))`.
///
/// The initial error is the `d`-th power of [`TRUNC_INITIAL_ERROR_1D`].
pub fn trunc_eq_mean_element<S: Scalar>(d: usize) -> Result<MeanElement<S>> {
    if !(1..=3).contains(&d) {
        return Err(Error::Unsupported(format!(
            "truncated-Gaussian mean element is provided for d in 1..=3, got {d}"
        )));
    }
    let two = S::lit(2.0);
    let norm = S::one() / (two.sqrt() * (S::one() + S::one().erf()));
    let initial = S::lit(TRUNC_INITIAL_ERROR_1D.powi(d as i32));
    Ok(MeanElement::from_fn(d, initial, Provenance::Analytic, move |x| {
        Ok(x.iter()
            .map(|&xi| {
                let t = xi - S::one();
                norm * (-t * t / two).exp() * (S::one() + ((xi + S::one()) / two.sqrt()).erf())
            })
            .product())
    }))
}

/// Mean element of an RFF kernel against a Gaussian mixture. Each feature is
/// integrated exactly: `∫ cos(wᵀx + b) φ(x | m, Σ) dx = exp(-½ wᵀΣw) cos(wᵀm + b)`.
pub fn rff_mean_element<S: Scalar>(p: &GaussianMixture<S>, k: &RffKernel<S>) -> Result<MeanElement<S>> {
    check_dim(p.dim(), k.dim())?;
    let half = S::lit(0.5);
    let coeffs: Vec<S> = k
        .frequencies()
        .iter()
        .zip(k.phases())
        .map(|(w, &b)| {
            S::SQRT_2()
                * p.components()
                    .iter()
                    .map(|c| {
                        let sw = c.covariance().matvec(w);
                        c.weight() * (-half * dot(w, &sw)).exp() * (dot(w, c.mean()) + b).cos()
                    })
                    .sum::<S>()
        })
        .collect();
    let scale = k.feature_scale();
    let initial = scale * dot(&coeffs, &coeffs);
    let kernel = k.clone();
    let mean = coeffs.clone();
    Ok(MeanElement::from_fn(p.dim(), initial, Provenance::Analytic, move |x| {
        Ok(scale * dot(&kernel.features(x), &coeffs))
    })
    .with_feature_mean(mean))
}

/// Closed-form mean element for whichever supported pair `(p, k)` is given.
pub fn analytic_mean_element<S: Scalar>(p: &TargetDensity<S>, k: &Kernel<S>) -> Result<MeanElement<S>> {
    match (p, k) {
        (TargetDensity::Mixture(m), Kernel::Eq(eq)) => mixture_eq_mean_element(m, eq),
        (TargetDensity::Mixture(m), Kernel::Rff(r)) => rff_mean_element(m, r),
        (TargetDensity::Truncated(t), Kernel::Eq(eq)) => {
            let unit = eq.amplitude() == S::one()
                && (eq.exponent_scale() - S::one()).abs() <= S::epsilon() * S::lit(8.0);
            if !unit {
                return Err(Error::Unsupported(
                    "truncated-Gaussian mean element needs the unit-amplitude, unit-exponent EQ kernel".into(),
                ));
            }
            trunc_eq_mean_element(t.dim())
        }
        (TargetDensity::Truncated(_), Kernel::Rff(_)) => Err(Error::Unsupported(
            "no closed-form RFF mean element for the truncated Gaussian".into(),
        )),
    }
}

/// Brute-force mean element by adaptive Gauss–Kronrod quadrature on the
/// density's truncated support. Requires `d ≤ 3`.
///
/// Product-form pairs (EQ kernel with a truncated Gaussian or an
/// axis-aligned single Gaussian) are integrated one axis at a time; all other
/// pairs use nested integration over the full box.
pub fn numeric_mean_element<S: Scalar>(p: &TargetDensity<S>, k: &Kernel<S>, tol: S) -> Result<MeanElement<S>> {
    let d = p.dim();
    check_dim(d, k.dim())?;
    if d > 3 {
        return Err(Error::Unsupported(format!("numerical mean element needs d <= 3, got {d}")));
    }
    if !(tol > S::zero()) {
        return Err(Error::InvalidInput("tolerance must be positive".into()));
    }
    match (p.axis_factors(), k) {
        (Some(axes), Kernel::Eq(eq)) => separable_numeric(axes, *eq, tol),
        _ => general_numeric(p.clone(), k.clone(), tol),
    }
}

fn separable_numeric<S: Scalar>(axes: Vec<AxisFactor<S>>, k: EqKernel<S>, tol: S) -> Result<MeanElement<S>> {
    let d = axes.len();
    let lam2 = k.amplitude() * k.amplitude();
    let s = k.exponent_scale();
    // Every axis factor is ≤ 1, so a per-axis error of tol/(d λ²) bounds the
    // product error by tol to first order.
    let axis_tol = tol / (S::lit(d as f64) * lam2);

    let axis_mu = move |f: AxisFactor<S>, xi: S, t: S| -> Result<S> {
        let (lo, hi) = f.bounds();
        adaptive(
            |u| Ok((-s * (xi - u) * (xi - u)).exp() * f.pdf(u)),
            lo,
            hi,
            t,
            DEFAULT_MAX_INTERVALS,
        )
        .map(|e| e.value)
    };

    let mut initial = lam2;
    for &f in &axes {
        let (lo, hi) = f.bounds();
        let inner_tol = axis_tol / S::lit(2.0);
        let e = adaptive(
            |u| Ok(axis_mu(f, u, inner_tol)? * f.pdf(u)),
            lo,
            hi,
            axis_tol / S::lit(2.0),
            DEFAULT_MAX_INTERVALS,
        )?;
        initial *= e.value;
    }

    Ok(MeanElement::from_fn(d, initial, Provenance::NumericalOracle, move |x| {
        let mut v = lam2;
        for (&f, &xi) in axes.iter().zip(x) {
            v *= axis_mu(f, xi, axis_tol)?;
        }
        Ok(v)
    }))
}

fn general_numeric<S: Scalar>(p: TargetDensity<S>, k: Kernel<S>, tol: S) -> Result<MeanElement<S>> {
    let d = p.dim();
    let bounds = p.integration_box();
    let half = tol / S::lit(2.0);
    let mu = {
        let p = p.clone();
        let k = k.clone();
        let bounds = bounds.clone();
        move |x: &[S], t: S| -> Result<S> {
            adaptive_box(&|u: &[S]| Ok(k.value(x, u) * p.pdf_unchecked(u)), &bounds, t).map(|e| e.value)
        }
    };
    // ∫ p ≤ 1 over the box, so integrating a μ_p accurate to tol/2 against p
    // adds at most tol/2 on top of the outer error.
    let initial = adaptive_box(&|x: &[S]| Ok(mu(x, half)? * p.pdf_unchecked(x)), &bounds, half)?.value;
    Ok(MeanElement::from_fn(d, initial, Provenance::NumericalOracle, move |x| mu(x, tol)))
}
