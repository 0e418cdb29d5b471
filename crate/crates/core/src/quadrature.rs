//! Quadrature rules, Bayesian-quadrature weights and posteriors, exact MMD
//! evaluation, and posterior tail mass.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::kernel::Kernel;
use crate::linalg::Cholesky;
use crate::mean_element::MeanElement;
use crate::scalar::{dot, Scalar};

/// Values this far below zero (relative to `λ²`) are treated as roundoff and
/// clamped; anything lower is reported as an inconsistency.
pub const NEGATIVE_CLAMP: f64 = 1e-10;

/// Smallest and largest diagonal jitter tried, relative to `λ²`.
pub const JITTER_MIN: f64 = 1e-10;
pub const JITTER_MAX: f64 = 1e-4;

/// How a rule's points and weights were produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Method {
    MC,
    FW,
    FWLS,
    FWBQ,
    FWLSBQ,
    SBQ,
}

impl Method {
    pub const ALL: [Method; 6] = [
        Method::MC,
        Method::FW,
        Method::FWLS,
        Method::FWBQ,
        Method::FWLSBQ,
        Method::SBQ,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            Method::MC => "MC",
            Method::FW => "FW",
            Method::FWLS => "FWLS",
            Method::FWBQ => "FWBQ",
            Method::FWLSBQ => "FWLSBQ",
            Method::SBQ => "SBQ",
        }
    }

    /// Weights come from the BQ solve and a Gaussian posterior is available.
    pub fn is_bayesian(self) -> bool {
        matches!(self, Method::FWBQ | Method::FWLSBQ | Method::SBQ)
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        Method::ALL
            .into_iter()
            .find(|m| m.as_str().eq_ignore_ascii_case(s.trim()))
            .ok_or_else(|| Error::InvalidInput(format!("unknown method `{s}`")))
    }
}

/// Design points with weights: `p̂[f] = Σ_i w_i f(x_i)`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule<S> {
    points: Vec<Vec<S>>,
    weights: Vec<S>,
    method: Method,
}

impl<S: Scalar> QuadratureRule<S> {
    pub fn new(points: Vec<Vec<S>>, weights: Vec<S>, method: Method) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(Error::LengthMismatch {
                expected: points.len(),
                got: weights.len(),
            });
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidInput("weights must be finite".into()));
        }
        Ok(Self {
            points,
            weights,
            method,
        })
    }

    pub fn empty(method: Method) -> Self {
        Self {
            points: Vec::new(),
            weights: Vec::new(),
            method,
        }
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn weights(&self) -> &[S] {
        &self.weights
    }

    pub fn method(&self) -> Method {
        self.method
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Merges bit-identical points by summing their weights.
    pub fn merged(&self) -> Self {
        let (points, index) = dedup_points(&self.points);
        let mut weights = vec![S::zero(); points.len()];
        for (&slot, &w) in index.iter().zip(&self.weights) {
            weights[slot] += w;
        }
        Self {
            points,
            weights,
            method: self.method,
        }
    }
}

/// Gaussian posterior `N(mean, variance)` over the value of an integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralPosterior<S> {
    pub mean: S,
    pub variance: S,
}

impl<S: Scalar> IntegralPosterior<S> {
    pub fn new(mean: S, variance: S) -> Result<Self> {
        if !(variance >= S::zero()) || !mean.is_finite() {
            return Err(Error::InvalidInput("posterior needs finite mean and variance >= 0".into()));
        }
        Ok(Self { mean, variance })
    }

    pub fn sd(&self) -> S {
        self.variance.sqrt()
    }

    /// Posterior rescaled by a positive factor `c` (mean × c, variance × c²).
    pub fn scaled(&self, c: S) -> Self {
        Self {
            mean: self.mean * c,
            variance: self.variance * c * c,
        }
    }
}

/// Removes bit-identical duplicates, keeping first occurrences. Returns the
/// unique points and, for every input point, its slot in the unique list.
pub fn dedup_points<S: Scalar>(points: &[Vec<S>]) -> (Vec<Vec<S>>, Vec<usize>) {
    let mut unique: Vec<Vec<S>> = Vec::with_capacity(points.len());
    let mut index = Vec::with_capacity(points.len());
    for p in points {
        match unique.iter().position(|u| u == p) {
            Some(i) => index.push(i),
            None => {
                index.push(unique.len());
                unique.push(p.clone());
            }
        }
    }
    (unique, index)
}

/// Jitters tried in order when factorising a Gram matrix: none first, then
/// `1e-10 λ²` growing tenfold up to `1e-4 λ²`.
pub fn jitter_ladder<S: Scalar>(scale: S) -> Vec<S> {
    let mut ladder = vec![S::zero()];
    let mut j = JITTER_MIN;
    while j <= JITTER_MAX * (1.0 + 1e-9) {
        ladder.push(S::lit(j) * scale);
        j *= 10.0;
    }
    ladder
}

/// Frank-Wolfe weights implied by a step-size sequence `ρ_0 = 1, ρ_1, …`:
/// `w_i = ρ_{i-1} ∏_{m=i}^{n-1} (1 − ρ_m)`.
pub fn fw_weights<S: Scalar>(steps: &[S]) -> Result<Vec<S>> {
    if steps.is_empty() {
        return Ok(Vec::new());
    }
    if steps[0] != S::one() {
        return Err(Error::InvalidInput("the first step size must be 1".into()));
    }
    if steps.iter().any(|&r| !(r >= S::zero() && r <= S::one())) {
        return Err(Error::InvalidInput("step sizes must lie in [0, 1]".into()));
    }
    let n = steps.len();
    let mut w = vec![S::zero(); n];
    let mut tail = S::one();
    for i in (0..n).rev() {
        w[i] = steps[i] * tail;
        tail *= S::one() - steps[i];
    }
    Ok(w)
}

/// Factorised BQ system for a fixed set of (deduplicated) design points.
#[derive(Debug, Clone)]
pub struct BqSystem<S> {
    points: Vec<Vec<S>>,
    chol: Cholesky<S>,
    z: Vec<S>,
    /// `L⁻¹ z`
    lz: Vec<S>,
    initial_error: S,
    scale: S,
}

impl<S: Scalar> BqSystem<S> {
    /// Deduplicates `points`, assembles `K` and `z`, and factorises with the
    /// jitter ladder.
    pub fn new(points: &[Vec<S>], k: &Kernel<S>, mu: &MeanElement<S>) -> Result<Self> {
        let (points, _) = dedup_points(points);
        for p in &points {
            crate::error::check_dim(k.dim(), p.len())?;
        }
        let gram = k.gram(&points);
        let chol = Cholesky::with_jitter_ladder(&gram, &jitter_ladder(k.scale()))?;
        let z = points
            .iter()
            .map(|p| mu.evaluate(p))
            .collect::<Result<Vec<S>>>()?;
        let lz = chol.solve_lower(&z);
        Ok(Self {
            points,
            chol,
            z,
            lz,
            initial_error: mu.initial_error(),
            scale: k.scale(),
        })
    }

    pub fn points(&self) -> &[Vec<S>] {
        &self.points
    }

    pub fn jitter(&self) -> S {
        self.chol.jitter()
    }

    /// `w = K⁻¹ z`, aligned with [`points`](Self::points).
    pub fn weights(&self) -> Vec<S> {
        self.chol.solve_upper(&self.lz)
    }

    /// `p[μ_p] − zᵀ K⁻¹ z`, clamped at zero within the roundoff window.
    pub fn variance(&self) -> Result<S> {
        clamp_nonneg(self.initial_error - dot(&self.lz, &self.lz), self.scale, "posterior variance")
    }

    pub fn z(&self) -> &[S] {
        &self.z
    }

    pub fn cholesky(&self) -> &Cholesky<S> {
        &self.chol
    }
}

pub(crate) fn clamp_nonneg<S: Scalar>(v: S, scale: S, what: &'static str) -> Result<S> {
    if v >= S::zero() {
        Ok(v)
    } else if v >= -S::lit(NEGATIVE_CLAMP) * scale {
        Ok(S::zero())
    } else {
        Err(Error::NumericalInconsistency {
            what,
            value: v.to_f64_lossy(),
        })
    }
}

/// BQ weights `w = K⁻¹ z` for the given points. Duplicate points are merged
/// first, so the result is aligned with the deduplicated point list; with
/// distinct inputs it is aligned with `points` itself.
pub fn bq_weights<S: Scalar>(points: &[Vec<S>], k: &Kernel<S>, mu: &MeanElement<S>) -> Result<Vec<S>> {
    if points.is_empty() {
        return Ok(Vec::new());
    }
    Ok(BqSystem::new(points, k, mu)?.weights())
}

/// BQ rule on the deduplicated points.
pub fn bq_rule<S: Scalar>(points: &[Vec<S>], k: &Kernel<S>, mu: &MeanElement<S>, method: Method) -> Result<QuadratureRule<S>> {
    if points.is_empty() {
        return Ok(QuadratureRule::empty(method));
    }
    let sys = BqSystem::new(points, k, mu)?;
    QuadratureRule::new(sys.points().to_vec(), sys.weights(), method)
}

/// `Σ_i w_i f(x_i)`.
pub fn apply<S: Scalar>(rule: &QuadratureRule<S>, f_values: &[S]) -> Result<S> {
    if f_values.len() != rule.len() {
        return Err(Error::LengthMismatch {
            expected: rule.len(),
            got: f_values.len(),
        });
    }
    Ok(dot(rule.weights(), f_values))
}

/// Squared MMD of a rule:
/// `p[μ_p] − 2 Σ_i w_i μ_p(x_i) + Σ_i Σ_j w_i w_j k(x_i, x_j)`.
///
/// For an RFF kernel whose mean element carries its feature mean the value
/// is computed as `(λ²/D) ‖E_p z − Σ_i w_i z(x_i)‖²`, which avoids the
/// cancellation of the expanded form when weights are large.
pub fn mmd_squared<S: Scalar>(rule: &QuadratureRule<S>, k: &Kernel<S>, mu: &MeanElement<S>) -> Result<S> {
    let pts = rule.points();
    let w = rule.weights();
    if let (Kernel::Rff(rff), Some(mean)) = (k, mu.feature_mean()) {
        if mean.len() == rff.feature_count() {
            let mut r = mean.to_vec();
            for (p, &wi) in pts.iter().zip(w) {
                crate::error::check_dim(k.dim(), p.len())?;
                for (ri, zi) in r.iter_mut().zip(rff.features(p)) {
                    *ri -= wi * zi;
                }
            }
            return Ok(rff.feature_scale() * dot(&r, &r));
        }
    }
    let mut cross = S::zero();
    for (p, &wi) in pts.iter().zip(w) {
        cross += wi * mu.evaluate(p)?;
    }
    let gram = k.gram(pts);
    let quad = gram.quad_form(w);
    clamp_nonneg(mu.initial_error() - S::lit(2.0) * cross + quad, k.scale(), "squared MMD")
}

/// BQ posterior `N(zᵀK⁻¹f, p[μ_p] − zᵀK⁻¹z)` for function values observed at
/// `points`. Repeated points keep their first observation.
pub fn posterior<S: Scalar>(
    points: &[Vec<S>],
    f_values: &[S],
    k: &Kernel<S>,
    mu: &MeanElement<S>,
) -> Result<IntegralPosterior<S>> {
    if points.len() != f_values.len() {
        return Err(Error::LengthMismatch {
            expected: points.len(),
            got: f_values.len(),
        });
    }
    if points.is_empty() {
        return IntegralPosterior::new(S::zero(), mu.initial_error());
    }
    let (_, index) = dedup_points(points);
    let sys = BqSystem::new(points, k, mu)?;
    let mut f = vec![S::nan(); sys.points().len()];
    for (&slot, &v) in index.iter().zip(f_values) {
        if f[slot].is_nan() {
            f[slot] = v;
        }
    }
    let mean = dot(&sys.weights(), &f);
    IntegralPosterior::new(mean, sys.variance()?)
}

/// Posterior mass outside the open interval `(a, b)`:
/// `Φ((a − m)/σ) + 1 − Φ((b − m)/σ)`. A degenerate posterior (`σ = 0`) gives
/// the indicator that `m ∉ (a, b)`.
pub fn contraction_mass<S: Scalar>(post: &IntegralPosterior<S>, a: S, b: S) -> Result<S> {
    if !(a < b) {
        return Err(Error::InvalidInput("interval needs a < b".into()));
    }
    let m = post.mean;
    let sd = post.sd();
    if sd == S::zero() {
        return Ok(if m > a && m < b { S::zero() } else { S::one() });
    }
    // Φ(-t) form keeps both tails accurate.
    Ok(((a - m) / sd).norm_cdf() + ((m - b) / sd).norm_cdf())
}

/// `erfc(γ/(√2 σ))` together with its large-argument asymptote
/// `√2 σ/(√π γ) exp(-γ²/(2σ²))`.
pub fn contraction_bound<S: Scalar>(gamma: S, sd: S) -> Result<(S, S)> {
    if !(gamma > S::zero()) || !(sd > S::zero()) {
        return Err(Error::InvalidInput("gamma and sigma must be positive".into()));
    }
    let exact = (gamma / (S::SQRT_2() * sd)).erfc();
    let asymptotic = S::SQRT_2() * sd / (S::PI().sqrt() * gamma) * (-(gamma * gamma) / (S::lit(2.0) * sd * sd)).exp();
    Ok((exact, asymptotic))
}

/// Test integrand `f = Σ_j c_j k(·, y_j)` in the RKHS, with exactly known
/// norm `√(cᵀ K_y c)` and integral `Σ_j c_j μ_p(y_j)`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelExpansion<S> {
    pub centres: Vec<Vec<S>>,
    pub coeffs: Vec<S>,
}

impl<S: Scalar> KernelExpansion<S> {
    pub fn new(centres: Vec<Vec<S>>, coeffs: Vec<S>) -> Result<Self> {
        if centres.len() != coeffs.len() {
            return Err(Error::LengthMismatch {
                expected: centres.len(),
                got: coeffs.len(),
            });
        }
        Ok(Self { centres, coeffs })
    }

    pub fn eval(&self, k: &Kernel<S>, x: &[S]) -> S {
        dot(&k.cross(&self.centres, x), &self.coeffs)
    }

    pub fn norm(&self, k: &Kernel<S>) -> S {
        k.gram(&self.centres).quad_form(&self.coeffs).max(S::zero()).sqrt()
    }

    pub fn integral(&self, mu: &MeanElement<S>) -> Result<S> {
        let mut total = S::zero();
        for (c, &a) in self.centres.iter().zip(&self.coeffs) {
            total += a * mu.evaluate(c)?;
        }
        Ok(total)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::density::{GaussianMixture, TargetDensity};
    use crate::kernel::EqKernel;
    use crate::mean_element::mixture_eq_mean_element;
    use crate::rng::RngSeed;

    fn setup() -> (TargetDensity<f64>, Kernel<f64>, MeanElement<f64>) {
        let mix = GaussianMixture::random(2, 4, RngSeed(21)).unwrap();
        let k = EqKernel::new(1.0, 0.8, 2).unwrap();
        let mu = mixture_eq_mean_element(&mix, &k).unwrap();
        (mix.into(), k.into(), mu)
    }

    #[test]
    fn fw_weights_small_cases() {
        assert_eq!(fw_weights(&[1.0]).unwrap(), vec![1.0]);
        let w = fw_weights(&[1.0f64, 0.5, 1.0 / 3.0]).unwrap();
        for wi in w {
            assert!((wi - 1.0 / 3.0).abs() < 1e-15);
        }
        assert!(fw_weights(&[0.5, 0.5]).is_err());
        assert!(fw_weights(&[1.0, 1.5]).is_err());
    }

    #[test]
    fn fw_weights_f32() {
        let w = fw_weights(&[1.0f32, 0.5, 1.0 / 3.0, 0.25]).unwrap();
        assert!(w.iter().all(|&x| (x - 0.25).abs() < 1e-6));
    }

    #[test]
    fn bq_single_point() {
        let (_, k, mu) = setup();
        let x = vec![0.3, -0.2];
        let w = bq_weights(&[x.clone()], &k, &mu).unwrap();
        assert!((w[0] - mu.value(&x) / k.value(&x, &x)).abs() < 1e-15);
    }

    #[test]
    fn bq_solve_residual_is_small() {
        let (p, k, mu) = setup();
        let pts = p.sample(20, RngSeed(2));
        let w = bq_weights(&pts, &k, &mu).unwrap();
        let z: Vec<f64> = pts.iter().map(|x| mu.value(x)).collect();
        let kw = k.gram(&pts).matvec(&w);
        let r: f64 = kw.iter().zip(&z).map(|(a, b)| (a - b).powi(2)).sum::<f64>().sqrt();
        let zn: f64 = z.iter().map(|v| v * v).sum::<f64>().sqrt();
        assert!(r <= 1e-8 * zn, "residual {r}");
    }

    #[test]
    fn apply_basics() {
        let rule = QuadratureRule::<f64>::new(vec![vec![0.0], vec![1.0]], vec![0.25, 0.75], Method::FW).unwrap();
        assert!((apply(&rule, &[3.0, 3.0]).unwrap() - 3.0).abs() < 1e-15);
        assert!(apply(&rule, &[1.0]).is_err());
        let zero = QuadratureRule::new(vec![vec![0.0]], vec![0.0], Method::FW).unwrap();
        assert_eq!(apply(&zero, &[5.0]).unwrap(), 0.0);
    }

    #[test]
    fn bq_rule_reproduces_kernel_sections() {
        let (p, k, mu) = setup();
        let pts = p.sample(8, RngSeed(5));
        let rule = bq_rule(&pts, &k, &mu, Method::FWBQ).unwrap();
        for xj in &pts {
            let f: Vec<f64> = rule.points().iter().map(|x| k.value(x, xj)).collect();
            assert!((apply(&rule, &f).unwrap() - mu.value(xj)).abs() < 1e-8);
        }
    }

    #[test]
    fn empty_rule_mmd_is_initial_error() {
        let (_, k, mu) = setup();
        let v = mmd_squared(&QuadratureRule::empty(Method::MC), &k, &mu).unwrap();
        assert_eq!(v, mu.initial_error());
    }

    #[test]
    fn posterior_prior_and_f_independence() {
        let (p, k, mu) = setup();
        let prior = posterior(&[], &[], &k, &mu).unwrap();
        assert_eq!(prior.mean, 0.0);
        assert_eq!(prior.variance, mu.initial_error());

        let pts = p.sample(10, RngSeed(8));
        let f: Vec<f64> = (0..10).map(|i| (i as f64).sin()).collect();
        let mut g = f.clone();
        g.reverse();
        let a = posterior(&pts, &f, &k, &mu).unwrap();
        let b = posterior(&pts, &g, &k, &mu).unwrap();
        assert_eq!(a.variance, b.variance);
    }

    #[test]
    fn duplicates_are_merged() {
        let (_, k, mu) = setup();
        let x = vec![0.1, 0.2];
        let y = vec![-0.5, 0.4];
        let post = posterior(&[x.clone(), y.clone(), x.clone()], &[1.0, 2.0, 1.0], &k, &mu).unwrap();
        let single = posterior(&[x.clone(), y.clone()], &[1.0, 2.0], &k, &mu).unwrap();
        assert_eq!(post, single);
        let rule = QuadratureRule::new(vec![x.clone(), y, x], vec![0.25, 0.5, 0.25], Method::FW).unwrap();
        let merged = rule.merged();
        assert_eq!(merged.len(), 2);
        assert_eq!(merged.weights(), &[0.5, 0.5]);
    }

    #[test]
    fn contraction_mass_examples() {
        let post = IntegralPosterior::<f64>::new(0.0, 1.0).unwrap();
        let m = contraction_mass(&post, -1.959964, 1.959964).unwrap();
        assert!((m - 0.05).abs() < 1e-6);
        assert_eq!(contraction_mass(&post, f64::NEG_INFINITY, f64::INFINITY).unwrap(), 0.0);
        let point = IntegralPosterior::new(0.5, 0.0).unwrap();
        assert_eq!(contraction_mass(&point, 0.0, 1.0).unwrap(), 0.0);
        assert_eq!(contraction_mass(&point, 0.6, 1.0).unwrap(), 1.0);
        assert!(contraction_mass(&post, 1.0, 1.0).is_err());
    }

    #[test]
    fn contraction_bound_examples() {
        let (e, _) = contraction_bound(1.0f64, 1.0).unwrap();
        assert!((e - 0.317310507862914).abs() < 1e-12);
        let (e, a) = contraction_bound(1.0f64, 100.0).unwrap();
        assert!(e > 0.99 && a > e);
        for ratio in [6.0, 8.0, 12.0] {
            let (e, a) = contraction_bound(ratio, 1.0f64).unwrap();
            assert!((e / a - 1.0).abs() < 0.05);
        }
    }

    #[test]
    fn kernel_expansion_matches_definitions() {
        let (_, k, mu) = setup();
        let f = KernelExpansion::new(vec![vec![0.0, 0.0], vec![1.0, 0.0]], vec![1.0, -1.0]).unwrap();
        let expected = (2.0 - 2.0 * k.value(&[0.0, 0.0], &[1.0, 0.0])).sqrt();
        assert!((f.norm(&k) - expected).abs() < 1e-15);
        let integral = mu.value(&[0.0, 0.0]) - mu.value(&[1.0, 0.0]);
        assert!((f.integral(&mu).unwrap() - integral).abs() < 1e-15);
    }

    #[test]
    fn method_round_trip() {
        for m in Method::ALL {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert!("nope".parse::<Method>().is_err());
    }
}
