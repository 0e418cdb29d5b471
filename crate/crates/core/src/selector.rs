//! Design-point selection: Frank-Wolfe with fixed or line-search steps,
//! sequential Bayesian quadrature, and i.i.d. Monte Carlo.
//!
//! Every iteration after the first scores a fresh pool of `M` i.i.d. draws
//! from the target; the pool for iteration `i` depends only on `(seed, i)`,
//! so all greedy methods see the same candidates under one seed. Ties go to
//! the lowest pool index.

use rayon::prelude::*;

use crate::density::TargetDensity;
use crate::error::{check_dim, Error, Result};
use crate::kernel::Kernel;
use crate::linalg::{Cholesky, Matrix};
use crate::mean_element::MeanElement;
use crate::quadrature::{bq_rule, clamp_nonneg, fw_weights, Method, QuadratureRule};
use crate::rng::{streams, RngSeed};
use crate::scalar::{dot, Scalar};

pub const DEFAULT_POOL_SIZE: usize = 10_000;

/// Line-search denominators below this multiple of `λ²` mean the new atom
/// coincides with the current iterate.
pub const DEGENERATE_DENOMINATOR: f64 = 1e-14;

/// Schur complements below this multiple of `λ²` are treated as zero in SBQ.
pub const SBQ_SCHUR_FLOOR: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepRule {
    /// `ρ_i = 1/(i+1)`
    Fixed,
    LineSearch,
}

#[derive(Debug, Clone, PartialEq)]
pub enum InitRule<S> {
    /// Maximiser of `μ_p` over the first pool.
    ArgmaxMean,
    Explicit(Vec<S>),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionConfig<S> {
    pub n: usize,
    pub pool_size: usize,
    pub step_rule: StepRule,
    pub init_rule: InitRule<S>,
    pub seed: RngSeed,
}

impl<S: Scalar> SelectionConfig<S> {
    pub fn new(n: usize, seed: RngSeed) -> Self {
        Self {
            n,
            pool_size: DEFAULT_POOL_SIZE,
            step_rule: StepRule::Fixed,
            init_rule: InitRule::ArgmaxMean,
            seed,
        }
    }

    pub fn with_pool_size(mut self, pool_size: usize) -> Self {
        self.pool_size = pool_size;
        self
    }

    pub fn with_step_rule(mut self, rule: StepRule) -> Self {
        self.step_rule = rule;
        self
    }

    pub fn with_init(mut self, init: InitRule<S>) -> Self {
        self.init_rule = init;
        self
    }

    pub fn validate(&self, dim: usize) -> Result<()> {
        if self.n == 0 {
            return Err(Error::InvalidInput("n must be at least 1".into()));
        }
        if self.pool_size == 0 {
            return Err(Error::InvalidInput("pool size must be at least 1".into()));
        }
        if let InitRule::Explicit(x) = &self.init_rule {
            check_dim(dim, x.len())?;
            if x.iter().any(|v| !v.is_finite()) {
                return Err(Error::InvalidInput("initial point must be finite".into()));
            }
        }
        Ok(())
    }
}

/// Output of a selector run.
#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace<S> {
    pub points: Vec<Vec<S>>,
    /// `ρ_0 = 1, ρ_1, …`; empty for Monte Carlo.
    pub step_sizes: Vec<S>,
    /// `J(g_i) = ½ MMD²` of the FW iterate for FW/FWLS, the BQ posterior
    /// variance for SBQ, empty for Monte Carlo.
    pub objective: Vec<S>,
    pub method: Method,
    /// Line-search steps whose raw value left `[0, 1]` and were clamped.
    pub clamped_steps: usize,
    /// Line-search steps that hit a degenerate denominator and used `ρ = 0`.
    pub degenerate_steps: usize,
}

impl<S: Scalar> SelectionTrace<S> {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// The first `n` selections. Every selector is sequential, so this is
    /// exactly what a run with `cfg.n = n` would have produced.
    pub fn prefix(&self, n: usize) -> Self {
        let n = n.min(self.len());
        let cut = |v: &Vec<S>| v[..n.min(v.len())].to_vec();
        Self {
            points: self.points[..n].to_vec(),
            step_sizes: cut(&self.step_sizes),
            objective: cut(&self.objective),
            method: self.method,
            clamped_steps: self.clamped_steps,
            degenerate_steps: self.degenerate_steps,
        }
    }

    /// Weights implied by the step sizes (uniform for Monte Carlo).
    pub fn fw_weights(&self) -> Result<Vec<S>> {
        if self.method == Method::MC || self.method == Method::SBQ {
            let n = self.len();
            return Ok(vec![S::one() / S::lit(n as f64); n]);
        }
        fw_weights(&self.step_sizes)
    }

    /// Rule with the selector's own weights: FW weights for FW/FWLS, uniform
    /// for Monte Carlo.
    pub fn native_rule(&self) -> Result<QuadratureRule<S>> {
        QuadratureRule::new(self.points.clone(), self.fw_weights()?, self.method)
    }

    /// Rule with BQ weights on the selected points, tagged FWBQ, FWLSBQ or SBQ.
    pub fn bq_rule(&self, k: &Kernel<S>, mu: &MeanElement<S>) -> Result<QuadratureRule<S>> {
        let method = match self.method {
            Method::FW | Method::FWBQ => Method::FWBQ,
            Method::FWLS | Method::FWLSBQ => Method::FWLSBQ,
            Method::SBQ => Method::SBQ,
            Method::MC => {
                return Err(Error::Unsupported("BQ weights on Monte Carlo points have no method tag".into()))
            }
        };
        bq_rule(&self.points, k, mu, method)
    }

    /// Rule matching `method`: native weights for MC/FW/FWLS, BQ otherwise.
    pub fn rule_for(&self, method: Method, k: &Kernel<S>, mu: &MeanElement<S>) -> Result<QuadratureRule<S>> {
        if method.is_bayesian() {
            self.bq_rule(k, mu)
        } else {
            self.native_rule()
        }
    }
}

/// `Σ_l w_l k(x, x_l) − μ_p(x)`, the linearised FW objective at atom `x`.
pub fn atom_objective<S: Scalar>(
    x: &[S],
    prior_points: &[Vec<S>],
    prior_weights: &[S],
    k: &Kernel<S>,
    mu: &MeanElement<S>,
) -> Result<S> {
    if prior_points.len() != prior_weights.len() {
        return Err(Error::LengthMismatch {
            expected: prior_points.len(),
            got: prior_weights.len(),
        });
    }
    check_dim(k.dim(), x.len())?;
    Ok(dot(&k.cross(prior_points, x), prior_weights) - mu.evaluate(x)?)
}

/// Unclamped line-search optimum
/// `ρ = ⟨g − μ_p, g − Φ(x)⟩ / ‖g − Φ(x)‖²` for `g = Σ w_l Φ(x_l)`.
pub fn fwls_step_unclamped<S: Scalar>(
    prior_points: &[Vec<S>],
    prior_weights: &[S],
    new_point: &[S],
    k: &Kernel<S>,
    mu: &MeanElement<S>,
) -> Result<S> {
    if prior_points.len() != prior_weights.len() {
        return Err(Error::LengthMismatch {
            expected: prior_points.len(),
            got: prior_weights.len(),
        });
    }
    let gg = k.gram(prior_points).quad_form(prior_weights);
    let mut gmu = S::zero();
    for (p, &w) in prior_points.iter().zip(prior_weights) {
        gmu += w * mu.evaluate(p)?;
    }
    let gx = dot(&k.cross(prior_points, new_point), prior_weights);
    let mux = mu.evaluate(new_point)?;
    line_search(gg, gmu, gx, mux, k.diag(new_point), k.scale())
}

/// Line-search step clamped to `[0, 1]`.
pub fn fwls_step<S: Scalar>(
    prior_points: &[Vec<S>],
    prior_weights: &[S],
    new_point: &[S],
    k: &Kernel<S>,
    mu: &MeanElement<S>,
) -> Result<S> {
    Ok(clamp_unit(fwls_step_unclamped(prior_points, prior_weights, new_point, k, mu)?))
}

fn line_search<S: Scalar>(gg: S, gmu: S, gx: S, mux: S, kxx: S, scale: S) -> Result<S> {
    let num = gg - gmu - gx + mux;
    let den = gg - S::lit(2.0) * gx + kxx;
    if !(den >= S::lit(DEGENERATE_DENOMINATOR) * scale) {
        return Err(Error::DegenerateStep {
            denominator: den.to_f64_lossy(),
        });
    }
    Ok(num / den)
}

fn clamp_unit<S: Scalar>(r: S) -> S {
    r.max(S::zero()).min(S::one())
}

/// Index of the smallest finite score; ties go to the lowest index.
fn argmin<S: Scalar>(scores: &[S]) -> Result<usize> {
    let mut best: Option<(usize, S)> = None;
    for (i, &s) in scores.iter().enumerate() {
        if !s.is_finite() {
            continue;
        }
        match best {
            Some((_, b)) if s >= b => {}
            _ => best = Some((i, s)),
        }
    }
    best.map(|(i, _)| i).ok_or(Error::NumericalInconsistency {
        what: "candidate scores",
        value: f64::NAN,
    })
}

fn pool<S: Scalar>(p: &TargetDensity<S>, cfg: &SelectionConfig<S>, iteration: usize) -> Vec<Vec<S>> {
    p.sample_stream(cfg.pool_size, cfg.seed, streams::POOL + iteration as u64)
}

fn mean_values<S: Scalar>(mu: &MeanElement<S>, pool: &[Vec<S>]) -> Result<Vec<S>> {
    pool.par_iter().map(|x| mu.evaluate(x)).collect()
}

/// Frank-Wolfe with fixed steps `ρ_i = 1/(i+1)`.
pub fn fw_select<S: Scalar>(
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
) -> Result<SelectionTrace<S>> {
    frank_wolfe(p, k, mu, cfg, StepRule::Fixed)
}

/// Frank-Wolfe with the closed-form line-search step.
pub fn fwls_select<S: Scalar>(
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
) -> Result<SelectionTrace<S>> {
    frank_wolfe(p, k, mu, cfg, StepRule::LineSearch)
}

/// Frank-Wolfe using `cfg.step_rule`.
pub fn frank_wolfe_select<S: Scalar>(
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
) -> Result<SelectionTrace<S>> {
    frank_wolfe(p, k, mu, cfg, cfg.step_rule)
}

fn check_setup<S: Scalar>(p: &TargetDensity<S>, k: &Kernel<S>, mu: &MeanElement<S>, cfg: &SelectionConfig<S>) -> Result<()> {
    check_dim(p.dim(), k.dim())?;
    check_dim(p.dim(), mu.dim())?;
    cfg.validate(p.dim())
}

fn frank_wolfe<S: Scalar>(
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
    rule: StepRule,
) -> Result<SelectionTrace<S>> {
    check_setup(p, k, mu, cfg)?;
    let scale = k.scale();
    let p_mu = mu.initial_error();
    let half = S::lit(0.5);

    let mut trace = SelectionTrace {
        points: Vec::with_capacity(cfg.n),
        step_sizes: Vec::with_capacity(cfg.n),
        objective: Vec::with_capacity(cfg.n),
        method: match rule {
            StepRule::Fixed => Method::FW,
            StepRule::LineSearch => Method::FWLS,
        },
        clamped_steps: 0,
        degenerate_steps: 0,
    };

    // Iterate g = Σ w_l Φ(x_l) is summarised by ‖g‖² and ⟨g, μ_p⟩.
    let mut g = k.combination(&[], &[]);
    let (first, mu_first) = match &cfg.init_rule {
        InitRule::Explicit(x) => (x.clone(), mu.evaluate(x)?),
        InitRule::ArgmaxMean => {
            let cand = pool(p, cfg, 0);
            let m = mean_values(mu, &cand)?;
            let neg: Vec<S> = m.iter().map(|&v| -v).collect();
            let i = argmin(&neg)?;
            (cand[i].clone(), m[i])
        }
    };
    let mut gg = k.diag(&first);
    let mut gmu = mu_first;
    g.add(&first, S::one());
    trace.points.push(first);
    trace.step_sizes.push(S::one());
    trace.objective.push(clamp_nonneg(half * (gg - S::lit(2.0) * gmu + p_mu), scale, "FW objective")?);

    for i in 1..cfg.n {
        let cand = pool(p, cfg, i);
        let scored: Vec<(S, S)> = cand
            .par_iter()
            .map(|x| Ok((g.eval(x), mu.evaluate(x)?)))
            .collect::<Result<_>>()?;
        let scores: Vec<S> = scored.iter().map(|&(gx, mx)| gx - mx).collect();
        let j = argmin(&scores)?;
        let x = &cand[j];
        let (gx, mux) = scored[j];
        let kxx = k.diag(x);

        let rho = match rule {
            StepRule::Fixed => S::one() / S::lit((i + 1) as f64),
            StepRule::LineSearch => match line_search(gg, gmu, gx, mux, kxx, scale) {
                Ok(raw) => {
                    let r = clamp_unit(raw);
                    if r != raw {
                        trace.clamped_steps += 1;
                    }
                    r
                }
                Err(Error::DegenerateStep { .. }) => {
                    trace.degenerate_steps += 1;
                    S::zero()
                }
                Err(e) => return Err(e),
            },
        };

        let keep = S::one() - rho;
        gg = keep * keep * gg + S::lit(2.0) * rho * keep * gx + rho * rho * kxx;
        gmu = keep * gmu + rho * mux;
        g.scale(keep);
        g.add(x, rho);
        trace.points.push(x.clone());
        trace.step_sizes.push(rho);
        trace.objective.push(clamp_nonneg(half * (gg - S::lit(2.0) * gmu + p_mu), scale, "FW objective")?);
    }
    Ok(trace)
}

/// Sequential Bayesian quadrature: each iteration adds the pool candidate
/// giving the smallest BQ posterior variance. The variance reduction from
/// adding `x` is `(μ_p(x) − aᵀb)² / s` with `a = L⁻¹k_x`, `b = L⁻¹z` and
/// Schur complement `s = k(x,x) − aᵀa`.
pub fn sbq_select<S: Scalar>(
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
) -> Result<SelectionTrace<S>> {
    check_setup(p, k, mu, cfg)?;
    let scale = k.scale();
    let floor = S::lit(SBQ_SCHUR_FLOOR) * scale;

    let mut trace = SelectionTrace {
        points: Vec::with_capacity(cfg.n),
        step_sizes: Vec::new(),
        objective: Vec::with_capacity(cfg.n),
        method: Method::SBQ,
        clamped_steps: 0,
        degenerate_steps: 0,
    };
    // Factor of the Gram matrix over the points that entered it.
    let mut chol = Cholesky::new(&Matrix::zeros(0, 0), S::zero()).expect("empty factor");
    let mut basis: Vec<Vec<S>> = Vec::new();
    let mut b: Vec<S> = Vec::new();
    let mut variance = mu.initial_error();

    let reduction = |x: &[S], mux: S, chol: &Cholesky<S>, basis: &[Vec<S>], b: &[S]| -> (S, Vec<S>) {
        let kx = k.cross(basis, x);
        let a = chol.solve_lower(&kx);
        let s = k.diag(x) + chol.jitter() - dot(&a, &a);
        if !(s > floor) {
            return (S::zero(), kx);
        }
        let r = mux - dot(&a, b);
        (r * r / s, kx)
    };

    for i in 0..cfg.n {
        let chosen: (Vec<S>, S) = match (&cfg.init_rule, i) {
            (InitRule::Explicit(x), 0) => (x.clone(), mu.evaluate(x)?),
            _ => {
                let cand = pool(p, cfg, i);
                let scored: Vec<(S, S)> = cand
                    .par_iter()
                    .map(|x| {
                        let mux = mu.evaluate(x)?;
                        Ok((reduction(x, mux, &chol, &basis, &b).0, mux))
                    })
                    .collect::<Result<_>>()?;
                let neg: Vec<S> = scored.iter().map(|&(d, _)| -d).collect();
                let j = argmin(&neg)?;
                (cand[j].clone(), scored[j].1)
            }
        };
        let (x, mux) = chosen;
        let (delta, kx) = reduction(&x, mux, &chol, &basis, &b);
        // A zero reduction means x adds nothing numerically; it is recorded
        // but kept out of the factor.
        if delta > S::zero() && chol.push(&kx, k.diag(&x)) {
            let n = chol.dim();
            let row = chol.factor().row(n - 1);
            let bn = (mux - dot(&row[..n - 1], &b)) / row[n - 1];
            b.push(bn);
            basis.push(x.clone());
            variance = clamp_nonneg(mu.initial_error() - dot(&b, &b), scale, "SBQ variance")?.min(variance);
        }
        trace.points.push(x);
        trace.objective.push(variance);
    }
    Ok(trace)
}

/// `cfg.n` i.i.d. draws from `p`; prefixes of longer runs coincide.
pub fn mc_select<S: Scalar>(p: &TargetDensity<S>, cfg: &SelectionConfig<S>) -> Result<SelectionTrace<S>> {
    cfg.validate(p.dim())?;
    Ok(SelectionTrace {
        points: p.sample_stream(cfg.n, cfg.seed, streams::MONTE_CARLO),
        step_sizes: Vec::new(),
        objective: Vec::new(),
        method: Method::MC,
        clamped_steps: 0,
        degenerate_steps: 0,
    })
}

/// Runs the selector that produces the points for `method`.
pub fn select<S: Scalar>(
    method: Method,
    p: &TargetDensity<S>,
    k: &Kernel<S>,
    mu: &MeanElement<S>,
    cfg: &SelectionConfig<S>,
) -> Result<SelectionTrace<S>> {
    match method {
        Method::MC => mc_select(p, cfg),
        Method::FW | Method::FWBQ => fw_select(p, k, mu, cfg),
        Method::FWLS | Method::FWLSBQ => fwls_select(p, k, mu, cfg),
        Method::SBQ => sbq_select(p, k, mu, cfg),
    }
}
