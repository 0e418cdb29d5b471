//! Model evidence for Michaelis–Menten gradient-matching regressions.
//!
//! For a candidate model `M` (a set of at most two enzymes) and kinetic
//! constants `K ∈ [0, ∞)^{1+|M|}`, the regression weights and noise scale
//! integrate out in closed form under a g-prior, leaving a conditional
//! evidence `L(K, M)`. The model evidence `L(M) = ∫ L(K, M) p(K) dK` with
//! `p = N(1, ½ I)` truncated to the positive orthant is then computed by
//! Bayesian quadrature under `k(x, x') = exp(-‖x − x'‖²)`, and the resulting
//! Gaussian posteriors are sampled to give a distribution over posterior
//! model probabilities.
//!
//! Likelihood values span many orders of magnitude, so they are handled as
//! `log L` and integrated after subtracting one common offset shared by all
//! models; normalised model probabilities are unaffected by the offset.
//!
//! This module is `f64` only.

use std::fmt;
use std::io::{Read, Write};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal, Uniform};
use rayon::prelude::*;

use crate::density::{TargetDensity, TruncatedGaussian};
use crate::error::{Error, Result};
use crate::kernel::{EqKernel, Kernel};
use crate::linalg::{Cholesky, Matrix};
use crate::mean_element::{trunc_eq_mean_element, MeanElement};
use crate::quadrature::{posterior, IntegralPosterior, Method};
use crate::rng::{streams, RngSeed};
use crate::selector::{select, SelectionConfig, SelectionTrace};

/// Largest number of enzymes in a candidate model.
pub const MAX_ENZYMES_PER_MODEL: usize = 2;

/// Per-model acceptance below this fraction aborts propagation.
pub const MIN_ACCEPTANCE: f64 = 0.01;

/// Time course of substrate and enzyme measurements.
#[derive(Debug, Clone, PartialEq)]
pub struct LongitudinalData {
    times: Vec<f64>,
    substrate: Vec<f64>,
    substrate_star: Vec<f64>,
    enzymes: Vec<Vec<f64>>,
}

impl LongitudinalData {
    /// Validates and stores the series. `enzymes[j]` is the phosphorylated
    /// level of enzyme `j` at each time.
    pub fn new(times: Vec<f64>, substrate: Vec<f64>, substrate_star: Vec<f64>, enzymes: Vec<Vec<f64>>) -> Result<Self> {
        let len = times.len();
        if len < 2 {
            return Err(Error::InvalidInput("need at least two time points".into()));
        }
        for s in [&substrate, &substrate_star].into_iter().chain(enzymes.iter()) {
            if s.len() != len {
                return Err(Error::LengthMismatch {
                    expected: len,
                    got: s.len(),
                });
            }
            if s.iter().any(|&v| !(v >= 0.0) || !v.is_finite()) {
                return Err(Error::InvalidInput("measurements must be finite and nonnegative".into()));
            }
        }
        if times.iter().any(|t| !t.is_finite()) || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidInput("times must be finite and strictly increasing".into()));
        }
        Ok(Self {
            times,
            substrate,
            substrate_star,
            enzymes,
        })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn substrate(&self) -> &[f64] {
        &self.substrate
    }

    pub fn substrate_star(&self) -> &[f64] {
        &self.substrate_star
    }

    pub fn enzymes(&self) -> &[Vec<f64>] {
        &self.enzymes
    }

    pub fn enzyme_count(&self) -> usize {
        self.enzymes.len()
    }

    /// Number of finite-difference observations `N`.
    pub fn observations(&self) -> usize {
        self.times.len() - 1
    }

    /// Reads a comma-separated table with header
    /// `time,yS,ySstar,yE1star,yE2star,…`.
    pub fn read_csv<R: Read>(reader: R) -> Result<Self> {
        let mut rdr = csv::ReaderBuilder::new().trim(csv::Trim::All).from_reader(reader);
        let headers = rdr.headers().map_err(csv_error)?.clone();
        let names: Vec<&str> = headers.iter().collect();
        if names.len() < 3 || names[0] != "time" || names[1] != "yS" || names[2] != "ySstar" {
            return Err(Error::InvalidInput("header must start with time,yS,ySstar".into()));
        }
        for (j, name) in names[3..].iter().enumerate() {
            if *name != format!("yE{}star", j + 1) {
                return Err(Error::InvalidInput(format!("unexpected column `{name}`")));
            }
        }
        let mut cols = vec![Vec::new(); names.len()];
        for record in rdr.records() {
            let record = record.map_err(csv_error)?;
            for (c, field) in cols.iter_mut().zip(record.iter()) {
                let v: f64 = field
                    .parse()
                    .map_err(|_| Error::InvalidInput(format!("not a number: `{field}`")))?;
                c.push(v);
            }
        }
        let mut cols = cols.into_iter();
        let times = cols.next().unwrap_or_default();
        let substrate = cols.next().unwrap_or_default();
        let substrate_star = cols.next().unwrap_or_default();
        Self::new(times, substrate, substrate_star, cols.collect())
    }

    /// Writes the table read by [`read_csv`](Self::read_csv).
    pub fn write_csv<W: Write>(&self, writer: W) -> Result<()> {
        let mut w = csv::Writer::from_writer(writer);
        let mut header = vec!["time".to_string(), "yS".into(), "ySstar".into()];
        header.extend((1..=self.enzyme_count()).map(|j| format!("yE{j}star")));
        w.write_record(&header).map_err(csv_error)?;
        for i in 0..self.times.len() {
            let mut row = vec![self.times[i], self.substrate[i], self.substrate_star[i]];
            row.extend(self.enzymes.iter().map(|e| e[i]));
            w.write_record(row.iter().map(|v| v.to_string())).map_err(csv_error)?;
        }
        w.flush().map_err(|e| Error::InvalidInput(e.to_string()))?;
        Ok(())
    }
}

fn csv_error(e: csv::Error) -> Error {
    Error::InvalidInput(format!("csv: {e}"))
}

/// Set of regulating enzymes (0-based indices, ascending).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CandidateModel {
    enzymes: Vec<usize>,
}

impl CandidateModel {
    pub fn new(mut enzymes: Vec<usize>) -> Result<Self> {
        enzymes.sort_unstable();
        enzymes.dedup();
        if enzymes.len() > MAX_ENZYMES_PER_MODEL {
            return Err(Error::InvalidInput(format!(
                "models contain at most {MAX_ENZYMES_PER_MODEL} enzymes"
            )));
        }
        Ok(Self { enzymes })
    }

    pub fn enzymes(&self) -> &[usize] {
        &self.enzymes
    }

    /// Dimension of `K`: one substrate constant plus one per enzyme.
    pub fn dim(&self) -> usize {
        1 + self.enzymes.len()
    }
}

impl fmt::Display for CandidateModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let names: Vec<String> = self.enzymes.iter().map(|j| format!("E{}", j + 1)).collect();
        write!(f, "{{{}}}", names.join(","))
    }
}

/// The empty model, every single-enzyme model, then every pair, in
/// lexicographic order: `1 + e + e(e−1)/2` models.
pub fn enumerate_models(enzyme_count: usize) -> Vec<CandidateModel> {
    let mut out = vec![CandidateModel { enzymes: vec![] }];
    out.extend((0..enzyme_count).map(|i| CandidateModel { enzymes: vec![i] }));
    for i in 0..enzyme_count {
        for j in i + 1..enzyme_count {
            out.push(CandidateModel { enzymes: vec![i, j] });
        }
    }
    out
}

/// Response `Y` (finite-difference gradients of `y_S*`) and design `X(K)`:
/// column 0 is `−y_S*/(y_S* + K_0)`, column `j` is `y_{E_j}* y_S/(y_S + K_j)`.
pub fn build_design(data: &LongitudinalData, model: &CandidateModel, k: &[f64]) -> Result<(Vec<f64>, Matrix<f64>)> {
    if k.len() != model.dim() {
        return Err(Error::DimensionMismatch {
            expected: model.dim(),
            got: k.len(),
        });
    }
    if k.iter().any(|&v| !(v > 0.0) || !v.is_finite()) {
        return Err(Error::InvalidInput("kinetic constants must be positive".into()));
    }
    if let Some(&j) = model.enzymes.iter().find(|&&j| j >= data.enzyme_count()) {
        return Err(Error::InvalidInput(format!("enzyme index {j} out of range")));
    }
    let n = data.observations();
    let t = &data.times;
    let ys = &data.substrate;
    let yss = &data.substrate_star;
    let y: Vec<f64> = (0..n).map(|i| (yss[i + 1] - yss[i]) / (t[i + 1] - t[i])).collect();
    let x = Matrix::from_fn(n, model.dim(), |i, c| {
        if c == 0 {
            -yss[i] / (yss[i] + k[0])
        } else {
            let e = model.enzymes[c - 1];
            data.enzymes[e][i] * ys[i] / (ys[i] + k[c])
        }
    });
    Ok((y, x))
}

/// Intermediate quantities of the g-prior evidence.
#[derive(Debug, Clone, PartialEq)]
pub struct GPrior {
    pub omega: Matrix<f64>,
    pub v: Vec<f64>,
    pub b: f64,
    pub log_evidence: f64,
}

/// Evaluates `Ω_N = (1 + 1/N) XᵀX`, `V_N = Ω_N⁻¹((1/N) XᵀX 1 + XᵀY)`,
/// `b_N = ½(YᵀY + (1/N) 1ᵀXᵀX1 − V_NᵀΩ_N V_N)` and
/// `log L = −(N/2) log 2π − (d/2) log(N+1) + log Γ(N/2) − (N/2) log b_N`.
pub fn g_prior(y: &[f64], x: &Matrix<f64>) -> Result<GPrior> {
    let n = y.len();
    if x.rows() != n {
        return Err(Error::LengthMismatch {
            expected: n,
            got: x.rows(),
        });
    }
    let d = x.cols();
    if n < d || n == 0 {
        return Err(Error::IllPosed(format!("{n} observations for {d} regressors")));
    }
    let nf = n as f64;
    let xtx = x.gram();
    let mut omega = xtx.clone();
    for i in 0..d {
        for j in 0..d {
            omega[(i, j)] *= 1.0 + 1.0 / nf;
        }
    }
    let chol = Cholesky::new(&omega, 0.0).ok_or_else(|| Error::IllPosed("design matrix is rank deficient".into()))?;
    let ones = vec![1.0; d];
    let g1 = xtx.matvec(&ones);
    let xty = x.tr_matvec(y);
    let u: Vec<f64> = g1.iter().zip(&xty).map(|(a, b)| a / nf + b).collect();
    // Vᵀ Ω V = uᵀ Ω⁻¹ u = ‖L⁻¹ u‖²
    let lu = chol.solve_lower(&u);
    let v = chol.solve_upper(&lu);
    let yty: f64 = y.iter().map(|v| v * v).sum();
    let one_g_one: f64 = g1.iter().sum();
    let b = 0.5 * (yty + one_g_one / nf - lu.iter().map(|v| v * v).sum::<f64>());
    if !(b > 0.0) {
        return Err(Error::NumericalInconsistency {
            what: "g-prior residual b_N",
            value: b,
        });
    }
    let log_evidence = -0.5 * nf * std::f64::consts::TAU.ln() - 0.5 * d as f64 * (nf + 1.0).ln()
        + libm::lgamma(0.5 * nf)
        - 0.5 * nf * b.ln();
    Ok(GPrior {
        omega,
        v,
        b,
        log_evidence,
    })
}

/// `log L(K, M)`.
pub fn log_conditional_evidence(data: &LongitudinalData, model: &CandidateModel, k: &[f64]) -> Result<f64> {
    let (y, x) = build_design(data, model, k)?;
    Ok(g_prior(&y, &x)?.log_evidence)
}

/// `L(K, M)`; may underflow for large data sets, see
/// [`log_conditional_evidence`].
pub fn conditional_evidence(data: &LongitudinalData, model: &CandidateModel, k: &[f64]) -> Result<f64> {
    Ok(log_conditional_evidence(data, model, k)?.exp())
}

/// Integration problem for a `d`-dimensional kinetic vector: truncated
/// Gaussian prior, unit-exponent EQ kernel and its mean element.
#[derive(Debug, Clone)]
pub struct PriorProblem {
    pub density: TargetDensity<f64>,
    pub kernel: Kernel<f64>,
    pub mean_element: MeanElement<f64>,
}

impl PriorProblem {
    pub fn new(d: usize) -> Result<Self> {
        Ok(Self {
            density: TruncatedGaussian::new(d)?.into(),
            kernel: EqKernel::unit_exponent(1.0, d)?.into(),
            mean_element: trunc_eq_mean_element(d)?,
        })
    }
}

/// Selector settings for evidence integrals.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvidenceConfig {
    pub method: Method,
    pub n: usize,
    pub pool_size: usize,
    pub seed: RngSeed,
}

impl EvidenceConfig {
    fn validate(&self) -> Result<()> {
        if !self.method.is_bayesian() {
            return Err(Error::InvalidInput(format!("{} does not give a posterior", self.method)));
        }
        Ok(())
    }

    fn selection(&self) -> SelectionConfig<f64> {
        SelectionConfig::new(self.n, self.seed).with_pool_size(self.pool_size)
    }
}

/// Design points for `d = 1, 2, 3`. Point selection does not look at the
/// integrand, so one design per dimension serves every model, and shorter
/// designs are prefixes of longer ones.
#[derive(Debug, Clone)]
pub struct SharedDesigns {
    problems: Vec<PriorProblem>,
    traces: Vec<SelectionTrace<f64>>,
}

impl SharedDesigns {
    pub fn new(dims: &[usize], cfg: &EvidenceConfig) -> Result<Self> {
        cfg.validate()?;
        let max_d = dims.iter().copied().max().unwrap_or(1);
        let mut problems = Vec::with_capacity(max_d);
        let mut traces = Vec::with_capacity(max_d);
        for d in 1..=max_d {
            let prob = PriorProblem::new(d)?;
            let trace = if dims.contains(&d) {
                select(cfg.method, &prob.density, &prob.kernel, &prob.mean_element, &cfg.selection())?
            } else {
                SelectionTrace {
                    points: Vec::new(),
                    step_sizes: Vec::new(),
                    objective: Vec::new(),
                    method: cfg.method,
                    clamped_steps: 0,
                    degenerate_steps: 0,
                }
            };
            problems.push(prob);
            traces.push(trace);
        }
        Ok(Self { problems, traces })
    }

    pub fn problem(&self, d: usize) -> &PriorProblem {
        &self.problems[d - 1]
    }

    pub fn points(&self, d: usize) -> &[Vec<f64>] {
        &self.traces[d - 1].points
    }

    pub fn trace(&self, d: usize) -> &SelectionTrace<f64> {
        &self.traces[d - 1]
    }
}

/// BQ posterior for `∫ f(K) p(K) dK` in dimension `d`, with `f` any
/// nonnegative integrand (typically a rescaled likelihood).
pub fn integrate_against_prior<F>(d: usize, cfg: &EvidenceConfig, f: F) -> Result<IntegralPosterior<f64>>
where
    F: Fn(&[f64]) -> Result<f64>,
{
    let designs = SharedDesigns::new(&[d], cfg)?;
    let pts = designs.points(d);
    let values = pts.iter().map(|x| f(x)).collect::<Result<Vec<_>>>()?;
    let prob = designs.problem(d);
    posterior(pts, &values, &prob.kernel, &prob.mean_element)
}

/// Posterior over `L(M) / exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledEvidence {
    pub posterior: IntegralPosterior<f64>,
    pub log_scale: f64,
}

/// Evidence posterior for one model. The likelihood is rescaled so that its
/// largest value on the design is 1.
pub fn model_evidence(data: &LongitudinalData, model: &CandidateModel, cfg: &EvidenceConfig) -> Result<ScaledEvidence> {
    let d = model.dim();
    let designs = SharedDesigns::new(&[d], cfg)?;
    let logs = log_likelihoods(data, model, designs.points(d))?;
    let log_scale = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let prob = designs.problem(d);
    let values: Vec<f64> = logs.iter().map(|l| (l - log_scale).exp()).collect();
    Ok(ScaledEvidence {
        posterior: posterior(designs.points(d), &values, &prob.kernel, &prob.mean_element)?,
        log_scale,
    })
}

fn log_likelihoods(data: &LongitudinalData, model: &CandidateModel, points: &[Vec<f64>]) -> Result<Vec<f64>> {
    points
        .iter()
        .map(|k| {
            // The truncated prior puts no mass on the boundary; an exact zero
            // is nudged inside so the design stays defined.
            let k: Vec<f64> = k.iter().map(|&v| v.max(f64::MIN_POSITIVE)).collect();
            log_conditional_evidence(data, model, &k)
        })
        .collect()
}

/// Box-plot summary: 2.5, 25, 50, 75 and 97.5 percentiles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoxStats {
    pub p2_5: f64,
    pub p25: f64,
    pub p50: f64,
    pub p75: f64,
    pub p97_5: f64,
}

impl BoxStats {
    pub fn from_samples(values: &[f64]) -> Self {
        let mut v = values.to_vec();
        v.sort_by(f64::total_cmp);
        let q = |p: f64| quantile_sorted(&v, p);
        Self {
            p2_5: q(0.025),
            p25: q(0.25),
            p50: q(0.5),
            p75: q(0.75),
            p97_5: q(0.975),
        }
    }

    /// Width of the central 95% interval.
    pub fn width95(&self) -> f64 {
        self.p97_5 - self.p2_5
    }
}

/// Linear interpolation between order statistics (`(n−1)p` positioning).
fn quantile_sorted(v: &[f64], p: f64) -> f64 {
    if v.is_empty() {
        return f64::NAN;
    }
    let h = (v.len() - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = h.ceil() as usize;
    v[lo] + (h - lo as f64) * (v[hi] - v[lo])
}

/// Sampled posterior model probabilities.
#[derive(Debug, Clone, PartialEq)]
pub struct EvidenceResult {
    pub per_model: Vec<IntegralPosterior<f64>>,
    /// One row per sample, one column per model; rows sum to 1.
    pub probability_samples: Vec<Vec<f64>>,
    pub box_stats: Vec<BoxStats>,
    /// Most frequent MAP model across samples.
    pub modal_map: usize,
    /// Fraction of samples whose MAP model is `modal_map`.
    pub map_stability: f64,
    /// Fraction of Gaussian draws rejected for being nonpositive.
    pub rejection_rate: f64,
    /// Common offset of the log likelihoods behind `per_model`.
    pub log_scale: f64,
}

impl EvidenceResult {
    pub fn mean_width95(&self) -> f64 {
        self.box_stats.iter().map(BoxStats::width95).sum::<f64>() / self.box_stats.len() as f64
    }
}

/// Samples `L̂(M_i) ~ N(mean_i, var_i)` conditioned on `L̂(M_i) > 0` and
/// normalises each sample vector. Draws are independent across models, so
/// conditioning the whole vector on positivity is the same as redrawing
/// each nonpositive entry on its own.
pub fn propagate(results: &[IntegralPosterior<f64>], sample_count: usize, seed: RngSeed) -> Result<EvidenceResult> {
    if results.is_empty() {
        return Err(Error::InvalidInput("need at least one model".into()));
    }
    if sample_count == 0 {
        return Err(Error::InvalidInput("need at least one sample".into()));
    }
    let m = results.len();
    let mut rng = seed.rng(streams::MONTE_CARLO);
    let mut rows = Vec::with_capacity(sample_count);
    let mut draws = vec![0usize; m];
    let mut rejected = vec![0usize; m];
    let cap = sample_count.saturating_mul(100).max(1000);
    for _ in 0..sample_count {
        let mut row = Vec::with_capacity(m);
        for (i, post) in results.iter().enumerate() {
            let sd = post.sd();
            let value = loop {
                let z: f64 = StandardNormal.sample(&mut rng);
                let v = post.mean + sd * z;
                draws[i] += 1;
                if v > 0.0 {
                    break v;
                }
                rejected[i] += 1;
                if draws[i] >= cap || (sd == 0.0) {
                    return Err(Error::DegeneratePosterior {
                        rejection_rate: rejected[i] as f64 / draws[i] as f64,
                    });
                }
            };
            row.push(value);
        }
        let total: f64 = row.iter().sum();
        row.iter_mut().for_each(|v| *v /= total);
        rows.push(row);
    }
    for i in 0..m {
        let rate = rejected[i] as f64 / draws[i] as f64;
        if rate > 1.0 - MIN_ACCEPTANCE {
            return Err(Error::DegeneratePosterior { rejection_rate: rate });
        }
    }

    let mut map_counts = vec![0usize; m];
    for row in &rows {
        map_counts[argmax(row)] += 1;
    }
    let modal_map = argmax_count(&map_counts);
    let box_stats = (0..m)
        .map(|i| BoxStats::from_samples(&rows.iter().map(|r| r[i]).collect::<Vec<_>>()))
        .collect();
    Ok(EvidenceResult {
        per_model: results.to_vec(),
        probability_samples: rows,
        box_stats,
        modal_map,
        map_stability: map_counts[modal_map] as f64 / sample_count as f64,
        rejection_rate: rejected.iter().sum::<usize>() as f64 / draws.iter().sum::<usize>() as f64,
        log_scale: 0.0,
    })
}

fn argmax(v: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

fn argmax_count(v: &[usize]) -> usize {
    let mut best = 0;
    for (i, &x) in v.iter().enumerate() {
        if x > v[best] {
            best = i;
        }
    }
    best
}

/// Settings for a full model-selection study.
#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub method: Method,
    /// Design sizes to report, ascending.
    pub n_grid: Vec<usize>,
    pub pool_size: usize,
    pub sample_count: usize,
    pub seed: RngSeed,
}

/// Evidence posteriors for every model at each design size, plus sampled
/// model probabilities. All models share one log offset, so results at
/// different `n` are directly comparable.
pub fn model_selection_study(
    data: &LongitudinalData,
    models: &[CandidateModel],
    cfg: &StudyConfig,
) -> Result<Vec<(usize, EvidenceResult)>> {
    let n_max = *cfg
        .n_grid
        .iter()
        .max()
        .ok_or_else(|| Error::InvalidInput("empty n grid".into()))?;
    if models.is_empty() {
        return Err(Error::InvalidInput("no candidate models".into()));
    }
    let ecfg = EvidenceConfig {
        method: cfg.method,
        n: n_max,
        pool_size: cfg.pool_size,
        seed: cfg.seed,
    };
    let dims: Vec<usize> = models.iter().map(CandidateModel::dim).collect();
    let designs = SharedDesigns::new(&dims, &ecfg)?;
    let logs: Vec<Vec<f64>> = models
        .par_iter()
        .map(|m| log_likelihoods(data, m, designs.points(m.dim())))
        .collect::<Result<_>>()?;
    let log_scale = logs.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
    if !log_scale.is_finite() {
        return Err(Error::NumericalInconsistency {
            what: "log likelihood offset",
            value: log_scale,
        });
    }
    let scaled: Vec<Vec<f64>> = logs
        .iter()
        .map(|l| l.iter().map(|v| (v - log_scale).exp()).collect())
        .collect();

    let mut out = Vec::with_capacity(cfg.n_grid.len());
    for (gi, &n) in cfg.n_grid.iter().enumerate() {
        if n == 0 {
            return Err(Error::InvalidInput("design sizes must be positive".into()));
        }
        let posts: Vec<IntegralPosterior<f64>> = models
            .par_iter()
            .zip(&scaled)
            .map(|(m, f)| {
                let d = m.dim();
                let prob = designs.problem(d);
                posterior(&designs.points(d)[..n], &f[..n], &prob.kernel, &prob.mean_element)
            })
            .collect::<Result<_>>()?;
        let mut res = propagate(&posts, cfg.sample_count, cfg.seed.derive(gi as u64))?;
        res.log_scale = log_scale;
        out.push((n, res));
    }
    Ok(out)
}

/// Settings for simulated kinetics data.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticConfig {
    pub enzymes: usize,
    /// Regulators used to simulate; drawn at random when `None`.
    pub true_model: Option<CandidateModel>,
    pub time_points: usize,
    pub t_end: f64,
    pub noise_sd: f64,
    pub seed: RngSeed,
}

impl Default for SyntheticConfig {
    fn default() -> Self {
        Self {
            enzymes: 10,
            true_model: None,
            time_points: 6,
            t_end: 10.0,
            noise_sd: 0.4,
            seed: RngSeed(2015),
        }
    }
}

/// Simulated data set with the parameters that generated it.
#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticData {
    pub data: LongitudinalData,
    pub true_model: CandidateModel,
    pub k: Vec<f64>,
    pub v: Vec<f64>,
}

/// Smooth positive curve `a + b (1 + sin(ω t + φ))/2`.
fn smooth_curve<R: Rng>(rng: &mut R, times: &[f64]) -> Vec<f64> {
    let a = rng.sample(Uniform::new(0.3, 1.0).expect("valid range"));
    let b = rng.sample(Uniform::new(0.0, 1.0).expect("valid range"));
    let w = rng.sample(Uniform::new(0.2, 0.8).expect("valid range"));
    let phi = rng.sample(Uniform::new(0.0, std::f64::consts::TAU).expect("valid range"));
    times.iter().map(|&t| a + b * 0.5 * (1.0 + (w * t + phi).sin())).collect()
}

/// Simulates a data set: enzyme and unphosphorylated substrate levels are
/// smooth positive curves, kinetic constants `K, V` are drawn from the
/// truncated `N(1, ½)` prior, and `y_S*` is stepped forward so that its
/// finite-difference gradients follow the regression model with Gaussian
/// noise. Draws of constants and noise that would drive `y_S*` negative are
/// discarded and redrawn.
pub fn synthetic_data(cfg: &SyntheticConfig) -> Result<SyntheticData> {
    if cfg.time_points < 2 || !(cfg.t_end > 0.0) || !(cfg.noise_sd >= 0.0) {
        return Err(Error::InvalidInput("invalid synthetic data settings".into()));
    }
    let mut rng = cfg.seed.rng(streams::DIRECT);
    let true_model = match &cfg.true_model {
        Some(m) => m.clone(),
        None => {
            let all = enumerate_models(cfg.enzymes);
            all[rng.random_range(0..all.len())].clone()
        }
    };
    if true_model.enzymes().iter().any(|&j| j >= cfg.enzymes) {
        return Err(Error::InvalidInput("true model uses an unknown enzyme".into()));
    }
    let dt = cfg.t_end / (cfg.time_points - 1) as f64;
    let times: Vec<f64> = (0..cfg.time_points).map(|i| i as f64 * dt).collect();
    let substrate = smooth_curve(&mut rng, &times);
    let enzymes: Vec<Vec<f64>> = (0..cfg.enzymes).map(|_| smooth_curve(&mut rng, &times)).collect();
    let prior: TargetDensity<f64> = TruncatedGaussian::new(true_model.dim())?.into();

    for attempt in 0..1000u64 {
        let mut rng = cfg.seed.rng(streams::MONTE_CARLO + attempt);
        let k = prior.sample_with(&mut rng, 1).remove(0);
        let v = prior.sample_with(&mut rng, 1).remove(0);
        let start = rng.sample(Uniform::new(0.5, 1.5).expect("valid range"));
        let mut star = Vec::with_capacity(cfg.time_points);
        star.push(start);
        for i in 0..cfg.time_points - 1 {
            let y = star[i];
            let mut rate = -v[0] * y / (y + k[0]);
            for (c, &e) in true_model.enzymes().iter().enumerate() {
                rate += v[c + 1] * enzymes[e][i] * substrate[i] / (substrate[i] + k[c + 1]);
            }
            let z: f64 = StandardNormal.sample(&mut rng);
            star.push(y + dt * (rate + cfg.noise_sd * z));
        }
        if star.iter().all(|&y| y >= 0.0) {
            let data = LongitudinalData::new(times, substrate, star, enzymes)?;
            return Ok(SyntheticData { data, true_model, k, v });
        }
    }
    Err(Error::InvalidInput("could not simulate a nonnegative substrate path".into()))
}
