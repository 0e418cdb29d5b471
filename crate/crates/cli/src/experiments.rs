//! The four experiments. Each returns its rows; writing them out is left to
//! the caller.

use std::time::Instant;

use fwbq::evidence::{
    enumerate_models, model_selection_study, synthetic_data, CandidateModel, EvidenceResult, LongitudinalData,
    StudyConfig, SyntheticConfig,
};
use fwbq::kernel::rff_sample;
use fwbq::mean_element::{analytic_mean_element, numeric_mean_element, DEFAULT_ORACLE_TOL};
use fwbq::quadrature::{apply, mmd_squared, BqSystem, KernelExpansion};
use fwbq::selector::select;
use fwbq::{EqKernel64, Error, Kernel64, MeanElement64, Method, RngSeed, SelectionConfig64, TargetDensity64};
use rand_distr::{Distribution, StandardNormal};

use crate::config::{log_grid, ExperimentConfig};
use crate::output::{sort_rows, ModelSelectRow, ResultRow};
use crate::CliError;

/// Number of kernel centres in the posterior-demo integrand.
pub const DEMO_CENTRES: usize = 5;
/// Two-sided 95% normal quantile used for the coverage flag.
pub const COVERAGE_Z: f64 = 1.96;

const DEMO_STREAM: u64 = 3 << 32;
const RFF_TAG: u64 = 0x5246_46;

/// Closed-form mean element when one exists, adaptive quadrature otherwise.
pub fn mean_element_for(p: &TargetDensity64, k: &Kernel64) -> Result<MeanElement64, CliError> {
    match analytic_mean_element(p, k) {
        Ok(mu) => Ok(mu),
        Err(Error::Unsupported(_)) => Ok(numeric_mean_element(p, k, DEFAULT_ORACLE_TOL)?),
        Err(e) => Err(e.into()),
    }
}

/// Exact EQ kernel with the configured hyper-parameters.
pub fn exact_kernel(cfg: &ExperimentConfig, dim: usize) -> Result<Kernel64, CliError> {
    Ok(EqKernel64::new(cfg.lambda, cfg.sigma, dim)?.into())
}

/// Selector whose points `method` uses.
pub fn family(method: Method) -> Method {
    match method {
        Method::FWBQ => Method::FW,
        Method::FWLSBQ => Method::FWLS,
        m => m,
    }
}

/// Integrand with known integral and RKHS norm.
#[derive(Debug, Clone)]
pub struct TestFunction {
    pub expansion: KernelExpansion<f64>,
    pub integral: f64,
    pub norm: f64,
}

impl TestFunction {
    pub fn new(expansion: KernelExpansion<f64>, k: &Kernel64, mu: &MeanElement64) -> Result<Self, CliError> {
        Ok(Self {
            integral: expansion.integral(mu)?,
            norm: expansion.norm(k),
            expansion,
        })
    }

    /// Centres drawn from `p`, coefficients standard normal.
    pub fn random(p: &TargetDensity64, k: &Kernel64, mu: &MeanElement64, seed: RngSeed) -> Result<Self, CliError> {
        let centres = p.sample_stream(DEMO_CENTRES, seed, DEMO_STREAM);
        let mut rng = seed.rng(DEMO_STREAM + 1);
        let coeffs = (0..DEMO_CENTRES).map(|_| StandardNormal.sample(&mut rng)).collect();
        Self::new(KernelExpansion::new(centres, coeffs)?, k, mu)
    }
}

/// Kernels used to select and weight points, and to measure the result.
struct Setup<'a> {
    label: &'static str,
    select_kernel: &'a Kernel64,
    select_mu: &'a MeanElement64,
    eval_kernel: &'a Kernel64,
    eval_mu: &'a MeanElement64,
}

fn method_rows(
    cfg: &ExperimentConfig,
    p: &TargetDensity64,
    setup: &Setup<'_>,
    methods: &[Method],
    f: Option<&TestFunction>,
    clock: Option<Instant>,
) -> Result<Vec<ResultRow>, CliError> {
    let grid = log_grid(cfg.n_max);
    let sel = SelectionConfig64::new(cfg.n_max, cfg.seed).with_pool_size(cfg.pool_size);
    let mut families: Vec<Method> = Vec::new();
    for &m in methods {
        if !families.contains(&family(m)) {
            families.push(family(m));
        }
    }
    let mut rows = Vec::new();
    for fam in families {
        let trace = select(fam, p, setup.select_kernel, setup.select_mu, &sel)?;
        for &m in methods.iter().filter(|&&m| family(m) == fam) {
            for &n in &grid {
                let prefix = trace.prefix(n);
                let rule = prefix.rule_for(m, setup.select_kernel, setup.select_mu)?;
                let mmd2 = mmd_squared(&rule, setup.eval_kernel, setup.eval_mu)?;
                let variance = if m.is_bayesian() {
                    Some(BqSystem::new(&prefix.points, setup.select_kernel, setup.select_mu)?.variance()?)
                } else {
                    None
                };
                let mut row = ResultRow {
                    method: m.as_str().to_string(),
                    kernel: setup.label.to_string(),
                    n,
                    mmd2,
                    estimate: None,
                    abs_error: None,
                    posterior_mean: None,
                    posterior_variance: variance,
                    error_bound: None,
                    covered: None,
                    seed: cfg.seed.0,
                    wall_clock_millis: None,
                };
                if let Some(f) = f {
                    let values: Vec<f64> = rule
                        .points()
                        .iter()
                        .map(|x| f.expansion.eval(setup.eval_kernel, x))
                        .collect();
                    let est = apply(&rule, &values)?;
                    let err = (est - f.integral).abs();
                    row.estimate = Some(est);
                    row.abs_error = Some(err);
                    row.error_bound = Some(mmd2.sqrt() * f.norm);
                    if let Some(v) = variance {
                        row.posterior_mean = Some(est);
                        row.covered = Some(err <= COVERAGE_Z * v.sqrt());
                    }
                }
                row.wall_clock_millis = clock.map(|t| t.elapsed().as_millis() as u64);
                rows.push(row);
            }
        }
    }
    sort_rows(&mut rows);
    Ok(rows)
}

/// MMD² (and the posterior variance for BQ weights) against `n` for each
/// method, on point sets nested across `n`.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let clock = cfg.timing.then(Instant::now);
    let p = cfg.density.build(cfg.seed)?;
    let k = exact_kernel(cfg, p.dim())?;
    let mu = mean_element_for(&p, &k)?;
    let setup = Setup {
        label: "eq",
        select_kernel: &k,
        select_mu: &mu,
        eval_kernel: &k,
        eval_mu: &mu,
    };
    method_rows(cfg, &p, &setup, &cfg.methods, None, clock)
}

/// Convergence rows plus estimates of a random kernel expansion with exactly
/// known integral, and whether the BQ 95% interval covers it.
pub fn run_posterior_demo(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let p = cfg.density.build(cfg.seed)?;
    let k = exact_kernel(cfg, p.dim())?;
    let mu = mean_element_for(&p, &k)?;
    let f = TestFunction::random(&p, &k, &mu, cfg.seed)?;
    run_posterior_demo_with(cfg, &f)
}

/// [`run_posterior_demo`] for a given integrand.
pub fn run_posterior_demo_with(cfg: &ExperimentConfig, f: &TestFunction) -> Result<Vec<ResultRow>, CliError> {
    let clock = cfg.timing.then(Instant::now);
    let p = cfg.density.build(cfg.seed)?;
    let k = exact_kernel(cfg, p.dim())?;
    let mu = mean_element_for(&p, &k)?;
    let setup = Setup {
        label: "eq",
        select_kernel: &k,
        select_mu: &mu,
        eval_kernel: &k,
        eval_mu: &mu,
    };
    method_rows(cfg, &p, &setup, &cfg.methods, Some(f), clock)
}

/// FWLS and FWLSBQ under the exact kernel and under `D` random Fourier
/// features. The MMD is always measured with the exact kernel; the
/// posterior variance of `rff` rows is the approximate model's own.
pub fn run_rff(cfg: &ExperimentConfig) -> Result<Vec<ResultRow>, CliError> {
    let clock = cfg.timing.then(Instant::now);
    let features = cfg
        .rff_d
        .ok_or_else(|| CliError::Config("the rff experiment needs --rff-d".into()))?;
    let methods: Vec<Method> = cfg
        .methods
        .iter()
        .copied()
        .filter(|m| matches!(m, Method::FWLS | Method::FWLSBQ))
        .collect();
    let p = cfg.density.build(cfg.seed)?;
    let k = exact_kernel(cfg, p.dim())?;
    let mu = mean_element_for(&p, &k)?;
    let rff: Kernel64 = rff_sample(cfg.sigma, cfg.lambda, p.dim(), features, cfg.seed.derive(RFF_TAG))?.into();
    let rff_mu = mean_element_for(&p, &rff)?;
    let exact = Setup {
        label: "eq",
        select_kernel: &k,
        select_mu: &mu,
        eval_kernel: &k,
        eval_mu: &mu,
    };
    let approx = Setup {
        label: "rff",
        select_kernel: &rff,
        select_mu: &rff_mu,
        eval_kernel: &k,
        eval_mu: &mu,
    };
    let mut rows = method_rows(cfg, &p, &exact, &methods, None, clock)?;
    rows.extend(method_rows(cfg, &p, &approx, &methods, None, clock)?);
    sort_rows(&mut rows);
    Ok(rows)
}

/// Model-selection study output.
#[derive(Debug, Clone)]
pub struct ModelSelectOutput {
    pub models: Vec<CandidateModel>,
    pub method: Method,
    pub results: Vec<(usize, EvidenceResult)>,
    pub rows: Vec<ModelSelectRow>,
}

/// Kinetics data: the `--data` file, or a simulated set.
pub fn load_data(cfg: &ExperimentConfig) -> Result<LongitudinalData, CliError> {
    match &cfg.data {
        Some(path) => Ok(LongitudinalData::read_csv(std::fs::File::open(path)?)?),
        None => {
            let syn = synthetic_data(&SyntheticConfig {
                enzymes: cfg.enzymes,
                seed: cfg.data_seed,
                ..SyntheticConfig::default()
            })?;
            Ok(syn.data)
        }
    }
}

/// Evidence posteriors and sampled model probabilities for every candidate
/// model at each grid size.
pub fn run_model_select(cfg: &ExperimentConfig) -> Result<ModelSelectOutput, CliError> {
    let data = load_data(cfg)?;
    let models = enumerate_models(data.enzyme_count());
    run_model_select_on(cfg, &data, &models)
}

/// [`run_model_select`] for given data and candidates.
pub fn run_model_select_on(
    cfg: &ExperimentConfig,
    data: &LongitudinalData,
    models: &[CandidateModel],
) -> Result<ModelSelectOutput, CliError> {
    let method = cfg
        .evidence_method()
        .ok_or_else(|| CliError::Config("model-select needs a Bayesian method".into()))?;
    let study = StudyConfig {
        method,
        n_grid: log_grid(cfg.n_max),
        pool_size: cfg.pool_size,
        sample_count: cfg.samples,
        seed: cfg.seed,
    };
    let results = model_selection_study(data, models, &study)?;
    let mut rows = Vec::new();
    for (n, res) in &results {
        for (i, model) in models.iter().enumerate() {
            let probs: Vec<f64> = res.probability_samples.iter().map(|r| r[i]).collect();
            let b = res.box_stats[i];
            let post = res.per_model[i];
            rows.push(ModelSelectRow {
                n: *n,
                model: model.to_string(),
                method: method.as_str().to_string(),
                evidence_mean: post.mean,
                evidence_variance: post.variance,
                log_scale: res.log_scale,
                probability_mean: probs.iter().sum::<f64>() / probs.len() as f64,
                p2_5: b.p2_5,
                p25: b.p25,
                p50: b.p50,
                p75: b.p75,
                p97_5: b.p97_5,
                map_stability: res.map_stability,
                is_map: i == res.modal_map,
                rejection_rate: res.rejection_rate,
                seed: cfg.seed.0,
            });
        }
    }
    Ok(ModelSelectOutput {
        models: models.to_vec(),
        method,
        results,
        rows,
    })
}
