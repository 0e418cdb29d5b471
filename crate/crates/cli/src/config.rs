//! Command-line flags and the validated experiment configuration.
//!
//! Density files use the key-value format of
//! [`TargetDensity::from_config_str`]: one `key = value` per line, `#` starts a
//! comment.
//!
//! ```text
//! family = mixture            # or random-mixture, truncated-gaussian
//! dim = 2
//! component = 0.3 | 0 0 | 1 0 0 1      # weight | mean | row-major covariance
//! component = 0.7 | 1 -1 | 0.5 0.1 0.1 0.5
//! ```
//!
//! `random-mixture` takes `components = <count>` and `seed = <u64>` instead of
//! explicit components.

use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use clap::{Parser, ValueEnum};
use fwbq::{GaussianMixture64, Method, RngSeed, TargetDensity64};

use crate::CliError;

/// Components of the default random mixture.
pub const DEFAULT_COMPONENTS: usize = 20;
pub const DEFAULT_DIM: usize = 2;
pub const DEFAULT_DATA_SEED: u64 = 2015;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Experiment {
    Convergence,
    PosteriorDemo,
    Rff,
    ModelSelect,
}

impl Experiment {
    pub fn as_str(self) -> &'static str {
        match self {
            Experiment::Convergence => "convergence",
            Experiment::PosteriorDemo => "posterior-demo",
            Experiment::Rff => "rff",
            Experiment::ModelSelect => "model-select",
        }
    }
}

impl fmt::Display for Experiment {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Parser)]
#[command(name = "fwbq", version, about = "Frank-Wolfe Bayesian quadrature experiments")]
pub struct Args {
    #[arg(long, value_enum, default_value_t = Experiment::Convergence)]
    pub experiment: Experiment,

    /// Comma-separated subset of MC,FW,FWLS,FWBQ,FWLSBQ,SBQ.
    #[arg(long)]
    pub methods: Option<String>,

    #[arg(long)]
    pub n_max: Option<usize>,

    /// Candidate draws per Frank-Wolfe / SBQ iteration.
    #[arg(long, default_value_t = fwbq::selector::DEFAULT_POOL_SIZE)]
    pub pool_size: usize,

    #[arg(long, default_value_t = 1)]
    pub seed: u64,

    /// Kernel amplitude.
    #[arg(long, default_value_t = 1.0)]
    pub lambda: f64,

    /// Kernel lengthscale.
    #[arg(long, default_value_t = 0.8)]
    pub sigma: f64,

    /// Random Fourier feature count (rff experiment).
    #[arg(long)]
    pub rff_d: Option<usize>,

    /// Key-value density file; default is a seeded 20-component 2-D mixture.
    #[arg(long)]
    pub density_config: Option<PathBuf>,

    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,

    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,

    /// Add wall-clock milliseconds since the start of the run to each row.
    #[arg(long)]
    pub timing: bool,

    /// Kinetics CSV for model-select (`time,yS,ySstar,yE1star,…`).
    #[arg(long)]
    pub data: Option<PathBuf>,

    /// Seed of the simulated kinetics data when `--data` is absent.
    #[arg(long, default_value_t = DEFAULT_DATA_SEED)]
    pub data_seed: u64,

    /// Enzymes in the simulated data set.
    #[arg(long, default_value_t = 10)]
    pub enzymes: usize,

    /// Propagation samples per design size (model-select).
    #[arg(long, default_value_t = 5000)]
    pub samples: usize,
}

/// Where the target density comes from.
#[derive(Debug, Clone, PartialEq)]
pub enum DensitySpec {
    /// [`GaussianMixture::random`] seeded with the run seed.
    RandomMixture { dim: usize, components: usize },
    /// Contents of a key-value density file.
    Config(String),
}

impl DensitySpec {
    pub fn build(&self, seed: RngSeed) -> Result<TargetDensity64, CliError> {
        let d = match self {
            DensitySpec::RandomMixture { dim, components } => GaussianMixture64::random(*dim, *components, seed)?.into(),
            DensitySpec::Config(text) => TargetDensity64::from_config_str(text)?,
        };
        Ok(d)
    }
}

/// Validated settings for one experiment run.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub density: DensitySpec,
    pub lambda: f64,
    pub sigma: f64,
    pub rff_d: Option<usize>,
    pub methods: Vec<Method>,
    pub n_max: usize,
    pub pool_size: usize,
    pub seed: RngSeed,
    pub out: Option<PathBuf>,
    pub format: Format,
    pub timing: bool,
    pub data: Option<PathBuf>,
    pub data_seed: RngSeed,
    pub enzymes: usize,
    pub samples: usize,
}

impl ExperimentConfig {
    /// Defaults for `experiment`, as if run with no other flags.
    pub fn new(experiment: Experiment) -> Self {
        let args = Args::parse_from(["fwbq", "--experiment", experiment.as_str()]);
        Self::from_args(&args).expect("defaults are valid")
    }

    pub fn from_args(args: &Args) -> Result<Self, CliError> {
        let methods = match &args.methods {
            Some(list) => parse_methods(list)?,
            None => default_methods(args.experiment),
        };
        let density = match &args.density_config {
            Some(path) => DensitySpec::Config(std::fs::read_to_string(path)?),
            None => DensitySpec::RandomMixture {
                dim: DEFAULT_DIM,
                components: DEFAULT_COMPONENTS,
            },
        };
        let n_max = args.n_max.unwrap_or(match args.experiment {
            Experiment::ModelSelect => 200,
            _ => 100,
        });
        let cfg = Self {
            experiment: args.experiment,
            density,
            lambda: args.lambda,
            sigma: args.sigma,
            rff_d: args.rff_d,
            methods,
            n_max,
            pool_size: args.pool_size,
            seed: RngSeed(args.seed),
            out: args.out.clone(),
            format: args.format,
            timing: args.timing,
            data: args.data.clone(),
            data_seed: RngSeed(args.data_seed),
            enzymes: args.enzymes,
            samples: args.samples,
        };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |m: String| Err(CliError::Config(m));
        if self.methods.is_empty() {
            return bad("no methods selected".into());
        }
        if self.n_max < 1 {
            return bad("--n-max must be at least 1".into());
        }
        if self.pool_size < 1 {
            return bad("--pool-size must be at least 1".into());
        }
        if !(self.lambda > 0.0 && self.lambda.is_finite()) || !(self.sigma > 0.0 && self.sigma.is_finite()) {
            return bad("--lambda and --sigma must be positive".into());
        }
        if self.rff_d == Some(0) {
            return bad("--rff-d must be positive".into());
        }
        match self.experiment {
            Experiment::Rff => {
                if self.rff_d.is_none() {
                    return bad("the rff experiment needs --rff-d".into());
                }
                if !self.methods.iter().any(|m| matches!(m, Method::FWLS | Method::FWLSBQ)) {
                    return bad("the rff experiment runs FWLS and/or FWLSBQ".into());
                }
            }
            Experiment::ModelSelect => {
                if !self.methods.iter().any(|m| m.is_bayesian()) {
                    return bad("model-select needs a Bayesian method".into());
                }
                if self.samples == 0 {
                    return bad("--samples must be positive".into());
                }
            }
            _ => {}
        }
        Ok(())
    }

    /// Method used for evidence integrals: the first Bayesian one listed.
    pub fn evidence_method(&self) -> Option<Method> {
        self.methods.iter().copied().find(|m| m.is_bayesian())
    }
}

fn default_methods(experiment: Experiment) -> Vec<Method> {
    match experiment {
        Experiment::Rff => vec![Method::FWLS, Method::FWLSBQ],
        Experiment::ModelSelect => vec![Method::FWLSBQ],
        _ => Method::ALL.to_vec(),
    }
}

/// Parses `FW,FWBQ,…`; case-insensitive, duplicates dropped.
pub fn parse_methods(list: &str) -> Result<Vec<Method>, CliError> {
    let mut out = Vec::new();
    for tok in list.split(',').map(str::trim).filter(|t| !t.is_empty()) {
        let m = Method::from_str(&tok.to_ascii_uppercase()).map_err(|e| CliError::Config(e.to_string()))?;
        if !out.contains(&m) {
            out.push(m);
        }
    }
    if out.is_empty() {
        return Err(CliError::Config("no methods selected".into()));
    }
    Ok(out)
}

/// Logarithmic design-size grid: `{1, 1.5, 2, 3, 5, 7} × 10^k` restricted to
/// integers below `n_max`, then `n_max` itself.
pub fn log_grid(n_max: usize) -> Vec<usize> {
    const MANTISSAS: [f64; 6] = [1.0, 1.5, 2.0, 3.0, 5.0, 7.0];
    let mut out = Vec::new();
    let mut decade = 1.0f64;
    'outer: loop {
        for m in MANTISSAS {
            let v = m * decade;
            if v >= n_max as f64 {
                break 'outer;
            }
            if v.fract() == 0.0 {
                out.push(v as usize);
            }
        }
        decade *= 10.0;
    }
    if n_max >= 1 {
        out.push(n_max);
    }
    out
}
