//! Kernel quadrature with a probabilistic error model.
//!
//! Design points are chosen by Frank-Wolfe (fixed or line-search steps),
//! sequential Bayesian quadrature, or plain Monte Carlo. Weighting them with
//! Bayesian-quadrature weights gives a Gaussian posterior over the integral
//! whose variance equals the squared maximum mean discrepancy of the rule.
//!
//! The numeric code is generic over [`Scalar`] (`f32` or `f64`); the aliases
//! below fix the usual `f64` instantiation. The [`evidence`] module is `f64`
//! only.
//!
//! ```
//! use fwbq::{EqKernel, GaussianMixture, RngSeed, SelectionConfig};
//! use fwbq::{mean_element, quadrature, selector};
//!
//! let p = GaussianMixture::random(2, 4, RngSeed(1)).unwrap();
//! let k = EqKernel::new(1.0, 0.8, 2).unwrap();
//! let mu = mean_element::mixture_eq_mean_element(&p, &k).unwrap();
//! let (p, k) = (p.into(), k.into());
//! let cfg = SelectionConfig::new(10, RngSeed(7)).with_pool_size(500);
//! let trace = selector::fw_select(&p, &k, &mu, &cfg).unwrap();
//! let rule = trace.bq_rule(&k, &mu).unwrap();
//! let mmd2 = quadrature::mmd_squared(&rule, &k, &mu).unwrap();
//! assert!(mmd2 < mu.initial_error());
//! ```

pub mod density;
pub mod error;
pub mod evidence;
pub mod integrate;
pub mod kernel;
pub mod linalg;
pub mod mean_element;
pub mod quadrature;
pub mod rng;
pub mod scalar;
pub mod selector;

pub use density::{GaussianMixture, TargetDensity, TruncatedGaussian};
pub use error::{Error, Result};
pub use kernel::{EqKernel, Kernel, RffKernel};
pub use mean_element::MeanElement;
pub use quadrature::{IntegralPosterior, Method, QuadratureRule};
pub use rng::RngSeed;
pub use scalar::Scalar;
pub use selector::{InitRule, SelectionConfig, SelectionTrace, StepRule};

pub type Kernel64 = kernel::Kernel<f64>;
pub type EqKernel64 = kernel::EqKernel<f64>;
pub type RffKernel64 = kernel::RffKernel<f64>;
pub type TargetDensity64 = density::TargetDensity<f64>;
pub type GaussianMixture64 = density::GaussianMixture<f64>;
pub type MeanElement64 = mean_element::MeanElement<f64>;
pub type QuadratureRule64 = quadrature::QuadratureRule<f64>;
pub type IntegralPosterior64 = quadrature::IntegralPosterior<f64>;
pub type SelectionConfig64 = selector::SelectionConfig<f64>;
pub type SelectionTrace64 = selector::SelectionTrace<f64>;
pub type Matrix64 = linalg::Matrix<f64>;

pub type Kernel32 = kernel::Kernel<f32>;
pub type TargetDensity32 = density::TargetDensity<f32>;
pub type MeanElement32 = mean_element::MeanElement<f32>;
pub type QuadratureRule32 = quadrature::QuadratureRule<f32>;
