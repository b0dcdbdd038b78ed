//! Hitting probabilities, parity of hitting times and ruin probabilities for
//! left-continuous (skip-free to the left) random walks on the integers.
//!
//! The numerical core is generic over [`Scalar`] (`f32` or `f64`); the
//! aliases at the crate root fix it to `f64`, which is what the command line
//! tool and the reports use.

pub mod analytic;
pub mod chains;
pub mod cli;
pub mod distributions;
pub mod error;
pub mod montecarlo;
pub mod oracle;
pub mod roots;
pub mod scalar;

pub use error::{Error, ErrorClass, Result};
pub use scalar::Scalar;

pub type IncrementDistribution = distributions::IncrementDistribution<f64>;
pub type OffspringDistribution = distributions::OffspringDistribution<f64>;
pub type WalkSummary = analytic::WalkSummary<f64>;
pub type ParityProbabilities = chains::ParityProbabilities<f64>;
pub type AbsorbingChainSpec = chains::AbsorbingChainSpec<f64>;
pub type LatticePmf = oracle::LatticePmf<f64>;
pub type SeriesBracket = oracle::SeriesBracket<f64>;

pub type IncrementDistributionF32 = distributions::IncrementDistribution<f32>;
pub type WalkSummaryF32 = analytic::WalkSummary<f32>;

pub use analytic::{extinction_probability, summarize};
pub use chains::{prob_negative_parity, separable_ruin};
pub use distributions::DistributionSpec;
pub use montecarlo::{simulate_ruin, simulate_summary, Quantity, SimulationConfig, SimulationEstimate};
