//! Statistical analysis of heavy-tailed high-frequency return series.
//!
//! The crate covers the whole workflow of studying how the distribution of
//! index fluctuations changes with the sampling scale:
//!
//! - [`stable`]: stable laws by Fourier inversion, sampling and tail laws.
//! - [`tlf`]: truncated Levy flights (hard cutoff and exponential cutoff).
//! - [`returns`]: de-duplication, log returns, aggregation, moments.
//! - [`io`]: CSV ingestion of ticks, daily closes and returns.
//! - [`estimation`]: maximum-likelihood stable fits and Kolmogorov-Smirnov tests.
//! - [`crossover`]: alpha and kurtosis trajectories, crossover detection and
//!   truncation experiments.
//! - [`autocorr`]: autocorrelation of returns and absolute returns.
//! - [`cli`]: the batch runner behind the `hfstable` binary.
//!
//! Runnable walkthroughs live in the crate's `examples/` directory.

pub mod autocorr;
pub mod cli;
pub mod crossover;
pub mod error;
pub mod estimation;
pub mod io;
pub mod returns;
pub mod seed;
pub mod stable;
pub mod synthetic;
pub mod tlf;

pub use error::{Error, Result};
pub use stable::{StableDensity, StableParams};
