//! Stable laws: characteristic function, numerical density and
//! distribution function, sampling, and power-law tails.

mod density;
mod kernel;
mod params;
pub mod quadrature;
mod sampling;
mod series;
pub(crate) mod table;

pub(crate) use density::validate_abscissae;
pub use density::{
    cdf, pdf, tail_density, DensityGrid, QuadratureOptions, StableDensity, StandardStable,
};
pub use params::{char_fn, StableParams};
pub use sampling::{sample, sample_with};
