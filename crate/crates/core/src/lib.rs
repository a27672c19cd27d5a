//! Set partition modulation for OFDM: counting and enumeration of set
//! partitions, disjoint constellation families, index codebooks, clique-based
//! codebook selection, a Monte-Carlo link simulator and union-bound analysis.
//!
//! Numeric code is generic over [`scalar::Real`] (`f32` or `f64`); the
//! aliases below fix it to `f64`.

pub mod analysis;
pub mod codebook;
pub mod combinatorics;
pub mod constellations;
pub mod error;
pub mod rng;
pub mod scalar;
pub mod selection;
pub mod simulation;

pub use error::{Error, Result};

pub type Complex64 = num_complex::Complex<f64>;
pub type Constellation = constellations::Constellation<f64>;
pub type Family = constellations::ConstellationFamily<f64>;
pub type Scheme = codebook::Scheme<f64>;
pub type FullCodeword = codebook::FullCodeword<f64>;
pub type Detector = simulation::Detector<f64>;

pub type Family32 = constellations::ConstellationFamily<f32>;
pub type Scheme32 = codebook::Scheme<f32>;
