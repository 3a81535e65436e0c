//! Density-of-states toolkit built on free probability: closed-form spectral
//! measures and transforms, free additive convolution by subordination,
//! perturbative Cauchy-transform series, free compression, and the random
//! matrix ensembles that validate the analytics.

pub mod convolution;
pub mod error;
pub mod jet;
pub mod perturbation;
pub mod quad;
pub mod special;
pub mod transforms;

pub use error::{Error, Result};
