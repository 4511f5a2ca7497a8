//! Numerical core for Stepanov almost automorphic signals and the mild
//! solutions of semilinear heat equations on an interval.
//!
//! The crate is `no_std` (it needs `alloc`). Everything here is pure and
//! deterministic: file formats, configuration and the command line live in
//! the `aalab` companion crate.
//!
//! Layout:
//!
//! * [`aa_signals`]: signals on the real line, the bump trains that build
//!   the unbounded Stepanov almost automorphic example, windowed `L^p`
//!   norms, Bochner transforms and translation-ladder tests.
//! * [`spectral_heat`]: the Dirichlet Laplacian in sine form, fields on the
//!   interval grid and the heat semigroup.
//! * [`mild_solver`]: variation-of-constants stepping with per-step Picard
//!   iteration, blow-up detection and translation extension.
//! * [`compactness_lab`]: ε-net covers, energy laws and subvariant
//!   functionals evaluated on trajectories.
#![no_std]
// `!(x > 0.0)` is used on purpose so that NaN fails validation.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

extern crate alloc;

#[cfg(test)]
extern crate std;

pub mod aa_signals;
pub mod compactness_lab;
mod error;
pub mod mild_solver;
pub mod quadrature;
pub mod spectral_heat;

pub use error::{Error, Result};

/// Crate version, recorded in run manifests.
pub const VERSION: &str = env!("CARGO_PKG_VERSION");
