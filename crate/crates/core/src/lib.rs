//! Runtime-analysis workbench for univariate estimation-of-distribution
//! algorithms.
//!
//! The crate is organised by concern:
//!
//! - [`bitstring`]: packed search points and the OneMax / LeadingOnes /
//!   BinVal benchmark functions.
//! - [`eda`]: the UMDA with margins (and its PBIL smoothing generalisation).
//! - [`pb`]: exact Poisson–Binomial distribution and the concentration /
//!   anti-concentration checkers built on it.
//! - [`levels`]: level partitions, the level-based upper bound, the
//!   √n-spaced OneMax level sequence and the presets for each runtime result.
//! - [`verify`]: seeded randomized sweeps over the checkers.
//! - [`experiments`]: replicated-trial sweeps, bootstrap confidence
//!   intervals, growth-model fitting and CSV/JSON persistence.

pub mod bitstring;
pub mod eda;
pub mod error;
pub mod experiments;
pub mod levels;
pub mod pb;
pub mod rng;
pub mod verify;

pub use bitstring::{BitString, Fitness, Objective, Problem};
pub use eda::{AlgorithmParams, MarginalModel, Population, TrialRecord};
pub use error::{Error, Result};
pub use pb::PoissonBinomial;
