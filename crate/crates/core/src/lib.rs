//! Spherical point-process models and matching distances between them.
//!
//! - [`sphere`]: coordinates, the chord metric, point configurations and
//!   their CSV / JSON form.
//! - [`generators`]: homogeneous and non-homogeneous binomial point
//!   processes, Fibonacci lattices and orbit shells.
//! - [`tammes`]: contact / nearest-neighbour angle laws and the packing
//!   distance approximation.
//! - [`matching`]: exact and greedy one-to-one matchings.
//! - [`experiments`]: seeded Monte Carlo sweeps and presets.
//! - [`config`]: TOML experiment files.
//! - [`cli`]: the `spherical-pp` command-line tool.

pub mod cli;
pub mod config;
pub mod error;
pub mod experiments;
pub mod generators;
pub mod matching;
pub mod rng;
pub mod sphere;
pub mod stats;
pub mod tammes;

pub use error::{Error, Result};
