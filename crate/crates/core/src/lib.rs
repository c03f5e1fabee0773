//! Twisted pseudo-differential calculus on finite and nilpotent Lie groups.

pub mod cohomology;
pub mod config;
pub mod crossed;
pub mod cyclic;
pub mod dual;
pub mod error;
pub mod fields;
pub mod geometry;
pub mod grid;
pub mod group;
pub mod opcalc;
pub mod quadrature;
pub mod report;
pub mod scalar;
pub mod verify;

pub use error::{Error, Result};

use dual::C64;

/// Complex number with real and imaginary parts uniform in [−1, 1).
pub fn random_c64(rng: &mut impl rand::Rng) -> C64 {
    C64::new(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
}
