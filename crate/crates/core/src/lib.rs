//! Finite-cutoff toolkit for the renormalized Phi^4_2 measure on the torus at
//! low temperature: Wick constants, renormalized determinants, Gaussian
//! reweighting and Langevin samplers, and the coefficients of the
//! low-temperature expansion.

pub mod determinant;
pub mod error;
pub mod expansion;
pub mod field;
pub mod harness;
pub mod observable;
pub mod renorm;
pub mod sampler;
pub mod series;
pub mod stats;

pub use error::{Error, Result};

/// Shortest round-trip formatting with 17 significant digits.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}
