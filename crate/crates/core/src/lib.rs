//! Moments of strongly diluted Wigner random matrices.
//!
//! [`series`] solves the moment generating function exactly, [`walks`]
//! re-derives the same coefficients by enumerating closed walks and also
//! gives exact finite-`n` moments, [`combinatorics`] holds the Catalan-type
//! closed forms, and [`montecarlo`] samples the ensemble itself.

pub mod cli;
pub mod combinatorics;
pub mod error;
pub mod montecarlo;
pub mod rational;
pub mod report;
pub mod series;
pub mod walks;

pub use error::{Error, Result};
pub use rational::Rational;
