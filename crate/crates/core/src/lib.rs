//! Exact Zariski decompositions of anti-canonical cycles, birational surgery
//! on them, and the algebraic-dimension decision procedure for twistor
//! spaces whose fundamental system is a pencil.
//!
//! The linear algebra is generic over the scalar type (see [`scalar`]); the
//! aliases below fix it to arbitrary-precision rationals, which is what the
//! rest of the crate and the command-line tool use.

pub mod birational;
pub mod cli;
pub mod config;
pub mod cycles;
pub mod fixtures;
pub mod pic0;
pub mod qform;
pub mod report;
pub mod scalar;
pub mod twistor;

pub type Rational = num_rational::BigRational;
pub type QDivisor = cycles::Divisor<Rational>;
pub type ZariskiDecomposition = cycles::Decomposition<Rational>;
pub type DefinitenessReport = qform::Definiteness<Rational>;

pub use cycles::{zariski_decompose, zariski_oracle, CycleConfig};
pub use twistor::{algebraic_dimension, TwistorPencil, Verdict};
