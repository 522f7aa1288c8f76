//! Relative-error conditioning of linear constant-coefficient ODEs
//! `y' = A y`, `y(0) = y0`.
//!
//! The crate computes the condition numbers of the map `y0 -> e^{tA} y0`,
//! their long-time limits from the rightmost eigenstructure, bounds on when
//! those limits take over, and seeded Monte-Carlo studies of all of these.

pub mod asymptotic;
pub mod cli;
pub mod condition;
pub mod error;
pub mod experiments;
pub mod linalg;
pub mod models;
pub mod onset;
pub mod spectrum;

pub use error::{Error, Result};
pub use linalg::{CMatrix, CVector, NormKind};
