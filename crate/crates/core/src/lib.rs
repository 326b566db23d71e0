//! Exact symbolic workbench for formal deformations of fibered polynomial
//! models and for differential Hochschild cohomology via Koszul resolutions.
//!
//! Everything is computed over Gaussian rationals with sparse polynomials
//! standing in for smooth functions, so every identity is checked exactly.

#![allow(clippy::needless_range_loop)]

pub mod cohomology;
pub mod deformation;
pub mod diffop;
pub mod error;
pub mod hochschild;
pub mod koszul;
pub mod linalg;
pub mod multidiff;
mod parse;
pub mod poly;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod series;
pub mod star;
pub mod suite;

pub use diffop::{DiffOp, Projection};
pub use error::{Error, Result};
pub use multidiff::{ModuleValue, MultiDiffOp};
pub use poly::{MultiIndex, Polynomial, Space};
pub use scalar::Scalar;
pub use series::FormalSeries;
pub use star::{EquivalenceOp, PoissonStructure, StarProduct};
