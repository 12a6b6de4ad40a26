//! Semismooth Newton for frictional fracture contact with constraint-based line search.
//!
//! Everything numeric is generic over [`Real`] (`f32` or `f64`); the aliases below fix the
//! scalar to `f64`, which is what the benchmark harness uses.

// Negated comparisons reject NaN on purpose; indexed loops mirror the component formulas.
#![allow(clippy::neg_cmp_op_on_partial_ord, clippy::needless_range_loop)]

pub mod contact;
pub mod error;
pub mod indicators;
pub mod interpolation;
pub mod linalg;
pub mod line_search;
pub mod model;
pub mod newton;
pub mod scalar;
pub mod scaling;
pub mod solution;

pub use error::{Error, Result};
pub use scalar::Real;

pub type CellState = contact::CellContactState<f64>;
pub type Contact = contact::ContactParameters<f64>;
pub type Indicators = indicators::IndicatorField<f64>;
pub type Spline = interpolation::MonotoneCubic<f64>;
pub type SearchConfig = line_search::LineSearchConfig<f64>;
pub type SearchOutcome = line_search::LineSearchOutcome<f64>;
pub type Matrix = linalg::DenseMatrix<f64>;
pub type Assembly = model::FractureAssembly<f64>;
pub type SolverConfig = newton::NewtonConfig<f64>;
pub type Report = newton::NewtonReport<f64>;
pub type Scales = scaling::CharacteristicScales<f64>;
pub type Solution = solution::SolutionVector<f64>;
