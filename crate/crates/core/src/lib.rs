//! Certified partial-transpose bounds on local minimum-error discrimination
//! of multi-party quantum states, and the multi-player data-hiding scheme
//! built on them.
//!
//! Numeric code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the common double-precision instantiations.

pub mod discrimination;
pub mod ensembles;
pub mod error;
pub mod folding;
pub mod hiding;
pub mod io;
pub mod partitions;
pub mod scalar;
pub mod tensor;

pub use error::{Error, Result};
pub use scalar::Real;

pub type Matrix = tensor::ComplexMatrix<f64>;
pub type MatrixF32 = tensor::ComplexMatrix<f32>;
pub type Operator = tensor::MultiPartyOperator<f64>;
pub type OperatorF32 = tensor::MultiPartyOperator<f32>;
pub type EnsembleF64 = ensembles::Ensemble<f64>;
pub type EnsembleF32 = ensembles::Ensemble<f32>;
pub type Solution = discrimination::DiscriminationResult<f64>;
pub type SolutionF32 = discrimination::DiscriminationResult<f32>;
