//! Exact construction and analysis of the principal series of SL(2,R), its
//! completely reducible deformation, and the alternate algebraic family, on
//! finite weight windows.

pub mod cli;
pub mod deform;
pub mod error;
pub mod families;
pub mod hermitian;
pub mod scalar;
pub mod structure;
pub mod toy;

pub use error::{Error, Result};
pub use families::{FamilyKind, FamilySpec, OperatorTriple, Parity, WeightOperator, WeightWindow};
pub use scalar::{CRat, NuParameter, RadicalScalar, Rat, Scalar};
