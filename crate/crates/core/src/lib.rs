//! Entanglement lower bounds from entropic uncertainty relations.
//!
//! Each bound has the form `q - H(X_A|X'_B) - H(Z_A|Z'_B)` and lower-bounds the
//! distillable entanglement `-H(A|B)` from two measurement distributions.

pub mod bounds;
pub mod entropy;
pub mod error;
pub mod hubbard;
pub mod measurement;
pub mod optim;
pub mod qmath;
pub mod spin1;
pub mod table;
pub mod verify;

pub use entropy::{Divergence, JointDistribution};
pub use error::{Error, Result};
pub use measurement::{Measurement, MeasurementKind, OverlapMatrix, Outcome};
pub use qmath::{CMatrix, CVector, DensityOperator, PureStateVector, SchmidtDecomposition, C64};
pub use bounds::{BoundReport, ConservedQuantity, Orientation, RelationKind};
pub use table::{Cell, Table};
