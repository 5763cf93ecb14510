//! Extremal generalized eigenpairs of symmetric tensors and high-order
//! trust-region subproblems, solved by a Dinkelbach outer loop around a
//! proximal alternating minimization (PAM) inner solver.

pub mod cli;
pub mod dinkelbach;
pub mod eigen;
pub mod error;
pub mod pam;
pub mod tensor;
pub mod trust_region;
pub mod verify;

pub use error::{Error, Result};
pub use tensor::{axpy, BOperator, MultilinearForm, ShiftedOperator, SymTensor};
