//! Entanglement circulation on qubit networks.
//!
//! Small genuinely multipartite entangled unit states are merged into larger
//! ones by two-qubit unitaries acting across unit cells, either chosen by a
//! derivative-free search over the non-local parameters `(αx, αy, αz)` or
//! generated by an XYZ spin interaction. Entanglement is scored with the
//! generalized geometric measure (GGM).
//!
//! Conventions: qubit 0 is the most significant bit of a basis index, angles
//! are radians, times are in units where ħ = 1.

pub mod canon;
pub mod closedform;
pub mod disorder;
pub mod dynamics;
pub mod ecp;
pub mod error;
pub mod ggm;
pub mod harness;
pub mod optim;
pub mod qstate;
pub mod quadrature;
pub mod rng;
pub mod table;
pub mod unitary;

pub use error::{Error, Result};
pub use ggm::{ggm_full, ggm_restricted, GgmResult};
pub use qstate::{DensityMatrix, StateVector, C64};
pub use unitary::{u_d, UnitaryParams};
