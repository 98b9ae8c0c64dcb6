//! Entropic quantities of multipartite pure states and the optimal
//! qubit/ebit costs of quantum state redistribution.

pub mod decouple;
pub mod entropy;
pub mod error;
pub mod linalg;
pub mod statespec;
pub mod tasks;
pub mod verify;

pub use entropy::{EntropyReport, QuantumState, Role, RolePartition};
pub use error::{Error, Result};
pub use linalg::{DensityMatrix, Spectrum, StateVector};
pub use tasks::{CostPair, CostRegion, MergingCosts};
