//! Compatibility of quantum state assignments.
//!
//! Several observers holding different, reliable information about one
//! system may assign it different density matrices. Such assignments are
//! mutually compatible exactly when their supports intersect nontrivially.
//! This crate decides that criterion for any number of observers, reports
//! the Peierls commutation and non-orthogonality criteria next to it, checks
//! candidate pooled states against the observers' null spaces, and for two
//! observers builds an explicit tripartite state whose ancilla measurements
//! reproduce both assignments.
//!
//! Module layout:
//!
//! - [`linalg`]: dense complex matrices, Hermitian eigendecomposition,
//!   support/null spaces and subspace intersection.
//! - [`states`]: validated density matrices, pure states, ensembles, tensor
//!   products, partial traces and projective measurement.
//! - [`compat`]: the compatibility decisions.
//! - [`witness`]: shared decompositions, the witness state and the
//!   measurement protocol.
//! - [`io`] and [`cli`]: file formats and the `qcompat` command.

#![forbid(unsafe_code)]

pub mod cli;
pub mod compat;
pub mod io;
pub mod linalg;
pub mod sample;
pub mod states;
pub mod witness;

pub use compat::{check_bfm, check_pi, check_pii, check_pure_pair, verify_joint, CompatReport};
pub use linalg::{ComplexMatrix, Subspace, Tolerances};
pub use states::{validate_density, DensityMatrix, Ensemble, PureState};
pub use witness::{
    build_shared_decomposition, build_witness, simulate_protocol, SharedDecomposition, WitnessState,
};
