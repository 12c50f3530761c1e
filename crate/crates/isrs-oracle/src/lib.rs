//! Exact propagation of the photon–phonon Hamiltonian on a truncated Fock
//! space.
//!
//! The full Hilbert space is split into the connected components of the
//! Hamiltonian graph; each component is exponentiated densely. Expectation
//! values are taken over pure states or exact Gibbs-weighted mixtures.

mod basis;
mod error;
mod expm;
mod hamiltonian;
mod operator;
mod par;
mod propagate;
mod state;
mod study;

pub use basis::{FockBasis, FockConfig};
pub use error::OracleError;
pub use expm::{expm, lu_solve};
pub use hamiltonian::{
    analyzer_hamiltonian, build_total_hamiltonian, HamiltonianTerms, OracleSystem, PhononFactor, QuadraticTerm,
    Ref1Mode,
};
pub use operator::OperatorMatrix;
pub use propagate::{propagate, Method, Propagator};
pub use state::{apply_analyzer, expect, expect_complex, initial_state, pair_moments, phonon_moments, MixedState, Observable, PhononInit};
pub use study::{convergence_study, ObservableReport, OracleObservable, OracleReport, ReportRow, StudySetup, StudyStatus};

pub type Result<T> = std::result::Result<T, OracleError>;
