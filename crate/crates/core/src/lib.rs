//! Entanglement sudden death of two independent qubits, each coupled to its
//! own zero-temperature Markovian bath through a general coupling
//! `λ = u + i v`.
//!
//! The crate is organised bottom-up:
//!
//! * [`linalg`]: fixed-size complex matrices and a Jacobi Hermitian eigensolver.
//! * [`channel`]: coupling classification, closed-form Bloch dynamics, flip
//!   Kraus operators and the named coupling families.
//! * [`choi`]: Choi matrices of the single-qubit channels and Kraus extraction.
//! * [`pair`]: two-qubit evolution and Wootters concurrence.
//! * [`sde`]: sudden-death predicates, `Λ∞` closed forms, death-time
//!   detection and an RK4 reference integrator.
//! * [`census`]: Monte Carlo census of the coupling space.
//! * [`cli`]: configuration, command implementations and file output.

pub mod census;
pub mod channel;
pub mod choi;
pub mod cli;
pub mod error;
pub mod linalg;
pub mod pair;
pub mod sde;

pub use channel::{BlochVector, Coupling, CouplingClass, Dissipative, Vec3};
pub use choi::{ChoiMatrix, KrausSet};
pub use error::{Error, Result};
pub use pair::{ConcurrenceResult, DensityMatrix4, InitialKind, TimeGrid, TrajectoryPoint};
pub use sde::{Method, Prediction, SdeVerdict};
