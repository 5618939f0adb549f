//! Statevector workbench for bipartite hardware-efficient ansatz circuits.
//!
//! The register is split into two blocks joined by boundary CZ gates on every
//! layer (`Feca`), on the middle layer only (`Seca`), or never (`NoCz`). The
//! crate builds those circuits, measures their expressibility, entangling
//! capability and gradient variance, trains them on Heisenberg and QUBO
//! Hamiltonians, and evaluates them by cutting the boundary CZs into local
//! sub-circuits.
//!
//! Numerical code is generic over [`Real`] (`f32` or `f64`); the aliases below
//! fix the double-precision types used by the command-line harness.

pub mod ansatz;
pub mod error;
pub mod gatecut;
pub mod metrics;
pub mod num;
pub mod problems;
pub mod rng;
pub mod statevec;
pub mod vqe;

pub use ansatz::{AnsatzSpec, Circuit, ConnectionScheme, Gate, IntraEntangler};
pub use error::{Error, Result};
pub use num::{Amplitude, Real};
pub use statevec::{Axis, Pauli};

pub type StateVector = statevec::StateVector<f64>;
pub type PauliString = statevec::PauliString<f64>;
pub type PauliObservable = statevec::PauliObservable<f64>;
pub type QuboInstance = problems::QuboInstance<f64>;
pub type IsingForm = problems::IsingForm<f64>;
pub type HeisenbergSpec = problems::HeisenbergSpec<f64>;
pub type TrainTrace = vqe::TrainTrace<f64>;
pub type RepeatStats = vqe::RepeatStats<f64>;

pub type StateVector32 = statevec::StateVector<f32>;
pub type PauliObservable32 = statevec::PauliObservable<f32>;
