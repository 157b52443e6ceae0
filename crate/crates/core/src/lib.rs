//! Conditional hole burning in the excitation-number distribution of a
//! nanomechanical resonator coupled to a charge qubit.
//!
//! The resonator starts in a coherent state and interacts with a stream
//! of freshly prepared ground-state qubits under the resonant
//! Jaynes-Cummings coupling. Post-selecting each qubit detection shapes
//! the resonator's number distribution: ground detections burn holes at
//! chosen levels, excited detections climb the number ladder and prepare
//! low Fock states.
//!
//! Layout:
//!
//! - [`fock`]: truncated number-basis states and distributions
//! - [`jc`]: exact blockwise propagation and projective qubit measurement
//! - [`protocol`]: schedules, sequential execution, closed forms, and the
//!   two Fock-preparation strategies
//! - [`device`]: physical parameters to effective coupling, plus
//!   coherence budgets
//!
//! All values are immutable after construction and all operations are
//! pure functions, so everything here is safe to evaluate in parallel.

pub mod device;
pub mod error;
pub mod fock;
pub mod jc;
pub mod protocol;

pub use error::{Error, Result};
pub use fock::{FockVector, NumberDistribution};
pub use jc::{CouplingParams, JointState, QubitOutcome};
pub use protocol::{ProtocolResult, Schedule, ScheduleStep};
