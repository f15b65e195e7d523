//! Pulse-sequence compiler and simulator for superpositions of Dicke states of
//! `N` coupled quantum dots driven by a laser.
//!
//! [`synthesis::synthesize`] turns target Dicke amplitudes into at most `N`
//! resonant pulses. [`propagation`] replays a schedule under the two-level
//! effective Hamiltonian or the full one, and [`fullspace`] cross-checks the
//! Dicke-basis operators against their `2^N`-dimensional product-space form.

pub mod cli;
pub mod dicke;
pub mod error;
pub mod files;
pub mod fullspace;
pub mod hamiltonian;
pub mod linalg;
pub mod propagation;
pub mod synthesis;

pub use dicke::{DickeState, SystemParams};
pub use error::{Error, Result};
pub use hamiltonian::PulseSpec;
pub use propagation::{Mode, SimulationRecord};
pub use synthesis::{PulseSequence, Synthesis};
