//! Exact construction and verification of mutually unbiased bases, the
//! finite-geometry "line state" basis of two qudits, and the Mean King
//! retrodiction protocols built on it.
//!
//! Every amplitude is an exact element of `Z[ω]/√d^s` (see [`arith`]), so
//! the identities checked here hold with equality, not to a tolerance.

pub mod arith;
pub mod collective;
pub mod error;
pub mod geometry;
pub mod hilbert;
pub mod mes;
pub mod protocols;
pub mod mub;
pub mod report;
pub mod verify;

pub use arith::{half, mod_inv, CycInt, CycNum, Dimension, ModInt};
pub use error::{Error, Result};
pub use geometry::{Line, Point};
pub use hilbert::{Ket, Labeling, PairKet};
pub use mub::{mub_state, tilde, BasisLabel, MubLabel};
pub use report::{CheckOutcome, SuiteReport};
pub use mes::{line_state, point_state, royal_state, MesBasis};
pub use protocols::{BasisPolicy, Scenario, SimConfig, SimReport};
pub use verify::{run_suite, Suite};
