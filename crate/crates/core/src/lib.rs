//! Depth reduction for arithmetic circuits.
//!
//! The crate provides a circuit IR, an exact polynomial oracle, arithmetic
//! branching programs and a chain of verified transformations: subtraction
//! elimination, addition collapsing, homogenization, weakly skew circuits,
//! branching programs, depth-4 and depth-2Δ circuits, log-depth matrix
//! powering and polylog-depth circuits.

mod bigstr;
pub mod abp;
pub mod circuit;
pub mod corpus;
pub mod passes;
pub mod poly;
pub mod report;

pub use circuit::{Circuit, CircuitBuilder, CircuitError, Gate, GateId, GateKind};
