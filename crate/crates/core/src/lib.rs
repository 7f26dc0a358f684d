//! Combinatorial tools for unextendible product bases of qubits.
//!
//! A product basis is handled through its orthogonality graph
//! ([`graph::OrthogonalityGraph`]); unextendibility, equivalence and the
//! exhaustive search all work on that combinatorial object.

pub mod bits;
pub mod canon;
pub mod catalog;
pub mod checker;
pub mod construct;
pub mod fixtures;
pub mod graph;
pub mod notation;
pub mod search;

pub use graph::{OrthogonalityGraph, QubitFactorization, SizeProfile, SymbolicProductBasis};
