//! Explicit constructions and the size theory of qubit UPBs.

mod combine;
mod factor;
mod sizes;

pub use combine::{
    combine, combine_bases, combine_variants, combine_with_sharing, restrict, uncombine, BasisSharing,
    Identification,
};
pub use factor::{build_multiple_of_four, one_factorization, split_qubit, Factorization1};
pub use sizes::{
    attainable_sizes, bound_comparison, known_nonexistence, size_claims, ClaimStatus,
    NonexistenceRule, SizeClaim, SizeCatalog, SizeSource,
};

use thiserror::Error;

use crate::graph::{Symbol, SymbolicProductBasis};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum ConstructError {
    #[error("input {which} is not a UPB")]
    NotAUpb { which: usize },
    #[error("dimension mismatch: {p1} qubits vs {p2} qubits")]
    DimensionMismatch { p1: usize, p2: usize },
    #[error("inconsistent basis sharing on qubit {qubit}: {reason}")]
    InconsistentSharing { qubit: usize, reason: String },
    #[error("1-factorizations need an even number of vertices, got {n}")]
    OddOrder { n: usize },
    #[error("qubit {qubit} is not splittable: component {component:?} is not K(2,2)")]
    NotSplittable {
        qubit: usize,
        component: (usize, usize),
    },
    #[error("no construction route for p={p}, s={s}")]
    Unsupported { p: usize, s: usize },
    #[error("bad arguments: {0}")]
    BadArguments(String),
    #[error("construction produced a graph that is not a UPB (p={p}, s={s})")]
    VerificationFailed { p: usize, s: usize },
}

/// Smallest size of a nontrivial `p`-qubit UPB (the standard basis when
/// `p <= 2`).
pub fn min_size(p: usize) -> usize {
    assert!(p >= 1, "min_size needs p >= 1");
    if p % 2 == 1 {
        p + 1
    } else if p == 4 || p % 4 == 2 {
        p + 2
    } else if p == 8 {
        p + 3
    } else {
        p + 4
    }
}

/// The four-state, three-qubit UPB `000, 1aA, A1a, aA1`.
pub fn shifts() -> SymbolicProductBasis {
    crate::notation::parse_basis(crate::fixtures::SHIFTS).expect("fixture parses")
}

/// All `2^p` computational basis states, in binary counting order.
pub fn standard_basis(p: usize) -> SymbolicProductBasis {
    assert!(p >= 1 && p < usize::BITS as usize, "standard_basis needs 1 <= p < 64");
    let states = (0..1usize << p)
        .map(|i| {
            (0..p)
                .map(|q| Symbol::new(b'0', (i >> (p - 1 - q)) & 1 == 1))
                .collect()
        })
        .collect();
    SymbolicProductBasis::new(states).expect("rectangular")
}
