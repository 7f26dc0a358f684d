//! What is known about the existence of `p`-qubit UPBs of each size, with the
//! source of every fact.

use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::construct::{known_nonexistence, size_claims, ClaimStatus, NonexistenceRule};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Status {
    Exists,
    Impossible,
    Unknown,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub enum Provenance {
    /// One or two qubits: only the standard basis.
    Bootstrap,
    /// A completed exhaustive search.
    Computed,
    /// An explicit construction.
    Constructed,
    /// The published size table (not re-derived here).
    SizeClaim,
    Rule(NonexistenceRule),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct Fact {
    pub status: Status,
    pub provenance: Provenance,
}

/// Facts per `(p, s)`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FeasibilityTable {
    facts: BTreeMap<(usize, usize), BTreeSet<Fact>>,
}

impl FeasibilityTable {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Bootstrap facts, general nonexistence rules (`p <= 16`), simple
    /// constructions and the published table.
    pub fn standard() -> Self {
        let mut t = Self::empty();
        for p in 1..=16usize {
            let full = 1usize << p;
            if p <= 2 {
                t.add(p, full, Status::Exists, Provenance::Bootstrap);
            } else {
                t.add(p, full, Status::Exists, Provenance::Constructed);
            }
            for s in 1..full {
                if let Some(rule) = known_nonexistence(p, s) {
                    t.add(p, s, Status::Impossible, Provenance::Rule(rule));
                }
            }
            for s in (p + 1..=2 * p).filter(|s| s % 4 == 0 && *s <= full) {
                t.add(p, s, Status::Exists, Provenance::Constructed);
            }
        }
        t.add(3, 4, Status::Exists, Provenance::Constructed);
        for c in size_claims() {
            let status = match c.status {
                ClaimStatus::Exists => Status::Exists,
                ClaimStatus::Impossible => Status::Impossible,
                ClaimStatus::Unknown => Status::Unknown,
            };
            t.add(c.p, c.s, status, Provenance::SizeClaim);
        }
        t
    }

    pub fn add(&mut self, p: usize, s: usize, status: Status, provenance: Provenance) {
        self.facts.entry((p, s)).or_default().insert(Fact { status, provenance });
    }

    /// Records the outcome of an exhaustive search.
    pub fn record_search(&mut self, p: usize, s: usize, classes: usize) {
        let status = if classes > 0 { Status::Exists } else { Status::Impossible };
        self.add(p, s, status, Provenance::Computed);
    }

    pub fn facts(&self, p: usize, s: usize) -> Vec<Fact> {
        self.facts.get(&(p, s)).map(|f| f.iter().copied().collect()).unwrap_or_default()
    }

    /// Sizes with at least one existence fact.
    pub fn feasible_sizes(&self, p: usize) -> BTreeSet<usize> {
        self.facts
            .range((p, 0)..=(p, usize::MAX))
            .filter(|(_, facts)| facts.iter().any(|f| f.status == Status::Exists))
            .map(|(&(_, s), _)| s)
            .collect()
    }

    /// Nonexistence backed by a completed search or a general rule. Published
    /// claims alone do not count.
    pub fn proven_infeasible(&self, p: usize, s: usize) -> bool {
        if s == 0 {
            return true;
        }
        self.facts.get(&(p, s)).is_some_and(|facts| {
            facts.iter().any(|f| {
                f.status == Status::Impossible
                    && matches!(f.provenance, Provenance::Computed | Provenance::Rule(_))
            })
        })
    }
}

/// Sizes of known `p`-qubit UPBs under [`FeasibilityTable::standard`].
pub fn feasible_sizes(p: usize) -> BTreeSet<usize> {
    FeasibilityTable::standard().feasible_sizes(p)
}
