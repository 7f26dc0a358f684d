//! Exhaustive classification of UPBs with a given qubit count and size.
//!
//! Three stages: enumerate candidate component-size profiles and discard
//! those ruled out by necessary conditions, search each surviving profile for
//! placements that are UPBs, and group the results into equivalence classes.

mod feasible;
mod place;
mod profiles;
mod run;

pub use feasible::{feasible_sizes, Fact, FeasibilityTable, Provenance, Status};
pub use place::{search_profile, search_profile_with, PlacementResult, PlacementStats, MAX_STATES};
pub use profiles::{
    candidate_profiles, enumerate_profiles, enumerate_profiles_with_counts, greedy_chain,
    prune_reverse_combine, prune_search_reduce, qubit_types, type_histogram, water_level,
    ConstraintSet, ProfileConstraints, ProfileCounts, ProfileEnumeration, PruneDecision,
    PruneReason,
};
pub use run::{full_search, unit_id, SearchError, SearchOptions, SearchOutcome, SearchReport, UnitLog};
