//! Which sizes of `p`-qubit UPBs exist, are ruled out, or are open.

use std::fmt;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};

use super::{min_size, ConstructError};

/// Sorted, disjoint, non-adjacent closed intervals of sizes.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct IntervalSet {
    intervals: Vec<(usize, usize)>,
}

impl IntervalSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn from_intervals(items: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut v: Vec<(usize, usize)> = items.into_iter().filter(|(a, b)| a <= b).collect();
        v.sort_unstable();
        let mut out: Vec<(usize, usize)> = Vec::with_capacity(v.len());
        for (a, b) in v {
            match out.last_mut() {
                Some(last) if a <= last.1.saturating_add(1) => last.1 = last.1.max(b),
                _ => out.push((a, b)),
            }
        }
        IntervalSet { intervals: out }
    }

    pub fn from_values(values: impl IntoIterator<Item = usize>) -> Self {
        Self::from_intervals(values.into_iter().map(|v| (v, v)))
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn contains(&self, x: usize) -> bool {
        let i = self.intervals.partition_point(|&(_, b)| b < x);
        self.intervals.get(i).is_some_and(|&(a, _)| a <= x)
    }

    pub fn len(&self) -> usize {
        self.intervals.iter().map(|(a, b)| b - a + 1).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.intervals.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.intervals.iter().flat_map(|&(a, b)| a..=b)
    }

    pub fn union(&self, other: &IntervalSet) -> IntervalSet {
        Self::from_intervals(self.intervals.iter().chain(&other.intervals).copied())
    }

    pub fn intersection(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        let (mut i, mut j) = (0, 0);
        while i < self.intervals.len() && j < other.intervals.len() {
            let (a, b) = self.intervals[i];
            let (c, d) = other.intervals[j];
            let (lo, hi) = (a.max(c), b.min(d));
            if lo <= hi {
                out.push((lo, hi));
            }
            if b < d {
                i += 1;
            } else {
                j += 1;
            }
        }
        Self::from_intervals(out)
    }

    /// `self \ other`.
    pub fn difference(&self, other: &IntervalSet) -> IntervalSet {
        let mut out = Vec::new();
        for &(a, b) in &self.intervals {
            let mut start = a;
            for &(c, d) in &other.intervals {
                if d < start || c > b {
                    continue;
                }
                if c > start {
                    out.push((start, c - 1));
                }
                start = d.saturating_add(1);
                if start > b {
                    break;
                }
            }
            if start <= b {
                out.push((start, b));
            }
        }
        Self::from_intervals(out)
    }

    /// `{x + y : x, y in self}`.
    pub fn sumset(&self) -> IntervalSet {
        let mut out = Vec::new();
        for (i, &(a, b)) in self.intervals.iter().enumerate() {
            for &(c, d) in &self.intervals[i..] {
                out.push((a + c, b + d));
            }
        }
        Self::from_intervals(out)
    }
}

impl fmt::Display for IntervalSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .intervals
            .iter()
            .map(|&(a, b)| if a == b { a.to_string() } else { format!("{a}-{b}") })
            .collect();
        write!(f, "{{{}}}", parts.join(", "))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum NonexistenceRule {
    /// One or two qubits: only the full standard basis is unextendible.
    TooSmallTrivial,
    /// Below the minimum size `f(p)`.
    BelowMinimum,
    /// Strictly between `2^p - 4` and `2^p`.
    NearMaximal,
    /// `p` odd and `s = p + 2`.
    OddPPlus2,
}

impl fmt::Display for NonexistenceRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let name = match self {
            NonexistenceRule::TooSmallTrivial => "TooSmallTrivial",
            NonexistenceRule::BelowMinimum => "BelowMinimum",
            NonexistenceRule::NearMaximal => "NearMaximal",
            NonexistenceRule::OddPPlus2 => "OddPPlus2",
        };
        f.write_str(name)
    }
}

/// The general nonexistence rule that excludes `(p, s)`, if any.
pub fn known_nonexistence(p: usize, s: usize) -> Option<NonexistenceRule> {
    let full = if p < usize::BITS as usize { 1usize << p } else { usize::MAX };
    if p <= 2 && s < full {
        Some(NonexistenceRule::TooSmallTrivial)
    } else if s < min_size(p) {
        Some(NonexistenceRule::BelowMinimum)
    } else if s < full && s > full - 4 {
        Some(NonexistenceRule::NearMaximal)
    } else if p % 2 == 1 && s == p + 2 {
        Some(NonexistenceRule::OddPPlus2)
    } else {
        None
    }
}

fn rule_set(p: usize, rule: NonexistenceRule) -> IntervalSet {
    let full = 1usize << p;
    match rule {
        NonexistenceRule::TooSmallTrivial if p <= 2 => IntervalSet::from_intervals([(1, full - 1)]),
        NonexistenceRule::TooSmallTrivial => IntervalSet::new(),
        NonexistenceRule::BelowMinimum => IntervalSet::from_intervals([(1, min_size(p) - 1)]),
        NonexistenceRule::NearMaximal => IntervalSet::from_intervals([(full.saturating_sub(3).max(1), full - 1)]),
        NonexistenceRule::OddPPlus2 if p % 2 == 1 && p + 2 <= full => IntervalSet::from_values([p + 2]),
        NonexistenceRule::OddPPlus2 => IntervalSet::new(),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ClaimStatus {
    Exists,
    Impossible,
    Unknown,
}

/// One published cell of the small-`p` size table.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SizeClaim {
    pub p: usize,
    pub s: usize,
    pub status: ClaimStatus,
    pub source: String,
}

const CLAIMS_DATA: &str = include_str!("../../data/size-claims.jsonl");

/// Published size facts for `p <= 7`, loaded from the bundled data file.
pub fn size_claims() -> &'static [SizeClaim] {
    static CLAIMS: OnceLock<Vec<SizeClaim>> = OnceLock::new();
    CLAIMS.get_or_init(|| {
        CLAIMS_DATA
            .lines()
            .filter(|l| !l.trim().is_empty())
            .map(|l| serde_json::from_str(l).expect("bundled claims data is well formed"))
            .collect()
    })
}

fn claims_with(p: usize, status: ClaimStatus) -> IntervalSet {
    IntervalSet::from_values(
        size_claims()
            .iter()
            .filter(|c| c.p == p && c.status == status)
            .map(|c| c.s),
    )
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum SizeSource {
    SizeClaim,
    StandardBasis,
    /// Multiples of four in `[p + 1, 2p]` built directly.
    MultipleOfFour,
    /// Sums of two attainable `(p-1)`-qubit sizes.
    CombineClosure,
    Rule(NonexistenceRule),
}

/// Partition of `[1, 2^p]` into attainable, impossible and unknown sizes.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SizeCatalog {
    pub p: usize,
    pub attainable: IntervalSet,
    /// What each source contributes (sources overlap).
    pub attainable_by: Vec<(SizeSource, IntervalSet)>,
    pub impossible: IntervalSet,
    pub impossible_by: Vec<(SizeSource, IntervalSet)>,
    pub unknown: IntervalSet,
    /// Longest run of sizes all proven impossible between two nontrivial
    /// attainable sizes.
    pub proven_gap: usize,
    /// Longest run of sizes not known to be attainable between two
    /// nontrivial attainable sizes.
    pub possible_gap: usize,
}

impl SizeCatalog {
    pub fn sources_of(&self, s: usize) -> Vec<SizeSource> {
        self.attainable_by
            .iter()
            .chain(&self.impossible_by)
            .filter(|(_, set)| set.contains(s))
            .map(|(src, _)| *src)
            .collect()
    }

    pub fn contribution(&self, source: SizeSource) -> IntervalSet {
        self.attainable_by
            .iter()
            .chain(&self.impossible_by)
            .filter(|(src, _)| *src == source)
            .fold(IntervalSet::new(), |acc, (_, set)| acc.union(set))
    }
}

fn attainable_only(p: usize) -> Vec<(SizeSource, IntervalSet)> {
    let full = 1usize << p;
    let mut by = vec![
        (SizeSource::SizeClaim, claims_with(p, ClaimStatus::Exists)),
        (SizeSource::StandardBasis, IntervalSet::from_values([full])),
        (
            SizeSource::MultipleOfFour,
            IntervalSet::from_values((p + 1..=2 * p.min(full / 2)).filter(|s| s % 4 == 0)),
        ),
    ];
    if p >= 2 {
        let prev = attainable_only(p - 1)
            .into_iter()
            .fold(IntervalSet::new(), |acc, (_, set)| acc.union(&set));
        by.push((SizeSource::CombineClosure, prev.sumset()));
    }
    by
}

fn gaps(attainable: &IntervalSet, allowed: &IntervalSet, full: usize) -> usize {
    let nontrivial: Vec<(usize, usize)> = attainable
        .intervals()
        .iter()
        .filter_map(|&(a, b)| {
            let b = b.min(full - 1);
            (a <= b).then_some((a, b))
        })
        .collect();
    nontrivial
        .windows(2)
        .filter_map(|w| {
            let (lo, hi) = (w[0].1 + 1, w[1].0 - 1);
            let run = IntervalSet::from_intervals([(lo, hi)]);
            (run.intersection(allowed) == run).then(|| hi - lo + 1)
        })
        .max()
        .unwrap_or(0)
}

/// Size summary for `p` qubits (`1 <= p <= 40`).
pub fn attainable_sizes(p: usize) -> SizeCatalog {
    assert!((1..=40).contains(&p), "attainable_sizes supports 1 <= p <= 40");
    let full = 1usize << p;
    let universe = IntervalSet::from_intervals([(1, full)]);
    let attainable_by = attainable_only(p);
    let attainable = attainable_by
        .iter()
        .fold(IntervalSet::new(), |acc, (_, set)| acc.union(set))
        .intersection(&universe);
    let mut impossible_by: Vec<(SizeSource, IntervalSet)> = [
        NonexistenceRule::TooSmallTrivial,
        NonexistenceRule::BelowMinimum,
        NonexistenceRule::NearMaximal,
        NonexistenceRule::OddPPlus2,
    ]
    .into_iter()
    .map(|r| (SizeSource::Rule(r), rule_set(p, r)))
    .filter(|(_, set)| !set.is_empty())
    .collect();
    let claimed = claims_with(p, ClaimStatus::Impossible);
    if !claimed.is_empty() {
        impossible_by.push((SizeSource::SizeClaim, claimed));
    }
    let impossible = impossible_by
        .iter()
        .fold(IntervalSet::new(), |acc, (_, set)| acc.union(set));
    let unknown = universe.difference(&attainable).difference(&impossible);
    let not_attainable = universe.difference(&attainable);
    SizeCatalog {
        p,
        proven_gap: gaps(&attainable, &impossible, full),
        possible_gap: gaps(&attainable, &not_attainable, full),
        attainable,
        attainable_by,
        impossible,
        impossible_by,
        unknown,
    }
}

/// `(sum_{k=4}^{p-1} f(k), (p^2 + 3p - 30) / 2)` for `p >= 7`; the first is at
/// most the second, which exceeds it by at most 2.
pub fn bound_comparison(p: usize) -> Result<(usize, usize), ConstructError> {
    if p < 7 {
        return Err(ConstructError::BadArguments(format!("bound_comparison needs p >= 7, got {p}")));
    }
    let sum_f: usize = (4..p).map(min_size).sum();
    let closed = (p * p + 3 * p - 30) / 2;
    assert!(
        sum_f <= closed && closed <= sum_f + 2,
        "bound sandwich fails at p={p}: {sum_f} vs {closed}"
    );
    Ok((sum_f, closed))
}
