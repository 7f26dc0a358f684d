//! Candidate component-size profiles and the necessary conditions that
//! discard most of them before any placement search.

use std::collections::BTreeMap;
use std::sync::Arc;

use itertools::Itertools;
use serde::Serialize;

use super::feasible::FeasibilityTable;
use crate::graph::SizeProfile;

#[derive(Clone, Debug)]
pub struct ProfileConstraints {
    pub p: usize,
    pub s: usize,
    /// Also consider regions with no orthogonal partner on their qubit.
    pub allow_unmatched: bool,
    pub use_reverse_combine: bool,
    pub use_cover_bound: bool,
    /// Odd `s`: drop profiles with a qubit made only of `K_{1,1}` components.
    pub use_odd_pair_rule: bool,
    pub table: Arc<FeasibilityTable>,
}

impl ProfileConstraints {
    pub fn new(p: usize, s: usize) -> Self {
        ProfileConstraints {
            p,
            s,
            allow_unmatched: false,
            use_reverse_combine: true,
            use_cover_bound: true,
            use_odd_pair_rule: false,
            table: Arc::new(FeasibilityTable::standard()),
        }
    }

    /// Every rule off: only the basic counting conditions remain.
    pub fn without_prunes(mut self) -> Self {
        self.use_reverse_combine = false;
        self.use_cover_bound = false;
        self.use_odd_pair_rule = false;
        self
    }

    /// The active constraint set, for reports.
    pub fn describe(&self) -> ConstraintSet {
        let mut rules = vec![
            "sides sum to s on every qubit".to_string(),
            format!("every side at most s - p = {}", self.s.saturating_sub(self.p)),
            format!("at least s(s-1)/2 = {} edges", self.s * self.s.saturating_sub(1) / 2),
        ];
        if !self.allow_unmatched {
            rules.push("every region matched (two-sided components only)".into());
        }
        if self.use_reverse_combine {
            rules.push("single-component qubits need sides proven feasible on p-1 qubits".into());
        }
        if self.use_cover_bound {
            rules.push("greedy covering bound (cumulative form) below s".into());
        }
        if self.use_odd_pair_rule {
            rules.push("odd s: no qubit made only of K(1,1) components".into());
        }
        ConstraintSet {
            p: self.p,
            s: self.s,
            allow_unmatched: self.allow_unmatched,
            reverse_combine: self.use_reverse_combine,
            cover_bound: self.use_cover_bound,
            odd_pair_rule: self.use_odd_pair_rule,
            rules,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ConstraintSet {
    pub p: usize,
    pub s: usize,
    pub allow_unmatched: bool,
    pub reverse_combine: bool,
    pub cover_bound: bool,
    pub odd_pair_rule: bool,
    pub rules: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum PruneReason {
    /// A qubit with the single component `(a, b)` where `a` or `b` is not a
    /// possible `(p-1)`-qubit UPB size.
    ReverseCombine { qubit: usize, component: (usize, usize) },
    /// Greedy covering along `order` reaches all `s` states.
    SearchReduce { order: Vec<usize>, t: Vec<usize> },
    OddPair { qubit: usize },
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum PruneDecision {
    Keep,
    Prune(PruneReason),
}

/// All multisets of components on one qubit: pairs `(a, b)`, `a >= b >= 1`
/// (or `b = 0` for unmatched regions), sides at most `max_side`, sides summing
/// to `s`. Each multiset sorted descending.
pub fn qubit_types(s: usize, max_side: usize, allow_unmatched: bool) -> Vec<Vec<(usize, usize)>> {
    let mut pairs = Vec::new();
    for a in 1..=max_side.min(s) {
        let lo = if allow_unmatched { 0 } else { 1 };
        for b in lo..=a.min(s - a) {
            pairs.push((a, b));
        }
    }
    pairs.sort_unstable_by(|x, y| y.cmp(x));
    let mut out = Vec::new();
    fn rec(
        pairs: &[(usize, usize)],
        start: usize,
        left: usize,
        cur: &mut Vec<(usize, usize)>,
        out: &mut Vec<Vec<(usize, usize)>>,
    ) {
        if left == 0 {
            out.push(cur.clone());
            return;
        }
        for i in start..pairs.len() {
            let (a, b) = pairs[i];
            if a + b <= left {
                cur.push((a, b));
                rec(pairs, i, left - a - b, cur, out);
                cur.pop();
            }
        }
    }
    rec(&pairs, 0, s, &mut Vec::new(), &mut out);
    out
}

fn edges(t: &[(usize, usize)]) -> usize {
    t.iter().map(|&(a, b)| a * b).sum()
}

/// Reverse-combine prune: a qubit with one two-sided component splits the set
/// into two `(p-1)`-qubit UPBs, so both sides must be feasible sizes.
pub fn prune_reverse_combine(pr: &SizeProfile, table: &FeasibilityTable) -> PruneDecision {
    let p = pr.p();
    if p < 2 {
        return PruneDecision::Keep;
    }
    for (q, comps) in pr.qubits.iter().enumerate() {
        if let [(a, b)] = comps.as_slice() {
            if *b >= 1 && (table.proven_infeasible(p - 1, *a) || table.proven_infeasible(p - 1, *b)) {
                return PruneDecision::Prune(PruneReason::ReverseCombine {
                    qubit: q,
                    component: (*a, *b),
                });
            }
        }
    }
    PruneDecision::Keep
}

/// Smallest `m` such that removing `removed` elements from the sides can
/// bring every side down to `m`.
pub fn water_level(sides: &[usize], removed: usize) -> usize {
    let top = sides.iter().copied().max().unwrap_or(0);
    (0..=top)
        .find(|&m| sides.iter().map(|&x| x.saturating_sub(m)).sum::<usize>() <= removed)
        .unwrap_or(top)
}

fn sides_of(comps: &[(usize, usize)]) -> Vec<usize> {
    comps
        .iter()
        .flat_map(|&(a, b)| [a, b])
        .filter(|&x| x > 0)
        .collect()
}

/// Guaranteed coverage of a greedy extension built along `order`: start from
/// `t1` states covered on the first qubit; on each later qubit some region
/// still contains at least `water_level(sides, covered)` uncovered states.
pub fn greedy_chain(pr: &SizeProfile, order: &[usize], t1: usize) -> Vec<usize> {
    let mut t = vec![t1];
    let mut covered = t1.min(pr.s);
    for &q in &order[1..] {
        let tk = if covered >= pr.s {
            0
        } else {
            water_level(&sides_of(&pr.qubits[q]), covered).min(pr.s - covered)
        };
        t.push(tk);
        covered += tk;
    }
    t
}

fn heuristic_order(pr: &SizeProfile) -> Vec<usize> {
    let mut order: Vec<usize> = (0..pr.p()).collect();
    order.sort_by_key(|&q| std::cmp::Reverse(sides_of(&pr.qubits[q]).into_iter().max().unwrap_or(0)));
    order
}

/// Cover-chain prune: if for some qubit order and starting region the
/// greedy chain covers all `s` states, every placement is extendible.
///
/// The chain charges each qubit with everything covered so far (not only the
/// previous step), which keeps the bound valid.
pub fn prune_search_reduce(pr: &SizeProfile) -> PruneDecision {
    let p = pr.p();
    let orders: Vec<Vec<usize>> = if p <= 7 {
        (0..p).permutations(p).collect()
    } else {
        vec![heuristic_order(pr)]
    };
    for order in orders {
        let mut starts = sides_of(&pr.qubits[order[0]]);
        starts.sort_unstable();
        starts.dedup();
        for t1 in starts.into_iter().rev() {
            let t = greedy_chain(pr, &order, t1);
            if t.iter().sum::<usize>() > pr.s - 1 {
                return PruneDecision::Prune(PruneReason::SearchReduce { order, t });
            }
        }
    }
    PruneDecision::Keep
}

fn prune_odd_pair(pr: &SizeProfile) -> PruneDecision {
    if pr.s % 2 == 1 {
        for (q, comps) in pr.qubits.iter().enumerate() {
            if comps.iter().all(|&c| c == (1, 1)) {
                return PruneDecision::Prune(PruneReason::OddPair { qubit: q });
            }
        }
    }
    PruneDecision::Keep
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ProfileCounts {
    /// Profiles meeting the basic counting conditions.
    pub candidates: usize,
    pub pruned_reverse_combine: usize,
    pub pruned_cover_bound: usize,
    pub pruned_odd_pair: usize,
    pub kept: usize,
}

#[derive(Clone, Debug)]
pub struct ProfileEnumeration {
    pub counts: ProfileCounts,
    pub profiles: Vec<SizeProfile>,
}

/// Candidate profiles up to qubit permutation, before rule prunes.
pub fn candidate_profiles(c: &ProfileConstraints) -> Vec<SizeProfile> {
    let (p, s) = (c.p, c.s);
    if p == 0 || s <= p {
        return Vec::new();
    }
    let max_side = s - p;
    let mut types = qubit_types(s, max_side, c.allow_unmatched);
    types.sort_by(|x, y| edges(y).cmp(&edges(x)).then_with(|| y.cmp(x)));
    let need = s * (s - 1) / 2;
    let mut out = Vec::new();
    let mut cur: Vec<usize> = Vec::new();
    fn rec(
        types: &[Vec<(usize, usize)>],
        start: usize,
        left: usize,
        have: usize,
        need: usize,
        s: usize,
        cur: &mut Vec<usize>,
        out: &mut Vec<SizeProfile>,
    ) {
        if left == 0 {
            if have >= need {
                let qubits = cur.iter().map(|&i| types[i].clone()).collect();
                out.push(SizeProfile::new(s, qubits).normalized());
            }
            return;
        }
        for i in start..types.len() {
            // Types are sorted by edge count, so this bound only tightens.
            if have + left * edges(&types[i]) < need {
                break;
            }
            cur.push(i);
            rec(types, i, left - 1, have + edges(&types[i]), need, s, cur, out);
            cur.pop();
        }
    }
    rec(&types, 0, p, 0, need, s, &mut cur, &mut out);
    out.sort();
    out
}

/// Candidate profiles that survive the enabled rules, with per-rule counts.
/// A profile counts against the first rule that removes it (A.1, then A.2,
/// then the odd-pair rule).
pub fn enumerate_profiles_with_counts(c: &ProfileConstraints) -> ProfileEnumeration {
    let candidates = candidate_profiles(c);
    let mut counts = ProfileCounts {
        candidates: candidates.len(),
        ..Default::default()
    };
    let mut profiles = Vec::new();
    for pr in candidates {
        if c.use_reverse_combine && prune_reverse_combine(&pr, &c.table) != PruneDecision::Keep {
            counts.pruned_reverse_combine += 1;
        } else if c.use_cover_bound && prune_search_reduce(&pr) != PruneDecision::Keep {
            counts.pruned_cover_bound += 1;
        } else if c.use_odd_pair_rule && prune_odd_pair(&pr) != PruneDecision::Keep {
            counts.pruned_odd_pair += 1;
        } else {
            profiles.push(pr);
        }
    }
    counts.kept = profiles.len();
    ProfileEnumeration { counts, profiles }
}

pub fn enumerate_profiles(c: &ProfileConstraints) -> Vec<SizeProfile> {
    enumerate_profiles_with_counts(c).profiles
}

/// Number of distinct component types per qubit, for diagnostics.
pub fn type_histogram(profiles: &[SizeProfile]) -> BTreeMap<Vec<(usize, usize)>, usize> {
    let mut h = BTreeMap::new();
    for pr in profiles {
        for q in &pr.qubits {
            *h.entry(q.clone()).or_insert(0) += 1;
        }
    }
    h
}
