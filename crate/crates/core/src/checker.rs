//! Unextendibility tests on orthogonality graphs.
//!
//! A product state orthogonal to every member must, for each member, be
//! orthogonal to it on some qubit. On qubit `q` a new local vector can be
//! orthogonal to every state of at most one region (the complement of that
//! region's vector), so the set is extendible exactly when some choice of at
//! most one region per qubit covers all states.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::bits::VertexSet;
use crate::graph::OrthogonalityGraph;

/// One chosen region per selected qubit whose union is every state.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExtensionWitness {
    /// `(qubit, region index)`, ascending by qubit.
    pub regions: Vec<(usize, usize)>,
}

impl ExtensionWitness {
    /// Whether the selection really covers all of `g`'s states.
    pub fn covers(&self, g: &OrthogonalityGraph) -> bool {
        let mut seen = vec![false; g.s()];
        let mut qubits = Vec::new();
        for &(q, r) in &self.regions {
            if q >= g.p() || r >= g.qubit(q).regions().len() || qubits.contains(&q) {
                return false;
            }
            qubits.push(q);
            for &v in &g.qubit(q).regions()[r] {
                seen[v] = true;
            }
        }
        seen.iter().all(|&x| x)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Upb,
    /// Pairs `(u, v)`, `u < v`, orthogonal on no qubit.
    NotPairwiseOrthogonal(Vec<(usize, usize)>),
    Extendible(ExtensionWitness),
}

impl Verdict {
    pub fn is_upb(&self) -> bool {
        matches!(self, Verdict::Upb)
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Upb => write!(f, "UPB"),
            Verdict::NotPairwiseOrthogonal(pairs) => {
                write!(f, "not pairwise orthogonal ({} missing pairs)", pairs.len())
            }
            Verdict::Extendible(_) => write!(f, "extendible"),
        }
    }
}

/// Pairs of states that are orthogonal on no qubit.
pub fn missing_pairs(g: &OrthogonalityGraph) -> Vec<(usize, usize)> {
    let adj = g.union_adjacency();
    let mut out = Vec::new();
    for u in 0..g.s() {
        for v in u + 1..g.s() {
            if !adj[u][v] {
                out.push((u, v));
            }
        }
    }
    out
}

pub fn is_mutually_orthogonal(g: &OrthogonalityGraph) -> bool {
    missing_pairs(g).is_empty()
}

struct CoverSearch<'a> {
    s: usize,
    /// Per position in the search order: `(qubit, regions as (index, set))`,
    /// regions sorted by size descending, dominated regions removed.
    levels: Vec<(usize, Vec<(usize, VertexSet)>)>,
    /// Largest region size from this level on, summed.
    suffix_max: Vec<usize>,
    chosen: Vec<(usize, usize)>,
    _g: &'a OrthogonalityGraph,
}

impl CoverSearch<'_> {
    fn run(&mut self, level: usize, covered: &VertexSet, count: usize) -> bool {
        if count == self.s {
            return true;
        }
        if level == self.levels.len() || count + self.suffix_max[level] < self.s {
            return false;
        }
        let n = self.levels[level].1.len();
        for i in 0..n {
            let (ridx, gain) = {
                let (_, regs) = &self.levels[level];
                (regs[i].0, covered.count_new(&regs[i].1))
            };
            if gain == 0 {
                continue;
            }
            let mut next = covered.clone();
            next.union_with(&self.levels[level].1[i].1);
            self.chosen.push((self.levels[level].0, ridx));
            if self.run(level + 1, &next, count + gain) {
                return true;
            }
            self.chosen.pop();
        }
        self.run(level + 1, covered, count)
    }
}

/// A selection of at most one region per qubit covering every state, if one
/// exists. Such a selection certifies an orthogonal product extension.
pub fn extension_witness(g: &OrthogonalityGraph) -> Option<ExtensionWitness> {
    let s = g.s();
    if s == 0 {
        return Some(ExtensionWitness { regions: vec![] });
    }
    let mut levels: Vec<(usize, Vec<(usize, VertexSet)>)> = g
        .qubits()
        .iter()
        .enumerate()
        .map(|(q, f)| {
            let mut regs: Vec<(usize, VertexSet)> = f
                .regions()
                .iter()
                .enumerate()
                .map(|(i, r)| (i, VertexSet::from_iter_n(s, r.iter().copied())))
                .collect();
            regs.sort_by_key(|(i, r)| (std::cmp::Reverse(r.len()), *i));
            (q, regs)
        })
        .collect();
    levels.sort_by_key(|(q, regs)| (std::cmp::Reverse(regs.first().map_or(0, |r| r.1.len())), *q));
    let mut suffix_max = vec![0; levels.len() + 1];
    for i in (0..levels.len()).rev() {
        suffix_max[i] = suffix_max[i + 1] + levels[i].1.first().map_or(0, |r| r.1.len());
    }
    let mut search = CoverSearch {
        s,
        levels,
        suffix_max,
        chosen: Vec::new(),
        _g: g,
    };
    if search.run(0, &VertexSet::with_capacity(s), 0) {
        let mut regions = search.chosen;
        regions.sort_unstable();
        Some(ExtensionWitness { regions })
    } else {
        None
    }
}

/// Missing orthogonality dominates; otherwise a covering selection means the
/// set extends; otherwise it is unextendible.
pub fn classify(g: &OrthogonalityGraph) -> Verdict {
    let missing = missing_pairs(g);
    if !missing.is_empty() {
        return Verdict::NotPairwiseOrthogonal(missing);
    }
    match extension_witness(g) {
        Some(w) => Verdict::Extendible(w),
        None => Verdict::Upb,
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CrosscheckError {
    #[error("could not draw well-separated angles after {attempts} attempts")]
    DegenerateSample { attempts: usize },
}

#[derive(Clone, Debug, PartialEq)]
pub struct CrosscheckReport {
    /// Orthogonality of the numeric vectors agrees with the graph on every pair.
    pub orthogonality_agrees: bool,
    /// The numeric set admits a product vector orthogonal to all members.
    pub numerically_extendible: bool,
    /// Smallest `|<v|w>|` over non-adjacent pairs.
    pub min_nonorthogonal_overlap: f64,
    /// Largest `|<v|w>|` over adjacent pairs.
    pub max_orthogonal_overlap: f64,
}

impl CrosscheckReport {
    /// The numeric realization agrees with the combinatorial verdict.
    pub fn agrees_with(&self, verdict: &Verdict) -> bool {
        match verdict {
            Verdict::NotPairwiseOrthogonal(_) => self.orthogonality_agrees,
            Verdict::Extendible(_) => self.orthogonality_agrees && self.numerically_extendible,
            Verdict::Upb => self.orthogonality_agrees && !self.numerically_extendible,
        }
    }
}

const ORTHO_TOL: f64 = 1e-9;
const MIN_SEPARATION: f64 = 1e-6;
const MAX_ATTEMPTS: usize = 100;

/// Distance between two angles as lines (modulo `pi`), in `[0, pi/2]`.
fn line_distance(a: f64, b: f64) -> f64 {
    let d = (a - b).rem_euclid(std::f64::consts::PI);
    d.min(std::f64::consts::PI - d)
}

/// Realizes `g` with random real qubit vectors and checks the result
/// numerically. Each matched pair gets a random angle `t` and its partner
/// `t + pi/2`; unmatched regions get their own random angle.
pub fn numeric_crosscheck(g: &OrthogonalityGraph, seed: u64) -> Result<CrosscheckReport, CrosscheckError> {
    use std::f64::consts::FRAC_PI_2;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let s = g.s();
    for _ in 0..MAX_ATTEMPTS {
        // angles[q][v]
        let mut angles = vec![vec![0.0f64; s]; g.p()];
        let mut degenerate = false;
        for (q, f) in g.qubits().iter().enumerate() {
            let partners = f.partners();
            let mut region_angle = vec![f64::NAN; f.regions().len()];
            let mut classes = Vec::new();
            for r in 0..f.regions().len() {
                if region_angle[r].is_nan() {
                    classes.push(r);
                    region_angle[r] = 0.0;
                    if let Some(pr) = partners[r] {
                        region_angle[pr] = 0.0;
                    }
                }
            }
            // Stratified draw: one sub-interval of [0, pi/2) per class.
            let n = classes.len() as f64;
            let mut drawn = Vec::new();
            for (k, &r) in classes.iter().enumerate() {
                let t = FRAC_PI_2 * (k as f64 + rng.gen::<f64>()) / n;
                drawn.push(t);
                region_angle[r] = t;
                if let Some(pr) = partners[r] {
                    region_angle[pr] = t + FRAC_PI_2;
                }
            }
            for (i, a) in drawn.iter().enumerate() {
                for b in &drawn[i + 1..] {
                    // Distinct classes must stay clear of both equality and
                    // orthogonality.
                    let d = line_distance(*a, *b);
                    if d < MIN_SEPARATION || FRAC_PI_2 - d < MIN_SEPARATION {
                        degenerate = true;
                    }
                }
            }
            for (r, reg) in f.regions().iter().enumerate() {
                for &v in reg {
                    angles[q][v] = region_angle[r];
                }
            }
        }
        if degenerate {
            continue;
        }
        return Ok(evaluate(g, &angles));
    }
    Err(CrosscheckError::DegenerateSample {
        attempts: MAX_ATTEMPTS,
    })
}

fn evaluate(g: &OrthogonalityGraph, angles: &[Vec<f64>]) -> CrosscheckReport {
    let s = g.s();
    let adj = g.union_adjacency();
    let mut agrees = true;
    let mut min_non = f64::INFINITY;
    let mut max_orth: f64 = 0.0;
    for u in 0..s {
        for v in u + 1..s {
            let overlap: f64 = angles
                .iter()
                .map(|a| (a[u] - a[v]).cos())
                .product::<f64>()
                .abs();
            let orth = overlap < ORTHO_TOL;
            if orth != adj[u][v] {
                agrees = false;
            }
            if adj[u][v] {
                max_orth = max_orth.max(overlap);
            } else {
                min_non = min_non.min(overlap);
            }
        }
    }
    // A product vector orthogonal to all members picks, per qubit, a local
    // vector; only the complement of an existing local vector is orthogonal
    // to anything, so candidates are those complements (plus "none").
    let mut per_qubit: Vec<Vec<Vec<usize>>> = Vec::new();
    for a in angles {
        let mut distinct: Vec<f64> = Vec::new();
        for &t in a {
            if !distinct.iter().any(|&d| line_distance(d, t) < MIN_SEPARATION / 2.0) {
                distinct.push(t);
            }
        }
        let options = distinct
            .iter()
            .map(|&t| {
                let c = t + std::f64::consts::FRAC_PI_2;
                (0..s).filter(|&v| (a[v] - c).cos().abs() < ORTHO_TOL).collect::<Vec<_>>()
            })
            .collect();
        per_qubit.push(options);
    }
    let numerically_extendible = cover_exists(&per_qubit, 0, &mut vec![false; s]);
    CrosscheckReport {
        orthogonality_agrees: agrees,
        numerically_extendible,
        min_nonorthogonal_overlap: min_non,
        max_orthogonal_overlap: max_orth,
    }
}

fn cover_exists(options: &[Vec<Vec<usize>>], q: usize, covered: &mut Vec<bool>) -> bool {
    if covered.iter().all(|&c| c) {
        return true;
    }
    if q == options.len() {
        return false;
    }
    for opt in &options[q] {
        let before = covered.clone();
        for &v in opt {
            covered[v] = true;
        }
        if cover_exists(options, q + 1, covered) {
            return true;
        }
        *covered = before;
    }
    cover_exists(options, q + 1, covered)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;
    use crate::graph::graph_from_states;
    use crate::notation::parse_basis;

    fn graph(ket: &str) -> OrthogonalityGraph {
        graph_from_states(&parse_basis(ket).unwrap())
    }

    #[test]
    fn shifts_is_upb() {
        assert_eq!(classify(&graph(fixtures::SHIFTS)), Verdict::Upb);
    }

    #[test]
    fn standard_basis_is_upb() {
        assert_eq!(classify(&graph("00,01,10,11")), Verdict::Upb);
    }

    #[test]
    fn three_of_four_is_extendible() {
        match classify(&graph("00,01,10")) {
            Verdict::Extendible(w) => assert!(w.covers(&graph("00,01,10"))),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn seven_state_example_has_the_expected_cover() {
        let g = fixtures::seven_state_example();
        let w = extension_witness(&g).expect("covering selection exists");
        assert!(w.covers(&g));
        assert!(matches!(classify(&g), Verdict::NotPairwiseOrthogonal(_)));
    }

    #[test]
    fn missing_pairs_dominate() {
        match classify(&graph("00,0a")) {
            Verdict::NotPairwiseOrthogonal(p) => assert_eq!(p, vec![(0, 1)]),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn crosscheck_agrees_on_shifts() {
        let g = graph(fixtures::SHIFTS);
        let r = numeric_crosscheck(&g, 7).unwrap();
        assert!(r.agrees_with(&Verdict::Upb), "{r:?}");
        let g = graph("00,01,10");
        let r = numeric_crosscheck(&g, 7).unwrap();
        assert!(r.numerically_extendible);
    }
}
