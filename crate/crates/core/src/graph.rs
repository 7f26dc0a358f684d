//! Orthogonality graphs of qubit product sets.
//!
//! A set of `s` product states on `p` qubits is described, up to the choice of
//! local bases, by one [`QubitFactorization`] per qubit: a partition of the
//! states into *regions* (states carrying the same local vector) together with
//! a partial matching that pairs each region with the region holding its
//! orthogonal complement, if any state uses it. A matched pair `(A, B)` is the
//! complete bipartite component `K_{|A|,|B|}` of that qubit's orthogonality
//! graph; an unmatched region contributes no edges.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("ragged basis: state {state} has {found} symbols, expected {expected}")]
    RaggedBasis {
        state: usize,
        expected: usize,
        found: usize,
    },
    #[error("invalid graph: {0}")]
    InvalidGraph(ValidationReport),
}

/// Structure of a single qubit: regions of equal local vectors and the
/// pairing of mutually orthogonal regions.
///
/// Regions are kept sorted by `(size, min vertex)` and each region's vertices
/// ascending; matching pairs are stored as `(i, j)` with `i < j`, ascending.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct QubitFactorization {
    regions: Vec<Vec<usize>>,
    matching: Vec<(usize, usize)>,
}

impl QubitFactorization {
    /// Normalizes the given regions and matching. No validation happens here;
    /// see [`OrthogonalityGraph::validate`].
    pub fn new(regions: Vec<Vec<usize>>, matching: Vec<(usize, usize)>) -> Self {
        let mut regions: Vec<(usize, Vec<usize>)> = regions
            .into_iter()
            .enumerate()
            .map(|(i, mut r)| {
                r.sort_unstable();
                (i, r)
            })
            .collect();
        regions.sort_by_key(|(_, r)| (r.len(), r.first().copied().unwrap_or(usize::MAX)));
        let mut remap = vec![usize::MAX; regions.len()];
        for (new, (old, _)) in regions.iter().enumerate() {
            remap[*old] = new;
        }
        let mut matching: Vec<(usize, usize)> = matching
            .into_iter()
            .map(|(a, b)| {
                let a = remap.get(a).copied().unwrap_or(a);
                let b = remap.get(b).copied().unwrap_or(b);
                (a.min(b), a.max(b))
            })
            .collect();
        matching.sort_unstable();
        QubitFactorization {
            regions: regions.into_iter().map(|(_, r)| r).collect(),
            matching,
        }
    }

    pub fn regions(&self) -> &[Vec<usize>] {
        &self.regions
    }

    pub fn matching(&self) -> &[(usize, usize)] {
        &self.matching
    }

    /// The region matched with region `r`, if any.
    pub fn partner(&self, r: usize) -> Option<usize> {
        self.matching.iter().find_map(|&(a, b)| {
            if a == r {
                Some(b)
            } else if b == r {
                Some(a)
            } else {
                None
            }
        })
    }

    /// Partner table indexed by region.
    pub fn partners(&self) -> Vec<Option<usize>> {
        let mut out = vec![None; self.regions.len()];
        for &(a, b) in &self.matching {
            if a < out.len() && b < out.len() {
                out[a] = Some(b);
                out[b] = Some(a);
            }
        }
        out
    }

    /// Region index of every vertex `0..s` (assumes a valid factorization).
    pub fn region_of(&self, s: usize) -> Vec<usize> {
        let mut out = vec![usize::MAX; s];
        for (i, r) in self.regions.iter().enumerate() {
            for &v in r {
                if v < s {
                    out[v] = i;
                }
            }
        }
        out
    }

    /// Number of edges contributed on this qubit.
    pub fn edge_count(&self) -> usize {
        self.matching
            .iter()
            .map(|&(a, b)| self.regions[a].len() * self.regions[b].len())
            .sum()
    }

    /// Component sizes: `(|A|, |B|)` per matched pair and `(|R|, 0)` per
    /// unmatched region, each with `a >= b`, sorted descending.
    pub fn component_sizes(&self) -> Vec<(usize, usize)> {
        let partners = self.partners();
        let mut out = Vec::new();
        for (i, r) in self.regions.iter().enumerate() {
            match partners[i] {
                Some(j) if j > i => {
                    let (a, b) = (r.len(), self.regions[j].len());
                    out.push((a.max(b), a.min(b)));
                }
                Some(_) => {}
                None => out.push((r.len(), 0)),
            }
        }
        out.sort_unstable_by(|x, y| y.cmp(x));
        out
    }

    fn relabeled(&self, vertex_perm: &[usize]) -> Self {
        let regions = self
            .regions
            .iter()
            .map(|r| r.iter().map(|&v| vertex_perm[v]).collect())
            .collect();
        QubitFactorization::new(regions, self.matching.clone())
    }
}

impl fmt::Debug for QubitFactorization {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} ~ {:?}", self.regions, self.matching)
    }
}

/// The orthogonality graph of `s` product states on `p` qubits.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct OrthogonalityGraph {
    s: usize,
    qubits: Vec<QubitFactorization>,
}

impl OrthogonalityGraph {
    pub fn new(s: usize, qubits: Vec<QubitFactorization>) -> Self {
        OrthogonalityGraph { s, qubits }
    }

    /// Builds a graph and rejects it unless every structural rule holds.
    pub fn try_new(s: usize, qubits: Vec<QubitFactorization>) -> Result<Self, GraphError> {
        let g = Self::new(s, qubits);
        g.ensure_valid()?;
        Ok(g)
    }

    pub fn p(&self) -> usize {
        self.qubits.len()
    }

    pub fn s(&self) -> usize {
        self.s
    }

    pub fn qubits(&self) -> &[QubitFactorization] {
        &self.qubits
    }

    pub fn qubit(&self, q: usize) -> &QubitFactorization {
        &self.qubits[q]
    }

    pub fn into_qubits(self) -> Vec<QubitFactorization> {
        self.qubits
    }

    pub fn validate(&self) -> ValidationReport {
        validate_graph(self)
    }

    pub fn ensure_valid(&self) -> Result<(), GraphError> {
        let report = self.validate();
        if report.is_ok() {
            Ok(())
        } else {
            Err(GraphError::InvalidGraph(report))
        }
    }

    /// Vertex `v` becomes `vertex_perm[v]`; new qubit `i` is old qubit
    /// `qubit_perm[i]`.
    pub fn relabel(&self, vertex_perm: &[usize], qubit_perm: &[usize]) -> Self {
        let qubits = qubit_perm
            .iter()
            .map(|&q| self.qubits[q].relabeled(vertex_perm))
            .collect();
        OrthogonalityGraph::new(self.s, qubits)
    }

    /// Whether `u` and `v` are orthogonal on qubit `q`.
    pub fn adjacent_on(&self, q: usize, u: usize, v: usize) -> bool {
        let f = &self.qubits[q];
        let ru = f.regions.iter().position(|r| r.contains(&u));
        let rv = f.regions.iter().position(|r| r.contains(&v));
        match (ru, rv) {
            (Some(a), Some(b)) => f.partner(a) == Some(b),
            _ => false,
        }
    }

    /// Union over qubits of the orthogonality relation, as adjacency rows.
    pub fn union_adjacency(&self) -> Vec<Vec<bool>> {
        let mut adj = vec![vec![false; self.s]; self.s];
        for f in &self.qubits {
            for &(a, b) in &f.matching {
                for &u in &f.regions[a] {
                    for &v in &f.regions[b] {
                        adj[u][v] = true;
                        adj[v][u] = true;
                    }
                }
            }
        }
        adj
    }

    /// Appends qubits, keeping the vertex set.
    pub fn with_extra_qubits(&self, extra: impl IntoIterator<Item = QubitFactorization>) -> Self {
        let mut qubits = self.qubits.clone();
        qubits.extend(extra);
        OrthogonalityGraph::new(self.s, qubits)
    }
}

impl fmt::Debug for OrthogonalityGraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OrthogonalityGraph")
            .field("p", &self.p())
            .field("s", &self.s)
            .field("qubits", &self.qubits)
            .finish()
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    NoQubits,
    NoStates,
    EmptyRegion { region: usize },
    VertexOutOfRange { vertex: usize },
    OverlappingRegions { vertex: usize },
    UncoveredVertex { vertex: usize },
    SelfPairedRegion { region: usize },
    RegionOutOfRange { region: usize },
    RegionMatchedTwice { region: usize },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::NoQubits => write!(f, "graph has no qubits"),
            Rule::NoStates => write!(f, "graph has no states"),
            Rule::EmptyRegion { region } => write!(f, "region {region} is empty"),
            Rule::VertexOutOfRange { vertex } => write!(f, "vertex {vertex} out of range"),
            Rule::OverlappingRegions { vertex } => {
                write!(f, "overlapping regions: vertex {vertex} appears twice")
            }
            Rule::UncoveredVertex { vertex } => write!(f, "vertex {vertex} is in no region"),
            Rule::SelfPairedRegion { region } => write!(f, "self-paired region {region}"),
            Rule::RegionOutOfRange { region } => {
                write!(f, "matching names missing region {region}")
            }
            Rule::RegionMatchedTwice { region } => {
                write!(f, "region {region} appears in two matching pairs")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Violation {
    /// `None` for graph-level rules.
    pub qubit: Option<usize>,
    pub rule: Rule,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.qubit {
            Some(q) => write!(f, "qubit {q}: {}", self.rule),
            None => write!(f, "{}", self.rule),
        }
    }
}

/// Every structural violation found in a graph (empty when valid).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_ok() {
            return write!(f, "ok");
        }
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        write!(f, "{}", parts.join("; "))
    }
}

/// Checks every structural invariant and collects all violations.
pub fn validate_graph(g: &OrthogonalityGraph) -> ValidationReport {
    let mut violations = Vec::new();
    if g.p() == 0 {
        violations.push(Violation {
            qubit: None,
            rule: Rule::NoQubits,
        });
    }
    if g.s == 0 {
        violations.push(Violation {
            qubit: None,
            rule: Rule::NoStates,
        });
    }
    for (q, f) in g.qubits.iter().enumerate() {
        let mut push = |rule| violations.push(Violation { qubit: Some(q), rule });
        let mut seen = vec![false; g.s];
        for (i, r) in f.regions.iter().enumerate() {
            if r.is_empty() {
                push(Rule::EmptyRegion { region: i });
            }
            for &v in r {
                if v >= g.s {
                    push(Rule::VertexOutOfRange { vertex: v });
                } else if seen[v] {
                    push(Rule::OverlappingRegions { vertex: v });
                } else {
                    seen[v] = true;
                }
            }
        }
        for (v, hit) in seen.iter().enumerate() {
            if !hit {
                push(Rule::UncoveredVertex { vertex: v });
            }
        }
        let mut used = vec![false; f.regions.len()];
        for &(a, b) in &f.matching {
            if a == b {
                push(Rule::SelfPairedRegion { region: a });
                continue;
            }
            for r in [a, b] {
                if r >= f.regions.len() {
                    push(Rule::RegionOutOfRange { region: r });
                } else if used[r] {
                    push(Rule::RegionMatchedTwice { region: r });
                } else {
                    used[r] = true;
                }
            }
        }
    }
    ValidationReport { violations }
}

/// Per-qubit multisets of complete-bipartite component sizes.
///
/// Each entry `(a, b)` has `a >= b`; `b == 0` marks an unmatched region.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct SizeProfile {
    pub s: usize,
    pub qubits: Vec<Vec<(usize, usize)>>,
}

impl SizeProfile {
    pub fn new(s: usize, qubits: Vec<Vec<(usize, usize)>>) -> Self {
        let qubits = qubits
            .into_iter()
            .map(|mut comps| {
                for c in comps.iter_mut() {
                    if c.0 < c.1 {
                        *c = (c.1, c.0);
                    }
                }
                comps.sort_unstable_by(|x, y| y.cmp(x));
                comps
            })
            .collect();
        SizeProfile { s, qubits }
    }

    pub fn p(&self) -> usize {
        self.qubits.len()
    }

    /// Same profile with qubits sorted descending: equal for any two graphs
    /// that differ by a qubit permutation.
    pub fn normalized(&self) -> Self {
        let mut out = SizeProfile::new(self.s, self.qubits.clone());
        out.qubits.sort_unstable_by(|x, y| y.cmp(x));
        out
    }

    pub fn has_unmatched(&self) -> bool {
        self.qubits.iter().flatten().any(|&(_, b)| b == 0)
    }

    pub fn edge_count(&self) -> usize {
        self.qubits.iter().flatten().map(|&(a, b)| a * b).sum()
    }

    /// Compact text form, e.g. `4:11|4x3+1x1+1x1|4x1+3x3|...`.
    pub fn label(&self) -> String {
        let qubits: Vec<String> = self
            .qubits
            .iter()
            .map(|q| {
                q.iter()
                    .map(|(a, b)| format!("{a}x{b}"))
                    .collect::<Vec<_>>()
                    .join("+")
            })
            .collect();
        format!("{}:{}|{}", self.p(), self.s, qubits.join("|"))
    }
}

impl fmt::Display for SizeProfile {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, q) in self.qubits.iter().enumerate() {
            if i > 0 {
                write!(f, " / ")?;
            }
            let parts: Vec<String> = q.iter().map(|(a, b)| format!("K{{{a},{b}}}")).collect();
            write!(f, "{}", parts.join(" + "))?;
        }
        Ok(())
    }
}

/// Component-size profile of a valid graph, qubits in graph order.
pub fn profile_of(g: &OrthogonalityGraph) -> Result<SizeProfile, GraphError> {
    g.ensure_valid()?;
    Ok(SizeProfile::new(
        g.s,
        g.qubits.iter().map(|f| f.component_sizes()).collect(),
    ))
}

/// One local vector: a basis letter (`b'0'` or `b'a'..=b'z'`) and whether it
/// is the complement of that basis' reference vector. `('0', true)` is `|1>`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Debug)]
pub struct Symbol {
    pub letter: u8,
    pub complemented: bool,
}

impl Symbol {
    pub fn new(letter: u8, complemented: bool) -> Self {
        Symbol {
            letter,
            complemented,
        }
    }

    pub fn is_orthogonal_to(&self, other: &Symbol) -> bool {
        self.letter == other.letter && self.complemented != other.complemented
    }
}

/// States as per-qubit symbols. Letters are scoped per qubit position.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct SymbolicProductBasis {
    states: Vec<Vec<Symbol>>,
}

impl SymbolicProductBasis {
    pub fn new(states: Vec<Vec<Symbol>>) -> Result<Self, GraphError> {
        let expected = states.first().map_or(0, Vec::len);
        for (i, st) in states.iter().enumerate() {
            if st.len() != expected {
                return Err(GraphError::RaggedBasis {
                    state: i,
                    expected,
                    found: st.len(),
                });
            }
        }
        Ok(SymbolicProductBasis { states })
    }

    pub fn states(&self) -> &[Vec<Symbol>] {
        &self.states
    }

    pub fn s(&self) -> usize {
        self.states.len()
    }

    pub fn p(&self) -> usize {
        self.states.first().map_or(0, Vec::len)
    }
}

/// Builds the orthogonality graph: equal symbols share a region and a letter's
/// two flags form a matched pair.
pub fn graph_from_states(b: &SymbolicProductBasis) -> OrthogonalityGraph {
    let s = b.s();
    let qubits = (0..b.p())
        .map(|q| {
            let mut regions: BTreeMap<Symbol, Vec<usize>> = BTreeMap::new();
            for (v, st) in b.states.iter().enumerate() {
                regions.entry(st[q]).or_default().push(v);
            }
            let keys: Vec<Symbol> = regions.keys().copied().collect();
            let mut matching = Vec::new();
            for (i, x) in keys.iter().enumerate() {
                for (j, y) in keys.iter().enumerate().skip(i + 1) {
                    if x.is_orthogonal_to(y) {
                        matching.push((i, j));
                    }
                }
            }
            QubitFactorization::new(regions.into_values().collect(), matching)
        })
        .collect();
    OrthogonalityGraph::new(s, qubits)
}
