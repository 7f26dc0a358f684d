//! Canonical forms of orthogonality graphs under qubit permutation and vertex
//! relabeling.
//!
//! The canonical key is the compact graph record of one distinguished
//! relabeling. Candidate relabelings come from an individualization-refinement
//! tree: colors on vertices and qubits are refined to a fixpoint using
//! region/partner signatures, then the first smallest non-singleton vertex
//! cell is split by individualizing each of its members in turn. At a leaf
//! every vertex has its own color, which fixes the vertex labels; qubits are
//! then sorted by their normalized factorization. The key is the bytewise
//! smallest leaf encoding. Automorphisms found along the way (two leaves with
//! equal encodings) prune sibling branches in the same orbit.
//!
//! Signatures hash with a fixed mixing function, so keys are stable across
//! builds and platforms.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::graph::{profile_of, GraphError, OrthogonalityGraph, ValidationReport};
use crate::notation::{decode_graph, encode_graph};

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum CanonError {
    #[error("invalid graph: {0}")]
    InvalidGraph(ValidationReport),
    #[error("mixed dimensions: expected (p={expected_p}, s={expected_s}), found (p={p}, s={s})")]
    MixedDimensions {
        expected_p: usize,
        expected_s: usize,
        p: usize,
        s: usize,
    },
}

impl From<GraphError> for CanonError {
    fn from(e: GraphError) -> Self {
        match e {
            GraphError::InvalidGraph(r) => CanonError::InvalidGraph(r),
            GraphError::RaggedBasis { .. } => unreachable!("graphs are never ragged"),
        }
    }
}

/// Encoded graph record of the canonical representative.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn as_str(&self) -> &str {
        std::str::from_utf8(&self.0).expect("graph records are UTF-8")
    }

    pub fn from_string(s: String) -> Self {
        CanonicalKey(s.into_bytes())
    }

    /// The canonical representative the key describes.
    pub fn graph(&self) -> OrthogonalityGraph {
        decode_graph(&self.0).expect("canonical keys are valid graph records")
    }
}

impl fmt::Debug for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "CanonicalKey({})", self.as_str())
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

fn mix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn combine(seed: u64, x: u64) -> u64 {
    mix(seed.rotate_left(23) ^ x)
}

fn hash_seq(tag: u64, xs: &[u64]) -> u64 {
    xs.iter().fold(mix(tag ^ xs.len() as u64), |h, &x| combine(h, x))
}

const NO_PARTNER: u64 = 0x5bd1_e995_0000_0001;

struct Layered {
    s: usize,
    /// Per qubit: region index of every vertex.
    region_of: Vec<Vec<usize>>,
    regions: Vec<Vec<Vec<usize>>>,
    partners: Vec<Vec<Option<usize>>>,
}

impl Layered {
    fn new(g: &OrthogonalityGraph) -> Self {
        Layered {
            s: g.s(),
            region_of: g.qubits().iter().map(|f| f.region_of(g.s())).collect(),
            regions: g.qubits().iter().map(|f| f.regions().to_vec()).collect(),
            partners: g.qubits().iter().map(|f| f.partners()).collect(),
        }
    }

    fn p(&self) -> usize {
        self.regions.len()
    }

    /// Refines vertex and qubit colors to a fixpoint. Colors are ranks
    /// `0..k`, refinements of the input colors.
    fn refine(&self, vcol: &mut Vec<u32>, qcol: &mut Vec<u32>) {
        let mut nv = count_colors(vcol);
        let mut nq = count_colors(qcol);
        let mut buf = Vec::new();
        loop {
            let regsig: Vec<Vec<u64>> = self
                .regions
                .iter()
                .enumerate()
                .map(|(q, regs)| {
                    regs.iter()
                        .map(|r| {
                            buf.clear();
                            buf.extend(r.iter().map(|&v| vcol[v] as u64));
                            buf.sort_unstable();
                            hash_seq(qcol[q] as u64, &buf)
                        })
                        .collect()
                })
                .collect();
            let vsig: Vec<u64> = (0..self.s)
                .map(|v| {
                    let mut per_q: Vec<u64> = (0..self.p())
                        .map(|q| {
                            let r = self.region_of[q][v];
                            let own = regsig[q][r];
                            let other = self.partners[q][r].map_or(NO_PARTNER, |pr| regsig[q][pr]);
                            combine(combine(qcol[q] as u64, own), other)
                        })
                        .collect();
                    per_q.sort_unstable();
                    hash_seq(1, &per_q)
                })
                .collect();
            let qsig: Vec<u64> = (0..self.p())
                .map(|q| {
                    let mut comps: Vec<u64> = Vec::new();
                    for (r, &sig) in regsig[q].iter().enumerate() {
                        match self.partners[q][r] {
                            Some(pr) if pr > r => {
                                let o = regsig[q][pr];
                                comps.push(combine(sig.min(o), sig.max(o)));
                            }
                            Some(_) => {}
                            None => comps.push(combine(sig, NO_PARTNER)),
                        }
                    }
                    comps.sort_unstable();
                    hash_seq(2, &comps)
                })
                .collect();
            let new_v = rerank(vcol, &vsig);
            let new_q = rerank(qcol, &qsig);
            *vcol = new_v;
            *qcol = new_q;
            let (mv, mq) = (count_colors(vcol), count_colors(qcol));
            if mv == nv && mq == nq {
                return;
            }
            nv = mv;
            nq = mq;
        }
    }

    /// Encoding of the relabeling in which vertex `v` becomes `vcol[v]`
    /// (a permutation), with qubits sorted.
    fn leaf_encoding(&self, g: &OrthogonalityGraph, vcol: &[u32]) -> (Vec<u8>, OrthogonalityGraph) {
        let perm: Vec<usize> = vcol.iter().map(|&c| c as usize).collect();
        let ident: Vec<usize> = (0..self.p()).collect();
        let h = g.relabel(&perm, &ident);
        let mut qubits = h.into_qubits();
        qubits.sort();
        let h = OrthogonalityGraph::new(self.s, qubits);
        (encode_graph(&h), h)
    }
}

fn count_colors(c: &[u32]) -> usize {
    let mut seen: Vec<u32> = c.to_vec();
    seen.sort_unstable();
    seen.dedup();
    seen.len()
}

fn rerank(old: &[u32], sig: &[u64]) -> Vec<u32> {
    let mut keys: Vec<(u32, u64)> = old.iter().copied().zip(sig.iter().copied()).collect();
    let mut sorted = keys.clone();
    sorted.sort_unstable();
    sorted.dedup();
    keys.iter_mut()
        .map(|k| sorted.binary_search(k).expect("key present") as u32)
        .collect()
}

struct Search<'a> {
    g: &'a OrthogonalityGraph,
    layered: Layered,
    best: Option<Vec<u8>>,
    /// Vertex permutation of the leaf achieving `best`.
    best_perm: Vec<u32>,
    automorphisms: Vec<Vec<usize>>,
}

impl Search<'_> {
    fn descend(&mut self, vcol: Vec<u32>, qcol: Vec<u32>, prefix: &mut Vec<usize>) {
        let s = self.layered.s;
        // Cells grouped by color.
        let mut cells: BTreeMap<u32, Vec<usize>> = BTreeMap::new();
        for v in 0..s {
            cells.entry(vcol[v]).or_default().push(v);
        }
        let target = cells
            .values()
            .filter(|c| c.len() > 1)
            .min_by_key(|c| c.len())
            .cloned();
        let Some(cell) = target else {
            let (enc, _) = self.layered.leaf_encoding(self.g, &vcol);
            match &self.best {
                Some(b) if *b == enc => {
                    // v -> best^{-1}(leaf(v)) is an automorphism.
                    let mut inv = vec![0usize; s];
                    for (v, &c) in self.best_perm.iter().enumerate() {
                        inv[c as usize] = v;
                    }
                    let auto: Vec<usize> = vcol.iter().map(|&c| inv[c as usize]).collect();
                    if auto.iter().enumerate().any(|(i, &x)| i != x) {
                        self.automorphisms.push(auto);
                    }
                }
                Some(b) if *b < enc => {}
                _ => {
                    self.best = Some(enc);
                    self.best_perm = vcol;
                }
            }
            return;
        };
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.same_orbit(prefix, &explored, v) {
                continue;
            }
            explored.push(v);
            let mut child_v = vcol.clone();
            let key: Vec<(u32, bool)> = (0..s).map(|x| (vcol[x], x != v)).collect();
            let mut sorted = key.clone();
            sorted.sort_unstable();
            sorted.dedup();
            for x in 0..s {
                child_v[x] = sorted.binary_search(&key[x]).unwrap() as u32;
            }
            let mut child_q = qcol.clone();
            self.layered.refine(&mut child_v, &mut child_q);
            prefix.push(v);
            self.descend(child_v, child_q, prefix);
            prefix.pop();
        }
    }

    /// Whether `v` lies in the orbit of an explored vertex under the
    /// automorphisms found so far that fix `prefix` pointwise.
    fn same_orbit(&self, prefix: &[usize], explored: &[usize], v: usize) -> bool {
        let gens: Vec<&Vec<usize>> = self
            .automorphisms
            .iter()
            .filter(|a| prefix.iter().all(|&x| a[x] == x))
            .collect();
        if gens.is_empty() {
            return false;
        }
        let s = self.layered.s;
        let mut parent: Vec<usize> = (0..s).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        for a in gens {
            for x in 0..s {
                let (rx, ry) = (find(&mut parent, x), find(&mut parent, a[x]));
                if rx != ry {
                    parent[rx] = ry;
                }
            }
        }
        let rv = find(&mut parent, v);
        explored.iter().any(|&e| find(&mut parent, e) == rv)
    }
}

/// Canonical key of a valid graph.
pub fn canonical_key(g: &OrthogonalityGraph) -> Result<CanonicalKey, CanonError> {
    g.ensure_valid()?;
    Ok(canonical_key_unchecked(g))
}

pub(crate) fn canonical_key_unchecked(g: &OrthogonalityGraph) -> CanonicalKey {
    let layered = Layered::new(g);
    let mut vcol = vec![0u32; g.s()];
    let mut qcol = vec![0u32; g.p()];
    layered.refine(&mut vcol, &mut qcol);
    let mut search = Search {
        g,
        layered,
        best: None,
        best_perm: Vec::new(),
        automorphisms: Vec::new(),
    };
    search.descend(vcol, qcol, &mut Vec::new());
    CanonicalKey(search.best.expect("search reaches at least one leaf"))
}

/// The canonical representative itself.
pub fn canonical_form(g: &OrthogonalityGraph) -> Result<OrthogonalityGraph, CanonError> {
    Ok(canonical_key(g)?.graph())
}

pub fn are_equivalent(g1: &OrthogonalityGraph, g2: &OrthogonalityGraph) -> Result<bool, CanonError> {
    g1.ensure_valid()?;
    g2.ensure_valid()?;
    if g1.p() != g2.p() || g1.s() != g2.s() {
        return Ok(false);
    }
    let (a, b) = (profile_of(g1)?.normalized(), profile_of(g2)?.normalized());
    if a != b {
        return Ok(false);
    }
    Ok(canonical_key_unchecked(g1) == canonical_key_unchecked(g2))
}

/// One equivalence class from [`dedupe`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DedupeClass {
    pub key: CanonicalKey,
    /// First member of the class in input order.
    pub representative: OrthogonalityGraph,
    pub multiplicity: usize,
}

/// Groups graphs by canonical key; output sorted by key.
pub fn dedupe(
    graphs: impl IntoIterator<Item = OrthogonalityGraph>,
) -> Result<Vec<DedupeClass>, CanonError> {
    let graphs: Vec<OrthogonalityGraph> = graphs.into_iter().collect();
    dedupe_keyed(graphs.into_iter().map(|g| {
        let key = canonical_key(&g)?;
        Ok((key, g))
    }))
}

/// Like [`dedupe`] but with keys already computed (possibly in parallel).
pub fn dedupe_keyed(
    items: impl IntoIterator<Item = Result<(CanonicalKey, OrthogonalityGraph), CanonError>>,
) -> Result<Vec<DedupeClass>, CanonError> {
    let mut dims: Option<(usize, usize)> = None;
    let mut classes: BTreeMap<CanonicalKey, DedupeClass> = BTreeMap::new();
    for item in items {
        let (key, g) = item?;
        match dims {
            None => dims = Some((g.p(), g.s())),
            Some((p, s)) if p != g.p() || s != g.s() => {
                return Err(CanonError::MixedDimensions {
                    expected_p: p,
                    expected_s: s,
                    p: g.p(),
                    s: g.s(),
                })
            }
            _ => {}
        }
        classes
            .entry(key.clone())
            .and_modify(|c| c.multiplicity += 1)
            .or_insert(DedupeClass {
                key,
                representative: g,
                multiplicity: 1,
            });
    }
    Ok(classes.into_values().collect())
}
