//! Joining two `p`-qubit UPBs into a `(p+1)`-qubit UPB: the first set gets
//! `|0>` on a new last qubit, the second gets `|1>`.

use std::collections::{BTreeMap, BTreeSet};

use itertools::Itertools;

use super::ConstructError;
use crate::checker::classify;
use crate::graph::{
    graph_from_states, OrthogonalityGraph, QubitFactorization, Symbol, SymbolicProductBasis,
};

/// States of `u2` whose local vector on `qubit` (region `u2_region`) is the
/// same as `u1`'s region `u1_region`, or its complement.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Identification {
    pub qubit: usize,
    pub u2_region: usize,
    pub u1_region: usize,
    pub complement: bool,
}

/// Local vectors shared between the two inputs. By default every local
/// vector of the second input is new.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BasisSharing {
    pub identifications: Vec<Identification>,
}

fn check_inputs(g1: &OrthogonalityGraph, g2: &OrthogonalityGraph) -> Result<(), ConstructError> {
    if g1.p() != g2.p() {
        return Err(ConstructError::DimensionMismatch {
            p1: g1.p(),
            p2: g2.p(),
        });
    }
    if !classify(g1).is_upb() {
        return Err(ConstructError::NotAUpb { which: 1 });
    }
    if !classify(g2).is_upb() {
        return Err(ConstructError::NotAUpb { which: 2 });
    }
    Ok(())
}

pub fn combine(g1: &OrthogonalityGraph, g2: &OrthogonalityGraph) -> Result<OrthogonalityGraph, ConstructError> {
    combine_with_sharing(g1, g2, &BasisSharing::default())
}

/// The states in `vertices` (in that order) with qubit `drop` removed.
/// Regions that lose all their states disappear, and so do matchings that
/// lose a side.
pub fn restrict(g: &OrthogonalityGraph, vertices: &[usize], drop: usize) -> OrthogonalityGraph {
    let mut new_index = vec![usize::MAX; g.s()];
    for (i, &v) in vertices.iter().enumerate() {
        new_index[v] = i;
    }
    let qubits = (0..g.p())
        .filter(|&q| q != drop)
        .map(|q| {
            let f = g.qubit(q);
            let mut kept = vec![usize::MAX; f.regions().len()];
            let mut regions = Vec::new();
            for (r, region) in f.regions().iter().enumerate() {
                let members: Vec<usize> = region
                    .iter()
                    .map(|&v| new_index[v])
                    .filter(|&i| i != usize::MAX)
                    .collect();
                if !members.is_empty() {
                    kept[r] = regions.len();
                    regions.push(members);
                }
            }
            let matching = f
                .matching()
                .iter()
                .filter(|&&(x, y)| kept[x] != usize::MAX && kept[y] != usize::MAX)
                .map(|&(x, y)| (kept[x], kept[y]))
                .collect();
            QubitFactorization::new(regions, matching)
        })
        .collect();
    OrthogonalityGraph::new(vertices.len(), qubits)
}

/// Undoes [`combine`] along qubit `q`: when `q` uses a single basis, the
/// states on each side of it (with `q` removed) form the two smaller sets.
pub fn uncombine(g: &OrthogonalityGraph, q: usize) -> Option<(OrthogonalityGraph, OrthogonalityGraph)> {
    let f = g.qubit(q);
    if f.regions().len() != 2 || f.matching().len() != 1 {
        return None;
    }
    let (a, b) = f.matching()[0];
    Some((restrict(g, &f.regions()[a], q), restrict(g, &f.regions()[b], q)))
}

struct ParityUnionFind {
    parent: Vec<usize>,
    parity: Vec<bool>,
}

impl ParityUnionFind {
    fn new(n: usize) -> Self {
        ParityUnionFind {
            parent: (0..n).collect(),
            parity: vec![false; n],
        }
    }

    /// Root and parity of `x` relative to it.
    fn find(&mut self, x: usize) -> (usize, bool) {
        if self.parent[x] == x {
            return (x, false);
        }
        let (root, par) = self.find(self.parent[x]);
        self.parent[x] = root;
        self.parity[x] ^= par;
        (root, self.parity[x])
    }

    /// Records `value(x) = value(y) ^ rel`; false on contradiction.
    fn union(&mut self, x: usize, y: usize, rel: bool) -> bool {
        let (rx, px) = self.find(x);
        let (ry, py) = self.find(y);
        if rx == ry {
            return px ^ py == rel;
        }
        self.parent[rx] = ry;
        self.parity[rx] = px ^ py ^ rel;
        true
    }
}

/// Letter and flag per region: matched regions share a letter.
fn letters(f: &QubitFactorization, offset: usize) -> (Vec<(usize, bool)>, usize) {
    let partners = f.partners();
    let mut out = vec![(0, false); f.regions().len()];
    let mut next = offset;
    for r in 0..f.regions().len() {
        match partners[r] {
            Some(pr) if pr < r => out[r] = (out[pr].0, true),
            _ => {
                out[r] = (next, false);
                next += 1;
            }
        }
    }
    (out, next)
}

pub fn combine_with_sharing(
    g1: &OrthogonalityGraph,
    g2: &OrthogonalityGraph,
    sharing: &BasisSharing,
) -> Result<OrthogonalityGraph, ConstructError> {
    check_inputs(g1, g2)?;
    let (s1, s2) = (g1.s(), g2.s());
    let mut qubits = Vec::with_capacity(g1.p() + 1);
    for q in 0..g1.p() {
        let (f1, f2) = (g1.qubit(q), g2.qubit(q));
        let (l1, n1) = letters(f1, 0);
        let (l2, n2) = letters(f2, n1);
        let mut uf = ParityUnionFind::new(n2);
        for id in sharing.identifications.iter().filter(|id| id.qubit == q) {
            let bad = |reason: &str| ConstructError::InconsistentSharing {
                qubit: q,
                reason: reason.to_string(),
            };
            if id.u1_region >= l1.len() || id.u2_region >= l2.len() {
                return Err(bad("region index out of range"));
            }
            let (a, fa) = l1[id.u1_region];
            let (b, fb) = l2[id.u2_region];
            if !uf.union(b, a, fa ^ fb ^ id.complement) {
                return Err(bad("contradictory identifications"));
            }
        }
        // (root letter, flag) -> (u1 region, u2 region)
        let mut groups: BTreeMap<(usize, bool), (Option<usize>, Option<usize>)> = BTreeMap::new();
        for (side, lets) in [(0usize, &l1), (1, &l2)] {
            for (r, &(letter, flag)) in lets.iter().enumerate() {
                let (root, par) = uf.find(letter);
                let slot = groups.entry((root, flag ^ par)).or_default();
                let cell = if side == 0 { &mut slot.0 } else { &mut slot.1 };
                if cell.is_some() {
                    return Err(ConstructError::InconsistentSharing {
                        qubit: q,
                        reason: format!("two regions of input {} would coincide", side + 1),
                    });
                }
                *cell = Some(r);
            }
        }
        // Orthogonality inside one input must not change.
        let roots: BTreeSet<usize> = groups.keys().map(|k| k.0).collect();
        for &root in &roots {
            let (Some(x), Some(y)) = (groups.get(&(root, false)), groups.get(&(root, true))) else {
                continue;
            };
            for (side, f, a, b) in [(1, f1, x.0, y.0), (2, f2, x.1, y.1)] {
                if let (Some(a), Some(b)) = (a, b) {
                    if f.partner(a) != Some(b) {
                        return Err(ConstructError::InconsistentSharing {
                            qubit: q,
                            reason: format!("input {side} would gain orthogonal regions"),
                        });
                    }
                }
            }
        }
        let mut regions = Vec::new();
        let mut index = BTreeMap::new();
        for (&key, &(a, b)) in &groups {
            let mut verts: Vec<usize> = Vec::new();
            if let Some(a) = a {
                verts.extend(&f1.regions()[a]);
            }
            if let Some(b) = b {
                verts.extend(f2.regions()[b].iter().map(|&v| v + s1));
            }
            index.insert(key, regions.len());
            regions.push(verts);
        }
        let matching = roots
            .iter()
            .filter_map(|&root| Some((*index.get(&(root, false))?, *index.get(&(root, true))?)))
            .collect();
        qubits.push(QubitFactorization::new(regions, matching));
    }
    qubits.push(QubitFactorization::new(
        vec![(0..s1).collect(), (s1..s1 + s2).collect()],
        vec![(0, 1)],
    ));
    let g = OrthogonalityGraph::new(s1 + s2, qubits);
    debug_assert!(g.validate().is_ok());
    Ok(g)
}

/// Literal join of two symbolic bases: equal letters on a qubit denote the
/// same basis in both inputs.
pub fn combine_bases(
    b1: &SymbolicProductBasis,
    b2: &SymbolicProductBasis,
) -> Result<SymbolicProductBasis, ConstructError> {
    check_inputs(&graph_from_states(b1), &graph_from_states(b2))?;
    Ok(join(b1, b2))
}

fn join(b1: &SymbolicProductBasis, b2: &SymbolicProductBasis) -> SymbolicProductBasis {
    let mut states = Vec::with_capacity(b1.s() + b2.s());
    for (b, flag) in [(b1, false), (b2, true)] {
        for st in b.states() {
            let mut st = st.clone();
            st.push(Symbol::new(b'0', flag));
            states.push(st);
        }
    }
    SymbolicProductBasis::new(states).expect("equal qubit counts")
}

fn letters_on(b: &SymbolicProductBasis, q: usize) -> Vec<u8> {
    b.states().iter().map(|st| st[q].letter).unique().sorted().collect()
}

/// Every way to renames `b2`'s letters on one qubit: each letter maps to a
/// distinct letter of `b1` (possibly complemented) or to a fresh letter.
fn letter_maps(l2: &[u8], l1: &[u8]) -> Vec<Vec<(u8, bool)>> {
    let fresh: Vec<u8> = (b'a'..=b'z').filter(|c| !l1.contains(c)).collect();
    let mut out = Vec::new();
    let mut current = Vec::new();
    fn rec(
        i: usize,
        l2: &[u8],
        l1: &[u8],
        fresh: &[u8],
        used: &mut Vec<bool>,
        fresh_used: usize,
        current: &mut Vec<(u8, bool)>,
        out: &mut Vec<Vec<(u8, bool)>>,
    ) {
        if i == l2.len() {
            out.push(current.clone());
            return;
        }
        current.push((fresh[fresh_used], false));
        rec(i + 1, l2, l1, fresh, used, fresh_used + 1, current, out);
        current.pop();
        for j in 0..l1.len() {
            if used[j] {
                continue;
            }
            used[j] = true;
            for flip in [false, true] {
                current.push((l1[j], flip));
                rec(i + 1, l2, l1, fresh, used, fresh_used, current, out);
                current.pop();
            }
            used[j] = false;
        }
    }
    rec(0, l2, l1, &fresh, &mut vec![false; l1.len()], 0, &mut current, &mut out);
    out
}

/// Graphs of all joins of `b1` with copies of `b2` whose qubits are permuted
/// and whose bases are identified with `b1`'s in every consistent way. The
/// result contains duplicates; deduplicate with [`crate::canon::dedupe`].
pub fn combine_variants(
    b1: &SymbolicProductBasis,
    b2: &SymbolicProductBasis,
) -> Result<Vec<OrthogonalityGraph>, ConstructError> {
    check_inputs(&graph_from_states(b1), &graph_from_states(b2))?;
    let p = b1.p();
    let mut out = Vec::new();
    for perm in (0..p).permutations(p) {
        let permuted = SymbolicProductBasis::new(
            b2.states()
                .iter()
                .map(|st| perm.iter().map(|&q| st[q]).collect())
                .collect(),
        )
        .expect("rectangular");
        let per_qubit: Vec<(Vec<u8>, Vec<Vec<(u8, bool)>>)> = (0..p)
            .map(|q| {
                let l2 = letters_on(&permuted, q);
                let maps = letter_maps(&l2, &letters_on(b1, q));
                (l2, maps)
            })
            .collect();
        for choice in per_qubit.iter().map(|(_, m)| 0..m.len()).multi_cartesian_product() {
            let renamed = SymbolicProductBasis::new(
                permuted
                    .states()
                    .iter()
                    .map(|st| {
                        st.iter()
                            .enumerate()
                            .map(|(q, sym)| {
                                let (l2, maps) = &per_qubit[q];
                                let k = l2.iter().position(|&l| l == sym.letter).unwrap();
                                let (letter, flip) = maps[choice[q]][k];
                                Symbol::new(letter, sym.complemented ^ flip)
                            })
                            .collect()
                    })
                    .collect(),
            )
            .expect("rectangular");
            out.push(graph_from_states(&join(b1, &renamed)));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canon::dedupe;
    use crate::construct::{shifts, standard_basis};
    use crate::fixtures;
    use crate::notation::{format_basis, parse_basis};

    #[test]
    fn literal_join_of_shifts_gives_first_eight_state_family_member() {
        let b = combine_bases(&shifts(), &shifts()).unwrap();
        assert_eq!(format_basis(&b), fixtures::UPBS[3].ket);
    }

    #[test]
    fn graph_join_without_sharing_uses_only_new_bases() {
        let g = combine(&graph_from_states(&shifts()), &graph_from_states(&shifts())).unwrap();
        assert!(classify(&g).is_upb());
        assert_eq!((g.p(), g.s()), (4, 8));
        // Each copy keeps its own regions on the old qubits.
        for q in 0..3 {
            assert_eq!(g.qubit(q).regions().len(), 8);
        }
        for fixture in [&fixtures::UPBS[3], &fixtures::UPBS[4]] {
            let h = graph_from_states(&parse_basis(fixture.ket).unwrap());
            assert!(!crate::canon::are_equivalent(&g, &h).unwrap());
        }
    }

    #[test]
    fn sharing_reproduces_literal_join() {
        let g1 = graph_from_states(&shifts());
        // Shifts uses one basis per qubit; identify both copies' bases.
        let sharing = BasisSharing {
            identifications: (0..3)
                .flat_map(|q| {
                    let f = g1.qubit(q);
                    f.matching()
                        .iter()
                        .map(move |&(a, _)| Identification {
                            qubit: q,
                            u2_region: a,
                            u1_region: a,
                            complement: false,
                        })
                        .collect::<Vec<_>>()
                })
                .collect(),
        };
        let g = combine_with_sharing(&g1, &g1, &sharing).unwrap();
        let literal = graph_from_states(&combine_bases(&shifts(), &shifts()).unwrap());
        assert!(crate::canon::are_equivalent(&g, &literal).unwrap());
    }

    #[test]
    fn contradictory_sharing_is_rejected() {
        let g1 = graph_from_states(&shifts());
        let sharing = BasisSharing {
            identifications: vec![
                Identification { qubit: 0, u2_region: 0, u1_region: 0, complement: false },
                Identification { qubit: 0, u2_region: 0, u1_region: 0, complement: true },
            ],
        };
        assert!(matches!(
            combine_with_sharing(&g1, &g1, &sharing),
            Err(ConstructError::InconsistentSharing { qubit: 0, .. })
        ));
    }

    #[test]
    fn non_upb_input_rejected() {
        let bad = parse_basis("000,1aA,A1a").unwrap();
        assert_eq!(
            combine_bases(&shifts(), &bad),
            Err(ConstructError::NotAUpb { which: 2 })
        );
        assert_eq!(
            combine_bases(&shifts(), &standard_basis(2)),
            Err(ConstructError::DimensionMismatch { p1: 3, p2: 2 })
        );
    }

    #[test]
    fn standard_join_variants() {
        let b = standard_basis(2);
        let classes = dedupe(combine_variants(&b, &b).unwrap()).unwrap();
        for c in &classes {
            assert!(classify(&c.representative).is_upb());
        }
        // Shared basis on both qubits gives the standard 3-qubit basis.
        assert!(classes.len() >= 2);
    }

    #[test]
    fn uncombine_recovers_inputs() {
        let sh = graph_from_states(&shifts());
        let g = combine(&sh, &sh).unwrap();
        assert!(uncombine(&g, 0).is_none());
        let (a, b) = uncombine(&g, 3).unwrap();
        assert!(crate::canon::are_equivalent(&a, &sh).unwrap());
        assert!(crate::canon::are_equivalent(&b, &sh).unwrap());
    }

    #[test]
    fn restrict_keeps_surviving_structure() {
        let g = graph_from_states(&parse_basis("000,1aA,A1a,aA1").unwrap());
        let h = restrict(&g, &[0, 1], 1);
        assert_eq!((h.p(), h.s()), (2, 2));
        // 000 and 1aA are orthogonal on the first qubit only.
        assert!(h.adjacent_on(0, 0, 1));
        assert!(!h.adjacent_on(1, 0, 1));
    }
}
