//! Slow, obviously-correct reference implementations shared by the
//! integration tests.

#![allow(dead_code)]

use itertools::Itertools;
use rand::seq::SliceRandom;
use rand::Rng;

use upb_core::graph::graph_from_states;
use upb_core::notation::{encode_graph, parse_basis};
use upb_core::{OrthogonalityGraph, QubitFactorization};

pub fn graph(ket: &str) -> OrthogonalityGraph {
    graph_from_states(&parse_basis(ket).expect("fixture parses"))
}

/// Whether choosing at most one region per qubit can cover every state, by
/// trying every selection.
pub fn naive_extendible(g: &OrthogonalityGraph) -> bool {
    let options: Vec<Vec<u64>> = g
        .qubits()
        .iter()
        .map(|f| {
            let mut masks: Vec<u64> = f
                .regions()
                .iter()
                .map(|r| r.iter().fold(0u64, |m, &v| m | 1 << v))
                .collect();
            masks.push(0);
            masks
        })
        .collect();
    let full = if g.s() == 64 { u64::MAX } else { (1u64 << g.s()) - 1 };
    options
        .iter()
        .multi_cartesian_product()
        .any(|choice| choice.into_iter().fold(0, |m, &x| m | x) == full)
        || (g.p() == 0 && g.s() == 0)
}

/// Whether every pair of states is orthogonal on some qubit, pair by pair.
pub fn naive_orthogonal(g: &OrthogonalityGraph) -> bool {
    (0..g.s())
        .tuple_combinations()
        .all(|(u, v)| (0..g.p()).any(|q| g.adjacent_on(q, u, v)))
}

/// Every set partition of `0..n`, blocks listed by smallest element.
pub fn set_partitions(n: usize) -> Vec<Vec<Vec<usize>>> {
    let mut out = Vec::new();
    fn rec(v: usize, n: usize, blocks: &mut Vec<Vec<usize>>, out: &mut Vec<Vec<Vec<usize>>>) {
        if v == n {
            out.push(blocks.clone());
            return;
        }
        for b in 0..blocks.len() {
            blocks[b].push(v);
            rec(v + 1, n, blocks, out);
            blocks[b].pop();
        }
        blocks.push(vec![v]);
        rec(v + 1, n, blocks, out);
        blocks.pop();
    }
    rec(0, n, &mut Vec::new(), &mut out);
    out
}

/// Every partial matching on `0..k`.
pub fn partial_matchings(k: usize) -> Vec<Vec<(usize, usize)>> {
    let mut out = Vec::new();
    fn rec(i: usize, k: usize, used: &mut Vec<bool>, cur: &mut Vec<(usize, usize)>, out: &mut Vec<Vec<(usize, usize)>>) {
        if i == k {
            out.push(cur.clone());
            return;
        }
        if used[i] {
            rec(i + 1, k, used, cur, out);
            return;
        }
        rec(i + 1, k, used, cur, out);
        used[i] = true;
        for j in i + 1..k {
            if !used[j] {
                used[j] = true;
                cur.push((i, j));
                rec(i + 1, k, used, cur, out);
                cur.pop();
                used[j] = false;
            }
        }
        used[i] = false;
    }
    rec(0, k, &mut vec![false; k], &mut Vec::new(), &mut out);
    out
}

/// Every factorization of one qubit over `s` labelled states.
pub fn all_factorizations(s: usize) -> Vec<QubitFactorization> {
    let mut out = Vec::new();
    for blocks in set_partitions(s) {
        for m in partial_matchings(blocks.len()) {
            out.push(QubitFactorization::new(blocks.clone(), m));
        }
    }
    out
}

/// A random factorization: random block labels, random partial matching.
pub fn random_factorization(rng: &mut impl Rng, s: usize) -> QubitFactorization {
    let k = rng.gen_range(1..=s);
    let labels: Vec<usize> = (0..s).map(|_| rng.gen_range(0..k)).collect();
    let regions: Vec<Vec<usize>> = (0..k)
        .map(|b| (0..s).filter(|&v| labels[v] == b).collect::<Vec<_>>())
        .filter(|r| !r.is_empty())
        .collect();
    let mut order: Vec<usize> = (0..regions.len()).collect();
    order.shuffle(rng);
    let matching = order
        .chunks(2)
        .filter(|c| c.len() == 2 && rng.gen_bool(0.8))
        .map(|c| (c[0], c[1]))
        .collect();
    QubitFactorization::new(regions, matching)
}

pub fn random_graph(rng: &mut impl Rng, s: usize, p: usize) -> OrthogonalityGraph {
    OrthogonalityGraph::new(s, (0..p).map(|_| random_factorization(rng, s)).collect())
}

pub fn random_relabeling(rng: &mut impl Rng, g: &OrthogonalityGraph) -> OrthogonalityGraph {
    let mut vp: Vec<usize> = (0..g.s()).collect();
    let mut qp: Vec<usize> = (0..g.p()).collect();
    vp.shuffle(rng);
    qp.shuffle(rng);
    g.relabel(&vp, &qp)
}

/// Smallest encoding over all `s! * p!` relabelings.
pub fn naive_canonical(g: &OrthogonalityGraph) -> Vec<u8> {
    let (s, p) = (g.s(), g.p());
    let qperms: Vec<Vec<usize>> = (0..p).permutations(p).collect();
    (0..s)
        .permutations(s)
        .flat_map(|vp| qperms.iter().map(move |qp| encode_graph(&g.relabel(&vp, qp))))
        .min()
        .expect("at least one relabeling")
}

/// Plain backtracking isomorphism test on the per-qubit orthogonality and
/// same-region relations.
pub fn isomorphic(g1: &OrthogonalityGraph, g2: &OrthogonalityGraph) -> bool {
    if (g1.p(), g1.s()) != (g2.p(), g2.s()) {
        return false;
    }
    let (p, s) = (g1.p(), g1.s());
    // 0: different unrelated regions, 1: same region, 2: orthogonal.
    let rel = |g: &OrthogonalityGraph| -> Vec<Vec<Vec<u8>>> {
        (0..p)
            .map(|q| {
                let region = g.qubit(q).region_of(s);
                (0..s)
                    .map(|u| {
                        (0..s)
                            .map(|v| match (g.adjacent_on(q, u, v), region[u] == region[v]) {
                                (true, _) => 2,
                                (false, true) => 1,
                                (false, false) => 0,
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect()
    };
    let (a1, a2) = (rel(g1), rel(g2));
    fn extend(a1: &[Vec<Vec<u8>>], a2: &[Vec<Vec<u8>>], pi: &[usize], map: &mut Vec<usize>, used: &mut [bool]) -> bool {
        let u = map.len();
        if u == used.len() {
            return true;
        }
        for t in 0..used.len() {
            if used[t] || (0..u).any(|w| (0..pi.len()).any(|q| a1[q][u][w] != a2[pi[q]][t][map[w]])) {
                continue;
            }
            map.push(t);
            used[t] = true;
            if extend(a1, a2, pi, map, used) {
                return true;
            }
            map.pop();
            used[t] = false;
        }
        false
    }
    (0..p)
        .permutations(p)
        .any(|pi| extend(&a1, &a2, &pi, &mut Vec::new(), &mut vec![false; s]))
}
