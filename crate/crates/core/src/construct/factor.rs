//! UPBs whose size is a multiple of four: 1-factorizations of complete graphs,
//! qubit splitting, and the recursion through [`super::combine`].

use std::collections::HashMap;

use super::{combine, ConstructError};
use crate::checker::classify;
use crate::graph::{graph_from_states, OrthogonalityGraph, QubitFactorization};
use crate::notation::parse_basis;

/// `n - 1` perfect matchings of `K_n` that together use every edge once.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Factorization1 {
    pub n: usize,
    pub matchings: Vec<Vec<(usize, usize)>>,
}

/// Circle method: vertex `n - 1` sits in the middle, the others on a circle;
/// round `r` pairs `r` with the center and `r + i` with `r - i`.
pub fn one_factorization(n: usize) -> Result<Factorization1, ConstructError> {
    if n == 0 || n % 2 == 1 {
        return Err(ConstructError::OddOrder { n });
    }
    let m = n - 1;
    let matchings = (0..m)
        .map(|r| {
            let mut edges = vec![(r.min(m), r.max(m))];
            for i in 1..n / 2 {
                let a = (r + i) % m;
                let b = (r + m - i) % m;
                edges.push((a.min(b), a.max(b)));
            }
            edges.sort_unstable();
            edges
        })
        .collect();
    Ok(Factorization1 { n, matchings })
}

/// Replaces qubit `q`, whose components must all be `K_{2,2}`, by two qubits.
/// A component with sides `{u1, u2}` and `{w1, w2}` becomes `u1-w1, u2-w2` on
/// the first new qubit and `u1-w2, u2-w1` on the second, all regions
/// singletons.
pub fn split_qubit(g: &OrthogonalityGraph, q: usize) -> Result<OrthogonalityGraph, ConstructError> {
    if q >= g.p() {
        return Err(ConstructError::BadArguments(format!(
            "qubit {q} out of range for p={}",
            g.p()
        )));
    }
    let f = g.qubit(q);
    for comp in f.component_sizes() {
        if comp != (2, 2) {
            return Err(ConstructError::NotSplittable {
                qubit: q,
                component: comp,
            });
        }
    }
    let (mut x_regions, mut x_matching) = (Vec::new(), Vec::new());
    let (mut y_regions, mut y_matching) = (Vec::new(), Vec::new());
    for &(a, b) in f.matching() {
        let (u, w) = (&f.regions()[a], &f.regions()[b]);
        let base = x_regions.len();
        for v in [u[0], u[1], w[0], w[1]] {
            x_regions.push(vec![v]);
            y_regions.push(vec![v]);
        }
        x_matching.push((base, base + 2));
        x_matching.push((base + 1, base + 3));
        y_matching.push((base, base + 3));
        y_matching.push((base + 1, base + 2));
    }
    let mut qubits = g.qubits().to_vec();
    qubits[q] = QubitFactorization::new(x_regions, x_matching);
    qubits.insert(q + 1, QubitFactorization::new(y_regions, y_matching));
    Ok(OrthogonalityGraph::new(g.s(), qubits))
}

/// `s = 2p` with `p` even: one qubit of `p` orthogonal pairs of states and
/// `p - 1` qubits wiring those pairs by a 1-factorization of `K_p`.
fn paired_construction(p: usize) -> Result<OrthogonalityGraph, ConstructError> {
    let s = 2 * p;
    let mut qubits = vec![QubitFactorization::new(
        (0..s).map(|v| vec![v]).collect(),
        (0..p).map(|i| (2 * i, 2 * i + 1)).collect(),
    )];
    for m in one_factorization(p)?.matchings {
        let mut regions = Vec::new();
        let mut matching = Vec::new();
        for (x, y) in m {
            regions.push(vec![2 * x, 2 * x + 1]);
            regions.push(vec![2 * y, 2 * y + 1]);
            matching.push((regions.len() - 2, regions.len() - 1));
        }
        qubits.push(QubitFactorization::new(regions, matching));
    }
    Ok(OrthogonalityGraph::new(s, qubits))
}

fn six_state_four_qubit() -> OrthogonalityGraph {
    let ket = crate::fixtures::UPBS
        .iter()
        .find(|f| f.name == "4q6")
        .expect("fixture present")
        .ket;
    graph_from_states(&parse_basis(ket).expect("fixture parses"))
}

fn is_exception(p: usize, s: usize) -> bool {
    p % 4 == 1 && s == 2 * p + 2
}

/// Whether the recursion can build `(p, s)`; memoized split choice.
fn plan(p: usize, s: usize, memo: &mut HashMap<(usize, usize), Option<usize>>) -> Option<usize> {
    if let Some(&r) = memo.get(&(p, s)) {
        return r;
    }
    let result = if !s.is_multiple_of(4) || s < p + 1 || p >= 63 || s > 1usize << p {
        None
    } else if s <= 2 * p || (p == 5 && s == 12) {
        Some(0)
    } else {
        // Largest first part that works.
        let hi = s - 4;
        (4..=hi)
            .rev()
            .step_by(4)
            .filter(|&s1| s1 % 4 == 0)
            .find(|&s1| {
                let s2 = s - s1;
                plan(p - 1, s1, memo).is_some() && plan(p - 1, s2, memo).is_some()
            })
    };
    memo.insert((p, s), result);
    result
}

fn build(p: usize, s: usize, memo: &mut HashMap<(usize, usize), Option<usize>>) -> Result<OrthogonalityGraph, ConstructError> {
    if p == 5 && s == 12 {
        let g6 = six_state_four_qubit();
        return combine(&g6, &g6);
    }
    if s == 2 * p {
        return paired_construction(p);
    }
    if s < 2 * p {
        let p0 = s / 2;
        let mut g = paired_construction(p0)?;
        // Qubits 1.. of the paired construction are K22-only; split from the
        // back so earlier indices stay valid.
        for i in 0..p - p0 {
            g = split_qubit(&g, p0 - 1 - i)?;
        }
        return Ok(g);
    }
    let s1 = plan(p, s, memo).ok_or(ConstructError::Unsupported { p, s })?;
    let g1 = build(p - 1, s1, memo)?;
    let g2 = build(p - 1, s - s1, memo)?;
    combine(&g1, &g2)
}

/// A `p`-qubit UPB with `s` states, `s` a multiple of four with
/// `p + 1 <= s <= 2^p`. The result is verified before it is returned.
pub fn build_multiple_of_four(p: usize, s: usize) -> Result<OrthogonalityGraph, ConstructError> {
    if p == 0 || !s.is_multiple_of(4) || s < p + 1 || p >= 63 || s > 1usize << p {
        return Err(ConstructError::BadArguments(format!(
            "need 4 | s and p + 1 <= s <= 2^p, got p={p}, s={s}"
        )));
    }
    let mut memo = HashMap::new();
    if plan(p, s, &mut memo).is_none() {
        return Err(if is_exception(p, s) {
            ConstructError::Unsupported { p, s }
        } else {
            ConstructError::BadArguments(format!("no construction for p={p}, s={s}"))
        });
    }
    let g = build(p, s, &mut memo)?;
    if g.p() != p || g.s() != s || !classify(&g).is_upb() {
        return Err(ConstructError::VerificationFailed { p, s });
    }
    Ok(g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn check_factorization(f: &Factorization1) {
        let n = f.n;
        assert_eq!(f.matchings.len(), n - 1);
        let mut seen = vec![vec![0; n]; n];
        for m in &f.matchings {
            assert_eq!(m.len(), n / 2);
            let mut touched = vec![false; n];
            for &(a, b) in m {
                assert!(a < b && !touched[a] && !touched[b]);
                touched[a] = true;
                touched[b] = true;
                seen[a][b] += 1;
            }
        }
        for a in 0..n {
            for b in a + 1..n {
                assert_eq!(seen[a][b], 1);
            }
        }
    }

    #[test]
    fn factorizations_partition_edges() {
        for n in (2..=20).step_by(2) {
            check_factorization(&one_factorization(n).unwrap());
        }
        assert_eq!(one_factorization(4).unwrap().matchings.len(), 3);
        assert_eq!(one_factorization(5), Err(ConstructError::OddOrder { n: 5 }));
    }

    #[test]
    fn four_qubit_eight_state_construction() {
        let g = build_multiple_of_four(4, 8).unwrap();
        let prof = crate::graph::profile_of(&g).unwrap();
        assert_eq!(prof.qubits[0], vec![(1, 1); 4]);
        for q in 1..4 {
            assert_eq!(prof.qubits[q], vec![(2, 2); 2]);
        }
    }

    #[test]
    fn split_rejects_non_k22() {
        let g = build_multiple_of_four(4, 8).unwrap();
        assert!(matches!(
            split_qubit(&g, 0),
            Err(ConstructError::NotSplittable { qubit: 0, component: (1, 1) })
        ));
        let h = split_qubit(&g, 1).unwrap();
        assert_eq!((h.p(), h.s()), (5, 8));
        assert!(classify(&h).is_upb());
    }

    #[test]
    fn exception_and_special_route() {
        assert_eq!(
            build_multiple_of_four(9, 20),
            Err(ConstructError::Unsupported { p: 9, s: 20 })
        );
        let g = build_multiple_of_four(5, 12).unwrap();
        assert_eq!((g.p(), g.s()), (5, 12));
        assert!(matches!(build_multiple_of_four(4, 10), Err(ConstructError::BadArguments(_))));
    }

    #[test]
    fn larger_sizes_via_combine() {
        for (p, s) in [(3, 8), (4, 12), (4, 16), (5, 20), (6, 40)] {
            let g = build_multiple_of_four(p, s).unwrap();
            assert_eq!((g.p(), g.s()), (p, s));
        }
    }
}
