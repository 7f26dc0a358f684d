//! Checks a search catalog with slow independent tools: verdicts, numeric
//! realizations and pairwise isomorphism by plain backtracking.

use itertools::Itertools;
use upb_core::checker::{classify, numeric_crosscheck};
use upb_core::graph::profile_of;
use upb_core::search::{full_search, water_level, ProfileConstraints, SearchOptions};
use upb_core::SizeProfile;
use upb_core::OrthogonalityGraph;

fn isomorphic(g1: &OrthogonalityGraph, g2: &OrthogonalityGraph) -> bool {
    let (p, s) = (g1.p(), g1.s());
    let adj = |g: &OrthogonalityGraph| -> Vec<Vec<Vec<bool>>> {
        (0..p)
            .map(|q| (0..s).map(|u| (0..s).map(|v| g.adjacent_on(q, u, v)).collect()).collect())
            .collect()
    };
    let (a1, a2) = (adj(g1), adj(g2));
    fn extend(a1: &[Vec<Vec<bool>>], a2: &[Vec<Vec<bool>>], pi: &[usize], map: &mut Vec<usize>, used: &mut Vec<bool>) -> bool {
        let s = used.len();
        let u = map.len();
        if u == s {
            return true;
        }
        for t in 0..s {
            if used[t] {
                continue;
            }
            let ok = (0..u).all(|w| (0..pi.len()).all(|q| a1[q][u][w] == a2[pi[q]][t][map[w]]));
            if ok {
                map.push(t);
                used[t] = true;
                if extend(a1, a2, pi, map, used) {
                    return true;
                }
                map.pop();
                used[t] = false;
            }
        }
        false
    }
    (0..p).permutations(p).any(|pi| extend(&a1, &a2, &pi, &mut Vec::new(), &mut vec![false; s]))
}

/// The recursion with each step charged only the previous step's count.
fn literal_chain_prunes(pr: &SizeProfile) -> Option<(Vec<usize>, Vec<usize>)> {
    let p = pr.p();
    let sides = |q: usize| -> Vec<usize> { pr.qubits[q].iter().flat_map(|&(a, b)| [a, b]).filter(|&x| x > 0).collect() };
    for order in (0..p).permutations(p) {
        for t1 in sides(order[0]) {
            let mut t = vec![t1];
            for &q in &order[1..] {
                let prev = *t.last().unwrap();
                t.push(water_level(&sides(q), prev));
            }
            if t.iter().sum::<usize>() > pr.s - 1 {
                return Some((order, t));
            }
        }
    }
    None
}

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().unwrap()).collect();
    let out = full_search(&ProfileConstraints::new(args[0], args[1]), &SearchOptions::default()).unwrap();
    let graphs: Vec<&OrthogonalityGraph> = out.catalog.entries.iter().map(|e| &e.graph).collect();
    println!("{} classes", graphs.len());
    for (i, g) in graphs.iter().enumerate() {
        let pr = profile_of(g).unwrap().normalized();
        if let Some((order, t)) = literal_chain_prunes(&pr) {
            println!("entry {i}: literal recursion prunes {} via order {order:?}, t = {t:?}", pr.label());
        }
        let v = classify(g);
        let n = numeric_crosscheck(g, 1).map(|r| r.agrees_with(&v));
        if !v.is_upb() || n.as_ref().map_or(true, |x| !x) {
            println!("entry {i}: verdict {v}, numeric {n:?}");
        }
    }
    for (i, j) in (0..graphs.len()).tuple_combinations() {
        if profile_of(graphs[i]).unwrap().normalized() == profile_of(graphs[j]).unwrap().normalized()
            && isomorphic(graphs[i], graphs[j])
        {
            println!("entries {i} and {j} are isomorphic");
        }
    }
    println!("done");
}
