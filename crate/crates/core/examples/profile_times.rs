//! Times the placement search on each surviving profile of `(p, s)`, slowest last.

use std::time::Instant;

use upb_core::search::{enumerate_profiles, search_profile_with, ProfileConstraints};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (p, s) = (args[0], args[1]);
    let stride = args.get(3).copied().unwrap_or(1);
    let profiles = enumerate_profiles(&ProfileConstraints::new(p, s));
    println!("{} profiles", profiles.len());
    let mut rows = Vec::new();
    for pr in profiles.iter().step_by(stride) {
        let start = Instant::now();
        let r = search_profile_with(pr, None);
        rows.push((start.elapsed().as_secs_f64(), pr.label(), r.stats));
    }
    rows.sort_by(|a, b| a.0.total_cmp(&b.0));
    let total: f64 = rows.iter().map(|r| r.0).sum();
    for (t, label, st) in rows.iter().rev().take(args.get(2).copied().unwrap_or(15)) {
        println!("{t:8.3}s nodes={:<10} leaves={:<6} rows={:?} {label}", st.nodes, st.leaves, st.rows);
    }
    println!("{} profiles timed, {total:.1}s", rows.len());
}
