//! Profile counts for `(p, s)` under each combination of the optional rules.

use upb_core::search::{enumerate_profiles_with_counts, ProfileConstraints};

fn main() {
    let args: Vec<usize> = std::env::args().skip(1).map(|a| a.parse().expect("integer argument")).collect();
    let (p, s) = (args[0], args[1]);
    for a1 in [false, true] {
        for a2 in [false, true] {
            for odd in [false, true] {
                let mut c = ProfileConstraints::new(p, s);
                c.use_reverse_combine = a1;
                c.use_cover_bound = a2;
                c.use_odd_pair_rule = odd;
                let e = enumerate_profiles_with_counts(&c);
                println!("a1={a1} a2={a2} odd={odd}: {:?}", e.counts);
            }
        }
    }
}
