//! Samples random SMCMs and counts how often a generalized front-door witness
//! exists, via exhaustive subset scan and via the size-5 bounded scan.
//!
//!     cargo run --release --example random_ensemble

use frontdoor::ensemble::{run_ensemble, EnsembleParams, Variant};

fn main() {
    let n_graphs = 100;
    println!("p   d   q     variant          exhaustive  bounded  redraws");
    for variant in [Variant::NoGrandparent, Variant::NoParent] {
        for &(p, d) in &[(10, 2), (10, 3), (10, 4), (15, 2), (15, 3), (15, 4)] {
            for &q in &[0.0, 0.5, 1.0] {
                let params = EnsembleParams {
                    p,
                    d,
                    q,
                    variant,
                    max_subset_size: None,
                    seed: 20_240_101,
                };
                let c = run_ensemble(&params, n_graphs).expect("valid parameters");
                println!(
                    "{p:<3} {d:<3} {q:<5} {variant:<16} {:>10}  {:>7}  {:>7}",
                    c.successes_exhaustive, c.successes_bounded, c.redraws
                );
            }
        }
    }
}
