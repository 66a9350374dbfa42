//! Compact convergence of the Yorke sequence to its piecewise-linear limit.

use starflow::systems::{yorke_limit, yorke_sequence};
use starflow::topology::test_convergence;

fn main() {
    let seq: Vec<_> = (0..12).map(yorke_sequence).collect();
    for (n, phi) in seq.iter().enumerate().take(4) {
        println!("φ_{n}: domain {:?}, φ_{n}(0.5) = {:?}", phi.domain().bounds(), phi.x(0.5));
    }
    let report = test_convergence(&seq, &yorke_limit(), 4);
    println!("verdict: {:?}", report.verdict);
    for c in &report.compacts {
        println!(
            "K_{}: final sup {:?}, tail ratio {:?}, limit {:?}",
            c.m, c.final_sup, c.tail_ratio, c.extrapolated_limit
        );
    }
}
