//! Maximal continuation of a short Riccati solution up to blow-up.

use std::f64::consts::PI;

use starflow::base::OpenDomain;
use starflow::systems::{riccati_solution, riccati_solution_set};
use starflow::topology::maximal_continuation;

fn main() -> starflow::Result<()> {
    let s = riccati_solution_set(1.0)?;
    for (t0, x0) in [(0.0, 0.0), (0.5, 2.0), (-1.0, -3.0)] {
        let seed = riccati_solution(1.0, t0, x0)?.restrict(&OpenDomain::interval(t0 - 0.05, t0 + 0.05))?;
        let ext = maximal_continuation(&seed, &s)?;
        let (lo, hi) = ext.domain().bounds().unwrap();
        println!("x({t0}) = {x0}: maximal interval ({lo:.12}, {hi:.12}), length - π = {:.1e}", hi - lo - PI);
    }
    Ok(())
}
