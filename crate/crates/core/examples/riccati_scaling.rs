//! Riccati equations with same-sign parameters are isomorphic by a time scaling.

use starflow::bebutov::GridSpec;
use starflow::morphism::{riccati_scaling, time_change, verify_morphism};
use starflow::Tolerances;

fn main() -> starflow::Result<()> {
    let tol = Tolerances::default();
    for (a, b) in [(1.0, 4.0), (-1.0, -4.0)] {
        let m = riccati_scaling(a, b)?;
        let v = verify_morphism(&m, 500, 0, &tol);
        println!("({a}, {b}): {:?}, commutation {:.1e}", v.level, v.commutation());
        for (i, phi) in m.source.set.sample(3, 1).iter().enumerate() {
            let tc = time_change(&m, phi, i, &GridSpec::default());
            println!("  φ_{i}: D_φ increasing {}, onto {}", tc.monotone, tc.onto);
        }
    }
    Ok(())
}
