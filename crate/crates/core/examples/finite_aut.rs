//! Automorphisms of a finite star-system, checked exactly on a grid.

use starflow::base::Permutation;
use starflow::cli::examples::aut_grid_points;
use starflow::morphism::{finite_aut_morphism, verify_at};
use starflow::Tolerances;

fn main() -> starflow::Result<()> {
    let tol = Tolerances::default();
    let points = aut_grid_points(3);
    for h in Permutation::all(3) {
        let m = finite_aut_morphism(3, &h)?;
        let v = verify_at(&m, &points, &points, &tol);
        println!("h = {h:?}: {:?}, commutation {}", v.level, v.commutation());
    }
    Ok(())
}
