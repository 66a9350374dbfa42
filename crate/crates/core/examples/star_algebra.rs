//! Star sets of solution families and the set identities they satisfy.

use std::collections::BTreeSet;

use starflow::base::GroupElem;
use starflow::star::{star_algebra_suite, star_set, SolutionSet, Window};
use starflow::systems::riccati_solution_set;

fn main() -> starflow::Result<()> {
    let pool = riccati_solution_set(-1.0)?.sample(8, 1);
    let times: Vec<GroupElem> = (-10..=10).map(|i| GroupElem::real(i as f64 / 5.0)).collect();
    let w = Window::closed_box((-1.0, 1.0), vec![(-0.5, 0.5)]);
    let all: BTreeSet<usize> = (0..pool.len()).collect();
    let star = star_set(&pool, &all, &w, &times);
    println!("|S*W| on the grid: {}", star.len());

    let families = vec![(0..4).collect(), (2..8).collect()];
    let windows = [w, Window::closed_box((0.0, 2.0), vec![(-1.0, 1.0)])];
    let report = star_algebra_suite(&pool, &families, &windows, &times);
    for id in &report.identities {
        println!("{}: {} points, {} counterexamples", id.identity, id.star_points, id.counterexamples.len());
    }
    println!("all hold: {}", report.all_hold());
    Ok(())
}
