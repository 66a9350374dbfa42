//! Partial maps on open domains: restriction, translation and evaluation.

use starflow::base::{GroupElem, OpenDomain, PartialMap};

fn main() -> starflow::Result<()> {
    let tan = PartialMap::scalar(OpenDomain::interval(-1.5, 1.5), f64::tan);
    println!("dom tan = {:?}", tan.domain().bounds());
    println!("tan(1) = {:?}, tan(2) = {:?}", tan.x(1.0), tan.x(2.0));

    let piece = tan.restrict(&OpenDomain::interval(0.0, 1.0))?;
    println!("restricted domain = {:?}", piece.domain().bounds());

    let g = GroupElem::real(0.25);
    let moved = piece.domain().translate(&g);
    println!("translated by {g:?}: {:?}", moved.bounds());

    let split = OpenDomain::interval(-2.0, -1.0).intersect(&OpenDomain::interval(-1.5, 3.0));
    println!("(-2, -1) ∩ (-1.5, 3) = {:?}", split.and_then(|d| d.bounds()));
    Ok(())
}
