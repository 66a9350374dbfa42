//! The shift action on solutions, flow reconstruction and equilibria.

use std::sync::Arc;

use starflow::base::{GroupElem, State};
use starflow::bebutov::{conjugation_residual, is_equilibrium, reconstruct_action, shift, GridSpec};
use starflow::star::{CheckOptions, SolutionSet};
use starflow::systems::{ode_solution_set, riccati_solution, OdeSystem};

fn main() -> starflow::Result<()> {
    let phi = riccati_solution(1.0, 0.0, 0.0)?;
    let moved = shift(&GroupElem::real(0.5), &phi);
    println!("dom φ = {:?}, dom σ(0.5, φ) = {:?}", phi.domain().bounds(), moved.domain().bounds());
    println!("σ(0.5, φ)(0) = {:?}, φ(0.5) = {:?}", moved.x(0.0), phi.x(0.5));

    let mut sys = OdeSystem::autonomous("x' = -x", |x| -x).global();
    sys.params.t_max = 60.0;
    let s: Arc<dyn SolutionSet> = Arc::new(ode_solution_set(sys)?);
    let act = reconstruct_action(Arc::clone(&s), &CheckOptions::default())?;
    let y = act.apply(&GroupElem::real(1.0), &State::scalar(2.0));
    println!("π(1, 2) = {:.12} (2/e = {:.12})", y.x(), 2.0 / 1f64.exp());
    println!("conjugation residual: {:.1e}", conjugation_residual(s.as_ref(), &act, 50, 0));

    for x in [0.0, 1.0] {
        let r = is_equilibrium(&State::scalar(x), s.as_ref(), 4, &GridSpec::default());
        println!("x = {x}: equilibrium {} ({})", r.is_equilibrium(), r.verdict.label());
    }
    Ok(())
}
