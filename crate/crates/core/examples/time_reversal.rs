//! Time reversal between x' = 1 and x' = -1: an isomorphism that reverses
//! orientation, hence not a topological equivalence.

use std::sync::Arc;

use starflow::morphism::{classify, time_reversal, ClassifyOptions, Endpoint};
use starflow::star::{SolutionSet, Window};
use starflow::systems::{ode_solution_set, OdeSystem};

fn drift(c: f64) -> starflow::Result<Arc<dyn SolutionSet>> {
    Ok(Arc::new(ode_solution_set(OdeSystem::autonomous(format!("x' = {c}"), move |_| c).global())?))
}

fn main() -> starflow::Result<()> {
    let m = time_reversal(Endpoint::new(drift(1.0)?, Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)])), drift(-1.0)?);
    let opts = ClassifyOptions {
        n_samples: 64,
        n_maps: 6,
        transport: false,
        ..ClassifyOptions::default()
    };
    let r = classify(&m, &opts)?;
    println!("level {:?}, stopped by: {}", r.level, r.reason.unwrap_or_default());
    Ok(())
}
