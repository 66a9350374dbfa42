//! Linear state maps conjugate interval inclusions.

use std::sync::Arc;

use starflow::morphism::{classify, state_scaling, ClassifyOptions, Endpoint};
use starflow::star::{SolutionSet, Window};
use starflow::systems::{inclusion_solution_set, InclusionSystem};

fn main() -> starflow::Result<()> {
    let window = Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
    let opts = ClassifyOptions {
        n_maps: 10,
        transport: false,
        ..ClassifyOptions::default()
    };
    for (c, lo, hi) in [(2.0, 1.0, 2.0), (-1.0, -1.0, -0.5), (3.0, 1.0, 2.0)] {
        let source: Arc<dyn SolutionSet> = Arc::new(inclusion_solution_set(InclusionSystem::interval(0.5, 1.0))?);
        let target: Arc<dyn SolutionSet> = Arc::new(inclusion_solution_set(InclusionSystem::interval(lo, hi))?);
        let m = state_scaling(Endpoint::new(source, window.clone()), target, c)?;
        let r = classify(&m, &opts)?;
        println!("x ↦ {c}x into x' ∈ [{lo}, {hi}]: {:?} {}", r.level, r.reason.unwrap_or_default());
    }
    Ok(())
}
