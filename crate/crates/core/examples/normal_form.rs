//! The normal form of a global flow, k(g, x) = (g, π(g, x)).

use std::sync::Arc;

use starflow::morphism::{assess, normal_form, phase_decomposition, ClassifyOptions};
use starflow::star::{CheckOptions, SolutionSet, Window};
use starflow::systems::{ode_solution_set, OdeSystem};
use starflow::Tolerances;

fn main() -> starflow::Result<()> {
    let mut sys = OdeSystem::autonomous("x' = -x", |x| -x).global();
    sys.params.t_max = 60.0;
    let s: Arc<dyn SolutionSet> = Arc::new(ode_solution_set(sys)?);
    let window = Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
    let m = normal_form(s, window, &CheckOptions::default())?;
    let pd = phase_decomposition(&m, 64, 0, &Tolerances::default());
    println!("phase preserving: {}", pd.phase_preserving);
    let opts = ClassifyOptions {
        n_samples: 64,
        n_maps: 4,
        transport: false,
        ..ClassifyOptions::default()
    };
    let r = assess(&m, &opts);
    println!("level {:?}: {}", r.level, r.reason.unwrap_or_default());
    Ok(())
}
