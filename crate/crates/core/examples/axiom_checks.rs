//! Compactness, existence and uniqueness verdicts for three systems.

use starflow::star::{check_compactness, check_existence, check_uniqueness, CheckOptions, CompactnessOptions, SolutionSet, Window};
use starflow::systems::{inclusion_solution_set, ode_solution_set, InclusionSystem, OdeSystem};

fn main() -> starflow::Result<()> {
    let w = Window::closed_box((-2.0, 2.0), vec![(-2.0, 2.0)]);
    let systems: Vec<Box<dyn SolutionSet>> = vec![
        Box::new(inclusion_solution_set(InclusionSystem::interval(0.5, 1.0))?),
        Box::new(inclusion_solution_set(InclusionSystem::finite(vec![0.5, 1.0]))?),
        Box::new(ode_solution_set(OdeSystem::autonomous("x' = 1", |_| 1.0).global())?),
    ];
    let opts = CheckOptions::default();
    for s in &systems {
        let c = check_compactness(s.as_ref(), &w, &CompactnessOptions::default())?;
        let e = check_existence(s.as_ref(), &w, &opts);
        let u = check_uniqueness(s.as_ref(), &w, &opts);
        println!(
            "{:<22} compactness {:<9} existence {:<9} uniqueness {}",
            s.descriptor(),
            c.verdict.label(),
            e.verdict.label(),
            u.verdict.label()
        );
        if let Some(wit) = c.verdict.witness() {
            println!("  witness: {} maps, residual {:?}", wit.maps.len(), wit.residual);
        }
    }
    Ok(())
}
