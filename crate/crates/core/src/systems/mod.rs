//! Built-in solution sets: ODE flows, the Riccati family `x' = x² + a`,
//! interval and two-point differential inclusions, the constant family `S₀`,
//! group actions, and the finite `Aut(X)` family.

mod action;
mod config;
mod constants;
mod filter;
mod finite_aut;
mod inclusion;
mod ode;
mod riccati;
mod yorke;

pub use action::{action_solution_set, check_action_axioms, ActionFn, ActionSet, ActionSystem};
pub use config::{load_system, SystemConfig, WindowSpec};
pub use constants::{constant_solution_set, ConstantSet, INTEGER_RADIUS};
pub use filter::FilteredSolutionSet;
pub use finite_aut::{finite_aut_system, pullback, FiniteAutSet};
pub use inclusion::{inclusion_solution_set, DerivativeSet, InclusionSet, InclusionSystem};
pub use ode::{ode_solution_set, OdeSet, OdeSystem};
pub use riccati::{riccati_solution, riccati_solution_set, RiccatiFamily};
pub use yorke::{yorke_exact, yorke_limit, yorke_limit_exact, yorke_scaled, yorke_sequence, ExactPl};

use crate::base::{GroupElem, OpenDomain, PartialMap, State};

/// A point `(t, φ(t))` well inside the first domain component.
pub(crate) fn interior_anchor(phi: &PartialMap) -> Option<(f64, State)> {
    let iv = phi.domain().intervals().first()?;
    let t = match (iv.lo().is_finite(), iv.hi().is_finite()) {
        (true, true) => 0.5 * (iv.lo() + iv.hi()),
        (true, false) => iv.lo() + 1.0,
        (false, true) => iv.hi() - 1.0,
        (false, false) => 0.0,
    };
    Some((t, phi.eval_real(t)?))
}

/// Up to `n` interior points of `dom φ ∩ [-radius, radius]`, kept `margin`
/// away from finite endpoints.
pub(crate) fn interior_grid(domain: &OpenDomain, radius: f64, margin: f64, n: usize) -> Vec<f64> {
    let mut out = Vec::new();
    for iv in domain.intervals() {
        let lo = iv.lo().max(-radius - margin) + margin;
        let hi = iv.hi().min(radius + margin) - margin;
        if lo >= hi {
            if iv.contains(0.5 * (iv.lo().max(-radius) + iv.hi().min(radius))) {
                out.push(0.5 * (iv.lo().max(-radius) + iv.hi().min(radius)));
            }
            continue;
        }
        let k = n.max(2);
        out.extend((0..k).map(|i| lo + (hi - lo) * i as f64 / (k - 1) as f64));
    }
    out
}

pub(crate) fn real(t: f64) -> GroupElem {
    GroupElem::real(t)
}
