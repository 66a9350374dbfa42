use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{interior_grid, real};
use crate::base::{GroupElem, MapTag, OpenDomain, PartialMap, Permutation, State, StateSpace, TimeGroup};
use crate::rng::rng;
use crate::star::{Membership, SolutionSet};

/// A left action `π: G × X → X`.
#[derive(Clone)]
pub enum ActionFn {
    /// An action of `(ℝ, +)`.
    Real(Arc<dyn Fn(f64, &State) -> State + Send + Sync>),
    General(Arc<dyn Fn(&GroupElem, &State) -> State + Send + Sync>),
}

impl ActionFn {
    pub fn apply(&self, g: &GroupElem, x: &State) -> State {
        match self {
            ActionFn::Real(f) => f(g.as_f64().expect("real group element"), x),
            ActionFn::General(f) => f(g, x),
        }
    }
}

/// A topological transformation group `(G, X, π)`.
#[derive(Clone)]
pub struct ActionSystem {
    pub label: String,
    pub group: TimeGroup,
    pub space: StateSpace,
    pub action: ActionFn,
    /// Box from which Euclidean states are sampled.
    pub sample_box: Vec<(f64, f64)>,
}

impl fmt::Debug for ActionSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ActionSystem")
            .field("label", &self.label)
            .field("group", &self.group)
            .field("space", &self.space)
            .finish()
    }
}

impl ActionSystem {
    pub fn real(label: impl Into<String>, dim: usize, pi: impl Fn(f64, &State) -> State + Send + Sync + 'static) -> ActionSystem {
        ActionSystem {
            label: label.into(),
            group: TimeGroup::Reals,
            space: StateSpace::Euclidean(dim),
            action: ActionFn::Real(Arc::new(pi)),
            sample_box: vec![(-2.0, 2.0); dim],
        }
    }

    /// `π(t, x) = x + c·t`, the flow of `x' = c`.
    pub fn drift(c: f64) -> ActionSystem {
        ActionSystem::real(format!("flow of x' = {c}"), 1, move |t, x| x.map(|v| v + c * t))
    }

    /// `π(t, x) = x·e^{-t}`, the flow of `x' = -x`.
    pub fn decay() -> ActionSystem {
        ActionSystem::real("flow of x' = -x", 1, |t, x| x.map(|v| v * (-t).exp()))
    }

    /// `S_n` permuting `n` labels.
    pub fn permuted_labels(n: usize) -> ActionSystem {
        ActionSystem {
            label: format!("S_{n} on {n} labels"),
            group: TimeGroup::Permutations(n),
            space: StateSpace::FiniteDiscrete((0..n).map(|i| format!("p{i}")).collect()),
            action: ActionFn::General(Arc::new(|g, x| match g {
                GroupElem::Perm(p) => State::label(p.apply(x.x() as usize)),
                _ => x.clone(),
            })),
            sample_box: Vec::new(),
        }
    }

    /// `S_n` permuting the coordinates of `ℝⁿ`: `π(p, f)_i = f_{p⁻¹(i)}`.
    pub fn permuted_coordinates(n: usize) -> ActionSystem {
        ActionSystem {
            label: format!("S_{n} on R^{n}"),
            group: TimeGroup::Permutations(n),
            space: StateSpace::Euclidean(n),
            action: ActionFn::General(Arc::new(|g, x| match g {
                GroupElem::Perm(p) => permute_coordinates(p, x),
                _ => x.clone(),
            })),
            sample_box: vec![(-2.0, 2.0); n],
        }
    }

    pub fn apply(&self, g: &GroupElem, x: &State) -> State {
        self.action.apply(g, x)
    }

    fn random_state<R: Rng>(&self, r: &mut R) -> State {
        match &self.space {
            StateSpace::FiniteDiscrete(labels) => State::label(r.gen_range(0..labels.len().max(1))),
            StateSpace::Euclidean(_) => State(self.sample_box.iter().map(|&(a, b)| r.gen_range(a..=b)).collect()),
        }
    }
}

pub(crate) fn permute_coordinates(p: &Permutation, x: &State) -> State {
    let inv = p.inverse();
    State((0..x.dim()).map(|i| x[inv.apply(i)]).collect())
}

/// Residuals of `π(e, x) = x` and `π(g, π(h, x)) = π(gh, x)` over sampled
/// triples; returns `(identity, composition)`.
pub fn check_action_axioms(act: &ActionSystem, samples: usize, seed: u64) -> (f64, f64) {
    let mut r = rng(seed);
    let e = act.group.identity();
    let (mut id, mut comp) = (0.0f64, 0.0f64);
    for _ in 0..samples {
        let g = act.group.random_element(&mut r, 5.0);
        let h = act.group.random_element(&mut r, 5.0);
        let x = act.random_state(&mut r);
        id = id.max(act.space.metric(&act.apply(&e, &x), &x));
        let lhs = act.apply(&g, &act.apply(&h, &x));
        let rhs = act.apply(&act.group.op(&g, &h), &x);
        comp = comp.max(act.space.metric(&lhs, &rhs) / (1.0 + rhs.norm()));
    }
    (id, comp)
}

/// `S = {π(·, x) | x ∈ X}`.
#[derive(Clone, Debug)]
pub struct ActionSet {
    act: ActionSystem,
}

pub fn action_solution_set(act: ActionSystem) -> ActionSet {
    ActionSet { act }
}

impl ActionSet {
    pub fn action(&self) -> &ActionSystem {
        &self.act
    }

    fn full_domain(&self) -> OpenDomain {
        match &self.act.group {
            TimeGroup::Reals => OpenDomain::line(),
            TimeGroup::Integers => OpenDomain::integers(-super::constants::INTEGER_RADIUS..=super::constants::INTEGER_RADIUS),
            g => OpenDomain::elements(g.elements().unwrap_or_default()),
        }
    }

    /// The orbit map `π(·, x)`.
    pub fn orbit_map(&self, x: &State) -> PartialMap {
        let tag = x
            .iter()
            .enumerate()
            .fold(MapTag::new(self.act.label.clone()), |t, (i, v)| t.param(&format!("x{}", i + 1), *v));
        let x = x.clone();
        match &self.act.action {
            ActionFn::Real(f) => {
                let f = Arc::clone(f);
                PartialMap::closed_form(self.full_domain(), move |t| f(t, &x))
            }
            ActionFn::General(f) => {
                let f = Arc::clone(f);
                PartialMap::group_fn(self.full_domain(), move |g| f(g, &x))
            }
        }
        .with_tag(tag)
    }

    fn probe_points(&self, phi: &PartialMap) -> Vec<GroupElem> {
        match phi.domain() {
            OpenDomain::Elements(items) => items.iter().take(4096).cloned().collect(),
            d => interior_grid(d, 20.0, 0.0, 401).into_iter().map(real).collect(),
        }
    }
}

impl SolutionSet for ActionSet {
    fn descriptor(&self) -> String {
        self.act.label.clone()
    }

    fn group(&self) -> TimeGroup {
        self.act.group.clone()
    }

    fn state_space(&self) -> StateSpace {
        self.act.space.clone()
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut r = rng(seed);
        (0..count).map(|_| self.orbit_map(&self.act.random_state(&mut r))).collect()
    }

    /// `π(·, π(g⁻¹, x))`.
    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        if budget == 0 || !self.act.group.contains(g) || !self.act.space.contains(x) {
            return Vec::new();
        }
        vec![self.orbit_map(&self.act.apply(&self.act.group.inv(g), x))]
    }

    /// Compares `φ` with the orbit map through one of its points.
    fn membership(&self, phi: &PartialMap) -> Membership {
        let points = self.probe_points(phi);
        let Some((g, x)) = points.iter().find_map(|g| phi.eval(g).map(|x| (g.clone(), x))) else {
            return Membership::Unknown;
        };
        if !self.act.space.contains(&x) {
            return Membership::NonMember { residual: f64::INFINITY, at: Some(g) };
        }
        let orbit = self.orbit_map(&self.act.apply(&self.act.group.inv(&g), &x));
        let mut worst = (0.0, None);
        for h in &points {
            let (Some(u), Some(v)) = (phi.eval(h), orbit.eval(h)) else { continue };
            let d = self.act.space.metric(&u, &v) / (1.0 + v.norm());
            if d > worst.0 {
                worst = (d, Some(h.clone()));
            }
        }
        if worst.0 > 1e-9 {
            Membership::NonMember {
                residual: worst.0,
                at: worst.1,
            }
        } else {
            Membership::Member
        }
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        Some(self.full_domain())
    }

    fn sigma_invariant(&self) -> bool {
        true
    }

    fn closed_form_complete(&self) -> bool {
        true
    }
}
