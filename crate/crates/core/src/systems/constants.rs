use std::sync::Arc;

use rand::Rng;

use crate::base::{GroupElem, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::rng::rng;
use crate::star::{Membership, SolutionSet};
use crate::topology::ExtensionRule;

/// Integers covered by the domain of a constant map over `ℤ`.
pub const INTEGER_RADIUS: i64 = 1000;

/// The family `S₀` of constant maps `ψ_x(g) = x` on the whole group.
#[derive(Clone, Debug, PartialEq)]
pub struct ConstantSet {
    group: TimeGroup,
    space: StateSpace,
}

pub fn constant_solution_set(space: StateSpace) -> ConstantSet {
    ConstantSet {
        group: TimeGroup::Reals,
        space,
    }
}

impl ConstantSet {
    pub fn with_group(mut self, group: TimeGroup) -> ConstantSet {
        self.group = group;
        self
    }

    /// The whole group; `ℤ` is cut to `[-INTEGER_RADIUS, INTEGER_RADIUS]`.
    pub fn full_domain(&self) -> OpenDomain {
        match &self.group {
            TimeGroup::Reals => OpenDomain::line(),
            TimeGroup::Integers => OpenDomain::integers(-INTEGER_RADIUS..=INTEGER_RADIUS),
            g @ TimeGroup::Permutations(_) => OpenDomain::elements(g.elements().unwrap_or_default()),
        }
    }

    pub fn constant(&self, x: State) -> PartialMap {
        let tag = x
            .iter()
            .enumerate()
            .fold(crate::base::MapTag::new("constants"), |t, (i, v)| t.param(&format!("x{}", i + 1), *v));
        match self.group {
            TimeGroup::Reals => PartialMap::closed_form(self.full_domain(), move |_| x.clone()),
            _ => PartialMap::group_fn(self.full_domain(), move |_| x.clone()),
        }
        .with_tag(tag)
    }

    fn probe_points(&self, phi: &PartialMap) -> Vec<GroupElem> {
        match phi.domain() {
            OpenDomain::Elements(items) => items.iter().take(4096).cloned().collect(),
            d => super::interior_grid(d, 50.0, 0.0, 1001).into_iter().map(super::real).collect(),
        }
    }
}

impl SolutionSet for ConstantSet {
    fn descriptor(&self) -> String {
        "constant maps".into()
    }

    fn group(&self) -> TimeGroup {
        self.group.clone()
    }

    fn state_space(&self) -> StateSpace {
        self.space.clone()
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut r = rng(seed);
        (0..count)
            .map(|_| {
                let x = match &self.space {
                    StateSpace::Euclidean(n) => State((0..*n).map(|_| r.gen_range(-2.0..=2.0)).collect()),
                    StateSpace::FiniteDiscrete(labels) => State::label(r.gen_range(0..labels.len().max(1))),
                };
                self.constant(x)
            })
            .collect()
    }

    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        if budget == 0 || !self.space.contains(x) || !self.group.contains(g) {
            return Vec::new();
        }
        vec![self.constant(x.clone())]
    }

    /// Exactly the restrictions of constant maps.
    fn membership(&self, phi: &PartialMap) -> Membership {
        let points = self.probe_points(phi);
        let Some(first) = points.first().and_then(|g| phi.eval(g)) else {
            return Membership::Unknown;
        };
        let mut worst = (0.0, None);
        for g in &points {
            let Some(x) = phi.eval(g) else { continue };
            let d = self.space.metric(&x, &first);
            if d > worst.0 {
                worst = (d, Some(g.clone()));
            }
        }
        if worst.0 > 0.0 {
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

    fn extension_rule(&self) -> Option<ExtensionRule> {
        match (&self.group, &self.space) {
            (TimeGroup::Reals, StateSpace::Euclidean(n)) => {
                let n = *n;
                Some(ExtensionRule::new(Arc::new(move |_, _: &[f64]| vec![0.0; n])))
            }
            _ => None,
        }
    }
}
