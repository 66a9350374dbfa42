use serde::{Deserialize, Serialize};

use super::Window;
use crate::base::{GroupElem, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::topology::ExtensionRule;

/// Outcome of testing whether a map belongs to a solution set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Membership {
    Member,
    /// `residual` measures the violation at `at`.
    NonMember { residual: f64, at: Option<GroupElem> },
    Unknown,
}

impl Membership {
    pub fn is_member(&self) -> bool {
        matches!(self, Membership::Member)
    }

    pub fn residual(&self) -> Option<f64> {
        match self {
            Membership::NonMember { residual, .. } => Some(*residual),
            _ => None,
        }
    }
}

/// A sequence of solutions through points of a window, supplied by a system
/// because random sampling is unlikely to find it.
#[derive(Clone, Debug)]
pub struct AdversarialSequence {
    pub name: String,
    pub maps: Vec<PartialMap>,
    /// `(g_n, x_n)` with `φ_n(g_n) = x_n`.
    pub anchors: Vec<(GroupElem, State)>,
    /// The known compact limit, when there is one.
    pub limit: Option<PartialMap>,
}

/// A family `S` of partial maps from a time group into a state space.
///
/// Membership certifies that a map is a restriction of some solution;
/// samplers and `through` return maximally continued solutions.
pub trait SolutionSet: Send + Sync {
    fn descriptor(&self) -> String;

    fn group(&self) -> TimeGroup;

    fn state_space(&self) -> StateSpace;

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap>;

    /// Up to `budget` solutions with `|φ(g) - x| ≤ tol_point`.
    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap>;

    fn membership(&self, phi: &PartialMap) -> Membership;

    /// A domain every member is known to contain.
    fn claimed_domain(&self) -> Option<OpenDomain> {
        None
    }

    fn sigma_invariant(&self) -> bool {
        false
    }

    /// The family is given by closed forms through every point, so existence
    /// and uniqueness answers are exact.
    fn closed_form_complete(&self) -> bool {
        false
    }

    fn extension_rule(&self) -> Option<ExtensionRule> {
        None
    }

    fn adversarial_sequences(&self, _window: &Window) -> Vec<AdversarialSequence> {
        Vec::new()
    }
}
