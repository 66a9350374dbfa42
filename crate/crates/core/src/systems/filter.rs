use std::fmt;
use std::sync::Arc;

use crate::base::{GroupElem, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::star::{AdversarialSequence, Membership, SolutionSet, Window};
use crate::topology::ExtensionRule;

pub type MapPredicate = Arc<dyn Fn(&PartialMap) -> bool + Send + Sync>;

/// The subfamily of `inner` whose maps satisfy a predicate.
#[derive(Clone)]
pub struct FilteredSolutionSet {
    inner: Arc<dyn SolutionSet>,
    keep: MapPredicate,
    label: String,
    claimed: Option<OpenDomain>,
}

impl FilteredSolutionSet {
    pub fn new(
        inner: Arc<dyn SolutionSet>,
        label: impl Into<String>,
        keep: impl Fn(&PartialMap) -> bool + Send + Sync + 'static,
    ) -> FilteredSolutionSet {
        FilteredSolutionSet {
            inner,
            keep: Arc::new(keep),
            label: label.into(),
            claimed: None,
        }
    }

    /// Declares a domain every kept map contains.
    pub fn with_claimed_domain(mut self, d: OpenDomain) -> FilteredSolutionSet {
        self.claimed = Some(d);
        self
    }
}

impl fmt::Debug for FilteredSolutionSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FilteredSolutionSet({})", self.descriptor())
    }
}

impl SolutionSet for FilteredSolutionSet {
    fn descriptor(&self) -> String {
        format!("{} restricted to {}", self.inner.descriptor(), self.label)
    }

    fn group(&self) -> TimeGroup {
        self.inner.group()
    }

    fn state_space(&self) -> StateSpace {
        self.inner.state_space()
    }

    /// Draws from the inner sampler until `count` maps are kept or the
    /// attempts run out.
    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut out = Vec::with_capacity(count);
        for round in 0..64 {
            if out.len() >= count {
                break;
            }
            let batch = self.inner.sample(4 * count.max(1), crate::rng::split(seed, round));
            out.extend(batch.into_iter().filter(|phi| (self.keep)(phi)));
        }
        out.truncate(count);
        out
    }

    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        self.inner.through(g, x, budget).into_iter().filter(|phi| (self.keep)(phi)).collect()
    }

    fn membership(&self, phi: &PartialMap) -> Membership {
        match self.inner.membership(phi) {
            Membership::Member if !(self.keep)(phi) => Membership::NonMember {
                residual: f64::INFINITY,
                at: None,
            },
            m => m,
        }
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        self.claimed.clone().or_else(|| self.inner.claimed_domain())
    }

    fn closed_form_complete(&self) -> bool {
        self.inner.closed_form_complete()
    }

    fn extension_rule(&self) -> Option<ExtensionRule> {
        self.inner.extension_rule()
    }

    fn adversarial_sequences(&self, window: &Window) -> Vec<AdversarialSequence> {
        self.inner
            .adversarial_sequences(window)
            .into_iter()
            .filter(|a| a.maps.iter().all(|phi| (self.keep)(phi)))
            .collect()
    }
}
