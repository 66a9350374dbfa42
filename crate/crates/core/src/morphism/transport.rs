use std::sync::Arc;

use super::builders::{phase_map, transport_map};
use super::{Endpoint, Morphism, StateHomeo, TimeHomeo};
use crate::base::{GroupElem, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::star::{AdversarialSequence, Membership, PointMap, SolutionSet, Window};

/// `S' = {h ∘ φ ∘ τ⁻¹ | φ ∈ S}`.
#[derive(Clone)]
pub struct TransportedSet {
    inner: Arc<dyn SolutionSet>,
    h: StateHomeo,
    tau: TimeHomeo,
}

impl TransportedSet {
    pub fn new(inner: Arc<dyn SolutionSet>, h: StateHomeo, tau: TimeHomeo) -> TransportedSet {
        TransportedSet { inner, h, tau }
    }

    fn forward(&self, phi: &PartialMap) -> PartialMap {
        transport_map(phi, &self.tau, &self.h)
    }

    fn back(&self, phi: &PartialMap) -> PartialMap {
        transport_map(phi, &self.tau.inverse(), &self.h.inverse())
    }

    fn point_maps(&self) -> (PointMap, PointMap) {
        let (t1, h1) = (self.tau.clone(), self.h.clone());
        let fwd: PointMap = Arc::new(move |g, x| (GroupElem::real(g.as_f64().map_or(f64::NAN, |t| t1.apply(t))), h1.apply(x)));
        let (t2, h2) = (self.tau.clone(), self.h.clone());
        let inv: PointMap = Arc::new(move |g, x| (GroupElem::real(g.as_f64().map_or(f64::NAN, |t| t2.apply_inv(t))), h2.apply_inv(x)));
        (fwd, inv)
    }
}

impl SolutionSet for TransportedSet {
    fn descriptor(&self) -> String {
        format!("{} ∘ ({}) ∘ ({})⁻¹", self.h.label, self.inner.descriptor(), self.tau.label())
    }

    fn group(&self) -> TimeGroup {
        self.inner.group()
    }

    fn state_space(&self) -> StateSpace {
        self.inner.state_space()
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        self.inner.sample(count, seed).iter().map(|phi| self.forward(phi)).collect()
    }

    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        let Some(t) = g.as_f64() else { return Vec::new() };
        let g0 = GroupElem::real(self.tau.apply_inv(t));
        self.inner
            .through(&g0, &self.h.apply_inv(x), budget)
            .iter()
            .map(|phi| self.forward(phi))
            .collect()
    }

    fn membership(&self, phi: &PartialMap) -> Membership {
        match self.inner.membership(&self.back(phi)) {
            Membership::NonMember { residual, at } => Membership::NonMember {
                residual,
                at: at.and_then(|g| g.as_f64()).map(|t| GroupElem::real(self.tau.apply(t))),
            },
            other => other,
        }
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        self.inner.claimed_domain().map(|d| self.tau.map_domain(&d))
    }

    fn sigma_invariant(&self) -> bool {
        self.inner.sigma_invariant() && self.tau.is_affine()
    }

    fn closed_form_complete(&self) -> bool {
        self.inner.closed_form_complete()
    }

    fn adversarial_sequences(&self, window: &Window) -> Vec<AdversarialSequence> {
        let (fwd, inv) = self.point_maps();
        let inner_window = Window::Mapped {
            inner: Box::new(window.clone()),
            forward: Arc::clone(&inv),
            inverse: Arc::clone(&fwd),
        };
        self.inner
            .adversarial_sequences(&inner_window)
            .into_iter()
            .map(|seq| AdversarialSequence {
                name: seq.name,
                maps: seq.maps.iter().map(|phi| self.forward(phi)).collect(),
                anchors: seq.anchors.iter().map(|(g, x)| fwd(g, x)).collect(),
                limit: seq.limit.as_ref().map(|phi| self.forward(phi)),
            })
            .collect()
    }
}

/// Transports `S` along `k(t, x) = (τ(t), h(x))` and returns the transported
/// family with the morphism onto it.
pub fn change_of_variables(h: StateHomeo, tau: TimeHomeo, source: Endpoint) -> (Arc<TransportedSet>, Morphism) {
    let set = Arc::new(TransportedSet::new(Arc::clone(&source.set), h.clone(), tau.clone()));
    let m = phase_map("change-of-variables", source, Arc::clone(&set) as Arc<dyn SolutionSet>, tau, h);
    (set, m)
}
