use super::{Membership, SolutionSet, Window};
use crate::base::{GroupElem, OpenDomain, PartialMap, State, TimeGroup};
use crate::tolerance::TOL_POINT;
use crate::topology::{dist_on_compact, CompactSet};

/// A pair `(g, φ)` with `g ∈ dom φ`.
#[derive(Clone, Debug)]
pub struct StarPoint {
    pub g: GroupElem,
    pub phi: PartialMap,
}

impl StarPoint {
    /// `ev(g, φ) = (g, φ(g))`.
    pub fn ev(&self) -> Option<(GroupElem, State)> {
        Some((self.g.clone(), self.phi.eval(&self.g)?))
    }

    /// `p(g, φ) = φ`.
    pub fn proj(&self) -> &PartialMap {
        &self.phi
    }
}

/// Whether `(g, φ) ∈ S*W`.
pub fn star_membership(p: &StarPoint, s: &dyn SolutionSet, w: &Window) -> bool {
    let Some(x) = p.phi.eval(&p.g) else {
        return false;
    };
    if !w.contains(&p.g, &x) {
        return false;
    }
    match s.membership(&p.phi) {
        Membership::Member => true,
        Membership::NonMember { .. } => false,
        Membership::Unknown => {
            log::warn!("membership of {:?} in {} is unknown; treating as absent", p.phi.tag(), s.descriptor());
            false
        }
    }
}

/// Whether two maps differ by more than `tol` somewhere near `g` on their
/// shared domain.
pub fn distinct(phi: &PartialMap, psi: &PartialMap, g: &GroupElem, group: &TimeGroup, tol: f64) -> bool {
    let Some(shared) = phi.domain().intersect(psi.domain()) else {
        return true;
    };
    let k = match (&shared, g.as_f64()) {
        (OpenDomain::Intervals(_), Some(t)) => {
            CompactSet::interval(t - 2.0, t + 2.0, 1.0 / 128.0).inner_intersect(&shared, 1e-6)
        }
        _ => match group {
            TimeGroup::Integers => TimeGroup::Integers.compact_exhaustion(16).inner_intersect(&shared, 0.0),
            _ => group.compact_exhaustion(0).inner_intersect(&shared, 0.0),
        },
    };
    if k.is_empty() {
        return false;
    }
    dist_on_compact(phi, psi, &k).is_some_and(|d| d > tol)
}

/// `S*{(g, x)}` with the default point tolerance.
pub fn cauchy_query(s: &dyn SolutionSet, g: &GroupElem, x: &State, budget: usize) -> Vec<StarPoint> {
    cauchy_query_with(s, g, x, budget, TOL_POINT)
}

/// Up to `budget` pairwise distinct star points through `(g, x)`.
pub fn cauchy_query_with(s: &dyn SolutionSet, g: &GroupElem, x: &State, budget: usize, tol: f64) -> Vec<StarPoint> {
    assert!(budget >= 1, "cauchy query needs a positive budget");
    let group = s.group();
    let space = s.state_space();
    let mut out: Vec<StarPoint> = Vec::new();
    for phi in s.through(g, x, budget) {
        let Some(y) = phi.eval(g) else { continue };
        if space.metric(&y, x) > tol {
            continue;
        }
        if out.iter().all(|p| distinct(&p.phi, &phi, g, &group, tol)) {
            out.push(StarPoint { g: g.clone(), phi });
            if out.len() == budget {
                break;
            }
        }
    }
    out
}
