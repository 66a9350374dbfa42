use std::fmt;
use std::sync::Arc;

use super::CompactSet;
use crate::base::{GroupElem, PartialMap, State};

/// `sup_{t ∈ K} d(φ(t), ψ(t))` over the grid of `K`, or `None` when some grid
/// point lies outside `dom φ` or `dom ψ`.
pub fn dist_on_compact(phi: &PartialMap, psi: &PartialMap, k: &CompactSet) -> Option<f64> {
    sup_deviation(phi, psi, k).map(|(d, _)| d)
}

/// Like [`dist_on_compact`], also returning the grid point of maximal
/// deviation.
pub fn sup_deviation(phi: &PartialMap, psi: &PartialMap, k: &CompactSet) -> Option<(f64, Option<GroupElem>)> {
    let mut best = (0.0, None);
    match k {
        CompactSet::Intervals { .. } => {
            for t in k.real_grid() {
                let d = crate::base::euclidean(&phi.eval_real(t)?, &psi.eval_real(t)?);
                if d > best.0 || best.1.is_none() {
                    best = (d, Some(GroupElem::real(t)));
                }
            }
        }
        CompactSet::Finite(items) => {
            for g in items {
                let d = crate::base::euclidean(&phi.eval(g)?, &psi.eval(g)?);
                if d > best.0 || best.1.is_none() {
                    best = (d, Some(g.clone()));
                }
            }
        }
    }
    Some(best)
}

/// An open region of state space used for subbasic sets `W(K, U)`.
#[derive(Clone)]
pub enum OpenRegion {
    Ball { center: State, radius: f64 },
    Box { lo: Vec<f64>, hi: Vec<f64> },
    Predicate(Arc<dyn Fn(&State) -> bool + Send + Sync>),
}

impl OpenRegion {
    /// Whether `x` lies in the region at distance more than `margin` from its
    /// boundary. Predicates ignore the margin.
    pub fn contains(&self, x: &State, margin: f64) -> bool {
        match self {
            OpenRegion::Ball { center, radius } => crate::base::euclidean(x, center) < radius - margin,
            OpenRegion::Box { lo, hi } => x
                .iter()
                .zip(lo.iter().zip(hi))
                .all(|(v, (a, b))| *v > a + margin && *v < b - margin),
            OpenRegion::Predicate(p) => p(x),
        }
    }
}

impl fmt::Debug for OpenRegion {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            OpenRegion::Ball { center, radius } => write!(f, "Ball({:?}, {radius})", center.0),
            OpenRegion::Box { lo, hi } => write!(f, "Box({lo:?}, {hi:?})"),
            OpenRegion::Predicate(_) => write!(f, "Predicate"),
        }
    }
}

/// Whether `φ ∈ W(K, U)`: `K ⊂ dom φ` and `φ(K) ⊂ U`, on the grid of `K`.
pub fn in_subbasis(phi: &PartialMap, k: &CompactSet, u: &OpenRegion, margin: f64) -> bool {
    k.grid()
        .iter()
        .all(|g| phi.eval(g).is_some_and(|x| u.contains(&x, margin)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::OpenDomain;
    use crate::rng::rng;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    fn line(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> PartialMap {
        PartialMap::scalar(OpenDomain::line(), f)
    }

    fn tan() -> PartialMap {
        PartialMap::scalar(OpenDomain::interval(-FRAC_PI_2, FRAC_PI_2), f64::tan)
    }

    #[test]
    fn distance_examples() {
        let k01 = CompactSet::interval(0.0, 1.0, 1e-3);
        let id = line(|t| t);
        assert_eq!(dist_on_compact(&id, &id, &k01), Some(0.0));
        let shifted = line(|t| t + 1.0);
        assert!((dist_on_compact(&id, &shifted, &k01).unwrap() - 1.0).abs() < 1e-15);
        let k02 = CompactSet::interval(0.0, 2.0, 1e-3);
        assert_eq!(dist_on_compact(&tan(), &tan(), &k02), None);
    }

    #[test]
    fn subbasis_examples() {
        let ball = OpenRegion::Ball {
            center: State::scalar(0.0),
            radius: 1.0,
        };
        let k01 = CompactSet::interval(0.0, 1.0, 1e-3);
        let k02 = CompactSet::interval(0.0, 2.0, 1e-3);
        assert!(in_subbasis(&line(|_| 0.0), &k01, &ball, 0.0));
        assert!(!in_subbasis(&line(|t| t), &k02, &ball, 0.0));
        let anything = OpenRegion::Predicate(Arc::new(|_| true));
        assert!(!in_subbasis(&tan(), &k02, &anything, 0.0));
    }

    #[test]
    fn distance_is_a_pseudometric_on_shared_compacts() {
        let mut r = rng(3);
        let k = CompactSet::interval(-1.0, 1.0, 1e-2);
        for _ in 0..1000 {
            let c: [f64; 6] = std::array::from_fn(|_| r.gen_range(-3.0..3.0));
            let f = line(move |t| c[0] + c[1] * t);
            let g = line(move |t| c[2] * t.sin() + c[3]);
            let h = line(move |t| c[4] * t * t - c[5]);
            let (fg, gh, fh) = (
                dist_on_compact(&f, &g, &k).unwrap(),
                dist_on_compact(&g, &h, &k).unwrap(),
                dist_on_compact(&f, &h, &k).unwrap(),
            );
            assert!((fg - dist_on_compact(&g, &f, &k).unwrap()).abs() <= 1e-12);
            assert!(fh <= fg + gh + 1e-12);
        }
    }
}
