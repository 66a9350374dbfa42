use std::sync::Arc;

use rand::Rng;

use super::{interior_anchor, interior_grid, real};
use crate::base::{GroupElem, Interval, MapTag, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::rng::rng;
use crate::star::{Membership, SolutionSet};
use crate::topology::ExtensionRule;
use crate::tolerance::ENDPOINT_GUARD;
use crate::{Error, Result};

/// Solutions of `x' = x² + a`, `a ≠ 0`, given in closed form.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RiccatiFamily {
    a: f64,
}

pub fn riccati_solution_set(a: f64) -> Result<RiccatiFamily> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("Riccati parameter must be finite and nonzero, got {a}")));
    }
    Ok(RiccatiFamily { a })
}

fn interval(lo: Option<f64>, hi: Option<f64>) -> OpenDomain {
    OpenDomain::from_interval(Interval::new(lo, hi).expect("nonempty solution interval"))
}

/// The maximal solution `φ^a_{(t0, x0)}` with its exact domain.
pub fn riccati_solution(a: f64, t0: f64, x0: f64) -> Result<PartialMap> {
    if a == 0.0 || !a.is_finite() {
        return Err(Error::InvalidParameter(format!("Riccati parameter must be finite and nonzero, got {a}")));
    }
    if !(t0.is_finite() && x0.is_finite()) {
        return Err(Error::InvalidParameter(format!("initial condition ({t0}, {x0}) is not finite")));
    }
    let tag = MapTag::new("riccati").param("a", a).param("t0", t0).param("x0", x0);
    let phi = if a > 0.0 {
        let r = a.sqrt();
        let phase = (x0 / r).atan();
        let lo = t0 + (-std::f64::consts::FRAC_PI_2 - phase) / r;
        let hi = t0 + (std::f64::consts::FRAC_PI_2 - phase) / r;
        PartialMap::scalar(interval(Some(lo), Some(hi)), move |t| r * (r * (t - t0) + phase).tan())
    } else {
        let c = (-a).sqrt();
        let gap = x0.abs() - c;
        if gap.abs() <= ENDPOINT_GUARD {
            let v = c.copysign(x0);
            PartialMap::scalar(OpenDomain::line(), move |_| v)
        } else if gap < 0.0 {
            let phase = (-x0 / c).atanh();
            PartialMap::scalar(OpenDomain::line(), move |t| -c * (c * (t - t0) + phase).tanh())
        } else {
            let phase = (-c / x0).atanh();
            let pole = t0 - phase / c;
            let domain = if x0 > 0.0 {
                interval(None, Some(pole))
            } else {
                interval(Some(pole), None)
            };
            PartialMap::scalar(domain, move |t| -c / (c * (t - t0) + phase).tanh())
        }
    };
    Ok(phi.with_tag(tag))
}

impl RiccatiFamily {
    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn solution(&self, t0: f64, x0: f64) -> PartialMap {
        riccati_solution(self.a, t0, x0).expect("parameter checked at construction")
    }
}

impl SolutionSet for RiccatiFamily {
    fn descriptor(&self) -> String {
        format!("x' = x² + {}", self.a)
    }

    fn group(&self) -> TimeGroup {
        TimeGroup::Reals
    }

    fn state_space(&self) -> StateSpace {
        StateSpace::Euclidean(1)
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut r = rng(seed);
        (0..count)
            .map(|_| self.solution(r.gen_range(-2.0..=2.0), r.gen_range(-2.0..=2.0)))
            .collect()
    }

    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        match (g.as_f64(), budget, x.dim()) {
            (Some(t), 1.., 1) if x.is_finite() => vec![self.solution(t, x.x())],
            _ => Vec::new(),
        }
    }

    /// Compares `φ` with the closed form through one of its points: the
    /// domain must fit inside the closed form's and values must agree.
    fn membership(&self, phi: &PartialMap) -> Membership {
        let Some((t0, x0)) = interior_anchor(phi) else {
            return Membership::Unknown;
        };
        if x0.dim() != 1 {
            return Membership::NonMember { residual: f64::INFINITY, at: None };
        }
        let psi = self.solution(t0, x0.x());
        let (Some((a, b)), Some((c, d))) = (phi.domain().bounds(), psi.domain().bounds()) else {
            return Membership::Unknown;
        };
        if a < c - 1e-6 || b > d + 1e-6 {
            let at = if a < c - 1e-6 { c } else { d };
            return Membership::NonMember {
                residual: f64::INFINITY,
                at: Some(real(at)),
            };
        }
        let mut worst = (0.0, None);
        for t in interior_grid(phi.domain(), 10.0, 1e-3, 400) {
            let (Some(u), Some(v)) = (phi.x(t), psi.x(t)) else { continue };
            if v.abs() > 1e3 {
                continue;
            }
            let r = (u - v).abs() / (1.0 + v.abs());
            if r > worst.0 {
                worst = (r, Some(t));
            }
        }
        if worst.0 > 1e-6 {
            Membership::NonMember {
                residual: worst.0,
                at: worst.1.map(real),
            }
        } else {
            Membership::Member
        }
    }

    fn sigma_invariant(&self) -> bool {
        true
    }

    fn closed_form_complete(&self) -> bool {
        true
    }

    fn extension_rule(&self) -> Option<ExtensionRule> {
        let a = self.a;
        Some(ExtensionRule::new(Arc::new(move |_, x: &[f64]| vec![x[0] * x[0] + a])))
    }
}
