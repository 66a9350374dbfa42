use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{GroupElem, Interpolant, OpenDomain, State};
use crate::topology::DenseOutput;
use crate::{Error, Result};

pub type ClosedFn = Arc<dyn Fn(f64) -> State + Send + Sync>;
pub type StateFn = Arc<dyn Fn(&State) -> State + Send + Sync>;
pub type TimeFn = Arc<dyn Fn(f64) -> f64 + Send + Sync>;
pub type GroupFn = Arc<dyn Fn(&GroupElem) -> State + Send + Sync>;
pub type GroupMapFn = Arc<dyn Fn(&GroupElem) -> GroupElem + Send + Sync>;

/// Reparametrization applied to the argument before evaluating a base map.
#[derive(Clone)]
pub enum TimeMap {
    Identity,
    Real(TimeFn),
    Group(GroupMapFn),
}

/// How a partial map computes its values.
pub enum Evaluator {
    /// A closed-form function of real time.
    ClosedForm(ClosedFn),
    /// Piecewise-linear reconstruction over a stored grid.
    Interpolant(Interpolant),
    /// Dense output of an adaptive integration.
    Dense(DenseOutput),
    /// Explicit values on a discrete group.
    Table(BTreeMap<GroupElem, State>),
    /// A function of a general group element.
    Group(GroupFn),
    /// The first piece whose domain contains the argument wins.
    Glued(Vec<PartialMap>),
    /// `t ↦ state(base(time_inv(t)))`.
    Transformed {
        base: PartialMap,
        state: Option<StateFn>,
        time_inv: TimeMap,
    },
}

impl Evaluator {
    fn eval_real(&self, t: f64) -> Option<State> {
        match self {
            Evaluator::ClosedForm(f) => Some(f(t)),
            Evaluator::Interpolant(p) => Some(p.eval(t)),
            Evaluator::Dense(d) => Some(d.eval(t)),
            Evaluator::Table(_) | Evaluator::Group(_) => self.eval_elem(&GroupElem::real(t)),
            Evaluator::Glued(pieces) => pieces.iter().find_map(|p| p.eval_real(t)),
            Evaluator::Transformed { base, state, time_inv } => {
                let x = match time_inv {
                    TimeMap::Identity => base.eval_real(t),
                    TimeMap::Real(f) => base.eval_real(f(t)),
                    TimeMap::Group(f) => base.eval(&f(&GroupElem::real(t))),
                }?;
                Some(match state {
                    Some(h) => h(&x),
                    None => x,
                })
            }
        }
    }

    fn eval_elem(&self, g: &GroupElem) -> Option<State> {
        match self {
            Evaluator::Table(values) => values.get(g).cloned(),
            Evaluator::Group(f) => Some(f(g)),
            Evaluator::Glued(pieces) => pieces.iter().find_map(|p| p.eval(g)),
            Evaluator::Transformed { base, state, time_inv } => {
                let x = match time_inv {
                    TimeMap::Identity => base.eval(g),
                    TimeMap::Real(f) => base.eval_real(f(g.as_f64()?)),
                    TimeMap::Group(f) => base.eval(&f(g)),
                }?;
                Some(match state {
                    Some(h) => h(&x),
                    None => x,
                })
            }
            _ => self.eval_real(g.as_f64()?),
        }
    }
}

/// Provenance of a map: the system that produced it and its parameters.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct MapTag {
    pub system: String,
    pub params: Vec<(String, f64)>,
}

impl MapTag {
    pub fn new(system: impl Into<String>) -> MapTag {
        MapTag {
            system: system.into(),
            params: Vec::new(),
        }
    }

    pub fn param(mut self, name: &str, value: f64) -> MapTag {
        self.params.push((name.to_string(), value));
        self
    }

    pub fn get(&self, name: &str) -> Option<f64> {
        self.params.iter().find(|(k, _)| k == name).map(|&(_, v)| v)
    }
}

/// A continuous map from an open subset of a time group into a state space.
///
/// Evaluation outside the domain returns `None`, which stands for the added
/// point `ω`. Shifting keeps the evaluator and accumulates an offset, so
/// `σ(g, σ(h, φ))` and `σ(g·h, φ)` are the same object.
#[derive(Clone)]
pub struct PartialMap {
    domain: OpenDomain,
    evaluator: Arc<Evaluator>,
    offset: Option<GroupElem>,
    offset_f: f64,
    tag: MapTag,
}

impl PartialMap {
    pub fn new(domain: OpenDomain, evaluator: Evaluator) -> PartialMap {
        PartialMap {
            domain,
            evaluator: Arc::new(evaluator),
            offset: None,
            offset_f: 0.0,
            tag: MapTag::default(),
        }
    }

    pub fn closed_form(domain: OpenDomain, f: impl Fn(f64) -> State + Send + Sync + 'static) -> PartialMap {
        PartialMap::new(domain, Evaluator::ClosedForm(Arc::new(f)))
    }

    /// A scalar closed form.
    pub fn scalar(domain: OpenDomain, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> PartialMap {
        PartialMap::closed_form(domain, move |t| State::scalar(f(t)))
    }

    pub fn interpolant(domain: OpenDomain, p: Interpolant) -> PartialMap {
        PartialMap::new(domain, Evaluator::Interpolant(p))
    }

    pub fn table(values: BTreeMap<GroupElem, State>) -> PartialMap {
        let domain = OpenDomain::elements(values.keys().cloned());
        PartialMap::new(domain, Evaluator::Table(values))
    }

    pub fn group_fn(domain: OpenDomain, f: impl Fn(&GroupElem) -> State + Send + Sync + 'static) -> PartialMap {
        PartialMap::new(domain, Evaluator::Group(Arc::new(f)))
    }

    pub fn with_tag(mut self, tag: MapTag) -> PartialMap {
        self.tag = tag;
        self
    }

    pub fn domain(&self) -> &OpenDomain {
        &self.domain
    }

    pub fn tag(&self) -> &MapTag {
        &self.tag
    }

    pub fn evaluator(&self) -> &Evaluator {
        &self.evaluator
    }

    pub fn offset(&self) -> Option<&GroupElem> {
        self.offset.as_ref()
    }

    /// `φ(g)`, or `None` when `g ∉ dom φ`.
    pub fn eval(&self, g: &GroupElem) -> Option<State> {
        if !self.domain.contains(g) {
            return None;
        }
        match (&self.offset, g) {
            (None, GroupElem::Real(t)) => self.evaluator.eval_real(t.to_f64()),
            (Some(_), GroupElem::Real(t)) => self.evaluator.eval_real(t.to_f64() + self.offset_f),
            (None, g) => self.evaluator.eval_elem(g),
            (Some(o), g) => self.evaluator.eval_elem(&g.mul(o)),
        }
    }

    /// Fast path for maps on the reals.
    pub fn eval_real(&self, t: f64) -> Option<State> {
        match &self.domain {
            OpenDomain::Intervals(_) => {
                if !self.domain.contains_real(t) {
                    return None;
                }
                self.evaluator.eval_real(t + self.offset_f)
            }
            OpenDomain::Elements(_) => self.eval(&GroupElem::Int(t as i64)).filter(|_| t.fract() == 0.0),
        }
    }

    /// Scalar value at `t`.
    pub fn x(&self, t: f64) -> Option<f64> {
        self.eval_real(t).map(|s| s.x())
    }

    /// The restriction to `D ∩ dom φ`.
    pub fn restrict(&self, domain: &OpenDomain) -> Result<PartialMap> {
        let domain = self
            .domain
            .intersect(domain)
            .ok_or_else(|| Error::EmptyRestriction(format!("{:?} ∩ {:?}", self.domain, domain)))?;
        Ok(PartialMap { domain, ..self.clone() })
    }

    /// `σ(g, φ)`: the map `x ↦ φ(x·g)` on `dom(φ)·g⁻¹`.
    pub fn shifted(&self, g: &GroupElem) -> PartialMap {
        let offset = match &self.offset {
            None => g.clone(),
            Some(o) => g.mul(o),
        };
        let offset_f = offset.as_f64().unwrap_or(0.0);
        let offset = (!offset.is_identity()).then_some(offset);
        PartialMap {
            domain: self.domain.translate(g),
            evaluator: Arc::clone(&self.evaluator),
            offset_f: if offset.is_some() { offset_f } else { 0.0 },
            offset,
            tag: self.tag.clone(),
        }
    }

    /// `t ↦ h(φ(τ⁻¹(t)))` on the given domain, which the caller computes as
    /// the image `τ(dom φ)`.
    pub fn transformed(&self, domain: OpenDomain, state: Option<StateFn>, time_inv: TimeMap) -> PartialMap {
        PartialMap::new(
            domain,
            Evaluator::Transformed {
                base: self.clone(),
                state,
                time_inv,
            },
        )
        .with_tag(self.tag.clone())
    }

    /// `h ∘ φ` on `dom φ`.
    pub fn map_states(&self, h: StateFn) -> PartialMap {
        self.transformed(self.domain.clone(), Some(h), TimeMap::Identity)
    }

    /// Knots of a piecewise-linear map in its own time coordinate; `None`
    /// for maps that are not stored as interpolants.
    pub fn breakpoints(&self) -> Option<Vec<f64>> {
        match &*self.evaluator {
            Evaluator::Interpolant(p) => Some(p.times().iter().map(|t| t - self.offset_f).collect()),
            _ => None,
        }
    }

    /// Whether `self` and `other` share their evaluator.
    pub fn same_evaluator(&self, other: &PartialMap) -> bool {
        Arc::ptr_eq(&self.evaluator, &other.evaluator)
    }
}

impl fmt::Debug for PartialMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut d = f.debug_struct("PartialMap");
        d.field("domain", &self.domain).field("tag", &self.tag);
        if let Some(o) = &self.offset {
            d.field("offset", o);
        }
        d.finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{FRAC_PI_2, FRAC_PI_4};

    fn tan() -> PartialMap {
        PartialMap::scalar(OpenDomain::interval(-FRAC_PI_2, FRAC_PI_2), f64::tan)
    }

    #[test]
    fn eval_examples() {
        let phi = tan();
        assert_eq!(phi.x(0.0), Some(0.0));
        assert!((phi.x(FRAC_PI_4).unwrap() - 1.0).abs() <= 1e-12);
        assert_eq!(phi.eval_real(2.0), None);
        assert_eq!(phi.eval(&GroupElem::real(2.0)), None);
    }

    #[test]
    fn undefined_exactly_off_domain() {
        let phi = PartialMap::scalar(
            OpenDomain::from_intervals(vec![
                super::super::Interval::bounded(-3.0, -1.0),
                super::super::Interval::bounded(0.5, 2.0),
            ]),
            |t| t,
        );
        for &end in &[-3.0, -1.0, 0.5, 2.0] {
            for k in -20..=20 {
                let t = end + k as f64 * 1e-3;
                let inside = (t > -3.0 && t < -1.0) || (t > 0.5 && t < 2.0);
                assert_eq!(phi.eval_real(t).is_some(), inside, "t = {t}");
            }
            assert!(phi.eval_real(end).is_none());
        }
    }

    #[test]
    fn restrict_examples() {
        let line = PartialMap::scalar(OpenDomain::line(), |t| t * t);
        let r = line.restrict(&OpenDomain::interval(0.0, 1.0)).unwrap();
        assert_eq!(r.x(0.5), Some(0.25));
        assert_eq!(r.x(1.5), None);

        let unit = PartialMap::scalar(OpenDomain::interval(0.0, 1.0), |t| t);
        assert!(matches!(
            unit.restrict(&OpenDomain::interval(2.0, 3.0)),
            Err(Error::EmptyRestriction(_))
        ));

        let sym = PartialMap::scalar(OpenDomain::interval(-1.0, 1.0), |t| t);
        let r = sym.restrict(&OpenDomain::interval(0.0, 5.0)).unwrap();
        assert_eq!(r.domain(), &OpenDomain::interval(0.0, 1.0));
    }

    #[test]
    fn shift_accumulates_offsets() {
        let phi = tan();
        let g = GroupElem::real(0.3);
        let h = GroupElem::real(-0.7);
        let twice = phi.shifted(&h).shifted(&g);
        let once = phi.shifted(&g.mul(&h));
        assert_eq!(twice.domain(), once.domain());
        assert_eq!(twice.x(0.1), once.x(0.1));
        assert_eq!(phi.shifted(&GroupElem::real(0.0)).domain(), phi.domain());
    }

    #[test]
    fn tables_on_discrete_groups() {
        let values: BTreeMap<_, _> = (0..3).map(|n| (GroupElem::Int(n), State::scalar(n as f64 * 10.0))).collect();
        let phi = PartialMap::table(values);
        assert_eq!(phi.eval(&GroupElem::Int(2)).unwrap().x(), 20.0);
        assert!(phi.eval(&GroupElem::Int(3)).is_none());
        let s = phi.shifted(&GroupElem::Int(1));
        assert_eq!(s.eval(&GroupElem::Int(1)).unwrap().x(), 20.0);
        assert!(s.eval(&GroupElem::Int(2)).is_none());
    }
}
