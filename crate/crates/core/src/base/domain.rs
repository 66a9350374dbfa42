use std::collections::BTreeSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{ExactReal, GroupElem};
use crate::tolerance::ENDPOINT_GUARD;

/// An open interval `(lo, hi)` of the real line. A missing endpoint is
/// infinite. Endpoints are exact so that translations round-trip.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Interval {
    lo: Option<ExactReal>,
    hi: Option<ExactReal>,
}

fn guard(x: f64) -> f64 {
    ENDPOINT_GUARD * x.abs().max(1.0)
}

impl Interval {
    /// `None` when the interval would be empty.
    pub fn new(lo: Option<f64>, hi: Option<f64>) -> Option<Interval> {
        Interval::exact(lo.map(ExactReal::from_f64), hi.map(ExactReal::from_f64))
    }

    pub fn exact(lo: Option<ExactReal>, hi: Option<ExactReal>) -> Option<Interval> {
        if let (Some(a), Some(b)) = (&lo, &hi) {
            if a >= b {
                return None;
            }
        }
        Some(Interval { lo, hi })
    }

    pub fn bounded(lo: f64, hi: f64) -> Interval {
        Interval::new(Some(lo), Some(hi)).unwrap_or_else(|| panic!("empty interval ({lo}, {hi})"))
    }

    pub fn line() -> Interval {
        Interval { lo: None, hi: None }
    }

    pub fn lo_exact(&self) -> Option<&ExactReal> {
        self.lo.as_ref()
    }

    pub fn hi_exact(&self) -> Option<&ExactReal> {
        self.hi.as_ref()
    }

    /// Lower endpoint, `-inf` when unbounded.
    pub fn lo(&self) -> f64 {
        self.lo.as_ref().map_or(f64::NEG_INFINITY, ExactReal::to_f64)
    }

    pub fn hi(&self) -> f64 {
        self.hi.as_ref().map_or(f64::INFINITY, ExactReal::to_f64)
    }

    pub fn length(&self) -> f64 {
        self.hi() - self.lo()
    }

    /// Open membership with a guard band of `1e-12·max(1, |endpoint|)`.
    pub fn contains(&self, t: f64) -> bool {
        let lo = self.lo();
        let hi = self.hi();
        t.is_finite() && (lo == f64::NEG_INFINITY || t > lo + guard(lo)) && (hi == f64::INFINITY || t < hi - guard(hi))
    }

    pub fn translate(&self, g: &ExactReal) -> Interval {
        Interval {
            lo: self.lo.as_ref().map(|a| a - g),
            hi: self.hi.as_ref().map(|b| b - g),
        }
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = match (&self.lo, &other.lo) {
            (Some(a), Some(b)) => Some(a.max(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        let hi = match (&self.hi, &other.hi) {
            (Some(a), Some(b)) => Some(a.min(b).clone()),
            (Some(a), None) | (None, Some(a)) => Some(a.clone()),
            (None, None) => None,
        };
        Interval::exact(lo, hi)
    }

    /// Whether `other ⊂ self`.
    pub fn covers(&self, other: &Interval) -> bool {
        let lo_ok = match (&self.lo, &other.lo) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => a <= b,
        };
        let hi_ok = match (&self.hi, &other.hi) {
            (None, _) => true,
            (Some(_), None) => false,
            (Some(a), Some(b)) => b <= a,
        };
        lo_ok && hi_ok
    }
}

impl fmt::Debug for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", self.lo(), self.hi())
    }
}

#[derive(Serialize, Deserialize)]
struct IntervalRepr {
    lo: Option<f64>,
    hi: Option<f64>,
}

impl Serialize for Interval {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        IntervalRepr {
            lo: self.lo.as_ref().map(ExactReal::to_f64),
            hi: self.hi.as_ref().map(ExactReal::to_f64),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Interval {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let r = IntervalRepr::deserialize(d)?;
        Interval::new(r.lo, r.hi).ok_or_else(|| serde::de::Error::custom("empty interval"))
    }
}

/// An open subset of a time group: a finite union of disjoint open intervals
/// on ℝ, or an explicit element set on a discrete group.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum OpenDomain {
    Intervals(Vec<Interval>),
    Elements(BTreeSet<GroupElem>),
}

impl OpenDomain {
    pub fn interval(lo: f64, hi: f64) -> OpenDomain {
        OpenDomain::Intervals(vec![Interval::bounded(lo, hi)])
    }

    pub fn line() -> OpenDomain {
        OpenDomain::Intervals(vec![Interval::line()])
    }

    pub fn from_interval(i: Interval) -> OpenDomain {
        OpenDomain::Intervals(vec![i])
    }

    /// Sorts and merges overlapping intervals. Intervals that only share an
    /// endpoint stay separate, since the shared point is not in the union.
    pub fn from_intervals(mut parts: Vec<Interval>) -> OpenDomain {
        parts.sort_by(|a, b| a.lo().total_cmp(&b.lo()).then(a.hi().total_cmp(&b.hi())));
        let mut out: Vec<Interval> = Vec::with_capacity(parts.len());
        for next in parts {
            if let Some(last) = out.last_mut() {
                let overlaps = match (&last.hi, &next.lo) {
                    (None, _) | (_, None) => true,
                    (Some(b), Some(a)) => a < b,
                };
                if overlaps {
                    let extends = match (&last.hi, &next.hi) {
                        (None, _) => false,
                        (Some(_), None) => true,
                        (Some(b), Some(d)) => d > b,
                    };
                    if extends {
                        last.hi = next.hi;
                    }
                    continue;
                }
            }
            out.push(next);
        }
        OpenDomain::Intervals(out)
    }

    pub fn elements(items: impl IntoIterator<Item = GroupElem>) -> OpenDomain {
        OpenDomain::Elements(items.into_iter().collect())
    }

    pub fn integers(range: std::ops::RangeInclusive<i64>) -> OpenDomain {
        OpenDomain::elements(range.map(GroupElem::Int))
    }

    pub fn is_empty(&self) -> bool {
        match self {
            OpenDomain::Intervals(v) => v.is_empty(),
            OpenDomain::Elements(s) => s.is_empty(),
        }
    }

    pub fn intervals(&self) -> &[Interval] {
        match self {
            OpenDomain::Intervals(v) => v,
            OpenDomain::Elements(_) => &[],
        }
    }

    /// The single interval of a connected real domain.
    pub fn as_interval(&self) -> Option<&Interval> {
        match self {
            OpenDomain::Intervals(v) if v.len() == 1 => Some(&v[0]),
            _ => None,
        }
    }

    /// Infimum and supremum of a real domain.
    pub fn bounds(&self) -> Option<(f64, f64)> {
        let v = self.intervals();
        Some((v.first()?.lo(), v.last()?.hi()))
    }

    pub fn is_whole_line(&self) -> bool {
        matches!(self.as_interval(), Some(i) if i.lo.is_none() && i.hi.is_none())
    }

    pub fn contains_real(&self, t: f64) -> bool {
        match self {
            OpenDomain::Intervals(v) => v.iter().any(|i| i.contains(t)),
            OpenDomain::Elements(s) => t.fract() == 0.0 && t.abs() < 9.0e15 && s.contains(&GroupElem::Int(t as i64)),
        }
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        match (self, g) {
            (OpenDomain::Intervals(v), GroupElem::Real(t)) => {
                let t = t.to_f64();
                v.iter().any(|i| i.contains(t))
            }
            (OpenDomain::Elements(s), g) => s.contains(g),
            _ => false,
        }
    }

    /// `{ h : h·g ∈ D }`, that is `D·g⁻¹`; for reals `D - g` with exact endpoints.
    pub fn translate(&self, g: &GroupElem) -> OpenDomain {
        match (self, g) {
            (OpenDomain::Intervals(v), GroupElem::Real(r)) => {
                OpenDomain::Intervals(v.iter().map(|i| i.translate(r)).collect())
            }
            (OpenDomain::Intervals(_), other) => panic!("cannot translate a real domain by {other:?}"),
            (OpenDomain::Elements(s), g) => {
                let g_inv = g.inv();
                OpenDomain::Elements(s.iter().map(|d| d.mul(&g_inv)).collect())
            }
        }
    }

    /// `None` when the intersection is empty.
    pub fn intersect(&self, other: &OpenDomain) -> Option<OpenDomain> {
        let out = match (self, other) {
            (OpenDomain::Intervals(a), OpenDomain::Intervals(b)) => {
                let parts = a.iter().flat_map(|x| b.iter().filter_map(move |y| x.intersect(y))).collect();
                OpenDomain::from_intervals(parts)
            }
            (OpenDomain::Elements(a), OpenDomain::Elements(b)) => {
                OpenDomain::Elements(a.intersection(b).cloned().collect())
            }
            _ => return None,
        };
        (!out.is_empty()).then_some(out)
    }

    /// Whether `other ⊂ self`, decided on endpoints and elements.
    pub fn covers(&self, other: &OpenDomain) -> bool {
        match (self, other) {
            (OpenDomain::Intervals(a), OpenDomain::Intervals(b)) => {
                b.iter().all(|y| a.iter().any(|x| x.covers(y)))
            }
            (OpenDomain::Elements(a), OpenDomain::Elements(b)) => b.is_subset(a),
            _ => false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::rng;
    use rand::Rng;
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn translate_examples() {
        let d = OpenDomain::interval(-FRAC_PI_2, FRAC_PI_2);
        let moved = d.translate(&GroupElem::real(1.0));
        let (lo, hi) = moved.bounds().unwrap();
        assert_eq!(lo, -FRAC_PI_2 - 1.0);
        assert_eq!(hi, FRAC_PI_2 - 1.0);

        let half = OpenDomain::from_interval(Interval::new(Some(0.0), None).unwrap());
        assert_eq!(half.translate(&GroupElem::real(0.0)), half);

        let ints = OpenDomain::integers(0..=2);
        assert_eq!(ints.translate(&GroupElem::Int(1)), OpenDomain::integers(-1..=1));
    }

    #[test]
    fn endpoints_are_excluded() {
        let d = OpenDomain::interval(0.0, 1.0);
        assert!(!d.contains_real(0.0));
        assert!(!d.contains_real(1.0));
        assert!(!d.contains_real(1.0 - 1e-13));
        assert!(d.contains_real(1.0 - 1e-9));
        assert!(d.contains_real(0.5));
    }

    #[test]
    fn intersection_and_normalization() {
        let a = OpenDomain::interval(-1.0, 1.0);
        let b = OpenDomain::interval(0.0, 5.0);
        assert_eq!(a.intersect(&b), Some(OpenDomain::interval(0.0, 1.0)));
        assert_eq!(OpenDomain::interval(0.0, 1.0).intersect(&OpenDomain::interval(2.0, 3.0)), None);

        let merged = OpenDomain::from_intervals(vec![
            Interval::bounded(2.0, 4.0),
            Interval::bounded(0.0, 1.0),
            Interval::bounded(0.5, 1.5),
            Interval::bounded(3.0, 3.5),
        ]);
        assert_eq!(
            merged,
            OpenDomain::Intervals(vec![Interval::bounded(0.0, 1.5), Interval::bounded(2.0, 4.0)])
        );
        // touching intervals do not merge: 1 is not a member
        let touching = OpenDomain::from_intervals(vec![Interval::bounded(0.0, 1.0), Interval::bounded(1.0, 2.0)]);
        assert_eq!(touching.intervals().len(), 2);
        assert!(!touching.contains_real(1.0));
    }

    #[test]
    fn translation_round_trip_is_exact() {
        let mut r = rng(5);
        for _ in 0..1000 {
            let n = r.gen_range(1..4);
            let mut parts = Vec::new();
            for _ in 0..n {
                let a: f64 = r.gen_range(-100.0..100.0);
                let len: f64 = r.gen_range(0.001..20.0);
                let lo = if r.gen_bool(0.1) { None } else { Some(a) };
                let hi = if r.gen_bool(0.1) { None } else { Some(a + len) };
                parts.push(Interval::new(lo, hi).unwrap());
            }
            let d = OpenDomain::from_intervals(parts);
            let g = GroupElem::real(r.gen_range(-1e3..1e3));
            assert_eq!(d.translate(&g).translate(&g.inv()), d);
        }
    }
}
