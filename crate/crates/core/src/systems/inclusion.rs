use num_rational::Rational64;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::yorke::yorke_scaled;
use super::{interior_grid, real};
use crate::base::{Evaluator, GroupElem, Interpolant, MapTag, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::rng::{rng, seed_from_f64s};
use crate::star::{AdversarialSequence, Membership, SolutionSet, Window};
use crate::topology::ExtensionRule;
use crate::{Error, Result};

/// Right-hand side of `ẋ ∈ F` with `F` an interval or a finite set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum DerivativeSet {
    Interval { lo: f64, hi: f64 },
    Finite(Vec<f64>),
}

impl DerivativeSet {
    /// Distance from `v` to the set.
    pub fn distance(&self, v: f64) -> f64 {
        match self {
            DerivativeSet::Interval { lo, hi } => (lo - v).max(v - hi).max(0.0),
            DerivativeSet::Finite(vals) => vals.iter().map(|w| (w - v).abs()).fold(f64::INFINITY, f64::min),
        }
    }

    pub fn min(&self) -> f64 {
        match self {
            DerivativeSet::Interval { lo, .. } => *lo,
            DerivativeSet::Finite(v) => v.iter().copied().fold(f64::INFINITY, f64::min),
        }
    }

    pub fn max(&self) -> f64 {
        match self {
            DerivativeSet::Interval { hi, .. } => *hi,
            DerivativeSet::Finite(v) => v.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        }
    }

    fn draw<R: Rng>(&self, r: &mut R) -> f64 {
        match self {
            DerivativeSet::Interval { lo, hi } if lo < hi => r.gen_range(*lo..=*hi),
            DerivativeSet::Interval { lo, .. } => *lo,
            DerivativeSet::Finite(v) => v[r.gen_range(0..v.len())],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InclusionSystem {
    pub derivatives: DerivativeSet,
    /// Selection mesh.
    pub delta: f64,
    /// Half-width of the meshed window around the anchor.
    pub horizon: f64,
    pub tol_incl: f64,
}

impl InclusionSystem {
    pub fn interval(lo: f64, hi: f64) -> InclusionSystem {
        InclusionSystem::new(DerivativeSet::Interval { lo, hi })
    }

    pub fn finite(values: Vec<f64>) -> InclusionSystem {
        InclusionSystem::new(DerivativeSet::Finite(values))
    }

    pub fn new(derivatives: DerivativeSet) -> InclusionSystem {
        InclusionSystem {
            derivatives,
            delta: 1.0 / 64.0,
            horizon: 8.0,
            tol_incl: 1e-9,
        }
    }
}

/// Solutions of `ẋ ∈ F`, approximated by selections whose slope is constant on
/// each cell of a mesh and on the two unbounded ends.
#[derive(Clone, Debug)]
pub struct InclusionSet {
    sys: InclusionSystem,
}

pub fn inclusion_solution_set(sys: InclusionSystem) -> Result<InclusionSet> {
    match &sys.derivatives {
        DerivativeSet::Interval { lo, hi } if lo <= hi && lo.is_finite() && hi.is_finite() => {}
        DerivativeSet::Finite(v) if !v.is_empty() && v.iter().all(|x| x.is_finite()) => {}
        other => return Err(Error::InvalidParameter(format!("empty or non-finite derivative set {other:?}"))),
    }
    if !(sys.delta > 0.0 && sys.horizon > 0.0) {
        return Err(Error::InvalidParameter("mesh and horizon must be positive".into()));
    }
    Ok(InclusionSet { sys })
}

impl InclusionSet {
    pub fn system(&self) -> &InclusionSystem {
        &self.sys
    }

    fn tag(&self) -> MapTag {
        MapTag::new(self.descriptor())
    }

    /// The selection through `(g, x)` with slope `slopes[k]` on the `k`-th cell
    /// of `[g - horizon, g + horizon]` and the end cells' slopes beyond.
    fn selection(&self, g: f64, x: f64, slopes: &[f64]) -> PartialMap {
        let cells = slopes.len();
        let half = cells / 2;
        let d = self.sys.delta;
        let times: Vec<f64> = (0..=cells).map(|i| g + (i as f64 - half as f64) * d).collect();
        let mut values = vec![0.0; cells + 1];
        values[half] = x;
        for i in half..cells {
            values[i + 1] = values[i] + slopes[i] * d;
        }
        for i in (0..half).rev() {
            values[i] = values[i + 1] - slopes[i] * d;
        }
        let p = Interpolant::new(times, values.into_iter().map(State::scalar).collect())
            .with_end_slopes(State::scalar(slopes[0]), State::scalar(slopes[cells - 1]));
        PartialMap::interpolant(OpenDomain::line(), p).with_tag(self.tag())
    }

    fn cells(&self) -> usize {
        2 * (self.sys.horizon / self.sys.delta).ceil() as usize
    }

    fn constant(&self, g: f64, x: f64, v: f64) -> PartialMap {
        self.selection(g, x, &vec![v; self.cells()])
    }

    fn random(&self, g: f64, x: f64, seed: u64) -> PartialMap {
        let mut r = rng(seed);
        let slopes: Vec<f64> = (0..self.cells()).map(|_| self.sys.derivatives.draw(&mut r)).collect();
        self.selection(g, x, &slopes)
    }

    fn residual_of_slopes(&self, slopes: impl Iterator<Item = (f64, f64)>) -> Membership {
        let mut worst = (0.0, None);
        for (t, s) in slopes {
            let r = self.sys.derivatives.distance(s);
            if r > worst.0 {
                worst = (r, Some(t));
            }
        }
        if worst.0 > self.sys.tol_incl {
            Membership::NonMember {
                residual: worst.0,
                at: worst.1.map(real),
            }
        } else {
            Membership::Member
        }
    }

    fn two_values(&self) -> Option<(Rational64, Rational64)> {
        let (lo, hi) = (self.sys.derivatives.min(), self.sys.derivatives.max());
        if lo >= hi {
            return None;
        }
        let exact = |v: f64| {
            let r = Rational64::approximate_float(v)?;
            (num_traits::ToPrimitive::to_f64(&r) == Some(v)).then_some(r)
        };
        Some((exact(lo)?, exact(hi)?))
    }
}

impl SolutionSet for InclusionSet {
    fn descriptor(&self) -> String {
        match &self.sys.derivatives {
            DerivativeSet::Interval { lo, hi } => format!("ẋ ∈ [{lo}, {hi}]"),
            DerivativeSet::Finite(v) => {
                let parts: Vec<String> = v.iter().map(|x| x.to_string()).collect();
                format!("ẋ ∈ {{{}}}", parts.join(", "))
            }
        }
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
            .map(|_| {
                let g = r.gen_range(-2.0..=2.0);
                let x = r.gen_range(-2.0..=2.0);
                self.random(g, x, r.gen())
            })
            .collect()
    }

    /// Constant-slope selections through the extreme derivatives first, then
    /// random selections.
    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        let Some(t) = g.as_f64() else { return Vec::new() };
        let x = x.x();
        let mut out = Vec::with_capacity(budget);
        let (lo, hi) = (self.sys.derivatives.min(), self.sys.derivatives.max());
        out.push(self.constant(t, x, lo));
        if hi > lo && budget > 1 {
            out.push(self.constant(t, x, hi));
        }
        let seed = seed_from_f64s(&[t, x]);
        let mut k = 0;
        while out.len() < budget {
            out.push(self.random(t, x, crate::rng::split(seed, k)));
            k += 1;
        }
        out.truncate(budget);
        out
    }

    /// Piecewise-linear maps are tested on their exact slopes; other maps on
    /// difference quotients over mesh cells.
    fn membership(&self, phi: &PartialMap) -> Membership {
        if let (Evaluator::Interpolant(p), Some(times)) = (phi.evaluator(), phi.breakpoints()) {
            if p.values().first().is_some_and(|x| x.dim() != 1) {
                return Membership::NonMember { residual: f64::INFINITY, at: None };
            }
            let slopes = p.slopes();
            let dom = phi.domain();
            let mut pieces: Vec<(f64, f64)> = times
                .windows(2)
                .zip(&slopes)
                .filter(|(w, _)| dom.intervals().iter().any(|iv| iv.lo() < w[1] && iv.hi() > w[0]))
                .map(|(w, s)| (0.5 * (w[0] + w[1]), s.x()))
                .collect();
            let (first, last) = (times[0], *times.last().unwrap());
            let (left, right) = p.end_slopes();
            if let Some((lo, hi)) = dom.bounds() {
                if let (true, Some(s)) = (lo < first, left) {
                    pieces.push((first - 1.0, s.x()));
                }
                if let (true, Some(s)) = (hi > last, right) {
                    pieces.push((last + 1.0, s.x()));
                }
            }
            return self.residual_of_slopes(pieces.into_iter());
        }
        let d = self.sys.delta;
        let grid = interior_grid(phi.domain(), self.sys.horizon, d, (2.0 * self.sys.horizon / d) as usize);
        let quotients = grid.windows(2).filter_map(|w| {
            let (a, b) = (phi.x(w[0])?, phi.x(w[1])?);
            Some((0.5 * (w[0] + w[1]), (b - a) / (w[1] - w[0])))
        });
        self.residual_of_slopes(quotients)
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        Some(OpenDomain::line())
    }

    fn sigma_invariant(&self) -> bool {
        true
    }

    fn extension_rule(&self) -> Option<ExtensionRule> {
        let v = self.sys.derivatives.min();
        Some(ExtensionRule::new(std::sync::Arc::new(move |_, _: &[f64]| vec![v])))
    }

    /// The inductive sequence `φ_0 … φ_8`, carried to the extreme derivatives.
    fn adversarial_sequences(&self, _window: &Window) -> Vec<AdversarialSequence> {
        let Some((v1, v2)) = self.two_values() else {
            return Vec::new();
        };
        let tag = |n: usize| self.tag().param("yorke-n", n as f64);
        let maps: Vec<PartialMap> = (0..=8).map(|n| yorke_scaled(Some(n), v1, v2).to_partial_map(tag(n))).collect();
        let anchors = maps.iter().map(|m| (real(0.0), m.eval_real(0.0).unwrap())).collect();
        let limit = yorke_scaled(None, v1, v2).to_partial_map(self.tag().param("yorke-limit", 1.0));
        vec![AdversarialSequence {
            name: "inductive-sequence".into(),
            maps,
            anchors,
            limit: Some(limit),
        }]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{yorke_limit, yorke_sequence};

    fn line(slope: f64) -> PartialMap {
        PartialMap::scalar(OpenDomain::line(), move |t| slope * t)
    }

    #[test]
    fn membership_examples() {
        let interval = inclusion_solution_set(InclusionSystem::interval(0.5, 1.0)).unwrap();
        let two = inclusion_solution_set(InclusionSystem::finite(vec![0.5, 1.0])).unwrap();
        assert_eq!(interval.membership(&line(0.75)), Membership::Member);
        let m = two.membership(&line(0.75));
        assert!((m.residual().unwrap() - 0.25).abs() < 1e-9, "{m:?}");
        assert_eq!(two.membership(&yorke_sequence(0)), Membership::Member);
        assert_eq!(two.membership(&line(1.0)), Membership::Member);
        let psi = two.membership(&yorke_limit());
        assert_eq!(psi.residual(), Some(0.25));
    }

    #[test]
    fn samples_and_queries_are_members() {
        for sys in [InclusionSystem::interval(0.5, 1.0), InclusionSystem::finite(vec![0.5, 1.0])] {
            let s = inclusion_solution_set(sys).unwrap();
            for phi in s.sample(20, 4) {
                assert_eq!(s.membership(&phi), Membership::Member);
            }
            let maps = s.through(&real(0.3), &State::scalar(-1.0), 5);
            assert_eq!(maps.len(), 5);
            for phi in &maps {
                assert_eq!(s.membership(phi), Membership::Member);
                assert!((phi.x(0.3).unwrap() + 1.0).abs() <= 1e-12);
            }
            assert!((maps[0].x(2.3).unwrap() - 0.0).abs() < 1e-12);
            assert!((maps[1].x(2.3).unwrap() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn rejects_empty_sets() {
        assert!(inclusion_solution_set(InclusionSystem::interval(1.0, 0.5)).is_err());
        assert!(inclusion_solution_set(InclusionSystem::finite(vec![])).is_err());
    }
}
