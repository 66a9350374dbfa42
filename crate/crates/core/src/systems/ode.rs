use std::fmt;
use std::sync::Arc;

use rand::Rng;

use super::{interior_grid, real};
use crate::base::{Evaluator, GroupElem, Interval, MapTag, OpenDomain, PartialMap, State, StateSpace, TimeGroup};
use crate::rng::rng;
use crate::star::{Membership, SolutionSet};
use crate::topology::{integrate, ExtensionRule, IntegratorParams, Rhs};
use crate::{Error, Result};

/// Spatial window of an ODE: solutions are continued while they stay inside.
pub type SpatialWindow = Arc<dyn Fn(&[f64]) -> bool + Send + Sync>;

/// `x' = f(t, x)` on `ℝⁿ`.
#[derive(Clone)]
pub struct OdeSystem {
    pub label: String,
    pub rhs: Rhs,
    pub dim: usize,
    pub window: Option<SpatialWindow>,
    pub params: IntegratorParams,
    /// Box from which the sampler draws initial states.
    pub sample_box: Vec<(f64, f64)>,
    /// Relative tolerance of the residual membership test.
    pub tol_resid: f64,
    /// Every solution is known to exist for all time (linear equations, for
    /// instance). Integration still stops at `params.t_max`.
    pub global: bool,
}

impl OdeSystem {
    pub fn new(label: impl Into<String>, dim: usize, rhs: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> OdeSystem {
        OdeSystem {
            label: label.into(),
            rhs: Arc::new(rhs),
            dim,
            window: None,
            params: IntegratorParams::default(),
            sample_box: vec![(-2.0, 2.0); dim],
            tol_resid: 1e-6,
            global: false,
        }
    }

    /// Scalar autonomous equation `x' = f(x)`.
    pub fn autonomous(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> OdeSystem {
        OdeSystem::new(label, 1, move |_, x| vec![f(x[0])])
    }

    pub fn with_window(mut self, window: impl Fn(&[f64]) -> bool + Send + Sync + 'static) -> OdeSystem {
        self.window = Some(Arc::new(window));
        self
    }

    pub fn with_params(mut self, params: IntegratorParams) -> OdeSystem {
        self.params = params;
        self
    }

    /// Declares that solutions exist on all of ℝ. The blow-up threshold is
    /// raised so that exponential growth is not mistaken for blow-up.
    pub fn global(mut self) -> OdeSystem {
        self.global = true;
        self.params.blowup = self.params.blowup.max(1e30);
        self
    }
}

impl fmt::Debug for OdeSystem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("OdeSystem")
            .field("label", &self.label)
            .field("dim", &self.dim)
            .field("windowed", &self.window.is_some())
            .field("params", &self.params)
            .finish()
    }
}

/// Maximal solutions of an ODE, computed by integration in both directions.
#[derive(Clone, Debug)]
pub struct OdeSet {
    sys: OdeSystem,
}

pub fn ode_solution_set(sys: OdeSystem) -> Result<OdeSet> {
    if sys.dim == 0 || sys.sample_box.len() != sys.dim {
        return Err(Error::InvalidParameter(format!("bad dimension for {}", sys.label)));
    }
    Ok(OdeSet { sys })
}

impl OdeSet {
    pub fn system(&self) -> &OdeSystem {
        &self.sys
    }

    /// The maximal solution through `(t0, x0)`.
    pub fn solve(&self, t0: f64, x0: &State) -> Result<PartialMap> {
        let window = self.sys.window.as_deref().map(|w| w as &(dyn Fn(&[f64]) -> bool + Sync));
        let fwd = integrate(&self.sys.rhs, t0, x0, 1.0, &self.sys.params, window)?;
        let bwd = integrate(&self.sys.rhs, t0, x0, -1.0, &self.sys.params, window)?;
        let (lo, hi) = (bwd.end.min(t0), fwd.end.max(t0));
        let open = |a: f64, b: f64| Interval::new(Some(a), Some(b)).map(OpenDomain::from_interval);
        let mut pieces = Vec::new();
        if let Some(d) = open(t0, hi) {
            pieces.push(PartialMap::new(d, Evaluator::Dense(fwd.dense)));
        }
        // The backward piece also owns t0 itself.
        if let Some(d) = open(lo, t0 + 1e-9) {
            pieces.push(PartialMap::new(d, Evaluator::Dense(bwd.dense)));
        }
        let domain = open(lo, hi).ok_or_else(|| Error::IntegrationFailure {
            t: t0,
            reason: "empty solution interval".into(),
        })?;
        let mut tag = MapTag::new(self.sys.label.clone()).param("t0", t0);
        for (i, v) in x0.iter().enumerate() {
            tag = tag.param(&format!("x0_{}", i + 1), *v);
        }
        Ok(PartialMap::new(domain, Evaluator::Glued(pieces)).with_tag(tag))
    }

    fn residual_at(&self, phi: &PartialMap, t: f64) -> Option<f64> {
        let x = phi.eval_real(t)?;
        if x.norm() > 1e2 {
            return None;
        }
        // The stencil shrinks near finite endpoints, where blow-up makes the
        // higher derivatives large.
        let room = phi
            .domain()
            .intervals()
            .iter()
            .find(|iv| iv.contains(t))
            .map_or(f64::INFINITY, |iv| (t - iv.lo()).min(iv.hi() - t));
        let h = (room / 50.0).clamp(1e-4, 1e-3);
        let p: Vec<State> = [-2.0, -1.0, 1.0, 2.0]
            .iter()
            .map(|k| phi.eval_real(t + k * h))
            .collect::<Option<_>>()?;
        let f = (self.sys.rhs)(t, &x);
        let mut worst = 0.0f64;
        for i in 0..x.dim() {
            let d = (p[0][i] - 8.0 * p[1][i] + 8.0 * p[2][i] - p[3][i]) / (12.0 * h);
            worst = worst.max((d - f[i]).abs() / (1.0 + f[i].abs()));
        }
        Some(worst)
    }
}

impl SolutionSet for OdeSet {
    fn descriptor(&self) -> String {
        self.sys.label.clone()
    }

    fn group(&self) -> TimeGroup {
        TimeGroup::Reals
    }

    fn state_space(&self) -> StateSpace {
        StateSpace::Euclidean(self.sys.dim)
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut r = rng(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 20 * count.max(1) {
            attempts += 1;
            let t0 = r.gen_range(-2.0..=2.0);
            let x0 = State(self.sys.sample_box.iter().map(|&(a, b)| r.gen_range(a..=b)).collect());
            if self.sys.window.as_ref().is_some_and(|w| !w(&x0)) {
                continue;
            }
            match self.solve(t0, &x0) {
                Ok(phi) => out.push(phi),
                Err(e) => log::warn!("{}: sample from ({t0}, {x0:?}) failed: {e}", self.sys.label),
            }
        }
        out
    }

    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        let Some(t) = g.as_f64() else { return Vec::new() };
        if budget == 0 || x.dim() != self.sys.dim || !x.is_finite() {
            return Vec::new();
        }
        match self.solve(t, x) {
            Ok(phi) => vec![phi],
            Err(e) => {
                log::warn!("{}: no solution through ({t}, {x:?}): {e}", self.sys.label);
                Vec::new()
            }
        }
    }

    /// Residual test `|φ' - f(t, φ)| / (1 + |f|)` with fourth-order central
    /// differences on interior grid points.
    fn membership(&self, phi: &PartialMap) -> Membership {
        let grid = interior_grid(phi.domain(), 10.0, 5e-3, 400);
        let mut worst = (0.0, None);
        let mut checked = 0;
        for t in grid {
            let Some(r) = self.residual_at(phi, t) else { continue };
            checked += 1;
            if r > worst.0 {
                worst = (r, Some(t));
            }
        }
        if checked == 0 {
            Membership::Unknown
        } else if worst.0 > self.sys.tol_resid {
            Membership::NonMember {
                residual: worst.0,
                at: worst.1.map(real),
            }
        } else {
            Membership::Member
        }
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        self.sys.global.then(OpenDomain::line)
    }

    fn sigma_invariant(&self) -> bool {
        // Autonomy is not detectable from the closure; time-independence is
        // tested on a few points instead.
        let probe = [0.3, -1.2];
        let x = vec![0.7; self.sys.dim];
        let a = (self.sys.rhs)(probe[0], &x);
        let b = (self.sys.rhs)(probe[1], &x);
        a == b
    }

    fn extension_rule(&self) -> Option<ExtensionRule> {
        Some(ExtensionRule {
            rhs: Arc::clone(&self.sys.rhs),
            window: self.sys.window.clone(),
            params: self.sys.params,
        })
    }
}
