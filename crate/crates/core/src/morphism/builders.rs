use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;

use super::{Endpoint, MapOf, Morphism, StarMap, Triplet};
use crate::base::{GroupElem, Interval, MapTag, OpenDomain, PartialMap, Permutation, State, StateFn, TimeFn, TimeMap};
use crate::bebutov::reconstruct_action;
use crate::star::{CheckOptions, PointMap, SolutionSet, Window};
use crate::systems::{action_solution_set, constant_solution_set, finite_aut_system, pullback, riccati_solution_set, ActionSystem};
use crate::{Error, Result};

/// A homeomorphism of the real time group with its inverse.
#[derive(Clone)]
pub enum TimeHomeo {
    Identity,
    /// `t ↦ scale·t + shift`, `scale ≠ 0`.
    Affine { scale: f64, shift: f64 },
    General {
        label: String,
        forward: TimeFn,
        inverse: TimeFn,
        increasing: bool,
    },
}

impl fmt::Debug for TimeHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

impl TimeHomeo {
    pub fn label(&self) -> String {
        match self {
            TimeHomeo::Identity => "id".into(),
            TimeHomeo::Affine { scale, shift } => format!("t ↦ {scale}·t + {shift}"),
            TimeHomeo::General { label, .. } => label.clone(),
        }
    }

    pub fn apply(&self, t: f64) -> f64 {
        match self {
            TimeHomeo::Identity => t,
            TimeHomeo::Affine { scale, shift } => scale * t + shift,
            TimeHomeo::General { forward, .. } => forward(t),
        }
    }

    pub fn apply_inv(&self, t: f64) -> f64 {
        match self {
            TimeHomeo::Identity => t,
            TimeHomeo::Affine { scale, shift } => (t - shift) / scale,
            TimeHomeo::General { inverse, .. } => inverse(t),
        }
    }

    pub fn increasing(&self) -> bool {
        match self {
            TimeHomeo::Identity => true,
            TimeHomeo::Affine { scale, .. } => *scale > 0.0,
            TimeHomeo::General { increasing, .. } => *increasing,
        }
    }

    /// Translations commute with affine maps up to a rescaling, so affine
    /// changes keep σ-invariance.
    pub fn is_affine(&self) -> bool {
        !matches!(self, TimeHomeo::General { .. })
    }

    pub fn inverse(&self) -> TimeHomeo {
        match self {
            TimeHomeo::Identity => TimeHomeo::Identity,
            TimeHomeo::Affine { scale, shift } => TimeHomeo::Affine {
                scale: 1.0 / scale,
                shift: -shift / scale,
            },
            TimeHomeo::General {
                label,
                forward,
                inverse,
                increasing,
            } => TimeHomeo::General {
                label: format!("({label})⁻¹"),
                forward: Arc::clone(inverse),
                inverse: Arc::clone(forward),
                increasing: *increasing,
            },
        }
    }

    /// The image `τ(D)` of an open domain. Unbounded ends go to unbounded
    /// ends.
    pub fn map_domain(&self, d: &OpenDomain) -> OpenDomain {
        if matches!(self, TimeHomeo::Identity) {
            return d.clone();
        }
        match d {
            OpenDomain::Intervals(ivs) => {
                let image = |v: f64| -> Option<f64> {
                    if v.is_finite() {
                        Some(self.apply(v))
                    } else {
                        None
                    }
                };
                let parts = ivs
                    .iter()
                    .filter_map(|iv| {
                        let (lo, hi) = (image(iv.lo()), image(iv.hi()));
                        if self.increasing() {
                            Interval::new(lo, hi)
                        } else {
                            Interval::new(hi, lo)
                        }
                    })
                    .collect();
                OpenDomain::from_intervals(parts)
            }
            OpenDomain::Elements(items) => OpenDomain::elements(
                items
                    .iter()
                    .filter_map(|g| g.as_f64().map(|t| GroupElem::real(self.apply(t)))),
            ),
        }
    }

    fn time_map_inv(&self) -> TimeMap {
        match self {
            TimeHomeo::Identity => TimeMap::Identity,
            _ => {
                let inv = self.clone();
                TimeMap::Real(Arc::new(move |t| inv.apply_inv(t)))
            }
        }
    }
}

/// A homeomorphism of state space with its inverse.
#[derive(Clone)]
pub struct StateHomeo {
    pub label: String,
    pub forward: StateFn,
    pub inverse: StateFn,
}

impl fmt::Debug for StateHomeo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label)
    }
}

impl StateHomeo {
    pub fn new(
        label: impl Into<String>,
        forward: impl Fn(&State) -> State + Send + Sync + 'static,
        inverse: impl Fn(&State) -> State + Send + Sync + 'static,
    ) -> StateHomeo {
        StateHomeo {
            label: label.into(),
            forward: Arc::new(forward),
            inverse: Arc::new(inverse),
        }
    }

    pub fn identity() -> StateHomeo {
        StateHomeo::new("id", State::clone, State::clone)
    }

    /// `x ↦ c·x`, `c ≠ 0`.
    pub fn scaling(c: f64) -> StateHomeo {
        StateHomeo::new(format!("x ↦ {c}·x"), move |x| x.map(|v| c * v), move |x| x.map(|v| v / c))
    }

    pub fn apply(&self, x: &State) -> State {
        (self.forward)(x)
    }

    pub fn apply_inv(&self, x: &State) -> State {
        (self.inverse)(x)
    }

    pub fn inverse(&self) -> StateHomeo {
        StateHomeo {
            label: format!("({})⁻¹", self.label),
            forward: Arc::clone(&self.inverse),
            inverse: Arc::clone(&self.forward),
        }
    }

    fn is_identity(&self) -> bool {
        self.label == "id"
    }
}

/// `h ∘ φ ∘ τ⁻¹` on `τ(dom φ)`.
pub(crate) fn transport_map(phi: &PartialMap, tau: &TimeHomeo, h: &StateHomeo) -> PartialMap {
    if matches!(tau, TimeHomeo::Identity) && h.is_identity() {
        return phi.clone();
    }
    let state = (!h.is_identity()).then(|| Arc::clone(&h.forward));
    phi.transformed(tau.map_domain(phi.domain()), state, tau.time_map_inv())
        .with_tag(MapTag::new(format!("{} ∘ {} ∘ ({})⁻¹", h.label, phi.tag().system, tau.label())))
}

fn phase_triplet(tau: &TimeHomeo, h: &StateHomeo) -> Triplet {
    let (t1, h1) = (tau.clone(), h.clone());
    let k: PointMap = Arc::new(move |g, x| {
        let t = g.as_f64().map_or(f64::NAN, |t| t1.apply(t));
        (GroupElem::real(t), h1.apply(x))
    });
    let (t2, h2) = (tau.clone(), h.clone());
    let eta: MapOf = Arc::new(move |phi| transport_map(phi, &t2, &h2));
    Triplet::from_k_eta(k, eta)
}

/// The morphism with `k(t, x) = (τ(t), h(x))` and `η(φ) = h ∘ φ ∘ τ⁻¹` from
/// `source` onto `target` with window `k(W)`.
pub fn phase_map(name: impl Into<String>, source: Endpoint, target: Arc<dyn SolutionSet>, tau: TimeHomeo, h: StateHomeo) -> Morphism {
    let forward = phase_triplet(&tau, &h);
    let inverse = phase_triplet(&tau.inverse(), &h.inverse());
    let window = Window::Mapped {
        inner: Box::new(source.window.clone()),
        forward: Arc::clone(&forward.k),
        inverse: Arc::clone(&inverse.k),
    };
    Morphism {
        name: name.into(),
        forward,
        inverse: Some(inverse),
        source,
        target: Endpoint::new(target, window),
    }
}

/// The identity triplet on `S*W`.
pub fn identity(set: Arc<dyn SolutionSet>, window: Window) -> Morphism {
    let t = Triplet::new(
        Arc::new(|g, phi| (g.clone(), phi.clone())),
        Arc::new(|g, x| (g.clone(), x.clone())),
        Arc::new(PartialMap::clone),
    );
    Morphism {
        name: "identity".into(),
        forward: t.clone(),
        inverse: Some(t),
        source: Endpoint::new(Arc::clone(&set), window.clone()),
        target: Endpoint::new(set, window),
    }
}

/// `x ↦ c·x` with `τ = id`.
pub fn state_scaling(source: Endpoint, target: Arc<dyn SolutionSet>, c: f64) -> Result<Morphism> {
    if c == 0.0 || !c.is_finite() {
        return Err(Error::InvalidParameter(format!("scale factor {c} is not invertible")));
    }
    Ok(phase_map(format!("scale:{c}"), source, target, TimeHomeo::Identity, StateHomeo::scaling(c)))
}

/// `k(t, x) = (-t, x)`, `η(φ)(t) = φ(-t)`.
pub fn time_reversal(source: Endpoint, target: Arc<dyn SolutionSet>) -> Morphism {
    phase_map(
        "time-reversal",
        source,
        target,
        TimeHomeo::Affine { scale: -1.0, shift: 0.0 },
        StateHomeo::identity(),
    )
}

/// Scaling between Riccati families `x' = x² + a` and `x' = x² + b` on the
/// window `[-1, 1] × [-1, 1]`.
pub fn riccati_scaling(a: f64, b: f64) -> Result<Morphism> {
    riccati_scaling_on(a, b, Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]))
}

/// `k(t, x) = (s·t, x/s)` with `s = √(a/b)`, so that `η` sends the solution
/// through `(t₀, x₀)` to the solution through `(s·t₀, x₀/s)`.
pub fn riccati_scaling_on(a: f64, b: f64, window: Window) -> Result<Morphism> {
    if !(a * b > 0.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "Riccati scaling needs a and b of the same sign, got a = {a}, b = {b}"
        )));
    }
    let s = (a / b).sqrt();
    let source = Arc::new(riccati_solution_set(a)?);
    let target = Arc::new(riccati_solution_set(b)?);
    let m = phase_map(
        format!("riccati-scaling({a}, {b})"),
        Endpoint::new(source, window),
        target,
        TimeHomeo::Affine { scale: s, shift: 0.0 },
        StateHomeo::scaling(1.0 / s),
    );
    Ok(m)
}

/// Largest admissible bracket when inverting `τ(·, x)`.
const BRACKET_LIMIT: f64 = 1e12;

/// Solves `τ(s, x) = t` for `s` by bisection, `τ(·, x)` increasing.
fn invert_increasing(tau: &(dyn Fn(f64, &State) -> f64 + Send + Sync), t: f64, x: &State) -> f64 {
    let (mut lo, mut hi) = (-1.0f64, 1.0f64);
    while tau(lo, x) > t && lo > -BRACKET_LIMIT {
        lo *= 2.0;
    }
    while tau(hi, x) < t && hi < BRACKET_LIMIT {
        hi *= 2.0;
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if tau(mid, x) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    0.5 * (lo + hi)
}

/// Grid used to check the defining identity of a flow equivalence.
fn identity_grid(flow: &ActionSystem) -> Vec<State> {
    let per_axis: usize = match flow.sample_box.len() {
        1 => 21,
        2 => 7,
        _ => 3,
    };
    let mut out = vec![Vec::new()];
    for &(lo, hi) in &flow.sample_box {
        let mut next = Vec::new();
        for p in &out {
            for i in 0..per_axis {
                let mut q = p.clone();
                q.push(lo + (hi - lo) * i as f64 / (per_axis - 1) as f64);
                next.push(q);
            }
        }
        out = next;
    }
    out.into_iter().map(State).collect()
}

pub type TimeCocycle = Arc<dyn Fn(f64, &State) -> f64 + Send + Sync>;

/// The morphism between the solution sets of two flows `Φ` and `Ψ` given a
/// state homeomorphism `h` and a reparametrization `τ` with
/// `Ψ(τ(t, x), h(x)) = h(Φ(t, x))`:
///
/// * `η(Φ(·, x)) = Ψ(·, h(x))`,
/// * `k(t, y) = (-τ(-t, y), h(y))`,
/// * `H(t, Φ(·, x)) = (τ(t, x), η(Φ(·, x)))`.
///
/// The identity is checked on a grid first.
pub fn flow_equivalence(phi: ActionSystem, psi: ActionSystem, h: StateHomeo, tau: TimeCocycle, window: Window, tol_morph: f64) -> Result<Morphism> {
    let ts: Vec<f64> = (0..=40).map(|i| -5.0 + 0.25 * i as f64).collect();
    let mut worst: Option<(f64, f64, State)> = None;
    for x in identity_grid(&phi) {
        for &t in &ts {
            let g = GroupElem::real(t);
            let lhs = psi.apply(&GroupElem::real(tau(t, &x)), &h.apply(&x));
            let rhs = h.apply(&phi.apply(&g, &x));
            let r = crate::base::euclidean(&lhs, &rhs) / (1.0 + rhs.norm());
            if !(r <= tol_morph) && worst.as_ref().is_none_or(|w| r > w.0 || r.is_nan()) {
                worst = Some((r, t, x.clone()));
            }
        }
    }
    if let Some((residual, t, x)) = worst {
        return Err(Error::IdentityViolation { t, x: x.0, residual });
    }
    for x in identity_grid(&phi) {
        let zero = tau(0.0, &x);
        if zero.abs() > tol_morph {
            return Err(Error::PreconditionFailed(format!("τ(0, x) = {zero} at x = {:?}", x.0)));
        }
        if ts.windows(2).any(|w| tau(w[1], &x) <= tau(w[0], &x)) {
            return Err(Error::PreconditionFailed(format!("τ(·, x) is not increasing at x = {:?}", x.0)));
        }
    }

    let source = Arc::new(action_solution_set(phi));
    let target = Arc::new(action_solution_set(psi));
    let dim = source.state_space().dim();
    let at_zero = move |f: &PartialMap| f.eval_real(0.0).unwrap_or_else(|| State(vec![f64::NAN; dim]));

    let eta: MapOf = {
        let (target, h) = (Arc::clone(&target), h.clone());
        Arc::new(move |f| target.orbit_map(&h.apply(&at_zero(f))))
    };
    let k: PointMap = {
        let (tau, h) = (Arc::clone(&tau), h.clone());
        Arc::new(move |g, y| {
            let t = g.as_f64().unwrap_or(f64::NAN);
            (GroupElem::real(-tau(-t, y)), h.apply(y))
        })
    };
    let big_h: StarMap = {
        let (tau, eta) = (Arc::clone(&tau), Arc::clone(&eta));
        Arc::new(move |g, f| {
            let t = g.as_f64().unwrap_or(f64::NAN);
            (GroupElem::real(tau(t, &at_zero(f))), eta(f))
        })
    };

    let eta_inv: MapOf = {
        let (source, h) = (Arc::clone(&source), h.clone());
        Arc::new(move |f| source.orbit_map(&h.apply_inv(&at_zero(f))))
    };
    let k_inv: PointMap = {
        let (tau, h) = (Arc::clone(&tau), h.clone());
        Arc::new(move |g, y| {
            let x = h.apply_inv(y);
            let t = g.as_f64().unwrap_or(f64::NAN);
            (GroupElem::real(-invert_increasing(tau.as_ref(), -t, &x)), x)
        })
    };
    let big_h_inv: StarMap = {
        let (tau, h, eta_inv) = (Arc::clone(&tau), h.clone(), Arc::clone(&eta_inv));
        Arc::new(move |g, f| {
            let x = h.apply_inv(&at_zero(f));
            let t = g.as_f64().unwrap_or(f64::NAN);
            (GroupElem::real(invert_increasing(tau.as_ref(), t, &x)), eta_inv(f))
        })
    };

    let target_window = Window::Mapped {
        inner: Box::new(window.clone()),
        forward: Arc::clone(&k),
        inverse: Arc::clone(&k_inv),
    };
    Ok(Morphism {
        name: "flow-equivalence".into(),
        forward: Triplet::new(big_h, k, eta),
        inverse: Some(Triplet::new(big_h_inv, k_inv, eta_inv)),
        source: Endpoint::new(source, window),
        target: Endpoint::new(target, target_window),
    })
}

/// `Aut(X) → Aut(X')` for a relabelling `h` of the `n` points:
/// `τ(g) = h ∘ g ∘ h⁻¹`, `k(g, f) = (τ(g), (h*)⁻¹ f)` and
/// `η(φ) = (h*)⁻¹ ∘ φ ∘ τ⁻¹`, where `(h* f)_i = f_{h(i)}`.
pub fn finite_aut_morphism(n: usize, h: &Permutation) -> Result<Morphism> {
    if h.len() != n {
        return Err(Error::InvalidParameter(format!("relabelling has {} points, expected {n}", h.len())));
    }
    let (source, window) = finite_aut_system(n)?;
    let (target, _) = finite_aut_system(n)?;
    let forward = aut_triplet(h);
    let inverse = aut_triplet(&h.inverse());
    let target_window = Window::Mapped {
        inner: Box::new(window.clone()),
        forward: Arc::clone(&forward.k),
        inverse: Arc::clone(&inverse.k),
    };
    Ok(Morphism {
        name: format!("finite-aut(n = {n}, h = {:?})", h.images()),
        forward,
        inverse: Some(inverse),
        source: Endpoint::new(Arc::new(source), window),
        target: Endpoint::new(Arc::new(target), target_window),
    })
}

fn aut_triplet(h: &Permutation) -> Triplet {
    let h_inv = h.inverse();
    let conj = {
        let (h, h_inv) = (h.clone(), h_inv.clone());
        move |g: &GroupElem| match g {
            GroupElem::Perm(p) => GroupElem::Perm(h.compose(p).compose(&h_inv)),
            other => other.clone(),
        }
    };
    let k: PointMap = {
        let (conj, h_inv) = (conj.clone(), h_inv.clone());
        Arc::new(move |g, f| (conj(g), pullback(&h_inv, f)))
    };
    let eta: MapOf = Arc::new(move |phi| {
        let values: BTreeMap<GroupElem, State> = match phi.domain() {
            OpenDomain::Elements(items) => items
                .iter()
                .filter_map(|g| phi.eval(g).map(|x| (conj(g), pullback(&h_inv, &x))))
                .collect(),
            OpenDomain::Intervals(_) => BTreeMap::new(),
        };
        PartialMap::table(values).with_tag(phi.tag().clone())
    });
    Triplet::from_k_eta(k, eta)
}

/// The isomorphism `S₀*(G × X) → S*(G × X)` of a σ-invariant family with
/// existence, uniqueness and domain `G`: `k(g, x) = (g, π_S(g, x))`,
/// `η(ψ) = π_S(·, ψ(e))`, with inverse `k⁻¹(g, x) = (g, π_S(g⁻¹, x))` and
/// `η⁻¹(φ) = φ(e)` held constant.
pub fn normal_form(s: Arc<dyn SolutionSet>, window: Window, opts: &CheckOptions) -> Result<Morphism> {
    let act = Arc::new(reconstruct_action(Arc::clone(&s), opts)?);
    let group = s.group();
    let e = group.identity();
    let constants = Arc::new(constant_solution_set(s.state_space()).with_group(group.clone()));
    let dim = s.state_space().dim();

    let k: PointMap = {
        let act = Arc::clone(&act);
        Arc::new(move |g, x| (g.clone(), act.apply(g, x)))
    };
    let eta: MapOf = {
        let (s, e) = (Arc::clone(&s), e.clone());
        Arc::new(move |psi| {
            let x = psi.eval(&e).unwrap_or_else(|| State(vec![f64::NAN; dim]));
            s.through(&e, &x, 1).into_iter().next().unwrap_or_else(|| psi.clone())
        })
    };
    let k_inv: PointMap = {
        let act = Arc::clone(&act);
        Arc::new(move |g, x| (g.clone(), act.apply(&g.inv(), x)))
    };
    let eta_inv: MapOf = {
        let (constants, e) = (Arc::clone(&constants), e.clone());
        Arc::new(move |phi| constants.constant(phi.eval(&e).unwrap_or_else(|| State(vec![f64::NAN; dim]))))
    };
    let forward = Triplet::from_k_eta(k, eta);
    let inverse = Triplet::from_k_eta(k_inv, eta_inv);
    let target_window = Window::Mapped {
        inner: Box::new(window.clone()),
        forward: Arc::clone(&forward.k),
        inverse: Arc::clone(&inverse.k),
    };
    Ok(Morphism {
        name: "normal-form".into(),
        forward,
        inverse: Some(inverse),
        source: Endpoint::new(constants, window),
        target: Endpoint::new(s, target_window),
    })
}
