//! Morphisms `⟨H, k, η⟩` between star-constructions: verification, the
//! phase-space-preserving decomposition `k = (τ, h)`, time-changes `D_φ`, and
//! classification up to topological equivalence and conjugacy.
//!
//! A morphism from `S*W` to `S'*W'` is a triplet of maps with
//! `ev ∘ H = k ∘ ev` and `p ∘ H = η ∘ p`, where `ev(g, φ) = (g, φ(g))` and
//! `p(g, φ) = φ`.

mod builders;
mod classify;
mod time_change;
mod transport;

use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{euclidean, GroupElem, OpenDomain, PartialMap, State, TimeGroup};
use crate::rng::split;
use crate::star::{Membership, PointMap, SolutionSet, Window, Witness};
use crate::tolerance::Tolerances;
use crate::trajectory::Trajectory;

pub use builders::{
    finite_aut_morphism, flow_equivalence, identity, normal_form, phase_map, riccati_scaling, riccati_scaling_on,
    state_scaling, time_reversal, StateHomeo, TimeHomeo,
};
pub use classify::{
    assess, check_orbit_preservation, classify, transport_axioms, ClassifyOptions, EquivalenceLevel, EquivalenceReport,
    OrbitReport, Residuals, TransportRow,
};
pub use time_change::{composition_law_residual, domain_grid, time_change, EndpointImage, TimeChange, ENDPOINT_TOL};
pub use transport::{change_of_variables, TransportedSet};

/// `H`: star points of the source to star points of the target.
pub type StarMap = Arc<dyn Fn(&GroupElem, &PartialMap) -> (GroupElem, PartialMap) + Send + Sync>;
/// `η`: source maps to target maps.
pub type MapOf = Arc<dyn Fn(&PartialMap) -> PartialMap + Send + Sync>;

/// The three maps of a morphism.
#[derive(Clone)]
pub struct Triplet {
    pub big_h: StarMap,
    pub k: PointMap,
    pub eta: MapOf,
}

impl Triplet {
    pub fn new(big_h: StarMap, k: PointMap, eta: MapOf) -> Triplet {
        Triplet { big_h, k, eta }
    }

    /// The triplet with `H(g, φ) = (k(g, φ(g))₁, η(φ))`, the form every
    /// morphism takes.
    pub fn from_k_eta(k: PointMap, eta: MapOf) -> Triplet {
        let (kk, ee) = (Arc::clone(&k), Arc::clone(&eta));
        let big_h: StarMap = Arc::new(move |g, phi| {
            let x = phi.eval(g).unwrap_or_else(|| State(vec![f64::NAN; 1]));
            (kk(g, &x).0, ee(phi))
        });
        Triplet { big_h, k, eta }
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &Triplet) -> Triplet {
        let (h1, h2) = (Arc::clone(&self.big_h), Arc::clone(&next.big_h));
        let (k1, k2) = (Arc::clone(&self.k), Arc::clone(&next.k));
        let (e1, e2) = (Arc::clone(&self.eta), Arc::clone(&next.eta));
        Triplet {
            big_h: Arc::new(move |g, phi| {
                let (g1, p1) = h1(g, phi);
                h2(&g1, &p1)
            }),
            k: Arc::new(move |g, x| {
                let (g1, x1) = k1(g, x);
                k2(&g1, &x1)
            }),
            eta: Arc::new(move |phi| e2(&e1(phi))),
        }
    }
}

/// Solutions requested per sampled point; star points cycle through them.
const STAR_POINT_BUDGET: usize = 3;

/// A solution set with its window.
#[derive(Clone)]
pub struct Endpoint {
    pub set: Arc<dyn SolutionSet>,
    pub window: Window,
}

impl Endpoint {
    pub fn new(set: Arc<dyn SolutionSet>, window: Window) -> Endpoint {
        Endpoint { set, window }
    }

    /// Star points `(g, φ)` with `φ` a solution through a sampled `(g, x) ∈ W`.
    pub fn star_points(&self, count: usize, seed: u64) -> Vec<(GroupElem, PartialMap)> {
        let group = self.set.group();
        let dim = self.set.state_space().dim();
        self.window
            .sample(&group, dim, count, seed)
            .into_iter()
            .enumerate()
            .filter_map(|(i, (g, x))| {
                let mut maps = self.set.through(&g, &x, STAR_POINT_BUDGET);
                if maps.is_empty() {
                    return None;
                }
                let k = i % maps.len();
                Some((g, maps.swap_remove(k)))
            })
            .collect()
    }
}

#[derive(Clone)]
pub struct Morphism {
    pub name: String,
    pub forward: Triplet,
    pub inverse: Option<Triplet>,
    pub source: Endpoint,
    pub target: Endpoint,
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Morphism")
            .field("name", &self.name)
            .field("source", &self.source.set.descriptor())
            .field("target", &self.target.set.descriptor())
            .field("invertible", &self.inverse.is_some())
            .finish()
    }
}

impl Morphism {
    /// `k(g, x)`.
    pub fn k(&self, g: &GroupElem, x: &State) -> (GroupElem, State) {
        (self.forward.k)(g, x)
    }

    pub fn eta(&self, phi: &PartialMap) -> PartialMap {
        (self.forward.eta)(phi)
    }

    pub fn big_h(&self, g: &GroupElem, phi: &PartialMap) -> (GroupElem, PartialMap) {
        (self.forward.big_h)(g, phi)
    }

    /// The induced phase map `ĥ(x) = h(e, x)`.
    pub fn hhat(&self, x: &State) -> State {
        self.k(&self.source.set.group().identity(), x).1
    }

    /// The inverse morphism, when an inverse triplet is present.
    pub fn inverted(&self) -> Option<Morphism> {
        let inv = self.inverse.clone()?;
        Some(Morphism {
            name: format!("{}⁻¹", self.name),
            forward: inv,
            inverse: Some(self.forward.clone()),
            source: self.target.clone(),
            target: self.source.clone(),
        })
    }

    /// The window `k(W)`, when `k` has an inverse.
    pub fn image_window(&self, w: &Window) -> Option<Window> {
        let inv = self.inverse.as_ref()?;
        Some(Window::Mapped {
            inner: Box::new(w.clone()),
            forward: Arc::clone(&self.forward.k),
            inverse: Arc::clone(&inv.k),
        })
    }
}

/// `self` then `next`. The target of `first` must be the source of `second`,
/// compared by descriptor.
pub fn compose(first: &Morphism, second: &Morphism) -> crate::Result<Morphism> {
    let (a, b) = (first.target.set.descriptor(), second.source.set.descriptor());
    if a != b {
        return Err(crate::Error::SourceTargetMismatch(format!("`{a}` is not `{b}`")));
    }
    let forward = first.forward.then(&second.forward);
    let inverse = match (&first.inverse, &second.inverse) {
        (Some(i1), Some(i2)) => Some(i2.then(i1)),
        _ => None,
    };
    let target_window = match &inverse {
        Some(inv) => Window::Mapped {
            inner: Box::new(first.source.window.clone()),
            forward: Arc::clone(&forward.k),
            inverse: Arc::clone(&inv.k),
        },
        None => second.target.window.clone(),
    };
    Ok(Morphism {
        name: format!("{} ∘ {}", second.name, first.name),
        forward,
        inverse,
        source: first.source.clone(),
        target: Endpoint::new(Arc::clone(&second.target.set), target_window),
    })
}

/// Level reached by [`verify_morphism`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MorphismLevel {
    NotAMorphism,
    Morphism,
    Isomorphism,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MorphismReport {
    pub morphism: String,
    pub samples: usize,
    /// `max d(ev ∘ H, k ∘ ev)`.
    pub commutation_ev: f64,
    /// `max d(p ∘ H, η ∘ p)`.
    pub commutation_p: f64,
    /// Images `η(φ)` the target rejected.
    pub nonmembers: usize,
    /// Images `k(g, φ(g))` outside the target window.
    pub outside_window: usize,
    /// Round trips through the inverse triplet in both directions, and the
    /// commutation residual of the inverse.
    pub inverse_residual: Option<f64>,
    pub level: MorphismLevel,
    pub witness: Option<Witness>,
}

impl MorphismReport {
    pub fn commutation(&self) -> f64 {
        self.commutation_ev.max(self.commutation_p)
    }
}

/// Samples `n_samples` star points of the source and checks the morphism
/// identities on them.
pub fn verify_morphism(m: &Morphism, n_samples: usize, seed: u64, tol: &Tolerances) -> MorphismReport {
    let points = m.source.star_points(n_samples, split(seed, 0));
    let back = match m.inverse {
        Some(_) => m.target.star_points(n_samples, split(seed, 1)),
        None => Vec::new(),
    };
    verify_at(m, &points, &back, tol)
}

/// Checks the morphism identities on the given source star points, and the
/// inverse on `target_points`.
pub fn verify_at(
    m: &Morphism,
    points: &[(GroupElem, PartialMap)],
    target_points: &[(GroupElem, PartialMap)],
    tol: &Tolerances,
) -> MorphismReport {
    let tgroup = m.target.set.group();
    let sgroup = m.source.set.group();
    let rows = par_map(points, |(g, phi)| forward_check(m, &tgroup, g, phi));
    let mut report = MorphismReport {
        morphism: m.name.clone(),
        samples: points.len(),
        commutation_ev: 0.0,
        commutation_p: 0.0,
        nonmembers: 0,
        outside_window: 0,
        inverse_residual: None,
        level: MorphismLevel::NotAMorphism,
        witness: None,
    };
    let mut worst: Option<(f64, usize, String)> = None;
    for (i, r) in rows.iter().enumerate() {
        report.commutation_ev = report.commutation_ev.max(r.ev);
        report.commutation_p = report.commutation_p.max(r.p);
        report.nonmembers += usize::from(r.nonmember.is_some());
        report.outside_window += usize::from(!r.in_window);
        let (score, what) = if r.nonmember.is_some() {
            (f64::INFINITY, "η(φ) is not a solution of the target")
        } else if !r.in_window {
            (f64::INFINITY, "k(g, φ(g)) leaves the target window")
        } else if r.ev.is_nan() || r.p.is_nan() {
            (f64::INFINITY, "the morphism maps are undefined")
        } else if r.ev >= r.p {
            (r.ev, "ev ∘ H and k ∘ ev differ")
        } else {
            (r.p, "p ∘ H and η ∘ p differ")
        };
        if score > tol.morph && worst.as_ref().is_none_or(|w| score > w.0) {
            worst = Some((score, i, what.to_string()));
        }
    }
    if let Some((_, i, what)) = worst {
        let (g, phi) = &points[i];
        let r = &rows[i];
        report.witness = Some(Witness {
            description: format!("{what} at a sampled star point"),
            points: phi.eval(g).into_iter().map(|x| (g.clone(), x)).collect(),
            maps: vec![snapshot("phi", phi, g), snapshot("eta-phi", &m.eta(phi), &m.big_h(g, phi).0)],
            residual: Some(r.nonmember.unwrap_or(r.ev.max(r.p))),
            ..Witness::default()
        });
        report.commutation_ev = nan_max(report.commutation_ev, r.ev);
        report.commutation_p = nan_max(report.commutation_p, r.p);
        return report;
    }
    if points.is_empty() {
        return report;
    }
    report.level = MorphismLevel::Morphism;
    if let Some(inv) = &m.inverse {
        let fwd = par_map(points, |(g, phi)| {
            let (g1, psi) = (m.forward.big_h)(g, phi);
            let (g2, chi) = (inv.big_h)(&g1, &psi);
            let x = phi.eval(g).unwrap_or_else(|| State(vec![f64::NAN]));
            let (h, y) = (m.forward.k)(g, &x);
            let (h2, y2) = (inv.k)(&h, &y);
            (sgroup.metric(&g2, g) + map_residual(&chi, phi))
                .max(sgroup.metric(&h2, g) + rel(&y2, &x))
        });
        let bwd = par_map(target_points, |(g, psi)| {
            let (g1, phi) = (inv.big_h)(g, psi);
            let (g2, chi) = (m.forward.big_h)(&g1, &phi);
            let round = tgroup.metric(&g2, g) + map_residual(&chi, psi);
            let inv_comm = forward_check_with(inv, &sgroup, g, psi);
            round.max(inv_comm.0).max(inv_comm.1)
        });
        let r = fwd.into_iter().chain(bwd).fold(0.0, nan_max);
        report.inverse_residual = Some(r);
        if r <= tol.morph {
            report.level = MorphismLevel::Isomorphism;
        }
    }
    report
}

struct ForwardRow {
    ev: f64,
    p: f64,
    nonmember: Option<f64>,
    in_window: bool,
}

fn forward_check(m: &Morphism, tgroup: &TimeGroup, g: &GroupElem, phi: &PartialMap) -> ForwardRow {
    let (ev, p) = forward_check_with(&m.forward, tgroup, g, phi);
    let (g1, psi) = m.big_h(g, phi);
    let nonmember = match m.target.set.membership(&psi) {
        Membership::NonMember { residual, .. } => Some(residual),
        _ => None,
    };
    let in_window = psi.eval(&g1).is_some_and(|y| m.target.window.contains(&g1, &y));
    ForwardRow {
        ev,
        p,
        nonmember,
        in_window,
    }
}

/// Residuals of `ev ∘ H = k ∘ ev` and `p ∘ H = η ∘ p` at one star point.
fn forward_check_with(t: &Triplet, tgroup: &TimeGroup, g: &GroupElem, phi: &PartialMap) -> (f64, f64) {
    let Some(x) = phi.eval(g) else {
        return (f64::INFINITY, f64::INFINITY);
    };
    let (g1, psi) = (t.big_h)(g, phi);
    let (g2, y) = (t.k)(g, &x);
    let ev = match psi.eval(&g1) {
        Some(z) => tgroup.metric(&g1, &g2) + euclidean(&z, &y),
        None => f64::INFINITY,
    };
    (ev, map_residual(&psi, &(t.eta)(phi)))
}

fn nan_max(a: f64, b: f64) -> f64 {
    if a.is_nan() || b.is_nan() {
        f64::NAN
    } else {
        a.max(b)
    }
}

fn rel(a: &State, b: &State) -> f64 {
    euclidean(a, b) / (1.0 + b.norm())
}

/// Values larger than this are left out of relative comparisons.
const VALUE_CAP: f64 = 1e6;
/// Radius to which real domains are clipped when maps are compared.
const COMPARE_RADIUS: f64 = 10.0;

/// Distance between two partial maps on `[-10, 10]`: endpoint differences of
/// their domains plus the largest relative value difference on an interior
/// grid. Endpoints both outside the radius count as equal. Discrete domains
/// must agree exactly.
pub fn map_residual(a: &PartialMap, b: &PartialMap) -> f64 {
    match (a.domain(), b.domain()) {
        (OpenDomain::Elements(da), OpenDomain::Elements(db)) => {
            if da != db {
                return f64::INFINITY;
            }
            da.iter()
                .map(|g| match (a.eval(g), b.eval(g)) {
                    (Some(x), Some(y)) => euclidean(&x, &y),
                    _ => f64::INFINITY,
                })
                .fold(0.0, nan_max)
        }
        (OpenDomain::Intervals(ia), OpenDomain::Intervals(ib)) => {
            if ia.len() != ib.len() {
                return f64::INFINITY;
            }
            let mut worst = 0.0f64;
            for (p, q) in ia.iter().zip(ib) {
                worst = nan_max(worst, endpoint_gap(p.lo(), q.lo()));
                worst = nan_max(worst, endpoint_gap(p.hi(), q.hi()));
                let lo = p.lo().max(q.lo()).max(-COMPARE_RADIUS);
                let hi = p.hi().min(q.hi()).min(COMPARE_RADIUS);
                if lo >= hi {
                    continue;
                }
                for i in 0..64 {
                    let t = lo + (hi - lo) * (i as f64 + 0.5) / 64.0;
                    match (a.eval_real(t), b.eval_real(t)) {
                        (Some(x), Some(y)) if y.norm() <= VALUE_CAP => worst = nan_max(worst, rel(&x, &y)),
                        (Some(_), Some(_)) => {}
                        _ => return f64::INFINITY,
                    }
                }
            }
            worst
        }
        _ => f64::INFINITY,
    }
}

fn endpoint_gap(a: f64, b: f64) -> f64 {
    if a.abs() > COMPARE_RADIUS && b.abs() > COMPARE_RADIUS && a.signum() == b.signum() {
        0.0
    } else if a.is_infinite() || b.is_infinite() {
        if a == b {
            0.0
        } else {
            f64::INFINITY
        }
    } else {
        (a - b).abs()
    }
}

/// The induced map `ĥ` and the residual of `h(g, x) = h(g', x)`.
#[derive(Clone)]
pub struct PhaseDecomposition {
    k: PointMap,
    identity: GroupElem,
    pub well_defined_residual: f64,
    pub phase_preserving: bool,
    pub samples: usize,
}

impl fmt::Debug for PhaseDecomposition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("PhaseDecomposition")
            .field("well_defined_residual", &self.well_defined_residual)
            .field("phase_preserving", &self.phase_preserving)
            .field("samples", &self.samples)
            .finish()
    }
}

impl PhaseDecomposition {
    /// `τ(g, x)`.
    pub fn tau(&self, g: &GroupElem, x: &State) -> GroupElem {
        (self.k)(g, x).0
    }

    /// `h(g, x)`.
    pub fn h(&self, g: &GroupElem, x: &State) -> State {
        (self.k)(g, x).1
    }

    /// `ĥ(x) = h(e, x)`.
    pub fn hhat(&self, x: &State) -> State {
        (self.k)(&self.identity, x).1
    }
}

/// Compares `h(g, x)` across up to eight sampled times per sampled state.
pub fn phase_decomposition(m: &Morphism, n_samples: usize, seed: u64, tol: &Tolerances) -> PhaseDecomposition {
    let group = m.source.set.group();
    let dim = m.source.set.state_space().dim();
    let pts = m.source.window.sample(&group, dim, n_samples, seed);
    let mut times: Vec<GroupElem> = pts.iter().map(|(g, _)| g.clone()).take(8).collect();
    times.push(group.identity());
    let residuals = par_map(&pts, |(_, x)| {
        let base = (m.forward.k)(&group.identity(), x).1;
        times
            .iter()
            .map(|g| euclidean(&(m.forward.k)(g, x).1, &base) / (1.0 + base.norm()))
            .fold(0.0, nan_max)
    });
    let r = residuals.into_iter().fold(0.0, nan_max);
    PhaseDecomposition {
        k: Arc::clone(&m.forward.k),
        identity: group.identity(),
        well_defined_residual: r,
        phase_preserving: r <= tol.morph,
        samples: pts.len(),
    }
}

/// A few seconds of `φ` around `g`, for witnesses.
fn snapshot(label: &str, phi: &PartialMap, g: &GroupElem) -> Trajectory {
    match (phi.domain(), g.as_f64()) {
        (OpenDomain::Intervals(_), Some(t)) => {
            let times: Vec<f64> = (-64..=64).map(|i| t + i as f64 / 32.0).collect();
            Trajectory::capture(label, phi, &times)
        }
        _ => Trajectory::capture(label, phi, &[]),
    }
}

/// Applies `f` to every item on all available cores, keeping the order.
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync) -> Vec<R> {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get()).min(16);
    if threads <= 1 || items.len() < 16 {
        return items.iter().map(f).collect();
    }
    let chunk = items.len().div_ceil(threads);
    std::thread::scope(|s| {
        let f = &f;
        let handles: Vec<_> = items
            .chunks(chunk)
            .map(|c| s.spawn(move || c.iter().map(f).collect::<Vec<R>>()))
            .collect();
        handles.into_iter().flat_map(|h| h.join().expect("worker panicked")).collect()
    })
}

#[cfg(test)]
mod tests;
