//! The Bebutov shift `σ(g, φ)(x) = φ(xg)`, flow reconstruction from
//! σ-invariant families, orbits, equilibria and weak invariance.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{GroupElem, MapTag, OpenDomain, PartialMap, State, StateSpace};
use crate::rng::{rng, split};
use crate::star::{check_domain, check_uniqueness, CheckOptions, SolutionSet, Verdict, Window, Witness};
use crate::systems::{ActionFn, ActionSystem};
use crate::tolerance::TOL_POINT;
use crate::trajectory::{grid_with_breakpoints, Trajectory};
use crate::{Error, Result};

/// `σ(g, φ)`: `x ↦ φ(xg)` on `dom(φ)·g⁻¹`.
pub fn shift(g: &GroupElem, phi: &PartialMap) -> PartialMap {
    phi.shifted(g)
}

/// Sampling grid for orbits over real domains.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    pub spacing: f64,
    /// Domains are clipped to `[-radius, radius]`.
    pub radius: f64,
}

impl Default for GridSpec {
    fn default() -> Self {
        GridSpec {
            spacing: 1e-2,
            radius: 10.0,
        }
    }
}

impl GridSpec {
    /// Grid points of `dom φ ∩ [-radius, radius]`; all elements for discrete
    /// domains.
    pub fn points(&self, phi: &PartialMap) -> Vec<GroupElem> {
        match phi.domain() {
            OpenDomain::Elements(items) => items.iter().cloned().collect(),
            d => {
                let mut out = Vec::new();
                for iv in d.intervals() {
                    let lo = iv.lo().max(-self.radius);
                    let hi = iv.hi().min(self.radius);
                    if lo >= hi {
                        continue;
                    }
                    out.extend(
                        grid_with_breakpoints(phi, lo, hi, self.spacing)
                            .into_iter()
                            .filter(|t| iv.contains(*t))
                            .map(GroupElem::real),
                    );
                }
                out
            }
        }
    }
}

/// The orbit `𝒪(φ) = {φ(g) | g ∈ dom φ}` sampled on a grid.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitSample {
    pub source: MapTag,
    pub times: Vec<GroupElem>,
    pub points: Vec<State>,
    pub grid: GridSpec,
}

pub fn orbit_sample(phi: &PartialMap, grid: &GridSpec) -> OrbitSample {
    let (times, points) = grid.points(phi).into_iter().filter_map(|g| phi.eval(&g).map(|x| (g, x))).unzip();
    OrbitSample {
        source: phi.tag().clone(),
        times,
        points,
        grid: *grid,
    }
}

impl OrbitSample {
    /// Largest pairwise distance. Exact for scalar orbits and small samples;
    /// otherwise the radius about the first point, which is at least half of it.
    pub fn diameter(&self) -> f64 {
        let pts = &self.points;
        if pts.is_empty() {
            return 0.0;
        }
        if pts[0].dim() == 1 {
            let (lo, hi) = pts.iter().fold((f64::INFINITY, f64::NEG_INFINITY), |(a, b), x| (a.min(x.x()), b.max(x.x())));
            return hi - lo;
        }
        if pts.len() <= 2048 {
            let mut d = 0.0f64;
            for (i, a) in pts.iter().enumerate() {
                for b in &pts[i + 1..] {
                    d = d.max(crate::base::euclidean(a, b));
                }
            }
            return d;
        }
        pts.iter().map(|x| crate::base::euclidean(x, &pts[0])).fold(0.0, f64::max)
    }

    /// Distance from `x` to the nearest sampled point.
    pub fn distance_to(&self, x: &State) -> f64 {
        self.points.iter().map(|p| crate::base::euclidean(p, x)).fold(f64::INFINITY, f64::min)
    }

    /// Largest gap between consecutive samples: the resolution of the orbit.
    pub fn resolution(&self) -> f64 {
        self.points.windows(2).map(|w| crate::base::euclidean(&w[0], &w[1])).fold(0.0, f64::max)
    }
}

/// Hausdorff distance between two finite point sets.
pub fn hausdorff(a: &[State], b: &[State]) -> f64 {
    if a.is_empty() || b.is_empty() {
        return if a.is_empty() && b.is_empty() { 0.0 } else { f64::INFINITY };
    }
    if a[0].dim() == 1 && b[0].dim() == 1 {
        let sorted = |s: &[State]| {
            let mut v: Vec<f64> = s.iter().map(State::x).collect();
            v.sort_by(f64::total_cmp);
            v
        };
        let (sa, sb) = (sorted(a), sorted(b));
        let one_way = |from: &[f64], to: &[f64]| {
            from.iter()
                .map(|&x| {
                    let i = to.partition_point(|&y| y < x);
                    let right = to.get(i).map_or(f64::INFINITY, |y| y - x);
                    let left = if i > 0 { x - to[i - 1] } else { f64::INFINITY };
                    left.min(right)
                })
                .fold(0.0, f64::max)
        };
        return one_way(&sa, &sb).max(one_way(&sb, &sa));
    }
    let one_way = |from: &[State], to: &[State]| {
        from.iter()
            .map(|x| to.iter().map(|y| crate::base::euclidean(x, y)).fold(f64::INFINITY, f64::min))
            .fold(0.0, f64::max)
    };
    one_way(a, b).max(one_way(b, a))
}

/// Solutions kept by a reconstructed action, keyed by their value at `e`.
const SOLUTION_CACHE: usize = 64;

/// The action `π_S(g, x) = φ_{(e,x)}(g)` of a σ-invariant family with
/// existence, uniqueness and domain `G`.
pub fn reconstruct_action(s: Arc<dyn SolutionSet>, opts: &CheckOptions) -> Result<ActionSystem> {
    if !s.sigma_invariant() {
        return Err(Error::PreconditionFailed(format!("{} is not σ-invariant", s.descriptor())));
    }
    let group = s.group();
    let whole = match s.claimed_domain() {
        Some(d) => d,
        None => OpenDomain::line(),
    };
    let domain = check_domain(s.as_ref(), &whole, opts);
    if domain.verdict.is_refuted() {
        return Err(Error::PreconditionFailed(format!("domain G: {}", domain.verdict.label())));
    }
    let space = s.state_space();
    let dim = space.dim();
    let window = match &space {
        StateSpace::Euclidean(n) => Window::closed_box((-2.0, 2.0), vec![(-2.0, 2.0); *n]),
        StateSpace::FiniteDiscrete(_) => Window::Everything,
    };
    let uniqueness = check_uniqueness(s.as_ref(), &window, opts);
    if uniqueness.verdict.is_refuted() {
        return Err(Error::PreconditionFailed(format!("uniqueness: {}", uniqueness.verdict.label())));
    }
    let e = group.identity();
    let label = format!("action reconstructed from {}", s.descriptor());
    let inner = Arc::clone(&s);
    let cache: Mutex<HashMap<Vec<u64>, Option<PartialMap>>> = Mutex::new(HashMap::new());
    let pi = move |g: &GroupElem, x: &State| -> State {
        let key: Vec<u64> = x.iter().map(|v| v.to_bits()).collect();
        let cached = cache.lock().ok().and_then(|c| c.get(&key).cloned());
        let phi = cached.unwrap_or_else(|| {
            let phi = inner.through(&e, x, 1).into_iter().next();
            if let Ok(mut c) = cache.lock() {
                if c.len() >= SOLUTION_CACHE {
                    c.clear();
                }
                c.insert(key, phi.clone());
            }
            phi
        });
        phi.and_then(|phi| phi.eval(g)).unwrap_or_else(|| State(vec![f64::NAN; dim]))
    };
    Ok(ActionSystem {
        label,
        group,
        space,
        action: ActionFn::General(Arc::new(pi)),
        sample_box: vec![(-2.0, 2.0); dim],
    })
}

/// Residual of `φ_{(e, π_S(g, x))} = σ(g, φ_{(e, x)})` over sampled `(g, x)`,
/// compared on `[-1, 1]`.
pub fn conjugation_residual(s: &dyn SolutionSet, act: &ActionSystem, samples: usize, seed: u64) -> f64 {
    let group = s.group();
    let e = group.identity();
    let mut r = rng(seed);
    let mut worst = 0.0f64;
    for _ in 0..samples {
        let g = group.random_element(&mut r, 5.0);
        let x = State(act.sample_box.iter().map(|&(a, b)| r.gen_range(a..=b)).collect());
        let (Some(phi), Some(psi)) = (
            s.through(&e, &act.apply(&g, &x), 1).pop(),
            s.through(&e, &x, 1).pop().map(|m| shift(&g, &m)),
        ) else {
            return f64::INFINITY;
        };
        let times: Vec<GroupElem> = match group.elements() {
            Some(all) => all,
            None => (0..=20).map(|i| GroupElem::real(-1.0 + 0.1 * i as f64)).collect(),
        };
        for t in &times {
            match (phi.eval(t), psi.eval(t)) {
                (Some(a), Some(b)) => worst = worst.max(crate::base::euclidean(&a, &b) / (1.0 + b.norm())),
                (None, None) => {}
                _ => return f64::INFINITY,
            }
        }
    }
    worst
}

/// Result of an equilibrium test.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquilibriumReport {
    pub x: State,
    pub verdict: Verdict,
    /// Orbit diameter of every queried solution through `(e, x)`.
    pub diameters: Vec<f64>,
    pub notes: Vec<String>,
}

impl EquilibriumReport {
    pub fn is_equilibrium(&self) -> bool {
        self.verdict.holds()
    }
}

/// Whether some solution through `(e, x)` has orbit `{x}`.
///
/// Supported when an orbit diameter is at most `tol_point`; refuted when
/// every queried solution moves by more than `10·tol_point`. In between the
/// verdict stays Supported with a note.
pub fn is_equilibrium(x: &State, s: &dyn SolutionSet, budget: usize, grid: &GridSpec) -> EquilibriumReport {
    let e = s.group().identity();
    let maps = s.through(&e, x, budget.max(1));
    let diameters: Vec<f64> = maps.iter().map(|phi| orbit_sample(phi, grid).diameter()).collect();
    let best = diameters.iter().copied().fold(f64::INFINITY, f64::min);
    let mut notes = Vec::new();
    let verdict = if best <= TOL_POINT {
        Verdict::Supported { samples: maps.len() }
    } else if best > 10.0 * TOL_POINT {
        let traj = maps
            .iter()
            .enumerate()
            .map(|(i, phi)| capture(format!("solution-{i}"), phi, grid))
            .collect();
        Verdict::refuted(Witness {
            description: format!("every queried solution of {} through x moves (least diameter {best:e})", s.descriptor()),
            points: vec![(e, x.clone())],
            maps: traj,
            residual: Some(best),
            ..Witness::default()
        })
    } else {
        notes.push(format!("least orbit diameter {best:e} lies between the equilibrium thresholds"));
        Verdict::Supported { samples: maps.len() }
    };
    EquilibriumReport {
        x: x.clone(),
        verdict,
        diameters,
        notes,
    }
}

fn capture(label: String, phi: &PartialMap, grid: &GridSpec) -> Trajectory {
    match phi.domain() {
        OpenDomain::Intervals(_) => {
            let coarse = GridSpec {
                spacing: grid.spacing.max(0.05),
                ..*grid
            };
            let times: Vec<f64> = coarse.points(phi).iter().filter_map(GroupElem::as_f64).collect();
            Trajectory::capture(label, phi, &times)
        }
        OpenDomain::Elements(_) => Trajectory::capture(label, phi, &[]),
    }
}

/// A subset `A` of state space with a sampler and a membership predicate.
#[derive(Clone, Debug)]
pub enum InvariantSet {
    /// `Π [lo_i, hi_i]`, open or closed.
    Box { bounds: Vec<(f64, f64)>, open: bool },
    Finite(Vec<State>),
    /// A sampled orbit, thickened by its own resolution. Points are drawn
    /// from grid times with `|t| ≤ sample_radius`.
    Orbit { orbit: OrbitSample, sample_radius: f64 },
}

impl InvariantSet {
    /// The orbit of `φ` on twice the radius of `grid`, so that shifted
    /// solutions through sampled points stay within the recorded orbit.
    pub fn orbit_of(phi: &PartialMap, grid: &GridSpec) -> InvariantSet {
        let wide = GridSpec {
            radius: 2.0 * grid.radius,
            ..*grid
        };
        InvariantSet::Orbit {
            orbit: orbit_sample(phi, &wide),
            sample_radius: grid.radius,
        }
    }

    pub fn describe(&self) -> String {
        match self {
            InvariantSet::Box { bounds, open } => format!("{} box {bounds:?}", if *open { "open" } else { "closed" }),
            InvariantSet::Finite(points) => format!("finite set of {} points", points.len()),
            InvariantSet::Orbit { orbit, .. } => format!("orbit of {} ({} points)", orbit.source.system, orbit.points.len()),
        }
    }

    pub fn contains(&self, x: &State) -> bool {
        match self {
            InvariantSet::Box { bounds, open } => {
                x.dim() == bounds.len()
                    && x.iter().zip(bounds).all(|(v, (lo, hi))| {
                        if *open {
                            v > lo && v < hi
                        } else {
                            *v >= lo - TOL_POINT && *v <= hi + TOL_POINT
                        }
                    })
            }
            InvariantSet::Finite(points) => points.iter().any(|p| p.dim() == x.dim() && crate::base::euclidean(p, x) <= TOL_POINT),
            InvariantSet::Orbit { orbit, .. } => orbit.distance_to(x) <= orbit.resolution() + TOL_POINT,
        }
    }

    /// Closed boxes contribute their corners first.
    pub fn sample(&self, count: usize, seed: u64) -> Vec<State> {
        let mut r = rng(seed);
        match self {
            InvariantSet::Box { bounds, open } => {
                let mut out = Vec::with_capacity(count);
                if !*open && bounds.len() <= 4 {
                    for mask in 0..(1usize << bounds.len()) {
                        out.push(State(
                            bounds
                                .iter()
                                .enumerate()
                                .map(|(i, (lo, hi))| if mask >> i & 1 == 1 { *hi } else { *lo })
                                .collect(),
                        ));
                    }
                }
                while out.len() < count {
                    let x = State(bounds.iter().map(|&(lo, hi)| r.gen_range(lo..=hi)).collect());
                    if self.contains(&x) {
                        out.push(x);
                    }
                }
                out.truncate(count);
                out
            }
            InvariantSet::Finite(points) => (0..count.min(points.len().max(1)))
                .filter_map(|i| points.get(i).cloned())
                .collect(),
            InvariantSet::Orbit { orbit, sample_radius } => {
                let inner: Vec<&State> = orbit
                    .times
                    .iter()
                    .zip(&orbit.points)
                    .filter(|(t, _)| t.as_f64().is_some_and(|t| t.abs() <= *sample_radius))
                    .map(|(_, x)| x)
                    .collect();
                if inner.is_empty() {
                    return Vec::new();
                }
                (0..count).map(|_| inner[r.gen_range(0..inner.len())].clone()).collect()
            }
        }
    }
}

/// One sampled point of a weak-invariance check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PointRecord {
    pub x: State,
    pub candidates: usize,
    /// Index of the first solution whose orbit stayed in `A`.
    pub chosen: Option<usize>,
    pub trajectory: Option<Trajectory>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceVerdict {
    pub set: String,
    pub verdict: Verdict,
    pub points: Vec<PointRecord>,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct InvarianceOptions {
    pub n_samples: usize,
    pub seed: u64,
    /// Solutions requested per point.
    pub budget: usize,
    pub grid: GridSpec,
}

impl Default for InvarianceOptions {
    fn default() -> Self {
        InvarianceOptions {
            n_samples: 32,
            seed: 0,
            budget: 16,
            grid: GridSpec::default(),
        }
    }
}

/// Through every sampled `x ∈ A` some solution has its sampled orbit in `A`.
pub fn is_weakly_invariant(a: &InvariantSet, s: &dyn SolutionSet, opts: &InvarianceOptions) -> InvarianceVerdict {
    let e = s.group().identity();
    let mut records = Vec::new();
    for (i, x) in a.sample(opts.n_samples, split(opts.seed, 0)).into_iter().enumerate() {
        let maps = s.through(&e, &x, opts.budget);
        let chosen = maps
            .iter()
            .position(|phi| orbit_sample(phi, &opts.grid).points.iter().all(|y| a.contains(y)));
        let trajectory = chosen.map(|k| capture(format!("point-{i}"), &maps[k], &opts.grid));
        let record = PointRecord {
            x: x.clone(),
            candidates: maps.len(),
            chosen,
            trajectory,
        };
        if chosen.is_none() {
            let tried = maps
                .iter()
                .enumerate()
                .map(|(k, phi)| capture(format!("point-{i}-solution-{k}"), phi, &opts.grid))
                .collect();
            records.push(record);
            return InvarianceVerdict {
                set: a.describe(),
                verdict: Verdict::refuted(Witness {
                    description: format!("no solution of {} through x keeps its orbit in the set", s.descriptor()),
                    points: vec![(e, x)],
                    maps: tried,
                    ..Witness::default()
                }),
                points: records,
            };
        }
        records.push(record);
    }
    InvarianceVerdict {
        set: a.describe(),
        verdict: Verdict::Supported { samples: records.len() },
        points: records,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::systems::{constant_solution_set, ode_solution_set, riccati_solution, riccati_solution_set, OdeSystem};
    use std::f64::consts::FRAC_PI_2;

    #[test]
    fn shift_examples() {
        let tan = riccati_solution(1.0, 0.0, 0.0).unwrap();
        assert_eq!(shift(&GroupElem::real(0.0), &tan).x(0.3), tan.x(0.3));
        let s = shift(&GroupElem::real(1.0), &tan);
        let (lo, hi) = s.domain().bounds().unwrap();
        assert_eq!((lo, hi), (-FRAC_PI_2 - 1.0, FRAC_PI_2 - 1.0));
        assert!((s.x(-0.5).unwrap() - 0.5f64.tan()).abs() < 1e-15);
    }

    #[test]
    fn orbits() {
        let grid = GridSpec::default();
        let one = constant_solution_set(StateSpace::Euclidean(1)).through(&GroupElem::real(0.0), &State::scalar(1.0), 1);
        assert!(orbit_sample(&one[0], &grid).points.iter().all(|x| x.x() == 1.0));
        let tan = PartialMap::scalar(OpenDomain::interval(-1.5, 1.5), f64::tan);
        let o = orbit_sample(&tan, &GridSpec { spacing: 1e-3, radius: 10.0 });
        assert!(o.points.iter().any(|x| x.x() > 12.0) && o.points.iter().any(|x| x.x() < -12.0));
        let tanh = riccati_solution(-1.0, 0.0, 0.0).unwrap();
        assert!(orbit_sample(&tanh, &grid).points.iter().all(|x| x.x().abs() < 1.0));
    }

    #[test]
    fn equilibria() {
        let s = riccati_solution_set(-1.0).unwrap();
        let g = GridSpec::default();
        assert!(is_equilibrium(&State::scalar(1.0), &s, 4, &g).is_equilibrium());
        assert!(!is_equilibrium(&State::scalar(0.0), &s, 4, &g).is_equilibrium());
        let c = constant_solution_set(StateSpace::Euclidean(1));
        assert!(is_equilibrium(&State::scalar(-3.2), &c, 1, &g).is_equilibrium());
    }

    #[test]
    fn weak_invariance() {
        let s = riccati_solution_set(-1.0).unwrap();
        let opts = InvarianceOptions::default();
        let closed = InvariantSet::Box {
            bounds: vec![(-1.0, 1.0)],
            open: false,
        };
        let open = InvariantSet::Box {
            bounds: vec![(-1.0, 1.0)],
            open: true,
        };
        assert!(is_weakly_invariant(&closed, &s, &opts).verdict.holds());
        assert!(is_weakly_invariant(&open, &s, &opts).verdict.holds());

        let unit = ode_solution_set(OdeSystem::autonomous("x' = 1", |_| 1.0)).unwrap();
        let v = is_weakly_invariant(&InvariantSet::Finite(vec![State::scalar(0.0)]), &unit, &opts);
        assert_eq!(v.verdict.witness().unwrap().points[0].1, State::scalar(0.0));

        let phi = riccati_solution(-1.0, 0.3, 0.2).unwrap();
        let orbit = InvariantSet::orbit_of(&phi, &opts.grid);
        assert!(is_weakly_invariant(&orbit, &s, &opts).verdict.holds());
    }

    #[test]
    fn hausdorff_distance() {
        let a: Vec<State> = [0.0, 1.0, 2.0].iter().map(|&v| State::scalar(v)).collect();
        let b: Vec<State> = [0.0, 2.5].iter().map(|&v| State::scalar(v)).collect();
        assert_eq!(hausdorff(&a, &b), 1.0);
        let a2: Vec<State> = a.iter().map(|x| State(vec![x.x(), 0.0])).collect();
        let b2: Vec<State> = b.iter().map(|x| State(vec![x.x(), 0.0])).collect();
        assert_eq!(hausdorff(&a2, &b2), 1.0);
    }
}
