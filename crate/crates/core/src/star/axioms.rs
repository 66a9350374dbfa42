use serde::{Deserialize, Serialize};

use super::query::distinct;
use super::{cauchy_query_with, Axiom, AxiomVerdict, Membership, SolutionSet, Verdict, Window, Witness};
use crate::base::{GroupElem, Interpolant, OpenDomain, PartialMap, State, TimeGroup};
use crate::rng::split;
use crate::tolerance::Tolerances;
use crate::topology::{dist_on_compact, test_convergence_with, CompactSet, ConvergenceOptions, ConvergenceVerdict};
use crate::trajectory::{grid_with_breakpoints, Trajectory};
use crate::{Error, Result};

/// Sampling parameters shared by the existence, uniqueness and domain checks.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckOptions {
    pub n_samples: usize,
    pub seed: u64,
    /// Solutions requested per Cauchy query.
    pub budget: usize,
    pub tol: Tolerances,
}

impl Default for CheckOptions {
    fn default() -> Self {
        CheckOptions {
            n_samples: 32,
            seed: 0,
            budget: 8,
            tol: Tolerances::default(),
        }
    }
}

/// Parameters of the sequential compactness protocol.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactnessOptions {
    /// Random converging probes in addition to the system's own sequences.
    pub probes: usize,
    pub seq_len: usize,
    pub m_max: usize,
    pub seed: u64,
    pub budget: usize,
    pub tol: Tolerances,
}

impl Default for CompactnessOptions {
    fn default() -> Self {
        CompactnessOptions {
            probes: 8,
            seq_len: 10,
            m_max: 3,
            seed: 0,
            budget: 8,
            tol: Tolerances::default(),
        }
    }
}

fn capture_near(label: String, phi: &PartialMap, center: f64, radius: f64, spacing: f64) -> Trajectory {
    let (a, b) = phi.domain().bounds().unwrap_or((center - radius, center + radius));
    let lo = (center - radius).max(if a.is_finite() { a } else { f64::NEG_INFINITY });
    let hi = (center + radius).min(if b.is_finite() { b } else { f64::INFINITY });
    Trajectory::capture(label, phi, &grid_with_breakpoints(phi, lo, hi, spacing))
}

fn dump(label: String, phi: &PartialMap, g: &GroupElem) -> Trajectory {
    capture_near(label, phi, g.as_f64().unwrap_or(0.0), 4.0, 1.0 / 64.0)
}

/// `S*{(t, x)}` is nonempty for every sampled `(t, x) ∈ W`.
pub fn check_existence(s: &dyn SolutionSet, w: &Window, opts: &CheckOptions) -> AxiomVerdict {
    assert!(opts.n_samples >= 1);
    let dim = s.state_space().dim();
    let points = w.sample(&s.group(), dim, opts.n_samples, opts.seed);
    for (g, x) in &points {
        if cauchy_query_with(s, g, x, opts.budget, opts.tol.point).is_empty() {
            return AxiomVerdict::new(
                Axiom::Existence,
                Verdict::refuted(Witness {
                    description: format!("no solution of {} passes through the window point", s.descriptor()),
                    points: vec![(g.clone(), x.clone())],
                    ..Witness::default()
                }),
            );
        }
    }
    let verdict = if s.closed_form_complete() {
        Verdict::ProvedExact
    } else {
        Verdict::Supported { samples: points.len() }
    };
    AxiomVerdict::new(Axiom::Existence, verdict)
}

/// `S*{(t, x)}` has at most one element for every sampled `(t, x) ∈ W`.
pub fn check_uniqueness(s: &dyn SolutionSet, w: &Window, opts: &CheckOptions) -> AxiomVerdict {
    assert!(opts.n_samples >= 1);
    let dim = s.state_space().dim();
    let points = w.sample(&s.group(), dim, opts.n_samples, opts.seed);
    for (g, x) in &points {
        let found = cauchy_query_with(s, g, x, opts.budget, opts.tol.point);
        if found.len() >= 2 {
            let maps = found[..2]
                .iter()
                .enumerate()
                .map(|(i, p)| dump(format!("solution-{i}"), &p.phi, g))
                .collect();
            return AxiomVerdict::new(
                Axiom::Uniqueness,
                Verdict::refuted(Witness {
                    description: format!("two distinct solutions of {} through one point", s.descriptor()),
                    points: vec![(g.clone(), x.clone())],
                    maps,
                    ..Witness::default()
                }),
            );
        }
    }
    let verdict = if s.closed_form_complete() {
        Verdict::ProvedExact
    } else {
        Verdict::Supported { samples: points.len() }
    };
    AxiomVerdict::new(Axiom::Uniqueness, verdict)
}

/// Largest radius of `D` that is grid-tested.
fn domain_radius(s: &dyn SolutionSet) -> f64 {
    let t_max = s.extension_rule().map_or(1e3, |r| r.params.t_max);
    (t_max / 2.0).min(50.0)
}

fn domain_grid(d: &OpenDomain, radius: f64) -> Vec<GroupElem> {
    match d {
        OpenDomain::Intervals(_) => CompactSet::interval(-radius, radius, 1e-2)
            .inner_intersect(d, 1e-9)
            .grid(),
        OpenDomain::Elements(items) => items.iter().cloned().collect(),
    }
}

/// Every sampled solution is defined on (a grid of) `D`.
pub fn check_domain(s: &dyn SolutionSet, d: &OpenDomain, opts: &CheckOptions) -> AxiomVerdict {
    let radius = domain_radius(s);
    let grid = domain_grid(d, radius);
    let maps = s.sample(opts.n_samples, opts.seed);
    for (i, phi) in maps.iter().enumerate() {
        if let Some(missing) = grid.iter().find(|g| !phi.domain().contains(g)) {
            let anchor = anchor_of(phi);
            return AxiomVerdict::new(
                Axiom::Domain,
                Verdict::refuted(Witness {
                    description: format!("sampled solution {i} of {} is undefined at a point of the domain", s.descriptor()),
                    points: anchor.into_iter().collect(),
                    maps: vec![dump(format!("solution-{i}"), phi, missing)],
                    missing: Some(missing.clone()),
                    ..Witness::default()
                }),
            )
            .note(format!("domain grid clipped to [-{radius}, {radius}]"));
        }
    }
    let proved = s.closed_form_complete() && s.claimed_domain().is_some_and(|c| c.covers(d));
    let verdict = if proved {
        Verdict::ProvedExact
    } else {
        Verdict::Supported { samples: maps.len() }
    };
    AxiomVerdict::new(Axiom::Domain, verdict).note(format!("domain grid clipped to [-{radius}, {radius}]"))
}

/// A point `(g, φ(g))` on the graph of `φ`, preferring the middle of its first
/// domain component.
fn anchor_of(phi: &PartialMap) -> Option<(GroupElem, State)> {
    let g = match phi.domain() {
        OpenDomain::Intervals(ivs) => {
            let iv = ivs.first()?;
            let t = match (iv.lo().is_finite(), iv.hi().is_finite()) {
                (true, true) => 0.5 * (iv.lo() + iv.hi()),
                (true, false) => iv.lo() + 1.0,
                (false, true) => iv.hi() - 1.0,
                (false, false) => 0.0,
            };
            GroupElem::real(t)
        }
        OpenDomain::Elements(items) => items.iter().next()?.clone(),
    };
    Some((g.clone(), phi.eval(&g)?))
}

/// Midpoint of the tightest cluster holding half of `values`.
fn accumulation_point(values: &mut [f64]) -> f64 {
    values.sort_by(f64::total_cmp);
    let k = values.len().div_ceil(2).max(1);
    let (mut best, mut mid) = (f64::INFINITY, values[0]);
    for w in values.windows(k) {
        let spread = w[k - 1] - w[0];
        if spread < best {
            best = spread;
            mid = 0.5 * (w[0] + w[k - 1]);
        }
    }
    mid
}

struct Candidate {
    limit: PartialMap,
    lipschitz: f64,
    bound: f64,
}

/// Arzelà–Ascoli surrogate on `[c - 1, c + 1]`: uniform bound and Lipschitz
/// constant of the tail, and a limit built from grid accumulation points.
fn accumulate(tail: &[PartialMap], c: f64) -> Option<Candidate> {
    let h = 1.0 / 128.0;
    let times: Vec<f64> = (0..=256).map(|i| c - 1.0 + i as f64 * h).collect();
    let dim = tail.first()?.eval_real(c)?.dim();
    let mut values: Vec<Vec<State>> = Vec::with_capacity(tail.len());
    for phi in tail {
        values.push(times.iter().map(|&t| phi.eval_real(t)).collect::<Option<Vec<_>>>()?);
    }
    let mut bound = 0.0f64;
    let mut lipschitz = 0.0f64;
    for row in &values {
        for (i, x) in row.iter().enumerate() {
            bound = bound.max(x.norm());
            if i > 0 {
                lipschitz = lipschitz.max(crate::base::euclidean(x, &row[i - 1]) / h);
            }
        }
    }
    if !bound.is_finite() || !lipschitz.is_finite() {
        return None;
    }
    let limit_values: Vec<State> = (0..times.len())
        .map(|j| {
            State(
                (0..dim)
                    .map(|d| {
                        let mut column: Vec<f64> = values.iter().map(|row| row[j][d]).collect();
                        accumulation_point(&mut column)
                    })
                    .collect(),
            )
        })
        .collect();
    let limit = PartialMap::interpolant(OpenDomain::interval(c - 1.0, c + 1.0), Interpolant::new(times, limit_values));
    Some(Candidate {
        limit,
        lipschitz,
        bound,
    })
}

/// Whether some member of `S` through a point of the candidate stays within
/// `slack` of it; then the candidate is a discretized member, not a defect.
fn near_member(s: &dyn SolutionSet, limit: &PartialMap, budget: usize, slack: f64) -> bool {
    let Some((g, x)) = anchor_of(limit) else { return false };
    let (Some((a, b)), Some(t)) = (limit.domain().bounds(), g.as_f64()) else { return false };
    let k = CompactSet::interval(a.max(t - 4.0), b.min(t + 4.0), 1.0 / 128.0).inner_intersect(limit.domain(), 1e-3);
    s.through(&g, &x, budget)
        .iter()
        .any(|phi| dist_on_compact(phi, limit, &k).is_some_and(|d| d <= slack))
}

struct Probe {
    name: String,
    maps: Vec<PartialMap>,
    anchors: Vec<(GroupElem, State)>,
    limit: Option<PartialMap>,
}

fn random_probe(s: &dyn SolutionSet, w: &Window, index: usize, opts: &CompactnessOptions) -> Option<Probe> {
    let group = s.group();
    let dim = s.state_space().dim();
    let target = w.sample(&group, dim, 1, split(opts.seed, 2 * index as u64)).pop()?;
    let start = w.sample(&group, dim, 1, split(opts.seed, 2 * index as u64 + 1)).pop()?;
    let (tg, sg) = match (target.0.as_f64(), start.0.as_f64(), &group) {
        (Some(a), Some(b), TimeGroup::Reals) => (a, b),
        _ => return None,
    };
    let mut maps = Vec::new();
    let mut anchors = Vec::new();
    for n in 0..opts.seq_len {
        let f = 0.5f64.powi(n as i32);
        let g = GroupElem::real(tg + (sg - tg) * f);
        let x = State(target.1.iter().zip(start.1.iter()).map(|(a, b)| a + (b - a) * f).collect());
        if !w.contains(&g, &x) {
            return None;
        }
        let found = s.through(&g, &x, opts.budget);
        if found.is_empty() {
            return None;
        }
        maps.push(found[index % found.len()].clone());
        anchors.push((g, x));
    }
    Some(Probe {
        name: format!("random-probe-{index}"),
        maps,
        anchors,
        limit: None,
    })
}

/// Sequential compactness criterion: every sequence of star points over a
/// convergent sequence in `W` has a subsequence converging in `S*W`.
///
/// Probes are the system's adversarial sequences plus random converging
/// sequences. A probe refutes the axiom when the whole sequence converges on
/// compacts to a limit that is not a member; by uniqueness of limits no
/// subsequence can then converge to a member.
pub fn check_compactness(s: &dyn SolutionSet, w: &Window, opts: &CompactnessOptions) -> Result<AxiomVerdict> {
    w.bounding_box().ok_or(Error::NotCompactWindow)?;
    let mut probes: Vec<Probe> = s
        .adversarial_sequences(w)
        .into_iter()
        .map(|a| Probe {
            name: a.name,
            maps: a.maps,
            anchors: a.anchors,
            limit: a.limit,
        })
        .collect();
    probes.extend((0..opts.probes).filter_map(|i| random_probe(s, w, i, opts)));

    let conv_opts = ConvergenceOptions {
        m_max: opts.m_max,
        tol: opts.tol.conv,
        ..ConvergenceOptions::default()
    };
    let mut notes = Vec::new();
    let mut examined = 0;
    for probe in probes {
        let inside = probe
            .maps
            .iter()
            .zip(&probe.anchors)
            .all(|(phi, (g, x))| w.contains(g, x) && phi.eval(g).is_some_and(|y| crate::base::euclidean(&y, x) <= opts.tol.point));
        if !inside || probe.maps.len() < 4 {
            notes.push(format!("{}: skipped, anchors leave the window", probe.name));
            continue;
        }
        let center = probe.anchors.last().and_then(|(g, _)| g.as_f64()).unwrap_or(0.0);
        let tail = &probe.maps[probe.maps.len() / 2..];
        let (limit, exact) = match (&probe.limit, accumulate(tail, center)) {
            (Some(l), Some(c)) => {
                notes.push(format!("{}: L = {:.4}, M = {:.4}", probe.name, c.lipschitz, c.bound));
                (l.clone(), true)
            }
            (Some(l), None) => (l.clone(), true),
            (None, Some(c)) => {
                notes.push(format!("{}: L = {:.4}, M = {:.4}", probe.name, c.lipschitz, c.bound));
                (c.limit, false)
            }
            (None, None) => {
                notes.push(format!("{}: skipped, no uniform bounds on the tail", probe.name));
                continue;
            }
        };
        examined += 1;
        let report = test_convergence_with(&probe.maps, &limit, &conv_opts);
        if report.verdict != ConvergenceVerdict::Converged {
            continue;
        }
        let Membership::NonMember { residual, at } = s.membership(&limit) else {
            continue;
        };
        let slack = if exact { opts.tol.conv } else { opts.tol.conv.max(1e-3) };
        if near_member(s, &limit, opts.budget, slack) {
            notes.push(format!("{}: limit is within {slack:e} of a member", probe.name));
            continue;
        }
        let maps = probe
            .maps
            .iter()
            .enumerate()
            .map(|(i, phi)| capture_near(format!("phi-{i}"), phi, center, opts.m_max as f64 + 1.0, 1.0 / 8.0))
            .collect();
        let limit_dump = capture_near("limit".into(), &limit, center, opts.m_max as f64 + 1.0, 1.0 / 8.0);
        let at_note = at.as_ref().and_then(GroupElem::as_f64).map(|t| format!(" at t = {t}")).unwrap_or_default();
        return Ok(AxiomVerdict::new(
            Axiom::Compactness,
            Verdict::refuted(Witness {
                description: format!(
                    "{}: the sequence converges on compacts to a non-member of {} (residual {residual}{at_note})",
                    probe.name,
                    s.descriptor()
                ),
                points: probe.anchors.clone(),
                maps,
                limit: Some(limit_dump),
                residual: Some(residual),
                missing: None,
                convergence: Some(report),
            }),
        ));
    }
    let mut verdict = AxiomVerdict::new(Axiom::Compactness, Verdict::Supported { samples: examined });
    verdict.notes = notes;
    Ok(verdict)
}

/// Re-checks a refutation from its serialized witness alone.
pub fn reverify(v: &AxiomVerdict, s: &dyn SolutionSet, w: &Window, tol: &Tolerances) -> Result<bool> {
    let Some(wit) = v.verdict.witness() else {
        return Ok(false);
    };
    let budget = 8;
    Ok(match v.axiom {
        Axiom::Existence => {
            let Some((g, x)) = wit.points.first() else { return Ok(false) };
            w.contains(g, x) && cauchy_query_with(s, g, x, budget, tol.point).is_empty()
        }
        Axiom::Uniqueness => {
            let Some((g, x)) = wit.points.first() else { return Ok(false) };
            if wit.maps.len() < 2 {
                return Ok(false);
            }
            let a = wit.maps[0].to_map()?;
            let b = wit.maps[1].to_map()?;
            let through = |m: &PartialMap| m.eval(g).is_some_and(|y| crate::base::euclidean(&y, x) <= tol.point);
            w.contains(g, x)
                && through(&a)
                && through(&b)
                && s.membership(&a).is_member()
                && s.membership(&b).is_member()
                && distinct(&a, &b, g, &s.group(), tol.point)
        }
        Axiom::Domain => {
            let (Some((g, x)), Some(missing)) = (wit.points.first(), &wit.missing) else {
                return Ok(false);
            };
            let found = s.through(g, x, budget);
            !found.is_empty() && found.iter().all(|phi| !phi.domain().contains(missing))
        }
        Axiom::Compactness => {
            let Some(limit) = &wit.limit else { return Ok(false) };
            let limit = limit.to_map()?;
            let maps = wit.maps.iter().map(Trajectory::to_map).collect::<Result<Vec<_>>>()?;
            let anchored = maps.len() == wit.points.len()
                && maps.iter().zip(&wit.points).all(|(m, (g, x))| {
                    w.contains(g, x) && m.eval(g).is_some_and(|y| crate::base::euclidean(&y, x) <= tol.point)
                });
            let m_max = wit.convergence.as_ref().map_or(3, |c| c.compacts.len());
            let report = test_convergence_with(
                &maps,
                &limit,
                &ConvergenceOptions {
                    m_max,
                    tol: tol.conv,
                    ..ConvergenceOptions::default()
                },
            );
            let residual = s.membership(&limit).residual();
            anchored
                && report.verdict == ConvergenceVerdict::Converged
                && residual.is_some_and(|r| r >= wit.residual.unwrap_or(0.0) - 1e-12)
        }
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn accumulation_picks_the_dense_cluster() {
        let mut v = vec![0.0, 5.0, 1.0, 1.01, 0.99, 1.02, -4.0];
        assert!((accumulation_point(&mut v) - 1.005).abs() < 1e-12);
        assert_eq!(accumulation_point(&mut [2.5]), 2.5);
    }
}
