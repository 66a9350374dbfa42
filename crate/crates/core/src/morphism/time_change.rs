use serde::{Deserialize, Serialize};

use super::{rel, Morphism, VALUE_CAP};
use crate::base::{euclidean, GroupElem, OpenDomain, PartialMap};
use crate::bebutov::GridSpec;

/// Tolerance for matching `D_φ`-images of domain endpoints with the
/// endpoints of `dom η(φ)`.
pub const ENDPOINT_TOL: f64 = 1e-6;

/// Where `D_φ` sends one endpoint of `dom φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EndpointImage {
    pub source: f64,
    /// Limit of `D_φ` at the endpoint; `±∞` for unbounded ends.
    pub image: Option<f64>,
    pub target: f64,
}

/// `D_φ(g) = τ(g, φ(g))` sampled over `dom φ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TimeChange {
    pub map_id: usize,
    pub samples: usize,
    /// Strictly increasing on the grid.
    pub monotone: bool,
    /// Strictly decreasing on the grid.
    pub decreasing: bool,
    /// Endpoint images match `dom η(φ)`; for discrete groups, `D_φ` is a
    /// bijection onto `dom η(φ)`.
    pub onto: bool,
    pub endpoints: Vec<EndpointImage>,
    /// `D_φ(e)`, when `e ∈ dom φ`.
    #[serde(rename = "D_at_e")]
    pub d_at_e: Option<GroupElem>,
    /// `max d(η(φ)(D_φ(g)), ĥ(φ(g)))`, relative.
    pub key_identity_residual: f64,
    /// `max d(D_φ(g), g)`.
    pub max_deviation: f64,
}

impl TimeChange {
    pub fn fixes_identity(&self, tol: f64) -> bool {
        self.d_at_e.as_ref().is_some_and(|d| match d {
            GroupElem::Perm(p) => p.images().iter().enumerate().all(|(i, j)| i == *j),
            _ => d.as_f64().is_some_and(|v| v.abs() <= tol),
        })
    }
}

/// Interior grid times of `dom φ ∩ [-radius, radius]`.
pub fn domain_grid(phi: &PartialMap, grid: &GridSpec) -> Vec<f64> {
    let mut out = Vec::new();
    for iv in phi.domain().intervals() {
        let lo = iv.lo().max(-grid.radius);
        let hi = iv.hi().min(grid.radius);
        if lo >= hi {
            continue;
        }
        let n = ((hi - lo) / grid.spacing).ceil().max(1.0) as usize;
        out.extend((0..n).map(|i| lo + (hi - lo) * (i as f64 + 0.5) / n as f64));
    }
    out
}

/// `D_φ(t)` for real groups.
fn d_real(m: &Morphism, phi: &PartialMap, t: f64) -> Option<f64> {
    let x = phi.eval_real(t)?;
    if !x.is_finite() {
        return None;
    }
    m.k(&GroupElem::real(t), &x).0.as_f64().filter(|v| v.is_finite())
}

/// Limit of `D_φ` at a finite endpoint `a`, approached from inside.
fn endpoint_limit(m: &Morphism, phi: &PartialMap, a: f64, inward: f64) -> Option<f64> {
    let scale = a.abs().max(1.0);
    [1e-4, 1e-6, 1e-8, 1e-10]
        .iter()
        .rev()
        .find_map(|d| d_real(m, phi, a + inward * d * scale))
}

pub fn time_change(m: &Morphism, phi: &PartialMap, map_id: usize, grid: &GridSpec) -> TimeChange {
    let psi = m.eta(phi);
    match phi.domain() {
        OpenDomain::Elements(items) => discrete(m, phi, &psi, items.iter().cloned().collect(), map_id),
        OpenDomain::Intervals(ivs) => {
            let times = domain_grid(phi, grid);
            let mut key = 0.0f64;
            let mut dev = 0.0f64;
            let mut ds = Vec::with_capacity(times.len());
            for &t in &times {
                let Some(x) = phi.eval_real(t) else { continue };
                let Some(d) = d_real(m, phi, t) else {
                    key = f64::INFINITY;
                    continue;
                };
                ds.push(d);
                dev = dev.max((d - t).abs());
                let want = m.hhat(&x);
                if want.norm() > VALUE_CAP {
                    continue;
                }
                key = match psi.eval_real(d) {
                    Some(got) => key.max(rel(&got, &want)),
                    None => f64::INFINITY,
                };
            }
            let monotone = ds.len() >= 2 && ds.windows(2).all(|w| w[1] > w[0]);
            let decreasing = ds.len() >= 2 && ds.windows(2).all(|w| w[1] < w[0]);
            let mut endpoints = Vec::new();
            for iv in ivs {
                let image_of = |a: f64, inward: f64| -> Option<f64> {
                    if a.is_finite() {
                        endpoint_limit(m, phi, a, inward)
                    } else if monotone {
                        Some(a)
                    } else if decreasing {
                        Some(-a)
                    } else {
                        None
                    }
                };
                endpoints.push((iv.lo(), image_of(iv.lo(), 1.0)));
                endpoints.push((iv.hi(), image_of(iv.hi(), -1.0)));
            }
            let (records, onto) = match_endpoints(&endpoints, psi.domain(), monotone || decreasing);
            let d_at_e = phi.domain().contains_real(0.0).then(|| d_real(m, phi, 0.0)).flatten().map(GroupElem::real);
            TimeChange {
                map_id,
                samples: ds.len(),
                monotone,
                decreasing,
                onto,
                endpoints: records,
                d_at_e,
                key_identity_residual: key,
                max_deviation: dev,
            }
        }
    }
}

/// Pairs the sorted endpoint images with the endpoints of `dom η(φ)`.
fn match_endpoints(images: &[(f64, Option<f64>)], target: &OpenDomain, injective: bool) -> (Vec<EndpointImage>, bool) {
    let mut sorted: Vec<(f64, Option<f64>)> = images.to_vec();
    sorted.sort_by(|a, b| a.1.unwrap_or(f64::NAN).total_cmp(&b.1.unwrap_or(f64::NAN)));
    let ends: Vec<f64> = target.intervals().iter().flat_map(|iv| [iv.lo(), iv.hi()]).collect();
    let mut onto = injective && ends.len() == sorted.len();
    let records = sorted
        .iter()
        .enumerate()
        .map(|(i, &(source, image))| {
            let target = ends.get(i).copied().unwrap_or(f64::NAN);
            let ok = match image {
                Some(v) if v.is_infinite() || target.is_infinite() => v == target,
                Some(v) => (v - target).abs() <= ENDPOINT_TOL,
                None => false,
            };
            onto &= ok;
            EndpointImage { source, image, target }
        })
        .collect();
    (records, onto)
}

fn discrete(m: &Morphism, phi: &PartialMap, psi: &PartialMap, items: Vec<GroupElem>, map_id: usize) -> TimeChange {
    let group = m.source.set.group();
    let tgroup = m.target.set.group();
    let mut key = 0.0f64;
    let mut dev = 0.0f64;
    let mut images = Vec::with_capacity(items.len());
    let mut d_at_e = None;
    for g in &items {
        let Some(x) = phi.eval(g) else { continue };
        let d = m.k(g, &x).0;
        key = match psi.eval(&d) {
            Some(got) => key.max(euclidean(&got, &m.hhat(&x))),
            None => f64::INFINITY,
        };
        dev = dev.max(tgroup.metric(&d, g));
        if g.is_identity() || *g == group.identity() {
            d_at_e = Some(d.clone());
        }
        images.push(d);
    }
    let mut sorted = images.clone();
    sorted.sort();
    sorted.dedup();
    let onto = sorted.len() == images.len()
        && match psi.domain() {
            OpenDomain::Elements(target) => target.iter().cloned().collect::<Vec<_>>() == sorted,
            OpenDomain::Intervals(_) => false,
        };
    TimeChange {
        map_id,
        samples: images.len(),
        monotone: false,
        decreasing: false,
        onto,
        endpoints: Vec::new(),
        d_at_e,
        key_identity_residual: key,
        max_deviation: dev,
    }
}

/// `max |D''_φ(g) - D'_{η₁(φ)}(D_φ(g))|` over the grid of `φ`, for
/// `m = second ∘ first`.
pub fn composition_law_residual(first: &Morphism, second: &Morphism, composite: &Morphism, phi: &PartialMap, grid: &GridSpec) -> f64 {
    let group = composite.target.set.group();
    let eta1 = first.eta(phi);
    let pts: Vec<GroupElem> = match phi.domain() {
        OpenDomain::Elements(items) => items.iter().cloned().collect(),
        OpenDomain::Intervals(_) => domain_grid(phi, grid).into_iter().map(GroupElem::real).collect(),
    };
    let mut worst = 0.0f64;
    for g in pts {
        let Some(x) = phi.eval(&g) else { continue };
        let d2 = composite.k(&g, &x).0;
        let d1 = first.k(&g, &x).0;
        let Some(y) = eta1.eval(&d1) else {
            return f64::INFINITY;
        };
        let d = second.k(&d1, &y).0;
        worst = worst.max(group.metric(&d2, &d));
    }
    worst
}
