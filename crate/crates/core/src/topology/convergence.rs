use serde::{Deserialize, Serialize};

use super::{sup_deviation, CompactSet};
use crate::base::{GroupElem, OpenDomain, PartialMap, TimeGroup};
use crate::tolerance::{GRID_SPACING, TOL_CONV};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ConvergenceVerdict {
    Converged,
    Diverged,
    Inconclusive,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DeviationWitness {
    pub compact: usize,
    pub index: usize,
    pub at: GroupElem,
    pub distance: f64,
}

/// Findings on one compact `K_m`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactReport {
    pub m: usize,
    pub compact: CompactSet,
    /// `sup_K d(φ_n, φ)` for every `n`; `None` where `K ⊄ dom φ_n`.
    pub sup_distances: Vec<Option<f64>>,
    pub final_sup: Option<f64>,
    /// Largest ratio of consecutive sup-distances over the tail.
    pub tail_ratio: Option<f64>,
    /// Limit of the sup-distances implied by the tail: zero for a tail that is
    /// below tolerance or shrinks geometrically.
    pub extrapolated_limit: Option<f64>,
    pub tolerance: f64,
    pub verdict: ConvergenceVerdict,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceReport {
    pub verdict: ConvergenceVerdict,
    pub compacts: Vec<CompactReport>,
    pub witness: Option<DeviationWitness>,
}

impl ConvergenceReport {
    /// `(K_m, sup-distances)` pairs.
    pub fn sup_distances(&self) -> Vec<(&CompactSet, &[Option<f64>])> {
        self.compacts.iter().map(|c| (&c.compact, c.sup_distances.as_slice())).collect()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConvergenceOptions {
    pub m_max: usize,
    pub tol: f64,
    pub spacing: f64,
    /// A tail whose consecutive sup-ratios stay at or below this value is
    /// treated as geometric and therefore convergent.
    pub geometric_ratio: f64,
}

impl Default for ConvergenceOptions {
    fn default() -> Self {
        ConvergenceOptions {
            m_max: 5,
            tol: TOL_CONV,
            spacing: GRID_SPACING,
            geometric_ratio: 0.9,
        }
    }
}

/// Tests `φ_n → φ` in the topology of compact convergence on the compacts
/// `K_1 ⊂ … ⊂ K_{m_max}`, using default tolerances.
pub fn test_convergence(seq: &[PartialMap], phi: &PartialMap, m_max: usize) -> ConvergenceReport {
    test_convergence_with(
        seq,
        phi,
        &ConvergenceOptions {
            m_max,
            ..ConvergenceOptions::default()
        },
    )
}

fn compacts_for(phi: &PartialMap, opts: &ConvergenceOptions) -> Vec<CompactSet> {
    (1..=opts.m_max)
        .map(|m| match phi.domain() {
            OpenDomain::Intervals(ivs) => {
                let base = CompactSet::interval(-(m as f64), m as f64, opts.spacing);
                let shortest = ivs.iter().map(|i| i.length()).fold(f64::INFINITY, f64::min);
                let margin = (1.0 / (m as f64 + 1.0)).min(0.25 * shortest);
                base.inner_intersect(phi.domain(), margin)
            }
            OpenDomain::Elements(_) => TimeGroup::Integers.compact_exhaustion(m).inner_intersect(phi.domain(), 0.0),
        })
        .filter(|k| !k.is_empty())
        .collect()
}

pub fn test_convergence_with(seq: &[PartialMap], phi: &PartialMap, opts: &ConvergenceOptions) -> ConvergenceReport {
    assert!(!seq.is_empty(), "convergence test on an empty sequence");
    let n = seq.len();
    let tail_start = n / 2;
    let mut compacts = Vec::new();
    let mut witness = None;
    for (idx, k) in compacts_for(phi, opts).into_iter().enumerate() {
        let devs: Vec<Option<(f64, Option<GroupElem>)>> = seq.iter().map(|p| sup_deviation(p, phi, &k)).collect();
        let sups: Vec<Option<f64>> = devs.iter().map(|d| d.as_ref().map(|x| x.0)).collect();
        let tail = &sups[tail_start..];
        let final_sup = *sups.last().unwrap();
        let all_defined = tail.iter().all(Option::is_some);
        let none_defined = tail.iter().all(Option::is_none);
        let values: Vec<f64> = tail.iter().flatten().copied().collect();
        let tail_ratio = if all_defined && values.len() >= 2 {
            Some(
                values
                    .windows(2)
                    .map(|w| if w[0] == 0.0 { if w[1] == 0.0 { 0.0 } else { f64::INFINITY } } else { w[1] / w[0] })
                    .fold(0.0, f64::max),
            )
        } else {
            None
        };
        let geometric = tail_ratio.is_some_and(|r| r <= opts.geometric_ratio);
        let below = final_sup.is_some_and(|d| d <= opts.tol) && all_defined;
        let extrapolated_limit = if below || geometric { Some(0.0) } else { None };

        // Persistent gap: both quarters of the tail contain a deviation of at
        // least ten tolerances.
        let quarter = tail.len().div_ceil(2).max(1);
        let gap = |part: &[Option<f64>]| part.iter().flatten().any(|&d| d >= 10.0 * opts.tol);
        let persistent = all_defined && tail.len() >= 2 && gap(&tail[..quarter]) && gap(&tail[quarter..]);
        let verdict = if below || (all_defined && geometric) {
            ConvergenceVerdict::Converged
        } else if none_defined || (persistent && !geometric) {
            ConvergenceVerdict::Diverged
        } else {
            ConvergenceVerdict::Inconclusive
        };
        if verdict == ConvergenceVerdict::Diverged && witness.is_none() {
            let worst = (tail_start..n)
                .filter_map(|i| devs[i].as_ref().map(|d| (i, d)))
                .max_by(|a, b| a.1 .0.total_cmp(&b.1 .0));
            witness = match worst {
                Some((i, (d, Some(at)))) => Some(DeviationWitness {
                    compact: idx,
                    index: i,
                    at: at.clone(),
                    distance: *d,
                }),
                _ => k.grid().into_iter().find(|g| seq[n - 1].eval(g).is_none()).map(|at| DeviationWitness {
                    compact: idx,
                    index: n - 1,
                    at,
                    distance: f64::INFINITY,
                }),
            };
        }
        compacts.push(CompactReport {
            m: idx + 1,
            compact: k,
            sup_distances: sups,
            final_sup,
            tail_ratio,
            extrapolated_limit,
            tolerance: opts.tol,
            verdict,
        });
    }
    let verdict = if compacts.iter().any(|c| c.verdict == ConvergenceVerdict::Diverged) {
        ConvergenceVerdict::Diverged
    } else if !compacts.is_empty() && compacts.iter().all(|c| c.verdict == ConvergenceVerdict::Converged) {
        ConvergenceVerdict::Converged
    } else {
        ConvergenceVerdict::Inconclusive
    };
    ConvergenceReport {
        verdict,
        compacts,
        witness,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> PartialMap {
        PartialMap::scalar(OpenDomain::line(), f)
    }

    #[test]
    fn uniform_offsets_converge() {
        let seq: Vec<PartialMap> = (0..12)
            .map(|k| {
                let c = 0.5f64.powi(k);
                line(move |t| t + c)
            })
            .collect();
        let r = test_convergence(&seq, &line(|t| t), 3);
        assert_eq!(r.verdict, ConvergenceVerdict::Converged);
        assert_eq!(r.compacts.len(), 3);
    }

    #[test]
    fn alternating_constants_diverge() {
        let seq: Vec<PartialMap> = (0..10)
            .map(|n| {
                let s = if n % 2 == 0 { 1.0 } else { -1.0 };
                line(move |_| s)
            })
            .collect();
        let r = test_convergence(&seq, &line(|_| 1.0), 3);
        assert_eq!(r.verdict, ConvergenceVerdict::Diverged);
        let w = r.witness.unwrap();
        assert_eq!(w.distance, 2.0);
        assert_eq!(w.index % 2, 1);
    }

    #[test]
    fn constant_sequence_converges() {
        let phi = PartialMap::scalar(OpenDomain::interval(-1.5, 1.5), f64::tan);
        let r = test_convergence(&vec![phi.clone(); 4], &phi, 5);
        assert_eq!(r.verdict, ConvergenceVerdict::Converged);
    }

    #[test]
    fn shrinking_domains_diverge() {
        let seq: Vec<PartialMap> = (1..9)
            .map(|n| PartialMap::scalar(OpenDomain::interval(-1.0 / n as f64, 1.0 / n as f64), |t| t))
            .collect();
        let r = test_convergence(&seq, &line(|t| t), 2);
        assert_eq!(r.verdict, ConvergenceVerdict::Diverged);
        assert!(r.witness.is_some());
    }
}
