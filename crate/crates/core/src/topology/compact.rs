use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use crate::base::{GroupElem, OpenDomain};

/// A compact subset of a time group: a finite union of closed intervals with a
/// sampling spacing, or a finite element set.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CompactSet {
    Intervals { parts: Vec<(f64, f64)>, spacing: f64 },
    Finite(BTreeSet<GroupElem>),
}

impl CompactSet {
    pub fn interval(a: f64, b: f64, spacing: f64) -> CompactSet {
        assert!(a <= b && a.is_finite() && b.is_finite(), "bad compact interval [{a}, {b}]");
        assert!(spacing > 0.0);
        CompactSet::Intervals {
            parts: vec![(a, b)],
            spacing,
        }
    }

    pub fn finite(items: impl IntoIterator<Item = GroupElem>) -> CompactSet {
        CompactSet::Finite(items.into_iter().collect())
    }

    pub fn is_empty(&self) -> bool {
        match self {
            CompactSet::Intervals { parts, .. } => parts.is_empty(),
            CompactSet::Finite(s) => s.is_empty(),
        }
    }

    /// Ordered sample grid. Every closed interval contributes both endpoints
    /// and evenly spaced interior points no further apart than the spacing.
    pub fn real_grid(&self) -> Vec<f64> {
        match self {
            CompactSet::Intervals { parts, spacing } => {
                let mut out = Vec::new();
                for &(a, b) in parts {
                    let n = ((b - a) / spacing).ceil() as usize;
                    if n == 0 {
                        out.push(a);
                        continue;
                    }
                    out.extend((0..=n).map(|i| if i == n { b } else { a + (b - a) * i as f64 / n as f64 }));
                }
                out
            }
            CompactSet::Finite(s) => s.iter().filter_map(GroupElem::as_f64).collect(),
        }
    }

    pub fn grid(&self) -> Vec<GroupElem> {
        match self {
            CompactSet::Intervals { .. } => self.real_grid().into_iter().map(GroupElem::real).collect(),
            CompactSet::Finite(s) => s.iter().cloned().collect(),
        }
    }

    pub fn is_subset_of(&self, other: &CompactSet) -> bool {
        match (self, other) {
            (CompactSet::Intervals { parts: a, .. }, CompactSet::Intervals { parts: b, .. }) => a
                .iter()
                .all(|&(lo, hi)| b.iter().any(|&(blo, bhi)| blo <= lo && hi <= bhi)),
            (CompactSet::Finite(a), CompactSet::Finite(b)) => a.is_subset(b),
            _ => false,
        }
    }

    /// Intersection with the closed set obtained by pulling every interval of
    /// `domain` inward by `margin`. Finite sets intersect directly.
    pub fn inner_intersect(&self, domain: &OpenDomain, margin: f64) -> CompactSet {
        match (self, domain) {
            (CompactSet::Intervals { parts, spacing }, OpenDomain::Intervals(ivs)) => {
                let mut out = Vec::new();
                for &(a, b) in parts {
                    for iv in ivs {
                        let lo = if iv.lo().is_finite() { iv.lo() + margin } else { f64::NEG_INFINITY };
                        let hi = if iv.hi().is_finite() { iv.hi() - margin } else { f64::INFINITY };
                        let (l, h) = (a.max(lo), b.min(hi));
                        if l <= h {
                            out.push((l, h));
                        }
                    }
                }
                CompactSet::Intervals {
                    parts: out,
                    spacing: *spacing,
                }
            }
            (CompactSet::Finite(s), d) => CompactSet::Finite(s.iter().filter(|g| d.contains(g)).cloned().collect()),
            (CompactSet::Intervals { spacing, .. }, OpenDomain::Elements(_)) => CompactSet::Intervals {
                parts: Vec::new(),
                spacing: *spacing,
            },
        }
    }

    /// Grid test for `K ⊂ D`.
    pub fn inside(&self, domain: &OpenDomain) -> bool {
        self.grid().iter().all(|g| domain.contains(g))
    }
}
