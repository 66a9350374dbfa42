use std::collections::BTreeSet;

use serde::{Deserialize, Serialize};

use super::Window;
use crate::base::{GroupElem, PartialMap};

/// Star points over a finite pool, as `(time index, map index)` pairs.
pub type StarSet = BTreeSet<(usize, usize)>;

/// `S*W` restricted to the sampled times, with `S` given as indices into
/// `pool`.
pub fn star_set(pool: &[PartialMap], family: &BTreeSet<usize>, w: &Window, times: &[GroupElem]) -> StarSet {
    let mut out = StarSet::new();
    for &j in family {
        for (i, g) in times.iter().enumerate() {
            if let Some(x) = pool[j].eval(g) {
                if w.contains(g, &x) {
                    out.insert((i, j));
                }
            }
        }
    }
    out
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityCheck {
    pub identity: String,
    pub cases: usize,
    pub star_points: usize,
    /// Pairs on exactly one side, for the first failing case.
    pub counterexamples: Vec<(usize, usize)>,
}

impl IdentityCheck {
    pub fn holds(&self) -> bool {
        self.counterexamples.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AlgebraReport {
    pub identities: Vec<IdentityCheck>,
}

impl AlgebraReport {
    pub fn all_hold(&self) -> bool {
        self.identities.iter().all(IdentityCheck::holds)
    }
}

struct Tally {
    check: IdentityCheck,
}

impl Tally {
    fn new(name: &str) -> Tally {
        Tally {
            check: IdentityCheck {
                identity: name.to_string(),
                cases: 0,
                star_points: 0,
                counterexamples: Vec::new(),
            },
        }
    }

    fn compare(&mut self, lhs: &StarSet, rhs: &StarSet) {
        self.check.cases += 1;
        self.check.star_points += lhs.len();
        if self.check.counterexamples.is_empty() {
            self.check.counterexamples = lhs.symmetric_difference(rhs).copied().collect();
        }
    }
}

fn union_all<'a>(sets: impl Iterator<Item = &'a StarSet>) -> StarSet {
    sets.fold(StarSet::new(), |acc, s| &acc | s)
}

fn intersect_all(sets: &[StarSet]) -> StarSet {
    let mut it = sets.iter();
    let first = it.next().cloned().unwrap_or_default();
    it.fold(first, |acc, s| &acc & s)
}

/// Checks, by enumeration over `times × pool`, that
///
/// * `S*(∪W_μ) = ∪ S*W_μ` and `S*(∩W_μ) = ∩ S*W_μ`,
/// * `(∪S_λ)*W = ∪ S_λ*W` and `(∩S_λ)*W = ∩ S_λ*W`,
/// * `S*(W′∖W) = S*W′ ∖ S*W` for every ordered pair of windows.
pub fn star_algebra_suite(
    pool: &[PartialMap],
    families: &[BTreeSet<usize>],
    windows: &[Window],
    times: &[GroupElem],
) -> AlgebraReport {
    let mut t = [
        Tally::new("S*(∪W) = ∪S*W"),
        Tally::new("S*(∩W) = ∩S*W"),
        Tally::new("(∪S)*W = ∪S*W"),
        Tally::new("(∩S)*W = ∩S*W"),
        Tally::new("S*(W'∖W) = S*W' ∖ S*W"),
    ];
    let union_w = Window::Union(windows.to_vec());
    let inter_w = Window::Intersection(windows.to_vec());
    for s in families {
        let per: Vec<StarSet> = windows.iter().map(|w| star_set(pool, s, w, times)).collect();
        if !windows.is_empty() {
            t[0].compare(&star_set(pool, s, &union_w, times), &union_all(per.iter()));
            t[1].compare(&star_set(pool, s, &inter_w, times), &intersect_all(&per));
        }
        for (a, wa) in windows.iter().enumerate() {
            for (b, wb) in windows.iter().enumerate() {
                let diff = Window::Difference(Box::new(wa.clone()), Box::new(wb.clone()));
                t[4].compare(&star_set(pool, s, &diff, times), &(&per[a] - &per[b]));
            }
        }
    }
    let union_s: BTreeSet<usize> = families.iter().flatten().copied().collect();
    let inter_s: BTreeSet<usize> = match families.split_first() {
        Some((first, rest)) => rest.iter().fold(first.clone(), |acc, f| &acc & f),
        None => BTreeSet::new(),
    };
    for w in windows {
        let per: Vec<StarSet> = families.iter().map(|s| star_set(pool, s, w, times)).collect();
        if !families.is_empty() {
            t[2].compare(&star_set(pool, &union_s, w, times), &union_all(per.iter()));
            t[3].compare(&star_set(pool, &inter_s, w, times), &intersect_all(&per));
        }
    }
    AlgebraReport {
        identities: t.into_iter().map(|t| t.check).collect(),
    }
}

/// `S ⊂ S′` and `W ⊂ W′` imply `S*W ⊂ S′*W′`; returns the pairs that break it.
pub fn check_monotonicity(
    pool: &[PartialMap],
    small: (&BTreeSet<usize>, &Window),
    large: (&BTreeSet<usize>, &Window),
    times: &[GroupElem],
) -> Vec<(usize, usize)> {
    let a = star_set(pool, small.0, small.1, times);
    let b = star_set(pool, large.0, large.1, times);
    a.difference(&b).copied().collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::base::{OpenDomain, State};

    fn pool() -> Vec<PartialMap> {
        (0..6)
            .map(|k| {
                let c = k as f64;
                PartialMap::scalar(OpenDomain::interval(-1.0 - c, 2.0 + c), move |t| c * 0.5 + t)
            })
            .collect()
    }

    #[test]
    fn empty_window_gives_empty_star_sets() {
        let pool = pool();
        let times: Vec<GroupElem> = (-4..=4).map(|i| GroupElem::real(i as f64 * 0.5)).collect();
        let all: BTreeSet<usize> = (0..pool.len()).collect();
        let empty = Window::Points(Vec::new());
        assert!(star_set(&pool, &all, &empty, &times).is_empty());
        let report = star_algebra_suite(&pool, &[all], &[empty], &times);
        assert!(report.all_hold());
    }

    #[test]
    fn difference_with_itself_is_empty() {
        let pool = pool();
        let times: Vec<GroupElem> = (-4..=4).map(|i| GroupElem::real(i as f64 * 0.5)).collect();
        let all: BTreeSet<usize> = (0..pool.len()).collect();
        let w = Window::closed_box((-1.0, 1.0), vec![(-1.0, 2.0)]);
        let diff = Window::Difference(Box::new(w.clone()), Box::new(w.clone()));
        assert!(star_set(&pool, &all, &diff, &times).is_empty());
        assert!(!star_set(&pool, &all, &w, &times).is_empty());
    }

    #[test]
    fn identities_hold_on_boxes() {
        let pool = pool();
        let times: Vec<GroupElem> = (-8..=8).map(|i| GroupElem::real(i as f64 * 0.25)).collect();
        let fams = vec![[0, 1, 2, 3].into(), [2, 3, 4, 5].into(), [1, 4].into()];
        let windows = vec![
            Window::closed_box((-1.0, 1.0), vec![(-1.0, 2.0)]),
            Window::closed_box((0.0, 2.0), vec![(0.0, 3.0)]),
            Window::Points(vec![(GroupElem::real(0.5), State::scalar(1.5))]),
        ];
        let report = star_algebra_suite(&pool, &fams, &windows, &times);
        assert!(report.all_hold(), "{report:?}");
        let small: BTreeSet<usize> = [1, 4].into();
        let large: BTreeSet<usize> = [0, 1, 2, 3, 4].into();
        let inner = Window::closed_box((0.0, 1.0), vec![(0.0, 1.0)]);
        let outer = Window::closed_box((-1.0, 2.0), vec![(-1.0, 3.0)]);
        assert!(check_monotonicity(&pool, (&small, &inner), (&large, &outer), &times).is_empty());
    }
}
