use std::fmt;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::ExactReal;
use crate::tolerance::GRID_SPACING;
use crate::topology::CompactSet;

/// A permutation of `{0, .., n-1}` stored as its image list `i ↦ p[i]`.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn identity(n: usize) -> Self {
        Permutation((0..n).collect())
    }

    /// Returns `None` unless `images` is a bijection of `{0, .., n-1}`.
    pub fn new(images: Vec<usize>) -> Option<Self> {
        let n = images.len();
        let mut seen = vec![false; n];
        for &i in &images {
            if i >= n || seen[i] {
                return None;
            }
            seen[i] = true;
        }
        Some(Permutation(images))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn apply(&self, i: usize) -> usize {
        self.0[i]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.len(), other.len(), "composing permutations of different degree");
        Permutation(other.0.iter().map(|&i| self.0[i]).collect())
    }

    pub fn inverse(&self) -> Permutation {
        let mut inv = vec![0; self.len()];
        for (i, &j) in self.0.iter().enumerate() {
            inv[j] = i;
        }
        Permutation(inv)
    }

    /// All `n!` permutations in lexicographic order.
    pub fn all(n: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut current: Vec<usize> = (0..n).collect();
        loop {
            out.push(Permutation(current.clone()));
            // next lexicographic permutation
            let Some(i) = (1..n).rev().find(|&i| current[i - 1] < current[i]) else {
                break;
            };
            let j = (i..n).rev().find(|&j| current[j] > current[i - 1]).unwrap();
            current.swap(i - 1, j);
            current[i..].reverse();
        }
        out
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Perm{:?}", self.0)
    }
}

/// An element of one of the supported time groups.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum GroupElem {
    Real(ExactReal),
    Int(i64),
    Perm(Permutation),
}

impl GroupElem {
    pub fn real(t: f64) -> Self {
        GroupElem::Real(ExactReal::from_f64(t))
    }

    /// The element as a float: reals and integers only.
    pub fn as_f64(&self) -> Option<f64> {
        match self {
            GroupElem::Real(r) => Some(r.to_f64()),
            GroupElem::Int(n) => Some(*n as f64),
            GroupElem::Perm(_) => None,
        }
    }

    /// Group product `self · other`. Panics when the two elements belong to
    /// different groups.
    pub fn mul(&self, other: &GroupElem) -> GroupElem {
        match (self, other) {
            (GroupElem::Real(a), GroupElem::Real(b)) => GroupElem::Real(a + b),
            (GroupElem::Int(a), GroupElem::Int(b)) => GroupElem::Int(a + b),
            (GroupElem::Perm(a), GroupElem::Perm(b)) => GroupElem::Perm(a.compose(b)),
            (a, b) => panic!("group product of mismatched elements {a:?} and {b:?}"),
        }
    }

    pub fn inv(&self) -> GroupElem {
        match self {
            GroupElem::Real(a) => GroupElem::Real(-a),
            GroupElem::Int(a) => GroupElem::Int(-a),
            GroupElem::Perm(p) => GroupElem::Perm(p.inverse()),
        }
    }

    pub fn is_identity(&self) -> bool {
        match self {
            GroupElem::Real(a) => a.is_zero(),
            GroupElem::Int(a) => *a == 0,
            GroupElem::Perm(p) => p.images().iter().enumerate().all(|(i, &j)| i == j),
        }
    }
}

/// The time groups in scope: `(ℝ, +)`, `(ℤ, +)` and the symmetric group on
/// `n` letters.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeGroup {
    Reals,
    Integers,
    Permutations(usize),
}

impl TimeGroup {
    pub fn identity(&self) -> GroupElem {
        match self {
            TimeGroup::Reals => GroupElem::Real(ExactReal::zero()),
            TimeGroup::Integers => GroupElem::Int(0),
            TimeGroup::Permutations(n) => GroupElem::Perm(Permutation::identity(*n)),
        }
    }

    pub fn op(&self, g: &GroupElem, h: &GroupElem) -> GroupElem {
        g.mul(h)
    }

    pub fn inv(&self, g: &GroupElem) -> GroupElem {
        g.inv()
    }

    pub fn contains(&self, g: &GroupElem) -> bool {
        match (self, g) {
            (TimeGroup::Reals, GroupElem::Real(_)) => true,
            (TimeGroup::Integers, GroupElem::Int(_)) => true,
            (TimeGroup::Permutations(n), GroupElem::Perm(p)) => p.len() == *n,
            _ => false,
        }
    }

    /// `|g - h|` on ℝ and ℤ, the discrete metric on permutations.
    pub fn metric(&self, g: &GroupElem, h: &GroupElem) -> f64 {
        match (g, h) {
            (GroupElem::Perm(a), GroupElem::Perm(b)) => {
                if a == b {
                    0.0
                } else {
                    1.0
                }
            }
            (GroupElem::Real(a), GroupElem::Real(b)) => (a - b).to_f64().abs(),
            (GroupElem::Int(a), GroupElem::Int(b)) => (a - b).unsigned_abs() as f64,
            (a, b) => panic!("metric between mismatched elements {a:?} and {b:?}"),
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, TimeGroup::Permutations(_))
    }

    pub fn elements(&self) -> Option<Vec<GroupElem>> {
        match self {
            TimeGroup::Permutations(n) => Some(Permutation::all(*n).into_iter().map(GroupElem::Perm).collect()),
            _ => None,
        }
    }

    /// Compact sets `K_0 ⊂ K_1 ⊂ …` exhausting the group: `[-m, m]` on ℝ,
    /// `{-m, .., m}` on ℤ and the whole group when it is finite.
    pub fn compact_exhaustion(&self, m: usize) -> CompactSet {
        match self {
            TimeGroup::Reals => CompactSet::interval(-(m as f64), m as f64, GRID_SPACING),
            TimeGroup::Integers => {
                let m = m as i64;
                CompactSet::finite((-m..=m).map(GroupElem::Int))
            }
            TimeGroup::Permutations(_) => CompactSet::finite(self.elements().unwrap_or_default()),
        }
    }

    /// A random element; reals and integers are drawn from `[-radius, radius]`.
    pub fn random_element<R: Rng + ?Sized>(&self, rng: &mut R, radius: f64) -> GroupElem {
        match self {
            TimeGroup::Reals => GroupElem::real(rng.gen_range(-radius..=radius)),
            TimeGroup::Integers => {
                let r = radius.floor() as i64;
                GroupElem::Int(rng.gen_range(-r..=r))
            }
            TimeGroup::Permutations(n) => {
                let mut images: Vec<usize> = (0..*n).collect();
                images.shuffle(rng);
                GroupElem::Perm(Permutation(images))
            }
        }
    }
}
