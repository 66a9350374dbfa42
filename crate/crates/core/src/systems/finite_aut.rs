use std::collections::BTreeMap;

use rand::Rng;

use super::action::permute_coordinates;
use crate::base::{GroupElem, MapTag, OpenDomain, PartialMap, Permutation, State, StateSpace, TimeGroup};
use crate::rng::{rng, seed_from_f64s};
use crate::star::{Membership, SolutionSet, TimeSet, Window};
use crate::{Error, Result};

/// Half-width of the box bounding `C(X)` in the window.
pub const STATE_BOX: f64 = 5.0;

/// `S_X = C(Aut(X), C(X))` for a discrete `X` with `n` points: every map from
/// the symmetric group `S_n` into `ℝⁿ`.
#[derive(Clone, Debug, PartialEq)]
pub struct FiniteAutSet {
    n: usize,
}

/// The family `S_X` and the window `Aut(X) × C(X)`, with `C(X)` cut to a box.
pub fn finite_aut_system(n: usize) -> Result<(FiniteAutSet, Window)> {
    if !(2..=6).contains(&n) {
        return Err(Error::InvalidParameter(format!("finite Aut(X) needs 2 <= n <= 6, got {n}")));
    }
    let group = TimeGroup::Permutations(n);
    let window = Window::Box {
        time: TimeSet::Finite(group.elements().unwrap_or_default()),
        state: vec![(-STATE_BOX, STATE_BOX); n],
        open: false,
    };
    Ok((FiniteAutSet { n }, window))
}

/// The pullback `(h* f)_i = f_{h(i)}` along a bijection `h` of labels.
pub fn pullback(h: &Permutation, f: &State) -> State {
    State((0..f.dim()).map(|i| f[h.apply(i)]).collect())
}

impl FiniteAutSet {
    pub fn n(&self) -> usize {
        self.n
    }

    fn elements(&self) -> Vec<GroupElem> {
        TimeGroup::Permutations(self.n).elements().unwrap_or_default()
    }

    fn random_state<R: Rng>(&self, r: &mut R) -> State {
        State((0..self.n).map(|_| r.gen_range(-STATE_BOX..=STATE_BOX)).collect())
    }

    fn table(&self, values: impl Fn(&GroupElem) -> State) -> PartialMap {
        let map: BTreeMap<GroupElem, State> = self.elements().into_iter().map(|g| (g.clone(), values(&g))).collect();
        PartialMap::table(map).with_tag(MapTag::new("finite-aut").param("n", self.n as f64))
    }
}

impl SolutionSet for FiniteAutSet {
    fn descriptor(&self) -> String {
        format!("C(Aut(X), C(X)) with |X| = {}", self.n)
    }

    fn group(&self) -> TimeGroup {
        TimeGroup::Permutations(self.n)
    }

    fn state_space(&self) -> StateSpace {
        StateSpace::Euclidean(self.n)
    }

    fn sample(&self, count: usize, seed: u64) -> Vec<PartialMap> {
        let mut r = rng(seed);
        (0..count)
            .map(|_| {
                let values: BTreeMap<GroupElem, State> = self.elements().into_iter().map(|g| (g, self.random_state(&mut r))).collect();
                self.table(|g| values[g].clone())
            })
            .collect()
    }

    /// The constant map, the coordinate-permutation orbit, then random maps,
    /// all taking the value `x` at `g`.
    fn through(&self, g: &GroupElem, x: &State, budget: usize) -> Vec<PartialMap> {
        let GroupElem::Perm(p) = g else { return Vec::new() };
        if p.len() != self.n || x.dim() != self.n {
            return Vec::new();
        }
        let mut out = Vec::with_capacity(budget);
        if budget >= 1 {
            out.push(self.table(|_| x.clone()));
        }
        if budget >= 2 {
            let p_inv = p.inverse();
            out.push(self.table(|k| match k {
                GroupElem::Perm(q) => permute_coordinates(&q.compose(&p_inv), x),
                _ => x.clone(),
            }));
        }
        let mut r = rng(seed_from_f64s(x));
        while out.len() < budget {
            let values: BTreeMap<GroupElem, State> = self
                .elements()
                .into_iter()
                .map(|k| {
                    let v = if &k == g { x.clone() } else { self.random_state(&mut r) };
                    (k, v)
                })
                .collect();
            out.push(self.table(|k| values[k].clone()));
        }
        out
    }

    /// Every map from the discrete group into `ℝⁿ` is continuous.
    fn membership(&self, phi: &PartialMap) -> Membership {
        let OpenDomain::Elements(items) = phi.domain() else {
            return Membership::NonMember { residual: f64::INFINITY, at: None };
        };
        for g in items {
            match (g, phi.eval(g)) {
                (GroupElem::Perm(p), Some(x)) if p.len() == self.n && x.dim() == self.n && x.is_finite() => {}
                _ => return Membership::NonMember { residual: f64::INFINITY, at: Some(g.clone()) },
            }
        }
        Membership::Member
    }

    fn claimed_domain(&self) -> Option<OpenDomain> {
        Some(OpenDomain::elements(self.elements()))
    }

    fn sigma_invariant(&self) -> bool {
        true
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_orders_and_range() {
        assert_eq!(finite_aut_system(2).unwrap().0.elements().len(), 2);
        assert_eq!(finite_aut_system(3).unwrap().0.elements().len(), 6);
        assert!(finite_aut_system(1).is_err());
        assert!(finite_aut_system(7).is_err());
    }

    #[test]
    fn pullback_is_a_coordinate_permutation() {
        let h = Permutation::new(vec![1, 2, 0]).unwrap();
        let f = State(vec![10.0, 20.0, 30.0]);
        assert_eq!(pullback(&h, &f), State(vec![20.0, 30.0, 10.0]));
        assert_eq!(pullback(&h.inverse(), &pullback(&h, &f)), f);
        let g = Permutation::new(vec![0, 2, 1]).unwrap();
        assert_eq!(pullback(&h, &pullback(&g, &f)), pullback(&g.compose(&h), &f));
    }

    #[test]
    fn queries_pass_through_and_are_members() {
        let (s, w) = finite_aut_system(3).unwrap();
        let g = GroupElem::Perm(Permutation::new(vec![2, 0, 1]).unwrap());
        let x = State(vec![1.0, -2.0, 0.5]);
        let maps = s.through(&g, &x, 4);
        assert_eq!(maps.len(), 4);
        for phi in &maps {
            assert_eq!(phi.eval(&g), Some(x.clone()));
            assert!(s.membership(phi).is_member());
        }
        assert!(w.contains(&g, &x));
        for phi in s.sample(3, 9) {
            assert!(s.membership(&phi).is_member());
        }
    }
}
