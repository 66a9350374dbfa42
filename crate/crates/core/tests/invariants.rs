//! Property tests for the algebraic laws the library relies on.

use proptest::prelude::*;
use starflow::base::{GroupElem, OpenDomain, PartialMap, Permutation, State, TimeGroup};
use starflow::bebutov::shift;
use starflow::morphism::{riccati_scaling, state_scaling, verify_morphism, Endpoint, MorphismLevel};
use starflow::star::{Membership, SolutionSet, Window};
use starflow::systems::{inclusion_solution_set, riccati_solution, riccati_solution_set, InclusionSystem};
use starflow::topology::{dist_on_compact, CompactSet};
use starflow::Tolerances;

fn dyadic() -> impl Strategy<Value = f64> {
    (-(1i64 << 22)..=(1i64 << 22)).prop_map(|k| k as f64 / (1u64 << 20) as f64)
}

fn interval() -> impl Strategy<Value = (f64, f64)> {
    (dyadic(), 1i64..(1 << 22)).prop_map(|(lo, w)| (lo, lo + w as f64 / (1u64 << 20) as f64))
}

fn permutation(n: usize) -> impl Strategy<Value = Permutation> {
    Just((0..n).collect::<Vec<usize>>())
        .prop_shuffle()
        .prop_map(|v| Permutation::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(128))]

    #[test]
    fn translation_is_an_action_on_domains((lo, hi) in interval(), g in dyadic(), h in dyadic()) {
        let d = OpenDomain::interval(lo, hi);
        let (g, h) = (GroupElem::real(g), GroupElem::real(h));
        prop_assert_eq!(d.translate(&GroupElem::real(0.0)), d.clone());
        prop_assert_eq!(d.translate(&h).translate(&g), d.translate(&g.mul(&h)));
        prop_assert_eq!(d.translate(&g).translate(&g.inv()), d);
    }

    #[test]
    fn intersection_is_contained_in_both(a in interval(), b in interval(), t in dyadic()) {
        let (da, db) = (OpenDomain::interval(a.0, a.1), OpenDomain::interval(b.0, b.1));
        let both = da.contains_real(t) && db.contains_real(t);
        match da.intersect(&db) {
            Some(i) => {
                prop_assert_eq!(i.contains_real(t), both);
                prop_assert!(da.covers(&i) && db.covers(&i));
            }
            None => prop_assert!(!both),
        }
    }

    #[test]
    fn shift_laws_on_riccati_solutions(a in prop_oneof![Just(1.0), Just(-1.0)], t0 in (-1024i64..1024).prop_map(|k| k as f64 / 1024.0), x0 in -0.9f64..0.9, g in dyadic(), h in dyadic()) {
        let phi = riccati_solution(a, t0, x0).unwrap();
        let (g, h) = (GroupElem::real(g), GroupElem::real(h));
        let zero = shift(&GroupElem::real(0.0), &phi);
        prop_assert_eq!(zero.domain(), phi.domain());
        prop_assert_eq!(shift(&g, &phi).domain().clone(), phi.domain().translate(&g));
        let twice = shift(&g, &shift(&h, &phi));
        let once = shift(&g.mul(&h), &phi);
        prop_assert_eq!(twice.domain(), once.domain());
        let t = t0 - g.as_f64().unwrap() - h.as_f64().unwrap();
        prop_assert_eq!(once.x(t), phi.x(t0));
        prop_assert_eq!(twice.x(t), once.x(t));
    }

    #[test]
    fn shifted_solutions_stay_solutions(t0 in -1.0f64..1.0, x0 in -0.9f64..0.9, g in dyadic()) {
        let s = riccati_solution_set(1.0).unwrap();
        let phi = riccati_solution(1.0, t0, x0).unwrap();
        prop_assert_eq!(s.membership(&shift(&GroupElem::real(g), &phi)), Membership::Member);
    }

    #[test]
    fn real_metric_is_a_metric(a in dyadic(), b in dyadic(), c in dyadic()) {
        let grp = TimeGroup::Reals;
        let (a, b, c) = (GroupElem::real(a), GroupElem::real(b), GroupElem::real(c));
        prop_assert_eq!(grp.metric(&a, &a), 0.0);
        prop_assert_eq!(grp.metric(&a, &b), grp.metric(&b, &a));
        prop_assert!(grp.metric(&a, &c) <= grp.metric(&a, &b) + grp.metric(&b, &c));
        let g = grp.op(&a, &c);
        prop_assert_eq!(grp.metric(&g, &grp.op(&b, &c)), grp.metric(&a, &b));
    }

    #[test]
    fn compact_distance_is_a_pseudometric(p in -2.0f64..2.0, q in -2.0f64..2.0, r in -2.0f64..2.0) {
        let k = CompactSet::interval(-1.0, 1.0, 1.0 / 64.0);
        let line = |c: f64| PartialMap::scalar(OpenDomain::line(), move |t| c * t);
        let (f, g, h) = (line(p), line(q), line(r));
        let d = |a: &PartialMap, b: &PartialMap| dist_on_compact(a, b, &k).unwrap();
        prop_assert_eq!(d(&f, &f), 0.0);
        prop_assert_eq!(d(&f, &g), d(&g, &f));
        prop_assert!(d(&f, &h) <= d(&f, &g) + d(&g, &h) + 1e-12);
        prop_assert!((d(&f, &g) - (p - q).abs()).abs() <= 1e-12);
    }

    #[test]
    fn permutations_form_a_group(p in permutation(4), q in permutation(4), r in permutation(4)) {
        let e = Permutation::identity(4);
        prop_assert_eq!(p.compose(&e), p.clone());
        prop_assert_eq!(p.compose(&p.inverse()), e);
        prop_assert_eq!(p.compose(&q).compose(&r), p.compose(&q.compose(&r)));
    }

    #[test]
    fn inclusion_queries_pass_through_the_point(lo in 0.1f64..1.0, w in 0.0f64..1.0, t in -2.0f64..2.0, x in -2.0f64..2.0) {
        let s = inclusion_solution_set(InclusionSystem::interval(lo, lo + w)).unwrap();
        for phi in s.through(&GroupElem::real(t), &State::scalar(x), 4) {
            prop_assert!((phi.x(t).unwrap() - x).abs() <= 1e-12);
            prop_assert_eq!(s.membership(&phi), Membership::Member);
        }
    }

    #[test]
    fn window_closure_contains_window(t in -2.0f64..2.0, x in -2.0f64..2.0) {
        let w = Window::open_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
        let (g, y) = (GroupElem::real(t), State::scalar(x));
        if w.contains(&g, &y) {
            prop_assert!(w.closure().contains(&g, &y));
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn scaling_matches_inclusion_intervals(c in prop_oneof![0.5f64..3.0, -3.0f64..-0.5], seed in 0u64..1000) {
        let window = Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
        let source = std::sync::Arc::new(inclusion_solution_set(InclusionSystem::interval(0.5, 1.0)).unwrap());
        let (lo, hi) = if c > 0.0 { (0.5 * c, c) } else { (c, 0.5 * c) };
        let exact = std::sync::Arc::new(inclusion_solution_set(InclusionSystem::interval(lo, hi)).unwrap());
        let m = state_scaling(Endpoint::new(source.clone(), window.clone()), exact, c).unwrap();
        prop_assert_eq!(verify_morphism(&m, 60, seed, &Tolerances::default()).level, MorphismLevel::Isomorphism);
        let narrow = std::sync::Arc::new(inclusion_solution_set(InclusionSystem::interval(lo, 0.5 * (lo + hi))).unwrap());
        let m = state_scaling(Endpoint::new(source, window), narrow, c).unwrap();
        prop_assert_eq!(verify_morphism(&m, 60, seed, &Tolerances::default()).level, MorphismLevel::NotAMorphism);
    }

    #[test]
    fn riccati_scaling_commutes(a in 0.25f64..4.0, b in 0.25f64..4.0, sign in prop_oneof![Just(1.0), Just(-1.0)], seed in 0u64..1000) {
        let m = riccati_scaling(sign * a, sign * b).unwrap();
        let v = verify_morphism(&m, 60, seed, &Tolerances::default());
        prop_assert_eq!(v.level, MorphismLevel::Isomorphism);
        prop_assert!(v.commutation() <= 1e-9);
    }
}
