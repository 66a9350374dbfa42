use std::sync::Arc;

use super::*;
use crate::base::{Permutation, TimeGroup};
use crate::bebutov::{is_equilibrium, GridSpec};
use crate::star::{CheckOptions, Verdict};
use crate::systems::{
    inclusion_solution_set, ode_solution_set, riccati_solution, riccati_solution_set, ActionSystem, InclusionSystem, OdeSystem,
};
use crate::Error;

fn tol() -> Tolerances {
    Tolerances::default()
}

fn quick() -> ClassifyOptions {
    ClassifyOptions {
        n_samples: 64,
        n_maps: 6,
        transport: false,
        ..ClassifyOptions::default()
    }
}

fn inclusion(lo: f64, hi: f64) -> Arc<dyn SolutionSet> {
    Arc::new(inclusion_solution_set(InclusionSystem::interval(lo, hi)).unwrap())
}

fn inclusion_window() -> Window {
    Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)])
}

fn unit_drift(c: f64) -> Arc<dyn SolutionSet> {
    Arc::new(ode_solution_set(OdeSystem::autonomous(format!("x' = {c}"), move |_| c).global()).unwrap())
}

#[test]
fn identity_is_an_isomorphism_with_zero_residual() {
    let s: Arc<dyn SolutionSet> = Arc::new(riccati_solution_set(-1.0).unwrap());
    let m = identity(s, Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]));
    let r = verify_morphism(&m, 100, 3, &tol());
    assert_eq!(r.level, MorphismLevel::Isomorphism);
    assert_eq!(r.commutation(), 0.0);
    assert_eq!(r.inverse_residual, Some(0.0));
}

#[test]
fn riccati_scaling_verifies() {
    let m = riccati_scaling(1.0, 4.0).unwrap();
    let r = verify_morphism(&m, 200, 0, &tol());
    assert_eq!(r.level, MorphismLevel::Isomorphism, "{r:?}");
    assert!(r.commutation() <= 1e-8);

    let tan = riccati_solution(1.0, 0.0, 0.0).unwrap();
    let image = m.eta(&tan);
    for t in [-1.2, -0.4, 0.3, 1.1] {
        let want = 2.0 * f64::tan(t);
        assert!((image.x(t / 2.0).unwrap() - want).abs() <= 1e-12 * (1.0 + want.abs()));
    }
    let (lo, hi) = image.domain().bounds().unwrap();
    assert!((lo + std::f64::consts::FRAC_PI_4).abs() < 1e-15 && (hi - std::f64::consts::FRAC_PI_4).abs() < 1e-15);
}

#[test]
fn riccati_scaling_needs_equal_signs() {
    assert!(matches!(riccati_scaling(1.0, -1.0), Err(Error::InvalidParameter(_))));
    assert!(matches!(riccati_scaling(0.0, 1.0), Err(Error::InvalidParameter(_))));
}

#[test]
fn flipped_state_sign_is_not_a_morphism() {
    let good = riccati_scaling(-1.0, -1.0).unwrap();
    let mut bad = good.clone();
    let k = Arc::clone(&good.forward.k);
    bad.forward.k = Arc::new(move |g, x| {
        let (h, y) = k(g, x);
        (h, y.map(|v| -v))
    });
    let r = verify_morphism(&bad, 50, 1, &tol());
    assert_eq!(r.level, MorphismLevel::NotAMorphism);
    let w = r.witness.unwrap();
    let x = w.points[0].1.x();
    assert!((w.residual.unwrap() - 2.0 * x.abs()).abs() < 1e-12);
}

#[test]
fn phase_decompositions() {
    let m = riccati_scaling(1.0, 4.0).unwrap();
    let pd = phase_decomposition(&m, 64, 0, &tol());
    assert!(pd.phase_preserving);
    assert_eq!(pd.hhat(&State::scalar(0.75)), State::scalar(1.5));
    assert_eq!(pd.tau(&GroupElem::real(1.0), &State::scalar(3.0)), GroupElem::real(0.5));

    let mut shear = m.clone();
    shear.forward.k = Arc::new(|g, x| (g.clone(), x.map(|v| v + g.as_f64().unwrap())));
    let pd = phase_decomposition(&shear, 64, 0, &tol());
    assert!(!pd.phase_preserving && pd.well_defined_residual > 0.1);

    let id = identity(inclusion(0.5, 1.0), inclusion_window());
    let pd = phase_decomposition(&id, 16, 0, &tol());
    assert_eq!(pd.well_defined_residual, 0.0);
    assert_eq!(pd.hhat(&State::scalar(-0.3)), State::scalar(-0.3));
}

#[test]
fn riccati_time_change_is_half_time() {
    let m = riccati_scaling(1.0, 4.0).unwrap();
    for (i, phi) in m.source.set.sample(5, 2).iter().enumerate() {
        let tc = time_change(&m, phi, i, &GridSpec::default());
        assert!(tc.monotone && tc.onto, "{tc:?}");
        assert!(tc.key_identity_residual <= 1e-8);
        if let Some(d) = &tc.d_at_e {
            assert_eq!(d.as_f64(), Some(0.0));
        }
        for e in &tc.endpoints {
            assert!((e.image.unwrap() - e.source / 2.0).abs() <= 1e-9);
        }
    }
}

#[test]
fn inclusion_conjugacies() {
    for (c, lo, hi) in [(2.0, 1.0, 2.0), (-1.0, -1.0, -0.5)] {
        let m = state_scaling(Endpoint::new(inclusion(0.5, 1.0), inclusion_window()), inclusion(lo, hi), c).unwrap();
        let r = classify(&m, &quick()).unwrap();
        assert_eq!(r.level, EquivalenceLevel::TopologicallyConjugate, "{r:?}");
        assert!(r.time_changes.iter().all(|t| t.max_deviation == 0.0));
    }
}

#[test]
fn time_reversal_is_not_an_equivalence() {
    let m = time_reversal(Endpoint::new(unit_drift(1.0), Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)])), unit_drift(-1.0));
    let r = classify(&m, &quick()).unwrap();
    assert_eq!(r.level, EquivalenceLevel::PhasePreservingIsomorphism, "{r:?}");
    assert_eq!(r.reason.as_deref(), Some("D_φ not monotone increasing"));
    let tc = &r.time_changes[0];
    assert!(tc.decreasing && !tc.monotone);
    assert!(tc.key_identity_residual <= 1e-8);
}

#[test]
fn classify_requires_domain_g() {
    let m = riccati_scaling(1.0, 4.0).unwrap();
    assert!(matches!(classify(&m, &quick()), Err(Error::PreconditionFailed(_))));
    let r = assess(&m, &quick());
    assert_eq!(r.level, EquivalenceLevel::PhasePreservingIsomorphism);
}

#[test]
fn equilibria_and_orbits_transport() {
    let m = riccati_scaling(-1.0, -4.0).unwrap();
    let grid = GridSpec::default();
    for x in [1.0, -1.0, 0.0, 0.5] {
        let x = State::scalar(x);
        let y = m.hhat(&x);
        let src = is_equilibrium(&x, m.source.set.as_ref(), 2, &grid).is_equilibrium();
        let tgt = is_equilibrium(&y, m.target.set.as_ref(), 2, &grid).is_equilibrium();
        assert_eq!(src, tgt, "x = {x:?}");
    }
    assert_eq!(m.hhat(&State::scalar(1.0)), State::scalar(2.0));
    let maps = m.source.set.sample(6, 1);
    assert!(check_orbit_preservation(&m, &maps, &grid).max <= 1e-6);
    let id = identity(Arc::clone(&m.source.set), m.source.window.clone());
    assert_eq!(check_orbit_preservation(&id, &maps, &grid).max, 0.0);
}

#[test]
fn axioms_transport() {
    let m = riccati_scaling_on(1.0, 4.0, Window::closed_box((-0.5, 0.5), vec![(-0.5, 0.5)])).unwrap();
    let rows = transport_axioms(&m, &m.source.window, &CheckOptions::default()).unwrap();
    assert!(rows.iter().all(|r| r.agree));
    assert_eq!(rows[1].source, "proved-exact");
    assert_eq!(rows[1].target, "proved-exact");

    let c = state_scaling(Endpoint::new(inclusion(0.5, 1.0), inclusion_window()), inclusion(1.0, 2.0), 2.0).unwrap();
    let rows = transport_axioms(&c, &c.source.window, &CheckOptions::default()).unwrap();
    assert_eq!((rows[1].source.as_str(), rows[1].target.as_str()), ("refuted", "refuted"));
}

#[test]
fn composition() {
    let m1 = riccati_scaling(1.0, 4.0).unwrap();
    let m2 = riccati_scaling(4.0, 16.0).unwrap();
    let c = compose(&m1, &m2).unwrap();
    assert_eq!(verify_morphism(&c, 100, 0, &tol()).level, MorphismLevel::Isomorphism);
    let grid = GridSpec::default();
    for phi in m1.source.set.sample(4, 5) {
        let tc = time_change(&c, &phi, 0, &grid);
        assert!(tc.endpoints.iter().all(|e| (e.image.unwrap() - e.source / 4.0).abs() < 1e-9));
        assert!(composition_law_residual(&m1, &m2, &c, &phi, &grid) <= 1e-8);
    }
    assert!(matches!(compose(&m2, &m1), Err(Error::SourceTargetMismatch(_))));

    let id = identity(Arc::clone(&m1.source.set), m1.source.window.clone());
    let same = compose(&id, &m1).unwrap();
    assert_eq!(verify_morphism(&same, 50, 0, &tol()).commutation(), 0.0);

    let a = state_scaling(Endpoint::new(inclusion(0.5, 1.0), inclusion_window()), inclusion(1.0, 2.0), 2.0).unwrap();
    let b = state_scaling(Endpoint::new(inclusion(1.0, 2.0), inclusion_window()), inclusion(-2.0, -1.0), -1.0).unwrap();
    let ab = compose(&a, &b).unwrap();
    for phi in a.source.set.sample(3, 0) {
        assert_eq!(time_change(&ab, &phi, 0, &grid).max_deviation, 0.0);
    }
}

#[test]
fn flow_equivalences() {
    let tau: super::builders::TimeCocycle = Arc::new(|t, _| t / 2.0);
    let w = Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
    let m = flow_equivalence(ActionSystem::drift(1.0), ActionSystem::drift(2.0), StateHomeo::identity(), tau, w.clone(), 1e-8).unwrap();
    let r = verify_morphism(&m, 100, 0, &tol());
    assert_eq!(r.level, MorphismLevel::Isomorphism, "{r:?}");
    let phi = m.source.set.sample(1, 0).pop().unwrap();
    let tc = time_change(&m, &phi, 0, &GridSpec::default());
    assert!(tc.max_deviation > 0.0 && tc.monotone);
    for t in [-2.0, 0.5, 3.0] {
        let x = phi.eval_real(t).unwrap();
        assert_eq!(m.k(&GroupElem::real(t), &x).0, GroupElem::real(t / 2.0));
    }

    let same: super::builders::TimeCocycle = Arc::new(|t, _| t);
    let id = flow_equivalence(ActionSystem::drift(1.0), ActionSystem::drift(1.0), StateHomeo::identity(), same, w.clone(), 1e-8).unwrap();
    assert_eq!(verify_morphism(&id, 50, 0, &tol()).commutation(), 0.0);

    let flip: super::builders::TimeCocycle = Arc::new(|t, _| -t);
    let err = flow_equivalence(ActionSystem::drift(1.0), ActionSystem::drift(1.0), StateHomeo::identity(), flip, w, 1e-8).unwrap_err();
    assert!(matches!(err, Error::IdentityViolation { .. }));
}

#[test]
fn change_of_variables_reproduces_the_scaled_inclusion() {
    let (set, m) = change_of_variables(
        StateHomeo::scaling(2.0),
        TimeHomeo::Identity,
        Endpoint::new(inclusion(0.5, 1.0), inclusion_window()),
    );
    let direct = inclusion(1.0, 2.0);
    for phi in set.sample(8, 3) {
        assert!(direct.membership(&phi).is_member());
    }
    for phi in direct.sample(8, 4) {
        assert!(set.membership(&phi).is_member());
    }
    assert!(!set.membership(&PartialMap::scalar(OpenDomain::line(), |t| 0.9 * t)).is_member());
    assert_eq!(verify_morphism(&m, 64, 0, &tol()).level, MorphismLevel::Isomorphism);

    let (neg, _) = change_of_variables(
        StateHomeo::scaling(-1.0),
        TimeHomeo::Identity,
        Endpoint::new(inclusion(0.5, 1.0), inclusion_window()),
    );
    let target = inclusion(-1.0, -0.5);
    assert!(neg.sample(8, 5).iter().all(|phi| target.membership(phi).is_member()));

    let (same, m) = change_of_variables(StateHomeo::identity(), TimeHomeo::Identity, Endpoint::new(inclusion(0.5, 1.0), inclusion_window()));
    assert!(same.sample(2, 0).iter().all(|phi| phi.tag().system.starts_with("inclusion") || !phi.tag().system.is_empty()));
    assert_eq!(verify_morphism(&m, 32, 0, &tol()).commutation(), 0.0);
}

#[test]
fn finite_aut_morphisms_are_exact() {
    for (n, h) in [(2, vec![1, 0]), (3, vec![1, 2, 0]), (3, vec![0, 1, 2])] {
        let h = Permutation::new(h).unwrap();
        let m = finite_aut_morphism(n, &h).unwrap();
        let group = TimeGroup::Permutations(n);
        let states: Vec<State> = (0..200).map(|i| State((0..n).map(|j| ((i * 7 + j * 3) % 11) as f64 - 5.0).collect())).collect();
        let points: Vec<(GroupElem, PartialMap)> = group
            .elements()
            .unwrap()
            .into_iter()
            .flat_map(|g| states.iter().map(move |x| (g.clone(), x.clone())))
            .filter_map(|(g, x)| m.source.set.through(&g, &x, 1).pop().map(|phi| (g, phi)))
            .collect();
        let r = verify_at(&m, &points, &m.target.star_points(50, 0), &tol());
        assert_eq!(r.level, MorphismLevel::Isomorphism);
        assert_eq!(r.commutation(), 0.0);
        assert_eq!(r.inverse_residual, Some(0.0));
    }
    let swap = finite_aut_morphism(2, &Permutation::new(vec![1, 0]).unwrap()).unwrap();
    assert_eq!(assess(&swap, &quick()).level, EquivalenceLevel::TopologicallyConjugate);
    assert!(matches!(finite_aut_morphism(3, &Permutation::identity(2)), Err(Error::InvalidParameter(_))));
}

#[test]
fn normal_form_of_decay() {
    let s: Arc<dyn SolutionSet> = Arc::new(ode_solution_set(OdeSystem::autonomous("x' = -x", |x| -x).global()).unwrap());
    let opts = CheckOptions {
        n_samples: 4,
        ..CheckOptions::default()
    };
    let m = normal_form(s, Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]), &opts).unwrap();
    let r = verify_morphism(&m, 24, 0, &tol());
    assert_eq!(r.level, MorphismLevel::Isomorphism, "{r:?}");
    let x = State::scalar(0.8);
    let got = m.k(&GroupElem::real(1.5), &x).1.x();
    assert!((got - 0.8 * (-1.5f64).exp()).abs() < 1e-8);
    assert!(!phase_decomposition(&m, 16, 0, &tol()).phase_preserving);
}

#[test]
fn level_parsing() {
    assert_eq!("TopologicallyEquivalent".parse::<EquivalenceLevel>().unwrap(), EquivalenceLevel::TopologicallyEquivalent);
    assert_eq!("phase-preserving".parse::<EquivalenceLevel>().unwrap(), EquivalenceLevel::PhasePreservingIsomorphism);
    assert!("sideways".parse::<EquivalenceLevel>().is_err());
    assert!(matches!(Verdict::ProvedExact, Verdict::ProvedExact));
}
