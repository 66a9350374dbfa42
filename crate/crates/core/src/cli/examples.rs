//! End-to-end reproduction of the worked examples, compared against a
//! checked-in table of expected verdicts.

use std::collections::BTreeMap;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::{GroupElem, MapTag, PartialMap, Permutation, State, TimeGroup};
use crate::bebutov::GridSpec;
use crate::morphism::{
    assess, classify, domain_grid, finite_aut_morphism, riccati_scaling, state_scaling, time_change, time_reversal, verify_at, verify_morphism,
    ClassifyOptions, Endpoint, EquivalenceLevel, MorphismLevel,
};
use crate::rng::split;
use crate::star::{check_compactness, check_uniqueness, CheckOptions, CompactnessOptions, SolutionSet, Window};
use crate::systems::{inclusion_solution_set, ode_solution_set, InclusionSystem, OdeSystem};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

pub const EXAMPLE_IDS: [&str; 5] = ["ex1", "ex2", "ex3", "ex4", "control"];

/// Bound on `|D_φ(t) - s·t|` and `|D_φ(t) - t|` for the affine time-changes.
pub const TIME_CHANGE_TOL: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExpectedRow {
    pub example: String,
    pub check: String,
    pub subject: String,
    pub expected: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExampleRow {
    pub example: String,
    pub check: String,
    pub subject: String,
    pub expected: Option<bool>,
    pub observed: bool,
    pub matches: bool,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExamplesReport {
    pub seed: u64,
    pub only: Option<String>,
    pub rows: Vec<ExampleRow>,
    pub all_match: bool,
}

impl ExamplesReport {
    /// `(example, check, subject, observed)` rows, without details.
    pub fn verdicts(&self) -> Vec<(String, String, String, bool)> {
        self.rows
            .iter()
            .map(|r| (r.example.clone(), r.check.clone(), r.subject.clone(), r.observed))
            .collect()
    }
}

pub fn expected_table() -> Vec<ExpectedRow> {
    serde_json::from_str(include_str!("expected_examples.json")).expect("checked-in expected table parses")
}

struct Observed {
    check: &'static str,
    subject: String,
    observed: bool,
    detail: String,
}

fn obs(check: &'static str, subject: impl Into<String>, observed: bool, detail: impl Into<String>) -> Observed {
    Observed {
        check,
        subject: subject.into(),
        observed,
        detail: detail.into(),
    }
}

/// Runs the examples (all, or the one named by `only`) and compares each
/// observation with the expected table.
pub fn run_examples(seed: u64, only: Option<&str>, tol: &Tolerances) -> Result<ExamplesReport> {
    if let Some(id) = only {
        if !EXAMPLE_IDS.contains(&id) {
            return Err(Error::Config(format!("unknown example `{id}`; expected one of {EXAMPLE_IDS:?}")));
        }
    }
    let expected = expected_table();
    let mut rows = Vec::new();
    for id in EXAMPLE_IDS.iter().filter(|id| only.is_none_or(|o| o == **id)) {
        let observed = match *id {
            "ex1" => ex1(seed, tol)?,
            "ex2" => ex2(seed, tol)?,
            "ex3" => ex3(seed, tol)?,
            "ex4" => ex4(tol)?,
            _ => control(seed, tol)?,
        };
        for o in observed {
            let want = expected
                .iter()
                .find(|e| e.example == *id && e.check == o.check && e.subject == o.subject)
                .map(|e| e.expected);
            rows.push(ExampleRow {
                example: id.to_string(),
                check: o.check.to_string(),
                subject: o.subject,
                expected: want,
                observed: o.observed,
                matches: want == Some(o.observed),
                detail: o.detail,
            });
        }
    }
    let all_match = rows.iter().all(|r| r.matches);
    Ok(ExamplesReport {
        seed,
        only: only.map(str::to_string),
        rows,
        all_match,
    })
}

fn ex1(seed: u64, tol: &Tolerances) -> Result<Vec<Observed>> {
    let w = Window::closed_box((-2.0, 2.0), vec![(-2.0, 2.0)]);
    let systems: Vec<(&str, Box<dyn SolutionSet>)> = vec![
        ("x' ∈ [1/2, 1]", Box::new(inclusion_solution_set(InclusionSystem::interval(0.5, 1.0))?)),
        ("x' ∈ {1/2, 1}", Box::new(inclusion_solution_set(InclusionSystem::finite(vec![0.5, 1.0]))?)),
        ("x' = 1", Box::new(ode_solution_set(OdeSystem::autonomous("x' = 1", |_| 1.0).global())?)),
    ];
    let copts = CompactnessOptions {
        seed,
        tol: *tol,
        ..CompactnessOptions::default()
    };
    let uopts = CheckOptions {
        seed,
        tol: *tol,
        ..CheckOptions::default()
    };
    let mut out = Vec::new();
    for (name, s) in &systems {
        let c = check_compactness(s.as_ref(), &w, &copts)?;
        let detail = match c.verdict.witness() {
            Some(wit) => format!("refuted: {} (residual {:e})", wit.description, wit.residual.unwrap_or(f64::NAN)),
            None => c.verdict.label().to_string(),
        };
        out.push(obs("compactness", *name, c.verdict.holds(), detail));
    }
    for (name, s) in &systems {
        let u = check_uniqueness(s.as_ref(), &w, &uopts);
        let detail = match u.verdict.witness() {
            Some(wit) => format!("refuted: {}", wit.description),
            None => u.verdict.label().to_string(),
        };
        out.push(obs("uniqueness", *name, u.verdict.holds(), detail));
    }
    Ok(out)
}

fn ex2(seed: u64, tol: &Tolerances) -> Result<Vec<Observed>> {
    let mut out = Vec::new();
    for (a, b) in [(1.0, 4.0), (-1.0, -4.0)] {
        let subject = format!("riccati ({a}, {b})");
        let m = riccati_scaling(a, b)?;
        let v = verify_morphism(&m, 1000, seed, tol);
        let iso = v.level == MorphismLevel::Isomorphism && v.commutation() <= tol.morph;
        out.push(obs("isomorphism", &subject, iso, format!("commutation {:e} over {} star points", v.commutation(), v.samples)));

        let s = (a / b).sqrt();
        let grid = GridSpec::default();
        let maps = m.source.set.sample(20, split(seed, 1));
        let mut worst = 0.0f64;
        for phi in &maps {
            for t in domain_grid(phi, &grid) {
                let Some(x) = phi.eval_real(t) else { continue };
                let d = m.k(&GroupElem::real(t), &x).0.as_f64().unwrap_or(f64::NAN);
                worst = worst.max((d - s * t).abs());
            }
        }
        out.push(obs(
            "time-change s·t",
            &subject,
            worst <= TIME_CHANGE_TOL,
            format!("max |D(t) - {s}·t| = {worst:e} over {} maps", maps.len()),
        ));

        let onto = maps.iter().enumerate().filter(|(i, phi)| time_change(&m, phi, *i, &grid).onto).count();
        out.push(obs(
            "endpoints matched",
            &subject,
            onto == maps.len(),
            format!("{onto} of {} maps", maps.len()),
        ));

        let r = assess(
            &m,
            &ClassifyOptions {
                seed,
                tol: *tol,
                transport: false,
                ..ClassifyOptions::default()
            },
        );
        out.push(obs(
            "phase-preserving isomorphism",
            &subject,
            r.level >= EquivalenceLevel::PhasePreservingIsomorphism,
            format!("{:?}; {}", r.level, r.reason.unwrap_or_default()),
        ));
    }
    Ok(out)
}

fn ex3(seed: u64, tol: &Tolerances) -> Result<Vec<Observed>> {
    let mut out = Vec::new();
    let window = Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)]);
    for (c, lo, hi, subject) in [(2.0, 1.0, 2.0, "[1/2, 1] -> [1, 2]"), (-1.0, -1.0, -0.5, "[1/2, 1] -> [-1, -1/2]")] {
        let source: Arc<dyn SolutionSet> = Arc::new(inclusion_solution_set(InclusionSystem::interval(0.5, 1.0))?);
        let target: Arc<dyn SolutionSet> = Arc::new(inclusion_solution_set(InclusionSystem::interval(lo, hi))?);
        let m = state_scaling(Endpoint::new(source, window.clone()), target, c)?;
        let r = classify(
            &m,
            &ClassifyOptions {
                n_maps: 50,
                seed,
                tol: *tol,
                transport: false,
                ..ClassifyOptions::default()
            },
        )?;
        let dev = r.time_changes.iter().map(|t| t.max_deviation).fold(0.0, f64::max);
        out.push(obs(
            "topologically conjugate",
            subject,
            r.level == EquivalenceLevel::TopologicallyConjugate && dev <= TIME_CHANGE_TOL,
            format!("{:?}; max |D(t) - t| = {dev:e} over {} maps", r.level, r.time_changes.len()),
        ));
    }
    Ok(out)
}

/// Star points `(g, φ_i)` for every `g` and maps `φ_i` whose values run
/// through a grid of at least `1000` points of `C(X)`.
pub fn aut_grid_points(n: usize) -> Vec<(GroupElem, PartialMap)> {
    let group = TimeGroup::Permutations(n).elements().unwrap_or_default();
    let per_axis = (1000f64).powf(1.0 / n as f64).ceil() as usize;
    let total = per_axis.pow(n as u32);
    let coord = |k: usize| -4.0 + 8.0 * k as f64 / (per_axis - 1) as f64;
    let grid: Vec<State> = (0..total)
        .map(|mut i| {
            State(
                (0..n)
                    .map(|_| {
                        let k = i % per_axis;
                        i /= per_axis;
                        coord(k)
                    })
                    .collect(),
            )
        })
        .collect();
    let mut out = Vec::with_capacity(total * group.len());
    for i in 0..total {
        let values: BTreeMap<GroupElem, State> =
            group.iter().enumerate().map(|(j, g)| (g.clone(), grid[(i + j) % total].clone())).collect();
        let phi = PartialMap::table(values).with_tag(MapTag::new("finite-aut").param("n", n as f64));
        out.extend(group.iter().map(|g| (g.clone(), phi.clone())));
    }
    out
}

fn ex4(tol: &Tolerances) -> Result<Vec<Observed>> {
    let mut out = Vec::new();
    for n in [2, 3] {
        let points = aut_grid_points(n);
        let mut worst = 0.0f64;
        let mut iso = true;
        let perms = Permutation::all(n);
        for h in &perms {
            let m = finite_aut_morphism(n, h)?;
            let back = aut_grid_points(n);
            let v = verify_at(&m, &points, &back, tol);
            iso &= v.level == MorphismLevel::Isomorphism;
            worst = worst.max(v.commutation()).max(v.inverse_residual.unwrap_or(f64::INFINITY));
        }
        out.push(obs(
            "exact isomorphism",
            format!("n = {n}"),
            iso && worst == 0.0,
            format!("max residual {worst:e} over {} relabellings, {} star points each", perms.len(), points.len()),
        ));
    }
    Ok(out)
}

fn control(seed: u64, tol: &Tolerances) -> Result<Vec<Observed>> {
    let drift = |c: f64| -> Result<Arc<dyn SolutionSet>> {
        Ok(Arc::new(ode_solution_set(OdeSystem::autonomous(format!("x' = {c}"), move |_| c).global())?))
    };
    let m = time_reversal(Endpoint::new(drift(1.0)?, Window::closed_box((-1.0, 1.0), vec![(-1.0, 1.0)])), drift(-1.0)?);
    let r = classify(
        &m,
        &ClassifyOptions {
            n_samples: 64,
            n_maps: 6,
            seed,
            tol: *tol,
            transport: false,
            ..ClassifyOptions::default()
        },
    )?;
    let reason = r.reason.clone().unwrap_or_default();
    Ok(vec![
        obs("phase-preserving isomorphism", "x' = 1 -> x' = -1", r.level >= EquivalenceLevel::PhasePreservingIsomorphism, format!("{:?}", r.level)),
        obs("topologically equivalent", "x' = 1 -> x' = -1", r.level >= EquivalenceLevel::TopologicallyEquivalent, reason),
    ])
}
