use serde::{Deserialize, Serialize};

use super::time_change::domain_grid;
use super::{par_map, phase_decomposition, time_change, verify_morphism, Morphism, MorphismLevel, TimeChange, VALUE_CAP};
use crate::base::{GroupElem, OpenDomain, PartialMap, TimeGroup};
use crate::bebutov::{hausdorff, GridSpec};
use crate::rng::split;
use crate::star::{check_existence, check_uniqueness, Axiom, CheckOptions, SolutionSet, Window, Witness};
use crate::tolerance::Tolerances;
use crate::{Error, Result};

/// Cumulative levels: each includes the checks of the ones below it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum EquivalenceLevel {
    NotAMorphism,
    Morphism,
    Isomorphism,
    PhasePreservingIsomorphism,
    TopologicallyEquivalent,
    TopologicallyConjugate,
}

impl std::str::FromStr for EquivalenceLevel {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let key: String = s.chars().filter(|c| c.is_ascii_alphanumeric()).collect::<String>().to_ascii_lowercase();
        Ok(match key.as_str() {
            "notamorphism" | "none" => EquivalenceLevel::NotAMorphism,
            "morphism" => EquivalenceLevel::Morphism,
            "isomorphism" | "iso" => EquivalenceLevel::Isomorphism,
            "phasepreservingisomorphism" | "phasepreserving" => EquivalenceLevel::PhasePreservingIsomorphism,
            "topologicallyequivalent" | "equivalent" => EquivalenceLevel::TopologicallyEquivalent,
            "topologicallyconjugate" | "conjugate" => EquivalenceLevel::TopologicallyConjugate,
            _ => return Err(Error::Config(format!("unknown equivalence level `{s}`"))),
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClassifyOptions {
    /// Star points for the commutation and inverse checks.
    pub n_samples: usize,
    /// Maps whose time-changes are sampled.
    pub n_maps: usize,
    pub seed: u64,
    pub grid: GridSpec,
    pub tol: Tolerances,
    /// Run existence and uniqueness on both sides.
    pub transport: bool,
    pub check: CheckOptions,
}

impl Default for ClassifyOptions {
    fn default() -> Self {
        ClassifyOptions {
            n_samples: 256,
            n_maps: 20,
            seed: 0,
            grid: GridSpec::default(),
            tol: Tolerances::default(),
            transport: true,
            check: CheckOptions {
                n_samples: 16,
                ..CheckOptions::default()
            },
        }
    }
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Residuals {
    pub commutation: f64,
    pub inverse: Option<f64>,
    pub phase: Option<f64>,
    pub orbit: Option<f64>,
    pub key_identity: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransportRow {
    pub axiom: Axiom,
    pub source: String,
    pub target: String,
    pub agree: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    pub morphism: String,
    pub source: String,
    pub target: String,
    pub level: EquivalenceLevel,
    /// Why the next level was denied.
    pub reason: Option<String>,
    pub residuals: Residuals,
    pub time_changes: Vec<TimeChange>,
    pub axioms_transport: Vec<TransportRow>,
    pub notes: Vec<String>,
    pub witness: Option<Witness>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OrbitReport {
    /// Hausdorff distance per map.
    pub per_map: Vec<f64>,
    pub max: f64,
}

/// Hausdorff distance between `ĥ(𝒪(φ))` and `𝒪(η(φ))`, the two orbits
/// sampled on grids matched through `D_φ`. Points beyond `1e6` are left out.
pub fn check_orbit_preservation(m: &Morphism, maps: &[PartialMap], grid: &GridSpec) -> OrbitReport {
    let per_map = par_map(maps, |phi| {
        let psi = m.eta(phi);
        let times: Vec<GroupElem> = match phi.domain() {
            OpenDomain::Elements(items) => items.iter().cloned().collect(),
            OpenDomain::Intervals(_) => domain_grid(phi, grid).into_iter().map(GroupElem::real).collect(),
        };
        let mut image = Vec::new();
        let mut target = Vec::new();
        for g in &times {
            let Some(x) = phi.eval(g) else { continue };
            let y = m.hhat(&x);
            if y.norm() > VALUE_CAP {
                continue;
            }
            let d = m.k(g, &x).0;
            match psi.eval(&d) {
                Some(z) => {
                    image.push(y);
                    target.push(z);
                }
                None => return f64::INFINITY,
            }
        }
        hausdorff(&image, &target)
    });
    let max = per_map.iter().copied().fold(0.0, f64::max);
    OrbitReport { per_map, max }
}

/// Existence and uniqueness on `(S, W)` and on `(S', k(W))`.
pub fn transport_axioms(m: &Morphism, w: &Window, opts: &CheckOptions) -> Result<Vec<TransportRow>> {
    let image = m
        .image_window(w)
        .ok_or_else(|| Error::PreconditionFailed(format!("{} has no inverse triplet", m.name)))?;
    let (s, t) = (m.source.set.as_ref(), m.target.set.as_ref());
    let rows = [
        (Axiom::Existence, check_existence(s, w, opts).verdict, check_existence(t, &image, opts).verdict),
        (Axiom::Uniqueness, check_uniqueness(s, w, opts).verdict, check_uniqueness(t, &image, opts).verdict),
    ];
    Ok(rows
        .into_iter()
        .map(|(axiom, a, b)| TransportRow {
            axiom,
            agree: a.holds() == b.holds(),
            source: a.label().to_string(),
            target: b.label().to_string(),
        })
        .collect())
}

/// Every member is defined on all of `G`. Families over ℤ count when they
/// claim any domain, since ℤ is represented by a finite range.
fn has_domain_g(s: &dyn SolutionSet) -> bool {
    let Some(d) = s.claimed_domain() else { return false };
    match s.group() {
        TimeGroup::Reals => d.is_whole_line(),
        TimeGroup::Integers => true,
        g => g.elements().unwrap_or_default().iter().all(|e| d.contains(e)),
    }
}

/// [`assess`], failing when either side lacks domain `G`.
pub fn classify(m: &Morphism, opts: &ClassifyOptions) -> Result<EquivalenceReport> {
    for (side, s) in [("source", &m.source.set), ("target", &m.target.set)] {
        if !has_domain_g(s.as_ref()) {
            return Err(Error::PreconditionFailed(format!("{side} `{}` is not known to have domain G", s.descriptor())));
        }
    }
    Ok(assess(m, opts))
}

/// The highest level the sampled evidence supports. Families without domain
/// `G` stop at the phase-preserving level.
pub fn assess(m: &Morphism, opts: &ClassifyOptions) -> EquivalenceReport {
    let tol = &opts.tol;
    let mut report = EquivalenceReport {
        morphism: m.name.clone(),
        source: m.source.set.descriptor(),
        target: m.target.set.descriptor(),
        level: EquivalenceLevel::NotAMorphism,
        reason: None,
        residuals: Residuals::default(),
        time_changes: Vec::new(),
        axioms_transport: Vec::new(),
        notes: Vec::new(),
        witness: None,
    };
    let v = verify_morphism(m, opts.n_samples, opts.seed, tol);
    report.residuals.commutation = v.commutation();
    report.residuals.inverse = v.inverse_residual;
    match v.level {
        MorphismLevel::NotAMorphism => {
            report.reason = Some(match &v.witness {
                Some(w) => w.description.clone(),
                None => "no star points could be sampled".into(),
            });
            report.witness = v.witness;
            return report;
        }
        MorphismLevel::Morphism => {
            report.level = EquivalenceLevel::Morphism;
            report.reason = Some(match v.inverse_residual {
                None => "no inverse triplet".into(),
                Some(r) => format!("inverse round trip residual {r:e} exceeds tol_morph"),
            });
            return report;
        }
        MorphismLevel::Isomorphism => report.level = EquivalenceLevel::Isomorphism,
    }

    let pd = phase_decomposition(m, opts.n_samples.min(256), split(opts.seed, 2), tol);
    report.residuals.phase = Some(pd.well_defined_residual);
    if !pd.phase_preserving {
        report.reason = Some(format!("h(g, x) depends on g (residual {:e})", pd.well_defined_residual));
        return report;
    }
    report.level = EquivalenceLevel::PhasePreservingIsomorphism;

    let maps = m.source.set.sample(opts.n_maps, split(opts.seed, 3));
    report.time_changes = par_map(&maps.iter().enumerate().collect::<Vec<_>>(), |(i, phi)| time_change(m, phi, *i, &opts.grid));
    let key = report.time_changes.iter().map(|t| t.key_identity_residual).fold(0.0, f64::max);
    report.residuals.key_identity = Some(key);
    if key > tol.morph {
        report.notes.push(format!("key identity η(φ)(D_φ(g)) = ĥ(φ(g)) off by {key:e}"));
    }
    let orbit = check_orbit_preservation(m, &maps, &opts.grid);
    if orbit.max > tol.orbit {
        report.notes.push(format!("orbit images differ by {:e} in Hausdorff distance", orbit.max));
    }
    report.residuals.orbit = Some(orbit.max);
    if opts.transport {
        match transport_axioms(m, &m.source.window, &opts.check) {
            Ok(rows) => {
                if rows.iter().any(|r| !r.agree) {
                    report.notes.push("axiom verdicts differ between source and target".into());
                }
                report.axioms_transport = rows;
            }
            Err(e) => report.notes.push(e.to_string()),
        }
    }

    for (side, s) in [("source", &m.source.set), ("target", &m.target.set)] {
        if !has_domain_g(s.as_ref()) {
            report.reason = Some(format!("{side} is not known to have domain G"));
            return report;
        }
    }
    if maps.is_empty() {
        report.reason = Some("no maps sampled for time-changes".into());
        return report;
    }

    if m.source.set.group() == TimeGroup::Reals {
        let checks: [(&str, fn(&TimeChange, f64) -> bool); 3] = [
            ("D_φ not monotone increasing", |t, _| t.monotone),
            ("D_φ not onto dom η(φ)", |t, _| t.onto),
            ("D_φ(e) ≠ e", |t, tol| t.fixes_identity(tol)),
        ];
        for (reason, ok) in checks {
            if let Some(bad) = report.time_changes.iter().find(|t| !ok(t, tol.morph)) {
                report.reason = Some(reason.into());
                report.notes.push(format!("first failing map: {}", bad.map_id));
                return report;
            }
        }
        report.level = EquivalenceLevel::TopologicallyEquivalent;
    } else {
        report
            .notes
            .push("isotopy to the identity is decided only for G = ℝ; only D_φ = id is tested".into());
    }

    let dev = report.time_changes.iter().map(|t| t.max_deviation).fold(0.0, f64::max);
    if dev <= tol.morph {
        report.level = EquivalenceLevel::TopologicallyConjugate;
    } else {
        report.reason = Some(format!("D_φ ≠ id (max |D_φ(g) - g| = {dev:e})"));
    }
    report
}
