use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    action_solution_set, constant_solution_set, finite_aut_system, inclusion_solution_set, ode_solution_set,
    riccati_solution_set, ActionSystem, InclusionSystem, OdeSystem,
};
use crate::base::{GroupElem, State, StateSpace};
use crate::star::{SolutionSet, TimeSet, Window};
use crate::{Error, Result};

/// A built-in action, by name.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "kebab-case")]
pub enum ActionSpec {
    /// `π(t, x) = x + c·t`.
    Drift { c: f64 },
    Decay,
    PermutedLabels { n: usize },
    PermutedCoordinates { n: usize },
}

/// JSON system descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum SystemConfig {
    /// `x' = Σ c_k x^k` with `coefficients = [c_0, c_1, ...]`.
    Ode {
        coefficients: Vec<f64>,
        #[serde(default)]
        t_max: Option<f64>,
    },
    Riccati { a: f64 },
    InclusionInterval {
        lo: f64,
        hi: f64,
        #[serde(default)]
        delta: Option<f64>,
    },
    InclusionSet {
        values: Vec<f64>,
        #[serde(default)]
        delta: Option<f64>,
    },
    Constants {
        #[serde(default = "one")]
        dim: usize,
    },
    Action(ActionSpec),
    FiniteAut { n: usize },
}

fn one() -> usize {
    1
}

fn polynomial_label(c: &[f64]) -> String {
    let terms: Vec<String> = c
        .iter()
        .enumerate()
        .filter(|(_, v)| **v != 0.0)
        .map(|(k, v)| match k {
            0 => format!("{v}"),
            1 => format!("{v}·x"),
            _ => format!("{v}·x^{k}"),
        })
        .collect();
    format!("x' = {}", if terms.is_empty() { "0".into() } else { terms.join(" + ") })
}

impl SystemConfig {
    pub fn parse(text: &str) -> Result<SystemConfig> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("system descriptor: {e}")))
    }

    pub fn build(&self) -> Result<Arc<dyn SolutionSet>> {
        Ok(match self {
            SystemConfig::Ode { coefficients, t_max } => {
                let c = coefficients.clone();
                if c.is_empty() || c.iter().any(|v| !v.is_finite()) {
                    return Err(Error::InvalidParameter("ODE coefficients must be finite and nonempty".into()));
                }
                let linear = c.iter().skip(2).all(|v| *v == 0.0);
                let mut sys = OdeSystem::autonomous(polynomial_label(&c), move |x| c.iter().rev().fold(0.0, |acc, k| acc * x + k));
                if linear {
                    sys = sys.global();
                }
                if let Some(t) = t_max {
                    sys.params.t_max = *t;
                }
                Arc::new(ode_solution_set(sys)?)
            }
            SystemConfig::Riccati { a } => Arc::new(riccati_solution_set(*a)?),
            SystemConfig::InclusionInterval { lo, hi, delta } => {
                let mut sys = InclusionSystem::interval(*lo, *hi);
                if let Some(d) = delta {
                    sys.delta = *d;
                }
                Arc::new(inclusion_solution_set(sys)?)
            }
            SystemConfig::InclusionSet { values, delta } => {
                let mut sys = InclusionSystem::finite(values.clone());
                if let Some(d) = delta {
                    sys.delta = *d;
                }
                Arc::new(inclusion_solution_set(sys)?)
            }
            SystemConfig::Constants { dim } => Arc::new(constant_solution_set(StateSpace::Euclidean(*dim))),
            SystemConfig::Action(spec) => {
                let act = match spec {
                    ActionSpec::Drift { c } => ActionSystem::drift(*c),
                    ActionSpec::Decay => ActionSystem::decay(),
                    ActionSpec::PermutedLabels { n } | ActionSpec::PermutedCoordinates { n } if !(1..=6).contains(n) => {
                        return Err(Error::InvalidParameter(format!("permutation degree {n} outside 1..=6")))
                    }
                    ActionSpec::PermutedLabels { n } => ActionSystem::permuted_labels(*n),
                    ActionSpec::PermutedCoordinates { n } => ActionSystem::permuted_coordinates(*n),
                };
                Arc::new(action_solution_set(act))
            }
            SystemConfig::FiniteAut { n } => Arc::new(finite_aut_system(*n)?.0),
        })
    }

    /// The window the system comes with, if any.
    pub fn default_window(&self) -> Option<Window> {
        match self {
            SystemConfig::FiniteAut { n } => finite_aut_system(*n).ok().map(|(_, w)| w),
            _ => None,
        }
    }
}

/// Reads a system descriptor; parse errors carry line and column.
pub fn load_system(path: &Path) -> Result<SystemConfig> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
    SystemConfig::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
}

/// JSON window descriptor.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum WindowSpec {
    /// `time × Π state[i]`; a missing time range means all of `G`.
    Box {
        #[serde(default)]
        time: Option<(f64, f64)>,
        state: Vec<(f64, f64)>,
        #[serde(default)]
        open: bool,
    },
    /// Pairs `[t, x1, ..., xn]` over the reals.
    Points { points: Vec<Vec<f64>> },
    Everything,
}

impl WindowSpec {
    pub fn parse(text: &str) -> Result<WindowSpec> {
        serde_json::from_str(text).map_err(|e| Error::Config(format!("window descriptor: {e}")))
    }

    pub fn load(path: &Path) -> Result<WindowSpec> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Config(format!("{}: {e}", path.display())))?;
        WindowSpec::parse(&text).map_err(|e| Error::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_window(&self) -> Result<Window> {
        Ok(match self {
            WindowSpec::Box { time, state, open } => {
                if state.iter().any(|(a, b)| a > b) {
                    return Err(Error::Config(format!("empty state range in {state:?}")));
                }
                Window::Box {
                    time: time.map_or(TimeSet::All, |(lo, hi)| TimeSet::Interval { lo, hi }),
                    state: state.clone(),
                    open: *open,
                }
            }
            WindowSpec::Points { points } => {
                let mut out = Vec::with_capacity(points.len());
                for p in points {
                    if p.len() < 2 {
                        return Err(Error::Config(format!("window point {p:?} needs a time and a state")));
                    }
                    out.push((GroupElem::real(p[0]), State(p[1..].to_vec())));
                }
                Window::Points(out)
            }
            WindowSpec::Everything => Window::Everything,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_every_system_type() {
        let cases = [
            (r#"{"type": "ode", "coefficients": [1.0, 0.0, 1.0]}"#, "x' = 1 + 1·x^2"),
            (r#"{"type": "riccati", "a": -1}"#, "x' = x² + -1"),
            (r#"{"type": "inclusion-interval", "lo": 0.5, "hi": 1}"#, "ẋ ∈ [0.5, 1]"),
            (r#"{"type": "inclusion-set", "values": [0.5, 1]}"#, "ẋ ∈ {0.5, 1}"),
            (r#"{"type": "constants"}"#, "constant maps"),
            (r#"{"type": "action", "name": "drift", "c": 2}"#, "flow of x' = 2"),
            (r#"{"type": "finite-aut", "n": 3}"#, "C(Aut(X), C(X)) with |X| = 3"),
        ];
        for (text, descriptor) in cases {
            let s = SystemConfig::parse(text).unwrap().build().unwrap();
            assert_eq!(s.descriptor(), descriptor);
        }
    }

    #[test]
    fn errors_carry_positions() {
        let err = SystemConfig::parse("{\n  \"type\": \"riccati\",\n  \"a\": \n}").unwrap_err();
        assert!(err.to_string().contains("line 4"), "{err}");
        let err = SystemConfig::parse(r#"{"type": "riccati", "a": "one"}"#).unwrap_err();
        assert!(err.to_string().contains("expected f64"), "{err}");
        assert!(SystemConfig::parse(r#"{"type": "riccati", "a": 0}"#).unwrap().build().is_err());
        assert!(SystemConfig::parse(r#"{"type": "pde"}"#).is_err());
    }

    #[test]
    fn windows() {
        let w = WindowSpec::parse(r#"{"type": "box", "time": [-1, 1], "state": [[-1, 1]]}"#)
            .unwrap()
            .to_window()
            .unwrap();
        assert!(w.contains(&GroupElem::real(1.0), &State::scalar(-1.0)));
        assert!(!w.contains(&GroupElem::real(1.5), &State::scalar(0.0)));
        let p = WindowSpec::parse(r#"{"type": "points", "points": [[0, 1]]}"#).unwrap().to_window().unwrap();
        assert!(p.contains(&GroupElem::real(0.0), &State::scalar(1.0)));
    }
}
