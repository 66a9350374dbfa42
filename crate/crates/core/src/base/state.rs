use std::ops::Deref;

use serde::{Deserialize, Serialize};

/// A point of the state space. Euclidean states are coordinate vectors;
/// finite-discrete states are a single coordinate holding the label index.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct State(pub Vec<f64>);

impl State {
    pub fn new(coords: Vec<f64>) -> Self {
        State(coords)
    }

    pub fn scalar(x: f64) -> Self {
        State(vec![x])
    }

    pub fn label(index: usize) -> Self {
        State(vec![index as f64])
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    /// First coordinate; the whole state for one-dimensional systems.
    pub fn x(&self) -> f64 {
        self.0[0]
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> State {
        State(self.0.iter().map(|&v| f(v)).collect())
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|v| v.is_finite())
    }
}

impl Deref for State {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl From<f64> for State {
    fn from(x: f64) -> Self {
        State::scalar(x)
    }
}

impl From<Vec<f64>> for State {
    fn from(v: Vec<f64>) -> Self {
        State(v)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StateSpace {
    Euclidean(usize),
    FiniteDiscrete(Vec<String>),
}

impl StateSpace {
    pub fn dim(&self) -> usize {
        match self {
            StateSpace::Euclidean(n) => *n,
            StateSpace::FiniteDiscrete(_) => 1,
        }
    }

    /// Euclidean distance, or the 0/1 metric on labels.
    pub fn metric(&self, a: &State, b: &State) -> f64 {
        match self {
            StateSpace::Euclidean(_) => euclidean(a, b),
            StateSpace::FiniteDiscrete(_) => {
                if a.0 == b.0 {
                    0.0
                } else {
                    1.0
                }
            }
        }
    }

    pub fn contains(&self, x: &State) -> bool {
        match self {
            StateSpace::Euclidean(n) => x.dim() == *n && x.is_finite(),
            StateSpace::FiniteDiscrete(labels) => {
                x.dim() == 1 && x.x() >= 0.0 && x.x().fract() == 0.0 && (x.x() as usize) < labels.len()
            }
        }
    }
}

pub(crate) fn euclidean(a: &State, b: &State) -> f64 {
    a.0.iter()
        .zip(&b.0)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn discrete_metric_is_zero_one() {
        let space = StateSpace::FiniteDiscrete(vec!["a".into(), "b".into(), "c".into()]);
        assert_eq!(space.metric(&State::label(1), &State::label(1)), 0.0);
        assert_eq!(space.metric(&State::label(0), &State::label(2)), 1.0);
        assert!(space.contains(&State::label(2)));
        assert!(!space.contains(&State::label(3)));
    }

    proptest! {
        #[test]
        fn euclidean_metric_axioms(
            a in prop::collection::vec(-1e3f64..1e3, 2),
            b in prop::collection::vec(-1e3f64..1e3, 2),
            c in prop::collection::vec(-1e3f64..1e3, 2),
        ) {
            let space = StateSpace::Euclidean(2);
            let (a, b, c) = (State(a), State(b), State(c));
            prop_assert_eq!(space.metric(&a, &b), space.metric(&b, &a));
            prop_assert!(space.metric(&a, &c) <= space.metric(&a, &b) + space.metric(&b, &c) + 1e-9);
            prop_assert_eq!(space.metric(&a, &a), 0.0);
        }
    }
}
