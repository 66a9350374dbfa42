use serde::{Deserialize, Serialize};

use crate::base::{GroupElem, State};
use crate::topology::ConvergenceReport;
use crate::trajectory::Trajectory;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Axiom {
    Compactness,
    Existence,
    Uniqueness,
    Domain,
}

/// Evidence attached to a refutation. Everything needed to re-verify it is
/// serialized: points, sampled maps as CSV blocks, and the residual.
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub description: String,
    pub points: Vec<(GroupElem, State)>,
    pub maps: Vec<Trajectory>,
    pub limit: Option<Trajectory>,
    pub residual: Option<f64>,
    /// A group element the refuted property needed but did not get.
    pub missing: Option<GroupElem>,
    pub convergence: Option<ConvergenceReport>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum Verdict {
    Refuted { witness: Box<Witness> },
    Supported { samples: usize },
    ProvedExact,
}

impl Verdict {
    pub fn refuted(witness: Witness) -> Verdict {
        Verdict::Refuted {
            witness: Box::new(witness),
        }
    }

    pub fn is_refuted(&self) -> bool {
        matches!(self, Verdict::Refuted { .. })
    }

    /// Supported or proved.
    pub fn holds(&self) -> bool {
        !self.is_refuted()
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            Verdict::Refuted { witness } => Some(witness),
            _ => None,
        }
    }

    /// One-word label for tables.
    pub fn label(&self) -> &'static str {
        match self {
            Verdict::Refuted { .. } => "refuted",
            Verdict::Supported { .. } => "supported",
            Verdict::ProvedExact => "proved-exact",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxiomVerdict {
    pub axiom: Axiom,
    pub verdict: Verdict,
    pub notes: Vec<String>,
}

impl AxiomVerdict {
    pub fn new(axiom: Axiom, verdict: Verdict) -> AxiomVerdict {
        AxiomVerdict {
            axiom,
            verdict,
            notes: Vec::new(),
        }
    }

    pub fn note(mut self, note: impl Into<String>) -> AxiomVerdict {
        self.notes.push(note.into());
        self
    }
}
