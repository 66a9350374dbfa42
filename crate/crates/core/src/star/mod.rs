//! Star-constructions `S*W`, their set algebra and the axiom checkers.

mod algebra;
mod axioms;
mod query;
mod solution_set;
mod verdict;
mod window;

pub use algebra::{check_monotonicity, star_algebra_suite, star_set, AlgebraReport, IdentityCheck};
pub use axioms::{
    check_compactness, check_domain, check_existence, check_uniqueness, reverify, CheckOptions, CompactnessOptions,
};
pub use query::{cauchy_query, cauchy_query_with, distinct, star_membership, StarPoint};
pub use solution_set::{AdversarialSequence, Membership, SolutionSet};
pub use verdict::{Axiom, AxiomVerdict, Verdict, Witness};
pub use window::{PointMap, TimeSet, Window};
