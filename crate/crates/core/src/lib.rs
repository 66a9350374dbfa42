//! Star-constructions of solution sets for dynamical systems that need not be
//! well-posed: flows, ODEs with finite-time blow-up, and differential inclusions.
//!
//! A solution set `S` is a family of partial maps from a time group `G` into a
//! state space `X`, each defined on an open subset of `G`. Pairing it with a
//! window `W ⊂ G × X` gives the star-construction
//!
//! ```text
//! S*W = { (g, φ) | φ ∈ S, g ∈ dom φ, (g, φ(g)) ∈ W }
//! ```
//!
//! which encodes the Cauchy problem on `W`. The crate provides:
//!
//! * [`base`]: time groups, state spaces, open domains and partial maps.
//! * [`topology`]: compact-convergence distances, convergence reports and
//!   maximal continuation of partial maps by numerical integration.
//! * [`star`]: the [`star::SolutionSet`] trait, windows, the star set algebra
//!   and the compactness / existence / uniqueness / domain axiom checkers.
//! * [`systems`]: built-in solution sets (ODEs, the Riccati family, interval and
//!   finite-set differential inclusions, constants, group actions, `Aut(X)`).
//! * [`bebutov`]: the shift action, flow reconstruction, orbits, equilibria and
//!   weak invariance.
//! * [`morphism`]: morphisms `⟨H, k, η⟩`, time-changes and the equivalence /
//!   conjugacy classification.
//! * [`cli`]: the `starflow` command-line front end and report writers.
//!
//! Every numerical check returns a three-valued [`star::Verdict`]: a refutation
//! carries a reproducible witness, support is stated at a sample size, and only
//! closed-form families may claim an exact proof.

pub mod base;
pub mod bebutov;
pub mod cli;
mod error;
pub mod morphism;
pub mod rng;
pub mod star;
pub mod systems;
pub mod tolerance;
pub mod topology;
pub mod trajectory;

pub use error::{Error, Result};
pub use tolerance::Tolerances;

pub use base::{ExactReal, GroupElem, Interval, OpenDomain, PartialMap, Permutation, State, StateSpace, TimeGroup};
