//! Compact convergence on spaces of partial maps, subbasic open sets of the
//! compact-open topology, and maximal continuation by numerical integration.

mod compact;
mod continuation;
mod convergence;
mod distance;
mod integrate;

pub use compact::CompactSet;
pub use continuation::{maximal_continuation, ExtensionRule};
pub use convergence::{test_convergence, test_convergence_with, CompactReport, ConvergenceOptions, ConvergenceReport, ConvergenceVerdict, DeviationWitness};
pub use distance::{dist_on_compact, in_subbasis, sup_deviation, OpenRegion};
pub use integrate::{integrate, DenseOutput, IntegrationOutcome, IntegratorParams, Rhs, StopReason};
