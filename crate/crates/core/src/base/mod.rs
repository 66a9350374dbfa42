//! Ground types: time groups, state spaces, open domains and partial maps.

mod domain;
mod exact;
mod group;
mod interp;
mod partial;
mod state;

pub use domain::{Interval, OpenDomain};
pub use exact::ExactReal;
pub use group::{GroupElem, Permutation, TimeGroup};
pub use interp::Interpolant;
pub use partial::{ClosedFn, Evaluator, GroupFn, GroupMapFn, MapTag, PartialMap, StateFn, TimeFn, TimeMap};
pub use state::{State, StateSpace};
pub(crate) use state::euclidean;
