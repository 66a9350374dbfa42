//! Default numerical tolerances shared by the checkers.

use serde::{Deserialize, Serialize};

/// Distance below which a map is said to pass through a point, and the
/// distinctness threshold for two solutions.
pub const TOL_POINT: f64 = 1e-6;
/// Sup-distance target for compact convergence.
pub const TOL_CONV: f64 = 1e-6;
/// Commutation / round-trip residual bound for morphisms.
pub const TOL_MORPH: f64 = 1e-8;
/// Hausdorff bound for orbit preservation.
pub const TOL_ORBIT: f64 = 1e-6;
/// Interval endpoints are excluded together with this guard band.
pub const ENDPOINT_GUARD: f64 = 1e-12;
/// Default grid spacing for sup-distances and interpolants.
pub const GRID_SPACING: f64 = 1e-3;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub point: f64,
    pub conv: f64,
    pub morph: f64,
    pub orbit: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            point: TOL_POINT,
            conv: TOL_CONV,
            morph: TOL_MORPH,
            orbit: TOL_ORBIT,
        }
    }
}
