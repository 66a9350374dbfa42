use std::fmt;
use std::sync::Arc;

use super::integrate::{integrate, IntegratorParams, Rhs};
use crate::base::{Evaluator, OpenDomain, PartialMap};
use crate::star::SolutionSet;
use crate::{Error, Result};

/// Local extension rule of a system: a right-hand side to integrate, an
/// optional spatial window and the integrator settings.
#[derive(Clone)]
pub struct ExtensionRule {
    pub rhs: Rhs,
    pub window: Option<Arc<dyn Fn(&[f64]) -> bool + Send + Sync>>,
    pub params: IntegratorParams,
}

impl ExtensionRule {
    pub fn new(rhs: Rhs) -> ExtensionRule {
        ExtensionRule {
            rhs,
            window: None,
            params: IntegratorParams::default(),
        }
    }

    /// Extends `φ` past both ends of its (single-interval) domain.
    pub fn extend(&self, phi: &PartialMap) -> Result<PartialMap> {
        let iv = phi
            .domain()
            .as_interval()
            .ok_or_else(|| Error::InvalidParameter(format!("continuation needs a connected real domain, got {:?}", phi.domain())))?;
        let (a, b) = (iv.lo(), iv.hi());
        let delta = if (b - a).is_finite() { (0.25 * (b - a)).min(1e-3) } else { 1e-3 };
        let window = self.window.as_deref().map(|w| w as &(dyn Fn(&[f64]) -> bool + Sync));
        let t_max = self.params.t_max;
        let mut pieces = vec![phi.clone()];
        let mut hi = b;
        let mut lo = a;
        if b.is_finite() && b < t_max {
            let t0 = b - delta;
            let y0 = phi.eval_real(t0).expect("point inside the domain");
            let out = integrate(&self.rhs, t0, &y0, 1.0, &self.params, window)?;
            hi = out.end.max(b);
            if let Some(d) = interval(t0 - 0.5 * delta, hi) {
                pieces.push(PartialMap::new(d, Evaluator::Dense(out.dense)));
            }
        }
        if a.is_finite() && a > -t_max {
            let t0 = a + delta;
            let y0 = phi.eval_real(t0).expect("point inside the domain");
            let out = integrate(&self.rhs, t0, &y0, -1.0, &self.params, window)?;
            lo = out.end.min(a);
            if let Some(d) = interval(lo, t0 + 0.5 * delta) {
                pieces.push(PartialMap::new(d, Evaluator::Dense(out.dense)));
            }
        }
        if pieces.len() == 1 {
            return Ok(phi.clone());
        }
        let domain = interval(lo, hi).expect("extension of a nonempty interval");
        Ok(PartialMap::new(domain, Evaluator::Glued(pieces)).with_tag(phi.tag().clone()))
    }
}

fn interval(lo: f64, hi: f64) -> Option<OpenDomain> {
    let lo = lo.is_finite().then_some(lo);
    let hi = hi.is_finite().then_some(hi);
    crate::base::Interval::new(lo, hi).map(OpenDomain::from_interval)
}

impl fmt::Debug for ExtensionRule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ExtensionRule")
            .field("windowed", &self.window.is_some())
            .field("params", &self.params)
            .finish()
    }
}

/// Extends `φ` to a numerically maximal solution of `sys`. Continuation stops
/// at blow-up, on leaving the system's window, or at the time horizon.
pub fn maximal_continuation(phi: &PartialMap, sys: &dyn SolutionSet) -> Result<PartialMap> {
    let rule = sys
        .extension_rule()
        .ok_or_else(|| Error::NotExtendable(sys.descriptor()))?;
    rule.extend(phi)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_PI_2;

    fn riccati(a: f64) -> ExtensionRule {
        ExtensionRule::new(Arc::new(move |_, x: &[f64]| vec![x[0] * x[0] + a]))
    }

    #[test]
    fn tangent_extends_to_its_blow_up_times() {
        let phi = PartialMap::scalar(OpenDomain::interval(-0.1, 0.1), f64::tan);
        let ext = riccati(1.0).extend(&phi).unwrap();
        let (lo, hi) = ext.domain().bounds().unwrap();
        assert!((lo + FRAC_PI_2).abs() <= 1e-6, "lo = {lo}");
        assert!((hi - FRAC_PI_2).abs() <= 1e-6, "hi = {hi}");
        assert!((ext.x(1.2).unwrap() - 1.2f64.tan()).abs() < 1e-7);
        assert_eq!(ext.x(0.05), phi.x(0.05));
    }

    #[test]
    fn equilibrium_reaches_the_horizon() {
        let phi = PartialMap::scalar(OpenDomain::interval(-1.0, 1.0), |_| 1.0);
        let ext = riccati(-1.0).extend(&phi).unwrap();
        assert_eq!(ext.domain().bounds().unwrap(), (-1e3, 1e3));
        assert!((ext.x(500.0).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn continuation_is_idempotent() {
        let phi = PartialMap::scalar(OpenDomain::interval(-0.1, 0.1), f64::tan);
        let rule = riccati(1.0);
        let once = rule.extend(&phi).unwrap();
        let twice = rule.extend(&once).unwrap();
        let (a1, b1) = once.domain().bounds().unwrap();
        let (a2, b2) = twice.domain().bounds().unwrap();
        assert!((a1 - a2).abs() < 1e-6 && (b1 - b2).abs() < 1e-6);
        for t in [-1.5, -0.7, 0.0, 0.9, 1.5] {
            assert!((once.x(t).unwrap() - twice.x(t).unwrap()).abs() < 1e-8);
        }
    }
}
