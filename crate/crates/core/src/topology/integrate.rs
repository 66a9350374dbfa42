//! Dormand–Prince 5(4) with dense output, stopping at a time horizon, at
//! finite-time blow-up, or on leaving a spatial window.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::base::State;
use crate::{Error, Result};

/// Right-hand side `f(t, x)` of `x' = f(t, x)`.
pub type Rhs = Arc<dyn Fn(f64, &[f64]) -> Vec<f64> + Send + Sync>;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct IntegratorParams {
    pub atol: f64,
    pub rtol: f64,
    pub t_max: f64,
    pub blowup: f64,
    pub max_steps: usize,
}

impl Default for IntegratorParams {
    fn default() -> Self {
        IntegratorParams {
            atol: 1e-13,
            rtol: 1e-12,
            t_max: 1e3,
            blowup: 1e6,
            max_steps: 2_000_000,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StopReason {
    Horizon,
    /// `|x|` exceeded the blow-up threshold; the endpoint adds the
    /// extrapolated remaining time.
    BlowUp { remaining: f64 },
    LeftWindow,
}

const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];
const D: [f64; 7] = [
    -12715105075.0 / 11282082432.0,
    0.0,
    87487479700.0 / 32700410799.0,
    -10690763975.0 / 1880347072.0,
    701980252875.0 / 199316789632.0,
    -1453857185.0 / 822651844.0,
    69997945.0 / 29380423.0,
];

#[derive(Clone, Debug)]
struct Step {
    t0: f64,
    h: f64,
    r: [Vec<f64>; 5],
}

impl Step {
    fn eval(&self, t: f64) -> Vec<f64> {
        let th = (t - self.t0) / self.h;
        let th1 = 1.0 - th;
        (0..self.r[0].len())
            .map(|i| {
                let r = &self.r;
                r[0][i] + th * (r[1][i] + th1 * (r[2][i] + th * (r[3][i] + th1 * r[4][i])))
            })
            .collect()
    }

    fn span(&self) -> (f64, f64) {
        let t1 = self.t0 + self.h;
        (self.t0.min(t1), self.t0.max(t1))
    }
}

/// Dense output of one integration run, covering a closed time span.
/// Arguments past the covered span are clamped to its ends.
#[derive(Clone, Debug)]
pub struct DenseOutput {
    steps: Vec<Step>,
    start: State,
}

impl DenseOutput {
    /// Covered span `[lo, hi]`.
    pub fn span(&self) -> (f64, f64) {
        match (self.steps.first(), self.steps.last()) {
            (Some(a), Some(b)) => (a.span().0, b.span().1),
            _ => (f64::NAN, f64::NAN),
        }
    }

    pub fn step_count(&self) -> usize {
        self.steps.len()
    }

    pub fn eval(&self, t: f64) -> State {
        if self.steps.is_empty() {
            return self.start.clone();
        }
        let i = self.steps.partition_point(|s| s.span().1 < t).min(self.steps.len() - 1);
        let s = &self.steps[i];
        let (lo, hi) = s.span();
        State(s.eval(t.clamp(lo, hi)))
    }
}

#[derive(Clone, Debug)]
pub struct IntegrationOutcome {
    pub dense: DenseOutput,
    /// Numerical endpoint of the maximal interval in the integration direction.
    pub end: f64,
    pub stop: StopReason,
}

fn radial_rate(rhs: &Rhs, t: f64, y: &[f64]) -> f64 {
    let f = rhs(t, y);
    let n = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    y.iter().zip(&f).map(|(a, b)| a * b).sum::<f64>() / n
}

/// Integrates from `(t0, y0)` in direction `dir` (±1) until the horizon
/// `|t| = t_max`, blow-up, or exit from `window`.
pub fn integrate(
    rhs: &Rhs,
    t0: f64,
    y0: &State,
    dir: f64,
    params: &IntegratorParams,
    window: Option<&(dyn Fn(&[f64]) -> bool + Sync)>,
) -> Result<IntegrationOutcome> {
    let dir = dir.signum();
    let n = y0.dim();
    let t_end = dir * params.t_max;
    let mut t = t0;
    let mut y = y0.0.clone();
    let mut k: Vec<Vec<f64>> = vec![vec![0.0; n]; 7];
    k[0] = rhs(t, &y);
    let mut steps = Vec::new();
    let mut h = dir * 1e-3_f64.min((t_end - t0).abs().max(1e-12));
    let mut stop = StopReason::Horizon;
    let end;
    let scale = |a: &[f64], b: &[f64], i: usize| params.atol + params.rtol * a[i].abs().max(b[i].abs());
    let mut ytmp = vec![0.0; n];
    let mut count = 0usize;
    if (t_end - t0) * dir <= 0.0 {
        return Ok(IntegrationOutcome {
            dense: DenseOutput {
                steps,
                start: y0.clone(),
            },
            end: t0,
            stop,
        });
    }
    loop {
        count += 1;
        if count > params.max_steps {
            return Err(Error::IntegrationFailure {
                t,
                reason: "step budget exhausted".into(),
            });
        }
        let last = (t + h - t_end) * dir >= 0.0;
        if last {
            h = t_end - t;
        }
        for s in 1..7 {
            for i in 0..n {
                ytmp[i] = y[i] + h * (0..s).map(|j| A[s][j] * k[j][i]).sum::<f64>();
            }
            k[s] = rhs(t + C[s] * h, &ytmp);
        }
        let y1 = ytmp.clone();
        let mut err = 0.0;
        for i in 0..n {
            let e = h * (0..7).map(|j| E[j] * k[j][i]).sum::<f64>();
            let sk = scale(&y, &y1, i);
            err += (e / sk).powi(2);
        }
        let err = (err / n as f64).sqrt();
        if !err.is_finite() || y1.iter().any(|v| !v.is_finite()) {
            h *= 0.2;
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "non-finite state".into(),
                });
            }
            continue;
        }
        if err > 1.0 {
            h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            if h.abs() < 1e-14 * t.abs().max(1.0) {
                return Err(Error::IntegrationFailure {
                    t,
                    reason: "step size collapsed".into(),
                });
            }
            continue;
        }
        let r1: Vec<f64> = (0..n).map(|i| y1[i] - y[i]).collect();
        let r2: Vec<f64> = (0..n).map(|i| h * k[0][i] - r1[i]).collect();
        let r3: Vec<f64> = (0..n).map(|i| r1[i] - h * k[6][i] - r2[i]).collect();
        let r4: Vec<f64> = (0..n)
            .map(|i| h * (0..7).map(|j| D[j] * k[j][i]).sum::<f64>())
            .collect();
        let step = Step {
            t0: t,
            h,
            r: [y.clone(), r1, r2, r3, r4],
        };
        let t1 = t + h;
        if let Some(inside) = window {
            if !inside(&y1) {
                // bisect the dense output for the exit time
                let (mut a, mut b) = (t, t1);
                for _ in 0..80 {
                    let m = 0.5 * (a + b);
                    if inside(&step.eval(m)) {
                        a = m;
                    } else {
                        b = m;
                    }
                }
                steps.push(step);
                end = b;
                stop = StopReason::LeftWindow;
                break;
            }
        }
        steps.push(step);
        let fac = (0.9 * err.max(1e-10).powf(-0.2)).clamp(0.2, 5.0);
        t = t1;
        y = y1;
        k[0] = k[6].clone();
        if last {
            end = t_end;
            break;
        }
        let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > params.blowup {
            // |x|' ≈ c|x|^p near blow-up, so the remaining time is |x| / ((p-1)·|x|')
            let r1 = dir * radial_rate(rhs, t, &y);
            let doubled: Vec<f64> = y.iter().map(|v| 2.0 * v).collect();
            let r2 = dir * radial_rate(rhs, t, &doubled);
            let p = (r2 / r1).log2();
            let remaining = if r1 > 0.0 && p > 1.0 { norm / ((p - 1.0) * r1) } else { 0.0 };
            stop = StopReason::BlowUp { remaining };
            end = t + dir * remaining;
            break;
        }
        h *= fac;
    }
    if dir < 0.0 {
        steps.reverse();
    }
    Ok(IntegrationOutcome {
        dense: DenseOutput {
            steps,
            start: y0.clone(),
        },
        end,
        stop,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rhs(f: impl Fn(f64, &[f64]) -> Vec<f64> + Send + Sync + 'static) -> Rhs {
        Arc::new(f)
    }

    #[test]
    fn exponential_decay() {
        let f = rhs(|_, x| vec![-x[0]]);
        let out = integrate(&f, 0.0, &State::scalar(1.0), 1.0, &IntegratorParams::default(), None).unwrap();
        assert_eq!(out.stop, StopReason::Horizon);
        assert_eq!(out.end, 1e3);
        for i in 0..=500 {
            let t = i as f64 / 100.0;
            assert!((out.dense.eval(t).x() - (-t).exp()).abs() <= 1e-9, "t = {t}");
        }
    }

    #[test]
    fn backward_direction() {
        let f = rhs(|_, x| vec![x[0]]);
        let out = integrate(&f, 0.0, &State::scalar(1.0), -1.0, &IntegratorParams::default(), None).unwrap();
        assert_eq!(out.end, -1e3);
        assert!((out.dense.eval(-3.0).x() - (-3.0f64).exp()).abs() <= 1e-10);
    }

    #[test]
    fn tangent_blow_up_time() {
        let f = rhs(|_, x| vec![x[0] * x[0] + 1.0]);
        let out = integrate(&f, 0.0, &State::scalar(0.0), 1.0, &IntegratorParams::default(), None).unwrap();
        assert!(matches!(out.stop, StopReason::BlowUp { .. }));
        assert!((out.end - std::f64::consts::FRAC_PI_2).abs() <= 1e-7, "end = {}", out.end);
        let err = (out.dense.eval(1.4).x() - 1.4f64.tan()).abs();
        assert!(err <= 1e-7, "err = {err:e}");
        let back = integrate(&f, 0.0, &State::scalar(0.0), -1.0, &IntegratorParams::default(), None).unwrap();
        assert!((back.end + std::f64::consts::FRAC_PI_2).abs() <= 1e-9, "end = {}", back.end);
    }

    #[test]
    fn window_exit_is_located() {
        let f = rhs(|_, _| vec![1.0]);
        let inside = |x: &[f64]| x[0] < 2.5;
        let out = integrate(&f, 0.0, &State::scalar(0.0), 1.0, &IntegratorParams::default(), Some(&inside)).unwrap();
        assert_eq!(out.stop, StopReason::LeftWindow);
        assert!((out.end - 2.5).abs() < 1e-9);
    }
}
