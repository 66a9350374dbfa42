//! The inductive sequence of two-slope solutions whose compact limit has the
//! forbidden slope 3/4, kept in exact dyadic arithmetic.

use num_rational::Rational64;
use num_traits::{One, ToPrimitive, Zero};

use crate::base::{Interpolant, MapTag, OpenDomain, PartialMap, State};

fn q(n: i64, d: i64) -> Rational64 {
    Rational64::new(n, d)
}

/// A continuous piecewise-linear map `ℝ → ℝ` with exact rational knots and
/// given end slopes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExactPl {
    knots: Vec<(Rational64, Rational64)>,
    left_slope: Rational64,
    right_slope: Rational64,
}

impl ExactPl {
    pub fn new(knots: Vec<(Rational64, Rational64)>, left_slope: Rational64, right_slope: Rational64) -> ExactPl {
        assert!(!knots.is_empty());
        assert!(knots.windows(2).all(|w| w[0].0 < w[1].0), "knots must increase");
        let mut pl = ExactPl {
            knots,
            left_slope,
            right_slope,
        };
        pl.drop_collinear();
        pl
    }

    fn drop_collinear(&mut self) {
        let slopes = self.all_slopes();
        let mut kept = Vec::with_capacity(self.knots.len());
        for (i, k) in self.knots.iter().enumerate() {
            if slopes[i] != slopes[i + 1] {
                kept.push(*k);
            }
        }
        if kept.is_empty() {
            kept.push(self.knots[0]);
        }
        self.knots = kept;
    }

    /// Left end slope, the slope of every cell, then the right end slope.
    fn all_slopes(&self) -> Vec<Rational64> {
        let mut out = vec![self.left_slope];
        out.extend(self.knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0)));
        out.push(self.right_slope);
        out
    }

    pub fn knots(&self) -> &[(Rational64, Rational64)] {
        &self.knots
    }

    /// Slopes of all linear pieces, ends included.
    pub fn slopes(&self) -> Vec<Rational64> {
        self.all_slopes()
    }

    pub fn eval(&self, t: Rational64) -> Rational64 {
        let first = self.knots[0];
        let last = *self.knots.last().unwrap();
        if t <= first.0 {
            return first.1 + self.left_slope * (t - first.0);
        }
        if t >= last.0 {
            return last.1 + self.right_slope * (t - last.0);
        }
        let i = self.knots.partition_point(|k| k.0 <= t) - 1;
        let (a, b) = (self.knots[i], self.knots[i + 1]);
        a.1 + (b.1 - a.1) / (b.0 - a.0) * (t - a.0)
    }

    /// `sup_{[lo, hi]} |self - other|`, exact: attained at a knot or an end.
    pub fn sup_distance(&self, other: &ExactPl, lo: Rational64, hi: Rational64) -> Rational64 {
        let mut ts = vec![lo, hi];
        ts.extend(self.knots.iter().chain(other.knots.iter()).map(|k| k.0).filter(|t| *t > lo && *t < hi));
        ts.into_iter()
            .map(|t| {
                let d = self.eval(t) - other.eval(t);
                if d < Rational64::zero() {
                    -d
                } else {
                    d
                }
            })
            .max()
            .unwrap()
    }

    /// `α·self + β·t`.
    pub fn affine(&self, alpha: Rational64, beta: Rational64) -> ExactPl {
        ExactPl::new(
            self.knots.iter().map(|&(t, v)| (t, alpha * v + beta * t)).collect(),
            alpha * self.left_slope + beta,
            alpha * self.right_slope + beta,
        )
    }

    /// One step of the recursion:
    /// `φ'(t) = (φ(2t + 1) - 3/4) / 2` for `t < 0` and `(φ(2t - 1) + 3/4) / 2` for `t ≥ 0`.
    pub fn step(&self) -> ExactPl {
        let half = q(1, 2);
        let three_q = q(3, 4);
        let one = Rational64::one();
        let mut knots = Vec::new();
        for &(b, v) in &self.knots {
            let t = (b - one) * half;
            if t < Rational64::zero() {
                knots.push((t, half * (v - three_q)));
            }
        }
        knots.push((Rational64::zero(), half * (self.eval(-one) + three_q)));
        for &(b, v) in &self.knots {
            let t = (b + one) * half;
            if t > Rational64::zero() {
                knots.push((t, half * (v + three_q)));
            }
        }
        ExactPl::new(knots, self.left_slope, self.right_slope)
    }

    pub fn to_f64_knots(&self) -> (Vec<f64>, Vec<f64>) {
        self.knots
            .iter()
            .map(|(t, v)| (t.to_f64().unwrap(), v.to_f64().unwrap()))
            .unzip()
    }

    /// The map as a partial map on ℝ. Dyadic knots convert to `f64` exactly.
    pub fn to_partial_map(&self, tag: MapTag) -> PartialMap {
        let (ts, vs) = self.to_f64_knots();
        let p = Interpolant::new(ts, vs.into_iter().map(State::scalar).collect()).with_end_slopes(
            State::scalar(self.left_slope.to_f64().unwrap()),
            State::scalar(self.right_slope.to_f64().unwrap()),
        );
        PartialMap::interpolant(OpenDomain::line(), p).with_tag(tag)
    }
}

fn phi0() -> ExactPl {
    ExactPl::new(
        vec![(q(-1, 2), q(-1, 4)), (q(1, 2), q(1, 4))],
        Rational64::one(),
        Rational64::one(),
    )
}

/// Exact `φ_n`, slopes in `{1/2, 1}`.
pub fn yorke_exact(n: usize) -> ExactPl {
    (0..n).fold(phi0(), |phi, _| phi.step())
}

/// Exact limit `ψ`: slope 1 outside `(-1, 1)`, slope 3/4 inside.
pub fn yorke_limit_exact() -> ExactPl {
    ExactPl::new(
        vec![(q(-1, 1), q(-3, 4)), (q(1, 1), q(3, 4))],
        Rational64::one(),
        Rational64::one(),
    )
}

pub fn yorke_sequence(n: usize) -> PartialMap {
    yorke_exact(n).to_partial_map(MapTag::new("yorke").param("n", n as f64))
}

pub fn yorke_limit() -> PartialMap {
    yorke_limit_exact().to_partial_map(MapTag::new("yorke-limit"))
}

/// The sequence carried to slopes `{v1, v2}` by `t ↦ α·φ_n(t) + β·t` with
/// `α = 2(v2 - v1)` and `β = 2v1 - v2`. `n = None` gives the limit.
pub fn yorke_scaled(n: Option<usize>, v1: Rational64, v2: Rational64) -> ExactPl {
    let alpha = q(2, 1) * (v2 - v1);
    let beta = q(2, 1) * v1 - v2;
    match n {
        Some(n) => yorke_exact(n).affine(alpha, beta),
        None => yorke_limit_exact().affine(alpha, beta),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn phi0_and_limit_values() {
        let p = yorke_sequence(0);
        assert_eq!(p.x(0.0), Some(0.0));
        assert_eq!(p.x(1.0), Some(0.75));
        let psi = yorke_limit();
        assert_eq!(psi.x(1.0), Some(0.75));
        assert_eq!(psi.x(2.0), Some(1.75));
        assert_eq!(psi.x(-2.0), Some(-1.75));
        assert_eq!(psi.x(0.5), Some(0.375));
    }

    #[test]
    fn slopes_stay_in_the_two_point_set() {
        let allowed = [q(1, 2), q(1, 1)];
        for n in 0..=12 {
            let phi = yorke_exact(n);
            assert!(phi.slopes().iter().all(|s| allowed.contains(s)), "n = {n}");
            assert!(phi.knots().iter().all(|(t, _)| *t > q(-1, 1) && *t < q(1, 1)));
            assert!(phi.knots().iter().all(|(t, _)| (*t.denom() as u64).is_power_of_two()));
        }
        assert_eq!(yorke_limit_exact().slopes(), vec![q(1, 1), q(3, 4), q(1, 1)]);
    }

    #[test]
    fn sup_distance_halves_each_step() {
        let psi = yorke_limit_exact();
        let d: Vec<Rational64> = (0..=10).map(|n| yorke_exact(n).sup_distance(&psi, q(-1, 1), q(1, 1))).collect();
        for n in 0..=10 {
            assert_eq!(d[n], q(1, 8) / Rational64::from_integer(1 << n), "n = {n}");
        }
        // outside [-1, 1] every φ_n agrees with ψ
        assert_eq!(yorke_exact(6).sup_distance(&psi, q(-5, 1), q(-1, 1)), q(0, 1));
    }

    #[test]
    fn scaled_sequence_has_the_requested_slopes() {
        let phi = yorke_scaled(Some(5), q(1, 1), q(2, 1));
        assert!(phi.slopes().iter().all(|s| *s == q(1, 1) || *s == q(2, 1)));
        let lim = yorke_scaled(None, q(1, 1), q(2, 1));
        assert!(lim.slopes().contains(&q(3, 2)));
    }
}
