use super::State;

/// Piecewise-linear interpolant through `(times[i], values[i])`.
///
/// Outside the stored grid the interpolant either continues with the given
/// end slopes or holds the end value.
#[derive(Clone, Debug)]
pub struct Interpolant {
    times: Vec<f64>,
    values: Vec<State>,
    left_slope: Option<State>,
    right_slope: Option<State>,
}

impl Interpolant {
    /// Panics unless `times` is strictly increasing and matches `values`.
    pub fn new(times: Vec<f64>, values: Vec<State>) -> Interpolant {
        assert_eq!(times.len(), values.len(), "interpolant grid and values differ in length");
        assert!(!times.is_empty(), "interpolant needs at least one node");
        assert!(
            times.windows(2).all(|w| w[0] < w[1]),
            "interpolant grid must be strictly increasing"
        );
        Interpolant {
            times,
            values,
            left_slope: None,
            right_slope: None,
        }
    }

    /// Samples `f` on `[a, b]` with spacing at most `spacing`.
    pub fn sample(a: f64, b: f64, spacing: f64, f: impl Fn(f64) -> State) -> Interpolant {
        let n = (((b - a) / spacing).ceil() as usize).max(1);
        let times: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
        let values = times.iter().map(|&t| f(t)).collect();
        Interpolant::new(times, values)
    }

    pub fn with_end_slopes(mut self, left: State, right: State) -> Interpolant {
        self.left_slope = Some(left);
        self.right_slope = Some(right);
        self
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn values(&self) -> &[State] {
        &self.values
    }

    pub fn end_slopes(&self) -> (Option<&State>, Option<&State>) {
        (self.left_slope.as_ref(), self.right_slope.as_ref())
    }

    /// Slope of each grid cell.
    pub fn slopes(&self) -> Vec<State> {
        self.times
            .windows(2)
            .zip(self.values.windows(2))
            .map(|(t, v)| {
                let h = t[1] - t[0];
                State(v[1].iter().zip(v[0].iter()).map(|(b, a)| (b - a) / h).collect())
            })
            .collect()
    }

    pub fn eval(&self, t: f64) -> State {
        let n = self.times.len();
        let (t0, tn) = (self.times[0], self.times[n - 1]);
        if t <= t0 {
            return extrapolate(&self.values[0], self.left_slope.as_ref(), t - t0);
        }
        if t >= tn {
            return extrapolate(&self.values[n - 1], self.right_slope.as_ref(), t - tn);
        }
        let i = self.times.partition_point(|&s| s <= t) - 1;
        let (a, b) = (self.times[i], self.times[i + 1]);
        let w = (t - a) / (b - a);
        let (va, vb) = (&self.values[i], &self.values[i + 1]);
        State(va.iter().zip(vb.iter()).map(|(x, y)| x + w * (y - x)).collect())
    }

    pub fn map_values(&self, f: impl Fn(&State) -> State) -> Interpolant {
        Interpolant {
            times: self.times.clone(),
            values: self.values.iter().map(&f).collect(),
            left_slope: None,
            right_slope: None,
        }
    }
}

fn extrapolate(v: &State, slope: Option<&State>, dt: f64) -> State {
    match slope {
        Some(s) => State(v.iter().zip(s.iter()).map(|(x, m)| x + m * dt).collect()),
        None => v.clone(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn interpolates_between_nodes() {
        let p = Interpolant::new(vec![0.0, 1.0, 3.0], vec![0.0.into(), 2.0.into(), 3.0.into()]);
        assert_eq!(p.eval(0.5).x(), 1.0);
        assert_eq!(p.eval(2.0).x(), 2.5);
        assert_eq!(p.eval(3.0).x(), 3.0);
        assert_eq!(p.eval(10.0).x(), 3.0);
        let slopes: Vec<f64> = p.slopes().iter().map(|s| s.x()).collect();
        assert_eq!(slopes, vec![2.0, 0.5]);
    }

    #[test]
    fn end_slopes_extend_linearly() {
        let p = Interpolant::new(vec![0.0, 1.0], vec![0.0.into(), 1.0.into()])
            .with_end_slopes(0.5.into(), 2.0.into());
        assert_eq!(p.eval(-2.0).x(), -1.0);
        assert_eq!(p.eval(3.0).x(), 5.0);
    }
}
