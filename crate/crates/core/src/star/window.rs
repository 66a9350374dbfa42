use std::fmt;
use std::sync::Arc;

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::base::{GroupElem, State, TimeGroup};
use crate::rng::rng;

/// Radius used to sample unbounded coordinates.
const SAMPLE_RADIUS: f64 = 5.0;

pub type PointMap = Arc<dyn Fn(&GroupElem, &State) -> (GroupElem, State) + Send + Sync>;

/// Time coordinate of a box window.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TimeSet {
    All,
    Interval { lo: f64, hi: f64 },
    Finite(Vec<GroupElem>),
}

/// A window `W ⊂ G × X`.
#[derive(Clone)]
pub enum Window {
    Everything,
    /// `time × Π [lo_i, hi_i]`; open boxes exclude the faces.
    Box {
        time: TimeSet,
        state: Vec<(f64, f64)>,
        open: bool,
    },
    /// A finite set of pairs, matched exactly.
    Points(Vec<(GroupElem, State)>),
    Union(Vec<Window>),
    Intersection(Vec<Window>),
    Difference(Box<Window>, Box<Window>),
    /// The image `k(W)` of a window under an invertible map.
    Mapped {
        inner: Box<Window>,
        forward: PointMap,
        inverse: PointMap,
    },
}

impl fmt::Debug for Window {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Window::Everything => write!(f, "Everything"),
            Window::Box { time, state, open } => {
                write!(f, "{}Box({time:?} × {state:?})", if *open { "Open" } else { "Closed" })
            }
            Window::Points(p) => write!(f, "Points[{}]", p.len()),
            Window::Union(ws) => f.debug_tuple("Union").field(ws).finish(),
            Window::Intersection(ws) => f.debug_tuple("Intersection").field(ws).finish(),
            Window::Difference(a, b) => f.debug_tuple("Difference").field(a).field(b).finish(),
            Window::Mapped { inner, .. } => f.debug_tuple("Mapped").field(inner).finish(),
        }
    }
}

fn in_range(v: f64, lo: f64, hi: f64, open: bool) -> bool {
    if open {
        v > lo && v < hi
    } else {
        v >= lo && v <= hi
    }
}

fn draw<R: Rng>(r: &mut R, lo: f64, hi: f64) -> f64 {
    let (lo, hi) = match (lo.is_finite(), hi.is_finite()) {
        (true, true) => (lo, hi),
        (true, false) => (lo, lo.max(-SAMPLE_RADIUS) + 2.0 * SAMPLE_RADIUS),
        (false, true) => (hi.min(SAMPLE_RADIUS) - 2.0 * SAMPLE_RADIUS, hi),
        (false, false) => (-SAMPLE_RADIUS, SAMPLE_RADIUS),
    };
    if lo >= hi {
        lo
    } else {
        r.gen_range(lo..=hi)
    }
}

impl Window {
    /// Closed box `[t0, t1] × Π [lo_i, hi_i]`.
    pub fn closed_box(t: (f64, f64), state: Vec<(f64, f64)>) -> Window {
        Window::Box {
            time: TimeSet::Interval { lo: t.0, hi: t.1 },
            state,
            open: false,
        }
    }

    pub fn open_box(t: (f64, f64), state: Vec<(f64, f64)>) -> Window {
        Window::Box {
            time: TimeSet::Interval { lo: t.0, hi: t.1 },
            state,
            open: true,
        }
    }

    pub fn point(g: GroupElem, x: State) -> Window {
        Window::Points(vec![(g, x)])
    }

    /// The closure of a box window.
    pub fn closure(&self) -> Window {
        match self {
            Window::Box { time, state, .. } => Window::Box {
                time: time.clone(),
                state: state.clone(),
                open: false,
            },
            other => other.clone(),
        }
    }

    pub fn contains(&self, g: &GroupElem, x: &State) -> bool {
        match self {
            Window::Everything => true,
            Window::Box { time, state, open } => {
                let time_ok = match time {
                    TimeSet::All => true,
                    TimeSet::Interval { lo, hi } => g.as_f64().is_some_and(|t| in_range(t, *lo, *hi, *open)),
                    TimeSet::Finite(items) => items.contains(g),
                };
                time_ok
                    && x.dim() == state.len()
                    && x.iter().zip(state).all(|(v, (lo, hi))| in_range(*v, *lo, *hi, *open))
            }
            Window::Points(pts) => pts.iter().any(|(h, y)| h == g && y.0 == x.0),
            Window::Union(ws) => ws.iter().any(|w| w.contains(g, x)),
            Window::Intersection(ws) => ws.iter().all(|w| w.contains(g, x)),
            Window::Difference(a, b) => a.contains(g, x) && !b.contains(g, x),
            Window::Mapped { inner, inverse, .. } => {
                let (h, y) = inverse(g, x);
                inner.contains(&h, &y)
            }
        }
    }

    /// Bounding box `([t0, t1], Π [lo_i, hi_i])` of a compact window.
    pub fn bounding_box(&self) -> Option<((f64, f64), Vec<(f64, f64)>)> {
        match self {
            Window::Box { time, state, open: false } => {
                let t = match time {
                    TimeSet::All => return None,
                    TimeSet::Interval { lo, hi } => (*lo, *hi),
                    TimeSet::Finite(items) => {
                        let ts: Vec<f64> = items.iter().filter_map(GroupElem::as_f64).collect();
                        if ts.len() != items.len() || ts.is_empty() {
                            (0.0, 0.0)
                        } else {
                            (ts.iter().copied().fold(f64::INFINITY, f64::min), ts.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                        }
                    }
                };
                let finite = t.0.is_finite() && t.1.is_finite() && state.iter().all(|(a, b)| a.is_finite() && b.is_finite());
                finite.then(|| (t, state.clone()))
            }
            Window::Points(pts) if !pts.is_empty() => {
                let ts: Vec<f64> = pts.iter().filter_map(|(g, _)| g.as_f64()).collect();
                let dim = pts[0].1.dim();
                let mut state = vec![(f64::INFINITY, f64::NEG_INFINITY); dim];
                for (_, x) in pts {
                    for (b, v) in state.iter_mut().zip(x.iter()) {
                        b.0 = b.0.min(*v);
                        b.1 = b.1.max(*v);
                    }
                }
                let t = if ts.is_empty() {
                    (0.0, 0.0)
                } else {
                    (ts.iter().copied().fold(f64::INFINITY, f64::min), ts.iter().copied().fold(f64::NEG_INFINITY, f64::max))
                };
                Some((t, state))
            }
            _ => None,
        }
    }

    /// `count` pairs of the window, reproducible from `seed`.
    pub fn sample(&self, group: &TimeGroup, dim: usize, count: usize, seed: u64) -> Vec<(GroupElem, State)> {
        let mut r = rng(seed);
        let mut out = Vec::with_capacity(count);
        let mut attempts = 0;
        while out.len() < count && attempts < 100 * count.max(1) {
            attempts += 1;
            if let Some(p) = self.draw_one(group, dim, &mut r) {
                if self.contains(&p.0, &p.1) {
                    out.push(p);
                }
            }
        }
        out
    }

    fn draw_one<R: Rng>(&self, group: &TimeGroup, dim: usize, r: &mut R) -> Option<(GroupElem, State)> {
        match self {
            Window::Everything => {
                let g = group.random_element(r, SAMPLE_RADIUS);
                Some((g, State((0..dim).map(|_| draw(r, f64::NEG_INFINITY, f64::INFINITY)).collect())))
            }
            Window::Box { time, state, .. } => {
                let g = match (time, group) {
                    (TimeSet::All, _) => group.random_element(r, SAMPLE_RADIUS),
                    (TimeSet::Interval { lo, hi }, TimeGroup::Integers) => {
                        let (a, b) = (lo.max(-1e6).ceil() as i64, hi.min(1e6).floor() as i64);
                        if a > b {
                            return None;
                        }
                        GroupElem::Int(r.gen_range(a..=b))
                    }
                    (TimeSet::Interval { lo, hi }, _) => GroupElem::real(draw(r, *lo, *hi)),
                    (TimeSet::Finite(items), _) => items.choose(r)?.clone(),
                };
                Some((g, State(state.iter().map(|(lo, hi)| draw(r, *lo, *hi)).collect())))
            }
            Window::Points(pts) => pts.choose(r).cloned(),
            Window::Union(ws) => ws.choose(r)?.draw_one(group, dim, r),
            Window::Intersection(ws) => ws.first()?.draw_one(group, dim, r),
            Window::Difference(a, _) => a.draw_one(group, dim, r),
            Window::Mapped { inner, forward, .. } => {
                let (g, x) = inner.draw_one(group, dim, r)?;
                Some(forward(&g, &x))
            }
        }
    }
}
