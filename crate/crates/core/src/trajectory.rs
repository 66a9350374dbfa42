//! Trajectory dumps: a partial map sampled on a grid, written as CSV with
//! header `t,x1,...,xn` and read back as a piecewise-linear map.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::base::{Interpolant, OpenDomain, PartialMap, State};
use crate::{Error, Result};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Trajectory {
    pub label: String,
    pub domain: OpenDomain,
    pub csv: String,
}

/// Samples `phi` at `times`, skipping points outside its domain.
pub fn sample(phi: &PartialMap, times: &[f64]) -> (Vec<f64>, Vec<State>) {
    times.iter().filter_map(|&t| phi.eval_real(t).map(|x| (t, x))).unzip()
}

/// Grid over `[a, b]` with the map's own breakpoints merged in, so that a
/// piecewise-linear map is reproduced exactly.
pub fn grid_with_breakpoints(phi: &PartialMap, a: f64, b: f64, spacing: f64) -> Vec<f64> {
    let n = ((b - a) / spacing).ceil().max(1.0) as usize;
    let mut times: Vec<f64> = (0..=n).map(|i| a + (b - a) * i as f64 / n as f64).collect();
    if let Some(knots) = phi.breakpoints() {
        times.extend(knots.into_iter().filter(|t| *t > a && *t < b));
    }
    times.sort_by(f64::total_cmp);
    times.dedup();
    times
}

pub fn write_csv<W: Write>(out: W, times: &[f64], states: &[State]) -> Result<()> {
    let dim = states.first().map_or(1, State::dim);
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["t".to_string()];
    header.extend((1..=dim).map(|i| format!("x{i}")));
    w.write_record(&header)?;
    for (t, x) in times.iter().zip(states) {
        let mut row = vec![format!("{t:?}")];
        row.extend(x.iter().map(|v| format!("{v:?}")));
        w.write_record(&row)?;
    }
    w.flush()?;
    Ok(())
}

pub fn read_csv<R: Read>(input: R) -> Result<(Vec<f64>, Vec<State>)> {
    let mut r = csv::Reader::from_reader(input);
    let headers = r.headers()?.clone();
    if headers.get(0) != Some("t") || headers.len() < 2 {
        return Err(Error::Config(format!("expected header t,x1,...; got {headers:?}")));
    }
    let mut times = Vec::new();
    let mut states = Vec::new();
    for (line, rec) in r.records().enumerate() {
        let rec = rec?;
        let parse = |s: &str| {
            s.trim()
                .parse::<f64>()
                .map_err(|e| Error::Config(format!("row {}: {e}", line + 2)))
        };
        times.push(parse(&rec[0])?);
        states.push(State(rec.iter().skip(1).map(parse).collect::<Result<_>>()?));
    }
    Ok((times, states))
}

impl Trajectory {
    pub fn capture(label: impl Into<String>, phi: &PartialMap, times: &[f64]) -> Trajectory {
        let (ts, xs) = sample(phi, times);
        let mut buf = Vec::new();
        write_csv(&mut buf, &ts, &xs).expect("writing to memory");
        Trajectory {
            label: label.into(),
            domain: phi.domain().clone(),
            csv: String::from_utf8(buf).expect("csv is utf-8"),
        }
    }

    /// Piecewise-linear reconstruction on the recorded domain, cut to the open
    /// range of recorded times.
    pub fn to_map(&self) -> Result<PartialMap> {
        let (times, states) = read_csv(self.csv.as_bytes())?;
        if times.is_empty() {
            return Err(Error::Config(format!("trajectory `{}` has no rows", self.label)));
        }
        if !times.windows(2).all(|w| w[0] < w[1]) {
            return Err(Error::Config(format!("trajectory `{}` times are not increasing", self.label)));
        }
        let (first, last) = (times[0], times[times.len() - 1]);
        let domain = match &self.domain {
            OpenDomain::Intervals(_) if first < last => self
                .domain
                .intersect(&OpenDomain::interval(first, last))
                .ok_or_else(|| Error::Config(format!("trajectory `{}` has no interior rows", self.label)))?,
            OpenDomain::Intervals(_) => return Err(Error::Config(format!("trajectory `{}` needs two rows", self.label))),
            other => other.clone(),
        };
        Ok(PartialMap::interpolant(domain, Interpolant::new(times, states)))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_is_bitwise() {
        let phi = PartialMap::scalar(OpenDomain::interval(-1.0, 1.0), |t| t.sin() / 3.0);
        let grid: Vec<f64> = (-9..=9).map(|i| i as f64 / 10.0).collect();
        let tr = Trajectory::capture("sin", &phi, &grid);
        assert!(tr.csv.starts_with("t,x1\n"));
        let back = tr.to_map().unwrap();
        for &t in &grid[1..grid.len() - 1] {
            assert_eq!(back.x(t), phi.x(t));
        }
        assert_eq!(back.x(0.9), None);
        assert_eq!(back.x(1.5), None);
    }

    #[test]
    fn bad_header_is_a_config_error() {
        assert!(matches!(read_csv("time,x\n0,1\n".as_bytes()), Err(Error::Config(_))));
    }
}
