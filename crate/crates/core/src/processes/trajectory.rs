use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::scalar::{distance, Real};

/// Which nodes of the integration grid are kept.
#[derive(Debug, Clone, PartialEq)]
pub enum Record<S> {
    /// Every node: the uniform grid plus every index jump time.
    All,
    /// Every `k`-th uniform grid node (jump nodes skipped) and the final node.
    Stride(usize),
    /// Exactly these times; they are inserted into the grid as breakpoints.
    Times(Vec<S>),
    /// Only the final state.
    Final,
}

/// A time-discretised sample path. Points are stored row-major with stride `dim`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct Trajectory<S: Real> {
    pub dim: usize,
    pub times: Vec<S>,
    pub points: Vec<S>,
    /// Component active from each recorded time onward (switched processes only).
    pub index: Option<Vec<usize>>,
    pub seed: u64,
    pub replica: u64,
    pub config_digest: String,
}

impl<S: Real> Trajectory<S> {
    pub(crate) fn with_capacity(dim: usize, cap: usize, switched: bool) -> Self {
        Self {
            dim,
            times: Vec::with_capacity(cap),
            points: Vec::with_capacity(cap * dim),
            index: switched.then(|| Vec::with_capacity(cap)),
            seed: 0,
            replica: 0,
            config_digest: String::new(),
        }
    }

    pub(crate) fn push(&mut self, t: S, x: &[S], idx: Option<usize>) {
        self.times.push(t);
        self.points.extend_from_slice(x);
        if let (Some(v), Some(i)) = (self.index.as_mut(), idx) {
            v.push(i);
        }
    }

    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn point(&self, k: usize) -> &[S] {
        &self.points[k * self.dim..(k + 1) * self.dim]
    }

    pub fn last_point(&self) -> &[S] {
        self.point(self.len() - 1)
    }

    pub fn iter_points(&self) -> impl Iterator<Item = &[S]> {
        self.points.chunks_exact(self.dim)
    }

    /// Values of coordinate `j` along the path.
    pub fn coordinate(&self, j: usize) -> Vec<S> {
        self.iter_points().map(|p| p[j]).collect()
    }

    /// Writes the frozen CSV layout: `#`-comment metadata lines, header
    /// `t,x_0,…,x_{d-1},index`, then one row per recorded time. Reals use 17
    /// significant digits; `index` is `-1` for non-switched processes.
    pub fn write_csv<W: Write>(&self, mut w: W, comments: &[(String, String)]) -> io::Result<()> {
        writeln!(w, "# seed={}", self.seed)?;
        writeln!(w, "# replica={}", self.replica)?;
        writeln!(w, "# config_digest={}", self.config_digest)?;
        for (k, v) in comments {
            writeln!(w, "# {k}={v}")?;
        }
        write!(w, "t")?;
        for j in 0..self.dim {
            write!(w, ",x_{j}")?;
        }
        writeln!(w, ",index")?;
        for (k, p) in self.iter_points().enumerate() {
            write!(w, "{}", fmt_real(self.times[k]))?;
            for &x in p {
                write!(w, ",{}", fmt_real(x))?;
            }
            match &self.index {
                Some(ix) => writeln!(w, ",{}", ix[k])?,
                None => writeln!(w, ",-1")?,
            }
        }
        Ok(())
    }

    /// Parses the layout written by [`Trajectory::write_csv`].
    pub fn read_csv<R: BufRead>(r: R) -> Result<Self> {
        let mut traj = Trajectory::with_capacity(0, 0, false);
        let mut dim = None;
        let mut index: Vec<usize> = Vec::new();
        let mut any_index = false;
        for line in r.lines() {
            let line = line.map_err(|e| crate::Error::InvalidParameter(e.to_string()))?;
            if let Some(meta) = line.strip_prefix('#') {
                if let Some((k, v)) = meta.trim().split_once('=') {
                    match k {
                        "seed" => traj.seed = v.parse().unwrap_or(0),
                        "replica" => traj.replica = v.parse().unwrap_or(0),
                        "config_digest" => traj.config_digest = v.to_string(),
                        _ => {}
                    }
                }
                continue;
            }
            let Some(d) = dim else {
                let cols: Vec<&str> = line.split(',').collect();
                if cols.first() != Some(&"t") || cols.last() != Some(&"index") {
                    return invalid(format!("unexpected trajectory header {line:?}"));
                }
                dim = Some(cols.len() - 2);
                traj.dim = cols.len() - 2;
                continue;
            };
            let cols: Vec<&str> = line.split(',').collect();
            if cols.len() != d + 2 {
                return invalid(format!("row has {} columns, expected {}", cols.len(), d + 2));
            }
            let parse = |s: &str| -> Result<S> {
                s.parse::<f64>()
                    .map(S::lit)
                    .map_err(|e| crate::Error::InvalidParameter(format!("{s:?}: {e}")))
            };
            traj.times.push(parse(cols[0])?);
            for c in &cols[1..=d] {
                traj.points.push(parse(c)?);
            }
            let ix: i64 = cols[d + 1]
                .parse()
                .map_err(|e| crate::Error::InvalidParameter(format!("index: {e}")))?;
            if ix >= 0 {
                any_index = true;
                index.push(ix as usize);
            }
        }
        if any_index {
            traj.index = Some(index);
        }
        Ok(traj)
    }
}

/// Formats a real with 17 significant digits.
pub fn fmt_real<S: Real>(x: S) -> String {
    format!("{:.16e}", x.as_f64())
}

/// Two paths on a common grid under a coupling, with the distance process.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(bound = "S: Real")]
pub struct CoupledTrajectory<S: Real> {
    pub path_a: Trajectory<S>,
    pub path_b: Trajectory<S>,
    /// `r[k] = ‖path_a[k] − path_b[k]‖`.
    pub r: Vec<S>,
    /// `F(r[k])` for the concave distance function built from the family's `(L, R)`.
    pub f_of_r: Vec<S>,
    pub meeting_time: Option<S>,
}

impl<S: Real> CoupledTrajectory<S> {
    pub(crate) fn assemble(
        path_a: Trajectory<S>,
        path_b: Trajectory<S>,
        meeting_time: Option<S>,
        f: impl Fn(S) -> S,
    ) -> Self {
        let r: Vec<S> = path_a
            .iter_points()
            .zip(path_b.iter_points())
            .map(|(a, b)| distance(a, b))
            .collect();
        let f_of_r = r.iter().map(|&x| f(x)).collect();
        Self {
            path_a,
            path_b,
            r,
            f_of_r,
            meeting_time,
        }
    }

    pub fn times(&self) -> &[S] {
        &self.path_a.times
    }

    /// Whether the pair had met by time `t`.
    pub fn met_by(&self, t: S) -> bool {
        self.meeting_time.is_some_and(|m| m <= t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_layout_and_round_trip() {
        let mut tr = Trajectory::<f64>::with_capacity(2, 3, true);
        tr.seed = 42;
        tr.config_digest = "abc".into();
        tr.push(0.0, &[1.0, -2.0], Some(1));
        tr.push(0.1, &[std::f64::consts::PI, 1e-300], Some(0));
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &[("eta".into(), "0.5".into())]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines[0], "# seed=42");
        assert_eq!(lines[3], "# eta=0.5");
        assert_eq!(lines[4], "t,x_0,x_1,index");
        assert_eq!(lines[6], "1.0000000000000001e-1,3.1415926535897931e0,1.0000000000000000e-300,0");
        let back = Trajectory::<f64>::read_csv(&buf[..]).unwrap();
        assert_eq!(back, tr);
    }

    #[test]
    fn unswitched_paths_write_minus_one() {
        let mut tr = Trajectory::<f64>::with_capacity(1, 1, false);
        tr.push(0.0, &[0.5], None);
        let mut buf = Vec::new();
        tr.write_csv(&mut buf, &[]).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.ends_with("5.0000000000000000e-1,-1\n"));
        assert_eq!(Trajectory::<f64>::read_csv(&buf[..]).unwrap().index, None);
    }
}
