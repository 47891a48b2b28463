use std::io::Write;

use super::Grid;
use crate::error::Result;

/// One period of a function of `(xi, t)`: `nt + 1` snapshots at
/// `t_k = t0 + k dt`, interior nodes only, linear interpolation in time.
#[derive(Debug, Clone, PartialEq)]
pub struct SpaceTimeField {
    grid: Grid,
    t0: f64,
    snapshots: Vec<Vec<f64>>,
    periodic: bool,
}

impl SpaceTimeField {
    pub fn new(grid: Grid, t0: f64, snapshots: Vec<Vec<f64>>, periodic: bool) -> Self {
        assert_eq!(snapshots.len(), grid.nt() + 1, "expected nt + 1 snapshots");
        assert!(snapshots.iter().all(|s| s.len() == grid.m()));
        Self {
            grid,
            t0,
            snapshots,
            periodic,
        }
    }

    pub fn zeros(grid: Grid) -> Self {
        let snapshots = vec![vec![0.0; grid.m()]; grid.nt() + 1];
        Self::new(grid, 0.0, snapshots, true)
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn t0(&self) -> f64 {
        self.t0
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn snapshots(&self) -> &[Vec<f64>] {
        &self.snapshots
    }

    pub fn snapshot(&self, k: usize) -> &[f64] {
        &self.snapshots[k]
    }

    pub fn time(&self, k: usize) -> f64 {
        self.t0 + k as f64 * self.grid.dt()
    }

    /// `||snapshot(nt) - snapshot(0)||_inf`.
    pub fn periodicity_defect(&self) -> f64 {
        sup_distance(&self.snapshots[0], &self.snapshots[self.grid.nt()])
    }

    /// Values at time `t`, taken modulo the period.
    pub fn sample_into(&self, t: f64, out: &mut [f64]) {
        let dt = self.grid.dt();
        let s = (t - self.t0).rem_euclid(self.grid.period()) / dt;
        let k = (s.floor() as usize).min(self.grid.nt());
        let frac = s - k as f64;
        if k == self.grid.nt() || frac == 0.0 {
            out.copy_from_slice(&self.snapshots[k]);
            return;
        }
        let (a, b) = (&self.snapshots[k], &self.snapshots[k + 1]);
        for ((o, x), y) in out.iter_mut().zip(a).zip(b) {
            *o = x + frac * (y - x);
        }
    }

    pub fn max(&self) -> f64 {
        self.values().fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn min(&self) -> f64 {
        self.values().fold(f64::INFINITY, f64::min)
    }

    /// Snapshots `0..nt` (the final one duplicates the first for periodic fields).
    pub fn period_snapshots(&self) -> &[Vec<f64>] {
        &self.snapshots[..self.grid.nt()]
    }

    fn values(&self) -> impl Iterator<Item = f64> + '_ {
        self.snapshots.iter().flatten().copied()
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> SpaceTimeField {
        let snapshots = self
            .snapshots
            .iter()
            .map(|s| s.iter().map(|&v| f(v)).collect())
            .collect();
        SpaceTimeField {
            snapshots,
            ..self.clone()
        }
    }

    /// CSV dump with header `t,xi,value`, boundary nodes included as zeros.
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "t,xi,value")?;
        let m = self.grid.m();
        for (k, snap) in self.snapshots.iter().enumerate() {
            let t = self.time(k);
            for i in 0..m + 2 {
                let value = if i == 0 || i == m + 1 {
                    0.0
                } else {
                    snap[i - 1]
                };
                writeln!(
                    out,
                    "{:.16e},{:.16e},{:.16e}",
                    t,
                    i as f64 * self.grid.h(),
                    value
                )?;
            }
        }
        Ok(())
    }
}

pub fn sup_norm(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |acc, x| acc.max(x.abs()))
}

pub fn sup_distance(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .fold(0.0f64, |acc, (x, y)| acc.max((x - y).abs()))
}
