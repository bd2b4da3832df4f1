use std::io::{BufRead, Write};

use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;

/// Fraction of the computed integral that an estimated truncated tail may
/// reach before the quadrature refuses to answer.
const TAIL_GUARD_REL: f64 = 1e-4;

/// Radial data pair (u0, u1) = (u, d_t u) sampled on a grid.
#[derive(Debug, Clone, PartialEq)]
pub struct StatePair {
    dim: Dim,
    grid: RadialGrid,
    u0: Vec<f64>,
    u1: Vec<f64>,
}

impl StatePair {
    pub fn new(dim: Dim, grid: RadialGrid, u0: Vec<f64>, u1: Vec<f64>) -> Result<Self> {
        if u0.len() != grid.len() {
            return Err(Error::LengthMismatch {
                len: u0.len(),
                n: grid.len(),
            });
        }
        if u1.len() != grid.len() {
            return Err(Error::LengthMismatch {
                len: u1.len(),
                n: grid.len(),
            });
        }
        for (j, v) in u0.iter().chain(u1.iter()).enumerate() {
            if !v.is_finite() {
                return Err(Error::NonFinite {
                    index: j % grid.len(),
                });
            }
        }
        Ok(StatePair { dim, grid, u0, u1 })
    }

    pub fn zero(dim: Dim, grid: RadialGrid) -> Self {
        let n = grid.len();
        StatePair {
            dim,
            grid,
            u0: vec![0.0; n],
            u1: vec![0.0; n],
        }
    }

    pub fn from_fn(
        dim: Dim,
        grid: RadialGrid,
        fu0: impl Fn(f64) -> f64,
        fu1: impl Fn(f64) -> f64,
    ) -> Result<Self> {
        let u0: Vec<f64> = grid.nodes().map(&fu0).collect();
        let u1: Vec<f64> = grid.nodes().map(&fu1).collect();
        StatePair::new(dim, grid, u0, u1)
    }

    pub fn dim(&self) -> Dim {
        self.dim
    }

    pub fn grid(&self) -> &RadialGrid {
        &self.grid
    }

    pub fn u0(&self) -> &[f64] {
        &self.u0
    }

    pub fn u1(&self) -> &[f64] {
        &self.u1
    }

    pub fn sup_abs(&self) -> f64 {
        self.u0
            .iter()
            .chain(self.u1.iter())
            .fold(0.0f64, |m, v| m.max(v.abs()))
    }

    /// d_r u0 by centered differences; one-sided at the ends. On a grid that
    /// starts at the origin the radial parity of u forces d_r u0(0) = 0.
    pub fn du0(&self) -> Vec<f64> {
        let n = self.grid.len();
        let h = self.grid.h();
        let mut d = vec![0.0; n];
        for j in 1..n - 1 {
            d[j] = (self.u0[j + 1] - self.u0[j - 1]) / (2.0 * h);
        }
        if self.grid.starts_at_origin() {
            d[0] = 0.0;
        } else {
            d[0] = (self.u0[1] - self.u0[0]) / h;
        }
        d[n - 1] = (self.u0[n - 1] - self.u0[n - 2]) / h;
        d
    }

    /// Pointwise H-density [(d_r u0)^2 + u1^2] r^{N-1} at the nodes.
    pub fn h_density(&self) -> Vec<f64> {
        let du = self.du0();
        let nf = self.dim.nf();
        self.grid
            .nodes()
            .enumerate()
            .map(|(j, r)| (du[j] * du[j] + self.u1[j] * self.u1[j]) * r.powf(nf - 1.0))
            .collect()
    }

    /// The rescaled pair f_{(lambda)} = (l^{1-N/2} u0(./l), l^{-N/2} u1(./l))
    /// sampled on the scaled grid; exact at the sample level.
    pub fn rescaled(&self, lambda: f64) -> Result<StatePair> {
        let grid = self.grid.scaled(lambda)?;
        let n = self.dim.nf();
        let a0 = lambda.powf(1.0 - n / 2.0);
        let a1 = lambda.powf(-n / 2.0);
        StatePair::new(
            self.dim,
            grid,
            self.u0.iter().map(|v| a0 * v).collect(),
            self.u1.iter().map(|v| a1 * v).collect(),
        )
    }

    pub fn write_csv(&self, out: &mut dyn Write) -> std::io::Result<()> {
        writeln!(out, "r,u0,u1")?;
        for (j, r) in self.grid.nodes().enumerate() {
            writeln!(out, "{:.16e},{:.16e},{:.16e}", r, self.u0[j], self.u1[j])?;
        }
        Ok(())
    }

    pub fn read_csv(dim: Dim, input: &mut dyn BufRead) -> Result<Self> {
        let mut rows: Vec<(f64, f64, f64)> = Vec::new();
        for (lineno, line) in input.lines().enumerate() {
            let line = line.map_err(|e| Error::invalid(format!("read error: {e}")))?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') || (lineno == 0 && line.starts_with('r')) {
                continue;
            }
            let mut parts = line.split(',');
            let mut next = || -> Result<f64> {
                parts
                    .next()
                    .ok_or_else(|| Error::invalid(format!("line {}: missing field", lineno + 1)))?
                    .trim()
                    .parse::<f64>()
                    .map_err(|e| Error::invalid(format!("line {}: {e}", lineno + 1)))
            };
            rows.push((next()?, next()?, next()?));
        }
        if rows.len() < 2 {
            return Err(Error::invalid("CSV state needs at least 2 rows"));
        }
        let r0 = rows[0].0;
        let h = rows[1].0 - rows[0].0;
        for (j, row) in rows.iter().enumerate() {
            let expect = r0 + h * j as f64;
            if (row.0 - expect).abs() > 1e-9 * (1.0 + expect.abs()) {
                return Err(Error::BadGrid {
                    reason: format!("non-uniform radius column at row {}", j + 1),
                });
            }
        }
        let grid = RadialGrid::new(r0, h, rows.len())?;
        StatePair::new(
            dim,
            grid,
            rows.iter().map(|r| r.1).collect(),
            rows.iter().map(|r| r.2).collect(),
        )
    }
}

/// Trapezoid integral of node values w_j over [a, b] intersected with the
/// grid, with linear interpolation at the window ends.
pub fn window_integral(grid: &RadialGrid, w: &[f64], a: f64, b: f64) -> f64 {
    let lo = a.max(grid.r0());
    let hi = b.min(grid.last());
    if hi <= lo {
        return 0.0;
    }
    let h = grid.h();
    let at = |r: f64| -> f64 {
        let t = (r - grid.r0()) / h;
        let j = (t.floor() as usize).min(grid.len() - 2);
        let frac = t - j as f64;
        w[j] * (1.0 - frac) + w[j + 1] * frac
    };
    let j_lo = ((lo - grid.r0()) / h).ceil() as usize;
    let j_hi = ((hi - grid.r0()) / h).floor() as usize;
    if j_lo > j_hi {
        // window inside one cell
        return 0.5 * (at(lo) + at(hi)) * (hi - lo);
    }
    let r_lo = grid.node(j_lo);
    let r_hi = grid.node(j_hi.min(grid.len() - 1));
    let mut acc = 0.0;
    if lo < r_lo {
        acc += 0.5 * (at(lo) + w[j_lo]) * (r_lo - lo);
    }
    if j_hi > j_lo {
        acc += crate::quad::trapezoid(&w[j_lo..=j_hi], h);
    }
    if hi > r_hi {
        acc += 0.5 * (w[j_hi] + at(hi)) * (hi - r_hi);
    }
    acc
}

fn tail_guard(grid: &RadialGrid, density: &[f64], integral: f64) -> Result<()> {
    let d_end = density[density.len() - 1];
    let peak = density.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    // crude r^-2 continuation bound for the lost tail
    let tail = d_end.abs() * grid.last();
    let limit = TAIL_GUARD_REL * integral.abs() + 1e-13 * peak * grid.last();
    if tail > limit {
        return Err(Error::TailTruncation { tail, limit });
    }
    Ok(())
}

/// Squared exterior norm: int_R^inf [(d_r u0)^2 + u1^2] r^{N-1} dr by
/// composite trapezoid (reduced radial measure, no angular constant).
pub fn exterior_norm_sq(state: &StatePair, radius: f64) -> Result<f64> {
    let grid = state.grid();
    if radius < grid.r0() - 1e-12 || radius > grid.last() + 1e-12 {
        return Err(Error::OutsideGrid {
            r: radius,
            lo: grid.r0(),
            hi: grid.last(),
        });
    }
    let density = state.h_density();
    let val = window_integral(grid, &density, radius, grid.last());
    tail_guard(grid, &density, val)?;
    Ok(val)
}

/// Exterior H energy over the window [a, b] (no truncation guard; used by the
/// channel bookkeeping that supplies analytic tails beyond b).
pub fn window_energy(state: &StatePair, a: f64, b: f64) -> f64 {
    let density = state.h_density();
    window_integral(state.grid(), &density, a, b)
}

/// Conserved energy of the focusing critical equation, radial measure:
/// 1/2 int (|d_r u0|^2 + u1^2) r^{N-1} dr - (N-2)/(2N) int |u0|^{2N/(N-2)} r^{N-1} dr.
pub fn nonlinear_energy(state: &StatePair) -> Result<f64> {
    let grid = state.grid();
    let nf = state.dim().nf();
    let p = 2.0 * nf / (nf - 2.0);
    let kinetic = state.h_density();
    let potential: Vec<f64> = grid
        .nodes()
        .enumerate()
        .map(|(j, r)| state.u0()[j].abs().powf(p) * r.powf(nf - 1.0))
        .collect();
    let combined: Vec<f64> = kinetic
        .iter()
        .zip(potential.iter())
        .map(|(k, v)| k + v)
        .collect();
    let ik = window_integral(grid, &kinetic, grid.r0(), grid.last());
    let iv = window_integral(grid, &potential, grid.r0(), grid.last());
    tail_guard(grid, &combined, ik + iv)?;
    Ok(0.5 * ik - (nf - 2.0) / (2.0 * nf) * iv)
}

/// Discrete sup of r^{(N-2)/2} |u0(r)| over grid nodes with r >= R.
pub fn radial_sobolev_bound(state: &StatePair, radius: f64) -> f64 {
    let e = (state.dim().nf() - 2.0) / 2.0;
    state
        .grid()
        .nodes()
        .enumerate()
        .filter(|(_, r)| *r >= radius)
        .map(|(j, r)| r.powf(e) * state.u0()[j].abs())
        .fold(0.0f64, f64::max)
}
