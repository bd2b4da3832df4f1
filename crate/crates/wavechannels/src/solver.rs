//! Leapfrog evolution of radial linear and focusing-critical nonlinear waves,
//! with cone-truncated nonlinearity and exterior-data runs on a canonical
//! interior extension.

use crate::data::RadialData;
use crate::dim::Dim;
use crate::error::{Error, Result};
use crate::grid::RadialGrid;
use crate::state::StatePair;

pub const BLOWUP_SUP: f64 = 1e6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Nonlinearity {
    Linear,
    Full,
    /// Focusing term multiplied by the sharp indicator of {r > r_cone + |t|}.
    Truncated { r_cone: f64 },
}

impl std::fmt::Display for Nonlinearity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Nonlinearity::Linear => write!(f, "linear"),
            Nonlinearity::Full => write!(f, "full"),
            Nonlinearity::Truncated { r_cone } => write!(f, "truncated({r_cone})"),
        }
    }
}

#[derive(Debug, Clone, Copy)]
pub struct SolveConfig {
    pub nonlinearity: Nonlinearity,
    /// dt = cfl * h; stability of the origin row needs roughly cfl <= 1/sqrt(N).
    pub cfl: f64,
    pub t_final: f64,
    pub r_max: f64,
    /// Store every k-th step (the initial and final states are always kept).
    pub snapshot_every: usize,
    /// Grid spacing for drivers that build their own grid (channel checks);
    /// plain evolve takes the grid from the initial state and ignores this.
    pub grid_h: Option<f64>,
}

impl SolveConfig {
    pub fn new(nonlinearity: Nonlinearity, dim: Dim, t_final: f64, r_max: f64) -> Self {
        SolveConfig {
            nonlinearity,
            cfl: default_cfl(dim),
            t_final,
            r_max,
            snapshot_every: 32,
            grid_h: None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.cfl > 0.0 && self.cfl <= 0.9) {
            return Err(Error::BadCfl { cfl: self.cfl });
        }
        if !(self.t_final > 0.0) || !self.t_final.is_finite() {
            return Err(Error::invalid(format!("bad t_final {}", self.t_final)));
        }
        if !(self.r_max > 0.0) || !self.r_max.is_finite() {
            return Err(Error::invalid(format!("bad r_max {}", self.r_max)));
        }
        if let Nonlinearity::Truncated { r_cone } = self.nonlinearity {
            if !(r_cone > 0.0) || !r_cone.is_finite() {
                return Err(Error::BadScale { value: r_cone });
            }
        }
        Ok(())
    }

    pub fn echo(&self, dim: Dim, h: f64, dt: f64) -> Vec<(String, String)> {
        vec![
            ("dim".into(), dim.n().to_string()),
            ("nonlinearity".into(), self.nonlinearity.to_string()),
            ("cfl".into(), format!("{}", self.cfl)),
            ("t_final".into(), format!("{}", self.t_final)),
            ("r_max".into(), format!("{}", self.r_max)),
            ("snapshot_every".into(), self.snapshot_every.to_string()),
            ("h".into(), format!("{h}")),
            ("dt".into(), format!("{dt}")),
        ]
    }
}

/// Measured stable ratios for the parity origin row; the row's 2N/h^2
/// coefficient tightens the usual one-dimensional bound as N grows.
pub fn default_cfl(dim: Dim) -> f64 {
    match dim.n() {
        3 => 0.45,
        5 => 0.40,
        7 => 0.33,
        _ => 0.30,
    }
}

/// Snapshots of a single run. Velocities are exact at t = 0 and centered
/// differences (u^{n+1} - u^{n-1}) / 2dt afterwards.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub dim: Dim,
    pub config: SolveConfig,
    pub dt: f64,
    pub times: Vec<f64>,
    pub states: Vec<StatePair>,
}

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    pub fn grid(&self) -> &RadialGrid {
        self.states[0].grid()
    }

    pub fn final_state(&self) -> &StatePair {
        self.states.last().expect("trajectory has snapshots")
    }

    pub fn final_time(&self) -> f64 {
        *self.times.last().expect("trajectory has snapshots")
    }

    /// Snapshot nearest to t.
    pub fn at_time(&self, t: f64) -> (f64, &StatePair) {
        let mut best = 0;
        let mut gap = f64::INFINITY;
        for (i, ti) in self.times.iter().enumerate() {
            if (ti - t).abs() < gap {
                gap = (ti - t).abs();
                best = i;
            }
        }
        (self.times[best], &self.states[best])
    }

    pub fn config_echo(&self) -> Vec<(String, String)> {
        self.config.echo(self.dim, self.grid().h(), self.dt)
    }
}

fn radial_laplacian(nf: f64, h: f64, u: &[f64], out: &mut [f64]) {
    let n = u.len();
    let h2 = h * h;
    out[0] = 2.0 * nf * (u[1] - u[0]) / h2;
    for j in 1..n - 1 {
        let r = h * j as f64;
        out[j] = (u[j + 1] - 2.0 * u[j] + u[j - 1]) / h2
            + (nf - 1.0) / r * (u[j + 1] - u[j - 1]) / (2.0 * h);
    }
    out[n - 1] = 0.0;
}

/// F(u) = |u|^{4/(N-2)} u, with the cone indicator for the truncated variant,
/// evaluated at nodes r_j and snapshot time t.
fn force(nl: Nonlinearity, dim: Dim, h: f64, t: f64, u: &[f64], out: &mut [f64]) {
    let n = dim.n();
    let pow = |v: f64| -> f64 {
        match n {
            3 => v * v * v * v * v,
            5 => {
                let w = v * v;
                (w * w).cbrt() * v
            }
            _ => {
                let w = v * v;
                (w * w).powf(1.0 / (dim.nf() - 2.0)) * v
            }
        }
    };
    match nl {
        Nonlinearity::Linear => out.fill(0.0),
        Nonlinearity::Full => {
            for (o, v) in out.iter_mut().zip(u.iter()) {
                *o = pow(*v);
            }
        }
        Nonlinearity::Truncated { r_cone } => {
            let edge = r_cone + t.abs();
            for (j, (o, v)) in out.iter_mut().zip(u.iter()).enumerate() {
                *o = if h * j as f64 > edge { pow(*v) } else { 0.0 };
            }
        }
    }
}

/// The frozen outer boundary is only faithful if the true solution is
/// constant there for the whole run. Two sufficient conditions, checked on
/// the window the boundary can influence: the data vanishes (compact
/// support), or it is initially stationary (u1 = 0 and Lu0 + F(u0) = 0, as
/// for ground states and harmonic tails).
fn boundary_guard(init: &StatePair, cfg: &SolveConfig) -> Result<()> {
    let grid = init.grid();
    let h = grid.h();
    let reach = cfg.t_final + 2.0 * h;
    let needed = grid.last();
    if reach >= needed {
        return Err(Error::GridTooShort {
            needed: reach,
            have: needed,
        });
    }
    let j_lo = grid.index_at_or_before(needed - reach);
    let scale = init.sup_abs().max(1e-300);
    let quiet = init.u0()[j_lo..]
        .iter()
        .chain(init.u1()[j_lo..].iter())
        .all(|v| v.abs() <= 1e-10 * scale);
    if quiet {
        return Ok(());
    }
    let still = init.u1()[j_lo..].iter().all(|v| v.abs() <= 1e-10 * scale);
    if still {
        let nf = init.dim().nf();
        let mut lap = vec![0.0; grid.len()];
        radial_laplacian(nf, h, init.u0(), &mut lap);
        let mut f = vec![0.0; grid.len()];
        force(cfg.nonlinearity, init.dim(), h, 0.0, init.u0(), &mut f);
        let tol = 1e-6 * scale / h;
        let stationary = (j_lo..grid.len() - 1).all(|j| (lap[j] + f[j]).abs() <= tol);
        if stationary {
            return Ok(());
        }
    }
    Err(Error::GridTooShort {
        needed: grid.last(),
        have: grid.last() - reach,
    })
}

fn run_leapfrog(init: &StatePair, cfg: &SolveConfig) -> Result<Trajectory> {
    cfg.validate()?;
    let grid = init.grid().clone();
    if !grid.starts_at_origin() {
        return Err(Error::BadGrid {
            reason: "evolution grid must start at r = 0".to_string(),
        });
    }
    if grid.last() + 1e-9 < cfg.r_max {
        return Err(Error::GridTooShort {
            needed: cfg.r_max,
            have: grid.last(),
        });
    }
    let dim = init.dim();
    let nf = dim.nf();
    let h = grid.h();
    let nsteps = (cfg.t_final / (cfg.cfl * h)).ceil().max(1.0) as usize;
    let dt = cfg.t_final / nsteps as f64;
    let every = cfg.snapshot_every.max(1);
    let nn = grid.len();
    let last = nn - 1;

    let mut traj = Trajectory {
        dim,
        config: *cfg,
        dt,
        times: Vec::new(),
        states: Vec::new(),
    };
    traj.times.push(0.0);
    traj.states.push(init.clone());

    let mut lap = vec![0.0; nn];
    let mut f = vec![0.0; nn];
    let mut u_prev = init.u0().to_vec();
    radial_laplacian(nf, h, &u_prev, &mut lap);
    force(cfg.nonlinearity, dim, h, 0.0, &u_prev, &mut f);
    let mut u_cur = vec![0.0; nn];
    for j in 0..last {
        u_cur[j] = u_prev[j] + dt * init.u1()[j] + 0.5 * dt * dt * (lap[j] + f[j]);
    }
    u_cur[last] = u_prev[last];

    let mut u_next = vec![0.0; nn];
    for n in 1..=nsteps {
        let t_n = dt * n as f64;
        radial_laplacian(nf, h, &u_cur, &mut lap);
        force(cfg.nonlinearity, dim, h, t_n, &u_cur, &mut f);
        for j in 0..last {
            u_next[j] = 2.0 * u_cur[j] - u_prev[j] + dt * dt * (lap[j] + f[j]);
        }
        u_next[last] = u_cur[last];
        let sup = u_next.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if !(sup <= BLOWUP_SUP) {
            return Err(Error::BlowUp {
                t: t_n + dt,
                partial: Box::new(traj),
            });
        }
        if n % every == 0 || n == nsteps {
            let v: Vec<f64> = u_next
                .iter()
                .zip(u_prev.iter())
                .map(|(a, b)| (a - b) / (2.0 * dt))
                .collect();
            traj.times.push(t_n);
            traj.states
                .push(StatePair::new(dim, grid.clone(), u_cur.clone(), v)?);
        }
        std::mem::swap(&mut u_prev, &mut u_cur);
        std::mem::swap(&mut u_cur, &mut u_next);
    }
    Ok(traj)
}

/// Evolve compactly supported (or boundary-stationary) data on a grid that
/// starts at the origin. The outer boundary is frozen; the guard rejects
/// data whose truth at the boundary would change during the run.
pub fn evolve(init: &StatePair, cfg: &SolveConfig) -> Result<Trajectory> {
    cfg.validate()?;
    boundary_guard(init, cfg)?;
    run_leapfrog(init, cfg)
}

/// Forward evolution of (u0, -u1): by time symmetry the snapshot at time t
/// equals (u(-t), -d_t u(-t)) of the original solution.
pub fn evolve_backward(init: &StatePair, cfg: &SolveConfig) -> Result<Trajectory> {
    let flipped = StatePair::new(
        init.dim(),
        init.grid().clone(),
        init.u0().to_vec(),
        init.u1().iter().map(|v| -v).collect(),
    )?;
    evolve(&flipped, cfg)
}

/// A run that is only claimed outside the influence cones of the fake
/// interior extension and of the frozen outer boundary. Numerical signals
/// move at most one cell per step (speed h/dt = 1/cfl), so the margins use
/// 1/cfl, making trusted-region values bitwise independent of the extension.
#[derive(Debug, Clone)]
pub struct ExteriorRun {
    pub traj: Trajectory,
    pub r_cone: f64,
}

impl ExteriorRun {
    /// Cells per unit time actually covered by the stencil: h/dt (dt can be
    /// smaller than cfl*h after rounding the step count up).
    fn stencil_speed(&self) -> f64 {
        self.traj.grid().h() / self.traj.dt
    }

    /// Everything at r > this radius is bitwise independent of the interior
    /// extension at time t.
    pub fn trusted_lo(&self, t: f64) -> f64 {
        let h = self.traj.grid().h();
        self.r_cone + t.abs() * self.stencil_speed() + 2.0 * h
    }

    /// Everything at r < this radius is unpolluted by the frozen boundary.
    pub fn usable_hi(&self, t: f64) -> f64 {
        let h = self.traj.grid().h();
        self.traj.grid().last() - t.abs() * self.stencil_speed() - 2.0 * h
    }
}

/// The canonical interior extension: outside r_cone the data itself; d_r u0
/// ramps linearly to 0 between r_cone and r_cone/2, u0 continues constant
/// below, u1 is zero inside.
pub fn canonical_extension(
    data: &RadialData,
    r_cone: f64,
    grid: &RadialGrid,
) -> Result<StatePair> {
    if !(r_cone > 0.0) || !r_cone.is_finite() {
        return Err(Error::BadScale { value: r_cone });
    }
    let u0_r = data.u0_at(r_cone);
    let du0_r = data.du0_at(r_cone);
    let u0 = |r: f64| -> f64 {
        if r >= r_cone {
            data.u0_at(r)
        } else if r >= 0.5 * r_cone {
            u0_r + du0_r * (r * r / r_cone - r)
        } else {
            u0_r - du0_r * r_cone / 4.0
        }
    };
    let u1 = |r: f64| -> f64 {
        if r >= r_cone {
            data.u1_at(r)
        } else {
            0.0
        }
    };
    StatePair::from_fn(data.dim(), grid.clone(), u0, u1)
}

/// Evolve exterior data r > r_cone after the canonical interior extension.
/// No boundary-quietness guard: validity is restricted to the window
/// (trusted_lo(t), usable_hi(t)) instead.
pub fn evolve_exterior(
    data: &RadialData,
    r_cone: f64,
    h: f64,
    cfg: &SolveConfig,
) -> Result<ExteriorRun> {
    cfg.validate()?;
    let grid = RadialGrid::origin_to(cfg.r_max, h)?;
    let init = canonical_extension(data, r_cone, &grid)?;
    let traj = run_leapfrog(&init, cfg)?;
    let run = ExteriorRun { traj, r_cone };
    let t = cfg.t_final;
    if run.usable_hi(t) <= run.trusted_lo(t) {
        return Err(Error::ConeExitsGrid {
            cone: run.trusted_lo(t),
            usable: run.usable_hi(t),
            t,
        });
    }
    Ok(run)
}

#[derive(Debug, Clone)]
pub struct OrderEstimate {
    pub order: f64,
    pub conclusive: bool,
    pub pair_orders: Vec<f64>,
    pub errors: Vec<f64>,
}

/// Observed convergence order by h-refinement: against an exact oracle
/// u(t_final, r) when given, otherwise by self-comparison of successive
/// refinements at shared nodes. Expected close to 2 for smooth data.
pub fn convergence_order(
    data: &RadialData,
    cfg: &SolveConfig,
    h0: f64,
    refinements: usize,
    oracle: Option<&dyn Fn(f64, f64) -> f64>,
) -> Result<OrderEstimate> {
    if refinements < 2 {
        return Err(Error::invalid("need at least 2 refinement levels"));
    }
    let mut finals: Vec<StatePair> = Vec::new();
    for i in 0..=refinements {
        let h = h0 / (1u64 << i) as f64;
        let grid = RadialGrid::origin_to(cfg.r_max, h)?;
        let init = data.sample_on(&grid)?;
        let traj = evolve(&init, cfg)?;
        finals.push(traj.final_state().clone());
    }
    let errors: Vec<f64> = if let Some(exact) = oracle {
        finals
            .iter()
            .map(|s| {
                s.grid()
                    .nodes()
                    .enumerate()
                    .map(|(j, r)| (s.u0()[j] - exact(cfg.t_final, r)).abs())
                    .fold(0.0f64, f64::max)
            })
            .collect()
    } else {
        finals
            .windows(2)
            .map(|w| {
                let (coarse, fine) = (&w[0], &w[1]);
                (0..coarse.grid().len())
                    .map(|j| (coarse.u0()[j] - fine.u0()[2 * j]).abs())
                    .fold(0.0f64, f64::max)
            })
            .collect()
    };
    let mut pair_orders = Vec::new();
    let mut conclusive = errors.iter().all(|e| e.is_finite() && *e > 0.0);
    for w in errors.windows(2) {
        if w[1] <= 0.0 || w[1] >= w[0] {
            conclusive = false;
            pair_orders.push(f64::NAN);
        } else {
            pair_orders.push((w[0] / w[1]).log2());
        }
    }
    let order = if conclusive {
        pair_orders.iter().sum::<f64>() / pair_orders.len() as f64
    } else {
        f64::NAN
    };
    Ok(OrderEstimate {
        order,
        conclusive,
        pair_orders,
        errors,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::soliton::Soliton;
    use crate::state::{nonlinear_energy, window_energy};

    fn d(n: u32) -> Dim {
        Dim::new(n).unwrap()
    }

    fn bump(center: f64, width: f64) -> impl Fn(f64) -> f64 + Send + Sync + Copy {
        move |r: f64| {
            let x = (r - center) / width;
            if x.abs() < 1.0 {
                (1.0 - 1.0 / (1.0 - x * x)).exp()
            } else {
                0.0
            }
        }
    }

    fn cfg(nl: Nonlinearity, dim: Dim, t_final: f64, r_max: f64) -> SolveConfig {
        SolveConfig::new(nl, dim, t_final, r_max)
    }

    #[test]
    fn zero_data_stays_zero() {
        let g = RadialGrid::origin_to(4.0, 1.0 / 64.0).unwrap();
        let init = StatePair::zero(d(3), g);
        let traj = evolve(&init, &cfg(Nonlinearity::Linear, d(3), 1.0, 4.0)).unwrap();
        for s in &traj.states {
            assert!(s.sup_abs() == 0.0);
        }
    }

    #[test]
    fn rejects_bad_cfl_and_short_grid() {
        let g = RadialGrid::origin_to(4.0, 1.0 / 64.0).unwrap();
        let init = StatePair::zero(d(3), g.clone());
        let mut c = cfg(Nonlinearity::Linear, d(3), 1.0, 4.0);
        c.cfl = 0.95;
        assert!(matches!(evolve(&init, &c), Err(Error::BadCfl { .. })));
        let c2 = cfg(Nonlinearity::Linear, d(3), 10.0, 4.0);
        assert!(matches!(
            evolve(&init, &c2),
            Err(Error::GridTooShort { .. })
        ));
    }

    #[test]
    fn guard_rejects_data_touching_the_boundary() {
        let g = RadialGrid::origin_to(4.0, 1.0 / 64.0).unwrap();
        let init = StatePair::from_fn(d(3), g, |_| 0.0, |r| (r * r) * 1e-3).unwrap();
        let c = cfg(Nonlinearity::Linear, d(3), 1.0, 4.0);
        assert!(matches!(evolve(&init, &c), Err(Error::GridTooShort { .. })));
    }

    #[test]
    fn linear_energy_drift_is_small() {
        for n in [3u32, 5] {
            let dim = d(n);
            let h = 1.0 / 256.0;
            let g = RadialGrid::origin_to(5.0, h).unwrap();
            let b = bump(1.5, 1.0);
            let init = StatePair::from_fn(dim, g, b, |_| 0.0).unwrap();
            let mut c = cfg(Nonlinearity::Linear, dim, 2.0, 5.0);
            c.snapshot_every = 64;
            let traj = evolve(&init, &c).unwrap();
            let e0 = window_energy(&traj.states[0], 0.0, 5.0);
            for s in &traj.states {
                let e = window_energy(s, 0.0, 5.0);
                assert!(
                    (e - e0).abs() <= 5e-3 * e0,
                    "N={n} drift {}",
                    (e - e0).abs() / e0
                );
            }
        }
    }

    #[test]
    fn nonlinear_energy_drift_is_small() {
        let dim = d(5);
        let h = 1.0 / 256.0;
        let g = RadialGrid::origin_to(5.0, h).unwrap();
        let b = bump(1.5, 1.0);
        let init = StatePair::from_fn(dim, g, move |r| 0.05 * b(r), |_| 0.0).unwrap();
        let mut c = cfg(Nonlinearity::Full, dim, 2.0, 5.0);
        c.snapshot_every = 64;
        let traj = evolve(&init, &c).unwrap();
        let e0 = nonlinear_energy(&traj.states[0]).unwrap();
        for s in &traj.states {
            // the focusing implosion spikes u1 near the origin (cheap in energy);
            // u0 staying small is what certifies the subcritical regime
            let sup0 = s.u0().iter().fold(0.0f64, |m, v| m.max(v.abs()));
            assert!(sup0 <= 1.0);
            let e = nonlinear_energy(s).unwrap();
            assert!(
                (e - e0).abs() <= 5e-3 * e0.abs(),
                "drift {}",
                (e - e0).abs() / e0.abs()
            );
        }
    }

    #[test]
    fn support_grows_at_most_at_unit_speed_plus_margin() {
        // the essential-support edge (cumulative tail energy above 1e-6 of total)
        // must stay inside the light cone plus a two-cell stencil margin
        let dim = d(3);
        let h = 1.0 / 128.0;
        let g = RadialGrid::origin_to(6.0, h).unwrap();
        let b = bump(1.0, 0.8);
        let init = StatePair::from_fn(dim, g, b, |_| 0.0).unwrap();
        let mut c = cfg(Nonlinearity::Linear, dim, 3.0, 6.0);
        c.snapshot_every = 32;
        let traj = evolve(&init, &c).unwrap();
        for (t, s) in traj.times.iter().zip(traj.states.iter()) {
            let dens = s.h_density();
            let total: f64 = dens.iter().sum();
            let mut acc = 0.0;
            let mut edge = 0.0;
            for j in (0..dens.len()).rev() {
                acc += dens[j];
                if acc > 1e-6 * total {
                    edge = s.grid().node(j);
                    break;
                }
            }
            assert!(edge <= 1.8 + t + 2.0 * h + 1e-12, "t={t} edge={edge}");
        }
    }

    #[test]
    fn ground_state_is_numerically_stationary() {
        let dim = d(5);
        let h = 1.0 / 128.0;
        let g = RadialGrid::origin_to(10.0, h).unwrap();
        let w = Soliton::ground(dim);
        let init = StatePair::from_fn(dim, g, |r| w.value(r), |_| 0.0).unwrap();
        let mut c = cfg(Nonlinearity::Full, dim, 0.5, 10.0);
        c.snapshot_every = 100;
        let traj = evolve(&init, &c).unwrap();
        let fin = traj.final_state();
        let gap = fin
            .grid()
            .nodes()
            .enumerate()
            .map(|(j, r)| (fin.u0()[j] - w.value(r)).abs())
            .fold(0.0f64, f64::max);
        assert!(gap < 2e-3, "gap={gap}");
    }

    #[test]
    fn large_data_aborts_with_blowup() {
        let dim = d(5);
        let g = RadialGrid::origin_to(6.0, 1.0 / 64.0).unwrap();
        let init = StatePair::from_fn(dim, g, |r| 2e3 * (-r * r).exp(), |_| 0.0).unwrap();
        let c = cfg(Nonlinearity::Full, dim, 2.0, 6.0);
        match evolve(&init, &c) {
            Err(Error::BlowUp { t, partial }) => {
                assert!(t > 0.0 && t < 2.0);
                assert!(!partial.is_empty());
            }
            other => panic!("expected blow-up, got {other:?}"),
        }
    }

    #[test]
    fn time_symmetry_round_trip() {
        let dim = d(3);
        let h = 1.0 / 256.0;
        let g = RadialGrid::origin_to(6.0, h).unwrap();
        let b = bump(1.2, 0.9);
        let init = StatePair::from_fn(dim, g, b, move |r| 0.5 * b(r)).unwrap();
        let mut c = cfg(Nonlinearity::Linear, dim, 1.0, 6.0);
        c.snapshot_every = 10_000;
        let fwd = evolve(&init, &c).unwrap();
        let end = fwd.final_state();
        let back = evolve_backward(end, &c).unwrap();
        let fin = back.final_state();
        let err0 = fin
            .u0()
            .iter()
            .zip(init.u0().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0f64, f64::max);
        let err1 = fin
            .u1()
            .iter()
            .zip(init.u1().iter())
            .map(|(a, b)| (a + b).abs())
            .fold(0.0f64, f64::max);
        assert!(err0 < 1e-4 && err1 < 1e-3, "err0={err0} err1={err1}");
    }

    #[test]
    fn harmonic_tail_is_static_in_trusted_region() {
        let dim = d(3);
        let data = crate::data::RadialData::from_power_pairs(
            dim,
            vec![crate::pspace::PowerPair::position(1.0, 1.0).unwrap()],
        )
        .unwrap();
        let c = cfg(Nonlinearity::Linear, dim, 2.0, 12.0);
        let run = evolve_exterior(&data, 1.0, 1.0 / 64.0, &c).unwrap();
        for (t, s) in run.traj.times.iter().zip(run.traj.states.iter()) {
            let lo = run.trusted_lo(*t);
            let hi = run.usable_hi(*t);
            for (j, r) in s.grid().nodes().enumerate() {
                if r > lo && r < hi {
                    assert!(
                        (s.u0()[j] - 1.0 / r).abs() < 1e-10,
                        "t={t} r={r} u={}",
                        s.u0()[j]
                    );
                }
            }
        }
    }

    #[test]
    fn trusted_region_is_extension_independent() {
        let dim = d(5);
        let basis = crate::pspace::build_basis(dim).unwrap();
        // position-type tail: the two interior extensions genuinely differ
        let data =
            crate::data::RadialData::from_power_pairs(dim, vec![*basis.element(2)]).unwrap();
        let h = 1.0 / 64.0;
        let c = cfg(Nonlinearity::Truncated { r_cone: 1.0 }, dim, 1.5, 10.0);
        let run_a = evolve_exterior(&data, 1.0, h, &c).unwrap();
        // alternative extension: zero everything inside the cone
        let grid = RadialGrid::origin_to(c.r_max, h).unwrap();
        let alt = StatePair::from_fn(
            dim,
            grid,
            |r| if r >= 1.0 { data.u0_at(r) } else { 0.0 },
            |r| if r >= 1.0 { data.u1_at(r) } else { 0.0 },
        )
        .unwrap();
        let traj_b = run_leapfrog(&alt, &c).unwrap();
        for (i, t) in run_a.traj.times.iter().enumerate() {
            let sa = &run_a.traj.states[i];
            let sb = &traj_b.states[i];
            let lo = run_a.trusted_lo(*t);
            let hi = run_a.usable_hi(*t);
            for (j, r) in sa.grid().nodes().enumerate() {
                if r > lo && r < hi {
                    assert!(
                        (sa.u0()[j] - sb.u0()[j]).abs() <= 1e-10,
                        "t={t} r={r}"
                    );
                }
            }
        }
    }

    #[test]
    fn convergence_order_needs_data() {
        let dim = d(3);
        let data = crate::data::RadialData::zero(dim);
        let c = cfg(Nonlinearity::Linear, dim, 0.5, 4.0);
        let est = convergence_order(&data, &c, 1.0 / 32.0, 2, None).unwrap();
        assert!(!est.conclusive);
        assert!(est.order.is_nan());
    }

    #[test]
    fn self_convergence_of_nonlinear_ground_state_run() {
        let dim = d(5);
        let data = crate::data::RadialData::soliton(Soliton::ground(dim));
        let mut c = cfg(Nonlinearity::Full, dim, 0.5, 8.0);
        c.snapshot_every = 10_000;
        let est = convergence_order(&data, &c, 1.0 / 32.0, 2, None).unwrap();
        assert!(est.conclusive, "errors: {:?}", est.errors);
        assert!(
            est.order > 1.8 && est.order < 2.2,
            "order {} errors {:?}",
            est.order,
            est.errors
        );
    }
}
