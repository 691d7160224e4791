//! Finite-difference solver for the PDE on a periodic grid, used as an
//! independent check of the characteristic solver.
//!
//! Each unknown obeys u_θ + V1·u_ρ = S(u). Advection uses the two-step
//! Lax–Wendroff (Richtmyer) scheme in nonconservative form; the source is
//! evaluated at the half step, which keeps the scheme second order.

use crate::characteristics::{CharacteristicTrace, Ensemble};
use crate::error::{Error, Result};
use crate::initial::InitialData;

pub const DEFAULT_CFL: f64 = 0.4;
pub const MAX_CFL: f64 = 0.5;
pub const MIN_COVERAGE: f64 = 0.99;

#[derive(Debug, Clone, PartialEq)]
pub struct Snapshot {
    pub theta: f64,
    pub p1: Vec<f64>,
    pub p2: Vec<f64>,
    pub e1: Vec<f64>,
}

impl Snapshot {
    pub fn len(&self) -> usize {
        self.p1.len()
    }

    pub fn is_empty(&self) -> bool {
        self.p1.is_empty()
    }

    fn max_speed(&self) -> f64 {
        self.p1
            .iter()
            .zip(&self.p2)
            .map(|(&a, &b)| (a / (1.0 + a * a + b * b).sqrt()).abs())
            .fold(0.0, f64::max)
    }
}

#[derive(Debug, Clone)]
pub struct GridSolution {
    pub length: f64,
    pub b0: f64,
    pub cfl: f64,
    pub snapshots: Vec<Snapshot>,
    pub steps: usize,
}

impl GridSolution {
    pub fn n(&self) -> usize {
        self.snapshots.first().map_or(0, Snapshot::len)
    }

    pub fn dx(&self) -> f64 {
        self.length / self.n() as f64
    }

    pub fn grid(&self) -> Vec<f64> {
        grid_points(self.length, self.n())
    }

    pub fn at(&self, theta: f64) -> Option<&Snapshot> {
        let tol = 1e-12 * theta.abs().max(1.0);
        self.snapshots.iter().find(|s| (s.theta - theta).abs() <= tol)
    }
}

pub fn grid_points(length: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| length * i as f64 / n as f64).collect()
}

fn check_n(n: usize) -> Result<()> {
    if n < 16 || !n.is_power_of_two() {
        return Err(Error::validation(format!("grid size {n} must be a power of two and at least 16")));
    }
    Ok(())
}

/// Samples the initial data on n points of [0, L).
pub fn initial_snapshot(data: &InitialData, n: usize) -> Result<Snapshot> {
    check_n(n)?;
    let rho = grid_points(data.domain_length, n);
    Ok(Snapshot {
        theta: 0.0,
        p1: rho.iter().map(|&r| data.p1.value(r)).collect(),
        p2: rho.iter().map(|&r| data.p2.value(r)).collect(),
        e1: rho.iter().map(|&r| data.e1.value(r)).collect(),
    })
}

#[inline]
fn source(p1: f64, p2: f64, e1: f64, b0: f64) -> (f64, [f64; 3]) {
    let g = (1.0 + p1 * p1 + p2 * p2).sqrt();
    let (v1, v2) = (p1 / g, p2 / g);
    (v1, [-e1 - b0 * v2, b0 * v1, v1])
}

/// One Richtmyer step of size `dt` on a grid of spacing `dx`.
pub fn step_grid(snap: &Snapshot, b0: f64, dx: f64, dt: f64) -> Result<Snapshot> {
    let n = snap.len();
    let courant = snap.max_speed() * dt / dx;
    if courant > MAX_CFL {
        return Err(Error::CflViolation { courant, limit: MAX_CFL });
    }
    let u = [&snap.p1, &snap.p2, &snap.e1];
    let r = dt / dx;

    // half step at the cell faces i + 1/2
    let mut half = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let j = (i + 1) % n;
        let avg = [0, 1, 2].map(|k| 0.5 * (u[k][i] + u[k][j]));
        let (v1, s) = source(avg[0], avg[1], avg[2], b0);
        for k in 0..3 {
            half[k][i] = avg[k] - 0.5 * r * v1 * (u[k][j] - u[k][i]) + 0.5 * dt * s[k];
        }
    }

    let mut next = [vec![0.0; n], vec![0.0; n], vec![0.0; n]];
    for i in 0..n {
        let im = (i + n - 1) % n;
        let mid = [0, 1, 2].map(|k| 0.5 * (half[k][i] + half[k][im]));
        let (v1, s) = source(mid[0], mid[1], mid[2], b0);
        for k in 0..3 {
            next[k][i] = u[k][i] - r * v1 * (half[k][i] - half[k][im]) + dt * s[k];
        }
    }
    let [p1, p2, e1] = next;
    Ok(Snapshot { theta: snap.theta + dt, p1, p2, e1 })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub n: usize,
    pub cfl: f64,
    pub max_dt: Option<f64>,
}

impl GridConfig {
    pub fn new(n: usize) -> Self {
        Self { n, cfl: DEFAULT_CFL, max_dt: None }
    }
}

/// Evolves the initial snapshot, keeping snapshots at each of `output_times`.
pub fn evolve(init: Snapshot, length: f64, b0: f64, config: &GridConfig, output_times: &[f64]) -> Result<GridSolution> {
    check_n(init.len())?;
    if !(config.cfl > 0.0 && config.cfl <= MAX_CFL) {
        return Err(Error::validation(format!("cfl = {} must lie in (0, {MAX_CFL}]", config.cfl)));
    }
    let dx = length / init.len() as f64;
    let mut times: Vec<f64> = output_times.iter().copied().filter(|&t| t > init.theta).collect();
    times.sort_by(f64::total_cmp);
    times.dedup();
    let mut sol = GridSolution { length, b0, cfl: config.cfl, snapshots: vec![init.clone()], steps: 0 };
    let mut cur = init;
    for &target in &times {
        while cur.theta < target {
            let speed = cur.max_speed();
            let mut dt = if speed > 0.0 { config.cfl * dx / speed } else { f64::INFINITY };
            if let Some(m) = config.max_dt {
                dt = dt.min(m);
            }
            if !dt.is_finite() {
                dt = config.cfl * dx;
            }
            let remaining = target - cur.theta;
            let last = dt >= remaining;
            if last {
                dt = remaining;
            }
            let mut next = step_grid(&cur, b0, dx, dt)?;
            if last {
                next.theta = target;
            }
            if !next.p1.iter().chain(&next.p2).chain(&next.e1).all(|v| v.is_finite()) {
                return Err(Error::validation(format!("grid solution is not finite at theta = {}", next.theta)));
            }
            cur = next;
            sol.steps += 1;
        }
        sol.snapshots.push(cur.clone());
    }
    Ok(sol)
}

/// N = 1 − ∂ρE1 with fourth-order centered differences.
pub fn density_field(e1: &[f64], dx: f64) -> Vec<f64> {
    let n = e1.len();
    (0..n)
        .map(|i| {
            let at = |k: isize| e1[(i as isize + k).rem_euclid(n as isize) as usize];
            1.0 - ((at(-2) - at(2)) + 8.0 * (at(1) - at(-1))) / (12.0 * dx)
        })
        .collect()
}

/// Piecewise cubic Hermite interpolant on a periodic set of nodes.
///
/// Nodal slopes are supplied; on intervals where the data are monotone they
/// are limited so the interpolant stays monotone there.
#[derive(Debug, Clone)]
pub struct PeriodicHermite {
    x: Vec<f64>,
    y: Vec<f64>,
    d: Vec<f64>,
    length: f64,
}

impl PeriodicHermite {
    pub fn new(x: Vec<f64>, y: Vec<f64>, mut d: Vec<f64>, length: f64) -> Self {
        let n = x.len();
        for i in 0..n {
            let j = (i + 1) % n;
            let h = if j == 0 { x[0] + length - x[i] } else { x[j] - x[i] };
            let delta = (y[j] - y[i]) / h;
            if delta == 0.0 {
                continue;
            }
            if d[i] * delta < 0.0 || d[j] * delta < 0.0 {
                continue; // not monotone in shape: keep the exact slopes
            }
            let (a, b) = (d[i] / delta, d[j] / delta);
            let s = a * a + b * b;
            if s > 9.0 {
                let t = 3.0 / s.sqrt();
                d[i] = t * a * delta;
                d[j] = t * b * delta;
            }
        }
        Self { x, y, d, length }
    }

    pub fn eval(&self, at: f64) -> f64 {
        let n = self.x.len();
        let p = (at - self.x[0]).rem_euclid(self.length) + self.x[0];
        let i = self.x.partition_point(|&v| v <= p).saturating_sub(1);
        let j = (i + 1) % n;
        let xj = if j == 0 { self.x[0] + self.length } else { self.x[j] };
        let h = xj - self.x[i];
        let t = (p - self.x[i]) / h;
        let (t2, t3) = (t * t, t * t * t);
        (2.0 * t3 - 3.0 * t2 + 1.0) * self.y[i]
            + (t3 - 2.0 * t2 + t) * h * self.d[i]
            + (-2.0 * t3 + 3.0 * t2) * self.y[j]
            + (t3 - t2) * h * self.d[j]
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossCheck {
    pub theta: f64,
    /// Max-norm discrepancy for P1, P2, E1.
    pub max_error: [f64; 3],
    /// Root-mean-square discrepancy for P1, P2, E1.
    pub l2_error: [f64; 3],
    pub coverage: f64,
    /// False once θ reaches the ensemble's breaking time.
    pub reliable: bool,
}

impl CrossCheck {
    pub fn max(&self) -> f64 {
        self.max_error.iter().copied().fold(0.0, f64::max)
    }
}

/// Compares a grid snapshot at θ with the characteristics' values at θ,
/// interpolated onto the grid.
pub fn cross_check(ensemble: &Ensemble, grid: &GridSolution, theta: f64) -> Result<CrossCheck> {
    let snap = grid.at(theta).ok_or_else(|| Error::validation(format!("no grid snapshot at theta = {theta}")))?;
    let traces: Vec<&CharacteristicTrace> = ensemble.ok_traces().collect();
    let report = compare(&traces, snap, grid.length, theta)?;
    let reliable = ensemble.min_breaking_time().map_or(true, |tb| theta < tb);
    Ok(CrossCheck { reliable, ..report })
}

fn compare(traces: &[&CharacteristicTrace], snap: &Snapshot, length: f64, theta: f64) -> Result<CrossCheck> {
    let mut nodes: Vec<[f64; 7]> = traces
        .iter()
        .filter_map(|t| t.sample_at(theta))
        .map(|s| {
            let (st, d) = (s.state, s.deriv);
            [st.rho.rem_euclid(length), st.p1, st.p2, st.e1, d.p1, d.p2, d.e]
        })
        .collect();
    if nodes.len() < 4 {
        return Err(Error::InsufficientCoverage { coverage: 0.0 });
    }
    nodes.sort_by(|a, b| a[0].total_cmp(&b[0]));
    nodes.dedup_by(|a, b| a[0] == b[0]);
    let gap = nodes
        .windows(2)
        .map(|w| w[1][0] - w[0][0])
        .chain(std::iter::once(nodes[0][0] + length - nodes[nodes.len() - 1][0]))
        .fold(0.0, f64::max);
    let coverage = 1.0 - gap / length;
    if coverage < MIN_COVERAGE {
        return Err(Error::InsufficientCoverage { coverage });
    }
    let x: Vec<f64> = nodes.iter().map(|v| v[0]).collect();
    let interp: Vec<PeriodicHermite> = (0..3)
        .map(|k| {
            PeriodicHermite::new(
                x.clone(),
                nodes.iter().map(|v| v[1 + k]).collect(),
                nodes.iter().map(|v| v[4 + k]).collect(),
                length,
            )
        })
        .collect();
    let rho = grid_points(length, snap.len());
    let fields = [&snap.p1, &snap.p2, &snap.e1];
    let mut max_error = [0.0; 3];
    let mut l2_error = [0.0; 3];
    for k in 0..3 {
        let mut sq = 0.0;
        for (i, &r) in rho.iter().enumerate() {
            let diff = (fields[k][i] - interp[k].eval(r)).abs();
            max_error[k] = f64::max(max_error[k], diff);
            sq += diff * diff;
        }
        l2_error[k] = (sq / rho.len() as f64).sqrt();
    }
    Ok(CrossCheck { theta, max_error, l2_error, coverage, reliable: true })
}
