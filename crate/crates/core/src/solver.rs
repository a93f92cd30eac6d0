//! Euler polygons for `ẋ ∈ F(x)` with sign-constrained velocity selection.
//!
//! On each mesh interval `[t_i, t_{i+1}]` the polygon moves with a constant
//! velocity `v^i ∈ F(x(t_i))`. `v^0` is chosen freely (by policy or override);
//! every later `v^i` is required to satisfy
//! `sign(v^{i-1}_j) · (v^i_j - v^{i-1}_j) ≥ 0`, which makes every coordinate and
//! every velocity sequence monotone.

use std::io::{Read, Write};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analyzer::{self, CoordinateMonotonicity};
use crate::error::{check_dim, Error, Result};
use crate::selector::{self, SelectionPolicy, SignPattern};
use crate::setmap::SetValuedMap;

/// A-priori bounds from linear growth `‖F(x)‖ ≤ A + B|x|`.
///
/// With `r(t) = |x(t)|` and speed at most `A + B(r + 1) + 1` (the growth
/// bound inflated by one unit in state and velocity), Gronwall gives
/// `L = |x₀|e^{BT} + (A+B+1)/B · (e^{BT} - 1)` for `B > 0`,
/// `L = |x₀| + (A+1)T` for `B = 0`, and `M = A + B + 1 + B·L`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthBounds {
    pub a: f64,
    pub b: f64,
    /// State bound.
    pub l: f64,
    /// Speed bound.
    pub m: f64,
    pub horizon: f64,
    pub x0_norm: f64,
}

pub fn gronwall_bounds(a: f64, b: f64, x0_norm: f64, horizon: f64) -> Result<GrowthBounds> {
    if !(a >= 0.0 && b >= 0.0 && x0_norm >= 0.0) {
        return Err(Error::InvalidArgument(format!(
            "growth constants and |x0| must be nonnegative (A={a}, B={b}, |x0|={x0_norm})"
        )));
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    let l = if b > 0.0 {
        let growth = (b * horizon).exp();
        x0_norm * growth + (a + b + 1.0) / b * (growth - 1.0)
    } else {
        x0_norm + (a + 1.0) * horizon
    };
    Ok(GrowthBounds {
        a,
        b,
        l,
        m: a + b + 1.0 + b * l,
        horizon,
        x0_norm,
    })
}

/// Smallest `N` with `(T/N)·M < 1`.
pub fn min_steps(bounds: &GrowthBounds) -> usize {
    let mut n = (bounds.horizon * bounds.m).floor() as usize + 1;
    while bounds.horizon / n as f64 * bounds.m >= 1.0 {
        n += 1;
    }
    n
}

pub fn euclidean_norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct EulerOptions {
    pub policy: SelectionPolicy,
    /// Explicit `v^0`; must lie in `F(x₀)`.
    pub v0: Option<Vec<f64>>,
    /// Skip the `hM < 1` check for maps with declared growth constants.
    pub allow_coarse_mesh: bool,
}

impl EulerOptions {
    pub fn new(policy: SelectionPolicy) -> Self {
        Self {
            policy,
            ..Self::default()
        }
    }

    pub fn with_v0(mut self, v0: Vec<f64>) -> Self {
        self.v0 = Some(v0);
        self
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    horizon: f64,
    steps: usize,
    step_size: f64,
    nodes: Vec<Vec<f64>>,
    velocities: Vec<Vec<f64>>,
    map: String,
    policy: SelectionPolicy,
}

impl Trajectory {
    pub fn horizon(&self) -> f64 {
        self.horizon
    }

    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn step_size(&self) -> f64 {
        self.step_size
    }

    pub fn dim(&self) -> usize {
        self.nodes[0].len()
    }

    /// `N + 1` states `x^N(t_i)`.
    pub fn nodes(&self) -> &[Vec<f64>] {
        &self.nodes
    }

    /// `N` velocities `v^i`, held on `[t_i, t_{i+1})`.
    pub fn velocities(&self) -> &[Vec<f64>] {
        &self.velocities
    }

    pub fn map_label(&self) -> &str {
        &self.map
    }

    pub fn policy(&self) -> &SelectionPolicy {
        &self.policy
    }

    pub fn terminal(&self) -> &[f64] {
        &self.nodes[self.steps]
    }

    /// Mesh time `t_i = iT/N` (exact at both ends).
    pub fn time(&self, i: usize) -> f64 {
        self.horizon * i as f64 / self.steps as f64
    }

    pub fn interpolate(&self, t: f64) -> Result<Vec<f64>> {
        if !(0.0..=self.horizon).contains(&t) {
            return Err(Error::InvalidArgument(format!("t = {t} outside [0, {}]", self.horizon)));
        }
        let mut i = ((t / self.horizon * self.steps as f64).floor() as usize).min(self.steps - 1);
        if t < self.time(i) {
            i -= 1;
        }
        if t == self.time(i) {
            return Ok(self.nodes[i].clone());
        }
        if t == self.time(i + 1) {
            return Ok(self.nodes[i + 1].clone());
        }
        let dt = t - self.time(i);
        Ok(self.nodes[i]
            .iter()
            .zip(&self.velocities[i])
            .map(|(x, v)| x + dt * v)
            .collect())
    }

    /// CSV with header `t,x_1..x_n,v_1..v_n`; row `i` holds `v^i`, the last
    /// row repeats `v^{N-1}`. Values use 17 significant digits.
    pub fn write_csv<W: Write>(&self, out: W) -> Result<()> {
        let n = self.dim();
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(out);
        let header = std::iter::once("t".to_string())
            .chain((1..=n).map(|j| format!("x_{j}")))
            .chain((1..=n).map(|j| format!("v_{j}")));
        w.write_record(header)?;
        for i in 0..=self.steps {
            let v = &self.velocities[i.min(self.steps - 1)];
            let row = std::iter::once(self.time(i))
                .chain(self.nodes[i].iter().copied())
                .chain(v.iter().copied())
                .map(|x| format!("{x:.16e}"));
            w.write_record(row)?;
        }
        w.flush()?;
        Ok(())
    }
}

/// Columns of a trajectory CSV file.
#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryTable {
    pub times: Vec<f64>,
    pub nodes: Vec<Vec<f64>>,
    pub velocities: Vec<Vec<f64>>,
}

pub fn read_trajectory_csv<R: Read>(input: R) -> Result<TrajectoryTable> {
    let mut r = csv::Reader::from_reader(input);
    let width = r.headers()?.len();
    if width < 3 || width % 2 == 0 {
        return Err(Error::InvalidArgument(format!(
            "unexpected trajectory CSV width {width}"
        )));
    }
    let n = (width - 1) / 2;
    let mut table = TrajectoryTable {
        times: Vec::new(),
        nodes: Vec::new(),
        velocities: Vec::new(),
    };
    for record in r.records() {
        let values = record?
            .iter()
            .map(|f| {
                f.trim()
                    .parse::<f64>()
                    .map_err(|e| Error::InvalidArgument(format!("bad CSV value `{f}`: {e}")))
            })
            .collect::<Result<Vec<_>>>()?;
        table.times.push(values[0]);
        table.nodes.push(values[1..=n].to_vec());
        table.velocities.push(values[n + 1..].to_vec());
    }
    Ok(table)
}

/// Mesh-size check against the map's declared growth constants.
fn check_mesh(map: &SetValuedMap, x0: &[f64], horizon: f64, steps: usize, allow_coarse: bool) -> Result<()> {
    match map.growth() {
        Some(g) => {
            let bounds = gronwall_bounds(g.a, g.b, euclidean_norm(x0), horizon)?;
            let required = min_steps(&bounds);
            if steps < required {
                if allow_coarse {
                    log::warn!("N = {steps} violates hM < 1 (needs N >= {required}); continuing");
                } else {
                    return Err(Error::MeshTooCoarse { steps, required });
                }
            }
        }
        None => log::warn!("map {map} declares no growth constants; hM < 1 not checked"),
    }
    Ok(())
}

pub fn euler_polygon(
    map: &SetValuedMap,
    x0: &[f64],
    horizon: f64,
    steps: usize,
    options: &EulerOptions,
) -> Result<Trajectory> {
    check_dim(map.dim(), x0.len())?;
    if let Some(v0) = &options.v0 {
        check_dim(map.dim(), v0.len())?;
    }
    if !(horizon > 0.0 && horizon.is_finite()) {
        return Err(Error::InvalidArgument(format!(
            "horizon must be positive, got {horizon}"
        )));
    }
    if steps == 0 {
        return Err(Error::InvalidArgument("N must be at least 1".into()));
    }
    check_mesh(map, x0, horizon, steps, options.allow_coarse_mesh)?;

    let h = horizon / steps as f64;
    let mut nodes = Vec::with_capacity(steps + 1);
    let mut velocities: Vec<Vec<f64>> = Vec::with_capacity(steps);
    nodes.push(x0.to_vec());
    for i in 0..steps {
        let x = &nodes[i];
        let image = map.evaluate(x)?;
        let v = match velocities.last() {
            None => selector::initial_velocity(&image, &options.policy, options.v0.as_deref())?,
            Some(prev) => {
                // displacement is h·prev, so its sign is the sign of prev
                let signs = SignPattern::of(prev);
                selector::select_velocity(&image, prev, &signs, &options.policy).map_err(|e| match e {
                    Error::WcmInfeasible(mut cert) => {
                        cert.step = Some(i);
                        cert.state = x.clone();
                        Error::WcmInfeasible(cert)
                    }
                    e => e,
                })?
            }
        };
        let next = x.iter().zip(&v).map(|(xj, vj)| xj + h * vj).collect();
        velocities.push(v);
        nodes.push(next);
    }
    Ok(Trajectory {
        horizon,
        steps,
        step_size: h,
        nodes,
        velocities,
        map: map.to_string(),
        policy: options.policy,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct LevelSummary {
    pub steps: usize,
    pub step_size: f64,
    pub terminal: Vec<f64>,
    pub max_node_residual: f64,
    pub max_interval_residual: f64,
    pub monotonicity: Vec<CoordinateMonotonicity>,
    /// Every coordinate satisfies the monotonicity invariants.
    pub monotone: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ConvergenceReport {
    pub map: String,
    pub x0: Vec<f64>,
    pub horizon: f64,
    pub policy: SelectionPolicy,
    pub v0: Option<Vec<f64>>,
    pub levels: Vec<LevelSummary>,
    /// `deltas[k]`: max over the grid of level `k` of `|x^{2N} - x^N|_∞`.
    pub deltas: Vec<f64>,
}

impl ConvergenceReport {
    /// `deltas[k+1] / deltas[k]`; `None` where the previous delta is 0.
    pub fn ratios(&self) -> Vec<Option<f64>> {
        self.deltas
            .windows(2)
            .map(|w| (w[0] > 0.0).then(|| w[1] / w[0]))
            .collect()
    }
}

/// Sup-norm difference of a polygon with `2N` steps against one with `N`
/// steps, on the coarse grid.
pub fn refinement_delta(coarse: &Trajectory, fine: &Trajectory) -> f64 {
    assert_eq!(fine.steps, 2 * coarse.steps, "fine level must double the steps");
    coarse
        .nodes
        .iter()
        .enumerate()
        .flat_map(|(i, xc)| xc.iter().zip(&fine.nodes[2 * i]).map(|(a, b)| (a - b).abs()))
        .fold(0.0, f64::max)
}

/// Runs `levels` polygons with `N = N₀, 2N₀, 4N₀, …` (`N₀` raised to the
/// minimal admissible step count when growth constants are declared) and
/// measures consecutive differences. Levels are independent and run in
/// parallel.
pub fn converge(
    map: &SetValuedMap,
    x0: &[f64],
    horizon: f64,
    n0: usize,
    levels: usize,
    options: &EulerOptions,
    samples_per_interval: usize,
) -> Result<(ConvergenceReport, Vec<Trajectory>)> {
    if levels < 2 {
        return Err(Error::InvalidArgument("levels must be at least 2".into()));
    }
    check_dim(map.dim(), x0.len())?;
    let mut start = n0.max(1);
    if let Some(g) = map.growth() {
        if !options.allow_coarse_mesh {
            start = start.max(min_steps(&gronwall_bounds(g.a, g.b, euclidean_norm(x0), horizon)?));
        }
    }
    let counts: Vec<usize> = (0..levels).map(|k| start << k).collect();
    let runs: Vec<Result<(Trajectory, LevelSummary)>> = counts
        .par_iter()
        .map(|&n| {
            let traj = euler_polygon(map, x0, horizon, n, options)?;
            let (node_res, interval_res) = analyzer::residual(&traj, map, samples_per_interval)?;
            let monotonicity = analyzer::check_trajectory_monotone(&traj);
            let summary = LevelSummary {
                steps: n,
                step_size: traj.step_size(),
                terminal: traj.terminal().to_vec(),
                max_node_residual: node_res,
                max_interval_residual: interval_res,
                monotone: monotonicity.iter().all(CoordinateMonotonicity::holds),
                monotonicity,
            };
            Ok((traj, summary))
        })
        .collect();
    let mut trajectories = Vec::with_capacity(levels);
    let mut summaries = Vec::with_capacity(levels);
    for (level, run) in runs.into_iter().enumerate() {
        match run {
            Ok((t, s)) => {
                trajectories.push(t);
                summaries.push(s);
            }
            Err(Error::WcmInfeasible(mut cert)) => {
                cert.level = Some(level);
                return Err(Error::WcmInfeasible(cert));
            }
            Err(e) => return Err(e),
        }
    }
    let deltas = trajectories
        .windows(2)
        .map(|w| refinement_delta(&w[0], &w[1]))
        .collect();
    Ok((
        ConvergenceReport {
            map: map.to_string(),
            x0: x0.to_vec(),
            horizon,
            policy: options.policy,
            v0: options.v0.clone(),
            levels: summaries,
            deltas,
        },
        trajectories,
    ))
}
