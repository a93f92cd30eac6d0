//! Checks of map conditions and trajectory quality.
//!
//! Pair and cycle conditions are decided exactly per sample (box-union images
//! make the inner quantifiers finite), while the outer "for all x, y" is
//! sampled over `[-R, R]ⁿ` together with a structured battery of points at
//! and around the map's case splits. A `pass_sampled` verdict only means no
//! counterexample was found in the budget; every `fail` carries a
//! certificate that [`Certificate::verify`] re-checks from scratch.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::selector::{self, SignPattern};
use crate::setmap::{CompactSet, Growth, SetValuedMap};
use crate::solver::{euclidean_norm, Trajectory};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConditionName {
    Wcm,
    Monotone,
    Cyclic,
    Growth,
    ClosedGraph,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    PassSampled,
    Fail,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Certificate {
    /// `v ∈ F(x)` such that no `w ∈ F(y)` has `(x_j - y_j)(v_j - w_j) ≥ 0`
    /// for all `j`. `value` is `max_w min_j (x_j - y_j)(v_j - w_j) < 0`,
    /// attained in coordinate `coordinate` (1-based) of the best box.
    Wcm {
        x: Vec<f64>,
        y: Vec<f64>,
        v: Vec<f64>,
        coordinate: usize,
        value: f64,
    },
    /// `⟨x - y, v - w⟩ = value < 0` with `v ∈ F(x)`, `w ∈ F(y)`.
    Monotone {
        x: Vec<f64>,
        y: Vec<f64>,
        v: Vec<f64>,
        w: Vec<f64>,
        value: f64,
    },
    /// Cycle `points[0], …, points[L-1], points[0]` with `velocities[i] ∈ F(points[i])`
    /// and `Σ_i ⟨x_i - x_{i-1}, v_i⟩ = value < 0`.
    Cyclic {
        points: Vec<Vec<f64>>,
        velocities: Vec<Vec<f64>>,
        value: f64,
    },
    /// `‖F(x)‖ = norm > A + B|x| = bound`.
    Growth {
        x: Vec<f64>,
        norm: f64,
        bound: f64,
        excess: f64,
    },
    /// `vertex ∈ F(x + delta)` lies at `distance > eps` from `F(x)`.
    ClosedGraph {
        x: Vec<f64>,
        delta: Vec<f64>,
        vertex: Vec<f64>,
        distance: f64,
        eps: f64,
    },
}

impl Certificate {
    /// Re-evaluate the map and confirm the violation.
    pub fn verify(&self, map: &SetValuedMap) -> Result<bool> {
        Ok(match self {
            Certificate::Wcm { x, y, v, .. } => {
                map.evaluate(x)?.contains(v) && wcm_value(x, v, y, &map.evaluate(y)?).0 < 0.0
            }
            Certificate::Monotone { x, y, v, w, .. } => {
                map.evaluate(x)?.contains(v)
                    && map.evaluate(y)?.contains(w)
                    && dot_diff(x, y, v) - dot_diff(x, y, w)
                        < -ROUNDING * (dot_diff_abs(x, y, v) + dot_diff_abs(x, y, w))
            }
            Certificate::Cyclic { points, velocities, .. } => {
                let (mut sum, mut scale) = (0.0, 0.0);
                let len = points.len();
                for i in 1..=len {
                    let (cur, prev) = (&points[i % len], &points[i - 1]);
                    let v = &velocities[i % len];
                    if !map.evaluate(cur)?.contains(v) {
                        return Ok(false);
                    }
                    sum += dot_diff(cur, prev, v);
                    scale += dot_diff_abs(cur, prev, v);
                }
                sum < -ROUNDING * scale
            }
            Certificate::Growth { x, bound, .. } => map.evaluate(x)?.sup_norm() > *bound,
            Certificate::ClosedGraph {
                x, delta, vertex, eps, ..
            } => {
                let moved: Vec<f64> = x.iter().zip(delta).map(|(a, d)| a + d).collect();
                map.evaluate(&moved)?.contains(vertex) && map.evaluate(x)?.distance(vertex)? > *eps
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthEstimate {
    pub a: f64,
    pub b: f64,
    pub declared: Option<Growth>,
    /// `max(‖F(x)‖ - A - B|x|, 0)` over the samples, for declared constants.
    pub declared_violation: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub condition: ConditionName,
    pub verdict: Verdict,
    /// Samples examined (up to and including the first failure).
    pub samples: usize,
    pub seed: u64,
    pub radius: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub certificate: Option<Certificate>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub growth: Option<GrowthEstimate>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.verdict == Verdict::PassSampled
    }
}

fn dot_diff(x: &[f64], y: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(y).zip(v).map(|((a, b), c)| (a - b) * c).sum()
}

fn dot_diff_abs(x: &[f64], y: &[f64], v: &[f64]) -> f64 {
    x.iter().zip(y).zip(v).map(|((a, b), c)| ((a - b) * c).abs()).sum()
}

/// Relative size below which a negative inner-product sum is treated as
/// rounding noise around zero.
const ROUNDING: f64 = 1e-12;

fn random_point(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<f64> {
    (0..n).map(|_| rng.gen_range(-radius..=radius)).collect()
}

/// `max over boxes of F(y)` of `min_j max_{w_j} (x_j - y_j)(v_j - w_j)` and
/// the minimizing coordinate in the best box. Each term depends on one
/// coordinate only, so the inner maximum separates.
fn wcm_value(x: &[f64], v: &[f64], y: &[f64], fy: &CompactSet) -> (f64, usize) {
    let mut best = (f64::NEG_INFINITY, 0);
    for b in fy.boxes() {
        let mut worst = (f64::INFINITY, 0);
        for j in 0..x.len() {
            let d = x[j] - y[j];
            let w = if d > 0.0 { b.lo()[j] } else { b.hi()[j] };
            let term = d * (v[j] - w);
            if term < worst.0 {
                worst = (term, j);
            }
        }
        if worst.0 > best.0 {
            best = worst;
        }
    }
    best
}

/// Exact decision of the WCM inequality for one pair of images.
///
/// For each box of `F(x)` only the hardest corner needs checking: with
/// `s = sign(x - y)`, take `lo_j` where `s_j > 0`, `hi_j` where `s_j < 0`
/// (the midpoint where `s_j = 0`). Moving `v_j` away from that corner only
/// relaxes the constraint on `w_j`, and the corner itself is in the box.
pub fn check_wcm_images(x: &[f64], fx: &CompactSet, y: &[f64], fy: &CompactSet) -> Result<Option<Certificate>> {
    check_dim(fx.dim(), x.len())?;
    check_dim(fy.dim(), y.len())?;
    check_dim(x.len(), y.len())?;
    let signs = SignPattern::of_difference(x, y);
    for b in fx.boxes() {
        let corner: Vec<f64> = signs
            .as_slice()
            .iter()
            .enumerate()
            .map(|(j, s)| match s {
                1 => b.lo()[j],
                -1 => b.hi()[j],
                _ => 0.5 * (b.lo()[j] + b.hi()[j]),
            })
            .collect();
        // w must satisfy s_j (corner_j - w_j) >= 0, i.e. the negated sign
        // pattern constraint relative to the corner
        let reversed = SignPattern::of_difference(y, x);
        if selector::feasible_region(fy, &corner, &reversed, 0.0)?.is_none() {
            let (value, j) = wcm_value(x, &corner, y, fy);
            return Ok(Some(Certificate::Wcm {
                x: x.to_vec(),
                y: y.to_vec(),
                v: corner,
                coordinate: j + 1,
                value,
            }));
        }
    }
    Ok(None)
}

/// WCM for the pair `(x, y)`: `None` when every `v ∈ F(x)` has a partner.
pub fn check_wcm_pair(map: &SetValuedMap, x: &[f64], y: &[f64]) -> Result<Option<Certificate>> {
    check_dim(map.dim(), x.len())?;
    check_dim(map.dim(), y.len())?;
    check_wcm_images(x, &map.evaluate(x)?, y, &map.evaluate(y)?)
}

/// Minimum of `⟨x - y, v - w⟩` over `v ∈ F(x)`, `w ∈ F(y)`, with minimizers.
/// The form is linear in each argument, so vertices suffice.
pub fn monotone_pair(map: &SetValuedMap, x: &[f64], y: &[f64]) -> Result<(f64, Vec<f64>, Vec<f64>)> {
    check_dim(map.dim(), x.len())?;
    check_dim(map.dim(), y.len())?;
    let (v_term, v) = extreme_vertex(&map.evaluate(x)?, x, y, false)?;
    let (w_term, w) = extreme_vertex(&map.evaluate(y)?, x, y, true)?;
    Ok((v_term - w_term, v, w))
}

/// `min` (or `max`) of `⟨x - y, u⟩` over vertices `u` of `set`.
fn extreme_vertex(set: &CompactSet, x: &[f64], y: &[f64], maximize: bool) -> Result<(f64, Vec<f64>)> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for u in set.vertices()? {
        let val = dot_diff(x, y, &u);
        let better = match &best {
            None => true,
            Some((b, _)) => {
                if maximize {
                    val > *b
                } else {
                    val < *b
                }
            }
        };
        if better {
            best = Some((val, u));
        }
    }
    Ok(best.expect("nonempty image"))
}

/// Minimum over velocity choices of `Σ_{i=1}^{L} ⟨x_i - x_{i-1}, v_i⟩` for the
/// closed cycle through `points` (`x_L = x_0`), with the minimizing velocities
/// indexed like `points`.
pub fn cyclic_sum_min(map: &SetValuedMap, points: &[Vec<f64>]) -> Result<(f64, Vec<Vec<f64>>)> {
    if points.len() < 2 {
        return Err(Error::InvalidArgument("a cycle needs at least 2 points".into()));
    }
    let len = points.len();
    let mut velocities = vec![Vec::new(); len];
    let mut sum = 0.0;
    for i in 1..=len {
        let (cur, prev) = (&points[i % len], &points[i - 1]);
        check_dim(map.dim(), cur.len())?;
        let (term, v) = extreme_vertex(&map.evaluate(cur)?, cur, prev, false)?;
        sum += term;
        velocities[i % len] = v;
    }
    Ok((sum, velocities))
}

/// Points at, just below and just above every case split of every variable,
/// with the remaining coordinates from a seeded base point.
fn boundary_points(map: &SetValuedMap, radius: f64, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = map.dim();
    let bases = [vec![0.0; n], random_point(rng, n, radius)];
    let mut out = Vec::new();
    for (j, bps) in map.breakpoints().iter().enumerate() {
        for &b in bps.iter().filter(|b| b.abs() <= radius) {
            let eps = 1e-3 * b.abs().max(1.0);
            for v in [b, b - eps, b + eps, b - radius / 2.0, b + radius / 2.0] {
                for base in &bases {
                    let mut p = base.clone();
                    p[j] = v.clamp(-radius, radius);
                    out.push(p);
                }
            }
        }
    }
    out.push(vec![0.0; n]);
    out.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .map(|(x, y)| x.total_cmp(y))
            .find(|o| o.is_ne())
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    out.dedup();
    out.truncate(64);
    out
}

/// Deterministic pair battery followed by `count` uniform random pairs.
fn sample_pairs(map: &SetValuedMap, radius: f64, count: usize, seed: u64) -> Vec<(Vec<f64>, Vec<f64>)> {
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary = boundary_points(map, radius, &mut rng);
    let mut pairs = Vec::new();
    for x in &boundary {
        for y in &boundary {
            if x != y {
                pairs.push((x.clone(), y.clone()));
            }
        }
    }
    // axis-aligned pairs
    for j in 0..n {
        for _ in 0..4 {
            let x = random_point(&mut rng, n, radius);
            let mut y = x.clone();
            y[j] = rng.gen_range(-radius..=radius);
            pairs.push((x, y));
        }
    }
    for _ in 0..count {
        let x = random_point(&mut rng, n, radius);
        let y = random_point(&mut rng, n, radius);
        pairs.push((x, y));
    }
    pairs
}

fn validate_sampling(radius: f64, count: usize) -> Result<()> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    if count == 0 {
        return Err(Error::InvalidArgument("sample count must be at least 1".into()));
    }
    Ok(())
}

/// Runs `test` over `items` in parallel and reports the lowest-index failure.
fn first_failure<T, F>(items: &[T], test: F) -> Result<(usize, Option<Certificate>)>
where
    T: Sync,
    F: Fn(&T) -> Result<Option<Certificate>> + Sync,
{
    let hit = items
        .par_iter()
        .enumerate()
        .map(|(i, item)| (i, test(item)))
        .find_first(|(_, r)| !matches!(r, Ok(None)));
    match hit {
        None => Ok((items.len(), None)),
        Some((_, Err(e))) => Err(e),
        Some((i, Ok(cert))) => Ok((i + 1, cert)),
    }
}

fn report(
    condition: ConditionName,
    samples: usize,
    seed: u64,
    radius: f64,
    certificate: Option<Certificate>,
) -> CheckReport {
    CheckReport {
        condition,
        verdict: if certificate.is_some() {
            Verdict::Fail
        } else {
            Verdict::PassSampled
        },
        samples,
        seed,
        radius,
        certificate,
        growth: None,
    }
}

/// Sampled check of the weak componentwise monotonicity condition.
pub fn check_wcm(map: &SetValuedMap, radius: f64, count: usize, seed: u64) -> Result<CheckReport> {
    validate_sampling(radius, count)?;
    let pairs = sample_pairs(map, radius, count, seed);
    let (samples, cert) = first_failure(&pairs, |(x, y)| check_wcm_pair(map, x, y))?;
    Ok(report(ConditionName::Wcm, samples, seed, radius, cert))
}

/// Sampled search for `⟨x - y, v - w⟩ < 0`.
pub fn find_monotonicity_violation(map: &SetValuedMap, radius: f64, count: usize, seed: u64) -> Result<CheckReport> {
    validate_sampling(radius, count)?;
    let pairs = sample_pairs(map, radius, count, seed);
    let (samples, cert) = first_failure(&pairs, |(x, y)| {
        let (value, v, w) = monotone_pair(map, x, y)?;
        let scale = dot_diff_abs(x, y, &v) + dot_diff_abs(x, y, &w);
        Ok((value < -ROUNDING * scale).then(|| Certificate::Monotone {
            x: x.clone(),
            y: y.clone(),
            v,
            w,
            value,
        }))
    })?;
    Ok(report(ConditionName::Monotone, samples, seed, radius, cert))
}

/// Sampled search for a cycle with negative sum.
pub fn find_cyclic_violation(
    map: &SetValuedMap,
    radius: f64,
    cycle_len: usize,
    count: usize,
    seed: u64,
) -> Result<CheckReport> {
    validate_sampling(radius, count)?;
    if cycle_len < 2 {
        return Err(Error::InvalidArgument("cycle length must be at least 2".into()));
    }
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let boundary = boundary_points(map, radius, &mut rng);
    let mut cycles: Vec<Vec<Vec<f64>>> = Vec::new();
    for i in 0..boundary.len() {
        for k in 1..boundary.len() {
            let cycle: Vec<_> = (0..cycle_len)
                .map(|m| boundary[(i + m * k) % boundary.len()].clone())
                .collect();
            cycles.push(cycle);
        }
    }
    for _ in 0..count {
        cycles.push((0..cycle_len).map(|_| random_point(&mut rng, n, radius)).collect());
    }
    let (samples, cert) = first_failure(&cycles, |points| {
        let (value, velocities) = cyclic_sum_min(map, points)?;
        let len = points.len();
        let scale: f64 = (1..=len)
            .map(|i| dot_diff_abs(&points[i % len], &points[i - 1], &velocities[i % len]))
            .sum();
        Ok((value < -ROUNDING * scale).then(|| Certificate::Cyclic {
            points: points.clone(),
            velocities,
            value,
        }))
    })?;
    Ok(report(ConditionName::Cyclic, samples, seed, radius, cert))
}

/// Conservative linear-growth fit over sampled points.
///
/// `B` is the largest nonnegative slope of the radial upper envelope of
/// `‖F(x)‖` (taken over 32 radial bins); `A` is then the smallest constant
/// making `A + B|x|` majorize every sample.
pub fn estimate_growth(
    map: &SetValuedMap,
    radius: f64,
    count: usize,
    seed: u64,
) -> Result<(GrowthEstimate, Option<Certificate>, usize)> {
    validate_sampling(radius, count)?;
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut points = boundary_points(map, radius, &mut rng);
    points.extend((0..count).map(|_| random_point(&mut rng, n, radius)));
    let samples: Vec<(f64, f64)> = points
        .par_iter()
        .map(|x| Ok((euclidean_norm(x), map.evaluate(x)?.sup_norm())))
        .collect::<Result<_>>()?;

    const BINS: usize = 32;
    let r_max = samples.iter().map(|s| s.0).fold(0.0, f64::max);
    let mut envelope: Vec<Option<(f64, f64)>> = vec![None; BINS];
    for &(r, norm) in &samples {
        let k = if r_max > 0.0 {
            ((r / r_max * BINS as f64) as usize).min(BINS - 1)
        } else {
            0
        };
        let slot = envelope[k].get_or_insert((r, norm));
        if norm > slot.1 {
            *slot = (r, norm);
        }
    }
    let env: Vec<(f64, f64)> = envelope.into_iter().flatten().collect();
    let mut b = 0.0f64;
    for i in 0..env.len() {
        for j in i + 1..env.len() {
            let dr = env[j].0 - env[i].0;
            if dr > 0.0 {
                b = b.max((env[j].1 - env[i].1) / dr);
            }
        }
    }
    let a = samples.iter().map(|(r, norm)| norm - b * r).fold(0.0, f64::max);

    let declared = map.growth();
    let mut worst: Option<(usize, f64)> = None;
    if let Some(g) = declared {
        for (i, &(r, norm)) in samples.iter().enumerate() {
            let excess = norm - (g.a + g.b * r);
            if excess > 0.0 && worst.is_none_or(|(_, e)| excess > e) {
                worst = Some((i, excess));
            }
        }
    }
    let cert = match (declared, worst) {
        (Some(g), Some((i, excess))) => Some(Certificate::Growth {
            x: points[i].clone(),
            norm: samples[i].1,
            bound: g.a + g.b * samples[i].0,
            excess,
        }),
        _ => None,
    };
    let estimate = GrowthEstimate {
        a,
        b,
        declared,
        declared_violation: declared.map(|_| worst.map_or(0.0, |w| w.1)),
    };
    Ok((estimate, cert, samples.len()))
}

pub fn check_growth(map: &SetValuedMap, radius: f64, count: usize, seed: u64) -> Result<CheckReport> {
    let (estimate, cert, samples) = estimate_growth(map, radius, count, seed)?;
    let mut r = report(ConditionName::Growth, samples, seed, radius, cert);
    r.growth = Some(estimate);
    Ok(r)
}

/// Perturbation scales; the verdict uses the two smallest.
const GRAPH_SCALES: [f64; 3] = [1e-3, 1e-6, 1e-9];

/// Sampled closed-graph heuristic: a point is suspect when, along some
/// direction, `F(x + δ)` has a vertex farther than `eps` from `F(x)` at both
/// of the two smallest perturbation scales.
pub fn check_closed_graph(map: &SetValuedMap, radius: f64, count: usize, seed: u64, eps: f64) -> Result<CheckReport> {
    validate_sampling(radius, count)?;
    if eps.is_nan() || eps <= 0.0 {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let n = map.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut jobs: Vec<(Vec<f64>, Vec<Vec<f64>>)> = Vec::new();
    let directions = |rng: &mut ChaCha8Rng| {
        let mut d = Vec::new();
        for j in 0..n {
            for s in [1.0, -1.0] {
                let mut e = vec![0.0; n];
                e[j] = s;
                d.push(e);
            }
        }
        if n > 1 {
            for _ in 0..2 {
                let u = random_point(rng, n, 1.0);
                let norm = euclidean_norm(&u);
                if norm > 0.0 {
                    d.push(u.iter().map(|c| c / norm).collect());
                }
            }
        }
        d
    };
    for x in boundary_points(map, radius, &mut rng) {
        let d = directions(&mut rng);
        jobs.push((x, d));
    }
    for _ in 0..count {
        let x = random_point(&mut rng, n, radius);
        let d = directions(&mut rng);
        jobs.push((x, d));
    }
    let (samples, cert) = first_failure(&jobs, |(x, dirs)| {
        let fx = map.evaluate(x)?;
        for dir in dirs {
            let mut worst: Vec<(f64, Vec<f64>, Vec<f64>)> = Vec::new();
            for scale in &GRAPH_SCALES[1..] {
                let delta: Vec<f64> = dir.iter().map(|d| d * scale).collect();
                let moved: Vec<f64> = x.iter().zip(&delta).map(|(a, b)| a + b).collect();
                let mut far = (0.0, Vec::new());
                for vert in map.evaluate(&moved)?.vertices()? {
                    let dist = fx.distance(&vert)?;
                    if dist > far.0 || far.1.is_empty() {
                        far = (dist, vert);
                    }
                }
                worst.push((far.0, far.1, delta));
            }
            if worst.iter().all(|w| w.0 > eps) {
                let (distance, vertex, delta) = worst.pop().expect("two scales");
                return Ok(Some(Certificate::ClosedGraph {
                    x: x.clone(),
                    delta,
                    vertex,
                    distance,
                    eps,
                }));
            }
        }
        Ok(None)
    })?;
    Ok(report(ConditionName::ClosedGraph, samples, seed, radius, cert))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MonotoneClass {
    IdenticallyZero,
    Increasing,
    Decreasing,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CoordinateMonotonicity {
    /// 1-based coordinate.
    pub coordinate: usize,
    /// Classified by the sign of the first nonzero velocity.
    pub class: MonotoneClass,
    /// No velocity after the first nonzero one has the opposite sign (or is 0).
    pub sign_stable: bool,
    /// Velocities nondecreasing (increasing class) or nonincreasing (decreasing).
    pub velocity_monotone: bool,
    /// Nodes monotone in the same direction, constant before the first move.
    pub nodes_monotone: bool,
}

impl CoordinateMonotonicity {
    pub fn holds(&self) -> bool {
        self.sign_stable && self.velocity_monotone && self.nodes_monotone
    }
}

/// Exact (tolerance 0) monotonicity classification of each coordinate.
pub fn check_trajectory_monotone(traj: &Trajectory) -> Vec<CoordinateMonotonicity> {
    let (nodes, vels) = (traj.nodes(), traj.velocities());
    (0..traj.dim())
        .map(|j| {
            let first = vels.iter().position(|v| v[j] != 0.0);
            let Some(k) = first else {
                return CoordinateMonotonicity {
                    coordinate: j + 1,
                    class: MonotoneClass::IdenticallyZero,
                    sign_stable: true,
                    velocity_monotone: true,
                    nodes_monotone: nodes.windows(2).all(|w| w[0][j] == w[1][j]),
                };
            };
            let up = vels[k][j] > 0.0;
            let tail = &vels[k..];
            let sign_stable = tail.iter().all(|v| if up { v[j] > 0.0 } else { v[j] < 0.0 });
            let velocity_monotone = tail
                .windows(2)
                .all(|w| if up { w[1][j] >= w[0][j] } else { w[1][j] <= w[0][j] });
            let flat = nodes[..=k].windows(2).all(|w| w[0][j] == w[1][j]);
            let moving = nodes[k..]
                .windows(2)
                .all(|w| if up { w[1][j] >= w[0][j] } else { w[1][j] <= w[0][j] });
            CoordinateMonotonicity {
                coordinate: j + 1,
                class: if up {
                    MonotoneClass::Increasing
                } else {
                    MonotoneClass::Decreasing
                },
                sign_stable,
                velocity_monotone,
                nodes_monotone: flat && moving,
            }
        })
        .collect()
}

/// `(max_i dist(F(x(t_i)), v^i), max over sampled interior t of dist(F(x(t)), v^i))`.
pub fn residual(traj: &Trajectory, map: &SetValuedMap, samples_per_interval: usize) -> Result<(f64, f64)> {
    if samples_per_interval == 0 {
        return Err(Error::InvalidArgument("samples_per_interval must be at least 1".into()));
    }
    let h = traj.step_size();
    let per_step: Vec<(f64, f64)> = (0..traj.steps())
        .into_par_iter()
        .map(|i| {
            let v = &traj.velocities()[i];
            let x = &traj.nodes()[i];
            let node = map.evaluate(x)?.distance(v)?;
            let mut interval = 0.0f64;
            for k in 1..=samples_per_interval {
                let dt = h * k as f64 / (samples_per_interval + 1) as f64;
                let xt: Vec<f64> = x.iter().zip(v).map(|(a, b)| a + dt * b).collect();
                interval = interval.max(map.evaluate(&xt)?.distance(v)?);
            }
            Ok((node, interval))
        })
        .collect::<Result<_>>()?;
    Ok(per_step
        .into_iter()
        .fold((0.0, 0.0), |acc, (a, b)| (acc.0.max(a), acc.1.max(b))))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::mapdsl::parse_map;
    use crate::selector::SelectionPolicy;
    use crate::setmap::Builtin;
    use crate::solver::{euler_polygon, EulerOptions};

    fn map(b: Builtin) -> SetValuedMap {
        SetValuedMap::builtin(b).unwrap()
    }

    #[test]
    fn wcm_pair_examples() {
        assert!(check_wcm_pair(&map(Builtin::Example1), &[-1.0], &[1.0])
            .unwrap()
            .is_none());
        let ng = map(Builtin::NormGrad { n: 2, k: 4 });
        let cert = check_wcm_pair(&ng, &[1.0, 3.0], &[0.9, 0.0]).unwrap().expect("fails");
        match &cert {
            Certificate::Wcm {
                v, coordinate, value, ..
            } => {
                let s = 10f64.sqrt();
                assert!((v[0] - 1.0 / s).abs() < 1e-15 && (v[1] - 3.0 / s).abs() < 1e-15);
                assert_eq!(*coordinate, 1);
                assert!((value - 0.1 * (1.0 / s - 1.0)).abs() < 1e-12);
            }
            c => panic!("{c:?}"),
        }
        assert!(cert.verify(&ng).unwrap());
        for b in [Builtin::Example1, Builtin::Antisign, Builtin::NormGrad { n: 2, k: 4 }] {
            assert!(check_wcm_pair(&map(b), &vec![0.3; b.dim()], &vec![0.3; b.dim()])
                .unwrap()
                .is_none());
        }
    }

    #[test]
    fn monotone_pair_example1() {
        let (value, v, w) = monotone_pair(&map(Builtin::Example1), &[-1.0], &[0.0]).unwrap();
        assert_eq!((value, v, w), (-1.0, vec![0.0], vec![-1.0]));
    }

    #[test]
    fn cyclic_example1() {
        let (value, vs) = cyclic_sum_min(&map(Builtin::Example1), &[vec![-1.0], vec![0.0]]).unwrap();
        assert_eq!(value, -1.0);
        assert_eq!(vs, vec![vec![0.0], vec![-1.0]]);
        let c = SetValuedMap::constant(&CompactSet::points(&[vec![2.5]]).unwrap());
        let r = find_cyclic_violation(&c, 5.0, 3, 500, 1).unwrap();
        assert!(r.passed());
    }

    #[test]
    fn constant_map_monotone() {
        let c = SetValuedMap::constant(&CompactSet::points(&[vec![1.0, -2.0]]).unwrap());
        assert!(find_monotonicity_violation(&c, 5.0, 1000, 3).unwrap().passed());
    }

    #[test]
    fn growth_examples() {
        let (est, cert, _) = estimate_growth(&map(Builtin::Example1), 10.0, 2000, 1).unwrap();
        assert_eq!((est.a, est.b), (1.0, 0.0));
        assert_eq!(est.declared_violation, Some(0.0));
        assert!(cert.is_none());
        let (est, _, _) = estimate_growth(&map(Builtin::Example2F), 10.0, 2000, 1).unwrap();
        assert_eq!(est.declared_violation, Some(0.0));
        let zero = SetValuedMap::constant(&CompactSet::points(&[vec![0.0]]).unwrap());
        let (est, _, _) = estimate_growth(&zero, 10.0, 500, 1).unwrap();
        assert_eq!((est.a, est.b), (0.0, 0.0));

        let understated = map(Builtin::Example2F).with_growth(Some(Growth { a: 1.0, b: 0.5 }));
        let r = check_growth(&understated, 10.0, 500, 1).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        assert!(r.certificate.unwrap().verify(&understated).unwrap());
    }

    #[test]
    fn closed_graph_examples() {
        assert!(check_closed_graph(&map(Builtin::Example1), 5.0, 500, 2, 1e-3)
            .unwrap()
            .passed());
        let broken = parse_map(
            r#"{"dim":1,"pieces":[
                {"region":[{"var":1,"op":"le","bound":0}],"image":[[["-1","0"]]]},
                {"region":[{"var":1,"op":"gt","bound":0}],"image":[[["-1","1"]]]}]}"#,
        )
        .unwrap();
        let r = check_closed_graph(&broken, 5.0, 500, 2, 1e-3).unwrap();
        assert_eq!(r.verdict, Verdict::Fail);
        let cert = r.certificate.unwrap();
        match &cert {
            Certificate::ClosedGraph {
                x, vertex, distance, ..
            } => {
                assert_eq!(x, &vec![0.0]);
                assert_eq!(vertex, &vec![1.0]);
                assert_eq!(*distance, 1.0);
            }
            c => panic!("{c:?}"),
        }
        assert!(cert.verify(&broken).unwrap());
        let c = SetValuedMap::constant(&CompactSet::intervals(&[(0.0, 1.0)]).unwrap());
        assert!(check_closed_graph(&c, 5.0, 200, 2, 1e-3).unwrap().passed());
        assert!(check_closed_graph(&map(Builtin::Example2F), 5.0, 500, 2, 1e-2)
            .unwrap()
            .passed());
    }

    #[test]
    fn trajectory_classification() {
        let opts = EulerOptions::default().with_v0(vec![-1.0, -1.0]);
        let t = euler_polygon(&map(Builtin::Example4 { n: 2 }), &[-1.0, -0.5], 1.0, 16, &opts).unwrap();
        let r = check_trajectory_monotone(&t);
        assert!(r.iter().all(|c| c.class == MonotoneClass::Decreasing && c.holds()));

        let opts = EulerOptions::new(SelectionPolicy::lex_max()).with_v0(vec![1.0]);
        let t = euler_polygon(&map(Builtin::Example2F), &[1.0], 1.0, 100, &opts).unwrap();
        let r = check_trajectory_monotone(&t);
        assert_eq!(r[0].class, MonotoneClass::Increasing);
        assert!(r[0].holds());
        assert!(t.velocities().windows(2).all(|w| w[1][0] > w[0][0]));

        let zero = SetValuedMap::constant(&CompactSet::points(&[vec![0.0]]).unwrap());
        let t = euler_polygon(&zero, &[3.0], 1.0, 5, &EulerOptions::default()).unwrap();
        assert_eq!(check_trajectory_monotone(&t)[0].class, MonotoneClass::IdenticallyZero);
    }

    #[test]
    fn residual_examples() {
        let opts = EulerOptions::default().with_v0(vec![-1.0]);
        let t = euler_polygon(&map(Builtin::Example4 { n: 1 }), &[-1.0], 0.5, 16, &opts).unwrap();
        assert_eq!(residual(&t, &map(Builtin::Example4 { n: 1 }), 5).unwrap(), (0.0, 0.0));

        let m = map(Builtin::Example2F);
        let opts = EulerOptions::new(SelectionPolicy::lex_max()).with_v0(vec![1.0]);
        let t = euler_polygon(&m, &[1.0], 1.0, 1000, &opts).unwrap();
        let (node, interval) = residual(&t, &m, 4).unwrap();
        assert_eq!(node, 0.0);
        assert!(interval > 0.0 && interval <= 10.8731 * 1e-3);
    }
}
