//! Velocity selection for the Euler construction.
//!
//! Given the previous velocity `v⁻` and the sign pattern `s` of the last
//! displacement, the next velocity `w` must lie in the current image and
//! satisfy `s_j (w_j - v⁻_j) ≥ 0` for every coordinate `j`.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, InfeasibleCertificate, Result};
use crate::setmap::{CompactSet, Hyperbox};

/// Componentwise sign in `{-1, 0, +1}`, exact zero test.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct SignPattern(Vec<i8>);

impl SignPattern {
    pub fn new(signs: Vec<i8>) -> Result<Self> {
        if signs.iter().any(|s| !(-1..=1).contains(s)) {
            return Err(Error::InvalidArgument(format!(
                "sign pattern entries must be -1, 0 or 1: {signs:?}"
            )));
        }
        Ok(Self(signs))
    }

    pub fn of(v: &[f64]) -> Self {
        Self(
            v.iter()
                .map(|x| match x.partial_cmp(&0.0) {
                    Some(Ordering::Greater) => 1,
                    Some(Ordering::Less) => -1,
                    _ => 0,
                })
                .collect(),
        )
    }

    /// Signs of `x - y`.
    pub fn of_difference(x: &[f64], y: &[f64]) -> Self {
        Self(
            x.iter()
                .zip(y)
                .map(|(a, b)| match a.partial_cmp(b) {
                    Some(Ordering::Greater) => 1,
                    Some(Ordering::Less) => -1,
                    _ => 0,
                })
                .collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[i8] {
        &self.0
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PolicyKind {
    /// Point of the feasible region nearest to the previous velocity.
    #[default]
    Project,
    LexMin,
    LexMax,
}

impl fmt::Display for PolicyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PolicyKind::Project => "project",
            PolicyKind::LexMin => "lex_min",
            PolicyKind::LexMax => "lex_max",
        })
    }
}

impl FromStr for PolicyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.replace('-', "_").as_str() {
            "project" => Ok(PolicyKind::Project),
            "lex_min" | "lexmin" => Ok(PolicyKind::LexMin),
            "lex_max" | "lexmax" => Ok(PolicyKind::LexMax),
            _ => Err(Error::InvalidArgument(format!("unknown selection policy `{s}`"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct SelectionPolicy {
    pub kind: PolicyKind,
    /// Tolerance on the sign constraints; 0 makes them exact.
    pub slack: f64,
}

impl SelectionPolicy {
    pub fn new(kind: PolicyKind, slack: f64) -> Result<Self> {
        if !(slack >= 0.0 && slack.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "slack must be finite and >= 0, got {slack}"
            )));
        }
        Ok(Self { kind, slack })
    }

    pub fn project() -> Self {
        Self::default()
    }

    pub fn lex_min() -> Self {
        Self {
            kind: PolicyKind::LexMin,
            slack: 0.0,
        }
    }

    pub fn lex_max() -> Self {
        Self {
            kind: PolicyKind::LexMax,
            slack: 0.0,
        }
    }
}

fn constrain(b: &Hyperbox, prev_v: &[f64], signs: &SignPattern, slack: f64) -> Option<Hyperbox> {
    let mut lo = b.lo().to_vec();
    let mut hi = b.hi().to_vec();
    for (j, &s) in signs.as_slice().iter().enumerate() {
        match s {
            1 => lo[j] = lo[j].max(prev_v[j] - slack),
            -1 => hi[j] = hi[j].min(prev_v[j] + slack),
            _ => {}
        }
        if lo[j] > hi[j] {
            return None;
        }
    }
    Some(Hyperbox::from_bounds_unchecked(lo, hi))
}

/// Part of `image` compatible with the sign constraints, or `None` when empty.
pub fn feasible_region(
    image: &CompactSet,
    prev_v: &[f64],
    signs: &SignPattern,
    slack: f64,
) -> Result<Option<CompactSet>> {
    check_dim(image.dim(), prev_v.len())?;
    check_dim(image.dim(), signs.len())?;
    let boxes: Vec<_> = image
        .boxes()
        .iter()
        .filter_map(|b| constrain(b, prev_v, signs, slack))
        .collect();
    if boxes.is_empty() {
        Ok(None)
    } else {
        CompactSet::new(boxes).map(Some)
    }
}

fn lex_cmp(a: &[f64], b: &[f64]) -> Ordering {
    a.iter()
        .zip(b)
        .map(|(x, y)| x.total_cmp(y))
        .find(|o| o.is_ne())
        .unwrap_or(Ordering::Equal)
}

/// Choose a point of `set` according to `kind`, using `anchor` for projection.
fn choose(set: &CompactSet, anchor: &[f64], kind: PolicyKind) -> Vec<f64> {
    let boxes = set.boxes();
    match kind {
        PolicyKind::Project => {
            let mut best = boxes[0].clamp(anchor);
            let mut best_d = boxes[0].distance_squared(anchor);
            for b in &boxes[1..] {
                let d = b.distance_squared(anchor);
                if d < best_d {
                    best_d = d;
                    best = b.clamp(anchor);
                }
            }
            best
        }
        PolicyKind::LexMin => boxes
            .iter()
            .map(Hyperbox::lo)
            .reduce(|a, b| if lex_cmp(b, a).is_lt() { b } else { a })
            .expect("nonempty")
            .to_vec(),
        PolicyKind::LexMax => boxes
            .iter()
            .map(Hyperbox::hi)
            .reduce(|a, b| if lex_cmp(b, a).is_gt() { b } else { a })
            .expect("nonempty")
            .to_vec(),
    }
}

/// Next Euler velocity. On an empty feasible region returns
/// [`Error::WcmInfeasible`] with an empty `state`; callers that know the
/// state fill it in.
pub fn select_velocity(
    image: &CompactSet,
    prev_v: &[f64],
    signs: &SignPattern,
    policy: &SelectionPolicy,
) -> Result<Vec<f64>> {
    match feasible_region(image, prev_v, signs, policy.slack)? {
        Some(region) => Ok(choose(&region, prev_v, policy.kind)),
        None => Err(Error::WcmInfeasible(Box::new(InfeasibleCertificate {
            step: None,
            level: None,
            state: Vec::new(),
            prev_velocity: prev_v.to_vec(),
            signs: signs.clone(),
            slack: policy.slack,
        }))),
    }
}

/// First Euler velocity: the supplied override if it lies in the image (up
/// to `slack`), otherwise chosen by the policy with the origin as anchor.
pub fn initial_velocity(image: &CompactSet, policy: &SelectionPolicy, v0: Option<&[f64]>) -> Result<Vec<f64>> {
    if let Some(v0) = v0 {
        let distance = image.distance(v0)?;
        if distance > policy.slack {
            return Err(Error::VelocityNotInImage {
                v0: v0.to_vec(),
                distance,
            });
        }
        return Ok(v0.to_vec());
    }
    Ok(choose(image, &vec![0.0; image.dim()], policy.kind))
}
