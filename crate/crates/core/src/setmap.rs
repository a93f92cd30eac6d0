//! Compact box-union sets in ℝⁿ and set-valued maps whose images are such sets.
//!
//! Images are finite unions of closed axis-aligned boxes. Degenerate boxes
//! (`lo == hi` in some coordinate) are ordinary boxes, so finite point sets are
//! represented exactly. Overlapping boxes are allowed; the set is the union.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{check_dim, Error, Result};
use crate::mapdsl::{Comparator, Condition, Expr, Piece, PieceList, Region};

/// Closed axis-aligned box `[lo_1, hi_1] × … × [lo_n, hi_n]`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Hyperbox {
    lo: Vec<f64>,
    hi: Vec<f64>,
}

impl Hyperbox {
    pub fn new(lo: Vec<f64>, hi: Vec<f64>) -> Result<Self> {
        if lo.is_empty() {
            return Err(Error::InvalidBox("dimension must be at least 1".into()));
        }
        check_dim(lo.len(), hi.len())?;
        for (j, (l, h)) in lo.iter().zip(&hi).enumerate() {
            // also rejects NaN
            if !l.is_finite() || !h.is_finite() || l > h {
                return Err(Error::InvalidBox(format!("coordinate {}: [{l}, {h}]", j + 1)));
            }
        }
        Ok(Self { lo, hi })
    }

    pub fn point(p: &[f64]) -> Result<Self> {
        Self::new(p.to_vec(), p.to_vec())
    }

    /// 1-D interval `[lo, hi]`.
    pub fn interval(lo: f64, hi: f64) -> Result<Self> {
        Self::new(vec![lo], vec![hi])
    }

    pub fn dim(&self) -> usize {
        self.lo.len()
    }

    pub fn lo(&self) -> &[f64] {
        &self.lo
    }

    pub fn hi(&self) -> &[f64] {
        &self.hi
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .all(|(x, (l, h))| l <= x && x <= h)
    }

    /// Nearest point of the box to `v` (per-coordinate clamping).
    pub fn clamp(&self, v: &[f64]) -> Vec<f64> {
        v.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| x.clamp(*l, *h))
            .collect()
    }

    pub fn distance_squared(&self, v: &[f64]) -> f64 {
        v.iter()
            .zip(self.lo.iter().zip(&self.hi))
            .map(|(x, (l, h))| {
                let d = if x < l {
                    l - x
                } else if x > h {
                    x - h
                } else {
                    0.0
                };
                d * d
            })
            .sum()
    }

    /// Euclidean norm of the corner of largest magnitude.
    pub fn sup_norm(&self) -> f64 {
        self.lo
            .iter()
            .zip(&self.hi)
            .map(|(l, h)| {
                let m = l.abs().max(h.abs());
                m * m
            })
            .sum::<f64>()
            .sqrt()
    }

    pub fn is_point(&self) -> bool {
        self.lo == self.hi
    }

    /// Corner points; degenerate coordinates contribute a single value, so a
    /// point box yields one vertex.
    pub fn vertices(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::with_capacity(self.dim())];
        for (l, h) in self.lo.iter().zip(&self.hi) {
            let choices: &[f64] = if l == h { &[*l][..] } else { &[*l, *h][..] };
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    choices.iter().map(move |c| {
                        let mut p = prefix.clone();
                        p.push(*c);
                        p
                    })
                })
                .collect();
        }
        out
    }

    pub fn cartesian(&self, other: &Hyperbox) -> Hyperbox {
        let mut lo = self.lo.clone();
        lo.extend_from_slice(&other.lo);
        let mut hi = self.hi.clone();
        hi.extend_from_slice(&other.hi);
        Hyperbox { lo, hi }
    }

    pub(crate) fn from_bounds_unchecked(lo: Vec<f64>, hi: Vec<f64>) -> Self {
        debug_assert!(lo.iter().zip(&hi).all(|(l, h)| l <= h));
        Self { lo, hi }
    }
}

/// Nonempty finite union of boxes of a common dimension.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CompactSet {
    dim: usize,
    boxes: Vec<Hyperbox>,
}

impl CompactSet {
    pub fn new(boxes: Vec<Hyperbox>) -> Result<Self> {
        let first = boxes.first().ok_or(Error::EmptySet)?;
        let dim = first.dim();
        for b in &boxes {
            check_dim(dim, b.dim())?;
        }
        Ok(Self { dim, boxes })
    }

    pub fn from_box(b: Hyperbox) -> Self {
        Self {
            dim: b.dim(),
            boxes: vec![b],
        }
    }

    /// Finite point set.
    pub fn points(points: &[Vec<f64>]) -> Result<Self> {
        Self::new(points.iter().map(|p| Hyperbox::point(p)).collect::<Result<_>>()?)
    }

    /// 1-D union of intervals.
    pub fn intervals(ivs: &[(f64, f64)]) -> Result<Self> {
        Self::new(
            ivs.iter()
                .map(|&(l, h)| Hyperbox::interval(l, h))
                .collect::<Result<_>>()?,
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn boxes(&self) -> &[Hyperbox] {
        &self.boxes
    }

    pub fn into_boxes(self) -> Vec<Hyperbox> {
        self.boxes
    }

    /// `sup { |a| : a ∈ A }`.
    pub fn sup_norm(&self) -> f64 {
        self.boxes.iter().map(Hyperbox::sup_norm).fold(0.0, f64::max)
    }

    pub fn distance(&self, v: &[f64]) -> Result<f64> {
        check_dim(self.dim, v.len())?;
        Ok(self
            .boxes
            .iter()
            .map(|b| b.distance_squared(v))
            .fold(f64::INFINITY, f64::min)
            .sqrt())
    }

    pub fn contains(&self, v: &[f64]) -> bool {
        v.len() == self.dim && self.boxes.iter().any(|b| b.contains(v))
    }

    pub fn vertices(&self) -> Result<Vec<Vec<f64>>> {
        if self.dim > 16 {
            return Err(Error::VertexGuard(self.dim));
        }
        Ok(self.boxes.iter().flat_map(Hyperbox::vertices).collect())
    }

    /// All pairwise products of boxes, `self`'s box index outermost.
    pub fn cartesian(&self, other: &CompactSet) -> CompactSet {
        let boxes = self
            .boxes
            .iter()
            .flat_map(|a| other.boxes.iter().map(move |b| a.cartesian(b)))
            .collect();
        CompactSet {
            dim: self.dim + other.dim,
            boxes,
        }
    }

    /// Concatenation of the box lists.
    pub fn union(&self, other: &CompactSet) -> Result<CompactSet> {
        check_dim(self.dim, other.dim)?;
        let mut boxes = self.boxes.clone();
        boxes.extend_from_slice(&other.boxes);
        Ok(CompactSet { dim: self.dim, boxes })
    }
}

/// Linear growth constants: `‖F(x)‖ ≤ a + b·|x|`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Growth {
    pub a: f64,
    pub b: f64,
}

impl Growth {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(a >= 0.0 && b >= 0.0 && a.is_finite() && b.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "growth constants must be finite and nonnegative, got A={a}, B={b}"
            )));
        }
        Ok(Self { a, b })
    }
}

/// The catalogue of built-in maps.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Builtin {
    /// `[-1,0]` for `t < 0`, `[-1,1]` for `t ≥ 0`.
    Example1,
    /// `{t, t^{1/3}}`.
    Example2F,
    /// `{t^{1/3}, t + sign(t)}`, both jump branches at the origin.
    Example2G,
    /// 2-D: `({x₁^{1/3}} + [-1,0 or 1]) × ([-2,-1] ∪ [1,2])`.
    Example3,
    /// `{½ f(x), f(x)}` with `f` the componentwise multivalued sign.
    Example4 { n: usize },
    /// `{-1}` for `x > 0`, `{+1}` for `x < 0`, `{-1, 1}` at 0. Violates WCM.
    Antisign,
    /// `{x/|x|}` away from the origin, `k` unit vectors at the origin.
    NormGrad { n: usize, k: usize },
}

/// Description of a built-in map for catalogue listings.
#[derive(Clone, Debug, Serialize)]
pub struct BuiltinInfo {
    pub name: &'static str,
    pub dim: &'static str,
    pub params: &'static str,
    pub encodes: &'static str,
}

impl Builtin {
    pub fn catalog() -> Vec<BuiltinInfo> {
        vec![
            BuiltinInfo {
                name: "example1",
                dim: "1",
                params: "{}",
                encodes: "Example 1: [-1,0] for t<0, [-1,1] for t>=0 (convex images, WCM, not monotone)",
            },
            BuiltinInfo {
                name: "example2_F",
                dim: "1",
                params: "{}",
                encodes: "Example 2, F(t) = {t, t^(1/3)} (continuous, nonconvex, WCM, not monotone)",
            },
            BuiltinInfo {
                name: "example2_G",
                dim: "1",
                params: "{}",
                encodes: "Example 2, G(t) = {t^(1/3), t+sign(t)} (discontinuous at 0, WCM, not monotone)",
            },
            BuiltinInfo {
                name: "example3",
                dim: "2",
                params: "{}",
                encodes: "Example 3: product of a shifted Example 1 with [-2,-1] u [1,2]",
            },
            BuiltinInfo {
                name: "example4",
                dim: "n",
                params: "{\"n\": integer >= 1}",
                encodes: "Example 4: {f(x)/2, f(x)} with componentwise multivalued sign f (neither monotone nor cyclically monotone)",
            },
            BuiltinInfo {
                name: "antisign",
                dim: "1",
                params: "{}",
                encodes: "{-1} for x>0, {1} for x<0, {-1,1} at 0 (violates WCM)",
            },
            BuiltinInfo {
                name: "normgrad",
                dim: "n",
                params: "{\"n\": integer >= 1, \"k\": integer >= 1 (k <= 2n unless n = 2)}",
                encodes: "subdifferential of the Euclidean norm, finite set at 0 (monotone, violates WCM)",
            },
        ]
    }

    /// Resolve a builtin by name. Names are matched case-insensitively with
    /// `_` and `-` ignored; `example4<n>` and `normgrad<n>` embed the dimension.
    pub fn from_name(name: &str, n: Option<usize>, k: Option<usize>) -> Result<Self> {
        let key: String = name
            .chars()
            .filter(|c| *c != '_' && *c != '-')
            .flat_map(char::to_lowercase)
            .collect();
        let (base, embedded) = ["example4", "normgrad"]
            .iter()
            .find(|p| key.starts_with(*p) && key.len() > p.len())
            .map(|p| (p.to_string(), Some(&key[p.len()..])))
            .unwrap_or_else(|| (key.clone(), None));
        let embedded = match embedded {
            Some(digits) => Some(
                digits
                    .parse::<usize>()
                    .map_err(|_| Error::UnknownBuiltin(name.to_string()))?,
            ),
            None => None,
        };
        let n = n.or(embedded);
        let b = match base.as_str() {
            "example1" => Builtin::Example1,
            "example2f" => Builtin::Example2F,
            "example2g" => Builtin::Example2G,
            "example3" => Builtin::Example3,
            "example4" => Builtin::Example4 { n: n.unwrap_or(1) },
            "antisign" => Builtin::Antisign,
            "normgrad" => Builtin::NormGrad {
                n: n.unwrap_or(2),
                k: k.unwrap_or(4),
            },
            _ => return Err(Error::UnknownBuiltin(name.to_string())),
        };
        b.validate()?;
        Ok(b)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |reason: &str| {
            Err(Error::InvalidParams {
                name: self.name().into(),
                reason: reason.into(),
            })
        };
        match *self {
            Builtin::Example4 { n: 0 } => bad("n must be at least 1"),
            Builtin::NormGrad { n: 0, .. } => bad("n must be at least 1"),
            Builtin::NormGrad { k: 0, .. } => bad("k must be at least 1"),
            Builtin::NormGrad { n, k } if n != 2 && k > 2 * n => {
                bad("k must not exceed 2n for axis-aligned unit vectors")
            }
            _ => Ok(()),
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            Builtin::Example1 => "example1",
            Builtin::Example2F => "example2_F",
            Builtin::Example2G => "example2_G",
            Builtin::Example3 => "example3",
            Builtin::Example4 { .. } => "example4",
            Builtin::Antisign => "antisign",
            Builtin::NormGrad { .. } => "normgrad",
        }
    }

    pub fn dim(&self) -> usize {
        match *self {
            Builtin::Example3 => 2,
            Builtin::Example4 { n } | Builtin::NormGrad { n, .. } => n,
            _ => 1,
        }
    }

    pub fn growth(&self) -> Growth {
        let (a, b) = match *self {
            Builtin::Example1 | Builtin::Antisign | Builtin::NormGrad { .. } => (1.0, 0.0),
            Builtin::Example2F | Builtin::Example2G => (1.0, 1.0),
            // sqrt((|c|+1)^2 + 4) <= |c| + 3 <= 4 + |x|
            Builtin::Example3 => (4.0, 1.0),
            Builtin::Example4 { n } => ((n as f64).sqrt(), 0.0),
        };
        Growth { a, b }
    }

    /// Coordinates where the map has case splits, per variable.
    fn breakpoints(&self) -> Vec<Vec<f64>> {
        match *self {
            Builtin::Example2F => vec![vec![0.0]],
            Builtin::Example3 => vec![vec![0.0], vec![]],
            Builtin::Example4 { n } | Builtin::NormGrad { n, .. } => vec![vec![0.0]; n],
            _ => vec![vec![0.0]],
        }
    }

    fn evaluate(&self, x: &[f64]) -> CompactSet {
        let pt = |p: Vec<f64>| Hyperbox::from_bounds_unchecked(p.clone(), p);
        let iv = |l: f64, h: f64| Hyperbox::from_bounds_unchecked(vec![l], vec![h]);
        let boxes = match *self {
            Builtin::Example1 => {
                let t = x[0];
                let mut out = Vec::with_capacity(2);
                if t <= 0.0 {
                    out.push(iv(-1.0, 0.0));
                }
                if t >= 0.0 {
                    out.push(iv(-1.0, 1.0));
                }
                out
            }
            Builtin::Example2F => {
                let t = x[0];
                vec![iv(t, t), iv(t.cbrt(), t.cbrt())]
            }
            Builtin::Example2G => {
                let t = x[0];
                let c = t.cbrt();
                let mut out = Vec::with_capacity(4);
                if t <= 0.0 {
                    out.push(iv(c, c));
                    out.push(iv(t - 1.0, t - 1.0));
                }
                if t >= 0.0 {
                    out.push(iv(c, c));
                    out.push(iv(t + 1.0, t + 1.0));
                }
                out
            }
            Builtin::Example3 => {
                let c = x[0].cbrt();
                let mut out = Vec::with_capacity(4);
                let mut push_piece = |lo: f64, hi: f64| {
                    for (l2, h2) in [(-2.0, -1.0), (1.0, 2.0)] {
                        out.push(Hyperbox::from_bounds_unchecked(vec![lo, l2], vec![hi, h2]));
                    }
                };
                if x[0] <= 0.0 {
                    push_piece(c - 1.0, c);
                }
                if x[0] >= 0.0 {
                    push_piece(c - 1.0, c + 1.0);
                }
                out
            }
            Builtin::Example4 { .. } => {
                let patterns = sign_patterns(x);
                let half = patterns.iter().map(|p| pt(p.iter().map(|s| 0.5 * s).collect()));
                let full = patterns.iter().map(|p| pt(p.clone()));
                half.chain(full).collect()
            }
            Builtin::Antisign => {
                let t = x[0];
                let mut out = Vec::with_capacity(2);
                if t >= 0.0 {
                    out.push(iv(-1.0, -1.0));
                }
                if t <= 0.0 {
                    out.push(iv(1.0, 1.0));
                }
                out
            }
            Builtin::NormGrad { n, k } => {
                let norm = x.iter().map(|v| v * v).sum::<f64>().sqrt();
                if norm > 0.0 {
                    vec![pt(x.iter().map(|v| v / norm).collect())]
                } else if n == 2 {
                    (0..k)
                        .map(|i| {
                            let angle = 2.0 * PI * i as f64 / k as f64;
                            pt(vec![angle.cos(), angle.sin()])
                        })
                        .collect()
                } else {
                    (0..k)
                        .map(|i| {
                            let mut e = vec![0.0; n];
                            e[i / 2] = if i % 2 == 0 { 1.0 } else { -1.0 };
                            pt(e)
                        })
                        .collect()
                }
            }
        };
        CompactSet { dim: self.dim(), boxes }
    }

    /// Piecewise encoding with the same box lists as the native evaluation.
    /// `None` for maps that are not expressible in the expression grammar.
    pub fn to_pieces(&self) -> Option<SetValuedMap> {
        let c = Expr::Const;
        let x1 = || Expr::Var(0);
        let cbrt = || Expr::Cbrt(Box::new(Expr::Var(0)));
        let point = |e: Expr| vec![(e.clone(), e)];
        let le0 = |var| Region::new(vec![Condition::new(var, Comparator::Le, 0.0)]);
        let ge0 = |var| Region::new(vec![Condition::new(var, Comparator::Ge, 0.0)]);
        let growth = Some(self.growth());
        let pieces = match *self {
            Builtin::Example1 => vec![
                Piece::new(le0(0), vec![vec![(c(-1.0), c(0.0))]]),
                Piece::new(ge0(0), vec![vec![(c(-1.0), c(1.0))]]),
            ],
            Builtin::Example2F => vec![Piece::new(Region::all(), vec![point(x1()), point(cbrt())])],
            Builtin::Example2G => vec![
                Piece::new(le0(0), vec![point(cbrt()), point(x1() - c(1.0))]),
                Piece::new(ge0(0), vec![point(cbrt()), point(x1() + c(1.0))]),
            ],
            Builtin::Example3 => {
                let second = [(-2.0, -1.0), (1.0, 2.0)];
                let piece = |region, hi: Expr| {
                    let boxes = second
                        .iter()
                        .map(|&(l, h)| vec![(cbrt() - c(1.0), hi.clone()), (c(l), c(h))])
                        .collect();
                    Piece::new(region, boxes)
                };
                vec![piece(le0(0), cbrt()), piece(ge0(0), cbrt() + c(1.0))]
            }
            Builtin::Example4 { n } => {
                let branch = |scale: f64| {
                    let pieces = all_sign_vectors(n)
                        .into_iter()
                        .map(|sigma| {
                            let region = Region::new(
                                sigma
                                    .iter()
                                    .enumerate()
                                    .map(|(j, s)| {
                                        let op = if *s < 0.0 { Comparator::Le } else { Comparator::Ge };
                                        Condition::new(j, op, 0.0)
                                    })
                                    .collect(),
                            );
                            let image = vec![sigma.iter().map(|s| (c(scale * s), c(scale * s))).collect()];
                            Piece::new(region, image)
                        })
                        .collect();
                    SetValuedMap::piecewise(PieceList::new(n, pieces).expect("valid encoding"))
                };
                let mut m = SetValuedMap::union(&branch(0.5), &branch(1.0)).expect("same dim");
                m.growth = growth;
                return Some(m);
            }
            Builtin::Antisign => vec![
                Piece::new(ge0(0), vec![point(c(-1.0))]),
                Piece::new(le0(0), vec![point(c(1.0))]),
            ],
            Builtin::NormGrad { .. } => return None,
        };
        let mut m = SetValuedMap::piecewise(PieceList::new(self.dim(), pieces).expect("valid encoding"));
        m.growth = growth;
        Some(m)
    }
}

impl fmt::Display for Builtin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Builtin::Example4 { n } => write!(f, "example4({n})"),
            Builtin::NormGrad { n, k } => write!(f, "normgrad({n},{k})"),
            b => f.write_str(b.name()),
        }
    }
}

fn all_sign_vectors(n: usize) -> Vec<Vec<f64>> {
    (0..n).fold(vec![Vec::new()], |acc, _| {
        acc.into_iter()
            .flat_map(|p| {
                [-1.0, 1.0].into_iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(s);
                    q
                })
            })
            .collect()
    })
}

/// Values of the componentwise multivalued sign, first coordinate outermost,
/// `-1` before `+1` at zero coordinates.
fn sign_patterns(x: &[f64]) -> Vec<Vec<f64>> {
    x.iter().fold(vec![Vec::new()], |acc, &xj| {
        let choices: &[f64] = if xj < 0.0 {
            &[-1.0]
        } else if xj > 0.0 {
            &[1.0]
        } else {
            &[-1.0, 1.0]
        };
        acc.into_iter()
            .flat_map(|p| {
                choices.iter().map(move |s| {
                    let mut q = p.clone();
                    q.push(*s);
                    q
                })
            })
            .collect()
    })
}

#[derive(Clone, Debug)]
pub enum MapKind {
    Builtin(Builtin),
    Piecewise(PieceList),
    Product(Arc<SetValuedMap>, Arc<SetValuedMap>),
    Union(Arc<SetValuedMap>, Arc<SetValuedMap>),
}

/// Evaluable map `x ↦ F(x)`. Immutable and safe to share across threads.
#[derive(Clone, Debug)]
pub struct SetValuedMap {
    dim: usize,
    kind: MapKind,
    growth: Option<Growth>,
}

impl SetValuedMap {
    pub fn builtin(b: Builtin) -> Result<Self> {
        b.validate()?;
        Ok(Self {
            dim: b.dim(),
            kind: MapKind::Builtin(b),
            growth: Some(b.growth()),
        })
    }

    /// Look up a builtin by name; see [`Builtin::from_name`].
    pub fn by_name(name: &str, n: Option<usize>, k: Option<usize>) -> Result<Self> {
        Self::builtin(Builtin::from_name(name, n, k)?)
    }

    pub fn piecewise(pieces: PieceList) -> Self {
        Self {
            dim: pieces.dim(),
            kind: MapKind::Piecewise(pieces),
            growth: None,
        }
    }

    /// Map with the same image everywhere.
    pub fn constant(set: &CompactSet) -> Self {
        let image = set
            .boxes()
            .iter()
            .map(|b| {
                b.lo()
                    .iter()
                    .zip(b.hi())
                    .map(|(l, h)| (Expr::Const(*l), Expr::Const(*h)))
                    .collect()
            })
            .collect();
        let pieces =
            PieceList::new(set.dim(), vec![Piece::new(Region::all(), image)]).expect("constant image is valid");
        Self {
            dim: set.dim(),
            kind: MapKind::Piecewise(pieces),
            growth: Some(Growth {
                a: set.sup_norm(),
                b: 0.0,
            }),
        }
    }

    /// `(x, y) ↦ F(x) × G(y)`.
    pub fn product(f: &SetValuedMap, g: &SetValuedMap) -> Self {
        // |x_f|, |x_g| <= |(x_f, x_g)| and the norm of a pair is at most the sum
        let growth = f.growth.zip(g.growth).map(|(a, b)| Growth {
            a: a.a + b.a,
            b: a.b + b.b,
        });
        Self {
            dim: f.dim + g.dim,
            kind: MapKind::Product(Arc::new(f.clone()), Arc::new(g.clone())),
            growth,
        }
    }

    /// `x ↦ F(x) ∪ G(x)`.
    pub fn union(f: &SetValuedMap, g: &SetValuedMap) -> Result<Self> {
        check_dim(f.dim, g.dim)?;
        let growth = f.growth.zip(g.growth).map(|(a, b)| Growth {
            a: a.a.max(b.a),
            b: a.b.max(b.b),
        });
        Ok(Self {
            dim: f.dim,
            kind: MapKind::Union(Arc::new(f.clone()), Arc::new(g.clone())),
            growth,
        })
    }

    pub fn with_growth(mut self, growth: Option<Growth>) -> Self {
        self.growth = growth;
        self
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn kind(&self) -> &MapKind {
        &self.kind
    }

    /// Declared (or combinator-derived) linear growth constants.
    pub fn growth(&self) -> Option<Growth> {
        self.growth
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<CompactSet> {
        check_dim(self.dim, x.len())?;
        match &self.kind {
            MapKind::Builtin(b) => Ok(b.evaluate(x)),
            MapKind::Piecewise(p) => p.evaluate(x),
            MapKind::Product(f, g) => {
                let (xf, xg) = x.split_at(f.dim);
                Ok(f.evaluate(xf)?.cartesian(&g.evaluate(xg)?))
            }
            MapKind::Union(f, g) => f.evaluate(x)?.union(&g.evaluate(x)?),
        }
    }

    /// Per variable, the coordinate values at which the definition splits.
    /// Sorted and deduplicated.
    pub fn breakpoints(&self) -> Vec<Vec<f64>> {
        let mut out = match &self.kind {
            MapKind::Builtin(b) => b.breakpoints(),
            MapKind::Piecewise(p) => p.breakpoints(),
            MapKind::Product(f, g) => {
                let mut v = f.breakpoints();
                v.extend(g.breakpoints());
                v
            }
            MapKind::Union(f, g) => f
                .breakpoints()
                .into_iter()
                .zip(g.breakpoints())
                .map(|(mut a, b)| {
                    a.extend(b);
                    a
                })
                .collect(),
        };
        for v in &mut out {
            v.sort_by(f64::total_cmp);
            v.dedup();
        }
        out
    }
}

impl fmt::Display for SetValuedMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            MapKind::Builtin(b) => write!(f, "{b}"),
            MapKind::Piecewise(p) => write!(f, "piecewise(dim={}, pieces={})", self.dim, p.pieces().len()),
            MapKind::Product(a, b) => write!(f, "product({a}, {b})"),
            MapKind::Union(a, b) => write!(f, "union({a}, {b})"),
        }
    }
}
