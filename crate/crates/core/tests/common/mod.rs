//! Independent oracles shared by the integration tests.

#![allow(dead_code)]

use dinclusion::mapdsl::{Comparator, Condition, Expr, Piece, PieceList, Region};
use dinclusion::{CompactSet, Hyperbox, SetValuedMap};
use rand::Rng;

/// Evaluates an expression string directly, character by character, without
/// building a tree. Same grammar as the map files: `+ - *`, unary minus,
/// `sign`, `cbrt`, `abs`, parentheses, `x` / `x1..xn`, decimal literals.
pub fn interpret(src: &str, x: &[f64]) -> f64 {
    let mut it = Interp {
        s: src.as_bytes(),
        i: 0,
        x,
    };
    let v = it.sum();
    it.ws();
    assert_eq!(it.i, it.s.len(), "trailing input in {src:?}");
    v
}

struct Interp<'a> {
    s: &'a [u8],
    i: usize,
    x: &'a [f64],
}

impl Interp<'_> {
    fn ws(&mut self) {
        while self.i < self.s.len() && self.s[self.i].is_ascii_whitespace() {
            self.i += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.ws();
        self.s.get(self.i).copied()
    }

    fn sum(&mut self) -> f64 {
        let mut acc = self.product();
        loop {
            match self.peek() {
                Some(b'+') => {
                    self.i += 1;
                    acc += self.product();
                }
                Some(b'-') => {
                    self.i += 1;
                    acc -= self.product();
                }
                _ => return acc,
            }
        }
    }

    fn product(&mut self) -> f64 {
        let mut acc = self.unary();
        while self.peek() == Some(b'*') {
            self.i += 1;
            acc *= self.unary();
        }
        acc
    }

    fn unary(&mut self) -> f64 {
        if self.peek() == Some(b'-') {
            self.i += 1;
            return -self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> f64 {
        match self.peek() {
            Some(b'(') => {
                self.i += 1;
                let v = self.sum();
                assert_eq!(self.peek(), Some(b')'));
                self.i += 1;
                v
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => {
                let start = self.i;
                while self.i < self.s.len()
                    && (self.s[self.i].is_ascii_digit()
                        || matches!(self.s[self.i], b'.' | b'e' | b'E')
                        || (matches!(self.s[self.i], b'+' | b'-') && matches!(self.s[self.i - 1], b'e' | b'E')))
                {
                    self.i += 1;
                }
                std::str::from_utf8(&self.s[start..self.i]).unwrap().parse().unwrap()
            }
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.i;
                while self.i < self.s.len() && self.s[self.i].is_ascii_alphanumeric() {
                    self.i += 1;
                }
                let word = std::str::from_utf8(&self.s[start..self.i]).unwrap();
                let f: fn(f64) -> f64 = match word {
                    "sign" => |v| {
                        if v > 0.0 {
                            1.0
                        } else if v < 0.0 {
                            -1.0
                        } else {
                            0.0
                        }
                    },
                    "cbrt" => f64::cbrt,
                    "abs" => f64::abs,
                    "x" => return self.x[0],
                    w if w.starts_with('x') => return self.x[w[1..].parse::<usize>().unwrap() - 1],
                    w => panic!("unknown word {w}"),
                };
                assert_eq!(self.peek(), Some(b'('));
                self.i += 1;
                let v = self.sum();
                assert_eq!(self.peek(), Some(b')'));
                self.i += 1;
                f(v)
            }
            other => panic!("unexpected {other:?} at {}", self.i),
        }
    }
}

/// Random expression source over `dim` variables, fully parenthesized, with
/// random spacing.
pub fn random_expr<R: Rng>(rng: &mut R, dim: usize, depth: u32) -> String {
    let sp = |rng: &mut R| if rng.gen_bool(0.5) { " " } else { "" };
    if depth == 0 || rng.gen_bool(0.25) {
        return match rng.gen_range(0..3) {
            0 => format!("{}", rng.gen_range(0..1000) as f64 / 8.0),
            1 => format!("x{}", rng.gen_range(1..=dim)),
            _ if dim == 1 => "x".to_string(),
            _ => format!("{:.3}", rng.gen_range(0.0..10.0)),
        };
    }
    let a = random_expr(rng, dim, depth - 1);
    match rng.gen_range(0..7) {
        0 => format!("({a}{}+{}{})", sp(rng), sp(rng), random_expr(rng, dim, depth - 1)),
        1 => format!("({a}{}-{}{})", sp(rng), sp(rng), random_expr(rng, dim, depth - 1)),
        2 => format!("({a}{}*{}{})", sp(rng), sp(rng), random_expr(rng, dim, depth - 1)),
        3 => format!("-({a})"),
        4 => format!("sign({a})"),
        5 => format!("cbrt({}{a})", sp(rng)),
        _ => format!("abs({a})"),
    }
}

/// Relative agreement with an absolute floor for values near zero.
pub fn close(a: f64, b: f64, rel: f64) -> bool {
    a == b || (a - b).abs() <= rel * a.abs().max(b.abs()).max(1.0)
}

/// Random box union with endpoints on the quarter lattice in `[-span, span]`.
pub fn random_lattice_set<R: Rng>(rng: &mut R, dim: usize, max_boxes: usize, span: i32) -> CompactSet {
    let count = rng.gen_range(1..=max_boxes);
    let boxes = (0..count)
        .map(|_| {
            let (mut lo, mut hi) = (Vec::new(), Vec::new());
            for _ in 0..dim {
                let a = rng.gen_range(-span..=span) as f64 * 0.25;
                let b = if rng.gen_bool(0.3) {
                    a
                } else {
                    rng.gen_range(-span..=span) as f64 * 0.25
                };
                lo.push(a.min(b));
                hi.push(a.max(b));
            }
            Hyperbox::new(lo, hi).unwrap()
        })
        .collect();
    CompactSet::new(boxes).unwrap()
}

/// Every point of the eighth lattice inside `set`.
pub fn lattice_points(set: &CompactSet) -> Vec<Vec<f64>> {
    let mut out = Vec::new();
    for b in set.boxes() {
        let mut pts: Vec<Vec<f64>> = vec![Vec::new()];
        for j in 0..set.dim() {
            let (lo, hi) = ((b.lo()[j] * 8.0).round() as i64, (b.hi()[j] * 8.0).round() as i64);
            pts = pts
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |k| {
                        let mut q = p.clone();
                        q.push(k as f64 / 8.0);
                        q
                    })
                })
                .collect();
        }
        out.extend(pts);
    }
    out
}

/// Brute-force WCM for one pair: every lattice `v ∈ F(x)` must have a lattice
/// `w ∈ F(y)` with `(x_j - y_j)(v_j - w_j) ≥ 0` for all `j`. Exact for sets
/// with quarter-lattice endpoints, since the eighth lattice meets every
/// nonempty cell of the arrangement.
pub fn wcm_grid_oracle(x: &[f64], fx: &CompactSet, y: &[f64], fy: &CompactSet) -> bool {
    let ws = lattice_points(fy);
    lattice_points(fx).iter().all(|v| {
        ws.iter()
            .any(|w| (0..x.len()).all(|j| (x[j] - y[j]) * (v[j] - w[j]) >= 0.0))
    })
}

fn const_box(b: &Hyperbox) -> Vec<(Expr, Expr)> {
    b.lo()
        .iter()
        .zip(b.hi())
        .map(|(&l, &h)| (Expr::Const(l), Expr::Const(h)))
        .collect()
}

/// Map equal to `fx` on `{x_j ≤ m}` and `fy` on `{x_j > m}`, where `j`
/// separates `x` and `y`. Returns `None` when `x == y`.
pub fn two_valued_map(x: &[f64], fx: &CompactSet, y: &[f64], fy: &CompactSet) -> Option<SetValuedMap> {
    let j = (0..x.len()).find(|&j| x[j] != y[j])?;
    let m = 0.5 * (x[j] + y[j]);
    let (below, above) = if x[j] < y[j] { (fx, fy) } else { (fy, fx) };
    let pieces = vec![
        Piece::new(
            Region::new(vec![Condition::new(j, Comparator::Le, m)]),
            below.boxes().iter().map(const_box).collect(),
        ),
        Piece::new(
            Region::new(vec![Condition::new(j, Comparator::Gt, m)]),
            above.boxes().iter().map(const_box).collect(),
        ),
    ];
    Some(SetValuedMap::piecewise(PieceList::new(x.len(), pieces).unwrap()))
}

/// Random nondecreasing scalar function of `x1`: `a·x + b·cbrt(x) + c·sign(x - s) + d`
/// with `a, b, c ≥ 0`.
pub fn random_nondecreasing<R: Rng>(rng: &mut R) -> String {
    let a = rng.gen_range(0..8) as f64 / 4.0;
    let b = rng.gen_range(0..8) as f64 / 4.0;
    let c = rng.gen_range(0..8) as f64 / 4.0;
    let s = rng.gen_range(-8..=8) as f64 / 4.0;
    let d = rng.gen_range(-8..=8) as f64 / 4.0;
    format!("{a} * x1 + {b} * cbrt(x1) + {c} * sign(x1 - {s}) + {d}")
}

/// One-dimensional map `t ↦ ∪_k [f_k(t), f_k(t) + width_k]` with every `f_k`
/// nondecreasing, so both `min F` and `max F` are nondecreasing.
pub fn random_monotone_1d<R: Rng>(rng: &mut R) -> SetValuedMap {
    let count = rng.gen_range(1..=3);
    let image: Vec<String> = (0..count)
        .map(|_| {
            let f = random_nondecreasing(rng);
            let w = rng.gen_range(0..6) as f64 / 4.0;
            format!(r#"[["{f}", "{f} + {w}"]]"#)
        })
        .collect();
    let src = format!(
        r#"{{"dim": 1, "pieces": [{{"region": [], "image": [{}]}}]}}"#,
        image.join(", ")
    );
    dinclusion::mapdsl::parse_map(&src).unwrap()
}

/// Product of `dim` random one-dimensional monotone maps.
pub fn random_wcm_map<R: Rng>(rng: &mut R, dim: usize) -> SetValuedMap {
    let mut map = random_monotone_1d(rng);
    for _ in 1..dim {
        map = SetValuedMap::product(&map, &random_monotone_1d(rng));
    }
    map
}
