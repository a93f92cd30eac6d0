//! Text format for piecewise set-valued maps.
//!
//! A map file is a JSON document:
//!
//! ```json
//! {
//!   "dim": 1,
//!   "pieces": [
//!     { "region": [ { "var": 1, "op": "le", "bound": 0 } ], "image": [ [ ["-1", "0"] ] ] },
//!     { "region": [ { "var": 1, "op": "ge", "bound": 0 } ], "image": [ [ ["-1", "1"] ] ] }
//!   ]
//! }
//! ```
//!
//! Instead of `pieces` a node may carry `product` or `union` (two sub-maps) or
//! `builtin` (`{"name": ..., "params": {...}}`). An optional `growth` object
//! `{"A": .., "B": ..}` declares linear growth constants.
//!
//! The image at `x` is the union over every piece whose region contains `x`,
//! so overlapping closed regions encode multivaluedness at case splits.
//! Comparators are taken literally: `lt`/`gt` are strict.
//!
//! Expressions use the grammar
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor ('*' factor)*
//! factor := number | 'x' | 'x' digits | func '(' expr ')' | '(' expr ')' | '-' factor
//! func   := sign | cbrt | abs
//! ```
//!
//! `x` is the first variable; `x1`, `x2`, … are 1-based.

use std::fmt;
use std::ops;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};
use thiserror::Error;

use crate::error::{check_dim, Error, Result};
use crate::setmap::{Builtin, CompactSet, Growth, Hyperbox, MapKind, SetValuedMap};

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Const(f64),
    /// 0-based variable index.
    Var(usize),
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Sign(Box<Expr>),
    Cbrt(Box<Expr>),
    Abs(Box<Expr>),
}

/// `sign(0) = 0`.
pub fn sign(v: f64) -> f64 {
    if v > 0.0 {
        1.0
    } else if v < 0.0 {
        -1.0
    } else {
        v * 0.0
    }
}

impl Expr {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Expr::Const(c) => *c,
            Expr::Var(i) => x[*i],
            Expr::Neg(e) => -e.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Sign(e) => sign(e.eval(x)),
            Expr::Cbrt(e) => e.eval(x).cbrt(),
            Expr::Abs(e) => e.eval(x).abs(),
        }
    }

    /// Largest variable index used, if any.
    pub fn max_var(&self) -> Option<usize> {
        match self {
            Expr::Const(_) => None,
            Expr::Var(i) => Some(*i),
            Expr::Neg(e) | Expr::Sign(e) | Expr::Cbrt(e) | Expr::Abs(e) => e.max_var(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) => a.max_var().max(b.max_var()),
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Expr::Add(..) | Expr::Sub(..) => 1,
            Expr::Mul(..) => 2,
            Expr::Neg(_) => 3,
            Expr::Const(c) if c.is_sign_negative() => 3,
            _ => 4,
        }
    }
}

impl ops::Add for Expr {
    type Output = Expr;
    fn add(self, rhs: Expr) -> Expr {
        Expr::Add(Box::new(self), Box::new(rhs))
    }
}

impl ops::Sub for Expr {
    type Output = Expr;
    fn sub(self, rhs: Expr) -> Expr {
        Expr::Sub(Box::new(self), Box::new(rhs))
    }
}

impl ops::Mul for Expr {
    type Output = Expr;
    fn mul(self, rhs: Expr) -> Expr {
        Expr::Mul(Box::new(self), Box::new(rhs))
    }
}

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

struct Operand<'a>(&'a Expr, bool);

impl fmt::Display for Operand<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

impl fmt::Display for Expr {
    /// Minimal parenthesization; re-parses to a tree that evaluates identically.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = self.precedence();
        match self {
            // `{}` on f64 is the shortest representation that round-trips
            Expr::Const(c) if c.is_sign_negative() => write!(f, "-{}", -c),
            Expr::Const(c) => write!(f, "{c}"),
            Expr::Var(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "-{}", Operand(e, e.precedence() < 3)),
            Expr::Add(a, b) => write!(
                f,
                "{} + {}",
                Operand(a, a.precedence() < p),
                Operand(b, b.precedence() <= p)
            ),
            Expr::Sub(a, b) => write!(
                f,
                "{} - {}",
                Operand(a, a.precedence() < p),
                Operand(b, b.precedence() <= p)
            ),
            Expr::Mul(a, b) => write!(
                f,
                "{} * {}",
                Operand(a, a.precedence() < p),
                Operand(b, b.precedence() <= p)
            ),
            Expr::Sign(e) => write!(f, "sign({e})"),
            Expr::Cbrt(e) => write!(f, "cbrt({e})"),
            Expr::Abs(e) => write!(f, "abs({e})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ParseErrorKind {
    Syntax,
    UnknownFunction(String),
}

/// Expression syntax error with the byte offset into the source.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub struct ParseError {
    pub offset: usize,
    pub kind: ParseErrorKind,
    pub expected: Vec<&'static str>,
    pub found: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.kind {
            ParseErrorKind::UnknownFunction(name) => {
                write!(f, "unknown function `{name}` at byte {}", self.offset)
            }
            ParseErrorKind::Syntax => write!(
                f,
                "syntax error at byte {}: expected one of {{{}}}, found {}",
                self.offset,
                self.expected.join(", "),
                self.found
            ),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Token {
    Number(f64),
    Ident(String),
    Plus,
    Minus,
    Star,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Token {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Token::Number(n) => write!(f, "number {n}"),
            Token::Ident(s) => write!(f, "`{s}`"),
            Token::Plus => f.write_str("`+`"),
            Token::Minus => f.write_str("`-`"),
            Token::Star => f.write_str("`*`"),
            Token::LParen => f.write_str("`(`"),
            Token::RParen => f.write_str("`)`"),
            Token::End => f.write_str("end of input"),
        }
    }
}

const FACTOR_START: &[&str] = &["number", "x", "function", "(", "-"];

struct Parser<'a> {
    src: &'a str,
    pos: usize,
    tok: Token,
    tok_start: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> std::result::Result<Self, ParseError> {
        let mut p = Parser {
            src,
            pos: 0,
            tok: Token::End,
            tok_start: 0,
        };
        p.advance()?;
        Ok(p)
    }

    fn error(&self, expected: &[&'static str]) -> ParseError {
        ParseError {
            offset: self.tok_start,
            kind: ParseErrorKind::Syntax,
            expected: expected.to_vec(),
            found: self.tok.to_string(),
        }
    }

    fn advance(&mut self) -> std::result::Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        while self.pos < bytes.len() && bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
        self.tok_start = self.pos;
        let Some(&c) = bytes.get(self.pos) else {
            self.tok = Token::End;
            return Ok(());
        };
        let single = match c {
            b'+' => Some(Token::Plus),
            b'-' => Some(Token::Minus),
            b'*' => Some(Token::Star),
            b'(' => Some(Token::LParen),
            b')' => Some(Token::RParen),
            _ => None,
        };
        if let Some(t) = single {
            self.pos += 1;
            self.tok = t;
            return Ok(());
        }
        if c.is_ascii_digit() {
            let start = self.pos;
            let digits = |p: &mut usize| {
                while *p < bytes.len() && bytes[*p].is_ascii_digit() {
                    *p += 1;
                }
            };
            digits(&mut self.pos);
            if bytes.get(self.pos) == Some(&b'.') {
                self.pos += 1;
                digits(&mut self.pos);
            }
            if matches!(bytes.get(self.pos), Some(b'e' | b'E')) {
                let mut q = self.pos + 1;
                if matches!(bytes.get(q), Some(b'+' | b'-')) {
                    q += 1;
                }
                if bytes.get(q).is_some_and(u8::is_ascii_digit) {
                    self.pos = q;
                    digits(&mut self.pos);
                }
            }
            let text = &self.src[start..self.pos];
            let value: f64 = text.parse().map_err(|_| self.error(&["number"]))?;
            if !value.is_finite() {
                return Err(ParseError {
                    offset: start,
                    kind: ParseErrorKind::Syntax,
                    expected: vec!["finite number"],
                    found: text.to_string(),
                });
            }
            self.tok = Token::Number(value);
            return Ok(());
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            let start = self.pos;
            while self.pos < bytes.len() && (bytes[self.pos].is_ascii_alphanumeric() || bytes[self.pos] == b'_') {
                self.pos += 1;
            }
            self.tok = Token::Ident(self.src[start..self.pos].to_string());
            return Ok(());
        }
        let ch = self.src[self.pos..].chars().next().unwrap_or('?');
        Err(ParseError {
            offset: self.pos,
            kind: ParseErrorKind::Syntax,
            expected: FACTOR_START.to_vec(),
            found: format!("`{ch}`"),
        })
    }

    fn expr(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.term()?;
        loop {
            match self.tok {
                Token::Plus => {
                    self.advance()?;
                    lhs = lhs + self.term()?;
                }
                Token::Minus => {
                    self.advance()?;
                    lhs = lhs - self.term()?;
                }
                _ => return Ok(lhs),
            }
        }
    }

    fn term(&mut self) -> std::result::Result<Expr, ParseError> {
        let mut lhs = self.factor()?;
        while self.tok == Token::Star {
            self.advance()?;
            lhs = lhs * self.factor()?;
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> std::result::Result<Expr, ParseError> {
        match std::mem::replace(&mut self.tok, Token::End) {
            Token::Number(v) => {
                self.advance()?;
                Ok(Expr::Const(v))
            }
            Token::Minus => {
                self.advance()?;
                Ok(-self.factor()?)
            }
            Token::LParen => {
                self.advance()?;
                let e = self.expr()?;
                self.expect_rparen()?;
                Ok(e)
            }
            Token::Ident(name) => {
                let start = self.tok_start;
                if let Some(var) = variable_index(&name) {
                    self.advance()?;
                    return var.map(Expr::Var).ok_or(ParseError {
                        offset: start,
                        kind: ParseErrorKind::Syntax,
                        expected: vec!["x", "x<index >= 1>"],
                        found: format!("`{name}`"),
                    });
                }
                self.advance()?;
                if self.tok != Token::LParen {
                    return Err(self.error(&["("]));
                }
                let func: fn(Box<Expr>) -> Expr = match name.as_str() {
                    "sign" => Expr::Sign,
                    "cbrt" => Expr::Cbrt,
                    "abs" => Expr::Abs,
                    _ => {
                        return Err(ParseError {
                            offset: start,
                            kind: ParseErrorKind::UnknownFunction(name.clone()),
                            expected: vec!["sign", "cbrt", "abs"],
                            found: format!("`{name}`"),
                        })
                    }
                };
                self.advance()?;
                let arg = self.expr()?;
                self.expect_rparen()?;
                Ok(func(Box::new(arg)))
            }
            other => {
                self.tok = other;
                Err(self.error(FACTOR_START))
            }
        }
    }

    fn expect_rparen(&mut self) -> std::result::Result<(), ParseError> {
        if self.tok == Token::RParen {
            self.advance()
        } else {
            Err(self.error(&[")", "+", "-", "*"]))
        }
    }
}

/// `Some(Some(i))` for a valid variable name, `Some(None)` for `x0`.
fn variable_index(name: &str) -> Option<Option<usize>> {
    let rest = name.strip_prefix('x')?;
    if rest.is_empty() {
        return Some(Some(0));
    }
    if !rest.bytes().all(|b| b.is_ascii_digit()) {
        return None;
    }
    Some(rest.parse::<usize>().ok().filter(|i| *i >= 1).map(|i| i - 1))
}

pub fn parse_expr(src: &str) -> std::result::Result<Expr, ParseError> {
    let mut p = Parser::new(src)?;
    let e = p.expr()?;
    if p.tok != Token::End {
        return Err(p.error(&["+", "-", "*", "end of input"]));
    }
    Ok(e)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Comparator {
    Lt,
    Le,
    Eq,
    Ge,
    Gt,
}

impl Comparator {
    pub fn holds(self, value: f64, bound: f64) -> bool {
        match self {
            Comparator::Lt => value < bound,
            Comparator::Le => value <= bound,
            Comparator::Eq => value == bound,
            Comparator::Ge => value >= bound,
            Comparator::Gt => value > bound,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Condition {
    /// 0-based variable index.
    pub var: usize,
    pub op: Comparator,
    pub bound: f64,
}

impl Condition {
    pub fn new(var: usize, op: Comparator, bound: f64) -> Self {
        Self { var, op, bound }
    }
}

/// Conjunction of coordinate conditions; empty means all of ℝⁿ.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Region {
    conditions: Vec<Condition>,
}

impl Region {
    pub fn new(conditions: Vec<Condition>) -> Self {
        Self { conditions }
    }

    pub fn all() -> Self {
        Self::default()
    }

    pub fn conditions(&self) -> &[Condition] {
        &self.conditions
    }

    pub fn contains(&self, x: &[f64]) -> bool {
        self.conditions.iter().all(|c| c.op.holds(x[c.var], c.bound))
    }

    /// Projection onto variable `var` as an interval
    /// `(lo, lo_closed, hi, hi_closed)`, or `None` when empty.
    fn interval_on(&self, var: usize) -> Option<(f64, bool, f64, bool)> {
        let (mut lo, mut lo_closed) = (f64::NEG_INFINITY, false);
        let (mut hi, mut hi_closed) = (f64::INFINITY, false);
        for c in self.conditions.iter().filter(|c| c.var == var) {
            let (b, closed) = (c.bound, !matches!(c.op, Comparator::Lt | Comparator::Gt));
            if matches!(c.op, Comparator::Ge | Comparator::Gt | Comparator::Eq) && (b > lo || (b == lo && !closed)) {
                lo = b;
                lo_closed = closed;
            }
            if matches!(c.op, Comparator::Le | Comparator::Lt | Comparator::Eq) && (b < hi || (b == hi && !closed)) {
                hi = b;
                hi_closed = closed;
            }
        }
        if lo > hi || (lo == hi && !(lo_closed && hi_closed)) {
            None
        } else {
            Some((lo, lo_closed, hi, hi_closed))
        }
    }
}

/// One case of a piecewise map: a region and the boxes (as expression bounds)
/// contributed when `x` lies in it.
#[derive(Clone, Debug, PartialEq)]
pub struct Piece {
    pub region: Region,
    /// Each box is `dim` pairs `(lo, hi)`.
    pub image: Vec<Vec<(Expr, Expr)>>,
}

impl Piece {
    pub fn new(region: Region, image: Vec<Vec<(Expr, Expr)>>) -> Self {
        Self { region, image }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct PieceList {
    dim: usize,
    pieces: Vec<Piece>,
}

impl PieceList {
    /// Checks shapes and variable indices; totality is checked by [`validate`].
    pub fn new(dim: usize, pieces: Vec<Piece>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::MapFile("dim must be at least 1".into()));
        }
        if pieces.is_empty() {
            return Err(Error::MapFile("at least one piece is required".into()));
        }
        for (pi, piece) in pieces.iter().enumerate() {
            if piece.image.is_empty() {
                return Err(Error::MapFile(format!("piece {pi}: image has no boxes")));
            }
            for c in piece.region.conditions() {
                if c.var >= dim {
                    return Err(Error::MapFile(format!(
                        "piece {pi}: region variable {} out of range for dim {dim}",
                        c.var + 1
                    )));
                }
                if !c.bound.is_finite() {
                    return Err(Error::MapFile(format!("piece {pi}: non-finite region bound")));
                }
            }
            for (bi, b) in piece.image.iter().enumerate() {
                if b.len() != dim {
                    return Err(Error::MapFile(format!(
                        "piece {pi}, box {bi}: expected {dim} coordinate intervals, got {}",
                        b.len()
                    )));
                }
                let max_var = b.iter().flat_map(|(l, h)| [l.max_var(), h.max_var()]).flatten().max();
                if let Some(v) = max_var.filter(|v| *v >= dim) {
                    return Err(Error::MapFile(format!(
                        "piece {pi}, box {bi}: variable x{} out of range for dim {dim}",
                        v + 1
                    )));
                }
            }
        }
        Ok(Self { dim, pieces })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn pieces(&self) -> &[Piece] {
        &self.pieces
    }

    pub fn evaluate(&self, x: &[f64]) -> Result<CompactSet> {
        check_dim(self.dim, x.len())?;
        let mut boxes = Vec::new();
        for piece in self.pieces.iter().filter(|p| p.region.contains(x)) {
            for b in &piece.image {
                let mut lo = Vec::with_capacity(self.dim);
                let mut hi = Vec::with_capacity(self.dim);
                for (j, (l, h)) in b.iter().enumerate() {
                    let (l, h) = (l.eval(x), h.eval(x));
                    if !l.is_finite() || !h.is_finite() || l > h {
                        return Err(Error::InvertedBox {
                            x: x.to_vec(),
                            coordinate: j + 1,
                        });
                    }
                    lo.push(l);
                    hi.push(h);
                }
                boxes.push(Hyperbox::from_bounds_unchecked(lo, hi));
            }
        }
        if boxes.is_empty() {
            return Err(Error::EmptyImage(x.to_vec()));
        }
        CompactSet::new(boxes)
    }

    pub fn breakpoints(&self) -> Vec<Vec<f64>> {
        let mut out = vec![Vec::new(); self.dim];
        for c in self.pieces.iter().flat_map(|p| p.region.conditions()) {
            out[c.var].push(c.bound);
        }
        out
    }

    /// For 1-D lists: a point not covered by any region, if one exists.
    pub fn uncovered_point(&self) -> Option<f64> {
        if self.dim != 1 {
            return None;
        }
        let mut ivs: Vec<_> = self.pieces.iter().filter_map(|p| p.region.interval_on(0)).collect();
        ivs.sort_by(|a, b| a.0.total_cmp(&b.0).then(b.1.cmp(&a.1)));
        // covered prefix: (-inf, reach] if reach_closed else (-inf, reach)
        let mut reach = f64::NEG_INFINITY;
        let mut reach_closed = false;
        for (lo, lo_closed, hi, hi_closed) in ivs {
            let gap = if reach == f64::NEG_INFINITY {
                lo > f64::NEG_INFINITY
            } else {
                lo > reach || (lo == reach && !reach_closed && !lo_closed)
            };
            if gap {
                return Some(if reach == f64::NEG_INFINITY {
                    if lo_closed {
                        lo - 1.0
                    } else {
                        lo
                    }
                } else if !reach_closed {
                    reach
                } else if !lo_closed {
                    lo
                } else {
                    0.5 * (reach + lo)
                });
            }
            if hi > reach || (hi == reach && hi_closed) {
                reach = hi;
                reach_closed = hi_closed;
            }
        }
        if reach == f64::INFINITY {
            None
        } else if reach_closed {
            Some(reach + 1.0)
        } else {
            Some(reach)
        }
    }
}

/// Sampled totality and box-orientation check over every node of the map.
/// 1-D piecewise nodes additionally get an exact coverage analysis.
pub fn validate(map: &SetValuedMap) -> Result<()> {
    check_coverage(map)?;
    for x in validation_points(map) {
        map.evaluate(&x)?;
    }
    Ok(())
}

fn check_coverage(map: &SetValuedMap) -> Result<()> {
    match map.kind() {
        MapKind::Piecewise(p) => match p.uncovered_point() {
            Some(w) => Err(Error::EmptyImage(vec![w])),
            None => Ok(()),
        },
        MapKind::Product(f, g) | MapKind::Union(f, g) => {
            check_coverage(f)?;
            check_coverage(g)
        }
        MapKind::Builtin(_) => Ok(()),
    }
}

fn validation_points(map: &SetValuedMap) -> Vec<Vec<f64>> {
    let n = map.dim();
    let candidates: Vec<Vec<f64>> = map
        .breakpoints()
        .into_iter()
        .map(|bps| {
            let mut c = vec![0.0, -1.0, 1.0];
            for b in bps {
                let eps = 1e-6 * b.abs().max(1.0);
                c.extend([b, b - eps, b + eps]);
            }
            c.sort_by(f64::total_cmp);
            c.dedup();
            c
        })
        .collect();
    let mut points = Vec::new();
    let grid_size = candidates
        .iter()
        .map(Vec::len)
        .try_fold(1usize, |acc, l| acc.checked_mul(l));
    if grid_size.is_some_and(|g| g <= 4096) {
        points = candidates.iter().fold(vec![Vec::new()], |acc, c| {
            acc.into_iter()
                .flat_map(|p: Vec<f64>| {
                    c.iter().map(move |v| {
                        let mut q = p.clone();
                        q.push(*v);
                        q
                    })
                })
                .collect()
        });
    } else {
        for (j, c) in candidates.iter().enumerate() {
            for v in c {
                let mut p = vec![0.0; n];
                p[j] = *v;
                points.push(p);
            }
        }
    }
    let scale = candidates.iter().flatten().fold(10.0f64, |m, v| m.max(2.0 * v.abs()));
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    for _ in 0..256 {
        points.push((0..n).map(|_| rng.gen_range(-scale..=scale)).collect());
    }
    points
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct MapFile {
    dim: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pieces: Option<Vec<PieceFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    product: Option<Vec<MapFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    union: Option<Vec<MapFile>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    builtin: Option<BuiltinFile>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    growth: Option<GrowthFile>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PieceFile {
    region: Vec<ConditionFile>,
    image: Vec<Vec<[String; 2]>>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ConditionFile {
    var: usize,
    op: Comparator,
    bound: f64,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct BuiltinFile {
    name: String,
    #[serde(default)]
    params: Map<String, Value>,
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct GrowthFile {
    #[serde(rename = "A")]
    a: f64,
    #[serde(rename = "B")]
    b: f64,
}

/// Parse and validate a map file.
pub fn parse_map(src: &str) -> Result<SetValuedMap> {
    let file: MapFile = serde_json::from_str(src).map_err(|e| Error::MapFile(e.to_string()))?;
    let map = build(file)?;
    validate(&map)?;
    Ok(map)
}

pub fn load_map(path: &std::path::Path) -> Result<SetValuedMap> {
    parse_map(&std::fs::read_to_string(path)?)
}

fn build(file: MapFile) -> Result<SetValuedMap> {
    let growth = file.growth.map(|g| Growth::new(g.a, g.b)).transpose()?;
    let kinds = [
        file.pieces.is_some(),
        file.product.is_some(),
        file.union.is_some(),
        file.builtin.is_some(),
    ];
    if kinds.iter().filter(|k| **k).count() != 1 {
        return Err(Error::MapFile(
            "each map node needs exactly one of `pieces`, `product`, `union`, `builtin`".into(),
        ));
    }
    let map = if let Some(pieces) = file.pieces {
        let pieces = pieces
            .into_iter()
            .map(|p| {
                let region = Region::new(
                    p.region
                        .into_iter()
                        .map(|c| {
                            if c.var == 0 {
                                return Err(Error::MapFile("region `var` is 1-based".into()));
                            }
                            Ok(Condition::new(c.var - 1, c.op, c.bound))
                        })
                        .collect::<Result<_>>()?,
                );
                let image = p
                    .image
                    .into_iter()
                    .map(|b| {
                        b.into_iter()
                            .map(|[l, h]| Ok((parse_expr(&l)?, parse_expr(&h)?)))
                            .collect::<Result<Vec<_>>>()
                    })
                    .collect::<Result<_>>()?;
                Ok(Piece::new(region, image))
            })
            .collect::<Result<_>>()?;
        SetValuedMap::piecewise(PieceList::new(file.dim, pieces)?)
    } else if let Some(pair) = file.product {
        let [f, g] = two(pair, "product")?;
        let m = SetValuedMap::product(&build(f)?, &build(g)?);
        if m.dim() != file.dim {
            return Err(Error::MapFile(format!(
                "product of dims summing to {} declared as dim {}",
                m.dim(),
                file.dim
            )));
        }
        m
    } else if let Some(pair) = file.union {
        let [f, g] = two(pair, "union")?;
        let m = SetValuedMap::union(&build(f)?, &build(g)?)?;
        check_dim(file.dim, m.dim())?;
        m
    } else {
        let b = file.builtin.expect("checked above");
        let param = |key: &str| -> Result<Option<usize>> {
            match b.params.get(key) {
                None => Ok(None),
                Some(v) => v
                    .as_u64()
                    .map(|u| Some(u as usize))
                    .ok_or_else(|| Error::InvalidParams {
                        name: b.name.clone(),
                        reason: format!("`{key}` must be a nonnegative integer"),
                    }),
            }
        };
        if let Some(k) = b.params.keys().find(|k| *k != "n" && *k != "k") {
            return Err(Error::InvalidParams {
                name: b.name.clone(),
                reason: format!("unknown parameter `{k}`"),
            });
        }
        let m = SetValuedMap::by_name(&b.name, param("n")?, param("k")?)?;
        check_dim(file.dim, m.dim())?;
        m
    };
    Ok(match growth {
        Some(g) => map.with_growth(Some(g)),
        None => map,
    })
}

fn two(v: Vec<MapFile>, what: &str) -> Result<[MapFile; 2]> {
    v.try_into()
        .map_err(|_| Error::MapFile(format!("`{what}` takes exactly two maps")))
}

fn unbuild(map: &SetValuedMap) -> MapFile {
    let mut file = MapFile {
        dim: map.dim(),
        pieces: None,
        product: None,
        union: None,
        builtin: None,
        growth: map.growth().map(|g| GrowthFile { a: g.a, b: g.b }),
    };
    match map.kind() {
        MapKind::Builtin(b) => {
            if let Some(encoded) = b.to_pieces() {
                return unbuild(&encoded);
            }
            let mut params = Map::new();
            if let Builtin::NormGrad { n, k } = b {
                params.insert("n".into(), (*n).into());
                params.insert("k".into(), (*k).into());
            }
            file.builtin = Some(BuiltinFile {
                name: b.name().to_string(),
                params,
            });
        }
        MapKind::Piecewise(p) => {
            file.pieces = Some(
                p.pieces()
                    .iter()
                    .map(|piece| PieceFile {
                        region: piece
                            .region
                            .conditions()
                            .iter()
                            .map(|c| ConditionFile {
                                var: c.var + 1,
                                op: c.op,
                                bound: c.bound,
                            })
                            .collect(),
                        image: piece
                            .image
                            .iter()
                            .map(|b| b.iter().map(|(l, h)| [l.to_string(), h.to_string()]).collect())
                            .collect(),
                    })
                    .collect(),
            );
        }
        MapKind::Product(f, g) => file.product = Some(vec![unbuild(f), unbuild(g)]),
        MapKind::Union(f, g) => file.union = Some(vec![unbuild(f), unbuild(g)]),
    }
    file
}

/// Serialize a map to the file format. Builtins expressible in the grammar
/// are emitted as their piece encoding.
pub fn to_text(map: &SetValuedMap) -> String {
    serde_json::to_string_pretty(&unbuild(map)).expect("map file serializes")
}
