//! Euler polygons and condition checkers for autonomous differential
//! inclusions `ẋ(t) ∈ F(x(t))`, `x(0) = x₀`, where `F` has compact images given
//! as finite unions of axis-aligned boxes.
//!
//! - [`setmap`]: box-union sets, set-valued maps, built-in example maps, and
//!   the product/union combinators.
//! - [`mapdsl`]: the JSON map-file format and its expression grammar.
//! - [`selector`]: the sign-constrained velocity choice at each Euler step.
//! - [`solver`]: Euler polygons, a-priori bounds, mesh refinement studies.
//! - [`analyzer`]: exact per-sample checks of the weak componentwise
//!   monotonicity condition, monotonicity and cyclic monotonicity, plus growth
//!   and closed-graph heuristics and trajectory diagnostics.
//!
//! ```
//! use dinclusion::{solver, EulerOptions, SetValuedMap};
//!
//! let map = SetValuedMap::by_name("example4", Some(2), None).unwrap();
//! let opts = EulerOptions::default().with_v0(vec![-1.0, -1.0]);
//! let traj = solver::euler_polygon(&map, &[-1.0, -0.5], 1.0, 16, &opts).unwrap();
//! assert_eq!(traj.terminal(), &[-2.0, -1.5]);
//! ```

pub mod analyzer;
pub mod error;
pub mod mapdsl;
pub mod selector;
pub mod setmap;
pub mod solver;

pub use error::{Error, InfeasibleCertificate, Result};
pub use selector::{PolicyKind, SelectionPolicy, SignPattern};
pub use setmap::{Builtin, CompactSet, Growth, Hyperbox, SetValuedMap};
pub use solver::{EulerOptions, Trajectory};
