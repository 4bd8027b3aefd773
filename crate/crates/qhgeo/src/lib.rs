//! Quasihyperbolic geometry on domains of finite-dimensional normed spaces.
//!
//! A domain `Ω ⊊ R^n` together with a norm induces the quasihyperbolic metric,
//! the path metric with length density `1/d(x)` where `d(x)` is the distance
//! from `x` to the boundary of `Ω`. Alongside it lives the distance-ratio
//! metric `j(x, y) = log(1 + ‖x−y‖ / (d(x) ∧ d(y)))`, a closed-form minorant
//! that shares its topology.
//!
//! The crate provides:
//!
//! - [`normed_space`]: (weighted) p-norms with `p ∈ [1, ∞]`, dual norms, and
//!   sampling estimators for the moduli of convexity and smoothness.
//! - [`domain`]: punctured spaces, half-spaces, convex polytopes and simple
//!   polygons, with exact boundary distance and segment clearance.
//! - [`paths`]: polylines, norm and quasihyperbolic length (adaptive Simpson),
//!   arclength reparameterizations, the j-metric, and path averaging.
//! - [`solver`]: quasihyperbolic distance brackets `[j, upper]` via grid
//!   shortest paths plus local polyline refinement.
//! - [`ball`]: metric-ball boundary tracing by ray bisection, starlikeness and
//!   convexity checks, and a non-convexity witness search for the punctured
//!   sup-norm plane.
//! - [`experiments`]: end-to-end experiment runners with plain-text reports,
//!   CSV and SVG outputs, surfaced by the `qhgeo` command-line tool.

pub mod ball;
pub mod config;
pub mod domain;
pub mod emit;
pub mod error;
pub mod experiments;
pub mod normed_space;
pub mod paths;
pub mod quadrature;
pub mod solver;

pub(crate) mod vecn;

pub use error::{Error, Result};
pub use normed_space::NormSpec;
pub use paths::{MetricKind, Polyline};
