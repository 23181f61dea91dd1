//! Certified enclosures of coefficient bounds for univalent functions.
//!
//! The crate encloses, with outward-rounded interval arithmetic, the global
//! maxima of the closed-form bound functions that control `|a4|`, `|a5|`,
//! `|H2(2)|`, `|H3(1)|` and coefficient differences under the conditions
//! `a2 = 0`, `a3 = 0` or oddness, and stress-tests those bounds by sampling
//! the truncated Grunsky coefficient feasibility region.
//!
//! * [`interval`]: directed-rounding interval arithmetic.
//! * [`expr`]: expression trees evaluated as points, intervals and duals.
//! * [`catalog`]: the registered bound problems.
//! * [`optimizer`]: branch-and-bound global maximization.
//! * [`grunsky`]: Grunsky coefficient algebra and the feasibility sampler.
//! * [`report`]: report types and the text, JSON and CSV renderers used by
//!   the command line tool.

pub mod catalog;
pub mod error;
pub mod expr;
pub mod grunsky;
pub mod interval;
pub mod optimizer;
pub mod report;
pub mod suite;

pub use catalog::{catalog, f6_edge_curves, BoundProblem, DomainSpec};
pub use error::{DomainError, Error, Result};
pub use expr::Expr;
pub use grunsky::{GrunskyWindow, Scenario};
pub use interval::Interval;
pub use optimizer::{maximize, verify_bound, Enclosure, OptimizerConfig, Status};
