//! The d-dimensional generalized binary search game.
//!
//! An algorithm searches for a hidden point of a finite grid. Each query `q`
//! is answered either "found" or by a reply corner: one claim per axis that the
//! target lies below `q` or not below it, at least one of which is true. The
//! crate provides the game semantics, closed-form bounds, search strategies,
//! adversary policies, an exact minimax solver for small grids, and an
//! evaluator that measures strategies.

pub mod adversaries;
pub mod bitset;
pub mod bounds;
pub mod error;
pub mod evaluator;
pub mod game;
pub mod solver;
pub mod strategies;

pub use adversaries::{Adversary, AdversaryKind, AnyAdversary, Greedy, Honest, SurfaceAdversary};
pub use bounds::BoundsReport;
pub use error::{Error, Result};
pub use evaluator::{run_match, worst_case, EvaluationReport, Outcome, Transcript};
pub use game::{CandidateSet, GridBox, GridShape, Point, Reply, ReplyCorner};
pub use solver::{best_response, exact_qc, SolveOptions, SolveReport, Solver};
pub use strategies::{AnyStrategy, Step, Strategy, StrategyKind};
