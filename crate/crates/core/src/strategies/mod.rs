//! Deterministic Algorithm-side policies.
//!
//! A strategy is a state machine: [`Strategy::next_step`] names the next query
//! (or reports that its search space is exhausted), [`Strategy::observe`] feeds
//! the reply back, and [`Strategy::key`] encodes the full state so that equal
//! keys imply identical future behaviour.

mod binary1d;
mod grid2d;
mod slicing;

use std::fmt;
use std::str::FromStr;

pub use binary1d::{Binary1d, LineSearch};
pub use grid2d::{segment_binary_search, Grid2d, Rect, SegmentSearch, SegmentSearchOutcome};
pub use slicing::Slicing;

use crate::error::{Error, Result};
use crate::game::{GridShape, Point, Reply, ReplyCorner};

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Step {
    Query(Point),
    Exhausted,
}

pub trait Strategy: Clone {
    fn id(&self) -> &'static str;

    fn shape(&self) -> &GridShape;

    fn next_step(&self) -> Step;

    fn observe(&mut self, reply: &Reply) -> Result<()>;

    /// Canonical encoding of the entire internal state.
    fn key(&self) -> Vec<u8>;
}

pub(crate) fn push_num(out: &mut Vec<u8>, v: i64) {
    out.extend_from_slice(&(v as i32).to_le_bytes());
}

pub(crate) fn corner_of(reply: &Reply, dim: usize) -> Result<Option<ReplyCorner>> {
    match reply {
        Reply::Found => Ok(None),
        Reply::Corner(c) if c.dim() == dim => Ok(Some(*c)),
        Reply::Corner(c) => Err(Error::Protocol(format!(
            "corner {c} has {} bits, strategy plays in dimension {dim}",
            c.dim()
        ))),
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum StrategyKind {
    Binary1d,
    Grid2d,
    Slicing,
}

impl StrategyKind {
    pub const ALL: [StrategyKind; 3] = [Self::Binary1d, Self::Grid2d, Self::Slicing];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Binary1d => "binary1d",
            Self::Grid2d => "grid2d",
            Self::Slicing => "slicing",
        }
    }

    pub fn applies_to(&self, shape: &GridShape) -> bool {
        match self {
            Self::Binary1d => shape.dims().iter().filter(|&&n| n > 1).count() <= 1,
            Self::Grid2d => shape.dim() == 2,
            Self::Slicing => shape.dim() >= 3,
        }
    }

    pub fn applicable(shape: &GridShape) -> Vec<StrategyKind> {
        Self::ALL.into_iter().filter(|k| k.applies_to(shape)).collect()
    }

    pub fn build(&self, shape: &GridShape) -> Result<AnyStrategy> {
        Ok(match self {
            Self::Binary1d => AnyStrategy::Binary1d(Binary1d::new(shape)?),
            Self::Grid2d => AnyStrategy::Grid2d(Grid2d::new(shape)?),
            Self::Slicing => AnyStrategy::Slicing(Slicing::new(shape)?),
        })
    }
}

impl fmt::Display for StrategyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for StrategyKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown strategy '{s}'")))
    }
}

/// Any of the built-in strategies.
#[derive(Clone, Debug)]
pub enum AnyStrategy {
    Binary1d(Binary1d),
    Grid2d(Grid2d),
    Slicing(Slicing),
}

impl Strategy for AnyStrategy {
    fn id(&self) -> &'static str {
        match self {
            Self::Binary1d(s) => s.id(),
            Self::Grid2d(s) => s.id(),
            Self::Slicing(s) => s.id(),
        }
    }

    fn shape(&self) -> &GridShape {
        match self {
            Self::Binary1d(s) => s.shape(),
            Self::Grid2d(s) => s.shape(),
            Self::Slicing(s) => s.shape(),
        }
    }

    fn next_step(&self) -> Step {
        match self {
            Self::Binary1d(s) => s.next_step(),
            Self::Grid2d(s) => s.next_step(),
            Self::Slicing(s) => s.next_step(),
        }
    }

    fn observe(&mut self, reply: &Reply) -> Result<()> {
        match self {
            Self::Binary1d(s) => s.observe(reply),
            Self::Grid2d(s) => s.observe(reply),
            Self::Slicing(s) => s.observe(reply),
        }
    }

    fn key(&self) -> Vec<u8> {
        match self {
            Self::Binary1d(s) => s.key(),
            Self::Grid2d(s) => s.key(),
            Self::Slicing(s) => s.key(),
        }
    }
}
