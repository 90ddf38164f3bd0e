//! Reply-side policies.
//!
//! Every adversary owns the set of targets it still considers possible and
//! answers [`Reply::Found`] only when that set is exactly the queried point
//! (honest adversaries: when the query hits their target).

mod surfaces;

use std::fmt;
use std::str::FromStr;

pub use surfaces::{CubeHyperplaneSpec, DiagonalSpec, HyperplaneSpec3D, Surface};

use crate::error::{Error, Result};
use crate::game::{is_compatible, CandidateSet, GridShape, Point, Reply, ReplyCorner};
use crate::solver::OptimalAdversary;

pub trait Adversary: Clone {
    fn id(&self) -> &'static str;

    fn reply(&mut self, q: &Point) -> Result<Reply>;

    /// Canonical encoding of the entire internal state.
    fn key(&self) -> Vec<u8>;

    /// The adversary's own set of still-possible targets.
    fn candidates(&self) -> &CandidateSet;

    /// Surface announced to the searcher, if the policy hides its target on one.
    fn metadata(&self) -> Option<Surface> {
        None
    }
}

/// Valid corner maximizing the remainder, ties to the lexicographically smallest.
fn largest_remainder(
    p: &CandidateSet,
    q: &Point,
    allowed: impl Fn(ReplyCorner) -> bool,
) -> Result<Option<ReplyCorner>> {
    let mut best: Option<(usize, ReplyCorner)> = None;
    for r in ReplyCorner::all(p.shape().dim()) {
        if !allowed(r) {
            continue;
        }
        let left = p.remainder_len(q, r)?;
        if left > 0 && best.is_none_or(|(b, _)| left > b) {
            best = Some((left, r));
        }
    }
    Ok(best.map(|(_, r)| r))
}

/// Generic strong adversary: keeps as many potential targets as possible.
#[derive(Clone, Debug)]
pub struct Greedy {
    p: CandidateSet,
}

impl Greedy {
    pub fn new(shape: &GridShape) -> Self {
        Self {
            p: CandidateSet::full(shape),
        }
    }

    pub fn from_candidates(p: CandidateSet) -> Result<Self> {
        if p.is_empty() {
            return Err(Error::State("greedy adversary needs candidates".into()));
        }
        Ok(Self { p })
    }
}

impl Adversary for Greedy {
    fn id(&self) -> &'static str {
        "greedy"
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        self.p.shape().validate(q)?;
        if self.p.single().as_ref() == Some(q) {
            return Ok(Reply::Found);
        }
        let r = largest_remainder(&self.p, q, |_| true)?
            .ok_or_else(|| Error::Invariant(format!("no valid corner at {q} with {} candidates", self.p.len())))?;
        self.p = self.p.apply_reply(q, r)?;
        Ok(Reply::Corner(r))
    }

    fn key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.p.write_key(&mut out);
        out
    }

    fn candidates(&self) -> &CandidateSet {
        &self.p
    }
}

/// Adversary committed to a target, greedy among the truthful replies.
#[derive(Clone, Debug)]
pub struct Honest {
    target: Point,
    p: CandidateSet,
}

impl Honest {
    pub fn new(shape: &GridShape, target: Point) -> Result<Self> {
        shape.validate(&target)?;
        Ok(Self {
            target,
            p: CandidateSet::full(shape),
        })
    }

    pub fn target(&self) -> &Point {
        &self.target
    }
}

impl Adversary for Honest {
    fn id(&self) -> &'static str {
        "honest"
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        self.p.shape().validate(q)?;
        if *q == self.target {
            return Ok(Reply::Found);
        }
        let t = &self.target;
        let r = largest_remainder(&self.p, q, |r| is_compatible(t, q, r).unwrap_or(false))?
            .ok_or_else(|| Error::Invariant(format!("target {t} lost before query {q}")))?;
        self.p = self.p.apply_reply(q, r)?;
        Ok(Reply::Corner(r))
    }

    fn key(&self) -> Vec<u8> {
        let mut out: Vec<u8> = self
            .target
            .coords()
            .iter()
            .flat_map(|&c| (c as u32).to_le_bytes())
            .collect();
        self.p.write_key(&mut out);
        out
    }

    fn candidates(&self) -> &CandidateSet {
        &self.p
    }
}

/// Replays a fixed reply sequence; used to re-drive recorded matches.
#[derive(Clone, Debug)]
pub struct Scripted {
    p: CandidateSet,
    replies: Vec<Reply>,
    pos: usize,
}

impl Scripted {
    pub fn new(shape: &GridShape, replies: Vec<Reply>) -> Self {
        Self {
            p: CandidateSet::full(shape),
            replies,
            pos: 0,
        }
    }
}

impl Adversary for Scripted {
    fn id(&self) -> &'static str {
        "scripted"
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        let r = *self
            .replies
            .get(self.pos)
            .ok_or_else(|| Error::State("script exhausted".into()))?;
        self.pos += 1;
        if let Reply::Corner(c) = r {
            self.p = self.p.apply_reply(q, c)?;
        }
        Ok(r)
    }

    fn key(&self) -> Vec<u8> {
        (self.pos as u64).to_le_bytes().to_vec()
    }

    fn candidates(&self) -> &CandidateSet {
        &self.p
    }
}

/// Lower-bound adversary hiding the target on a monotone surface.
///
/// Queries strictly below the surface get the all-zeros corner and queries
/// above it the all-ones corner; neither removes a surface point. Queries on
/// the surface get one of those two corners: the one keeping more candidates
/// (ties to all-zeros) for the diagonal and the 3D plane, the residue rule for
/// the cube.
#[derive(Clone, Debug)]
pub struct SurfaceAdversary {
    surface: Surface,
    c: CandidateSet,
}

impl SurfaceAdversary {
    pub fn new(surface: Surface) -> Self {
        Self {
            c: surface.members(),
            surface,
        }
    }

    pub fn diagonal(shape: &GridShape) -> Result<Self> {
        match *shape.dims() {
            [m, n] => Ok(Self::new(Surface::Diagonal(DiagonalSpec::new(m, n)?))),
            _ => Err(Error::Argument(format!(
                "diagonal adversary needs a 2D shape, got {shape}"
            ))),
        }
    }

    pub fn plane3d(shape: &GridShape) -> Result<Self> {
        match *shape.dims() {
            [n1, n2, n3] => Ok(Self::new(Surface::Plane(HyperplaneSpec3D::new(n1, n2, n3)?))),
            _ => Err(Error::Argument(format!(
                "plane adversary needs a 3D shape, got {shape}"
            ))),
        }
    }

    pub fn cube(shape: &GridShape) -> Result<Self> {
        let n = shape.size(0);
        if shape.dims().iter().any(|&x| x != n) {
            return Err(Error::Argument(format!("cube adversary needs a cube, got {shape}")));
        }
        Ok(Self::new(Surface::Cube(CubeHyperplaneSpec::new(n, shape.dim())?)))
    }

    pub fn surface(&self) -> Surface {
        self.surface
    }

    fn on_surface_corner(&self, q: &Point) -> Result<ReplyCorner> {
        let d = q.dim();
        let (zeros, ones) = (ReplyCorner::zeros(d), ReplyCorner::ones(d));
        let keep_zeros = self.c.remainder_len(q, zeros)?;
        let keep_ones = self.c.remainder_len(q, ones)?;
        let keep_larger = if keep_ones > keep_zeros { ones } else { zeros };
        match self.surface {
            Surface::Diagonal(_) | Surface::Plane(_) => Ok(keep_larger),
            Surface::Cube(spec) => {
                let k = spec.d - 1;
                let l = q.coords().iter().sum::<usize>() % k;
                let preferred = if l == 0 || 2 * l > k { ones } else { zeros };
                let kept = if preferred == ones { keep_ones } else { keep_zeros };
                // the rule's corner may not empty the candidate set
                Ok(if kept > 0 { preferred } else { preferred.complement() })
            }
        }
    }
}

impl Adversary for SurfaceAdversary {
    fn id(&self) -> &'static str {
        self.surface.name()
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        self.c.shape().validate(q)?;
        if self.c.single().as_ref() == Some(q) {
            return Ok(Reply::Found);
        }
        let d = q.dim();
        let height = self.surface.height_at(q);
        let level = q.get(self.surface.height_axis());
        let r = if level < height {
            ReplyCorner::zeros(d)
        } else if level > height {
            ReplyCorner::ones(d)
        } else {
            self.on_surface_corner(q)?
        };
        let next = self.c.apply_reply(q, r)?;
        if next.is_empty() {
            return Err(Error::Invariant(format!(
                "{} adversary emptied its surface at {q}",
                self.id()
            )));
        }
        self.c = next;
        Ok(Reply::Corner(r))
    }

    fn key(&self) -> Vec<u8> {
        let mut out = Vec::new();
        self.c.write_key(&mut out);
        out
    }

    fn candidates(&self) -> &CandidateSet {
        &self.c
    }

    fn metadata(&self) -> Option<Surface> {
        Some(self.surface)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum AdversaryKind {
    Greedy,
    Diagonal,
    Plane3d,
    Cube,
    Optimal,
    Honest,
}

impl AdversaryKind {
    pub const ALL: [AdversaryKind; 6] = [
        Self::Greedy,
        Self::Diagonal,
        Self::Plane3d,
        Self::Cube,
        Self::Optimal,
        Self::Honest,
    ];

    /// The three surface constructions.
    pub const CONSTRUCTIONS: [AdversaryKind; 3] = [Self::Diagonal, Self::Plane3d, Self::Cube];

    pub fn name(&self) -> &'static str {
        match self {
            Self::Greedy => "greedy",
            Self::Diagonal => "diagonal",
            Self::Plane3d => "plane3d",
            Self::Cube => "cube",
            Self::Optimal => "optimal",
            Self::Honest => "honest",
        }
    }

    /// Builds a surface or greedy adversary; `optimal` and `honest` need extra input.
    pub fn build(&self, shape: &GridShape) -> Result<AnyAdversary> {
        match self {
            Self::Greedy => Ok(AnyAdversary::Greedy(Greedy::new(shape))),
            Self::Diagonal => Ok(AnyAdversary::Surface(SurfaceAdversary::diagonal(shape)?)),
            Self::Plane3d => Ok(AnyAdversary::Surface(SurfaceAdversary::plane3d(shape)?)),
            Self::Cube => Ok(AnyAdversary::Surface(SurfaceAdversary::cube(shape)?)),
            Self::Optimal | Self::Honest => Err(Error::Argument(format!(
                "{} adversary cannot be built from a shape alone",
                self.name()
            ))),
        }
    }
}

impl fmt::Display for AdversaryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for AdversaryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Self::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::Argument(format!("unknown adversary '{s}'")))
    }
}

#[derive(Clone, Debug)]
pub enum AnyAdversary {
    Greedy(Greedy),
    Honest(Honest),
    Surface(SurfaceAdversary),
    Optimal(OptimalAdversary),
    Scripted(Scripted),
}

macro_rules! dispatch {
    ($self:expr, $a:ident => $e:expr) => {
        match $self {
            AnyAdversary::Greedy($a) => $e,
            AnyAdversary::Honest($a) => $e,
            AnyAdversary::Surface($a) => $e,
            AnyAdversary::Optimal($a) => $e,
            AnyAdversary::Scripted($a) => $e,
        }
    };
}

macro_rules! any_from {
    ($($variant:ident($ty:ty)),*) => {
        $(impl From<$ty> for AnyAdversary {
            fn from(a: $ty) -> Self {
                AnyAdversary::$variant(a)
            }
        })*
    };
}

any_from!(
    Greedy(Greedy),
    Honest(Honest),
    Surface(SurfaceAdversary),
    Optimal(OptimalAdversary),
    Scripted(Scripted)
);

impl Adversary for AnyAdversary {
    fn id(&self) -> &'static str {
        dispatch!(self, a => a.id())
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        dispatch!(self, a => a.reply(q))
    }

    fn key(&self) -> Vec<u8> {
        dispatch!(self, a => a.key())
    }

    fn candidates(&self) -> &CandidateSet {
        dispatch!(self, a => a.candidates())
    }

    fn metadata(&self) -> Option<Surface> {
        dispatch!(self, a => a.metadata())
    }
}
