use std::collections::VecDeque;

use super::binary1d::LineSearch;
use super::{corner_of, push_num, Step, Strategy};
use crate::error::{Error, Result};
use crate::game::{GridShape, Point, Reply};

/// Axis-aligned rectangle `[x.0, x.1] × [y.0, y.1]` of a 2D grid, non-empty.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Rect {
    pub x: (usize, usize),
    pub y: (usize, usize),
}

impl Rect {
    pub fn new(x: (usize, usize), y: (usize, usize)) -> Result<Self> {
        if x.0 > x.1 || y.0 > y.1 {
            return Err(Error::Argument(format!("empty rectangle {x:?} x {y:?}")));
        }
        Ok(Self { x, y })
    }

    /// The rectangle spanned by signed bounds, or `None` if it is empty.
    fn spanning(x: (i64, i64), y: (i64, i64)) -> Option<Self> {
        if x.0 > x.1 || y.0 > y.1 || x.0 < 0 || y.0 < 0 {
            return None;
        }
        Some(Self {
            x: (x.0 as usize, x.1 as usize),
            y: (y.0 as usize, y.1 as usize),
        })
    }

    pub fn whole(shape: &GridShape) -> Self {
        Self {
            x: (0, shape.size(0) - 1),
            y: (0, shape.size(1) - 1),
        }
    }

    pub fn width(&self) -> usize {
        self.x.1 - self.x.0 + 1
    }

    pub fn height(&self) -> usize {
        self.y.1 - self.y.0 + 1
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == 2 && (self.x.0..=self.x.1).contains(&p.get(0)) && (self.y.0..=self.y.1).contains(&p.get(1))
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        for v in [self.x.0, self.x.1, self.y.0, self.y.1] {
            push_num(out, v as i64);
        }
    }
}

/// Result of a binary search on a row segment.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SegmentSearchOutcome {
    pub m00: i64,
    pub m01: i64,
    pub m10: i64,
    pub m11: i64,
    /// Remaining cells below the row.
    pub g0: Option<Rect>,
    /// Remaining cells above the row.
    pub g1: Option<Rect>,
    pub found: Option<Point>,
}

impl SegmentSearchOutcome {
    /// `max{m00, m01} + 1 = min{m10, m11}`.
    pub fn markers_meet(&self) -> bool {
        self.m00.max(self.m01) + 1 == self.m10.min(self.m11)
    }
}

/// Binary search on the segment `[x.0, x.1] × {row}` of a rectangle.
///
/// The markers follow the reply corners: `m00`/`m01` record the largest
/// queried column answered `(0,0)`/`(0,1)`, `m10`/`m11` the smallest answered
/// `(1,0)`/`(1,1)`, with sentinels one step outside the segment.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct SegmentSearch {
    rect: Rect,
    row: usize,
    lo: i64,
    hi: i64,
    m00: i64,
    m01: i64,
    m10: i64,
    m11: i64,
}

impl SegmentSearch {
    pub fn new(rect: Rect, row: usize) -> Result<Self> {
        if !(rect.y.0..=rect.y.1).contains(&row) {
            return Err(Error::Argument(format!("row {row} outside {rect:?}")));
        }
        let (x1, x2) = (rect.x.0 as i64, rect.x.1 as i64);
        Ok(Self {
            rect,
            row,
            lo: x1,
            hi: x2,
            m00: x1 - 1,
            m01: x1 - 1,
            m10: x2 + 1,
            m11: x2 + 1,
        })
    }

    /// Search on the middle row `⌊(y.0 + y.1) / 2⌋`.
    pub fn middle(rect: Rect) -> Self {
        Self::new(rect, (rect.y.0 + rect.y.1) / 2).expect("middle row lies in the rectangle")
    }

    pub fn is_done(&self) -> bool {
        self.lo > self.hi
    }

    fn mid(&self) -> i64 {
        (self.lo + self.hi).div_euclid(2)
    }

    pub fn query(&self) -> Option<Point> {
        (!self.is_done()).then(|| Point::from([self.mid() as usize, self.row]))
    }

    pub fn narrow(&mut self, right_bit: bool, up_bit: bool) {
        let mid = self.mid();
        match (right_bit, up_bit) {
            (false, false) => self.m00 = self.m00.max(mid),
            (false, true) => self.m01 = self.m01.max(mid),
            (true, false) => self.m10 = self.m10.min(mid),
            (true, true) => self.m11 = self.m11.min(mid),
        }
        if right_bit {
            self.hi = mid - 1;
        } else {
            self.lo = mid + 1;
        }
    }

    /// Byproduct grids from the markers collected so far.
    pub fn outcome(&self, found: Option<Point>) -> SegmentSearchOutcome {
        let row = self.row as i64;
        let (y1, y2) = (self.rect.y.0 as i64, self.rect.y.1 as i64);
        SegmentSearchOutcome {
            m00: self.m00,
            m01: self.m01,
            m10: self.m10,
            m11: self.m11,
            g0: Rect::spanning((self.m00 + 1, self.m10 - 1), (y1, row - 1)),
            g1: Rect::spanning((self.m01 + 1, self.m11 - 1), (row + 1, y2)),
            found,
        }
    }

    fn write_key(&self, out: &mut Vec<u8>) {
        self.rect.write_key(out);
        for v in [
            self.row as i64,
            self.lo,
            self.hi,
            self.m00,
            self.m01,
            self.m10,
            self.m11,
        ] {
            push_num(out, v);
        }
    }
}

/// Runs a full segment search, asking `oracle` for each reply.
pub fn segment_binary_search<F>(rect: Rect, row: usize, mut oracle: F) -> Result<SegmentSearchOutcome>
where
    F: FnMut(&Point) -> Result<Reply>,
{
    let mut search = SegmentSearch::new(rect, row)?;
    while let Some(q) = search.query() {
        match corner_of(&oracle(&q)?, 2)? {
            None => return Ok(search.outcome(Some(q))),
            Some(c) => search.narrow(c.bit(0), c.bit(1)),
        }
    }
    Ok(search.outcome(None))
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
enum Phase {
    Segment(SegmentSearch),
    Line(LineSearch),
    Exhausted,
    Found,
}

/// Recursive 2D strategy: segment search on the middle row of each pending
/// rectangle, then the byproduct grids in FIFO order (`G0` before `G1`).
/// Rectangles of height or width 1 are searched along their free axis.
#[derive(Clone, Debug)]
pub struct Grid2d {
    shape: GridShape,
    pending: VecDeque<Rect>,
    phase: Phase,
}

impl Grid2d {
    pub fn new(shape: &GridShape) -> Result<Self> {
        if shape.dim() != 2 {
            return Err(Error::Argument(format!("grid2d needs a 2D shape, got {shape}")));
        }
        let mut s = Self {
            shape: shape.clone(),
            pending: VecDeque::from([Rect::whole(shape)]),
            phase: Phase::Exhausted,
        };
        s.advance();
        Ok(s)
    }

    /// Moves to the next pending rectangle once the current phase has finished.
    fn advance(&mut self) {
        let finished = match &self.phase {
            Phase::Segment(s) => s.is_done(),
            Phase::Line(l) => l.is_done(),
            Phase::Exhausted => true,
            Phase::Found => false,
        };
        if !finished {
            return;
        }
        if let Phase::Segment(s) = &self.phase {
            let out = s.outcome(None);
            self.pending.extend(out.g0);
            self.pending.extend(out.g1);
        }
        self.phase = match self.pending.pop_front() {
            None => Phase::Exhausted,
            Some(r) if r.height() == 1 => Phase::Line(LineSearch::new(Point::from([0, r.y.0]), 0, r.x.0, r.x.1)),
            Some(r) if r.width() == 1 => Phase::Line(LineSearch::new(Point::from([r.x.0, 0]), 1, r.y.0, r.y.1)),
            Some(r) => Phase::Segment(SegmentSearch::middle(r)),
        };
    }

    pub fn pending(&self) -> impl Iterator<Item = &Rect> {
        self.pending.iter()
    }
}

impl Strategy for Grid2d {
    fn id(&self) -> &'static str {
        "grid2d"
    }

    fn shape(&self) -> &GridShape {
        &self.shape
    }

    fn next_step(&self) -> Step {
        let q = match &self.phase {
            Phase::Segment(s) => s.query(),
            Phase::Line(l) => l.query(),
            Phase::Exhausted | Phase::Found => None,
        };
        q.map_or(Step::Exhausted, Step::Query)
    }

    fn observe(&mut self, reply: &Reply) -> Result<()> {
        let corner = corner_of(reply, 2)?;
        match (&mut self.phase, corner) {
            (Phase::Exhausted | Phase::Found, _) => return Err(Error::Protocol("reply after the search ended".into())),
            (_, None) => self.phase = Phase::Found,
            (Phase::Segment(s), Some(c)) => s.narrow(c.bit(0), c.bit(1)),
            (Phase::Line(l), Some(c)) => {
                let axis = l.axis();
                l.narrow(c.bit(axis))
            }
        }
        self.advance();
        Ok(())
    }

    fn key(&self) -> Vec<u8> {
        let mut out = vec![b'g'];
        match &self.phase {
            Phase::Segment(s) => {
                out.push(0);
                s.write_key(&mut out);
            }
            Phase::Line(l) => {
                out.push(1);
                l.write_key(&mut out);
            }
            Phase::Exhausted => out.push(2),
            Phase::Found => out.push(3),
        }
        push_num(&mut out, self.pending.len() as i64);
        for r in &self.pending {
            r.write_key(&mut out);
        }
        out
    }
}
