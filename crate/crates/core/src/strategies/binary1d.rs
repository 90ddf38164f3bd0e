use super::{corner_of, push_num, Step, Strategy};
use crate::error::{Error, Result};
use crate::game::{GridShape, Point, Reply};

/// Classical binary search along one free axis, all other coordinates fixed.
///
/// Queries the floor midpoint of the live interval; a corner whose bit on the
/// free axis is 0 (target above) keeps the upper half, bit 1 the lower half.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LineSearch {
    base: Point,
    axis: usize,
    lo: i64,
    hi: i64,
}

impl LineSearch {
    /// Search `base` with coordinate `axis` ranging over `lo..=hi`.
    pub fn new(base: Point, axis: usize, lo: usize, hi: usize) -> Self {
        Self {
            base,
            axis,
            lo: lo as i64,
            hi: hi as i64,
        }
    }

    pub fn axis(&self) -> usize {
        self.axis
    }

    pub fn is_done(&self) -> bool {
        self.lo > self.hi
    }

    pub fn query(&self) -> Option<Point> {
        if self.is_done() {
            return None;
        }
        let mid = (self.lo + self.hi).div_euclid(2) as usize;
        Some(self.base.with(self.axis, mid))
    }

    /// Narrows the interval; `below` is the reply bit on the free axis.
    pub fn narrow(&mut self, below: bool) {
        let mid = (self.lo + self.hi).div_euclid(2);
        if below {
            self.hi = mid - 1;
        } else {
            self.lo = mid + 1;
        }
    }

    pub(crate) fn write_key(&self, out: &mut Vec<u8>) {
        for &c in self.base.coords() {
            push_num(out, c as i64);
        }
        push_num(out, self.axis as i64);
        push_num(out, self.lo);
        push_num(out, self.hi);
    }
}

/// Binary search on a shape with at most one axis longer than 1.
#[derive(Clone, Debug)]
pub struct Binary1d {
    shape: GridShape,
    line: LineSearch,
    found: bool,
}

impl Binary1d {
    pub fn new(shape: &GridShape) -> Result<Self> {
        let free: Vec<usize> = (0..shape.dim()).filter(|&i| shape.size(i) > 1).collect();
        if free.len() > 1 {
            return Err(Error::Argument(format!(
                "binary1d needs at most one free axis, {shape} has {}",
                free.len()
            )));
        }
        let axis = free.first().copied().unwrap_or(0);
        let base = Point::new(std::iter::repeat_n(0, shape.dim()));
        Ok(Self {
            shape: shape.clone(),
            line: LineSearch::new(base, axis, 0, shape.size(axis) - 1),
            found: false,
        })
    }
}

impl Strategy for Binary1d {
    fn id(&self) -> &'static str {
        "binary1d"
    }

    fn shape(&self) -> &GridShape {
        &self.shape
    }

    fn next_step(&self) -> Step {
        if self.found {
            return Step::Exhausted;
        }
        self.line.query().map_or(Step::Exhausted, Step::Query)
    }

    fn observe(&mut self, reply: &Reply) -> Result<()> {
        if self.line.is_done() || self.found {
            return Err(Error::Protocol("reply after the search ended".into()));
        }
        match corner_of(reply, self.shape.dim())? {
            None => self.found = true,
            Some(c) => self.line.narrow(c.bit(self.line.axis())),
        }
        Ok(())
    }

    fn key(&self) -> Vec<u8> {
        let mut out = vec![b'b', self.found as u8];
        self.line.write_key(&mut out);
        out
    }
}
