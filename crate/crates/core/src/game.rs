//! Search space, reply semantics and the potential-target recurrence.
//!
//! A query on `q` is answered either with [`Reply::Found`] or with a
//! [`ReplyCorner`] `r`, where `r_i = 1` claims `t_i < q_i` and `r_i = 0`
//! claims `t_i > q_i`. The points inconsistent with a corner reply form the
//! box `X = X_1 × … × X_d` with `X_i = [0, q_i]` for `r_i = 0` and
//! `X_i = [q_i, n_i − 1]` for `r_i = 1`; the potential targets shrink as
//! `P_k = P_{k−1} \ X`.

use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::{Arc, OnceLock};

use serde::{Deserialize, Serialize};
use smallvec::SmallVec;

use crate::bitset::BitSet;
use crate::error::{check_dim, Error, Result};

pub(crate) type Coords = SmallVec<[usize; 4]>;

/// Largest dimension count for which reply corners are enumerable.
pub const MAX_CORNER_DIM: usize = 24;

/// The grid `S_1 × … × S_d` with `S_i = {0, …, n_i − 1}`.
///
/// Cells are indexed row-major in declared axis order (the last axis varies
/// fastest). Cloning is cheap; lookup tables are built lazily and shared.
#[derive(Clone)]
pub struct GridShape {
    inner: Arc<ShapeInner>,
}

struct ShapeInner {
    dims: Vec<usize>,
    strides: Vec<usize>,
    cells: usize,
    slabs: OnceLock<Slabs>,
}

/// `lower[i][v]`: cells with `x_i <= v`; `upper[i][v]`: cells with `x_i >= v`.
struct Slabs {
    lower: Vec<Vec<BitSet>>,
    upper: Vec<Vec<BitSet>>,
}

impl GridShape {
    pub fn new(dims: Vec<usize>) -> Result<Self> {
        if dims.is_empty() {
            return Err(Error::Argument("a shape needs at least one dimension".into()));
        }
        if let Some(i) = dims.iter().position(|&n| n == 0) {
            return Err(Error::Argument(format!("dimension {} has size 0", i + 1)));
        }
        let cells = dims
            .iter()
            .try_fold(1usize, |acc, &n| acc.checked_mul(n))
            .ok_or_else(|| Error::Argument("cell count overflows the machine word".into()))?;
        let mut strides = vec![1; dims.len()];
        for i in (0..dims.len().saturating_sub(1)).rev() {
            strides[i] = strides[i + 1] * dims[i + 1];
        }
        Ok(Self {
            inner: Arc::new(ShapeInner {
                dims,
                strides,
                cells,
                slabs: OnceLock::new(),
            }),
        })
    }

    pub fn dims(&self) -> &[usize] {
        &self.inner.dims
    }

    pub fn dim(&self) -> usize {
        self.inner.dims.len()
    }

    pub fn size(&self, axis: usize) -> usize {
        self.inner.dims[axis]
    }

    pub fn cell_count(&self) -> usize {
        self.inner.cells
    }

    pub fn is_sorted_desc(&self) -> bool {
        self.dims().windows(2).all(|w| w[0] >= w[1])
    }

    pub fn sorted_desc(&self) -> GridShape {
        let mut dims = self.dims().to_vec();
        dims.sort_unstable_by(|a, b| b.cmp(a));
        GridShape::new(dims).expect("permutation of a valid shape")
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim() && p.coords().iter().zip(self.dims()).all(|(&x, &n)| x < n)
    }

    pub fn validate(&self, p: &Point) -> Result<()> {
        check_dim(self.dim(), p.dim())?;
        if self.contains(p) {
            Ok(())
        } else {
            Err(Error::OutOfBounds {
                point: p.to_string(),
                shape: self.to_string(),
            })
        }
    }

    /// Row-major index of a point known to lie in the shape.
    #[inline]
    pub fn index_of(&self, p: &Point) -> usize {
        p.coords().iter().zip(&self.inner.strides).map(|(x, s)| x * s).sum()
    }

    pub fn point_at(&self, index: usize) -> Point {
        debug_assert!(index < self.cell_count());
        let coords = self
            .inner
            .strides
            .iter()
            .zip(self.dims())
            .map(|(&s, &n)| (index / s) % n)
            .collect();
        Point(coords)
    }

    /// All points in cell-index order.
    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.cell_count()).map(move |i| self.point_at(i))
    }

    fn slabs(&self) -> &Slabs {
        self.inner.slabs.get_or_init(|| {
            let cells = self.cell_count();
            let mut lower = Vec::with_capacity(self.dim());
            let mut upper = Vec::with_capacity(self.dim());
            for (axis, &n) in self.dims().iter().enumerate() {
                let mut lo = vec![BitSet::empty(cells); n];
                let mut hi = vec![BitSet::empty(cells); n];
                for cell in 0..cells {
                    let x = (cell / self.inner.strides[axis]) % n;
                    for set in &mut lo[x..] {
                        set.insert(cell);
                    }
                    for set in &mut hi[..=x] {
                        set.insert(cell);
                    }
                }
                lower.push(lo);
                upper.push(hi);
            }
            Slabs { lower, upper }
        })
    }

    /// Cells of the excluded box of corner `r` at `q`, as a bit set.
    ///
    /// `q` must lie in the shape and `r` must have the shape's dimension.
    pub fn box_cells(&self, q: &Point, r: ReplyCorner) -> BitSet {
        let slabs = self.slabs();
        let mut out = BitSet::full(self.cell_count());
        for (axis, &x) in q.coords().iter().enumerate() {
            let slab = if r.bit(axis) {
                &slabs.upper[axis][x]
            } else {
                &slabs.lower[axis][x]
            };
            out.intersect_with(slab);
        }
        out
    }
}

impl PartialEq for GridShape {
    fn eq(&self, other: &Self) -> bool {
        Arc::ptr_eq(&self.inner, &other.inner) || self.dims() == other.dims()
    }
}

impl Eq for GridShape {}

impl Hash for GridShape {
    fn hash<H: Hasher>(&self, state: &mut H) {
        self.dims().hash(state);
    }
}

impl fmt::Debug for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GridShape({self})")
    }
}

impl fmt::Display for GridShape {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.dims().iter().map(|n| n.to_string()).collect();
        f.write_str(&parts.join("x"))
    }
}

/// A grid element `(x_1, …, x_d)`.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(Coords);

impl Point {
    pub fn new(coords: impl IntoIterator<Item = usize>) -> Self {
        Point(coords.into_iter().collect())
    }

    pub fn coords(&self) -> &[usize] {
        &self.0
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn get(&self, axis: usize) -> usize {
        self.0[axis]
    }

    pub(crate) fn with(&self, axis: usize, value: usize) -> Point {
        let mut c = self.0.clone();
        c[axis] = value;
        Point(c)
    }
}

impl From<Vec<usize>> for Point {
    fn from(v: Vec<usize>) -> Self {
        Point(v.into_iter().collect())
    }
}

impl<const N: usize> From<[usize; N]> for Point {
    fn from(v: [usize; N]) -> Self {
        Point(v.into_iter().collect())
    }
}

impl fmt::Debug for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A corner reply `(r_1, …, r_d)`.
///
/// Stored as its rank in lexicographic order of bit vectors (`r_1` most
/// significant), so the derived ordering is the lexicographic one.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ReplyCorner {
    dim: u8,
    rank: u32,
}

impl ReplyCorner {
    pub fn new(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() || bits.len() > MAX_CORNER_DIM {
            return Err(Error::Argument(format!(
                "corner length {} outside 1..={MAX_CORNER_DIM}",
                bits.len()
            )));
        }
        let rank = bits.iter().fold(0u32, |acc, &b| (acc << 1) | b as u32);
        Ok(Self {
            dim: bits.len() as u8,
            rank,
        })
    }

    /// Corner with lexicographic rank `rank` among the `2^d` corners.
    pub fn from_rank(dim: usize, rank: u32) -> Self {
        assert!((1..=MAX_CORNER_DIM).contains(&dim) && (rank as u64) < (1u64 << dim));
        Self { dim: dim as u8, rank }
    }

    pub fn zeros(dim: usize) -> Self {
        Self::from_rank(dim, 0)
    }

    pub fn ones(dim: usize) -> Self {
        Self::from_rank(dim, ((1u64 << dim) - 1) as u32)
    }

    /// All `2^d` corners in lexicographic order.
    pub fn all(dim: usize) -> impl Iterator<Item = ReplyCorner> {
        assert!((1..=MAX_CORNER_DIM).contains(&dim));
        (0..(1u32 << dim)).map(move |rank| Self::from_rank(dim, rank))
    }

    pub fn dim(&self) -> usize {
        self.dim as usize
    }

    pub fn rank(&self) -> u32 {
        self.rank
    }

    /// `r_{axis+1}`: true claims `t < q` on that axis.
    #[inline]
    pub fn bit(&self, axis: usize) -> bool {
        (self.rank >> (self.dim as usize - 1 - axis)) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim()).map(|i| self.bit(i)).collect()
    }

    pub fn complement(&self) -> Self {
        Self {
            dim: self.dim,
            rank: !self.rank & (((1u64 << self.dim) - 1) as u32),
        }
    }

    /// The corner with `axis` removed, for forwarding to a lower-dimensional game.
    pub fn drop_axis(&self, axis: usize) -> Self {
        let bits: Vec<bool> = (0..self.dim()).filter(|&i| i != axis).map(|i| self.bit(i)).collect();
        Self::new(&bits).expect("dimension at least 2")
    }
}

impl fmt::Debug for ReplyCorner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for ReplyCorner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<&str> = self.bits().iter().map(|&b| if b { "1" } else { "0" }).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// A reply to a query: the target is found, or a corner.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Reply {
    Found,
    Corner(ReplyCorner),
}

impl Reply {
    pub fn corner(&self) -> Option<ReplyCorner> {
        match self {
            Reply::Found => None,
            Reply::Corner(c) => Some(*c),
        }
    }
}

impl fmt::Display for Reply {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Reply::Found => f.write_str("found"),
            Reply::Corner(c) => write!(f, "corner {c}"),
        }
    }
}

/// Product of closed integer intervals.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GridBox {
    intervals: SmallVec<[(usize, usize); 4]>,
}

impl GridBox {
    pub fn new(intervals: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let intervals: SmallVec<[(usize, usize); 4]> = intervals.into_iter().collect();
        if intervals.iter().any(|&(lo, hi)| lo > hi) {
            return Err(Error::Argument("interval with lo > hi".into()));
        }
        Ok(Self { intervals })
    }

    pub fn intervals(&self) -> &[(usize, usize)] {
        &self.intervals
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.intervals.len()
            && p.coords()
                .iter()
                .zip(&self.intervals)
                .all(|(&x, &(lo, hi))| lo <= x && x <= hi)
    }

    pub fn cell_count(&self) -> usize {
        self.intervals.iter().map(|&(lo, hi)| hi - lo + 1).product()
    }
}

/// The box of points inconsistent with corner reply `r` to a query on `q`.
pub fn excluded_box(shape: &GridShape, q: &Point, r: ReplyCorner) -> Result<GridBox> {
    shape.validate(q)?;
    check_dim(shape.dim(), r.dim())?;
    let intervals = (0..shape.dim()).map(|i| {
        if r.bit(i) {
            (q.get(i), shape.size(i) - 1)
        } else {
            (0, q.get(i))
        }
    });
    GridBox::new(intervals)
}

/// Whether `u` satisfies at least one inequality claimed by reply `r` to `q`.
pub fn is_compatible(u: &Point, q: &Point, r: ReplyCorner) -> Result<bool> {
    check_dim(q.dim(), u.dim())?;
    check_dim(q.dim(), r.dim())?;
    Ok((0..q.dim()).any(|i| {
        if r.bit(i) {
            u.get(i) < q.get(i)
        } else {
            u.get(i) > q.get(i)
        }
    }))
}

/// Every reply an adversary committed to target `t` may give to a query on `q`.
pub fn honest_replies(t: &Point, q: &Point) -> Result<Vec<Reply>> {
    check_dim(q.dim(), t.dim())?;
    if t == q {
        return Ok(vec![Reply::Found]);
    }
    if q.dim() > MAX_CORNER_DIM {
        return Err(Error::Argument(format!("dimension above {MAX_CORNER_DIM}")));
    }
    let mut out = Vec::new();
    for r in ReplyCorner::all(q.dim()) {
        if is_compatible(t, q, r)? {
            out.push(Reply::Corner(r));
        }
    }
    Ok(out)
}

/// A set of potential targets over a shape.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct CandidateSet {
    shape: GridShape,
    bits: BitSet,
}

impl CandidateSet {
    pub fn full(shape: &GridShape) -> Self {
        Self {
            shape: shape.clone(),
            bits: BitSet::full(shape.cell_count()),
        }
    }

    pub fn empty(shape: &GridShape) -> Self {
        Self {
            shape: shape.clone(),
            bits: BitSet::empty(shape.cell_count()),
        }
    }

    pub fn from_points<'a>(shape: &GridShape, points: impl IntoIterator<Item = &'a Point>) -> Result<Self> {
        let mut set = Self::empty(shape);
        for p in points {
            shape.validate(p)?;
            set.bits.insert(shape.index_of(p));
        }
        Ok(set)
    }

    pub fn from_bits(shape: &GridShape, bits: BitSet) -> Result<Self> {
        if bits.capacity() != shape.cell_count() {
            return Err(Error::Argument(format!(
                "bit set of {} cells for shape {shape}",
                bits.capacity()
            )));
        }
        Ok(Self {
            shape: shape.clone(),
            bits,
        })
    }

    pub fn shape(&self) -> &GridShape {
        &self.shape
    }

    pub fn bits(&self) -> &BitSet {
        &self.bits
    }

    pub fn len(&self) -> usize {
        self.bits.count()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn contains(&self, p: &Point) -> bool {
        self.shape.contains(p) && self.bits.contains(self.shape.index_of(p))
    }

    /// The sole member, when there is exactly one.
    pub fn single(&self) -> Option<Point> {
        self.bits.single().map(|i| self.shape.point_at(i))
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        self.bits.iter().map(|i| self.shape.point_at(i))
    }

    pub fn is_subset(&self, other: &CandidateSet) -> bool {
        self.shape == other.shape && self.bits.is_subset(&other.bits)
    }

    fn check_query(&self, q: &Point, r: ReplyCorner) -> Result<()> {
        self.shape.validate(q)?;
        check_dim(self.shape.dim(), r.dim())
    }

    /// `P \ X(q, r)`.
    pub fn apply_reply(&self, q: &Point, r: ReplyCorner) -> Result<CandidateSet> {
        self.check_query(q, r)?;
        let mut bits = self.bits.clone();
        bits.difference_with(&self.shape.box_cells(q, r));
        Ok(Self {
            shape: self.shape.clone(),
            bits,
        })
    }

    /// `|P \ X(q, r)|`.
    pub fn remainder_len(&self, q: &Point, r: ReplyCorner) -> Result<usize> {
        self.check_query(q, r)?;
        Ok(self.bits.difference_count(&self.shape.box_cells(q, r)))
    }

    /// Corners after which at least one potential target survives, in lexicographic order.
    pub fn valid_corner_replies(&self, q: &Point) -> Result<Vec<ReplyCorner>> {
        if self.is_empty() {
            return Err(Error::State("empty candidate set".into()));
        }
        self.shape.validate(q)?;
        let mut out = Vec::new();
        for r in ReplyCorner::all(self.shape.dim()) {
            if self.bits.difference_count(&self.shape.box_cells(q, r)) > 0 {
                out.push(r);
            }
        }
        Ok(out)
    }

    /// Membership words, little-endian.
    pub fn write_key(&self, out: &mut Vec<u8>) {
        self.bits.write_key(out);
    }
}

impl fmt::Debug for CandidateSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.points()).finish()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn shape(d: &[usize]) -> GridShape {
        GridShape::new(d.to_vec()).unwrap()
    }

    fn corner(bits: &[u8]) -> ReplyCorner {
        ReplyCorner::new(&bits.iter().map(|&b| b == 1).collect::<Vec<_>>()).unwrap()
    }

    #[test]
    fn shape_rejects_zero_and_empty() {
        assert!(GridShape::new(vec![]).is_err());
        assert!(GridShape::new(vec![4, 0]).is_err());
        assert!(GridShape::new(vec![usize::MAX, 2]).is_err());
    }

    #[test]
    fn row_major_indexing() {
        let s = shape(&[3, 4]);
        assert_eq!(s.index_of(&Point::from([1, 2])), 6);
        assert_eq!(s.point_at(6), Point::from([1, 2]));
        assert_eq!(s.points().count(), 12);
        for (i, p) in s.points().enumerate() {
            assert_eq!(s.index_of(&p), i);
        }
    }

    #[test]
    fn corner_order_is_lexicographic() {
        let all: Vec<String> = ReplyCorner::all(2).map(|c| c.to_string()).collect();
        assert_eq!(all, ["(0,0)", "(0,1)", "(1,0)", "(1,1)"]);
        assert!(corner(&[0, 1]) < corner(&[1, 0]));
        assert_eq!(corner(&[0, 1, 1]).complement(), corner(&[1, 0, 0]));
        assert_eq!(corner(&[1, 0, 1]).drop_axis(1), corner(&[1, 1]));
    }

    #[test]
    fn excluded_box_examples() {
        let b = excluded_box(&shape(&[3, 3]), &Point::from([1, 1]), corner(&[0, 0])).unwrap();
        assert_eq!(b.intervals(), &[(0, 1), (0, 1)]);
        let b = excluded_box(&shape(&[9, 6]), &Point::from([4, 2]), corner(&[1, 1])).unwrap();
        assert_eq!(b.intervals(), &[(4, 8), (2, 5)]);
        let b = excluded_box(&shape(&[8]), &Point::from([3]), corner(&[1])).unwrap();
        assert_eq!(b.intervals(), &[(3, 7)]);
    }

    #[test]
    fn excluded_box_dimension_mismatch() {
        let s = shape(&[3, 3]);
        assert!(matches!(
            excluded_box(&s, &Point::from([1, 1]), corner(&[0])),
            Err(Error::DimensionMismatch { .. })
        ));
        assert!(excluded_box(&s, &Point::from([1]), corner(&[0, 0])).is_err());
        assert!(excluded_box(&s, &Point::from([3, 0]), corner(&[0, 0])).is_err());
    }

    #[test]
    fn compatibility_examples() {
        let q = Point::from([1, 1]);
        for r in ReplyCorner::all(2) {
            assert!(!is_compatible(&q, &q, r).unwrap());
        }
        assert!(is_compatible(&Point::from([0, 2]), &q, corner(&[0, 0])).unwrap());
        assert!(!is_compatible(&Point::from([0, 0]), &q, corner(&[0, 0])).unwrap());
        assert!(is_compatible(&Point::from([0]), &q, corner(&[0, 0])).is_err());
    }

    #[test]
    fn apply_reply_examples() {
        let s = shape(&[3, 3]);
        let p = CandidateSet::full(&s)
            .apply_reply(&Point::from([1, 1]), corner(&[0, 0]))
            .unwrap();
        assert_eq!(p.len(), 5);

        let s1 = shape(&[8]);
        let p = CandidateSet::full(&s1)
            .apply_reply(&Point::from([3]), corner(&[0]))
            .unwrap();
        let pts: Vec<Point> = p.points().collect();
        assert_eq!(pts, (4..8).map(|x| Point::from([x])).collect::<Vec<_>>());

        let pair = [Point::from([0, 0]), Point::from([2, 2])];
        let p = CandidateSet::from_points(&s, &pair).unwrap();
        let after = p.apply_reply(&Point::from([1, 1]), corner(&[0, 1])).unwrap();
        assert_eq!(after, p);
    }

    #[test]
    fn valid_corner_examples() {
        let s = shape(&[3, 3]);
        let pair = [Point::from([0, 0]), Point::from([2, 2])];
        let p = CandidateSet::from_points(&s, &pair).unwrap();
        assert_eq!(p.valid_corner_replies(&Point::from([1, 1])).unwrap().len(), 4);

        let s2 = shape(&[2, 2]);
        let valid = CandidateSet::full(&s2)
            .valid_corner_replies(&Point::from([0, 0]))
            .unwrap();
        assert_eq!(valid, vec![corner(&[0, 0]), corner(&[0, 1]), corner(&[1, 0])]);

        let single = CandidateSet::from_points(&s, &[Point::from([2, 1])]).unwrap();
        assert!(single.valid_corner_replies(&Point::from([2, 1])).unwrap().is_empty());

        assert!(matches!(
            CandidateSet::empty(&s).valid_corner_replies(&Point::from([0, 0])),
            Err(Error::State(_))
        ));
    }

    #[test]
    fn honest_reply_examples() {
        let t = Point::from([5]);
        assert_eq!(honest_replies(&t, &t).unwrap(), vec![Reply::Found]);
        assert_eq!(
            honest_replies(&t, &Point::from([3])).unwrap(),
            vec![Reply::Corner(corner(&[0]))]
        );
        let got = honest_replies(&Point::from([0, 2]), &Point::from([1, 1])).unwrap();
        assert_eq!(
            got,
            vec![
                Reply::Corner(corner(&[0, 0])),
                Reply::Corner(corner(&[1, 0])),
                Reply::Corner(corner(&[1, 1])),
            ]
        );
    }

    #[test]
    fn box_cells_matches_box() {
        let s = shape(&[4, 3, 2]);
        for q in s.points() {
            for r in ReplyCorner::all(3) {
                let b = excluded_box(&s, &q, r).unwrap();
                let cells = s.box_cells(&q, r);
                assert_eq!(cells.count(), b.cell_count());
                for u in s.points() {
                    assert_eq!(cells.contains(s.index_of(&u)), b.contains(&u));
                }
            }
        }
    }
}
