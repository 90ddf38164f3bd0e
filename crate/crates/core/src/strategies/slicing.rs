use super::grid2d::Grid2d;
use super::{corner_of, push_num, Step, Strategy};
use crate::error::{Error, Result};
use crate::game::{GridShape, Point, Reply};

#[derive(Clone, Debug)]
enum Inner {
    Grid(Grid2d),
    Slices(Box<Slicing>),
}

impl Inner {
    fn fresh(shape: &GridShape) -> Result<Self> {
        if shape.dim() == 2 {
            Ok(Inner::Grid(Grid2d::new(shape)?))
        } else {
            Ok(Inner::Slices(Box::new(Slicing::new(shape)?)))
        }
    }

    fn as_strategy(&self) -> &dyn StrategyObj {
        match self {
            Inner::Grid(g) => g,
            Inner::Slices(s) => s.as_ref(),
        }
    }

    fn as_strategy_mut(&mut self) -> &mut dyn StrategyObj {
        match self {
            Inner::Grid(g) => g,
            Inner::Slices(s) => s.as_mut(),
        }
    }
}

/// Object-safe subset of [`Strategy`] used for the recursive inner game.
trait StrategyObj {
    fn step(&self) -> Step;
    fn feed(&mut self, reply: &Reply) -> Result<()>;
    fn state_key(&self) -> Vec<u8>;
}

impl<S: Strategy> StrategyObj for S {
    fn step(&self) -> Step {
        self.next_step()
    }

    fn feed(&mut self, reply: &Reply) -> Result<()> {
        self.observe(reply)
    }

    fn state_key(&self) -> Vec<u8> {
        self.key()
    }
}

/// Plays the grid as independent games on its slices along the shortest axis.
///
/// Each slice `x_axis = c` runs a fresh strategy one dimension lower (bottoming
/// out at [`Grid2d`]) that sees only the reply bits of the remaining axes. When
/// the slice game is exhausted the next slice starts.
#[derive(Clone, Debug)]
pub struct Slicing {
    shape: GridShape,
    sub_shape: GridShape,
    axis: usize,
    slice: usize,
    inner: Inner,
    found: bool,
}

impl Slicing {
    pub fn new(shape: &GridShape) -> Result<Self> {
        if shape.dim() < 3 {
            return Err(Error::Argument(format!("slicing needs d >= 3, got {shape}")));
        }
        let min = *shape.dims().iter().min().expect("non-empty dims");
        let axis = shape.dims().iter().rposition(|&n| n == min).expect("min exists");
        let sub_dims: Vec<usize> = (0..shape.dim()).filter(|&i| i != axis).map(|i| shape.size(i)).collect();
        let sub_shape = GridShape::new(sub_dims)?;
        Ok(Self {
            inner: Inner::fresh(&sub_shape)?,
            shape: shape.clone(),
            sub_shape,
            axis,
            slice: 0,
            found: false,
        })
    }

    pub fn slice_axis(&self) -> usize {
        self.axis
    }

    pub fn current_slice(&self) -> usize {
        self.slice
    }

    fn lift(&self, sub: &Point) -> Point {
        let mut coords = sub.coords().to_vec();
        coords.insert(self.axis, self.slice);
        Point::from(coords)
    }

    /// Skips past slices whose game has run dry.
    fn advance(&mut self) -> Result<()> {
        while !self.found
            && self.slice < self.shape.size(self.axis)
            && self.inner.as_strategy().step() == Step::Exhausted
        {
            self.slice += 1;
            if self.slice < self.shape.size(self.axis) {
                self.inner = Inner::fresh(&self.sub_shape)?;
            }
        }
        Ok(())
    }
}

impl Strategy for Slicing {
    fn id(&self) -> &'static str {
        "slicing"
    }

    fn shape(&self) -> &GridShape {
        &self.shape
    }

    fn next_step(&self) -> Step {
        if self.found || self.slice >= self.shape.size(self.axis) {
            return Step::Exhausted;
        }
        match self.inner.as_strategy().step() {
            Step::Query(sub) => Step::Query(self.lift(&sub)),
            Step::Exhausted => Step::Exhausted,
        }
    }

    fn observe(&mut self, reply: &Reply) -> Result<()> {
        if self.found || self.slice >= self.shape.size(self.axis) {
            return Err(Error::Protocol("reply after the search ended".into()));
        }
        match corner_of(reply, self.shape.dim())? {
            None => {
                self.found = true;
                self.inner.as_strategy_mut().feed(&Reply::Found)?;
            }
            Some(c) => {
                let forwarded = Reply::Corner(c.drop_axis(self.axis));
                self.inner.as_strategy_mut().feed(&forwarded)?;
            }
        }
        self.advance()
    }

    fn key(&self) -> Vec<u8> {
        let mut out = vec![b's', self.found as u8];
        push_num(&mut out, self.axis as i64);
        push_num(&mut out, self.slice as i64);
        out.extend(self.inner.as_strategy().state_key());
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::game::ReplyCorner;

    #[test]
    fn slices_last_shortest_axis() {
        let s = Slicing::new(&GridShape::new(vec![4, 2, 2]).unwrap()).unwrap();
        assert_eq!(s.slice_axis(), 2);
        assert_eq!(s.next_step(), Step::Query(Point::from([1, 0, 0])));
        let s = Slicing::new(&GridShape::new(vec![2, 5, 3]).unwrap()).unwrap();
        assert_eq!(s.slice_axis(), 0);
        assert!(Slicing::new(&GridShape::new(vec![3, 3]).unwrap()).is_err());
    }

    #[test]
    fn moves_to_next_slice_when_exhausted() {
        let shape = GridShape::new(vec![2, 2, 2]).unwrap();
        let mut s = Slicing::new(&shape).unwrap();
        // Always claim "larger on the last axis": the first slice runs dry.
        let up = Reply::Corner(ReplyCorner::new(&[false, false, false]).unwrap());
        let mut n = 0;
        while s.current_slice() == 0 {
            assert!(matches!(s.next_step(), Step::Query(ref q) if q.get(2) == 0));
            s.observe(&up).unwrap();
            n += 1;
        }
        assert!(n >= 1);
        assert!(matches!(s.next_step(), Step::Query(ref q) if q.get(2) == 1));
    }

    #[test]
    fn four_dimensional_recursion() {
        let shape = GridShape::new(vec![2, 2, 2, 2]).unwrap();
        let s = Slicing::new(&shape).unwrap();
        assert_eq!(s.next_step(), Step::Query(Point::from([0, 0, 0, 0])));
    }
}
