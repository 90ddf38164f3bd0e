//! Discrete monotone surfaces on which the lower-bound adversaries hide the
//! target. Each surface assigns one "height" coordinate per position of the
//! remaining axes; all arithmetic is exact integer division.

use crate::error::{Error, Result};
use crate::game::{CandidateSet, GridShape, Point};

/// Diagonal of an `m × n` grid: `y = ⌊(n − 1)(m − 1 − x) / (m − 1)⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct DiagonalSpec {
    pub m: usize,
    pub n: usize,
}

impl DiagonalSpec {
    pub fn new(m: usize, n: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::Argument(format!(
                "diagonal needs m >= 2 (got m = {m}); the formula divides by m - 1"
            )));
        }
        if n == 0 {
            return Err(Error::Argument("n must be positive".into()));
        }
        Ok(Self { m, n })
    }

    pub fn height(&self, x: usize) -> usize {
        let (m, n) = (self.m as u64, self.n as u64);
        ((n - 1) * (m - 1 - x as u64) / (m - 1)) as usize
    }

    pub fn points(&self) -> Vec<Point> {
        (0..self.m).map(|x| Point::from([x, self.height(x)])).collect()
    }

    /// Maximal constant-height runs as `(y, x_first, x_last)`, left to right.
    pub fn segments(&self) -> Vec<(usize, usize, usize)> {
        let mut out: Vec<(usize, usize, usize)> = Vec::new();
        for x in 0..self.m {
            let y = self.height(x);
            match out.last_mut() {
                Some(last) if last.0 == y => last.2 = x,
                _ => out.push((y, x, x)),
            }
        }
        out
    }
}

/// Plane of an `n1 × n2 × n3` grid with height axis 2:
/// `x2 = ⌊(n2 − 1)(2AB − x1·B − x3·A) / (2AB)⌋`, `A = n1 − 1`, `B = n3 − 1`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HyperplaneSpec3D {
    pub n1: usize,
    pub n2: usize,
    pub n3: usize,
}

impl HyperplaneSpec3D {
    pub fn new(n1: usize, n2: usize, n3: usize) -> Result<Self> {
        if !(n1 >= n2 && n2 >= n3 && n3 >= 2) {
            return Err(Error::Argument(format!(
                "plane needs n1 >= n2 >= n3 >= 2, got ({n1}, {n2}, {n3})"
            )));
        }
        Ok(Self { n1, n2, n3 })
    }

    pub fn height(&self, x1: usize, x3: usize) -> usize {
        let a = self.n1 as u64 - 1;
        let b = self.n3 as u64 - 1;
        let num = (self.n2 as u64 - 1) * (2 * a * b - x1 as u64 * b - x3 as u64 * a);
        (num / (2 * a * b)) as usize
    }

    pub fn points(&self) -> Vec<Point> {
        let mut out = Vec::with_capacity(self.n1 * self.n3);
        for x1 in 0..self.n1 {
            for x3 in 0..self.n3 {
                out.push(Point::from([x1, self.height(x1, x3), x3]));
            }
        }
        out
    }

    /// Longest run of consecutive `x1` sharing the same `(x2, x3)`.
    pub fn longest_row(&self) -> usize {
        let mut best = 0;
        for x3 in 0..self.n3 {
            let mut run = 0;
            let mut prev = None;
            for x1 in 0..self.n1 {
                let h = self.height(x1, x3);
                run = if prev == Some(h) { run + 1 } else { 1 };
                prev = Some(h);
                best = best.max(run);
            }
        }
        best
    }

    /// `⌈2(n1 − 1) / (n2 − 1)⌉`.
    pub fn row_bound(&self) -> usize {
        (2 * (self.n1 - 1)).div_ceil(self.n2 - 1)
    }
}

/// Antidiagonal hyperplane of the cube `n^d`, height axis `d − 1`:
/// `x_d = ⌊((n − 1)(d − 1) − Σ_{i<d} x_i) / (d − 1)⌋`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct CubeHyperplaneSpec {
    pub n: usize,
    pub d: usize,
}

impl CubeHyperplaneSpec {
    pub fn new(n: usize, d: usize) -> Result<Self> {
        if d < 3 || n < 2 {
            return Err(Error::Argument(format!(
                "cube surface needs d >= 3 and n >= 2, got n={n}, d={d}"
            )));
        }
        Ok(Self { n, d })
    }

    pub fn height(&self, prefix: &[usize]) -> usize {
        let k = self.d - 1;
        let sum: usize = prefix.iter().take(k).sum();
        ((self.n - 1) * k - sum) / k
    }

    pub fn points(&self) -> Vec<Point> {
        let k = self.d - 1;
        let total = self.n.pow(k as u32);
        let mut out = Vec::with_capacity(total);
        let mut prefix = vec![0usize; k];
        for _ in 0..total {
            let mut coords = prefix.clone();
            coords.push(self.height(&prefix));
            out.push(Point::from(coords));
            for slot in prefix.iter_mut().rev() {
                *slot += 1;
                if *slot < self.n {
                    break;
                }
                *slot = 0;
            }
        }
        out
    }

    /// Longest axis-parallel run of surface points within one level.
    pub fn longest_level_run(&self) -> usize {
        let k = self.d - 1;
        let mut best = 0;
        for p in self.points() {
            let prefix = &p.coords()[..k];
            for axis in 0..k {
                // count only from the start of each run
                if prefix[axis] > 0 {
                    let mut prev = prefix.to_vec();
                    prev[axis] -= 1;
                    if self.height(&prev) == p.get(k) {
                        continue;
                    }
                }
                let mut len = 1;
                let mut cur = prefix.to_vec();
                while cur[axis] + 1 < self.n {
                    cur[axis] += 1;
                    if self.height(&cur) != p.get(k) {
                        break;
                    }
                    len += 1;
                }
                best = best.max(len);
            }
        }
        best
    }
}

/// A surface together with its height axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Surface {
    Diagonal(DiagonalSpec),
    Plane(HyperplaneSpec3D),
    Cube(CubeHyperplaneSpec),
}

impl Surface {
    pub fn name(&self) -> &'static str {
        match self {
            Surface::Diagonal(_) => "diagonal",
            Surface::Plane(_) => "plane3d",
            Surface::Cube(_) => "cube",
        }
    }

    pub fn shape(&self) -> GridShape {
        let dims = match self {
            Surface::Diagonal(s) => vec![s.m, s.n],
            Surface::Plane(s) => vec![s.n1, s.n2, s.n3],
            Surface::Cube(s) => vec![s.n; s.d],
        };
        GridShape::new(dims).expect("surface sizes are positive")
    }

    pub fn height_axis(&self) -> usize {
        match self {
            Surface::Diagonal(_) => 1,
            Surface::Plane(_) => 1,
            Surface::Cube(s) => s.d - 1,
        }
    }

    /// Surface height above the position of `p` (its height coordinate is ignored).
    pub fn height_at(&self, p: &Point) -> usize {
        match self {
            Surface::Diagonal(s) => s.height(p.get(0)),
            Surface::Plane(s) => s.height(p.get(0), p.get(2)),
            Surface::Cube(s) => s.height(&p.coords()[..s.d - 1]),
        }
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.get(self.height_axis()) == self.height_at(p)
    }

    pub fn points(&self) -> Vec<Point> {
        match self {
            Surface::Diagonal(s) => s.points(),
            Surface::Plane(s) => s.points(),
            Surface::Cube(s) => s.points(),
        }
    }

    pub fn members(&self) -> CandidateSet {
        CandidateSet::from_points(&self.shape(), &self.points()).expect("surface lies in its shape")
    }
}
