//! Closed-form lower and upper bounds on the query complexity, and the
//! constructive budget certified for the implemented strategies.
//!
//! Real-valued bounds are compared against integer query counts through
//! [`ceil_lower`] and [`within_upper`], both with an absolute slack of
//! [`BOUND_EPS`].

use crate::error::{Error, Result};
use crate::game::GridShape;

/// Slack used whenever a real-valued bound meets an integer count.
pub const BOUND_EPS: f64 = 1e-9;

/// Smallest integer a count must reach to satisfy a real lower bound.
pub fn ceil_lower(bound: f64) -> u64 {
    (bound - BOUND_EPS).ceil().max(0.0) as u64
}

/// Whether an integer count respects a real upper bound.
pub fn within_upper(count: u64, bound: f64) -> bool {
    count as f64 <= bound + BOUND_EPS
}

fn check_2d(m: usize, n: usize) -> Result<()> {
    if n == 0 || m < n {
        return Err(Error::Argument(format!("need m >= n >= 1, got m={m}, n={n}")));
    }
    Ok(())
}

/// `n · log2(m / n)`.
pub fn lower_2d(m: usize, n: usize) -> Result<f64> {
    check_2d(m, n)?;
    Ok(n as f64 * (m as f64 / n as f64).log2())
}

/// `n · (1 + ⌊log2 ⌊m / n⌋⌋)`, the per-segment form of the diagonal argument.
pub fn per_segment_lower(m: usize, n: usize) -> Result<u64> {
    check_2d(m, n)?;
    let per = 1 + (m / n).ilog2() as u64;
    Ok(n as u64 * per)
}

/// `2n · (log2(m / (n + 1)) + 4)`.
pub fn upper_2d(m: usize, n: usize) -> Result<f64> {
    check_2d(m, n)?;
    let n = n as f64;
    Ok(2.0 * n * ((m as f64 / (n + 1.0)).log2() + 4.0))
}

/// Whether `n = 2^k − 1` for some `k ≥ 1`.
pub fn is_full_height(n: usize) -> bool {
    n >= 1 && (n + 1).is_power_of_two()
}

/// Least `2^k − 1 ≥ n`.
pub fn padded_height(n: usize) -> usize {
    (n + 1).next_power_of_two() - 1
}

/// `n · (log2((m + n) / (n + 1)) + 3) − log2(n + 1)` for `n = 2^k − 1`, any `m ≥ 1`.
pub fn lemma_upper_2d(m: usize, n: usize) -> Result<f64> {
    if m == 0 {
        return Err(Error::Argument("m must be positive".into()));
    }
    if !is_full_height(n) {
        return Err(Error::Argument(format!("n = {n} is not of the form 2^k - 1")));
    }
    let (m, n) = (m as f64, n as f64);
    Ok(n * (((m + n) / (n + 1.0)).log2() + 3.0) - (n + 1.0).log2())
}

/// `½ (n2 − 1) n3 (log2((n1 − 1) / (n2 − 1)) + 1)` for `n1 ≥ n2 ≥ n3 ≥ 2`.
pub fn lower_3d(n1: usize, n2: usize, n3: usize) -> Result<f64> {
    if !(n1 >= n2 && n2 >= n3 && n3 >= 2) {
        return Err(Error::Argument(format!(
            "need n1 >= n2 >= n3 >= 2, got ({n1}, {n2}, {n3})"
        )));
    }
    let (a, b, c) = ((n1 - 1) as f64, (n2 - 1) as f64, n3 as f64);
    Ok(0.5 * b * c * ((a / b).log2() + 1.0))
}

/// The cube form of [`lower_3d`]: `n (n − 1) / 2`.
pub fn lower_3d_cube(n: usize) -> Result<u64> {
    if n < 2 {
        return Err(Error::Argument(format!("need n >= 2, got {n}")));
    }
    Ok(n as u64 * (n as u64 - 1) / 2)
}

/// `2 ⌊n^(d−1) / (d − 1)⌋` for `d ≥ 3`, `n ≥ 2`.
pub fn lower_cube(n: usize, d: usize) -> Result<u64> {
    if d < 3 {
        return Err(Error::Argument(format!("need d >= 3, got {d}")));
    }
    if n < 2 {
        return Err(Error::Argument(format!("need n >= 2, got {n}")));
    }
    let power = (n as u128)
        .checked_pow((d - 1) as u32)
        .ok_or_else(|| Error::Argument("n^(d-1) overflows".into()))?;
    let value = 2 * (power / (d as u128 - 1));
    u64::try_from(value).map_err(|_| Error::Argument("bound overflows u64".into()))
}

/// Query budget of the implemented strategies on a non-increasing shape.
///
/// `B(n1) = ⌊log2 n1⌋ + 1`; `B(n1, n2) = 2 n' (log2((n1 + n') / (n' + 1)) + 3)` with
/// `n'` the padded height of `n2`; `B(n1, …, nd) = nd · B(n1, …, n(d−1))`.
pub fn budget_d(shape: &GridShape) -> Result<f64> {
    if !shape.is_sorted_desc() {
        return Err(Error::Argument(format!("dims of {shape} are not non-increasing")));
    }
    Ok(budget_sorted(shape.dims()))
}

fn budget_sorted(dims: &[usize]) -> f64 {
    match dims {
        [n1] => (n1.ilog2() + 1) as f64,
        [n1, n2] => {
            let padded = padded_height(*n2) as f64;
            2.0 * padded * (((*n1 as f64 + padded) / (padded + 1.0)).log2() + 3.0)
        }
        [rest @ .., last] => *last as f64 * budget_sorted(rest),
        [] => unreachable!("shapes have at least one dimension"),
    }
}

/// Every bound applicable to a shape, evaluated on its non-increasing ordering.
#[derive(Clone, Debug, PartialEq)]
pub struct BoundsReport {
    pub shape: GridShape,
    pub lower_2d: Option<f64>,
    pub per_segment_lower: Option<u64>,
    pub upper_2d: Option<f64>,
    pub lemma_upper_2d: Option<f64>,
    pub lower_3d: Option<f64>,
    pub lower_cube: Option<u64>,
    pub budget_d: f64,
}

impl BoundsReport {
    pub fn new(shape: &GridShape) -> Self {
        let sorted = shape.sorted_desc();
        let dims = sorted.dims();
        let (mut lower_2d_v, mut per_seg, mut up2, mut lemma) = (None, None, None, None);
        let (mut l3, mut lc) = (None, None);
        if let [m, n] = *dims {
            lower_2d_v = lower_2d(m, n).ok();
            per_seg = per_segment_lower(m, n).ok();
            up2 = upper_2d(m, n).ok();
            lemma = lemma_upper_2d(m, n).ok();
        }
        if let [n1, n2, n3] = *dims {
            l3 = lower_3d(n1, n2, n3).ok();
        }
        if dims.len() >= 3 && dims.iter().all(|&n| n == dims[0]) {
            lc = lower_cube(dims[0], dims.len()).ok();
        }
        Self {
            budget_d: budget_sorted(dims),
            shape: shape.clone(),
            lower_2d: lower_2d_v,
            per_segment_lower: per_seg,
            upper_2d: up2,
            lemma_upper_2d: lemma,
            lower_3d: l3,
            lower_cube: lc,
        }
    }

    /// Largest integer count forced by the applicable lower bounds.
    pub fn best_lower(&self) -> u64 {
        [
            self.lower_2d.map(ceil_lower),
            self.lower_3d.map(ceil_lower),
            self.lower_cube,
        ]
        .into_iter()
        .flatten()
        .max()
        .unwrap_or(1)
        .max(1)
    }

    pub fn lowers(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if let Some(v) = self.lower_2d {
            out.push(("lower_2d", v));
        }
        if let Some(v) = self.lower_3d {
            out.push(("lower_3d", v));
        }
        if let Some(v) = self.lower_cube {
            out.push(("lower_cube", v as f64));
        }
        out
    }

    pub fn uppers(&self) -> Vec<(&'static str, f64)> {
        let mut out = Vec::new();
        if let Some(v) = self.upper_2d {
            out.push(("upper_2d", v));
        }
        if let Some(v) = self.lemma_upper_2d {
            out.push(("lemma_upper_2d", v));
        }
        out.push(("budget_d", self.budget_d));
        out
    }

    /// Pairs `(lower, upper)` that contradict each other.
    pub fn conflicts(&self) -> Vec<(&'static str, &'static str)> {
        let mut out = Vec::new();
        for (ln, lv) in self.lowers() {
            for (un, uv) in self.uppers() {
                if lv > uv + BOUND_EPS {
                    out.push((ln, un));
                }
            }
        }
        out
    }
}
