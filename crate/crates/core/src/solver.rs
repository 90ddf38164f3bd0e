//! Exact minimax value of the game on small shapes, optimal adversary
//! extraction, and best-response search against fixed adversary policies.
//!
//! The value of a potential-target set `P` is `cost({p}) = 1` and
//! `cost(P) = 1 + min_q max_r cost(P \ X(q, r))`, the maximum ranging over the
//! corners leaving `P \ X` non-empty. Queries range over the whole grid.
//! Sets are packed into a `u128`, so shapes are limited to 128 cells.

use std::collections::VecDeque;
use std::sync::{Arc, Mutex, MutexGuard};
use std::time::Instant;

use rustc_hash::{FxHashMap, FxHashSet};
use smallvec::SmallVec;

use crate::adversaries::Adversary;
use crate::bitset::BitSet;
use crate::error::{Error, Result};
use crate::game::{CandidateSet, GridShape, Point, Reply, ReplyCorner};

/// Hard limit imposed by the `u128` set encoding.
pub const SOLVER_CELL_LIMIT: usize = 128;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveOptions {
    /// Canonicalize memo keys under axis reversals and permutations of equal axes.
    pub symmetry: bool,
    /// Largest cell count accepted.
    pub max_cells: usize,
    /// Largest number of memoized sets before giving up.
    pub max_states: usize,
    /// Only consider queries inside the bounding box of the candidates.
    /// Not proven value-preserving: reports are flagged heuristic.
    pub prune_queries: bool,
    pub principal_line: bool,
}

impl Default for SolveOptions {
    fn default() -> Self {
        Self {
            symmetry: true,
            max_cells: 64,
            max_states: 20_000_000,
            prune_queries: false,
            principal_line: false,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveReport {
    pub shape: GridShape,
    pub value: u32,
    pub states_explored: u64,
    pub peak_memo: usize,
    pub principal_line: Option<Vec<(Point, Reply)>>,
    pub heuristic: bool,
    pub wall_ms: u128,
}

struct Table {
    shape: GridShape,
    dim: usize,
    corners: usize,
    /// `boxes[q * corners + rank]`: excluded cells for corner `rank` at cell `q`.
    boxes: Vec<u128>,
    coords: Vec<SmallVec<[u16; 4]>>,
    /// Non-identity cell permutations induced by grid automorphisms.
    autos: Vec<Vec<u8>>,
    memo: FxHashMap<u128, u8>,
    options: SolveOptions,
    explored: u64,
}

fn lower_bound(p: u128) -> u8 {
    // complementary corners overlap only in q, so some reply keeps >= floor(|P|/2)
    (p.count_ones().ilog2() + 1) as u8
}

impl Table {
    fn new(shape: &GridShape, options: SolveOptions) -> Result<Self> {
        let cells = shape.cell_count();
        let cap = options.max_cells.min(SOLVER_CELL_LIMIT);
        if cells > cap {
            return Err(Error::Resource {
                what: format!("cell count {cells} of shape {shape}"),
                cap,
            });
        }
        let dim = shape.dim();
        let corners = 1usize << dim;
        let mut boxes = Vec::with_capacity(cells * corners);
        for q in shape.points() {
            for r in ReplyCorner::all(dim) {
                let bits = shape.box_cells(&q, r);
                boxes.push(bits.to_u128().expect("at most 128 cells"));
            }
        }
        let coords = shape
            .points()
            .map(|p| p.coords().iter().map(|&c| c as u16).collect())
            .collect();
        let autos = if options.symmetry {
            automorphisms(shape)
        } else {
            Vec::new()
        };
        Ok(Self {
            shape: shape.clone(),
            dim,
            corners,
            boxes,
            coords,
            autos,
            memo: FxHashMap::default(),
            options,
            explored: 0,
        })
    }

    fn full(&self) -> u128 {
        let n = self.shape.cell_count();
        if n == 128 {
            u128::MAX
        } else {
            (1u128 << n) - 1
        }
    }

    fn canonical(&self, p: u128) -> u128 {
        let mut best = p;
        for perm in &self.autos {
            let mut mapped = 0u128;
            let mut rest = p;
            while rest != 0 {
                let c = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                mapped |= 1u128 << perm[c];
            }
            best = best.min(mapped);
        }
        best
    }

    /// Queries ordered from the centre of the candidates' bounding box outwards.
    fn query_order(&self, p: u128) -> SmallVec<[u8; 128]> {
        let mut lo = [u16::MAX; 24];
        let mut hi = [0u16; 24];
        let mut rest = p;
        while rest != 0 {
            let c = rest.trailing_zeros() as usize;
            rest &= rest - 1;
            for (i, &x) in self.coords[c].iter().enumerate() {
                lo[i] = lo[i].min(x);
                hi[i] = hi[i].max(x);
            }
        }
        let mut keyed: SmallVec<[(u32, u8); 128]> = SmallVec::new();
        for (cell, xs) in self.coords.iter().enumerate() {
            let mut dist = 0u32;
            let mut outside = false;
            for (i, &x) in xs.iter().enumerate() {
                let twice = 2 * x as i32;
                dist += (twice - (lo[i] + hi[i]) as i32).unsigned_abs();
                outside |= x < lo[i] || x > hi[i];
            }
            if outside && self.options.prune_queries {
                continue;
            }
            keyed.push((dist + if outside { 1 << 20 } else { 0 }, cell as u8));
        }
        keyed.sort_unstable();
        keyed.into_iter().map(|(_, c)| c).collect()
    }

    /// Surviving sets after a query, or `None` if some reply leaves `p` unchanged.
    fn children(&self, p: u128, q: usize) -> Option<SmallVec<[(u128, u32); 16]>> {
        let mut out = SmallVec::new();
        for rank in 0..self.corners {
            let child = p & !self.boxes[q * self.corners + rank];
            if child == p {
                return None;
            }
            if child != 0 {
                out.push((child, rank as u32));
            }
        }
        Some(out)
    }

    fn value(&mut self, p: u128) -> Result<u8> {
        debug_assert!(p != 0);
        if p.count_ones() == 1 {
            return Ok(1);
        }
        let key = self.canonical(p);
        if let Some(&v) = self.memo.get(&key) {
            return Ok(v);
        }
        self.explored += 1;
        let lb = lower_bound(p);
        let mut best = p.count_ones() as u8;
        for q in self.query_order(p) {
            if best == lb {
                break;
            }
            let Some(mut kids) = self.children(p, q as usize) else {
                continue;
            };
            kids.sort_unstable_by_key(|&(c, _)| std::cmp::Reverse(c.count_ones()));
            let mut worst = 0u8;
            let mut cut = false;
            for &(child, _) in &kids {
                if lower_bound(child) + 1 >= best {
                    cut = true;
                    break;
                }
                worst = worst.max(self.value(child)?);
                if worst + 1 >= best {
                    cut = true;
                    break;
                }
            }
            if !cut {
                best = worst + 1;
            }
        }
        if self.memo.len() >= self.options.max_states {
            return Err(Error::Resource {
                what: format!("memoized states for shape {}", self.shape),
                cap: self.options.max_states,
            });
        }
        self.memo.insert(key, best);
        Ok(best)
    }

    /// Optimal reply at `(p, q)`: the corner whose remainder has the largest value.
    fn best_corner(&mut self, p: u128, q: usize) -> Result<(ReplyCorner, u128)> {
        let mut best: Option<(u8, u32, u128)> = None;
        for rank in 0..self.corners {
            let child = p & !self.boxes[q * self.corners + rank];
            if child == 0 {
                continue;
            }
            let v = self.value(child)?;
            if best.is_none_or(|(bv, _, _)| v > bv) {
                best = Some((v, rank as u32, child));
            }
        }
        let (_, rank, child) =
            best.ok_or_else(|| Error::Invariant("no valid corner for a non-singleton set".into()))?;
        Ok((ReplyCorner::from_rank(self.dim, rank), child))
    }

    fn principal_line(&mut self, mut p: u128) -> Result<Vec<(Point, Reply)>> {
        let mut line = Vec::new();
        loop {
            if p.count_ones() == 1 {
                let cell = p.trailing_zeros() as usize;
                line.push((self.shape.point_at(cell), Reply::Found));
                return Ok(line);
            }
            let target = self.value(p)?;
            let mut chosen = None;
            for q in self.query_order(p) {
                let Some(kids) = self.children(p, q as usize) else {
                    continue;
                };
                let mut worst = 0;
                for &(child, _) in &kids {
                    worst = worst.max(self.value(child)?);
                }
                if worst + 1 == target {
                    chosen = Some(q as usize);
                    break;
                }
            }
            let q = chosen.ok_or_else(|| Error::Invariant("no query attains the value".into()))?;
            let (r, child) = self.best_corner(p, q)?;
            line.push((self.shape.point_at(q), Reply::Corner(r)));
            p = child;
        }
    }
}

/// Cell permutations of all grid automorphisms except the identity.
fn automorphisms(shape: &GridShape) -> Vec<Vec<u8>> {
    let d = shape.dim();
    let dims = shape.dims();
    let mut perms: Vec<Vec<usize>> = Vec::new();
    permute_axes(dims, &mut Vec::new(), &mut perms);
    let mut out = Vec::new();
    for axes in &perms {
        for flips in 0u32..(1 << d) {
            if flips == 0 && axes.iter().enumerate().all(|(i, &a)| i == a) {
                continue;
            }
            let map: Vec<u8> = shape
                .points()
                .map(|p| {
                    let mut c = vec![0usize; d];
                    for (i, &a) in axes.iter().enumerate() {
                        let x = p.get(i);
                        c[a] = if flips >> i & 1 == 1 { dims[i] - 1 - x } else { x };
                    }
                    shape.index_of(&Point::from(c)) as u8
                })
                .collect();
            out.push(map);
        }
    }
    out.sort();
    out.dedup();
    out
}

/// Axis assignments `i -> axes[i]` preserving sizes.
fn permute_axes(dims: &[usize], prefix: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    if prefix.len() == dims.len() {
        out.push(prefix.clone());
        return;
    }
    let i = prefix.len();
    for a in 0..dims.len() {
        if dims[a] == dims[i] && !prefix.contains(&a) {
            prefix.push(a);
            permute_axes(dims, prefix, out);
            prefix.pop();
        }
    }
}

/// Exact solver for one shape. The memo table is shared with the adversaries
/// extracted from it.
pub struct Solver {
    table: Arc<Mutex<Table>>,
    shape: GridShape,
    solved: Option<u32>,
}

fn lock(table: &Mutex<Table>) -> MutexGuard<'_, Table> {
    table.lock().unwrap_or_else(|e| e.into_inner())
}

impl Solver {
    pub fn new(shape: &GridShape, options: SolveOptions) -> Result<Self> {
        Ok(Self {
            table: Arc::new(Mutex::new(Table::new(shape, options)?)),
            shape: shape.clone(),
            solved: None,
        })
    }

    pub fn solve(&mut self) -> Result<SolveReport> {
        let start = Instant::now();
        let mut t = lock(&self.table);
        let full = t.full();
        let value = t.value(full)? as u32;
        let principal_line = if t.options.principal_line {
            Some(t.principal_line(full)?)
        } else {
            None
        };
        self.solved = Some(value);
        Ok(SolveReport {
            shape: self.shape.clone(),
            value,
            states_explored: t.explored,
            peak_memo: t.memo.len(),
            principal_line,
            heuristic: t.options.prune_queries,
            wall_ms: start.elapsed().as_millis(),
        })
    }

    /// Minimax value of an arbitrary non-empty candidate set of this shape.
    pub fn value_of(&self, p: &CandidateSet) -> Result<u32> {
        if p.shape() != &self.shape {
            return Err(Error::Argument(format!(
                "set over {} given to solver for {}",
                p.shape(),
                self.shape
            )));
        }
        if p.is_empty() {
            return Err(Error::State("empty candidate set".into()));
        }
        let mask = p.bits().to_u128().expect("solver shapes fit 128 cells");
        Ok(lock(&self.table).value(mask)? as u32)
    }

    pub fn optimal_adversary(&self) -> Result<OptimalAdversary> {
        if self.solved.is_none() {
            return Err(Error::State(format!("shape {} has not been solved", self.shape)));
        }
        Ok(OptimalAdversary {
            table: Arc::clone(&self.table),
            p: CandidateSet::full(&self.shape),
        })
    }
}

/// `qc(shape)` by exhaustive minimax with memoization.
pub fn exact_qc(shape: &GridShape, options: SolveOptions) -> Result<SolveReport> {
    Solver::new(shape, options)?.solve()
}

/// The argmax adversary of a solved shape.
pub fn extract_optimal_adversary(solver: &Solver) -> Result<OptimalAdversary> {
    solver.optimal_adversary()
}

/// Replies with a corner whose remainder has the largest minimax value
/// (ties to the lexicographically smallest corner).
#[derive(Clone)]
pub struct OptimalAdversary {
    table: Arc<Mutex<Table>>,
    p: CandidateSet,
}

impl std::fmt::Debug for OptimalAdversary {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("OptimalAdversary").field("p", &self.p).finish()
    }
}

impl Adversary for OptimalAdversary {
    fn id(&self) -> &'static str {
        "optimal"
    }

    fn reply(&mut self, q: &Point) -> Result<Reply> {
        let shape = self.p.shape().clone();
        shape.validate(q)?;
        if self.p.single().as_ref() == Some(q) {
            return Ok(Reply::Found);
        }
        let mask = self.p.bits().to_u128().expect("solver shapes fit 128 cells");
        let (r, child) = lock(&self.table).best_corner(mask, shape.index_of(q))?;
        self.p = CandidateSet::from_bits(&shape, BitSet::from_u128(shape.cell_count(), child))?;
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

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BestResponse {
    pub value: u32,
    pub states: usize,
    /// A shortest query sequence ending in Found.
    pub line: Vec<(Point, Reply)>,
}

/// Fewest queries any algorithm needs against a fixed deterministic adversary.
///
/// Breadth-first search over adversary states; a query whose reply leaves the
/// state unchanged is never useful and is skipped by the visited set.
pub fn best_response<A: Adversary>(shape: &GridShape, adversary: A, max_states: usize) -> Result<BestResponse> {
    struct Node<A> {
        adversary: A,
        parent: Option<(usize, Point, Reply)>,
        depth: u32,
    }
    let mut nodes: Vec<Node<A>> = Vec::new();
    let mut seen: FxHashSet<Vec<u8>> = FxHashSet::default();
    let mut queue = VecDeque::new();
    seen.insert(adversary.key());
    nodes.push(Node {
        adversary,
        parent: None,
        depth: 0,
    });
    queue.push_back(0usize);
    let queries: Vec<Point> = shape.points().collect();
    while let Some(idx) = queue.pop_front() {
        for q in &queries {
            let mut next = nodes[idx].adversary.clone();
            let reply = next.reply(q)?;
            if reply == Reply::Found {
                let mut line = vec![(q.clone(), Reply::Found)];
                let mut cur = idx;
                while let Some((parent, pq, pr)) = &nodes[cur].parent {
                    line.push((pq.clone(), *pr));
                    cur = *parent;
                }
                line.reverse();
                return Ok(BestResponse {
                    value: nodes[idx].depth + 1,
                    states: nodes.len(),
                    line,
                });
            }
            if seen.insert(next.key()) {
                if nodes.len() >= max_states {
                    return Err(Error::Resource {
                        what: format!("best-response states on {shape}"),
                        cap: max_states,
                    });
                }
                nodes.push(Node {
                    adversary: next,
                    parent: Some((idx, q.clone(), reply)),
                    depth: nodes[idx].depth + 1,
                });
                queue.push_back(nodes.len() - 1);
            }
        }
    }
    Err(Error::Invariant("adversary never answers Found".into()))
}
