//! Matches between a strategy and an adversary, and exhaustive worst-case
//! evaluation of a strategy over every legal reply sequence.

use std::fmt;
use std::time::Instant;

use rustc_hash::FxHashMap;
use serde::{Deserialize, Serialize};

use crate::adversaries::Adversary;
use crate::error::{Error, Result};
use crate::game::{is_compatible, CandidateSet, GridShape, Point, Reply, ReplyCorner};
use crate::strategies::{Step, Strategy};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Outcome {
    Found,
    Exhausted,
    DepthCapped,
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Found => "found",
            Outcome::Exhausted => "exhausted",
            Outcome::DepthCapped => "depth_capped",
        })
    }
}

/// Query budget after which a match or evaluation branch is abandoned.
pub fn depth_cap(shape: &GridShape) -> usize {
    4 * shape.cell_count()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Transcript {
    pub shape: GridShape,
    pub strategy: String,
    pub adversary: String,
    pub target: Option<Point>,
    pub events: Vec<(Point, Reply)>,
    pub outcome: Outcome,
}

#[derive(Serialize, Deserialize)]
struct Header {
    shape: Vec<usize>,
    strategy: String,
    adversary: String,
    target: Option<Point>,
    queries: usize,
    outcome: Outcome,
}

#[derive(Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum WireReply {
    Found,
    Corner(Vec<u8>),
}

#[derive(Serialize, Deserialize)]
struct Event {
    q: Point,
    reply: WireReply,
}

fn json_err(e: serde_json::Error) -> Error {
    Error::Argument(format!("malformed transcript: {e}"))
}

impl Transcript {
    pub fn queries(&self) -> usize {
        self.events.len()
    }

    /// JSON lines: a header object, then one object per query.
    pub fn to_jsonl(&self) -> String {
        let header = Header {
            shape: self.shape.dims().to_vec(),
            strategy: self.strategy.clone(),
            adversary: self.adversary.clone(),
            target: self.target.clone(),
            queries: self.queries(),
            outcome: self.outcome,
        };
        let mut out = serde_json::to_string(&header).expect("header serializes");
        out.push('\n');
        for (q, reply) in &self.events {
            let reply = match reply {
                Reply::Found => WireReply::Found,
                Reply::Corner(c) => WireReply::Corner(c.bits().into_iter().map(u8::from).collect()),
            };
            let event = Event { q: q.clone(), reply };
            out.push_str(&serde_json::to_string(&event).expect("event serializes"));
            out.push('\n');
        }
        out
    }

    pub fn from_jsonl(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header: Header =
            serde_json::from_str(lines.next().ok_or_else(|| Error::Argument("empty transcript".into()))?)
                .map_err(json_err)?;
        let shape = GridShape::new(header.shape)?;
        let mut events = Vec::new();
        for line in lines {
            let e: Event = serde_json::from_str(line).map_err(json_err)?;
            shape.validate(&e.q)?;
            let reply = match e.reply {
                WireReply::Found => Reply::Found,
                WireReply::Corner(bits) => {
                    if bits.iter().any(|&b| b > 1) {
                        return Err(Error::Argument(format!("corner bits must be 0 or 1, got {bits:?}")));
                    }
                    let bits: Vec<bool> = bits.into_iter().map(|b| b == 1).collect();
                    if bits.len() != shape.dim() {
                        return Err(Error::DimensionMismatch {
                            expected: shape.dim(),
                            got: bits.len(),
                        });
                    }
                    Reply::Corner(ReplyCorner::new(&bits)?)
                }
            };
            events.push((e.q, reply));
        }
        if events.len() != header.queries {
            return Err(Error::Argument(format!(
                "header announces {} queries, found {}",
                header.queries,
                events.len()
            )));
        }
        Ok(Self {
            shape,
            strategy: header.strategy,
            adversary: header.adversary,
            target: header.target,
            events,
            outcome: header.outcome,
        })
    }

    /// Recomputes the candidate sets, checking every reply; returns the set
    /// after each event.
    pub fn replay(&self) -> Result<Vec<CandidateSet>> {
        let mut p = CandidateSet::full(&self.shape);
        let mut out = Vec::with_capacity(self.events.len());
        for (i, (q, reply)) in self.events.iter().enumerate() {
            p = check_reply(&p, q, reply, self.target.as_ref()).map_err(|e| at_step(i, e))?;
            if *reply == Reply::Found && i + 1 != self.events.len() {
                return Err(Error::Protocol(format!(
                    "event {i}: Found before the end of the transcript"
                )));
            }
            out.push(p.clone());
        }
        let ends_found = matches!(self.events.last(), Some((_, Reply::Found)));
        if ends_found != (self.outcome == Outcome::Found) {
            return Err(Error::Protocol(format!(
                "outcome {} disagrees with the events",
                self.outcome
            )));
        }
        Ok(out)
    }
}

fn at_step(i: usize, e: Error) -> Error {
    match e {
        Error::Protocol(m) => Error::Protocol(format!("event {i}: {m}")),
        other => other,
    }
}

/// Validates `reply` to `q` against the candidates `p` and returns the new set.
///
/// Found is legal iff `q` is still possible (and equals the declared target);
/// a corner is legal iff it keeps some candidate (and the target).
fn check_reply(p: &CandidateSet, q: &Point, reply: &Reply, target: Option<&Point>) -> Result<CandidateSet> {
    p.shape().validate(q)?;
    match reply {
        Reply::Found => {
            if !p.contains(q) {
                return Err(Error::Protocol(format!("Found at {q}, which was already excluded")));
            }
            if let Some(t) = target.filter(|t| *t != q) {
                return Err(Error::Protocol(format!("Found at {q}, but the target is {t}")));
            }
            CandidateSet::from_points(p.shape(), std::slice::from_ref(q))
        }
        Reply::Corner(r) => {
            if r.dim() != q.dim() {
                return Err(Error::Protocol(format!(
                    "corner {r} does not match dimension {}",
                    q.dim()
                )));
            }
            if let Some(t) = target {
                if !is_compatible(t, q, *r)? {
                    return Err(Error::Protocol(format!("corner {r} at {q} contradicts target {t}")));
                }
            }
            let next = p.apply_reply(q, *r)?;
            if next.is_empty() {
                return Err(Error::Protocol(format!("corner {r} at {q} excludes every candidate")));
            }
            Ok(next)
        }
    }
}

/// Plays one match. With a declared target the adversary must be honest and
/// every reply is also checked against the target.
pub fn run_match<S: Strategy, A: Adversary>(
    mut strategy: S,
    mut adversary: A,
    shape: &GridShape,
    target: Option<&Point>,
) -> Result<Transcript> {
    if strategy.shape() != shape {
        return Err(Error::Argument(format!(
            "strategy plays on {}, match is on {shape}",
            strategy.shape()
        )));
    }
    if let Some(t) = target {
        shape.validate(t)?;
        if adversary.id() != "honest" {
            return Err(Error::Argument(format!(
                "a declared target needs the honest adversary, got {}",
                adversary.id()
            )));
        }
    }
    let cap = depth_cap(shape);
    let mut p = CandidateSet::full(shape);
    let mut events = Vec::new();
    let outcome = loop {
        if events.len() >= cap {
            break Outcome::DepthCapped;
        }
        let q = match strategy.next_step() {
            Step::Exhausted => break Outcome::Exhausted,
            Step::Query(q) => q,
        };
        let reply = adversary.reply(&q)?;
        p = check_reply(&p, &q, &reply, target)
            .map_err(|e| at_step(events.len(), e))
            .map_err(|e| match e {
                Error::Protocol(m) => Error::Protocol(format!("{} adversary: {m}", adversary.id())),
                other => other,
            })?;
        events.push((q, reply));
        if reply == Reply::Found {
            break Outcome::Found;
        }
        strategy.observe(&reply)?;
    };
    Ok(Transcript {
        shape: shape.clone(),
        strategy: strategy.id().to_string(),
        adversary: adversary.id().to_string(),
        target: target.cloned(),
        events,
        outcome,
    })
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EvaluationReport {
    pub shape: GridShape,
    pub strategy: String,
    pub worst_case: u32,
    /// Every leaf of the reply tree ends in Found.
    pub correct: bool,
    pub nodes: u64,
    pub witness: Transcript,
    pub wall_ms: u128,
}

#[derive(Clone, Copy)]
struct Entry {
    /// Queries still asked on the worst branch, including the last one.
    worst: u32,
    correct: bool,
    capped: bool,
    reply: Option<Reply>,
}

struct Search {
    memo: FxHashMap<Vec<u8>, Entry>,
    nodes: u64,
    max_nodes: u64,
    cap: usize,
}

impl Search {
    fn key<S: Strategy>(s: &S, p: &CandidateSet) -> Vec<u8> {
        let mut k = s.key();
        k.push(0xff);
        p.write_key(&mut k);
        k
    }

    fn visit<S: Strategy>(&mut self, s: &S, p: &CandidateSet, depth: usize) -> Result<Entry> {
        let q = match s.next_step() {
            Step::Exhausted => {
                return Ok(Entry {
                    worst: 0,
                    correct: false,
                    capped: false,
                    reply: None,
                });
            }
            Step::Query(q) => q,
        };
        if depth >= self.cap {
            return Ok(Entry {
                worst: 0,
                correct: false,
                capped: true,
                reply: None,
            });
        }
        if p.single().as_ref() == Some(&q) {
            return Ok(Entry {
                worst: 1,
                correct: true,
                capped: false,
                reply: Some(Reply::Found),
            });
        }
        let key = Self::key(s, p);
        if let Some(e) = self.memo.get(&key) {
            return Ok(*e);
        }
        self.nodes += 1;
        if self.nodes > self.max_nodes {
            return Err(Error::Resource {
                what: format!("evaluation nodes on {}", p.shape()),
                cap: self.max_nodes as usize,
            });
        }
        let mut acc = Entry {
            worst: 0,
            correct: true,
            capped: false,
            reply: None,
        };
        for r in p.valid_corner_replies(&q)? {
            let reply = Reply::Corner(r);
            let mut child = s.clone();
            child.observe(&reply)?;
            let e = self.visit(&child, &p.apply_reply(&q, r)?, depth + 1)?;
            if acc.reply.is_none() || e.worst + 1 > acc.worst {
                acc.worst = e.worst + 1;
                acc.reply = Some(reply);
            }
            acc.correct &= e.correct;
            acc.capped |= e.capped;
        }
        self.memo.insert(key, acc);
        Ok(acc)
    }
}

/// Largest number of queries `strategy` asks over every legal adversary.
///
/// Depth-first over the valid corners at each query (Found only when the
/// candidates are exactly the query), memoized on strategy state and
/// candidate set. The witness replays a worst branch.
pub fn worst_case<S: Strategy>(strategy: S, max_nodes: u64) -> Result<EvaluationReport> {
    let start = Instant::now();
    let shape = strategy.shape().clone();
    let mut search = Search {
        memo: FxHashMap::default(),
        nodes: 0,
        max_nodes,
        cap: depth_cap(&shape),
    };
    let p = CandidateSet::full(&shape);
    let root = search.visit(&strategy, &p, 0)?;

    let mut s = strategy.clone();
    let mut p = p;
    let mut events = Vec::new();
    let outcome = loop {
        let q = match s.next_step() {
            Step::Exhausted => break Outcome::Exhausted,
            Step::Query(q) => q,
        };
        if events.len() >= search.cap {
            break Outcome::DepthCapped;
        }
        let e = search.visit(&s, &p, events.len())?;
        let reply = e
            .reply
            .ok_or_else(|| Error::Invariant("witness lost its branch".into()))?;
        events.push((q.clone(), reply));
        match reply {
            Reply::Found => break Outcome::Found,
            Reply::Corner(r) => {
                p = p.apply_reply(&q, r)?;
                s.observe(&reply)?;
            }
        }
    };
    Ok(EvaluationReport {
        strategy: strategy.id().to_string(),
        worst_case: root.worst,
        correct: root.correct && !root.capped,
        nodes: search.nodes,
        witness: Transcript {
            shape: shape.clone(),
            strategy: strategy.id().to_string(),
            adversary: "worst-case".to_string(),
            target: None,
            events,
            outcome,
        },
        shape,
        wall_ms: start.elapsed().as_millis(),
    })
}
