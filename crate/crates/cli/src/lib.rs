//! Command-line surface of the `mdsearch` engine.
//!
//! Exit codes: 0 success, 1 failed assertion, 2 usage error, 3 resource cap.

pub mod table;

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;

use mdsearch::adversaries::{AdversaryKind, AnyAdversary, Honest};
use mdsearch::bounds::BoundsReport;
use mdsearch::evaluator::{run_match, worst_case, Transcript};
use mdsearch::solver::{SolveOptions, Solver};
use mdsearch::strategies::StrategyKind;
use mdsearch::{Error, GridShape, Outcome, Point, Reply};

use table::{compute_row, violations, write_csv, EvalMode, Row, RowConfig};

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("assertion failed: {0}")]
    Assertion(String),
    #[error("{0}")]
    Resource(String),
    #[error("i/o: {0}")]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Engine(Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        match e {
            Error::Resource { .. } => CliError::Resource(e.to_string()),
            Error::Argument(_) | Error::DimensionMismatch { .. } | Error::OutOfBounds { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Engine(other),
        }
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(std::io::Error::other(e))
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Assertion(_) | CliError::Io(_) | CliError::Engine(_) => 1,
            CliError::Usage(_) => 2,
            CliError::Resource(_) => 3,
        }
    }
}

/// Sizes joined by `x`, e.g. `6x5x4` or `8`.
pub fn parse_shape(text: &str) -> Result<GridShape, CliError> {
    let dims = text
        .trim()
        .split('x')
        .map(|part| {
            part.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad shape '{text}': '{part}' is not a size")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    if dims.contains(&0) {
        return Err(CliError::Usage(format!("bad shape '{text}': sizes must be positive")));
    }
    GridShape::new(dims).map_err(|e| CliError::Usage(e.to_string()))
}

/// Comma-separated coordinates, e.g. `1,2,2`.
pub fn parse_point(text: &str) -> Result<Point, CliError> {
    text.split(',')
        .map(|c| {
            c.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Usage(format!("bad point '{text}'")))
        })
        .collect::<Result<Vec<_>, _>>()
        .map(Point::from)
}

/// Inclusive size range `lo-hi` or a single size.
pub fn parse_range(text: &str) -> Result<(usize, usize), CliError> {
    let bad = || CliError::Usage(format!("bad range '{text}', expected LO-HI"));
    let (lo, hi) = match text.split_once('-') {
        Some((a, b)) => (
            a.trim().parse().map_err(|_| bad())?,
            b.trim().parse().map_err(|_| bad())?,
        ),
        None => {
            let v = text.trim().parse().map_err(|_| bad())?;
            (v, v)
        }
    };
    if lo == 0 {
        return Err(CliError::Usage(format!("bad range '{text}': sizes must be positive")));
    }
    Ok((lo, hi))
}

#[derive(Parser, Debug)]
#[command(
    name = "mdsearch",
    version,
    about = "Generalized binary search game on d-dimensional grids"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Args, Debug, Clone)]
pub struct ShapeArg {
    /// Grid sizes joined by 'x', e.g. 6x5x4.
    #[arg(long)]
    pub shape: String,
    /// Reorder the sizes non-increasing.
    #[arg(long)]
    pub sort: bool,
}

impl ShapeArg {
    fn resolve(&self) -> Result<GridShape, CliError> {
        let shape = parse_shape(&self.shape)?;
        Ok(if self.sort { shape.sorted_desc() } else { shape })
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Exact query complexity by exhaustive minimax.
    Solve {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long, default_value_t = 64)]
        max_cells: usize,
        #[arg(long, default_value_t = 20_000_000)]
        max_states: usize,
        /// Canonicalize states under grid symmetries.
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        symmetry: bool,
        /// Write the principal line as a JSON-lines transcript.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Worst case of a strategy over every legal adversary.
    Evaluate {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        strategy: StrategyKind,
        #[arg(long, default_value_t = 50_000_000)]
        max_states: u64,
        /// Write the worst-case witness as a JSON-lines transcript.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Play one match.
    Simulate {
        #[command(flatten)]
        shape: ShapeArg,
        #[arg(long)]
        strategy: StrategyKind,
        #[arg(long)]
        adversary: AdversaryKind,
        /// Target for the honest adversary, e.g. 1,2,2.
        #[arg(long)]
        target: Option<String>,
        /// Cell cap for solving the shape when the adversary is optimal.
        #[arg(long, default_value_t = 64)]
        max_cells: usize,
        #[arg(long, default_value_t = 20_000_000)]
        max_states: usize,
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Closed-form bounds for a shape.
    Bounds {
        #[command(flatten)]
        shape: ShapeArg,
    },
    /// Check every bound against measurements on all shapes up to a size.
    Verify {
        #[arg(long, default_value_t = 20)]
        max_cells: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Measurement table over a grid of shapes.
    Sweep {
        /// Size range per axis, e.g. --range 2-64 --range 2-8.
        #[arg(long = "range", required = true)]
        ranges: Vec<String>,
        /// Strategies to evaluate (default: all).
        #[arg(long = "strategy")]
        strategies: Vec<StrategyKind>,
        /// Adversaries for best-response columns (default: greedy and the constructions).
        #[arg(long = "adversary")]
        adversaries: Vec<AdversaryKind>,
        /// Evaluate strategies in a single match against greedy instead of the full search.
        #[arg(long)]
        greedy_only: bool,
        /// Largest shape solved exactly.
        #[arg(long, default_value_t = 24)]
        max_cells: usize,
        #[arg(long, default_value_t = 5_000_000)]
        max_states: usize,
        #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
        symmetry: bool,
        #[arg(long)]
        out: PathBuf,
    },
}

fn write_trace(path: &Path, tr: &Transcript) -> Result<(), CliError> {
    std::fs::write(path, tr.to_jsonl())?;
    Ok(())
}

pub fn run(cli: Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match cli.command {
        Command::Solve {
            shape,
            max_cells,
            max_states,
            symmetry,
            trace,
        } => {
            let shape = shape.resolve()?;
            let opts = SolveOptions {
                symmetry,
                max_cells,
                max_states,
                principal_line: trace.is_some(),
                ..Default::default()
            };
            let r = Solver::new(&shape, opts)?.solve()?;
            writeln!(
                out,
                "shape={} exact_qc={} states={} memo={} wall_ms={}",
                shape, r.value, r.states_explored, r.peak_memo, r.wall_ms
            )?;
            if let (Some(path), Some(line)) = (trace, r.principal_line) {
                let tr = Transcript {
                    shape: shape.clone(),
                    strategy: "optimal".into(),
                    adversary: "optimal".into(),
                    target: None,
                    events: line,
                    outcome: Outcome::Found,
                };
                write_trace(&path, &tr)?;
            }
            Ok(())
        }
        Command::Evaluate {
            shape,
            strategy,
            max_states,
            trace,
        } => {
            let shape = shape.resolve()?;
            let r = worst_case(strategy.build(&shape)?, max_states)?;
            writeln!(
                out,
                "shape={} strategy={} worst_case={} correct={} nodes={} wall_ms={}",
                shape, strategy, r.worst_case, r.correct, r.nodes, r.wall_ms
            )?;
            if let Some(path) = trace {
                write_trace(&path, &r.witness)?;
            }
            if r.correct {
                Ok(())
            } else {
                Err(CliError::Assertion(format!(
                    "{strategy} can end without finding the target on {shape}"
                )))
            }
        }
        Command::Simulate {
            shape,
            strategy,
            adversary,
            target,
            max_cells,
            max_states,
            trace,
        } => {
            let shape = shape.resolve()?;
            let target = target.as_deref().map(parse_point).transpose()?;
            if let Some(t) = &target {
                shape.validate(t)?;
            }
            let adv: AnyAdversary = match (adversary, &target) {
                (AdversaryKind::Honest, Some(t)) => Honest::new(&shape, t.clone())?.into(),
                (AdversaryKind::Honest, None) => {
                    return Err(CliError::Usage("the honest adversary needs --target".into()))
                }
                (_, Some(_)) => return Err(CliError::Usage("--target is only used with --adversary honest".into())),
                (AdversaryKind::Optimal, None) => {
                    let opts = SolveOptions {
                        max_cells,
                        max_states,
                        ..Default::default()
                    };
                    let mut solver = Solver::new(&shape, opts)?;
                    solver.solve()?;
                    solver.optimal_adversary()?.into()
                }
                (kind, None) => kind.build(&shape)?,
            };
            let tr = run_match(strategy.build(&shape)?, adv, &shape, target.as_ref())?;
            for (q, r) in &tr.events {
                writeln!(out, "{q} -> {r}")?;
            }
            writeln!(out, "outcome={} queries={}", tr.outcome, tr.queries())?;
            if let Some(path) = trace {
                write_trace(&path, &tr)?;
            }
            if matches!(tr.events.last(), Some((_, Reply::Found))) {
                Ok(())
            } else {
                Err(CliError::Assertion(format!("match ended {}", tr.outcome)))
            }
        }
        Command::Bounds { shape } => {
            let shape = shape.resolve()?;
            let b = BoundsReport::new(&shape);
            writeln!(out, "shape={shape} (evaluated as {})", shape.sorted_desc())?;
            let fmt = table::fmt_float;
            for (name, v) in [
                ("lower_2d", b.lower_2d),
                ("upper_2d", b.upper_2d),
                ("lemma_upper_2d", b.lemma_upper_2d),
                ("lower_3d", b.lower_3d),
            ] {
                if let Some(v) = v {
                    writeln!(out, "{name}={}", fmt(v))?;
                }
            }
            if let Some(v) = b.per_segment_lower {
                writeln!(out, "per_segment_lower={v}")?;
            }
            if let Some(v) = b.lower_cube {
                writeln!(out, "lower_cube={v}")?;
            }
            writeln!(out, "budget_d={}", fmt(b.budget_d))?;
            for (l, u) in b.conflicts() {
                writeln!(out, "conflict: {l} exceeds {u}")?;
            }
            Ok(())
        }
        Command::Verify {
            max_cells,
            max_states,
            out: path,
        } => cmd_verify(max_cells, max_states, path.as_deref(), out),
        Command::Sweep {
            ranges,
            strategies,
            adversaries,
            greedy_only,
            max_cells,
            max_states,
            symmetry,
            out: path,
        } => {
            let config = SweepConfig {
                ranges: ranges.iter().map(|r| parse_range(r)).collect::<Result<_, _>>()?,
                row: RowConfig {
                    strategies: if strategies.is_empty() {
                        StrategyKind::ALL.to_vec()
                    } else {
                        strategies
                    },
                    adversaries: if adversaries.is_empty() {
                        table::ROW_ADVERSARIES.to_vec()
                    } else {
                        adversaries
                    },
                    eval: if greedy_only { EvalMode::Greedy } else { EvalMode::Full },
                    solve_max_cells: max_cells,
                    max_states,
                    br_max_cells: max_cells,
                    symmetry,
                    ..Default::default()
                },
                out: path,
            };
            let n = cmd_sweep(&config)?;
            writeln!(out, "wrote {n} rows to {}", config.out.display())?;
            Ok(())
        }
    }
}

/// Non-increasing shapes (sizes >= 2 beyond the first axis) with at most `max_cells` cells.
pub fn verify_shapes(max_cells: usize) -> Vec<GridShape> {
    fn go(prefix: &mut Vec<usize>, cells: usize, max_cells: usize, out: &mut Vec<GridShape>) {
        if !prefix.is_empty() {
            out.push(GridShape::new(prefix.clone()).expect("positive sizes"));
        }
        let cap = prefix.last().copied().unwrap_or(max_cells);
        let lo = if prefix.is_empty() { 1 } else { 2 };
        for n in lo..=cap.min(max_cells / cells) {
            prefix.push(n);
            go(prefix, cells * n, max_cells, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    go(&mut Vec::new(), 1, max_cells, &mut out);
    out.retain(|s| s.dim() == 1 || s.size(0) >= 2);
    out.sort_by_key(|s| s.to_string());
    out
}

fn compute_rows(shapes: &[GridShape], cfg: &RowConfig) -> Result<Vec<Row>, CliError> {
    shapes.par_iter().map(|s| compute_row(s, cfg)).collect()
}

/// Checks the sandwich and construction inequalities on every shape up to
/// `max_cells`; writes the table and fails if any row has violations.
pub fn cmd_verify(
    max_cells: usize,
    max_states: usize,
    path: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let cfg = RowConfig {
        solve_max_cells: max_cells.min(mdsearch::solver::SOLVER_CELL_LIMIT),
        br_max_cells: max_cells,
        max_states,
        ..Default::default()
    };
    let rows = compute_rows(&verify_shapes(max_cells), &cfg)?;
    let mut buf = Vec::new();
    write_csv(&mut buf, &rows, true)?;
    match path {
        Some(p) => std::fs::write(p, &buf)?,
        None => out.write_all(&buf)?,
    }
    let bad: Vec<String> = rows
        .iter()
        .filter_map(|r| {
            let v = violations(r);
            (!v.is_empty()).then(|| format!("{}: {}", r.shape, v.join("; ")))
        })
        .collect();
    if bad.is_empty() {
        Ok(())
    } else {
        for b in &bad {
            eprintln!("violation {b}");
        }
        Err(CliError::Assertion(format!("{} shape(s) violate a bound", bad.len())))
    }
}

#[derive(Clone, Debug)]
pub struct SweepConfig {
    /// Inclusive size range per axis; an empty range yields no shapes.
    pub ranges: Vec<(usize, usize)>,
    pub row: RowConfig,
    pub out: PathBuf,
}

impl SweepConfig {
    pub fn shapes(&self) -> Vec<GridShape> {
        let mut dims: Vec<Vec<usize>> = vec![vec![]];
        for &(lo, hi) in &self.ranges {
            dims = dims
                .into_iter()
                .flat_map(|p| {
                    (lo..=hi).map(move |n| {
                        let mut d = p.clone();
                        d.push(n);
                        d
                    })
                })
                .collect();
        }
        let mut shapes: Vec<GridShape> = dims
            .into_iter()
            .filter(|d| !d.is_empty())
            .map(|d| GridShape::new(d).expect("positive sizes"))
            .collect();
        shapes.sort_by_key(|s| s.to_string());
        shapes
    }
}

/// Writes one CSV row per shape; returns the number of rows.
pub fn cmd_sweep(config: &SweepConfig) -> Result<usize, CliError> {
    if config.ranges.is_empty() {
        return Err(CliError::Usage("sweep needs at least one --range".into()));
    }
    let rows = compute_rows(&config.shapes(), &config.row)?;
    let file = BufWriter::new(File::create(&config.out)?);
    write_csv(file, &rows, false)?;
    Ok(rows.len())
}
