//! Per-shape measurement rows shared by `verify` and `sweep`.

use std::io::Write;
use std::time::Instant;

use mdsearch::adversaries::AdversaryKind;
use mdsearch::bounds::{ceil_lower, within_upper, BoundsReport};
use mdsearch::solver::{best_response, exact_qc, SolveOptions};
use mdsearch::strategies::StrategyKind;
use mdsearch::{run_match, worst_case, Error, GridShape, Outcome};

use crate::CliError;

/// Fixed leading columns; the header is part of the output contract.
pub const BOUND_COLUMNS: [&str; 7] = [
    "shape",
    "lower_2d",
    "per_segment_lower",
    "lower_3d",
    "lower_cube",
    "budget_d",
    "exact_qc",
];

pub const ROW_ADVERSARIES: [AdversaryKind; 4] = [
    AdversaryKind::Greedy,
    AdversaryKind::Diagonal,
    AdversaryKind::Plane3d,
    AdversaryKind::Cube,
];

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMode {
    /// Full adversarial search over every legal reply.
    Full,
    /// One match against the greedy adversary.
    Greedy,
}

#[derive(Clone, Debug)]
pub struct RowConfig {
    pub strategies: Vec<StrategyKind>,
    pub adversaries: Vec<AdversaryKind>,
    pub eval: EvalMode,
    pub solve_max_cells: usize,
    pub max_states: usize,
    pub max_nodes: u64,
    pub br_max_cells: usize,
    pub symmetry: bool,
}

impl Default for RowConfig {
    fn default() -> Self {
        Self {
            strategies: StrategyKind::ALL.to_vec(),
            adversaries: ROW_ADVERSARIES.to_vec(),
            eval: EvalMode::Full,
            solve_max_cells: 24,
            max_states: 5_000_000,
            max_nodes: 20_000_000,
            br_max_cells: 24,
            symmetry: true,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Measured {
    pub queries: u32,
    /// Every explored branch ended in Found.
    pub correct: bool,
}

#[derive(Clone, Debug)]
pub struct Row {
    pub shape: GridShape,
    pub bounds: BoundsReport,
    pub exact: Option<u32>,
    pub worst: Vec<(StrategyKind, Option<Measured>)>,
    pub best_response: Vec<(AdversaryKind, Option<u32>)>,
    pub wall_ms: u128,
}

/// `None` for resource caps and inapplicable combinations.
fn capped<T>(r: mdsearch::Result<T>) -> Result<Option<T>, CliError> {
    match r {
        Ok(v) => Ok(Some(v)),
        Err(Error::Resource { .. } | Error::Argument(_)) => Ok(None),
        Err(e) => Err(e.into()),
    }
}

pub fn compute_row(shape: &GridShape, cfg: &RowConfig) -> Result<Row, CliError> {
    let start = Instant::now();
    let bounds = BoundsReport::new(shape);
    let exact = if shape.cell_count() <= cfg.solve_max_cells {
        let opts = SolveOptions {
            symmetry: cfg.symmetry,
            max_cells: cfg.solve_max_cells,
            max_states: cfg.max_states,
            ..Default::default()
        };
        capped(exact_qc(shape, opts))?.map(|r| r.value)
    } else {
        None
    };
    let mut worst = Vec::new();
    for kind in StrategyKind::ALL {
        let cell = if cfg.strategies.contains(&kind) && kind.applies_to(shape) {
            let strategy = kind.build(shape)?;
            match cfg.eval {
                EvalMode::Full => capped(worst_case(strategy, cfg.max_nodes))?.map(|r| Measured {
                    queries: r.worst_case,
                    correct: r.correct,
                }),
                EvalMode::Greedy => {
                    let adv = AdversaryKind::Greedy.build(shape)?;
                    let tr = run_match(strategy, adv, shape, None)?;
                    Some(Measured {
                        queries: tr.queries() as u32,
                        correct: tr.outcome == Outcome::Found,
                    })
                }
            }
        } else {
            None
        };
        worst.push((kind, cell));
    }
    let mut br = Vec::new();
    for kind in ROW_ADVERSARIES {
        let cell = if cfg.adversaries.contains(&kind) && shape.cell_count() <= cfg.br_max_cells {
            match capped(kind.build(shape))? {
                Some(adv) => capped(best_response(shape, adv, cfg.max_states))?.map(|b| b.value),
                None => None,
            }
        } else {
            None
        };
        br.push((kind, cell));
    }
    Ok(Row {
        shape: shape.clone(),
        bounds,
        exact,
        worst,
        best_response: br,
        wall_ms: start.elapsed().as_millis(),
    })
}

/// Failed inequalities of the finite sandwich and the adversary constructions.
pub fn violations(row: &Row) -> Vec<String> {
    let mut out = Vec::new();
    let b = &row.bounds;
    let measured: Vec<(StrategyKind, Measured)> = row.worst.iter().filter_map(|&(k, m)| Some((k, m?))).collect();
    for (name, v) in b.lowers() {
        let need = ceil_lower(v);
        if let Some(e) = row.exact.filter(|&e| (e as u64) < need) {
            out.push(format!("{name} {} > exact_qc {e}", fmt_float(v)));
        }
        for (k, m) in &measured {
            if (m.queries as u64) < need {
                out.push(format!("{name} {} > worst_{k} {}", fmt_float(v), m.queries));
            }
        }
    }
    for (k, m) in &measured {
        if !m.correct {
            out.push(format!("{k} does not always find the target"));
        }
        if let Some(e) = row.exact.filter(|&e| e > m.queries) {
            out.push(format!("worst_{k} {} < exact_qc {e}", m.queries));
        }
        if !within_upper(m.queries as u64, b.budget_d) {
            out.push(format!("worst_{k} {} > budget_d {}", m.queries, fmt_float(b.budget_d)));
        }
    }
    for &(kind, value) in &row.best_response {
        let Some(v) = value else { continue };
        if let Some(e) = row.exact.filter(|&e| v > e) {
            out.push(format!("br_{kind} {v} > exact_qc {e}"));
        }
        let need = match kind {
            AdversaryKind::Diagonal => b.lower_2d.map(ceil_lower),
            AdversaryKind::Plane3d => b.lower_3d.map(ceil_lower),
            AdversaryKind::Cube => b.lower_cube,
            _ => None,
        };
        if let Some(need) = need.filter(|&n| (v as u64) < n) {
            out.push(format!("br_{kind} {v} < {need}"));
        }
    }
    out
}

/// `%g`-style formatting with six significant digits.
pub fn fmt_float(x: f64) -> String {
    if x == 0.0 || !x.is_finite() {
        return format!("{x}");
    }
    let exp = x.abs().log10().floor() as i32;
    if !(-5..6).contains(&exp) {
        return format!("{x:.5e}");
    }
    let decimals = (5 - exp).max(0) as usize;
    let s = format!("{x:.decimals$}");
    if s.contains('.') {
        s.trim_end_matches('0').trim_end_matches('.').to_string()
    } else {
        s
    }
}

pub fn header(with_violations: bool) -> Vec<String> {
    let mut h: Vec<String> = BOUND_COLUMNS.iter().map(|s| s.to_string()).collect();
    h.extend(StrategyKind::ALL.iter().map(|k| format!("worst_{k}")));
    h.extend(ROW_ADVERSARIES.iter().map(|k| format!("br_{k}")));
    h.push("wall_ms".into());
    if with_violations {
        h.push("violations".into());
    }
    h
}

fn opt<T: ToString>(v: Option<T>) -> String {
    v.map(|v| v.to_string()).unwrap_or_default()
}

pub fn record(row: &Row, violations: Option<&[String]>) -> Vec<String> {
    let b = &row.bounds;
    let mut r = vec![
        row.shape.to_string(),
        opt(b.lower_2d.map(fmt_float)),
        opt(b.per_segment_lower),
        opt(b.lower_3d.map(fmt_float)),
        opt(b.lower_cube),
        fmt_float(b.budget_d),
        opt(row.exact),
    ];
    r.extend(row.worst.iter().map(|(_, m)| opt(m.map(|m| m.queries))));
    r.extend(row.best_response.iter().map(|(_, v)| opt(*v)));
    r.push(row.wall_ms.to_string());
    if let Some(v) = violations {
        r.push(v.join("; "));
    }
    r
}

pub fn write_csv<W: Write>(out: W, rows: &[Row], with_violations: bool) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(header(with_violations))?;
    for row in rows {
        let v = with_violations.then(|| violations(row));
        w.write_record(record(row, v.as_deref()))?;
    }
    w.flush()?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn float_format() {
        assert_eq!(fmt_float(0.0), "0");
        assert_eq!(fmt_float(4.0), "4");
        assert_eq!(fmt_float(13.65685424949238), "13.6569");
        assert_eq!(fmt_float(11.378), "11.378");
        assert_eq!(fmt_float(1234567.0), "1.23457e6");
        assert_eq!(fmt_float(0.5), "0.5");
    }

    #[test]
    fn header_prefix() {
        assert!(header(false)
            .join(",")
            .starts_with("shape,lower_2d,per_segment_lower,lower_3d,lower_cube,budget_d,exact_qc,"));
    }
}
