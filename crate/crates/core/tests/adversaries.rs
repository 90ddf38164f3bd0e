use mdsearch::adversaries::{Adversary, DiagonalSpec, Greedy, SurfaceAdversary};
use mdsearch::bounds::{ceil_lower, lower_2d, lower_cube};
use mdsearch::solver::{best_response, exact_qc, SolveOptions, Solver};
use mdsearch::strategies::StrategyKind;
use mdsearch::{run_match, AnyAdversary, GridShape, Outcome};

fn shape(d: &[usize]) -> GridShape {
    GridShape::new(d.to_vec()).unwrap()
}

#[test]
fn diagonal_costs_one_binary_search_per_segment() {
    for (m, n) in [(4, 2), (8, 2), (9, 3), (16, 4), (12, 3), (20, 2), (13, 5)] {
        let s = shape(&[m, n]);
        let br = best_response(&s, SurfaceAdversary::diagonal(&s).unwrap(), 1 << 24).unwrap();
        let segments: u32 = DiagonalSpec::new(m, n)
            .unwrap()
            .segments()
            .iter()
            .map(|&(_, a, b)| (b - a + 1).ilog2() + 1)
            .sum();
        assert_eq!(br.value, segments, "({m},{n})");
    }
}

#[test]
fn diagonal_meets_the_log_bound_where_segments_are_long() {
    for (m, n) in [(4, 2), (8, 2), (9, 3), (16, 4), (12, 3)] {
        let s = shape(&[m, n]);
        let br = best_response(&s, SurfaceAdversary::diagonal(&s).unwrap(), 1 << 24).unwrap();
        assert!(
            br.value as u64 >= ceil_lower(lower_2d(m, n).unwrap()),
            "({m},{n}): {}",
            br.value
        );
    }
    // a length-1 top segment costs one query, short of log2(m/n)
    let s = shape(&[20, 2]);
    let br = best_response(&s, SurfaceAdversary::diagonal(&s).unwrap(), 1 << 24).unwrap();
    assert_eq!(br.value, 6);
    assert_eq!(ceil_lower(lower_2d(20, 2).unwrap()), 7);
}

#[test]
fn diagonal_top_segment_is_short() {
    // the top row of the diagonal holds x = 0 only, so one segment is shorter than m/n
    for (m, n) in [(4, 2), (8, 2), (16, 4), (30, 5)] {
        let segs = DiagonalSpec::new(m, n).unwrap().segments();
        assert_eq!(segs.len(), n);
        assert_eq!(segs[0], (n - 1, 0, 0));
    }
}

#[test]
fn fixed_adversaries_never_exceed_optimal_play() {
    for d in [&[4, 2][..], &[3, 3], &[5, 3], &[2, 2, 2], &[3, 3, 3]] {
        let s = shape(d);
        let qc = exact_qc(&s, SolveOptions::default()).unwrap().value;
        let mut advs: Vec<AnyAdversary> = Vec::new();
        if s.cell_count() <= 16 {
            advs.push(Greedy::new(&s).into());
        }
        if s.dim() == 2 {
            advs.push(SurfaceAdversary::diagonal(&s).unwrap().into());
        }
        if s.dims().iter().all(|&x| x == d[0]) && s.dim() >= 3 {
            advs.push(SurfaceAdversary::cube(&s).unwrap().into());
        }
        for a in advs {
            let id = a.id();
            let br = best_response(&s, a, 1 << 24).unwrap();
            assert!(br.value <= qc, "{id} on {s}: {} > {qc}", br.value);
            assert_eq!(br.line.len() as u32, br.value);
        }
    }
}

#[test]
fn cube_bound_holds_for_optimal_play() {
    for (n, d) in [(2, 3), (3, 3), (2, 4)] {
        let s = GridShape::new(vec![n; d]).unwrap();
        let qc = exact_qc(&s, SolveOptions::default()).unwrap().value as u64;
        assert!(qc >= lower_cube(n, d).unwrap(), "n={n} d={d}: {qc}");
    }
}

#[test]
fn optimal_adversary_forces_the_value() {
    for d in [&[2, 2][..], &[3, 2], &[4, 2], &[3, 3], &[2, 2, 2]] {
        let s = shape(d);
        let mut solver = Solver::new(&s, SolveOptions::default()).unwrap();
        let qc = solver.solve().unwrap().value;
        for kind in StrategyKind::applicable(&s) {
            let tr = run_match(kind.build(&s).unwrap(), solver.optimal_adversary().unwrap(), &s, None).unwrap();
            assert_eq!(tr.outcome, Outcome::Found);
            assert!(tr.queries() as u32 >= qc, "{kind} on {s}: {}", tr.queries());
        }
        let br = best_response(&s, solver.optimal_adversary().unwrap(), 1 << 24).unwrap();
        assert_eq!(br.value, qc, "{s}");
    }
}

#[test]
fn cube_replies_stay_legal() {
    for (n, d) in [(2, 3), (3, 3), (2, 4), (3, 4)] {
        let s = GridShape::new(vec![n; d]).unwrap();
        for kind in StrategyKind::applicable(&s) {
            let tr = run_match(kind.build(&s).unwrap(), SurfaceAdversary::cube(&s).unwrap(), &s, None).unwrap();
            assert_eq!(tr.outcome, Outcome::Found, "{kind} on {s}");
            tr.replay().unwrap();
        }
    }
}
