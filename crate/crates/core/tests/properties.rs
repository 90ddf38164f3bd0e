use mdsearch::adversaries::{Adversary, Greedy, Honest, SurfaceAdversary};
use mdsearch::bounds::{budget_d, within_upper};
use mdsearch::game::{excluded_box, honest_replies, is_compatible};
use mdsearch::strategies::{segment_binary_search, Rect, Strategy as _, StrategyKind};
use mdsearch::{run_match, CandidateSet, GridShape, Outcome, Point, Reply, ReplyCorner, Transcript};
use proptest::prelude::*;

fn shape_strategy(max_dim: usize, max_size: usize) -> impl Strategy<Value = GridShape> {
    prop::collection::vec(1..=max_size, 1..=max_dim).prop_map(|d| GridShape::new(d).unwrap())
}

fn point_in(shape: &GridShape) -> impl Strategy<Value = Point> {
    shape
        .dims()
        .iter()
        .map(|&n| 0..n)
        .collect::<Vec<_>>()
        .prop_map(Point::from)
}

fn corner(d: usize) -> impl Strategy<Value = ReplyCorner> {
    (0u32..(1 << d)).prop_map(move |r| ReplyCorner::from_rank(d, r))
}

fn sorted(mut d: Vec<usize>) -> GridShape {
    d.sort_unstable_by(|a, b| b.cmp(a));
    GridShape::new(d).unwrap()
}

proptest! {
    #[test]
    fn exclusion_is_complement_of_compatibility(
        (shape, u, q, r) in shape_strategy(4, 6).prop_flat_map(|s| {
            let d = s.dim();
            (Just(s.clone()), point_in(&s), point_in(&s), corner(d))
        })
    ) {
        let x = excluded_box(&shape, &q, r).unwrap();
        prop_assert!(x.contains(&q));
        prop_assert_eq!(x.contains(&u), !is_compatible(&u, &q, r).unwrap());
        prop_assert_eq!(shape.box_cells(&q, r).contains(shape.index_of(&u)), x.contains(&u));
    }

    #[test]
    fn replies_shrink_monotonically(
        (shape, qs, rs) in shape_strategy(3, 5).prop_flat_map(|s| {
            let d = s.dim();
            (Just(s.clone()), prop::collection::vec(point_in(&s), 1..6), prop::collection::vec(corner(d), 6))
        })
    ) {
        let mut p = CandidateSet::full(&shape);
        for (q, r) in qs.iter().zip(rs) {
            let next = p.apply_reply(q, r).unwrap();
            prop_assert!(next.is_subset(&p));
            prop_assert!(!next.contains(q));
            prop_assert_eq!(next.len(), p.remainder_len(q, r).unwrap());
            p = next;
        }
    }

    #[test]
    fn honest_replies_keep_the_target(
        (t, q) in shape_strategy(4, 5).prop_flat_map(|s| (point_in(&s), point_in(&s)))
    ) {
        let replies = honest_replies(&t, &q).unwrap();
        if t == q {
            prop_assert_eq!(replies, vec![Reply::Found]);
        } else {
            prop_assert!(!replies.is_empty());
            for r in replies {
                prop_assert!(is_compatible(&t, &q, r.corner().unwrap()).unwrap());
            }
        }
    }

    #[test]
    fn strategies_find_honest_targets_within_budget(
        (shape, t) in shape_strategy(3, 9)
            .prop_map(|s| sorted(s.dims().to_vec()))
            .prop_flat_map(|s| (Just(s.clone()), point_in(&s)))
    ) {
        let budget = budget_d(&shape).unwrap();
        for kind in StrategyKind::applicable(&shape) {
            let tr = run_match(
                kind.build(&shape).unwrap(),
                Honest::new(&shape, t.clone()).unwrap(),
                &shape,
                Some(&t),
            ).unwrap();
            prop_assert_eq!(tr.outcome, Outcome::Found);
            prop_assert_eq!(&tr.events.last().unwrap().0, &t);
            prop_assert!(within_upper(tr.queries() as u64, budget), "{} on {}: {}", kind, shape, tr.queries());
            let last = tr.replay().unwrap().pop().unwrap();
            prop_assert_eq!(last.single(), Some(t.clone()));
        }
    }

    #[test]
    fn transcripts_round_trip_and_replay_deterministically(
        shape in shape_strategy(3, 6).prop_map(|s| sorted(s.dims().to_vec()))
    ) {
        for kind in StrategyKind::applicable(&shape) {
            let a = run_match(kind.build(&shape).unwrap(), Greedy::new(&shape), &shape, None).unwrap();
            let b = run_match(kind.build(&shape).unwrap(), Greedy::new(&shape), &shape, None).unwrap();
            prop_assert_eq!(&a, &b);
            let back = Transcript::from_jsonl(&a.to_jsonl()).unwrap();
            prop_assert_eq!(&back, &a);
            back.replay().unwrap();
        }
    }

    #[test]
    fn segment_markers_meet(
        (w, h, bits) in (1usize..20, 1usize..8, prop::collection::vec(0u32..4, 10))
    ) {
        let rect = Rect::new((0, w - 1), (0, h - 1)).unwrap();
        let row = (h - 1) / 2;
        let mut it = bits.into_iter().cycle();
        let out = segment_binary_search(rect, row, |_| {
            let r = it.next().unwrap();
            Ok(Reply::Corner(ReplyCorner::from_rank(2, r)))
        }).unwrap();
        prop_assert!(out.markers_meet(), "{:?}", out);
    }

    #[test]
    fn surface_adversaries_never_lose_surface_points_off_surface(
        (shape, q) in prop_oneof![
            (2usize..12, 1usize..6).prop_map(|(m, n)| GridShape::new(vec![m.max(n).max(2), n]).unwrap()),
            (2usize..6, 2usize..6, 2usize..6).prop_map(|(a, b, c)| sorted(vec![a, b, c])),
        ].prop_flat_map(|s| (Just(s.clone()), point_in(&s)))
    ) {
        let mut adv = if shape.dim() == 2 {
            SurfaceAdversary::diagonal(&shape).unwrap()
        } else {
            SurfaceAdversary::plane3d(&shape).unwrap()
        };
        let surface = adv.metadata().unwrap();
        let before = adv.candidates().len();
        let reply = adv.reply(&q).unwrap();
        if !surface.contains(&q) {
            prop_assert_eq!(adv.candidates().len(), before);
        }
        if let Reply::Corner(c) = reply {
            prop_assert!(c == ReplyCorner::zeros(shape.dim()) || c == ReplyCorner::ones(shape.dim()));
        }
    }

    #[test]
    fn strategy_keys_determine_behaviour(
        (shape, rs) in shape_strategy(3, 5)
            .prop_map(|s| sorted(s.dims().to_vec()))
            .prop_flat_map(|s| { let d = s.dim(); (Just(s), prop::collection::vec(corner(d), 1..5)) })
    ) {
        for kind in StrategyKind::applicable(&shape) {
            let mut a = kind.build(&shape).unwrap();
            let mut b = kind.build(&shape).unwrap();
            for r in &rs {
                prop_assert_eq!(a.key(), b.key());
                prop_assert_eq!(a.next_step(), b.next_step());
                if a.next_step() == mdsearch::Step::Exhausted {
                    break;
                }
                a.observe(&Reply::Corner(*r)).unwrap();
                b.observe(&Reply::Corner(*r)).unwrap();
            }
        }
    }
}
