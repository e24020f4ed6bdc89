use proptest::prelude::*;

use super::*;
use crate::bf::{refine, Rank, RefinementTable};
use crate::space::{cycle, generate, path, GenKind};

fn p3() -> Arc<MetricSpace> {
    Arc::new(path(3))
}

fn tp(a: &[usize], b: &[usize]) -> TuplePair {
    TuplePair::new(a.to_vec(), b.to_vec()).unwrap()
}

#[test]
fn clock_wire_format() {
    assert_eq!(serde_json::to_string(&Clock::Finite(3)).unwrap(), "3");
    assert_eq!(serde_json::to_string(&Clock::Infinity).unwrap(), r#""inf""#);
    assert_eq!(serde_json::from_str::<Clock>(r#""inf""#).unwrap(), Clock::Infinity);
    assert_eq!(serde_json::from_str::<Clock>("2").unwrap(), Clock::Finite(2));
    assert!(serde_json::from_str::<Clock>(r#""two""#).is_err());
    assert_eq!("inf".parse::<Clock>().unwrap(), Clock::Infinity);
}

#[test]
fn move_wire_format() {
    let ch = Move::challenge(Some(0), Side::L, 2);
    assert_eq!(
        serde_json::to_string(&ch).unwrap(),
        r#"{"type":"challenge","ordinal":0,"side":"L","point":2}"#
    );
    let r = Move::Response { point: 1 };
    assert_eq!(serde_json::to_string(&r).unwrap(), r#"{"type":"response","point":1}"#);
    let back: Move = serde_json::from_str(r#"{"type":"challenge","side":"R","point":0}"#).unwrap();
    assert_eq!(back, Move::challenge(None, Side::R, 0));
}

#[test]
fn legal_move_counts() {
    let g = new_game(p3(), &[0], &[1], Clock::Finite(2)).unwrap();
    let moves = g.legal_moves().unwrap();
    assert_eq!(moves.len(), 12);
    assert_eq!(moves[0], Move::challenge(Some(0), Side::L, 0));
    assert_eq!(moves[3], Move::challenge(Some(0), Side::R, 0));
    assert_eq!(moves[6], Move::challenge(Some(1), Side::L, 0));
    let g = new_game(p3(), &[0], &[1], Clock::Infinity).unwrap();
    assert_eq!(g.legal_moves().unwrap().len(), 6);
}

#[test]
fn start_conditions() {
    let g = new_game(p3(), &[0, 0], &[1, 2], Clock::Finite(2)).unwrap();
    assert_eq!(g.outcome().unwrap().winner, Player::I);
    assert_eq!(g.legal_moves().unwrap_err(), Error::GameOver);

    let g = new_game(p3(), &[0], &[1], Clock::Finite(0)).unwrap();
    assert_eq!(
        g.outcome(),
        Some(Outcome { winner: Player::II, reason: OverReason::ZeroClock })
    );
    let g = new_game(p3(), &[0, 2], &[2, 1], Clock::Finite(0)).unwrap();
    assert_eq!(g.outcome().unwrap().winner, Player::I);

    let g = new_game(p3(), &[0, 1, 2], &[2, 1, 0], Clock::Infinity).unwrap();
    assert_eq!(g.outcome().unwrap().reason, OverReason::MapTotal);

    assert!(matches!(
        new_game(p3(), &[5], &[0], Clock::Finite(1)),
        Err(Error::IndexOutOfRange { index: 5, n: 3 })
    ));
}

#[test]
fn illegal_moves_are_rejected() {
    let g = new_game(p3(), &[0], &[1], Clock::Finite(2)).unwrap();
    for mv in [
        Move::challenge(Some(2), Side::L, 0),
        Move::challenge(None, Side::L, 0),
        Move::challenge(Some(0), Side::L, 3),
        Move::Response { point: 0 },
    ] {
        assert!(matches!(g.apply_move(mv), Err(Error::IllegalMove { .. })), "{mv}");
    }
    let g = g.apply_move(Move::challenge(Some(1), Side::R, 2)).unwrap();
    assert!(matches!(
        g.apply_move(Move::challenge(Some(0), Side::L, 0)),
        Err(Error::IllegalMove { .. })
    ));
}

#[test]
fn clocked_line_ends_on_zero() {
    let g = new_game(p3(), &[0], &[1], Clock::Finite(3)).unwrap();
    let g = g.apply_move(Move::challenge(Some(1), Side::L, 1)).unwrap();
    let g = g.apply_move(Move::Response { point: 0 }).unwrap();
    assert_eq!(g.clock(), Clock::Finite(1));
    assert_eq!(g.map(), &PartialMap::from_pairs([(0, 1), (1, 0)]).unwrap());
    let g = g.apply_move(Move::challenge(Some(0), Side::L, 2)).unwrap();
    let g = g.apply_move(Move::Response { point: 2 }).unwrap();
    assert_eq!(
        g.outcome(),
        Some(Outcome { winner: Player::I, reason: OverReason::ClockExpired })
    );
    assert_eq!(g.rounds().len(), 2);
    assert_eq!(g.rounds()[1].pebbles(), (2, 2));
    let again = GameState::replay(p3(), tp(&[0], &[1]), Clock::Finite(3), g.log()).unwrap();
    assert_eq!(again.outcome(), g.outcome());
}

#[test]
fn invalid_extension_loses() {
    let g = new_game(p3(), &[0], &[1], Clock::Infinity).unwrap();
    let g = g.apply_move(Move::challenge(None, Side::L, 2)).unwrap();
    let g = g.apply_move(Move::Response { point: 1 }).unwrap();
    assert_eq!(
        g.outcome().unwrap().reason,
        OverReason::InvalidExtension { reason: InvalidExtension::DuplicateTarget }
    );
}

#[test]
fn unclocked_ends_when_distances_break() {
    let g = new_game(p3(), &[0], &[1], Clock::Infinity).unwrap();
    let g = g.apply_move(Move::challenge(None, Side::L, 2)).unwrap();
    let g = g.apply_move(Move::Response { point: 0 }).unwrap();
    assert_eq!(g.outcome().unwrap().reason, OverReason::NotIsometry);
}

#[test]
fn engine_examples() {
    let table = refine(&path(3)).unwrap();
    let g = new_game(p3(), &[0], &[1], Clock::Finite(3)).unwrap();
    assert_eq!(engine_move(&g, &table).unwrap(), Move::challenge(Some(0), Side::L, 2));

    let g = new_game(p3(), &[0], &[2], Clock::Finite(3)).unwrap();
    let g = g.apply_move(Move::challenge(Some(0), Side::L, 1)).unwrap();
    assert_eq!(engine_move(&g, &table).unwrap(), Move::Response { point: 1 });

    let other = refine(&cycle(4)).unwrap();
    assert_eq!(engine_move(&g, &other).unwrap_err(), Error::TableMismatch);
}

#[test]
fn hints_follow_the_table() {
    let table = refine(&path(3)).unwrap();
    let g = new_game(p3(), &[0], &[1], Clock::Finite(1)).unwrap();
    let h = hints(&g, &table).unwrap();
    assert_eq!(h.rank, Rank::Finite(1));
    assert_eq!(h.non_losing, vec![Move::challenge(Some(0), Side::L, 2)]);
    let g = g.apply_move(Move::challenge(Some(0), Side::L, 1)).unwrap();
    let h = hints(&g, &table).unwrap();
    assert_eq!(h.non_losing, vec![Move::Response { point: 0 }, Move::Response { point: 2 }]);
}

#[test]
fn solver_examples() {
    let p3 = path(3);
    let v = solve(&p3, &tp(&[0], &[1]), Clock::Finite(1)).unwrap();
    assert_eq!(v.winner, Player::I);
    let Certificate::Challenges(tree) = &v.certificate else { panic!() };
    assert_eq!(tree.first(), Some(Challenge { ordinal: Some(0), side: Side::L, point: 2 }));
    assert_eq!(tree.depth(), 1);
    assert!(v.verify(&p3, &tp(&[0], &[1]), Clock::Finite(1)));

    let v = solve(&p3, &tp(&[0], &[2]), Clock::Infinity).unwrap();
    assert_eq!(v.winner, Player::II);
    assert!(v.verify(&p3, &tp(&[0], &[2]), Clock::Infinity));
    // A certificate does not carry over to a different start.
    assert!(!v.verify(&p3, &tp(&[0], &[1]), Clock::Infinity));

    assert!(matches!(
        solve(&p3, &tp(&[3], &[0]), Clock::Finite(1)),
        Err(Error::IndexOutOfRange { .. })
    ));
    assert!(matches!(
        solve(&path(7), &TuplePair::empty(), Clock::Finite(1)),
        Err(Error::SpaceTooLarge { n: 7, limit: 6 })
    ));
}

fn small_space(seed: u64, n: usize) -> MetricSpace {
    if seed % 2 == 0 {
        generate(&GenKind::RandomL1 { n, dim: 2, grid: 3, denom: 1 }, seed).unwrap()
    } else {
        generate(&GenKind::RandomGraph { n, extra_edge_pct: 40, max_weight: 2, denom: 1 }, seed).unwrap()
    }
}

/// Plays the engine against itself and returns the winner.
fn self_play(space: Arc<MetricSpace>, table: &RefinementTable, start: TuplePair, clock: Clock) -> Player {
    let mut g = GameState::new(space, start, clock).unwrap();
    while !g.is_over() {
        g = g.apply_move(engine_move(&g, table).unwrap()).unwrap();
    }
    g.outcome().unwrap().winner
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn solver_matches_table(seed in 0u64..10_000, n in 1usize..=4) {
        let space = small_space(seed, n);
        let table = refine(&space).unwrap();
        let mut solver = GameSolver::new(&space);
        for (m, rank) in table.entries() {
            let start = m.to_tuple_pair();
            for c in 0..=table.alpha_star() + 2 {
                let v = solver.solve(&start, Clock::Finite(c)).unwrap();
                prop_assert_eq!(v.winner == Player::II, rank.survives(c), "{} clock {}", m, c);
                prop_assert!(v.verify(&space, &start, Clock::Finite(c)));
            }
            let v = solver.solve(&start, Clock::Infinity).unwrap();
            prop_assert_eq!(v.winner == Player::II, rank.is_top(), "{} unclocked", m);
            prop_assert!(v.verify(&space, &start, Clock::Infinity));
        }
    }

    #[test]
    fn engine_wins_when_it_should(seed in 0u64..10_000, n in 2usize..=5) {
        let space = Arc::new(small_space(seed, n));
        let table = refine(&space).unwrap();
        for (m, rank) in table.entries().filter(|(m, _)| m.len() <= 2) {
            for clock in [Clock::Finite(1), Clock::Finite(2), Clock::Finite(3), Clock::Infinity] {
                let expect = match clock {
                    Clock::Finite(c) => rank.survives(c),
                    Clock::Infinity => rank.is_top(),
                };
                let winner = self_play(space.clone(), &table, m.to_tuple_pair(), clock);
                prop_assert_eq!(winner == Player::II, expect);
            }
        }
    }
}
