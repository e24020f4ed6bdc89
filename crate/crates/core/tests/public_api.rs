use std::sync::Arc;

use scottrank::bf::{equiv_at, rank_of_pair, scott_rank};
use scottrank::game::{new_game, solve, OverReason};
use scottrank::isometry::{autoisometries, extends_to_autoisometry, orbits, orbits_by_extension};
use scottrank::space::{decode, encode, generate, path, GenKind};
use scottrank::{refine, Clock, MetricSpace, Move, PartialMap, Player, Rank, Side, SpaceError, TuplePair};

fn two() -> MetricSpace {
    decode(r#"{"d": [["0","1"],["1","0"]]}"#).unwrap()
}

fn tp(a: &[usize], b: &[usize]) -> TuplePair {
    TuplePair::new(a.to_vec(), b.to_vec()).unwrap()
}

#[test]
fn decode_errors_carry_positions() {
    let err = decode("{\"d\": [[\"0\", \"1/0\"],\n [\"1\", \"0\"]]}").unwrap_err();
    assert!(matches!(err, SpaceError::Parse { line: 1, .. }), "{err:?}");
    let err = decode(r#"{"d": [["0","1","5"],["1","0","1"],["5","1","0"]]}"#).unwrap_err();
    assert!(matches!(err, SpaceError::TriangleViolation(..)), "{err:?}");
}

#[test]
fn text_format_round_trips() {
    let space = generate(&GenKind::RandomL1 { n: 5, dim: 2, grid: 5, denom: 3 }, 11).unwrap();
    assert_eq!(decode(&encode(&space)).unwrap(), space);
}

#[test]
fn apply_move_examples() {
    let p3 = Arc::new(path(3));
    let g = new_game(p3.clone(), &[0], &[2], Clock::Finite(1)).unwrap();
    let g = g.apply_move(Move::challenge(Some(0), Side::L, 2)).unwrap();
    let g = g.apply_move(Move::Response { point: 0 }).unwrap();
    assert_eq!(g.outcome().unwrap().winner, Player::II);

    let g = new_game(p3.clone(), &[0], &[1], Clock::Finite(1)).unwrap();
    let g = g.apply_move(Move::challenge(Some(0), Side::L, 2)).unwrap();
    let g = g.apply_move(Move::Response { point: 1 }).unwrap();
    assert_eq!(g.outcome().unwrap().winner, Player::I);
    assert!(matches!(g.outcome().unwrap().reason, OverReason::InvalidExtension { .. }));

    let g = new_game(Arc::new(two()), &[], &[], Clock::Infinity).unwrap();
    assert!(g.map().is_empty());
    assert_eq!(g.to_move(), Some(Player::I));
}

#[test]
fn solve_examples() {
    let p3 = path(3);
    assert_eq!(solve(&p3, &tp(&[0], &[1]), Clock::Finite(1)).unwrap().winner, Player::I);
    assert_eq!(solve(&p3, &tp(&[0], &[2]), Clock::Finite(5)).unwrap().winner, Player::II);
    let v = solve(&two(), &TuplePair::empty(), Clock::Infinity).unwrap();
    assert_eq!(v.winner, Player::II);
    assert!(v.verify(&two(), &TuplePair::empty(), Clock::Infinity));
}

#[test]
fn modules_agree_on_small_examples() {
    let p3 = path(3);
    let table = refine(&p3).unwrap();
    for (m, rank) in table.entries() {
        let extends = extends_to_autoisometry(&p3, &m).unwrap().is_some();
        assert_eq!(rank == Rank::Top, extends, "{m}");
    }
    assert_eq!(scott_rank(&two()).unwrap().value, 0);
    assert!(equiv_at(&two(), &tp(&[0], &[1]), 5).unwrap());
    assert_eq!(rank_of_pair(&p3, &tp(&[0], &[2])).unwrap(), Rank::Top);
    assert_eq!(autoisometries(&p3).unwrap().len(), 2);
    // Orbits of singletons match the Top singletons.
    for (a, b) in (0..3).flat_map(|a| (0..3).map(move |b| (a, b))) {
        let same = orbits(&p3, 1).unwrap().iter().any(|o| o.contains(&vec![a]) && o.contains(&vec![b]));
        let map = PartialMap::from_pairs([(a, b)]).unwrap();
        assert_eq!(table.rank(&map).unwrap().is_top(), same);
    }
    assert_eq!(orbits(&p3, 2).unwrap(), orbits_by_extension(&p3, 2).unwrap());
}
