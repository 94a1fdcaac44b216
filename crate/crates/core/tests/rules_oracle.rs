//! Cross-checks the move generator against a deliberately naive
//! reimplementation built from hash maps and plain coordinate arithmetic.

use std::collections::HashSet;

mod common;

use common::oracle::{disagreement, naive_of, on_star, played, scattered, Hex, Oracle};

use checkers_core::env::end_turn_action;
use checkers_core::rules::perft;
use checkers_core::{initial_state, seeding, BoardState, CubeCoord, PlayerId, Status, Submove};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::Rng;

fn assert_agrees(s: &BoardState) {
    if let Some(msg) = disagreement(s) {
        panic!("{msg}\n{}", checkers_core::render::frame(s));
    }
}

#[test]
fn perft_matches_oracle() {
    for (n, depth) in [(1u32, 5u32), (2, 4), (3, 3)] {
        for first in [0u8, 3] {
            let s = initial_state(n, 1000, PlayerId::new(first).unwrap()).unwrap();
            let o = Oracle::start(n as i32, first);
            for d in 1..=depth {
                assert_eq!(perft(&s, d), o.perft(d), "N={n} depth {d} first {first}");
            }
        }
    }
}

#[test]
fn initial_perft_values() {
    let s = initial_state(2, 200, PlayerId::new(0).unwrap()).unwrap();
    let got: Vec<u64> = (1..=3).map(|d| perft(&s, d)).collect();
    assert_eq!(got, vec![6, 25, 107]);
}

#[test]
fn masks_match_oracle_on_random_states() {
    let mut rng = seeding::rng(2024, 1);
    for n in [1u32, 2] {
        for k in 0..10_000 {
            let s = if k % 2 == 0 { played(n, &mut rng) } else { scattered(n, &mut rng) };
            assert_agrees(&s);
        }
    }
}

#[test]
fn jump_chains_never_revisit() {
    let mut rng = seeding::rng(7, 0);
    for _ in 0..2000 {
        let mut s = scattered(2, &mut rng);
        let mut seen: HashSet<Hex> = HashSet::new();
        let mover = s.current();
        while s.is_running() && s.current() == mover {
            let moves = s.legal_submoves().unwrap();
            let m = *moves.choose(&mut rng).unwrap();
            if let Submove::Jump { src, .. } = m {
                seen.insert((src.q, src.r));
                let to = m.target().unwrap();
                assert!(seen.insert((to.q, to.r)), "landed twice on {to}");
            }
            s.apply_in_place(m).unwrap();
        }
    }
}

#[test]
fn end_turn_index_is_last() {
    for n in 1..=4 {
        let side = 4 * n as usize + 1;
        assert_eq!(end_turn_action(n), side * side * 12);
    }
}

/// An opponent parked in the last free target hole blocks the win; the
/// game then runs to the turn limit.
#[test]
fn spoiling_is_representable_at_n4() {
    let n = 4u32;
    let me = PlayerId::new(0).unwrap();
    let spoiler = PlayerId::new(1).unwrap();
    let target: Vec<CubeCoord> = checkers_core::rules::target_cells(me, n);
    let mut pegs: [Vec<CubeCoord>; 6] =
        std::array::from_fn(|p| checkers_core::rules::home_cells(PlayerId::new(p as u8).unwrap(), n));
    // player 0 fills all but one target hole; one of player 1's pegs sits there
    let hole = target[0];
    pegs[0] = target[1..].to_vec();
    pegs[0].push(CubeCoord::axial(0, 0));
    pegs[1].pop();
    pegs[1].push(hole);
    // player 3 starts on player 0's target, so it moves into player 0's home
    pegs[3] = checkers_core::rules::home_cells(me, n)[1..].to_vec();
    pegs[3].push(CubeCoord::axial(1, 0));
    let mut s = BoardState::from_pegs(n, 1000, me, pegs).unwrap();
    assert_eq!(s.status(), Status::Running);
    let mut rng = seeding::rng(3, 0);
    while s.is_running() {
        let moves = s.legal_submoves().unwrap();
        let m = if s.current() == spoiler {
            // the spoiler never moves the parked peg
            let keep: Vec<Submove> = moves.iter().copied().filter(|m| m.source() != Some(hole)).collect();
            *keep.choose(&mut rng).unwrap()
        } else {
            *moves.choose(&mut rng).unwrap()
        };
        s.apply_in_place(m).unwrap();
        assert_eq!(s.occupant(hole), Some(spoiler));
    }
    assert_eq!(s.status(), Status::Truncated);
    assert_eq!(s.turn_count(), 1000);
}

fn play_prefix(n: u32, seed: u64, len: usize) -> BoardState {
    let mut rng = seeding::rng(seed, 0);
    let first = PlayerId::new(rng.gen_range(0..6)).unwrap();
    let mut s = initial_state(n, 1000, first).unwrap();
    for _ in 0..len {
        if !s.is_running() {
            break;
        }
        let moves = s.legal_submoves().unwrap();
        s.apply_in_place(*moves.choose(&mut rng).unwrap()).unwrap();
    }
    s
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn rotation_equivariance(seed in any::<u64>(), len in 0usize..300, k in 0i32..6, n in 1u32..=3) {
        let s = play_prefix(n, seed, len);
        prop_assume!(s.is_running());
        let r = s.rotated(k);
        let mut expect: Vec<Submove> = s.legal_submoves().unwrap().iter().map(|m| m.rotated(k)).collect();
        let mut got = r.legal_submoves().unwrap();
        let key = |m: &Submove| naive_of(m);
        expect.sort_by_key(key);
        got.sort_by_key(key);
        prop_assert_eq!(&got, &expect);
        for m in s.legal_submoves().unwrap() {
            // seats keep their targets under rotation, so only the position is compared
            let a = s.apply_submove(m).unwrap().rotated(k);
            let b = r.apply_submove(m.rotated(k)).unwrap();
            for p in PlayerId::ALL {
                prop_assert_eq!(a.pegs(p), b.pegs(p));
            }
            prop_assert_eq!(a.current(), b.current());
            prop_assert_eq!(a.active_peg(), b.active_peg());
            prop_assert_eq!(a.turn_count(), b.turn_count());
        }
        prop_assert_eq!(s.rotated(k).rotated(6 - k), s);
    }

    #[test]
    fn pegs_are_conserved(seed in any::<u64>(), len in 0usize..600, n in 1u32..=4) {
        let s = play_prefix(n, seed, len);
        let per = (n * (n + 1) / 2) as usize;
        let mut all = HashSet::new();
        for p in PlayerId::ALL {
            let pegs = s.pegs(p);
            prop_assert_eq!(pegs.len(), per);
            for c in pegs {
                prop_assert!(on_star(n as i32, (c.q, c.r)));
                prop_assert!(all.insert((c.q, c.r)));
                prop_assert_eq!(s.occupant(c), Some(p));
            }
        }
    }
}
