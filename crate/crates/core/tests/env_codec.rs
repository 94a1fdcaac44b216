use checkers_core::env::{
    action_len, action_mask, decode_action, encode_observation, encode_submove, end_turn_action, obs_len,
    observation_indices, step_in_place, RewardScheme,
};
use checkers_core::hexgrid::grid_side;
use checkers_core::rules::home_cells;
use checkers_core::{initial_state, seeding, PlayerId, Submove};
use rand::seq::SliceRandom;

#[test]
fn every_index_roundtrips() {
    for n in 1..=4u32 {
        let len = action_len(n);
        assert_eq!(len, grid_side(n).pow(2) * 12 + 1);
        for a in 0..len {
            let m = decode_action(a, n).unwrap();
            assert_eq!(encode_submove(&m, n).unwrap(), a, "N={n} a={a}");
        }
        assert_eq!(decode_action(end_turn_action(n), n).unwrap(), Submove::EndTurn);
        assert!(decode_action(len, n).is_err());
    }
    assert_eq!((action_len(2), obs_len(2)), (973, 648));
}

/// Every seat sees its own pegs in layer 0 on the top corner at the start.
#[test]
fn each_seat_sees_itself_at_the_top() {
    let n = 2;
    let s = initial_state(n, 200, PlayerId::ALL[0]).unwrap();
    let side = grid_side(n);
    let top: Vec<u32> = {
        let mut v: Vec<u32> = home_cells(PlayerId::ALL[0], n)
            .iter()
            .map(|c| ((c.q + 2 * n as i32) as usize * side + (c.r + 2 * n as i32) as usize) as u32)
            .collect();
        v.sort_unstable();
        v
    };
    for p in PlayerId::ALL {
        let idx = observation_indices(&s, p);
        let own: Vec<u32> = idx.iter().copied().filter(|&i| (i as usize) < side * side).collect();
        assert_eq!(own, top, "seat {p}");
        let dense = encode_observation(&s, p);
        assert_eq!(dense.len(), obs_len(n));
        assert_eq!(dense.iter().filter(|&&x| x == 1.0).count(), idx.len());
        assert!(dense.iter().all(|&x| x == 0.0 || x == 1.0));
    }
}

#[test]
fn mask_support_is_the_legal_set() {
    let mut rng = seeding::rng(8, 0);
    let mut s = initial_state(2, 200, PlayerId::ALL[2]).unwrap();
    for _ in 0..2000 {
        if !s.is_running() {
            s = initial_state(2, 200, PlayerId::ALL[0]).unwrap();
        }
        let mask = action_mask(&s).unwrap();
        let legal: Vec<usize> = (0..mask.len()).filter(|&a| mask[a] == 1).collect();
        assert_eq!(legal.len(), s.legal_submoves().unwrap().len());
        for &a in &legal {
            let mut t = s.clone();
            step_in_place(&mut t, a, RewardScheme::Sparse).unwrap();
        }
        let illegal = (0..mask.len()).find(|&a| mask[a] == 0).unwrap();
        assert!(step_in_place(&mut s.clone(), illegal, RewardScheme::Sparse).is_err());
        step_in_place(&mut s, *legal.choose(&mut rng).unwrap(), RewardScheme::Sparse).unwrap();
    }
}
