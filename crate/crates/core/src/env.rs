//! Agent-facing view of the game: rotation into the acting player's frame,
//! the 8-layer binary observation, the flat action codec, masking, rewards
//! and stepping.
//!
//! Observation layout is layer-major, then grid row `i`, then column `j`:
//! `index = layer * (4N+1)^2 + i * (4N+1) + j`. Actions are
//! `((i * (4N+1) + j) * 6 + dir) * 2 + is_jump`, with the last index
//! `(4N+1)^2 * 12` reserved for end-turn. Both are expressed in the frame
//! where the acting player's home corner is at the top.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::hexgrid::{axial_to_grid, grid_side, grid_to_axial, CubeCoord, Direction, GridIndex};
use crate::rules::{BoardState, PlayerId, Status, Submove, NUM_PLAYERS};

pub const OBS_LAYERS: usize = 8;
pub const GOAL_BONUS: f32 = 0.1;
pub const MOVE_BONUS: f32 = 0.001;

pub fn obs_len(n: u32) -> usize {
    let side = grid_side(n);
    side * side * OBS_LAYERS
}

pub fn action_len(n: u32) -> usize {
    let side = grid_side(n);
    side * side * 12 + 1
}

pub fn end_turn_action(n: u32) -> usize {
    action_len(n) - 1
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RewardScheme {
    /// +5N to the winner, -N to each loser.
    Sparse,
    /// Sparse plus +/-0.1 for a peg entering/leaving the target corner.
    SparseGoal,
    /// Sparse plus +/-0.001 for forward/backward movement.
    SparseMove,
    /// +5N to the winner and nothing to losers, with both bonuses.
    #[default]
    PositiveSum,
}

impl RewardScheme {
    pub const ALL: [RewardScheme; 4] = [
        RewardScheme::Sparse,
        RewardScheme::SparseGoal,
        RewardScheme::SparseMove,
        RewardScheme::PositiveSum,
    ];

    fn goal_bonus(self) -> bool {
        matches!(self, RewardScheme::SparseGoal | RewardScheme::PositiveSum)
    }

    fn move_bonus(self) -> bool {
        matches!(self, RewardScheme::SparseMove | RewardScheme::PositiveSum)
    }

    fn loss_penalty(self) -> bool {
        !matches!(self, RewardScheme::PositiveSum)
    }

    pub fn name(self) -> &'static str {
        match self {
            RewardScheme::Sparse => "sparse",
            RewardScheme::SparseGoal => "sparse-goal",
            RewardScheme::SparseMove => "sparse-move",
            RewardScheme::PositiveSum => "positive-sum",
        }
    }
}

impl fmt::Display for RewardScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for RewardScheme {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        RewardScheme::ALL
            .into_iter()
            .find(|r| r.name() == s)
            .ok_or_else(|| Error::Config(format!("unknown reward scheme '{s}'")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepResult {
    pub rewards: [f32; NUM_PLAYERS],
    pub terminated: bool,
    pub truncated: bool,
    /// Seat that acts next (the mover again after a jump).
    pub next_agent: PlayerId,
}

/// Clockwise rotation steps that bring `p`'s home corner to the top.
fn to_canonical(p: PlayerId) -> i32 {
    -(p.index() as i32)
}

/// The board rotated so that `p`'s home corner is the top corner.
pub fn canonicalize(s: &BoardState, p: PlayerId) -> BoardState {
    s.rotated(to_canonical(p))
}

/// Set bits of the observation for seat `p`, ascending. Layers 6 and 7 are
/// populated only when `p` is the player to move.
pub fn observation_indices(s: &BoardState, p: PlayerId) -> Vec<u32> {
    let mut out = Vec::with_capacity(NUM_PLAYERS * s.geometry().pegs_per_player() + 8);
    observation_indices_into(s, p, &mut out);
    out
}

pub fn observation_indices_into(s: &BoardState, p: PlayerId, out: &mut Vec<u32>) {
    out.clear();
    let geo = s.geometry();
    let plane = geo.grid_len();
    let k = to_canonical(p);
    for layer in 0..NUM_PLAYERS {
        let owner = p.offset(layer);
        let base = out.len();
        for &c in s.peg_cells(owner) {
            out.push((layer * plane + geo.rotate_cell(c as usize, k)) as u32);
        }
        out[base..].sort_unstable();
    }
    if p == s.current() && s.is_running() {
        let ctx = s.jump_context();
        let base = out.len();
        for c in ctx.origins().iter() {
            out.push((6 * plane + geo.rotate_cell(c, k)) as u32);
        }
        out[base..].sort_unstable();
        if let Some(a) = ctx.active_cell() {
            out.push((7 * plane + geo.rotate_cell(a, k)) as u32);
        }
    }
}

/// Dense 0/1 observation of length `(4N+1)^2 * 8`.
pub fn encode_observation(s: &BoardState, p: PlayerId) -> Vec<f32> {
    let mut obs = vec![0.0; obs_len(s.n())];
    for i in observation_indices(s, p) {
        obs[i as usize] = 1.0;
    }
    obs
}

pub fn encode_action(q: i32, r: i32, dir: Direction, is_jump: bool, n: u32) -> Result<usize> {
    let g = axial_to_grid(CubeCoord::axial(q, r), n)?;
    let cell = g.flat(n);
    Ok((cell * 6 + dir.index() as usize) * 2 + is_jump as usize)
}

pub fn encode_submove(m: &Submove, n: u32) -> Result<usize> {
    match *m {
        Submove::Move { src, dir } => encode_action(src.q, src.r, dir, false, n),
        Submove::Jump { src, dir } => encode_action(src.q, src.r, dir, true, n),
        Submove::EndTurn => Ok(end_turn_action(n)),
    }
}

pub fn decode_action(a: usize, n: u32) -> Result<Submove> {
    let len = action_len(n);
    if a >= len {
        return Err(Error::Range(format!("action {a} outside 0..{len}")));
    }
    if a == len - 1 {
        return Ok(Submove::EndTurn);
    }
    let is_jump = a % 2 == 1;
    let dir = Direction::new(((a / 2) % 6) as u8)?;
    let cell = a / 12;
    let side = grid_side(n);
    let src = grid_to_axial(GridIndex { i: cell / side, j: cell % side }, n)?;
    Ok(if is_jump { Submove::Jump { src, dir } } else { Submove::Move { src, dir } })
}

/// Legal actions for the player to move, canonical frame, ascending.
pub fn legal_actions(s: &BoardState) -> Result<Vec<u32>> {
    let mut scratch = Vec::new();
    let mut out = Vec::new();
    legal_actions_into(s, &mut scratch, &mut out)?;
    Ok(out)
}

pub fn legal_actions_into(
    s: &BoardState,
    scratch: &mut Vec<Submove>,
    out: &mut Vec<u32>,
) -> Result<()> {
    s.legal_submoves_into(scratch)?;
    let n = s.n();
    let k = to_canonical(s.current());
    out.clear();
    for m in scratch.iter() {
        out.push(encode_submove(&m.rotated(k), n)? as u32);
    }
    out.sort_unstable();
    Ok(())
}

/// Dense 0/1 action mask of length `(4N+1)^2 * 12 + 1`.
pub fn action_mask(s: &BoardState) -> Result<Vec<u8>> {
    let mut mask = vec![0u8; action_len(s.n())];
    for a in legal_actions(s)? {
        mask[a as usize] = 1;
    }
    Ok(mask)
}

/// Canonical-frame `r` of a cell as seen by `p`.
fn forward_coord(s: &BoardState, p: PlayerId, cell: usize) -> i32 {
    let geo = s.geometry();
    geo.coord(geo.rotate_cell(cell, to_canonical(p))).r
}

/// Per-seat rewards for the submove `m` that took `before` to `after`.
pub fn compute_rewards(
    before: &BoardState,
    m: &Submove,
    after: &BoardState,
    scheme: RewardScheme,
) -> [f32; NUM_PLAYERS] {
    let mut rewards = [0.0f32; NUM_PLAYERS];
    let mover = before.current();
    let geo = before.geometry();
    if let (Some(src), Some(dst)) = (m.source(), m.target()) {
        let (from, to) = (
            geo.cell(src).expect("legal source is on board"),
            geo.cell(dst).expect("legal target is on board"),
        );
        let mut bonus = 0.0f32;
        if scheme.goal_bonus() {
            match (geo.is_target(mover, from), geo.is_target(mover, to)) {
                (false, true) => bonus += GOAL_BONUS,
                (true, false) => bonus -= GOAL_BONUS,
                _ => {}
            }
        }
        if scheme.move_bonus() {
            let dr = forward_coord(before, mover, to) - forward_coord(before, mover, from);
            bonus += MOVE_BONUS * dr.signum() as f32;
        }
        rewards[mover.index()] += bonus;
    }
    if let Status::Won(w) = after.status() {
        if before.is_running() {
            let n = before.n() as f32;
            rewards[w.index()] += 5.0 * n;
            if scheme.loss_penalty() {
                for p in PlayerId::ALL.into_iter().filter(|&p| p != w) {
                    rewards[p.index()] -= n;
                }
            }
        }
    }
    rewards
}

/// Decodes `a` in the acting player's frame, applies it and scores it.
pub fn step(s: &BoardState, a: usize, scheme: RewardScheme) -> Result<(BoardState, StepResult)> {
    let mut next = s.clone();
    let res = step_in_place(&mut next, a, scheme)?;
    Ok((next, res))
}

/// In-place [`step`]. On error the state is unchanged.
pub fn step_in_place(s: &mut BoardState, a: usize, scheme: RewardScheme) -> Result<StepResult> {
    if !s.is_running() {
        return Err(Error::Contract("step on a finished game".into()));
    }
    let canonical = decode_action(a, s.n())?;
    let mover = s.current();
    let m = canonical.rotated(-to_canonical(mover));
    let before = s.clone();
    s.apply_in_place(m)
        .map_err(|e| Error::Illegal(format!("action {a} is masked out: {e}")))?;
    let rewards = compute_rewards(&before, &m, s, scheme);
    Ok(StepResult {
        rewards,
        terminated: matches!(s.status(), Status::Won(_)),
        truncated: s.status() == Status::Truncated,
        next_agent: s.current(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rules::initial_state;

    fn p(k: u8) -> PlayerId {
        PlayerId::new(k).unwrap()
    }

    #[test]
    fn sizes() {
        assert_eq!(action_len(2), 973);
        assert_eq!(end_turn_action(2), 972);
        assert_eq!(obs_len(2), 648);
        assert_eq!(decode_action(972, 2).unwrap(), Submove::EndTurn);
        assert!(decode_action(973, 2).is_err());
    }

    #[test]
    fn action_roundtrip() {
        for n in 1..=3 {
            for a in 0..action_len(n) {
                let m = decode_action(a, n).unwrap();
                assert_eq!(encode_submove(&m, n).unwrap(), a);
            }
        }
    }

    #[test]
    fn initial_observation_layer0() {
        let s = initial_state(2, 200, p(0)).unwrap();
        let obs = encode_observation(&s, p(0));
        let ones: Vec<usize> = (0..81).filter(|&k| obs[k] == 1.0).collect();
        let expect: Vec<usize> = [(5, 1), (6, 0), (6, 1)].iter().map(|(i, j)| i * 9 + j).collect();
        assert_eq!(ones, expect);
        assert_eq!(obs.iter().sum::<f32>(), 18.0);
        assert!(obs[6 * 81..].iter().all(|&x| x == 0.0));
    }

    #[test]
    fn canonicalize_examples() {
        let s = initial_state(2, 200, p(0)).unwrap();
        let s = s.apply_submove(s.legal_submoves().unwrap()[0]).unwrap();
        assert_eq!(canonicalize(&s, p(0)), s);
        let half = canonicalize(&s, p(3));
        for q in PlayerId::ALL {
            let mut a: Vec<_> = s.pegs(q).into_iter().map(|c| -c).collect();
            let mut b = half.pegs(q);
            a.sort();
            b.sort();
            assert_eq!(a, b);
        }
    }

    #[test]
    fn initial_mask_has_six_actions() {
        let s = initial_state(2, 200, p(0)).unwrap();
        let mask = action_mask(&s).unwrap();
        assert_eq!(mask.iter().filter(|&&b| b == 1).count(), 6);
    }

    #[test]
    fn jump_reward_and_same_player() {
        let s = initial_state(2, 200, p(0)).unwrap();
        let a = encode_action(2, -4, Direction::new(4).unwrap(), true, 2).unwrap();
        let (next, res) = step(&s, a, RewardScheme::PositiveSum).unwrap();
        assert_eq!(res.next_agent, p(0));
        assert!((res.rewards[0] - 0.001).abs() < 1e-7);
        assert!(res.rewards[1..].iter().all(|&r| r == 0.0));
        let mask = action_mask(&next).unwrap();
        assert_eq!(mask[end_turn_action(2)], 1);
        let (_, res) = step(&next, end_turn_action(2), RewardScheme::PositiveSum).unwrap();
        assert_eq!(res.rewards, [0.0; 6]);
        assert_eq!(res.next_agent, p(1));
    }

    #[test]
    fn masked_action_rejected() {
        let s = initial_state(2, 200, p(0)).unwrap();
        assert!(matches!(step(&s, 0, RewardScheme::Sparse), Err(Error::Illegal(_))));
        assert!(matches!(step(&s, 5000, RewardScheme::Sparse), Err(Error::Range(_))));
    }

    #[test]
    fn scheme_names_roundtrip() {
        for s in RewardScheme::ALL {
            assert_eq!(s.name().parse::<RewardScheme>().unwrap(), s);
        }
        assert!("dense".parse::<RewardScheme>().is_err());
    }
}
