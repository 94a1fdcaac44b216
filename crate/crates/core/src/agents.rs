//! Decision-makers that pick an action index for the player to move.

use std::sync::Arc;

use rand::Rng;

use crate::env::{decode_action, end_turn_action, legal_actions_into, observation_indices_into};
use crate::error::{Error, Result};
use crate::hexgrid::CubeCoord;
use crate::nn::{sample_index, Obs, Trace};
use crate::ppo::{PolicyOutput, PolicySet};
use crate::rules::{BoardState, PlayerId, Submove};

/// How a policy turns its distribution into an action.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ActMode {
    #[default]
    Sample,
    Argmax,
}

/// A neural policy plus the seat whose parameters it uses.
#[derive(Debug, Clone)]
pub struct PolicyAgent {
    pub params: Arc<PolicySet>,
    /// Use this seat's encoder and heads regardless of where the agent sits.
    /// `None` routes by the actual seat.
    pub head_seat: Option<PlayerId>,
    pub mode: ActMode,
}

#[derive(Debug, Clone)]
pub enum AgentKind {
    Random,
    GreedyForward,
    Policy(PolicyAgent),
}

impl AgentKind {
    pub fn policy(params: Arc<PolicySet>, mode: ActMode) -> Self {
        AgentKind::Policy(PolicyAgent { params, head_seat: None, mode })
    }

    /// Fails when a policy was built for a different board size.
    pub fn check_board(&self, n: u32) -> Result<()> {
        if let AgentKind::Policy(p) = self {
            if p.params.n != n {
                return Err(Error::Config(format!(
                    "checkpoint is for N={}, board is N={n}",
                    p.params.n
                )));
            }
        }
        Ok(())
    }

    pub fn name(&self) -> &'static str {
        match self {
            AgentKind::Random => "random",
            AgentKind::GreedyForward => "greedy",
            AgentKind::Policy(_) => "policy",
        }
    }
}

/// Reusable buffers for acting without per-step allocation.
#[derive(Debug, Default)]
pub struct Scratch {
    submoves: Vec<Submove>,
    legal: Vec<u32>,
    obs: Vec<u32>,
    trace: Trace,
    out: PolicyOutput,
}

/// Uniform choice among the set entries of `mask`.
pub fn random_act<R: Rng>(mask: &[u8], rng: &mut R) -> Result<usize> {
    let count = mask.iter().filter(|&&m| m != 0).count();
    if count == 0 {
        return Err(Error::Contract("action mask has no legal entry".into()));
    }
    let k = rng.gen_range(0..count);
    Ok(mask.iter().enumerate().filter(|(_, &m)| m != 0).nth(k).map(|(a, _)| a).expect("k < count"))
}

/// Forward-most step: the non-jump move with the largest gain in the
/// mover's forward row. Equal gains prefer the destination closest to a
/// target cell it does not hold yet, then the smallest action index. Ends the turn when no
/// step exists; if only jumps are available the smallest jump is taken so
/// the agent cannot stall mid-game.
pub fn greedy_act(state: &BoardState) -> Result<usize> {
    let mut scratch = Scratch::default();
    greedy_act_with(state, &mut scratch)
}

fn greedy_act_with(state: &BoardState, s: &mut Scratch) -> Result<usize> {
    legal_actions_into(state, &mut s.submoves, &mut s.legal)?;
    let n = state.n();
    let geo = state.geometry();
    // target cells not yet holding one of the mover's pegs, canonical frame
    let mover = state.current();
    let k = -(mover.index() as i32);
    let free: Vec<CubeCoord> = geo
        .target(mover)
        .iter()
        .filter(|&&c| state.occupant_cell(c as usize) != Some(mover))
        .map(|&c| geo.coord(geo.rotate_cell(c as usize, k)))
        .collect();
    let mut best: Option<((i32, i32), u32)> = None;
    for &a in &s.legal {
        if let Submove::Move { src, dir } = decode_action(a as usize, n)? {
            let dst = src + dir.vector();
            let dist = free.iter().map(|&t| t.distance(dst)).min().unwrap_or(0);
            let key = (dir.vector().r, -dist);
            // legal is ascending, so strict > keeps the smallest index on ties
            if best.is_none_or(|(k, _)| key > k) {
                best = Some((key, a));
            }
        }
    }
    if let Some((_, a)) = best {
        return Ok(a as usize);
    }
    let end = end_turn_action(n) as u32;
    if s.legal.contains(&end) {
        return Ok(end as usize);
    }
    Ok(s.legal[0] as usize)
}

/// Policy decision for the player to move.
pub fn policy_act<R: Rng>(state: &BoardState, agent: &PolicyAgent, rng: &mut R) -> Result<usize> {
    let mut scratch = Scratch::default();
    policy_act_with(state, agent, rng, &mut scratch)
}

fn policy_act_with<R: Rng>(
    state: &BoardState,
    agent: &PolicyAgent,
    rng: &mut R,
    s: &mut Scratch,
) -> Result<usize> {
    if agent.params.n != state.n() {
        return Err(Error::Config(format!(
            "checkpoint is for N={}, board is N={}",
            agent.params.n,
            state.n()
        )));
    }
    let seat = state.current();
    legal_actions_into(state, &mut s.submoves, &mut s.legal)?;
    observation_indices_into(state, seat, &mut s.obs);
    let head = agent.head_seat.unwrap_or(seat);
    agent.params.evaluate(head.index(), Obs::Binary(&s.obs), &s.legal, &mut s.trace, &mut s.out)?;
    let pos = match agent.mode {
        ActMode::Sample => sample_index(&s.out.logp, rng),
        ActMode::Argmax => {
            let mut best = 0;
            for k in 1..s.out.logp.len() {
                if s.out.logp[k] > s.out.logp[best] {
                    best = k;
                }
            }
            best
        }
    };
    Ok(s.legal[pos] as usize)
}

/// Dispatches on the agent kind. Random agents draw from `rng`.
pub fn act<R: Rng>(kind: &AgentKind, state: &BoardState, rng: &mut R, s: &mut Scratch) -> Result<usize> {
    match kind {
        AgentKind::Random => {
            legal_actions_into(state, &mut s.submoves, &mut s.legal)?;
            Ok(s.legal[rng.gen_range(0..s.legal.len())] as usize)
        }
        AgentKind::GreedyForward => greedy_act_with(state, s),
        AgentKind::Policy(p) => policy_act_with(state, p, rng, s),
    }
}
