use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::gae::compute_gae;
use super::policy::{PolicyOutput, PolicySet};
use crate::env::{legal_actions_into, observation_indices, observation_indices_into, step_in_place, RewardScheme};
use crate::error::Result;
use crate::nn::{sample_index, Obs, Trace};
use crate::par;
use crate::rules::{initial_state, BoardState, PlayerId, Submove, NUM_PLAYERS};
use crate::seeding;

/// One decision by one seat.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub agent: PlayerId,
    /// Set bits of the observation.
    pub obs: Vec<u32>,
    /// Legal actions (the support of the action mask), ascending.
    pub legal: Vec<u32>,
    pub action: u32,
    /// Position of `action` within `legal`.
    pub action_pos: u32,
    pub logprob: f32,
    pub value: f32,
    pub reward: f32,
    /// The agent's stream ends after this transition (episode over or
    /// rollout cut).
    pub done: bool,
    /// Successor value used at a boundary: 0 for a decided game, the
    /// critic's estimate for truncations and rollout cuts.
    pub bootstrap: f32,
}

impl Transition {
    /// Dense 0/1 action mask of length `act_dim`.
    pub fn mask(&self, act_dim: usize) -> Vec<u8> {
        let mut m = vec![0; act_dim];
        for &a in &self.legal {
            m[a as usize] = 1;
        }
        m
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct RolloutStats {
    pub env_steps: usize,
    pub episodes: usize,
    pub wins: [usize; NUM_PLAYERS],
    pub truncations: usize,
    /// Sum of per-seat returns over episodes finished in this rollout.
    pub episode_return_sum: [f64; NUM_PLAYERS],
    /// Sum of completed turns over finished episodes.
    pub episode_turns: u64,
}

impl RolloutStats {
    fn merge(&mut self, o: &RolloutStats) {
        self.env_steps += o.env_steps;
        self.episodes += o.episodes;
        self.truncations += o.truncations;
        self.episode_turns += o.episode_turns;
        for p in 0..NUM_PLAYERS {
            self.wins[p] += o.wins[p];
            self.episode_return_sum[p] += o.episode_return_sum[p];
        }
    }

    pub fn mean_return(&self, seat: usize) -> f64 {
        if self.episodes == 0 {
            0.0
        } else {
            self.episode_return_sum[seat] / self.episodes as f64
        }
    }
}

/// Transitions plus per-transition advantages and returns.
#[derive(Debug, Clone, Default)]
pub struct Batch {
    pub transitions: Vec<Transition>,
    pub advantages: Vec<f32>,
    pub returns: Vec<f32>,
    pub stats: RolloutStats,
}

/// One environment instance with its own RNG stream. Episodes carry over
/// between rollouts.
#[derive(Debug, Clone)]
pub struct EnvWorker {
    state: BoardState,
    rng: ChaCha8Rng,
    scheme: RewardScheme,
    episode_return: [f32; NUM_PLAYERS],
}

impl EnvWorker {
    pub fn new(n: u32, turn_limit: u32, scheme: RewardScheme, seed: u64, stream: u64) -> Result<Self> {
        let mut rng = seeding::rng(seed, stream);
        let start = PlayerId::ALL[rng.gen_range(0..NUM_PLAYERS)];
        Ok(EnvWorker {
            state: initial_state(n, turn_limit, start)?,
            rng,
            scheme,
            episode_return: [0.0; NUM_PLAYERS],
        })
    }

    pub fn state(&self) -> &BoardState {
        &self.state
    }

    /// Replaces the RNG stream; the game in progress is kept.
    pub fn reseed(&mut self, seed: u64, stream: u64) {
        self.rng = seeding::rng(seed, stream);
    }

    fn reset(&mut self) -> Result<()> {
        let start = PlayerId::ALL[self.rng.gen_range(0..NUM_PLAYERS)];
        self.state = initial_state(self.state.n(), self.state.turn_limit(), start)?;
        self.episode_return = [0.0; NUM_PLAYERS];
        Ok(())
    }

    /// Plays `steps` submoves with `policy` acting for every seat.
    pub fn collect(&mut self, policy: &PolicySet, steps: usize) -> Result<(Vec<Transition>, RolloutStats)> {
        let mut out: Vec<Transition> = Vec::with_capacity(steps);
        let mut stats = RolloutStats::default();
        let mut last: [Option<usize>; NUM_PLAYERS] = [None; NUM_PLAYERS];
        let mut trace = Trace::default();
        let mut fwd = PolicyOutput::default();
        let mut scratch: Vec<Submove> = Vec::new();
        let mut legal: Vec<u32> = Vec::new();
        let mut obs: Vec<u32> = Vec::new();

        for _ in 0..steps {
            if !self.state.is_running() {
                self.reset()?;
            }
            let seat = self.state.current();
            observation_indices_into(&self.state, seat, &mut obs);
            legal_actions_into(&self.state, &mut scratch, &mut legal)?;
            policy.evaluate(seat.index(), Obs::Binary(&obs), &legal, &mut trace, &mut fwd)?;
            let pos = sample_index(&fwd.logp, &mut self.rng);
            let action = legal[pos];
            let res = step_in_place(&mut self.state, action as usize, self.scheme)?;
            stats.env_steps += 1;

            out.push(Transition {
                agent: seat,
                obs: obs.clone(),
                legal: legal.clone(),
                action,
                action_pos: pos as u32,
                logprob: fwd.logp[pos] as f32,
                value: fwd.value,
                reward: res.rewards[seat.index()],
                done: false,
                bootstrap: 0.0,
            });
            last[seat.index()] = Some(out.len() - 1);
            for p in 0..NUM_PLAYERS {
                self.episode_return[p] += res.rewards[p];
                if p != seat.index() && res.rewards[p] != 0.0 {
                    if let Some(i) = last[p] {
                        out[i].reward += res.rewards[p];
                    }
                }
            }

            if res.terminated || res.truncated {
                if let crate::rules::Status::Won(w) = self.state.status() {
                    stats.wins[w.index()] += 1;
                } else {
                    stats.truncations += 1;
                }
                stats.episodes += 1;
                stats.episode_turns += self.state.turn_count() as u64;
                for p in 0..NUM_PLAYERS {
                    stats.episode_return_sum[p] += self.episode_return[p] as f64;
                    if let Some(i) = last[p].take() {
                        out[i].done = true;
                        out[i].bootstrap = if res.truncated {
                            self.seat_value(policy, PlayerId::ALL[p], &mut trace)?
                        } else {
                            0.0
                        };
                    }
                }
            }
        }
        // cut the open streams
        for p in 0..NUM_PLAYERS {
            if let Some(i) = last[p] {
                out[i].done = true;
                out[i].bootstrap = self.seat_value(policy, PlayerId::ALL[p], &mut trace)?;
            }
        }
        Ok((out, stats))
    }

    fn seat_value(&self, policy: &PolicySet, seat: PlayerId, trace: &mut Trace) -> Result<f32> {
        let obs = observation_indices(&self.state, seat);
        policy.value(seat.index(), Obs::Binary(&obs), trace)
    }
}

/// Collects exactly `steps` environment steps spread over `workers`, then
/// computes advantages per (worker, seat) stream. Worker results are merged
/// in worker order, so the batch does not depend on thread scheduling.
pub fn collect_rollout(
    workers: &mut [EnvWorker],
    policy: &PolicySet,
    steps: usize,
    gamma: f32,
    lambda: f32,
) -> Result<Batch> {
    let w = workers.len().max(1);
    let parts = par::map_mut(workers, |i, worker| {
        let share = steps / w + usize::from(i < steps % w);
        worker.collect(policy, share)
    });
    let mut batch = Batch::default();
    for part in parts {
        let (transitions, stats) = part?;
        let (adv, ret) = stream_advantages(&transitions, gamma, lambda);
        batch.transitions.extend(transitions);
        batch.advantages.extend(adv);
        batch.returns.extend(ret);
        batch.stats.merge(&stats);
    }
    Ok(batch)
}

fn stream_advantages(ts: &[Transition], gamma: f32, lambda: f32) -> (Vec<f32>, Vec<f32>) {
    let mut adv = vec![0.0; ts.len()];
    let mut ret = vec![0.0; ts.len()];
    for seat in PlayerId::ALL {
        let idx: Vec<usize> = (0..ts.len()).filter(|&i| ts[i].agent == seat).collect();
        if idx.is_empty() {
            continue;
        }
        let r: Vec<f32> = idx.iter().map(|&i| ts[i].reward).collect();
        let v: Vec<f32> = idx.iter().map(|&i| ts[i].value).collect();
        let d: Vec<bool> = idx.iter().map(|&i| ts[i].done).collect();
        let b: Vec<f32> = idx.iter().map(|&i| ts[i].bootstrap).collect();
        let (a, rt) = compute_gae(&r, &v, &d, &b, gamma, lambda);
        for (k, &i) in idx.iter().enumerate() {
            adv[i] = a[k];
            ret[i] = rt[k];
        }
    }
    (adv, ret)
}
