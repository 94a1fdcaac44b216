use rand::seq::SliceRandom;

use super::loss::{normalize_advantages, ppo_loss, LossStats, Sample};
use super::policy::{Learner, PolicySet, SharingConfig};
use super::rollout::{collect_rollout, Batch, EnvWorker, RolloutStats};
use super::PpoConfig;
use crate::checkpoint::Checkpoint;
use crate::env::RewardScheme;
use crate::error::{Error, Result};
use crate::nn::{Adam, AdamConfig, Obs};
use crate::rules::default_turn_limit;
use crate::seeding;

// Stream tags keep the RNG uses of one seed apart.
const INIT_STREAM: u64 = 0x1_0000;
const SHUFFLE_STREAM: u64 = 0x2_0000;
const WORKER_STREAM: u64 = 0x3_0000;

/// Everything that determines a training run.
#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig {
    pub n: u32,
    pub sharing: SharingConfig,
    pub scheme: RewardScheme,
    pub turn_limit: u32,
    pub seed: u64,
    /// Parallel environments per rollout.
    pub num_envs: usize,
    pub ppo: PpoConfig,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            n: 2,
            sharing: SharingConfig::FullyShared,
            scheme: RewardScheme::PositiveSum,
            turn_limit: default_turn_limit(2),
            seed: 0,
            num_envs: 8,
            ppo: PpoConfig::default(),
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<()> {
        if !(1..=6).contains(&self.n) {
            return Err(Error::Config(format!("board size {} outside 1..=6", self.n)));
        }
        if self.num_envs == 0 || self.turn_limit == 0 {
            return Err(Error::Config("num_envs and turn_limit must be positive".into()));
        }
        self.ppo.validate()
    }

    fn adam(&self) -> AdamConfig {
        AdamConfig { lr: self.ppo.learning_rate, ..AdamConfig::default() }
    }
}

/// Summary of one collect-and-update iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationStats {
    /// 1-based index of the iteration just finished.
    pub iteration: u64,
    /// Environment steps since the start of training.
    pub env_steps: u64,
    pub rollout: RolloutStats,
    /// Loss terms averaged over every minibatch of the iteration.
    pub loss: LossStats,
    /// Largest `|rho - 1|` on each learner's first minibatch, before any
    /// parameter moved. Should be zero up to rounding.
    pub initial_ratio_deviation: f64,
    pub minibatches: usize,
}

/// PPO trainer: parameters, one Adam state per learner, and the workers.
#[derive(Debug, Clone)]
pub struct Trainer {
    config: TrainConfig,
    policy: PolicySet,
    learners: Vec<Learner>,
    optimizers: Vec<Adam>,
    workers: Vec<EnvWorker>,
    grad: PolicySet,
    iteration: u64,
    env_steps: u64,
}

impl Trainer {
    pub fn new(config: TrainConfig) -> Result<Self> {
        config.validate()?;
        let policy = PolicySet::new(config.n, config.sharing, &mut seeding::rng(config.seed, INIT_STREAM));
        Self::assemble(config, policy, None, 0, 0)
    }

    /// Continues from a checkpoint written by [`Trainer::checkpoint`]. Games
    /// in progress at the time of the checkpoint are not stored and restart.
    pub fn resume(config: TrainConfig, ckpt: Checkpoint) -> Result<Self> {
        config.validate()?;
        if ckpt.policy.n != config.n || ckpt.policy.sharing != config.sharing {
            return Err(Error::Config(format!(
                "checkpoint is N={} {}, run wants N={} {}",
                ckpt.policy.n, ckpt.policy.sharing, config.n, config.sharing
            )));
        }
        let optimizers = ckpt.optimizers;
        Self::assemble(config, ckpt.policy, Some(optimizers), ckpt.iteration, ckpt.env_steps)
    }

    fn assemble(
        config: TrainConfig,
        policy: PolicySet,
        optimizers: Option<Vec<Adam>>,
        iteration: u64,
        env_steps: u64,
    ) -> Result<Self> {
        let learners = policy.learners();
        let sizes: Vec<usize> = policy.tensors().iter().map(|t| t.len()).collect();
        let optimizers = match optimizers {
            Some(o) => {
                let ok = o.len() == learners.len()
                    && o.iter().zip(&learners).all(|(a, l)| {
                        a.m.len() == l.tensors.len()
                            && a.m.iter().zip(&l.tensors).all(|(m, &k)| m.len() == sizes[k])
                    });
                if !ok {
                    return Err(Error::Config("optimizer state does not match the network".into()));
                }
                o
            }
            None => learners
                .iter()
                .map(|l| Adam::new(config.adam(), &l.tensors.iter().map(|&k| sizes[k]).collect::<Vec<_>>()))
                .collect(),
        };
        let workers = (0..config.num_envs)
            .map(|w| {
                EnvWorker::new(config.n, config.turn_limit, config.scheme, config.seed, WORKER_STREAM + w as u64)
            })
            .collect::<Result<Vec<_>>>()?;
        let grad = policy.zeros_like();
        Ok(Trainer { config, policy, learners, optimizers, workers, grad, iteration, env_steps })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.config
    }

    pub fn policy(&self) -> &PolicySet {
        &self.policy
    }

    pub fn iteration(&self) -> u64 {
        self.iteration
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    pub fn checkpoint(&self) -> Checkpoint {
        Checkpoint {
            policy: self.policy.clone(),
            optimizers: self.optimizers.clone(),
            iteration: self.iteration,
            env_steps: self.env_steps,
            seed: self.config.seed,
        }
    }

    /// Collects a rollout with the current parameters.
    pub fn collect(&mut self) -> Result<Batch> {
        let it_seed = seeding::derive(self.config.seed, self.iteration);
        for (w, worker) in self.workers.iter_mut().enumerate() {
            worker.reseed(it_seed, WORKER_STREAM + w as u64);
        }
        let p = &self.config.ppo;
        collect_rollout(&mut self.workers, &self.policy, p.steps_per_iteration, p.gamma, p.gae_lambda)
    }

    /// One full iteration. On error the parameters and optimizer state are
    /// rolled back to their values before the update.
    pub fn iterate(&mut self) -> Result<IterationStats> {
        let batch = self.collect()?;
        let saved = (self.policy.clone(), self.optimizers.clone());
        match self.update(&batch) {
            Ok((loss, initial_ratio_deviation, minibatches)) => {
                self.iteration += 1;
                self.env_steps += batch.stats.env_steps as u64;
                Ok(IterationStats {
                    iteration: self.iteration,
                    env_steps: self.env_steps,
                    rollout: batch.stats,
                    loss,
                    initial_ratio_deviation,
                    minibatches,
                })
            }
            Err(e) => {
                (self.policy, self.optimizers) = saved;
                Err(e)
            }
        }
    }

    /// Epochs of shuffled minibatches for every learner. Returns the mean
    /// loss terms, the first-minibatch ratio deviation and the minibatch count.
    pub fn update(&mut self, batch: &Batch) -> Result<(LossStats, f64, usize)> {
        let ppo = self.config.ppo.clone();
        let loss_cfg = ppo.loss_config();
        let mut rng = seeding::rng(self.config.seed, SHUFFLE_STREAM + self.iteration);
        let mut total = LossStats::default();
        let mut initial_dev = 0.0f64;
        let mut count = 0usize;

        for li in 0..self.learners.len() {
            let learner = &self.learners[li];
            let mut idx: Vec<usize> = (0..batch.transitions.len())
                .filter(|&i| learner.seats.contains(&batch.transitions[i].agent))
                .collect();
            if idx.is_empty() {
                continue;
            }
            let mut first = true;
            for _ in 0..ppo.epochs {
                idx.shuffle(&mut rng);
                for chunk in idx.chunks(ppo.minibatch_size) {
                    let mut adv: Vec<f32> = chunk.iter().map(|&i| batch.advantages[i]).collect();
                    normalize_advantages(&mut adv);
                    let samples: Vec<Sample<'_>> = chunk
                        .iter()
                        .zip(&adv)
                        .map(|(&i, &a)| {
                            let t = &batch.transitions[i];
                            Sample {
                                seat: t.agent.index(),
                                obs: Obs::Binary(&t.obs),
                                legal: &t.legal,
                                action_pos: t.action_pos as usize,
                                old_logp: t.logprob,
                                advantage: a,
                                ret: batch.returns[i],
                            }
                        })
                        .collect();
                    self.grad.zero_tensors(&learner.tensors);
                    let st = ppo_loss(&self.policy, &samples, &loss_cfg, &mut self.grad)?;
                    if first {
                        initial_dev = initial_dev.max(st.max_ratio_deviation);
                        first = false;
                    }
                    accumulate(&mut total, &st);
                    count += 1;

                    let grads = self.grad.tensors();
                    let g: Vec<&[f32]> = learner.tensors.iter().map(|&k| grads[k]).collect();
                    let mut params: Vec<Option<&mut [f32]>> =
                        self.policy.tensors_mut().into_iter().map(Some).collect();
                    let p: Vec<&mut [f32]> =
                        learner.tensors.iter().map(|&k| params[k].take().expect("distinct tensors")).collect();
                    self.optimizers[li].update(p, g)?;
                }
            }
        }
        if count > 0 {
            scale(&mut total, 1.0 / count as f64);
        }
        Ok((total, initial_dev, count))
    }
}

fn accumulate(a: &mut LossStats, b: &LossStats) {
    a.loss += b.loss;
    a.policy_loss += b.policy_loss;
    a.unclipped_policy_loss += b.unclipped_policy_loss;
    a.value_loss += b.value_loss;
    a.entropy += b.entropy;
    a.approx_kl += b.approx_kl;
    a.clip_fraction += b.clip_fraction;
    a.max_ratio_deviation = a.max_ratio_deviation.max(b.max_ratio_deviation);
}

fn scale(a: &mut LossStats, k: f64) {
    a.loss *= k;
    a.policy_loss *= k;
    a.unclipped_policy_loss *= k;
    a.value_loss *= k;
    a.entropy *= k;
    a.approx_kl *= k;
    a.clip_fraction *= k;
}

/// Runs `config.ppo.iterations` iterations, calling `hook` after each. A
/// hook error stops training and is returned.
pub fn train<F>(config: TrainConfig, mut hook: F) -> Result<Trainer>
where
    F: FnMut(&Trainer, &IterationStats) -> Result<()>,
{
    let mut trainer = Trainer::new(config)?;
    run(&mut trainer, &mut hook)?;
    Ok(trainer)
}

/// Continues `trainer` until it has completed `config.ppo.iterations`.
pub fn run<F>(trainer: &mut Trainer, hook: &mut F) -> Result<()>
where
    F: FnMut(&Trainer, &IterationStats) -> Result<()>,
{
    while trainer.iteration < trainer.config.ppo.iterations as u64 {
        let stats = trainer.iterate()?;
        hook(trainer, &stats)?;
    }
    Ok(())
}
