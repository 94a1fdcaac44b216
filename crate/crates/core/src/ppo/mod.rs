//! PPO self-play over six seats with configurable parameter sharing.

mod gae;
mod loss;
mod policy;
mod rollout;
mod train;

pub use gae::compute_gae;
pub use loss::{normalize_advantages, ppo_loss, LossConfig, LossStats, Sample};
pub use policy::{Learner, PolicyOutput, PolicySet, SharingConfig};
pub use rollout::{collect_rollout, Batch, EnvWorker, RolloutStats, Transition};
pub use train::{run, train, IterationStats, TrainConfig, Trainer};

use crate::error::{Error, Result};

/// PPO hyperparameters.
#[derive(Debug, Clone, PartialEq)]
pub struct PpoConfig {
    pub clip_eps: f32,
    pub gamma: f32,
    pub gae_lambda: f32,
    pub entropy_coef: f32,
    pub value_coef: f32,
    pub epochs: usize,
    pub minibatch_size: usize,
    pub steps_per_iteration: usize,
    pub iterations: usize,
    pub learning_rate: f32,
}

impl Default for PpoConfig {
    fn default() -> Self {
        PpoConfig {
            clip_eps: 0.2,
            gamma: 0.99,
            gae_lambda: 0.95,
            entropy_coef: 0.0,
            value_coef: 0.5,
            epochs: 4,
            minibatch_size: 128,
            steps_per_iteration: 4000,
            iterations: 100,
            learning_rate: 3e-4,
        }
    }
}

impl PpoConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: &str| Err(Error::Config(msg.to_string()));
        if !(self.clip_eps > 0.0 && self.clip_eps < 1.0) {
            return bad("clip epsilon must lie in (0, 1)");
        }
        if !(0.0..=1.0).contains(&self.gamma) || !(0.0..=1.0).contains(&self.gae_lambda) {
            return bad("gamma and lambda must lie in [0, 1]");
        }
        if self.entropy_coef < 0.0 || self.value_coef < 0.0 {
            return bad("loss coefficients must be non-negative");
        }
        if self.epochs == 0 || self.minibatch_size == 0 || self.steps_per_iteration == 0 {
            return bad("epochs, minibatch size and steps per iteration must be positive");
        }
        // negated so NaN is rejected too
        #[allow(clippy::neg_cmp_op_on_partial_ord)]
        if !(self.learning_rate > 0.0) {
            return bad("learning rate must be positive");
        }
        Ok(())
    }

    pub fn loss_config(&self) -> LossConfig {
        LossConfig {
            clip_eps: self.clip_eps,
            entropy_coef: self.entropy_coef,
            value_coef: self.value_coef,
        }
    }
}
