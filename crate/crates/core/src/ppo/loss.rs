use super::policy::{PolicyOutput, PolicySet};
use crate::error::{Error, Result};
use crate::nn::{Obs, Trace};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LossConfig {
    pub clip_eps: f32,
    pub entropy_coef: f32,
    pub value_coef: f32,
}

/// One training example as seen by the loss.
#[derive(Debug, Clone, Copy)]
pub struct Sample<'a> {
    pub seat: usize,
    pub obs: Obs<'a>,
    /// Legal actions; the distribution is supported on these only.
    pub legal: &'a [u32],
    /// Position of the taken action within `legal`.
    pub action_pos: usize,
    pub old_logp: f32,
    pub advantage: f32,
    pub ret: f32,
}

/// Minibatch means of the loss terms.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct LossStats {
    pub loss: f64,
    /// `-E[min(rho A, clip(rho) A)]`
    pub policy_loss: f64,
    /// `-E[rho A]`, for diagnostics.
    pub unclipped_policy_loss: f64,
    /// `E[(V - R)^2]`
    pub value_loss: f64,
    pub entropy: f64,
    pub approx_kl: f64,
    pub clip_fraction: f64,
    pub max_ratio_deviation: f64,
}

/// Standardises advantages in place (mean 0, std 1, guarded).
pub fn normalize_advantages(adv: &mut [f32]) {
    if adv.len() < 2 {
        return;
    }
    let n = adv.len() as f64;
    let mean = adv.iter().map(|&a| a as f64).sum::<f64>() / n;
    let var = adv.iter().map(|&a| (a as f64 - mean).powi(2)).sum::<f64>() / n;
    let std = var.sqrt() + 1e-8;
    for a in adv.iter_mut() {
        *a = ((*a as f64 - mean) / std) as f32;
    }
}

/// Clipped-surrogate PPO loss with value and entropy terms:
///
/// `L = -E[min(rho A, clip(rho, 1-eps, 1+eps) A)] + c_v E[(V-R)^2] - c_e E[H]`
///
/// Gradients of `L` are added into `grad` (same layout as `policy`).
pub fn ppo_loss(
    policy: &PolicySet,
    samples: &[Sample<'_>],
    cfg: &LossConfig,
    grad: &mut PolicySet,
) -> Result<LossStats> {
    if samples.is_empty() {
        return Err(Error::Contract("empty minibatch".into()));
    }
    let m = samples.len() as f64;
    let inv_m = 1.0 / m;
    let (lo, hi) = (1.0 - cfg.clip_eps as f64, 1.0 + cfg.clip_eps as f64);
    let mut stats = LossStats::default();
    let mut trace = Trace::default();
    let mut out = PolicyOutput::default();
    let mut d_logits: Vec<f32> = Vec::new();
    let mut d_h = vec![0.0f32; policy.hidden()];

    for (k, s) in samples.iter().enumerate() {
        policy.evaluate(s.seat, s.obs, s.legal, &mut trace, &mut out)?;
        let logp_a = out.logp[s.action_pos];
        let ratio = (logp_a - s.old_logp as f64).exp();
        let adv = s.advantage as f64;
        let surr1 = ratio * adv;
        let surr2 = ratio.clamp(lo, hi) * adv;
        let entropy = -out.logp.iter().map(|&l| l.exp() * l).sum::<f64>();
        let verr = out.value as f64 - s.ret as f64;
        let sample_loss =
            -surr1.min(surr2) + cfg.value_coef as f64 * verr * verr - cfg.entropy_coef as f64 * entropy;
        if !sample_loss.is_finite() {
            return Err(Error::Training(format!(
                "non-finite loss at minibatch sample {k} (seat {}, ratio {ratio}, value {})",
                s.seat, out.value
            )));
        }
        stats.loss += sample_loss * inv_m;
        stats.policy_loss += -surr1.min(surr2) * inv_m;
        stats.unclipped_policy_loss += -surr1 * inv_m;
        stats.value_loss += verr * verr * inv_m;
        stats.entropy += entropy * inv_m;
        stats.approx_kl += ((ratio - 1.0) - (logp_a - s.old_logp as f64)) * inv_m;
        if (ratio - 1.0).abs() > cfg.clip_eps as f64 {
            stats.clip_fraction += inv_m;
        }
        stats.max_ratio_deviation = stats.max_ratio_deviation.max((ratio - 1.0).abs());

        // d(-min(surr1, surr2))/d logp_a: the unclipped branch carries the gradient
        let g_logp = if surr1 <= surr2 { -adv * ratio } else { 0.0 };
        d_logits.clear();
        for (j, &l) in out.logp.iter().enumerate() {
            let p = l.exp();
            let indicator = if j == s.action_pos { 1.0 } else { 0.0 };
            let d = g_logp * (indicator - p) + cfg.entropy_coef as f64 * p * (l + entropy);
            d_logits.push((d * inv_m) as f32);
        }
        let dv = (2.0 * cfg.value_coef as f64 * verr * inv_m) as f32;

        let (e, h) = policy.route(s.seat);
        d_h.iter_mut().for_each(|x| *x = 0.0);
        policy.policy_heads[h].backward_rows(&trace.h2, s.legal, &d_logits, &mut grad.policy_heads[h], &mut d_h);
        policy.value_heads[h].backward(&trace.h2, dv, &mut grad.value_heads[h], &mut d_h);
        policy.encoders[e].backward(s.obs, &trace, &d_h, &mut grad.encoders[e]);
    }
    Ok(stats)
}
