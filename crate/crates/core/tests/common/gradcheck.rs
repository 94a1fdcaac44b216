//! PPO loss gradients against central differences of a naive f64 loss.

use checkers_core::nn::{Obs, Trace};
use checkers_core::ppo::{ppo_loss, LossConfig, PolicyOutput, PolicySet, Sample, SharingConfig};
use checkers_core::seeding;
use rand::Rng;

const OBS: usize = 7;
const ACT: usize = 9;
const HID: usize = 5;

struct Case {
    seat: usize,
    obs: Vec<u32>,
    legal: Vec<u32>,
    pos: usize,
    old_logp: f32,
    adv: f32,
    ret: f32,
}

fn dense(x: &[f64], w: &[f64], b: &[f64], out_dim: usize) -> Vec<f64> {
    let in_dim = x.len();
    (0..out_dim).map(|o| b[o] + (0..in_dim).map(|i| w[o * in_dim + i] * x[i]).sum::<f64>()).collect()
}

/// Tensors in `PolicySet::tensors` order: per encoder four, then policy
/// heads, then value heads, two each.
fn naive_loss(set: &PolicySet, t: &[Vec<f64>], cases: &[Case], cfg: &LossConfig) -> f64 {
    let heads = set.policy_heads.len();
    let base = 4 * set.encoders.len();
    let m = cases.len() as f64;
    let mut total = 0.0;
    for c in cases {
        let (e, h) = set.route(c.seat);
        let mut x = vec![0.0; OBS];
        for &i in &c.obs {
            x[i as usize] = 1.0;
        }
        let relu = |v: Vec<f64>| v.into_iter().map(|a| a.max(0.0)).collect::<Vec<_>>();
        let h1 = relu(dense(&x, &t[4 * e], &t[4 * e + 1], HID));
        let h2 = relu(dense(&h1, &t[4 * e + 2], &t[4 * e + 3], HID));
        let all = dense(&h2, &t[base + 2 * h], &t[base + 2 * h + 1], ACT);
        let v = dense(&h2, &t[base + 2 * heads + 2 * h], &t[base + 2 * heads + 2 * h + 1], 1)[0];
        let z: Vec<f64> = c.legal.iter().map(|&a| all[a as usize]).collect();
        let mx = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = mx + z.iter().map(|&l| (l - mx).exp()).sum::<f64>().ln();
        let logp: Vec<f64> = z.iter().map(|&l| l - lse).collect();
        let ratio = (logp[c.pos] - c.old_logp as f64).exp();
        let adv = c.adv as f64;
        let eps = cfg.clip_eps as f64;
        let surr = (ratio * adv).min(ratio.clamp(1.0 - eps, 1.0 + eps) * adv);
        let ent = -logp.iter().map(|&l| l.exp() * l).sum::<f64>();
        let verr = v - c.ret as f64;
        total += -surr + cfg.value_coef as f64 * verr * verr - cfg.entropy_coef as f64 * ent;
    }
    total / m
}

fn cases(rng: &mut impl Rng, set: &PolicySet, count: usize, ratio_spread: f32) -> Vec<Case> {
    let mut out = Vec::new();
    for k in 0..count {
        let mut obs: Vec<u32> = (0..OBS as u32).filter(|_| rng.gen_bool(0.5)).collect();
        if obs.is_empty() {
            obs.push(0);
        }
        let mut legal: Vec<u32> = (0..ACT as u32).filter(|_| rng.gen_bool(0.6)).collect();
        if legal.len() < 2 {
            legal = vec![1, 4, 8];
        }
        let pos = rng.gen_range(0..legal.len());
        let mut c = Case { seat: k % 6, obs, legal, pos, old_logp: 0.0, adv: 0.0, ret: 0.0 };
        c.old_logp = current_logp(set, &c) + rng.gen_range(-ratio_spread..=ratio_spread);
        c.adv = rng.gen_range(-2.0..2.0);
        c.ret = rng.gen_range(-1.0..1.0);
        out.push(c);
    }
    out
}

fn current_logp(set: &PolicySet, c: &Case) -> f32 {
    let mut trace = Trace::default();
    let mut out = PolicyOutput::default();
    set.evaluate(c.seat, Obs::Binary(&c.obs), &c.legal, &mut trace, &mut out).unwrap();
    out.logp[c.pos] as f32
}

fn samples(cases: &[Case]) -> Vec<Sample<'_>> {
    cases
        .iter()
        .map(|c| Sample {
            seat: c.seat,
            obs: Obs::Binary(&c.obs),
            legal: &c.legal,
            action_pos: c.pos,
            old_logp: c.old_logp,
            advantage: c.adv,
            ret: c.ret,
        })
        .collect()
}

/// Fresh parameters with every entry jittered, so zero biases do not park
/// pre-activations exactly on a ReLU kink.
fn jittered(sharing: SharingConfig, rng: &mut impl Rng) -> PolicySet {
    let mut set = PolicySet::with_dims(2, OBS, ACT, HID, sharing, rng);
    for t in set.tensors_mut() {
        t.iter_mut().for_each(|x| *x += rng.gen_range(-0.3..0.3));
    }
    set
}

/// Relative L2 error between the analytic gradient and central differences
/// of the naive loss; also asserts every entry within `1e-4` relative.
pub fn relative_error(sharing: SharingConfig, seed: u64, cfg: LossConfig, spread: f32) -> f64 {
    let mut rng = seeding::rng(seed, 0);
    let set = jittered(sharing, &mut rng);
    let cs = cases(&mut rng, &set, 12, spread);
    let mut grad = set.zeros_like();
    ppo_loss(&set, &samples(&cs), &cfg, &mut grad).unwrap();

    let base: Vec<Vec<f64>> = set.tensors().iter().map(|x| x.iter().map(|&v| v as f64).collect()).collect();
    let analytic = grad.tensors();
    let h = 1e-6;
    let (mut diff2, mut norm2) = (0.0f64, 0.0f64);
    for (ti, tensor) in base.iter().enumerate() {
        for k in 0..tensor.len() {
            let mut plus = base.clone();
            plus[ti][k] += h;
            let mut minus = base.clone();
            minus[ti][k] -= h;
            let fd = (naive_loss(&set, &plus, &cs, &cfg) - naive_loss(&set, &minus, &cs, &cfg)) / (2.0 * h);
            let a = analytic[ti][k] as f64;
            diff2 += (a - fd).powi(2);
            norm2 += a.powi(2) + fd.powi(2);
            assert!((a - fd).abs() <= 1e-4 * a.abs().max(fd.abs()).max(1e-2), "tensor {ti}[{k}]: {a} vs {fd}");
        }
    }
    assert!(norm2 > 0.0);
    diff2.sqrt() / norm2.sqrt()
}

/// Largest difference between clipped (0.2) and effectively unclipped
/// losses and gradients when every ratio is 1.
pub fn clip_noop_max_diff() -> f64 {
    let mut rng = seeding::rng(5, 0);
    let set = jittered(SharingConfig::SharedEncoder, &mut rng);
    let clipped = LossConfig { clip_eps: 0.2, entropy_coef: 0.0, value_coef: 0.5 };
    let loose = LossConfig { clip_eps: 1e6, ..clipped };
    let cs = cases(&mut rng, &set, 16, 0.0);
    let (mut g1, mut g2) = (set.zeros_like(), set.zeros_like());
    let s1 = ppo_loss(&set, &samples(&cs), &clipped, &mut g1).unwrap();
    let s2 = ppo_loss(&set, &samples(&cs), &loose, &mut g2).unwrap();
    let mut worst = (s1.loss - s2.loss)
        .abs()
        .max((s1.policy_loss - s1.unclipped_policy_loss).abs())
        .max(s1.max_ratio_deviation);
    for (a, b) in g1.tensors().iter().zip(g2.tensors()) {
        for (x, y) in a.iter().zip(b) {
            worst = worst.max((x - y).abs() as f64);
        }
    }
    worst
}
