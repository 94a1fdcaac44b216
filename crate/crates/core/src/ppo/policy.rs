use std::fmt;
use std::str::FromStr;

use rand::Rng;

use crate::env::{action_len, obs_len};
use crate::error::{Error, Result};
use crate::nn::{log_softmax, Encoder, Obs, PolicyHead, Trace, ValueHead, HIDDEN};
use crate::rules::{PlayerId, NUM_PLAYERS};

/// Which parameters the six seats share.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum SharingConfig {
    /// Six encoders, six policy heads, six value heads.
    FullyIndependent,
    /// One encoder; six policy heads and six value heads.
    SharedEncoder,
    /// A single network for every seat.
    FullyShared,
}

impl SharingConfig {
    pub const ALL: [SharingConfig; 3] = [
        SharingConfig::FullyIndependent,
        SharingConfig::SharedEncoder,
        SharingConfig::FullyShared,
    ];

    pub fn name(self) -> &'static str {
        match self {
            SharingConfig::FullyIndependent => "independent",
            SharingConfig::SharedEncoder => "shared-encoder",
            SharingConfig::FullyShared => "fully-shared",
        }
    }

    pub fn code(self) -> u8 {
        match self {
            SharingConfig::FullyIndependent => 0,
            SharingConfig::SharedEncoder => 1,
            SharingConfig::FullyShared => 2,
        }
    }

    pub fn from_code(c: u8) -> Result<Self> {
        SharingConfig::ALL
            .into_iter()
            .find(|s| s.code() == c)
            .ok_or_else(|| Error::Format(format!("unknown sharing code {c}")))
    }

    pub fn encoder_count(self) -> usize {
        match self {
            SharingConfig::FullyIndependent => NUM_PLAYERS,
            _ => 1,
        }
    }

    pub fn head_count(self) -> usize {
        match self {
            SharingConfig::FullyShared => 1,
            _ => NUM_PLAYERS,
        }
    }

    /// `(encoder, head)` indices serving `seat`.
    pub fn route(self, seat: usize) -> (usize, usize) {
        match self {
            SharingConfig::FullyIndependent => (seat, seat),
            SharingConfig::SharedEncoder => (0, seat),
            SharingConfig::FullyShared => (0, 0),
        }
    }
}

impl fmt::Display for SharingConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SharingConfig {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "independent" | "fully-independent" => Ok(SharingConfig::FullyIndependent),
            "shared-encoder" => Ok(SharingConfig::SharedEncoder),
            "fully-shared" | "shared" => Ok(SharingConfig::FullyShared),
            _ => Err(Error::Config(format!("unknown sharing configuration '{s}'"))),
        }
    }
}

/// A group of seats optimised together over a fixed set of tensors.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Learner {
    pub seats: Vec<PlayerId>,
    /// Indices into [`PolicySet::tensors`].
    pub tensors: Vec<usize>,
}

/// Parameters for all six seats under one sharing configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicySet {
    pub n: u32,
    pub sharing: SharingConfig,
    pub encoders: Vec<Encoder>,
    pub policy_heads: Vec<PolicyHead>,
    pub value_heads: Vec<ValueHead>,
}

/// One forward pass for a seat: logits over the supplied legal actions,
/// their log-probabilities and the value estimate.
#[derive(Debug, Clone, Default)]
pub struct PolicyOutput {
    pub logits: Vec<f32>,
    pub logp: Vec<f64>,
    pub value: f32,
}

const ENCODER_TENSORS: usize = 4;

impl PolicySet {
    /// Freshly initialised parameters for board size `n`.
    pub fn new<R: Rng>(n: u32, sharing: SharingConfig, rng: &mut R) -> Self {
        Self::with_dims(n, obs_len(n), action_len(n), HIDDEN, sharing, rng)
    }

    /// Arbitrary dimensions, mainly for small gradient checks.
    pub fn with_dims<R: Rng>(
        n: u32,
        obs_dim: usize,
        act_dim: usize,
        hidden: usize,
        sharing: SharingConfig,
        rng: &mut R,
    ) -> Self {
        let encoders = (0..sharing.encoder_count()).map(|_| Encoder::new(obs_dim, hidden, rng)).collect();
        let policy_heads =
            (0..sharing.head_count()).map(|_| PolicyHead::new(hidden, act_dim, rng)).collect();
        let value_heads = (0..sharing.head_count()).map(|_| ValueHead::new(hidden, rng)).collect();
        PolicySet { n, sharing, encoders, policy_heads, value_heads }
    }

    /// All-zero parameters with the given shapes.
    pub fn zeros(n: u32, obs_dim: usize, act_dim: usize, hidden: usize, sharing: SharingConfig) -> Self {
        PolicySet {
            n,
            sharing,
            encoders: (0..sharing.encoder_count()).map(|_| Encoder::zeros(obs_dim, hidden)).collect(),
            policy_heads: (0..sharing.head_count()).map(|_| PolicyHead::zeros(hidden, act_dim)).collect(),
            value_heads: (0..sharing.head_count()).map(|_| ValueHead::zeros(hidden)).collect(),
        }
    }

    /// Number of parameters for the given shapes, without allocating.
    pub fn count_for(obs_dim: usize, act_dim: usize, hidden: usize, sharing: SharingConfig) -> u128 {
        let (o, a, h) = (obs_dim as u128, act_dim as u128, hidden as u128);
        sharing.encoder_count() as u128 * (o * h + h + h * h + h)
            + sharing.head_count() as u128 * (h * a + a + h + 1)
    }

    /// Same shapes, all zeros.
    pub fn zeros_like(&self) -> Self {
        let mut z = self.clone();
        z.zero_all();
        z
    }

    pub fn obs_dim(&self) -> usize {
        self.encoders[0].obs_dim()
    }

    pub fn act_dim(&self) -> usize {
        self.policy_heads[0].act_dim()
    }

    pub fn hidden(&self) -> usize {
        self.encoders[0].hidden()
    }

    pub fn route(&self, seat: usize) -> (usize, usize) {
        self.sharing.route(seat)
    }

    /// Forward pass for `seat`, evaluating only the `legal` logits.
    pub fn evaluate(
        &self,
        seat: usize,
        obs: Obs<'_>,
        legal: &[u32],
        trace: &mut Trace,
        out: &mut PolicyOutput,
    ) -> Result<()> {
        let (e, h) = self.route(seat);
        self.encoders[e].forward_trace(obs, trace)?;
        if let Some(&bad) = legal.iter().find(|&&a| a as usize >= self.act_dim()) {
            return Err(Error::Shape(format!("action {bad} outside the policy head")));
        }
        self.policy_heads[h].logits_for(&trace.h2, legal, &mut out.logits);
        out.logp = log_softmax(&out.logits);
        out.value = self.value_heads[h].forward(&trace.h2);
        Ok(())
    }

    /// Full logits and value for `seat` on a dense observation.
    pub fn full_logits(&self, seat: usize, obs: &[f32]) -> Result<(Vec<f32>, f32)> {
        let (e, h) = self.route(seat);
        let enc = self.encoders[e].forward(obs)?;
        Ok((self.policy_heads[h].logits(&enc)?, self.value_heads[h].forward(&enc)))
    }

    /// Value estimate for `seat` on a binary observation.
    pub fn value(&self, seat: usize, obs: Obs<'_>, trace: &mut Trace) -> Result<f32> {
        let (e, h) = self.route(seat);
        self.encoders[e].forward_trace(obs, trace)?;
        Ok(self.value_heads[h].forward(&trace.h2))
    }

    /// Named tensors with shapes, in a fixed order.
    pub fn named_tensors(&self) -> Vec<(String, Vec<u32>, &[f32])> {
        let mut out = Vec::new();
        for (k, e) in self.encoders.iter().enumerate() {
            for (lname, l) in [("l1", &e.l1), ("l2", &e.l2)] {
                out.push((
                    format!("encoder.{k}.{lname}.weight"),
                    vec![l.out_dim as u32, l.in_dim as u32],
                    &l.weight[..],
                ));
                out.push((format!("encoder.{k}.{lname}.bias"), vec![l.out_dim as u32], &l.bias[..]));
            }
        }
        for (k, p) in self.policy_heads.iter().enumerate() {
            let l = &p.linear;
            out.push((format!("policy.{k}.weight"), vec![l.out_dim as u32, l.in_dim as u32], &l.weight[..]));
            out.push((format!("policy.{k}.bias"), vec![l.out_dim as u32], &l.bias[..]));
        }
        for (k, v) in self.value_heads.iter().enumerate() {
            let l = &v.linear;
            out.push((format!("value.{k}.weight"), vec![l.out_dim as u32, l.in_dim as u32], &l.weight[..]));
            out.push((format!("value.{k}.bias"), vec![l.out_dim as u32], &l.bias[..]));
        }
        out
    }

    pub fn tensors(&self) -> Vec<&[f32]> {
        let mut out: Vec<&[f32]> = Vec::new();
        for e in &self.encoders {
            out.extend(e.tensors());
        }
        for p in &self.policy_heads {
            out.extend(p.linear.tensors());
        }
        for v in &self.value_heads {
            out.extend(v.linear.tensors());
        }
        out
    }

    /// Mutable tensors in the order of [`tensors`](Self::tensors).
    pub fn tensors_mut(&mut self) -> Vec<&mut [f32]> {
        let mut out: Vec<&mut [f32]> = Vec::new();
        for e in &mut self.encoders {
            out.extend(e.tensors_mut());
        }
        for p in &mut self.policy_heads {
            out.extend(p.linear.tensors_mut());
        }
        for v in &mut self.value_heads {
            out.extend(v.linear.tensors_mut());
        }
        out
    }

    pub fn parameter_count(&self) -> usize {
        self.tensors().iter().map(|t| t.len()).sum()
    }

    fn head_tensor_base(&self) -> usize {
        self.encoders.len() * ENCODER_TENSORS
    }

    /// Tensor indices that serve `seat`.
    pub fn seat_tensors(&self, seat: usize) -> Vec<usize> {
        let (e, h) = self.route(seat);
        let base = self.head_tensor_base();
        let vbase = base + 2 * self.policy_heads.len();
        let mut v: Vec<usize> = (e * ENCODER_TENSORS..(e + 1) * ENCODER_TENSORS).collect();
        v.extend([base + 2 * h, base + 2 * h + 1, vbase + 2 * h, vbase + 2 * h + 1]);
        v
    }

    /// How the seats split into independently optimised groups.
    pub fn learners(&self) -> Vec<Learner> {
        match self.sharing {
            SharingConfig::FullyIndependent => PlayerId::ALL
                .iter()
                .map(|&p| Learner { seats: vec![p], tensors: self.seat_tensors(p.index()) })
                .collect(),
            _ => vec![Learner {
                seats: PlayerId::ALL.to_vec(),
                tensors: (0..self.tensors().len()).collect(),
            }],
        }
    }

    pub fn zero_all(&mut self) {
        for t in self.tensors_mut() {
            t.iter_mut().for_each(|x| *x = 0.0);
        }
    }

    pub fn zero_tensors(&mut self, which: &[usize]) {
        for (k, t) in self.tensors_mut().into_iter().enumerate() {
            if which.contains(&k) {
                t.iter_mut().for_each(|x| *x = 0.0);
            }
        }
    }

    pub fn is_finite(&self) -> bool {
        self.tensors().iter().all(|t| t.iter().all(|x| x.is_finite()))
    }
}
