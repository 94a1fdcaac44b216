use rand::Rng;

use super::{dot, Linear, Obs};
use crate::error::Result;

pub const HIDDEN: usize = 64;

/// Two ReLU layers: `relu(W2 relu(W1 x + b1) + b2)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Encoder {
    pub l1: Linear,
    pub l2: Linear,
}

/// Pre- and post-activation values of one encoder pass, kept for backprop.
#[derive(Debug, Clone, Default)]
pub struct Trace {
    pub pre1: Vec<f32>,
    pub h1: Vec<f32>,
    pub pre2: Vec<f32>,
    pub h2: Vec<f32>,
}

fn relu_into(pre: &[f32], out: &mut Vec<f32>) {
    out.clear();
    out.extend(pre.iter().map(|&x| x.max(0.0)));
}

impl Encoder {
    pub fn new<R: Rng>(obs_dim: usize, hidden: usize, rng: &mut R) -> Self {
        let gain = std::f32::consts::SQRT_2;
        Encoder {
            l1: Linear::init(obs_dim, hidden, gain, rng),
            l2: Linear::init(hidden, hidden, gain, rng),
        }
    }

    pub fn zeros(obs_dim: usize, hidden: usize) -> Self {
        Encoder { l1: Linear::zeros(obs_dim, hidden), l2: Linear::zeros(hidden, hidden) }
    }

    pub fn obs_dim(&self) -> usize {
        self.l1.in_dim
    }

    pub fn hidden(&self) -> usize {
        self.l2.out_dim
    }

    pub fn forward(&self, obs: &[f32]) -> Result<Vec<f32>> {
        let mut t = Trace::default();
        self.forward_trace(Obs::Dense(obs), &mut t)?;
        Ok(t.h2)
    }

    pub fn forward_trace(&self, obs: Obs<'_>, t: &mut Trace) -> Result<()> {
        let h = self.hidden();
        t.pre1.resize(self.l1.out_dim, 0.0);
        self.l1.forward_into(obs, &mut t.pre1)?;
        relu_into(&t.pre1, &mut t.h1);
        t.pre2.resize(h, 0.0);
        self.l2.forward_into(Obs::Dense(&t.h1), &mut t.pre2)?;
        relu_into(&t.pre2, &mut t.h2);
        Ok(())
    }

    /// Accumulates into `grad` given the gradient `d_out` w.r.t. the encoder output.
    pub fn backward(&self, obs: Obs<'_>, t: &Trace, d_out: &[f32], grad: &mut Encoder) {
        let d2: Vec<f32> =
            d_out.iter().zip(&t.pre2).map(|(&d, &a)| if a > 0.0 { d } else { 0.0 }).collect();
        let mut dh1 = vec![0.0; self.l1.out_dim];
        self.l2.backward(Obs::Dense(&t.h1), &d2, &mut grad.l2, Some(&mut dh1));
        for (d, &a) in dh1.iter_mut().zip(&t.pre1) {
            if a <= 0.0 {
                *d = 0.0;
            }
        }
        self.l1.backward(obs, &dh1, &mut grad.l1, None);
    }

    pub fn tensors(&self) -> Vec<&[f32]> {
        [self.l1.tensors(), self.l2.tensors()].concat()
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut [f32]> {
        let [a, b] = self.l1.tensors_mut();
        let [c, d] = self.l2.tensors_mut();
        vec![a, b, c, d]
    }

    pub fn zero_(&mut self) {
        self.l1.zero_();
        self.l2.zero_();
    }

    pub fn add_(&mut self, o: &Encoder) {
        self.l1.add_(&o.l1);
        self.l2.add_(&o.l2);
    }
}

/// Linear map from the encoding to one logit per action.
#[derive(Debug, Clone, PartialEq)]
pub struct PolicyHead {
    pub linear: Linear,
}

impl PolicyHead {
    pub fn new<R: Rng>(hidden: usize, act_dim: usize, rng: &mut R) -> Self {
        PolicyHead { linear: Linear::init(hidden, act_dim, 0.01, rng) }
    }

    pub fn zeros(hidden: usize, act_dim: usize) -> Self {
        PolicyHead { linear: Linear::zeros(hidden, act_dim) }
    }

    pub fn act_dim(&self) -> usize {
        self.linear.out_dim
    }

    /// All logits.
    pub fn logits(&self, h: &[f32]) -> Result<Vec<f32>> {
        let mut out = vec![0.0; self.act_dim()];
        self.linear.forward_into(Obs::Dense(h), &mut out)?;
        Ok(out)
    }

    /// Logits for the listed actions only.
    pub fn logits_for(&self, h: &[f32], actions: &[u32], out: &mut Vec<f32>) {
        out.clear();
        out.extend(
            actions
                .iter()
                .map(|&a| dot(self.linear.row(a as usize), h) + self.linear.bias[a as usize]),
        );
    }

    /// Backprop through the listed rows; `d_logits[k]` pairs with `actions[k]`.
    pub fn backward_rows(
        &self,
        h: &[f32],
        actions: &[u32],
        d_logits: &[f32],
        grad: &mut PolicyHead,
        d_h: &mut [f32],
    ) {
        let in_dim = self.linear.in_dim;
        for (&a, &d) in actions.iter().zip(d_logits) {
            let a = a as usize;
            grad.linear.bias[a] += d;
            super::axpy(d, h, &mut grad.linear.weight[a * in_dim..(a + 1) * in_dim]);
            super::axpy(d, self.linear.row(a), d_h);
        }
    }
}

/// Linear map from the encoding to a scalar state value.
#[derive(Debug, Clone, PartialEq)]
pub struct ValueHead {
    pub linear: Linear,
}

impl ValueHead {
    pub fn new<R: Rng>(hidden: usize, rng: &mut R) -> Self {
        ValueHead { linear: Linear::init(hidden, 1, 1.0, rng) }
    }

    pub fn zeros(hidden: usize) -> Self {
        ValueHead { linear: Linear::zeros(hidden, 1) }
    }

    pub fn forward(&self, h: &[f32]) -> f32 {
        dot(&self.linear.weight, h) + self.linear.bias[0]
    }

    pub fn backward(&self, h: &[f32], dv: f32, grad: &mut ValueHead, d_h: &mut [f32]) {
        grad.linear.bias[0] += dv;
        super::axpy(dv, h, &mut grad.linear.weight);
        super::axpy(dv, &self.linear.weight, d_h);
    }
}
