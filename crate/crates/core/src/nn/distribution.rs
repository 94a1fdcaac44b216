use rand::Rng;

use crate::error::{Error, Result};

/// Log-softmax of `logits`, accumulated in f64.
pub fn log_softmax(logits: &[f32]) -> Vec<f64> {
    let max = logits.iter().fold(f64::NEG_INFINITY, |m, &x| m.max(x as f64));
    let sum: f64 = logits.iter().map(|&x| (x as f64 - max).exp()).sum();
    let lse = max + sum.ln();
    logits.iter().map(|&x| x as f64 - lse).collect()
}

/// Entropy of the distribution with log-probabilities `logp`.
pub(crate) fn entropy_of(logp: &[f64]) -> f64 {
    -logp.iter().map(|&l| l.exp() * l).sum::<f64>()
}

/// Inverse-CDF draw; returns a position in `logp`.
pub fn sample_index<R: Rng>(logp: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.gen();
    let mut acc = 0.0;
    for (k, &l) in logp.iter().enumerate() {
        acc += l.exp();
        if u < acc {
            return k;
        }
    }
    logp.len() - 1
}

/// Categorical over actions with illegal entries forced to probability 0.
#[derive(Debug, Clone)]
pub struct MaskedCategorical {
    legal: Vec<usize>,
    logp: Vec<f64>,
    len: usize,
}

impl MaskedCategorical {
    pub fn new(logits: &[f32], mask: &[u8]) -> Result<Self> {
        if logits.len() != mask.len() {
            return Err(Error::Shape(format!(
                "{} logits with a mask of {}",
                logits.len(),
                mask.len()
            )));
        }
        let legal: Vec<usize> = (0..mask.len()).filter(|&a| mask[a] != 0).collect();
        if legal.is_empty() {
            return Err(Error::Contract("action mask has no legal entry".into()));
        }
        let sub: Vec<f32> = legal.iter().map(|&a| logits[a]).collect();
        Ok(MaskedCategorical { logp: log_softmax(&sub), legal, len: logits.len() })
    }

    /// Log-probabilities; masked entries are `-inf`.
    pub fn log_probs(&self) -> Vec<f32> {
        let mut out = vec![f32::NEG_INFINITY; self.len];
        for (&a, &l) in self.legal.iter().zip(&self.logp) {
            out[a] = l as f32;
        }
        out
    }

    pub fn probs(&self) -> Vec<f32> {
        let mut out = vec![0.0; self.len];
        for (&a, &l) in self.legal.iter().zip(&self.logp) {
            out[a] = l.exp() as f32;
        }
        out
    }

    pub fn sample<R: Rng>(&self, rng: &mut R) -> usize {
        self.legal[sample_index(&self.logp, rng)]
    }

    pub fn argmax(&self) -> usize {
        let mut best = 0;
        for k in 1..self.logp.len() {
            if self.logp[k] > self.logp[best] {
                best = k;
            }
        }
        self.legal[best]
    }

    pub fn entropy(&self) -> f32 {
        entropy_of(&self.logp) as f32
    }
}
