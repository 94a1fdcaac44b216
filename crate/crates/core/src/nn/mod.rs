//! A deliberately small neural stack: dense layers with hand-written
//! gradients, the encoder and two heads, a masked categorical
//! distribution and Adam.
//!
//! Observations are binary, so the first layer accepts either a dense
//! vector or the list of set indices. The policy head only evaluates rows
//! for legal actions; masked logits never influence probabilities or
//! gradients, so skipping them is exact.

mod adam;
mod distribution;
mod network;

pub use adam::{optimizer_step, Adam, AdamConfig};
pub use distribution::{log_softmax, sample_index, MaskedCategorical};
pub use network::{Encoder, PolicyHead, Trace, ValueHead, HIDDEN};

use rand::Rng;

use crate::error::{Error, Result};

/// Input to the first layer.
#[derive(Debug, Clone, Copy)]
pub enum Obs<'a> {
    Dense(&'a [f32]),
    /// Indices of entries equal to 1; all others are 0.
    Binary(&'a [u32]),
}

/// Fully connected layer, weights row-major `[out x in]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Linear {
    pub in_dim: usize,
    pub out_dim: usize,
    pub weight: Vec<f32>,
    pub bias: Vec<f32>,
}

pub(crate) fn dot(a: &[f32], b: &[f32]) -> f32 {
    let mut acc = [0.0f32; 8];
    let chunks = a.len() / 8;
    for c in 0..chunks {
        let (x, y) = (&a[c * 8..c * 8 + 8], &b[c * 8..c * 8 + 8]);
        for k in 0..8 {
            acc[k] += x[k] * y[k];
        }
    }
    let mut tail = 0.0;
    for k in chunks * 8..a.len() {
        tail += a[k] * b[k];
    }
    acc.iter().sum::<f32>() + tail
}

pub(crate) fn axpy(alpha: f32, x: &[f32], y: &mut [f32]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

impl Linear {
    pub fn zeros(in_dim: usize, out_dim: usize) -> Self {
        Linear { in_dim, out_dim, weight: vec![0.0; in_dim * out_dim], bias: vec![0.0; out_dim] }
    }

    /// Uniform fan-in initialisation with variance `gain^2 / in_dim`; zero bias.
    pub fn init<R: Rng>(in_dim: usize, out_dim: usize, gain: f32, rng: &mut R) -> Self {
        let bound = gain * (3.0 / in_dim as f32).sqrt();
        let weight = (0..in_dim * out_dim).map(|_| rng.gen_range(-bound..=bound)).collect();
        Linear { in_dim, out_dim, weight, bias: vec![0.0; out_dim] }
    }

    pub fn row(&self, o: usize) -> &[f32] {
        &self.weight[o * self.in_dim..(o + 1) * self.in_dim]
    }

    pub fn forward_into(&self, x: Obs<'_>, y: &mut [f32]) -> Result<()> {
        y.copy_from_slice(&self.bias);
        match x {
            Obs::Dense(x) => {
                if x.len() != self.in_dim {
                    return Err(Error::Shape(format!(
                        "input of length {} for layer expecting {}",
                        x.len(),
                        self.in_dim
                    )));
                }
                for (o, yo) in y.iter_mut().enumerate() {
                    *yo += dot(self.row(o), x);
                }
            }
            Obs::Binary(idx) => {
                if let Some(&bad) = idx.iter().find(|&&k| k as usize >= self.in_dim) {
                    return Err(Error::Shape(format!(
                        "active index {bad} for layer expecting {} inputs",
                        self.in_dim
                    )));
                }
                for (o, yo) in y.iter_mut().enumerate() {
                    let row = self.row(o);
                    *yo += idx.iter().map(|&k| row[k as usize]).sum::<f32>();
                }
            }
        }
        Ok(())
    }

    /// Accumulates parameter gradients for output gradient `dy` at input `x`
    /// and, when requested, the input gradient.
    pub fn backward(&self, x: Obs<'_>, dy: &[f32], grad: &mut Linear, dx: Option<&mut [f32]>) {
        for (gb, d) in grad.bias.iter_mut().zip(dy) {
            *gb += d;
        }
        let in_dim = self.in_dim;
        match x {
            Obs::Dense(x) => {
                for (o, &d) in dy.iter().enumerate() {
                    if d != 0.0 {
                        axpy(d, x, &mut grad.weight[o * in_dim..(o + 1) * in_dim]);
                    }
                }
            }
            Obs::Binary(idx) => {
                for (o, &d) in dy.iter().enumerate() {
                    let row = &mut grad.weight[o * in_dim..(o + 1) * in_dim];
                    for &k in idx {
                        row[k as usize] += d;
                    }
                }
            }
        }
        if let Some(dx) = dx {
            for (o, &d) in dy.iter().enumerate() {
                if d != 0.0 {
                    axpy(d, self.row(o), dx);
                }
            }
        }
    }

    pub fn tensors(&self) -> [&[f32]; 2] {
        [&self.weight, &self.bias]
    }

    pub fn tensors_mut(&mut self) -> [&mut [f32]; 2] {
        [&mut self.weight, &mut self.bias]
    }

    pub fn zero_(&mut self) {
        self.weight.iter_mut().for_each(|w| *w = 0.0);
        self.bias.iter_mut().for_each(|w| *w = 0.0);
    }

    pub fn add_(&mut self, other: &Linear) {
        axpy(1.0, &other.weight, &mut self.weight);
        axpy(1.0, &other.bias, &mut self.bias);
    }

    pub fn is_finite(&self) -> bool {
        self.weight.iter().chain(&self.bias).all(|x| x.is_finite())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn dot_matches_naive() {
        let a: Vec<f32> = (0..37).map(|i| i as f32 * 0.5).collect();
        let b: Vec<f32> = (0..37).map(|i| 1.0 - i as f32 * 0.1).collect();
        let naive: f32 = a.iter().zip(&b).map(|(x, y)| x * y).sum();
        assert!((dot(&a, &b) - naive).abs() < 1e-3);
    }

    #[test]
    fn sparse_and_dense_inputs_agree() {
        let mut rng = crate::seeding::rng(3, 0);
        let l = Linear::init(20, 5, 1.0, &mut rng);
        let idx = [1u32, 4, 19];
        let mut dense = vec![0.0; 20];
        for &k in &idx {
            dense[k as usize] = 1.0;
        }
        let (mut a, mut b) = (vec![0.0; 5], vec![0.0; 5]);
        l.forward_into(Obs::Dense(&dense), &mut a).unwrap();
        l.forward_into(Obs::Binary(&idx), &mut b).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-6);
        }
        let dy = [0.5, -1.0, 0.0, 2.0, 0.25];
        let (mut ga, mut gb) = (Linear::zeros(20, 5), Linear::zeros(20, 5));
        l.backward(Obs::Dense(&dense), &dy, &mut ga, None);
        l.backward(Obs::Binary(&idx), &dy, &mut gb, None);
        assert_eq!(ga, gb);
    }

    #[test]
    fn shape_errors() {
        let l = Linear::zeros(4, 2);
        let mut y = vec![0.0; 2];
        assert!(matches!(l.forward_into(Obs::Dense(&[1.0; 3]), &mut y), Err(Error::Shape(_))));
        assert!(matches!(l.forward_into(Obs::Binary(&[4]), &mut y), Err(Error::Shape(_))));
    }
}
