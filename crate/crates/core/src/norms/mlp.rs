//! Single-hidden-layer perceptron with sigmoid activations, scalar output.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::scalar::Real;

pub fn sigmoid<T: Real>(z: T) -> T {
    T::one() / (T::one() + (-z).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Mlp<T> {
    /// hidden_dim rows of input_dim weights.
    pub w1: Vec<Vec<T>>,
    pub b1: Vec<T>,
    /// Output weights over the hidden units.
    pub w2: Vec<T>,
    pub b2: T,
}

/// Per-parameter gradients of the squared-error loss.
#[derive(Clone, Debug)]
pub struct MlpGradients<T> {
    pub w1: Vec<Vec<T>>,
    pub b1: Vec<T>,
    pub w2: Vec<T>,
    pub b2: T,
}

impl<T: Real> MlpGradients<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        MlpGradients {
            w1: vec![vec![T::zero(); input_dim]; hidden_dim],
            b1: vec![T::zero(); hidden_dim],
            w2: vec![T::zero(); hidden_dim],
            b2: T::zero(),
        }
    }

    pub fn reset(&mut self) {
        for row in &mut self.w1 {
            for v in row {
                *v = T::zero();
            }
        }
        for v in &mut self.b1 {
            *v = T::zero();
        }
        for v in &mut self.w2 {
            *v = T::zero();
        }
        self.b2 = T::zero();
    }
}

impl<T: Real> Mlp<T> {
    pub fn zeros(input_dim: usize, hidden_dim: usize) -> Self {
        Mlp {
            w1: vec![vec![T::zero(); input_dim]; hidden_dim],
            b1: vec![T::zero(); hidden_dim],
            w2: vec![T::zero(); hidden_dim],
            b2: T::zero(),
        }
    }

    /// Weights uniform in [-1/sqrt(fan_in), +1/sqrt(fan_in)], biases zero.
    pub fn init<R: Rng>(input_dim: usize, hidden_dim: usize, rng: &mut R) -> Self {
        let mut mlp = Self::zeros(input_dim, hidden_dim);
        let bound1 = 1.0 / (input_dim as f64).sqrt();
        for row in &mut mlp.w1 {
            for v in row {
                *v = T::real(rng.random_range(-bound1..bound1));
            }
        }
        let bound2 = 1.0 / (hidden_dim as f64).sqrt();
        for v in &mut mlp.w2 {
            *v = T::real(rng.random_range(-bound2..bound2));
        }
        mlp
    }

    pub fn input_dim(&self) -> usize {
        self.w1.first().map_or(0, Vec::len)
    }

    pub fn hidden_dim(&self) -> usize {
        self.w1.len()
    }

    fn hidden_activations(&self, x: &[T]) -> Vec<T> {
        self.w1
            .iter()
            .zip(&self.b1)
            .map(|(row, b)| {
                let z = row.iter().zip(x).map(|(w, xi)| *w * *xi).sum::<T>() + *b;
                sigmoid(z)
            })
            .collect()
    }

    pub fn forward(&self, x: &[T]) -> T {
        let h = self.hidden_activations(x);
        let z = self.w2.iter().zip(&h).map(|(w, hi)| *w * *hi).sum::<T>() + self.b2;
        sigmoid(z)
    }

    /// Squared error of one sample.
    pub fn loss(&self, x: &[T], target: T) -> T {
        let diff = self.forward(x) - target;
        diff * diff
    }

    /// Add this sample's loss gradients into the accumulator.
    pub fn accumulate_gradients(&self, x: &[T], target: T, grads: &mut MlpGradients<T>) {
        let h = self.hidden_activations(x);
        let z = self.w2.iter().zip(&h).map(|(w, hi)| *w * *hi).sum::<T>() + self.b2;
        let y = sigmoid(z);

        let two = T::real(2.0);
        let delta_out = two * (y - target) * y * (T::one() - y);
        for (gw, hi) in grads.w2.iter_mut().zip(&h) {
            *gw += delta_out * *hi;
        }
        grads.b2 += delta_out;

        for i in 0..self.hidden_dim() {
            let delta_h = delta_out * self.w2[i] * h[i] * (T::one() - h[i]);
            let grow = &mut grads.w1[i];
            for (g, xi) in grow.iter_mut().zip(x) {
                *g += delta_h * *xi;
            }
            grads.b1[i] += delta_h;
        }
    }

    /// Gradient step: `w -= scale * g`.
    pub fn apply_gradients(&mut self, grads: &MlpGradients<T>, scale: T) {
        for (row, grow) in self.w1.iter_mut().zip(&grads.w1) {
            for (w, g) in row.iter_mut().zip(grow) {
                *w -= scale * *g;
            }
        }
        for (b, g) in self.b1.iter_mut().zip(&grads.b1) {
            *b -= scale * *g;
        }
        for (w, g) in self.w2.iter_mut().zip(&grads.w2) {
            *w -= scale * *g;
        }
        self.b2 -= scale * grads.b2;
    }
}
