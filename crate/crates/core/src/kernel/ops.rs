//! Affine, ReLU and dropout layers with hand-derived backward passes.

use crate::error::{Error, Result};
use crate::kernel::scalar::{axpy, dot};
use crate::kernel::{xavier_init, Scalar, Tensor};
use crate::rng::Rng;

/// Computes `W x + b` for an `m × n` weight.
pub fn affine_forward<T: Scalar>(x: &[T], weight: &Tensor<T>, bias: &Tensor<T>) -> Result<Vec<T>> {
    if weight.shape().len() != 2 {
        return Err(Error::shape("affine weight must be a matrix", weight.shape(), &[]));
    }
    let (m, n) = (weight.rows(), weight.cols());
    if x.len() != n {
        return Err(Error::shape("affine input", weight.shape(), &[x.len()]));
    }
    if bias.len() != m {
        return Err(Error::shape("affine bias", weight.shape(), bias.shape()));
    }
    Ok((0..m)
        .map(|i| dot(weight.row(i), x) + bias.values()[i])
        .collect())
}

/// Accumulates `dW += dy xᵀ` and `db += dy` into the parameter gradients and returns `dx = Wᵀ dy`.
///
/// `x` must be the input the matching forward call received.
pub fn affine_backward<T: Scalar>(
    x: &[T],
    weight: &mut Tensor<T>,
    bias: &mut Tensor<T>,
    upstream: &[T],
) -> Vec<T> {
    let (m, n) = (weight.rows(), weight.cols());
    assert_eq!(upstream.len(), m, "affine upstream gradient length");
    assert_eq!(x.len(), n, "affine cached input length");

    let mut dx = vec![T::zero(); n];
    for (i, &dy) in upstream.iter().enumerate() {
        if dy != T::zero() {
            axpy(&mut dx, dy, weight.row(i));
        }
    }
    {
        let gw = weight.grad_mut();
        for (i, &dy) in upstream.iter().enumerate() {
            if dy != T::zero() {
                axpy(&mut gw[i * n..(i + 1) * n], dy, x);
            }
        }
    }
    let gb = bias.grad_mut();
    for (g, &dy) in gb.iter_mut().zip(upstream) {
        *g = *g + dy;
    }
    dx
}

/// Fully connected layer holding its own weight and bias.
#[derive(Debug, Clone, PartialEq)]
pub struct Affine<T> {
    pub weight: Tensor<T>,
    pub bias: Tensor<T>,
}

impl<T: Scalar> Affine<T> {
    /// Xavier-initialized weight, zero bias.
    pub fn xavier(fan_in: usize, fan_out: usize, rng: &mut Rng) -> Result<Self> {
        Ok(Self {
            weight: xavier_init(fan_in, fan_out, rng)?,
            bias: Tensor::zeros(vec![fan_out])?,
        })
    }

    pub fn zeros(fan_in: usize, fan_out: usize) -> Result<Self> {
        Ok(Self {
            weight: Tensor::zeros(vec![fan_out, fan_in])?,
            bias: Tensor::zeros(vec![fan_out])?,
        })
    }

    pub fn input_dim(&self) -> usize {
        self.weight.cols()
    }

    pub fn output_dim(&self) -> usize {
        self.weight.rows()
    }

    pub fn forward(&self, x: &[T]) -> Result<Vec<T>> {
        affine_forward(x, &self.weight, &self.bias)
    }

    pub fn backward(&mut self, x: &[T], upstream: &[T]) -> Vec<T> {
        affine_backward(x, &mut self.weight, &mut self.bias, upstream)
    }
}

pub fn relu<T: Scalar>(x: &[T]) -> Vec<T> {
    x.iter().map(|&v| if v > T::zero() { v } else { T::zero() }).collect()
}

/// Passes the upstream gradient where the forward input was strictly positive.
/// The subgradient at exactly zero is taken to be zero.
pub fn relu_backward<T: Scalar>(x: &[T], upstream: &[T]) -> Vec<T> {
    x.iter()
        .zip(upstream)
        .map(|(&v, &g)| if v > T::zero() { g } else { T::zero() })
        .collect()
}

/// Per-unit scale factors applied by a training-mode dropout call.
#[derive(Debug, Clone, PartialEq)]
pub struct DropoutMask<T> {
    scale: Option<Vec<T>>,
}

impl<T: Scalar> DropoutMask<T> {
    pub fn identity() -> Self {
        Self { scale: None }
    }

    pub fn is_identity(&self) -> bool {
        self.scale.is_none()
    }

    pub fn backward(&self, upstream: &[T]) -> Vec<T> {
        match &self.scale {
            None => upstream.to_vec(),
            Some(s) => upstream.iter().zip(s).map(|(&g, &k)| g * k).collect(),
        }
    }
}

/// Inverted dropout: in training mode each unit is zeroed with probability `rate` and
/// survivors are scaled by `1 / (1 - rate)`; in inference mode the input is returned as is.
pub fn dropout<T: Scalar>(
    x: &[T],
    rate: f64,
    rng: &mut Rng,
    training: bool,
) -> Result<(Vec<T>, DropoutMask<T>)> {
    if !(0.0..1.0).contains(&rate) {
        return Err(Error::invalid(format!("dropout rate must be in [0, 1), got {rate}")));
    }
    if !training || rate == 0.0 {
        return Ok((x.to_vec(), DropoutMask::identity()));
    }
    let keep = T::from_real(1.0 / (1.0 - rate));
    let scale: Vec<T> = x
        .iter()
        .map(|_| if rng.unit() < rate { T::zero() } else { keep })
        .collect();
    let out = x.iter().zip(&scale).map(|(&v, &k)| v * k).collect();
    Ok((out, DropoutMask { scale: Some(scale) }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn t(shape: Vec<usize>, v: Vec<f64>) -> Tensor<f64> {
        Tensor::new(shape, v).unwrap()
    }

    #[test]
    fn affine_scalar_case() {
        let y = affine_forward(&[3.0], &t(vec![1, 1], vec![2.0]), &t(vec![1], vec![1.0])).unwrap();
        assert_eq!(y, vec![7.0]);
    }

    #[test]
    fn affine_identity_weight() {
        let x = [0.5, -2.0, 3.25];
        let mut eye = vec![0.0; 9];
        for i in 0..3 {
            eye[i * 3 + i] = 1.0;
        }
        let y = affine_forward(&x, &t(vec![3, 3], eye), &t(vec![3], vec![0.0; 3])).unwrap();
        assert_eq!(y, x.to_vec());
    }

    #[test]
    fn affine_shape_error_names_shapes() {
        let err = affine_forward(&[1.0, 2.0, 3.0], &t(vec![2, 4], vec![0.0; 8]), &t(vec![2], vec![0.0; 2]))
            .unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("[2, 4]") && msg.contains("[3]"), "{msg}");
    }

    #[test]
    fn affine_backward_accumulates() {
        let mut layer = Affine {
            weight: t(vec![2, 2], vec![1.0, 2.0, 3.0, 4.0]),
            bias: t(vec![2], vec![0.0, 0.0]),
        };
        let x = [1.0, -1.0];
        let dx = layer.backward(&x, &[1.0, 0.5]);
        assert_eq!(dx, vec![1.0 + 1.5, 2.0 + 2.0]);
        assert_eq!(layer.weight.grad().unwrap(), &[1.0, -1.0, 0.5, -0.5]);
        layer.backward(&x, &[1.0, 0.5]);
        assert_eq!(layer.bias.grad().unwrap(), &[2.0, 1.0]);
    }

    #[test]
    fn relu_forward_and_backward() {
        assert_eq!(relu(&[-1.0, 0.0, 2.0]), vec![0.0, 0.0, 2.0]);
        assert_eq!(relu(&[-1.0, -3.0]), vec![0.0, 0.0]);
        assert_eq!(relu_backward(&[-1.0, 0.0, 2.0], &[1.0, 1.0, 1.0]), vec![0.0, 0.0, 1.0]);
    }

    #[test]
    fn dropout_identities() {
        let x: Vec<f32> = (0..50).map(|i| i as f32 * 0.1 - 2.0).collect();
        let mut rng = Rng::new(5);
        let (y, _) = dropout(&x, 0.0, &mut rng, true).unwrap();
        assert_eq!(y, x);
        let (y, mask) = dropout(&x, 0.35, &mut rng, false).unwrap();
        assert!(mask.is_identity());
        assert!(y.iter().zip(&x).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn dropout_rejects_bad_rate() {
        let mut rng = Rng::new(5);
        assert!(dropout(&[1.0f32], 1.0, &mut rng, true).is_err());
        assert!(dropout(&[1.0f32], -0.1, &mut rng, true).is_err());
    }

    #[test]
    fn dropout_backward_uses_mask() {
        let mut rng = Rng::new(9);
        let x = vec![1.0f64; 64];
        let (y, mask) = dropout(&x, 0.5, &mut rng, true).unwrap();
        let g = mask.backward(&vec![1.0; 64]);
        assert_eq!(y, g);
        assert!(y.iter().all(|&v| v == 0.0 || v == 2.0));
    }
}
