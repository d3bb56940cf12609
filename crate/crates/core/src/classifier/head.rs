use crate::classifier::plan::ALLOWED_HEAD_LAYERS;
use crate::error::{Error, Result};
use crate::kernel::{dropout, relu, relu_backward, Affine, DropoutMask, Parameterized, Scalar, Tensor};
use crate::rng::Rng;

/// Feedforward head: `(affine → ReLU → dropout)` for every hidden layer, then a final
/// affine layer emitting raw logits.
#[derive(Debug, Clone, PartialEq)]
pub struct FfnHead<T> {
    pub layers: Vec<Affine<T>>,
}

/// Cached activations of one head forward pass.
#[derive(Debug, Clone)]
pub struct HeadTrace<T> {
    inputs: Vec<Vec<T>>,
    pre_activations: Vec<Vec<T>>,
    masks: Vec<DropoutMask<T>>,
}

/// Layer output widths: `layer_count - 1` hidden layers of `hidden_width`, then `outputs`.
pub fn head_widths(layer_count: usize, hidden_width: usize, outputs: usize) -> Result<Vec<usize>> {
    if !ALLOWED_HEAD_LAYERS.contains(&layer_count) {
        return Err(Error::invalid(format!(
            "head layer count {layer_count} is not one of {ALLOWED_HEAD_LAYERS:?}"
        )));
    }
    if hidden_width == 0 || outputs == 0 {
        return Err(Error::invalid("head widths must be positive"));
    }
    let mut widths = vec![hidden_width; layer_count - 1];
    widths.push(outputs);
    Ok(widths)
}

impl<T: Scalar> FfnHead<T> {
    pub fn xavier(input_dim: usize, widths: &[usize], rng: &mut Rng) -> Result<Self> {
        let mut layers = Vec::with_capacity(widths.len());
        let mut fan_in = input_dim;
        for &w in widths {
            layers.push(Affine::xavier(fan_in, w, rng)?);
            fan_in = w;
        }
        Ok(Self { layers })
    }

    pub fn zeros(input_dim: usize, widths: &[usize]) -> Result<Self> {
        let mut layers = Vec::with_capacity(widths.len());
        let mut fan_in = input_dim;
        for &w in widths {
            layers.push(Affine::zeros(fan_in, w)?);
            fan_in = w;
        }
        Ok(Self { layers })
    }

    pub fn layer_count(&self) -> usize {
        self.layers.len()
    }

    pub fn input_dim(&self) -> usize {
        self.layers[0].input_dim()
    }

    pub fn output_dim(&self) -> usize {
        self.layers.last().expect("non-empty head").output_dim()
    }

    pub fn widths(&self) -> Vec<usize> {
        self.layers.iter().map(Affine::output_dim).collect()
    }

    pub fn forward(&self, x: &[T], dropout_rate: f64, rng: &mut Rng, training: bool) -> Result<(Vec<T>, HeadTrace<T>)> {
        let last = self.layers.len() - 1;
        let mut trace = HeadTrace {
            inputs: Vec::with_capacity(self.layers.len()),
            pre_activations: Vec::with_capacity(last),
            masks: Vec::with_capacity(last),
        };
        let mut current = x.to_vec();
        for (l, layer) in self.layers.iter().enumerate() {
            let z = layer.forward(&current)?;
            trace.inputs.push(std::mem::take(&mut current));
            if l == last {
                return Ok((z, trace));
            }
            let a = relu(&z);
            let (dropped, mask) = dropout(&a, dropout_rate, rng, training)?;
            trace.pre_activations.push(z);
            trace.masks.push(mask);
            current = dropped;
        }
        unreachable!("head has at least one layer")
    }

    /// Accumulates layer gradients and returns `∂L/∂x`.
    pub fn backward(&mut self, trace: &HeadTrace<T>, d_logits: &[T]) -> Vec<T> {
        let last = self.layers.len() - 1;
        let mut upstream = d_logits.to_vec();
        for l in (0..=last).rev() {
            if l < last {
                let after_dropout = trace.masks[l].backward(&upstream);
                upstream = relu_backward(&trace.pre_activations[l], &after_dropout);
            }
            upstream = self.layers[l].backward(&trace.inputs[l], &upstream);
        }
        upstream
    }
}

impl<T: Scalar> Parameterized<T> for FfnHead<T> {
    fn visit_params(&self, f: &mut dyn FnMut(&str, &Tensor<T>)) {
        for (i, layer) in self.layers.iter().enumerate() {
            f(&format!("head.l{i}.weight"), &layer.weight);
            f(&format!("head.l{i}.bias"), &layer.bias);
        }
    }

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor<T>)) {
        for (i, layer) in self.layers.iter_mut().enumerate() {
            f(&format!("head.l{i}.weight"), &mut layer.weight);
            f(&format!("head.l{i}.bias"), &mut layer.bias);
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::{finite_difference_check, softmax_nll};

    #[test]
    fn widths_follow_layer_count() {
        assert_eq!(head_widths(3, 8, 4).unwrap(), vec![8, 8, 4]);
        assert_eq!(head_widths(2, 8, 4).unwrap(), vec![8, 4]);
        assert!(head_widths(6, 8, 4).is_err());
        assert!(head_widths(1, 8, 4).is_err());
    }

    #[test]
    fn zero_head_gives_zero_logits() {
        let head = FfnHead::<f32>::zeros(5, &[4, 4, 3]).unwrap();
        let (z, _) = head.forward(&[1.0; 5], 0.35, &mut Rng::new(0), true).unwrap();
        assert_eq!(z, vec![0.0; 3]);
    }

    #[test]
    fn head_gradient_matches_finite_differences() {
        for seed in 0..5 {
            let mut rng = Rng::new(seed);
            let mut head = FfnHead::<f64>::xavier(6, &[5, 4, 3], &mut rng).unwrap();
            let x: Vec<f64> = (0..6).map(|_| rng.uniform(-1.0, 1.0)).collect();
            let gold = (seed % 3) as usize;
            let (z, trace) = head.forward(&x, 0.0, &mut rng, false).unwrap();
            let (_, dz) = softmax_nll(&z, gold).unwrap();
            head.backward(&trace, &dz);
            let analytic = head.flat_grads();
            let theta = head.flat_values();
            let err = finite_difference_check(
                |p| {
                    let mut h = head.clone();
                    h.assign_flat(p);
                    let (z, _) = h.forward(&x, 0.0, &mut Rng::new(0), false)?;
                    Ok(softmax_nll(&z, gold)?.0)
                },
                &theta,
                &analytic,
                1e-5,
            )
            .unwrap();
            assert!(err < 1e-4, "seed {seed}: {err}");
        }
    }
}
