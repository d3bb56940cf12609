use crate::kernel::{Scalar, Tensor};

/// Anything that owns named parameter tensors.
pub trait Parameterized<T: Scalar> {
    fn visit_params(&self, f: &mut dyn FnMut(&str, &Tensor<T>));

    fn visit_params_mut(&mut self, f: &mut dyn FnMut(&str, &mut Tensor<T>));

    fn param_count(&self) -> usize {
        let mut n = 0;
        self.visit_params(&mut |_, t| n += t.len());
        n
    }

    fn zero_grads(&mut self) {
        self.visit_params_mut(&mut |_, t| t.zero_grad());
    }

    fn clear_grads(&mut self) {
        self.visit_params_mut(&mut |_, t| t.clear_grad());
    }

    /// Multiplies every accumulated gradient by `factor`.
    fn scale_grads(&mut self, factor: T) {
        self.visit_params_mut(&mut |_, t| {
            if t.grad().is_some() {
                t.grad_mut().iter_mut().for_each(|g| *g = *g * factor);
            }
        });
    }

    /// All parameter values concatenated in visit order.
    fn flat_values(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.visit_params(&mut |_, t| out.extend_from_slice(t.values()));
        out
    }

    /// All gradients concatenated in visit order; missing gradients read as zero.
    fn flat_grads(&self) -> Vec<T> {
        let mut out = Vec::new();
        self.visit_params(&mut |_, t| match t.grad() {
            Some(g) => out.extend_from_slice(g),
            None => out.extend(std::iter::repeat_n(T::zero(), t.len())),
        });
        out
    }

    /// Overwrites parameter values from a flat slice laid out as [`Self::flat_values`].
    fn assign_flat(&mut self, flat: &[T]) {
        let mut offset = 0;
        self.visit_params_mut(&mut |_, t| {
            let n = t.len();
            t.values_mut().copy_from_slice(&flat[offset..offset + n]);
            offset += n;
        });
        assert_eq!(offset, flat.len(), "flat parameter length");
    }
}
