use crate::error::{Error, Result};
use crate::kernel::{Parameterized, Scalar};

/// Adam hyperparameters. Defaults: lr 0.001, β1 0.9, β2 0.999, ε 1e-8.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdamConfig {
    pub learning_rate: f64,
    pub beta1: f64,
    pub beta2: f64,
    pub epsilon: f64,
}

impl Default for AdamConfig {
    fn default() -> Self {
        Self {
            learning_rate: 0.001,
            beta1: 0.9,
            beta2: 0.999,
            epsilon: 1e-8,
        }
    }
}

impl AdamConfig {
    pub fn with_learning_rate(learning_rate: f64) -> Self {
        Self {
            learning_rate,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let ok = self.learning_rate > 0.0
            && (0.0..1.0).contains(&self.beta1)
            && (0.0..1.0).contains(&self.beta2)
            && self.epsilon > 0.0;
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid Adam configuration {self:?}")))
        }
    }
}

/// Moment estimates for one parameter tensor.
#[derive(Debug, Clone, PartialEq)]
pub struct AdamState<T> {
    pub step_count: u64,
    pub m: Vec<T>,
    pub v: Vec<T>,
    pub config: AdamConfig,
}

impl<T: Scalar> AdamState<T> {
    pub fn new(len: usize, config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            step_count: 0,
            m: vec![T::zero(); len],
            v: vec![T::zero(); len],
            config,
        })
    }
}

/// One bias-corrected Adam update of `param` in place.
pub fn adam_step<T: Scalar>(param: &mut [T], grad: &[T], state: &mut AdamState<T>) -> Result<()> {
    if param.len() != grad.len() || param.len() != state.m.len() || param.len() != state.v.len() {
        return Err(Error::shape(
            "adam_step param/grad/state",
            &[param.len(), grad.len()],
            &[state.m.len(), state.v.len()],
        ));
    }
    state.step_count += 1;
    let c = state.config;
    let (b1, b2) = (T::from_real(c.beta1), T::from_real(c.beta2));
    let (lr, eps) = (T::from_real(c.learning_rate), T::from_real(c.epsilon));
    let t = i32::try_from(state.step_count).unwrap_or(i32::MAX);
    let bias1 = T::one() - b1.powi(t);
    let bias2 = T::one() - b2.powi(t);

    for (((p, &g), m), v) in param
        .iter_mut()
        .zip(grad)
        .zip(state.m.iter_mut())
        .zip(state.v.iter_mut())
    {
        *m = b1 * *m + (T::one() - b1) * g;
        *v = b2 * *v + (T::one() - b2) * g * g;
        let m_hat = *m / bias1;
        let v_hat = *v / bias2;
        *p = *p - lr * m_hat / (v_hat.sqrt() + eps);
    }
    Ok(())
}

/// Adam over every parameter of a model; one [`AdamState`] per tensor in visit order.
#[derive(Debug, Clone)]
pub struct Adam<T> {
    config: AdamConfig,
    states: Vec<Option<AdamState<T>>>,
}

impl<T: Scalar> Adam<T> {
    pub fn new(config: AdamConfig) -> Result<Self> {
        config.validate()?;
        Ok(Self {
            config,
            states: Vec::new(),
        })
    }

    pub fn config(&self) -> AdamConfig {
        self.config
    }

    /// Updates every tensor that carries a gradient. Tensors without one (frozen
    /// blocks) are skipped and keep no optimizer state.
    pub fn step<M: Parameterized<T> + ?Sized>(&mut self, model: &mut M) -> Result<()> {
        let mut index = 0;
        let mut outcome = Ok(());
        let config = self.config;
        let states = &mut self.states;
        model.visit_params_mut(&mut |_, tensor| {
            if outcome.is_err() {
                return;
            }
            if states.len() <= index {
                states.resize(index + 1, None);
            }
            let len = tensor.len();
            let (values, grad) = tensor.values_and_grad_mut();
            if let Some(grad) = grad {
                let state = states[index]
                    .get_or_insert_with(|| AdamState::new(len, config).expect("validated config"));
                outcome = adam_step(values, grad, state);
            }
            index += 1;
        });
        outcome
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn zero_grad_leaves_param_bit_identical() {
        let mut p = vec![0.0f32, 1.5, -2.25];
        let before = p.clone();
        let mut s = AdamState::new(3, AdamConfig::default()).unwrap();
        adam_step(&mut p, &[0.0; 3], &mut s).unwrap();
        assert_eq!(s.step_count, 1);
        assert!(p.iter().zip(&before).all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn first_step_moves_by_learning_rate() {
        let mut p = vec![0.5f64; 4];
        let mut s = AdamState::new(4, AdamConfig::default()).unwrap();
        adam_step(&mut p, &[1.0; 4], &mut s).unwrap();
        let expected = 0.5 - 0.001 * (1.0 / (1.0 + 1e-8));
        for v in p {
            assert!((v - expected).abs() < 1e-15);
        }
    }

    #[test]
    fn two_steps_match_hand_unrolled() {
        // Constant gradient 1: m1 = 0.1, v1 = 0.001, m2 = 0.19, v2 = 0.001999.
        let mut p = vec![0.0f64];
        let mut s = AdamState::new(1, AdamConfig::default()).unwrap();
        adam_step(&mut p, &[1.0], &mut s).unwrap();
        adam_step(&mut p, &[1.0], &mut s).unwrap();
        let step1 = 0.001 * (0.1 / 0.1) / ((0.001f64 / 0.001).sqrt() + 1e-8);
        let step2 = 0.001 * (0.19 / 0.19) / ((0.001999f64 / 0.001999).sqrt() + 1e-8);
        assert!((p[0] - (-step1 - step2)).abs() < 1e-15);
        assert_eq!(s.step_count, 2);
    }

    #[test]
    fn shape_mismatch_is_an_error() {
        let mut s = AdamState::<f32>::new(2, AdamConfig::default()).unwrap();
        assert!(matches!(
            adam_step(&mut [0.0; 3], &[0.0; 3], &mut s),
            Err(Error::Shape { .. })
        ));
    }

    #[test]
    fn invalid_config_rejected() {
        for c in [
            AdamConfig { learning_rate: 0.0, ..Default::default() },
            AdamConfig { beta1: 1.0, ..Default::default() },
            AdamConfig { beta2: -0.1, ..Default::default() },
            AdamConfig { epsilon: 0.0, ..Default::default() },
        ] {
            assert!(AdamState::<f32>::new(1, c).is_err());
        }
    }
}
