//! Runs Adam on f(θ) = ½θ² and prints the trajectory next to a hand-unrolled update.

use discrel::kernel::{adam_step, AdamConfig, AdamState};

fn main() -> discrel::Result<()> {
    let config = AdamConfig::default();
    let mut theta = [1.0f64];
    let mut state = AdamState::new(1, config)?;
    let (mut m, mut v, mut reference) = (0.0f64, 0.0f64, 1.0f64);
    for t in 1..=100 {
        let grad = [theta[0]];
        adam_step(&mut theta, &grad, &mut state)?;
        let g = reference;
        m = config.beta1 * m + (1.0 - config.beta1) * g;
        v = config.beta2 * v + (1.0 - config.beta2) * g * g;
        let m_hat = m / (1.0 - config.beta1.powi(t));
        let v_hat = v / (1.0 - config.beta2.powi(t));
        reference -= config.learning_rate * m_hat / (v_hat.sqrt() + config.epsilon);
        if t % 20 == 0 {
            println!("step {t:3}: theta {:.12} reference {reference:.12}", theta[0]);
        }
    }
    assert!((theta[0] - reference).abs() < 1e-12);
    Ok(())
}
