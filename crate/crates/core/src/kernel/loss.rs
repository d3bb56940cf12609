use crate::error::{Error, Result};
use crate::kernel::Scalar;

fn check_gold(len: usize, gold: usize) -> Result<()> {
    if gold >= len {
        return Err(Error::invalid(format!(
            "gold index {gold} out of range for {len} logits"
        )));
    }
    Ok(())
}

/// Max-shifted softmax.
pub fn softmax<T: Scalar>(logits: &[T]) -> Vec<T> {
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let exps: Vec<T> = logits.iter().map(|&z| (z - max).exp()).collect();
    let total: T = exps.iter().copied().sum();
    exps.into_iter().map(|e| e / total).collect()
}

/// Negative log likelihood of `gold` under `softmax(logits)` and its gradient
/// `softmax(logits) - onehot(gold)`.
pub fn softmax_nll<T: Scalar>(logits: &[T], gold: usize) -> Result<(T, Vec<T>)> {
    check_gold(logits.len(), gold)?;
    let max = logits.iter().copied().fold(T::neg_infinity(), T::max);
    let total: T = logits.iter().map(|&z| (z - max).exp()).sum();
    let log_norm = max + total.ln();
    let loss = log_norm - logits[gold];

    let mut grad: Vec<T> = logits.iter().map(|&z| (z - log_norm).exp()).collect();
    grad[gold] = grad[gold] - T::one();
    Ok((loss, grad))
}

/// Crammer–Singer multiclass hinge loss.
///
/// `loss = max(0, margin + max_{j≠gold} z_j − z_gold)`. The subgradient is `+1` on the
/// single highest-scoring competitor (lowest index on ties) and `−1` on gold.
pub fn multiclass_hinge<T: Scalar>(logits: &[T], gold: usize, margin: T) -> Result<(T, Vec<T>)> {
    check_gold(logits.len(), gold)?;
    if !(margin > T::zero()) {
        return Err(Error::invalid(format!("hinge margin must be positive, got {margin}")));
    }
    let mut grad = vec![T::zero(); logits.len()];
    let rival = logits
        .iter()
        .enumerate()
        .filter(|&(j, _)| j != gold)
        .fold(None::<(usize, T)>, |best, (j, &z)| match best {
            Some((_, b)) if b >= z => best,
            _ => Some((j, z)),
        });
    let Some((rival, rival_score)) = rival else {
        return Ok((T::zero(), grad));
    };
    let violation = margin + rival_score - logits[gold];
    if violation > T::zero() {
        grad[rival] = T::one();
        grad[gold] = -T::one();
        Ok((violation, grad))
    } else {
        Ok((T::zero(), grad))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn nll_symmetric_pair() {
        let (loss, grad) = softmax_nll(&[0.0f64, 0.0], 0).unwrap();
        assert_abs_diff_eq!(loss, std::f64::consts::LN_2, epsilon = 1e-12);
        assert_eq!(grad, vec![-0.5, 0.5]);
    }

    #[test]
    fn nll_is_stable_for_large_logits() {
        let (loss, grad) = softmax_nll(&[1000.0f32, 0.0], 0).unwrap();
        assert!(loss.is_finite() && loss.abs() < 1e-6);
        assert!(grad.iter().all(|g| g.is_finite()));
        let (loss, _) = softmax_nll(&[1000.0f32, 0.0], 1).unwrap();
        assert_abs_diff_eq!(loss, 1000.0, epsilon = 1e-3);
    }

    #[test]
    fn nll_three_logits() {
        // -ln(e^3 / (e^1 + e^2 + e^3)), evaluated separately.
        let expected = -(3.0f64.exp() / (1.0f64.exp() + 2.0f64.exp() + 3.0f64.exp())).ln();
        assert_abs_diff_eq!(expected, 0.40760596444, epsilon = 1e-10);
        let (loss, grad) = softmax_nll(&[1.0f64, 2.0, 3.0], 2).unwrap();
        assert_abs_diff_eq!(loss, expected, epsilon = 1e-12);
        assert_abs_diff_eq!(grad.iter().sum::<f64>(), 0.0, epsilon = 1e-12);
    }

    #[test]
    fn nll_rejects_out_of_range_gold() {
        assert!(matches!(softmax_nll(&[0.0f32, 1.0], 2), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn hinge_cases() {
        let (l, g) = multiclass_hinge(&[5.0f64, 0.0], 0, 1.0).unwrap();
        assert_eq!((l, g), (0.0, vec![0.0, 0.0]));
        let (l, g) = multiclass_hinge(&[0.0f64, 0.0], 0, 1.0).unwrap();
        assert_eq!((l, g), (1.0, vec![-1.0, 1.0]));
        let (l, g) = multiclass_hinge(&[0.0f64, 2.0, 1.0], 0, 1.0).unwrap();
        assert_eq!((l, g), (3.0, vec![-1.0, 1.0, 0.0]));
    }

    #[test]
    fn hinge_ties_pick_lowest_index() {
        let (_, g) = multiclass_hinge(&[0.0f64, 3.0, 3.0], 0, 1.0).unwrap();
        assert_eq!(g, vec![-1.0, 1.0, 0.0]);
    }

    #[test]
    fn hinge_validates_inputs() {
        assert!(multiclass_hinge(&[0.0f64, 1.0], 5, 1.0).is_err());
        assert!(multiclass_hinge(&[0.0f64, 1.0], 0, 0.0).is_err());
    }

    #[test]
    fn softmax_sums_to_one() {
        let p = softmax(&[1.0f64, -3.0, 0.5, 7.0]);
        assert_abs_diff_eq!(p.iter().sum::<f64>(), 1.0, epsilon = 1e-12);
    }
}
