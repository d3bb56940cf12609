use crate::error::{Error, Result};
use crate::kernel::{Scalar, Tensor};
use crate::rng::Rng;

/// Half-width of the Xavier (Glorot) uniform interval.
pub fn xavier_bound(fan_in: usize, fan_out: usize) -> f64 {
    (6.0 / (fan_in + fan_out) as f64).sqrt()
}

/// `fan_out × fan_in` matrix drawn uniformly from `[-a, a]`, `a = sqrt(6 / (fan_in + fan_out))`.
pub fn xavier_init<T: Scalar>(fan_in: usize, fan_out: usize, rng: &mut Rng) -> Result<Tensor<T>> {
    if fan_in == 0 || fan_out == 0 {
        return Err(Error::invalid(format!(
            "xavier_init needs positive fan dimensions, got fan_in={fan_in} fan_out={fan_out}"
        )));
    }
    let bound = xavier_bound(fan_in, fan_out);
    let values = (0..fan_in * fan_out)
        .map(|_| T::from_real(rng.uniform(-bound, bound)))
        .collect();
    Tensor::matrix(fan_out, fan_in, values)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entries_within_bound() {
        let mut rng = Rng::new(3);
        let t: Tensor<f64> = xavier_init(100, 100, &mut rng).unwrap();
        assert_eq!(t.shape(), &[100, 100]);
        let a = 0.17320508075688773;
        assert!(t.values().iter().all(|v| v.abs() <= a));

        let t: Tensor<f64> = xavier_init(1, 2, &mut rng).unwrap();
        assert_eq!(t.shape(), &[2, 1]);
        assert!(t.values().iter().all(|v| v.abs() <= std::f64::consts::SQRT_2));
    }

    #[test]
    fn zero_fan_is_rejected() {
        let mut rng = Rng::new(0);
        assert!(matches!(
            xavier_init::<f32>(0, 5, &mut rng),
            Err(Error::InvalidArgument(_))
        ));
        assert!(xavier_init::<f32>(5, 0, &mut rng).is_err());
    }

    #[test]
    fn reproducible_from_seed() {
        let a: Tensor<f32> = xavier_init(7, 3, &mut Rng::new(11)).unwrap();
        let b: Tensor<f32> = xavier_init(7, 3, &mut Rng::new(11)).unwrap();
        assert_eq!(a, b);
    }
}
