use crate::error::{Error, Result};
use crate::kernel::Scalar;

/// Denominator floor used by [`finite_difference_check`].
pub const DEFAULT_RELATIVE_FLOOR: f64 = 1e-8;

/// Worst-coordinate summary of a gradient check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GradCheckReport<T> {
    /// `maxᵢ |analyticᵢ − numericᵢ| / max(|analyticᵢ|, |numericᵢ|, floor)`.
    pub max_relative: T,
    pub max_absolute: T,
    /// Coordinate with the largest relative error.
    pub worst_index: usize,
}

/// Central-difference gradient check returning the maximum relative error with the
/// default floor.
pub fn finite_difference_check<T, F>(f: F, params: &[T], analytic: &[T], h: T) -> Result<T>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<T>,
{
    Ok(finite_difference_report(f, params, analytic, h, T::from_real(DEFAULT_RELATIVE_FLOOR))?.max_relative)
}

/// For each coordinate computes `(f(θ + h eᵢ) − f(θ − h eᵢ)) / 2h` and compares it with
/// `analytic`. `floor` bounds the relative-error denominator from below, so gradients
/// smaller than the difference quotient's rounding noise are judged absolutely.
pub fn finite_difference_report<T, F>(mut f: F, params: &[T], analytic: &[T], h: T, floor: T) -> Result<GradCheckReport<T>>
where
    T: Scalar,
    F: FnMut(&[T]) -> Result<T>,
{
    if !(h > T::zero()) {
        return Err(Error::invalid(format!("step h must be positive, got {h}")));
    }
    if !(floor > T::zero()) {
        return Err(Error::invalid(format!("floor must be positive, got {floor}")));
    }
    if params.len() != analytic.len() {
        return Err(Error::shape("finite_difference_check", &[params.len()], &[analytic.len()]));
    }
    let two = T::from_real(2.0);
    let mut theta = params.to_vec();
    let mut report = GradCheckReport {
        max_relative: T::zero(),
        max_absolute: T::zero(),
        worst_index: 0,
    };
    for i in 0..theta.len() {
        let orig = theta[i];
        theta[i] = orig + h;
        let plus = f(&theta)?;
        theta[i] = orig - h;
        let minus = f(&theta)?;
        theta[i] = orig;
        if !plus.is_finite() || !minus.is_finite() {
            return Err(Error::Numeric(format!(
                "objective not finite at coordinate {i} (f+ = {plus}, f- = {minus})"
            )));
        }
        let numeric = (plus - minus) / (two * h);
        let a = analytic[i];
        let abs = (a - numeric).abs();
        let rel = abs / a.abs().max(numeric.abs()).max(floor);
        report.max_absolute = report.max_absolute.max(abs);
        if rel > report.max_relative {
            report.max_relative = rel;
            report.worst_index = i;
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_exact() {
        let err = finite_difference_check(|t: &[f64]| Ok(t[0] * t[0]), &[3.0], &[6.0], 1e-5).unwrap();
        assert!(err < 1e-8, "{err}");
    }

    #[test]
    fn doubled_gradient_gives_half() {
        let err = finite_difference_check(|t: &[f64]| Ok(t[0] * t[0]), &[3.0], &[12.0], 1e-5).unwrap();
        assert!((err - 0.5).abs() < 1e-6, "{err}");
    }

    #[test]
    fn non_finite_objective_is_an_error() {
        let r = finite_difference_check(|t: &[f64]| Ok(1.0 / (t[0] - 1e-5)), &[0.0], &[0.0], 1e-5);
        assert!(matches!(r, Err(Error::Numeric(_))));
    }

    #[test]
    fn floor_bounds_tiny_gradients() {
        // Analytic 1e-7 against an exact numeric 0: relative error 1 with the default
        // floor, 0.1 with floor 1e-6.
        let f = |_: &[f64]| Ok(0.0);
        assert_eq!(finite_difference_check(f, &[0.0], &[1e-7], 1e-5).unwrap(), 1.0);
        let r = finite_difference_report(f, &[0.0], &[1e-7], 1e-5, 1e-6).unwrap();
        assert!((r.max_relative - 0.1).abs() < 1e-15);
        assert_eq!(r.max_absolute, 1e-7);
    }

    #[test]
    fn rejects_nonpositive_step() {
        assert!(finite_difference_check(|_: &[f64]| Ok(0.0), &[0.0], &[0.0], 0.0).is_err());
    }
}
