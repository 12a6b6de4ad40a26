//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display};

use num_traits::{Float, FromPrimitive};

/// Floating point scalar the solvers are generic over (`f32` or `f64`).
pub trait Real: Float + FromPrimitive + Debug + Display + Default + Send + Sync + 'static {
    /// Converts an `f64` literal. Every implemented scalar can represent (a rounding of) any
    /// finite `f64`, so this never fails for the types we implement it for.
    #[inline]
    fn lit(value: f64) -> Self {
        Self::from_f64(value).expect("f64 literal representable in scalar type")
    }

    #[inline]
    fn to_f64_lossy(self) -> f64 {
        self.to_f64().unwrap_or(f64::NAN)
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// `sgn` with `sgn(0) = 0`, unlike [`Float::signum`] which maps `+0.0` to `1.0`.
#[inline]
pub fn sgn<T: Real>(value: T) -> T {
    if value > T::zero() {
        T::one()
    } else if value < T::zero() {
        -T::one()
    } else {
        T::zero()
    }
}

pub(crate) fn norm<T: Real>(values: &[T]) -> T {
    values.iter().fold(T::zero(), |acc, &v| acc + v * v).sqrt()
}

/// `‖v‖ / √n`, the normalised L² norm used by the convergence tests.
pub fn normalized_norm<T: Real>(values: &[T]) -> T {
    if values.is_empty() {
        return T::zero();
    }
    norm(values) / T::lit(values.len() as f64).sqrt()
}

pub(crate) fn all_finite<T: Real>(values: &[T]) -> bool {
    values.iter().all(|v| v.is_finite())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sgn_of_zero_is_zero() {
        assert_eq!(sgn(0.0_f64), 0.0);
        assert_eq!(sgn(-0.0_f64), 0.0);
        assert_eq!(sgn(-3.0_f32), -1.0);
        assert_eq!(sgn(1e-300_f64), 1.0);
    }

    #[test]
    fn normalized_norm_of_constant_vector() {
        let v = vec![2.0_f64; 9];
        assert!((normalized_norm(&v) - 2.0).abs() < 1e-15);
        assert_eq!(normalized_norm::<f64>(&[]), 0.0);
    }
}
