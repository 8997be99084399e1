//! Floating-point scalar abstraction shared by the embedding and classifier code.

use std::fmt::{Debug, Display};
use std::iter::Sum;

use num_traits::{Float, FromPrimitive, NumAssignOps, ToPrimitive};

/// Real scalar used for vectors and model parameters: `f32` or `f64`.
pub trait Scalar:
    Float + FromPrimitive + ToPrimitive + NumAssignOps + Sum + Default + Debug + Display + Send + Sync + 'static
{
    /// Lossy conversion from `f64`; exact for values that originated as `Self`.
    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("f64 is representable in every Scalar")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("Scalar converts to f64")
    }

    fn parse_str(s: &str) -> Option<Self>;

    /// Type name recorded in checkpoints.
    const NAME: &'static str;
}

impl Scalar for f32 {
    const NAME: &'static str = "f32";

    fn parse_str(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

impl Scalar for f64 {
    const NAME: &'static str = "f64";

    fn parse_str(s: &str) -> Option<Self> {
        s.parse().ok()
    }
}

/// Logistic sigmoid, evaluated without overflow for large |z|.
pub fn sigmoid<T: Scalar>(z: T) -> T {
    if z >= T::zero() {
        T::one() / (T::one() + (-z).exp())
    } else {
        let e = z.exp();
        e / (T::one() + e)
    }
}

pub fn dot<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter().zip(b).map(|(&x, &y)| x * y).sum()
}

pub fn cosine<T: Scalar>(a: &[T], b: &[T]) -> T {
    let na = dot(a, a).sqrt();
    let nb = dot(b, b).sqrt();
    if na == T::zero() || nb == T::zero() {
        return T::zero();
    }
    dot(a, b) / (na * nb)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sigmoid_is_stable_at_extremes() {
        assert_eq!(sigmoid(0.0f64), 0.5);
        assert!(sigmoid(-1000.0f64).is_finite());
        assert!(sigmoid(1000.0f32) <= 1.0);
        assert!((sigmoid(2.0f64) + sigmoid(-2.0f64) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cosine_of_zero_vector_is_zero() {
        assert_eq!(cosine(&[0.0f64, 0.0], &[1.0, 2.0]), 0.0);
        assert!((cosine(&[1.0f32, 0.0], &[2.0, 0.0]) - 1.0).abs() < 1e-6);
    }
}
