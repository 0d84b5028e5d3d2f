use std::fmt::{Debug, Display};

use num_traits::{Float, FloatConst, FromPrimitive, NumAssign};

/// Floating point scalar the simulation is generic over (`f32` or `f64`).
pub trait Real:
    Float + FloatConst + FromPrimitive + NumAssign + Debug + Display + Default + Send + Sync + 'static
{
    /// Converts an `f64` literal. Panics only if the target type cannot represent finite numbers.
    #[inline]
    fn lit(x: f64) -> Self {
        Self::from_f64(x).expect("finite literal")
    }

    /// A tolerance of `x`, floored at a small multiple of machine epsilon so that
    /// `f64`-calibrated thresholds stay meaningful for `f32`.
    #[inline]
    fn tol(x: f64) -> Self {
        Self::lit(x).max(Self::epsilon() * Self::lit(64.0))
    }

    #[inline]
    fn as_f64(self) -> f64 {
        self.to_f64().expect("representable as f64")
    }

    /// Smallest magnitude treated as non-zero for norms and traces.
    #[inline]
    fn tiny() -> Self {
        Self::lit(1e-300).max(Self::min_positive_value())
    }
}

impl Real for f32 {}
impl Real for f64 {}

/// Wraps an angle into `[-π, π)`.
pub fn wrap_angle<T: Real>(phi: T) -> T {
    let two_pi = T::TAU();
    let wrapped = phi - two_pi * ((phi + T::PI()) / two_pi).floor();
    if wrapped >= T::PI() {
        wrapped - two_pi
    } else {
        wrapped
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn wrap_angle_range() {
        assert_eq!(wrap_angle(0.0), 0.0);
        assert_eq!(wrap_angle(PI), -PI);
        assert!((wrap_angle(3.0 * PI / 2.0) + PI / 2.0).abs() < 1e-15);
        assert!((wrap_angle(-PI - 0.1) - (PI - 0.1)).abs() < 1e-14);
        for i in -100..100 {
            let w = wrap_angle(i as f64 * 0.37);
            assert!((-PI..PI).contains(&w));
        }
    }

    #[test]
    fn tolerance_floor_for_f32() {
        assert!(f32::tol(1e-12) > 0.0);
        assert!(f32::tol(1e-12) >= f32::EPSILON);
        assert_eq!(f64::tol(1e-10), 1e-10);
    }
}
