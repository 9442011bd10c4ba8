use std::fmt::{Debug, Display};
use std::iter::Sum;
use std::ops::{AddAssign, MulAssign, SubAssign};

use num_traits::{Float, FromPrimitive, ToPrimitive};

/// Floating-point type that coordinates, times and costs are expressed in.
pub trait Scalar:
    Float
    + FromPrimitive
    + ToPrimitive
    + AddAssign
    + SubAssign
    + MulAssign
    + Sum
    + Debug
    + Display
    + Default
    + Send
    + Sync
    + 'static
{
    /// Absolute slack, in time units, used by every feasibility comparison.
    const FEASIBILITY_TOL: f64;

    fn tol() -> Self {
        Self::of(Self::FEASIBILITY_TOL)
    }

    fn of(v: f64) -> Self {
        Self::from_f64(v).expect("value representable in scalar type")
    }

    fn as_f64(self) -> f64 {
        self.to_f64().expect("scalar convertible to f64")
    }
}

impl Scalar for f64 {
    const FEASIBILITY_TOL: f64 = 1e-9;
}

impl Scalar for f32 {
    const FEASIBILITY_TOL: f64 = 1e-2;
}

/// `a <= b` up to the scalar's feasibility tolerance. Infinite `b` always holds.
#[inline]
pub fn le_tol<S: Scalar>(a: S, b: S) -> bool {
    a <= b + S::tol()
}

#[inline]
pub fn pos<S: Scalar>(v: S) -> S {
    if v > S::zero() {
        v
    } else {
        S::zero()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn tolerance_depends_on_precision() {
        assert_eq!(f64::tol(), 1e-9);
        assert!(f32::tol() > 1e-3);
        assert!(le_tol(1.0 + 1e-10, 1.0));
        assert!(!le_tol(1.0 + 1e-8, 1.0));
        assert!(le_tol(5.0, f64::INFINITY));
    }

    #[test]
    fn positive_part() {
        assert_eq!(pos(-3.0_f64), 0.0);
        assert_eq!(pos(2.5_f32), 2.5);
    }
}
