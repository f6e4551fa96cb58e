//! Scalar abstraction shared by every numerical routine in the crate.

use std::fmt::{Debug, Display, LowerExp};
use std::iter::Sum;

use num_traits::{Float, FloatConst};

/// Floating point type the library computes in.
///
/// Implemented for `f32` and `f64`. Most accuracy targets quoted in the docs
/// assume `f64`; with `f32` the quadrature tolerances are clamped to a few
/// hundred ulps.
pub trait Real:
    Float + FloatConst + Debug + Display + LowerExp + Sum + Send + Sync + Default + 'static
{
    /// Converts an `f64` literal. Exact for `f64`, rounded for `f32`.
    fn lit(x: f64) -> Self;

    fn as_f64(self) -> f64;

    /// Smallest relative tolerance worth asking an integrator for.
    fn tol_floor() -> Self {
        Self::epsilon() * Self::lit(50.0)
    }
}

impl Real for f64 {
    #[inline]
    fn lit(x: f64) -> Self {
        x
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self
    }
}

impl Real for f32 {
    #[inline]
    fn lit(x: f64) -> Self {
        x as f32
    }
    #[inline]
    fn as_f64(self) -> f64 {
        self as f64
    }
}

/// Neumaier-compensated running sum.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum<T> {
    sum: T,
    carry: T,
}

impl<T: Real> CompensatedSum<T> {
    pub fn new() -> Self {
        Self { sum: T::zero(), carry: T::zero() }
    }

    pub fn add(&mut self, x: T) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry = self.carry + ((self.sum - t) + x);
        } else {
            self.carry = self.carry + ((x - t) + self.sum);
        }
        self.sum = t;
    }

    pub fn value(&self) -> T {
        self.sum + self.carry
    }
}

impl<T: Real> FromIterator<T> for CompensatedSum<T> {
    fn from_iter<I: IntoIterator<Item = T>>(iter: I) -> Self {
        let mut acc = Self::new();
        for x in iter {
            acc.add(x);
        }
        acc
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn compensated_sum_recovers_small_terms() {
        let mut terms = vec![1.0e16_f64];
        terms.extend(std::iter::repeat(1.0).take(1000));
        terms.push(-1.0e16);
        let acc: CompensatedSum<f64> = terms.into_iter().collect();
        assert_eq!(acc.value(), 1000.0);
    }

    #[test]
    fn lit_rounds_for_f32() {
        assert_eq!(<f32 as Real>::lit(0.1), 0.1_f32);
        assert!(<f32 as Real>::tol_floor() > <f64 as Real>::tol_floor() as f32);
    }
}
