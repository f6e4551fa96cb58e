//! Sign and log-magnitude representation of real numbers.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex;

use crate::real::Real;

/// A real number stored as `sign * exp(log_mag)`.
///
/// Products add log-magnitudes, sums go through a max-shifted exponent, so
/// values far outside the floating point range can be combined as long as
/// the final answer is consumed in log form.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LogScaled<T> {
    pub log_mag: T,
    /// One of `-1`, `0`, `+1`.
    pub sign: i8,
}

impl<T: Real> LogScaled<T> {
    pub fn zero() -> Self {
        Self { log_mag: T::neg_infinity(), sign: 0 }
    }

    pub fn one() -> Self {
        Self { log_mag: T::zero(), sign: 1 }
    }

    /// Positive value with the given natural log.
    pub fn from_log(log_mag: T) -> Self {
        Self { log_mag, sign: 1 }
    }

    pub fn from_value(x: T) -> Self {
        if x == T::zero() {
            Self::zero()
        } else {
            Self { log_mag: x.abs().ln(), sign: if x > T::zero() { 1 } else { -1 } }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.sign == 0
    }

    pub fn value(&self) -> T {
        match self.sign {
            0 => T::zero(),
            1 => self.log_mag.exp(),
            _ => -self.log_mag.exp(),
        }
    }

    /// Natural log of the value, `None` unless the value is positive.
    pub fn ln(&self) -> Option<T> {
        (self.sign == 1).then_some(self.log_mag)
    }

    /// Principal complex logarithm (phase `π` for negative values).
    pub fn ln_complex(&self) -> Complex<T> {
        match self.sign {
            0 => Complex::new(T::neg_infinity(), T::zero()),
            1 => Complex::new(self.log_mag, T::zero()),
            _ => Complex::new(self.log_mag, T::PI()),
        }
    }

    pub fn scale_ln(self, log_factor: T) -> Self {
        if self.is_zero() {
            self
        } else {
            Self { log_mag: self.log_mag + log_factor, sign: self.sign }
        }
    }

    pub fn mul_real(self, x: T) -> Self {
        self * Self::from_value(x)
    }
}

impl<T: Real> Mul for LogScaled<T> {
    type Output = Self;
    fn mul(self, rhs: Self) -> Self {
        if self.is_zero() || rhs.is_zero() {
            return Self::zero();
        }
        Self { log_mag: self.log_mag + rhs.log_mag, sign: self.sign * rhs.sign }
    }
}

impl<T: Real> Div for LogScaled<T> {
    type Output = Self;
    fn div(self, rhs: Self) -> Self {
        assert!(!rhs.is_zero(), "LogScaled division by zero");
        if self.is_zero() {
            return self;
        }
        Self { log_mag: self.log_mag - rhs.log_mag, sign: self.sign * rhs.sign }
    }
}

impl<T: Real> Neg for LogScaled<T> {
    type Output = Self;
    fn neg(self) -> Self {
        Self { log_mag: self.log_mag, sign: -self.sign }
    }
}

impl<T: Real> Add for LogScaled<T> {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        if self.is_zero() {
            return rhs;
        }
        if rhs.is_zero() {
            return self;
        }
        let (big, small) = if self.log_mag >= rhs.log_mag { (self, rhs) } else { (rhs, self) };
        let ratio = (small.log_mag - big.log_mag).exp();
        if big.sign == small.sign {
            Self { log_mag: big.log_mag + ratio.ln_1p(), sign: big.sign }
        } else if ratio == T::one() {
            Self::zero()
        } else {
            Self { log_mag: big.log_mag + (-ratio).ln_1p(), sign: big.sign }
        }
    }
}

impl<T: Real> Sub for LogScaled<T> {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + (-rhs)
    }
}

/// `ln(exp(a) + exp(b))` without overflow.
pub fn log_add_exp<T: Real>(a: T, b: T) -> T {
    if a == T::neg_infinity() {
        return b;
    }
    if b == T::neg_infinity() {
        return a;
    }
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

/// Principal `ln(1 + z)`, accurate for small `|z|`.
pub fn ln_1p_complex<T: Real>(z: Complex<T>) -> Complex<T> {
    let (x, y) = (z.re, z.im);
    if x.abs() + y.abs() < T::lit(0.5) {
        let re = T::lit(0.5) * (x * (T::lit(2.0) + x) + y * y).ln_1p();
        Complex::new(re, y.atan2(T::one() + x))
    } else {
        (Complex::new(T::one(), T::zero()) + z).ln()
    }
}

/// Principal `ln(exp(u) * exp(lp) + exp(lm))` for complex `u` and real
/// log-magnitudes `lp`, `lm`.
///
/// The result is continuous in `lp - lm` along the whole real line when
/// `|Im u| < π`, which is what branch tracking "from `+∞`" amounts to.
pub fn log_weighted_pair<T: Real>(u: Complex<T>, lp: T, lm: T) -> Complex<T> {
    if lp == T::neg_infinity() {
        return Complex::new(lm, T::zero());
    }
    if lm == T::neg_infinity() {
        return u + lp;
    }
    let w = u + (lp - lm);
    if w.re <= T::zero() {
        ln_1p_complex(w.exp()) + lm
    } else {
        ln_1p_complex((-w).exp()) + w + lm
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn sums_far_outside_float_range() {
        let a = LogScaled::<f64>::from_log(800.0);
        let b = LogScaled::<f64>::from_log(800.0 + 2f64.ln());
        let s = a + b;
        assert!((s.log_mag - (800.0 + 3f64.ln())).abs() < 1e-12);
        let d = b - a;
        assert!((d.log_mag - 800.0).abs() < 1e-12);
        assert_eq!(d.sign, 1);
        assert!((a - a).is_zero());
    }

    #[test]
    fn ln_complex_of_negative() {
        let v = LogScaled::from_value(-2.0_f64);
        let z = v.ln_complex();
        assert!((z.re - 2f64.ln()).abs() < 1e-15 && (z.im - std::f64::consts::PI).abs() < 1e-15);
        assert_eq!(v.ln(), None);
    }

    #[test]
    fn weighted_pair_matches_direct_and_is_continuous() {
        let u = Complex::new(0.7, 0.4);
        let mut prev: Option<Complex<f64>> = None;
        for k in -40..=40 {
            let d = k as f64 * 0.5;
            let got = log_weighted_pair(u, d, 0.0);
            let direct = (u.exp() * d.exp() + 1.0).ln();
            if d.abs() < 10.0 {
                assert!((got - direct).norm() < 1e-13, "{d}: {got} vs {direct}");
            }
            if let Some(p) = prev {
                assert!((got.im - p.im).abs() < 0.3);
            }
            prev = Some(got);
        }
    }

    proptest! {
        #[test]
        fn add_mul_agree_with_plain_arithmetic(x in -1e3f64..1e3, y in -1e3f64..1e3) {
            let (lx, ly) = (LogScaled::from_value(x), LogScaled::from_value(y));
            let s = (lx + ly).value();
            prop_assert!((s - (x + y)).abs() <= 1e-12 * (x.abs() + y.abs()).max(1e-300));
            let p = (lx * ly).value();
            prop_assert!((p - x * y).abs() <= 1e-12 * (x * y).abs());
        }

        #[test]
        fn log_add_exp_never_overflows(a in -700f64..700.0, b in -700f64..700.0) {
            let v = log_add_exp(a, b);
            prop_assert!(v.is_finite());
            prop_assert!(v >= a.max(b) && v <= a.max(b) + 2f64.ln() + 1e-12);
        }
    }
}
