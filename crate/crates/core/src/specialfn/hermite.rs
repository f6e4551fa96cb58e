//! Associated Hermite polynomials and the integer-order form of the kernel.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

use super::erfc::erfc;

/// `He_k^{(ν)}(z)` from `He_{k+1} = z He_k - (k+ν) He_{k-1}`,
/// `He_0 = 1`, `He_1 = z`.
pub fn assoc_hermite<T: Real>(nu: T, k: usize, z: Complex<T>) -> Complex<T> {
    let mut prev = Complex::new(T::one(), T::zero());
    if k == 0 {
        return prev;
    }
    let mut cur = z;
    for j in 1..k {
        let next = z * cur - prev * (T::lit(j as f64) + nu);
        prev = cur;
        cur = next;
    }
    cur
}

/// `i^{-m} He_m^{(ν)}(i x)`, which is a real polynomial in `x`.
fn rotated_hermite<T: Real>(nu: T, m: usize, x: T) -> T {
    let v = assoc_hermite(nu, m, Complex::new(T::zero(), x));
    // i^{-m} cycles through 1, -i, -1, i
    match m % 4 {
        0 => v.re,
        1 => v.im,
        2 => -v.re,
        _ => -v.im,
    }
}

/// `G_0(y; u, a)` for integer `a ≥ 1`: the associated-Hermite
/// representation of the kernel, with `G_0(y/√2; u, a) = H_{a,u}(y)`.
pub fn g0_integer<T: Real>(a: u32, u: Complex<T>, y: T) -> Result<Complex<T>> {
    if a == 0 {
        return Err(Error::domain("g0_integer", "a must be a positive integer"));
    }
    let m = a as usize;
    let sign = if m % 2 == 0 { T::one() } else { -T::one() };
    let arg = -T::SQRT_2() * y;
    let p = rotated_hermite(T::zero(), m, arg);
    let q = rotated_hermite(T::one(), m - 1, arg);
    let jump = u.exp() - sign;
    let gauss = (-y * y).exp() / (T::TAU()).sqrt();
    let bracket = jump * (erfc(y) * T::lit(0.5)) + sign;
    Ok(bracket * p + jump * (q * gauss))
}
