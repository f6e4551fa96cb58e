//! The functionals `F(t, s) = ln(1 + (s-1) erfc(t)/2)` and `G = ∂_t F`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::logscaled::ln_1p_complex;
use crate::real::Real;

use super::erfc::erfc;

fn check_cut<T: Real>(op: &'static str, arg: Complex<T>) -> Result<()> {
    if arg.im == T::zero() && arg.re <= T::zero() {
        return Err(Error::branch(op, format!("1 + (s-1) erfc(t)/2 = {arg} lies on (-inf, 0]")));
    }
    Ok(())
}

/// Principal `ln(1 + (s-1) erfc(t)/2)`.
pub fn f_charlier<T: Real>(t: T, s: Complex<T>) -> Result<Complex<T>> {
    let e = erfc(t) * T::lit(0.5);
    let delta = (s - T::one()) * e;
    check_cut("f_charlier", delta + T::one())?;
    Ok(ln_1p_complex(delta))
}

/// `(1-s) / (1 + (s-1) erfc(t)/2) · e^{-t²}/√π`, the `t`-derivative of
/// [`f_charlier`].
pub fn g_charlier<T: Real>(t: T, s: Complex<T>) -> Result<Complex<T>> {
    let e = erfc(t) * T::lit(0.5);
    let den = (s - T::one()) * e + T::one();
    check_cut("g_charlier", den)?;
    let gauss = (-t * t).exp() * T::FRAC_2_SQRT_PI() * T::lit(0.5);
    Ok((-(s - T::one())) / den * gauss)
}
