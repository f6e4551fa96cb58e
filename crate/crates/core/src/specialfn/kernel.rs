//! The kernel `H_{a,u}(x) = Γ(a+1)/√(2π) · e^{-x²/4} (e^u D_{-a-1}(x) + D_{-a-1}(-x))`
//! and its logarithmic derivative.
//!
//! In terms of the shifted Gaussian moments `M_a` of [`super::pcf`],
//! `H_{a,u}(x) = (e^u M_a(x) + M_a(-x)) / √(2π)`, so the Gamma factors cancel
//! and only two quadratures are needed per point.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::logscaled::{log_weighted_pair, LogScaled};
use crate::quadrature::Integrator;
use crate::real::Real;

use super::pcf::ln_shifted_moment_with;

/// The triple `(u, a, ρ)` defining the weight `|r - ρ|^a · (e^u if r < ρ else 1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingularWeightParams<T> {
    /// Jump exponent. Real on the main path; complex inside the
    /// uniformity disk when differentiating along contours.
    pub u: Complex<T>,
    /// Root exponent, `a > -1`.
    pub a: T,
    /// Radius of the singular circle, `ρ > 0`.
    pub rho: T,
}

impl<T: Real> SingularWeightParams<T> {
    pub fn new(u: T, a: T, rho: T) -> Result<Self> {
        Self::with_complex_u(Complex::new(u, T::zero()), a, rho)
    }

    pub fn with_complex_u(u: Complex<T>, a: T, rho: T) -> Result<Self> {
        let p = Self { u, a, rho };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.a > -T::one()) {
            return Err(Error::domain("SingularWeightParams", format!("a = {:e} must exceed -1", self.a)));
        }
        if !(self.rho > T::zero()) {
            return Err(Error::domain("SingularWeightParams", format!("rho = {:e} must be positive", self.rho)));
        }
        if !self.u.re.is_finite() || !self.u.im.is_finite() {
            return Err(Error::domain("SingularWeightParams", "u must be finite"));
        }
        Ok(())
    }

    /// Same weight with a different jump exponent.
    pub fn with_u(&self, u: Complex<T>) -> Self {
        Self { u, ..*self }
    }
}

/// Evaluation settings for the kernel.
#[derive(Debug, Clone, Copy)]
pub struct KernelConfig<T> {
    /// Allowed `|Im u|`.
    pub delta: T,
    /// Smallest `|x|` accepted by [`log_h_tail`].
    pub crossover: T,
    pub integrator: Integrator<T>,
}

impl<T: Real> Default for KernelConfig<T> {
    fn default() -> Self {
        Self { delta: T::lit(0.5), crossover: T::lit(10.0), integrator: Integrator::new(T::lit(1e-13)) }
    }
}

impl<T: Real> KernelConfig<T> {
    fn check_u(&self, op: &'static str, u: Complex<T>) -> Result<()> {
        if u.im.abs() > self.delta {
            return Err(Error::branch(op, format!("|Im u| = {:e} exceeds delta = {:e}", u.im.abs(), self.delta)));
        }
        Ok(())
    }
}

fn half_ln_2pi<T: Real>() -> T {
    T::lit(0.918938533204672741780329736406)
}

/// `ln H_{a,u}(x)` on the branch continuous from `x = +∞`.
pub fn log_h_au<T: Real>(params: &SingularWeightParams<T>, x: T) -> Result<Complex<T>> {
    log_h_au_with(params, x, &KernelConfig::default())
}

pub fn log_h_au_with<T: Real>(
    params: &SingularWeightParams<T>,
    x: T,
    cfg: &KernelConfig<T>,
) -> Result<Complex<T>> {
    params.validate()?;
    cfg.check_u("log_h_au", params.u)?;
    let (lp, _) = ln_shifted_moment_with(params.a, x, &cfg.integrator)?;
    let (lm, _) = ln_shifted_moment_with(params.a, -x, &cfg.integrator)?;
    Ok(log_weighted_pair(params.u, lp, lm) - half_ln_2pi::<T>())
}

/// `d/dx ln H_{a,u}(x) = -(e^u D_{-a}(x) - D_{-a}(-x)) / (e^u D_{-a-1}(x) + D_{-a-1}(-x))`
/// with the Gaussian factor folded in.
pub fn dlog_h_au<T: Real>(params: &SingularWeightParams<T>, x: T) -> Result<Complex<T>> {
    dlog_h_au_with(params, x, &KernelConfig::default())
}

pub fn dlog_h_au_with<T: Real>(
    params: &SingularWeightParams<T>,
    x: T,
    cfg: &KernelConfig<T>,
) -> Result<Complex<T>> {
    params.validate()?;
    cfg.check_u("dlog_h_au", params.u)?;
    let a = params.a;
    let quad = &cfg.integrator;
    let (lp, _) = ln_shifted_moment_with(a, x, quad)?;
    let (lm, _) = ln_shifted_moment_with(a, -x, quad)?;
    let (lp1, _) = ln_shifted_moment_with(a + T::one(), x, quad)?;
    let (lm1, _) = ln_shifted_moment_with(a + T::one(), -x, quad)?;
    // M_{a+1}(y) + y M_a(y) = Γ(a+1) e^{-y²/4} D_{-a}(y)
    let shifted = |l1: T, l0: T, y: T| LogScaled::from_log(l1) + LogScaled::from_log(l0).mul_real(y);
    let top = lp.max(lm);
    let jp = shifted(lp1, lp, x).scale_ln(-top).value();
    let jm = shifted(lm1, lm, -x).scale_ln(-top).value();
    let eu = params.u.exp();
    let num = eu * jp - jm;
    let den = eu * (lp - top).exp() + (lm - top).exp();
    Ok(-num / den)
}

/// Large-`|x|` expansion
/// `a ln|x| + u·1{x<0} + a(a-1)/(2x²) - a(a-1)(2a-3)/(4x⁴)`.
pub fn log_h_tail<T: Real>(params: &SingularWeightParams<T>, x: T, crossover: T) -> Result<Complex<T>> {
    if x.abs() < crossover {
        return Err(Error::domain(
            "log_h_tail",
            format!("|x| = {:e} is below the crossover {:e}", x.abs(), crossover),
        ));
    }
    let a = params.a;
    let x2 = x * x;
    let c2 = a * (a - T::one()) * T::lit(0.5);
    let c4 = -a * (a - T::one()) * (T::lit(2.0) * a - T::lit(3.0)) * T::lit(0.25);
    let base = Complex::new(a * x.abs().ln() + c2 / x2 + c4 / (x2 * x2), T::zero());
    Ok(if x < T::zero() { base + params.u } else { base })
}

/// Coefficients `c_1, c_2, …` of `ln H_{a,u}(x) - a ln|x| - u·1{x<0} ~ Σ c_k x^{-2k}`.
///
/// They come from `ln E[(1 + Z/x)^a]` with `Z` standard normal; the first two
/// reproduce the coefficients used by [`log_h_tail`].
pub fn log_h_tail_coefficients<T: Real>(a: T, terms: usize) -> Vec<T> {
    // moments of (1 + εZ)^a in powers of w = ε²: (2k-1)!! C(a, 2k)
    let mut moments = Vec::with_capacity(terms + 1);
    moments.push(T::one());
    let mut binom = T::one();
    let mut dfact = T::one();
    for k in 1..=terms {
        let j = T::lit((2 * k) as f64);
        binom = binom * (a - j + T::lit(2.0)) / (j - T::one()) * (a - j + T::one()) / j;
        dfact = dfact * (j - T::one());
        moments.push(binom * dfact);
    }
    // log of a power series with unit constant term
    let mut logs: Vec<T> = vec![T::zero(); terms + 1];
    for k in 1..=terms {
        let mut acc = moments[k];
        for j in 1..k {
            acc = acc - T::lit(j as f64) * logs[j] * moments[k - j] / T::lit(k as f64);
        }
        logs[k] = acc;
    }
    logs.remove(0);
    logs
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::charlier::f_charlier;

    fn params(u: f64, a: f64) -> SingularWeightParams<f64> {
        SingularWeightParams::new(u, a, 0.5).unwrap()
    }

    #[test]
    fn trivial_weight_gives_unit_kernel() {
        for k in -10..=10 {
            let x = k as f64 * 0.8;
            let v = log_h_au(&params(0.0, 0.0), x).unwrap();
            assert!(v.norm() < 1e-13, "x = {x}: {v}");
            assert!(dlog_h_au(&params(0.0, 0.0), x).unwrap().norm() < 1e-12);
        }
    }

    #[test]
    fn order_zero_reduces_to_charlier() {
        for u in [-1.3, 0.4, 2.0] {
            for k in -8..=8 {
                let x = k as f64 * 0.75;
                let v = log_h_au(&params(u, 0.0), x).unwrap();
                let f = f_charlier(x / 2f64.sqrt(), Complex::new(u, 0.0).exp()).unwrap();
                assert!((v - f).norm() < 1e-12, "u = {u}, x = {x}");
            }
        }
    }

    #[test]
    fn tail_at_twenty() {
        // the x^-4 term is below 1e-6 at x = 20 for these orders
        for a in [0.5, 1.25, 1.5] {
            let v = log_h_au(&params(0.3, a), 20.0).unwrap();
            let want = a * 20f64.ln() + a * (a - 1.0) / 800.0;
            assert!((v.re - want).abs() < 1e-6, "a = {a}");
        }
        for a in [2.0, 2.5, 3.5] {
            let p = params(0.3, a);
            for x in [-20.0, 20.0] {
                let v = log_h_au(&p, x).unwrap();
                let t = log_h_tail(&p, x, 10.0).unwrap();
                assert!((v - t).norm() < 1e-6, "a = {a}, x = {x}");
            }
        }
    }

    #[test]
    fn tail_series_known_values() {
        let p = params(0.0, 2.0);
        let v = log_h_tail(&p, 10.0, 10.0).unwrap();
        assert!((v.re - (2.0 * 10f64.ln() + 0.01 - 0.00005)).abs() < 1e-15);
        let p1 = params(0.8, 1.0);
        assert!((log_h_tail(&p1, -12.0, 10.0).unwrap() - Complex::new(12f64.ln(), 0.0) - 0.8).norm() < 1e-15);
        assert_eq!(log_h_tail(&params(1.0, 0.0), 15.0, 10.0).unwrap(), Complex::new(0.0, 0.0));
        assert!(log_h_tail(&p, 3.0, 10.0).is_err());
    }

    #[test]
    fn tail_coefficients_match_closed_forms() {
        for a in [-0.5_f64, 1.25, 2.5, 4.0] {
            let c = log_h_tail_coefficients(a, 3);
            assert!((c[0] - a * (a - 1.0) / 2.0).abs() < 1e-14);
            assert!((c[1] + a * (a - 1.0) * (2.0 * a - 3.0) / 4.0).abs() < 1e-13);
        }
        // integer a: ln E[(x+Z)^1] = ln x exactly, so all corrections vanish
        assert!(log_h_tail_coefficients(1.0_f64, 4).iter().all(|c| c.abs() < 1e-15));
    }

    #[test]
    fn imaginary_part_bounded_by_delta() {
        let p = SingularWeightParams::with_complex_u(Complex::new(0.2, 0.6), 1.0, 0.5).unwrap();
        assert!(matches!(log_h_au(&p, 0.0), Err(Error::Branch { .. })));
        let p = SingularWeightParams::with_complex_u(Complex::new(0.2_f64, 0.3), 1.0, 0.5).unwrap();
        let far_left = log_h_au(&p, -25.0).unwrap();
        assert!((far_left.im - 0.3).abs() < 1e-10);
    }
}
