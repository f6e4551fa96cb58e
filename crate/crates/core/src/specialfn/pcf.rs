//! Parabolic cylinder functions `D_{-ν}` on the real line, in scaled form.
//!
//! Everything is built on the shifted Gaussian moment
//!
//! ```text
//! M_a(x) = ∫_0^∞ t^a exp(-(t + x)²/2) dt,     a > -1,
//! ```
//!
//! which satisfies `e^{-x²/4} D_{-a-1}(x) = M_a(x) / Γ(a+1)`. `M_a` is
//! evaluated in log form around the maximiser of its integrand, so
//! `x = -40` (where `D` itself is of size `e^{400}`) is unremarkable.

use crate::error::{Error, Result};
use crate::logscaled::LogScaled;
use crate::quadrature::Integrator;
use crate::real::Real;

use super::gamma::log_gamma;

/// Log-drop below the peak at which the integrand is truncated.
const DROP: f64 = 50.0;

fn default_integrator<T: Real>() -> Integrator<T> {
    Integrator::new(T::lit(1e-13))
}

/// Location of the interior maximum of `t^a e^{-(t+x)²/2}`, if any.
fn peak<T: Real>(a: T, x: T) -> Option<T> {
    let zero = T::zero();
    let disc = x * x + T::lit(4.0) * a;
    if a > zero {
        let s = disc.sqrt();
        Some(if x >= zero { T::lit(2.0) * a / (x + s) } else { (s - x) * T::lit(0.5) })
    } else if x < zero && disc > zero {
        let t = (disc.sqrt() - x) * T::lit(0.5);
        (t > zero).then_some(t)
    } else {
        None
    }
}

/// `ln M_a(x)` together with the quadrature error estimate (relative).
pub fn ln_shifted_moment_with<T: Real>(a: T, x: T, quad: &Integrator<T>) -> Result<(T, T)> {
    if !(a > -T::one()) {
        return Err(Error::domain("scaled_pcf", format!("order parameter a = {a:e} must exceed -1")));
    }
    if !x.is_finite() {
        return Err(Error::domain("scaled_pcf", "x must be finite"));
    }
    let half = T::lit(0.5);
    let psi = |t: T| a * t.ln() - (t + x) * (t + x) * half;
    let drop = T::lit(DROP);

    let (reference, center, sigma) = match peak(a, x) {
        Some(ts) => {
            let curv = T::one() - a / (ts * ts);
            let sigma = if curv > T::zero() { curv.sqrt().recip() } else { T::one() };
            (psi(ts), ts, sigma.min(ts.max(T::lit(1e-3)) * T::lit(4.0)))
        }
        None => {
            let rate = x.max(T::one());
            (-(x * x) * half, T::zero(), rate.recip())
        }
    };
    // smooth part of the log integrand relative to the reference
    let rel = |t: T| psi(t) - reference;

    // upper cutoff
    let mut step = sigma;
    let mut hi = center + step;
    while rel(hi) > -drop {
        step = step * T::lit(2.0);
        hi = center + step;
    }
    let mut lo_b = center + step * half;
    for _ in 0..12 {
        let mid = (lo_b + hi) * half;
        if rel(mid) > -drop {
            lo_b = mid;
        } else {
            hi = mid;
        }
    }

    // lower cutoff, only when the peak sits well inside (0, ∞)
    let mut start = T::zero();
    if center > T::zero() {
        let mut step = sigma;
        loop {
            let t = center - step;
            if t <= T::zero() {
                break;
            }
            if rel(t) < -drop {
                // the part below t is negligible only if the endpoint region is too
                let endpoint = -(x * x) * half - reference + (a + T::one()) * t.ln()
                    - (a + T::one()).ln();
                if endpoint < -drop {
                    start = t;
                }
                break;
            }
            step = step * T::lit(2.0);
        }
    }

    let mut points = vec![start];
    let mut k = T::lit(0.5);
    while k < T::lit(64.0) {
        for p in [center - k * sigma, center + k * sigma] {
            if p > start && p < hi {
                points.push(p);
            }
        }
        k = k * T::lit(2.0);
    }
    if center > start && center < hi {
        points.push(center);
    }
    points.push(hi);
    points.sort_by(|p, q| p.partial_cmp(q).unwrap());
    points.dedup();

    let mut total = T::zero();
    let mut err = T::zero();
    let mut smooth_from = 0;
    if start == T::zero() && a < T::zero() {
        // t^a is handled by substitution on the first panel
        let r = quad.integrate_power_endpoint(
            |t: T| (-(t + x) * (t + x) * half - reference).exp(),
            T::zero(),
            points[1],
            a,
        )?;
        total = total + r.value;
        err = err + r.error;
        smooth_from = 1;
    }
    if points.len() - smooth_from >= 2 {
        let r = quad.integrate(|t: T| rel(t).exp(), &points[smooth_from..])?;
        total = total + r.value;
        err = err + r.error;
    }
    if !(total > T::zero()) {
        return Err(Error::Quadrature { achieved: f64::NAN, target: quad.rel_tol.as_f64(), panels: 0 });
    }
    Ok((reference + total.ln(), err / total))
}

/// `ln M_a(x)` with the default tolerance (`1e-13` relative).
pub fn ln_shifted_moment<T: Real>(a: T, x: T) -> Result<T> {
    ln_shifted_moment_with(a, x, &default_integrator()).map(|r| r.0)
}

/// `e^{-x²/4} D_{-a-1}(x)`, strictly positive for real `x`.
pub fn scaled_pcf<T: Real>(a: T, x: T) -> Result<LogScaled<T>> {
    scaled_pcf_with(a, x, &default_integrator())
}

pub fn scaled_pcf_with<T: Real>(a: T, x: T, quad: &Integrator<T>) -> Result<LogScaled<T>> {
    let (lm, _) = ln_shifted_moment_with(a, x, quad)?;
    Ok(LogScaled::from_log(lm - log_gamma(a + T::one())?))
}

/// `e^{-x²/4} D_{-a}(x)` via `D_{-a} = (a+1) D_{-a-2} + x D_{-a-1}`.
///
/// Defined this way for all `a > -1`, including `a ∈ (-1, 0]` where the
/// integral representation of `D_{-a}` does not apply. The result may be
/// negative.
pub fn scaled_pcf_shift<T: Real>(a: T, x: T) -> Result<LogScaled<T>> {
    scaled_pcf_shift_with(a, x, &default_integrator())
}

pub fn scaled_pcf_shift_with<T: Real>(a: T, x: T, quad: &Integrator<T>) -> Result<LogScaled<T>> {
    let upper = scaled_pcf_with(a + T::one(), x, quad)?.mul_real(a + T::one());
    let lower = scaled_pcf_with(a, x, quad)?.mul_real(x);
    Ok(upper + lower)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::specialfn::erfc::erfc;

    fn sqrt_half_pi() -> f64 {
        (std::f64::consts::PI / 2.0).sqrt()
    }

    #[test]
    fn order_zero_closed_form() {
        // e^{-x²/4} D_{-1}(x) = √(π/2) erfc(x/√2)
        for x in [-2.0_f64, 0.0, 1.0, 3.0] {
            let v = scaled_pcf(0.0, x).unwrap().value();
            let want = sqrt_half_pi() * erfc(x / 2f64.sqrt());
            assert!(((v - want) / want).abs() < 1e-13, "x = {x}: {v} vs {want}");
        }
    }

    #[test]
    fn order_one_at_origin() {
        let v = scaled_pcf(1.0_f64, 0.0).unwrap().value();
        assert!((v - 1.0).abs() < 1e-13);
    }

    #[test]
    fn extreme_arguments_do_not_overflow() {
        for a in [-0.9_f64, -0.5, 0.0, 0.3, 1.25, 4.0] {
            let neg = scaled_pcf(a, -40.0).unwrap();
            let pos = scaled_pcf(a, 40.0).unwrap();
            assert!(neg.log_mag.is_finite() && pos.log_mag.is_finite());
            assert_eq!(neg.sign, 1);
            assert_eq!(pos.sign, 1);
            // M_a(-x) ~ √(2π) x^a for large x
            let lead = (2.0 * std::f64::consts::PI).sqrt().ln() + a * 40f64.ln();
            let got = neg.log_mag + log_gamma(a + 1.0).unwrap();
            assert!((got - lead).abs() < 1e-3 * a.abs().max(0.1), "a = {a}");
        }
    }

    #[test]
    fn large_positive_argument_matches_laplace_endpoint() {
        // M_a(x) ~ e^{-x²/2} Γ(a+1) / x^{a+1} (1 - (a+1)(a+2)/x² + ...)
        for a in [-0.5_f64, 0.0, 0.7, 2.0] {
            let x = 60.0_f64;
            let got = ln_shifted_moment(a, x).unwrap();
            let approx = -x * x / 2.0 + log_gamma(a + 1.0).unwrap() - (a + 1.0) * x.ln()
                + (-(a + 1.0) * (a + 2.0) / (2.0 * x * x)).ln_1p();
            assert!((got - approx).abs() < 1e-5, "a = {a}: {got} vs {approx}");
        }
    }

    #[test]
    fn shift_at_order_zero_is_gaussian() {
        for x in [-3.0_f64, -0.5, 0.0, 0.7, 2.5] {
            let v = scaled_pcf_shift(0.0, x).unwrap().value();
            let want = (-x * x / 2.0).exp();
            assert!(((v - want) / want).abs() < 1e-11, "x = {x}: {v} vs {want}");
        }
    }

    #[test]
    fn shift_matches_direct_quadrature_for_positive_order() {
        // for a > 0, e^{-x²/4} D_{-a}(x) = M_{a-1}(x) / Γ(a)
        for a in [0.4_f64, 1.0, 1.25, 3.0] {
            for x in [-6.0_f64, -1.0, 0.0, 2.0, 7.0] {
                let s = scaled_pcf_shift(a, x).unwrap();
                let direct = scaled_pcf(a - 1.0, x).unwrap();
                assert_eq!(s.sign, 1);
                assert!((s.log_mag - direct.log_mag).abs() < 1e-10, "a = {a}, x = {x}");
            }
        }
    }

    #[test]
    fn shift_changes_sign_for_negative_order() {
        // D_{1/2}(x) has a zero on the negative axis
        let left = scaled_pcf_shift(-0.5_f64, -3.0).unwrap();
        let right = scaled_pcf_shift(-0.5_f64, 3.0).unwrap();
        assert_eq!(right.sign, 1);
        assert_eq!(left.sign, -1);
    }

    #[test]
    fn rejects_order_at_or_below_minus_one() {
        assert!(scaled_pcf(-1.0_f64, 0.0).is_err());
    }

    #[test]
    fn f32_smoke() {
        let v = scaled_pcf(0.0_f32, 0.0).unwrap().value();
        assert!((v - 1.2533141_f32).abs() < 1e-5);
    }

    #[test]
    fn shifted_moment_reference_values() {
        // ln(Γ(a+1) e^{-x²/4} D_{-a-1}(x)) from an arbitrary-precision reference
        let cases: [(f64, f64, f64); 35] = [
            (-0.9, -40.0, -2.4005177965348407511),
            (-0.9, -8.0, -0.93865639867893663543),
            (-0.9, -1.5, 1.5620502585897745926),
            (-0.9, 0.0, 2.3103893795197830013),
            (-0.9, 2.0, 0.17288720748136188195),
            (-0.9, 8.0, -29.956070475122274155),
            (-0.9, 40.0, -798.11620963437690554),
            (-0.5, -40.0, -0.92526652512530206924),
            (-0.5, -8.0, -0.11472664063502914768),
            (-0.5, -1.5, 0.83215346732341234065),
            (-0.5, 0.0, 0.76816213927811847531),
            (-0.5, 2.0, -1.8422511428028579046),
            (-0.5, 8.0, -32.473042885566029608),
            (-0.5, 40.0, -801.27230886691592473),
            (0.3, -40.0, 2.0255366951314014806),
            (0.3, -8.0, 1.54109811272092457),
            (0.3, -1.5, 0.9578031494178403706),
            (0.3, 0.0, 0.08295067472392203221),
            (0.3, 2.0, -3.2568738563319518124),
            (0.3, 8.0, -34.833863691475104748),
            (0.3, 40.0, -804.90465084521481339),
            (1.25, -40.0, 5.530135522375794316),
            (1.25, -8.0, 3.520691732443466121),
            (1.25, -1.5, 1.5128968567932000464),
            (1.25, 0.0, 0.026620213443953580746),
            (1.25, 2.0, -3.9868648153143669004),
            (1.25, 8.0, -36.607971846466942258),
            (1.25, 40.0, -808.17738688051473064),
            (3.0, -40.0, 11.987450139928161998),
            (3.0, -8.0, 7.2030726942754747297),
            (3.0, -1.5, 2.9857181337248212828),
            (3.0, 0.0, 0.69314718055994530942),
            (3.0, 2.0, -4.2943115139628820075),
            (3.0, 8.0, -38.670555975569819948),
            (3.0, 40.0, -812.969986994412823),
        ];
        for (a, x, want) in cases {
            let got = ln_shifted_moment(a, x).unwrap();
            assert!((got - want).abs() <= 2e-13 * want.abs().max(1.0), "a = {a}, x = {x}: {got} vs {want}");
        }
    }
}
