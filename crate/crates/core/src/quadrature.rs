//! Globally adaptive Gauss–Kronrod (10/21) quadrature on finite panels.
//!
//! The integrator works for real and complex integrands through
//! [`QuadValue`]. Callers supply an initial partition (breakpoints) that
//! places panel boundaries at kinks, jumps and peak locations; the
//! integrator then bisects the panel with the largest error estimate until
//! the global estimate meets `max(abs_tol, rel_tol * |I|)`.

use std::cmp::Ordering;
use std::collections::BinaryHeap;
use std::ops::{Add, Mul, Sub};

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::real::Real;

const XGK: [f64; 11] = [
    0.995657163025808080735527280689003,
    0.973906528517171720077964012084452,
    0.930157491355708226001207180059508,
    0.865063366688984510732096688423493,
    0.780817726586416897063717578345042,
    0.679409568299024406234327365114874,
    0.562757134668604683339000099272694,
    0.433395394129247190799265943165784,
    0.294392862701460198131126603103866,
    0.148874338981631210884826001129720,
    0.000000000000000000000000000000000,
];

const WGK: [f64; 11] = [
    0.011694638867371874278064396062192,
    0.032558162307964727478818972459390,
    0.054755896574351996031381300244580,
    0.075039674810919952767043140916190,
    0.093125454583697605535065465083366,
    0.109387158802297641899210590325805,
    0.123491976262065851077208643474262,
    0.134709217311473325928054001771707,
    0.142775938577060080797094273138717,
    0.147739104901338491374841515972068,
    0.149445554002916905664936468389821,
];

const WG: [f64; 5] = [
    0.066671344308688137593568809893332,
    0.149451349150580593145776339657697,
    0.219086362515982043995534934228163,
    0.269266719309996355091226921569469,
    0.295524224714752870173892994651338,
];

/// Values that can be integrated: reals and complex numbers.
pub trait QuadValue<T: Real>:
    Copy + Add<Output = Self> + Sub<Output = Self> + Mul<T, Output = Self> + Send + Sync
{
    fn zero() -> Self;
    fn norm(&self) -> T;
}

impl<T: Real> QuadValue<T> for T {
    fn zero() -> Self {
        T::zero()
    }
    fn norm(&self) -> T {
        self.abs()
    }
}

impl<T: Real> QuadValue<T> for Complex<T> {
    fn zero() -> Self {
        Complex::new(T::zero(), T::zero())
    }
    fn norm(&self) -> T {
        self.re.abs() + self.im.abs()
    }
}

#[derive(Debug, Clone, Copy)]
pub struct QuadResult<V, T> {
    pub value: V,
    pub error: T,
    pub panels: usize,
}

/// Tolerances and panel budget for [`Integrator`].
#[derive(Debug, Clone, Copy)]
pub struct Integrator<T> {
    pub rel_tol: T,
    pub abs_tol: T,
    pub max_panels: usize,
}

impl<T: Real> Default for Integrator<T> {
    fn default() -> Self {
        Self::new(T::lit(1e-12))
    }
}

struct Panel<V, T> {
    lo: T,
    hi: T,
    value: V,
    error: T,
    floor: T,
}

impl<V, T: Real> PartialEq for Panel<V, T> {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl<V, T: Real> Eq for Panel<V, T> {}
impl<V, T: Real> PartialOrd for Panel<V, T> {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl<V, T: Real> Ord for Panel<V, T> {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.partial_cmp(&other.error).unwrap_or(Ordering::Equal)
    }
}

impl<T: Real> Integrator<T> {
    pub fn new(rel_tol: T) -> Self {
        Self { rel_tol: rel_tol.max(T::tol_floor()), abs_tol: T::zero(), max_panels: 2000 }
    }

    pub fn with_abs_tol(mut self, abs_tol: T) -> Self {
        self.abs_tol = abs_tol;
        self
    }

    pub fn with_max_panels(mut self, max_panels: usize) -> Self {
        self.max_panels = max_panels;
        self
    }

    /// Integrates `f` over `[points[0], points[last]]` with an initial panel
    /// boundary at every entry of `points`, which must be nondecreasing.
    /// Zero-width panels are skipped.
    pub fn integrate<V, F>(&self, mut f: F, points: &[T]) -> Result<QuadResult<V, T>>
    where
        V: QuadValue<T>,
        F: FnMut(T) -> V,
    {
        let mut heap = BinaryHeap::new();
        for w in points.windows(2) {
            if w[1] > w[0] {
                heap.push(gk21(&mut f, w[0], w[1]));
            }
        }
        let mut panels = heap.len();
        loop {
            let (mut total, mut err, mut floor) = (V::zero(), T::zero(), T::zero());
            for p in heap.iter() {
                total = total + p.value;
                err = err + p.error;
                floor = floor + p.floor;
            }
            let target = self.abs_tol.max(self.rel_tol * total.norm());
            if err <= target || err <= floor * T::lit(2.0) {
                return Ok(QuadResult { value: total, error: err, panels });
            }
            if panels >= self.max_panels {
                return Err(Error::Quadrature {
                    achieved: err.as_f64(),
                    target: target.as_f64(),
                    panels,
                });
            }
            let worst = match heap.pop() {
                Some(p) => p,
                None => return Ok(QuadResult { value: total, error: err, panels }),
            };
            let mid = (worst.lo + worst.hi) * T::lit(0.5);
            if !(mid > worst.lo && mid < worst.hi) {
                // panel at floating point resolution; its error cannot shrink
                return Err(Error::Quadrature {
                    achieved: err.as_f64(),
                    target: target.as_f64(),
                    panels,
                });
            }
            heap.push(gk21(&mut f, worst.lo, mid));
            heap.push(gk21(&mut f, mid, worst.hi));
            panels += 1;
        }
    }

    /// `∫ |t - c|^exponent g(t) dt` over the panel between `c` and `c + w`
    /// (`w` may be negative). For `exponent < 0` the substitution
    /// `s = |t - c|^(1 + exponent)` removes the endpoint singularity.
    pub fn integrate_power_endpoint<V, F>(
        &self,
        mut g: F,
        c: T,
        w: T,
        exponent: T,
    ) -> Result<QuadResult<V, T>>
    where
        V: QuadValue<T>,
        F: FnMut(T) -> V,
    {
        if exponent <= -T::one() {
            return Err(Error::domain("integrate_power_endpoint", "exponent must exceed -1"));
        }
        let dir = if w < T::zero() { -T::one() } else { T::one() };
        let width = w.abs();
        if width == T::zero() {
            return Ok(QuadResult { value: V::zero(), error: T::zero(), panels: 0 });
        }
        if exponent < T::zero() {
            let p = T::one() + exponent;
            let inv = p.recip();
            let top = width.powf(p);
            let r = self.integrate(|s: T| g(c + dir * s.powf(inv)), &[T::zero(), top])?;
            Ok(QuadResult { value: r.value * inv, error: r.error * inv, panels: r.panels })
        } else if exponent == T::zero() {
            let r = self.integrate(|t: T| g(c + dir * t), &[T::zero(), width])?;
            Ok(r)
        } else {
            self.integrate(|t: T| g(c + dir * t) * t.powf(exponent), &[T::zero(), width])
        }
    }
}

fn gk21<V, T, F>(f: &mut F, lo: T, hi: T) -> Panel<V, T>
where
    T: Real,
    V: QuadValue<T>,
    F: FnMut(T) -> V,
{
    let center = (lo + hi) * T::lit(0.5);
    let half = (hi - lo) * T::lit(0.5);
    let fc = f(center);
    let mut res_k = fc * T::lit(WGK[10]);
    let mut res_g = V::zero();
    let mut res_abs = fc.norm() * T::lit(WGK[10]);
    let mut f1 = [V::zero(); 10];
    let mut f2 = [V::zero(); 10];
    for j in 0..10 {
        let x = half * T::lit(XGK[j]);
        let a = f(center - x);
        let b = f(center + x);
        f1[j] = a;
        f2[j] = b;
        let wk = T::lit(WGK[j]);
        res_k = res_k + (a + b) * wk;
        res_abs = res_abs + (a.norm() + b.norm()) * wk;
        if j % 2 == 1 {
            res_g = res_g + (a + b) * T::lit(WG[j / 2]);
        }
    }
    let mean = res_k * T::lit(0.5);
    let mut res_asc = (fc - mean).norm() * T::lit(WGK[10]);
    for j in 0..10 {
        res_asc = res_asc + ((f1[j] - mean).norm() + (f2[j] - mean).norm()) * T::lit(WGK[j]);
    }
    let abs_half = half.abs();
    let res_abs = res_abs * abs_half;
    let res_asc = res_asc * abs_half;
    let mut err = ((res_k - res_g) * half).norm();
    if res_asc != T::zero() && err != T::zero() {
        let scale = (T::lit(200.0) * err / res_asc).powf(T::lit(1.5));
        err = if scale < T::one() { res_asc * scale } else { res_asc };
    }
    let floor = T::lit(50.0) * T::epsilon() * res_abs;
    if floor > err {
        err = floor;
    }
    Panel { lo, hi, value: res_k * half, error: err, floor }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_is_exact() {
        let q = Integrator::<f64>::default();
        let r = q.integrate(|x: f64| x.powi(5) - 3.0 * x * x, &[0.0, 2.0]).unwrap();
        assert!((r.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
    }

    #[test]
    fn gaussian_on_wide_window() {
        let q = Integrator::<f64>::default();
        let r = q.integrate(|x: f64| (-x * x).exp(), &[-12.0, 0.0, 12.0]).unwrap();
        assert!((r.value - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn endpoint_singularity_substitution() {
        let q = Integrator::<f64>::new(1e-13);
        // ∫_0^1 t^{-1/2} e^{-t} dt = √π erf(1)
        let r = q.integrate_power_endpoint(|t: f64| (-t).exp(), 0.0, 1.0, -0.5).unwrap();
        let expected = std::f64::consts::PI.sqrt() * 0.8427007929497148693;
        assert!((r.value - expected).abs() < 1e-12, "{}", r.value);
        // mirrored side: ∫_{-1}^0 |t|^{-0.7} dt = 1/0.3
        let r = q.integrate_power_endpoint(|_t: f64| 1.0, 0.0, -1.0, -0.7).unwrap();
        assert!((r.value - 1.0 / 0.3).abs() < 1e-12);
    }

    #[test]
    fn log_singularity_converges() {
        let q = Integrator::<f64>::new(1e-12);
        let r = q.integrate(|x: f64| x.ln(), &[0.0, 1.0]).unwrap();
        assert!((r.value + 1.0).abs() < 1e-11);
    }

    #[test]
    fn complex_integrand() {
        let q = Integrator::<f64>::default();
        let r = q
            .integrate(|x: f64| Complex::new(x.cos(), x.sin()), &[0.0, std::f64::consts::PI])
            .unwrap();
        assert!(r.value.re.abs() < 1e-14 && (r.value.im - 2.0).abs() < 1e-14);
    }

    #[test]
    fn budget_exhaustion_reports_achieved_error() {
        let q = Integrator::<f64>::new(1e-14).with_max_panels(3);
        let err = q.integrate(|x: f64| (1.0 / x).sin(), &[1e-3, 1.0]).unwrap_err();
        assert!(matches!(err, Error::Quadrature { panels: 3, .. }));
    }
}
