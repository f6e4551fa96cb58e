//! Coefficients of `ln E_{n,u,a} ≈ C1 n + C2 √n + C3`.
//!
//! Two independent code paths: the general one built on `ln H_{a,u}` and the
//! counting one (`a = 0`) built on `F(t, s)` directly. They must agree at
//! `a = 0`.

use num_complex::Complex;

use crate::error::{Error, Result};
use crate::logscaled::ln_1p_complex;
use crate::potential::DropletGeometry;
use crate::quadrature::Integrator;
use crate::real::Real;
use crate::specialfn::pcf::ln_shifted_moment_with;
use crate::specialfn::{f_charlier, g_charlier, log_h_tail_coefficients, KernelConfig, SingularWeightParams};

/// Cutoff and tolerances for the regularized `x`-integrals.
#[derive(Debug, Clone, Copy)]
pub struct RegularizationConfig<T> {
    /// `X` in `∫_{-X}^{X}`.
    pub x_cutoff: T,
    /// Number of `x^{-2k}` orders in the analytic tail correction.
    pub tail_terms: usize,
    pub x_rel_tol: T,
    pub radial_rel_tol: T,
    pub kernel: KernelConfig<T>,
}

impl<T: Real> Default for RegularizationConfig<T> {
    fn default() -> Self {
        Self {
            x_cutoff: T::lit(30.0),
            tail_terms: 3,
            x_rel_tol: T::lit(1e-11),
            radial_rel_tol: T::lit(1e-13),
            kernel: KernelConfig::default(),
        }
    }
}

impl<T: Real> RegularizationConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.x_cutoff >= T::lit(10.0)) {
            return Err(Error::Config(format!("x_cutoff = {:e} below 10", self.x_cutoff)));
        }
        if self.tail_terms == 0 {
            return Err(Error::Config("tail_terms must be positive".into()));
        }
        Ok(())
    }

    fn x_integrator(&self) -> Integrator<T> {
        Integrator::new(self.x_rel_tol).with_abs_tol(T::lit(1e-12)).with_max_panels(4000)
    }

    fn radial_integrator(&self) -> Integrator<T> {
        Integrator::new(self.radial_rel_tol).with_abs_tol(T::lit(1e-15)).with_max_panels(4000)
    }
}

/// Which formula produced a coefficient set.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CoefficientKind {
    Counting,
    General,
    MittagLeffler,
}

#[derive(Debug, Clone, Copy)]
pub struct ExpansionCoefficients<T> {
    pub c1: Complex<T>,
    pub c2: Complex<T>,
    pub c3: Complex<T>,
    pub tag: CoefficientKind,
    pub params: SingularWeightParams<T>,
}

/// `C1 n + C2 √n + C3`.
pub fn expansion_eval<T: Real>(coeffs: &ExpansionCoefficients<T>, n: usize) -> Complex<T> {
    let nf = T::lit(n as f64);
    coeffs.c1 * nf + coeffs.c2 * nf.sqrt() + coeffs.c3
}

fn check_rho<T: Real>(geom: &DropletGeometry<T>, params: &SingularWeightParams<T>) -> Result<()> {
    params.validate()?;
    if !(params.rho < geom.r1) {
        return Err(Error::domain("asymptotics", format!("rho = {:e} must lie below r1 = {:e}", params.rho, geom.r1)));
    }
    Ok(())
}

/// `∫_lo^hi ln|r - c| w(r) dr` with `c` an endpoint, by subtracting `w(c)`.
fn log_endpoint_integral<T: Real>(
    w: &impl Fn(T) -> T,
    c: T,
    other: T,
    quad: &Integrator<T>,
) -> Result<T> {
    let d = (other - c).abs();
    if d == T::zero() {
        return Ok(T::zero());
    }
    let wc = w(c);
    let dir = if other > c { T::one() } else { -T::one() };
    let body = quad.integrate(|t: T| t.ln() * (w(c + dir * t) - wc), &[T::zero(), d])?.value;
    Ok(body + wc * (d * d.ln() - d))
}

/// `∫_0^{r1} ln|r - ρ| dσ_Q`, radially `∫ ln|r - ρ| 2rΔQ(r) dr`.
pub fn log_distance_moment<T: Real>(geom: &DropletGeometry<T>, rho: T, reg: &RegularizationConfig<T>) -> Result<T> {
    let model = &geom.model;
    let w = |r: T| T::lit(2.0) * r * model.delta_q(r).unwrap_or(T::nan());
    let quad = reg.radial_integrator();
    Ok(log_endpoint_integral(&w, rho, T::zero(), &quad)? + log_endpoint_integral(&w, rho, geom.r1, &quad)?)
}

/// `C1(u, a) = u τ_ρ + a ∫ ln|r - ρ| dσ_Q`.
pub fn c1_general<T: Real>(
    geom: &DropletGeometry<T>,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<Complex<T>> {
    check_rho(geom, params)?;
    let tau = geom.tau_rho(params.rho)?;
    let root = if params.a == T::zero() { T::zero() } else { params.a * log_distance_moment(geom, params.rho, reg)? };
    Ok(params.u * tau + root)
}

/// Folded kernel at `x ≥ 0`: `(ln H(x) + ln H(-x) - u - 2a ln⁺x, ln H(x) - ln H(-x) + u)`.
///
/// With `r = ln M_a(x) - ln M_a(-x) ≤ 0` both are assembled from
/// `ln(1 + e^{r ± u})`, which avoids cancelling the `a ln x` growth.
fn folded_kernel<T: Real>(params: &SingularWeightParams<T>, x: T, cfg: &KernelConfig<T>) -> Result<(Complex<T>, Complex<T>)> {
    let (lp, _) = ln_shifted_moment_with(params.a, x, &cfg.integrator)?;
    let (lm, _) = ln_shifted_moment_with(params.a, -x, &cfg.integrator)?;
    let r = lp - lm;
    let u = params.u;
    let plus = ln_1p_complex((u + r).exp());
    let minus = ln_1p_complex((-u + r).exp());
    let c = T::lit(0.918938533204672741780329736406);
    let log_part = if x > T::one() { params.a * x.ln() } else { T::zero() };
    let even = plus + minus + T::lit(2.0) * (lm - c - log_part);
    Ok((even, plus - minus))
}

fn check_kernel_u<T: Real>(params: &SingularWeightParams<T>, cfg: &KernelConfig<T>) -> Result<()> {
    if params.u.im.abs() > cfg.delta {
        return Err(Error::branch(
            "asymptotics",
            format!("|Im u| = {:e} exceeds delta = {:e}", params.u.im.abs(), cfg.delta),
        ));
    }
    Ok(())
}

fn x_breakpoints<T: Real>(x_cut: T) -> Vec<T> {
    let mut pts = vec![T::zero()];
    for b in [1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0, 128.0] {
        if T::lit(b) < x_cut {
            pts.push(T::lit(b));
        }
    }
    pts.push(x_cut);
    pts
}

/// `∫_{-∞}^{∞} (ln H_{a,u}(x) - a ln|x| - u 1{x<0}) dx`, folded onto
/// `[0, X]` plus the analytic tail beyond `X`.
pub fn c2_integral<T: Real>(params: &SingularWeightParams<T>, reg: &RegularizationConfig<T>) -> Result<Complex<T>> {
    reg.validate()?;
    params.validate()?;
    check_kernel_u(params, &reg.kernel)?;
    let (a, u) = (params.a, params.u);
    if a == T::zero() && u == Complex::new(T::zero(), T::zero()) {
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let x_cut = reg.x_cutoff;
    let two = T::lit(2.0);
    let mut failure = None;
    let integrand = |x: T| match folded_kernel(params, x, &reg.kernel) {
        Ok((even, _)) => even,
        Err(e) => {
            failure.get_or_insert(e);
            Complex::new(T::zero(), T::zero())
        }
    };
    let body = reg.x_integrator().integrate(integrand, &x_breakpoints(x_cut))?.value;
    if let Some(e) = failure {
        return Err(e);
    }
    // 2a ln x is subtracted on [1, X] only; over [0, 1] it integrates to -2a
    let mut total = body + two * a;
    let coeffs = log_h_tail_coefficients(a, reg.tail_terms);
    for (k, c) in coeffs.iter().enumerate() {
        let p = T::lit((2 * k + 1) as f64);
        total = total + two * *c * x_cut.powf(-p) / p;
    }
    Ok(total)
}

/// `C2(u, a) = ρ √ΔQ(ρ) ∫ (ln H_{a,u} - a ln|x| - u 1{x<0}) dx`.
pub fn c2_general<T: Real>(
    geom: &DropletGeometry<T>,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<Complex<T>> {
    check_rho(geom, params)?;
    let scale = params.rho * geom.model.delta_q(params.rho)?.sqrt();
    Ok(c2_integral(params, reg)? * scale)
}

/// `∫_{-∞}^{∞} [x(ln H_{a,u}(x) - u 1{x<0}) - a x ln|x| - a(a-1)x/(2(x²+1))] dx`.
///
/// The subtracted terms are odd and cancel under `x → -x`, so this is
/// `∫_0^∞ x (ln H(x) - ln H(-x) + u) dx`, whose integrand decays
/// exponentially; no tail correction is needed.
pub fn c3_integral<T: Real>(params: &SingularWeightParams<T>, reg: &RegularizationConfig<T>) -> Result<Complex<T>> {
    reg.validate()?;
    params.validate()?;
    check_kernel_u(params, &reg.kernel)?;
    if params.u == Complex::new(T::zero(), T::zero()) {
        // H_{a,0} is even in x
        return Ok(Complex::new(T::zero(), T::zero()));
    }
    let mut failure = None;
    let integrand = |x: T| match folded_kernel(params, x, &reg.kernel) {
        Ok((_, odd)) => odd * x,
        Err(e) => {
            failure.get_or_insert(e);
            Complex::new(T::zero(), T::zero())
        }
    };
    let v = reg.x_integrator().integrate(integrand, &x_breakpoints(reg.x_cutoff))?.value;
    match failure {
        Some(e) => Err(e),
        None => Ok(v),
    }
}

/// `g(x) = x ∂ΔQ(x) / ΔQ(x)`.
fn log_slope_fn<T: Real>(geom: &DropletGeometry<T>) -> impl Fn(T) -> T + '_ {
    move |x: T| {
        if x == T::zero() {
            T::zero()
        } else {
            geom.model.log_slope(x)
        }
    }
}

/// Half-width of the window around `ρ` where the difference quotient is
/// replaced by its Taylor polynomial.
pub const TAYLOR_WINDOW: f64 = 1e-3;

/// `(g(x) - g(ρ)) / (x - ρ)` with a three-term Taylor fallback near `ρ`.
pub fn radial_difference_quotient<T: Real>(geom: &DropletGeometry<T>, rho: T) -> impl Fn(T) -> T + '_ {
    let g = log_slope_fn(geom);
    let g0 = g(rho);
    // derivatives of g at ρ by five-point stencils
    let s = T::lit(2e-3).min(rho * T::lit(0.25)).min((geom.r1 - rho) * T::lit(0.25));
    let (gm2, gm1, gp1, gp2) = (g(rho - s - s), g(rho - s), g(rho + s), g(rho + s + s));
    let twelve = T::lit(12.0);
    let d1 = (gm2 - T::lit(8.0) * gm1 + T::lit(8.0) * gp1 - gp2) / (twelve * s);
    let d2 = (-gm2 + T::lit(16.0) * gm1 - T::lit(30.0) * g0 + T::lit(16.0) * gp1 - gp2) / (twelve * s * s);
    let d3 = (-gm2 + T::lit(2.0) * gm1 - T::lit(2.0) * gp1 + gp2) / (T::lit(2.0) * s * s * s);
    let window = T::lit(TAYLOR_WINDOW);
    move |x: T| {
        let h = x - rho;
        if h.abs() < window {
            d1 + h * (d2 * T::lit(0.5) + h * d3 / T::lit(6.0))
        } else {
            (g(x) - g0) / h
        }
    }
}

/// The eight terms of `C3(u, a)`, in display order.
#[derive(Debug, Clone, Copy)]
pub struct C3Terms<T> {
    /// `-(a/2) ln(r1/ρ - 1)`
    pub log_ratio: Complex<T>,
    /// `-(a(a-1)/4) r1/(r1 - ρ)`
    pub boundary: Complex<T>,
    /// `-(a/4) ∫_0^{r1} (g(x) - g(ρ))/(x - ρ) dx`
    pub principal: Complex<T>,
    /// `(a/4)(4α + a + 2 - κ) ln(r1/ρ - 1)`
    pub log_ratio_weighted: Complex<T>,
    /// `-(α + 1/2) u`
    pub charge: Complex<T>,
    /// `-(a/12)(1 - κ) u`
    pub mixed: Complex<T>,
    /// `(1/6)(2 + κ) u`
    pub jump: Complex<T>,
    /// `(1/6)(2 + κ) ∫ [...] dx`
    pub kernel: Complex<T>,
}

impl<T: Real> C3Terms<T> {
    pub fn total(&self) -> Complex<T> {
        self.log_ratio
            + self.boundary
            + self.principal
            + self.log_ratio_weighted
            + self.charge
            + self.mixed
            + self.jump
            + self.kernel
    }
}

pub fn c3_general_terms<T: Real>(
    geom: &DropletGeometry<T>,
    alpha: T,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<C3Terms<T>> {
    check_rho(geom, params)?;
    let (u, a, rho, r1) = (params.u, params.a, params.rho, geom.r1);
    let kappa = geom.model.log_slope(rho);
    let lr = (r1 / rho - T::one()).ln();
    let c = |x: T| Complex::new(x, T::zero());
    let quarter = T::lit(0.25);
    let principal = if a == T::zero() {
        T::zero()
    } else {
        let q = radial_difference_quotient(geom, rho);
        let pts = [T::zero(), rho, r1];
        reg.radial_integrator().integrate(q, &pts)?.value
    };
    let two_kappa = T::lit(2.0) + kappa;
    let kernel = c3_integral(params, reg)? * (two_kappa / T::lit(6.0));
    Ok(C3Terms {
        log_ratio: c(-a * T::lit(0.5) * lr),
        boundary: c(-a * (a - T::one()) * quarter * r1 / (r1 - rho)),
        principal: c(-a * quarter * principal),
        log_ratio_weighted: c(a * quarter * (T::lit(4.0) * alpha + a + T::lit(2.0) - kappa) * lr),
        charge: u * -(alpha + T::lit(0.5)),
        mixed: u * (-a / T::lit(12.0) * (T::one() - kappa)),
        jump: u * (two_kappa / T::lit(6.0)),
        kernel,
    })
}

/// `C3(u, a)`.
pub fn c3_general<T: Real>(
    geom: &DropletGeometry<T>,
    alpha: T,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<Complex<T>> {
    Ok(c3_general_terms(geom, alpha, params, reg)?.total())
}

/// All three general coefficients.
pub fn general_coeffs<T: Real>(
    geom: &DropletGeometry<T>,
    alpha: T,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<ExpansionCoefficients<T>> {
    Ok(ExpansionCoefficients {
        c1: c1_general(geom, params, reg)?,
        c2: c2_general(geom, params, reg)?,
        c3: c3_general(geom, alpha, params, reg)?,
        tag: CoefficientKind::General,
        params: *params,
    })
}

/// Upper limit for integrals of `F`, beyond which `erfc` underflows.
const F_CUTOFF: f64 = 12.0;

fn f_breakpoints<T: Real>() -> [T; 6] {
    [T::zero(), T::lit(1.0), T::lit(2.0), T::lit(4.0), T::lit(8.0), T::lit(F_CUTOFF)]
}

/// `∫_0^∞ (F(t, e^u) + F(t, e^{-u})) dt`.
pub fn charlier_even_integral<T: Real>(u: Complex<T>, quad: &Integrator<T>) -> Result<Complex<T>> {
    let (sp, sm) = (u.exp(), (-u).exp());
    let mut failure = None;
    let v = quad
        .integrate(
            |t: T| match (f_charlier(t, sp), f_charlier(t, sm)) {
                (Ok(a), Ok(b)) => a + b,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    Complex::new(T::zero(), T::zero())
                }
            },
            &f_breakpoints(),
        )?
        .value;
    failure.map_or(Ok(v), Err)
}

/// `∫_0^∞ t (F(t, e^u) - F(t, e^{-u})) dt`.
pub fn charlier_odd_moment<T: Real>(u: Complex<T>, quad: &Integrator<T>) -> Result<Complex<T>> {
    let (sp, sm) = (u.exp(), (-u).exp());
    let mut failure = None;
    let v = quad
        .integrate(
            |t: T| match (f_charlier(t, sp), f_charlier(t, sm)) {
                (Ok(a), Ok(b)) => (a - b) * t,
                (Err(e), _) | (_, Err(e)) => {
                    failure.get_or_insert(e);
                    Complex::new(T::zero(), T::zero())
                }
            },
            &f_breakpoints(),
        )?
        .value;
    failure.map_or(Ok(v), Err)
}

/// Counting coefficients (`a = 0`) computed from `F` directly.
pub fn counting_coeffs<T: Real>(
    geom: &DropletGeometry<T>,
    u: Complex<T>,
    rho: T,
    alpha: T,
    reg: &RegularizationConfig<T>,
) -> Result<ExpansionCoefficients<T>> {
    let params = SingularWeightParams::with_complex_u(u, T::zero(), rho)?;
    check_rho(geom, &params)?;
    check_kernel_u(&params, &reg.kernel)?;
    let quad = reg.x_integrator();
    let dq = geom.model.delta_q(rho)?;
    let kappa = geom.model.log_slope(rho);
    let c1 = u * geom.tau_rho(rho)?;
    let c2 = charlier_even_integral(u, &quad)? * (rho * (T::lit(2.0) * dq).sqrt());
    let two_kappa = T::lit(2.0) + kappa;
    let c3 = u * (-(alpha + T::lit(0.5)) + two_kappa / T::lit(6.0))
        + charlier_odd_moment(u, &quad)? * (two_kappa / T::lit(3.0));
    Ok(ExpansionCoefficients { c1, c2, c3, tag: CoefficientKind::Counting, params })
}

/// `C3 = -(1/2 + α) u + (b/3) u + (2b/3) ∫_0^∞ t (F(t, e^u) - F(t, e^{-u})) dt`
/// for `Q(z) = |z|^{2b}`.
pub fn mittag_leffler_c3<T: Real>(u: Complex<T>, b: T, alpha: T) -> Result<Complex<T>> {
    if !(b > T::zero()) {
        return Err(Error::domain("mittag_leffler_c3", format!("b = {b:e} must be positive")));
    }
    let quad = Integrator::new(T::lit(1e-13)).with_abs_tol(T::lit(1e-15));
    let third = T::lit(1.0 / 3.0);
    Ok(u * (-(T::lit(0.5) + alpha) + b * third) + charlier_odd_moment(u, &quad)? * (T::lit(2.0) * b * third))
}

/// Both sides of
/// `∫_{-∞}^{∞} G(t, e^u)(5t² - 1)/3 dt = u/3 - (10/3) ∫_0^∞ t (F(t, e^u) - F(t, e^{-u})) dt`.
pub fn ibp_identity_sides<T: Real>(u: T) -> Result<(Complex<T>, Complex<T>)> {
    let quad = Integrator::new(T::lit(1e-13)).with_abs_tol(T::lit(1e-15));
    let s = Complex::new(u.exp(), T::zero());
    let cut = T::lit(F_CUTOFF);
    let pts = [-cut, T::lit(-4.0), T::lit(-2.0), T::lit(-1.0), T::zero(), T::one(), T::lit(2.0), T::lit(4.0), cut];
    let mut failure = None;
    let lhs = quad
        .integrate(
            |t: T| match g_charlier(t, s) {
                Ok(g) => g * ((T::lit(5.0) * t * t - T::one()) / T::lit(3.0)),
                Err(e) => {
                    failure.get_or_insert(e);
                    Complex::new(T::zero(), T::zero())
                }
            },
            &pts,
        )?
        .value;
    if let Some(e) = failure {
        return Err(e);
    }
    let uc = Complex::new(u, T::zero());
    let rhs = uc / T::lit(3.0) - charlier_odd_moment(uc, &quad)? * (T::lit(10.0) / T::lit(3.0));
    Ok((lhs, rhs))
}

/// `|lhs - rhs|` of [`ibp_identity_sides`].
pub fn ibp_identity_check<T: Real>(u: T) -> Result<T> {
    let (l, r) = ibp_identity_sides(u)?;
    Ok((l - r).norm())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn geom(fig: bool) -> DropletGeometry<f64> {
        let m = if fig { PotentialModel::figure1() } else { PotentialModel::ginibre() };
        DropletGeometry::solve(&m).unwrap()
    }

    fn p(u: f64, a: f64, rho: f64) -> SingularWeightParams<f64> {
        SingularWeightParams::new(u, a, rho).unwrap()
    }

    #[test]
    fn trivial_weight_annihilates() {
        let reg = RegularizationConfig::default();
        for fig in [false, true] {
            let g = geom(fig);
            let c = general_coeffs(&g, 0.667, &p(0.0, 0.0, 0.5 * g.r1), &reg).unwrap();
            assert_eq!((c.c1.norm(), c.c2.norm(), c.c3.norm()), (0.0, 0.0, 0.0));
            let k = counting_coeffs(&g, Complex::new(0.0, 0.0), 0.5 * g.r1, 0.667, &reg).unwrap();
            assert!(k.c1.norm() + k.c2.norm() + k.c3.norm() < 1e-15);
        }
    }

    #[test]
    fn c1_examples() {
        let reg = RegularizationConfig::default();
        let g = geom(false);
        assert!((c1_general(&g, &p(0.5, 0.0, 0.7), &reg).unwrap().re - 0.245).abs() < 1e-15);
        // Ginibre: ∫_0^1 ln|r - ρ| 2r dr
        //   = ρ² ln ρ - 3ρ²/2 + (1 - ρ²) ln(1 - ρ) - 2ρ(1 - ρ) - (1 - ρ)²/2
        let rho: f64 = 0.7;
        let want = rho * rho * rho.ln() - 1.5 * rho * rho + (1.0 - rho * rho) * (1.0 - rho).ln()
            - 2.0 * rho * (1.0 - rho)
            - (1.0 - rho).powi(2) / 2.0;
        let got = c1_general(&g, &p(0.0, 1.0, rho), &reg).unwrap().re;
        assert!((got - want).abs() < 1e-13, "{got} vs {want}");
        assert!(c1_general(&g, &p(0.0, 1.0, 1.2), &reg).is_err());
    }

    #[test]
    fn ginibre_c1_counts_area() {
        let reg = RegularizationConfig::default();
        let g = geom(false);
        for u in [-1.0, 0.3, 2.0] {
            let k = counting_coeffs(&g, Complex::new(u, 0.0), 0.7, 0.0, &reg).unwrap();
            assert!((k.c1.re - 0.49 * u).abs() < 1e-15);
        }
    }

    #[test]
    fn counting_c2_symmetric_and_general_agrees() {
        let reg = RegularizationConfig::default();
        let g = geom(true);
        let rho = 0.71 * g.r1;
        for u in [0.4, 1.56] {
            let plus = counting_coeffs(&g, Complex::new(u, 0.0), rho, 0.0, &reg).unwrap();
            let minus = counting_coeffs(&g, Complex::new(-u, 0.0), rho, 0.0, &reg).unwrap();
            assert!((plus.c2 - minus.c2).norm() < 1e-13);
            let gp = c2_general(&g, &p(u, 0.0, rho), &reg).unwrap();
            let gm = c2_general(&g, &p(-u, 0.0, rho), &reg).unwrap();
            assert!((gp - plus.c2).norm() < 1e-9, "{gp} vs {}", plus.c2);
            assert!((gp - gm).norm() < 1e-9);
            let g3 = c3_general(&g, 0.667, &p(u, 0.0, rho), &reg).unwrap();
            let k3 = counting_coeffs(&g, Complex::new(u, 0.0), rho, 0.667, &reg).unwrap().c3;
            assert!((g3 - k3).norm() < 1e-9, "{g3} vs {k3}");
        }
    }

    #[test]
    fn mittag_leffler_ginibre() {
        let reg = RegularizationConfig::default();
        let g = geom(false);
        for u in [-0.8, 1.2] {
            let k = counting_coeffs(&g, Complex::new(u, 0.0), 0.6, 0.3, &reg).unwrap();
            let ml = mittag_leffler_c3(Complex::new(u, 0.0), 1.0, 0.3).unwrap();
            assert!((k.c3 - ml).norm() < 1e-12);
            assert!((k.c1.re - u * 0.36).abs() < 1e-15);
        }
        assert!(mittag_leffler_c3(Complex::new(1.0, 0.0), 0.0, 0.0).is_err());
    }

    #[test]
    fn integration_by_parts_identity() {
        for u in [-2.0, 0.5, 1.56] {
            assert!(ibp_identity_check(u).unwrap() < 1e-12);
        }
        let (l, r) = ibp_identity_sides(0.0).unwrap();
        assert!(l.norm() < 1e-15 && r.norm() < 1e-15);
    }

    #[test]
    fn cutoff_doubling() {
        let g = geom(true);
        let rho = 0.71 * g.r1;
        let short = RegularizationConfig::default();
        let long = RegularizationConfig { x_cutoff: 60.0, ..short };
        for (u, a) in [(1.56, 1.25), (0.5, 2.5), (-1.0, -0.5)] {
            let pp = p(u, a, rho);
            let d2 = (c2_general(&g, &pp, &short).unwrap() - c2_general(&g, &pp, &long).unwrap()).norm();
            let d3 = (c3_general(&g, 0.667, &pp, &short).unwrap() - c3_general(&g, 0.667, &pp, &long).unwrap()).norm();
            assert!(d2 <= 1e-8 && d3 <= 1e-8, "a = {a}: {d2:e} {d3:e}");
        }
    }

    #[test]
    fn difference_quotient_is_continuous() {
        let g = geom(true);
        let rho = 0.71 * g.r1;
        let q = radial_difference_quotient(&g, rho);
        let w = TAYLOR_WINDOW;
        for side in [-1.0, 1.0] {
            let inner = q(rho + side * w * (1.0 - 1e-9));
            let outer = q(rho + side * w * (1.0 + 1e-9));
            assert!((inner - outer).abs() < 1e-9, "{inner} {outer}");
        }
        let slope = (q(rho + 1e-4) - q(rho - 1e-4)) / 2e-4;
        assert!((q(rho + 1e-5) - q(rho) - slope * 1e-5).abs() < 1e-9);
        // exact: g = c x / (b + c x), (g(x) - g(ρ))/(x - ρ) = b c / ((b + c x)(b + c ρ))
        let (b, c) = (0.2, 0.527625);
        for x in [0.1, rho - 5e-4, rho, rho + 9e-4, 1.1] {
            let want = b * c / ((b + c * x) * (b + c * rho));
            assert!((q(x) - want).abs() < 1e-9, "x = {x}");
        }
    }

    #[test]
    fn ginibre_principal_part_vanishes() {
        let reg = RegularizationConfig::default();
        let t = c3_general_terms(&geom(false), 0.0, &p(0.0, 1.25, 0.5), &reg).unwrap();
        assert_eq!(t.principal.norm(), 0.0);
        // u = 0: only the a-terms survive, kernel term vanishes by evenness
        assert_eq!(t.kernel.norm(), 0.0);
    }

    #[test]
    fn linearity_in_n() {
        let c = ExpansionCoefficients {
            c1: Complex::new(0.3, 0.1),
            c2: Complex::new(-0.7, 0.0),
            c3: Complex::new(0.2, 0.5),
            tag: CoefficientKind::General,
            params: p(0.0, 0.0, 0.5),
        };
        let n = 37;
        let d = expansion_eval(&c, 4 * n) - expansion_eval(&c, n);
        let want = c.c1 * (3.0 * n as f64) + c.c2 * (n as f64).sqrt();
        assert!((d - want).norm() < 1e-12);
        let zero = ExpansionCoefficients { c1: Complex::new(0.0, 0.0), c2: Complex::new(0.0, 0.0), c3: Complex::new(0.0, 0.0), ..c };
        assert_eq!(expansion_eval(&zero, 10).norm(), 0.0);
    }

    #[test]
    fn config_validation() {
        let reg = RegularizationConfig { x_cutoff: 5.0, ..Default::default() };
        assert!(c2_integral(&p(0.5, 1.0, 0.5), &reg).is_err());
        let g = geom(false);
        let bad = SingularWeightParams::with_complex_u(Complex::new(0.0, 0.9), 0.0, 0.5).unwrap();
        assert!(matches!(c2_general(&g, &bad, &RegularizationConfig::default()), Err(Error::Branch { .. })));
    }
}
