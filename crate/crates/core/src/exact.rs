//! Exact finite-`n` moment generating function and partition function.
//!
//! For a rotation-invariant ensemble the `n`-fold integral factorizes into
//! one-dimensional radial integrals
//! `h_j = ∫_0^∞ 2 v^{2j+2α+1} e^{-n q(v)} dv`,
//! and `E_{n,u,a} = Π_j (e^u h_j^in + h_j^out) / h_j` where the in/out parts
//! carry the factor `|v - ρ|^a` on `[0, ρ]` and `[ρ, ∞)`.
//! Every integral is evaluated relative to its own log-maximum, so nothing
//! overflows even when `n q` is in the thousands.

use num_complex::Complex;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::logscaled::{log_weighted_pair, LogScaled};
use crate::potential::{DropletGeometry, PotentialModel};
use crate::quadrature::Integrator;
use crate::real::{CompensatedSum, Real};
use crate::specialfn::{log_gamma, SingularWeightParams};

/// Quadrature settings for the exact path.
#[derive(Debug, Clone, Copy)]
pub struct ExactConfig<T> {
    pub quad_rel_tol: T,
    /// Width of the substitution panels next to `ρ`. `None` picks
    /// `8 / √(n · 4ΔQ(ρ))`.
    pub split_epsilon: Option<T>,
    pub max_panels: usize,
    /// Integrands are truncated where they fall this many e-folds below
    /// their maximum.
    pub log_drop: T,
    /// Largest admissible `|Im u|`.
    pub delta: T,
}

impl<T: Real> Default for ExactConfig<T> {
    fn default() -> Self {
        Self {
            quad_rel_tol: T::lit(1e-13),
            split_epsilon: None,
            max_panels: 4000,
            log_drop: T::lit(80.0),
            delta: T::lit(0.5),
        }
    }
}

impl<T: Real> ExactConfig<T> {
    pub fn validate(&self) -> Result<()> {
        if !(self.quad_rel_tol > T::zero() && self.quad_rel_tol <= T::lit(1e-6)) {
            return Err(Error::Config(format!("quad_rel_tol = {:e} outside (0, 1e-6]", self.quad_rel_tol)));
        }
        if self.max_panels < 64 {
            return Err(Error::Config(format!("max_panels = {} below 64", self.max_panels)));
        }
        if let Some(eps) = self.split_epsilon {
            if !(eps > T::zero()) {
                return Err(Error::Config("split_epsilon must be positive".into()));
            }
        }
        if !(self.log_drop >= T::lit(30.0)) {
            return Err(Error::Config("log_drop must be at least 30".into()));
        }
        Ok(())
    }

    fn integrator(&self) -> Integrator<T> {
        Integrator::new(self.quad_rel_tol).with_max_panels(self.max_panels)
    }
}

/// A potential together with the exponent `α` of the point charge at the
/// origin, `ℓ_α(z) = 2α ln|z|`.
#[derive(Debug, Clone)]
pub struct Ensemble<T> {
    pub geometry: DropletGeometry<T>,
    pub alpha: T,
}

impl<T: Real> Ensemble<T> {
    pub fn new(model: &PotentialModel<T>, alpha: T) -> Result<Self> {
        if !(alpha > -T::one()) {
            return Err(Error::domain("Ensemble", format!("alpha = {alpha:e} must exceed -1")));
        }
        Ok(Self { geometry: DropletGeometry::solve(model)?, alpha })
    }

    pub fn model(&self) -> &PotentialModel<T> {
        &self.geometry.model
    }

    pub fn r1(&self) -> T {
        self.geometry.r1
    }
}

/// The radial density `v ↦ 2 v^e e^{-n q(v)}` of index `j`, `e = 2j + 2α + 1`.
#[derive(Debug, Clone, Copy)]
pub struct IndexDensity<'a, T> {
    pub model: &'a PotentialModel<T>,
    pub n: T,
    pub e: T,
    /// Maximizer of the density (`0` when `e ≤ 0`).
    pub mode: T,
    /// Local width of the density around the mode.
    pub scale: T,
}

impl<'a, T: Real> IndexDensity<'a, T> {
    pub fn new(ens: &'a Ensemble<T>, n: usize, j: usize) -> Result<Self> {
        if j >= n {
            return Err(Error::domain("IndexDensity", format!("index {j} not below n = {n}")));
        }
        let model = ens.model();
        let nf = T::lit(n as f64);
        let e = T::lit(2.0 * j as f64 + 1.0) + T::lit(2.0) * ens.alpha;
        let two = T::lit(2.0);
        let (mode, scale) = if e > T::zero() {
            let m = ens.geometry.r_level(e / (two * nf))?;
            let curv = e / (m * m) + nf * model.derivative(m, 2);
            (m, curv.sqrt().recip())
        } else {
            (T::zero(), ens.geometry.r_level(T::one() / (two * nf))?)
        };
        Ok(Self { model, n: nf, e, mode, scale })
    }

    /// `e ln v - n q(v)`, the log-density up to the factor 2.
    pub fn log_density(&self, v: T) -> T {
        self.e * v.ln() - self.n * self.model.q(v)
    }

    /// `ln ∫_lo^hi 2 v^e e^{-n q(v)} |v - ρ|^a dv` with its relative error,
    /// where `ρ` (if given) must be one of the endpoints.
    fn log_integral(
        &self,
        lo: T,
        hi: Option<T>,
        root: Option<(T, T)>,
        split: T,
        cfg: &ExactConfig<T>,
    ) -> Result<(LogScaled<T>, T)> {
        let (rho, a) = root.unwrap_or((T::zero(), T::zero()));
        let phi = |v: T| {
            let base = self.log_density(v);
            if a == T::zero() {
                base
            } else {
                base + a * (v - rho).abs().ln()
            }
        };
        let sigma = self.scale;
        let inside = |v: T| v > lo && hi.map_or(true, |h| v < h);

        // reference level: maximum over a sample set
        let eta = match hi {
            Some(h) => sigma.min((h - lo) * T::lit(0.5)),
            None => sigma,
        };
        let mut samples: Vec<T> = (-12..=12).map(|k| self.mode + sigma * T::lit(k as f64)).collect();
        for k in 0..12 {
            let near = eta * T::lit(4f64.powi(-k));
            let far = eta * T::lit(2f64.powi(k));
            samples.extend([lo + near, lo + far]);
            if let Some(h) = hi {
                samples.extend([h - near, h - far]);
            }
        }
        let mut reference = T::neg_infinity();
        let mut argmax = self.mode;
        for v in samples.into_iter().filter(|&v| inside(v)) {
            let p = phi(v);
            if p > reference {
                reference = p;
                argmax = v;
            }
        }
        if !reference.is_finite() {
            return Err(Error::domain("log_integral", "integrand vanishes on the sample set"));
        }
        let cut = reference - cfg.log_drop;

        // truncation of the effective window
        let mut upper = hi;
        let start = argmax.max(self.mode);
        for k in 0..200 {
            let t = start + sigma * T::lit(2f64.powi(k));
            if hi.is_some_and(|h| t >= h) {
                break;
            }
            if phi(t) < cut && phi(t * T::lit(1.001)) < phi(t) {
                upper = Some(t);
                break;
            }
        }
        let upper = upper.ok_or(Error::NoRoot { op: "log_integral", lo: lo.as_f64(), hi: f64::INFINITY })?;
        let mut lower = lo;
        let start = argmax.min(self.mode.max(lo));
        for k in 0..200 {
            let t = start - sigma * T::lit(2f64.powi(k));
            if t <= lo {
                break;
            }
            if phi(t) < cut {
                lower = t;
                break;
            }
        }

        // endpoint singularities: v^e at 0, |v - ρ|^a at ρ
        let span = upper - lower;
        let lo_exp = if lower != lo {
            None
        } else if lo == T::zero() && self.e < T::zero() {
            Some((self.e, sigma.min(span * T::lit(0.25))))
        } else if root.is_some() && a != T::zero() && lo == rho {
            Some((a, split.min(span * T::lit(0.25))))
        } else {
            None
        };
        let hi_exp = match hi {
            Some(h) if upper == h && root.is_some() && a != T::zero() && h == rho => {
                Some((a, split.min(span * T::lit(0.25))))
            }
            _ => None,
        };

        let quad = cfg.integrator();
        let mut total = CompensatedSum::new();
        let mut err = T::zero();
        let mut mid_lo = lower;
        let mut mid_hi = upper;
        if let Some((p, w)) = lo_exp {
            let c = lower;
            let r = quad.integrate_power_endpoint(
                |v: T| (phi(v) - p * (v - c).abs().ln() - reference).exp(),
                c,
                w,
                p,
            )?;
            total.add(r.value);
            err = err + r.error;
            mid_lo = c + w;
        }
        if let Some((p, w)) = hi_exp {
            let c = upper;
            let r = quad.integrate_power_endpoint(
                |v: T| (phi(v) - p * (v - c).abs().ln() - reference).exp(),
                c,
                -w,
                p,
            )?;
            total.add(r.value);
            err = err + r.error;
            mid_hi = c - w;
        }
        let mut points = vec![mid_lo, mid_hi];
        for k in [1.0, 2.0, 4.0, 8.0] {
            points.push(self.mode - sigma * T::lit(k));
            points.push(self.mode + sigma * T::lit(k));
        }
        points.push(self.mode);
        points.retain(|&v| v >= mid_lo && v <= mid_hi);
        points.sort_by(|x, y| x.partial_cmp(y).expect("finite"));
        let r = quad.integrate(|v: T| (phi(v) - reference).exp(), &points)?;
        total.add(r.value);
        err = err + r.error;

        let value = total.value();
        if !(value > T::zero()) {
            return Err(Error::Quadrature { achieved: f64::NAN, target: cfg.quad_rel_tol.as_f64(), panels: 0 });
        }
        let log = reference + value.ln() + T::LN_2();
        Ok((LogScaled::from_log(log), err / value))
    }

    /// `ln h_j` in absolute scale, with its relative quadrature error.
    pub fn log_norm(&self, cfg: &ExactConfig<T>) -> Result<(T, T)> {
        let (h, err) = self.log_integral(T::zero(), None, None, T::one(), cfg)?;
        Ok((h.log_mag, err))
    }
}

/// In/out ratios of one index.
#[derive(Debug, Clone, Copy)]
pub struct IndexRatios<T> {
    pub j: usize,
    /// `h_j^in / h_j`.
    pub r_in: LogScaled<T>,
    /// `h_j^out / h_j`.
    pub r_out: LogScaled<T>,
    /// `ln h_j`.
    pub log_h: T,
    /// Sum of the relative quadrature errors of the three integrals.
    pub rel_err: T,
}

/// Result of [`log_mgf_exact`].
#[derive(Debug, Clone)]
pub struct ExactEvaluation<T> {
    pub log_mgf: Complex<T>,
    pub per_index: Vec<IndexRatios<T>>,
    pub error_estimate: T,
}

fn default_split<T: Real>(ens: &Ensemble<T>, n: usize, rho: T, cfg: &ExactConfig<T>) -> Result<T> {
    if let Some(eps) = cfg.split_epsilon {
        return Ok(eps.min(rho * T::lit(0.25)));
    }
    let d2 = T::lit(4.0) * ens.model().delta_q(rho)?;
    let eps = T::lit(8.0) / (T::lit(n as f64) * d2).sqrt();
    Ok(eps.min(rho * T::lit(0.25)))
}

fn ratios_with_split<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    j: usize,
    params: &SingularWeightParams<T>,
    split: T,
    cfg: &ExactConfig<T>,
) -> Result<IndexRatios<T>> {
    let dens = IndexDensity::new(ens, n, j)?;
    let root = Some((params.rho, params.a));
    let (h, eh) = dens.log_integral(T::zero(), None, None, split, cfg)?;
    let (hin, ein) = dens.log_integral(T::zero(), Some(params.rho), root, split, cfg)?;
    let (hout, eout) = dens.log_integral(params.rho, None, root, split, cfg)?;
    Ok(IndexRatios { j, r_in: hin / h, r_out: hout / h, log_h: h.log_mag, rel_err: eh + ein + eout })
}

/// `(h_j^in / h_j, h_j^out / h_j)` for one index.
pub fn h_ratio<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    j: usize,
    params: &SingularWeightParams<T>,
    cfg: &ExactConfig<T>,
) -> Result<(LogScaled<T>, LogScaled<T>)> {
    cfg.validate()?;
    params.validate()?;
    let split = default_split(ens, n, params.rho, cfg)?;
    let r = ratios_with_split(ens, n, j, params, split, cfg)?;
    Ok((r.r_in, r.r_out))
}

/// All per-index ratios, evaluated in parallel and returned in index order.
pub fn index_ratios<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    params: &SingularWeightParams<T>,
    cfg: &ExactConfig<T>,
) -> Result<Vec<IndexRatios<T>>> {
    cfg.validate()?;
    params.validate()?;
    if n == 0 {
        return Err(Error::domain("log_mgf_exact", "n must be positive"));
    }
    let split = default_split(ens, n, params.rho, cfg)?;
    (0..n).into_par_iter().map(|j| ratios_with_split(ens, n, j, params, split, cfg)).collect()
}

/// `ln E[e^{u N_ρ} |p_n(ρ)|^a]`, summing `ln(e^u R_in + R_out)` over indices.
pub fn log_mgf_exact<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    params: &SingularWeightParams<T>,
    cfg: &ExactConfig<T>,
) -> Result<ExactEvaluation<T>> {
    if params.u.im.abs() > cfg.delta {
        return Err(Error::branch(
            "log_mgf_exact",
            format!("|Im u| = {:e} exceeds delta = {:e}", params.u.im.abs(), cfg.delta),
        ));
    }
    let per_index = index_ratios(ens, n, params, cfg)?;
    Ok(sum_log_mgf(params.u, per_index))
}

/// Re-sums precomputed ratios for another jump exponent `u`.
pub fn sum_log_mgf<T: Real>(u: Complex<T>, per_index: Vec<IndexRatios<T>>) -> ExactEvaluation<T> {
    let mut re = CompensatedSum::new();
    let mut im = CompensatedSum::new();
    let mut err = CompensatedSum::new();
    let eu = u.re.exp();
    for r in &per_index {
        let lin = r.r_in.ln().unwrap_or(T::neg_infinity());
        let lout = r.r_out.ln().unwrap_or(T::neg_infinity());
        let s = log_weighted_pair(u, lin, lout);
        re.add(s.re);
        im.add(s.im);
        let (vin, vout) = (eu * r.r_in.value(), r.r_out.value());
        let weight = (vin + vout).max(T::min_positive_value());
        err.add(r.rel_err * (vin + vout) / weight + T::epsilon());
    }
    ExactEvaluation { log_mgf: Complex::new(re.value(), im.value()), per_index, error_estimate: err.value() }
}

/// `ln n!`.
pub fn log_factorial<T: Real>(n: usize) -> T {
    log_gamma(T::lit(n as f64 + 1.0)).expect("positive argument")
}

/// `ln h_j` for `j = 0..n`.
pub fn log_norms<T: Real>(ens: &Ensemble<T>, n: usize, cfg: &ExactConfig<T>) -> Result<Vec<T>> {
    cfg.validate()?;
    if n == 0 {
        return Err(Error::domain("log_z", "n must be positive"));
    }
    (0..n)
        .into_par_iter()
        .map(|j| IndexDensity::new(ens, n, j)?.log_norm(cfg).map(|(l, _)| l))
        .collect()
}

/// `ln Z_n = ln n! + Σ_j ln h_j`, the unweighted partition function with
/// measure `d²z/π` per particle.
pub fn log_z<T: Real>(ens: &Ensemble<T>, n: usize, cfg: &ExactConfig<T>) -> Result<T> {
    let logs = log_norms(ens, n, cfg)?;
    let mut s: CompensatedSum<T> = logs.into_iter().collect();
    s.add(log_factorial(n));
    Ok(s.value())
}

/// `ln Z_{n,u,a} = ln Z_n + ln E_{n,u,a}`.
pub fn log_z_weighted<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    params: &SingularWeightParams<T>,
    cfg: &ExactConfig<T>,
) -> Result<Complex<T>> {
    let eval = log_mgf_exact(ens, n, params, cfg)?;
    let mut s: CompensatedSum<T> = eval.per_index.iter().map(|r| r.log_h).collect();
    s.add(log_factorial(n));
    Ok(eval.log_mgf + s.value())
}

/// `p_j = P(|z_j| < ρ)` for the independent radii; `N_ρ = Σ Bernoulli(p_j)`.
pub fn counting_probs<T: Real>(ens: &Ensemble<T>, n: usize, rho: T, cfg: &ExactConfig<T>) -> Result<Vec<T>> {
    let params = SingularWeightParams::new(T::zero(), T::zero(), rho)?;
    Ok(index_ratios(ens, n, &params, cfg)?
        .into_iter()
        .map(|r| r.r_in.value().max(T::zero()).min(T::one()))
        .collect())
}
