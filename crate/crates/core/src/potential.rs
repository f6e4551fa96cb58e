//! Radial potentials `Q(z) = q(|z|)`, the induced density `ΔQ`, the droplet
//! radius and the Laplace points `r_τ`.
//!
//! `ΔQ` is the quarter-Laplacian, `ΔQ(r) = (q''(r) + q'(r)/r) / 4`, so that
//! `dσ_Q = ΔQ · 1_{|z| ≤ r1} d²z/π` is a probability measure; Ginibre
//! (`q = r²`) has `ΔQ ≡ 1`.

use std::fmt;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::quadrature::Integrator;
use crate::real::Real;

/// User supplied smooth radial profile.
///
/// Contract: `q` is `C⁴` on `(0, ∞)`, `r ↦ r q'(r)` is nondecreasing
/// (subharmonicity), and `q'(r)/r` has a finite positive limit at `0`.
pub trait RadialProfile<T>: Send + Sync {
    /// `[q, q', q'', q''', q'''']` at `r ≥ 0`.
    fn derivatives(&self, r: T) -> [T; 5];
}

impl<T, F> RadialProfile<T> for F
where
    F: Fn(T) -> [T; 5] + Send + Sync,
{
    fn derivatives(&self, r: T) -> [T; 5] {
        self(r)
    }
}

/// One term `c · r^p` of a monomial potential.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MonomialTerm<T> {
    pub coeff: T,
    pub exponent: T,
}

#[derive(Clone)]
enum Profile<T> {
    Monomials(Vec<MonomialTerm<T>>),
    Custom(Arc<dyn RadialProfile<T>>),
}

/// A rotation-invariant potential.
#[derive(Clone)]
pub struct PotentialModel<T> {
    profile: Profile<T>,
}

impl<T: fmt::Debug> fmt::Debug for PotentialModel<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.profile {
            Profile::Monomials(terms) => f.debug_tuple("Monomials").field(terms).finish(),
            Profile::Custom(_) => f.write_str("Custom(..)"),
        }
    }
}

/// `c · p(p-1)…(p-k+1) · r^{p-k}`, with exact zeros for vanishing factors.
fn monomial_derivative<T: Real>(c: T, p: T, k: usize, r: T) -> T {
    let mut factor = c;
    for i in 0..k {
        factor = factor * (p - T::lit(i as f64));
    }
    if factor == T::zero() {
        return T::zero();
    }
    let e = p - T::lit(k as f64);
    if e == T::zero() {
        factor
    } else {
        factor * r.powf(e)
    }
}

impl<T: Real> PotentialModel<T> {
    /// `q(r) = Σ c_k r^{p_k}` with `c_k ≥ 0` and `p_k ≥ 1`.
    pub fn monomials(terms: &[(T, T)]) -> Result<Self> {
        if terms.is_empty() {
            return Err(Error::Config("potential needs at least one term".into()));
        }
        let mut out = Vec::with_capacity(terms.len());
        for &(coeff, exponent) in terms {
            if !(coeff >= T::zero()) || !coeff.is_finite() {
                return Err(Error::Config(format!("coefficient {coeff:e} must be finite and nonnegative")));
            }
            if !(exponent >= T::one()) || !exponent.is_finite() {
                return Err(Error::Config(format!("exponent {exponent:e} must be at least 1")));
            }
            out.push(MonomialTerm { coeff, exponent });
        }
        if out.iter().all(|t| t.coeff == T::zero()) {
            return Err(Error::Config("all coefficients vanish".into()));
        }
        Ok(Self { profile: Profile::Monomials(out) })
    }

    /// `q(r) = r²`.
    pub fn ginibre() -> Self {
        Self::monomials(&[(T::one(), T::lit(2.0))]).expect("valid")
    }

    /// `q(r) = 0.2 r² + 0.2345 r³`.
    pub fn figure1() -> Self {
        Self::monomials(&[(T::lit(0.2), T::lit(2.0)), (T::lit(0.2345), T::lit(3.0))]).expect("valid")
    }

    pub fn custom(profile: Arc<dyn RadialProfile<T>>) -> Self {
        Self { profile: Profile::Custom(profile) }
    }

    pub fn terms(&self) -> Option<&[MonomialTerm<T>]> {
        match &self.profile {
            Profile::Monomials(t) => Some(t),
            Profile::Custom(_) => None,
        }
    }

    /// `[q, q', q'', q''', q'''']` at `r`.
    pub fn derivatives(&self, r: T) -> [T; 5] {
        match &self.profile {
            Profile::Monomials(terms) => {
                let mut d = [T::zero(); 5];
                for t in terms {
                    for (k, slot) in d.iter_mut().enumerate() {
                        *slot = *slot + monomial_derivative(t.coeff, t.exponent, k, r);
                    }
                }
                d
            }
            Profile::Custom(p) => p.derivatives(r),
        }
    }

    pub fn q(&self, r: T) -> T {
        self.derivative(r, 0)
    }

    pub fn dq(&self, r: T) -> T {
        self.derivative(r, 1)
    }

    /// `q^{(k)}(r)` for `k ≤ 4`.
    pub fn derivative(&self, r: T, k: usize) -> T {
        match &self.profile {
            Profile::Monomials(terms) => terms
                .iter()
                .fold(T::zero(), |acc, t| acc + monomial_derivative(t.coeff, t.exponent, k, r)),
            Profile::Custom(p) => p.derivatives(r)[k],
        }
    }

    /// `r q'(r)`, twice the σ_Q-mass of the disk of radius `r` (for `r ≤ r1`).
    pub fn rdq(&self, r: T) -> T {
        r * self.dq(r)
    }

    /// `[ΔQ, ∂_rΔQ, ∂_r²ΔQ]` at `r > 0`.
    fn delta_q_all(&self, r: T) -> [T; 3] {
        let quarter = T::lit(0.25);
        match &self.profile {
            Profile::Monomials(terms) => {
                // ΔQ of c r^p is c p² r^{p-2} / 4
                let mut d = [T::zero(); 3];
                for t in terms {
                    let c = t.coeff * t.exponent * t.exponent * quarter;
                    let p = t.exponent - T::lit(2.0);
                    for (k, slot) in d.iter_mut().enumerate() {
                        *slot = *slot + monomial_derivative(c, p, k, r);
                    }
                }
                d
            }
            Profile::Custom(p) => {
                let [_, q1, q2, q3, q4] = p.derivatives(r);
                let ri = r.recip();
                let two = T::lit(2.0);
                [
                    (q2 + q1 * ri) * quarter,
                    (q3 + (q2 - q1 * ri) * ri) * quarter,
                    (q4 + (q3 - two * q2 * ri + two * q1 * ri * ri) * ri) * quarter,
                ]
            }
        }
    }

    /// `ΔQ(r)`; at `r = 0` the continuous limit, if it exists.
    pub fn delta_q(&self, r: T) -> Result<T> {
        if r < T::zero() {
            return Err(Error::domain("delta_q", format!("r = {r:e} must be nonnegative")));
        }
        if r == T::zero() {
            return self.delta_q_at_origin();
        }
        Ok(self.delta_q_all(r)[0])
    }

    /// `∂_r ΔQ(r)` for `r > 0`.
    pub fn d_delta_q(&self, r: T) -> T {
        self.delta_q_all(r)[1]
    }

    /// `∂_r² ΔQ(r)` for `r > 0`.
    pub fn d2_delta_q(&self, r: T) -> T {
        self.delta_q_all(r)[2]
    }

    /// `lim_{r→0} ΔQ(r)`.
    pub fn delta_q_at_origin(&self) -> Result<T> {
        match &self.profile {
            Profile::Monomials(terms) => {
                let mut v = T::zero();
                for t in terms.iter().filter(|t| t.coeff > T::zero()) {
                    if t.exponent < T::lit(2.0) {
                        return Err(Error::domain("delta_q", "ΔQ is unbounded at r = 0 (exponent below 2)"));
                    }
                    if t.exponent == T::lit(2.0) {
                        v = v + t.coeff;
                    }
                }
                Ok(v)
            }
            Profile::Custom(p) => {
                let d = p.derivatives(T::zero());
                if d[1].abs() > T::epsilon() {
                    return Err(Error::domain("delta_q", "q'(0) ≠ 0, so ΔQ is unbounded at r = 0"));
                }
                Ok(d[2] * T::lit(0.5))
            }
        }
    }

    /// `ρ ∂_rΔQ(ρ) / ΔQ(ρ)`.
    pub fn log_slope(&self, r: T) -> T {
        let d = self.delta_q_all(r);
        r * d[1] / d[0]
    }
}

/// Droplet radius `r1` (smallest root of `r q'(r) = 2`) with a monotone
/// table of `(τ, r_τ)` used to seed the Laplace-point solves.
#[derive(Debug, Clone)]
pub struct DropletGeometry<T> {
    pub model: PotentialModel<T>,
    pub r1: T,
    table: Vec<(T, T)>,
}

const TABLE_SIZE: usize = 64;

/// Safeguarded Newton on a bracket `[lo, hi]` with `f(lo) < 0 < f(hi)`.
fn solve_bracketed<T: Real>(
    op: &'static str,
    f: impl Fn(T) -> (T, T),
    mut lo: T,
    mut hi: T,
    tol: T,
) -> Result<T> {
    let (flo, _) = f(lo);
    let (fhi, _) = f(hi);
    if flo.abs() <= tol {
        return Ok(lo);
    }
    if fhi.abs() <= tol {
        return Ok(hi);
    }
    if flo > T::zero() || fhi < T::zero() {
        return Err(Error::NoRoot { op, lo: lo.as_f64(), hi: hi.as_f64() });
    }
    let mut x = (lo + hi) * T::lit(0.5);
    for _ in 0..200 {
        let (fx, dfx) = f(x);
        if fx.abs() <= tol {
            return Ok(x);
        }
        if fx < T::zero() {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - fx / dfx;
        x = if dfx > T::zero() && newton > lo && newton < hi { newton } else { (lo + hi) * T::lit(0.5) };
        if hi - lo <= T::epsilon() * hi.abs() * T::lit(4.0) {
            return Ok(x);
        }
    }
    Ok(x)
}

impl<T: Real> DropletGeometry<T> {
    /// Solves `r1 q'(r1) = 2` for the smallest positive root.
    pub fn solve(model: &PotentialModel<T>) -> Result<Self> {
        let two = T::lit(2.0);
        // coarse estimate by doubling
        let mut est = T::lit(1.0 / 1024.0);
        while model.rdq(est) < two {
            est = est * two;
            if est > T::lit(1e8) {
                return Err(Error::NoRoot { op: "r1_solve", lo: 0.0, hi: est.as_f64() });
            }
        }
        // ascending scan for the first crossing
        let step = est / T::lit(64.0);
        let mut lo = T::zero();
        let mut hi = step;
        while model.rdq(hi) < two {
            lo = hi;
            hi = hi + step;
        }
        let r1 = Self::solve_level(model, two, lo, hi)?;
        let mut table = Vec::with_capacity(TABLE_SIZE + 1);
        table.push((T::zero(), T::zero()));
        let mut prev = T::zero();
        for k in 1..TABLE_SIZE {
            let tau = T::lit(k as f64 / TABLE_SIZE as f64);
            let r = Self::solve_level(model, two * tau, prev, r1)?;
            table.push((tau, r));
            prev = r;
        }
        table.push((T::one(), r1));
        Ok(Self { model: model.clone(), r1, table })
    }

    fn solve_level(model: &PotentialModel<T>, level: T, lo: T, hi: T) -> Result<T> {
        let tol = T::lit(1e-13).max(T::epsilon() * T::lit(16.0)) * level.max(T::one());
        solve_bracketed(
            "r_tau",
            |r| {
                let d = model.derivatives(r);
                // (r q')' = q' + r q'' = 4 r ΔQ
                (r * d[1] - level, d[1] + r * d[2])
            },
            lo,
            hi,
            tol,
        )
    }

    /// Laplace point `r_τ`: the root of `r q'(r) = 2τ`, `τ ∈ [0, 1]`.
    pub fn r_tau(&self, tau: T) -> Result<T> {
        if !(tau >= T::zero() && tau <= T::one()) {
            return Err(Error::domain("r_tau", format!("tau = {tau:e} outside [0, 1]")));
        }
        if tau == T::zero() {
            return Ok(T::zero());
        }
        if tau == T::one() {
            return Ok(self.r1);
        }
        let idx = self.table.partition_point(|&(t, _)| t <= tau);
        let lo = self.table[idx - 1].1;
        let hi = self.table[idx.min(self.table.len() - 1)].1;
        Self::solve_level(&self.model, T::lit(2.0) * tau, lo, hi)
    }

    /// Root of `r q'(r) = 2τ` for any `τ > 0`, also outside the droplet.
    pub fn r_level(&self, tau: T) -> Result<T> {
        if tau <= T::one() {
            return self.r_tau(tau.max(T::zero()));
        }
        let two = T::lit(2.0);
        let mut hi = self.r1 * two;
        while self.model.rdq(hi) < two * tau {
            hi = hi * two;
            if hi > T::lit(1e12) {
                return Err(Error::NoRoot { op: "r_level", lo: self.r1.as_f64(), hi: hi.as_f64() });
            }
        }
        Self::solve_level(&self.model, two * tau, self.r1, hi)
    }

    /// `τ_ρ = ρ q'(ρ) / 2`, the σ_Q-mass of the disk of radius `ρ < r1`.
    pub fn tau_rho(&self, rho: T) -> Result<T> {
        if !(rho > T::zero() && rho < self.r1) {
            return Err(Error::domain("tau_rho", format!("rho = {rho:e} outside (0, r1 = {:e})", self.r1)));
        }
        Ok(self.model.rdq(rho) * T::lit(0.5))
    }
}

/// Free-function form of [`DropletGeometry::solve`].
pub fn r1_solve<T: Real>(model: &PotentialModel<T>) -> Result<DropletGeometry<T>> {
    DropletGeometry::solve(model)
}

/// `ΔQ(r)`.
pub fn delta_q<T: Real>(model: &PotentialModel<T>, r: T) -> Result<T> {
    model.delta_q(r)
}

/// `∂_r ΔQ(r)`.
pub fn d_delta_q<T: Real>(model: &PotentialModel<T>, r: T) -> T {
    model.d_delta_q(r)
}

/// First four derivatives of `V_τ(r) = q(r) - 2τ ln r`.
pub fn v_tau_derivs<T: Real>(model: &PotentialModel<T>, tau: T, r: T) -> Result<[T; 4]> {
    if !(r > T::zero()) {
        return Err(Error::domain("v_tau_derivs", "r must be positive"));
    }
    let d = model.derivatives(r);
    let ri = r.recip();
    let t2 = T::lit(2.0) * tau;
    Ok([
        d[1] - t2 * ri,
        d[2] + t2 * ri * ri,
        d[3] - T::lit(2.0) * t2 * ri * ri * ri,
        d[4] + T::lit(6.0) * t2 * ri * ri * ri * ri,
    ])
}

/// Outcome of one assumption check.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionCheck<T> {
    pub passed: bool,
    pub detail: String,
    /// Grid point at which the check failed, if any.
    pub offending: Option<T>,
}

/// Pass/fail per model assumption.
#[derive(Debug, Clone, PartialEq)]
pub struct AssumptionReport<T> {
    /// `q(R) / (2 ln R) > 1` at the large-`R` probe.
    pub growth: AssumptionCheck<T>,
    /// `ΔQ > 0` on a grid over `(0, 1.1 r1]`.
    pub subharmonic: AssumptionCheck<T>,
    /// `0 < ΔQ(0) < ∞`.
    pub origin: AssumptionCheck<T>,
}

impl<T> AssumptionReport<T> {
    pub fn all_passed(&self) -> bool {
        self.growth.passed && self.subharmonic.passed && self.origin.passed
    }
}

/// Validation grid and probe radius for [`validate_assumptions`].
#[derive(Debug, Clone, Copy)]
pub struct ValidationConfig<T> {
    pub grid_size: usize,
    pub growth_probe: T,
}

impl<T: Real> Default for ValidationConfig<T> {
    fn default() -> Self {
        Self { grid_size: 256, growth_probe: T::lit(1e4) }
    }
}

pub fn validate_assumptions<T: Real>(model: &PotentialModel<T>) -> AssumptionReport<T> {
    validate_assumptions_with(model, &ValidationConfig::default())
}

pub fn validate_assumptions_with<T: Real>(
    model: &PotentialModel<T>,
    cfg: &ValidationConfig<T>,
) -> AssumptionReport<T> {
    let big = cfg.growth_probe;
    let ratio = model.q(big) / (T::lit(2.0) * big.ln());
    let growth = AssumptionCheck {
        passed: ratio > T::one(),
        detail: format!("q(R)/(2 ln R) = {ratio:.6e} at R = {big:e}"),
        offending: (ratio <= T::one()).then_some(big),
    };

    let subharmonic = match DropletGeometry::solve(model) {
        Ok(geom) => {
            let top = geom.r1 * T::lit(1.1);
            let n = cfg.grid_size.max(2);
            let bad = (1..=n)
                .map(|k| top * T::lit(k as f64 / n as f64))
                .find(|&r| !(model.delta_q_all(r)[0] > T::zero()));
            AssumptionCheck {
                passed: bad.is_none(),
                detail: match bad {
                    Some(r) => format!("ΔQ({r:e}) ≤ 0"),
                    None => format!("ΔQ > 0 on {n} points of (0, {top:e}]"),
                },
                offending: bad,
            }
        }
        Err(e) => AssumptionCheck { passed: false, detail: format!("no droplet: {e}"), offending: None },
    };

    let origin = match model.delta_q_at_origin() {
        Ok(v) if v > T::zero() && v.is_finite() => {
            AssumptionCheck { passed: true, detail: format!("ΔQ(0) = {v:e}"), offending: None }
        }
        Ok(v) => AssumptionCheck {
            passed: false,
            detail: format!("ΔQ(0) = {v:e} (q'(r)/r → 0 at the origin)"),
            offending: Some(T::zero()),
        },
        Err(e) => AssumptionCheck { passed: false, detail: e.to_string(), offending: Some(T::zero()) },
    };

    AssumptionReport { growth, subharmonic, origin }
}

/// `2 ∫_lo^hi f(r) ΔQ(r) r dr`: integration against σ_Q restricted to radii.
pub(crate) fn sigma_integral<T: Real>(
    model: &PotentialModel<T>,
    f: impl Fn(T) -> T,
    lo: T,
    hi: T,
    quad: &Integrator<T>,
) -> Result<T> {
    let r = quad.integrate(|r: T| T::lit(2.0) * f(r) * model.delta_q_all(r)[0] * r, &[lo, hi])?;
    Ok(r.value)
}
