//! Cumulants of the disk counting statistic `N_ρ`.
//!
//! Exact values use that `N_ρ` is a sum of independent Bernoulli variables;
//! asymptotic values differentiate the expansion coefficients in `u` along a
//! circle (Cauchy's formula, trapezoidal rule).

use num_complex::Complex;
use rayon::prelude::*;

use crate::asymptotics::{counting_coeffs, RegularizationConfig};
use crate::error::{Error, Result};
use crate::exact::{counting_probs, Ensemble, ExactConfig};
use crate::real::{CompensatedSum, Real};

/// Node count and radius of the differentiation contour.
#[derive(Debug, Clone, Copy)]
pub struct ContourConfig<T> {
    pub points: usize,
    pub radius: T,
}

impl<T: Real> Default for ContourConfig<T> {
    fn default() -> Self {
        Self { points: 64, radius: T::lit(0.25) }
    }
}

impl<T: Real> ContourConfig<T> {
    /// Checks the node count and that the circle stays inside `|u| ≤ δ/2`.
    pub fn validate(&self, jmax: usize, delta: T) -> Result<()> {
        if self.points < 2 * jmax + 2 {
            return Err(Error::Config(format!("{} contour points cannot resolve order {jmax}", self.points)));
        }
        if !(self.radius > T::zero() && self.radius <= delta * T::lit(0.5)) {
            return Err(Error::Config(format!(
                "contour radius {:e} must lie in (0, delta/2 = {:e}]",
                self.radius,
                delta * T::lit(0.5)
            )));
        }
        Ok(())
    }

    pub fn nodes(&self) -> Vec<Complex<T>> {
        let m = self.points;
        (0..m)
            .map(|k| Complex::from_polar(self.radius, T::TAU() * T::lit(k as f64) / T::lit(m as f64)))
            .collect()
    }
}

/// Derivatives `f^{(j)}(0)`, `j = 1..=jmax`, from samples of `f` at
/// [`ContourConfig::nodes`].
pub fn contour_derivatives<T: Real>(values: &[Complex<T>], jmax: usize, radius: T) -> Vec<Complex<T>> {
    let m = values.len();
    let mut out = Vec::with_capacity(jmax);
    let mut fact = T::one();
    for j in 1..=jmax {
        fact = fact * T::lit(j as f64);
        let (mut re, mut im) = (CompensatedSum::new(), CompensatedSum::new());
        for (k, v) in values.iter().enumerate() {
            // e^{-ijθ_k}, with the angle reduced mod m for accuracy
            let phase = -T::TAU() * T::lit(((j * k) % m) as f64) / T::lit(m as f64);
            let t = *v * Complex::from_polar(T::one(), phase);
            re.add(t.re);
            im.add(t.im);
        }
        let scale = fact / (T::lit(m as f64) * radius.powi(j as i32));
        out.push(Complex::new(re.value(), im.value()) * scale);
    }
    out
}

/// `f^{(j)}(0)` for `j = 1..=jmax` of an analytic `f` by the trapezoidal
/// Cauchy integral; nodes are evaluated in parallel.
pub fn contour_cumulants<T, F>(logf: F, jmax: usize, cfg: &ContourConfig<T>) -> Result<Vec<Complex<T>>>
where
    T: Real,
    F: Fn(Complex<T>) -> Result<Complex<T>> + Sync,
{
    if jmax == 0 || cfg.points < 2 * jmax + 2 || !(cfg.radius > T::zero()) {
        return Err(Error::Config("invalid contour configuration".into()));
    }
    let values: Vec<Complex<T>> = cfg.nodes().into_par_iter().map(&logf).collect::<Result<_>>()?;
    Ok(contour_derivatives(&values, jmax, cfg.radius))
}

/// `κ_1..κ_jmax` of a sum of independent Bernoulli(`p_j`) variables.
pub fn bernoulli_cumulants<T: Real>(probs: &[T], jmax: usize) -> Result<Vec<T>> {
    if !(1..=4).contains(&jmax) {
        return Err(Error::domain("cumulants_exact", format!("order {jmax} outside 1..=4")));
    }
    let mut sums = vec![CompensatedSum::new(); jmax];
    let (one, two, six) = (T::one(), T::lit(2.0), T::lit(6.0));
    for &p in probs {
        let var = p * (one - p);
        let terms = [p, var, var * (one - two * p), var * (one - six * p + six * p * p)];
        for (s, t) in sums.iter_mut().zip(terms) {
            s.add(t);
        }
    }
    Ok(sums.iter().map(|s| s.value()).collect())
}

/// Exact and predicted cumulants of `N_ρ`.
#[derive(Debug, Clone)]
pub struct CumulantSet<T> {
    pub n: usize,
    pub rho: T,
    /// `κ_1, κ_2, …` from the Bernoulli structure.
    pub exact: Vec<T>,
    /// Predictions from the expansion, when requested.
    pub asymptotic: Option<Vec<Complex<T>>>,
}

/// Exact `κ_1..κ_jmax` (`jmax ≤ 4`).
pub fn cumulants_exact<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    rho: T,
    jmax: usize,
    cfg: &ExactConfig<T>,
) -> Result<CumulantSet<T>> {
    if !(1..=4).contains(&jmax) {
        return Err(Error::domain("cumulants_exact", format!("order {jmax} outside 1..=4")));
    }
    let probs = counting_probs(ens, n, rho, cfg)?;
    Ok(CumulantSet { n, rho, exact: bernoulli_cumulants(&probs, jmax)?, asymptotic: None })
}

/// `u`-derivatives at `0` of the counting coefficients `(C1, C2, C3)`.
#[derive(Debug, Clone)]
pub struct CoefficientDerivatives<T> {
    pub c1: Vec<Complex<T>>,
    pub c2: Vec<Complex<T>>,
    pub c3: Vec<Complex<T>>,
}

pub fn coefficient_derivatives<T: Real>(
    ens: &Ensemble<T>,
    rho: T,
    jmax: usize,
    reg: &RegularizationConfig<T>,
    contour: &ContourConfig<T>,
) -> Result<CoefficientDerivatives<T>> {
    contour.validate(jmax, reg.kernel.delta)?;
    let values = contour
        .nodes()
        .into_par_iter()
        .map(|u| counting_coeffs(&ens.geometry, u, rho, ens.alpha, reg))
        .collect::<Result<Vec<_>>>()?;
    let pick = |f: fn(&crate::asymptotics::ExpansionCoefficients<T>) -> Complex<T>| {
        let v: Vec<Complex<T>> = values.iter().map(f).collect();
        contour_derivatives(&v, jmax, contour.radius)
    };
    Ok(CoefficientDerivatives { c1: pick(|c| c.c1), c2: pick(|c| c.c2), c3: pick(|c| c.c3) })
}

impl<T: Real> CoefficientDerivatives<T> {
    /// Predicted `κ_j` at size `n`: `C1'(0) n + C3'(0)` for `j = 1`,
    /// `∂^j C2(0) √n` for even `j`, `∂^j C3(0)` for odd `j ≥ 3`.
    pub fn predict(&self, j: usize, n: usize) -> Result<Complex<T>> {
        if j == 0 || j > self.c1.len() {
            return Err(Error::domain("cumulants_asymptotic", format!("order {j} not available")));
        }
        let nf = T::lit(n as f64);
        Ok(match j {
            1 => self.c1[0] * nf + self.c3[0],
            _ if j % 2 == 0 => self.c2[j - 1] * nf.sqrt(),
            _ => self.c3[j - 1],
        })
    }
}

/// Predicted `κ_j` from the expansion.
pub fn cumulants_asymptotic<T: Real>(
    ens: &Ensemble<T>,
    rho: T,
    n: usize,
    j: usize,
    reg: &RegularizationConfig<T>,
    contour: &ContourConfig<T>,
) -> Result<Complex<T>> {
    if j == 0 {
        return Err(Error::domain("cumulants_asymptotic", "order must be positive"));
    }
    coefficient_derivatives(ens, rho, j, reg, contour)?.predict(j, n)
}

/// Exact cumulants together with their predictions.
pub fn cumulants_compare<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    rho: T,
    jmax: usize,
    cfg: &ExactConfig<T>,
    reg: &RegularizationConfig<T>,
    contour: &ContourConfig<T>,
) -> Result<CumulantSet<T>> {
    let mut set = cumulants_exact(ens, n, rho, jmax, cfg)?;
    let d = coefficient_derivatives(ens, rho, jmax, reg, contour)?;
    set.asymptotic = Some((1..=jmax).map(|j| d.predict(j, n)).collect::<Result<_>>()?);
    Ok(set)
}
