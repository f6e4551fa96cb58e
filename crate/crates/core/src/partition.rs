//! Large-`n` expansion of the partition function
//! `ln Z_{n,u,a} ≈ C̃1 n² + C̃2 n ln n + C̃3 n + C̃4 √n + C̃5 ln n + C̃6`.
//!
//! Conventions: `ΔQ` is the quarter-Laplacian and `dA = d²z/π`, so that
//! `dσ_Q = ΔQ dA` on the droplet and, radially, `dσ_Q = 2rΔQ(r) dr`.

use num_complex::Complex;

use crate::asymptotics::{c1_general, c2_general, c3_general, RegularizationConfig};
use crate::error::{Error, Result};
use crate::exact::Ensemble;
use crate::potential::{sigma_integral, DropletGeometry};
use crate::quadrature::Integrator;
use crate::real::Real;
use crate::specialfn::{log_gamma, SingularWeightParams};

fn quad<T: Real>() -> Integrator<T> {
    Integrator::new(T::lit(1e-13)).with_abs_tol(T::lit(1e-15)).with_max_panels(4000)
}

/// `I_Q[σ_Q] = q(r1) - ln r1 - (1/4) ∫_0^{r1} r q'(r)² dr`.
pub fn iq_energy<T: Real>(geom: &DropletGeometry<T>) -> Result<T> {
    let m = &geom.model;
    let r1 = geom.r1;
    let body = quad().integrate(|r: T| {
        let d = m.dq(r);
        r * d * d
    }, &[T::zero(), r1])?;
    Ok(m.q(r1) - r1.ln() - T::lit(0.25) * body.value)
}

fn check_positive<T: Real>(geom: &DropletGeometry<T>, op: &'static str) -> Result<()> {
    let r1 = geom.r1;
    for k in 1..=64 {
        let r = r1 * T::lit(k as f64 / 64.0);
        if !(geom.model.delta_q(r)? > T::zero()) {
            return Err(Error::domain(op, format!("ΔQ({r:e}) ≤ 0 on the droplet")));
        }
    }
    Ok(())
}

/// `E_Q[σ_Q] = ∫ ln ΔQ dσ_Q`.
pub fn eq_entropy<T: Real>(geom: &DropletGeometry<T>) -> Result<T> {
    check_positive(geom, "eq_entropy")?;
    let m = &geom.model;
    sigma_integral(m, |r| m.delta_q(r).map(|d| d.ln()).unwrap_or(T::nan()), T::zero(), geom.r1, &quad())
}

/// `F_Q[σ_Q] = (1/12) ln(1/(r1²ΔQ(r1))) - (1/16) r1∂ΔQ(r1)/ΔQ(r1)
///   + (1/24) ∫_0^{r1} (∂ΔQ/ΔQ)² r dr`.
pub fn fq_functional<T: Real>(geom: &DropletGeometry<T>) -> Result<T> {
    check_positive(geom, "fq_functional")?;
    let m = &geom.model;
    let r1 = geom.r1;
    let dq1 = m.delta_q(r1)?;
    let body = quad().integrate(|r: T| {
        let g = m.d_delta_q(r) / m.delta_q(r).unwrap_or(T::nan());
        g * g * r
    }, &[T::zero(), r1])?;
    Ok(-(r1 * r1 * dq1).ln() / T::lit(12.0) - m.log_slope(r1) / T::lit(16.0) + body.value / T::lit(24.0))
}

/// `∫ ℓ_α dσ_Q = 2α ∫_0^{r1} ln r · 2rΔQ(r) dr`.
pub fn ell_alpha_moment<T: Real>(geom: &DropletGeometry<T>, alpha: T) -> Result<T> {
    if alpha == T::zero() {
        return Ok(T::zero());
    }
    let m = &geom.model;
    let v = sigma_integral(m, |r| r.ln(), T::zero(), geom.r1, &quad())?;
    Ok(T::lit(2.0) * alpha * v)
}

/// `e_{ℓ_α}` for `ℓ_α = 2α ln|z|` on a disk droplet:
/// `(α/2) ∫_0^{r1} ln r (r (ln ΔQ)')' dr + α/2 - (α/2) ln r1 · r1∂ΔQ(r1)/ΔQ(r1)`.
pub fn e_ell_alpha<T: Real>(geom: &DropletGeometry<T>, alpha: T) -> Result<T> {
    if alpha == T::zero() {
        return Ok(T::zero());
    }
    check_positive(geom, "e_ell_alpha")?;
    let m = &geom.model;
    let r1 = geom.r1;
    // (r g)' with g = ΔQ'/ΔQ is g + r (ΔQ''/ΔQ - g²)
    let bulk = quad().integrate(|r: T| {
        let d = m.delta_q(r).unwrap_or(T::nan());
        let g = m.d_delta_q(r) / d;
        r.ln() * (g + r * (m.d2_delta_q(r) / d - g * g))
    }, &[T::zero(), r1])?;
    let half = alpha * T::lit(0.5);
    Ok(half * bulk.value + half - half * r1.ln() * m.log_slope(r1))
}

/// `ζ'(-1) = 1/12 - ln A`, with `A` Glaisher's constant.
pub const ZETA_PRIME_MINUS_ONE: f64 = -0.165_421_143_700_450_93;

/// Recomputes `ζ'(-1)` from the Euler–Maclaurin expansion of the
/// hyperfactorial: `Σ_{k≤N} k ln k = ln A + (N²/2 + N/2 + 1/12) ln N - N²/4
/// + Σ_k B_{2k+2} / (2k(2k+1)(2k+2)) N^{-2k}`.
pub fn zeta_prime_minus_one<T: Real>() -> T {
    let big_n = 20usize;
    let nn = T::lit(big_n as f64);
    let mut s = T::zero();
    for k in 2..=big_n {
        let kf = T::lit(k as f64);
        s = s + kf * kf.ln();
    }
    // B_4, B_6, B_8, B_10, B_12
    let bern = [-1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut corr = T::zero();
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as f64;
        let denom = (2.0 * k) * (2.0 * k + 1.0) * (2.0 * k + 2.0);
        corr = corr - T::lit(b / denom) * nn.powi(-2 * (i as i32 + 1));
    }
    let half = T::lit(0.5);
    let ln_a = s - (nn * nn * half + nn * half + T::lit(1.0 / 12.0)) * nn.ln() + nn * nn * T::lit(0.25) - corr;
    T::lit(1.0 / 12.0) - ln_a
}

/// `ln G(1 + α)` for the Barnes G function, `α > -1`.
///
/// Shifts the argument up with `G(z + 1) = Γ(z) G(z)` and applies the
/// large-`z` expansion there.
pub fn log_barnes_g<T: Real>(alpha: T) -> Result<T> {
    if !(alpha > -T::one()) {
        return Err(Error::domain("log_barnes_g", format!("alpha = {alpha:e} must exceed -1")));
    }
    let mut z = alpha;
    let mut shift = T::zero();
    while z < T::lit(20.0) {
        // ln G(z + 1) = ln G(z + 2) - ln Γ(z + 1)
        shift = shift + log_gamma(z + T::one())?;
        z = z + T::one();
    }
    // ln G(z + 1) = z²/2 ln z - 3z²/4 + z/2 ln 2π - ln z / 12 + ζ'(-1)
    //   + Σ_k B_{2k+2} / (4k(k+1) z^{2k})
    let bern = [-1.0 / 30.0, 1.0 / 42.0, -1.0 / 30.0, 5.0 / 66.0, -691.0 / 2730.0];
    let mut series = T::zero();
    for (i, b) in bern.iter().enumerate() {
        let k = (i + 1) as f64;
        series = series + T::lit(b / (4.0 * k * (k + 1.0))) * z.powi(-2 * (i as i32 + 1));
    }
    let ln2pi = T::lit(std::f64::consts::TAU.ln());
    let lz = z.ln();
    let half = T::lit(0.5);
    let big = z * z * half * lz - T::lit(0.75) * z * z + z * half * ln2pi - lz / T::lit(12.0)
        + T::lit(ZETA_PRIME_MINUS_ONE)
        + series;
    Ok(big - shift)
}

/// `(ζ'(-1), ln G(1 + α))`.
pub fn special_constants<T: Real>(alpha: T) -> Result<(T, T)> {
    Ok((T::lit(ZETA_PRIME_MINUS_ONE), log_barnes_g(alpha)?))
}

/// Named ingredients of the expansion.
#[derive(Debug, Clone, Copy)]
pub struct FreeEnergyComponents<T> {
    pub i_q: T,
    pub e_q: T,
    pub f_q: T,
    pub e_ell_alpha: T,
    /// `-α/2`, cancelling the boundary flux term of `e_{ℓ_α}`.
    pub flux_offset: T,
    pub ell_alpha_moment: T,
    pub zeta_prime_m1: T,
    pub log_barnes_g: T,
    pub c1: Complex<T>,
    pub c2: Complex<T>,
    pub c3: Complex<T>,
}

/// The six coefficients of the expansion.
#[derive(Debug, Clone, Copy)]
pub struct FreeEnergyExpansion<T> {
    pub tc1: T,
    pub tc2: T,
    pub tc3: Complex<T>,
    pub tc4: Complex<T>,
    pub tc5: T,
    pub tc6: Complex<T>,
    pub components: FreeEnergyComponents<T>,
}

impl<T: Real> FreeEnergyExpansion<T> {
    pub fn eval(&self, n: usize) -> Complex<T> {
        let nf = T::lit(n as f64);
        let ln = nf.ln();
        self.tc3 * nf + self.tc4 * nf.sqrt() + self.tc6 + (self.tc1 * nf * nf + self.tc2 * nf * ln + self.tc5 * ln)
    }
}

/// Euler characteristic of a disk droplet.
pub const EULER_CHARACTERISTIC: i32 = 1;

/// Coefficients for `ln Z_{n,u,a}`. With `(u, a) = (0, 0)` the weight
/// terms vanish and any `ρ` in `(0, r1)` gives the unweighted expansion.
pub fn free_energy_coefficients<T: Real>(
    ens: &Ensemble<T>,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<FreeEnergyExpansion<T>> {
    let geom = &ens.geometry;
    let alpha = ens.alpha;
    let (zeta, lg) = special_constants(alpha)?;
    let i_q = iq_energy(geom)?;
    let e_q = eq_entropy(geom)?;
    let f_q = fq_functional(geom)?;
    let e_l = e_ell_alpha(geom, alpha)?;
    let l_mom = ell_alpha_moment(geom, alpha)?;
    let c1 = c1_general(geom, params, reg)?;
    let c2 = c2_general(geom, params, reg)?;
    let c3 = c3_general(geom, alpha, params, reg)?;
    let dq0 = geom.model.delta_q_at_origin()?;
    let half = T::lit(0.5);
    let flux = -alpha * half;
    let ln2pi = T::lit(std::f64::consts::TAU.ln());
    let tc3 = c1 + (half * ln2pi - T::one() - half * e_q + l_mom);
    let tc6 = c3
        + (zeta - lg + f_q + (T::one() + alpha) * half * ln2pi + e_l + flux + alpha * alpha * half * (geom.r1 * geom.r1 * dq0).ln());
    Ok(FreeEnergyExpansion {
        tc1: -i_q,
        tc2: half,
        tc3,
        tc4: c2,
        tc5: T::lit(5.0 / 12.0) + alpha * alpha * half,
        tc6,
        components: FreeEnergyComponents {
            i_q,
            e_q,
            f_q,
            e_ell_alpha: e_l,
            flux_offset: flux,
            ell_alpha_moment: l_mom,
            zeta_prime_m1: zeta,
            log_barnes_g: lg,
            c1,
            c2,
            c3,
        },
    })
}

/// The expansion evaluated at `n`.
pub fn free_energy_expansion<T: Real>(
    ens: &Ensemble<T>,
    n: usize,
    params: &SingularWeightParams<T>,
    reg: &RegularizationConfig<T>,
) -> Result<Complex<T>> {
    Ok(free_energy_coefficients(ens, params, reg)?.eval(n))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::potential::PotentialModel;

    fn geom(m: PotentialModel<f64>) -> DropletGeometry<f64> {
        DropletGeometry::solve(&m).unwrap()
    }

    #[test]
    fn energies() {
        let g = geom(PotentialModel::ginibre());
        assert!((iq_energy(&g).unwrap() - 0.75).abs() < 1e-14);
        assert!(eq_entropy(&g).unwrap().abs() < 1e-15);
        assert!(fq_functional(&g).unwrap().abs() < 1e-15);
        let lin = geom(PotentialModel::monomials(&[(2.0, 1.0)]).unwrap());
        assert!((iq_energy(&lin).unwrap() - 1.5).abs() < 1e-13);
        // q = c r²: r1 = 1/√c, ΔQ ≡ c, I_Q = 3/4 + (ln c)/2
        let c: f64 = 2.5;
        let g = geom(PotentialModel::monomials(&[(c, 2.0)]).unwrap());
        assert!((eq_entropy(&g).unwrap() - c.ln()).abs() < 1e-13);
        assert!((iq_energy(&g).unwrap() - (0.75 + 0.5 * c.ln())).abs() < 1e-13);
        let want = (1.0 / (g.r1 * g.r1 * c)).ln() / 12.0;
        assert!((fq_functional(&g).unwrap() - want).abs() < 1e-14);
        // adding a constant to q shifts I_Q by it
        let shifted = PotentialModel::custom(std::sync::Arc::new(|r: f64| {
            [0.2 * r * r + 0.2345 * r.powi(3) + 0.3, 0.4 * r + 0.7035 * r * r, 0.4 + 1.407 * r, 1.407, 0.0]
        }));
        let a = iq_energy(&geom(shifted)).unwrap();
        let b = iq_energy(&geom(PotentialModel::figure1())).unwrap();
        assert!((a - b - 0.3).abs() < 1e-13);
    }

    #[test]
    fn tolerance_stability() {
        let g = geom(PotentialModel::figure1());
        let loose = Integrator::new(1e-9);
        let e_loose = sigma_integral(&g.model, |r| g.model.delta_q(r).unwrap().ln(), 0.0, g.r1, &loose).unwrap();
        assert!((eq_entropy(&g).unwrap() - e_loose).abs() < 1e-9);
        let f = fq_functional(&g).unwrap();
        assert!(f.is_finite());
    }

    #[test]
    fn ell_terms() {
        let g = geom(PotentialModel::ginibre());
        assert_eq!(e_ell_alpha(&g, 0.0).unwrap(), 0.0);
        for alpha in [0.3, -0.5, 2.0] {
            assert!((e_ell_alpha(&g, alpha).unwrap() - alpha / 2.0).abs() < 1e-14);
            // ∫ ln r 2r dr over [0, 1] = -1/2
            assert!((ell_alpha_moment(&g, alpha).unwrap() + alpha).abs() < 1e-13);
        }
        // integration by parts: bulk + third term = -(α/2) ln(ΔQ(r1)/ΔQ(0))
        let f = geom(PotentialModel::figure1());
        let alpha = 0.667;
        let want = alpha / 2.0 - alpha / 2.0 * (f.model.delta_q(f.r1).unwrap() / 0.2).ln();
        assert!((e_ell_alpha(&f, alpha).unwrap() - want).abs() < 1e-12);
    }

    #[test]
    fn barnes_g_and_zeta() {
        assert!((zeta_prime_minus_one::<f64>() - ZETA_PRIME_MINUS_ONE).abs() < 1e-12);
        for alpha in [0.0f64, 1.0, 2.0] {
            assert!(log_barnes_g(alpha).unwrap().abs() < 1e-11, "{alpha}");
        }
        // G(4) = 2, G(5) = 12, G(1/2) = 0.603244281209446...
        assert!((log_barnes_g(3.0).unwrap() - 2f64.ln()).abs() < 1e-11);
        assert!((log_barnes_g(4.0).unwrap() - 12f64.ln()).abs() < 1e-11);
        assert!((log_barnes_g(-0.5).unwrap() - 0.603_244_281_209_446_1f64.ln()).abs() < 1e-11);
        assert!(log_barnes_g(-1.0).is_err());
    }

    #[test]
    fn structural_coefficients() {
        let ens = Ensemble::new(&PotentialModel::figure1(), 0.667).unwrap();
        let reg = RegularizationConfig::default();
        let p = SingularWeightParams::new(0.0, 0.0, 0.5).unwrap();
        let c = free_energy_coefficients(&ens, &p, &reg).unwrap();
        assert_eq!(c.tc2, 0.5);
        assert_eq!(c.tc5, 5.0 / 12.0 + 0.667 * 0.667 / 2.0);
        assert!((c.tc5 - 0.667 * 0.667 / 2.0 - (6 - EULER_CHARACTERISTIC) as f64 / 12.0).abs() < 1e-15);
        assert_eq!(c.components.c1.norm() + c.components.c2.norm() + c.components.c3.norm(), 0.0);
    }

    #[test]
    fn ginibre_coefficients() {
        let ens = Ensemble::new(&PotentialModel::ginibre(), 0.0).unwrap();
        let p = SingularWeightParams::new(0.0, 0.0, 0.5).unwrap();
        let c = free_energy_coefficients(&ens, &p, &RegularizationConfig::default()).unwrap();
        let ln2pi = std::f64::consts::TAU.ln();
        assert!((c.tc1 + 0.75f64).abs() < 1e-14);
        assert!((c.tc3.re - (0.5 * ln2pi - 1.0)).abs() < 1e-14);
        assert!((c.tc6.re - (ZETA_PRIME_MINUS_ONE + 0.5 * ln2pi)).abs() < 1e-12);
    }

    fn gamma_product_log_z(n: usize, alpha: f64) -> f64 {
        let ln = (n as f64).ln();
        let mut s = crate::exact::log_factorial(n);
        for j in 0..n {
            s += log_gamma(j as f64 + 1.0 + alpha).unwrap() - (j as f64 + 1.0 + alpha) * ln;
        }
        s
    }

    #[test]
    fn ginibre_alpha_gamma_product() {
        let reg = RegularizationConfig::default();
        let p = SingularWeightParams::new(0.0, 0.0, 0.5).unwrap();
        for alpha in [0.0, 0.7, -0.4] {
            let ens = Ensemble::new(&PotentialModel::ginibre(), alpha).unwrap();
            let c = free_energy_coefficients(&ens, &p, &reg).unwrap();
            let mut prev = f64::INFINITY;
            for n in [25, 100, 400] {
                let r = (gamma_product_log_z(n, alpha) - c.eval(n).re).abs();
                assert!(r < prev && r < 0.2 / n as f64, "{alpha} {n} {r}");
                prev = r;
            }
        }
    }

    #[test]
    fn quartic_alpha_residual_decays() {
        use crate::exact::{log_z_weighted, ExactConfig};
        let model = PotentialModel::monomials(&[(1.0, 2.0), (0.5, 4.0)]).unwrap();
        let ens = Ensemble::new(&model, 0.5).unwrap();
        let p = SingularWeightParams::new(0.4, 1.25, 0.5 * ens.r1()).unwrap();
        let reg = RegularizationConfig::default();
        let c = free_energy_coefficients(&ens, &p, &reg).unwrap();
        let cfg = ExactConfig::default();
        let res: Vec<f64> = [50, 100, 200]
            .iter()
            .map(|&n| (log_z_weighted(&ens, n, &p, &cfg).unwrap() - c.eval(n)).norm())
            .collect();
        assert!(res[0] > res[1] && res[1] > res[2] && res[2] < 0.1, "{res:?}");
    }
}
