use num_complex::Complex64;
use radial_coulomb::asymptotics::{expansion_eval, general_coeffs, RegularizationConfig};
use radial_coulomb::exact::{log_mgf_exact, ExactConfig};
use radial_coulomb::potential::PotentialModel;
use radial_coulomb::quadrature::Integrator;
use radial_coulomb::specialfn::{log_gamma, scaled_pcf_shift, SingularWeightParams};
use radial_coulomb::{Ensemble, Potential, WeightParams};

/// `e^{-y²/4} D_ν(y) = √(2/π) ∫_0^∞ e^{-t²/2} t^ν cos(yt - νπ/2) dt`, `ν > -1`.
fn pcf_cosine(nu: f64, y: f64) -> f64 {
    let q = Integrator::new(1e-13).with_abs_tol(1e-16);
    let f = |t: f64| (-t * t / 2.0).exp() * t.powf(nu) * (y * t - nu * std::f64::consts::FRAC_PI_2).cos();
    let pts: Vec<f64> = (0..=40).map(|k| k as f64 * 0.25).collect();
    (2.0 / std::f64::consts::PI).sqrt() * q.integrate(f, &pts).unwrap().value
}

#[test]
fn negative_order_shift_matches_cosine_integral() {
    for a in [-0.5, -0.2] {
        for k in 0..=40 {
            let y = -8.0 + 0.25 * k as f64;
            let want = pcf_cosine(-a, y);
            let got = scaled_pcf_shift(a, y).unwrap().value();
            assert!((got - want).abs() < 1e-10 * (1.0 + want.abs()), "a={a} y={y}: {got} vs {want}");
        }
    }
}

#[test]
fn positive_order_shift_matches_laplace_integral() {
    // e^{-y²/4} D_{-a}(y) = e^{-y²/2}/Γ(a+1) ∫_0^∞ exp(-s^{2/a}/2 - y s^{1/a}) ds, a > 0
    let q = Integrator::new(1e-13).with_abs_tol(1e-300);
    for a in [0.3f64, 1.25] {
        for y in [-6.0f64, -1.0, 0.0, 1.5, 4.0] {
            let top = (y.abs() + 14.0).powf(a);
            let pts: Vec<f64> = (0..=60).map(|k| top * k as f64 / 60.0).collect();
            let f = |s: f64| {
                let t = s.powf(1.0 / a);
                (-t * t / 2.0 - y * t - y * y / 2.0).exp()
            };
            let want = q.integrate(f, &pts).unwrap().value / log_gamma(a + 1.0).unwrap().exp();
            let got = scaled_pcf_shift(a, y).unwrap().value();
            assert!((got - want).abs() < 1e-10 * want.abs(), "a={a} y={y}: {got} vs {want}");
        }
    }
}

fn residuals(ens: &Ensemble, params: &WeightParams, ns: &[usize]) -> Vec<f64> {
    let c = general_coeffs(&ens.geometry, ens.alpha, params, &RegularizationConfig::default()).unwrap();
    ns.iter()
        .map(|&n| {
            let e = log_mgf_exact(ens, n, params, &ExactConfig::default()).unwrap().log_mgf;
            (e - expansion_eval(&c, n)).norm()
        })
        .collect()
}

#[test]
fn expansion_residual_decays_like_inverse_root() {
    let ns = [25, 100, 400];
    let cases = [
        (Potential::ginibre(), 0.0, 0.0, 2.0, 0.6),
        (Potential::ginibre(), 0.0, 0.5, 1.25, 0.6),
        (Potential::figure1(), 0.667, 1.56, 1.25, 0.71),
        (Potential::monomials(&[(1.0, 2.0), (0.5, 4.0)]).unwrap(), -0.3, -0.8, 0.6, 0.4),
    ];
    for (model, alpha, u, a, frac) in cases {
        let ens = Ensemble::new(&model, alpha).unwrap();
        let p = WeightParams::new(u, a, frac * ens.r1()).unwrap();
        let r = residuals(&ens, &p, &ns);
        // a factor 4 in n should cut an n^{-1/2} remainder roughly in half
        assert!(r[1] < 0.7 * r[0] && r[2] < 0.7 * r[1], "{alpha} {u} {a}: {r:?}");
    }
}

#[test]
fn complex_jump_exponent() {
    let ens = Ensemble::new(&Potential::figure1(), 0.667).unwrap();
    let u = Complex64::new(1.0, 0.3);
    let p = SingularWeightParams::with_complex_u(u, 1.25, 0.71 * ens.r1()).unwrap();
    let c = general_coeffs(&ens.geometry, ens.alpha, &p, &RegularizationConfig::default()).unwrap();
    let r: Vec<f64> = [25, 100, 400]
        .iter()
        .map(|&n| (log_mgf_exact(&ens, n, &p, &ExactConfig::default()).unwrap().log_mgf - expansion_eval(&c, n)).norm())
        .collect();
    assert!(r[2] < r[0], "{r:?}");
    assert!(c.c1.im != 0.0);
}

#[test]
fn single_precision_pipeline() {
    let e32 = radial_coulomb::exact::Ensemble::<f32>::new(&PotentialModel::<f32>::figure1(), 0.667).unwrap();
    let e64 = Ensemble::new(&Potential::figure1(), 0.667).unwrap();
    assert!((e32.r1() as f64 - e64.r1()).abs() < 1e-5);
    let p32 = SingularWeightParams::<f32>::new(1.56, 1.25, 0.71 * e32.r1()).unwrap();
    let p64 = WeightParams::new(1.56, 1.25, 0.71 * e64.r1()).unwrap();
    let cfg32 = ExactConfig::<f32> { quad_rel_tol: 1e-6, ..Default::default() };
    let x32 = log_mgf_exact(&e32, 20, &p32, &cfg32).unwrap().log_mgf;
    let x64 = log_mgf_exact(&e64, 20, &p64, &ExactConfig::default()).unwrap().log_mgf;
    assert!((x32.re as f64 - x64.re).abs() < 1e-3 * (1.0 + x64.re.abs()), "{x32} {x64}");
}

#[test]
fn log_gamma_half_integers() {
    // Γ(1/2) = √π, Γ(7/2) = 15√π/8
    let sp = std::f64::consts::PI.sqrt();
    assert!((log_gamma(0.5).unwrap() - sp.ln()).abs() < 1e-14);
    assert!((log_gamma(3.5).unwrap() - (15.0 * sp / 8.0).ln()).abs() < 1e-14);
}
