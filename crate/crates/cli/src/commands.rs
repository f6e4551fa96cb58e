use anyhow::Result;
use num_complex::Complex64;
use radial_coulomb::asymptotics::{
    ibp_identity_check, counting_coeffs, expansion_eval, general_coeffs, mittag_leffler_c3,
    CoefficientKind, ExpansionCoefficients,
};
use radial_coulomb::cumulants::{coefficient_derivatives, cumulants_exact, ContourConfig};
use radial_coulomb::exact::{log_mgf_exact, log_z_weighted};
use radial_coulomb::partition::free_energy_coefficients;
use radial_coulomb::sampler::{estimate_mgf, sample_batch};
use radial_coulomb::specialfn::{
    dlog_h_au, g0_integer, log_h_au, log_h_tail, scaled_pcf, scaled_pcf_shift, KernelConfig,
};
use radial_coulomb::{Ensemble, Potential, WeightParams};

use crate::config::RunConfig;
use crate::table::{Cell, Table};

fn re_im(z: Complex64) -> [Cell; 2] {
    [z.re.into(), z.im.into()]
}

/// `Q(z) = |z|^{2b}`, if the potential has that form.
fn mittag_leffler_b(model: &Potential) -> Option<f64> {
    match model.terms()? {
        [t] if t.coeff == 1.0 => Some(t.exponent / 2.0),
        _ => None,
    }
}

pub fn coeffs(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["tag", "u", "a", "rho", "c1_re", "c1_im", "c2_re", "c2_im", "c3_re", "c3_im"]);
    let geom = &cfg.ensemble.geometry;
    let mut emit = |tag: &str, c: &ExpansionCoefficients<f64>, a: f64, rho: f64| {
        let mut row: Vec<Cell> = vec![tag.into(), cfg.u.into(), a.into(), rho.into()];
        row.extend(re_im(c.c1));
        row.extend(re_im(c.c2));
        row.extend(re_im(c.c3));
        t.push(row);
    };
    for (a, rho) in cfg.points() {
        let p = cfg.params(a, rho)?;
        let g = general_coeffs(geom, cfg.alpha, &p, &cfg.reg)?;
        emit("general", &g, a, rho);
        if a == 0.0 {
            let u = Complex64::new(cfg.u, 0.0);
            let c = counting_coeffs(geom, u, rho, cfg.alpha, &cfg.reg)?;
            emit("counting", &c, a, rho);
            if let Some(b) = mittag_leffler_b(&cfg.potential) {
                let ml = ExpansionCoefficients { c3: mittag_leffler_c3(u, b, cfg.alpha)?, tag: CoefficientKind::MittagLeffler, ..c };
                emit("mittag_leffler", &ml, a, rho);
            }
        }
    }
    Ok(t)
}

pub fn exact(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["n", "u", "a", "rho", "log_mgf_re", "log_mgf_im", "err_est"]);
    for (a, rho) in cfg.points() {
        let p = cfg.params(a, rho)?;
        for &n in &cfg.n_list {
            let e = log_mgf_exact(&cfg.ensemble, n, &p, &cfg.exact)?;
            let mut row: Vec<Cell> = vec![n.into(), cfg.u.into(), a.into(), rho.into()];
            row.extend(re_im(e.log_mgf));
            row.push(e.error_estimate.into());
            t.push(row);
        }
    }
    Ok(t)
}

pub fn compare(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&[
        "n", "u", "a", "rho", "log_mgf_re", "log_mgf_im", "c1", "c2", "c3", "residual_re", "residual_im", "err_est",
    ]);
    for &n in &cfg.n_list {
        for (a, rho) in cfg.points() {
            let p = cfg.params(a, rho)?;
            let c = general_coeffs(&cfg.ensemble.geometry, cfg.alpha, &p, &cfg.reg)?;
            let e = log_mgf_exact(&cfg.ensemble, n, &p, &cfg.exact)?;
            let res = e.log_mgf - expansion_eval(&c, n);
            let mut row: Vec<Cell> = vec![n.into(), cfg.u.into(), a.into(), rho.into()];
            row.extend(re_im(e.log_mgf));
            row.extend([c.c1.re.into(), c.c2.re.into(), c.c3.re.into()]);
            row.extend(re_im(res));
            row.push(e.error_estimate.into());
            t.push(row);
        }
    }
    Ok(t)
}

pub fn cumulants(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&["n", "rho", "j", "kappa_exact", "kappa_asymptotic_re", "kappa_asymptotic_im", "ratio"]);
    let contour = ContourConfig::default();
    for (_, rho) in cfg.points() {
        let d = coefficient_derivatives(&cfg.ensemble, rho, cfg.jmax, &cfg.reg, &contour)?;
        for &n in &cfg.n_list {
            let set = cumulants_exact(&cfg.ensemble, n, rho, cfg.jmax, &cfg.exact)?;
            for (j, &k) in set.exact.iter().enumerate() {
                let pred = d.predict(j + 1, n)?;
                let mut row: Vec<Cell> = vec![n.into(), rho.into(), (j + 1).into(), k.into()];
                row.extend(re_im(pred));
                row.push((k / pred.re).into());
                t.push(row);
            }
        }
    }
    Ok(t)
}

pub fn partition(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&[
        "n", "u", "a", "rho", "log_z_re", "log_z_im", "expansion_re", "expansion_im", "residual", "tc1", "tc3_re",
        "tc4_re", "tc5", "tc6_re",
    ]);
    for (a, rho) in cfg.points() {
        let p = cfg.params(a, rho)?;
        let f = free_energy_coefficients(&cfg.ensemble, &p, &cfg.reg)?;
        for &n in &cfg.n_list {
            let z = log_z_weighted(&cfg.ensemble, n, &p, &cfg.exact)?;
            let e = f.eval(n);
            let mut row: Vec<Cell> = vec![n.into(), cfg.u.into(), a.into(), rho.into()];
            row.extend(re_im(z));
            row.extend(re_im(e));
            row.push((z - e).norm().into());
            row.extend([f.tc1.into(), f.tc3.re.into(), f.tc4.re.into(), f.tc5.into(), f.tc6.re.into()]);
            t.push(row);
        }
    }
    Ok(t)
}

pub fn sample(cfg: &RunConfig) -> Result<Table> {
    let mut t = Table::new(&[
        "n", "u", "a", "rho", "reps", "seed", "mc_mean_re", "mc_mean_im", "stderr", "exact_re", "exact_im", "z_score",
        "heavy_tail", "near_rho_fraction",
    ]);
    for &n in &cfg.n_list {
        let batch = sample_batch(&cfg.ensemble, n, cfg.reps, cfg.seed, cfg.grid)?;
        for (a, rho) in cfg.points() {
            let p = cfg.params(a, rho)?;
            let est = estimate_mgf(&batch, &p);
            let exact = log_mgf_exact(&cfg.ensemble, n, &p, &cfg.exact)?.log_mgf.exp();
            let z = if est.stderr_re > 0.0 { (est.mean.re - exact.re) / est.stderr_re } else { 0.0 };
            let mut row: Vec<Cell> =
                vec![n.into(), cfg.u.into(), a.into(), rho.into(), cfg.reps.into(), Cell::Int(cfg.seed as i64)];
            row.extend(re_im(est.mean));
            row.push(est.stderr.into());
            row.extend(re_im(exact));
            row.extend([z.into(), est.heavy_tail.into(), est.near_rho_fraction.into()]);
            t.push(row);
        }
    }
    Ok(t)
}

struct Check {
    name: String,
    value: f64,
    tolerance: f64,
}

fn run_check(name: &str, tolerance: f64, f: impl FnOnce() -> Result<f64>) -> Check {
    let value = f().unwrap_or(f64::NAN);
    Check { name: name.to_string(), value, tolerance }
}

fn y_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let m = ((hi - lo) / step).round() as usize;
    (0..=m).map(|k| lo + step * k as f64).collect()
}

/// The invariant suite; returns the report and whether everything passed.
pub fn selfcheck(cfg: &RunConfig) -> Result<(Table, bool)> {
    let ens = &cfg.ensemble;
    let rho = cfg.rho_value();
    let mut checks = Vec::new();

    checks.push(run_check("trivial_weight", 1e-9, || {
        let p = WeightParams::new(0.0, 0.0, rho)?;
        let mut worst: f64 = 0.0;
        for n in [1, 10, 100] {
            worst = worst.max(log_mgf_exact(ens, n, &p, &cfg.exact)?.log_mgf.norm());
        }
        Ok(worst)
    }));

    checks.push(run_check("one_particle_closed_form", 1e-10, || {
        let gin = Ensemble::new(&Potential::ginibre(), 0.0)?;
        let mut worst: f64 = 0.0;
        for (u, r) in [(-1.0f64, 0.4f64), (2.0, 0.9)] {
            let p = WeightParams::new(u, 0.0, r)?;
            let e = log_mgf_exact(&gin, 1, &p, &cfg.exact)?.log_mgf.exp().re;
            let want = 1.0 + (u.exp() - 1.0) * (1.0 - (-r * r).exp());
            worst = worst.max((e - want).abs() / want);
        }
        Ok(worst)
    }));

    checks.push(run_check("hermite_bridge", 1e-10, || {
        let mut worst: f64 = 0.0;
        for a in 1..=4u32 {
            for u in [0.0, 1.56] {
                let p = WeightParams::new(u, a as f64, 0.5)?;
                for y in y_grid(-6.0, 6.0, 0.5) {
                    let h = log_h_au(&p, y)?.exp();
                    let g = g0_integer(a, Complex64::new(u, 0.0), y / 2f64.sqrt())?;
                    worst = worst.max((g - h).norm() / h.norm());
                }
            }
        }
        Ok(worst)
    }));

    checks.push(run_check("pcf_recurrence", 1e-10, || {
        let mut worst: f64 = 0.0;
        for a in [-0.5, 0.3, 1.25, 3.0] {
            for y in y_grid(-8.0, 8.0, 0.5) {
                let d2 = scaled_pcf(a + 1.0, y)?.value();
                let d1 = scaled_pcf(a, y)?.value();
                let d0 = if a > 0.0 { scaled_pcf(a - 1.0, y)?.value() } else { scaled_pcf_shift(a, y)?.value() };
                let scale = ((a + 1.0) * d2).abs() + (y * d1).abs() + d0.abs();
                worst = worst.max(((a + 1.0) * d2 + y * d1 - d0).abs() / scale);
            }
        }
        Ok(worst)
    }));

    checks.push(run_check("kernel_derivative", 1e-6, || {
        let mut worst: f64 = 0.0;
        let h = 1e-5;
        for a in [-0.5, 1.25, 3.0] {
            let p = WeightParams::new(1.56, a, 0.5)?;
            for y in y_grid(-6.0, 6.0, 0.5) {
                let fd = (log_h_au(&p, y + h)? - log_h_au(&p, y - h)?) / (2.0 * h);
                worst = worst.max((dlog_h_au(&p, y)? - fd).norm());
            }
        }
        Ok(worst)
    }));

    checks.push(run_check("tail_expansion", 1e-6, || {
        let mut worst: f64 = 0.0;
        let crossover = KernelConfig::<f64>::default().crossover;
        for a in [1.25, 2.5] {
            let p = WeightParams::new(1.56, a, 0.5)?;
            for x in [-20.0, 20.0] {
                worst = worst.max((log_h_au(&p, x)? - log_h_tail(&p, x, crossover)?).norm());
            }
        }
        Ok(worst)
    }));

    checks.push(run_check("general_vs_counting", 1e-8, || {
        let mut worst: f64 = 0.0;
        for frac in [0.3, 0.6] {
            let r = frac * ens.r1();
            for u in [-1.0, 0.8] {
                let p = WeightParams::new(u, 0.0, r)?;
                let g = general_coeffs(&ens.geometry, cfg.alpha, &p, &cfg.reg)?;
                let c = counting_coeffs(&ens.geometry, Complex64::new(u, 0.0), r, cfg.alpha, &cfg.reg)?;
                worst = worst.max((g.c1 - c.c1).norm()).max((g.c2 - c.c2).norm()).max((g.c3 - c.c3).norm());
            }
        }
        Ok(worst)
    }));

    checks.push(run_check("integration_by_parts_identity", 1e-8, || {
        let mut worst: f64 = 0.0;
        for u in [-2.0, 0.5, 1.56] {
            worst = worst.max(ibp_identity_check(u)?);
        }
        Ok(worst)
    }));

    checks.push(run_check("cutoff_robustness", 1e-8, || {
        let p = WeightParams::new(cfg.u, cfg.a, rho)?;
        let base = general_coeffs(&ens.geometry, cfg.alpha, &p, &cfg.reg)?;
        let mut wide = cfg.reg;
        wide.x_cutoff = 2.0 * cfg.reg.x_cutoff;
        let w = general_coeffs(&ens.geometry, cfg.alpha, &p, &wide)?;
        Ok((base.c2 - w.c2).norm().max((base.c3 - w.c3).norm()))
    }));

    let mut t = Table::new(&["check", "passed", "value", "tolerance"]);
    let mut all = true;
    for c in checks {
        let ok = c.value <= c.tolerance;
        all &= ok;
        t.push(vec![c.name.into(), ok.into(), c.value.into(), c.tolerance.into()]);
    }
    Ok((t, all))
}
