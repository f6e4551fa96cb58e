//! Monte Carlo oracle for `E_{n,u,a}`.
//!
//! Under rotation invariance the moduli `|z_j|` are independent with
//! densities `∝ v^{2j+2α+1} e^{-n q(v)}`, `j = 0, …, n-1`. Each density is
//! tabulated once and sampled by inversion.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::exact::{Ensemble, ExactConfig, IndexDensity};
use crate::real::CompensatedSum;
use crate::specialfn::SingularWeightParams;

/// Half-width of the tabulation window in units of the Laplace scale.
pub const WINDOW: f64 = 12.0;
/// Largest probability mass the table may miss.
pub const MAX_LEAK: f64 = 1e-10;
pub const DEFAULT_GRID: usize = 1024;

const GL5: [(f64, f64); 5] = [
    (0.0, 0.568_888_888_888_888_9),
    (-0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (0.538_469_310_105_683_1, 0.478_628_670_499_366_5),
    (-0.906_179_845_938_664, 0.236_926_885_056_189_1),
    (0.906_179_845_938_664, 0.236_926_885_056_189_1),
];

/// Monotone table of the distribution function of one modulus, in the
/// variable `w = v^p`.
#[derive(Debug, Clone)]
pub struct InverseCdf {
    /// Power `p` of the change of variable (`1`, or `e + 1` when `e < 0`).
    pub power: f64,
    pub w: Vec<f64>,
    pub cdf: Vec<f64>,
    /// Density in `w` at the nodes, normalized.
    pub pdf: Vec<f64>,
    /// Slopes `dw/dC` at the nodes after limiting.
    slopes: Vec<f64>,
}

fn hermite(t: f64, h: f64, y0: f64, y1: f64, m0: f64, m1: f64) -> f64 {
    let t2 = t * t;
    let t3 = t2 * t;
    (2.0 * t3 - 3.0 * t2 + 1.0) * y0
        + (t3 - 2.0 * t2 + t) * h * m0
        + (-2.0 * t3 + 3.0 * t2) * y1
        + (t3 - t2) * h * m1
}

impl InverseCdf {
    /// Quantile in the original variable `v`.
    pub fn quantile(&self, u: f64) -> f64 {
        let c = &self.cdf;
        let u = u.clamp(0.0, 1.0);
        let k = match c.partition_point(|&x| x <= u) {
            0 => 0,
            i if i >= c.len() => c.len() - 2,
            i => i - 1,
        };
        let h = c[k + 1] - c[k];
        let w = if h <= 0.0 {
            self.w[k]
        } else {
            let t = (u - c[k]) / h;
            hermite(t, h, self.w[k], self.w[k + 1], self.slopes[k], self.slopes[k + 1])
        };
        w.max(0.0).powf(1.0 / self.power)
    }

    /// Distribution function at `v`.
    pub fn cdf_at(&self, v: f64) -> f64 {
        let w = v.max(0.0).powf(self.power);
        let g = &self.w;
        if w <= g[0] {
            return 0.0;
        }
        if w >= g[g.len() - 1] {
            return 1.0;
        }
        let k = g.partition_point(|&x| x <= w) - 1;
        let h = g[k + 1] - g[k];
        let t = (w - g[k]) / h;
        hermite(t, h, self.cdf[k], self.cdf[k + 1], self.pdf[k], self.pdf[k + 1]).clamp(0.0, 1.0)
    }
}

/// Tabulates the distribution of `|z_j|` on the Laplace window
/// `mode ± 12·scale` clipped to `(0, ∞)`.
pub fn build_inverse_cdf(ens: &Ensemble<f64>, n: usize, j: usize, grid_size: usize) -> Result<InverseCdf> {
    if grid_size < 16 {
        return Err(Error::Config(format!("grid_size = {grid_size} must be at least 16")));
    }
    let d = IndexDensity::new(ens, n, j)?;
    let (log_h, _) = d.log_norm(&ExactConfig::default())?;
    let power = if d.e < 0.0 { d.e + 1.0 } else { 1.0 };
    let v_lo = (d.mode - WINDOW * d.scale).max(0.0);
    let v_hi = d.mode + WINDOW * d.scale;
    let (w_lo, w_hi) = (v_lo.powf(power), v_hi.powf(power));

    // density of w relative to the normalized density of v
    let density = |w: f64| -> f64 {
        if w <= 0.0 {
            return if d.e < 0.0 { (2.0 / power) * (-d.n * d.model.q(0.0) - log_h).exp() } else { 0.0 };
        }
        let v = w.powf(1.0 / power);
        // 2 v^e e^{-nq} dv/dw with dv/dw = v^{1-p} / p
        (2f64.ln() + d.log_density(v) + (1.0 - power) * v.ln() - power.ln() - log_h).exp()
    };

    let cells = grid_size - 1;
    let step = (w_hi - w_lo) / cells as f64;
    let w: Vec<f64> = (0..grid_size).map(|k| w_lo + step * k as f64).collect();
    let pdf_raw: Vec<f64> = w.iter().map(|&x| density(x)).collect();
    let mut cdf = Vec::with_capacity(grid_size);
    let mut acc = CompensatedSum::new();
    cdf.push(0.0);
    for k in 0..cells {
        let mid = w[k] + 0.5 * step;
        let mass: f64 = GL5.iter().map(|&(x, wt)| wt * density(mid + 0.5 * step * x)).sum::<f64>() * 0.5 * step;
        acc.add(mass);
        cdf.push(acc.value());
    }
    let total = acc.value();
    let leak = (1.0 - total).abs();
    if !(leak <= MAX_LEAK) {
        return Err(Error::Quadrature { achieved: leak, target: MAX_LEAK, panels: cells });
    }
    // keep nodes where the normalized table strictly increases; the tail
    // beyond saturation carries less than one ulp of mass
    let mut w_kept = Vec::with_capacity(grid_size);
    let mut c_kept: Vec<f64> = Vec::with_capacity(grid_size);
    let mut p_kept = Vec::with_capacity(grid_size);
    for k in 0..grid_size {
        let c = (cdf[k] / total).min(1.0);
        if c_kept.last().is_none_or(|&last| c > last) {
            w_kept.push(w[k]);
            c_kept.push(c);
            p_kept.push(pdf_raw[k] / total);
        }
    }
    let (w, cdf, pdf) = (w_kept, c_kept, p_kept);
    let cells = w.len() - 1;

    // inverse slopes dw/dC = 1/pdf, limited so each cell stays monotone
    let secant: Vec<f64> = (0..cells).map(|k| (w[k + 1] - w[k]) / (cdf[k + 1] - cdf[k])).collect();
    let mut slopes: Vec<f64> = pdf.iter().map(|&p| if p > 0.0 { 1.0 / p } else { f64::INFINITY }).collect();
    for k in 0..cells {
        let s = secant[k];
        let a = slopes[k] / s;
        let b = slopes[k + 1] / s;
        let r = a * a + b * b;
        if !(r <= 9.0) {
            let tau = 3.0 / r.sqrt();
            slopes[k] = if a.is_finite() { tau * a * s } else { 3.0 * s };
            slopes[k + 1] = if b.is_finite() { tau * b * s } else { 3.0 * s };
        }
    }
    Ok(InverseCdf { power, w, cdf, pdf, slopes })
}

/// `reps` independent realizations of the `n` moduli.
#[derive(Debug, Clone, PartialEq)]
pub struct SampleBatch {
    pub seed: u64,
    pub n: usize,
    pub reps: usize,
    pub alpha: f64,
    /// Row-major `reps × n`; entry `(r, j)` is the modulus of index `j`.
    pub moduli: Vec<f64>,
}

impl SampleBatch {
    pub fn row(&self, rep: usize) -> &[f64] {
        &self.moduli[rep * self.n..(rep + 1) * self.n]
    }

    /// `N_ρ` for each realization.
    pub fn counts(&self, rho: f64) -> Vec<usize> {
        (0..self.reps).map(|r| self.row(r).iter().filter(|&&v| v < rho).count()).collect()
    }

    /// `ln |p_n(ρ)|` restricted to moduli, `Σ_j ln ||z_j| - ρ|`, for each realization.
    pub fn log_abs_poly(&self, rho: f64) -> Vec<f64> {
        (0..self.reps)
            .map(|r| self.row(r).iter().map(|&v| (v - rho).abs().ln()).sum())
            .collect()
    }
}

/// Samples the moduli with a ChaCha8 stream per index `j` (stream id `j`,
/// seed `seed`); draw `r` of the stream belongs to realization `r`, so the
/// output does not depend on scheduling.
pub fn sample_batch(ens: &Ensemble<f64>, n: usize, reps: usize, seed: u64, grid_size: usize) -> Result<SampleBatch> {
    if reps == 0 {
        return Err(Error::Config("reps must be at least 1".into()));
    }
    if n == 0 {
        return Err(Error::Config("n must be at least 1".into()));
    }
    let columns: Vec<Vec<f64>> = (0..n)
        .into_par_iter()
        .map(|j| {
            let table = build_inverse_cdf(ens, n, j, grid_size)?;
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(j as u64);
            Ok((0..reps).map(|_| table.quantile(rng.random::<f64>())).collect())
        })
        .collect::<Result<_>>()?;
    let mut moduli = vec![0.0; reps * n];
    for (j, col) in columns.iter().enumerate() {
        for (r, &v) in col.iter().enumerate() {
            moduli[r * n + j] = v;
        }
    }
    Ok(SampleBatch { seed, n, reps, alpha: ens.alpha, moduli })
}

/// Sample mean of `e^{u N_ρ + a Σ ln||z_j| - ρ|}` with jackknife errors.
#[derive(Debug, Clone, Copy)]
pub struct MgfEstimate {
    pub mean: Complex64,
    pub stderr_re: f64,
    pub stderr_im: f64,
    /// `hypot(stderr_re, stderr_im)`.
    pub stderr: f64,
    /// Set when `a ≤ -0.5`: the estimator has infinite variance.
    pub heavy_tail: bool,
    /// Fraction of sampled moduli with `||z_j| - ρ| < 1e-8`.
    pub near_rho_fraction: f64,
}

fn jackknife(values: &[f64]) -> (f64, f64) {
    let m = values.len();
    let total: CompensatedSum<f64> = values.iter().copied().collect();
    let s = total.value();
    let mean = s / m as f64;
    if m < 2 {
        return (mean, 0.0);
    }
    let k = (m - 1) as f64;
    let mut dev = CompensatedSum::new();
    for &x in values {
        let loo = (s - x) / k;
        dev.add((loo - mean) * (loo - mean));
    }
    (mean, (k / m as f64 * dev.value()).sqrt())
}

pub fn estimate_mgf(batch: &SampleBatch, params: &SingularWeightParams<f64>) -> MgfEstimate {
    let (u, a, rho) = (params.u, params.a, params.rho);
    let mut near = 0usize;
    let mut re = Vec::with_capacity(batch.reps);
    let mut im = Vec::with_capacity(batch.reps);
    for r in 0..batch.reps {
        let mut count = 0.0;
        let mut log_abs = 0.0;
        for &v in batch.row(r) {
            let d = (v - rho).abs();
            if d < 1e-8 {
                near += 1;
            }
            if v < rho {
                count += 1.0;
            }
            if a != 0.0 {
                log_abs += d.ln();
            }
        }
        let x = (u * count + a * log_abs).exp();
        re.push(x.re);
        im.push(x.im);
    }
    let (mr, sr) = jackknife(&re);
    let (mi, si) = jackknife(&im);
    MgfEstimate {
        mean: Complex64::new(mr, mi),
        stderr_re: sr,
        stderr_im: si,
        stderr: sr.hypot(si),
        heavy_tail: a <= -0.5,
        near_rho_fraction: near as f64 / (batch.reps * batch.n) as f64,
    }
}
