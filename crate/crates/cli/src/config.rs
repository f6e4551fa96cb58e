use std::fmt;
use std::path::{Path, PathBuf};

use radial_coulomb::asymptotics::RegularizationConfig;
use radial_coulomb::exact::ExactConfig;
use radial_coulomb::potential::validate_assumptions;
use radial_coulomb::{Ensemble, Potential, WeightParams};
use serde::Deserialize;

/// Invalid input; maps to exit code 2.
#[derive(Debug)]
pub struct ConfigError(pub String);

impl fmt::Display for ConfigError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

macro_rules! bail_config {
    ($($t:tt)*) => { return Err(ConfigError(format!($($t)*)).into()) };
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum SweepParam {
    A,
    Rho,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Preset {
    Ginibre,
    Figure1a,
    Figure1b,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PotentialSection {
    /// `ginibre` or `figure1`.
    pub preset: Option<String>,
    /// `[[coefficient, exponent], ...]` for `q(r) = Σ c r^p`.
    pub terms: Option<Vec<[f64; 2]>>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct QuadratureSection {
    pub rel_tol: Option<f64>,
    pub x_cutoff: Option<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct McSection {
    pub reps: Option<usize>,
    pub seed: Option<u64>,
    pub grid: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputSection {
    pub format: Option<Format>,
    pub path: Option<PathBuf>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

/// Contents of a TOML config file. Every field is optional; command-line
/// flags take precedence.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub alpha: Option<f64>,
    pub u: Option<f64>,
    pub a: Option<f64>,
    pub rho: Option<f64>,
    pub rho_frac: Option<f64>,
    pub n: Option<Vec<usize>>,
    pub jmax: Option<usize>,
    #[serde(default)]
    pub potential: PotentialSection,
    #[serde(default)]
    pub quadrature: QuadratureSection,
    #[serde(default)]
    pub mc: McSection,
    #[serde(default)]
    pub output: OutputSection,
    pub sweep: Option<SweepSection>,
}

impl FileConfig {
    pub fn load(path: &Path) -> anyhow::Result<Self> {
        let text = match std::fs::read_to_string(path) {
            Ok(t) => t,
            Err(e) => bail_config!("cannot read config {}: {e}", path.display()),
        };
        match toml::from_str(&text) {
            Ok(c) => Ok(c),
            Err(e) => bail_config!("config {}: {e}", path.display()),
        }
    }

    fn preset(p: Preset) -> Self {
        let fig = |n: Vec<usize>, sweep: SweepSection, a: f64| FileConfig {
            alpha: Some(0.667),
            u: Some(1.56),
            a: Some(a),
            rho_frac: Some(0.71),
            n: Some(n),
            potential: PotentialSection { preset: Some("figure1".into()), terms: None },
            sweep: Some(sweep),
            ..Default::default()
        };
        match p {
            Preset::Ginibre => FileConfig {
                potential: PotentialSection { preset: Some("ginibre".into()), terms: None },
                ..Default::default()
            },
            Preset::Figure1a => fig(
                vec![10, 40, 160],
                SweepSection { param: SweepParam::A, lo: -0.5, hi: 3.0, count: 15 },
                1.25,
            ),
            Preset::Figure1b => fig(
                vec![100, 300, 600],
                SweepSection { param: SweepParam::Rho, lo: 0.2, hi: 0.9, count: 15 },
                1.25,
            ),
        }
    }

    /// Fills unset fields of `self` from `base`.
    fn or(self, base: Self) -> Self {
        FileConfig {
            alpha: self.alpha.or(base.alpha),
            u: self.u.or(base.u),
            a: self.a.or(base.a),
            rho: self.rho.or(base.rho),
            rho_frac: if self.rho.is_some() { self.rho_frac } else { self.rho_frac.or(base.rho_frac) },
            n: self.n.or(base.n),
            jmax: self.jmax.or(base.jmax),
            potential: if self.potential.preset.is_some() || self.potential.terms.is_some() {
                self.potential
            } else {
                base.potential
            },
            quadrature: QuadratureSection {
                rel_tol: self.quadrature.rel_tol.or(base.quadrature.rel_tol),
                x_cutoff: self.quadrature.x_cutoff.or(base.quadrature.x_cutoff),
            },
            mc: McSection {
                reps: self.mc.reps.or(base.mc.reps),
                seed: self.mc.seed.or(base.mc.seed),
                grid: self.mc.grid.or(base.mc.grid),
            },
            output: OutputSection {
                format: self.output.format.or(base.output.format),
                path: self.output.path.or(base.output.path),
            },
            sweep: self.sweep.or(base.sweep),
        }
    }
}

/// Command-line overrides.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub config: Option<PathBuf>,
    pub preset: Option<Preset>,
    pub out: Option<PathBuf>,
    pub format: Option<Format>,
    pub seed: Option<u64>,
    pub n: Option<Vec<usize>>,
    pub sweep: Option<SweepParam>,
    pub grid: Option<(f64, f64, usize)>,
    pub alpha: Option<f64>,
    pub u: Option<f64>,
    pub a: Option<f64>,
    pub rho: Option<f64>,
    pub rho_frac: Option<f64>,
    pub reps: Option<usize>,
    pub jmax: Option<usize>,
}

#[derive(Debug, Clone, Copy)]
pub enum RhoSpec {
    Absolute(f64),
    Fraction(f64),
}

#[derive(Debug, Clone, Copy)]
pub struct Sweep {
    pub param: SweepParam,
    pub lo: f64,
    pub hi: f64,
    pub count: usize,
}

impl Sweep {
    pub fn values(&self) -> Vec<f64> {
        if self.count == 1 {
            return vec![self.lo];
        }
        let h = (self.hi - self.lo) / (self.count - 1) as f64;
        (0..self.count).map(|k| self.lo + h * k as f64).collect()
    }
}

/// Validated run configuration.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub potential: Potential,
    pub ensemble: Ensemble,
    pub alpha: f64,
    pub u: f64,
    pub a: f64,
    pub rho: RhoSpec,
    pub n_list: Vec<usize>,
    pub jmax: usize,
    pub exact: ExactConfig<f64>,
    pub reg: RegularizationConfig<f64>,
    pub reps: usize,
    pub seed: u64,
    pub grid: usize,
    pub format: Format,
    pub out: Option<PathBuf>,
    pub sweep: Option<Sweep>,
}

pub fn parse_grid(s: &str) -> Result<(f64, f64, usize), String> {
    let parts: Vec<&str> = s.split(':').collect();
    if parts.len() != 3 {
        return Err(format!("grid `{s}` must be lo:hi:count"));
    }
    let lo = parts[0].trim().parse::<f64>().map_err(|e| format!("grid lo `{}`: {e}", parts[0]))?;
    let hi = parts[1].trim().parse::<f64>().map_err(|e| format!("grid hi `{}`: {e}", parts[1]))?;
    let count = parts[2].trim().parse::<usize>().map_err(|e| format!("grid count `{}`: {e}", parts[2]))?;
    Ok((lo, hi, count))
}

/// Comma-separated list of particle numbers.
#[derive(Debug, Clone)]
pub struct NList(pub Vec<usize>);

pub fn parse_n_list(s: &str) -> Result<NList, String> {
    s.split(',')
        .map(|t| t.trim().parse::<usize>().map_err(|e| format!("n value `{t}`: {e}")))
        .collect::<Result<_, _>>()
        .map(NList)
}

impl RunConfig {
    pub fn build(ov: &Overrides) -> anyhow::Result<Self> {
        let mut file = match &ov.config {
            Some(p) => FileConfig::load(p)?,
            None => FileConfig::default(),
        };
        if let Some(p) = ov.preset {
            file = file.or(FileConfig::preset(p));
        }
        let cli = FileConfig {
            alpha: ov.alpha,
            u: ov.u,
            a: ov.a,
            rho: ov.rho,
            rho_frac: ov.rho_frac,
            n: ov.n.clone(),
            jmax: ov.jmax,
            mc: McSection { reps: ov.reps, seed: ov.seed, grid: None },
            output: OutputSection { format: ov.format, path: ov.out.clone() },
            ..Default::default()
        };
        let mut merged = cli.or(file);
        if let Some(param) = ov.sweep {
            let (lo, hi, count) = match (ov.grid, &merged.sweep) {
                (Some(g), _) => g,
                (None, Some(s)) if s.param == param => (s.lo, s.hi, s.count),
                (None, _) => bail_config!("--sweep needs --grid lo:hi:count"),
            };
            merged.sweep = Some(SweepSection { param, lo, hi, count });
        } else if let Some(g) = ov.grid {
            match &mut merged.sweep {
                Some(s) => (s.lo, s.hi, s.count) = g,
                None => bail_config!("--grid needs --sweep a|rho"),
            }
        }
        Self::validate(merged)
    }

    fn validate(f: FileConfig) -> anyhow::Result<Self> {
        let potential = match (&f.potential.preset, &f.potential.terms) {
            (Some(_), Some(_)) => bail_config!("potential: give either `preset` or `terms`, not both"),
            (Some(p), None) => match p.as_str() {
                "ginibre" => Potential::ginibre(),
                "figure1" => Potential::figure1(),
                other => bail_config!("potential.preset = `{other}`: expected `ginibre` or `figure1`"),
            },
            (None, Some(t)) => {
                let pairs: Vec<(f64, f64)> = t.iter().map(|p| (p[0], p[1])).collect();
                match Potential::monomials(&pairs) {
                    Ok(m) => m,
                    Err(e) => bail_config!("potential.terms: {e}"),
                }
            }
            (None, None) => Potential::ginibre(),
        };
        let report = validate_assumptions(&potential);
        if !report.all_passed() {
            bail_config!(
                "potential violates the model assumptions: growth [{}], subharmonic [{}], origin [{}]",
                report.growth.detail,
                report.subharmonic.detail,
                report.origin.detail
            );
        }
        let alpha = f.alpha.unwrap_or(0.0);
        if !(alpha > -1.0) || !alpha.is_finite() {
            bail_config!("alpha = {alpha} must be a finite number above -1");
        }
        let ensemble = match Ensemble::new(&potential, alpha) {
            Ok(e) => e,
            Err(e) => bail_config!("droplet: {e}"),
        };
        let u = f.u.unwrap_or(0.0);
        if !u.is_finite() {
            bail_config!("u = {u} must be finite");
        }
        let a = f.a.unwrap_or(0.0);
        if !(a > -1.0) || !a.is_finite() {
            bail_config!("a = {a} must be a finite number above -1");
        }
        let r1 = ensemble.r1();
        let rho = match (f.rho, f.rho_frac) {
            (Some(_), Some(_)) => bail_config!("give either rho or rho_frac, not both"),
            (Some(r), None) => {
                if !(r > 0.0 && r < r1) {
                    bail_config!("rho = {r} must lie in (0, r1) with r1 = {r1}");
                }
                RhoSpec::Absolute(r)
            }
            (None, Some(x)) => {
                if !(x > 0.0 && x < 1.0) {
                    bail_config!("rho_frac = {x} must lie in (0, 1)");
                }
                RhoSpec::Fraction(x)
            }
            (None, None) => RhoSpec::Fraction(0.5),
        };
        let n_list = f.n.unwrap_or_else(|| vec![10, 40, 160]);
        if n_list.is_empty() || n_list.contains(&0) {
            bail_config!("n list must be non-empty with positive entries");
        }
        let jmax = f.jmax.unwrap_or(4);
        if !(1..=4).contains(&jmax) {
            bail_config!("jmax = {jmax} must lie in 1..=4");
        }
        let mut exact = ExactConfig::default();
        if let Some(t) = f.quadrature.rel_tol {
            exact.quad_rel_tol = t;
        }
        if let Err(e) = exact.validate() {
            bail_config!("quadrature: {e}");
        }
        let mut reg = RegularizationConfig::default();
        if let Some(x) = f.quadrature.x_cutoff {
            reg.x_cutoff = x;
        }
        if let Err(e) = reg.validate() {
            bail_config!("quadrature: {e}");
        }
        let reps = f.mc.reps.unwrap_or(10_000);
        if reps == 0 {
            bail_config!("mc.reps must be positive");
        }
        let grid = f.mc.grid.unwrap_or(radial_coulomb::sampler::DEFAULT_GRID);
        if grid < 16 {
            bail_config!("mc.grid = {grid} must be at least 16");
        }
        let sweep = match f.sweep {
            None => None,
            Some(s) => {
                if s.count == 0 || !s.lo.is_finite() || !s.hi.is_finite() || s.hi < s.lo {
                    bail_config!("sweep grid {}:{}:{} must have lo ≤ hi and count ≥ 1", s.lo, s.hi, s.count);
                }
                match s.param {
                    SweepParam::A if !(s.lo > -1.0) => bail_config!("sweep over a must stay above -1"),
                    SweepParam::Rho if !(s.lo > 0.0 && s.hi < 1.0) => {
                        bail_config!("sweep over rho is in units of r1 and must lie in (0, 1)")
                    }
                    _ => {}
                }
                Some(Sweep { param: s.param, lo: s.lo, hi: s.hi, count: s.count })
            }
        };
        Ok(RunConfig {
            potential,
            ensemble,
            alpha,
            u,
            a,
            rho,
            n_list,
            jmax,
            exact,
            reg,
            reps,
            seed: f.mc.seed.unwrap_or(0),
            grid,
            format: f.output.format.unwrap_or(Format::Csv),
            out: f.output.path,
            sweep,
        })
    }

    pub fn rho_value(&self) -> f64 {
        match self.rho {
            RhoSpec::Absolute(r) => r,
            RhoSpec::Fraction(x) => x * self.ensemble.r1(),
        }
    }

    /// `(a, ρ)` points: the sweep grid if any, else the single configured point.
    pub fn points(&self) -> Vec<(f64, f64)> {
        let r1 = self.ensemble.r1();
        match self.sweep {
            None => vec![(self.a, self.rho_value())],
            Some(s) => match s.param {
                SweepParam::A => s.values().into_iter().map(|a| (a, self.rho_value())).collect(),
                SweepParam::Rho => s.values().into_iter().map(|x| (self.a, x * r1)).collect(),
            },
        }
    }

    pub fn params(&self, a: f64, rho: f64) -> anyhow::Result<WeightParams> {
        match WeightParams::new(self.u, a, rho) {
            Ok(p) => Ok(p),
            Err(e) => bail_config!("{e}"),
        }
    }
}
