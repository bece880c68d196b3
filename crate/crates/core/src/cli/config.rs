//! Run configuration: JSON file, command-line overrides, validation.
//!
//! Every quantity is dimensionless: lengths in units of the coupling width L,
//! rates in units of 1/L.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use serde::{Deserialize, Serialize};

use crate::model::{
    CouplingProfile, DiagonalConvention, MismatchProfile, ModelError, ThreeGuideModel,
    TwoGuideModel,
};
use crate::propagate::{DEFAULT_SAMPLES, DEFAULT_TOL, MAX_TOL, MIN_TOL};

pub const MAX_SAMPLES: usize = 10_000_000;
pub const MAX_GRID: usize = 10_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Profile {
    Sech,
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Convention {
    /// diag(−Δ, Δ)
    Full,
    /// diag(−Δ/2, Δ/2)
    Half,
}

impl Convention {
    pub fn diagonal(self) -> DiagonalConvention {
        match self {
            Convention::Full => DiagonalConvention::FullDelta,
            Convention::Half => DiagonalConvention::HalfDelta,
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            Convention::Full => "full",
            Convention::Half => "half",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Engine {
    Ode,
    Analytic,
    Adiabatic,
}

/// Engines `compare` can put side by side.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum CompareEngine {
    OdeFull,
    OdeHalf,
    Analytic,
    Adiabatic,
}

impl CompareEngine {
    pub const ALL: [CompareEngine; 4] = [
        CompareEngine::OdeFull,
        CompareEngine::OdeHalf,
        CompareEngine::Analytic,
        CompareEngine::Adiabatic,
    ];

    pub fn name(self) -> &'static str {
        match self {
            CompareEngine::OdeFull => "ode_full",
            CompareEngine::OdeHalf => "ode_half",
            CompareEngine::Analytic => "analytic",
            CompareEngine::Adiabatic => "adiabatic",
        }
    }
}

/// Contents of a `--config` file. Unknown keys are rejected.
#[allow(non_snake_case)]
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub profile: Option<Profile>,
    pub omega0_L: Option<f64>,
    pub delta0_L: Option<f64>,
    pub z_min_L: Option<f64>,
    pub z_max_L: Option<f64>,
    pub tol: Option<f64>,
    pub samples: Option<usize>,
    pub convention: Option<Convention>,
    pub engine: Option<Engine>,
    pub engines: Option<Vec<CompareEngine>>,
    pub nx: Option<usize>,
    pub ny: Option<usize>,
    pub omega_range: Option<[f64; 2]>,
    pub delta_range: Option<[f64; 2]>,
    pub out: Option<PathBuf>,
}

impl ConfigFile {
    pub fn load(path: &Path) -> Result<Self, String> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        serde_json::from_str(&text).map_err(|e| format!("config {}: {e}", path.display()))
    }
}

/// Flags shared by every subcommand; each overrides the same key of the config file.
#[derive(Debug, Clone, Default, Args)]
pub struct CommonArgs {
    /// JSON configuration file
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub profile: Option<Profile>,
    /// Peak coupling Ω₀L
    #[arg(long = "omega0-L", allow_negative_numbers = true)]
    pub omega0_l: Option<f64>,
    /// Phase mismatch Δ₀L
    #[arg(long = "delta0-L", allow_negative_numbers = true)]
    pub delta0_l: Option<f64>,
    #[arg(long = "zmin-L", alias = "z-min-L", allow_negative_numbers = true)]
    pub z_min_l: Option<f64>,
    #[arg(long = "zmax-L", alias = "z-max-L", allow_negative_numbers = true)]
    pub z_max_l: Option<f64>,
    /// Integrator tolerance
    #[arg(long)]
    pub tol: Option<f64>,
    /// Trajectory samples, including both ends
    #[arg(long)]
    pub samples: Option<usize>,
    #[arg(long, value_enum)]
    pub convention: Option<Convention>,
    #[arg(long, value_enum)]
    pub engine: Option<Engine>,
    /// Engines for `compare`, comma separated
    #[arg(long, value_enum, value_delimiter = ',')]
    pub engines: Option<Vec<CompareEngine>>,
    #[arg(long)]
    pub nx: Option<usize>,
    #[arg(long)]
    pub ny: Option<usize>,
    /// Ω₀L range as LO,HI
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub omega_range: Option<Vec<f64>>,
    /// Δ₀L range as LO,HI
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub delta_range: Option<Vec<f64>>,
    /// Output file (stdout when absent)
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Fully resolved and validated configuration.
#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub profile: Profile,
    pub omega0_l: Option<f64>,
    pub delta0_l: Option<f64>,
    pub z_min_l: f64,
    pub z_max_l: f64,
    pub tol: f64,
    pub samples: usize,
    pub convention: Convention,
    pub engine: Engine,
    pub engines: Vec<CompareEngine>,
    pub nx: usize,
    pub ny: usize,
    pub omega_range: [f64; 2],
    pub delta_range: [f64; 2],
    pub out: Option<PathBuf>,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            profile: Profile::Sech,
            omega0_l: None,
            delta0_l: None,
            z_min_l: -12.0,
            z_max_l: 12.0,
            tol: DEFAULT_TOL,
            samples: DEFAULT_SAMPLES,
            convention: Convention::Full,
            engine: Engine::Ode,
            engines: CompareEngine::ALL.to_vec(),
            nx: 61,
            ny: 51,
            omega_range: [0.0, 60.0],
            delta_range: [0.0, 5.0],
            out: None,
        }
    }
}

fn range(name: &str, v: &Option<Vec<f64>>) -> Result<Option<[f64; 2]>, String> {
    match v.as_deref() {
        None => Ok(None),
        Some(&[lo, hi]) => Ok(Some([lo, hi])),
        Some(other) => Err(format!("--{name} takes LO,HI, got {} values", other.len())),
    }
}

impl RunConfig {
    /// Defaults, then the config file, then flags.
    pub fn resolve(args: &CommonArgs) -> Result<Self, String> {
        let file = match &args.config {
            Some(path) => ConfigFile::load(path)?,
            None => ConfigFile::default(),
        };
        let d = RunConfig::default();
        let cfg = RunConfig {
            profile: args.profile.or(file.profile).unwrap_or(d.profile),
            omega0_l: args.omega0_l.or(file.omega0_L),
            delta0_l: args.delta0_l.or(file.delta0_L),
            z_min_l: args.z_min_l.or(file.z_min_L).unwrap_or(d.z_min_l),
            z_max_l: args.z_max_l.or(file.z_max_L).unwrap_or(d.z_max_l),
            tol: args.tol.or(file.tol).unwrap_or(d.tol),
            samples: args.samples.or(file.samples).unwrap_or(d.samples),
            convention: args.convention.or(file.convention).unwrap_or(d.convention),
            engine: args.engine.or(file.engine).unwrap_or(d.engine),
            engines: args.engines.clone().or(file.engines).unwrap_or(d.engines),
            nx: args.nx.or(file.nx).unwrap_or(d.nx),
            ny: args.ny.or(file.ny).unwrap_or(d.ny),
            omega_range: range("omega-range", &args.omega_range)?
                .or(file.omega_range)
                .unwrap_or(d.omega_range),
            delta_range: range("delta-range", &args.delta_range)?
                .or(file.delta_range)
                .unwrap_or(d.delta_range),
            out: args.out.clone().or(file.out),
        };
        cfg.validate()?;
        Ok(cfg)
    }

    /// Checks that do not depend on the subcommand.
    pub fn validate(&self) -> Result<(), String> {
        if let Some(w) = self.omega0_l {
            if !w.is_finite() || w < 0.0 {
                return Err(format!("omega0_L must be finite and ≥ 0, got {w}"));
            }
        }
        if let Some(d) = self.delta0_l {
            if !d.is_finite() || d < 0.0 {
                return Err(format!("delta0_L must be finite and ≥ 0, got {d}"));
            }
        }
        if !(self.z_min_l.is_finite()
            && self.z_max_l.is_finite()
            && self.z_min_l < 0.0
            && 0.0 < self.z_max_l)
        {
            return Err(format!(
                "domain [{}, {}] must satisfy z_min_L < 0 < z_max_L",
                self.z_min_l, self.z_max_l
            ));
        }
        if !(MIN_TOL..=MAX_TOL).contains(&self.tol) {
            return Err(format!(
                "tol must lie in [{MIN_TOL:e}, {MAX_TOL:e}], got {:e}",
                self.tol
            ));
        }
        if !(2..=MAX_SAMPLES).contains(&self.samples) {
            return Err(format!(
                "samples must lie in [2, {MAX_SAMPLES}], got {}",
                self.samples
            ));
        }
        for (name, n) in [("nx", self.nx), ("ny", self.ny)] {
            if !(2..=MAX_GRID).contains(&n) {
                return Err(format!("{name} must lie in [2, {MAX_GRID}], got {n}"));
            }
        }
        for (name, [lo, hi]) in [
            ("omega_range", self.omega_range),
            ("delta_range", self.delta_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && 0.0 <= lo && lo <= hi) {
                return Err(format!(
                    "{name} must be finite with 0 ≤ lo ≤ hi, got [{lo}, {hi}]"
                ));
            }
        }
        if self.engine == Engine::Analytic && self.profile == Profile::Gauss {
            return Err("the analytic engine exists only for the sech profile".into());
        }
        Ok(())
    }

    /// Extra checks for `compare`.
    pub fn validate_compare(&self) -> Result<(), String> {
        if self.engines.len() < 2 {
            return Err(format!(
                "compare needs at least two engines, got {}",
                self.engines.len()
            ));
        }
        if self.engines.contains(&CompareEngine::Analytic) && self.profile == Profile::Gauss {
            return Err("the analytic engine exists only for the sech profile".into());
        }
        Ok(())
    }

    /// (Ω₀L, Δ₀L) for single-point commands.
    pub fn point(&self) -> Result<(f64, f64), String> {
        match (self.omega0_l, self.delta0_l) {
            (Some(w), Some(d)) => Ok((w, d)),
            (None, _) => Err("omega0_L is required (config key or --omega0-L)".into()),
            (_, None) => Err("delta0_L is required (config key or --delta0-L)".into()),
        }
    }

    pub fn coupling(&self, omega0_l: f64) -> Result<CouplingProfile, ModelError> {
        match self.profile {
            Profile::Sech => CouplingProfile::sech(omega0_l, 1.0),
            Profile::Gauss => CouplingProfile::gaussian(omega0_l, 1.0),
        }
    }

    pub fn two_guide(
        &self,
        omega0_l: f64,
        delta0_l: f64,
        convention: Convention,
    ) -> Result<TwoGuideModel, ModelError> {
        Ok(TwoGuideModel::new(
            self.coupling(omega0_l)?,
            MismatchProfile::step_flip(delta0_l)?,
            self.z_min_l,
            self.z_max_l,
        )?
        .with_convention(convention.diagonal()))
    }

    pub fn three_guide(&self, omega0_l: f64, delta0_l: f64) -> Result<ThreeGuideModel, ModelError> {
        ThreeGuideModel::new(
            self.coupling(omega0_l)?,
            MismatchProfile::step_flip(delta0_l)?,
            self.z_min_l,
            self.z_max_l,
        )
    }

    /// Uniform axis with both ends hit exactly.
    pub fn axis(range: [f64; 2], n: usize) -> Vec<f64> {
        let [lo, hi] = range;
        (0..n)
            .map(|k| {
                if k + 1 == n {
                    hi
                } else {
                    lo + (hi - lo) * k as f64 / (n - 1) as f64
                }
            })
            .collect()
    }
}
