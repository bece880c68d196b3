//! The subcommands, as functions from a validated configuration to output text.

use serde::{Deserialize, Serialize};

use super::config::{CompareEngine, Convention, Engine, RunConfig};
use super::grid::{grid, intensity, map_points, sweep_engine, GridPoint};
use super::output::{table_csv, trajectory_csv, SWEEP_HEADER};
use crate::adiabatic::{
    adiabatic_final_intensity, adiabatic_propagator, adiabaticity_margin, ADIABATIC_MARGIN,
    MIN_MARGIN_SAMPLES,
};
use crate::model::Waveguides;
use crate::propagate::{evolve_two, final_transfer, AmplitudeState};
use crate::splitter::{run_splitter, run_splitter_from};

/// Region where the closed form is expected to hold.
pub fn in_adiabatic_corner(p: GridPoint) -> bool {
    p.omega0_l >= 20.0 && (1.0..=3.0).contains(&p.delta0_l)
}

#[derive(Debug)]
pub enum CommandError {
    Config(String),
    Numerical(String),
}

impl From<String> for CommandError {
    fn from(s: String) -> Self {
        CommandError::Config(s)
    }
}

fn numerical<E: std::fmt::Display>(e: E) -> CommandError {
    CommandError::Numerical(e.to_string())
}

/// Execution settings that never change results.
#[derive(Debug, Clone, Copy, Default)]
pub struct Exec {
    pub serial: bool,
    pub threads: Option<usize>,
}

/// Two-guide trajectory with all light in guide 1 at z_min.
pub fn cmd_run(cfg: &RunConfig) -> Result<String, CommandError> {
    if cfg.engine != Engine::Ode {
        return Err(CommandError::Config(
            "run integrates trajectories; use engine = ode".into(),
        ));
    }
    let (w, d) = cfg.point()?;
    let model = cfg
        .two_guide(w, d, cfg.convention)
        .map_err(|e| e.to_string())?;
    let traj = evolve_two(
        &model,
        &AmplitudeState::basis(0, cfg.z_min_l),
        cfg.tol,
        cfg.samples,
    )
    .map_err(numerical)?;
    Ok(trajectory_csv(&traj))
}

/// Splitter trajectory; light enters the middle guide unless `dark` asks for
/// the dark state (1, 0, −1)/√2.
pub fn cmd_splitter(cfg: &RunConfig, dark: bool) -> Result<(String, [f64; 3]), CommandError> {
    let (w, d) = cfg.point()?;
    let model = cfg.three_guide(w, d).map_err(|e| e.to_string())?;
    let traj = if dark {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let zero = num_complex::Complex64::new(0.0, 0.0);
        let initial = AmplitudeState::new(
            [
                num_complex::Complex64::new(r, 0.0),
                zero,
                num_complex::Complex64::new(-r, 0.0),
            ],
            cfg.z_min_l,
        );
        run_splitter_from(&model, &initial, cfg.tol, cfg.samples)
    } else {
        run_splitter(&model, cfg.tol, cfg.samples)
    }
    .map_err(numerical)?;
    Ok((trajectory_csv(&traj), traj.final_intensities()))
}

/// Grid table plus the number of points that failed (written as NaN).
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub points: Vec<GridPoint>,
    /// One row per point, one column per engine.
    pub values: Vec<Vec<f64>>,
    pub failures: usize,
}

fn evaluate(cfg: &RunConfig, engines: &[CompareEngine], exec: Exec) -> Result<Table, CommandError> {
    let points = grid(cfg);
    let results = map_points(&points, exec.serial, exec.threads, |&p| {
        engines
            .iter()
            .map(|&e| intensity(cfg, e, p))
            .collect::<Vec<_>>()
    })?;
    let mut failures = 0;
    let values = results
        .into_iter()
        .map(|row| {
            row.into_iter()
                .map(|r| {
                    r.unwrap_or_else(|_| {
                        failures += 1;
                        f64::NAN
                    })
                })
                .collect()
        })
        .collect();
    Ok(Table {
        points,
        values,
        failures,
    })
}

fn rows(table: &Table, with_diffs: bool) -> Vec<(f64, f64, Vec<f64>)> {
    table
        .points
        .iter()
        .zip(&table.values)
        .map(|(p, v)| {
            let mut cells = v.clone();
            if with_diffs {
                for (i, j) in pairs(v.len()) {
                    cells.push((v[i] - v[j]).abs());
                }
            }
            (p.omega0_l, p.delta0_l, cells)
        })
        .collect()
}

fn pairs(n: usize) -> Vec<(usize, usize)> {
    (0..n)
        .flat_map(|i| (i + 1..n).map(move |j| (i, j)))
        .collect()
}

pub fn sweep_table(cfg: &RunConfig, exec: Exec) -> Result<Table, CommandError> {
    evaluate(cfg, &[sweep_engine(cfg)], exec)
}

pub fn cmd_sweep(cfg: &RunConfig, exec: Exec) -> Result<(String, usize), CommandError> {
    let table = sweep_table(cfg, exec)?;
    Ok((
        table_csv(SWEEP_HEADER, &rows(&table, false)),
        table.failures,
    ))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DiffStats {
    pub max: f64,
    pub mean: f64,
    pub count: usize,
}

impl DiffStats {
    fn of(diffs: impl Iterator<Item = f64>) -> Option<Self> {
        let (mut max, mut sum, mut count) = (0.0f64, 0.0, 0);
        for d in diffs.filter(|d| d.is_finite()) {
            max = max.max(d);
            sum += d;
            count += 1;
        }
        (count > 0).then(|| DiffStats {
            max,
            mean: sum / count as f64,
            count,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PairSummary {
    pub a: String,
    pub b: String,
    pub full_plane: Option<DiffStats>,
    pub adiabatic_corner: Option<DiffStats>,
}

/// Which integrated diagonal the closed form matches better in the corner.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConventionVerdict {
    pub winner: String,
    pub corner_max_diff_full: f64,
    pub corner_max_diff_half: f64,
}

/// At Δ₀L = 0 the closed form gives 0 while the integration gives sin²(πΩ₀L).
#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResonantEntry {
    pub omega0_L: f64,
    pub analytic: f64,
    pub ode: f64,
    pub abs_diff: f64,
    pub sin2_pi_omega0_L: f64,
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CompareSummary {
    pub engines: Vec<String>,
    pub nx: usize,
    pub ny: usize,
    pub omega_range: [f64; 2],
    pub delta_range: [f64; 2],
    pub z_min_L: f64,
    pub z_max_L: f64,
    pub tol: f64,
    pub corner: String,
    pub failures: usize,
    pub pairs: Vec<PairSummary>,
    pub closed_form_convention: Option<ConventionVerdict>,
    pub resonant_ode_engine: Option<String>,
    pub resonant_row: Vec<ResonantEntry>,
    pub resonant_row_max_residual: Option<f64>,
}

pub fn compare_table(cfg: &RunConfig, exec: Exec) -> Result<(Table, CompareSummary), CommandError> {
    cfg.validate_compare()?;
    let engines = &cfg.engines;
    let table = evaluate(cfg, engines, exec)?;
    let column = |e: CompareEngine| engines.iter().position(|&x| x == e);
    let corner_max = |i: usize, j: usize| {
        DiffStats::of(
            table
                .points
                .iter()
                .zip(&table.values)
                .filter(|(p, _)| in_adiabatic_corner(**p))
                .map(|(_, v)| (v[i] - v[j]).abs()),
        )
    };

    let pair_summaries = pairs(engines.len())
        .into_iter()
        .map(|(i, j)| PairSummary {
            a: engines[i].name().into(),
            b: engines[j].name().into(),
            full_plane: DiffStats::of(table.values.iter().map(|v| (v[i] - v[j]).abs())),
            adiabatic_corner: corner_max(i, j),
        })
        .collect();

    let verdict = match (
        column(CompareEngine::Analytic),
        column(CompareEngine::OdeFull),
        column(CompareEngine::OdeHalf),
    ) {
        (Some(a), Some(f), Some(h)) => match (corner_max(a, f), corner_max(a, h)) {
            (Some(full), Some(half)) => Some(ConventionVerdict {
                winner: if half.max < full.max {
                    Convention::Half
                } else {
                    Convention::Full
                }
                .name()
                .into(),
                corner_max_diff_full: full.max,
                corner_max_diff_half: half.max,
            }),
            _ => None,
        },
        _ => None,
    };

    let resonant_ode = column(CompareEngine::OdeFull)
        .map(|i| (i, CompareEngine::OdeFull))
        .or_else(|| column(CompareEngine::OdeHalf).map(|i| (i, CompareEngine::OdeHalf)));
    let mut resonant_row = Vec::new();
    if let (Some(a), Some((o, _))) = (column(CompareEngine::Analytic), resonant_ode) {
        for (p, v) in table.points.iter().zip(&table.values) {
            if p.delta0_l == 0.0 {
                resonant_row.push(ResonantEntry {
                    omega0_L: p.omega0_l,
                    analytic: v[a],
                    ode: v[o],
                    abs_diff: (v[a] - v[o]).abs(),
                    sin2_pi_omega0_L: (std::f64::consts::PI * p.omega0_l).sin().powi(2),
                });
            }
        }
    }
    let resonant_row_max_residual = resonant_row
        .iter()
        .map(|r| (r.abs_diff - r.sin2_pi_omega0_L).abs())
        .filter(|x| x.is_finite())
        .reduce(f64::max);

    let summary = CompareSummary {
        engines: engines.iter().map(|e| e.name().to_string()).collect(),
        nx: cfg.nx,
        ny: cfg.ny,
        omega_range: cfg.omega_range,
        delta_range: cfg.delta_range,
        z_min_L: cfg.z_min_l,
        z_max_L: cfg.z_max_l,
        tol: cfg.tol,
        corner: "omega0_L >= 20, 1 <= delta0_L <= 3".into(),
        failures: table.failures,
        pairs: pair_summaries,
        closed_form_convention: verdict,
        resonant_ode_engine: resonant_ode.map(|(_, e)| e.name().to_string()),
        resonant_row,
        resonant_row_max_residual,
    };
    Ok((table, summary))
}

pub fn compare_header(engines: &[CompareEngine]) -> String {
    let mut header = String::from("omega0_L,delta0_L");
    for e in engines {
        header.push_str(&format!(",I2_{}", e.name()));
    }
    for (i, j) in pairs(engines.len()) {
        header.push_str(&format!(
            ",diff_{}_{}",
            engines[i].name(),
            engines[j].name()
        ));
    }
    header
}

pub fn cmd_compare(cfg: &RunConfig, exec: Exec) -> Result<(String, CompareSummary), CommandError> {
    let (table, summary) = compare_table(cfg, exec)?;
    Ok((
        table_csv(&compare_header(&cfg.engines), &rows(&table, true)),
        summary,
    ))
}

#[allow(non_snake_case)]
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AdiabaticReport {
    pub profile: String,
    pub convention: String,
    pub omega0_L: f64,
    pub delta0_L: f64,
    pub z_min_L: f64,
    pub z_max_L: f64,
    pub margin: f64,
    pub margin_at_z_over_L: f64,
    pub margin_skipped_samples: usize,
    pub margin_threshold: f64,
    pub adiabatic: bool,
    pub pulse_area: f64,
    pub predicted_I2: Option<f64>,
    pub sandwich_I2: Option<f64>,
    pub sandwich_error: Option<String>,
    pub ode_I2: f64,
    pub abs_diff: Option<f64>,
}

/// Adiabaticity margin, pulse area, the universal prediction and the
/// integrated result side by side.
pub fn cmd_check_adiabatic(cfg: &RunConfig) -> Result<AdiabaticReport, CommandError> {
    let (w, d) = cfg.point()?;
    let model = cfg
        .two_guide(w, d, cfg.convention)
        .map_err(|e| e.to_string())?;
    let margin =
        adiabaticity_margin(&model, cfg.samples.max(MIN_MARGIN_SAMPLES)).map_err(numerical)?;
    let effective_delta = 0.5 * model.convention().splitting() * d;
    let predicted = adiabatic_final_intensity(w, effective_delta).ok();
    let (sandwich, sandwich_error) = match adiabatic_propagator(&model) {
        Ok(u) => (Some(u.transfer_probability()), None),
        Err(e) => (None, Some(e.to_string())),
    };
    let ode = final_transfer(&model, cfg.tol).map_err(numerical)?;
    Ok(AdiabaticReport {
        profile: format!("{:?}", cfg.profile).to_lowercase(),
        convention: cfg.convention.name().into(),
        omega0_L: w,
        delta0_L: d,
        z_min_L: cfg.z_min_l,
        z_max_L: cfg.z_max_l,
        margin: margin.margin,
        margin_at_z_over_L: margin.at_z,
        margin_skipped_samples: margin.skipped,
        margin_threshold: ADIABATIC_MARGIN,
        adiabatic: margin.is_adiabatic(),
        pulse_area: model.pulse_area(cfg.z_min_l, cfg.z_max_l),
        predicted_I2: predicted,
        sandwich_I2: sandwich,
        sandwich_error,
        ode_I2: ode,
        abs_diff: predicted.map(|p| (p - ode).abs()),
    })
}
