//! Grid evaluation shared by `sweep` and `compare`.
//!
//! Points are independent, so they are mapped in parallel and collected in
//! grid order; the output never depends on the thread count.

use rayon::prelude::*;

use super::config::{CompareEngine, Convention, Engine, RunConfig};
use crate::adiabatic::adiabatic_final_intensity;
use crate::analytic::{intensity_closed_form, StepSechParams};
use crate::propagate::final_transfer;

pub const THREADS_VAR: &str = "WGSWITCH_THREADS";

/// One grid point, Ω₀L-major.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridPoint {
    pub omega0_l: f64,
    pub delta0_l: f64,
}

pub fn grid(cfg: &RunConfig) -> Vec<GridPoint> {
    let deltas = RunConfig::axis(cfg.delta_range, cfg.ny);
    RunConfig::axis(cfg.omega_range, cfg.nx)
        .into_iter()
        .flat_map(|omega0_l| {
            deltas
                .iter()
                .map(move |&delta0_l| GridPoint { omega0_l, delta0_l })
        })
        .collect()
}

/// Final intensity in guide 2 from one engine.
pub fn intensity(cfg: &RunConfig, engine: CompareEngine, p: GridPoint) -> Result<f64, String> {
    let (w, d) = (p.omega0_l, p.delta0_l);
    match engine {
        CompareEngine::OdeFull | CompareEngine::OdeHalf => {
            let convention = if engine == CompareEngine::OdeFull {
                Convention::Full
            } else {
                Convention::Half
            };
            let model = cfg.two_guide(w, d, convention).map_err(|e| e.to_string())?;
            final_transfer(&model, cfg.tol).map_err(|e| e.to_string())
        }
        CompareEngine::Analytic => {
            let params = StepSechParams::new(w, d).map_err(|e| e.to_string())?;
            intensity_closed_form(&params).map_err(|e| e.to_string())
        }
        // Without coupling nothing is transferred, whatever the formula's 0/0 says.
        CompareEngine::Adiabatic if w == 0.0 => Ok(0.0),
        CompareEngine::Adiabatic => adiabatic_final_intensity(w, d).map_err(|e| e.to_string()),
    }
}

/// The compare engine that `sweep --engine` stands for.
pub fn sweep_engine(cfg: &RunConfig) -> CompareEngine {
    match (cfg.engine, cfg.convention) {
        (Engine::Ode, Convention::Full) => CompareEngine::OdeFull,
        (Engine::Ode, Convention::Half) => CompareEngine::OdeHalf,
        (Engine::Analytic, _) => CompareEngine::Analytic,
        (Engine::Adiabatic, _) => CompareEngine::Adiabatic,
    }
}

/// Worker count from the environment; `None` means rayon's default.
pub fn thread_cap() -> Result<Option<usize>, String> {
    match std::env::var(THREADS_VAR) {
        Err(_) => Ok(None),
        Ok(v) => match v.trim().parse::<usize>() {
            Ok(n) if n >= 1 => Ok(Some(n)),
            _ => Err(format!(
                "{THREADS_VAR} must be a positive integer, got {v:?}"
            )),
        },
    }
}

/// Maps `f` over `items` in order, on a bounded pool unless `serial`.
pub fn map_points<T, R, F>(
    items: &[T],
    serial: bool,
    threads: Option<usize>,
    f: F,
) -> Result<Vec<R>, String>
where
    T: Sync,
    R: Send,
    F: Fn(&T) -> R + Sync + Send,
{
    if serial || threads == Some(1) {
        return Ok(items.iter().map(f).collect());
    }
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Some(n) = threads {
        builder = builder.num_threads(n);
    }
    let pool = builder
        .build()
        .map_err(|e| format!("cannot start worker pool: {e}"))?;
    Ok(pool.install(|| items.par_iter().map(f).collect()))
}
