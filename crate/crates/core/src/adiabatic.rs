//! Adiabatic-basis description of the switch.
//!
//! Away from the flip the light follows the instantaneous eigenvectors of
//! the evolution matrix. The mismatch flip rotates that basis abruptly, so the
//! propagator is a sandwich of rotations and adiabatic phases:
//!
//! U = R(θf)·U_ad⁺·R⁻¹(θ₊₀)·R(θ₋₀)·U_ad⁻·R⁻¹(θᵢ).
//!
//! The amount of light that ends up in guide 2 depends only on the jump of θ
//! at the flip, which gives the universal Ω₀²/(Ω₀² + Δ₀²).

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{MismatchKind, Side, TwoGuideModel, Waveguides};
use crate::propagate::Propagator2;
use crate::quad;

/// Coupling at the domain ends, relative to Ω₀, below which the ends count as
/// uncoupled. A sech profile drops below it beyond |z| ≈ 11.5L.
pub const BOUNDARY_FRACTION: f64 = 2e-5;
/// Margin below which a model is reported as adiabatic.
pub const ADIABATIC_MARGIN: f64 = 0.25;
pub const MIN_MARGIN_SAMPLES: usize = 100;

const PHASE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AdiabaticError {
    #[error("the rotation sandwich needs a step-flip mismatch")]
    NotStepFlip,
    #[error(
        "coupling at the domain ends ({start:e}, {end:e}) is not negligible against Ω₀ = {omega0}"
    )]
    Boundary { start: f64, end: f64, omega0: f64 },
    #[error("degenerate parameters: {0}")]
    Degenerate(&'static str),
    #[error("Ω = Δ = 0 at every sample; margin undefined")]
    Division,
    #[error("need at least {MIN_MARGIN_SAMPLES} samples, got {0}")]
    TooFewSamples(usize),
}

/// ½ atan2(Ω, Δ) ∈ [0, π/2]; (0, 0) maps to 0.
pub fn mixing_angle(omega: f64, delta: f64) -> f64 {
    0.5 * omega.atan2(delta)
}

/// R(θ) = [[cos θ, sin θ], [−sin θ, cos θ]]; columns are the adiabatic states.
pub fn rotation(theta: f64) -> Propagator2 {
    let (s, c) = theta.sin_cos();
    let re = |x: f64| Complex64::new(x, 0.0);
    Propagator2::new([[re(c), re(s)], [re(-s), re(c)]], (0.0, 0.0))
}

/// Splitting and mixing angle of the instantaneous evolution matrix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AdiabaticFrame {
    pub epsilon: f64,
    pub theta: f64,
}

impl AdiabaticFrame {
    /// Frame at z, with the mismatch taken on `side` of the flip.
    ///
    /// The traceless part of the evolution matrix is [[−hΔ, Ω], [Ω, hΔ]] with
    /// h = 1 for the ±Δ diagonal; other conventions rescale Δ accordingly.
    pub fn at(model: &TwoGuideModel, z: f64, side: Side) -> Self {
        let omega = model.coupling_at(z);
        let delta = half_splitting(model) * model.mismatch().value_on(side);
        Self {
            epsilon: omega.hypot(delta),
            theta: mixing_angle(omega, delta),
        }
    }
}

fn half_splitting(model: &TwoGuideModel) -> f64 {
    0.5 * model.convention().splitting()
}

/// Largest value of the adiabaticity ratio found on the sample grid.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MarginReport {
    pub margin: f64,
    pub at_z: f64,
    /// Samples where Ω = Δ = 0 and the ratio is undefined.
    pub skipped: usize,
}

impl MarginReport {
    pub fn is_adiabatic(&self) -> bool {
        self.margin <= ADIABATIC_MARGIN
    }
}

/// max |Ω′Δ − Δ′Ω| / (Ω² + Δ²)^{3/2} over `n_samples` uniform points.
///
/// Δ is piecewise constant, so Δ′ = 0 on each half-line; z = 0 is left out
/// because the jump there is handled exactly by the rotation sandwich.
pub fn adiabaticity_margin(
    model: &TwoGuideModel,
    n_samples: usize,
) -> Result<MarginReport, AdiabaticError> {
    if n_samples < MIN_MARGIN_SAMPLES {
        return Err(AdiabaticError::TooFewSamples(n_samples));
    }
    let (z_min, z_max) = model.domain();
    let h = half_splitting(model);
    let step = (z_max - z_min) / (n_samples - 1) as f64;
    let mut best: Option<(f64, f64)> = None;
    let mut skipped = 0;
    for k in 0..n_samples {
        let z = if k + 1 == n_samples {
            z_max
        } else {
            z_min + k as f64 * step
        };
        if z == 0.0 {
            continue;
        }
        let omega = model.coupling_at(z);
        let delta = h * model.mismatch_at(z);
        let denom = (omega * omega + delta * delta).powf(1.5);
        if denom == 0.0 {
            skipped += 1;
            continue;
        }
        let ratio = (model.coupling().slope(z) * delta).abs() / denom;
        if best.is_none_or(|(m, _)| ratio > m) {
            best = Some((ratio, z));
        }
    }
    match best {
        Some((margin, at_z)) => Ok(MarginReport {
            margin,
            at_z,
            skipped,
        }),
        None => Err(AdiabaticError::Division),
    }
}

/// The rotation sandwich over the model's whole domain.
pub fn adiabatic_propagator(model: &TwoGuideModel) -> Result<Propagator2, AdiabaticError> {
    if model.mismatch().kind() != MismatchKind::StepFlip {
        return Err(AdiabaticError::NotStepFlip);
    }
    let omega0 = model.coupling().omega0();
    if omega0 == 0.0 {
        return Err(AdiabaticError::Degenerate("Ω₀ = 0, no coupling"));
    }
    if model.mismatch().delta0() == 0.0 {
        return Err(AdiabaticError::Degenerate(
            "Δ₀ = 0, adiabatic states undefined at the ends",
        ));
    }
    let (z_min, z_max) = model.domain();
    let (start, end) = (model.coupling_at(z_min), model.coupling_at(z_max));
    if start.max(end) >= BOUNDARY_FRACTION * omega0 {
        return Err(AdiabaticError::Boundary { start, end, omega0 });
    }

    let eps = |side: Side| move |z: f64| AdiabaticFrame::at(model, z, side).epsilon;
    let s_minus = quad::integrate(eps(Side::Negative), z_min, 0.0, PHASE_TOL);
    let s_plus = quad::integrate(eps(Side::Positive), 0.0, z_max, PHASE_TOL);
    let phases = |s: f64, interval: (f64, f64)| {
        let zero = Complex64::new(0.0, 0.0);
        Propagator2::new(
            [
                [Complex64::from_polar(1.0, s), zero],
                [zero, Complex64::from_polar(1.0, -s)],
            ],
            interval,
        )
    };

    // The ends are taken as fully uncoupled: θ is 0 or π/2 there.
    let h = half_splitting(model);
    let theta_i = mixing_angle(0.0, h * model.mismatch().value_on(Side::Negative));
    let theta_f = mixing_angle(0.0, h * model.mismatch().value_on(Side::Positive));
    let theta_minus = AdiabaticFrame::at(model, 0.0, Side::Negative).theta;
    let theta_plus = AdiabaticFrame::at(model, 0.0, Side::Positive).theta;

    let mut u = rotation(theta_f)
        * phases(s_plus, (0.0, z_max))
        * rotation(theta_plus).dagger()
        * rotation(theta_minus)
        * phases(s_minus, (z_min, 0.0))
        * rotation(theta_i).dagger();

    // Diagonals that are not traceless add a common phase exp(−i∫(d₁ + d₂)/2).
    let (w1, w2) = model.convention().weights();
    let mean = 0.5 * (w1 + w2);
    if mean != 0.0 {
        let integral =
            model.mismatch().accumulated_phase(z_max) - model.mismatch().accumulated_phase(z_min);
        let global = Complex64::from_polar(1.0, -mean * integral);
        for row in u.entries.iter_mut() {
            for cell in row.iter_mut() {
                *cell *= global;
            }
        }
    }
    u.interval = (z_min, z_max);
    Ok(u)
}

/// Ω₀²/(Ω₀² + Δ₀²).
pub fn adiabatic_final_intensity(omega0: f64, delta0: f64) -> Result<f64, AdiabaticError> {
    if omega0 == 0.0 && delta0 == 0.0 {
        return Err(AdiabaticError::Degenerate("Ω₀ = Δ₀ = 0"));
    }
    Ok(omega0 * omega0 / (omega0 * omega0 + delta0 * delta0))
}
