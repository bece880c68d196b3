//! Exact solution of the step-sech coupler.
//!
//! For Ω(z) = Ω₀ sech(z/L) the substitution t = ½[1 + tanh(z/L)] turns the
//! interaction-picture equations into the Gauss hypergeometric equation with
//! parameters (α, −α, γ), α = Ω₀L and γ = ½ + iΔ₀L/2. The half-line
//! propagator is then fixed by two numbers, a = F(α, −α; γ; ½) and
//! b = −iα/(2γ)·F(1 + α, 1 − α; 1 + γ; ½), and the second half follows from
//! the sign flip of Δ.
//!
//! a and b are computed from reciprocal-gamma products and, whenever the
//! direct series at t = ½ is well conditioned, checked against it.
//!
//! These formulas describe the interaction picture with D′ = Δ, i.e. the
//! [`DiagonalConvention::HalfDelta`](crate::model::DiagonalConvention) model.

use std::f64::consts::PI;

use num_complex::Complex64;
use thiserror::Error;

use crate::numkernel::{
    ccos_pi, complex_gamma, complex_log_gamma, hyp2f1_with_error, is_gamma_pole, NumError,
};
use crate::propagate::Propagator2;

/// Agreement required between the gamma-product and series forms of a, b.
pub const SERIES_CHECK_TOL: f64 = 1e-9;
/// Series error estimate above which the cross-check is skipped.
const SERIES_TRUST: f64 = 1e-10;
/// Agreement required between the φ form and |2Re(ab*)|² of the intensity.
pub const INTENSITY_CHECK_TOL: f64 = 1e-9;
/// α/Δ₀L ratio above which the large-coupling expansion is considered in regime.
pub const ASYMPTOTIC_REGIME_RATIO: f64 = 5.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum AnalyticError {
    #[error(transparent)]
    Num(#[from] NumError),
    #[error("invalid parameters: α = {alpha}, Δ₀L = {delta_l} (both must be finite and ≥ 0)")]
    Params { alpha: f64, delta_l: f64 },
    #[error("{what}: independent evaluations disagree by {diff:e}")]
    CrossValidation { what: &'static str, diff: f64 },
    #[error("closed-form intensity {0} outside [0, 1]")]
    OutOfRange(f64),
}

/// Dimensionless parameters (α, Δ₀L) = (Ω₀L, Δ₀L).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepSechParams {
    alpha: f64,
    delta_l: f64,
}

impl StepSechParams {
    pub fn new(alpha: f64, delta_l: f64) -> Result<Self, AnalyticError> {
        if alpha.is_finite() && delta_l.is_finite() && alpha >= 0.0 && delta_l >= 0.0 {
            Ok(Self { alpha, delta_l })
        } else {
            Err(AnalyticError::Params { alpha, delta_l })
        }
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn delta_l(&self) -> f64 {
        self.delta_l
    }

    /// γ = ½ + iΔ₀L/2.
    pub fn gamma(&self) -> Complex64 {
        Complex64::new(0.5, 0.5 * self.delta_l)
    }
}

/// The numbers that determine both half-line propagators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPropagatorEntries {
    pub a: Complex64,
    pub b: Complex64,
    pub xi: Complex64,
    pub eta: Complex64,
    /// max(|Δa|, |Δb|) against the direct series, when that was trustworthy.
    pub series_check: Option<f64>,
}

/// 1/(Γ(u)Γ(v)), zero on a pole of either factor.
fn recip_gamma_product(u: Complex64, v: Complex64) -> Result<Complex64, NumError> {
    if is_gamma_pole(u) || is_gamma_pole(v) {
        return Ok(Complex64::new(0.0, 0.0));
    }
    Ok((-(complex_log_gamma(u)? + complex_log_gamma(v)?)).exp())
}

/// a and b from the direct series, with an absolute error estimate.
fn series_entries(p: &StepSechParams) -> Option<(Complex64, Complex64, f64)> {
    let one = Complex64::new(1.0, 0.0);
    let alpha = Complex64::new(p.alpha, 0.0);
    let gamma = p.gamma();
    let (a, ea) = hyp2f1_with_error(alpha, -alpha, gamma, 0.5).ok()?;
    let (f, ef) = hyp2f1_with_error(one + alpha, one - alpha, one + gamma, 0.5).ok()?;
    let prefactor = Complex64::new(0.0, -p.alpha) / (2.0 * gamma);
    Some((a, prefactor * f, ea.max(prefactor.norm() * ef)))
}

pub fn half_propagator_entries(p: &StepSechParams) -> Result<HalfPropagatorEntries, AnalyticError> {
    let gamma = p.gamma();
    let half_alpha = 0.5 * p.alpha;
    let q = Complex64::new(0.0, 0.25 * p.delta_l);
    let xi = recip_gamma_product(q + 0.25 + half_alpha, q + 0.75 - half_alpha)?;
    let eta = recip_gamma_product(q + 0.75 + half_alpha, q + 0.25 - half_alpha)?;
    let prefactor = PI.sqrt() * (-gamma * 2f64.ln()).exp() * complex_gamma(gamma)?;
    let a = prefactor * (xi + eta);
    let b = Complex64::new(0.0, -1.0) * prefactor * (xi - eta);

    let series_check = match series_entries(p) {
        Some((a_s, b_s, err)) if err <= SERIES_TRUST => {
            let diff = (a - a_s).norm().max((b - b_s).norm());
            if diff > SERIES_CHECK_TOL {
                return Err(AnalyticError::CrossValidation {
                    what: "half propagator (gamma products vs series)",
                    diff,
                });
            }
            Some(diff)
        }
        _ => None,
    };
    Ok(HalfPropagatorEntries {
        a,
        b,
        xi,
        eta,
        series_check,
    })
}

/// U(½, 0) = [[a, −b*], [b, a*]]: from z → −∞ to the flip point.
pub fn half_propagator(p: &StepSechParams) -> Result<Propagator2, AnalyticError> {
    let e = half_propagator_entries(p)?;
    Ok(Propagator2::new(
        [[e.a, -e.b.conj()], [e.b, e.a.conj()]],
        (f64::NEG_INFINITY, 0.0),
    ))
}

/// U(1, ½) = [[a, −b], [b*, a*]]: from the flip point to z → +∞, as obtained
/// from the half-line solution by the sign change of Δ.
pub fn second_half_propagator(p: &StepSechParams) -> Result<Propagator2, AnalyticError> {
    let e = half_propagator_entries(p)?;
    Ok(Propagator2::new(
        [[e.a, -e.b], [e.b.conj(), e.a.conj()]],
        (0.0, f64::INFINITY),
    ))
}

/// U(1, 0) = [[a² − b², −2Re(ab*)], [2Re(ab*), (a² − b²)*]].
pub fn full_propagator(p: &StepSechParams) -> Result<Propagator2, AnalyticError> {
    let e = half_propagator_entries(p)?;
    let diag = e.a * e.a - e.b * e.b;
    let off = Complex64::new(2.0 * (e.a * e.b.conj()).re, 0.0);
    let full = Propagator2::new(
        [[diag, -off], [off, diag.conj()]],
        (f64::NEG_INFINITY, f64::INFINITY),
    );
    let first = Propagator2::new(
        [[e.a, -e.b.conj()], [e.b, e.a.conj()]],
        (f64::NEG_INFINITY, 0.0),
    );
    let second = Propagator2::new(
        [[e.a, -e.b], [e.b.conj(), e.a.conj()]],
        (0.0, f64::INFINITY),
    );
    let diff = (second * first).max_abs_diff(&full);
    if diff > 1e-12 {
        return Err(AnalyticError::CrossValidation {
            what: "full propagator vs product of halves",
            diff,
        });
    }
    Ok(full)
}

/// φ = 2 arg[Γ(¼ − α/2 − iΔ₀L/4) Γ(¼ + α/2 + iΔ₀L/4)] in (−2π, 2π], for any
/// real Δ₀L.
pub fn phase_phi_at(alpha: f64, delta_l: f64) -> Result<f64, AnalyticError> {
    let q = Complex64::new(0.25 + 0.5 * alpha, 0.25 * delta_l);
    let u = Complex64::new(0.5, 0.0) - q;
    let arg = (complex_log_gamma(u)? + complex_log_gamma(q)?).im;
    let mut wrapped = arg.rem_euclid(2.0 * PI);
    if wrapped > PI {
        wrapped -= 2.0 * PI;
    }
    Ok(2.0 * wrapped)
}

pub fn phase_phi(p: &StepSechParams) -> Result<f64, AnalyticError> {
    phase_phi_at(p.alpha, p.delta_l)
}

/// I₂ = [sech(πΔ₀L/2) Im(e^{iφ} cos(πα + iπΔ₀L/2))]², checked against |2Re(ab*)|².
///
/// Where φ is undefined (a gamma pole at Δ₀L = 0) the |2Re(ab*)|² form is returned.
pub fn intensity_closed_form(p: &StepSechParams) -> Result<f64, AnalyticError> {
    let e = half_propagator_entries(p)?;
    let via_ab = (2.0 * (e.a * e.b.conj()).re).powi(2);
    let value = match phase_phi(p) {
        Ok(phi) => {
            let cos = ccos_pi(Complex64::new(p.alpha, 0.5 * p.delta_l));
            let im = (Complex64::from_polar(1.0, phi) * cos).im;
            let value = (im / (0.5 * PI * p.delta_l).cosh()).powi(2);
            let diff = (value - via_ab).abs();
            if diff > INTENSITY_CHECK_TOL {
                return Err(AnalyticError::CrossValidation {
                    what: "closed-form intensity vs |2Re(ab*)|²",
                    diff,
                });
            }
            value
        }
        Err(AnalyticError::Num(NumError::Pole(_))) => via_ab,
        Err(other) => return Err(other),
    };
    if !(0.0..=1.0 + 1e-9).contains(&value) {
        return Err(AnalyticError::OutOfRange(value));
    }
    Ok(value)
}

/// Large-coupling estimate together with a flag saying whether (α, Δ₀L) is
/// in the regime it was derived for.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AsymptoticEstimate {
    pub value: f64,
    pub in_regime: bool,
}

/// I₂ ≈ Ω₀²/(Ω₀² + Δ₀²)·[1 − (2Δ₀/Ω₀)e^{−πΔ₀L/2} cos(πΩ₀L/2)]², remainder dropped.
/// Not clamped: the estimate may exceed 1.
pub fn intensity_asymptotic(p: &StepSechParams) -> AsymptoticEstimate {
    let (alpha, delta) = (p.alpha, p.delta_l);
    let in_regime = delta == 0.0 || alpha > ASYMPTOTIC_REGIME_RATIO * delta;
    if alpha == 0.0 && delta == 0.0 {
        return AsymptoticEstimate {
            value: 0.0,
            in_regime,
        };
    }
    // Same expression with Ω₀ multiplied through, finite at α = 0.
    let bracket = alpha - 2.0 * delta * (-0.5 * PI * delta).exp() * (0.5 * PI * alpha).cos();
    AsymptoticEstimate {
        value: bracket * bracket / (alpha * alpha + delta * delta),
        in_regime,
    }
}
