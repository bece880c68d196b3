//! Three-guide beam splitter.
//!
//! Light enters the middle guide. The outer guides only see each other through
//! the middle one, so their antisymmetric combination (c₁ − c₃)/√2 is dark and
//! never moves; the symmetric one couples to the middle guide with √2·Ω. The
//! switch therefore moves the light into the bright state, i.e. equally into
//! both outer guides.

use std::f64::consts::FRAC_1_SQRT_2;

use num_complex::Complex64;

use crate::model::{DiagonalConvention, ThreeGuideModel, TwoGuideModel, Waveguides};
use crate::propagate::{evolve_three, AmplitudeState, PropagateError, Trajectory};

/// Amplitudes in the (bright, middle, dark) basis.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BrightDarkState {
    pub c_b: Complex64,
    pub c_2: Complex64,
    pub c_d: Complex64,
    pub z: f64,
}

impl BrightDarkState {
    pub fn norm_sqr(&self) -> f64 {
        self.c_b.norm_sqr() + self.c_2.norm_sqr() + self.c_d.norm_sqr()
    }
}

/// c_b = (c₁ + c₃)/√2, c_d = (c₁ − c₃)/√2. The change of basis is its own inverse.
pub fn to_bright_dark(s: &AmplitudeState<3>) -> BrightDarkState {
    let [c1, c2, c3] = s.amplitudes;
    BrightDarkState {
        c_b: (c1 + c3) * FRAC_1_SQRT_2,
        c_2: c2,
        c_d: (c1 - c3) * FRAC_1_SQRT_2,
        z: s.z,
    }
}

pub fn from_bright_dark(s: &BrightDarkState) -> AmplitudeState<3> {
    AmplitudeState::new(
        [
            (s.c_b + s.c_d) * FRAC_1_SQRT_2,
            s.c_2,
            (s.c_b - s.c_d) * FRAC_1_SQRT_2,
        ],
        s.z,
    )
}

/// The (bright, middle) pair as a two-guide problem: coupling √2·Ω and
/// diagonal (0, Δ).
pub fn reduced_two_level(m: &ThreeGuideModel) -> TwoGuideModel {
    let coupling = m
        .coupling()
        .scaled(std::f64::consts::SQRT_2)
        .expect("scaling a valid coupling by √2 stays valid");
    TwoGuideModel::new(coupling, *m.mismatch(), m.z_min(), m.z_max())
        .expect("domain was validated by the three-guide model")
        .with_convention(DiagonalConvention::Offset)
}

/// Light launched into the middle guide at z_min.
pub fn run_splitter(
    m: &ThreeGuideModel,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<3>, PropagateError> {
    run_splitter_from(m, &AmplitudeState::basis(1, m.z_min()), tol, n_samples)
}

/// Same device with an arbitrary input, e.g. a pure dark state.
pub fn run_splitter_from(
    m: &ThreeGuideModel,
    initial: &AmplitudeState<3>,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<3>, PropagateError> {
    evolve_three(m, initial, tol, n_samples)
}

/// Sends the ideal bright state (1, 0, 1)/√2 backwards through the device and
/// returns the intensity collected in the middle guide.
pub fn reverse_run(m: &ThreeGuideModel, tol: f64) -> Result<f64, PropagateError> {
    let back = m.reversed();
    let r = Complex64::new(FRAC_1_SQRT_2, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let traj = evolve_three(
        &back,
        &AmplitudeState::new([r, zero, r], back.z_min()),
        tol,
        2,
    )?;
    Ok(traj.final_intensities()[1])
}
