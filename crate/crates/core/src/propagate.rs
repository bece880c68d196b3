//! Numerical integration of the coupled-mode equations i dC/dz = H(z) C.
//!
//! This is the reference engine: every closed form and adiabatic estimate in
//! the crate is checked against it. Integration is always split at z = 0 so
//! that no step straddles the mismatch flip.

use std::ops::Mul;

use num_complex::Complex64;
use thiserror::Error;

use crate::model::{Frame, Side, ThreeGuideModel, TwoGuideModel, Waveguides};
use crate::ode::{Dop853, OdeError};

pub const DEFAULT_TOL: f64 = 1e-12;
pub const DEFAULT_SAMPLES: usize = 2001;
pub const MIN_TOL: f64 = 1e-14;
pub const MAX_TOL: f64 = 1e-6;

const MINUS_I: Complex64 = Complex64 { re: 0.0, im: -1.0 };

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PropagateError {
    #[error(transparent)]
    Integration(#[from] OdeError),
    #[error("invalid propagation request: {0}")]
    Config(String),
}

/// Modal amplitudes at a position z.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AmplitudeState<const N: usize> {
    pub amplitudes: [Complex64; N],
    pub z: f64,
}

impl<const N: usize> AmplitudeState<N> {
    pub fn new(amplitudes: [Complex64; N], z: f64) -> Self {
        Self { amplitudes, z }
    }

    /// All light in guide `k` (0-based).
    pub fn basis(k: usize, z: f64) -> Self {
        let mut amplitudes = [Complex64::new(0.0, 0.0); N];
        amplitudes[k] = Complex64::new(1.0, 0.0);
        Self { amplitudes, z }
    }

    /// Iₖ = |cₖ|².
    pub fn intensities(&self) -> [f64; N] {
        self.amplitudes.map(|c| c.norm_sqr())
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amplitudes.iter().map(|c| c.norm_sqr()).sum()
    }
}

/// Uniformly sampled evolution over the model domain.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory<const N: usize> {
    pub samples: Vec<AmplitudeState<N>>,
}

impl<const N: usize> Trajectory<N> {
    pub fn final_state(&self) -> &AmplitudeState<N> {
        self.samples
            .last()
            .expect("trajectory has at least two samples")
    }

    pub fn final_intensities(&self) -> [f64; N] {
        self.final_state().intensities()
    }

    /// max over samples of |‖C‖² − ‖C(z_min)‖²|.
    pub fn max_norm_drift(&self) -> f64 {
        let n0 = self.samples[0].norm_sqr();
        self.samples
            .iter()
            .map(|s| (s.norm_sqr() - n0).abs())
            .fold(0.0, f64::max)
    }
}

/// 2×2 transfer matrix over an interval; column j is the image of basis state j.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Propagator2 {
    pub entries: [[Complex64; 2]; 2],
    pub interval: (f64, f64),
}

impl Propagator2 {
    pub fn new(entries: [[Complex64; 2]; 2], interval: (f64, f64)) -> Self {
        Self { entries, interval }
    }

    pub fn identity(interval: (f64, f64)) -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        Self::new([[one, zero], [zero, one]], interval)
    }

    pub fn dagger(&self) -> Self {
        let e = &self.entries;
        Self::new(
            [
                [e[0][0].conj(), e[1][0].conj()],
                [e[0][1].conj(), e[1][1].conj()],
            ],
            (self.interval.1, self.interval.0),
        )
    }

    /// max |(U†U − I)ᵢⱼ|.
    pub fn unitarity_defect(&self) -> f64 {
        let p = self.dagger() * *self;
        let mut defect: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                let target = if i == j { 1.0 } else { 0.0 };
                defect = defect.max((p.entries[i][j] - target).norm());
            }
        }
        defect
    }

    /// Light in guide 2 after injecting into guide 1: |U₂₁|², equal to |U₁₂|² for a unitary U.
    pub fn transfer_probability(&self) -> f64 {
        self.entries[1][0].norm_sqr()
    }

    pub fn apply(&self, c: [Complex64; 2]) -> [Complex64; 2] {
        let e = &self.entries;
        [
            e[0][0] * c[0] + e[0][1] * c[1],
            e[1][0] * c[0] + e[1][1] * c[1],
        ]
    }

    /// max |Aᵢⱼ − Bᵢⱼ|.
    pub fn max_abs_diff(&self, other: &Propagator2) -> f64 {
        let mut d: f64 = 0.0;
        for i in 0..2 {
            for j in 0..2 {
                d = d.max((self.entries[i][j] - other.entries[i][j]).norm());
            }
        }
        d
    }
}

/// `later * earlier` composes propagation over consecutive intervals.
impl Mul for Propagator2 {
    type Output = Propagator2;

    fn mul(self, rhs: Propagator2) -> Propagator2 {
        let (a, b) = (&self.entries, &rhs.entries);
        let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in out.iter_mut().enumerate() {
            for (j, cell) in row.iter_mut().enumerate() {
                *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Propagator2::new(out, (rhs.interval.0, self.interval.1))
    }
}

/// A linear system i dC/dz = H(z) C that is smooth on each side of z = 0.
pub trait CoupledSystem<const N: usize> {
    /// dC/dz at z, evaluated with the one-sided Hamiltonian of `side`.
    fn derivative(&self, z: f64, side: Side, c: &[Complex64; N]) -> [Complex64; N];
    fn domain(&self) -> (f64, f64);
}

impl CoupledSystem<2> for TwoGuideModel {
    fn derivative(&self, z: f64, side: Side, c: &[Complex64; 2]) -> [Complex64; 2] {
        let omega = self.coupling_at(z);
        match self.frame() {
            Frame::Diagonal => {
                let (d1, d2) = self.diagonal_on(side);
                [
                    MINUS_I * (c[0] * d1 + c[1] * omega),
                    MINUS_I * (c[0] * omega + c[1] * d2),
                ]
            }
            Frame::Interaction => {
                let phase = Complex64::from_polar(omega, -self.interaction_phase(z));
                [MINUS_I * phase * c[1], MINUS_I * phase.conj() * c[0]]
            }
        }
    }

    fn domain(&self) -> (f64, f64) {
        Waveguides::domain(self)
    }
}

impl CoupledSystem<3> for ThreeGuideModel {
    fn derivative(&self, z: f64, side: Side, c: &[Complex64; 3]) -> [Complex64; 3] {
        let omega = self.coupling_at(z);
        let delta = self.mismatch().value_on(side);
        [
            MINUS_I * omega * c[1],
            MINUS_I * (omega * (c[0] + c[2]) + delta * c[1]),
            MINUS_I * omega * c[1],
        ]
    }

    fn domain(&self) -> (f64, f64) {
        Waveguides::domain(self)
    }
}

fn check_tol(tol: f64) -> Result<(), PropagateError> {
    if (MIN_TOL..=MAX_TOL).contains(&tol) {
        Ok(())
    } else {
        Err(PropagateError::Config(format!(
            "tolerance {tol:e} outside [{MIN_TOL:e}, {MAX_TOL:e}]"
        )))
    }
}

fn advance<const N: usize, S: CoupledSystem<N>>(
    system: &S,
    solver: &mut Dop853,
    z_a: f64,
    z_b: f64,
    c: [Complex64; N],
) -> Result<[Complex64; N], PropagateError> {
    let mut c = c;
    let pieces: &[(f64, f64)] = if z_a < 0.0 && 0.0 < z_b {
        &[(z_a, 0.0), (0.0, z_b)]
    } else {
        &[(z_a, z_b)]
    };
    for &(a, b) in pieces {
        let side = Side::of_segment(a, b);
        let f = |z: f64, y: &[Complex64; N]| system.derivative(z, side, y);
        c = solver.integrate(&f, a, b, c)?;
    }
    Ok(c)
}

/// Carries amplitudes `c` from `z_a` to `z_b` (z_a ≤ z_b), splitting at 0.
pub fn evolve_between<const N: usize, S: CoupledSystem<N>>(
    system: &S,
    c: [Complex64; N],
    z_a: f64,
    z_b: f64,
    tol: f64,
) -> Result<[Complex64; N], PropagateError> {
    check_tol(tol)?;
    if !(z_a <= z_b) {
        return Err(PropagateError::Config(format!(
            "interval [{z_a}, {z_b}] is reversed"
        )));
    }
    advance(system, &mut Dop853::new(tol), z_a, z_b, c)
}

/// Samples the evolution of `initial` (given at z_min) at `n_samples`
/// uniformly spaced points covering the whole domain.
pub fn evolve<const N: usize, S: CoupledSystem<N>>(
    system: &S,
    initial: &AmplitudeState<N>,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<N>, PropagateError> {
    check_tol(tol)?;
    let (z_min, z_max) = system.domain();
    if n_samples < 2 {
        return Err(PropagateError::Config(format!(
            "need at least 2 samples, got {n_samples}"
        )));
    }
    if (initial.z - z_min).abs() > 1e-12 * z_min.abs().max(1.0) {
        return Err(PropagateError::Config(format!(
            "initial state given at z = {}, domain starts at {z_min}",
            initial.z
        )));
    }
    if (initial.norm_sqr() - 1.0).abs() > 1e-10 {
        return Err(PropagateError::Config(format!(
            "initial state has norm² {}, expected 1",
            initial.norm_sqr()
        )));
    }

    let mut solver = Dop853::new(tol);
    let step = (z_max - z_min) / (n_samples - 1) as f64;
    let mut samples = Vec::with_capacity(n_samples);
    let mut c = initial.amplitudes;
    let mut z = z_min;
    samples.push(AmplitudeState::new(c, z_min));
    for k in 1..n_samples {
        let z_next = if k + 1 == n_samples {
            z_max
        } else {
            z_min + k as f64 * step
        };
        c = advance(system, &mut solver, z, z_next, c)?;
        z = z_next;
        samples.push(AmplitudeState::new(c, z));
    }
    Ok(Trajectory { samples })
}

/// Two-guide trajectory from z_min to z_max.
pub fn evolve_two(
    model: &TwoGuideModel,
    initial: &AmplitudeState<2>,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<2>, PropagateError> {
    evolve(model, initial, tol, n_samples)
}

/// Three-guide trajectory from z_min to z_max.
pub fn evolve_three(
    model: &ThreeGuideModel,
    initial: &AmplitudeState<3>,
    tol: f64,
    n_samples: usize,
) -> Result<Trajectory<3>, PropagateError> {
    evolve(model, initial, tol, n_samples)
}

/// Final intensity in guide 2 after injecting into guide 1 at z_min.
pub fn final_transfer(model: &TwoGuideModel, tol: f64) -> Result<f64, PropagateError> {
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let c = evolve_between(model, [one, zero], model.z_min(), model.z_max(), tol)?;
    Ok(c[1].norm_sqr())
}

/// Numerical transfer matrix over [z_a, z_b] ⊆ [z_min, z_max].
pub fn propagator_numeric(
    model: &TwoGuideModel,
    z_a: f64,
    z_b: f64,
    tol: f64,
) -> Result<Propagator2, PropagateError> {
    if !(model.z_min() <= z_a && z_a < z_b && z_b <= model.z_max()) {
        return Err(PropagateError::Config(format!(
            "interval [{z_a}, {z_b}] not inside [{}, {}]",
            model.z_min(),
            model.z_max()
        )));
    }
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let col0 = evolve_between(model, [one, zero], z_a, z_b, tol)?;
    let col1 = evolve_between(model, [zero, one], z_a, z_b, tol)?;
    Ok(Propagator2::new(
        [[col0[0], col1[0]], [col0[1], col1[1]]],
        (z_a, z_b),
    ))
}

#[cfg(test)]
mod tests {
    use std::f64::consts::PI;

    use super::*;
    use crate::model::{DiagonalConvention, MismatchProfile};

    fn two(omega0_l: f64, delta0_l: f64) -> TwoGuideModel {
        TwoGuideModel::step_sech(omega0_l, delta0_l).unwrap()
    }

    #[test]
    fn resonant_quarter_area() {
        let m = two(0.25, 0.0).with_mismatch(MismatchProfile::constant(0.0).unwrap());
        let traj = evolve_two(&m, &AmplitudeState::basis(0, -12.0), DEFAULT_TOL, 101).unwrap();
        let i2 = traj.final_intensities()[1];
        assert!((i2 - (PI * 0.25).sin().powi(2)).abs() < 1e-4);
        assert!((i2 - 0.5).abs() < 1e-4);
    }

    #[test]
    fn uncoupled_guides_keep_their_light() {
        let m = two(0.0, 3.0);
        let traj = evolve_two(&m, &AmplitudeState::basis(0, -12.0), DEFAULT_TOL, 11).unwrap();
        for s in &traj.samples {
            assert!((s.intensities()[0] - 1.0).abs() < 1e-11);
            assert!(s.intensities()[1] < 1e-28);
        }
    }

    #[test]
    fn figure_two_parameters_switch_the_light() {
        let traj = evolve_two(
            &two(50.0, 2.0),
            &AmplitudeState::basis(0, -12.0),
            DEFAULT_TOL,
            201,
        )
        .unwrap();
        assert!((traj.final_intensities()[1] - 0.998).abs() < 0.005);
    }

    #[test]
    fn sample_grid_covers_domain() {
        let traj = evolve_two(&two(1.0, 1.0), &AmplitudeState::basis(0, -12.0), 1e-10, 11).unwrap();
        assert_eq!(traj.samples.len(), 11);
        assert_eq!(traj.samples[0].z, -12.0);
        assert_eq!(traj.samples[10].z, 12.0);
        assert!(traj.samples.windows(2).all(|w| w[0].z < w[1].z));
        assert!(traj.samples.iter().any(|s| s.z == 0.0));
    }

    #[test]
    fn dark_state_is_stationary() {
        let m = ThreeGuideModel::step_sech(7.0, 2.0).unwrap();
        let r = 0.5f64.sqrt();
        let dark = AmplitudeState::new(
            [
                Complex64::new(r, 0.0),
                Complex64::new(0.0, 0.0),
                Complex64::new(-r, 0.0),
            ],
            -12.0,
        );
        let traj = evolve_three(&m, &dark, DEFAULT_TOL, 51).unwrap();
        for s in &traj.samples {
            let i = s.intensities();
            assert!((i[0] - 0.5).abs() < 1e-9 && i[1] < 1e-9 && (i[2] - 0.5).abs() < 1e-9);
        }
    }

    #[test]
    fn middle_guide_without_coupling() {
        let m = ThreeGuideModel::step_sech(0.0, 2.0).unwrap();
        let traj = evolve_three(&m, &AmplitudeState::basis(1, -12.0), DEFAULT_TOL, 5).unwrap();
        assert!((traj.final_intensities()[1] - 1.0).abs() < 1e-11);
    }

    #[test]
    fn three_guide_splitter_parameters() {
        let m = ThreeGuideModel::step_sech(50.0, 2.0).unwrap();
        let traj = evolve_three(&m, &AmplitudeState::basis(1, -12.0), DEFAULT_TOL, 11).unwrap();
        let [i1, _, i3] = traj.final_intensities();
        assert!((i1 - 0.5).abs() < 0.01 && (i3 - 0.5).abs() < 0.01);
    }

    #[test]
    fn numeric_propagator_examples() {
        let id = propagator_numeric(&two(0.0, 0.0), -12.0, 12.0, DEFAULT_TOL).unwrap();
        assert!(id.max_abs_diff(&Propagator2::identity((-12.0, 12.0))) < 1e-14);

        let phases = propagator_numeric(&two(0.0, 1.5), -12.0, 12.0, DEFAULT_TOL).unwrap();
        assert!(phases.entries[0][1].norm() < 1e-14 && phases.entries[1][0].norm() < 1e-14);
        assert!((phases.entries[0][0].norm() - 1.0).abs() < 1e-12);
        // diag(−Δ, Δ) over ±12 with the flip: net phase cancels.
        assert!((phases.entries[0][0] - 1.0).norm() < 1e-10);
    }

    #[test]
    fn numeric_propagator_is_unitary() {
        for (a, d) in [(0.5, 0.3), (2.0, 4.0), (5.0, 1.0)] {
            let u = propagator_numeric(&two(a, d), -12.0, 12.0, DEFAULT_TOL).unwrap();
            assert!(
                u.unitarity_defect() <= 1e-10,
                "({a}, {d}): {}",
                u.unitarity_defect()
            );
            assert!((u.entries[0][1].norm_sqr() - u.entries[1][0].norm_sqr()).abs() < 1e-9);
        }
    }

    #[test]
    fn composition_over_the_flip() {
        let m = two(2.0, 1.0).with_convention(DiagonalConvention::HalfDelta);
        let left = propagator_numeric(&m, -12.0, 0.0, DEFAULT_TOL).unwrap();
        let right = propagator_numeric(&m, 0.0, 12.0, DEFAULT_TOL).unwrap();
        let whole = propagator_numeric(&m, -12.0, 12.0, DEFAULT_TOL).unwrap();
        assert!((right * left).max_abs_diff(&whole) < 1e-10);
        assert_eq!((right * left).interval, (-12.0, 12.0));
    }

    #[test]
    fn invalid_requests() {
        let m = two(1.0, 1.0);
        let start = AmplitudeState::basis(0, -12.0);
        assert!(matches!(
            evolve_two(&m, &start, 1e-3, 10),
            Err(PropagateError::Config(_))
        ));
        assert!(matches!(
            evolve_two(&m, &start, 1e-10, 1),
            Err(PropagateError::Config(_))
        ));
        let late = AmplitudeState::basis(0, -5.0);
        assert!(matches!(
            evolve_two(&m, &late, 1e-10, 10),
            Err(PropagateError::Config(_))
        ));
        let unnormalized =
            AmplitudeState::new([Complex64::new(2.0, 0.0), Complex64::new(0.0, 0.0)], -12.0);
        assert!(matches!(
            evolve_two(&m, &unnormalized, 1e-10, 10),
            Err(PropagateError::Config(_))
        ));
        assert!(propagator_numeric(&m, -13.0, 0.0, 1e-10).is_err());
        assert!(propagator_numeric(&m, 1.0, 1.0, 1e-10).is_err());
    }
}
