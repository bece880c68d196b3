//! Coupling and phase-mismatch profiles and the two- and three-guide models
//! built from them.
//!
//! Lengths are in arbitrary but consistent units; the CLI works in units of
//! the coupling width L, so `Ω₀L` and `Δ₀L` are the only numbers that matter.

use thiserror::Error;

use crate::quad;

/// Default truncation of the infinite line, in units of the coupling width.
pub const DEFAULT_HALF_DOMAIN: f64 = 12.0;

const PULSE_AREA_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("peak coupling must be finite and non-negative, got {0}")]
    Coupling(f64),
    #[error("coupling width must be finite and positive, got {0}")]
    Width(f64),
    #[error("phase mismatch must be finite, got {0}")]
    Mismatch(f64),
    #[error("domain [{0}, {1}] must satisfy z_min < 0 < z_max")]
    Domain(f64, f64),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileShape {
    /// Ω₀ sech(z/L)
    Sech,
    /// Ω₀ exp(−z²/L²)
    Gaussian,
}

/// Symmetric pulse-shaped coupling Ω(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CouplingProfile {
    shape: ProfileShape,
    omega0: f64,
    width: f64,
}

impl CouplingProfile {
    pub fn new(shape: ProfileShape, omega0: f64, width: f64) -> Result<Self, ModelError> {
        if !omega0.is_finite() || omega0 < 0.0 {
            return Err(ModelError::Coupling(omega0));
        }
        if !width.is_finite() || width <= 0.0 {
            return Err(ModelError::Width(width));
        }
        Ok(Self {
            shape,
            omega0,
            width,
        })
    }

    pub fn sech(omega0: f64, width: f64) -> Result<Self, ModelError> {
        Self::new(ProfileShape::Sech, omega0, width)
    }

    pub fn gaussian(omega0: f64, width: f64) -> Result<Self, ModelError> {
        Self::new(ProfileShape::Gaussian, omega0, width)
    }

    pub fn shape(&self) -> ProfileShape {
        self.shape
    }

    /// Peak coupling Ω₀.
    pub fn omega0(&self) -> f64 {
        self.omega0
    }

    /// Width scale L.
    pub fn width(&self) -> f64 {
        self.width
    }

    pub fn value(&self, z: f64) -> f64 {
        let u = z / self.width;
        match self.shape {
            ProfileShape::Sech => self.omega0 / u.cosh(),
            ProfileShape::Gaussian => self.omega0 * (-u * u).exp(),
        }
    }

    /// dΩ/dz.
    pub fn slope(&self, z: f64) -> f64 {
        let u = z / self.width;
        match self.shape {
            ProfileShape::Sech => -self.omega0 * u.tanh() / u.cosh() / self.width,
            ProfileShape::Gaussian => -2.0 * u * self.omega0 * (-u * u).exp() / self.width,
        }
    }

    /// Same shape with the peak multiplied by `factor` (≥ 0).
    pub fn scaled(&self, factor: f64) -> Result<Self, ModelError> {
        Self::new(self.shape, self.omega0 * factor, self.width)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MismatchKind {
    /// +Δ₀ for z < 0, −Δ₀ for z > 0.
    StepFlip,
    Constant,
}

/// Which side of the flip point a quantity is evaluated on. Integration
/// segments never straddle z = 0, so each segment carries its side and the
/// one-sided limit is used at the endpoint z = 0 itself.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Side {
    Negative,
    Positive,
}

impl Side {
    /// Side of the open interval (a, b), which must not contain 0.
    pub fn of_segment(a: f64, b: f64) -> Side {
        if 0.5 * (a + b) < 0.0 {
            Side::Negative
        } else {
            Side::Positive
        }
    }
}

/// Phase mismatch Δ(z).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MismatchProfile {
    kind: MismatchKind,
    delta0: f64,
}

impl MismatchProfile {
    pub fn new(kind: MismatchKind, delta0: f64) -> Result<Self, ModelError> {
        if !delta0.is_finite() {
            return Err(ModelError::Mismatch(delta0));
        }
        Ok(Self { kind, delta0 })
    }

    pub fn step_flip(delta0: f64) -> Result<Self, ModelError> {
        Self::new(MismatchKind::StepFlip, delta0)
    }

    pub fn constant(delta0: f64) -> Result<Self, ModelError> {
        Self::new(MismatchKind::Constant, delta0)
    }

    pub fn kind(&self) -> MismatchKind {
        self.kind
    }

    pub fn delta0(&self) -> f64 {
        self.delta0
    }

    /// Δ(z), with Δ(0) = 0 for the step flip.
    pub fn value(&self, z: f64) -> f64 {
        match self.kind {
            MismatchKind::Constant => self.delta0,
            MismatchKind::StepFlip if z < 0.0 => self.delta0,
            MismatchKind::StepFlip if z > 0.0 => -self.delta0,
            MismatchKind::StepFlip => 0.0,
        }
    }

    /// Δ on the given side of the flip, constant there.
    pub fn value_on(&self, side: Side) -> f64 {
        match (self.kind, side) {
            (MismatchKind::Constant, _) | (MismatchKind::StepFlip, Side::Negative) => self.delta0,
            (MismatchKind::StepFlip, Side::Positive) => -self.delta0,
        }
    }

    /// D(z) = ∫₀ᶻ Δ(s) ds.
    pub fn accumulated_phase(&self, z: f64) -> f64 {
        match self.kind {
            MismatchKind::Constant => self.delta0 * z,
            MismatchKind::StepFlip => -self.delta0 * z.abs(),
        }
    }

    /// The profile seen by light travelling towards −z.
    pub fn reversed(&self) -> Self {
        match self.kind {
            MismatchKind::Constant => *self,
            MismatchKind::StepFlip => Self {
                kind: self.kind,
                delta0: -self.delta0,
            },
        }
    }
}

/// Placement of the mismatch on the diagonal of the two-guide evolution matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DiagonalConvention {
    /// diag(−Δ, +Δ)
    FullDelta,
    /// diag(−Δ/2, +Δ/2), the splitting whose interaction picture has phase
    /// e^{±iD} with D′ = Δ.
    HalfDelta,
    /// diag(0, +Δ), the bright/middle pair of the three-guide splitter.
    Offset,
}

impl DiagonalConvention {
    /// (w₁, w₂) such that the diagonal is (w₁Δ, w₂Δ).
    pub fn weights(&self) -> (f64, f64) {
        match self {
            DiagonalConvention::FullDelta => (-1.0, 1.0),
            DiagonalConvention::HalfDelta => (-0.5, 0.5),
            DiagonalConvention::Offset => (0.0, 1.0),
        }
    }

    /// Eigenvalue splitting per unit Δ: (w₂ − w₁).
    pub fn splitting(&self) -> f64 {
        let (w1, w2) = self.weights();
        w2 - w1
    }
}

/// Amplitude frame the two-guide equations are integrated in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Frame {
    /// Mismatch on the diagonal.
    #[default]
    Diagonal,
    /// Zero diagonal, off-diagonal Ω e^{∓iΦ(z)} with Φ = ∫(w₂ − w₁)Δ.
    Interaction,
}

/// Common view of both guide models.
pub trait Waveguides {
    fn coupling(&self) -> &CouplingProfile;
    fn mismatch(&self) -> &MismatchProfile;
    /// (z_min, z_max).
    fn domain(&self) -> (f64, f64);

    fn coupling_at(&self, z: f64) -> f64 {
        self.coupling().value(z)
    }

    fn mismatch_at(&self, z: f64) -> f64 {
        self.mismatch().value(z)
    }

    /// ∫ Ω(z) dz over [z_a, z_b].
    fn pulse_area(&self, z_a: f64, z_b: f64) -> f64 {
        let coupling = *self.coupling();
        if coupling.omega0() == 0.0 {
            return 0.0;
        }
        quad::integrate(|z| coupling.value(z), z_a, z_b, PULSE_AREA_TOL)
    }

    /// D(z) = ∫₀ᶻ Δ(s) ds.
    fn accumulated_mismatch_phase(&self, z: f64) -> f64 {
        self.mismatch().accumulated_phase(z)
    }
}

fn check_domain(z_min: f64, z_max: f64) -> Result<(), ModelError> {
    if z_min.is_finite() && z_max.is_finite() && z_min < 0.0 && 0.0 < z_max {
        Ok(())
    } else {
        Err(ModelError::Domain(z_min, z_max))
    }
}

/// Two evanescently coupled guides.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TwoGuideModel {
    coupling: CouplingProfile,
    mismatch: MismatchProfile,
    z_min: f64,
    z_max: f64,
    convention: DiagonalConvention,
    frame: Frame,
}

impl TwoGuideModel {
    pub fn new(
        coupling: CouplingProfile,
        mismatch: MismatchProfile,
        z_min: f64,
        z_max: f64,
    ) -> Result<Self, ModelError> {
        check_domain(z_min, z_max)?;
        Ok(Self {
            coupling,
            mismatch,
            z_min,
            z_max,
            convention: DiagonalConvention::FullDelta,
            frame: Frame::Diagonal,
        })
    }

    /// Sech coupling with a step-flipped mismatch, L = 1, domain ±12.
    pub fn step_sech(omega0_l: f64, delta0_l: f64) -> Result<Self, ModelError> {
        Self::new(
            CouplingProfile::sech(omega0_l, 1.0)?,
            MismatchProfile::step_flip(delta0_l)?,
            -DEFAULT_HALF_DOMAIN,
            DEFAULT_HALF_DOMAIN,
        )
    }

    pub fn with_convention(mut self, convention: DiagonalConvention) -> Self {
        self.convention = convention;
        self
    }

    pub fn with_frame(mut self, frame: Frame) -> Self {
        self.frame = frame;
        self
    }

    pub fn with_domain(mut self, z_min: f64, z_max: f64) -> Result<Self, ModelError> {
        check_domain(z_min, z_max)?;
        self.z_min = z_min;
        self.z_max = z_max;
        Ok(self)
    }

    pub fn with_mismatch(mut self, mismatch: MismatchProfile) -> Self {
        self.mismatch = mismatch;
        self
    }

    pub fn convention(&self) -> DiagonalConvention {
        self.convention
    }

    pub fn frame(&self) -> Frame {
        self.frame
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// Diagonal of the evolution matrix on one side of the flip.
    pub fn diagonal_on(&self, side: Side) -> (f64, f64) {
        let delta = self.mismatch.value_on(side);
        let (w1, w2) = self.convention.weights();
        (w1 * delta, w2 * delta)
    }

    /// Φ(z) = ∫₀ᶻ (d₂ − d₁), the relative phase removed by the interaction frame.
    pub fn interaction_phase(&self, z: f64) -> f64 {
        self.convention.splitting() * self.mismatch.accumulated_phase(z)
    }

    /// (∫₀ᶻ d₁, ∫₀ᶻ d₂): the diagonal phases relating the two frames,
    /// c_k = exp(−i ∫₀ᶻ d_k) x_k.
    pub fn diagonal_phases(&self, z: f64) -> (f64, f64) {
        let (w1, w2) = self.convention.weights();
        let d = self.mismatch.accumulated_phase(z);
        (w1 * d, w2 * d)
    }
}

impl Waveguides for TwoGuideModel {
    fn coupling(&self) -> &CouplingProfile {
        &self.coupling
    }

    fn mismatch(&self) -> &MismatchProfile {
        &self.mismatch
    }

    fn domain(&self) -> (f64, f64) {
        (self.z_min, self.z_max)
    }
}

/// Three guides in a row; the middle one couples to both outer guides with
/// the same Ω(z) and carries the mismatch.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThreeGuideModel {
    coupling: CouplingProfile,
    mismatch: MismatchProfile,
    z_min: f64,
    z_max: f64,
}

impl ThreeGuideModel {
    pub fn new(
        coupling: CouplingProfile,
        mismatch: MismatchProfile,
        z_min: f64,
        z_max: f64,
    ) -> Result<Self, ModelError> {
        check_domain(z_min, z_max)?;
        Ok(Self {
            coupling,
            mismatch,
            z_min,
            z_max,
        })
    }

    /// Sech coupling with a step-flipped mismatch, L = 1, domain ±12.
    pub fn step_sech(omega0_l: f64, delta0_l: f64) -> Result<Self, ModelError> {
        Self::new(
            CouplingProfile::sech(omega0_l, 1.0)?,
            MismatchProfile::step_flip(delta0_l)?,
            -DEFAULT_HALF_DOMAIN,
            DEFAULT_HALF_DOMAIN,
        )
    }

    pub fn z_min(&self) -> f64 {
        self.z_min
    }

    pub fn z_max(&self) -> f64 {
        self.z_max
    }

    /// The same device traversed from the far end: z → −z.
    pub fn reversed(&self) -> Self {
        Self {
            coupling: self.coupling,
            mismatch: self.mismatch.reversed(),
            z_min: -self.z_max,
            z_max: -self.z_min,
        }
    }
}

impl Waveguides for ThreeGuideModel {
    fn coupling(&self) -> &CouplingProfile {
        &self.coupling
    }

    fn mismatch(&self) -> &MismatchProfile {
        &self.mismatch
    }

    fn domain(&self) -> (f64, f64) {
        (self.z_min, self.z_max)
    }
}
