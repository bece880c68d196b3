//! Dormand–Prince 8(5,3) integrator for small complex linear systems.
//!
//! Hairer's DOP853 tableau and error estimator with a Lund-stabilized (PI)
//! step controller. The step-size proposal survives between calls so that a
//! trajectory integrated sample-to-sample keeps its natural step length.

use num_complex::Complex64;
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OdeError {
    #[error("step size underflow at z = {z} (h = {h:e})")]
    StepUnderflow { z: f64, h: f64 },
    #[error("step budget of {max_steps} exhausted at z = {z}")]
    TooManySteps { z: f64, max_steps: usize },
    #[error("non-finite state at z = {z}")]
    NonFinite { z: f64 },
}

const STAGES: usize = 12;

const C: [f64; STAGES] = [
    0.0,
    5.260_015_195_876_773e-2,
    7.890_022_793_815_16e-2,
    1.183_503_419_072_274e-1,
    2.816_496_580_927_726e-1,
    3.333_333_333_333_333e-1,
    0.25,
    3.076_923_076_923_077e-1,
    6.512_820_512_820_513e-1,
    0.6,
    8.571_428_571_428_571e-1,
    1.0,
];

const A: [[f64; STAGES]; STAGES] = [
    [0.0; STAGES],
    [
        5.260_015_195_876_773e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        1.972_505_698_453_79e-2,
        5.917_517_095_361_37e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.958_758_547_680_685e-2,
        0.0,
        8.876_275_643_042_054e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        2.413_651_341_592_667e-1,
        0.0,
        -8.845_494_793_282_861e-1,
        9.248_340_032_617_92e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.703_703_703_703_703_5e-2,
        0.0,
        0.0,
        1.708_286_087_294_738_6e-1,
        1.254_676_875_668_224_2e-1,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.710_937_5e-2,
        0.0,
        0.0,
        1.702_522_110_195_440_5e-1,
        6.021_653_898_045_596e-2,
        -1.757_812_5e-2,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        3.709_200_011_850_479e-2,
        0.0,
        0.0,
        1.703_839_257_122_399_8e-1,
        1.072_620_304_463_732_8e-1,
        -1.531_943_774_862_440_2e-2,
        8.273_789_163_814_023e-3,
        0.0,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        6.241_109_587_160_757e-1,
        0.0,
        0.0,
        -3.360_892_629_446_941_4,
        -8.682_193_468_417_26e-1,
        2.759_209_969_944_671e1,
        2.015_406_755_047_789_4e1,
        -4.348_988_418_106_996e1,
        0.0,
        0.0,
        0.0,
        0.0,
    ],
    [
        4.776_625_364_382_643_4e-1,
        0.0,
        0.0,
        -2.488_114_619_971_667_7,
        -5.902_908_268_368_43e-1,
        2.123_005_144_818_119_3e1,
        1.527_923_363_288_242_3e1,
        -3.328_821_096_898_486e1,
        -2.033_120_170_850_862_7e-2,
        0.0,
        0.0,
        0.0,
    ],
    [
        -9.371_424_300_859_873e-1,
        0.0,
        0.0,
        5.186_372_428_844_064,
        1.091_437_348_996_729_5,
        -8.149_787_010_746_927,
        -1.852_006_565_999_696e1,
        2.273_948_709_935_050_5e1,
        2.493_605_552_679_652_3,
        -3.046_764_471_898_219_6,
        0.0,
        0.0,
    ],
    [
        2.273_310_147_516_538,
        0.0,
        0.0,
        -1.053_449_546_673_725e1,
        -2.000_872_058_224_862_5,
        -1.795_893_186_311_88e1,
        2.794_888_452_941_996e1,
        -2.858_998_277_135_023_5,
        -8.872_856_933_530_63,
        1.236_056_717_579_430_3e1,
        6.433_927_460_157_636e-1,
        0.0,
    ],
];

const B: [f64; STAGES] = [
    5.429_373_411_656_876_5e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    4.450_312_892_752_409,
    1.891_517_899_314_500_3,
    -5.801_203_960_010_585,
    3.111_643_669_578_199e-1,
    -1.521_609_496_625_161e-1,
    2.013_654_008_040_303_4e-1,
    4.471_061_572_777_259e-2,
];

// Fifth-order error weights.
const ER: [f64; STAGES] = [
    1.312_004_499_419_488e-2,
    0.0,
    0.0,
    0.0,
    0.0,
    -1.225_156_446_376_204_4,
    -4.957_589_496_572_502e-1,
    1.664_377_182_454_986_4,
    -3.503_288_487_499_736_6e-1,
    3.341_791_187_130_175e-1,
    8.192_320_648_511_571e-2,
    -2.235_530_786_388_629_4e-2,
];

// Third-order error weights on stages 1, 9 and 12.
const BHH: [f64; 3] = [
    2.440_944_881_889_764e-1,
    7.338_466_882_816_118e-1,
    2.205_882_352_941_176_6e-2,
];

const SAFETY: f64 = 0.9;
const FAC_MIN: f64 = 0.333;
const FAC_MAX: f64 = 6.0;
const BETA: f64 = 0.04;
const DEFAULT_MAX_STEPS: usize = 10_000_000;

/// Adaptive DOP853 stepper with mixed absolute/relative tolerance `tol`.
#[derive(Debug, Clone)]
pub struct Dop853 {
    tol: f64,
    h: Option<f64>,
    facold: f64,
    max_steps: usize,
    steps: usize,
    evaluations: usize,
}

impl Dop853 {
    pub fn new(tol: f64) -> Self {
        Self {
            tol,
            h: None,
            facold: 1e-4,
            max_steps: DEFAULT_MAX_STEPS,
            steps: 0,
            evaluations: 0,
        }
    }

    pub fn with_max_steps(mut self, max_steps: usize) -> Self {
        self.max_steps = max_steps;
        self
    }

    /// Accepted plus rejected steps so far.
    pub fn steps(&self) -> usize {
        self.steps
    }

    pub fn evaluations(&self) -> usize {
        self.evaluations
    }

    fn scale<const N: usize>(&self, y: &[Complex64; N], y_new: &[Complex64; N]) -> [f64; N] {
        std::array::from_fn(|i| self.tol + self.tol * y[i].norm().max(y_new[i].norm()))
    }

    fn initial_step<const N: usize, F>(
        &mut self,
        f: &F,
        z: f64,
        y: &[Complex64; N],
        f0: &[Complex64; N],
        span: f64,
    ) -> f64
    where
        F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
    {
        let sk = self.scale(y, y);
        let rms = |v: &[Complex64; N]| {
            (v.iter()
                .zip(sk.iter())
                .map(|(x, s)| (x.norm() / s).powi(2))
                .sum::<f64>()
                / N as f64)
                .sqrt()
        };
        let (d0, d1) = (rms(y), rms(f0));
        let mut h0 = if d0 <= 1e-10 || d1 <= 1e-10 {
            1e-6
        } else {
            0.01 * d0 / d1
        };
        h0 = h0.min(span);
        let y1: [Complex64; N] = std::array::from_fn(|i| y[i] + f0[i] * h0);
        let f1 = f(z + h0, &y1);
        self.evaluations += 1;
        let diff: [Complex64; N] = std::array::from_fn(|i| f1[i] - f0[i]);
        let d2 = rms(&diff) / h0;
        let h1 = if d1.max(d2) <= 1e-15 {
            (h0 * 1e-3).max(1e-6)
        } else {
            (0.01 / d1.max(d2)).powf(1.0 / 8.0)
        };
        (100.0 * h0).min(h1).min(span)
    }

    /// Advances `y` from `z0` to `z1 ≥ z0`.
    pub fn integrate<const N: usize, F>(
        &mut self,
        f: &F,
        z0: f64,
        z1: f64,
        y0: [Complex64; N],
    ) -> Result<[Complex64; N], OdeError>
    where
        F: Fn(f64, &[Complex64; N]) -> [Complex64; N],
    {
        debug_assert!(z1 >= z0);
        let mut z = z0;
        let mut y = y0;
        if z1 == z0 {
            return Ok(y);
        }
        let mut k: [[Complex64; N]; STAGES] = [[Complex64::new(0.0, 0.0); N]; STAGES];
        k[0] = f(z, &y);
        self.evaluations += 1;
        let mut h = match self.h {
            Some(h) => h,
            None => self.initial_step(f, z, &y, &k[0].clone(), z1 - z0),
        };
        let expo = 1.0 / 8.0 - BETA * 0.2;
        let mut rejected = false;

        loop {
            if self.steps >= self.max_steps {
                return Err(OdeError::TooManySteps {
                    z,
                    max_steps: self.max_steps,
                });
            }
            let proposal = h;
            let last = z1 - z <= 1.01 * h;
            if last {
                h = z1 - z;
            }
            if h <= 1e-14 * z.abs().max(1.0) {
                return Err(OdeError::StepUnderflow { z, h });
            }

            for s in 1..STAGES {
                let mut arg = y;
                for (j, kj) in k.iter().enumerate().take(s) {
                    let a = A[s][j];
                    if a != 0.0 {
                        for i in 0..N {
                            arg[i] += kj[i] * (a * h);
                        }
                    }
                }
                k[s] = f(z + C[s] * h, &arg);
            }
            self.evaluations += STAGES - 1;
            self.steps += 1;

            let mut incr = [Complex64::new(0.0, 0.0); N];
            let mut err5 = [Complex64::new(0.0, 0.0); N];
            for (s, ks) in k.iter().enumerate() {
                for i in 0..N {
                    incr[i] += ks[i] * B[s];
                    err5[i] += ks[i] * ER[s];
                }
            }
            let y_new: [Complex64; N] = std::array::from_fn(|i| y[i] + incr[i] * h);
            let sk = self.scale(&y, &y_new);
            let (mut e5, mut e3) = (0.0, 0.0);
            for i in 0..N {
                let err3 = incr[i] - k[0][i] * BHH[0] - k[8][i] * BHH[1] - k[11][i] * BHH[2];
                e3 += (err3.norm() / sk[i]).powi(2);
                e5 += (err5[i].norm() / sk[i]).powi(2);
            }
            let mut deno = e5 + 0.01 * e3;
            if deno <= 0.0 {
                deno = 1.0;
            }
            let err = h * e5 * (1.0 / (deno * N as f64)).sqrt();
            if !err.is_finite() {
                return Err(OdeError::NonFinite { z });
            }

            let fac11 = err.powf(expo);
            if err <= 1.0 {
                let fac =
                    (fac11 / self.facold.powf(BETA) / SAFETY).clamp(1.0 / FAC_MAX, 1.0 / FAC_MIN);
                let mut h_new = h / fac;
                if rejected {
                    h_new = h_new.min(h);
                }
                self.facold = err.max(1e-4);
                z = if last { z1 } else { z + h };
                y = y_new;
                if y.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
                    return Err(OdeError::NonFinite { z });
                }
                if last {
                    // A clipped final step says nothing about the natural step length.
                    self.h = Some(if h < proposal { proposal } else { h_new });
                    return Ok(y);
                }
                k[0] = f(z, &y);
                self.evaluations += 1;
                h = h_new;
                rejected = false;
            } else {
                h /= (fac11 / SAFETY).min(1.0 / FAC_MIN);
                rejected = true;
            }
        }
    }
}
