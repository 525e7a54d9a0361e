//! Complex Gamma function and its relatives.
//!
//! `log_gamma` is the Lanczos approximation (g = 607/128, 15 coefficients)
//! on `Re z >= 1/2`, extended to the strip `0 < Re z < 1/2` by the recurrence.
//! `gamma` and `recip_gamma` use the reflection formula on the left half-plane.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Complex scalar used throughout the crate.
pub type ComplexValue = Complex64;

/// Default distance from a non-positive integer at which `gamma` reports a pole.
pub const DEFAULT_POLE_TOL: f64 = 1e-10;

/// Default lower end of the range where the Stirling ratio bound applies.
pub const DEFAULT_Y_MIN: f64 = 1.0;

const LANCZOS_G: f64 = 607.0 / 128.0;
#[allow(clippy::excessive_precision)]
const LANCZOS_COEFFS: [f64; 15] = [
    0.999_999_999_999_997_1,
    57.156_235_665_862_923_517,
    -59.597_960_355_475_491_248,
    14.136_097_974_741_747_174,
    -0.491_913_816_097_620_199_78,
    0.339_946_499_848_118_886_99e-4,
    0.465_236_289_270_485_756_65e-4,
    -0.983_744_753_048_795_646_77e-4,
    0.158_088_703_224_912_488_84e-3,
    -0.210_264_441_724_104_883_19e-3,
    0.217_439_618_115_212_643_20e-3,
    -0.164_318_106_536_763_890_22e-3,
    0.844_182_239_838_527_432_93e-4,
    -0.261_908_384_015_814_086_70e-4,
    0.368_991_826_595_316_227_04e-5,
];

#[allow(clippy::excessive_precision)]
const LN_SQRT_2PI: f64 = 0.918_938_533_204_672_741_78;
#[allow(clippy::excessive_precision)]
const LN_PI: f64 = 1.144_729_885_849_400_174_14;
// ln(f64::MAX)
const LN_MAX: f64 = 709.782_712_893_384;
const LARGEST_FACTORIAL_ARG: usize = 170;

fn factorials() -> &'static [f64; LARGEST_FACTORIAL_ARG + 1] {
    static TABLE: OnceLock<[f64; LARGEST_FACTORIAL_ARG + 1]> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut t = [1.0; LARGEST_FACTORIAL_ARG + 1];
        for n in 1..=LARGEST_FACTORIAL_ARG {
            t[n] = t[n - 1] * n as f64;
        }
        t
    })
}

/// `n!` as a double, `None` once it overflows.
pub fn factorial(n: usize) -> Option<f64> {
    factorials().get(n).copied()
}

fn positive_integer(z: Complex64) -> Option<usize> {
    if z.im == 0.0 && z.re >= 1.0 && z.re.fract() == 0.0 && z.re <= (LARGEST_FACTORIAL_ARG + 1) as f64 {
        Some(z.re as usize)
    } else {
        None
    }
}

fn nonpositive_integer(z: Complex64) -> bool {
    z.im == 0.0 && z.re <= 0.0 && z.re.fract() == 0.0
}

fn lanczos_ln_gamma(z: Complex64) -> Complex64 {
    let w = z - 1.0;
    let mut series = Complex64::new(LANCZOS_COEFFS[0], 0.0);
    for (k, c) in LANCZOS_COEFFS.iter().enumerate().skip(1) {
        series += *c / (w + k as f64);
    }
    let t = w + LANCZOS_G + 0.5;
    (w + 0.5) * t.ln() - t + LN_SQRT_2PI + series.ln()
}

/// `sin(pi z)` with the real part reduced exactly before scaling by pi.
pub fn sin_pi(z: Complex64) -> Complex64 {
    let n = z.re.round();
    let r = z.re - n;
    let (s, c) = (PI * r).sin_cos();
    let y = PI * z.im;
    let v = Complex64::new(s * y.cosh(), c * y.sinh());
    if n.rem_euclid(2.0) == 1.0 {
        -v
    } else {
        v
    }
}

/// A logarithm of `sin(pi z)`, stable for large `|Im z|` (branch unspecified).
pub fn ln_sin_pi(z: Complex64) -> Complex64 {
    if z.im.abs() < 20.0 {
        return sin_pi(z).ln();
    }
    if z.im < 0.0 {
        return ln_sin_pi(z.conj()).conj();
    }
    let n = z.re.round();
    let w = Complex64::new(z.re - n, z.im);
    let i = Complex64::i();
    // sin(pi w) = (i/2) e^{-i pi w} (1 - e^{2 pi i w})
    let mut v = Complex64::new(-std::f64::consts::LN_2, PI / 2.0) - i * PI * w
        + (Complex64::new(1.0, 0.0) - (2.0 * PI * i * w).exp()).ln();
    if n.rem_euclid(2.0) == 1.0 {
        v.im += PI;
    }
    v
}

/// Principal-branch `ln Gamma(z)` for `Re z > 0`.
///
/// The branch is the one continuous on the right half-plane and real on the
/// positive axis, so `log_gamma(z + 1) = log_gamma(z) + Log z` holds there.
pub fn log_gamma(z: Complex64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("log_gamma of non-finite argument {z}")));
    }
    if z.re <= 0.0 {
        return Err(Error::Domain(format!("log_gamma requires Re z > 0, got {z}")));
    }
    if let Some(n) = positive_integer(z) {
        return Ok(Complex64::new(factorials()[n - 1].ln(), 0.0));
    }
    if z.re < 0.5 {
        return Ok(lanczos_ln_gamma(z + 1.0) - z.ln());
    }
    Ok(lanczos_ln_gamma(z))
}

/// `ln Gamma(x)` for real `x > 0`.
pub fn ln_gamma_real(x: f64) -> Result<f64> {
    log_gamma(Complex64::new(x, 0.0)).map(|v| v.re)
}

/// `Gamma(z)` with the default pole tolerance.
pub fn gamma(z: Complex64) -> Result<Complex64> {
    gamma_with_tol(z, DEFAULT_POLE_TOL)
}

/// `Gamma(z)`, reporting a pole when `z` is within `pole_tol` of `0, -1, -2, ...`.
pub fn gamma_with_tol(z: Complex64, pole_tol: f64) -> Result<Complex64> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("gamma of non-finite argument {z}")));
    }
    let k = z.re.round();
    if k <= 0.0 && (z - k).norm() < pole_tol {
        return Err(Error::Pole { z, pole: k as i64, tolerance: pole_tol });
    }
    if let Some(n) = positive_integer(z) {
        return Ok(Complex64::new(factorials()[n - 1], 0.0));
    }
    if z.re >= 0.5 {
        let lg = lanczos_ln_gamma(z);
        if lg.re > LN_MAX {
            return Err(Error::Overflow { z });
        }
        return Ok(lg.exp());
    }
    // Reflection: Gamma(z) = pi / (sin(pi z) Gamma(1 - z)).
    let lg1 = lanczos_ln_gamma(1.0 - z);
    if lg1.re.abs() < 600.0 && z.im.abs() < 100.0 {
        return Ok(PI / (sin_pi(z) * lg1.exp()));
    }
    let lg = LN_PI - ln_sin_pi(z) - lg1;
    if lg.re > LN_MAX {
        return Err(Error::Overflow { z });
    }
    Ok(lg.exp())
}

/// `1 / Gamma(z)`, an entire function: exactly zero at `0, -1, -2, ...`.
pub fn recip_gamma(z: Complex64) -> Complex64 {
    if nonpositive_integer(z) {
        return Complex64::new(0.0, 0.0);
    }
    if let Some(n) = positive_integer(z) {
        return Complex64::new(1.0 / factorials()[n - 1], 0.0);
    }
    if z.re >= 0.5 {
        return (-lanczos_ln_gamma(z)).exp();
    }
    // 1/Gamma(z) = sin(pi z) Gamma(1 - z) / pi
    let lg1 = lanczos_ln_gamma(1.0 - z);
    if lg1.re < 600.0 && z.im.abs() < 100.0 {
        return sin_pi(z) * lg1.exp() / PI;
    }
    let s = sin_pi(z);
    if s.re == 0.0 && s.im == 0.0 {
        return s;
    }
    (ln_sin_pi(z) + lg1 - LN_PI).exp()
}

/// A logarithm of `1 / Gamma(z)` valid in the whole plane; `None` where `1/Gamma` vanishes.
pub fn ln_recip_gamma(z: Complex64) -> Option<Complex64> {
    if nonpositive_integer(z) {
        return None;
    }
    if z.re >= 0.5 {
        return Some(-lanczos_ln_gamma(z));
    }
    let ls = ln_sin_pi(z);
    if !ls.re.is_finite() {
        return None;
    }
    Some(lanczos_ln_gamma(1.0 - z) + ls - LN_PI)
}

/// `|Gamma(1 - s) / Gamma(1 - delta s)|` at `s = 1/2 + i y`, evaluated in log space.
pub fn gamma_ratio_modulus(delta: f64, y: f64) -> f64 {
    let s = Complex64::new(0.5, y);
    let num = lanczos_ln_gamma_any(1.0 - s);
    let den = recip_gamma(1.0 - delta * s);
    if den.re == 0.0 && den.im == 0.0 {
        return 0.0;
    }
    (num.re + den.norm().ln()).exp()
}

fn lanczos_ln_gamma_any(z: Complex64) -> Complex64 {
    if z.re >= 0.5 {
        lanczos_ln_gamma(z)
    } else {
        lanczos_ln_gamma(z + 1.0) - z.ln()
    }
}

/// Stirling-type growth bound `c |y|^((delta-1)/2) exp(pi (delta-1) |y| / 2)`.
pub fn gamma_ratio_decay_bound(delta: f64, y: f64, c_bound: f64) -> Result<f64> {
    gamma_ratio_decay_bound_from(delta, y, c_bound, DEFAULT_Y_MIN)
}

/// As [`gamma_ratio_decay_bound`] with an explicit lower end `y_min` of the asymptotic range.
pub fn gamma_ratio_decay_bound_from(delta: f64, y: f64, c_bound: f64, y_min: f64) -> Result<f64> {
    if !(delta > 1.0 && delta < 2.0) {
        return Err(Error::Domain(format!("decay bound requires delta in (1, 2), got {delta}")));
    }
    let ay = y.abs();
    if !(ay >= y_min) {
        return Err(Error::Domain(format!("decay bound requires |y| >= {y_min}, got {y}")));
    }
    let e = delta - 1.0;
    Ok(c_bound * ay.powf(e / 2.0) * (PI * e * ay / 2.0).exp())
}

/// Smallest constant making the decay bound dominate `gamma_ratio_modulus` on a
/// sampled `|y|` range (no safety factor applied).
pub fn calibrate_decay_constant(delta: f64, y_min: f64, y_max: f64, samples: usize) -> Result<f64> {
    let mut worst: f64 = 0.0;
    let samples = samples.max(2);
    for i in 0..samples {
        let y = y_min + (y_max - y_min) * i as f64 / (samples - 1) as f64;
        let unit = gamma_ratio_decay_bound_from(delta, y, 1.0, y_min)?;
        worst = worst.max(gamma_ratio_modulus(delta, y) / unit);
    }
    Ok(worst)
}

/// Safety factor applied to calibrated constants.
pub const CALIBRATION_SAFETY: f64 = 2.0;
const CALIBRATION_BUCKETS: usize = 20;
const CALIBRATION_Y_MAX: f64 = 50.0;

/// Read-only table of calibrated decay constants, one per delta bucket of width 0.05.
#[derive(Debug, Clone)]
pub struct DecayCalibration {
    constants: Vec<f64>,
}

impl DecayCalibration {
    fn build() -> Self {
        let width = 1.0 / CALIBRATION_BUCKETS as f64;
        let constants = (0..CALIBRATION_BUCKETS)
            .map(|b| {
                let lo = 1.0 + b as f64 * width;
                let mut worst: f64 = 0.0;
                for j in 0..=4 {
                    let d = (lo + width * j as f64 / 4.0).clamp(1.0 + 1e-6, 2.0 - 1e-6);
                    let c = calibrate_decay_constant(d, DEFAULT_Y_MIN, CALIBRATION_Y_MAX, 197)
                        .expect("calibration range is valid");
                    worst = worst.max(c);
                }
                CALIBRATION_SAFETY * worst
            })
            .collect();
        DecayCalibration { constants }
    }

    /// Process-wide table, built on first use.
    pub fn global() -> &'static DecayCalibration {
        static TABLE: OnceLock<DecayCalibration> = OnceLock::new();
        TABLE.get_or_init(DecayCalibration::build)
    }

    /// Calibrated constant for the bucket containing `delta`.
    pub fn constant(&self, delta: f64) -> f64 {
        let b = ((delta - 1.0) * CALIBRATION_BUCKETS as f64).floor();
        let b = (b.max(0.0) as usize).min(CALIBRATION_BUCKETS - 1);
        self.constants[b]
    }
}
