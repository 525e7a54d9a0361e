//! Mellin-Barnes contour integrals along `Re s = c`.
//!
//! `phi_delta(z) = 1/2 int Gamma(1-s) / (sin(pi s) Gamma(1 - delta s)) (-z)^(-s) dy`, `s = c + i y`,
//! valid for `|arg(-z)| < (3 - delta) pi / 2`. Integrands are formed in log space, so
//! factors that individually overflow at large `|y|` are never materialised.

use std::f64::consts::PI;

use num_complex::Complex64;

use super::quadrature::{integrate, PANEL_ORDER};
use super::{ContourConfig, WrightParams};
use crate::error::{Error, Result};
use crate::gamma::{ln_recip_gamma, ln_sin_pi, log_gamma, DecayCalibration, CALIBRATION_SAFETY, DEFAULT_POLE_TOL};

/// Largest truncation height tried before giving up with a tail error.
pub const Y_MAX: f64 = 4000.0;
const HEIGHT_SAFETY: f64 = 5.0;
const HEIGHT_GROWTH: f64 = 1.1;
const CALIBRATION_Y_MAX: f64 = 50.0;
const CALIBRATION_SAMPLES: usize = 197;
const HARMONIC_ABSCISSA: f64 = -0.5;

/// A contour integral together with its error budget.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IntegralValue {
    pub value: Complex64,
    /// Truncation height below the real axis (`y in [-lower_height, 0]`).
    pub lower_height: f64,
    /// Truncation height above the real axis.
    pub upper_height: f64,
    /// Bound on the discarded contour tails.
    pub tail_bound: f64,
    /// Adaptive quadrature error estimate.
    pub quadrature_error: f64,
    pub evaluations: usize,
    pub panels: usize,
}

/// Rejects `z` on the cut `[0, inf)` of `(-z)^(-s)`.
pub fn check_branch(z: Complex64, angular_tol: f64) -> Result<()> {
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if z.norm() == 0.0 || (z.re > 0.0 && z.arg().abs() <= angular_tol) {
        return Err(Error::Branch { z });
    }
    Ok(())
}

/// `pi (3 - delta) / 2 - |arg(-z)|`, the exponential decay rate of the integrand
/// on its slower side; positive exactly inside the validity sector.
pub fn validity_margin(delta: f64, z: Complex64) -> f64 {
    PI * (3.0 - delta) / 2.0 - (-z).arg().abs()
}

fn ln_gamma_any(w: Complex64) -> Complex64 {
    if w.re > 0.0 {
        if let Ok(v) = log_gamma(w) {
            return v;
        }
    }
    -ln_recip_gamma(w).unwrap_or(Complex64::new(f64::NEG_INFINITY, 0.0))
}

fn log_phi_integrand(delta: f64, s: Complex64, log_mz: Complex64) -> Option<Complex64> {
    let recip = ln_recip_gamma(1.0 - delta * s)?;
    Some(ln_gamma_any(1.0 - s) + recip - ln_sin_pi(s) - s * log_mz)
}

fn exp_or_zero(v: Option<Complex64>) -> Complex64 {
    match v {
        Some(l) if l.re > -745.0 => l.exp(),
        _ => Complex64::new(0.0, 0.0),
    }
}

/// `Gamma(1-s) / (sin(pi s) Gamma(1 - delta s)) (-z)^(-s)` on the principal branch.
pub fn integrand(params: &WrightParams, s: Complex64, z: Complex64) -> Result<Complex64> {
    integrand_with(params, s, z, DEFAULT_POLE_TOL, ContourConfig::default().angular_tol)
}

/// [`integrand`] with explicit pole and branch tolerances.
pub fn integrand_with(params: &WrightParams, s: Complex64, z: Complex64, pole_tol: f64, angular_tol: f64) -> Result<Complex64> {
    check_branch(z, angular_tol)?;
    let k = s.re.round();
    if (s - k).norm() < pole_tol {
        return Err(Error::Pole { z: s, pole: k as i64, tolerance: pole_tol });
    }
    Ok(exp_or_zero(log_phi_integrand(params.delta, s, (-z).ln())))
}

/// `|Gamma(1-s) / Gamma(1 - delta s)|` at `s = c + i y`.
fn ratio_modulus(delta: f64, c: f64, y: f64) -> f64 {
    let s = Complex64::new(c, y);
    match ln_recip_gamma(1.0 - delta * s) {
        Some(r) => (ln_gamma_any(1.0 - s).re + r.re).exp(),
        None => 0.0,
    }
}

// Calibrated C in |Gamma(1-s)/Gamma(1-delta s)| <= C |y|^((delta-1)c) exp(pi (delta-1)|y|/2).
fn ratio_constant(delta: f64, c: f64, y_min: f64) -> f64 {
    if c == 0.5 && y_min >= crate::gamma::DEFAULT_Y_MIN {
        return DecayCalibration::global().constant(delta);
    }
    let p = (delta - 1.0) * c;
    let lo = y_min.max(1e-3);
    let hi = CALIBRATION_Y_MAX.max(2.0 * lo);
    let worst = (0..CALIBRATION_SAMPLES)
        .map(|i| {
            let y = lo + (hi - lo) * i as f64 / (CALIBRATION_SAMPLES - 1) as f64;
            ratio_modulus(delta, c, y) / (y.powf(p) * (PI * (delta - 1.0) * y / 2.0).exp())
        })
        .fold(0.0f64, f64::max);
    CALIBRATION_SAFETY * worst
}

/// Bound `1/2 * k / (1 - e^{-2 pi Y}) * int_Y^inf y^power e^{-kappa y} dy` on one contour tail.
#[derive(Debug, Clone, Copy)]
struct Tail {
    kappa: f64,
    k: f64,
    power: f64,
    y_min: f64,
}

impl Tail {
    fn bound(&self, y: f64) -> f64 {
        let sin_factor = 1.0 / (1.0 - (-2.0 * PI * y).exp());
        let rate = if self.power <= 0.0 { self.kappa } else { self.kappa - self.power / y };
        if rate <= 0.0 {
            return f64::INFINITY;
        }
        0.5 * self.k * sin_factor * y.powf(self.power) * (-self.kappa * y).exp() / rate
    }

    fn height(&self, z: Complex64, tol: f64) -> Result<f64> {
        if !(self.kappa > 0.0) {
            return Err(Error::Tail {
                z,
                tol,
                reason: "arg(-z) outside the validity sector".into(),
            });
        }
        let target = tol / 4.0;
        let mut y = ((1.0 / tol).ln() + HEIGHT_SAFETY) / self.kappa;
        y = y.max(self.y_min).max(1.0);
        while self.bound(y) > target {
            y *= HEIGHT_GROWTH;
            if y > Y_MAX {
                return Err(Error::Tail {
                    z,
                    tol,
                    reason: format!("decay rate {:.3e} needs height beyond {Y_MAX}", self.kappa),
                });
            }
        }
        Ok(y)
    }
}

fn contour<F>(f: &F, z: Complex64, config: &ContourConfig, upper: Tail, lower: Tail) -> Result<IntegralValue>
where
    F: Fn(f64) -> Result<Complex64>,
{
    let tol = config.tol;
    let (y_up, y_down) = match config.height {
        Some(h) => (h, h),
        None => (upper.height(z, tol)?, lower.height(z, tol)?),
    };
    let panels = (config.nodes / PANEL_ORDER).max(1);
    let real_axis = z.im == 0.0;
    if real_axis {
        // f(-y) = conj f(y): the full integral is twice the real part of the upper half.
        let q = integrate(f, 0.0, y_up, panels, tol / 2.0)?;
        return Ok(IntegralValue {
            value: Complex64::new(q.value.re, 0.0),
            lower_height: y_up,
            upper_height: y_up,
            tail_bound: 2.0 * upper.bound(y_up),
            quadrature_error: q.error_estimate,
            evaluations: q.evaluations,
            panels: q.panels,
        });
    }
    let share = ((panels as f64) * y_up / (y_up + y_down)).round() as usize;
    let up_panels = share.clamp(1, panels.max(2) - 1);
    let down_panels = panels.saturating_sub(up_panels).max(1);
    let qu = integrate(f, 0.0, y_up, up_panels, tol / 2.0)?;
    let qd = integrate(f, -y_down, 0.0, down_panels, tol / 2.0)?;
    Ok(IntegralValue {
        value: 0.5 * (qu.value + qd.value),
        lower_height: y_down,
        upper_height: y_up,
        tail_bound: upper.bound(y_up) + lower.bound(y_down),
        quadrature_error: 0.5 * (qu.error_estimate + qd.error_estimate),
        evaluations: qu.evaluations + qd.evaluations,
        panels: qu.panels + qd.panels,
    })
}

fn require_delta(params: &WrightParams) -> Result<()> {
    if params.delta <= 1.0 || params.delta >= 2.0 {
        return Err(Error::Domain(format!("contour integral requires delta in (1, 2), got {}", params.delta)));
    }
    Ok(())
}

/// `phi_delta(z)` by quadrature of the Mellin-Barnes integral.
pub fn phi_integral(params: &WrightParams, z: Complex64, config: &ContourConfig) -> Result<Complex64> {
    phi_integral_report(params, z, config).map(|v| v.value)
}

/// [`phi_integral`] with heights, error budget and work counts.
///
/// Each side of the contour gets its own height, from the decay rates
/// `pi (3 - delta)/2 -+ arg(-z)` and the calibrated Stirling bound, so that each
/// tail stays below `tol / 4`.
pub fn phi_integral_report(params: &WrightParams, z: Complex64, config: &ContourConfig) -> Result<IntegralValue> {
    config.validate()?;
    require_delta(params)?;
    if z == Complex64::new(0.0, 0.0) {
        // the contour does not exist at the origin, but the value is the constant term
        return Ok(IntegralValue {
            value: Complex64::new(1.0, 0.0),
            lower_height: 0.0,
            upper_height: 0.0,
            tail_bound: 0.0,
            quadrature_error: 0.0,
            evaluations: 0,
            panels: 0,
        });
    }
    check_branch(z, config.angular_tol)?;
    let delta = params.delta;
    let c = config.abscissa;
    let log_mz = (-z).ln();
    let theta = log_mz.im;
    let base = PI * (3.0 - delta) / 2.0;
    let k = 2.0 * ratio_constant(delta, c, config.y_min) * (-c * log_mz.re).exp();
    let power = (delta - 1.0) * c;
    let upper = Tail { kappa: base - theta, k, power, y_min: config.y_min };
    let lower = Tail { kappa: base + theta, k, power, y_min: config.y_min };
    if upper.kappa <= 0.0 || lower.kappa <= 0.0 {
        return Err(Error::Tail {
            z,
            tol: config.tol,
            reason: format!("|arg(-z)| = {:.6} is not below (3 - delta) pi / 2 = {base:.6}", theta.abs()),
        });
    }
    let f = |y: f64| Ok(exp_or_zero(log_phi_integrand(delta, Complex64::new(c, y), log_mz)));
    contour(&f, z, config, upper, lower)
}

/// `sum_{n >= 1} lambda_n(delta) w^n / n` as a contour integral at `Re s = -1/2`.
///
/// Dividing by `n` turns `Gamma(1-s)` into `Gamma(-s)`; the contour then passes
/// between the poles at `s = 0` and `s = -1`, so the `n = 0` term is excluded.
pub fn harmonic_integral_report(params: &WrightParams, w: Complex64, config: &ContourConfig) -> Result<IntegralValue> {
    config.validate()?;
    require_delta(params)?;
    check_branch(w, config.angular_tol)?;
    let delta = params.delta;
    let c = HARMONIC_ABSCISSA;
    let log_mw = (-w).ln();
    let theta = log_mw.im;
    let base = PI * (3.0 - delta) / 2.0;
    let k = 2.0 * ratio_constant(delta, c, config.y_min) * (-c * log_mw.re).exp();
    // |Gamma(-s)| = |Gamma(1-s)| / |s| <= |Gamma(1-s)| / |y|
    let power = (delta - 1.0) * c - 1.0;
    let upper = Tail { kappa: base - theta, k, power, y_min: config.y_min };
    let lower = Tail { kappa: base + theta, k, power, y_min: config.y_min };
    if upper.kappa <= 0.0 || lower.kappa <= 0.0 {
        return Err(Error::Tail { z: w, tol: config.tol, reason: "arg(-z) outside the validity sector".into() });
    }
    let f = |y: f64| {
        let s = Complex64::new(c, y);
        let l = log_phi_integrand(delta, s, log_mw).map(|l| l - (-s).ln());
        Ok(exp_or_zero(l))
    };
    contour(&f, w, config, upper, lower)
}

/// `1/2 int (-z)^(-s) / sin(pi s) dy` along `Re s = abscissa`, which equals `1 / (1 - z)`.
pub fn limit_kernel(z: Complex64, config: &ContourConfig) -> Result<Complex64> {
    limit_kernel_report(z, config).map(|v| v.value)
}

/// [`limit_kernel`] with heights, error budget and work counts.
pub fn limit_kernel_report(z: Complex64, config: &ContourConfig) -> Result<IntegralValue> {
    config.validate()?;
    check_branch(z, config.angular_tol)?;
    let c = config.abscissa;
    let log_mz = (-z).ln();
    let theta = log_mz.im;
    // |1/sin(pi s)| <= 2 e^{-pi |y|} / (1 - e^{-2 pi |y|}) exactly
    let k = 2.0 * (-c * log_mz.re).exp();
    let upper = Tail { kappa: PI - theta, k, power: 0.0, y_min: 0.0 };
    let lower = Tail { kappa: PI + theta, k, power: 0.0, y_min: 0.0 };
    let f = |y: f64| {
        let s = Complex64::new(c, y);
        Ok(exp_or_zero(Some(-ln_sin_pi(s) - s * log_mz)))
    };
    contour(&f, z, config, upper, lower)
}
