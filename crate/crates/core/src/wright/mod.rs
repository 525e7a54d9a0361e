//! The function `phi_delta(z) = sum n!/Gamma(delta n + 1) z^n` and its `delta -> 1+` limit.
//!
//! Two independent evaluators are provided: the Taylor series ([`phi_series`]) and
//! the Mellin-Barnes integral ([`phi_integral`]). [`phi_auto`] picks one.

pub mod expansion;
pub mod extended;
pub mod integral;
pub mod quadrature;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::CoefficientLaw;

pub use expansion::{
    harmonic_series_report, phi_series, phi_series_report, plan_phi_series, SeriesPlan, SeriesValue, DEFAULT_N_MAX,
};
pub use integral::{
    check_branch, harmonic_integral_report, integrand, integrand_with, limit_kernel, limit_kernel_report,
    phi_integral, phi_integral_report, validity_margin, IntegralValue,
};

/// Series is preferred by [`phi_auto`] when it needs at most this many terms.
pub const SERIES_DISPATCH_LIMIT: usize = 2000;

/// Order `delta` of the fractional problem and the Wright parameter `delta - 2`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct WrightParams {
    pub delta: f64,
    pub delta_cap: f64,
}

impl WrightParams {
    pub fn new(delta: f64) -> Result<Self> {
        if !(delta > 1.0 && delta < 2.0) {
            return Err(Error::Domain(format!("delta must lie in (1, 2), got {delta}")));
        }
        Ok(WrightParams { delta, delta_cap: delta - 2.0 })
    }

    /// The boundary case `delta = 1`, where `phi_1(z) = 1/(1 - z)`.
    /// Only the series evaluator accepts it, and only for `|z| < 1`.
    pub fn unit() -> Self {
        WrightParams { delta: 1.0, delta_cap: -1.0 }
    }

    /// `WrightParams::new`, or [`WrightParams::unit`] for `delta = 1`.
    pub fn with_boundary(delta: f64) -> Result<Self> {
        if delta == 1.0 {
            Ok(Self::unit())
        } else {
            Self::new(delta)
        }
    }
}

/// Vertical contour `Re s = abscissa` and quadrature controls.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ContourConfig {
    pub abscissa: f64,
    /// Fixed truncation height; chosen from `tol` when absent.
    pub height: Option<f64>,
    /// Initial number of quadrature nodes (split into 16-point panels).
    pub nodes: usize,
    pub tol: f64,
    pub pole_tol: f64,
    pub angular_tol: f64,
    /// Lower end of the range where the Stirling ratio bound is trusted.
    pub y_min: f64,
}

impl Default for ContourConfig {
    fn default() -> Self {
        ContourConfig {
            abscissa: 0.5,
            height: None,
            nodes: 64,
            tol: 1e-8,
            pole_tol: crate::gamma::DEFAULT_POLE_TOL,
            angular_tol: 1e-9,
            y_min: crate::gamma::DEFAULT_Y_MIN,
        }
    }
}

impl ContourConfig {
    pub fn with_tol(mut self, tol: f64) -> Self {
        self.tol = tol;
        self
    }

    pub fn with_nodes(mut self, nodes: usize) -> Self {
        self.nodes = nodes;
        self
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.abscissa > 0.0 && self.abscissa < 1.0) {
            return Err(Error::Invalid(format!("abscissa must lie in (0, 1), got {}", self.abscissa)));
        }
        if self.nodes < 64 || !self.nodes.is_multiple_of(2) {
            return Err(Error::Invalid(format!("nodes must be even and at least 64, got {}", self.nodes)));
        }
        if !(self.tol > 0.0) {
            return Err(Error::Invalid(format!("tolerance must be positive, got {}", self.tol)));
        }
        if let Some(h) = self.height {
            if !(h > 0.0 && h.is_finite()) {
                return Err(Error::Invalid(format!("height must be positive, got {h}")));
            }
        }
        if !(self.y_min > 0.0) || !(self.angular_tol >= 0.0) || !(self.pole_tol >= 0.0) {
            return Err(Error::Invalid("y_min must be positive and tolerances non-negative".into()));
        }
        Ok(())
    }
}

/// Which evaluator produced a value.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Method {
    Series,
    Integral,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Series => "series",
            Method::Integral => "integral",
        }
    }
}

/// Value of an automatically dispatched evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhiValue {
    pub value: Complex64,
    pub method: Method,
    /// Terms summed, or integrand evaluations.
    pub work: usize,
    /// Tail bound of the chosen evaluator.
    pub tail: f64,
}

impl From<SeriesValue> for PhiValue {
    fn from(v: SeriesValue) -> Self {
        PhiValue { value: v.value, method: Method::Series, work: v.plan.terms, tail: v.plan.tail_bound }
    }
}

impl From<IntegralValue> for PhiValue {
    fn from(v: IntegralValue) -> Self {
        PhiValue { value: v.value, method: Method::Integral, work: v.evaluations, tail: v.tail_bound }
    }
}

fn dispatch(
    params: &WrightParams,
    z: Complex64,
    config: &ContourConfig,
    weight: expansion::Weight,
    integral: impl Fn() -> Result<IntegralValue>,
) -> Result<PhiValue> {
    let tol = config.tol;
    let planned = expansion::plan(params, z, tol, DEFAULT_N_MAX, weight);
    if let Ok(plan) = &planned {
        if plan.terms <= SERIES_DISPATCH_LIMIT || params.delta == 1.0 {
            return expansion::sum(params, z, tol, DEFAULT_N_MAX, weight).map(Into::into);
        }
    }
    let admissible = params.delta > 1.0
        && check_branch(z, config.angular_tol).is_ok()
        && validity_margin(params.delta, z) > 0.0;
    if admissible {
        match integral() {
            Ok(v) => return Ok(v.into()),
            Err(e) if planned.is_err() => return Err(e),
            Err(_) => {}
        }
    }
    planned?;
    expansion::sum(params, z, tol, DEFAULT_N_MAX, weight).map(Into::into)
}

/// `phi_delta(z)` at tolerance `config.tol`: series when it needs at most
/// [`SERIES_DISPATCH_LIMIT`] terms, otherwise the contour integral where it is
/// valid, otherwise the series up to [`DEFAULT_N_MAX`] terms.
pub fn phi_auto(params: &WrightParams, z: Complex64, config: &ContourConfig) -> Result<PhiValue> {
    dispatch(params, z, config, expansion::Weight::Unit, || phi_integral_report(params, z, config))
}

/// `sum_{n >= 1} lambda_n(delta) w^n / n`, dispatched like [`phi_auto`].
pub fn harmonic_auto(params: &WrightParams, w: Complex64, config: &ContourConfig) -> Result<PhiValue> {
    dispatch(params, w, config, expansion::Weight::Harmonic, || harmonic_integral_report(params, w, config))
}

/// `|phi_delta(z) - 1/(1 - z)|`, the distance to the `delta -> 1+` limit.
pub fn phi_limit_gap(delta: f64, z: Complex64, config: &ContourConfig) -> Result<f64> {
    if z.re >= 1.0 && z.arg().abs() <= config.angular_tol {
        return Err(Error::Branch { z });
    }
    let params = WrightParams::with_boundary(delta)?;
    let v = phi_auto(&params, z, config)?;
    Ok((v.value - 1.0 / (Complex64::new(1.0, 0.0) - z)).norm())
}

/// `sum lambda_n(delta) a_n t^n` for coefficients following `law`, through the
/// Wright kernel: `weight * phi_delta(ratio t)` for geometric coefficients and
/// `constant + weight * sum_{n >= 1} lambda_n (ratio t)^n / n` for logarithmic ones.
pub fn law_transform(law: &CoefficientLaw, delta: f64, t: Complex64, config: &ContourConfig) -> Result<PhiValue> {
    let params = WrightParams::with_boundary(delta)?;
    match *law {
        CoefficientLaw::Geometric { weight, ratio } => {
            let v = phi_auto(&params, ratio * t, config)?;
            Ok(PhiValue { value: weight * v.value, tail: v.tail * weight.norm(), ..v })
        }
        CoefficientLaw::Logarithmic { constant, weight, ratio } => {
            let v = harmonic_auto(&params, ratio * t, config)?;
            Ok(PhiValue { value: constant + weight * v.value, tail: v.tail * weight.norm(), ..v })
        }
    }
}
