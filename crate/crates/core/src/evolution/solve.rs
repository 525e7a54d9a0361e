//! The classical, fractional and rescaled series solutions.
//!
//! All three are sums `sum m_n w_n` over the scaled powers `w_n = A^n u0 / n!`:
//! `m_n = t^n` (classical), `m_n = t^(delta n) n! / Gamma(delta n + 1)` (fractional)
//! and `m_n = lambda_n(delta) t^n` (rescaled).

use num_complex::Complex64;

use super::{in_star, CauchyProblem, Operator, DEFAULT_ANGULAR_TOL};
use crate::error::{Error, Result};
use crate::gamma::ln_gamma_real;
use crate::series::{apply_multipliers, lambda_multiplier, CompensatedSum, PowerSeries};
use crate::wright::{law_transform, ContourConfig, Method};

const SMALL_RUN: usize = 3;
const LAW_REL_TOL: f64 = 1e-12;
// |t|^n beyond this is formed in log space
const LN_POWER_LIMIT: f64 = 600.0;

/// How a solution value was obtained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Route {
    /// Truncated summation of the solution series.
    Series,
    /// Closed-form coefficient law, summed through the Wright kernel by the given evaluator.
    Kernel(Method),
}

impl Route {
    pub fn as_str(&self) -> &'static str {
        match self {
            Route::Series => "series",
            Route::Kernel(Method::Series) => "kernel-series",
            Route::Kernel(Method::Integral) => "kernel-integral",
        }
    }
}

/// Solution value with its summation report. Scale problems yield one
/// value, the observation at `x = 0`; matrix problems yield the whole vector.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub values: Vec<Complex64>,
    pub terms_used: usize,
    /// Extrapolated tail relative to `max(1, |value|)`, or the rigorous kernel tail bound.
    pub tail_estimate: f64,
    pub converged: bool,
    pub route: Route,
}

/// `A^k u0` for `k = 0..=n`. For `A = d/dx` each entry is the Taylor vector of `A^k u0`.
pub fn power_sequence(problem: &CauchyProblem, n: usize) -> Result<Vec<Vec<Complex64>>> {
    match problem.operator() {
        Operator::Matrix(op) => {
            let mut out = vec![op.u0().to_vec()];
            for k in 0..n {
                let next = op.apply(&out[k]);
                out.push(next);
            }
            Ok(out)
        }
        Operator::Scale { u0, .. } => {
            let c = u0.taylor();
            if c.len() < n + 1 {
                return Err(Error::Truncation { needed: n + 1, available: c.len() });
            }
            Ok((0..=n)
                .map(|k| {
                    (0..c.len() - k)
                        .map(|j| {
                            let falling: f64 = (j + 1..=j + k).map(|i| i as f64).product();
                            c[j + k] * falling
                        })
                        .collect()
                })
                .collect())
        }
    }
}

// Generator of w_n = A^n u0 / n! (for scale problems, the observed value w_n(0) = c_n).
enum ScaledPowers<'a> {
    Matrix { op: &'a super::FiniteOperator, current: Vec<Complex64>, n: usize },
    Observed { taylor: &'a [Complex64] },
}

impl<'a> ScaledPowers<'a> {
    fn new(problem: &'a CauchyProblem) -> Self {
        match problem.operator() {
            Operator::Matrix(op) => ScaledPowers::Matrix { op, current: op.u0().to_vec(), n: 0 },
            Operator::Scale { u0, .. } => ScaledPowers::Observed { taylor: u0.taylor() },
        }
    }

    fn limit(&self, n_max: usize) -> usize {
        match self {
            ScaledPowers::Matrix { .. } => n_max,
            ScaledPowers::Observed { taylor } => taylor.len().min(n_max),
        }
    }

    fn dim(&self) -> usize {
        match self {
            ScaledPowers::Matrix { op, .. } => op.dim(),
            ScaledPowers::Observed { .. } => 1,
        }
    }

    // w_n for consecutive n starting at 0
    fn next(&mut self, n: usize) -> Vec<Complex64> {
        match self {
            ScaledPowers::Matrix { op, current, n: k } => {
                while *k < n {
                    *k += 1;
                    let scale = 1.0 / *k as f64;
                    *current = op.apply(current).into_iter().map(|x| x * scale).collect();
                }
                current.clone()
            }
            ScaledPowers::Observed { taylor } => vec![taylor[n]],
        }
    }
}

fn sup_norm(v: &[Complex64]) -> f64 {
    v.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

fn sum_series(problem: &CauchyProblem, tol: f64, n_max: usize, mut multiplier: impl FnMut(usize) -> Result<Complex64>) -> Result<Solution> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let mut powers = ScaledPowers::new(problem);
    let limit = powers.limit(n_max);
    let mut acc = vec![CompensatedSum::default(); powers.dim()];
    let mut run = 0usize;
    let mut used = 0usize;
    let mut last: Option<(usize, f64)> = None;
    let mut prev: Option<(usize, f64)> = None;
    let mut last_size = 0.0;
    for n in 0..limit {
        let m = multiplier(n)?;
        let w = powers.next(n);
        let term: Vec<Complex64> = w.iter().map(|x| x * m).collect();
        for (a, x) in acc.iter_mut().zip(&term) {
            a.add(*x);
        }
        used = n + 1;
        let size = sup_norm(&term);
        last_size = size;
        if size > 0.0 {
            prev = last;
            last = Some((n, size));
        }
        let sum: Vec<Complex64> = acc.iter().map(|a| a.value()).collect();
        if !term.iter().chain(&sum).all(|x| x.re.is_finite() && x.im.is_finite()) {
            // overflowed: the series diverges at this t
            return Ok(Solution { values: sum, terms_used: used, tail_estimate: f64::INFINITY, converged: false, route: Route::Series });
        }
        if size < tol * sup_norm(&sum).max(1.0) {
            run += 1;
            if run >= SMALL_RUN {
                break;
            }
        } else {
            run = 0;
        }
    }
    let values: Vec<Complex64> = acc.iter().map(|a| a.value()).collect();
    let scale = sup_norm(&values).max(1.0);
    let tail = match (prev, last) {
        _ if last_size == 0.0 && run > 0 => 0.0,
        (Some((i, a)), Some((j, b))) => {
            let rho = (b / a).powf(1.0 / (j - i) as f64);
            if rho < 1.0 {
                b * rho / (1.0 - rho)
            } else {
                f64::INFINITY
            }
        }
        _ => last_size,
    };
    let tail_estimate = tail / scale;
    let rounding = 16.0 * f64::EPSILON * acc.iter().map(|a| a.abs_sum()).fold(0.0, f64::max) / scale;
    let converged = run >= SMALL_RUN.min(limit) && tail_estimate <= tol && rounding <= tol;
    Ok(Solution { values, terms_used: used, tail_estimate, converged, route: Route::Series })
}

// k t^n with k = e^{ln_k}, falling back to log space once |t|^n is out of range
fn scaled_power(k: f64, ln_k: f64, n: usize, t: Complex64, power: Complex64) -> Complex64 {
    if n == 0 || (n as f64) * t.norm().ln().abs() < LN_POWER_LIMIT {
        power * k
    } else if t.norm() == 0.0 {
        Complex64::new(0.0, 0.0)
    } else {
        (ln_k + n as f64 * t.ln()).exp()
    }
}

fn power_multipliers(t: Complex64, delta: f64) -> impl FnMut(usize) -> Result<Complex64> {
    let mut power = Complex64::new(1.0, 0.0);
    move |n| {
        if n > 0 {
            power *= t;
        }
        let k = lambda_multiplier(n, delta)?;
        let ln_k = if k > 0.0 { k.ln() } else { ln_gamma_real(n as f64 + 1.0)? - ln_gamma_real(delta * n as f64 + 1.0)? };
        Ok(scaled_power(k, ln_k, n, t, power))
    }
}

/// `u(t) = sum t^n / n! A^n u0`.
pub fn solve_classical(problem: &CauchyProblem, t: Complex64, tol: f64, n_max: usize) -> Result<Solution> {
    sum_series(problem, tol, n_max, power_multipliers(t, 1.0))
}

/// `u_delta(t) = sum t^(delta n) / Gamma(delta n + 1) A^n u0` for real `t >= 0`.
pub fn solve_fractional(problem: &CauchyProblem, t: f64, tol: f64, n_max: usize) -> Result<Solution> {
    if !(t >= 0.0 && t.is_finite()) {
        return Err(Error::Domain(format!("fractional solution needs real t >= 0, got {t}")));
    }
    let delta = problem.delta();
    let ln_t = t.ln();
    sum_series(problem, tol, n_max, move |n| {
        if n == 0 {
            return Ok(Complex64::new(1.0, 0.0));
        }
        if t == 0.0 {
            return Ok(Complex64::new(0.0, 0.0));
        }
        let nf = n as f64;
        let ln_m = delta * nf * ln_t + ln_gamma_real(nf + 1.0)? - ln_gamma_real(delta * nf + 1.0)?;
        Ok(Complex64::new(ln_m.exp(), 0.0))
    })
}

/// Classical Taylor data of the observed solution of a scale problem, multiplied by
/// `lambda_n(delta)`: the coefficients of `u_delta(t^(1/delta))` at `x = 0`.
pub fn rescaled_coefficients(problem: &CauchyProblem, delta: f64) -> Result<PowerSeries> {
    match problem.operator() {
        Operator::Scale { u0, .. } => apply_multipliers(&PowerSeries::new(u0.taylor().to_vec())?, delta),
        Operator::Matrix(_) => Err(Error::Invalid("rescaled coefficients are defined for scale problems".into())),
    }
}

/// `u_delta(t^(1/delta)) = sum t^n / Gamma(delta n + 1) A^n u0`, an entire function of `t`.
///
/// For a scale problem whose Taylor data follows a geometric or logarithmic law
/// (see [`crate::series::CoefficientLaw`]) and `1 < delta < 2`, the data is taken
/// as that law and summed through the Wright kernel, which reaches points far
/// outside the disk where the truncated series is usable.
pub fn solve_rescaled(problem: &CauchyProblem, t: Complex64, tol: f64, n_max: usize) -> Result<Solution> {
    let delta = problem.delta();
    if let Operator::Scale { u0, .. } = problem.operator() {
        if delta > 1.0 && delta < 2.0 {
            let law = PowerSeries::new(u0.taylor().to_vec())?.detect_law(LAW_REL_TOL);
            if let Some(law) = law {
                let v = law_transform(&law, delta, t, &ContourConfig::default().with_tol(tol))?;
                return Ok(Solution {
                    values: vec![v.value],
                    terms_used: v.work,
                    tail_estimate: v.tail,
                    converged: true,
                    route: Route::Kernel(v.method),
                });
            }
        }
    }
    sum_series(problem, tol, n_max, power_multipliers(t, delta))
}

/// One row of a continuation sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepRow {
    pub delta: f64,
    pub values: Vec<Complex64>,
    /// Max-norm distance to the reference, when one was given.
    pub error: Option<f64>,
    pub terms_used: usize,
    pub converged: bool,
    pub route: Route,
}

/// Rows of a sweep `delta -> 1+` and the verdict on the error column.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTable {
    pub t: Complex64,
    pub rows: Vec<SweepRow>,
    /// Errors finite and strictly decreasing along the sweep; `None` without a reference.
    pub monotone_decreasing: Option<bool>,
}

/// Checks that `deltas` is strictly decreasing inside `(1, 2]`.
pub(crate) fn check_schedule(deltas: &[f64]) -> Result<()> {
    if deltas.is_empty() {
        return Err(Error::Invalid("delta schedule is empty".into()));
    }
    if deltas.iter().any(|&d| !(d > 1.0 && d <= 2.0)) {
        return Err(Error::Invalid("schedule values must lie in (1, 2]".into()));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(Error::Invalid("delta schedule must be strictly decreasing".into()));
    }
    Ok(())
}

/// `u_delta(t^(1/delta))` along a decreasing schedule of orders, compared with `reference`.
///
/// With a reference, `t` must lie in the star of the declared singularities.
pub fn continuation_sweep(
    problem: &CauchyProblem,
    t: Complex64,
    deltas: &[f64],
    reference: Option<&[Complex64]>,
    tol: f64,
    n_max: usize,
) -> Result<SweepTable> {
    check_schedule(deltas)?;
    if reference.is_some() {
        if let Some(star) = problem.star() {
            if !in_star(t, star, DEFAULT_ANGULAR_TOL) {
                return Err(Error::StarViolation { t });
            }
        }
    }
    let mut rows = Vec::with_capacity(deltas.len());
    for &delta in deltas {
        let s = solve_rescaled(&problem.with_delta(delta)?, t, tol, n_max)?;
        let error = reference.map(|r| {
            s.values.iter().zip(r).map(|(a, b)| (a - b).norm()).fold(0.0, f64::max)
        });
        rows.push(SweepRow { delta, values: s.values, error, terms_used: s.terms_used, converged: s.converged, route: s.route });
    }
    let monotone_decreasing = reference.map(|_| {
        let errs: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
        errs.iter().all(|e| e.is_finite()) && errs.windows(2).all(|w| w[1] < w[0])
    });
    Ok(SweepTable { t, rows, monotone_decreasing })
}
