//! Power-series data, the fractional multiplier transform and truncated evaluation.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::{factorial, ln_gamma_real};

/// Complex number as it appears in JSON input: `[re, im]` or a bare real.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ComplexEntry {
    Pair([f64; 2]),
    Real(f64),
}

impl From<ComplexEntry> for Complex64 {
    fn from(e: ComplexEntry) -> Self {
        match e {
            ComplexEntry::Pair([re, im]) => Complex64::new(re, im),
            ComplexEntry::Real(re) => Complex64::new(re, 0.0),
        }
    }
}

impl From<Complex64> for ComplexEntry {
    fn from(z: Complex64) -> Self {
        ComplexEntry::Pair([z.re, z.im])
    }
}

pub(crate) fn to_complex(v: Vec<ComplexEntry>) -> Vec<Complex64> {
    v.into_iter().map(Complex64::from).collect()
}

pub(crate) fn to_entries(v: &[Complex64]) -> Vec<ComplexEntry> {
    v.iter().copied().map(ComplexEntry::from).collect()
}

#[derive(Serialize, Deserialize)]
struct PowerSeriesRepr {
    coeffs: Vec<ComplexEntry>,
    #[serde(default)]
    singularities: Vec<ComplexEntry>,
}

/// Finite Taylor data `a_0, ..., a_N` with the known singular points of the summed function.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PowerSeriesRepr", into = "PowerSeriesRepr")]
pub struct PowerSeries {
    coeffs: Vec<Complex64>,
    singularities: Vec<Complex64>,
}

impl TryFrom<PowerSeriesRepr> for PowerSeries {
    type Error = Error;

    fn try_from(r: PowerSeriesRepr) -> Result<Self> {
        PowerSeries::with_singularities(to_complex(r.coeffs), to_complex(r.singularities))
    }
}

impl From<PowerSeries> for PowerSeriesRepr {
    fn from(s: PowerSeries) -> Self {
        PowerSeriesRepr { coeffs: to_entries(&s.coeffs), singularities: to_entries(&s.singularities) }
    }
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Complex64>) -> Result<Self> {
        Self::with_singularities(coeffs, Vec::new())
    }

    pub fn with_singularities(coeffs: Vec<Complex64>, singularities: Vec<Complex64>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(Error::Invalid("power series needs at least one coefficient".into()));
        }
        if coeffs.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Invalid("power series coefficients must be finite".into()));
        }
        if singularities.iter().any(|w| w.norm() == 0.0 || !w.norm().is_finite()) {
            return Err(Error::Invalid("singular points must be finite and nonzero".into()));
        }
        Ok(PowerSeries { coeffs, singularities })
    }

    /// Real coefficients `f(n)` for `n = 0..=degree`.
    pub fn from_fn(degree: usize, f: impl Fn(usize) -> f64) -> Result<Self> {
        Self::new((0..=degree).map(|n| Complex64::new(f(n), 0.0)).collect())
    }

    pub fn coeffs(&self) -> &[Complex64] {
        &self.coeffs
    }

    pub fn singularities(&self) -> &[Complex64] {
        &self.singularities
    }

    pub fn len(&self) -> usize {
        self.coeffs.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Recognises coefficient sequences with a closed-form law (see [`CoefficientLaw`]).
    pub fn detect_law(&self, rel_tol: f64) -> Option<CoefficientLaw> {
        CoefficientLaw::detect(&self.coeffs, rel_tol)
    }
}

/// Coefficient sequences whose multiplier transform reduces to the Wright kernel.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum CoefficientLaw {
    /// `a_n = weight * ratio^n`, the expansion of `weight / (1 - ratio z)`.
    Geometric { weight: Complex64, ratio: Complex64 },
    /// `a_0 = constant`, `a_n = weight * ratio^n / n`, the expansion of
    /// `constant - weight * Log(1 - ratio z)`.
    Logarithmic { constant: Complex64, weight: Complex64, ratio: Complex64 },
}

impl CoefficientLaw {
    const MIN_TERMS: usize = 4;

    fn detect(a: &[Complex64], rel_tol: f64) -> Option<Self> {
        if a.len() < Self::MIN_TERMS {
            return None;
        }
        let close = |got: Complex64, want: Complex64| (got - want).norm() <= rel_tol * want.norm();
        if a[0].norm() > 0.0 {
            let ratio = a[1] / a[0];
            let mut expected = a[0];
            let ok = a.iter().all(|&c| {
                let hit = close(c, expected);
                expected *= ratio;
                hit
            });
            if ok {
                return Some(CoefficientLaw::Geometric { weight: a[0], ratio });
            }
        }
        if a[1].norm() > 0.0 && a[2].norm() > 0.0 {
            let ratio = 2.0 * a[2] / a[1];
            let weight = a[1] / ratio;
            let mut power = ratio;
            let ok = a.iter().enumerate().skip(1).all(|(n, &c)| {
                let hit = close(c, weight * power / n as f64);
                power *= ratio;
                hit
            });
            if ok {
                return Some(CoefficientLaw::Logarithmic { constant: a[0], weight, ratio });
            }
        }
        None
    }

    /// Closed-form sum of the untransformed series, where the principal branch applies.
    pub fn closed_form(&self, z: Complex64) -> Complex64 {
        let one = Complex64::new(1.0, 0.0);
        match *self {
            CoefficientLaw::Geometric { weight, ratio } => weight / (one - ratio * z),
            CoefficientLaw::Logarithmic { constant, weight, ratio } => constant - weight * (one - ratio * z).ln(),
        }
    }
}

/// Outcome of a truncated series evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EvaluationReport {
    pub value: Complex64,
    pub terms_used: usize,
    /// Extrapolated size of the omitted tail, relative to `max(1, |value|)`.
    pub tail_estimate: f64,
    pub converged: bool,
}

/// Neumaier-compensated complex accumulator.
#[derive(Debug, Clone, Copy, Default)]
pub struct CompensatedSum {
    sum: Complex64,
    carry: Complex64,
    abs_sum: f64,
}

fn neumaier(sum: f64, carry: f64, x: f64) -> (f64, f64) {
    let t = sum + x;
    let c = if sum.abs() >= x.abs() { (sum - t) + x } else { (x - t) + sum };
    (t, carry + c)
}

impl CompensatedSum {
    pub fn add(&mut self, x: Complex64) {
        let (re, cre) = neumaier(self.sum.re, self.carry.re, x.re);
        let (im, cim) = neumaier(self.sum.im, self.carry.im, x.im);
        self.sum = Complex64::new(re, im);
        self.carry = Complex64::new(cre, cim);
        self.abs_sum += x.norm();
    }

    pub fn value(&self) -> Complex64 {
        self.sum + self.carry
    }

    /// Sum of the moduli of everything added so far.
    pub fn abs_sum(&self) -> f64 {
        self.abs_sum
    }
}

fn check_delta(delta: f64) -> Result<()> {
    if !(1.0..=2.0).contains(&delta) {
        return Err(Error::Domain(format!("multiplier requires delta in [1, 2], got {delta}")));
    }
    Ok(())
}

/// `lambda_n(delta) = n! / Gamma(delta n + 1)`, computed from log-Gamma differences.
pub fn lambda_multiplier(n: usize, delta: f64) -> Result<f64> {
    check_delta(delta)?;
    if n == 0 || delta == 1.0 {
        return Ok(1.0);
    }
    let arg = delta * n as f64;
    if arg.fract() == 0.0 {
        if let (Some(num), Some(den)) = (factorial(n), factorial(arg as usize)) {
            return Ok(num / den);
        }
    }
    Ok((ln_gamma_real(n as f64 + 1.0)? - ln_gamma_real(arg + 1.0)?).exp())
}

/// Coefficient-wise product with `lambda_n(delta)`; the result is entire, so singularities are dropped.
pub fn apply_multipliers(series: &PowerSeries, delta: f64) -> Result<PowerSeries> {
    check_delta(delta)?;
    let coeffs = series
        .coeffs
        .iter()
        .enumerate()
        .map(|(n, &a)| lambda_multiplier(n, delta).map(|l| a * l))
        .collect::<Result<Vec<_>>>()?;
    Ok(PowerSeries { coeffs, singularities: Vec::new() })
}

const SMALL_RUN: usize = 3;

/// Truncated compensated summation of `sum a_n t^n`.
///
/// Stops after three consecutive terms below `tol * max(1, |partial sum|)`.
/// Running out of coefficients or of `n_max` is reported through `converged`.
/// Convergence is also refused when rounding in the partial sums exceeds `tol`.
pub fn evaluate(series: &PowerSeries, t: Complex64, tol: f64, n_max: usize) -> Result<EvaluationReport> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if n_max < 1 {
        return Err(Error::Domain("n_max must be at least 1".into()));
    }
    let limit = n_max.min(series.coeffs.len());
    let mut acc = CompensatedSum::default();
    let mut power = Complex64::new(1.0, 0.0);
    let mut run = 0usize;
    let mut used = 0usize;
    let mut last_nonzero: Option<(usize, f64)> = None;
    let mut prev_nonzero: Option<(usize, f64)> = None;
    let mut last_term = 0.0;
    for (n, &a) in series.coeffs[..limit].iter().enumerate() {
        let term = a * power;
        acc.add(term);
        used = n + 1;
        let size = term.norm();
        last_term = size;
        if size > 0.0 {
            prev_nonzero = last_nonzero;
            last_nonzero = Some((n, size));
        }
        let sum = acc.value();
        if !(size.is_finite() && sum.re.is_finite() && sum.im.is_finite()) {
            return Ok(EvaluationReport { value: sum, terms_used: used, tail_estimate: f64::INFINITY, converged: false });
        }
        let scale = sum.norm().max(1.0);
        if size < tol * scale {
            run += 1;
            if run >= SMALL_RUN {
                break;
            }
        } else {
            run = 0;
        }
        power *= t;
    }
    let value = acc.value();
    let scale = value.norm().max(1.0);
    let tail = match (prev_nonzero, last_nonzero) {
        _ if last_term == 0.0 && run > 0 => 0.0,
        (Some((i, a)), Some((j, b))) => {
            let rho = (b / a).powf(1.0 / (j - i) as f64);
            if rho < 1.0 {
                b * rho / (1.0 - rho)
            } else {
                f64::INFINITY
            }
        }
        _ => last_term,
    };
    let tail_estimate = tail / scale;
    let rounding = 16.0 * f64::EPSILON * acc.abs_sum() / scale;
    let converged = run >= SMALL_RUN.min(limit) && tail_estimate <= tol && rounding <= tol;
    Ok(EvaluationReport { value, terms_used: used, tail_estimate, converged })
}

/// Threshold above which the radius estimate is reported as infinite.
pub const INFINITE_RADIUS: f64 = 1e6;
const MIN_NONZERO: usize = 8;
const GROWTH_RATIO: f64 = 1.25;

fn fit_slope(points: &[(f64, f64)]) -> f64 {
    let n = points.len() as f64;
    let (sx, sy) = points.iter().fold((0.0, 0.0), |(a, b), &(x, y)| (a + x, b + y));
    let (mx, my) = (sx / n, sy / n);
    let (sxy, sxx) = points
        .iter()
        .fold((0.0, 0.0), |(a, b), &(x, y)| (a + (x - mx) * (y - my), b + (x - mx) * (x - mx)));
    sxy / sxx
}

/// Cauchy-Hadamard radius estimate from the trailing half of the coefficients.
///
/// Least-squares fit of `ln|a_n|` against `n`; radii that keep growing across the
/// window (super-geometric decay) and radii above [`INFINITE_RADIUS`] are
/// reported as `f64::INFINITY`.
pub fn radius_estimate(series: &PowerSeries) -> Result<f64> {
    let a = &series.coeffs;
    let start = a.len() / 2;
    let points: Vec<(f64, f64)> = a[start..]
        .iter()
        .enumerate()
        .filter(|(_, c)| c.norm() > 0.0)
        .map(|(k, c)| ((start + k) as f64, c.norm().ln()))
        .collect();
    if points.len() < MIN_NONZERO {
        return Err(Error::InsufficientData(format!(
            "radius estimate needs {MIN_NONZERO} nonzero trailing coefficients, found {}",
            points.len()
        )));
    }
    let radius = (-fit_slope(&points)).exp();
    let (early, late) = points.split_at(points.len() / 2);
    if early.len() >= 2 && late.len() >= 2 {
        let r_early = (-fit_slope(early)).exp();
        let r_late = (-fit_slope(late)).exp();
        if r_late > GROWTH_RATIO * r_early {
            return Ok(f64::INFINITY);
        }
    }
    if radius > INFINITE_RADIUS {
        return Ok(f64::INFINITY);
    }
    Ok(radius)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn ones(n: usize) -> PowerSeries {
        PowerSeries::from_fn(n, |_| 1.0).unwrap()
    }

    #[test]
    fn lambda_examples() {
        assert_eq!(lambda_multiplier(17, 1.0).unwrap(), 1.0);
        assert_eq!(lambda_multiplier(0, 1.7).unwrap(), 1.0);
        assert!((lambda_multiplier(2, 1.5).unwrap() - 1.0 / 3.0).abs() < 1e-14);
        assert!(matches!(lambda_multiplier(3, 0.9), Err(Error::Domain(_))));
        assert!(matches!(lambda_multiplier(3, 2.1), Err(Error::Domain(_))));
        // n = 200 would overflow a direct factorial ratio
        let l = lambda_multiplier(200, 1.5).unwrap();
        assert!(l > 0.0 && l < 1e-100);
    }

    #[test]
    fn lambda_agrees_with_factorial_oracle() {
        // integer delta*n: exact ratio of factorials
        let fact = |k: u64| (1..=k).map(|i| i as f64).product::<f64>();
        for n in 1..12u64 {
            let want = fact(n) / fact(2 * n);
            assert!((lambda_multiplier(n as usize, 2.0).unwrap() - want).abs() <= 1e-14 * want);
        }
        // odd n at delta = 1.5 goes through log-Gamma
        let g = crate::gamma::gamma(c(1.5 * 3.0 + 1.0, 0.0)).unwrap().re;
        assert!((lambda_multiplier(3, 1.5).unwrap() - 6.0 / g).abs() < 1e-13);
    }

    #[test]
    fn apply_multipliers_examples() {
        let s = PowerSeries::with_singularities(vec![c(1.0, 2.0), c(-3.0, 0.5), c(0.25, 0.0)], vec![c(1.0, 0.0)]).unwrap();
        let same = apply_multipliers(&s, 1.0).unwrap();
        assert_eq!(same.coeffs(), s.coeffs());
        assert!(same.singularities().is_empty());

        let g = apply_multipliers(&ones(5), 1.5).unwrap();
        assert!((g.coeffs()[2].re - 1.0 / 3.0).abs() < 1e-15);

        let f = PowerSeries::from_fn(6, |n| (1..=n).map(|i| i as f64).product()).unwrap();
        let t = apply_multipliers(&f, 1.5).unwrap();
        assert!((t.coeffs()[2].re - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn evaluate_geometric() {
        let r = evaluate(&ones(200), c(0.5, 0.0), 1e-12, 1000).unwrap();
        assert!(r.converged);
        assert!((r.value - c(2.0, 0.0)).norm() < 1e-11);
        assert!(r.tail_estimate <= 1e-12);
    }

    #[test]
    fn evaluate_at_zero() {
        let s = PowerSeries::new(vec![c(3.0, -1.0), c(5.0, 0.0), c(7.0, 0.0), c(1.0, 0.0)]).unwrap();
        let r = evaluate(&s, c(0.0, 0.0), 1e-12, 100).unwrap();
        assert_eq!(r.value, c(3.0, -1.0));
        assert!(r.terms_used <= 4);
        assert!(r.converged);
    }

    #[test]
    fn evaluate_zero_series() {
        for len in [1, 2, 10] {
            let z = PowerSeries::new(vec![c(0.0, 0.0); len]).unwrap();
            let r = evaluate(&z, c(3.0, 1.0), 1e-10, 100).unwrap();
            assert_eq!(r.value, c(0.0, 0.0));
            assert!(r.converged);
        }
    }

    #[test]
    fn evaluate_transformed_geometric_is_entire() {
        // oracle: 80-digit summation of sum n!/Gamma(1.5 n + 1) (-2)^n
        let oracle = 0.259_909_482_048_049;
        let s = apply_multipliers(&ones(400), 1.5).unwrap();
        let r = evaluate(&s, c(-2.0, 0.0), 1e-10, 400).unwrap();
        assert!(r.converged);
        assert!((r.value.re - oracle).abs() < 1e-10);
    }

    #[test]
    fn evaluate_flags_divergence() {
        let r = evaluate(&ones(300), c(1.5, 0.0), 1e-10, 300).unwrap();
        assert!(!r.converged);
        assert_eq!(r.terms_used, 300);
        let r = evaluate(&ones(300), c(0.5, 0.0), 1e-10, 5).unwrap();
        assert!(!r.converged);
        assert!(r.terms_used <= 5);
        let r = evaluate(&ones(3000), c(1.5, 0.0), 1e-10, 3000).unwrap();
        assert!(!r.converged);
        assert!(r.terms_used < 3000);
    }

    #[test]
    fn evaluate_handles_parity_zeros() {
        // cosh: odd coefficients vanish
        let s = PowerSeries::from_fn(60, |n| {
            if n % 2 == 0 {
                1.0 / (1..=n).map(|i| i as f64).product::<f64>()
            } else {
                0.0
            }
        })
        .unwrap();
        let r = evaluate(&s, c(1.0, 0.0), 1e-14, 60).unwrap();
        assert!(r.converged);
        assert!((r.value.re - 1f64.cosh()).abs() < 1e-14);
    }

    #[test]
    fn evaluate_argument_checks() {
        assert!(evaluate(&ones(3), c(0.1, 0.0), 0.0, 10).is_err());
        assert!(evaluate(&ones(3), c(0.1, 0.0), 1e-3, 0).is_err());
    }

    #[test]
    fn radius_examples() {
        let r = radius_estimate(&ones(40)).unwrap();
        assert!((r - 1.0).abs() < 0.1);
        let e = PowerSeries::from_fn(40, |n| 1.0 / (1..=n).map(|i| i as f64).product::<f64>()).unwrap();
        assert_eq!(radius_estimate(&e).unwrap(), f64::INFINITY);
        let p = PowerSeries::from_fn(40, |n| 2f64.powi(n as i32)).unwrap();
        assert!((radius_estimate(&p).unwrap() - 0.5).abs() < 0.05);
        let log = PowerSeries::from_fn(40, |n| if n == 0 { 0.0 } else { 1.0 / n as f64 }).unwrap();
        assert!((radius_estimate(&log).unwrap() - 1.0).abs() < 0.1);
        assert!(matches!(radius_estimate(&ones(10)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn law_detection() {
        let g = ones(30).detect_law(1e-12);
        assert_eq!(g, Some(CoefficientLaw::Geometric { weight: c(1.0, 0.0), ratio: c(1.0, 0.0) }));
        let log = PowerSeries::from_fn(30, |n| if n == 0 { 0.0 } else { 1.0 / n as f64 }).unwrap();
        match log.detect_law(1e-12) {
            Some(CoefficientLaw::Logarithmic { constant, weight, ratio }) => {
                assert_eq!(constant, c(0.0, 0.0));
                assert!((weight - c(1.0, 0.0)).norm() < 1e-15);
                assert!((ratio - c(1.0, 0.0)).norm() < 1e-15);
            }
            other => panic!("unexpected {other:?}"),
        }
        let e = PowerSeries::from_fn(30, |n| 1.0 / (1..=n).map(|i| i as f64).product::<f64>()).unwrap();
        assert_eq!(e.detect_law(1e-12), None);
        let law = CoefficientLaw::Logarithmic { constant: c(0.0, 0.0), weight: c(1.0, 0.0), ratio: c(1.0, 0.0) };
        assert!((law.closed_form(c(-5.0, 0.0)).re + 6f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn json_schema() {
        let s: PowerSeries = serde_json::from_str(r#"{"coeffs": [[1, 0], [0.5, -2]], "singularities": [[1, 0]]}"#).unwrap();
        assert_eq!(s.coeffs(), &[c(1.0, 0.0), c(0.5, -2.0)]);
        assert_eq!(s.singularities(), &[c(1.0, 0.0)]);
        let back = serde_json::to_string(&s).unwrap();
        assert_eq!(back, r#"{"coeffs":[[1.0,0.0],[0.5,-2.0]],"singularities":[[1.0,0.0]]}"#);
        let bare: PowerSeries = serde_json::from_str(r#"{"coeffs": [1, 2, 3]}"#).unwrap();
        assert_eq!(bare.len(), 3);
        assert!(serde_json::from_str::<PowerSeries>(r#"{"coeffs": []}"#).is_err());
        assert!(serde_json::from_str::<PowerSeries>(r#"{"coeffs": [1], "singularities": [[0, 0]]}"#).is_err());
    }
}
