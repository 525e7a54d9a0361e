//! Taylor-series evaluation of `phi_delta` with an a-priori truncation index.
//!
//! The term ratio `rho_n = (n + 1) Gamma(delta n + 1) / Gamma(delta n + delta + 1) |z|`
//! is decreasing once `n >= (1 + delta - delta^2) / (delta (delta - 1))`, so the tail
//! after index `N` is bounded by `|t_N| / (1 - rho_N)` as soon as `rho_N < 1`.

use num_complex::Complex64;

use super::extended::Extended;
use super::WrightParams;
use crate::error::{Error, Result};
use crate::gamma::ln_gamma_real;
use crate::series::{lambda_multiplier, CompensatedSum};

/// Default cap on the truncation index.
pub const DEFAULT_N_MAX: usize = 20_000;

// Largest |ln| of a double-precision intermediate we allow on the fast path.
const LN_SAFE: f64 = 690.0;
const MAX_SEARCH: usize = 1 << 40;

/// Which coefficient family is summed.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Weight {
    /// `sum_{n >= 0} lambda_n z^n`, i.e. `phi_delta(z)`.
    Unit,
    /// `sum_{n >= 1} lambda_n z^n / n`.
    Harmonic,
}

/// Truncation and precision chosen before summing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesPlan {
    /// Number of terms summed (indices `0..terms`).
    pub terms: usize,
    /// Rigorous bound on the omitted tail.
    pub tail_bound: f64,
    /// `sum |t_n|` over the summed terms.
    pub abs_sum: f64,
    /// Predicted rounding error of a double-precision summation.
    pub rounding_estimate: f64,
    /// Working precision in bits; 53 means plain doubles.
    pub precision_bits: usize,
}

/// A summed series together with its plan.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesValue {
    pub value: Complex64,
    pub plan: SeriesPlan,
}

struct Terms {
    delta: f64,
    ln_r: f64,
    weight: Weight,
}

impl Terms {
    fn ln_lambda(&self, n: usize) -> f64 {
        if n == 0 || self.delta == 1.0 {
            return 0.0;
        }
        let n = n as f64;
        ln_gamma_real(n + 1.0).unwrap_or(f64::NAN) - ln_gamma_real(self.delta * n + 1.0).unwrap_or(f64::NAN)
    }

    // ln |t_n| including the weight
    fn ln_term(&self, n: usize) -> f64 {
        let base = self.ln_lambda(n) + n as f64 * self.ln_r;
        match self.weight {
            Weight::Harmonic => base - (n as f64).ln(),
            Weight::Unit => base,
        }
    }

    fn ln_ratio(&self, n: usize) -> f64 {
        self.ln_lambda(n + 1) - self.ln_lambda(n) + self.ln_r
    }

    fn monotone_from(&self) -> usize {
        let d = self.delta;
        if d == 1.0 {
            return 0;
        }
        ((1.0 + d - d * d) / (d * (d - 1.0))).max(0.0).ceil() as usize
    }

    fn tail_after(&self, n: usize) -> Option<f64> {
        let rho = self.ln_ratio(n).exp();
        if rho < 1.0 {
            Some(self.ln_term(n).exp() / (1.0 - rho))
        } else {
            None
        }
    }
}

fn check_params(params: &WrightParams, z: Complex64, tol: f64) -> Result<()> {
    if !(tol > 0.0) {
        return Err(Error::Domain(format!("tolerance must be positive, got {tol}")));
    }
    if !(z.re.is_finite() && z.im.is_finite()) {
        return Err(Error::Domain(format!("non-finite argument {z}")));
    }
    if params.delta == 1.0 && z.norm() >= 1.0 {
        return Err(Error::Domain(format!("delta = 1 is admitted only for |z| < 1, got |z| = {}", z.norm())));
    }
    Ok(())
}

pub(crate) fn plan(params: &WrightParams, z: Complex64, tol: f64, n_max: usize, weight: Weight) -> Result<SeriesPlan> {
    check_params(params, z, tol)?;
    let start = match weight {
        Weight::Unit => 0,
        Weight::Harmonic => 1,
    };
    if z.norm() == 0.0 {
        let terms = start + 1;
        return Ok(SeriesPlan { terms, tail_bound: 0.0, abs_sum: 1.0 - start as f64, rounding_estimate: 0.0, precision_bits: 53 });
    }
    let t = Terms { delta: params.delta, ln_r: z.norm().ln(), weight };
    let target = tol / 4.0;
    let ok = |n: usize| t.tail_after(n).is_some_and(|b| b <= target);
    let lo0 = t.monotone_from().max(start).max(1);
    let terms = if ok(lo0) {
        lo0
    } else {
        let mut lo = lo0;
        let mut hi = lo0.max(1) * 2;
        while !ok(hi) {
            if hi > MAX_SEARCH {
                return Err(Error::SlowConvergence { required: usize::MAX, limit: n_max });
            }
            lo = hi;
            hi *= 2;
        }
        while hi - lo > 1 {
            let mid = lo + (hi - lo) / 2;
            if ok(mid) {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        hi
    };
    if terms > n_max {
        return Err(Error::SlowConvergence { required: terms, limit: n_max });
    }
    let tail_bound = t.tail_after(terms).unwrap_or(0.0);
    let mut abs_sum = 0.0;
    let mut rounding = 0.0;
    let mut max_log = 0.0f64;
    let mut max_lambda_log = 0.0f64;
    for n in start..terms {
        let size = t.ln_term(n).exp();
        let lg_n = ln_gamma_real(n as f64 + 1.0)?.abs();
        let lg_d = ln_gamma_real(params.delta * n as f64 + 1.0)?.abs();
        abs_sum += size;
        rounding += size * (4.0 + n as f64 + lg_n + lg_d);
        max_log = max_log.max(lg_n + lg_d);
        max_lambda_log = max_lambda_log.max(-t.ln_lambda(n));
    }
    rounding *= f64::EPSILON;
    let power_log = (terms as f64) * t.ln_r.abs();
    let fast = rounding <= target && power_log < LN_SAFE && max_lambda_log < LN_SAFE;
    let precision_bits = if fast {
        53
    } else {
        let need = (abs_sum * (terms as f64 + max_log + 4.0) * 8.0 / tol).log2().ceil().max(0.0);
        need as usize + 64
    };
    Ok(SeriesPlan { terms, tail_bound, abs_sum, rounding_estimate: rounding, precision_bits })
}

pub(crate) fn sum(params: &WrightParams, z: Complex64, tol: f64, n_max: usize, weight: Weight) -> Result<SeriesValue> {
    let plan = plan(params, z, tol, n_max, weight)?;
    let value = if plan.precision_bits == 53 {
        sum_double(params.delta, z, plan.terms, weight)?
    } else {
        let mut ext = Extended::new(plan.precision_bits);
        ext.wright_sum(params.delta, z, plan.terms, weight == Weight::Harmonic)
    };
    Ok(SeriesValue { value, plan })
}

fn sum_double(delta: f64, z: Complex64, terms: usize, weight: Weight) -> Result<Complex64> {
    let mut acc = CompensatedSum::default();
    let mut power = Complex64::new(1.0, 0.0);
    for n in 0..terms {
        let lambda = lambda_multiplier(n, delta)?;
        match weight {
            Weight::Unit => acc.add(power * lambda),
            Weight::Harmonic if n > 0 => acc.add(power * (lambda / n as f64)),
            Weight::Harmonic => {}
        }
        power *= z;
    }
    Ok(acc.value())
}

/// Truncation plan for `phi_delta(z)` at absolute tolerance `tol`.
pub fn plan_phi_series(params: &WrightParams, z: Complex64, tol: f64, n_max: usize) -> Result<SeriesPlan> {
    plan(params, z, tol, n_max, Weight::Unit)
}

/// `phi_delta(z)` by its Taylor series, with at most [`DEFAULT_N_MAX`] terms.
pub fn phi_series(params: &WrightParams, z: Complex64, tol: f64) -> Result<Complex64> {
    phi_series_report(params, z, tol, DEFAULT_N_MAX).map(|v| v.value)
}

/// `phi_delta(z)` by its Taylor series with an explicit term cap.
///
/// The tail is bounded a priori by `tol / 4`. Terms are summed in double
/// precision when the predicted rounding error stays below `tol / 4`, and in
/// extended precision otherwise.
pub fn phi_series_report(params: &WrightParams, z: Complex64, tol: f64, n_max: usize) -> Result<SeriesValue> {
    sum(params, z, tol, n_max, Weight::Unit)
}

/// `sum_{n >= 1} lambda_n(delta) z^n / n` by its Taylor series.
pub fn harmonic_series_report(params: &WrightParams, z: Complex64, tol: f64, n_max: usize) -> Result<SeriesValue> {
    sum(params, z, tol, n_max, Weight::Harmonic)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p(delta: f64) -> WrightParams {
        WrightParams::new(delta).unwrap()
    }

    #[test]
    fn trivial_values() {
        assert_eq!(phi_series(&p(1.3), Complex64::new(0.0, 0.0), 1e-12).unwrap(), Complex64::new(1.0, 0.0));
        let v = phi_series(&WrightParams::unit(), Complex64::new(0.5, 0.0), 1e-13).unwrap();
        assert!((v.re - 2.0).abs() < 1e-12);
        assert!(phi_series(&WrightParams::unit(), Complex64::new(1.5, 0.0), 1e-10).is_err());
    }

    #[test]
    fn reference_values() {
        // 50-digit direct summation
        let cases = [
            (1.5, Complex64::new(-2.0, 0.0), Complex64::new(0.259_909_482_048_049, 0.0)),
            (1.2, Complex64::new(-4.0, 0.0), Complex64::new(0.158_275_972_742_095, 0.0)),
            (1.5, Complex64::new(-1.0, 0.0), Complex64::new(0.492_865_890_794_971, 0.0)),
            (1.5, Complex64::new(0.0, 2.0), Complex64::new(0.092_003_647_462_103_1, 0.814_050_491_582_514)),
            (1.8, Complex64::new(-4.0, 0.0), Complex64::new(-0.024_055_582_268_771_5, 0.0)),
            (1.2, Complex64::new(0.0, 4.0), Complex64::new(-0.038_052_732_812_051_5, 0.219_830_453_838_189)),
        ];
        for (d, z, want) in cases {
            let got = phi_series_report(&p(d), z, 1e-12, DEFAULT_N_MAX).unwrap();
            assert!((got.value - want).norm() < 1e-12, "delta {d} z {z}: {} vs {want}", got.value);
        }
    }

    #[test]
    fn extended_path_is_used_when_cancellation_is_severe() {
        let plan = plan_phi_series(&p(1.2), Complex64::new(-4.0, 0.0), 1e-10, DEFAULT_N_MAX).unwrap();
        assert!(plan.precision_bits > 53);
        let plan = plan_phi_series(&p(1.5), Complex64::new(-0.5, 0.0), 1e-10, DEFAULT_N_MAX).unwrap();
        assert_eq!(plan.precision_bits, 53);
        assert!(plan.tail_bound <= 2.5e-11);
    }

    #[test]
    fn slow_convergence_near_one() {
        match phi_series(&p(1.01), Complex64::new(-3.0, 0.0), 1e-10) {
            Err(Error::SlowConvergence { required, limit }) => assert!(required > limit),
            other => panic!("expected SlowConvergence, got {other:?}"),
        }
    }

    #[test]
    fn harmonic_series_matches_log_at_unit_delta() {
        let z = Complex64::new(-0.5, 0.3);
        let v = harmonic_series_report(&WrightParams::unit(), z, 1e-13, DEFAULT_N_MAX).unwrap();
        let want = -(Complex64::new(1.0, 0.0) - z).ln();
        assert!((v.value - want).norm() < 1e-12);
    }
}
