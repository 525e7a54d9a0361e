use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Element of `X_omega` given by its Taylor coefficients at 0.
#[derive(Debug, Clone, PartialEq)]
pub struct ScaleElement {
    taylor: Vec<Complex64>,
}

impl ScaleElement {
    pub fn new(taylor: Vec<Complex64>) -> Result<Self> {
        if taylor.is_empty() {
            return Err(Error::Invalid("scale element needs at least one Taylor coefficient".into()));
        }
        if taylor.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::Invalid("Taylor coefficients must be finite".into()));
        }
        Ok(ScaleElement { taylor })
    }

    pub fn taylor(&self) -> &[Complex64] {
        &self.taylor
    }

    /// `d/dx`: coefficient `n` becomes `(n + 1) c_{n+1}`.
    pub fn derivative(&self) -> ScaleElement {
        let taylor: Vec<Complex64> = self.taylor.iter().enumerate().skip(1).map(|(n, c)| c * n as f64).collect();
        ScaleElement { taylor: if taylor.is_empty() { vec![Complex64::new(0.0, 0.0)] } else { taylor } }
    }

    pub fn norm_at(&self, omega: f64) -> Result<f64> {
        norm_at(self, omega)
    }
}

fn check_omega(omega: f64) -> Result<()> {
    if !(0.0..1.0).contains(&omega) {
        return Err(Error::Domain(format!("omega must lie in [0, 1), got {omega}")));
    }
    Ok(())
}

/// Weighted l1 norm `sum |c_n| (1 - omega)^n`.
pub fn norm_at(element: &ScaleElement, omega: f64) -> Result<f64> {
    check_omega(omega)?;
    let q = 1.0 - omega;
    let mut weight = 1.0;
    let mut total = 0.0;
    for c in &element.taylor {
        total += c.norm() * weight;
        weight *= q;
    }
    Ok(total)
}

/// Outcome of a successful norm-bound check.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormBoundReport {
    pub elements_checked: usize,
    /// Largest `(w2 - w1) ||A e||_{w2} / ||e||_{w1}` seen; at most 1.
    pub worst_ratio: f64,
}

const RATIO_SLACK: f64 = 1e-12;
const MAX_RANDOM_LEN: usize = 100;

fn ratio(element: &ScaleElement, omega1: f64, omega2: f64) -> Result<f64> {
    let lower = norm_at(element, omega1)?;
    let upper = norm_at(&element.derivative(), omega2)?;
    if lower == 0.0 {
        return Ok(0.0);
    }
    Ok((omega2 - omega1) * upper / lower)
}

/// Checks `||d/dx e||_{w2} <= ||e||_{w1} / (w2 - w1)` on `element` and on `trials`
/// random elements of up to 100 coefficients drawn from a generator seeded with `seed`.
pub fn norm_bound_check(element: &ScaleElement, omega1: f64, omega2: f64, trials: usize, seed: u64) -> Result<NormBoundReport> {
    check_omega(omega1)?;
    check_omega(omega2)?;
    if !(omega1 < omega2) {
        return Err(Error::Domain(format!("need omega1 < omega2, got {omega1} and {omega2}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst: f64 = 0.0;
    let mut check = |e: &ScaleElement| -> Result<()> {
        let r = ratio(e, omega1, omega2)?;
        if r > 1.0 + RATIO_SLACK {
            return Err(Error::BoundViolation { ratio: r, omega1, omega2, witness: e.taylor.clone() });
        }
        worst = worst.max(r);
        Ok(())
    };
    check(element)?;
    for _ in 0..trials {
        let len = rng.gen_range(1..=MAX_RANDOM_LEN);
        // spread of decay rates, including coefficients concentrated at one index
        let decay: f64 = rng.gen_range(0.0..1.5);
        let spike = rng.gen_bool(0.2).then(|| rng.gen_range(0..len));
        let taylor = (0..len)
            .map(|n| {
                let scale = match spike {
                    Some(k) if k != n => 0.0,
                    _ => (-decay * n as f64).exp(),
                };
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) * scale
            })
            .collect();
        check(&ScaleElement::new(taylor)?)?;
    }
    Ok(NormBoundReport { elements_checked: trials + 1, worst_ratio: worst })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn real(v: &[f64]) -> ScaleElement {
        ScaleElement::new(v.iter().map(|&x| Complex64::new(x, 0.0)).collect()).unwrap()
    }

    #[test]
    fn norm_examples() {
        assert_eq!(norm_at(&real(&[1.0, 0.0, 0.0]), 0.7).unwrap(), 1.0);
        assert_eq!(norm_at(&real(&[1.0, 1.0]), 0.5).unwrap(), 1.5);
        assert_eq!(norm_at(&real(&[1.0; 31]), 0.0).unwrap(), 31.0);
        assert!(norm_at(&real(&[1.0]), 1.0).is_err());
        assert!(norm_at(&real(&[1.0]), -0.1).is_err());
    }

    #[test]
    fn bound_examples() {
        let e = real(&[0.0, 1.0]);
        assert_eq!(norm_at(&e.derivative(), 0.5).unwrap(), 1.0);
        assert!(norm_bound_check(&e, 0.0, 0.5, 0, 1).is_ok());
        assert_eq!(norm_bound_check(&real(&[3.0]), 0.2, 0.3, 0, 1).unwrap().worst_ratio, 0.0);
        let r = norm_bound_check(&real(&[1.0; 51]), 0.1, 0.2, 50, 7).unwrap();
        assert!(r.worst_ratio <= 1.0);
        assert_eq!(r.elements_checked, 51);
    }

    #[test]
    fn brute_force_ratio() {
        // c_n = 1, n <= 50: ||e'||_{0.2} = sum n 0.8^{n-1}, ||e||_{0.1} = sum 0.9^n
        let e = real(&[1.0; 51]);
        let upper: f64 = (1..=50).map(|n| n as f64 * 0.8f64.powi(n - 1)).sum();
        let lower: f64 = (0..=50).map(|n| 0.9f64.powi(n)).sum();
        assert!((ratio(&e, 0.1, 0.2).unwrap() - 0.1 * upper / lower).abs() < 1e-12);
    }

    #[test]
    fn bound_is_nearly_sharp() {
        // e = x: the ratio is w2 - w1, so C = 1 cannot be lowered to 1/2
        let r = ratio(&real(&[0.0, 1.0]), 0.0, 0.9).unwrap();
        assert!((r - 0.9).abs() < 1e-15);
    }
}
