use std::f64::consts::PI;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// Default angular tolerance of the ray test.
pub const DEFAULT_ANGULAR_TOL: f64 = 1e-9;

/// Mittag-Leffler star: the plane cut along each ray from the origin,
/// starting at a singular point.
#[derive(Debug, Clone, PartialEq)]
pub struct StarDomain {
    singularities: Vec<Complex64>,
}

impl StarDomain {
    pub fn new(singularities: Vec<Complex64>) -> Result<Self> {
        if singularities.is_empty() {
            return Err(Error::Invalid("a star needs at least one singular point".into()));
        }
        if singularities.iter().any(|w| !(w.norm() > 0.0 && w.norm().is_finite())) {
            return Err(Error::Invalid("singular points must be finite and nonzero".into()));
        }
        Ok(StarDomain { singularities })
    }

    pub fn singularities(&self) -> &[Complex64] {
        &self.singularities
    }

    pub fn contains(&self, t: Complex64, angular_tol: f64) -> bool {
        in_star(t, self, angular_tol)
    }
}

/// Whether `t` lies in the star; points on a cut, singular points included, are outside.
pub fn in_star(t: Complex64, star: &StarDomain, angular_tol: f64) -> bool {
    let r = t.norm();
    if r == 0.0 {
        return true;
    }
    star.singularities.iter().all(|w| {
        let d = (t.arg() - w.arg()).rem_euclid(2.0 * PI);
        let angle = d.min(2.0 * PI - d);
        let rw = w.norm();
        !(angle <= angular_tol && r >= rw - rw * angular_tol)
    })
}
