//! Cauchy problems `du/dt = A u`, `u(0) = u0`, for matrices and for `A = d/dx`
//! on a scale of weighted Taylor spaces.

mod scale;
mod solve;
mod star;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::series::{radius_estimate, to_complex, to_entries, ComplexEntry, PowerSeries};

pub use scale::{norm_at, norm_bound_check, NormBoundReport, ScaleElement};
pub use solve::{
    continuation_sweep, power_sequence, rescaled_coefficients, solve_classical, solve_fractional, solve_rescaled,
    Route, Solution, SweepRow, SweepTable,
};
pub use star::{in_star, StarDomain, DEFAULT_ANGULAR_TOL};

/// Square complex matrix with its initial vector.
#[derive(Debug, Clone, PartialEq)]
pub struct FiniteOperator {
    matrix: Vec<Vec<Complex64>>,
    u0: Vec<Complex64>,
}

impl FiniteOperator {
    pub fn new(matrix: Vec<Vec<Complex64>>, u0: Vec<Complex64>) -> Result<Self> {
        let d = u0.len();
        if d == 0 {
            return Err(Error::Invalid("initial vector is empty".into()));
        }
        if matrix.len() != d || matrix.iter().any(|row| row.len() != d) {
            return Err(Error::Invalid(format!("matrix must be {d} x {d} to match u0")));
        }
        let finite = |z: &Complex64| z.re.is_finite() && z.im.is_finite();
        if !matrix.iter().flatten().all(finite) || !u0.iter().all(finite) {
            return Err(Error::Invalid("matrix and u0 entries must be finite".into()));
        }
        Ok(FiniteOperator { matrix, u0 })
    }

    pub fn matrix(&self) -> &[Vec<Complex64>] {
        &self.matrix
    }

    pub fn u0(&self) -> &[Complex64] {
        &self.u0
    }

    pub fn dim(&self) -> usize {
        self.u0.len()
    }

    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        self.matrix
            .iter()
            .map(|row| row.iter().zip(v).fold(Complex64::new(0.0, 0.0), |acc, (a, x)| acc + a * x))
            .collect()
    }
}

/// Which unbounded operator acts on the scale.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScaleOperatorKind {
    Derivative,
}

/// `A = d/dx` on the weighted Taylor scale, with `||A||_{w1 -> w2} <= C / (w2 - w1)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaleOperatorModel {
    pub kind: ScaleOperatorKind,
    pub norm_constant: f64,
    /// Empirical radius of the classical solution observed at `x = 0`;
    /// `None` when the Taylor data is too short to estimate it.
    pub existence_time: Option<f64>,
}

/// Operator together with its initial datum.
#[derive(Debug, Clone, PartialEq)]
pub enum Operator {
    Matrix(FiniteOperator),
    Scale { model: ScaleOperatorModel, u0: ScaleElement },
}

/// `du/dt = A u` with the fractional order `delta` of its companion problem.
///
/// Scale problems are observed through the functional "value at `x = 0`".
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyProblem {
    operator: Operator,
    delta: f64,
    star: Option<StarDomain>,
}

fn check_order(delta: f64) -> Result<()> {
    if !(delta > 1.0 && delta <= 2.0) {
        return Err(Error::Domain(format!("problem order must lie in (1, 2], got {delta}")));
    }
    Ok(())
}

impl CauchyProblem {
    pub fn matrix(matrix: Vec<Vec<Complex64>>, u0: Vec<Complex64>, delta: f64) -> Result<Self> {
        check_order(delta)?;
        Ok(CauchyProblem { operator: Operator::Matrix(FiniteOperator::new(matrix, u0)?), delta, star: None })
    }

    /// Scalar problem `du/dt = a u`.
    pub fn scalar(a: Complex64, u0: Complex64, delta: f64) -> Result<Self> {
        Self::matrix(vec![vec![a]], vec![u0], delta)
    }

    /// `A = d/dx` with `u0(x) = sum taylor[n] x^n`.
    pub fn derivative(taylor: Vec<Complex64>, delta: f64) -> Result<Self> {
        check_order(delta)?;
        let u0 = ScaleElement::new(taylor)?;
        let existence_time = PowerSeries::new(u0.taylor().to_vec()).and_then(|s| radius_estimate(&s)).ok();
        let model = ScaleOperatorModel { kind: ScaleOperatorKind::Derivative, norm_constant: 1.0, existence_time };
        Ok(CauchyProblem { operator: Operator::Scale { model, u0 }, delta, star: None })
    }

    /// Declares the singular points of the observed solution.
    pub fn with_singularities(mut self, singularities: Vec<Complex64>) -> Result<Self> {
        self.star = if singularities.is_empty() { None } else { Some(StarDomain::new(singularities)?) };
        Ok(self)
    }

    /// Same problem with another fractional order.
    pub fn with_delta(&self, delta: f64) -> Result<Self> {
        check_order(delta)?;
        Ok(CauchyProblem { delta, ..self.clone() })
    }

    pub fn operator(&self) -> &Operator {
        &self.operator
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Star of the observed solution; `None` means no singularities were declared.
    pub fn star(&self) -> Option<&StarDomain> {
        self.star.as_ref()
    }

    /// Empirical existence time of a scale problem.
    pub fn existence_time(&self) -> Option<f64> {
        match &self.operator {
            Operator::Scale { model, .. } => model.existence_time,
            Operator::Matrix(_) => Some(f64::INFINITY),
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let repr: ProblemRepr = serde_json::from_str(text).map_err(|e| Error::Invalid(format!("problem JSON: {e}")))?;
        repr.try_into()
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(&ProblemRepr::from(self)).expect("problem serialises")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
enum ProblemKind {
    Matrix,
    Derivative,
}

#[derive(Serialize, Deserialize)]
struct ProblemRepr {
    kind: ProblemKind,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    matrix: Vec<Vec<ComplexEntry>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    u0: Vec<ComplexEntry>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    taylor: Vec<ComplexEntry>,
    delta: f64,
    #[serde(default)]
    singularities: Vec<ComplexEntry>,
}

impl TryFrom<ProblemRepr> for CauchyProblem {
    type Error = Error;

    fn try_from(r: ProblemRepr) -> Result<Self> {
        let problem = match r.kind {
            ProblemKind::Matrix => {
                let matrix = r.matrix.into_iter().map(to_complex).collect();
                CauchyProblem::matrix(matrix, to_complex(r.u0), r.delta)?
            }
            ProblemKind::Derivative => CauchyProblem::derivative(to_complex(r.taylor), r.delta)?,
        };
        problem.with_singularities(to_complex(r.singularities))
    }
}

impl From<&CauchyProblem> for ProblemRepr {
    fn from(p: &CauchyProblem) -> Self {
        let singularities = p.star.as_ref().map(|s| to_entries(s.singularities())).unwrap_or_default();
        match &p.operator {
            Operator::Matrix(op) => ProblemRepr {
                kind: ProblemKind::Matrix,
                matrix: op.matrix.iter().map(|row| to_entries(row)).collect(),
                u0: to_entries(&op.u0),
                taylor: Vec::new(),
                delta: p.delta,
                singularities,
            },
            Operator::Scale { u0, .. } => ProblemRepr {
                kind: ProblemKind::Derivative,
                matrix: Vec::new(),
                u0: Vec::new(),
                taylor: to_entries(u0.taylor()),
                delta: p.delta,
                singularities,
            },
        }
    }
}
