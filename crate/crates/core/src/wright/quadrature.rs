//! Composite Gauss-Legendre quadrature with adaptive panel bisection.

use std::f64::consts::PI;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::error::Result;
use crate::series::CompensatedSum;

/// Points per panel of the composite rule.
pub const PANEL_ORDER: usize = 16;
const MAX_DEPTH: u32 = 30;
/// Refinement stops once this many integrand evaluations have been spent.
pub const MAX_EVALUATIONS: usize = 1 << 22;

/// Gauss-Legendre nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Nodes from Newton iteration on `P_n`, started at the Chebyshev-like guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        GaussLegendre { nodes, weights }
    }

    /// Rule of order [`PANEL_ORDER`], built once.
    pub fn panel() -> &'static GaussLegendre {
        static RULE: OnceLock<GaussLegendre> = OnceLock::new();
        RULE.get_or_init(|| GaussLegendre::new(PANEL_ORDER))
    }

    fn apply<F>(&self, f: &F, a: f64, b: f64) -> Result<Complex64>
    where
        F: Fn(f64) -> Result<Complex64>,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let mut acc = CompensatedSum::default();
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            acc.add(f(mid + half * x)? * *w);
        }
        Ok(acc.value() * half)
    }
}

// P_n(x) and P_n'(x) by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Result of an adaptive integration.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Quadrature {
    pub value: Complex64,
    /// Sum over accepted panels of `|coarse - refined|`.
    pub error_estimate: f64,
    pub evaluations: usize,
    pub panels: usize,
}

struct Adaptive<'a, F> {
    f: &'a F,
    rule: &'a GaussLegendre,
    density: f64,
    acc: CompensatedSum,
    error: f64,
    evaluations: usize,
    panels: usize,
}

impl<F> Adaptive<'_, F>
where
    F: Fn(f64) -> Result<Complex64>,
{
    fn panel(&mut self, a: f64, b: f64, coarse: Complex64, depth: u32) -> Result<()> {
        let m = 0.5 * (a + b);
        let left = self.rule.apply(self.f, a, m)?;
        let right = self.rule.apply(self.f, m, b)?;
        self.evaluations += 2 * self.rule.nodes.len();
        let fine = left + right;
        let diff = (fine - coarse).norm();
        if diff <= self.density * (b - a) || depth >= MAX_DEPTH || self.evaluations >= MAX_EVALUATIONS {
            self.acc.add(fine);
            self.error += diff;
            self.panels += 2;
            return Ok(());
        }
        self.panel(a, m, left, depth + 1)?;
        self.panel(m, b, right, depth + 1)
    }
}

/// Integrates `f` over `[a, b]` starting from `initial_panels` equal panels and
/// bisecting any panel whose two-level estimates differ by more than its share of `tol`.
///
/// An unreachable `tol` shows up in `error_estimate` once the evaluation budget runs out.
pub fn integrate<F>(f: &F, a: f64, b: f64, initial_panels: usize, tol: f64) -> Result<Quadrature>
where
    F: Fn(f64) -> Result<Complex64>,
{
    if b <= a {
        return Ok(Quadrature { value: Complex64::new(0.0, 0.0), error_estimate: 0.0, evaluations: 0, panels: 0 });
    }
    let rule = GaussLegendre::panel();
    let n = initial_panels.max(1);
    let mut state = Adaptive {
        f,
        rule,
        density: tol / (b - a),
        acc: CompensatedSum::default(),
        error: 0.0,
        evaluations: 0,
        panels: 0,
    };
    let h = (b - a) / n as f64;
    for i in 0..n {
        let lo = a + h * i as f64;
        let hi = if i + 1 == n { b } else { a + h * (i + 1) as f64 };
        let coarse = rule.apply(f, lo, hi)?;
        state.evaluations += rule.nodes.len();
        state.panel(lo, hi, coarse, 0)?;
    }
    Ok(Quadrature {
        value: state.acc.value(),
        error_estimate: state.error,
        evaluations: state.evaluations,
        panels: state.panels,
    })
}
