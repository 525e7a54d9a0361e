//! Command-line front end: evaluation grids and convergence tables as CSV or JSON.
//!
//! Exit codes: 0 success, 2 input error, 3 star violation, 4 tolerance failure.

pub mod settings;
pub mod table;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_complex::Complex64;
use rayon::prelude::*;
use serde_json::Value;

use fracstar::evolution::{continuation_sweep, solve_classical, solve_fractional, solve_rescaled, CauchyProblem};
use fracstar::series::PowerSeries;
use fracstar::wright::{
    limit_kernel_report, phi_auto, phi_integral_report, phi_series_report, ContourConfig, PhiValue, WrightParams,
};
use fracstar::Error;

pub use settings::Settings;
use table::{complex, plain, Cell, Format, Table};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_STAR: i32 = 3;
pub const EXIT_TOLERANCE: i32 = 4;

/// Failure carrying its process exit code.
#[derive(Debug, thiserror::Error)]
#[error("{message}")]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    pub fn input(message: impl Into<String>) -> Self {
        CliError { code: EXIT_INPUT, message: message.into() }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::StarViolation { .. } => EXIT_STAR,
            _ => EXIT_INPUT,
        };
        CliError { code, message: e.to_string() }
    }
}

#[derive(Debug, Parser)]
#[command(name = "fracstar", version, about = "Fractional approximation of evolution equations and analytic continuation")]
pub struct Cli {
    /// TOML file with default tolerances and settings.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Write the table here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum EvalMethod {
    Series,
    Integral,
    Auto,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Classical,
    Fractional,
    Rescaled,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate phi_delta(z) = sum n!/Gamma(delta n + 1) z^n on a grid.
    WrightEval {
        #[arg(long, allow_hyphen_values = true)]
        delta: f64,
        /// `x0:x1:nx,y0:y1:ny` or a list `x,y;x,y;...`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long, value_enum, default_value = "auto")]
        method: EvalMethod,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Sum the multiplier-transformed series along a delta schedule.
    StarSum {
        /// PowerSeries JSON file.
        series: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        /// Comma-separated, strictly decreasing orders.
        #[arg(long)]
        deltas: Option<String>,
        /// Closed-form value of the continued sum at `t`.
        #[arg(long, allow_hyphen_values = true)]
        reference: Option<String>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Solve a Cauchy problem from a JSON file.
    Evolve {
        /// CauchyProblem JSON file.
        problem: PathBuf,
        #[arg(long, allow_hyphen_values = true)]
        t: String,
        #[arg(long, value_enum, default_value = "rescaled")]
        mode: Mode,
        /// Override the order stored in the problem file.
        #[arg(long)]
        delta: Option<f64>,
        #[arg(long)]
        tol: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
    /// Compare the delta -> 1 limit kernel with 1/(1 - z).
    KernelCheck {
        /// Points `x,y;x,y;...` or a rectangle `x0:x1:nx,y0:y1:ny`.
        #[arg(long, allow_hyphen_values = true)]
        grid: String,
        #[arg(long)]
        tol: Option<f64>,
        #[arg(long)]
        nodes: Option<usize>,
        #[arg(long)]
        height: Option<f64>,
        #[command(flatten)]
        output: Output,
    },
}

/// Parses `RE,IM` or `RE`.
pub fn parse_complex(text: &str) -> Result<Complex64, CliError> {
    let parts: Vec<&str> = text.split(',').map(str::trim).collect();
    let num = |s: &str| s.parse::<f64>().map_err(|_| CliError::input(format!("bad number `{s}` in `{text}`")));
    match parts.as_slice() {
        [re] => Ok(Complex64::new(num(re)?, 0.0)),
        [re, im] => Ok(Complex64::new(num(re)?, num(im)?)),
        _ => Err(CliError::input(format!("expected RE or RE,IM, got `{text}`"))),
    }
}

fn parse_range(text: &str) -> Result<Vec<f64>, CliError> {
    let parts: Vec<&str> = text.split(':').map(str::trim).collect();
    let [a, b, n] = parts.as_slice() else {
        return Err(CliError::input(format!("expected start:end:count, got `{text}`")));
    };
    let bad = || CliError::input(format!("bad range `{text}`"));
    let (a, b): (f64, f64) = (a.parse().map_err(|_| bad())?, b.parse().map_err(|_| bad())?);
    let n: usize = n.parse().map_err(|_| bad())?;
    if n == 0 || !a.is_finite() || !b.is_finite() {
        return Err(bad());
    }
    if n == 1 {
        return Ok(vec![a]);
    }
    Ok((0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect())
}

/// Parses a rectangle `x0:x1:nx,y0:y1:ny` (row by row in `y`) or a list `x,y;x,y`.
pub fn parse_grid(text: &str) -> Result<Vec<Complex64>, CliError> {
    if text.contains(':') {
        let (xs, ys) = text
            .split_once(',')
            .ok_or_else(|| CliError::input(format!("expected x0:x1:nx,y0:y1:ny, got `{text}`")))?;
        let (xs, ys) = (parse_range(xs)?, parse_range(ys)?);
        return Ok(ys.iter().flat_map(|&y| xs.iter().map(move |&x| Complex64::new(x, y))).collect());
    }
    let points = text
        .split(';')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(parse_complex)
        .collect::<Result<Vec<_>, _>>()?;
    if points.is_empty() {
        return Err(CliError::input("grid is empty"));
    }
    Ok(points)
}

/// Parses a comma-separated, strictly decreasing schedule in `(1, 2)`.
pub fn parse_deltas(text: &str) -> Result<Vec<f64>, CliError> {
    let deltas = text
        .split(',')
        .map(|s| s.trim().parse::<f64>().map_err(|_| CliError::input(format!("bad delta `{s}`"))))
        .collect::<Result<Vec<_>, _>>()?;
    check_deltas(&deltas)?;
    Ok(deltas)
}

fn check_deltas(deltas: &[f64]) -> Result<(), CliError> {
    if deltas.is_empty() || deltas.iter().any(|&d| !(d > 1.0 && d < 2.0)) {
        return Err(CliError::input("deltas must lie in (1, 2)"));
    }
    if deltas.windows(2).any(|w| w[1] >= w[0]) {
        return Err(CliError::input("deltas must be strictly decreasing"));
    }
    Ok(())
}

fn contour(settings: &Settings, tol: f64) -> ContourConfig {
    ContourConfig {
        abscissa: settings.abscissa,
        height: settings.height,
        nodes: settings.nodes,
        tol,
        angular_tol: settings.angular_tol,
        ..ContourConfig::default()
    }
}

fn base_meta(table: &mut Table, command: &str) {
    table
        .meta("fracstar_cli", env!("CARGO_PKG_VERSION"))
        .meta("fracstar", fracstar::VERSION)
        .meta("command", command);
}

fn wright_eval(settings: &Settings, delta: f64, grid: &str, method: EvalMethod, tol: Option<f64>) -> Result<(Table, i32), CliError> {
    let params = WrightParams::with_boundary(delta).map_err(|e| CliError::input(e.to_string()))?;
    let points = parse_grid(grid)?;
    let tol = tol.unwrap_or(match method {
        EvalMethod::Integral => settings.quad_tol,
        _ => settings.eval_tol,
    });
    let config = contour(settings, tol);
    config.validate().map_err(|e| CliError::input(e.to_string()))?;
    let n_max = settings.n_max;
    let results: Vec<Result<PhiValue, Error>> = points
        .par_iter()
        .map(|&z| match method {
            EvalMethod::Series => phi_series_report(&params, z, tol, n_max).map(Into::into),
            EvalMethod::Integral => phi_integral_report(&params, z, &config).map(Into::into),
            EvalMethod::Auto => phi_auto(&params, z, &config),
        })
        .collect();
    let mut table = Table::new(vec![complex("z"), complex("value"), plain("method"), plain("work"), plain("tail"), plain("status")]);
    base_meta(&mut table, "wright-eval");
    table
        .meta("delta", delta)
        .meta("delta_cap", params.delta_cap)
        .meta("tol", tol)
        .meta("evaluator", format!("{method:?}").to_lowercase());
    for (z, r) in points.iter().zip(results) {
        table.rows.push(match r {
            Ok(v) => vec![
                Cell::complex(*z),
                Cell::complex(v.value),
                Cell::text(v.method.as_str()),
                Cell::Int(v.work),
                Cell::real(v.tail),
                Cell::text("ok"),
            ],
            Err(e) => vec![
                Cell::complex(*z),
                Cell::Complex(None),
                Cell::text(""),
                Cell::Int(0),
                Cell::Real(None),
                Cell::text(e.tag()),
            ],
        });
    }
    Ok((table, EXIT_OK))
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::input(format!("cannot read {}: {e}", path.display())))
}

fn sweep_table(command: &str, problem: &CauchyProblem, t: Complex64, deltas: &[f64], reference: Option<Complex64>, tol: f64, n_max: usize) -> Result<Table, CliError> {
    let reference_vec = reference.map(|r| vec![r]);
    // one schedule entry per worker; rows keep schedule order
    let rows: Vec<_> = deltas
        .par_iter()
        .map(|&d| continuation_sweep(problem, t, &[d], reference_vec.as_deref(), tol, n_max))
        .collect::<Result<Vec<_>, Error>>()?;
    let rows: Vec<_> = rows.into_iter().flat_map(|table| table.rows).collect();
    let errors: Vec<f64> = rows.iter().filter_map(|r| r.error).collect();
    let verdict = reference.map(|_| errors.iter().all(|e| e.is_finite()) && errors.windows(2).all(|w| w[1] < w[0]));
    let mut table = Table::new(vec![
        plain("delta"),
        complex("value"),
        plain("error"),
        plain("evaluator"),
        plain("work"),
        plain("converged"),
    ]);
    base_meta(&mut table, command);
    table
        .meta("t", Value::from(vec![t.re, t.im]))
        .meta("deltas", Value::from(deltas.to_vec()))
        .meta("tol", tol)
        .meta("reference", reference.map_or(Value::Null, |r| Value::from(vec![r.re, r.im])))
        .meta("monotone_decreasing", verdict.map_or(Value::Null, Value::Bool));
    for r in rows {
        table.rows.push(vec![
            Cell::real(r.delta),
            Cell::complex(r.values[0]),
            Cell::Real(r.error),
            Cell::text(r.route.as_str()),
            Cell::Int(r.terms_used),
            Cell::Bool(r.converged),
        ]);
    }
    Ok(table)
}

fn star_sum(settings: &Settings, series: &Path, t: &str, deltas: Option<&str>, reference: Option<&str>, tol: Option<f64>) -> Result<(Table, i32), CliError> {
    let series: PowerSeries =
        serde_json::from_str(&read(series)?).map_err(|e| CliError::input(format!("series JSON: {e}")))?;
    let t = parse_complex(t)?;
    let deltas = match deltas {
        Some(text) => parse_deltas(text)?,
        None => {
            check_deltas(&settings.deltas)?;
            settings.deltas.clone()
        }
    };
    let reference = reference.map(parse_complex).transpose()?;
    let tol = tol.unwrap_or(settings.eval_tol);
    let problem = CauchyProblem::derivative(series.coeffs().to_vec(), deltas[0])?
        .with_singularities(series.singularities().to_vec())?;
    Ok((sweep_table("star-sum", &problem, t, &deltas, reference, tol, settings.n_max)?, EXIT_OK))
}

fn evolve(settings: &Settings, path: &Path, t: &str, mode: Mode, delta: Option<f64>, tol: Option<f64>) -> Result<(Table, i32), CliError> {
    let mut problem = CauchyProblem::from_json(&read(path)?)?;
    if let Some(d) = delta {
        problem = problem.with_delta(d)?;
    }
    let t = parse_complex(t)?;
    let tol = tol.unwrap_or(settings.eval_tol);
    let n_max = settings.n_max;
    let solution = match mode {
        Mode::Classical => solve_classical(&problem, t, tol, n_max)?,
        Mode::Rescaled => solve_rescaled(&problem, t, tol, n_max)?,
        Mode::Fractional => {
            if t.im != 0.0 {
                return Err(CliError::input("fractional mode needs a real t >= 0"));
            }
            solve_fractional(&problem, t.re, tol, n_max)?
        }
    };
    let mut table = Table::new(vec![
        plain("component"),
        complex("value"),
        plain("terms_used"),
        plain("tail_estimate"),
        plain("converged"),
        plain("evaluator"),
    ]);
    base_meta(&mut table, "evolve");
    table
        .meta("mode", format!("{mode:?}").to_lowercase())
        .meta("delta", problem.delta())
        .meta("t", Value::from(vec![t.re, t.im]))
        .meta("tol", tol);
    for (i, v) in solution.values.iter().enumerate() {
        table.rows.push(vec![
            Cell::Int(i),
            Cell::complex(*v),
            Cell::Int(solution.terms_used),
            Cell::real(solution.tail_estimate),
            Cell::Bool(solution.converged),
            Cell::text(solution.route.as_str()),
        ]);
    }
    Ok((table, EXIT_OK))
}

fn kernel_check(settings: &Settings, grid: &str, tol: Option<f64>, nodes: Option<usize>, height: Option<f64>) -> Result<(Table, i32), CliError> {
    let points = parse_grid(grid)?;
    let tol = tol.unwrap_or(settings.quad_tol);
    let mut config = contour(settings, tol);
    if let Some(n) = nodes {
        config.nodes = n;
    }
    if height.is_some() {
        config.height = height;
    }
    config.validate().map_err(|e| CliError::input(e.to_string()))?;
    let results: Vec<_> = points.par_iter().map(|&z| limit_kernel_report(z, &config)).collect();
    let mut table = Table::new(vec![
        complex("z"),
        complex("kernel"),
        complex("closed_form"),
        plain("abs_error"),
        plain("work"),
        plain("status"),
    ]);
    base_meta(&mut table, "kernel-check");
    let mut failed = false;
    let mut rejected = false;
    for (z, r) in points.iter().zip(results) {
        let exact = 1.0 / (Complex64::new(1.0, 0.0) - z);
        table.rows.push(match r {
            Ok(v) => {
                let err = (v.value - exact).norm();
                let pass = err <= tol;
                failed |= !pass;
                vec![
                    Cell::complex(*z),
                    Cell::complex(v.value),
                    Cell::complex(exact),
                    Cell::real(err),
                    Cell::Int(v.evaluations),
                    Cell::text(if pass { "ok" } else { "ToleranceExceeded" }),
                ]
            }
            Err(e) => {
                rejected = true;
                failed |= !matches!(e, Error::Branch { .. });
                vec![
                    Cell::complex(*z),
                    Cell::Complex(None),
                    Cell::Complex(Some(exact)).filter_finite(),
                    Cell::Real(None),
                    Cell::Int(0),
                    Cell::text(e.tag()),
                ]
            }
        });
    }
    let code = if failed {
        EXIT_TOLERANCE
    } else if rejected {
        EXIT_INPUT
    } else {
        EXIT_OK
    };
    table
        .meta("tol", tol)
        .meta("abscissa", config.abscissa)
        .meta("nodes", config.nodes)
        .meta("evaluator", "integral")
        .meta("passed", code == EXIT_OK);
    Ok((table, code))
}

impl Cell {
    fn filter_finite(self) -> Cell {
        match self {
            Cell::Complex(Some(z)) if !(z.re.is_finite() && z.im.is_finite()) => Cell::Complex(None),
            other => other,
        }
    }
}

/// Runs one parsed invocation, returning the table and the exit code.
pub fn execute(cli: &Cli) -> Result<(Table, i32, &Output), CliError> {
    let settings = Settings::load(cli.config.as_deref())?;
    let (table, code, output) = match &cli.command {
        Command::WrightEval { delta, grid, method, tol, output } => {
            let (t, c) = wright_eval(&settings, *delta, grid, *method, *tol)?;
            (t, c, output)
        }
        Command::StarSum { series, t, deltas, reference, tol, output } => {
            let (tb, c) = star_sum(&settings, series, t, deltas.as_deref(), reference.as_deref(), *tol)?;
            (tb, c, output)
        }
        Command::Evolve { problem, t, mode, delta, tol, output } => {
            let (tb, c) = evolve(&settings, problem, t, *mode, *delta, *tol)?;
            (tb, c, output)
        }
        Command::KernelCheck { grid, tol, nodes, height, output } => {
            let (tb, c) = kernel_check(&settings, grid, *tol, *nodes, *height)?;
            (tb, c, output)
        }
    };
    Ok((table, code, output))
}

fn emit(table: &Table, output: &Output) -> Result<(), CliError> {
    let text = table.render(output.format);
    match &output.out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| CliError::input(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

/// Parses `args`, runs the command and returns the process exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_INPUT } else { EXIT_OK };
        }
    };
    match execute(&cli).and_then(|(table, code, output)| emit(&table, output).map(|_| code)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.code
        }
    }
}
