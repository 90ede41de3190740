//! Independent checks of closed-form solutions against the equation itself.
//!
//! - [`residual_check`]: the defining equation evaluated with centered
//!   finite differences on an interior grid, scaled by the largest term.
//! - [`rk_reference`] + [`compare`]: an adaptive Dormand-Prince 5(4)
//!   integration of the original equation used as an oracle.
//! - [`riccati_check`]: for second-order solutions, `z = (log|y|)'` must
//!   satisfy `z' + z² + b z + c = 0`.
//! - [`route_equivalence`]: two constructions of the same solution agree.
//!
//! Everything here is deterministic: identical inputs give bit-identical
//! reports.

use serde::Serialize;
use thiserror::Error;

use crate::expr::{real_pow, EvalError, Expression};
use crate::quad::QuadratureConfig;
use crate::solvers::{
    solve_bernoulli_via_linear, ClosedFormSolution, EquationClass, EquationSpec, InitialCondition,
    Interval, SolveError, DEFAULT_SCAN_SAMPLES,
};

/// Step for first-derivative centered differences.
pub const FIRST_DIFF_STEP: f64 = 1e-5;
/// Step for second-difference stencils (second-order residual and Riccati).
pub const SECOND_DIFF_STEP: f64 = 1e-4;

pub const FIRST_ORDER_RESIDUAL_TOL: f64 = 1e-6;
pub const SECOND_ORDER_RESIDUAL_TOL: f64 = 1e-5;
pub const RICCATI_TOL: f64 = 1e-4;
pub const ROUTE_TOL: f64 = 1e-8;
pub const INITIAL_VALUE_TOL: f64 = 1e-12;
pub const DEFAULT_COMPARE_TOL: f64 = 1e-6;
pub const DEFAULT_ORACLE_TOL: f64 = 1e-12;
pub const DEFAULT_GRID_SIZE: usize = 200;

/// Grid points whose `|y|` falls below this fraction of the grid maximum
/// are skipped by the Riccati check.
pub const RICCATI_EXCLUSION: f64 = 1e-3;

/// Largest stencil step of the Riccati check.
pub const RICCATI_MAX_STEP: f64 = 1e-3;
/// Riccati stencil step as a fraction of the local scale `1/|z|`.
pub const RICCATI_STEP_RATIO: f64 = 0.0113;

/// Oracle state magnitude at which integration is abandoned.
pub const BLOWUP: f64 = 1e12;
/// Fraction of the window width kept clear of a validity endpoint found by
/// the scan. Fixed-step differences lose accuracy as a singularity nears.
pub const BOUNDARY_RETREAT: f64 = 0.05;

const MAX_RK_STEPS: usize = 2_000_000;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum VerifyError {
    #[error("no overlap between the oracle grid and the solution's validity interval")]
    EmptyOverlap,
    #[error("interval {interval} is too small for a {grid_size}-point grid")]
    TooSmall { interval: Interval, grid_size: usize },
    #[error("riccati check inconclusive: y is negligible on {excluded} of {total} grid points")]
    Inconclusive { excluded: usize, total: usize },
    #[error("coefficient evaluation failed at the initial point: {0}")]
    InitialPoint(EvalError),
    #[error("{stage}: {source}")]
    Solve {
        stage: &'static str,
        #[source]
        source: SolveError,
    },
    #[error("invalid verification input: {0}")]
    Invalid(String),
}

fn at_stage(stage: &'static str) -> impl Fn(SolveError) -> VerifyError {
    move |source| VerifyError::Solve { stage, source }
}

/// Values of the reference integration on a grid.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OracleSolution {
    pub grid: Vec<f64>,
    pub values: Vec<f64>,
    /// `y'` at the grid points, second-order problems only.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub slopes: Option<Vec<f64>>,
    pub method: &'static str,
    pub steps: usize,
    pub rejected: usize,
    /// Set when integration stopped before covering the requested grid.
    pub truncated: bool,
}

impl OracleSolution {
    pub fn value_at(&self, x: f64) -> Option<f64> {
        self.grid.iter().position(|&g| g == x).map(|i| self.values[i])
    }
}

/// Result of a single check.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckRecord {
    pub name: String,
    pub max_deviation: f64,
    pub tolerance: f64,
    pub pass: bool,
    pub grid_size: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    pub fn new(name: &str, max_deviation: f64, tolerance: f64, grid_size: usize) -> Self {
        CheckRecord {
            name: name.to_string(),
            max_deviation,
            tolerance,
            // NaN never passes
            pass: max_deviation <= tolerance,
            grid_size,
            note: None,
        }
    }

    fn with_note(mut self, note: Option<String>) -> Self {
        self.note = note;
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VerificationReport {
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub validity: Interval,
    #[serde(skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

impl VerificationReport {
    pub fn new(checks: Vec<CheckRecord>, validity: Interval, notes: Vec<String>) -> Self {
        let pass = checks.iter().all(|c| c.pass);
        VerificationReport { checks, pass, validity, notes }
    }

    pub fn check(&self, name: &str) -> Option<&CheckRecord> {
        self.checks.iter().find(|c| c.name == name)
    }
}

/// Knobs for [`full_verify`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub quad: QuadratureConfig,
    /// Tolerance of the oracle comparison.
    pub compare_tol: f64,
    /// Local error tolerance of the Runge-Kutta oracle.
    pub oracle_tol: f64,
    pub grid_size: usize,
    /// Offset added to the primary solution; nonzero only to inject defects.
    pub perturb: f64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        VerifyConfig {
            quad: QuadratureConfig::default(),
            compare_tol: DEFAULT_COMPARE_TOL,
            oracle_tol: DEFAULT_ORACLE_TOL,
            grid_size: DEFAULT_GRID_SIZE,
            perturb: 0.0,
        }
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 0.2, 0.3, 0.8, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [0.2, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
// fifth-order weights minus embedded fourth-order weights
const E: [f64; 7] = [
    71.0 / 57600.0,
    0.0,
    -71.0 / 16695.0,
    71.0 / 1920.0,
    -17253.0 / 339200.0,
    22.0 / 525.0,
    -1.0 / 40.0,
];

type State = [f64; 2];

struct Rhs<'a> {
    spec: &'a EquationSpec,
}

impl Rhs<'_> {
    fn dim(&self) -> usize {
        match self.spec {
            EquationSpec::SecondOrder { .. } => 2,
            _ => 1,
        }
    }

    fn eval(&self, x: f64, s: &State) -> Result<State, EvalError> {
        let y = s[0];
        let dy = match self.spec {
            EquationSpec::Linear { f, g } => g.eval(x)? - f.eval(x)? * y,
            EquationSpec::Bernoulli { f, g, alpha } => {
                let p = real_pow(y, *alpha).ok_or(EvalError::Domain { what: "non-real power", x })?;
                g.eval(x)? * p - f.eval(x)? * y
            }
            EquationSpec::Exp { f, g, beta } => g.eval(x)? - f.eval(x)? * (beta * y).exp(),
            EquationSpec::SecondOrder { b, c } => return Ok([s[1], -b * s[1] - c * y]),
        };
        if dy.is_finite() {
            Ok([dy, 0.0])
        } else {
            Err(EvalError::Overflow { x })
        }
    }
}

struct SideRun {
    states: Vec<State>,
    steps: usize,
    rejected: usize,
    truncated: bool,
}

/// Integrate from `(x0, y0)` through `targets`, which must be ordered
/// monotonically away from `x0`.
fn integrate_side(rhs: &Rhs<'_>, x0: f64, y0: State, targets: &[f64], tol: f64) -> SideRun {
    let mut run = SideRun { states: Vec::with_capacity(targets.len()), steps: 0, rejected: 0, truncated: false };
    let Some(&last) = targets.last() else {
        return run;
    };
    let dim = rhs.dim();
    let dir = (last - x0).signum();
    let span = (last - x0).abs();
    let mut x = x0;
    let mut y = y0;
    let mut h = dir * (1e-3 * span.max(1.0)).min(span);
    let mut k = [[0.0; 2]; 7];
    let Ok(k0) = rhs.eval(x, &y) else {
        run.truncated = true;
        return run;
    };
    k[0] = k0;

    for &target in targets {
        while (target - x) * dir > 0.0 {
            if run.steps + run.rejected >= MAX_RK_STEPS {
                run.truncated = true;
                return run;
            }
            let remaining = target - x;
            let hit = h.abs() >= remaining.abs();
            let step = if hit { remaining } else { h };
            if step.abs() <= 1e-14 * x.abs().max(1.0) && !hit {
                run.truncated = true;
                return run;
            }
            // stages 2..7
            let mut failed = false;
            for i in 1..7 {
                let mut yi = y;
                for (d, yd) in yi.iter_mut().enumerate().take(dim) {
                    let mut acc = 0.0;
                    for j in 0..i {
                        acc += A[i][j] * k[j][d];
                    }
                    *yd += step * acc;
                }
                match rhs.eval(x + C[i] * step, &yi) {
                    Ok(v) => k[i] = v,
                    Err(_) => {
                        failed = true;
                        break;
                    }
                }
            }
            if failed {
                // shrink and retry; a persistent failure ends the run
                run.rejected += 1;
                h = 0.25 * step;
                if h.abs() <= 1e-14 * x.abs().max(1.0) {
                    run.truncated = true;
                    return run;
                }
                continue;
            }
            let mut y_new = y;
            let mut err: f64 = 0.0;
            for d in 0..dim {
                let mut acc = 0.0;
                let mut e = 0.0;
                for i in 0..6 {
                    acc += A[6][i] * k[i][d];
                }
                for i in 0..7 {
                    e += E[i] * k[i][d];
                }
                y_new[d] = y[d] + step * acc;
                let scale = tol + tol * y[d].abs().max(y_new[d].abs());
                err = err.max((step * e).abs() / scale);
            }
            if !err.is_finite() {
                run.rejected += 1;
                h = 0.25 * step;
                continue;
            }
            if err <= 1.0 {
                run.steps += 1;
                x = if hit { target } else { x + step };
                y = y_new;
                // first-same-as-last: stage 7 was evaluated at the new point
                k[0] = k[6];
                if y[..dim].iter().any(|v| v.abs() > BLOWUP) {
                    run.truncated = true;
                    return run;
                }
                let factor = if err == 0.0 { 5.0 } else { (0.9 * err.powf(-0.2)).clamp(0.2, 5.0) };
                // a step clipped to hit a grid point says little about the next one
                if !(hit && step.abs() < h.abs()) {
                    h = step * factor;
                }
            } else {
                run.rejected += 1;
                h = step * (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        }
        run.states.push(y);
    }
    run
}

/// Reference solution of the original equation on `grid_size` evenly
/// spaced points over `range`, integrated outward from `x0`.
pub fn rk_reference(
    spec: &EquationSpec,
    ic: &InitialCondition,
    range: Interval,
    tol: f64,
) -> Result<OracleSolution, VerifyError> {
    rk_reference_on(spec, ic, &range.linspace(DEFAULT_GRID_SIZE + 1), tol)
}

/// Reference solution on an explicit ascending grid.
pub fn rk_reference_on(
    spec: &EquationSpec,
    ic: &InitialCondition,
    grid: &[f64],
    tol: f64,
) -> Result<OracleSolution, VerifyError> {
    spec.validate().map_err(at_stage("oracle"))?;
    if !(tol > 0.0 && tol.is_finite()) {
        return Err(VerifyError::Invalid(format!("oracle tolerance must be > 0, got {tol}")));
    }
    if grid.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(VerifyError::Invalid("oracle grid must be strictly ascending".into()));
    }
    let rhs = Rhs { spec };
    let y0: State = match spec {
        EquationSpec::SecondOrder { .. } => {
            let yp0 = ic
                .yp0
                .ok_or_else(|| VerifyError::Invalid("second-order oracle needs an initial slope".into()))?;
            [ic.y0, yp0]
        }
        _ => [ic.y0, 0.0],
    };
    rhs.eval(ic.x0, &y0).map_err(VerifyError::InitialPoint)?;

    let split = grid.partition_point(|&x| x < ic.x0);
    let (left, right) = grid.split_at(split);
    let (at_x0, right) = match right.first() {
        Some(&x) if x == ic.x0 => (true, &right[1..]),
        _ => (false, right),
    };
    let left_targets: Vec<f64> = left.iter().rev().copied().collect();
    let back = integrate_side(&rhs, ic.x0, y0, &left_targets, tol);
    let fwd = integrate_side(&rhs, ic.x0, y0, right, tol);

    let mut points: Vec<(f64, State)> = Vec::with_capacity(grid.len());
    for (i, s) in back.states.iter().enumerate().rev() {
        points.push((left_targets[i], *s));
    }
    if at_x0 {
        points.push((ic.x0, y0));
    }
    for (i, s) in fwd.states.iter().enumerate() {
        points.push((right[i], *s));
    }
    let second = matches!(spec, EquationSpec::SecondOrder { .. });
    Ok(OracleSolution {
        grid: points.iter().map(|p| p.0).collect(),
        values: points.iter().map(|p| p.1[0]).collect(),
        slopes: second.then(|| points.iter().map(|p| p.1[1]).collect()),
        method: "dormand-prince-5(4)",
        steps: back.steps + fwd.steps,
        rejected: back.rejected + fwd.rejected,
        truncated: back.truncated || fwd.truncated,
    })
}

/// Maximum of `|y(x) - oracle(x)| / (1 + |oracle(x)|)` over the oracle grid
/// points inside the solution's validity interval.
pub fn compare(
    sol: &ClosedFormSolution,
    oracle: &OracleSolution,
    tol: f64,
) -> Result<CheckRecord, VerifyError> {
    let validity = sol.validity();
    let mut worst: f64 = 0.0;
    let mut used = 0usize;
    let mut clipped = 0usize;
    for (&x, &o) in oracle.grid.iter().zip(&oracle.values) {
        if !validity.contains(x) {
            clipped += 1;
            continue;
        }
        let y = sol.eval(x).map_err(at_stage("compare"))?;
        let d = (y - o).abs() / (1.0 + o.abs());
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
        used += 1;
    }
    if used == 0 {
        return Err(VerifyError::EmptyOverlap);
    }
    let mut notes = Vec::new();
    if clipped > 0 {
        notes.push(format!("{clipped} oracle points outside validity {validity} skipped"));
    }
    if oracle.truncated {
        notes.push("oracle integration stopped early".to_string());
    }
    let note = (!notes.is_empty()).then(|| notes.join("; "));
    Ok(CheckRecord::new("oracle_rk45", worst, tol, used).with_note(note))
}

fn interior_grid(
    range: Interval,
    sol: &ClosedFormSolution,
    margin: f64,
    grid_size: usize,
) -> Result<Vec<f64>, VerifyError> {
    let inner = range.intersect(&sol.validity()).map(|i| Interval::new(i.lo + margin, i.hi - margin));
    match inner {
        Some(i) if i.width().is_finite() && i.width() > margin && i.width() > 1e-9 * grid_size as f64 => {
            Ok(i.interior(grid_size))
        }
        _ => Err(VerifyError::TooSmall { interval: range, grid_size }),
    }
}

fn coeff(e: &Expression, x: f64) -> Result<f64, VerifyError> {
    e.eval(x).map_err(|err| VerifyError::Solve {
        stage: "residual",
        source: SolveError::Quad(crate::quad::QuadError::Integrand { at: x, source: err }),
    })
}

/// Scaled residual of the defining equation on an interior grid of
/// `range ∩ validity`. First-order classes use `y'` from a centered
/// difference with step [`FIRST_DIFF_STEP`]; the second-order class uses
/// three-point stencils with step [`SECOND_DIFF_STEP`]. The recorded
/// deviation is `max |residual| / (1 + scale)`, `scale` being the largest
/// magnitude of any individual term on the grid.
pub fn residual_check(
    spec: &EquationSpec,
    sol: &ClosedFormSolution,
    range: Interval,
    grid_size: usize,
) -> Result<CheckRecord, VerifyError> {
    if grid_size < 10 {
        return Err(VerifyError::Invalid(format!("grid_size must be >= 10, got {grid_size}")));
    }
    let second = matches!(spec, EquationSpec::SecondOrder { .. });
    let h = if second { SECOND_DIFF_STEP } else { FIRST_DIFF_STEP };
    let grid = interior_grid(range, sol, 2.0 * h, grid_size)?;
    let y = |x: f64| sol.eval(x).map_err(at_stage("residual"));

    let mut worst: f64 = 0.0;
    let mut scale: f64 = 0.0;
    for &x in &grid {
        let (yl, yc, yr) = (y(x - h)?, y(x)?, y(x + h)?);
        let dy = (yr - yl) / (2.0 * h);
        let (residual, terms): (f64, [f64; 3]) = match spec {
            EquationSpec::Linear { f, g } => {
                let (fy, gv) = (coeff(f, x)? * yc, coeff(g, x)?);
                (dy + fy - gv, [dy, fy, gv])
            }
            EquationSpec::Bernoulli { f, g, alpha } => {
                let p = real_pow(yc, *alpha).ok_or(VerifyError::Solve {
                    stage: "residual",
                    source: SolveError::NoRealBranch(format!("y^alpha at x = {x} with y = {yc}")),
                })?;
                let (fy, gp) = (coeff(f, x)? * yc, coeff(g, x)? * p);
                (dy + fy - gp, [dy, fy, gp])
            }
            EquationSpec::Exp { f, g, beta } => {
                let (fe, gv) = (coeff(f, x)? * (beta * yc).exp(), coeff(g, x)?);
                (dy + fe - gv, [dy, fe, gv])
            }
            EquationSpec::SecondOrder { b, c } => {
                let d2 = (yr - 2.0 * yc + yl) / (h * h);
                let (by, cy) = (b * dy, c * yc);
                (d2 + by + cy, [d2, by, cy])
            }
        };
        worst = if residual.is_nan() { f64::NAN } else { worst.max(residual.abs()) };
        scale = terms.iter().fold(scale, |m, t| m.max(t.abs()));
    }
    let tol = if second { SECOND_ORDER_RESIDUAL_TOL } else { FIRST_ORDER_RESIDUAL_TOL };
    Ok(CheckRecord::new("residual", worst / (1.0 + scale), tol, grid.len()))
}

/// Riccati invariant of a second-order solution: with `L = log|y|`,
/// `z = L'` and `z' = L''` are taken by seven-point centered differences
/// of `L`, and the check records `max |z' + z² + b z + c|` over the grid
/// points where `|y|` exceeds [`RICCATI_EXCLUSION`] times the grid maximum.
///
/// Near a zero of `y` the derivatives of `L` grow like `1/δ^k` with `δ`
/// the distance to the zero, so the stencil step is tied to the local
/// length scale `1/|z|` (at most [`RICCATI_MAX_STEP`]); that keeps the
/// truncation and rounding errors balanced.
pub fn riccati_check(
    b: f64,
    c: f64,
    sol: &ClosedFormSolution,
    range: Interval,
    grid_size: usize,
) -> Result<CheckRecord, VerifyError> {
    if grid_size < 10 {
        return Err(VerifyError::Invalid(format!("grid_size must be >= 10, got {grid_size}")));
    }
    let grid = interior_grid(range, sol, 3.0 * RICCATI_MAX_STEP, grid_size)?;
    let y = |x: f64| sol.eval(x).map_err(at_stage("riccati"));
    let values = grid.iter().map(|&x| y(x)).collect::<Result<Vec<_>, _>>()?;
    let peak = values.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let retained: Vec<f64> = grid
        .iter()
        .zip(&values)
        .filter(|(_, v)| v.abs() > RICCATI_EXCLUSION * peak)
        .map(|(&x, _)| x)
        .collect();
    if retained.len() * 10 < grid.len() {
        return Err(VerifyError::Inconclusive { excluded: grid.len() - retained.len(), total: grid.len() });
    }
    let log_abs = |x: f64| -> Result<f64, VerifyError> { Ok(y(x)?.abs().ln()) };
    let mut worst: f64 = 0.0;
    for &x in &retained {
        let h0 = SECOND_DIFF_STEP;
        let rough = (log_abs(x + h0)? - log_abs(x - h0)?) / (2.0 * h0);
        let h = RICCATI_MAX_STEP.min(RICCATI_STEP_RATIO / rough.abs().max(1.0));
        let mut l = [0.0; 7];
        for (i, v) in l.iter_mut().enumerate() {
            *v = log_abs(x + (i as f64 - 3.0) * h)?;
        }
        let z = (-l[0] + 9.0 * l[1] - 45.0 * l[2] + 45.0 * l[4] - 9.0 * l[5] + l[6]) / (60.0 * h);
        let dz = (2.0 * (l[0] + l[6]) - 27.0 * (l[1] + l[5]) + 270.0 * (l[2] + l[4]) - 490.0 * l[3])
            / (180.0 * h * h);
        let r = dz + z * z + b * z + c;
        worst = if r.is_nan() { f64::NAN } else { worst.max(r.abs()) };
    }
    let note = (retained.len() < grid.len())
        .then(|| format!("{} points near zeros of y excluded", grid.len() - retained.len()));
    Ok(CheckRecord::new("riccati", worst, RICCATI_TOL, retained.len()).with_note(note))
}

/// Pointwise agreement `max |p - q| / (1 + |p|)` of two constructions.
pub fn route_equivalence(
    primary: &ClosedFormSolution,
    alternate: &ClosedFormSolution,
    grid: &[f64],
) -> Result<CheckRecord, VerifyError> {
    let shared = match primary.validity().intersect(&alternate.validity()) {
        Some(i) => i,
        None => return Err(VerifyError::EmptyOverlap),
    };
    let mut worst: f64 = 0.0;
    let mut used = 0;
    for &x in grid.iter().filter(|&&x| shared.contains(x)) {
        let p = primary.eval(x).map_err(at_stage("route equivalence"))?;
        let q = alternate.eval(x).map_err(at_stage("route equivalence"))?;
        let d = (p - q).abs() / (1.0 + p.abs());
        worst = if d.is_nan() { f64::NAN } else { worst.max(d) };
        used += 1;
    }
    if used == 0 {
        return Err(VerifyError::EmptyOverlap);
    }
    Ok(CheckRecord::new("route_equivalence", worst, ROUTE_TOL, used))
}

/// `|y(x0) - y0| / max(1, |y0|)`.
pub fn initial_value_check(sol: &ClosedFormSolution, ic: &InitialCondition) -> Result<CheckRecord, VerifyError> {
    let y = sol.eval(ic.x0).map_err(at_stage("initial condition"))?;
    let d = (y - ic.y0).abs() / ic.y0.abs().max(1.0);
    Ok(CheckRecord::new("initial_condition", d, INITIAL_VALUE_TOL, 1))
}

/// Pull `clipped` back from endpoints that the validity scan moved inside
/// `range`, never past `x0`.
fn retreat(clipped: Interval, range: Interval, x0: f64) -> Interval {
    let margin = BOUNDARY_RETREAT * clipped.width();
    let lo = if clipped.lo > range.lo { (clipped.lo + margin).min(x0) } else { clipped.lo };
    let hi = if clipped.hi < range.hi { (clipped.hi - margin).max(x0) } else { clipped.hi };
    Interval::new(lo, hi)
}

/// Construct the solution for `spec` and run every applicable check on
/// `range`.
pub fn full_verify(
    spec: &EquationSpec,
    ic: &InitialCondition,
    range: Interval,
    cfg: &VerifyConfig,
) -> Result<VerificationReport, VerifyError> {
    full_verify_with_solution(spec, ic, range, cfg).map(|(_, report)| report)
}

/// As [`full_verify`], also returning the checked solution.
pub fn full_verify_with_solution(
    spec: &EquationSpec,
    ic: &InitialCondition,
    range: Interval,
    cfg: &VerifyConfig,
) -> Result<(ClosedFormSolution, VerificationReport), VerifyError> {
    if !(range.lo < range.hi) || !range.contains(ic.x0) {
        return Err(VerifyError::Invalid(format!("range {range} must be nonempty and contain x0 = {}", ic.x0)));
    }
    spec.validate().map_err(at_stage("construct"))?;
    let quad = if cfg.quad.checkpoint_spacing.is_some() { cfg.quad } else { cfg.quad.with_range(range.lo, range.hi) };
    let base = spec.solve(ic, &quad).map_err(at_stage("construct"))?;
    let mut sol = base.with_offset(cfg.perturb);
    let mut notes = Vec::new();
    if spec.class() != EquationClass::SecondOrderConst {
        sol.scan_validity(range, DEFAULT_SCAN_SAMPLES).map_err(at_stage("validity scan"))?;
    }
    let clipped = range.intersect(&sol.validity()).ok_or(VerifyError::EmptyOverlap)?;
    let window = retreat(clipped, range, ic.x0);
    if clipped != range {
        notes.push(format!("range {range} clipped to validity {clipped}, checked on {window}"));
    }

    let mut checks = vec![initial_value_check(&sol, ic)?];
    checks.push(residual_check(spec, &sol, window, cfg.grid_size)?);

    let grid = window.interior(cfg.grid_size);
    let oracle = rk_reference_on(spec, ic, &grid, cfg.oracle_tol)?;
    checks.push(compare(&sol, &oracle, cfg.compare_tol)?);

    match spec {
        EquationSpec::SecondOrder { b, c } => {
            checks.push(riccati_check(*b, *c, &sol, window, cfg.grid_size)?);
        }
        EquationSpec::Bernoulli { f, g, alpha } => {
            let mut alt = solve_bernoulli_via_linear(f, g, *alpha, ic, &quad).map_err(at_stage("alternate route"))?;
            alt.scan_validity(range, DEFAULT_SCAN_SAMPLES).map_err(at_stage("validity scan"))?;
            checks.push(route_equivalence(&sol, &alt, &grid)?);
        }
        _ => {}
    }
    if sol.is_non_unique() {
        notes.push("zero solution: other solutions share this initial value".to_string());
    }
    Ok((sol, VerificationReport::new(checks, clipped, notes)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::expr::parse;
    use crate::solvers::{solve_linear_ivp, solve_second_order};
    use std::f64::consts::{E, PI};

    fn ex(s: &str) -> Expression {
        parse(s).unwrap()
    }

    fn linear(f: &str, g: &str) -> EquationSpec {
        EquationSpec::Linear { f: ex(f), g: ex(g) }
    }

    #[test]
    fn oracle_examples() {
        let o = rk_reference(&linear("-1", "0"), &InitialCondition::new(0.0, 1.0), Interval::new(0.0, 1.0), 1e-12)
            .unwrap();
        assert!((o.value_at(1.0).unwrap() - E).abs() < 1e-8);
        assert!(!o.truncated);

        let spec = EquationSpec::SecondOrder { b: 0.0, c: 1.0 };
        let o = rk_reference(&spec, &InitialCondition::with_slope(0.0, 0.0, 1.0), Interval::new(0.0, PI), 1e-12)
            .unwrap();
        assert!(o.value_at(PI).unwrap().abs() < 1e-7);
        assert!((o.slopes.as_ref().unwrap().last().unwrap() + 1.0).abs() < 1e-7);

        let spec = EquationSpec::Bernoulli { f: ex("1"), g: ex("1"), alpha: 2.0 };
        let o = rk_reference(&spec, &InitialCondition::new(0.0, 0.5), Interval::new(0.0, 1.0), 1e-12).unwrap();
        assert!((o.value_at(1.0).unwrap() - 1.0 / (1.0 + E)).abs() < 1e-7);
    }

    #[test]
    fn oracle_integrates_backward_and_stops_on_blowup() {
        // y' = y^2, y(0) = 1 -> y = 1/(1 - x), singular at 1
        let spec = EquationSpec::Bernoulli { f: ex("0"), g: ex("1"), alpha: 2.0 };
        let o = rk_reference(&spec, &InitialCondition::new(0.0, 1.0), Interval::new(-1.0, 2.0), 1e-10).unwrap();
        assert!(o.truncated);
        assert!(o.grid.iter().all(|&x| x < 1.0));
        assert!((o.value_at(-1.0).unwrap() - 0.5).abs() < 1e-8);
        assert!(o.grid.windows(2).all(|w| w[0] < w[1]));
        assert_eq!(o.grid.len(), o.values.len());
    }

    #[test]
    fn oracle_reports_bad_initial_point() {
        let spec = linear("log(x)", "0");
        assert!(matches!(
            rk_reference(&spec, &InitialCondition::new(0.0, 1.0), Interval::new(0.0, 1.0), 1e-10),
            Err(VerifyError::InitialPoint(_))
        ));
    }

    #[test]
    fn compare_examples() {
        let spec = linear("1", "0");
        let ic = InitialCondition::new(0.0, 1.0);
        let sol = solve_linear_ivp(&ex("1"), &ex("0"), &ic, &QuadratureConfig::for_range(0.0, 2.0)).unwrap();
        let grid = Interval::new(0.0, 2.0).linspace(41);
        let exact = OracleSolution {
            values: grid.iter().map(|x| (-x).exp()).collect(),
            grid: grid.clone(),
            slopes: None,
            method: "exact",
            steps: 0,
            rejected: 0,
            truncated: false,
        };
        let same = compare(&sol, &exact, 1e-6).unwrap();
        assert!(same.max_deviation < 1e-15 && same.pass);

        let o = rk_reference(&spec, &ic, Interval::new(0.0, 2.0), 1e-12).unwrap();
        let r = compare(&sol, &o, 1e-6).unwrap();
        assert!(r.max_deviation <= 1e-7 && r.pass, "{r:?}");

        let bad = compare(&sol.with_offset(1e-3), &o, 1e-6).unwrap();
        assert!(!bad.pass);
        assert!(bad.max_deviation > 2e-4 && bad.max_deviation <= 1e-3 + 1e-9);
    }

    #[test]
    fn residual_examples() {
        let spec = linear("1", "0");
        let ic = InitialCondition::new(0.0, 1.0);
        let sol = spec.solve(&ic, &QuadratureConfig::for_range(0.0, 2.0)).unwrap();
        let r = residual_check(&spec, &sol, Interval::new(0.0, 2.0), 200).unwrap();
        assert!(r.pass, "{r:?}");

        let zero_spec = EquationSpec::Bernoulli { f: ex("1"), g: ex("1"), alpha: 0.5 };
        let zero = zero_spec.solve(&InitialCondition::new(0.0, 0.0), &QuadratureConfig::default()).unwrap();
        let r = residual_check(&zero_spec, &zero, Interval::new(0.0, 1.0), 50).unwrap();
        assert_eq!(r.max_deviation, 0.0);

        // e^{+x} against y' + y = 0: residual 2 e^x, scale 2 e^x at most
        let wrong = solve_linear_ivp(&ex("-1"), &ex("0"), &ic, &QuadratureConfig::default()).unwrap();
        let r = residual_check(&spec, &wrong, Interval::new(0.0, 1.0), 50).unwrap();
        assert!(!r.pass);
        assert!(r.max_deviation > 0.5);

        assert!(matches!(
            residual_check(&spec, &sol, Interval::new(0.0, 1e-6), 50),
            Err(VerifyError::TooSmall { .. })
        ));
        assert!(residual_check(&spec, &sol, Interval::new(0.0, 1.0), 5).is_err());
    }

    #[test]
    fn riccati_examples() {
        let r = riccati_check(-3.0, 2.0, &solve_second_order(-3.0, 2.0, 1.0, 0.0), Interval::new(0.0, 2.0), 200)
            .unwrap();
        assert!(r.pass, "{r:?}");
        let r = riccati_check(2.0, 1.0, &solve_second_order(2.0, 1.0, 1.0, 1.0), Interval::new(0.0, 1.0), 200)
            .unwrap();
        assert!(r.pass, "{r:?}");
        let sin = solve_second_order(0.0, 1.0, 0.0, 1.0);
        let r = riccati_check(0.0, 1.0, &sin, Interval::new(0.0, PI), 200).unwrap();
        assert!(r.pass, "{r:?}");

        let zero = solve_second_order(0.0, 1.0, 0.0, 0.0);
        assert!(riccati_check(0.0, 1.0, &zero, Interval::new(0.0, 1.0), 50).is_err());
    }

    #[test]
    fn full_verify_examples() {
        let cfg = VerifyConfig::default();
        let r = full_verify(&linear("1", "x"), &InitialCondition::new(0.0, 0.0), Interval::new(0.0, 1.0), &cfg)
            .unwrap();
        assert!(r.pass, "{r:?}");

        let spec = EquationSpec::Bernoulli { f: ex("1"), g: ex("1"), alpha: 2.0 };
        let r = full_verify(&spec, &InitialCondition::new(0.0, 0.5), Interval::new(0.0, 1.0), &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(r.check("route_equivalence").is_some());

        let spec = EquationSpec::Exp { f: ex("1"), g: ex("0"), beta: 1.0 };
        let r = full_verify(&spec, &InitialCondition::new(0.0, 0.0), Interval::new(-2.0, 1.0), &cfg).unwrap();
        assert!(r.pass, "{r:?}");
        assert!(!r.notes.is_empty());
        assert!((r.validity.lo + 1.0).abs() < 1e-8);
    }

    #[test]
    fn report_pass_is_conjunction() {
        let a = CheckRecord::new("a", 0.0, 1.0, 1);
        let b = CheckRecord::new("b", 2.0, 1.0, 1);
        let nan = CheckRecord::new("n", f64::NAN, 1.0, 1);
        assert!(VerificationReport::new(vec![a.clone()], Interval::ALL, vec![]).pass);
        assert!(!VerificationReport::new(vec![a.clone(), b], Interval::ALL, vec![]).pass);
        assert!(!VerificationReport::new(vec![a, nan], Interval::ALL, vec![]).pass);
    }
}
