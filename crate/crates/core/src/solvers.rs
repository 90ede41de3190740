//! Closed-form solution constructors.
//!
//! Every indefinite integral in the first-order formulas is realized as a
//! definite integral anchored at the initial abscissa `x0`, so the free
//! constant maps straight onto the initial value:
//!
//! | class     | solution                                                    | constant        |
//! |-----------|-------------------------------------------------------------|-----------------|
//! | linear    | `y = e^{-F} (∫ g e^{F} + C)`                                | `C = y0`        |
//! | Bernoulli | `y = e^{-F} ((1-α) ∫ g e^{(1-α)F} + C)^{1/(1-α)}`           | `C = y0^{1-α}`  |
//! | exp       | `y = G - (1/β) log(β ∫ f e^{βG} + C)`                       | `C = e^{-β y0}` |
//!
//! with `F = ∫_{x0}^x f` and `G = ∫_{x0}^x g`. The second-order equation is
//! solved through the Riccati substitution `z = (log|y|)'`, which leaves
//! the familiar three-case basis selected by the sign of `b² - 4c`.
//!
//! Solutions are only claimed on the connected interval around `x0` where
//! the formula's guarded quantity (power base, log argument) stays
//! positive. [`ClosedFormSolution::scan_validity`] locates that interval.

use std::fmt;
use std::sync::Arc;

use serde::Serialize;
use thiserror::Error;

use crate::expr::Expression;
use crate::quad::{
    antiderivative, integrand_from_expr, weighted_cumulative, Antiderivative, QuadError,
    QuadratureConfig,
};

/// Width to which validity boundaries are bisected.
pub const BOUNDARY_WIDTH: f64 = 1e-10;

/// Default number of samples used when scanning for validity boundaries.
pub const DEFAULT_SCAN_SAMPLES: usize = 512;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SolveError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error(transparent)]
    Quad(#[from] QuadError),
    #[error("x = {x} is outside the validity interval [{lo}, {hi}]")]
    OutsideValidity { x: f64, lo: f64, hi: f64 },
    #[error("guarded quantity {what} is {value} at x = {x}")]
    Guard { what: &'static str, value: f64, x: f64 },
    #[error("solution overflowed at x = {x}")]
    Overflow { x: f64 },
    #[error("no real branch: {0}")]
    NoRealBranch(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum EquationClass {
    LinearFirstOrder,
    Bernoulli,
    ExpClass,
    SecondOrderConst,
}

impl EquationClass {
    /// Name used on the command line and in output documents.
    pub fn name(self) -> &'static str {
        match self {
            EquationClass::LinearFirstOrder => "linear",
            EquationClass::Bernoulli => "bernoulli",
            EquationClass::ExpClass => "exp",
            EquationClass::SecondOrderConst => "second-order",
        }
    }

    pub fn from_name(s: &str) -> Option<Self> {
        match s {
            "linear" => Some(EquationClass::LinearFirstOrder),
            "bernoulli" => Some(EquationClass::Bernoulli),
            "exp" => Some(EquationClass::ExpClass),
            "second-order" => Some(EquationClass::SecondOrderConst),
            _ => None,
        }
    }
}

impl fmt::Display for EquationClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// One of the four supported equation classes with its parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum EquationSpec {
    /// `y' + f y = g`
    Linear { f: Expression, g: Expression },
    /// `y' + f y = g y^α`, `α ∉ {0, 1}`
    Bernoulli { f: Expression, g: Expression, alpha: f64 },
    /// `y' + f e^{βy} = g`, `β ≠ 0`
    Exp { f: Expression, g: Expression, beta: f64 },
    /// `y'' + b y' + c y = 0`
    SecondOrder { b: f64, c: f64 },
}

impl EquationSpec {
    pub fn class(&self) -> EquationClass {
        match self {
            EquationSpec::Linear { .. } => EquationClass::LinearFirstOrder,
            EquationSpec::Bernoulli { .. } => EquationClass::Bernoulli,
            EquationSpec::Exp { .. } => EquationClass::ExpClass,
            EquationSpec::SecondOrder { .. } => EquationClass::SecondOrderConst,
        }
    }

    pub fn validate(&self) -> Result<(), SolveError> {
        match *self {
            EquationSpec::Linear { .. } => Ok(()),
            EquationSpec::Bernoulli { alpha, .. } => check_alpha(alpha),
            EquationSpec::Exp { beta, .. } => check_beta(beta),
            EquationSpec::SecondOrder { b, c } => {
                if b.is_finite() && c.is_finite() {
                    Ok(())
                } else {
                    Err(SolveError::InvalidParameter(format!("b and c must be finite, got b={b}, c={c}")))
                }
            }
        }
    }

    /// Build the closed-form solution through the primary route for the class.
    pub fn solve(
        &self,
        ic: &InitialCondition,
        cfg: &QuadratureConfig,
    ) -> Result<ClosedFormSolution, SolveError> {
        match self {
            EquationSpec::Linear { f, g } => solve_linear_ivp(f, g, ic, cfg),
            EquationSpec::Bernoulli { f, g, alpha } => solve_bernoulli(f, g, *alpha, ic, cfg),
            EquationSpec::Exp { f, g, beta } => solve_exp(f, g, *beta, ic, cfg),
            EquationSpec::SecondOrder { b, c } => solve_second_order_ivp(*b, *c, ic),
        }
    }
}

fn check_alpha(alpha: f64) -> Result<(), SolveError> {
    if !alpha.is_finite() || alpha == 0.0 || alpha == 1.0 {
        return Err(SolveError::InvalidParameter(format!(
            "Bernoulli exponent must be finite and not 0 or 1, got {alpha}"
        )));
    }
    Ok(())
}

fn check_beta(beta: f64) -> Result<(), SolveError> {
    if !beta.is_finite() || beta == 0.0 {
        return Err(SolveError::InvalidParameter(format!(
            "exponential coefficient must be finite and nonzero, got {beta}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InitialCondition {
    pub x0: f64,
    pub y0: f64,
    /// Initial slope; second-order problems only.
    pub yp0: Option<f64>,
}

impl InitialCondition {
    pub fn new(x0: f64, y0: f64) -> Self {
        InitialCondition { x0, y0, yp0: None }
    }

    pub fn with_slope(x0: f64, y0: f64, yp0: f64) -> Self {
        InitialCondition { x0, y0, yp0: Some(yp0) }
    }

    fn validate(&self) -> Result<(), SolveError> {
        let slope_ok = self.yp0.is_none_or(f64::is_finite);
        if self.x0.is_finite() && self.y0.is_finite() && slope_ok {
            Ok(())
        } else {
            Err(SolveError::InvalidParameter(format!("initial condition must be finite: {self:?}")))
        }
    }
}

/// Closed interval `[lo, hi]`; bounds may be infinite.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lo: f64,
    pub hi: f64,
}

impl Interval {
    pub const ALL: Interval = Interval { lo: f64::NEG_INFINITY, hi: f64::INFINITY };

    pub fn new(lo: f64, hi: f64) -> Self {
        Interval { lo, hi }
    }

    pub fn contains(&self, x: f64) -> bool {
        self.lo <= x && x <= self.hi
    }

    pub fn intersect(&self, other: &Interval) -> Option<Interval> {
        let lo = self.lo.max(other.lo);
        let hi = self.hi.min(other.hi);
        (lo <= hi).then_some(Interval { lo, hi })
    }

    pub fn width(&self) -> f64 {
        self.hi - self.lo
    }

    /// `n` evenly spaced points including both ends (`n >= 2`).
    pub fn linspace(&self, n: usize) -> Vec<f64> {
        match n {
            0 => Vec::new(),
            1 => vec![self.lo],
            _ => {
                let step = self.width() / (n - 1) as f64;
                (0..n)
                    .map(|i| if i == n - 1 { self.hi } else { self.lo + step * i as f64 })
                    .collect()
            }
        }
    }

    /// `n` evenly spaced points strictly inside the interval.
    pub fn interior(&self, n: usize) -> Vec<f64> {
        let step = self.width() / (n + 1) as f64;
        (1..=n).map(|i| self.lo + step * i as f64).collect()
    }
}

impl fmt::Display for Interval {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[{}, {}]", self.lo, self.hi)
    }
}

/// Which of the three second-order cases applies.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SecondOrderCase {
    /// `b² - 4c > 0`: exponents `r1 = -b/2 - √D/2`, `r2 = -b/2 + √D/2`.
    Distinct { r1: f64, r2: f64 },
    /// `b² - 4c = 0` within the classification threshold.
    Repeated { r: f64 },
    /// `b² - 4c < 0`: `e^{-bx/2}(C1 cos ωx + C2 sin ωx)`, `ω = √(4c - b²)/2`.
    Complex { decay: f64, omega: f64 },
}

impl SecondOrderCase {
    /// Classify by the discriminant, treating `|D| <= 1e-12 max(1, b², |4c|)`
    /// as a double root.
    pub fn classify(b: f64, c: f64) -> Self {
        let d = b * b - 4.0 * c;
        let threshold = 1e-12 * 1f64.max(b * b).max((4.0 * c).abs());
        if d.abs() <= threshold {
            SecondOrderCase::Repeated { r: -0.5 * b }
        } else if d > 0.0 {
            let s = 0.5 * d.sqrt();
            SecondOrderCase::Distinct { r1: -0.5 * b - s, r2: -0.5 * b + s }
        } else {
            SecondOrderCase::Complex { decay: -0.5 * b, omega: 0.5 * (-d).sqrt() }
        }
    }

    pub fn number(&self) -> u8 {
        match self {
            SecondOrderCase::Distinct { .. } => 1,
            SecondOrderCase::Repeated { .. } => 2,
            SecondOrderCase::Complex { .. } => 3,
        }
    }

    /// Basis functions and their derivatives at `x`: `[(φ1, φ1'), (φ2, φ2')]`.
    fn basis(&self, x: f64) -> [(f64, f64); 2] {
        match *self {
            SecondOrderCase::Distinct { r1, r2 } => {
                let e1 = (r1 * x).exp();
                let e2 = (r2 * x).exp();
                [(e1, r1 * e1), (e2, r2 * e2)]
            }
            SecondOrderCase::Repeated { r } => {
                let e = (r * x).exp();
                [(e, r * e), (x * e, (1.0 + r * x) * e)]
            }
            SecondOrderCase::Complex { decay, omega } => {
                let e = (decay * x).exp();
                let (s, c) = (omega * x).sin_cos();
                [
                    (e * c, e * (decay * c - omega * s)),
                    (e * s, e * (decay * s + omega * c)),
                ]
            }
        }
    }

    fn provenance(&self) -> &'static str {
        match self {
            SecondOrderCase::Distinct { .. } => {
                "second order, distinct real roots: y = C1 e^{(-b/2 - sqrt(D)/2) x} + C2 e^{(-b/2 + sqrt(D)/2) x}"
            }
            SecondOrderCase::Repeated { .. } => {
                "second order, double root: y = C1 e^{-b x/2} + C2 x e^{-b x/2}"
            }
            SecondOrderCase::Complex { .. } => {
                "second order, complex roots: y = e^{-b x/2} (C1 cos(w x) + C2 sin(w x)), w = sqrt(-D)/2"
            }
        }
    }
}

#[derive(Debug, Clone)]
enum Form {
    /// `e^{-F} (W + c)` with `W = ∫ g e^{F}`.
    Linear { decay: Arc<Antiderivative>, weighted: Arc<Antiderivative>, c: f64 },
    /// `sign e^{-F} B^{1/k}` with `B = c + k σ ∫ g e^{kF}`, `k = 1 - α`.
    Bernoulli {
        decay: Arc<Antiderivative>,
        weighted: Arc<Antiderivative>,
        c: f64,
        k: f64,
        sign: f64,
        forcing_sign: f64,
    },
    /// `sign u^{1/k}` with `u` a linear-class solution.
    PowerOfLinear { inner: Box<ClosedFormSolution>, k: f64, sign: f64 },
    Zero,
    /// `G - ln(A)/β` with `A = c + β ∫ f e^{βG}`.
    Exp { growth: Arc<Antiderivative>, weighted: Arc<Antiderivative>, c: f64, beta: f64 },
    SecondOrder { case: SecondOrderCase, c1: f64, c2: f64 },
}

/// An evaluable closed-form solution together with its constants and the
/// interval on which the formula is claimed.
#[derive(Debug, Clone)]
pub struct ClosedFormSolution {
    class: EquationClass,
    form: Form,
    anchor: f64,
    constants: Vec<(String, f64)>,
    validity: Interval,
    provenance: &'static str,
    non_unique: bool,
    offset: f64,
}

impl ClosedFormSolution {
    pub fn class(&self) -> EquationClass {
        self.class
    }

    /// Abscissa the antiderivatives are anchored at.
    pub fn anchor(&self) -> f64 {
        self.anchor
    }

    pub fn constants(&self) -> &[(String, f64)] {
        &self.constants
    }

    pub fn constant(&self, name: &str) -> Option<f64> {
        self.constants.iter().find(|(n, _)| n == name).map(|&(_, v)| v)
    }

    pub fn validity(&self) -> Interval {
        self.validity
    }

    /// Which closed form was instantiated.
    pub fn provenance(&self) -> &'static str {
        self.provenance
    }

    /// Set for the zero solution of a Bernoulli problem with `0 < α < 1`,
    /// where other solutions share the same initial value.
    pub fn is_non_unique(&self) -> bool {
        self.non_unique
    }

    /// Second-order case number (1, 2 or 3).
    pub fn second_order_case(&self) -> Option<SecondOrderCase> {
        match self.form {
            Form::SecondOrder { case, .. } => Some(case),
            _ => None,
        }
    }

    /// A copy whose values are shifted by `delta`. Used to inject defects
    /// when exercising the verification checks.
    pub fn with_offset(&self, delta: f64) -> Self {
        let mut s = self.clone();
        s.offset += delta;
        s
    }

    pub fn offset(&self) -> f64 {
        self.offset
    }

    /// `y(x)`; outside the validity interval, or where the guarded quantity
    /// is not positive, a domain signal is returned instead.
    pub fn eval(&self, x: f64) -> Result<f64, SolveError> {
        if !self.validity.contains(x) {
            return Err(SolveError::OutsideValidity { x, lo: self.validity.lo, hi: self.validity.hi });
        }
        Ok(self.raw_value(x)? + self.offset)
    }

    /// `y` on a batch of abscissae.
    pub fn eval_many(&self, xs: &[f64]) -> Result<Vec<f64>, SolveError> {
        xs.iter().map(|&x| self.eval(x)).collect()
    }

    /// `y'(x)` from the analytic basis derivatives; second order only.
    pub fn derivative(&self, x: f64) -> Option<f64> {
        match self.form {
            Form::SecondOrder { case, c1, c2 } => {
                let [(_, d1), (_, d2)] = case.basis(x);
                Some(c1 * d1 + c2 * d2)
            }
            _ => None,
        }
    }

    /// The quantity that must stay positive for the formula to hold, if the
    /// class has one.
    pub fn guard(&self, x: f64) -> Result<Option<f64>, SolveError> {
        Ok(match &self.form {
            Form::Bernoulli { weighted, c, k, forcing_sign, .. } => {
                Some(c + k * forcing_sign * weighted.value(x)?)
            }
            Form::PowerOfLinear { inner, .. } => Some(inner.raw_value(x)?),
            Form::Exp { weighted, c, beta, .. } => Some(c + beta * weighted.value(x)?),
            _ => None,
        })
    }

    fn raw_value(&self, x: f64) -> Result<f64, SolveError> {
        let v = match &self.form {
            Form::Linear { decay, weighted, c } => {
                let factor = (-decay.value(x)?).exp();
                factor * (weighted.value(x)? + c)
            }
            Form::Bernoulli { decay, weighted, c, k, sign, forcing_sign } => {
                let base = c + k * forcing_sign * weighted.value(x)?;
                if !(base > 0.0) {
                    return Err(SolveError::Guard { what: "power base", value: base, x });
                }
                let factor = (-decay.value(x)?).exp();
                sign * factor * base.powf(1.0 / k)
            }
            Form::PowerOfLinear { inner, k, sign } => {
                let u = inner.raw_value(x)?;
                if !(u > 0.0) {
                    return Err(SolveError::Guard { what: "transformed value", value: u, x });
                }
                sign * u.powf(1.0 / k)
            }
            Form::Zero => 0.0,
            Form::Exp { growth, weighted, c, beta } => {
                let arg = c + beta * weighted.value(x)?;
                if !(arg > 0.0) {
                    return Err(SolveError::Guard { what: "log argument", value: arg, x });
                }
                growth.value(x)? - arg.ln() / beta
            }
            Form::SecondOrder { case, c1, c2 } => {
                let [(p1, _), (p2, _)] = case.basis(x);
                c1 * p1 + c2 * p2
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(SolveError::Overflow { x })
        }
    }

    fn ok_at(&self, x: f64) -> bool {
        self.raw_value(x).is_ok()
    }

    /// Locate the connected interval around the anchor, within `coverage`,
    /// on which the solution evaluates. The coverage is sampled with
    /// `samples` points; a failing sample triggers bisection between it and
    /// the last good point down to [`BOUNDARY_WIDTH`], and the good end of
    /// that bracket becomes the boundary. The result is stored as the new
    /// validity interval and returned.
    pub fn scan_validity(&mut self, coverage: Interval, samples: usize) -> Result<Interval, SolveError> {
        let x0 = self.anchor;
        let coverage = coverage.intersect(&self.validity).ok_or_else(|| {
            SolveError::InvalidParameter(format!("coverage {coverage} misses validity {}", self.validity))
        })?;
        if !coverage.contains(x0) || !coverage.width().is_finite() {
            return Err(SolveError::InvalidParameter(format!(
                "coverage {coverage} must be finite and contain x0 = {x0}"
            )));
        }
        self.raw_value(x0)?;
        let step = coverage.width() / samples.max(2) as f64;
        let hi = self.scan_side(x0, coverage.hi, step);
        let lo = self.scan_side(x0, coverage.lo, step);
        self.validity = Interval { lo, hi };
        Ok(self.validity)
    }

    fn scan_side(&self, x0: f64, end: f64, step: f64) -> f64 {
        if end == x0 || step == 0.0 {
            return x0;
        }
        let dir = (end - x0).signum();
        let mut good = x0;
        let mut i = 1usize;
        loop {
            let t = x0 + dir * step * i as f64;
            let t = if (t - end) * dir >= 0.0 { end } else { t };
            if !self.ok_at(t) {
                return self.bisect(good, t);
            }
            good = t;
            if t == end {
                return end;
            }
            i += 1;
        }
    }

    fn bisect(&self, mut good: f64, mut bad: f64) -> f64 {
        while (bad - good).abs() > BOUNDARY_WIDTH {
            let mid = 0.5 * (good + bad);
            if mid == good || mid == bad {
                break;
            }
            if self.ok_at(mid) {
                good = mid;
            } else {
                bad = mid;
            }
        }
        good
    }
}

fn shared_cfg(cfg: &QuadratureConfig) -> Result<(), SolveError> {
    cfg.validate().map_err(SolveError::from)
}

/// Linear first-order IVP: `y = e^{-∫f} (∫ g e^{∫f} + y0)`, both integrals
/// anchored at `x0`.
pub fn solve_linear_ivp(
    f: &Expression,
    g: &Expression,
    ic: &InitialCondition,
    cfg: &QuadratureConfig,
) -> Result<ClosedFormSolution, SolveError> {
    ic.validate()?;
    let mut sol = solve_linear_general(f, g, ic.y0, ic.x0, cfg)?;
    sol.provenance = "linear first order, initial-value form: y = exp(-F)(W + y0), F = int_x0^x f, W = int_x0^x g exp(F)";
    Ok(sol)
}

/// Linear first-order general solution with integration constant `c`; the
/// indefinite integrals are anchored at `x0`, hence `y(x0) = c`.
pub fn solve_linear_general(
    f: &Expression,
    g: &Expression,
    c: f64,
    x0: f64,
    cfg: &QuadratureConfig,
) -> Result<ClosedFormSolution, SolveError> {
    shared_cfg(cfg)?;
    if !(c.is_finite() && x0.is_finite()) {
        return Err(SolveError::InvalidParameter(format!("C and x0 must be finite, got C={c}, x0={x0}")));
    }
    let decay = Arc::new(antiderivative(integrand_from_expr(f), x0, cfg)?);
    let weighted = Arc::new(weighted_cumulative(integrand_from_expr(g), decay.clone(), 1.0, x0, cfg)?);
    Ok(ClosedFormSolution {
        class: EquationClass::LinearFirstOrder,
        form: Form::Linear { decay, weighted, c },
        anchor: x0,
        constants: vec![("C".into(), c)],
        validity: Interval::ALL,
        provenance: "linear first order, general form: y = exp(-F)(W + C), F = int f, W = int g exp(F)",
        non_unique: false,
        offset: 0.0,
    })
}

/// Sign of `y0` and the sign factor `sign^{1-α}` carried by the forcing
/// term when the equation is rewritten for `|y|`.
fn bernoulli_signs(alpha: f64, y0: f64) -> Result<(f64, f64), SolveError> {
    if y0 > 0.0 {
        return Ok((1.0, 1.0));
    }
    let k = 1.0 - alpha;
    if k.fract() != 0.0 {
        return Err(SolveError::NoRealBranch(format!(
            "y0 = {y0} < 0 needs an integer 1 - alpha, got {k}"
        )));
    }
    let forcing_sign = if (k.abs() % 2.0) == 0.0 { 1.0 } else { -1.0 };
    Ok((-1.0, forcing_sign))
}

fn zero_solution(alpha: f64, x0: f64) -> Result<ClosedFormSolution, SolveError> {
    if alpha < 0.0 {
        return Err(SolveError::NoRealBranch(format!(
            "y0 = 0 with alpha = {alpha} < 0: y^alpha is undefined at zero"
        )));
    }
    Ok(ClosedFormSolution {
        class: EquationClass::Bernoulli,
        form: Form::Zero,
        anchor: x0,
        constants: vec![("C".into(), 0.0)],
        validity: Interval::ALL,
        provenance: "Bernoulli particular solution y = 0",
        non_unique: alpha > 0.0 && alpha < 1.0,
        offset: 0.0,
    })
}

/// Bernoulli IVP through the direct formula
/// `y = e^{-F} ((1-α) ∫ g e^{(1-α)F} + y0^{1-α})^{1/(1-α)}`.
///
/// `y0 = 0` yields the zero solution (flagged non-unique for `0 < α < 1`).
/// `y0 < 0` is accepted only for integer `1 - α`; the sign is then carried
/// separately and the formula is applied to `|y|`.
pub fn solve_bernoulli(
    f: &Expression,
    g: &Expression,
    alpha: f64,
    ic: &InitialCondition,
    cfg: &QuadratureConfig,
) -> Result<ClosedFormSolution, SolveError> {
    check_alpha(alpha)?;
    ic.validate()?;
    shared_cfg(cfg)?;
    if ic.y0 == 0.0 {
        return zero_solution(alpha, ic.x0);
    }
    let (sign, forcing_sign) = bernoulli_signs(alpha, ic.y0)?;
    let k = 1.0 - alpha;
    let c = ic.y0.abs().powf(k);
    if !(c.is_finite() && c > 0.0) {
        return Err(SolveError::Overflow { x: ic.x0 });
    }
    let decay = Arc::new(antiderivative(integrand_from_expr(f), ic.x0, cfg)?);
    let weighted = Arc::new(weighted_cumulative(integrand_from_expr(g), decay.clone(), k, ic.x0, cfg)?);
    Ok(ClosedFormSolution {
        class: EquationClass::Bernoulli,
        form: Form::Bernoulli { decay, weighted, c, k, sign, forcing_sign },
        anchor: ic.x0,
        constants: vec![("C".into(), c)],
        validity: Interval::ALL,
        provenance: "Bernoulli: y = exp(-F)((1-alpha) int g exp((1-alpha)F) + C)^(1/(1-alpha)), C = y0^(1-alpha)",
        non_unique: false,
        offset: 0.0,
    })
}

/// Bernoulli IVP through the power substitution `u = y^{1-α}`, which turns
/// the equation into the linear problem
/// `u' + (1-α) f u = (1-α) g`, solved by [`solve_linear_ivp`].
///
/// This is an independent route for cross-checking [`solve_bernoulli`].
pub fn solve_bernoulli_via_linear(
    f: &Expression,
    g: &Expression,
    alpha: f64,
    ic: &InitialCondition,
    cfg: &QuadratureConfig,
) -> Result<ClosedFormSolution, SolveError> {
    check_alpha(alpha)?;
    ic.validate()?;
    shared_cfg(cfg)?;
    if ic.y0 == 0.0 {
        return zero_solution(alpha, ic.x0);
    }
    let (sign, forcing_sign) = bernoulli_signs(alpha, ic.y0)?;
    let k = 1.0 - alpha;
    let u0 = ic.y0.abs().powf(k);
    if !(u0.is_finite() && u0 > 0.0) {
        return Err(SolveError::Overflow { x: ic.x0 });
    }
    let inner = solve_linear_ivp(
        &f.scaled(k),
        &g.scaled(k * forcing_sign),
        &InitialCondition::new(ic.x0, u0),
        cfg,
    )?;
    Ok(ClosedFormSolution {
        class: EquationClass::Bernoulli,
        form: Form::PowerOfLinear { inner: Box::new(inner), k, sign },
        anchor: ic.x0,
        constants: vec![("C".into(), u0)],
        validity: Interval::ALL,
        provenance: "Bernoulli via u = y^(1-alpha): u' + (1-alpha) f u = (1-alpha) g, y = u^(1/(1-alpha))",
        non_unique: false,
        offset: 0.0,
    })
}

/// IVP for `y' + f e^{βy} = g`:
/// `y = G - (1/β) log(β ∫ f e^{βG} + e^{-β y0})`, `G = ∫_{x0}^x g`.
pub fn solve_exp(
    f: &Expression,
    g: &Expression,
    beta: f64,
    ic: &InitialCondition,
    cfg: &QuadratureConfig,
) -> Result<ClosedFormSolution, SolveError> {
    check_beta(beta)?;
    ic.validate()?;
    shared_cfg(cfg)?;
    let c = (-beta * ic.y0).exp();
    if !(c.is_finite() && c > 0.0) {
        return Err(SolveError::Overflow { x: ic.x0 });
    }
    let growth = Arc::new(antiderivative(integrand_from_expr(g), ic.x0, cfg)?);
    let weighted =
        Arc::new(weighted_cumulative(integrand_from_expr(f), growth.clone(), beta, ic.x0, cfg)?);
    Ok(ClosedFormSolution {
        class: EquationClass::ExpClass,
        form: Form::Exp { growth, weighted, c, beta },
        anchor: ic.x0,
        constants: vec![("C".into(), c)],
        validity: Interval::ALL,
        provenance: "exponential class: y = G - log(beta int f exp(beta G) + C)/beta, C = exp(-beta y0)",
        non_unique: false,
        offset: 0.0,
    })
}

/// `y'' + b y' + c y = 0` with explicit constants `C1`, `C2` in the basis
/// selected by [`SecondOrderCase::classify`].
pub fn solve_second_order(b: f64, c: f64, c1: f64, c2: f64) -> ClosedFormSolution {
    let case = SecondOrderCase::classify(b, c);
    ClosedFormSolution {
        class: EquationClass::SecondOrderConst,
        form: Form::SecondOrder { case, c1, c2 },
        anchor: 0.0,
        constants: vec![("C1".into(), c1), ("C2".into(), c2)],
        validity: Interval::ALL,
        provenance: case.provenance(),
        non_unique: false,
        offset: 0.0,
    }
}

/// Second-order IVP. Solves the 2x2 system `C1 φ1 + C2 φ2 = y0`,
/// `C1 φ1' + C2 φ2' = y0'` at `x0`; its determinant is the Wronskian of the
/// basis and never vanishes.
pub fn solve_second_order_ivp(
    b: f64,
    c: f64,
    ic: &InitialCondition,
) -> Result<ClosedFormSolution, SolveError> {
    EquationSpec::SecondOrder { b, c }.validate()?;
    ic.validate()?;
    let yp0 = ic
        .yp0
        .ok_or_else(|| SolveError::InvalidParameter("second-order problems need an initial slope".into()))?;
    let case = SecondOrderCase::classify(b, c);
    let [(p1, d1), (p2, d2)] = case.basis(ic.x0);
    let wronskian = p1 * d2 - p2 * d1;
    if !(wronskian.is_finite() && wronskian != 0.0) {
        return Err(SolveError::Overflow { x: ic.x0 });
    }
    let c1 = (ic.y0 * d2 - p2 * yp0) / wronskian;
    let c2 = (p1 * yp0 - ic.y0 * d1) / wronskian;
    if !(c1.is_finite() && c2.is_finite()) {
        return Err(SolveError::Overflow { x: ic.x0 });
    }
    let mut sol = solve_second_order(b, c, c1, c2);
    sol.anchor = ic.x0;
    Ok(sol)
}
