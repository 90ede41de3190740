//! Closed-form solutions for four classes of ordinary differential equations,
//! obtained by rewriting `y'/y` as `(log|y|)'` and collapsing the equation
//! into an exact derivative:
//!
//! - linear first order `y' + f(x) y = g(x)`
//! - Bernoulli `y' + f(x) y = g(x) y^α`
//! - exponential nonlinearity `y' + f(x) e^{βy} = g(x)`
//! - constant-coefficient second order `y'' + b y' + c y = 0`
//!
//! Coefficients `f` and `g` are arbitrary expressions ([`expr`]); the
//! antiderivatives the formulas need are realized by cumulative adaptive
//! quadrature ([`quad`]). [`verify`] checks every solution against the
//! original equation with finite-difference residuals and an independent
//! Runge-Kutta oracle. [`cli`] is the command-line front end.

// `!(a < b)` comparisons are deliberate: they also reject NaN.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod expr;
pub mod quad;
pub mod solvers;
pub mod verify;

pub use expr::{parse, EvalError, Expression, ParseError};
pub use quad::{Antiderivative, QuadError, QuadratureConfig};
pub use solvers::{
    ClosedFormSolution, EquationClass, EquationSpec, InitialCondition, Interval, SolveError,
};
pub use verify::{CheckRecord, OracleSolution, VerificationReport, VerifyConfig, VerifyError};
