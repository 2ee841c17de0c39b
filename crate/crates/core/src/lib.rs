//! Numerical treatment of ODE Cauchy problems whose solutions blow up at a
//! finite, unknown point `x*`.
//!
//! Direct integration of `y' = f(x, y)` fails near a blow-up point because
//! both `y` and `y'` diverge there. This crate removes the singularity by a
//! change of independent variable and integrates the transformed system with
//! classical fixed-step RK4 instead:
//!
//! * **Differential transformation** — the first derivative `t = y'` becomes
//!   the independent variable. The blow-up point is recovered as the limit of
//!   `x(t)` for `t → ∞`, which the transformed system approaches with
//!   vanishing slope.
//! * **Non-local transformation** — a new variable `ξ = ∫ g(x, y) dx` is
//!   introduced for a regularizing function `g` (arc-length `g = (1+|f|^s)^{1/s}`,
//!   `g = f/y`, and friends). The transformed system is autonomous and free of
//!   singular points.
//!
//! Both routes are available for first- and second-order problems. On top of
//! the integration machinery sit an estimator for the blow-up abscissa `x*`
//! (Aitken Δ² extrapolation of the `x`-tail) and a log–log least-squares fit
//! of the singularity profile `y ≈ A |x* − x|^{-β}`.
//!
//! # Layout
//!
//! * [`expr`] — parser, evaluator and symbolic differentiation for the
//!   right-hand-side expressions over the variables `x`, `y`, `t`.
//! * [`ode`] — fixed-step classical RK4 with configurable stopping rules.
//! * [`transform`] — construction of the singularity-free systems, the
//!   `g`-function factory and the admissibility checker.
//! * [`blowup`] — `x*` estimation and power-law fitting.
//! * [`problems`] — built-in test problems with closed-form solutions, used
//!   as oracles throughout the test suite.
//!
//! # Example
//!
//! ```
//! use blowup_core::{expr, transform, ode, blowup};
//!
//! // y' = y^2, y(0) = 1: exact solution 1/(1-x), pole at x* = 1.
//! let f = expr::parse("y^2").unwrap();
//! let problem = transform::CauchyProblem::first_order(f, 0.0, 1.0).unwrap();
//! let system = transform::nonlocal_transform_1(&problem, transform::GChoice::FOverY).unwrap();
//! let stop = ode::StopRule::default().with_max_param(14.0);
//! let traj = ode::integrate(system.system(), 0.2, &stop).unwrap();
//! let est = blowup::estimate_x_star(&traj).unwrap();
//! assert!((est.x_star - 1.0).abs() < 1e-4);
//! ```

// negated float comparisons like `!(h > 0.0)` are deliberate: they reject
// NaN along with the out-of-range values
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod blowup;
pub mod error;
pub mod expr;
pub mod ode;
pub mod problems;
pub mod transform;

pub use blowup::{estimate_x_star, fit_power_law, BlowupEstimate, EstimateMethod};
pub use error::{Error, Result};
pub use expr::{parse, Binding, EvalError, Expression, ParseError, Var};
pub use ode::{integrate, rk4_step, OdeSystem, StopReason, StopRule, Trajectory};
pub use problems::{get_problem, ProblemId, TestProblem};
pub use transform::{
    differential_transform_1, differential_transform_2, nonlocal_transform_1, nonlocal_transform_2,
    CauchyProblem, GChoice, TransformKind, TransformedSystem,
};
