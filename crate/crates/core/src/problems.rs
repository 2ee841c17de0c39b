//! Built-in test problems with closed-form solutions.
//!
//! The corpus carries the worked examples in both their original and
//! transformed variables, so every integration in the test suite can be
//! checked against an exact answer:
//!
//! * `ex1` — `y' = y²`, `y(0) = a`: exact `y = a/(1 − a x)`, first-order
//!   pole at `x* = 1/a`. Differential transform `x'_t = 1/(2ty)`,
//!   `y'_t = 1/(2y)` from `t0 = a²`, exact `x = 1/a − t^{-1/2}`, `y = √t`.
//! * `ex2-form` — `ex1` paired with `g = f/y`: system `x'_ξ = 1/y`,
//!   `y'_ξ = y`, exact `x = (1 − e^{−ξ})/a`, `y = a e^ξ`.
//! * `ex3` — `y'' = 2y³`, `y(0) = a`, `y'(0) = a²`: same exact solution as
//!   `ex1`. Differential transform `x'_t = 1/(2y³)`, `y'_t = t/(2y³)` from
//!   `t0 = a²`, same exact parametric solution as `ex1`.
//! * `ex4-form` — `ex3` paired with `g = t/y`: system `x'_ξ = y/t`,
//!   `y'_ξ = y`, `t'_ξ = 2y⁴/t`, exact `(x, y, t) =
//!   ((1 − e^{−ξ})/a, a e^ξ, a² e^{2ξ})`.
//!
//! A separate synthetic family `y' = y^p` (`p > 1`) is included for
//! power-law-fit coverage; it is not from the source corpus of worked
//! examples but has the closed form `x* = y0^{1−p}/(p−1)`, `β = 1/(p−1)`
//! by separation of variables.
//!
//! The corpus is code rather than data files: the closed forms are
//! one-liners and this keeps them next to their consumers.

use crate::error::{Error, Result};
use crate::expr::{parse, Expression};
use crate::transform::{CauchyProblem, GChoice, TransformKind};
use std::str::FromStr;

/// Stable identifiers for the built-in problems (also the CLI's spelling).
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProblemId {
    Ex1,
    Ex2Form,
    Ex3,
    Ex4Form,
}

impl ProblemId {
    pub const ALL: [ProblemId; 4] = [
        ProblemId::Ex1,
        ProblemId::Ex2Form,
        ProblemId::Ex3,
        ProblemId::Ex4Form,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ProblemId::Ex1 => "ex1",
            ProblemId::Ex2Form => "ex2-form",
            ProblemId::Ex3 => "ex3",
            ProblemId::Ex4Form => "ex4-form",
        }
    }
}

impl FromStr for ProblemId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "ex1" => Ok(ProblemId::Ex1),
            "ex2-form" => Ok(ProblemId::Ex2Form),
            "ex3" => Ok(ProblemId::Ex3),
            "ex4-form" => Ok(ProblemId::Ex4Form),
            other => Err(Error::UnknownProblem(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Builtin(ProblemId),
    /// `y' = y^p`, synthetic, `a` plays the role of `y0`.
    PowerLaw {
        p: f64,
    },
}

/// A problem bundled with its exact solutions.
#[derive(Debug, Clone, PartialEq)]
pub struct TestProblem {
    kind: Kind,
    a: f64,
    problem: CauchyProblem,
    g: Option<GChoice>,
}

/// Fetch a built-in problem with scale parameter `a > 0`.
pub fn get_problem(id: ProblemId, a: f64) -> Result<TestProblem> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(Error::BadParameter(format!(
            "a = {a} must be positive and finite"
        )));
    }
    let expr = |src: &str| -> Expression { parse(src).expect("static expression") };
    let (problem, g) = match id {
        ProblemId::Ex1 => (CauchyProblem::first_order(expr("y^2"), 0.0, a)?, None),
        ProblemId::Ex2Form => (
            CauchyProblem::first_order(expr("y^2"), 0.0, a)?,
            Some(GChoice::FOverY),
        ),
        ProblemId::Ex3 => (
            CauchyProblem::second_order(expr("2*y^3"), 0.0, a, a * a)?,
            None,
        ),
        ProblemId::Ex4Form => (
            CauchyProblem::second_order(expr("2*y^3"), 0.0, a, a * a)?,
            Some(GChoice::TOverY),
        ),
    };
    Ok(TestProblem {
        kind: Kind::Builtin(id),
        a,
        problem,
        g,
    })
}

/// Synthetic `y' = y^p` with `y(0) = y0`; requires `p > 1` so the solution
/// blows up. Closed form by separation of variables:
/// `x* = y0^{1−p}/(p−1)`, `y = (y0^{1−p} − (p−1)x)^{−1/(p−1)}`,
/// `β = 1/(p−1)`, `A = (p−1)^{−1/(p−1)}`.
pub fn synthetic_power(p: f64, y0: f64) -> Result<TestProblem> {
    if !(p > 1.0) || !p.is_finite() {
        return Err(Error::BadParameter(format!("p = {p} must be > 1")));
    }
    if !(y0 > 0.0) || !y0.is_finite() {
        return Err(Error::BadParameter(format!("y0 = {y0} must be positive")));
    }
    let f = Expression::pow(
        Expression::variable(crate::expr::Var::Y),
        Expression::Constant(p),
    );
    Ok(TestProblem {
        kind: Kind::PowerLaw { p },
        a: y0,
        problem: CauchyProblem::first_order(f, 0.0, y0)?,
        g: Some(GChoice::FOverY),
    })
}

impl TestProblem {
    pub fn id_str(&self) -> String {
        match &self.kind {
            Kind::Builtin(id) => id.as_str().to_string(),
            Kind::PowerLaw { p } => format!("power-law(p={p})"),
        }
    }

    pub fn a(&self) -> f64 {
        self.a
    }

    pub fn problem(&self) -> &CauchyProblem {
        &self.problem
    }

    /// The worked g-choice for the `*-form` problems and the synthetic
    /// family; `None` for the plain differential-transform examples.
    pub fn g_choice(&self) -> Option<&GChoice> {
        self.g.as_ref()
    }

    /// The transform each example was formulated with.
    pub fn default_transform(&self) -> TransformKind {
        match &self.kind {
            Kind::Builtin(ProblemId::Ex1) | Kind::Builtin(ProblemId::Ex3) => {
                TransformKind::Differential
            }
            _ => TransformKind::NonLocal,
        }
    }

    /// Exact blow-up point.
    pub fn x_star(&self) -> f64 {
        match &self.kind {
            Kind::Builtin(_) => 1.0 / self.a,
            Kind::PowerLaw { p } => self.a.powf(1.0 - p) / (p - 1.0),
        }
    }

    /// Exact singularity exponent `β` in `y ≈ A |x* − x|^{-β}`.
    pub fn exponent(&self) -> f64 {
        match &self.kind {
            Kind::Builtin(_) => 1.0,
            Kind::PowerLaw { p } => 1.0 / (p - 1.0),
        }
    }

    /// Exact singularity amplitude `A`.
    pub fn amplitude(&self) -> f64 {
        match &self.kind {
            // y = a/(1 - a x) = 1/(x* - x): A = 1 for every a
            Kind::Builtin(_) => 1.0,
            Kind::PowerLaw { p } => (p - 1.0).powf(-1.0 / (p - 1.0)),
        }
    }

    /// Exact solution `y(x)` for `x < x*`.
    pub fn exact_y(&self, x: f64) -> Result<f64> {
        if x >= self.x_star() {
            return Err(Error::BadParameter(format!(
                "x = {x} is at or beyond the blow-up point {}",
                self.x_star()
            )));
        }
        Ok(match &self.kind {
            Kind::Builtin(_) => self.a / (1.0 - self.a * x),
            Kind::PowerLaw { p } => (self.a.powf(1.0 - p) - (p - 1.0) * x).powf(-1.0 / (p - 1.0)),
        })
    }

    /// Start value of the transform parameter: `t0` for the differential
    /// transform, `0` for the non-local one.
    pub fn transform_start(&self, kind: TransformKind) -> f64 {
        match kind {
            TransformKind::Differential => self.a * self.a,
            TransformKind::NonLocal => 0.0,
        }
    }

    /// Exact state of the transformed system at the given parameter value.
    ///
    /// Recorded closed forms: the differential transform of `ex1`/`ex3`
    /// (`x = 1/a − t^{-1/2}`, `y = √t`, `t ≥ a²`), the non-local transform
    /// of `ex2-form` (`(1 − e^{−ξ})/a, a e^ξ`), of `ex4-form` (plus
    /// `t = a² e^{2ξ}`), and of the synthetic family with `g = f/y`.
    pub fn exact_transformed_state(&self, kind: TransformKind, param: f64) -> Result<Vec<f64>> {
        let a = self.a;
        match (&self.kind, kind) {
            (Kind::Builtin(ProblemId::Ex1), TransformKind::Differential)
            | (Kind::Builtin(ProblemId::Ex3), TransformKind::Differential) => {
                if param < a * a {
                    return Err(Error::BadParameter(format!(
                        "t = {param} is below the start value t0 = {}",
                        a * a
                    )));
                }
                Ok(vec![1.0 / a - param.powf(-0.5), param.sqrt()])
            }
            (Kind::Builtin(ProblemId::Ex2Form), TransformKind::NonLocal) => {
                check_xi(param)?;
                Ok(vec![(1.0 - (-param).exp()) / a, a * param.exp()])
            }
            (Kind::Builtin(ProblemId::Ex4Form), TransformKind::NonLocal) => {
                check_xi(param)?;
                Ok(vec![
                    (1.0 - (-param).exp()) / a,
                    a * param.exp(),
                    a * a * (2.0 * param).exp(),
                ])
            }
            (Kind::PowerLaw { p }, TransformKind::NonLocal) => {
                check_xi(param)?;
                let x_star = self.x_star();
                Ok(vec![
                    x_star * (1.0 - (-(p - 1.0) * param).exp()),
                    a * param.exp(),
                ])
            }
            _ => Err(Error::NotApplicable(format!(
                "no recorded exact solution for {} under {:?}",
                self.id_str(),
                kind
            ))),
        }
    }
}

fn check_xi(xi: f64) -> Result<()> {
    if xi < 0.0 {
        Err(Error::BadParameter(format!(
            "xi = {xi} is below the start value 0"
        )))
    } else {
        Ok(())
    }
}
