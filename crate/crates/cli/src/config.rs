//! Shared argument groups and their translation into core types.

use blowup_core::error::Error;
use blowup_core::expr::parse;
use blowup_core::ode::StopRule;
use blowup_core::problems::{get_problem, ProblemId, TestProblem};
use blowup_core::transform::{
    differential_transform_1, differential_transform_2, nonlocal_transform_1, nonlocal_transform_2,
    CauchyProblem, GChoice, Order, TransformKind, TransformedSystem,
};
use clap::{Args, ValueEnum};
use std::fmt;

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(std::io::Error),
    Usage(String),
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Io(e) => write!(f, "{e}"),
            CliError::Usage(m) => write!(f, "{m}"),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e)
    }
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Io(_) => 5,
            CliError::Core(e) => match e {
                Error::Parse(_) => 2,
                Error::Eval(_)
                | Error::SingularTransform { .. }
                | Error::NonFiniteState { .. }
                | Error::NoSteps(_) => 3,
                Error::TooFewSamples { .. }
                | Error::NonMonotoneX { .. }
                | Error::FitWindowTooSmall { .. }
                | Error::XStarNotBeyondData { .. }
                | Error::NonPositiveExponent { .. } => 4,
                Error::InvalidProblem(_)
                | Error::InvalidConfig(_)
                | Error::UnknownProblem(_)
                | Error::BadParameter(_)
                | Error::NotApplicable(_) => 1,
            },
        }
    }
}

pub type CliResult<T> = Result<T, CliError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum MethodArg {
    /// t = y' becomes the independent variable.
    Differential,
    /// xi = integral of g dx becomes the independent variable.
    Nonlocal,
}

impl MethodArg {
    pub fn kind(self) -> TransformKind {
        match self {
            MethodArg::Differential => TransformKind::Differential,
            MethodArg::Nonlocal => TransformKind::NonLocal,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum GKindArg {
    /// g = (1+|f|^s)^(1/s), resp. (1+|t|^s+|f|^s)^(1/s); s from --g-s.
    ArcLength,
    FOverY,
    FOverT,
    TOverY,
    /// g from --g-expr.
    Custom,
}

/// Problem selection: a built-in id or an inline expression problem.
#[derive(Debug, Args)]
pub struct ProblemArgs {
    /// Built-in problem: ex1, ex2-form, ex3, ex4-form.
    #[arg(long, conflicts_with_all = ["rhs", "order", "x0", "y0", "y1"])]
    pub problem: Option<String>,

    /// Scale parameter of the built-in problems (y(0) = a).
    #[arg(long, default_value_t = 1.0)]
    pub a: f64,

    /// Inline right-hand side over x, y (order 1) or x, y, t (order 2).
    #[arg(long, requires = "order", requires = "x0", requires = "y0")]
    pub rhs: Option<String>,

    /// Order of the inline problem (1 or 2).
    #[arg(long)]
    pub order: Option<u8>,

    #[arg(long)]
    pub x0: Option<f64>,

    #[arg(long)]
    pub y0: Option<f64>,

    /// Initial derivative y'(x0); required for order 2.
    #[arg(long)]
    pub y1: Option<f64>,
}

/// A resolved problem: the Cauchy data plus, for built-ins, the exact
/// solutions used as error references.
pub struct BuiltProblem {
    pub problem: CauchyProblem,
    pub builtin: Option<TestProblem>,
}

impl ProblemArgs {
    pub fn build(&self) -> CliResult<BuiltProblem> {
        if let Some(id_str) = &self.problem {
            let id: ProblemId = id_str.parse().map_err(CliError::Core)?;
            let test = get_problem(id, self.a)?;
            return Ok(BuiltProblem {
                problem: test.problem().clone(),
                builtin: Some(test),
            });
        }
        let rhs = self
            .rhs
            .as_deref()
            .ok_or_else(|| CliError::Usage("either --problem or --rhs must be given".into()))?;
        let f = parse(rhs).map_err(|e| CliError::Core(e.into()))?;
        let x0 = self
            .x0
            .ok_or_else(|| CliError::Usage("--x0 is required with --rhs".into()))?;
        let y0 = self
            .y0
            .ok_or_else(|| CliError::Usage("--y0 is required with --rhs".into()))?;
        let problem = match self.order {
            Some(1) => CauchyProblem::first_order(f, x0, y0)?,
            Some(2) => {
                let y1 = self.y1.ok_or_else(|| {
                    CliError::Usage("--y1 is required for an order-2 problem".into())
                })?;
                CauchyProblem::second_order(f, x0, y0, y1)?
            }
            Some(n) => return Err(CliError::Usage(format!("--order must be 1 or 2, got {n}"))),
            None => return Err(CliError::Usage("--order is required with --rhs".into())),
        };
        Ok(BuiltProblem {
            problem,
            builtin: None,
        })
    }
}

/// Method and g-choice selection.
#[derive(Debug, Args)]
pub struct MethodArgs {
    /// Transformation to apply; defaults to the built-in problem's own
    /// formulation (ex1/ex3: differential, ex2-form/ex4-form: nonlocal).
    #[arg(long, value_enum)]
    pub method: Option<MethodArg>,

    /// Regularizing function for the non-local method; defaults to the
    /// built-in problem's worked choice, else f-over-y (order 1) or
    /// t-over-y (order 2).
    #[arg(long, value_enum)]
    pub g: Option<GKindArg>,

    /// Exponent s for --g arc-length.
    #[arg(long, default_value_t = 2.0)]
    pub g_s: f64,

    /// Expression for --g custom.
    #[arg(long)]
    pub g_expr: Option<String>,
}

impl MethodArgs {
    pub fn resolve_method(&self, built: &BuiltProblem) -> CliResult<MethodArg> {
        if let Some(m) = self.method {
            return Ok(m);
        }
        if let Some(test) = &built.builtin {
            return Ok(match test.default_transform() {
                TransformKind::Differential => MethodArg::Differential,
                TransformKind::NonLocal => MethodArg::Nonlocal,
            });
        }
        Err(CliError::Usage(
            "--method is required for inline problems".into(),
        ))
    }

    pub fn resolve_g(&self, built: &BuiltProblem) -> CliResult<GChoice> {
        self.g_choice_from(self.g, built)
    }

    pub fn g_choice_from(
        &self,
        kind: Option<GKindArg>,
        built: &BuiltProblem,
    ) -> CliResult<GChoice> {
        if let Some(kind) = kind {
            return Ok(match kind {
                GKindArg::ArcLength => GChoice::ArcLength { s: self.g_s },
                GKindArg::FOverY => GChoice::FOverY,
                GKindArg::FOverT => GChoice::FOverT,
                GKindArg::TOverY => GChoice::TOverY,
                GKindArg::Custom => {
                    let src = self
                        .g_expr
                        .as_deref()
                        .ok_or_else(|| CliError::Usage("--g custom requires --g-expr".into()))?;
                    GChoice::Custom(parse(src).map_err(|e| CliError::Core(e.into()))?)
                }
            });
        }
        if let Some(test) = &built.builtin {
            if let Some(g) = test.g_choice() {
                return Ok(g.clone());
            }
        }
        Ok(match built.problem.order() {
            Order::One => GChoice::FOverY,
            Order::Two => GChoice::TOverY,
        })
    }
}

pub fn build_transform(
    built: &BuiltProblem,
    method: MethodArg,
    g: GChoice,
) -> CliResult<TransformedSystem> {
    let p = &built.problem;
    let sys = match (method, p.order()) {
        (MethodArg::Differential, Order::One) => differential_transform_1(p)?,
        (MethodArg::Differential, Order::Two) => differential_transform_2(p)?,
        (MethodArg::Nonlocal, Order::One) => nonlocal_transform_1(p, g)?,
        (MethodArg::Nonlocal, Order::Two) => nonlocal_transform_2(p, g)?,
    };
    Ok(sys)
}

/// Stopping configuration shared by the commands.
#[derive(Debug, Args)]
pub struct StopArgs {
    /// Fixed RK4 step size.
    #[arg(long, default_value_t = 0.2)]
    pub h: f64,

    /// Upper bound on the parameter t (differential method).
    #[arg(long, conflicts_with = "xi_max")]
    pub t_max: Option<f64>,

    /// Upper bound on the parameter xi (non-local method).
    #[arg(long)]
    pub xi_max: Option<f64>,

    /// Step budget.
    #[arg(long, default_value_t = 10_000_000)]
    pub max_steps: usize,

    /// Stop once |x'| falls below this threshold (0 disables).
    #[arg(long, default_value_t = 1e-8)]
    pub eps_stop: f64,
}

impl StopArgs {
    pub fn stop_rule(&self) -> StopRule {
        let mut rule = StopRule::default()
            .with_max_steps(self.max_steps)
            .with_derivative_decay(self.eps_stop);
        if let Some(bound) = self.t_max.or(self.xi_max) {
            rule = rule.with_max_param(bound);
        }
        rule
    }
}
