//! Construction of singularity-free systems from blow-up Cauchy problems.
//!
//! Two routes, each available for problem orders 1 and 2:
//!
//! * differential transformation — `t = y'` becomes the independent variable:
//!   order 1: `x'_t = 1/(f_x + t f_y)`, `y'_t = t/(f_x + t f_y)`, starting at
//!   `t0 = f(x0, y0)`; order 2: `x'_t = 1/f`, `y'_t = t/f`, starting at
//!   `t0 = y1`.
//! * non-local transformation — `ξ = ∫ g dx` becomes the independent
//!   variable: order 1: `x'_ξ = 1/g`, `y'_ξ = f/g`; order 2 adds
//!   `t'_ξ = f/g` for the derivative component. Both start at `ξ = 0`.
//!
//! The partial derivatives `f_x`, `f_y` are obtained symbolically (finite
//! differences would pollute the integrator's fourth-order convergence); a
//! finite-difference fallback is provided for right-hand sides that exist
//! only as code.
//!
//! Denominators are guarded: `|den| < 1e-14·(1 + |num|)` is reported as a
//! singular-transform error naming the offending point. Under the method's
//! sign assumptions (`f > 0`, `f_x ≥ 0`, `f_y > 0`) the denominators stay
//! positive along genuine blow-up trajectories, so a guard hit signals a
//! problem outside the method's hypotheses.

mod admissibility;

pub use admissibility::{
    check_g_admissibility, AdmissibilityReport, ProbeFailure, ProbeGrid, RatioTrend, Verdict,
};

use crate::error::{Error, Result};
use crate::expr::{Binding, Expression, Var};
use crate::ode::OdeSystem;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Order {
    One,
    Two,
}

/// A Cauchy problem `y' = f(x, y)` (order 1) or `y'' = f(x, y, y')` with
/// `t ≡ y'` (order 2), posed at `x0` with initial values `y0` (and `y1`).
///
/// Exact-solution oracles for the built-in corpus live in
/// [`crate::problems::TestProblem`], which wraps this type.
#[derive(Debug, Clone, PartialEq)]
pub struct CauchyProblem {
    order: Order,
    f: Expression,
    x0: f64,
    y0: f64,
    y1: Option<f64>,
}

impl CauchyProblem {
    /// First-order problem `y' = f(x, y)`, `y(x0) = y0`. Enforces the
    /// method's standing assumptions `x0 ≥ 0`, `y0 > 0` and rejects
    /// right-hand sides that mention `t`.
    pub fn first_order(f: Expression, x0: f64, y0: f64) -> Result<Self> {
        if f.depends_on(Var::T) {
            return Err(Error::InvalidProblem(
                "first-order right-hand side must not depend on t".into(),
            ));
        }
        if !x0.is_finite() || x0 < 0.0 {
            return Err(Error::InvalidProblem(format!(
                "x0 = {x0} must be finite and >= 0"
            )));
        }
        if !y0.is_finite() || y0 <= 0.0 {
            return Err(Error::InvalidProblem(format!(
                "y0 = {y0} must be finite and > 0"
            )));
        }
        Ok(CauchyProblem {
            order: Order::One,
            f,
            x0,
            y0,
            y1: None,
        })
    }

    /// Second-order problem `y'' = f(x, y, y')`, `y(x0) = y0`, `y'(x0) = y1`.
    pub fn second_order(f: Expression, x0: f64, y0: f64, y1: f64) -> Result<Self> {
        if !x0.is_finite() || !y0.is_finite() || !y1.is_finite() {
            return Err(Error::InvalidProblem("initial data must be finite".into()));
        }
        Ok(CauchyProblem {
            order: Order::Two,
            f,
            x0,
            y0,
            y1: Some(y1),
        })
    }

    pub fn order(&self) -> Order {
        self.order
    }

    pub fn f(&self) -> &Expression {
        &self.f
    }

    pub fn x0(&self) -> f64 {
        self.x0
    }

    pub fn y0(&self) -> f64 {
        self.y0
    }

    pub fn y1(&self) -> Option<f64> {
        self.y1
    }
}

/// Choice of the regularizing function `g` for the non-local transformation.
#[derive(Debug, Clone, PartialEq)]
pub enum GChoice {
    /// `g = (1 + |f|^s)^{1/s}` (order 1) or `g = (1 + |t|^s + |f|^s)^{1/s}`
    /// (order 2); `s = 2` is the arc-length transformation.
    ArcLength { s: f64 },
    /// `g = f/y`.
    FOverY,
    /// `g = f/t` (order 2 only).
    FOverT,
    /// `g = t/y` (order 2 only).
    TOverY,
    /// User-supplied `g` over the variables admissible for the order.
    Custom(Expression),
}

impl GChoice {
    /// The arc-length transformation, `s = 2`.
    pub fn arc_length() -> Self {
        GChoice::ArcLength { s: 2.0 }
    }

    pub fn validate(&self, order: Order) -> Result<()> {
        match self {
            GChoice::ArcLength { s } => {
                if !(*s > 0.0) || !s.is_finite() {
                    return Err(Error::InvalidConfig(format!(
                        "arc-length exponent s = {s} must be positive and finite"
                    )));
                }
            }
            GChoice::FOverT | GChoice::TOverY => {
                if order != Order::Two {
                    return Err(Error::InvalidConfig(
                        "g-choices involving t require a second-order problem".into(),
                    ));
                }
            }
            GChoice::Custom(e) => {
                if order == Order::One && e.depends_on(Var::T) {
                    return Err(Error::InvalidConfig(
                        "custom g for a first-order problem must not depend on t".into(),
                    ));
                }
            }
            GChoice::FOverY => {}
        }
        Ok(())
    }

    /// Build `g` as an expression, given the problem's right-hand side.
    pub fn expression(&self, order: Order, f: &Expression) -> Result<Expression> {
        self.validate(order)?;
        let one = || Expression::Constant(1.0);
        Ok(match self {
            GChoice::ArcLength { s } => {
                let fs = Expression::pow(Expression::abs(f.clone()), Expression::Constant(*s));
                let sum = match order {
                    Order::One => one() + fs,
                    Order::Two => {
                        one()
                            + Expression::pow(
                                Expression::abs(Expression::variable(Var::T)),
                                Expression::Constant(*s),
                            )
                            + fs
                    }
                };
                Expression::pow(sum, Expression::Constant(1.0 / s))
            }
            GChoice::FOverY => f.clone() / Expression::variable(Var::Y),
            GChoice::FOverT => f.clone() / Expression::variable(Var::T),
            GChoice::TOverY => Expression::variable(Var::T) / Expression::variable(Var::Y),
            GChoice::Custom(e) => e.clone(),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Differential,
    NonLocal,
}

/// A singularity-free system produced by one of the transforms, together
/// with the back-map describing which state components are which.
///
/// State layout: component 0 is `x`, component 1 is `y`, and for
/// three-dimensional systems component 2 is `t = y'`. For differential
/// transforms the integration parameter itself is `t`.
#[derive(Debug)]
pub struct TransformedSystem {
    system: OdeSystem,
    kind: TransformKind,
    param_name: &'static str,
}

impl TransformedSystem {
    pub fn system(&self) -> &OdeSystem {
        &self.system
    }

    pub fn kind(&self) -> TransformKind {
        self.kind
    }

    /// `"t"` for differential transforms, `"xi"` for non-local ones.
    pub fn param_name(&self) -> &'static str {
        self.param_name
    }

    /// Index of the `t = y'` component in the state vector, when present.
    pub fn t_component(&self) -> Option<usize> {
        (self.system.dim() == 3).then_some(2)
    }
}

/// `|den| < 1e-14·(1 + |num|)` counts as singular.
fn guarded_div(num: f64, den: f64, param: f64, x: f64, y: f64, t: Option<f64>) -> Result<f64> {
    if den.abs() < 1e-14 * (1.0 + num.abs()) {
        Err(Error::SingularTransform {
            param,
            x,
            y,
            t,
            denominator: den,
        })
    } else {
        Ok(num / den)
    }
}

/// Differential transformation of a first-order problem:
/// `x'_t = 1/(f_x + t f_y)`, `y'_t = t/(f_x + t f_y)` with
/// `x(t0) = x0`, `y(t0) = y0`, `t0 = f(x0, y0)`.
pub fn differential_transform_1(p: &CauchyProblem) -> Result<TransformedSystem> {
    if p.order() != Order::One {
        return Err(Error::InvalidProblem(
            "differential_transform_1 requires a first-order problem".into(),
        ));
    }
    let f = p.f().clone();
    let fx = f.differentiate(Var::X);
    let fy = f.differentiate(Var::Y);
    let t0 = f.eval(&Binding::xy(p.x0(), p.y0()))?;

    let rhs = move |t: f64, u: &[f64], out: &mut [f64]| -> Result<()> {
        let b = Binding::xy(u[0], u[1]);
        let fxv = fx.eval(&b)?;
        let fyv = fy.eval(&b)?;
        let den = fxv + t * fyv;
        out[0] = guarded_div(1.0, den, t, u[0], u[1], None)?;
        out[1] = guarded_div(t, den, t, u[0], u[1], None)?;
        Ok(())
    };

    Ok(TransformedSystem {
        system: OdeSystem::new(
            vec!["x".into(), "y".into()],
            t0,
            vec![p.x0(), p.y0()],
            Box::new(rhs),
        )?,
        kind: TransformKind::Differential,
        param_name: "t",
    })
}

/// Differential transformation of a first-order problem whose right-hand
/// side exists only as code. The partial derivatives are approximated by
/// central finite differences; prefer [`differential_transform_1`] whenever
/// a symbolic `f` is available.
pub fn differential_transform_1_fd<F>(rhs_f: F, x0: f64, y0: f64) -> Result<TransformedSystem>
where
    F: Fn(f64, f64) -> Result<f64> + Send + Sync + 'static,
{
    if !x0.is_finite() || x0 < 0.0 || !y0.is_finite() || y0 <= 0.0 {
        return Err(Error::InvalidProblem(
            "require finite x0 >= 0 and y0 > 0".into(),
        ));
    }
    let t0 = rhs_f(x0, y0)?;

    let rhs = move |t: f64, u: &[f64], out: &mut [f64]| -> Result<()> {
        let (x, y) = (u[0], u[1]);
        let hx = f64::EPSILON.cbrt() * (1.0 + x.abs());
        let hy = f64::EPSILON.cbrt() * (1.0 + y.abs());
        let fxv = (rhs_f(x + hx, y)? - rhs_f(x - hx, y)?) / (2.0 * hx);
        let fyv = (rhs_f(x, y + hy)? - rhs_f(x, y - hy)?) / (2.0 * hy);
        let den = fxv + t * fyv;
        out[0] = guarded_div(1.0, den, t, x, y, None)?;
        out[1] = guarded_div(t, den, t, x, y, None)?;
        Ok(())
    };

    Ok(TransformedSystem {
        system: OdeSystem::new(
            vec!["x".into(), "y".into()],
            t0,
            vec![x0, y0],
            Box::new(rhs),
        )?,
        kind: TransformKind::Differential,
        param_name: "t",
    })
}

/// Differential transformation of a second-order problem:
/// `x'_t = 1/f`, `y'_t = t/f` with `x(t0) = x0`, `y(t0) = y0`, `t0 = y1`.
pub fn differential_transform_2(p: &CauchyProblem) -> Result<TransformedSystem> {
    if p.order() != Order::Two {
        return Err(Error::InvalidProblem(
            "differential_transform_2 requires a second-order problem".into(),
        ));
    }
    let f = p.f().clone();
    let t0 = p.y1().expect("second-order problem carries y1");

    let rhs = move |t: f64, u: &[f64], out: &mut [f64]| -> Result<()> {
        let fv = f.eval(&Binding::xyt(u[0], u[1], t))?;
        out[0] = guarded_div(1.0, fv, t, u[0], u[1], None)?;
        out[1] = guarded_div(t, fv, t, u[0], u[1], None)?;
        Ok(())
    };

    Ok(TransformedSystem {
        system: OdeSystem::new(
            vec!["x".into(), "y".into()],
            t0,
            vec![p.x0(), p.y0()],
            Box::new(rhs),
        )?,
        kind: TransformKind::Differential,
        param_name: "t",
    })
}

/// Non-local transformation of a first-order problem:
/// `x'_ξ = 1/g`, `y'_ξ = f/g` with `x(0) = x0`, `y(0) = y0`.
pub fn nonlocal_transform_1(p: &CauchyProblem, g: GChoice) -> Result<TransformedSystem> {
    if p.order() != Order::One {
        return Err(Error::InvalidProblem(
            "nonlocal_transform_1 requires a first-order problem".into(),
        ));
    }
    let f = p.f().clone();
    let g_expr = g.expression(Order::One, &f)?;

    let rhs = move |xi: f64, u: &[f64], out: &mut [f64]| -> Result<()> {
        let b = Binding::xy(u[0], u[1]);
        let gv = g_expr.eval(&b)?;
        let fv = f.eval(&b)?;
        out[0] = guarded_div(1.0, gv, xi, u[0], u[1], None)?;
        out[1] = guarded_div(fv, gv, xi, u[0], u[1], None)?;
        Ok(())
    };

    Ok(TransformedSystem {
        system: OdeSystem::new(
            vec!["x".into(), "y".into()],
            0.0,
            vec![p.x0(), p.y0()],
            Box::new(rhs),
        )?,
        kind: TransformKind::NonLocal,
        param_name: "xi",
    })
}

/// Non-local transformation of a second-order problem:
/// `x'_ξ = 1/g`, `y'_ξ = t/g`, `t'_ξ = f/g` with
/// `x(0) = x0`, `y(0) = y0`, `t(0) = y1`.
pub fn nonlocal_transform_2(p: &CauchyProblem, g: GChoice) -> Result<TransformedSystem> {
    if p.order() != Order::Two {
        return Err(Error::InvalidProblem(
            "nonlocal_transform_2 requires a second-order problem".into(),
        ));
    }
    let f = p.f().clone();
    let g_expr = g.expression(Order::Two, &f)?;

    let rhs = move |xi: f64, u: &[f64], out: &mut [f64]| -> Result<()> {
        let b = Binding::xyt(u[0], u[1], u[2]);
        let gv = g_expr.eval(&b)?;
        let fv = f.eval(&b)?;
        out[0] = guarded_div(1.0, gv, xi, u[0], u[1], Some(u[2]))?;
        out[1] = guarded_div(u[2], gv, xi, u[0], u[1], Some(u[2]))?;
        out[2] = guarded_div(fv, gv, xi, u[0], u[1], Some(u[2]))?;
        Ok(())
    };

    Ok(TransformedSystem {
        system: OdeSystem::new(
            vec!["x".into(), "y".into(), "t".into()],
            0.0,
            vec![
                p.x0(),
                p.y0(),
                p.y1().expect("second-order problem carries y1"),
            ],
            Box::new(rhs),
        )?,
        kind: TransformKind::NonLocal,
        param_name: "xi",
    })
}
