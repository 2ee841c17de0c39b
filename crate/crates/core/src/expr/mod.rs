//! Scalar expressions over the variables `x`, `y`, `t`.
//!
//! The grammar is deliberately small: real constants, the three variables,
//! unary `-`, `abs`, `sqrt`, `exp`, `ln`, `sign`, and the binary operators
//! `+ - * / ^` with the usual precedence (`^` binds tightest and is
//! right-associative, unary minus sits between `^` and `*`). This covers
//! every right-hand side and regularizing function the transforms need,
//! e.g. `y^2`, `2*y^3`, `(1+abs(y^2)^2)^0.5`, `t/y`.
//!
//! Expressions are immutable trees; evaluation and differentiation never
//! mutate, so values can be shared freely across threads.
//!
//! Differentiation conventions: `d|u| = sign(u)·du` with `sign(0) = 0`, and
//! `d sign(u) = 0` everywhere (the jump at the origin is ignored). `sign` is
//! part of the grammar precisely so that derivatives of `abs` print and
//! re-parse losslessly.

mod display;
mod parser;

pub use parser::{parse, ParseError};

use thiserror::Error;

/// The variables an [`Expression`] may reference. `T` doubles as `y'` in
/// second-order right-hand sides.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Var {
    X,
    Y,
    T,
}

impl Var {
    pub fn name(self) -> &'static str {
        match self {
            Var::X => "x",
            Var::Y => "y",
            Var::T => "t",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnaryOp {
    Neg,
    Abs,
    Sqrt,
    Exp,
    Ln,
    Sign,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinaryOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// An immutable expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expression {
    Constant(f64),
    Variable(Var),
    Unary(UnaryOp, Box<Expression>),
    Binary(BinaryOp, Box<Expression>, Box<Expression>),
}

/// Values bound to the variables for evaluation. Unbound variables are
/// reported as errors rather than defaulted.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Binding {
    pub x: Option<f64>,
    pub y: Option<f64>,
    pub t: Option<f64>,
}

impl Binding {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn xy(x: f64, y: f64) -> Self {
        Binding {
            x: Some(x),
            y: Some(y),
            t: None,
        }
    }

    pub fn xyt(x: f64, y: f64, t: f64) -> Self {
        Binding {
            x: Some(x),
            y: Some(y),
            t: Some(t),
        }
    }

    pub fn with(mut self, v: Var, value: f64) -> Self {
        match v {
            Var::X => self.x = Some(value),
            Var::Y => self.y = Some(value),
            Var::T => self.t = Some(value),
        }
        self
    }

    pub fn get(&self, v: Var) -> Option<f64> {
        match v {
            Var::X => self.x,
            Var::Y => self.y,
            Var::T => self.t,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EvalError {
    #[error("unbound variable {}", .0.name())]
    UnboundVariable(Var),
    #[error("division by zero")]
    DivisionByZero,
    #[error("domain error: {op} of {arg}")]
    Domain { op: &'static str, arg: f64 },
    #[error("expression evaluated to a non-finite value")]
    NonFinite,
}

impl Expression {
    pub fn constant(c: f64) -> Self {
        Expression::Constant(c)
    }

    pub fn variable(v: Var) -> Self {
        Expression::Variable(v)
    }

    fn is_const(&self, c: f64) -> bool {
        matches!(self, Expression::Constant(v) if *v == c)
    }

    /// Power with light simplification: `u^1 → u`, `u^0 → 1`, `1^u → 1`,
    /// constants fold.
    pub fn pow(a: Expression, b: Expression) -> Expression {
        if b.is_const(1.0) {
            return a;
        }
        if b.is_const(0.0) || a.is_const(1.0) {
            return Expression::Constant(1.0);
        }
        if let (Expression::Constant(p), Expression::Constant(q)) = (&a, &b) {
            let v = p.powf(*q);
            if v.is_finite() {
                return Expression::Constant(v);
            }
        }
        Expression::Binary(BinaryOp::Pow, Box::new(a), Box::new(b))
    }

    pub fn abs(a: Expression) -> Expression {
        Expression::Unary(UnaryOp::Abs, Box::new(a))
    }

    pub fn sqrt(a: Expression) -> Expression {
        Expression::Unary(UnaryOp::Sqrt, Box::new(a))
    }

    pub fn exp(a: Expression) -> Expression {
        Expression::Unary(UnaryOp::Exp, Box::new(a))
    }

    pub fn ln(a: Expression) -> Expression {
        Expression::Unary(UnaryOp::Ln, Box::new(a))
    }

    pub fn sign(a: Expression) -> Expression {
        Expression::Unary(UnaryOp::Sign, Box::new(a))
    }

    /// Whether the tree references `v` anywhere.
    pub fn depends_on(&self, v: Var) -> bool {
        match self {
            Expression::Constant(_) => false,
            Expression::Variable(w) => *w == v,
            Expression::Unary(_, e) => e.depends_on(v),
            Expression::Binary(_, a, b) => a.depends_on(v) || b.depends_on(v),
        }
    }

    /// Evaluate at the given binding. Domain violations (division by zero,
    /// `ln`/`sqrt` outside their domain, negative base with fractional
    /// exponent) and non-finite results are errors, never silent NaN/inf.
    pub fn eval(&self, binding: &Binding) -> std::result::Result<f64, EvalError> {
        let v = match self {
            Expression::Constant(c) => *c,
            Expression::Variable(var) => {
                binding.get(*var).ok_or(EvalError::UnboundVariable(*var))?
            }
            Expression::Unary(op, e) => {
                let u = e.eval(binding)?;
                match op {
                    UnaryOp::Neg => -u,
                    UnaryOp::Abs => u.abs(),
                    UnaryOp::Sqrt => {
                        if u < 0.0 {
                            return Err(EvalError::Domain { op: "sqrt", arg: u });
                        }
                        u.sqrt()
                    }
                    UnaryOp::Exp => u.exp(),
                    UnaryOp::Ln => {
                        if u <= 0.0 {
                            return Err(EvalError::Domain { op: "ln", arg: u });
                        }
                        u.ln()
                    }
                    UnaryOp::Sign => {
                        if u == 0.0 {
                            0.0
                        } else {
                            u.signum()
                        }
                    }
                }
            }
            Expression::Binary(op, l, r) => {
                let a = l.eval(binding)?;
                let b = r.eval(binding)?;
                match op {
                    BinaryOp::Add => a + b,
                    BinaryOp::Sub => a - b,
                    BinaryOp::Mul => a * b,
                    BinaryOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinaryOp::Pow => {
                        if a < 0.0 && b.fract() != 0.0 {
                            return Err(EvalError::Domain {
                                op: "fractional power of negative base",
                                arg: a,
                            });
                        }
                        a.powf(b)
                    }
                }
            }
        };
        if v.is_finite() {
            Ok(v)
        } else {
            Err(EvalError::NonFinite)
        }
    }

    /// Exact symbolic partial derivative with respect to `v`.
    ///
    /// The result is simplified lightly (`0·u`, `1·u`, `u+0`, `u^1` collapse
    /// and constant subtrees fold), not canonically. `d|u| = sign(u)·du` with
    /// `sign(0) = 0`; `d sign(u) = 0`.
    pub fn differentiate(&self, v: Var) -> Expression {
        match self {
            Expression::Constant(_) => Expression::Constant(0.0),
            Expression::Variable(w) => Expression::Constant(if *w == v { 1.0 } else { 0.0 }),
            Expression::Unary(op, e) => {
                let du = e.differentiate(v);
                let u = (**e).clone();
                match op {
                    UnaryOp::Neg => -du,
                    UnaryOp::Abs => Expression::sign(u) * du,
                    UnaryOp::Sign => Expression::Constant(0.0),
                    UnaryOp::Sqrt => du / (Expression::Constant(2.0) * Expression::sqrt(u)),
                    UnaryOp::Exp => Expression::exp(u) * du,
                    UnaryOp::Ln => du / u,
                }
            }
            Expression::Binary(op, l, r) => {
                let dl = l.differentiate(v);
                let dr = r.differentiate(v);
                let a = (**l).clone();
                let b = (**r).clone();
                match op {
                    BinaryOp::Add => dl + dr,
                    BinaryOp::Sub => dl - dr,
                    BinaryOp::Mul => dl * b + a * dr,
                    BinaryOp::Div => {
                        (dl * b.clone() - a * dr) / Expression::pow(b, Expression::Constant(2.0))
                    }
                    BinaryOp::Pow => {
                        if let Expression::Constant(c) = b {
                            // u^c: c * u^(c-1) * u'
                            Expression::Constant(c)
                                * Expression::pow(a, Expression::Constant(c - 1.0))
                                * dl
                        } else {
                            // u^v = exp(v ln u): u^v * (v' ln u + v u' / u)
                            Expression::pow(a.clone(), b.clone())
                                * (dr * Expression::ln(a.clone()) + b * dl / a)
                        }
                    }
                }
            }
        }
    }
}

/// Arithmetic on expressions builds (lightly simplified) trees: `0 + u`,
/// `u + 0`, `0·u`, `1·u`, `u - 0`, `u/1` collapse, constant operands fold,
/// and `c·(d·u)` folds to `(c·d)·u` so derivative chains like `2·(3·y^2)`
/// come out as `6·y^2`.
impl std::ops::Add for Expression {
    type Output = Expression;

    fn add(self, rhs: Expression) -> Expression {
        if self.is_const(0.0) {
            return rhs;
        }
        if rhs.is_const(0.0) {
            return self;
        }
        if let (Expression::Constant(p), Expression::Constant(q)) = (&self, &rhs) {
            let v = p + q;
            if v.is_finite() {
                return Expression::Constant(v);
            }
        }
        Expression::Binary(BinaryOp::Add, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Sub for Expression {
    type Output = Expression;

    fn sub(self, rhs: Expression) -> Expression {
        if rhs.is_const(0.0) {
            return self;
        }
        if self.is_const(0.0) {
            return -rhs;
        }
        if let (Expression::Constant(p), Expression::Constant(q)) = (&self, &rhs) {
            let v = p - q;
            if v.is_finite() {
                return Expression::Constant(v);
            }
        }
        Expression::Binary(BinaryOp::Sub, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Mul for Expression {
    type Output = Expression;

    fn mul(self, rhs: Expression) -> Expression {
        if self.is_const(0.0) || rhs.is_const(0.0) {
            return Expression::Constant(0.0);
        }
        if self.is_const(1.0) {
            return rhs;
        }
        if rhs.is_const(1.0) {
            return self;
        }
        if let (Expression::Constant(p), Expression::Constant(q)) = (&self, &rhs) {
            let v = p * q;
            if v.is_finite() {
                return Expression::Constant(v);
            }
        }
        if let Expression::Constant(p) = self {
            if let Expression::Binary(BinaryOp::Mul, first, rest) = &rhs {
                if let Expression::Constant(q) = **first {
                    let v = p * q;
                    if v.is_finite() {
                        return Expression::Constant(v) * (**rest).clone();
                    }
                }
            }
            return Expression::Binary(
                BinaryOp::Mul,
                Box::new(Expression::Constant(p)),
                Box::new(rhs),
            );
        }
        Expression::Binary(BinaryOp::Mul, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Div for Expression {
    type Output = Expression;

    fn div(self, rhs: Expression) -> Expression {
        if rhs.is_const(1.0) {
            return self;
        }
        if self.is_const(0.0) {
            return Expression::Constant(0.0);
        }
        if let (Expression::Constant(p), Expression::Constant(q)) = (&self, &rhs) {
            if *q != 0.0 {
                let v = p / q;
                if v.is_finite() {
                    return Expression::Constant(v);
                }
            }
        }
        Expression::Binary(BinaryOp::Div, Box::new(self), Box::new(rhs))
    }
}

impl std::ops::Neg for Expression {
    type Output = Expression;

    fn neg(self) -> Expression {
        if self.is_const(0.0) {
            return self;
        }
        if let Expression::Constant(c) = self {
            return Expression::Constant(-c);
        }
        Expression::Unary(UnaryOp::Neg, Box::new(self))
    }
}
