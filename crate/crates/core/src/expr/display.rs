//! Precedence-aware printing. `parse(format!("{e}"))` reproduces the tree
//! structurally for every parser-produced expression.

use super::{BinaryOp, Expression, UnaryOp};
use std::fmt;

// precedence levels: + - (1), * / (2), unary - (3), ^ (4), atoms (5)
fn prec(e: &Expression) -> u8 {
    match e {
        Expression::Constant(c) if *c < 0.0 => 3,
        Expression::Constant(_) | Expression::Variable(_) => 5,
        Expression::Unary(UnaryOp::Neg, _) => 3,
        Expression::Unary(_, _) => 5,
        Expression::Binary(BinaryOp::Add | BinaryOp::Sub, _, _) => 1,
        Expression::Binary(BinaryOp::Mul | BinaryOp::Div, _, _) => 2,
        Expression::Binary(BinaryOp::Pow, _, _) => 4,
    }
}

fn write_child(f: &mut fmt::Formatter<'_>, e: &Expression, min_prec: u8) -> fmt::Result {
    if prec(e) < min_prec {
        write!(f, "(")?;
        write!(f, "{e}")?;
        write!(f, ")")
    } else {
        write!(f, "{e}")
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expression::Constant(c) => {
                if *c < 0.0 {
                    write!(f, "-{}", -c)
                } else {
                    write!(f, "{c}")
                }
            }
            Expression::Variable(v) => write!(f, "{}", v.name()),
            Expression::Unary(UnaryOp::Neg, e) => {
                write!(f, "-")?;
                write_child(f, e, 4)
            }
            Expression::Unary(op, e) => {
                let name = match op {
                    UnaryOp::Abs => "abs",
                    UnaryOp::Sqrt => "sqrt",
                    UnaryOp::Exp => "exp",
                    UnaryOp::Ln => "ln",
                    UnaryOp::Sign => "sign",
                    UnaryOp::Neg => unreachable!(),
                };
                write!(f, "{name}({e})")
            }
            Expression::Binary(op, l, r) => match op {
                BinaryOp::Add => {
                    write_child(f, l, 1)?;
                    write!(f, "+")?;
                    write_child(f, r, 2)
                }
                BinaryOp::Sub => {
                    write_child(f, l, 1)?;
                    write!(f, "-")?;
                    write_child(f, r, 2)
                }
                BinaryOp::Mul => {
                    write_child(f, l, 2)?;
                    write!(f, "*")?;
                    write_child(f, r, 3)
                }
                BinaryOp::Div => {
                    write_child(f, l, 2)?;
                    write!(f, "/")?;
                    write_child(f, r, 3)
                }
                BinaryOp::Pow => {
                    write_child(f, l, 5)?;
                    write!(f, "^")?;
                    // the exponent slot accepts a unary (x^-2)
                    write_child(f, r, 3)
                }
            },
        }
    }
}
