//! Recursive-descent parser for the expression grammar.
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := unary (('*' | '/') unary)*
//! unary  := '-' unary | power
//! power  := atom ('^' unary)?          (right-associative)
//! atom   := number | variable | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! Variables are `x`, `y`, `t`; functions are `abs`, `sqrt`, `exp`, `ln`,
//! `sign`. Numbers are ordinary decimal literals with an optional exponent
//! (`2`, `0.5`, `1e-3`).

use super::{Expression, Var};
use thiserror::Error;

/// Parse failure with a 1-based column position into the source text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at column {column}: expected {expected}")]
pub struct ParseError {
    pub column: usize,
    pub expected: String,
}

impl ParseError {
    fn new(column: usize, expected: impl Into<String>) -> Self {
        ParseError {
            column,
            expected: expected.into(),
        }
    }
}

/// Parse `source` into an [`Expression`].
pub fn parse(source: &str) -> Result<Expression, ParseError> {
    let mut p = Parser {
        chars: source.chars().collect(),
        pos: 0,
    };
    p.skip_ws();
    if p.at_end() {
        return Err(ParseError::new(
            p.column(),
            "an expression, found empty input",
        ));
    }
    let e = p.expr()?;
    p.skip_ws();
    if !p.at_end() {
        return Err(ParseError::new(
            p.column(),
            format!("end of input, found {:?}", p.peek().unwrap()),
        ));
    }
    Ok(e)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn at_end(&self) -> bool {
        self.pos >= self.chars.len()
    }

    fn peek(&self) -> Option<char> {
        self.chars.get(self.pos).copied()
    }

    fn peek_at(&self, offset: usize) -> Option<char> {
        self.chars.get(self.pos + offset).copied()
    }

    fn bump(&mut self) -> Option<char> {
        let c = self.peek();
        if c.is_some() {
            self.pos += 1;
        }
        c
    }

    /// 1-based column of the current position.
    fn column(&self) -> usize {
        self.pos + 1
    }

    fn skip_ws(&mut self) {
        while matches!(self.peek(), Some(c) if c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.term()?;
        loop {
            self.skip_ws();
            if self.eat('+') {
                let rhs = self.term()?;
                lhs = Expression::Binary(super::BinaryOp::Add, Box::new(lhs), Box::new(rhs));
            } else if self.eat('-') {
                let rhs = self.term()?;
                lhs = Expression::Binary(super::BinaryOp::Sub, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expression, ParseError> {
        let mut lhs = self.unary()?;
        loop {
            self.skip_ws();
            if self.eat('*') {
                let rhs = self.unary()?;
                lhs = Expression::Binary(super::BinaryOp::Mul, Box::new(lhs), Box::new(rhs));
            } else if self.eat('/') {
                let rhs = self.unary()?;
                lhs = Expression::Binary(super::BinaryOp::Div, Box::new(lhs), Box::new(rhs));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expression, ParseError> {
        self.skip_ws();
        if self.eat('-') {
            let inner = self.unary()?;
            Ok(Expression::Unary(super::UnaryOp::Neg, Box::new(inner)))
        } else {
            self.power()
        }
    }

    fn power(&mut self) -> Result<Expression, ParseError> {
        let base = self.atom()?;
        self.skip_ws();
        if self.eat('^') {
            // the exponent may carry its own unary minus: x^-2
            let exponent = self.unary()?;
            Ok(Expression::Binary(
                super::BinaryOp::Pow,
                Box::new(base),
                Box::new(exponent),
            ))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<Expression, ParseError> {
        self.skip_ws();
        match self.peek() {
            None => Err(ParseError::new(
                self.column(),
                "a number, variable, function or '('",
            )),
            Some('(') => {
                self.bump();
                let e = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(ParseError::new(self.column(), "')'"));
                }
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.identifier(),
            Some(c) => Err(ParseError::new(
                self.column(),
                format!("a number, variable, function or '(', found {c:?}"),
            )),
        }
    }

    fn number(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
            self.bump();
        }
        if self.eat('.') {
            if !matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                return Err(ParseError::new(self.column(), "a digit after '.'"));
            }
            while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                self.bump();
            }
        }
        // exponent part only when 'e'/'E' is really followed by a digit,
        // so "2e3" is a number while "2exp(x)" stays a parse error at 'e'
        if matches!(self.peek(), Some('e' | 'E')) {
            let after_sign = matches!(self.peek_at(1), Some('+' | '-'));
            let digit_pos = if after_sign { 2 } else { 1 };
            if matches!(self.peek_at(digit_pos), Some(c) if c.is_ascii_digit()) {
                self.bump();
                if after_sign {
                    self.bump();
                }
                while matches!(self.peek(), Some(c) if c.is_ascii_digit()) {
                    self.bump();
                }
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        match text.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Expression::Constant(v)),
            _ => Err(ParseError::new(
                start + 1,
                format!("a valid number, found {text:?}"),
            )),
        }
    }

    fn identifier(&mut self) -> Result<Expression, ParseError> {
        let start = self.pos;
        while matches!(self.peek(), Some(c) if c.is_ascii_alphanumeric() || c == '_') {
            self.bump();
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        match name.as_str() {
            "x" => Ok(Expression::Variable(Var::X)),
            "y" => Ok(Expression::Variable(Var::Y)),
            "t" => Ok(Expression::Variable(Var::T)),
            "abs" | "sqrt" | "exp" | "ln" | "sign" => {
                self.skip_ws();
                if !self.eat('(') {
                    return Err(ParseError::new(
                        self.column(),
                        format!("'(' after {name:?}"),
                    ));
                }
                let arg = self.expr()?;
                self.skip_ws();
                if !self.eat(')') {
                    return Err(ParseError::new(self.column(), "')'"));
                }
                let op = match name.as_str() {
                    "abs" => super::UnaryOp::Abs,
                    "sqrt" => super::UnaryOp::Sqrt,
                    "exp" => super::UnaryOp::Exp,
                    "ln" => super::UnaryOp::Ln,
                    _ => super::UnaryOp::Sign,
                };
                Ok(Expression::Unary(op, Box::new(arg)))
            }
            _ => Err(ParseError::new(
                start + 1,
                format!("one of x, y, t, abs, sqrt, exp, ln, sign; found {name:?}"),
            )),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{BinaryOp, Expression, UnaryOp, Var};
    use super::*;

    fn var(v: Var) -> Expression {
        Expression::Variable(v)
    }

    fn c(v: f64) -> Expression {
        Expression::Constant(v)
    }

    fn bin(op: BinaryOp, a: Expression, b: Expression) -> Expression {
        Expression::Binary(op, Box::new(a), Box::new(b))
    }

    #[test]
    fn single_operator_tree() {
        assert_eq!(
            parse("y^2").unwrap(),
            bin(BinaryOp::Pow, var(Var::Y), c(2.0))
        );
    }

    #[test]
    fn whitespace_is_insignificant() {
        assert_eq!(parse("  y ^ 2 ").unwrap(), parse("y^2").unwrap());
        assert_eq!(parse("2 * y ^ 3").unwrap(), parse("2*y^3").unwrap());
        assert_eq!(parse("abs ( t )").unwrap(), parse("abs(t)").unwrap());
    }

    #[test]
    fn example_three_rhs() {
        // hand parse: product(const 2, power(var y, 3))
        assert_eq!(
            parse("2*y^3").unwrap(),
            bin(
                BinaryOp::Mul,
                c(2.0),
                bin(BinaryOp::Pow, var(Var::Y), c(3.0))
            )
        );
    }

    #[test]
    fn malformed_power_reports_column() {
        let err = parse("y^^2").unwrap_err();
        assert_eq!(err.column, 3);
    }

    #[test]
    fn error_positions_inside_source() {
        for src in ["", "y+", "(y", "2*", "y^", "foo", "1..2", "y y"] {
            let err = parse(src).unwrap_err();
            assert!(
                err.column >= 1 && err.column <= src.chars().count() + 1,
                "{src:?} -> column {}",
                err.column
            );
        }
    }

    #[test]
    fn unknown_identifier() {
        let err = parse("2*w").unwrap_err();
        assert_eq!(err.column, 3);
        assert!(err.expected.contains("\"w\""));
    }

    #[test]
    fn trailing_tokens() {
        let err = parse("y^2)").unwrap_err();
        assert_eq!(err.column, 4);
    }

    #[test]
    fn precedence_and_associativity() {
        // power > unary minus: -x^2 = -(x^2)
        assert_eq!(
            parse("-x^2").unwrap(),
            Expression::Unary(
                UnaryOp::Neg,
                Box::new(bin(BinaryOp::Pow, var(Var::X), c(2.0)))
            )
        );
        // power right-associative
        assert_eq!(
            parse("x^2^3").unwrap(),
            bin(
                BinaryOp::Pow,
                var(Var::X),
                bin(BinaryOp::Pow, c(2.0), c(3.0))
            )
        );
        // negative exponent
        assert_eq!(
            parse("x^-2").unwrap(),
            bin(
                BinaryOp::Pow,
                var(Var::X),
                Expression::Unary(UnaryOp::Neg, Box::new(c(2.0)))
            )
        );
        // subtraction left-associative
        assert_eq!(
            parse("x-y-t").unwrap(),
            bin(
                BinaryOp::Sub,
                bin(BinaryOp::Sub, var(Var::X), var(Var::Y)),
                var(Var::T)
            )
        );
        // unary minus binds looser than ^ but tighter than *
        assert_eq!(
            parse("-x*y").unwrap(),
            bin(
                BinaryOp::Mul,
                Expression::Unary(UnaryOp::Neg, Box::new(var(Var::X))),
                var(Var::Y)
            )
        );
    }

    #[test]
    fn scientific_notation_and_functions() {
        assert_eq!(parse("1e-3").unwrap(), c(1e-3));
        assert_eq!(parse("2.5e2").unwrap(), c(250.0));
        assert!(parse("sqrt(1+y^2)").is_ok());
        assert!(parse("abs(t)").is_ok());
        // 'e' not followed by a digit is not an exponent
        assert!(parse("2exp(x)").is_err());
    }

    #[test]
    fn arc_length_g_shape_parses() {
        assert!(parse("(1+abs(y^2)^2)^0.5").is_ok());
        assert!(parse("(1+abs(t)^2+abs(2*y^3)^2)^0.5").is_ok());
    }
}
