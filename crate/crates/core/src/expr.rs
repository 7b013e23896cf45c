//! A deliberately small expression language for test functions of one
//! variable: constants, + - * / ^, exp, log, cosh, unary minus and
//! parentheses. Parsing is recursive descent; evaluation reports domain
//! errors instead of silently producing NaN.

use std::fmt;
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
#[error("parse error at byte {pos}: {msg}")]
pub struct ParseError {
    pub pos: usize,
    pub msg: String,
}

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("log of non-positive value {0}")]
    LogDomain(f64),
    #[error("division by zero")]
    DivByZero,
    #[error("power {base}^{exp} outside the real domain")]
    PowDomain { base: f64, exp: f64 },
    #[error("non-finite result")]
    NonFinite,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum UnaryFn {
    Exp,
    Log,
    Cosh,
}

impl UnaryFn {
    fn name(self) -> &'static str {
        match self {
            UnaryFn::Exp => "exp",
            UnaryFn::Log => "log",
            UnaryFn::Cosh => "cosh",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

/// Parse tree of an expression in one variable.
#[derive(Debug, Clone, PartialEq)]
pub enum ExprAst {
    Const(f64),
    Var,
    Neg(Box<ExprAst>),
    Call(UnaryFn, Box<ExprAst>),
    Bin(BinOp, Box<ExprAst>, Box<ExprAst>),
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
    var_name: Option<String>,
}

impl<'a> Parser<'a> {
    fn err<T>(&self, msg: impl Into<String>) -> Result<T, ParseError> {
        Err(ParseError {
            pos: self.pos,
            msg: msg.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.src.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    // expr := term (('+'|'-') term)*, left associative
    fn expr(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.term()?;
        loop {
            if self.eat(b'+') {
                let rhs = self.term()?;
                node = ExprAst::Bin(BinOp::Add, Box::new(node), Box::new(rhs));
            } else if self.eat(b'-') {
                let rhs = self.term()?;
                node = ExprAst::Bin(BinOp::Sub, Box::new(node), Box::new(rhs));
            } else {
                return Ok(node);
            }
        }
    }

    // term := unary (('*'|'/') unary)*, left associative
    fn term(&mut self) -> Result<ExprAst, ParseError> {
        let mut node = self.unary()?;
        loop {
            if self.eat(b'*') {
                let rhs = self.unary()?;
                node = ExprAst::Bin(BinOp::Mul, Box::new(node), Box::new(rhs));
            } else if self.eat(b'/') {
                let rhs = self.unary()?;
                node = ExprAst::Bin(BinOp::Div, Box::new(node), Box::new(rhs));
            } else {
                return Ok(node);
            }
        }
    }

    // unary := '-' unary | power
    fn unary(&mut self) -> Result<ExprAst, ParseError> {
        if self.eat(b'-') {
            Ok(ExprAst::Neg(Box::new(self.unary()?)))
        } else {
            self.power()
        }
    }

    // power := atom ('^' unary)?, right associative
    fn power(&mut self) -> Result<ExprAst, ParseError> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            Ok(ExprAst::Bin(BinOp::Pow, Box::new(base), Box::new(exp)))
        } else {
            Ok(base)
        }
    }

    fn atom(&mut self) -> Result<ExprAst, ParseError> {
        match self.peek() {
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.err("expected ')'");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => self.ident(),
            Some(c) => self.err(format!("unexpected character '{}'", c as char)),
            None => self.err("unexpected end of input"),
        }
    }

    fn number(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len()
            && (self.src[self.pos].is_ascii_digit() || self.src[self.pos] == b'.')
        {
            self.pos += 1;
        }
        // Optional exponent part.
        if self.pos < self.src.len() && (self.src[self.pos] | 0x20) == b'e' {
            let mark = self.pos;
            self.pos += 1;
            if self.pos < self.src.len() && (self.src[self.pos] == b'+' || self.src[self.pos] == b'-')
            {
                self.pos += 1;
            }
            if self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                while self.pos < self.src.len() && self.src[self.pos].is_ascii_digit() {
                    self.pos += 1;
                }
            } else {
                self.pos = mark;
            }
        }
        let text = std::str::from_utf8(&self.src[start..self.pos]).unwrap();
        match text.parse::<f64>() {
            Ok(v) => Ok(ExprAst::Const(v)),
            Err(_) => {
                self.pos = start;
                self.err(format!("invalid number '{text}'"))
            }
        }
    }

    fn ident(&mut self) -> Result<ExprAst, ParseError> {
        let start = self.pos;
        while self.pos < self.src.len() && self.src[self.pos].is_ascii_alphanumeric() {
            self.pos += 1;
        }
        let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap().to_string();
        let func = match name.as_str() {
            "exp" => Some(UnaryFn::Exp),
            "log" => Some(UnaryFn::Log),
            "cosh" => Some(UnaryFn::Cosh),
            _ => None,
        };
        if let Some(f) = func {
            if !self.eat(b'(') {
                return self.err(format!("expected '(' after {}", name));
            }
            let arg = self.expr()?;
            if !self.eat(b')') {
                return self.err("expected ')'");
            }
            return Ok(ExprAst::Call(f, Box::new(arg)));
        }
        match &self.var_name {
            Some(v) if *v != name => {
                self.pos = start;
                self.err(format!(
                    "expressions take one variable; saw '{v}' and '{name}'"
                ))
            }
            _ => {
                self.var_name = Some(name);
                Ok(ExprAst::Var)
            }
        }
    }
}

/// Parse an expression; returns the AST and the variable name, if any
/// appeared.
pub fn parse_expr(src: &str) -> Result<(ExprAst, Option<String>), ParseError> {
    let mut p = Parser {
        src: src.as_bytes(),
        pos: 0,
        var_name: None,
    };
    let ast = p.expr()?;
    p.skip_ws();
    if p.pos != p.src.len() {
        return p.err("trailing input");
    }
    Ok((ast, p.var_name))
}

/// Evaluate at a point of the variable.
pub fn eval_expr(ast: &ExprAst, x: f64) -> Result<f64, EvalError> {
    let v = eval_inner(ast, x)?;
    if v.is_finite() {
        Ok(v)
    } else {
        Err(EvalError::NonFinite)
    }
}

fn eval_inner(ast: &ExprAst, x: f64) -> Result<f64, EvalError> {
    Ok(match ast {
        ExprAst::Const(c) => *c,
        ExprAst::Var => x,
        ExprAst::Neg(a) => -eval_inner(a, x)?,
        ExprAst::Call(f, a) => {
            let v = eval_inner(a, x)?;
            match f {
                UnaryFn::Exp => v.exp(),
                UnaryFn::Log => {
                    if v <= 0.0 {
                        return Err(EvalError::LogDomain(v));
                    }
                    v.ln()
                }
                UnaryFn::Cosh => v.cosh(),
            }
        }
        ExprAst::Bin(op, a, b) => {
            let l = eval_inner(a, x)?;
            let r = eval_inner(b, x)?;
            match op {
                BinOp::Add => l + r,
                BinOp::Sub => l - r,
                BinOp::Mul => l * r,
                BinOp::Div => {
                    if r == 0.0 {
                        return Err(EvalError::DivByZero);
                    }
                    l / r
                }
                BinOp::Pow => {
                    let v = l.powf(r);
                    if v.is_nan() || (l == 0.0 && r < 0.0) {
                        return Err(EvalError::PowDomain { base: l, exp: r });
                    }
                    v
                }
            }
        }
    })
}

fn precedence(ast: &ExprAst) -> u8 {
    match ast {
        ExprAst::Bin(BinOp::Add | BinOp::Sub, ..) => 1,
        ExprAst::Bin(BinOp::Mul | BinOp::Div, ..) => 2,
        ExprAst::Neg(_) => 3,
        ExprAst::Bin(BinOp::Pow, ..) => 4,
        _ => 5,
    }
}

impl fmt::Display for ExprAst {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fn paren(f: &mut fmt::Formatter<'_>, e: &ExprAst, need: bool) -> fmt::Result {
            if need {
                write!(f, "({e})")
            } else {
                write!(f, "{e}")
            }
        }
        match self {
            ExprAst::Const(c) => write!(f, "{c}"),
            ExprAst::Var => write!(f, "x"),
            ExprAst::Neg(a) => {
                write!(f, "-")?;
                paren(f, a, precedence(a) < 3)
            }
            ExprAst::Call(func, a) => write!(f, "{}({a})", func.name()),
            ExprAst::Bin(op, a, b) => {
                let (sym, p) = match op {
                    BinOp::Add => ("+", 1),
                    BinOp::Sub => ("-", 1),
                    BinOp::Mul => ("*", 2),
                    BinOp::Div => ("/", 2),
                    BinOp::Pow => ("^", 4),
                };
                // Left operand needs parens below our level; right operand
                // also at-equal level for the left-associative ops.
                let (lneed, rneed) = match op {
                    BinOp::Pow => (precedence(a) <= p, precedence(b) < p),
                    _ => (precedence(a) < p, precedence(b) <= p),
                };
                paren(f, a, lneed)?;
                write!(f, "{sym}")?;
                paren(f, b, rneed)
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn eval_src(src: &str, x: f64) -> f64 {
        let (ast, _) = parse_expr(src).unwrap();
        eval_expr(&ast, x).unwrap()
    }

    #[test]
    fn basic_values() {
        assert_eq!(eval_src("2*z^2 - 1", 1.0), 1.0);
        assert_eq!(eval_src("exp(-z)", 0.0), 1.0);
        assert_eq!(eval_src("1/(2*cosh(s)^2)", 0.0), 0.5);
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(eval_src("2+3*4", 0.0), 14.0);
        assert_eq!(eval_src("2*3^2", 0.0), 18.0);
        assert_eq!(eval_src("8-3-2", 0.0), 3.0);
        assert_eq!(eval_src("16/4/2", 0.0), 2.0);
        assert_eq!(eval_src("2^3^2", 0.0), 512.0); // right associative
        assert_eq!(eval_src("-2^2", 0.0), -4.0);
    }

    #[test]
    fn parse_errors_carry_positions() {
        let e = parse_expr("1 + * 2").unwrap_err();
        assert_eq!(e.pos, 4);
        let e = parse_expr("exp 3").unwrap_err();
        assert!(e.msg.contains("expected '('"));
        assert!(parse_expr("z + r").is_err(), "two variables must be rejected");
    }

    #[test]
    fn eval_domain_errors() {
        let (ast, _) = parse_expr("log(z)").unwrap();
        assert_eq!(eval_expr(&ast, -1.0), Err(EvalError::LogDomain(-1.0)));
        let (ast, _) = parse_expr("1/z").unwrap();
        assert_eq!(eval_expr(&ast, 0.0), Err(EvalError::DivByZero));
        let (ast, _) = parse_expr("z^0.5").unwrap();
        assert!(matches!(
            eval_expr(&ast, -2.0),
            Err(EvalError::PowDomain { .. })
        ));
    }

    #[test]
    fn print_then_parse_is_identity_on_ast() {
        for src in [
            "2*z^2 - 1",
            "-(z+1)*exp(-z^2)/3",
            "1/(2*cosh(s)^2)",
            "2^3^2 - -4",
            "log(exp(z)+1.5e-3)",
        ] {
            let (ast, _) = parse_expr(src).unwrap();
            let printed = ast.to_string();
            let (reparsed, _) = parse_expr(&printed).unwrap();
            assert_eq!(ast, reparsed, "src={src} printed={printed}");
            assert_eq!(printed, reparsed.to_string());
        }
    }
}
