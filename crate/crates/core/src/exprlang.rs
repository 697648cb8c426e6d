//! Scalar expressions in one variable `s`, with free parameters.
//!
//! Grammar, lowest precedence first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := factor (('*' | '/') factor)*
//! factor  := '-' factor | primary ('^' uint)?
//! primary := number | identifier | identifier '(' expr ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `*` and looser than `^`, so `-s^2` is
//! `-(s^2)`. `s` is the variable, `exp sin cos log sqrt` are functions and
//! every other identifier is a parameter bound at evaluation time.

use alloc::borrow::ToOwned;
use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;
use core::fmt;

use crate::error::{Error, Result};
use crate::math;
use crate::series::{Elementary, TaylorJet};

/// Parameter bindings.
pub type Params = BTreeMap<String, f64>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Sin,
    Cos,
    Log,
    Sqrt,
}

impl Func {
    fn from_name(name: &str) -> Option<Self> {
        Some(match name {
            "exp" => Func::Exp,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
        }
    }

    fn elementary(self) -> Elementary {
        match self {
            Func::Exp => Elementary::Exp,
            Func::Sin => Elementary::Sin,
            Func::Cos => Elementary::Cos,
            Func::Log => Elementary::Log,
            Func::Sqrt => Elementary::Sqrt,
        }
    }

    fn apply(self, x: f64) -> Result<f64> {
        match self {
            Func::Exp => Ok(math::exp(x)),
            Func::Sin => Ok(math::sin(x)),
            Func::Cos => Ok(math::cos(x)),
            Func::Log if x > 0.0 => Ok(math::log(x)),
            Func::Sqrt if x >= 0.0 => Ok(math::sqrt(x)),
            Func::Log | Func::Sqrt => Err(Error::Domain { function: self.name(), value: x }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Const(f64),
    Param(String),
    Var,
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Neg(Box<Expr>),
    Pow(Box<Expr>, u32),
    Call(Func, Box<Expr>),
}

/// Parses an expression.
pub fn parse(text: &str) -> Result<Expr> {
    let mut parser = Parser { chars: text.chars().collect(), pos: 0 };
    let expr = parser.expr()?;
    parser.skip_ws();
    if parser.pos < parser.chars.len() {
        return Err(parser.error(format!("unexpected `{}`", parser.chars[parser.pos])));
    }
    Ok(expr)
}

struct Parser {
    chars: Vec<char>,
    pos: usize,
}

impl Parser {
    fn error(&self, message: String) -> Error {
        Error::Parse { position: self.pos, message }
    }

    fn skip_ws(&mut self) {
        while self.chars.get(self.pos).is_some_and(|c| c.is_whitespace()) {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<char> {
        self.skip_ws();
        self.chars.get(self.pos).copied()
    }

    fn eat(&mut self, c: char) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat('+') {
                lhs = Expr::Add(Box::new(lhs), Box::new(self.term()?));
            } else if self.eat('-') {
                lhs = Expr::Sub(Box::new(lhs), Box::new(self.term()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        loop {
            if self.eat('*') {
                lhs = Expr::Mul(Box::new(lhs), Box::new(self.factor()?));
            } else if self.eat('/') {
                lhs = Expr::Div(Box::new(lhs), Box::new(self.factor()?));
            } else {
                return Ok(lhs);
            }
        }
    }

    fn factor(&mut self) -> Result<Expr> {
        if self.eat('-') {
            return Ok(Expr::Neg(Box::new(self.factor()?)));
        }
        let base = self.primary()?;
        if self.eat('^') {
            self.skip_ws();
            let start = self.pos;
            while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_digit()) {
                self.pos += 1;
            }
            if start == self.pos {
                return Err(self.error("expected a non-negative integer exponent".to_owned()));
            }
            let digits: String = self.chars[start..self.pos].iter().collect();
            let k = digits.parse::<u32>().map_err(|_| Error::Parse {
                position: start,
                message: format!("exponent `{digits}` is too large"),
            })?;
            return Ok(Expr::Pow(Box::new(base), k));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.error("unexpected end of input".to_owned())),
            Some('(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(')') {
                    return Err(self.error("expected `)`".to_owned()));
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == '.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == '_' => self.identifier(),
            Some(c) => Err(self.error(format!("unexpected `{c}`"))),
        }
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let digit = |p: &Self, i: usize| p.chars.get(i).is_some_and(|c| c.is_ascii_digit());
        while digit(self, self.pos) {
            self.pos += 1;
        }
        if self.chars.get(self.pos) == Some(&'.') {
            self.pos += 1;
            while digit(self, self.pos) {
                self.pos += 1;
            }
        }
        // exponent only when digits follow, so `2e` stays an error at `e`
        if matches!(self.chars.get(self.pos), Some('e' | 'E')) {
            let mut look = self.pos + 1;
            if matches!(self.chars.get(look), Some('+' | '-')) {
                look += 1;
            }
            if digit(self, look) {
                self.pos = look;
                while digit(self, self.pos) {
                    self.pos += 1;
                }
            }
        }
        let text: String = self.chars[start..self.pos].iter().collect();
        text.parse::<f64>()
            .map(Expr::Const)
            .map_err(|_| Error::Parse { position: start, message: format!("invalid number `{text}`") })
    }

    fn identifier(&mut self) -> Result<Expr> {
        let start = self.pos;
        while self.chars.get(self.pos).is_some_and(|c| c.is_ascii_alphanumeric() || *c == '_') {
            self.pos += 1;
        }
        let name: String = self.chars[start..self.pos].iter().collect();
        if self.eat('(') {
            let Some(func) = Func::from_name(&name) else {
                return Err(Error::Parse { position: start, message: format!("unknown function `{name}`") });
            };
            let arg = self.expr()?;
            if !self.eat(')') {
                return Err(self.error("expected `)`".to_owned()));
            }
            return Ok(Expr::Call(func, Box::new(arg)));
        }
        if Func::from_name(&name).is_some() {
            return Err(Error::Parse {
                position: start,
                message: format!("function name `{name}` cannot be used as a parameter"),
            });
        }
        Ok(if name == "s" { Expr::Var } else { Expr::Param(name) })
    }
}

impl Expr {
    /// Names of all parameters in the expression.
    pub fn parameters(&self) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_params(&mut out);
        out
    }

    fn collect_params(&self, out: &mut BTreeSet<String>) {
        match self {
            Expr::Param(name) => {
                out.insert(name.clone());
            }
            Expr::Const(_) | Expr::Var => {}
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) => {
                a.collect_params(out);
                b.collect_params(out);
            }
            Expr::Neg(a) | Expr::Pow(a, _) | Expr::Call(_, a) => a.collect_params(out),
        }
    }

    fn param(name: &str, params: &Params) -> Result<f64> {
        params.get(name).copied().ok_or_else(|| Error::UnboundParameter(name.to_owned()))
    }

    /// Taylor jet of the expression at `s = 0` with `order` coefficients.
    pub fn eval_jet(&self, order: usize, params: &Params) -> Result<TaylorJet> {
        Ok(match self {
            Expr::Const(c) => TaylorJet::constant(*c, order)?,
            Expr::Param(name) => TaylorJet::constant(Self::param(name, params)?, order)?,
            Expr::Var => TaylorJet::variable(order)?,
            Expr::Add(a, b) => a.eval_jet(order, params)?.add(&b.eval_jet(order, params)?)?,
            Expr::Sub(a, b) => a.eval_jet(order, params)?.sub(&b.eval_jet(order, params)?)?,
            Expr::Mul(a, b) => a.eval_jet(order, params)?.mul(&b.eval_jet(order, params)?)?,
            Expr::Div(a, b) => a.eval_jet(order, params)?.div(&b.eval_jet(order, params)?)?,
            Expr::Neg(a) => a.eval_jet(order, params)?.neg(),
            Expr::Pow(a, k) => a.eval_jet(order, params)?.powi(*k),
            Expr::Call(f, a) => a.eval_jet(order, params)?.elementary(f.elementary())?,
        })
    }

    /// Pointwise value at `s`.
    pub fn eval_point(&self, s: f64, params: &Params) -> Result<f64> {
        let value = self.eval_inner(s, params)?;
        if value.is_finite() {
            Ok(value)
        } else {
            Err(Error::Overflow)
        }
    }

    fn eval_inner(&self, s: f64, params: &Params) -> Result<f64> {
        Ok(match self {
            Expr::Const(c) => *c,
            Expr::Param(name) => Self::param(name, params)?,
            Expr::Var => s,
            Expr::Add(a, b) => a.eval_inner(s, params)? + b.eval_inner(s, params)?,
            Expr::Sub(a, b) => a.eval_inner(s, params)? - b.eval_inner(s, params)?,
            Expr::Mul(a, b) => a.eval_inner(s, params)? * b.eval_inner(s, params)?,
            Expr::Div(a, b) => {
                let den = b.eval_inner(s, params)?;
                if den == 0.0 {
                    return Err(Error::Domain { function: "division", value: den });
                }
                a.eval_inner(s, params)? / den
            }
            Expr::Neg(a) => -a.eval_inner(s, params)?,
            Expr::Pow(a, k) => {
                let base = a.eval_inner(s, params)?;
                (0..*k).fold(1.0, |acc, _| acc * base)
            }
            Expr::Call(f, a) => f.apply(a.eval_inner(s, params)?)?,
        })
    }

    fn is_atomic(&self) -> bool {
        matches!(self, Expr::Const(c) if *c >= 0.0) || matches!(self, Expr::Param(_) | Expr::Var | Expr::Call(..))
    }
}

/// Prints a fully parenthesised form that parses back to the same tree.
impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Const(c) if *c < 0.0 => write!(f, "(-{:?})", -c),
            Expr::Const(c) => write!(f, "{c:?}"),
            Expr::Param(name) => f.write_str(name),
            Expr::Var => f.write_str("s"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Pow(a, k) if a.is_atomic() => write!(f, "{a}^{k}"),
            Expr::Pow(a, k) => write!(f, "({a})^{k}"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
        }
    }
}
