//! A small arithmetic expression language in one variable `x`.
//!
//! Grammar (usual precedence, `^` right-associative):
//!
//! ```text
//! expr    := term (("+" | "-") term)*
//! term    := unary (("*" | "/") unary)*
//! unary   := "-" unary | power
//! power   := atom ("^" unary)?
//! atom    := number | "x" | "pi" | func "(" args ")" | "(" expr ")"
//! func    := sin | cos | tan | exp | ln | sqrt | tanh | cosh | sinh
//!          | if(cond, expr, expr)      cond := expr ("<" | "<=" | ">" | ">=") expr
//! ```
//!
//! Expressions can be differentiated symbolically, which is how data given
//! as formulas get their first and second derivatives.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Tan,
    Exp,
    Ln,
    Sqrt,
    Tanh,
    Cosh,
    Sinh,
}

impl Func {
    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "tan" => Func::Tan,
            "exp" => Func::Exp,
            "ln" | "log" => Func::Ln,
            "sqrt" => Func::Sqrt,
            "tanh" => Func::Tanh,
            "cosh" => Func::Cosh,
            "sinh" => Func::Sinh,
            _ => return None,
        })
    }

    fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sqrt => "sqrt",
            Func::Tanh => "tanh",
            Func::Cosh => "cosh",
            Func::Sinh => "sinh",
        }
    }

    fn apply(self, v: f64) -> f64 {
        match self {
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
            Func::Sqrt => v.sqrt(),
            Func::Tanh => v.tanh(),
            Func::Cosh => v.cosh(),
            Func::Sinh => v.sinh(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Cmp {
    Lt,
    Le,
    Gt,
    Ge,
}

impl Cmp {
    fn holds(self, a: f64, b: f64) -> bool {
        match self {
            Cmp::Lt => a < b,
            Cmp::Le => a <= b,
            Cmp::Gt => a > b,
            Cmp::Ge => a >= b,
        }
    }

    fn symbol(self) -> &'static str {
        match self {
            Cmp::Lt => "<",
            Cmp::Le => "<=",
            Cmp::Gt => ">",
            Cmp::Ge => ">=",
        }
    }
}

/// Expression tree.
#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    X,
    Neg(Box<Expr>),
    Add(Box<Expr>, Box<Expr>),
    Sub(Box<Expr>, Box<Expr>),
    Mul(Box<Expr>, Box<Expr>),
    Div(Box<Expr>, Box<Expr>),
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
    If {
        lhs: Box<Expr>,
        cmp: Cmp,
        rhs: Box<Expr>,
        then: Box<Expr>,
        otherwise: Box<Expr>,
    },
}

impl Expr {
    pub fn parse(src: &str) -> Result<Expr> {
        let mut p = Parser::new(src);
        let e = p.expr()?;
        p.skip_ws();
        if p.pos < p.src.len() {
            return Err(p.err("unexpected trailing input"));
        }
        Ok(e)
    }

    pub fn eval(&self, x: f64) -> f64 {
        match self {
            Expr::Num(v) => *v,
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x),
            Expr::Add(a, b) => a.eval(x) + b.eval(x),
            Expr::Sub(a, b) => a.eval(x) - b.eval(x),
            Expr::Mul(a, b) => a.eval(x) * b.eval(x),
            Expr::Div(a, b) => a.eval(x) / b.eval(x),
            Expr::Pow(a, b) => {
                let base = a.eval(x);
                match b.as_ref() {
                    Expr::Num(n) if n.fract() == 0.0 && n.abs() < 64.0 => base.powi(*n as i32),
                    other => base.powf(other.eval(x)),
                }
            }
            Expr::Call(f, a) => f.apply(a.eval(x)),
            Expr::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => {
                if cmp.holds(lhs.eval(x), rhs.eval(x)) {
                    then.eval(x)
                } else {
                    otherwise.eval(x)
                }
            }
        }
    }

    /// Whether the expression depends on `x` at all.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::Num(_) => true,
            Expr::X => false,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(a, b) | Expr::Sub(a, b) | Expr::Mul(a, b) | Expr::Div(a, b) | Expr::Pow(a, b) => {
                a.is_constant() && b.is_constant()
            }
            Expr::If {
                lhs,
                rhs,
                then,
                otherwise,
                ..
            } => lhs.is_constant() && rhs.is_constant() && then.is_constant() && otherwise.is_constant(),
        }
    }

    /// Symbolic derivative with respect to `x`.
    ///
    /// Branches of `if` are differentiated separately; the switching point
    /// itself contributes nothing.
    pub fn derivative(&self) -> Expr {
        use Expr::*;
        let d = match self {
            Num(_) => Num(0.0),
            X => Num(1.0),
            Neg(a) => neg(a.derivative()),
            Add(a, b) => add(a.derivative(), b.derivative()),
            Sub(a, b) => sub(a.derivative(), b.derivative()),
            Mul(a, b) => add(
                mul(a.derivative(), (**b).clone()),
                mul((**a).clone(), b.derivative()),
            ),
            Div(a, b) => div(
                sub(
                    mul(a.derivative(), (**b).clone()),
                    mul((**a).clone(), b.derivative()),
                ),
                pow((**b).clone(), Num(2.0)),
            ),
            Pow(a, b) => {
                if b.is_constant() {
                    let n = b.eval(0.0);
                    mul(
                        mul(Num(n), pow((**a).clone(), Num(n - 1.0))),
                        a.derivative(),
                    )
                } else {
                    // d(a^b) = a^b (b' ln a + b a'/a)
                    mul(
                        self.clone(),
                        add(
                            mul(b.derivative(), Call(Func::Ln, a.clone())),
                            div(mul((**b).clone(), a.derivative()), (**a).clone()),
                        ),
                    )
                }
            }
            Call(f, a) => {
                let inner = (**a).clone();
                let outer = match f {
                    Func::Sin => Call(Func::Cos, Box::new(inner)),
                    Func::Cos => neg(Call(Func::Sin, Box::new(inner))),
                    Func::Tan => div(Num(1.0), pow(Call(Func::Cos, Box::new(inner)), Num(2.0))),
                    Func::Exp => Call(Func::Exp, Box::new(inner)),
                    Func::Ln => div(Num(1.0), inner),
                    Func::Sqrt => div(Num(0.5), Call(Func::Sqrt, Box::new(inner))),
                    Func::Tanh => sub(Num(1.0), pow(Call(Func::Tanh, Box::new(inner)), Num(2.0))),
                    Func::Cosh => Call(Func::Sinh, Box::new(inner)),
                    Func::Sinh => Call(Func::Cosh, Box::new(inner)),
                };
                mul(outer, a.derivative())
            }
            If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => If {
                lhs: lhs.clone(),
                cmp: *cmp,
                rhs: rhs.clone(),
                then: Box::new(then.derivative()),
                otherwise: Box::new(otherwise.derivative()),
            },
        };
        simplify(d)
    }
}

impl FromStr for Expr {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Expr::parse(s)
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) => write!(f, "{v}"),
            Expr::X => f.write_str("x"),
            Expr::Neg(a) => write!(f, "(-{a})"),
            Expr::Add(a, b) => write!(f, "({a} + {b})"),
            Expr::Sub(a, b) => write!(f, "({a} - {b})"),
            Expr::Mul(a, b) => write!(f, "({a} * {b})"),
            Expr::Div(a, b) => write!(f, "({a} / {b})"),
            Expr::Pow(a, b) => write!(f, "({a} ^ {b})"),
            Expr::Call(func, a) => write!(f, "{}({a})", func.name()),
            Expr::If {
                lhs,
                cmp,
                rhs,
                then,
                otherwise,
            } => write!(f, "if({lhs} {} {rhs}, {then}, {otherwise})", cmp.symbol()),
        }
    }
}

fn neg(a: Expr) -> Expr {
    Expr::Neg(Box::new(a))
}
fn add(a: Expr, b: Expr) -> Expr {
    Expr::Add(Box::new(a), Box::new(b))
}
fn sub(a: Expr, b: Expr) -> Expr {
    Expr::Sub(Box::new(a), Box::new(b))
}
fn mul(a: Expr, b: Expr) -> Expr {
    Expr::Mul(Box::new(a), Box::new(b))
}
fn div(a: Expr, b: Expr) -> Expr {
    Expr::Div(Box::new(a), Box::new(b))
}
fn pow(a: Expr, b: Expr) -> Expr {
    Expr::Pow(Box::new(a), Box::new(b))
}

/// Constant folding and removal of additive/multiplicative identities.
fn simplify(e: Expr) -> Expr {
    use Expr::*;
    match e {
        Neg(a) => match simplify(*a) {
            Num(v) => Num(-v),
            Neg(inner) => *inner,
            other => neg(other),
        },
        Add(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x + y),
            (Num(z), other) | (other, Num(z)) if z == 0.0 => other,
            (l, r) => add(l, r),
        },
        Sub(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x - y),
            (l, Num(z)) if z == 0.0 => l,
            (Num(z), r) if z == 0.0 => simplify(neg(r)),
            (l, r) => sub(l, r),
        },
        Mul(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) => Num(x * y),
            (Num(z), _) | (_, Num(z)) if z == 0.0 => Num(0.0),
            (Num(o), other) | (other, Num(o)) if o == 1.0 => other,
            (l, r) => mul(l, r),
        },
        Div(a, b) => match (simplify(*a), simplify(*b)) {
            (Num(x), Num(y)) if y != 0.0 => Num(x / y),
            (Num(z), _) if z == 0.0 => Num(0.0),
            (l, Num(o)) if o == 1.0 => l,
            (l, r) => div(l, r),
        },
        Pow(a, b) => match (simplify(*a), simplify(*b)) {
            (_, Num(z)) if z == 0.0 => Num(1.0),
            (l, Num(o)) if o == 1.0 => l,
            (Num(x), Num(y)) => Num(x.powf(y)),
            (l, r) => pow(l, r),
        },
        Call(f, a) => match simplify(*a) {
            Num(v) => Num(f.apply(v)),
            other => Call(f, Box::new(other)),
        },
        If {
            lhs,
            cmp,
            rhs,
            then,
            otherwise,
        } => If {
            lhs: Box::new(simplify(*lhs)),
            cmp,
            rhs: Box::new(simplify(*rhs)),
            then: Box::new(simplify(*then)),
            otherwise: Box::new(simplify(*otherwise)),
        },
        other => other,
    }
}

struct Parser<'a> {
    src: &'a [u8],
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src: src.as_bytes(),
            pos: 0,
        }
    }

    fn err(&self, message: &str) -> Error {
        Error::Expression {
            column: self.pos + 1,
            message: message.to_string(),
        }
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

    fn expect(&mut self, c: u8) -> Result<()> {
        if self.eat(c) {
            Ok(())
        } else {
            Err(self.err(&format!("expected `{}`", c as char)))
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        loop {
            if self.eat(b'+') {
                lhs = add(lhs, self.term()?);
            } else if self.eat(b'-') {
                lhs = sub(lhs, self.term()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        loop {
            if self.eat(b'*') {
                lhs = mul(lhs, self.unary()?);
            } else if self.eat(b'/') {
                lhs = div(lhs, self.unary()?);
            } else {
                return Ok(lhs);
            }
        }
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat(b'-') {
            return Ok(neg(self.unary()?));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let base = self.atom()?;
        if self.eat(b'^') {
            let exp = self.unary()?;
            return Ok(pow(base, exp));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Expr> {
        match self.peek() {
            None => Err(self.err("unexpected end of expression")),
            Some(b'(') => {
                self.pos += 1;
                let e = self.expr()?;
                self.expect(b')')?;
                Ok(e)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() => {
                let start = self.pos;
                while self.pos < self.src.len()
                    && (self.src[self.pos].is_ascii_alphanumeric() || self.src[self.pos] == b'_')
                {
                    self.pos += 1;
                }
                let name = std::str::from_utf8(&self.src[start..self.pos]).unwrap_or_default();
                match name {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Num(std::f64::consts::PI)),
                    "if" => self.conditional(),
                    _ => {
                        let func = Func::from_name(name).ok_or_else(|| Error::Expression {
                            column: start + 1,
                            message: format!("unknown identifier `{name}`"),
                        })?;
                        self.expect(b'(')?;
                        let arg = self.expr()?;
                        self.expect(b')')?;
                        Ok(Expr::Call(func, Box::new(arg)))
                    }
                }
            }
            Some(_) => Err(self.err("unexpected character")),
        }
    }

    fn conditional(&mut self) -> Result<Expr> {
        self.expect(b'(')?;
        let lhs = self.expr()?;
        let cmp = if self.eat(b'<') {
            if self.eat(b'=') {
                Cmp::Le
            } else {
                Cmp::Lt
            }
        } else if self.eat(b'>') {
            if self.eat(b'=') {
                Cmp::Ge
            } else {
                Cmp::Gt
            }
        } else {
            return Err(self.err("expected comparison in if()"));
        };
        let rhs = self.expr()?;
        self.expect(b',')?;
        let then = self.expr()?;
        self.expect(b',')?;
        let otherwise = self.expr()?;
        self.expect(b')')?;
        Ok(Expr::If {
            lhs: Box::new(lhs),
            cmp,
            rhs: Box::new(rhs),
            then: Box::new(then),
            otherwise: Box::new(otherwise),
        })
    }

    fn number(&mut self) -> Result<Expr> {
        let start = self.pos;
        let bytes = self.src;
        let mut i = self.pos;
        while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
            i += 1;
        }
        if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
            let mut j = i + 1;
            if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                j += 1;
            }
            if j < bytes.len() && bytes[j].is_ascii_digit() {
                while j < bytes.len() && bytes[j].is_ascii_digit() {
                    j += 1;
                }
                i = j;
            }
        }
        let text = std::str::from_utf8(&bytes[start..i]).unwrap_or_default();
        let v: f64 = text.parse().map_err(|_| Error::Expression {
            column: start + 1,
            message: format!("bad number `{text}`"),
        })?;
        self.pos = i;
        Ok(Expr::Num(v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(s: &str, x: f64) -> f64 {
        Expr::parse(s).unwrap().eval(x)
    }

    #[test]
    fn precedence_and_associativity() {
        assert_eq!(ev("1 + 2 * 3", 0.0), 7.0);
        assert_eq!(ev("2 ^ 3 ^ 2", 0.0), 512.0);
        assert_eq!(ev("-x^2", 3.0), -9.0);
        assert_eq!(ev("(1 - x) * (1 + x)", 0.5), 0.75);
        assert_eq!(ev("1e-2 * 100", 0.0), 1.0);
        assert_eq!(ev("8 / 2 / 2", 0.0), 2.0);
    }

    #[test]
    fn piecewise_and_functions() {
        assert_eq!(ev("if(x < 0, -1, 1)", -0.5), -1.0);
        assert_eq!(ev("if(x >= 0, x^2, 0)", 2.0), 4.0);
        assert!((ev("sin(pi/2) + cos(0) + exp(0)", 0.0) - 3.0).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let cases = [
            "x^3 - 2*x",
            "(1 - x^2)^2",
            "sin(3*x) * exp(-x)",
            "tanh(x / 0.1)",
            "x / (2 + x^2)",
            "sqrt(4 + x)",
            "if(x < 0.2, x^3, 2*x)",
        ];
        for src in cases {
            let e = Expr::parse(src).unwrap();
            let d1 = e.derivative();
            let d2 = d1.derivative();
            for &x in &[-0.7, -0.1, 0.35, 0.9] {
                let h = 1e-5;
                let fd1 = (e.eval(x + h) - e.eval(x - h)) / (2.0 * h);
                let fd2 = (d1.eval(x + h) - d1.eval(x - h)) / (2.0 * h);
                assert!((d1.eval(x) - fd1).abs() < 1e-6 * (1.0 + fd1.abs()), "{src} at {x}");
                assert!((d2.eval(x) - fd2).abs() < 1e-5 * (1.0 + fd2.abs()), "{src}'' at {x}");
            }
        }
    }

    #[test]
    fn parse_errors_report_column() {
        match Expr::parse("1 + foo(x)") {
            Err(Error::Expression { column, .. }) => assert_eq!(column, 5),
            other => panic!("unexpected {other:?}"),
        }
        assert!(Expr::parse("1 +").is_err());
        assert!(Expr::parse("(x").is_err());
        assert!(Expr::parse("x x").is_err());
    }

    #[test]
    fn display_round_trips() {
        let e = Expr::parse("if(x <= 1, sin(x)^2, -x / 3)").unwrap();
        let again = Expr::parse(&e.to_string()).unwrap();
        for &x in &[-2.0, 0.3, 1.0, 1.5] {
            assert_eq!(e.eval(x), again.eval(x));
        }
    }
}
