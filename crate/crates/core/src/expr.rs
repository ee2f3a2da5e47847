//! Closed-form scalar expressions over chart coordinates.
//!
//! Grammar:
//!
//! ```text
//! expr   := term (('+' | '-') term)*
//! term   := factor (('*' | '/') factor)*
//! factor := NUMBER | COORD | FUNC '(' expr ')' | 'pow' '(' expr ',' RATIONAL ')'
//!         | '(' expr ')' | '-' factor
//! COORD  := 'x' DIGIT+          (1-based)
//! FUNC   := exp | log | sqrt | sin | cos
//! ```
//!
//! Expressions print fully parenthesized, so `parse(print(e))` reproduces the
//! tree exactly.

use std::fmt;
use std::ops;

use crate::error::{Error, Result};
use crate::jet::ScalarJet;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Exp,
    Log,
    Sqrt,
    Sin,
    Cos,
}

impl Func {
    fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Sin => "sin",
            Func::Cos => "cos",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Some(match name {
            "exp" => Func::Exp,
            "log" => Func::Log,
            "sqrt" => Func::Sqrt,
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            _ => return None,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
        }
    }
}

/// A rational exponent `p/q` in lowest terms with `q > 0`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Rational {
    p: i64,
    q: i64,
}

impl Rational {
    pub fn new(p: i64, q: i64) -> Option<Rational> {
        if q == 0 {
            return None;
        }
        let g = gcd(p.unsigned_abs(), q.unsigned_abs()).max(1) as i64;
        let sign = if q < 0 { -1 } else { 1 };
        Some(Rational {
            p: sign * p / g,
            q: sign * q / g,
        })
    }

    pub fn numer(self) -> i64 {
        self.p
    }

    pub fn denom(self) -> i64 {
        self.q
    }

    pub fn as_f64(self) -> f64 {
        self.p as f64 / self.q as f64
    }

    pub fn is_integer(self) -> bool {
        self.q == 1
    }
}

fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    /// Zero-based coordinate index; printed 1-based as `x1, x2, ...`.
    Coord(usize),
    Neg(Box<Expr>),
    Func(Func, Box<Expr>),
    Pow(Box<Expr>, Rational),
    Bin(BinOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn num(v: f64) -> Expr {
        Expr::Num(v)
    }

    /// Zero-based coordinate reference.
    pub fn coord(i: usize) -> Expr {
        Expr::Coord(i)
    }

    pub fn apply(self, f: Func) -> Expr {
        Expr::Func(f, Box::new(self))
    }

    pub fn sin(self) -> Expr {
        self.apply(Func::Sin)
    }

    pub fn cos(self) -> Expr {
        self.apply(Func::Cos)
    }

    pub fn exp(self) -> Expr {
        self.apply(Func::Exp)
    }

    pub fn pow(self, p: i64, q: i64) -> Expr {
        Expr::Pow(Box::new(self), Rational::new(p, q).expect("nonzero denominator"))
    }

    /// Largest coordinate index referenced, zero-based.
    pub fn max_coord(&self) -> Option<usize> {
        match self {
            Expr::Num(_) => None,
            Expr::Coord(i) => Some(*i),
            Expr::Neg(e) | Expr::Func(_, e) | Expr::Pow(e, _) => e.max_coord(),
            Expr::Bin(_, a, b) => a.max_coord().max(b.max_coord()),
        }
    }

    /// Node count, used by tests to bound generated trees.
    pub fn size(&self) -> usize {
        match self {
            Expr::Num(_) | Expr::Coord(_) => 1,
            Expr::Neg(e) | Expr::Func(_, e) | Expr::Pow(e, _) => 1 + e.size(),
            Expr::Bin(_, a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn is_zero_constant(&self) -> bool {
        matches!(self, Expr::Num(v) if *v == 0.0)
    }

    /// Evaluate over plain reals.
    pub fn eval_real(&self, x: &[f64]) -> Result<f64> {
        Ok(match self {
            Expr::Num(v) => *v,
            Expr::Coord(i) => *x.get(*i).ok_or(Error::DimensionMismatch {
                expected: i + 1,
                found: x.len(),
            })?,
            Expr::Neg(e) => -e.eval_real(x)?,
            Expr::Func(f, e) => {
                let u = e.eval_real(x)?;
                check_func_domain(*f, u, 0)?;
                match f {
                    Func::Exp => u.exp(),
                    Func::Log => u.ln(),
                    Func::Sqrt => u.sqrt(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                }
            }
            Expr::Pow(e, r) => {
                let u = e.eval_real(x)?;
                check_pow_domain(u, *r)?;
                if r.is_integer() {
                    u.powi(r.numer() as i32)
                } else {
                    u.powf(r.as_f64())
                }
            }
            Expr::Bin(op, a, b) => {
                let (u, v) = (a.eval_real(x)?, b.eval_real(x)?);
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        u / v
                    }
                }
            }
        })
    }

    /// Evaluate as a jet of the given order at `x`; the jet dimension is
    /// `x.len()`.
    pub fn eval_jet(&self, x: &[f64], order: u8) -> Result<ScalarJet> {
        if order > crate::jet::MAX_ORDER {
            return Err(Error::OrderExceeded {
                requested: order,
                available: crate::jet::MAX_ORDER,
            });
        }
        let n = x.len();
        Ok(match self {
            Expr::Num(v) => ScalarJet::constant(n, order, *v),
            Expr::Coord(i) => {
                if *i >= n {
                    return Err(Error::DimensionMismatch {
                        expected: i + 1,
                        found: n,
                    });
                }
                ScalarJet::variable(n, order, *i, x[*i])
            }
            Expr::Neg(e) => -e.eval_jet(x, order)?,
            Expr::Func(f, e) => {
                let u = e.eval_jet(x, order)?;
                check_func_domain(*f, u.value(), order)?;
                match f {
                    Func::Exp => u.exp(),
                    Func::Log => u.ln(),
                    Func::Sqrt => u.sqrt(),
                    Func::Sin => u.sin(),
                    Func::Cos => u.cos(),
                }
            }
            Expr::Pow(e, r) => {
                let u = e.eval_jet(x, order)?;
                check_pow_domain(u.value(), *r)?;
                u.powf(r.as_f64())
            }
            Expr::Bin(op, a, b) => {
                let u = a.eval_jet(x, order)?;
                let v = b.eval_jet(x, order)?;
                match op {
                    BinOp::Add => u + v,
                    BinOp::Sub => u - v,
                    BinOp::Mul => u * v,
                    BinOp::Div => {
                        if v.value() == 0.0 {
                            return Err(Error::Domain("division by zero".into()));
                        }
                        u / v
                    }
                }
            }
        })
    }
}

fn check_func_domain(f: Func, u: f64, order: u8) -> Result<()> {
    match f {
        Func::Log if !(u > 0.0) => Err(Error::Domain(format!("log of non-positive value {u}"))),
        Func::Sqrt if u < 0.0 || (order > 0 && u == 0.0) => {
            Err(Error::Domain(format!("sqrt of value {u}")))
        }
        _ if !u.is_finite() => Err(Error::Domain(format!("{} of non-finite value", f.name()))),
        _ => Ok(()),
    }
}

fn check_pow_domain(u: f64, r: Rational) -> Result<()> {
    if r.is_integer() {
        if u == 0.0 && r.numer() < 0 {
            return Err(Error::Domain("zero raised to a negative power".into()));
        }
        Ok(())
    } else if u > 0.0 {
        Ok(())
    } else {
        Err(Error::Domain(format!(
            "fractional power {}/{} of non-positive value {u}",
            r.numer(),
            r.denom()
        )))
    }
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(v) if *v < 0.0 || (*v == 0.0 && v.is_sign_negative()) => write!(f, "(-{})", -v),
            Expr::Num(v) => write!(f, "{v}"),
            Expr::Coord(i) => write!(f, "x{}", i + 1),
            Expr::Neg(e) => write!(f, "(-{e})"),
            Expr::Func(func, e) => write!(f, "{}({e})", func.name()),
            Expr::Pow(e, r) => write!(f, "pow({e}, {}/{})", r.numer(), r.denom()),
            Expr::Bin(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
        }
    }
}

macro_rules! expr_binop {
    ($trait:ident, $method:ident, $op:expr) => {
        impl ops::$trait for Expr {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Bin($op, Box::new(self), Box::new(rhs))
            }
        }
        impl ops::$trait<f64> for Expr {
            type Output = Expr;
            fn $method(self, rhs: f64) -> Expr {
                Expr::Bin($op, Box::new(self), Box::new(Expr::Num(rhs)))
            }
        }
        impl ops::$trait<Expr> for f64 {
            type Output = Expr;
            fn $method(self, rhs: Expr) -> Expr {
                Expr::Bin($op, Box::new(Expr::Num(self)), Box::new(rhs))
            }
        }
    };
}

expr_binop!(Add, add, BinOp::Add);
expr_binop!(Sub, sub, BinOp::Sub);
expr_binop!(Mul, mul, BinOp::Mul);
expr_binop!(Div, div, BinOp::Div);

impl ops::Neg for Expr {
    type Output = Expr;
    fn neg(self) -> Expr {
        Expr::Neg(Box::new(self))
    }
}

/// Parse `source` as an expression over coordinates `x1..xn`.
pub fn parse_expr(source: &str, n: usize) -> Result<Expr> {
    let tokens = tokenize(source)?;
    let mut parser = Parser {
        tokens,
        pos: 0,
        n,
        end: source.len(),
    };
    let e = parser.expr()?;
    match parser.peek() {
        None => Ok(e),
        Some((tok, pos)) => Err(Error::Syntax {
            pos,
            message: format!("unexpected {}", tok.describe()),
        }),
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Int(i64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl Tok {
    fn describe(&self) -> String {
        match self {
            Tok::Num(v) => format!("number {v}"),
            Tok::Int(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier `{s}`"),
            Tok::Op(c) => format!("`{c}`"),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Comma => "`,`".into(),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(Tok, usize)>> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        let start = i;
        match c {
            ' ' | '\t' | '\n' | '\r' => i += 1,
            '+' | '-' | '*' | '/' => {
                out.push((Tok::Op(c), start));
                i += 1;
            }
            '(' => {
                out.push((Tok::LParen, start));
                i += 1;
            }
            ')' => {
                out.push((Tok::RParen, start));
                i += 1;
            }
            ',' => {
                out.push((Tok::Comma, start));
                i += 1;
            }
            '0'..='9' | '.' => {
                let mut is_int = true;
                while i < bytes.len() && bytes[i].is_ascii_digit() {
                    i += 1;
                }
                if i < bytes.len() && bytes[i] == b'.' {
                    is_int = false;
                    i += 1;
                    while i < bytes.len() && bytes[i].is_ascii_digit() {
                        i += 1;
                    }
                }
                if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                    let mut j = i + 1;
                    if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                        j += 1;
                    }
                    if j < bytes.len() && bytes[j].is_ascii_digit() {
                        is_int = false;
                        i = j;
                        while i < bytes.len() && bytes[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let text = &src[start..i];
                let tok = if is_int {
                    match text.parse::<i64>() {
                        Ok(v) => Tok::Int(v),
                        Err(_) => Tok::Num(text.parse::<f64>().map_err(|_| Error::Syntax {
                            pos: start,
                            message: format!("malformed number `{text}`"),
                        })?),
                    }
                } else {
                    Tok::Num(text.parse::<f64>().map_err(|_| Error::Syntax {
                        pos: start,
                        message: format!("malformed number `{text}`"),
                    })?)
                };
                out.push((tok, start));
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                out.push((Tok::Ident(src[start..i].to_string()), start));
            }
            other => {
                return Err(Error::Syntax {
                    pos: start,
                    message: format!("unexpected character `{other}`"),
                })
            }
        }
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<(Tok, usize)>,
    pos: usize,
    n: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<(Tok, usize)> {
        self.tokens.get(self.pos).cloned()
    }

    fn next(&mut self) -> Option<(Tok, usize)> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.tokens.get(self.pos).map(|t| t.1).unwrap_or(self.end)
    }

    fn expect(&mut self, want: Tok) -> Result<()> {
        match self.next() {
            Some((t, _)) if t == want => Ok(()),
            Some((t, pos)) => Err(Error::Syntax {
                pos,
                message: format!("expected {}, found {}", want.describe(), t.describe()),
            }),
            None => Err(Error::Syntax {
                pos: self.end,
                message: format!("expected {}, found end of input", want.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some((Tok::Op(c @ ('+' | '-')), _)) = self.peek() {
            self.pos += 1;
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.factor()?;
        while let Some((Tok::Op(c @ ('*' | '/')), _)) = self.peek() {
            self.pos += 1;
            let rhs = self.factor()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn factor(&mut self) -> Result<Expr> {
        let Some((tok, pos)) = self.next() else {
            return Err(Error::Syntax {
                pos: self.end,
                message: "unexpected end of input".into(),
            });
        };
        match tok {
            Tok::Num(v) => Ok(Expr::Num(v)),
            Tok::Int(v) => Ok(Expr::Num(v as f64)),
            Tok::Op('-') => Ok(Expr::Neg(Box::new(self.factor()?))),
            Tok::LParen => {
                let e = self.expr()?;
                self.expect(Tok::RParen)?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, pos),
            other => Err(Error::Syntax {
                pos,
                message: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn identifier(&mut self, name: String, pos: usize) -> Result<Expr> {
        if let Some(digits) = name.strip_prefix('x') {
            if !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit()) {
                return match digits.parse::<usize>() {
                    Ok(k) if k >= 1 && k <= self.n => Ok(Expr::Coord(k - 1)),
                    _ => Err(Error::UnknownSymbol { name, pos }),
                };
            }
        }
        if name == "pow" {
            self.expect(Tok::LParen)?;
            let base = self.expr()?;
            match self.next() {
                Some((Tok::Comma, _)) => {}
                Some((Tok::RParen, _)) => {
                    return Err(Error::Arity {
                        func: name,
                        expected: 2,
                        found: 1,
                    })
                }
                Some((t, p)) => {
                    return Err(Error::Syntax {
                        pos: p,
                        message: format!("expected `,`, found {}", t.describe()),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        pos: self.end,
                        message: "unterminated pow(".into(),
                    })
                }
            }
            let r = self.rational()?;
            self.close_call("pow", 2)?;
            return Ok(Expr::Pow(Box::new(base), r));
        }
        let Some(func) = Func::from_name(&name) else {
            return Err(Error::UnknownSymbol { name, pos });
        };
        self.expect(Tok::LParen)?;
        let arg = self.expr()?;
        self.close_call(func.name(), 1)?;
        Ok(Expr::Func(func, Box::new(arg)))
    }

    /// Consume `)` or count surplus arguments for an arity error.
    fn close_call(&mut self, func: &str, expected: usize) -> Result<()> {
        let mut found = expected;
        loop {
            match self.next() {
                Some((Tok::RParen, _)) if found == expected => return Ok(()),
                Some((Tok::RParen, _)) => {
                    return Err(Error::Arity {
                        func: func.into(),
                        expected,
                        found,
                    })
                }
                Some((Tok::Comma, _)) => {
                    found += 1;
                    self.expr()?;
                }
                Some((t, p)) => {
                    return Err(Error::Syntax {
                        pos: p,
                        message: format!("expected `)`, found {}", t.describe()),
                    })
                }
                None => {
                    return Err(Error::Syntax {
                        pos: self.end,
                        message: format!("unterminated call to `{func}`"),
                    })
                }
            }
        }
    }

    fn rational(&mut self) -> Result<Rational> {
        let pos = self.here();
        let mut sign = 1;
        if let Some((Tok::Op('-'), _)) = self.peek() {
            self.pos += 1;
            sign = -1;
        }
        let p = match self.next() {
            Some((Tok::Int(v), _)) => v,
            _ => {
                return Err(Error::Syntax {
                    pos,
                    message: "pow exponent must be an integer or p/q".into(),
                })
            }
        };
        let mut q = 1;
        if let Some((Tok::Op('/'), _)) = self.peek() {
            self.pos += 1;
            q = match self.next() {
                Some((Tok::Int(v), _)) if v != 0 => v,
                _ => {
                    return Err(Error::Syntax {
                        pos,
                        message: "pow exponent denominator must be a nonzero integer".into(),
                    })
                }
            };
        }
        Ok(Rational::new(sign * p, q).expect("q checked nonzero"))
    }
}

/// Evaluate a row-major matrix of expressions as jets; errors name the
/// offending component.
pub fn eval_field(entries: &[Expr], cols: usize, x: &[f64], order: u8) -> Result<Vec<ScalarJet>> {
    entries
        .iter()
        .enumerate()
        .map(|(idx, e)| {
            e.eval_jet(x, order).map_err(|source| Error::Component {
                row: idx / cols,
                col: idx % cols,
                source: Box::new(source),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_sum_of_square_and_exp() {
        let e = parse_expr("x1*x1 + exp(x2)", 2).unwrap();
        match &e {
            Expr::Bin(BinOp::Add, a, b) => {
                assert_eq!(**a, Expr::Bin(BinOp::Mul, Box::new(Expr::Coord(0)), Box::new(Expr::Coord(0))));
                assert_eq!(**b, Expr::Func(Func::Exp, Box::new(Expr::Coord(1))));
            }
            other => panic!("unexpected tree {other:?}"),
        }
    }

    #[test]
    fn coordinate_out_of_range() {
        assert!(matches!(parse_expr("x3", 2), Err(Error::UnknownSymbol { .. })));
        assert!(matches!(parse_expr("x0", 2), Err(Error::UnknownSymbol { .. })));
    }

    #[test]
    fn unknown_function_name() {
        let err = parse_expr("log(det)", 2).unwrap_err();
        assert_eq!(
            err,
            Error::UnknownSymbol {
                name: "det".into(),
                pos: 4
            }
        );
    }

    #[test]
    fn arity_errors() {
        assert!(matches!(parse_expr("exp(x1, x2)", 2), Err(Error::Arity { found: 2, .. })));
        assert!(matches!(parse_expr("pow(x1)", 2), Err(Error::Arity { found: 1, .. })));
    }

    #[test]
    fn syntax_errors_carry_position() {
        assert_eq!(
            parse_expr("x1 + * x2", 2),
            Err(Error::Syntax {
                pos: 5,
                message: "unexpected `*`".into()
            })
        );
        assert!(matches!(parse_expr("(x1", 1), Err(Error::Syntax { pos: 3, .. })));
        assert!(matches!(parse_expr("x1 $", 1), Err(Error::Syntax { pos: 3, .. })));
    }

    #[test]
    fn pow_with_rational_exponent() {
        let e = parse_expr("pow(x1, -1/2)", 1).unwrap();
        assert!((e.eval_real(&[4.0]).unwrap() - 0.5).abs() < 1e-15);
        let j = e.eval_jet(&[4.0], 2).unwrap();
        assert!((j.d1(0) + 0.5 * 4f64.powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn log_at_zero_is_domain_error() {
        let e = parse_expr("log(x1)", 1).unwrap();
        assert!(matches!(e.eval_jet(&[0.0], 3), Err(Error::Domain(_))));
        assert!(matches!(e.eval_real(&[0.0]), Err(Error::Domain(_))));
    }

    #[test]
    fn exp_jet_at_zero() {
        let j = parse_expr("exp(x1)", 1).unwrap().eval_jet(&[0.0], 3).unwrap();
        assert_eq!((j.value(), j.d1(0), j.d2(0, 0), j.d3(0, 0, 0)), (1.0, 1.0, 1.0, 1.0));
    }

    #[test]
    fn bilinear_jet() {
        let j = parse_expr("x1*x2", 2).unwrap().eval_jet(&[2.0, 3.0], 2).unwrap();
        assert_eq!(j.value(), 6.0);
        assert_eq!(j.grad(), &[3.0, 2.0]);
        assert_eq!(j.d2(0, 1), 1.0);
    }

    #[test]
    fn print_parse_round_trip() {
        for src in ["x1*x1 + exp(x2)", "-x1 - -2.5e-3 / (x2 + 1)", "pow(sin(x1), 3/2) * cos(-x2)"] {
            let e = parse_expr(src, 2).unwrap();
            let again = parse_expr(&e.to_string(), 2).unwrap();
            assert_eq!(e, again, "{src}");
        }
    }

    #[test]
    fn identity_field_has_zero_derivatives() {
        let entries: Vec<Expr> = ["1", "0", "0", "1"].iter().map(|s| parse_expr(s, 2).unwrap()).collect();
        let jets = eval_field(&entries, 2, &[0.3, -0.7], 3).unwrap();
        for (idx, j) in jets.iter().enumerate() {
            assert_eq!(j.value(), if idx % 3 == 0 { 1.0 } else { 0.0 });
            assert!(j.grad().iter().all(|v| *v == 0.0));
        }
    }

    #[test]
    fn exp_diagonal_field() {
        let entries: Vec<Expr> = ["exp(x1)", "0", "0", "exp(x2)"]
            .iter()
            .map(|s| parse_expr(s, 2).unwrap())
            .collect();
        let jets = eval_field(&entries, 2, &[0.0, 0.0], 2).unwrap();
        assert_eq!(jets[0].value(), 1.0);
        assert_eq!(jets[3].value(), 1.0);
        assert_eq!(jets[0].d1(0), 1.0);
        assert_eq!(jets[0].d1(1), 0.0);
    }

    #[test]
    fn field_error_names_component() {
        let entries: Vec<Expr> = ["1", "0", "log(x1)", "1"].iter().map(|s| parse_expr(s, 1).unwrap()).collect();
        let err = eval_field(&entries, 2, &[-1.0], 1).unwrap_err();
        assert!(matches!(err, Error::Component { row: 1, col: 0, .. }));
    }
}
