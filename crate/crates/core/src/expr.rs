//! Endpoint expression language.
//!
//! ```text
//! expr     = term { ("+" | "-") term } ;
//! term     = unary { ("*" | "/") unary } ;
//! unary    = "-" unary | power ;
//! power    = atom { "^" exponent } ;          (* left-associative *)
//! exponent = "-" exponent | atom ;
//! atom     = number | "r" | var | call | "(" expr ")" ;
//! var      = "t" digit { digit } ;             (* t1 .. tm *)
//! call     = ("abs" | "exp") "(" expr ")"
//!          | ("min" | "max") "(" expr "," expr { "," expr } ")" ;
//! number   = digit { digit } [ "." { digit } ] [ ("e" | "E") [ "+" | "-" ] digit { digit } ] ;
//! ```
//!
//! `r` is the membership level and `t1..tm` the coordinates of the argument.
//! Whitespace is ignored. There are no conditionals; piecewise endpoints are
//! written with `abs`, `min` and `max`.

use crate::error::{FuzzyError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Abs,
    Exp,
    Min,
    Max,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Expr {
    Num(f64),
    Level,
    /// Zero-based coordinate index.
    Var(usize),
    Neg(Box<Expr>),
    Bin(BinOp, Box<Expr>, Box<Expr>),
    Call(Func, Vec<Expr>),
}

impl Expr {
    pub fn eval(&self, r: f64, t: &[f64]) -> f64 {
        match self {
            Expr::Num(x) => *x,
            Expr::Level => r,
            Expr::Var(j) => t[*j],
            Expr::Neg(e) => -e.eval(r, t),
            Expr::Bin(op, a, b) => {
                let (x, y) = (a.eval(r, t), b.eval(r, t));
                match op {
                    BinOp::Add => x + y,
                    BinOp::Sub => x - y,
                    BinOp::Mul => x * y,
                    BinOp::Div => x / y,
                    BinOp::Pow => pow(x, y),
                }
            }
            Expr::Call(f, args) => match f {
                Func::Abs => args[0].eval(r, t).abs(),
                Func::Exp => args[0].eval(r, t).exp(),
                Func::Min => args.iter().map(|a| a.eval(r, t)).fold(f64::INFINITY, f64::min),
                Func::Max => args
                    .iter()
                    .map(|a| a.eval(r, t))
                    .fold(f64::NEG_INFINITY, f64::max),
            },
        }
    }
}

fn pow(x: f64, y: f64) -> f64 {
    if y.fract() == 0.0 && y.abs() <= i32::MAX as f64 {
        x.powi(y as i32)
    } else {
        x.powf(y)
    }
}

/// A parsed endpoint expression over `t1..tm` and `r`.
#[derive(Debug, Clone, PartialEq)]
pub struct ExprProgram {
    source: String,
    dim: usize,
    ast: Expr,
}

impl ExprProgram {
    pub fn ast(&self) -> &Expr {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn eval(&self, r: f64, t: &[f64]) -> f64 {
        debug_assert_eq!(t.len(), self.dim);
        self.ast.eval(r, t)
    }
}

pub fn parse_expr(text: &str, m: usize) -> Result<ExprProgram> {
    let tokens = lex(text)?;
    let mut p = Parser {
        tokens,
        pos: 0,
        dim: m,
        end: text.len(),
    };
    let ast = p.expr()?;
    if let Some(tok) = p.peek() {
        return Err(FuzzyError::Parse {
            pos: tok.pos,
            msg: format!("unexpected {}", tok.kind.describe()),
        });
    }
    Ok(ExprProgram {
        source: text.to_string(),
        dim: m,
        ast,
    })
}

#[derive(Debug, Clone, PartialEq)]
enum TokKind {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

impl TokKind {
    fn describe(&self) -> String {
        match self {
            TokKind::Num(x) => format!("number {x}"),
            TokKind::Ident(s) => format!("identifier `{s}`"),
            TokKind::Op(c) => format!("operator `{c}`"),
            TokKind::LParen => "`(`".into(),
            TokKind::RParen => "`)`".into(),
            TokKind::Comma => "`,`".into(),
        }
    }
}

#[derive(Debug, Clone)]
struct Token {
    kind: TokKind,
    pos: usize,
}

fn lex(text: &str) -> Result<Vec<Token>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i] as char;
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let kind = match c {
            '+' | '-' | '*' | '/' | '^' => {
                i += 1;
                TokKind::Op(c)
            }
            '(' => {
                i += 1;
                TokKind::LParen
            }
            ')' => {
                i += 1;
                TokKind::RParen
            }
            ',' => {
                i += 1;
                TokKind::Comma
            }
            '0'..='9' | '.' => {
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
                let s = &text[start..i];
                let x = s.parse::<f64>().map_err(|_| FuzzyError::Parse {
                    pos: start,
                    msg: format!("malformed number `{s}`"),
                })?;
                TokKind::Num(x)
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                TokKind::Ident(text[start..i].to_string())
            }
            other => {
                return Err(FuzzyError::Parse {
                    pos: start,
                    msg: format!("unexpected character `{other}`"),
                })
            }
        };
        out.push(Token { kind, pos: start });
    }
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
    dim: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos)
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn here(&self) -> usize {
        self.peek().map_or(self.end, |t| t.pos)
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token {
                kind: TokKind::Op(c),
                ..
            }) if ops.contains(c) => {
                let c = *c;
                self.pos += 1;
                Some(c)
            }
            _ => None,
        }
    }

    fn expect(&mut self, want: TokKind) -> Result<()> {
        match self.next() {
            Some(t) if t.kind == want => Ok(()),
            Some(t) => Err(FuzzyError::Parse {
                pos: t.pos,
                msg: format!("expected {}, found {}", want.describe(), t.kind.describe()),
            }),
            None => Err(FuzzyError::Parse {
                pos: self.end,
                msg: format!("expected {}, found end of input", want.describe()),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr> {
        let mut lhs = self.term()?;
        while let Some(c) = self.eat_op(&['+', '-']) {
            let rhs = self.term()?;
            let op = if c == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr> {
        let mut lhs = self.unary()?;
        while let Some(c) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if c == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr> {
        let mut lhs = self.atom()?;
        while self.eat_op(&['^']).is_some() {
            let rhs = self.exponent()?;
            lhs = Expr::Bin(BinOp::Pow, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn exponent(&mut self) -> Result<Expr> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Expr::Neg(Box::new(self.exponent()?)));
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Expr> {
        let pos = self.here();
        let tok = self.next().ok_or(FuzzyError::Parse {
            pos,
            msg: "unexpected end of input".into(),
        })?;
        match tok.kind {
            TokKind::Num(x) => Ok(Expr::Num(x)),
            TokKind::LParen => {
                let e = self.expr()?;
                self.expect(TokKind::RParen)?;
                Ok(e)
            }
            TokKind::Ident(name) => self.ident(name, tok.pos),
            other => Err(FuzzyError::Parse {
                pos: tok.pos,
                msg: format!("unexpected {}", other.describe()),
            }),
        }
    }

    fn ident(&mut self, name: String, pos: usize) -> Result<Expr> {
        let func = match name.as_str() {
            "r" => return Ok(Expr::Level),
            "abs" => Some(Func::Abs),
            "exp" => Some(Func::Exp),
            "min" => Some(Func::Min),
            "max" => Some(Func::Max),
            _ => None,
        };
        if let Some(f) = func {
            self.expect(TokKind::LParen)?;
            let mut args = vec![self.expr()?];
            while matches!(self.peek(), Some(Token { kind: TokKind::Comma, .. })) {
                self.pos += 1;
                args.push(self.expr()?);
            }
            self.expect(TokKind::RParen)?;
            let ok = match f {
                Func::Abs | Func::Exp => args.len() == 1,
                Func::Min | Func::Max => args.len() >= 2,
            };
            if !ok {
                return Err(FuzzyError::Parse {
                    pos,
                    msg: format!("wrong number of arguments ({}) to `{name}`", args.len()),
                });
            }
            return Ok(Expr::Call(f, args));
        }
        if let Some(idx) = name.strip_prefix('t').and_then(|d| d.parse::<usize>().ok()) {
            if (1..=self.dim).contains(&idx) {
                return Ok(Expr::Var(idx - 1));
            }
        }
        Err(FuzzyError::UnknownIdentifier { name, pos })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ev(src: &str, m: usize, r: f64, t: &[f64]) -> f64 {
        parse_expr(src, m).unwrap().eval(r, t)
    }

    #[test]
    fn kkt_objective_endpoint() {
        let p = parse_expr("t1^2 - 1 + r", 1).unwrap();
        for &(t, r) in &[(0.0, 0.0), (2.0, 0.5), (-1.5, 1.0)] {
            assert_eq!(p.eval(r, &[t]), t * t - 1.0 + r);
        }
    }

    #[test]
    fn constant_zero() {
        assert_eq!(parse_expr("0", 3).unwrap().ast(), &Expr::Num(0.0));
    }

    #[test]
    fn min_abs_example() {
        assert_eq!(ev("min(t1, -t2) * abs(r)", 2, 0.5, &[1.0, 2.0]), -1.0);
    }

    #[test]
    fn precedence_and_association() {
        assert_eq!(ev("-t1^2", 1, 0.0, &[3.0]), -9.0);
        assert_eq!(ev("1 - 2 - 3", 0, 0.0, &[]), -4.0);
        assert_eq!(ev("8 / 4 / 2", 0, 0.0, &[]), 1.0);
        assert_eq!(ev("2^3^2", 0, 0.0, &[]), 64.0);
        assert_eq!(ev("2 + 3 * 4", 0, 0.0, &[]), 14.0);
        assert_eq!(ev("(2 + 3) * 4", 0, 0.0, &[]), 20.0);
        assert_eq!(ev("2^-1", 0, 0.0, &[]), 0.5);
        assert_eq!(ev("--2", 0, 0.0, &[]), 2.0);
        assert_eq!(ev("1.5e2 + r", 0, 0.25, &[]), 150.25);
    }

    #[test]
    fn functions_evaluate() {
        assert_eq!(ev("max(t1, 1, r)", 1, 2.0, &[0.0]), 2.0);
        assert_eq!(ev("abs(-3)", 0, 0.0, &[]), 3.0);
        assert_eq!(ev("exp(0)", 0, 0.0, &[]), 1.0);
        assert_eq!(ev("(abs(t1)+1)*(r-1)", 1, 0.25, &[-1.0]), -1.5);
    }

    #[test]
    fn unknown_identifiers() {
        assert!(matches!(
            parse_expr("t2 + 1", 1),
            Err(FuzzyError::UnknownIdentifier { ref name, pos: 0 }) if name == "t2"
        ));
        assert!(matches!(parse_expr("t0", 1), Err(FuzzyError::UnknownIdentifier { .. })));
        assert!(matches!(parse_expr("sin(t1)", 1), Err(FuzzyError::UnknownIdentifier { pos: 0, .. })));
        assert!(matches!(parse_expr("x", 1), Err(FuzzyError::UnknownIdentifier { .. })));
    }

    #[test]
    fn parse_errors_carry_positions() {
        assert!(matches!(parse_expr("1 +", 0), Err(FuzzyError::Parse { pos: 3, .. })));
        assert!(matches!(parse_expr("(1 + 2", 0), Err(FuzzyError::Parse { pos: 6, .. })));
        assert!(matches!(parse_expr("1 2", 0), Err(FuzzyError::Parse { pos: 2, .. })));
        assert!(matches!(parse_expr("abs(1, 2)", 0), Err(FuzzyError::Parse { pos: 0, .. })));
        assert!(matches!(parse_expr("min(1)", 0), Err(FuzzyError::Parse { .. })));
        assert!(matches!(parse_expr("1 $ 2", 0), Err(FuzzyError::Parse { pos: 2, .. })));
    }

    #[test]
    fn parse_is_deterministic() {
        let a = parse_expr("t1*(r-1) + max(t1, 2)^2", 1).unwrap();
        let b = parse_expr("t1*(r-1) + max(t1, 2)^2", 1).unwrap();
        assert_eq!(a, b);
    }
}
