//! Scalar expressions over the variables `t`, `x`, `u`, `v`.
//!
//! Nonlinearities and nonlocal maps are supplied as text in the problem
//! configuration. This module turns that text into an immutable tree which
//! can be evaluated from any number of threads.
//!
//! Grammar, lowest binding first:
//!
//! ```text
//! expr    := term (('+' | '-') term)*
//! term    := unary (('*' | '/') unary)*
//! unary   := ('-' | '+') unary | power
//! power   := primary ('^' exponent)?
//! exponent:= ('-' | '+') exponent | power
//! primary := number | name | name '(' expr (',' expr)* ')' | '(' expr ')'
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-2^2`
//! is `-4` and `2^3^2` is `512`. Names are the four variables, the
//! constants `pi` and `e`, and the whitelisted functions in [`Func`].

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use thiserror::Error;

/// Free variable of an expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Var {
    T,
    X,
    U,
    V,
}

impl Var {
    pub const ALL: [Var; 4] = [Var::T, Var::X, Var::U, Var::V];

    pub fn name(self) -> &'static str {
        match self {
            Var::T => "t",
            Var::X => "x",
            Var::U => "u",
            Var::V => "v",
        }
    }

    fn bit(self) -> u8 {
        1 << (self as u8)
    }
}

/// Set of variables referenced by an expression.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct VarSet(u8);

impl VarSet {
    pub fn contains(self, var: Var) -> bool {
        self.0 & var.bit() != 0
    }

    pub fn insert(&mut self, var: Var) {
        self.0 |= var.bit();
    }

    pub fn is_subset_of(self, allowed: &[Var]) -> bool {
        let mask = allowed.iter().fold(0u8, |m, v| m | v.bit());
        self.0 & !mask == 0
    }

    pub fn iter(self) -> impl Iterator<Item = Var> {
        Var::ALL.into_iter().filter(move |v| self.contains(*v))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BinOp {
    Add,
    Sub,
    Mul,
    Div,
    Pow,
}

impl BinOp {
    fn symbol(self) -> char {
        match self {
            BinOp::Add => '+',
            BinOp::Sub => '-',
            BinOp::Mul => '*',
            BinOp::Div => '/',
            BinOp::Pow => '^',
        }
    }
}

/// Whitelisted functions. There are no user-defined functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Func {
    Sin,
    Cos,
    Exp,
    Log,
    Sqrt,
    Abs,
    Min,
    Max,
    Tanh,
}

impl Func {
    pub const ALL: [Func; 9] = [
        Func::Sin,
        Func::Cos,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Min,
        Func::Max,
        Func::Tanh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Min => "min",
            Func::Max => "max",
            Func::Tanh => "tanh",
        }
    }

    pub fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }

    fn lookup(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree. Literals produced by the parser are always finite and
/// nonnegative; a leading minus is a [`Node::Neg`].
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var(Var),
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

/// Variable bindings for one evaluation.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct Point {
    pub t: f64,
    pub x: f64,
    pub u: f64,
    pub v: f64,
}

impl Point {
    pub fn new(t: f64, x: f64, u: f64, v: f64) -> Self {
        Point { t, x, u, v }
    }

    fn get(&self, var: Var) -> f64 {
        match var {
            Var::T => self.t,
            Var::X => self.x,
            Var::U => self.u,
            Var::V => self.v,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum ParseErrorKind {
    Empty,
    UnexpectedChar(char),
    UnexpectedToken(String),
    UnexpectedEnd,
    InvalidNumber(String),
    UnknownIdentifier(String),
    Arity {
        func: &'static str,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for ParseErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ParseErrorKind::Empty => write!(f, "empty expression"),
            ParseErrorKind::UnexpectedChar(c) => write!(f, "unexpected character '{c}'"),
            ParseErrorKind::UnexpectedToken(t) => write!(f, "unexpected token '{t}'"),
            ParseErrorKind::UnexpectedEnd => write!(f, "unexpected end of input"),
            ParseErrorKind::InvalidNumber(s) => write!(f, "invalid number '{s}'"),
            ParseErrorKind::UnknownIdentifier(s) => write!(f, "unknown identifier '{s}'"),
            ParseErrorKind::Arity {
                func,
                expected,
                found,
            } => write!(f, "{func} takes {expected} argument(s), got {found}"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("{kind} at byte {offset}")]
pub struct ParseError {
    pub kind: ParseErrorKind,
    pub offset: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("division by zero")]
    DivisionByZero,
    #[error("log of nonpositive value {0}")]
    LogDomain(f64),
    #[error("sqrt of negative value {0}")]
    SqrtDomain(f64),
    #[error("negative base {base} raised to non-integer power {exponent}")]
    PowDomain { base: f64, exponent: f64 },
    #[error("non-finite result")]
    NonFinite,
}

/// A parsed expression together with its source text.
#[derive(Debug, Clone)]
pub struct Expression {
    ast: Node,
    source: String,
}

impl PartialEq for Expression {
    fn eq(&self, other: &Self) -> bool {
        self.ast == other.ast
    }
}

impl Expression {
    pub fn parse(source: &str) -> Result<Self, ParseError> {
        let ast = Parser::new(source).parse()?;
        Ok(Expression {
            ast,
            source: source.to_string(),
        })
    }

    /// Wraps an existing tree; the source becomes its canonical printing.
    pub fn from_ast(ast: Node) -> Self {
        let source = ast.to_string();
        Expression { ast, source }
    }

    pub fn constant(value: f64) -> Self {
        Expression::from_ast(Node::Const(value))
    }

    pub fn ast(&self) -> &Node {
        &self.ast
    }

    pub fn source(&self) -> &str {
        &self.source
    }

    pub fn variables(&self) -> VarSet {
        let mut set = VarSet::default();
        self.ast.collect_vars(&mut set);
        set
    }

    pub fn eval(&self, at: Point) -> Result<f64, EvalError> {
        self.ast.eval(&at)
    }

    /// Convenience wrapper over [`Expression::eval`].
    pub fn evaluate(&self, t: f64, x: f64, u: f64, v: f64) -> Result<f64, EvalError> {
        self.eval(Point::new(t, x, u, v))
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.ast.fmt(f)
    }
}

impl Node {
    fn collect_vars(&self, set: &mut VarSet) {
        match self {
            Node::Const(_) => {}
            Node::Var(v) => set.insert(*v),
            Node::Neg(a) => a.collect_vars(set),
            Node::Binary(_, a, b) => {
                a.collect_vars(set);
                b.collect_vars(set);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.collect_vars(set)),
        }
    }

    pub fn eval(&self, at: &Point) -> Result<f64, EvalError> {
        let value = match self {
            Node::Const(c) => *c,
            Node::Var(v) => at.get(*v),
            Node::Neg(a) => -a.eval(at)?,
            Node::Binary(op, a, b) => {
                let a = a.eval(at)?;
                let b = b.eval(at)?;
                match op {
                    BinOp::Add => a + b,
                    BinOp::Sub => a - b,
                    BinOp::Mul => a * b,
                    BinOp::Div => {
                        if b == 0.0 {
                            return Err(EvalError::DivisionByZero);
                        }
                        a / b
                    }
                    BinOp::Pow => power(a, b)?,
                }
            }
            Node::Call(func, args) => {
                let a = args[0].eval(at)?;
                match func {
                    Func::Sin => libm::sin(a),
                    Func::Cos => libm::cos(a),
                    Func::Exp => libm::exp(a),
                    Func::Log => {
                        if a <= 0.0 {
                            return Err(EvalError::LogDomain(a));
                        }
                        libm::log(a)
                    }
                    Func::Sqrt => {
                        if a < 0.0 {
                            return Err(EvalError::SqrtDomain(a));
                        }
                        libm::sqrt(a)
                    }
                    Func::Abs => libm::fabs(a),
                    Func::Tanh => libm::tanh(a),
                    Func::Min => {
                        let b = args[1].eval(at)?;
                        if a <= b {
                            a
                        } else {
                            b
                        }
                    }
                    Func::Max => {
                        let b = args[1].eval(at)?;
                        if a >= b {
                            a
                        } else {
                            b
                        }
                    }
                }
            }
        };
        if value.is_finite() {
            Ok(value)
        } else {
            Err(EvalError::NonFinite)
        }
    }
}

fn power(base: f64, exponent: f64) -> Result<f64, EvalError> {
    if base < 0.0 && libm::trunc(exponent) != exponent {
        return Err(EvalError::PowDomain { base, exponent });
    }
    if base == 0.0 && exponent < 0.0 {
        return Err(EvalError::DivisionByZero);
    }
    Ok(libm::pow(base, exponent))
}

/// Fully parenthesized printing; `parse(print(e))` rebuilds the same tree.
impl fmt::Display for Node {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            // Debug formatting of f64 is the shortest round-tripping form.
            Node::Const(c) => write!(f, "{c:?}"),
            Node::Var(v) => f.write_str(v.name()),
            Node::Neg(a) => write!(f, "(-{a})"),
            Node::Binary(op, a, b) => write!(f, "({a} {} {b})", op.symbol()),
            Node::Call(func, args) => {
                write!(f, "{}(", func.name())?;
                for (i, a) in args.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{a}")?;
                }
                f.write_str(")")
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

struct Parser<'a> {
    src: &'a str,
    tokens: Vec<(Token, usize)>,
    pos: usize,
}

impl<'a> Parser<'a> {
    fn new(src: &'a str) -> Self {
        Parser {
            src,
            tokens: Vec::new(),
            pos: 0,
        }
    }

    fn err(kind: ParseErrorKind, offset: usize) -> ParseError {
        ParseError { kind, offset }
    }

    fn tokenize(&mut self) -> Result<(), ParseError> {
        let bytes = self.src.as_bytes();
        let mut i = 0;
        while i < bytes.len() {
            let c = bytes[i];
            match c {
                b' ' | b'\t' | b'\n' | b'\r' => i += 1,
                b'0'..=b'9' | b'.' => {
                    let start = i;
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
                    let text = &self.src[start..i];
                    let value: f64 = text.parse().map_err(|_| {
                        Self::err(ParseErrorKind::InvalidNumber(text.to_string()), start)
                    })?;
                    if !value.is_finite() {
                        return Err(Self::err(
                            ParseErrorKind::InvalidNumber(text.to_string()),
                            start,
                        ));
                    }
                    self.tokens.push((Token::Num(value), start));
                }
                b'a'..=b'z' | b'A'..=b'Z' | b'_' => {
                    let start = i;
                    while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_')
                    {
                        i += 1;
                    }
                    self.tokens
                        .push((Token::Ident(self.src[start..i].to_string()), start));
                }
                b'+' | b'-' | b'*' | b'/' | b'^' => {
                    self.tokens.push((Token::Op(c as char), i));
                    i += 1;
                }
                b'(' => {
                    self.tokens.push((Token::LParen, i));
                    i += 1;
                }
                b')' => {
                    self.tokens.push((Token::RParen, i));
                    i += 1;
                }
                b',' => {
                    self.tokens.push((Token::Comma, i));
                    i += 1;
                }
                _ => {
                    let ch = self.src[i..].chars().next().unwrap_or('?');
                    return Err(Self::err(ParseErrorKind::UnexpectedChar(ch), i));
                }
            }
        }
        Ok(())
    }

    fn parse(mut self) -> Result<Node, ParseError> {
        self.tokenize()?;
        if self.tokens.is_empty() {
            return Err(Self::err(ParseErrorKind::Empty, 0));
        }
        let node = self.expr()?;
        if let Some((tok, off)) = self.tokens.get(self.pos) {
            return Err(Self::err(
                ParseErrorKind::UnexpectedToken(token_text(tok)),
                *off,
            ));
        }
        Ok(node)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|(t, _)| t)
    }

    fn offset(&self) -> usize {
        self.tokens
            .get(self.pos)
            .map(|(_, o)| *o)
            .unwrap_or(self.src.len())
    }

    fn next(&mut self) -> Result<(Token, usize), ParseError> {
        let item = self
            .tokens
            .get(self.pos)
            .cloned()
            .ok_or_else(|| Self::err(ParseErrorKind::UnexpectedEnd, self.src.len()))?;
        self.pos += 1;
        Ok(item)
    }

    fn expect(&mut self, want: Token) -> Result<(), ParseError> {
        let (tok, off) = self.next()?;
        if tok == want {
            Ok(())
        } else {
            Err(Self::err(
                ParseErrorKind::UnexpectedToken(token_text(&tok)),
                off,
            ))
        }
    }

    fn expr(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(c @ ('+' | '-'))) = self.peek() {
            let op = if *c == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(c @ ('*' | '/'))) = self.peek() {
            let op = if *c == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.unary()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.unary()
            }
            _ => self.power(),
        }
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.primary()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.exponent()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn exponent(&mut self) -> Result<Node, ParseError> {
        match self.peek() {
            Some(Token::Op('-')) => {
                self.pos += 1;
                Ok(Node::Neg(Box::new(self.exponent()?)))
            }
            Some(Token::Op('+')) => {
                self.pos += 1;
                self.exponent()
            }
            _ => self.power(),
        }
    }

    fn primary(&mut self) -> Result<Node, ParseError> {
        let (tok, off) = self.next()?;
        match tok {
            Token::Num(v) => Ok(Node::Const(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen)?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let Some(func) = Func::lookup(&name) {
                    return self.call(func, off);
                }
                match name.as_str() {
                    "t" => Ok(Node::Var(Var::T)),
                    "x" => Ok(Node::Var(Var::X)),
                    "u" => Ok(Node::Var(Var::U)),
                    "v" => Ok(Node::Var(Var::V)),
                    "pi" => Ok(Node::Const(core::f64::consts::PI)),
                    "e" => Ok(Node::Const(core::f64::consts::E)),
                    _ => Err(Self::err(ParseErrorKind::UnknownIdentifier(name), off)),
                }
            }
            other => Err(Self::err(
                ParseErrorKind::UnexpectedToken(token_text(&other)),
                off,
            )),
        }
    }

    fn call(&mut self, func: Func, name_offset: usize) -> Result<Node, ParseError> {
        if self.peek() != Some(&Token::LParen) {
            let off = self.offset();
            return Err(Self::err(
                ParseErrorKind::Arity {
                    func: func.name(),
                    expected: func.arity(),
                    found: 0,
                },
                off.min(name_offset + func.name().len()),
            ));
        }
        self.pos += 1;
        let mut args = Vec::new();
        if self.peek() != Some(&Token::RParen) {
            args.push(self.expr()?);
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.expect(Token::RParen)?;
        if args.len() != func.arity() {
            return Err(Self::err(
                ParseErrorKind::Arity {
                    func: func.name(),
                    expected: func.arity(),
                    found: args.len(),
                },
                name_offset,
            ));
        }
        Ok(Node::Call(func, args))
    }
}

fn token_text(tok: &Token) -> String {
    match tok {
        Token::Num(v) => alloc::format!("{v}"),
        Token::Ident(s) => s.clone(),
        Token::Op(c) => c.to_string(),
        Token::LParen => "(".to_string(),
        Token::RParen => ")".to_string(),
        Token::Comma => ",".to_string(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use core::f64::consts::{FRAC_PI_2, PI};

    fn eval(s: &str, t: f64, x: f64, u: f64, v: f64) -> f64 {
        Expression::parse(s).unwrap().evaluate(t, x, u, v).unwrap()
    }

    #[test]
    fn single_variable() {
        assert_eq!(
            Expression::parse("u").unwrap().ast(),
            &Node::Var(Var::U)
        );
    }

    #[test]
    fn arithmetic_and_precedence() {
        assert_eq!(eval("2*u + v^2", 0.0, 0.0, 1.0, 3.0), 11.0);
        assert_eq!(eval("2+3*4", 0.0, 0.0, 0.0, 0.0), 14.0);
        assert_eq!(eval("2^3^2", 0.0, 0.0, 0.0, 0.0), 512.0);
        assert_eq!(eval("-2^2", 0.0, 0.0, 0.0, 0.0), -4.0);
        assert_eq!(eval("2^-1", 0.0, 0.0, 0.0, 0.0), 0.5);
        assert_eq!(eval("10-4-3", 0.0, 0.0, 0.0, 0.0), 3.0);
        assert_eq!(eval("64/4/2", 0.0, 0.0, 0.0, 0.0), 8.0);
        assert_eq!(eval("-u*v", 0.0, 0.0, 2.0, 3.0), -6.0);
    }

    #[test]
    fn functions() {
        assert_eq!(eval("min(u, 0.5)*sin(x)", 0.0, FRAC_PI_2, 2.0, 0.0), 0.5);
        let e = eval("exp(-t)*u", 1.0, 0.0, 1.0, 0.0);
        assert!((e - 0.36787944117144233).abs() < 1e-15);
        assert_eq!(eval("0", 3.0, 1.0, 2.0, 7.0), 0.0);
        assert_eq!(eval("u*v", 0.0, 0.0, 0.0, 123.0), 0.0);
        assert_eq!(eval("max(abs(-3), 2)", 0.0, 0.0, 0.0, 0.0), 3.0);
        assert!((eval("sin(pi)", 0.0, 0.0, 0.0, 0.0)).abs() < 1e-15);
        assert_eq!(eval("1.5e1 + 2E-1", 0.0, 0.0, 0.0, 0.0), 15.2);
        assert!((eval("pi/4", 0.0, 0.0, 0.0, 0.0) - PI / 4.0).abs() == 0.0);
    }

    #[test]
    fn parse_errors_carry_offsets() {
        let err = Expression::parse("u + * v").unwrap_err();
        assert_eq!(err.offset, 4);
        let err = Expression::parse("u + w").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownIdentifier("w".into()));
        assert_eq!(err.offset, 4);
        let err = Expression::parse("min(u)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 2, found: 1, .. }));
        let err = Expression::parse("sin(u, v)").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::Arity { expected: 1, found: 2, .. }));
        let err = Expression::parse("(u").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedEnd);
        let err = Expression::parse("u $").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnexpectedChar('$'));
        assert_eq!(err.offset, 2);
        assert_eq!(Expression::parse("").unwrap_err().kind, ParseErrorKind::Empty);
        assert_eq!(Expression::parse("   ").unwrap_err().kind, ParseErrorKind::Empty);
        assert!(Expression::parse("u v").is_err());
        assert!(Expression::parse("sin").is_err());
    }

    #[test]
    fn domain_errors() {
        let e = |s: &str| Expression::parse(s).unwrap().evaluate(0.0, 0.0, -1.0, 0.0);
        assert_eq!(e("1/v"), Err(EvalError::DivisionByZero));
        assert!(matches!(e("log(u)"), Err(EvalError::LogDomain(_))));
        assert!(matches!(e("log(v)"), Err(EvalError::LogDomain(_))));
        assert!(matches!(e("sqrt(u)"), Err(EvalError::SqrtDomain(_))));
        assert!(matches!(e("u^0.5"), Err(EvalError::PowDomain { .. })));
        assert_eq!(e("u^2"), Ok(1.0));
        assert_eq!(e("exp(1000)"), Err(EvalError::NonFinite));
    }

    #[test]
    fn printing_round_trips() {
        for s in [
            "2*u + v^2",
            "-2^2",
            "min(u, 0.5)*sin(x)",
            "3.5*min(max((u-0.05)/0.15, 0), 1)",
            "exp(-t)*u/(1+v)",
            "2^3^2",
            "1e-7*u",
        ] {
            let a = Expression::parse(s).unwrap();
            let b = Expression::parse(&a.to_string()).unwrap();
            assert_eq!(a, b, "{s} -> {a}");
        }
    }

    #[test]
    fn variable_sets() {
        let e = Expression::parse("u*sin(x) + t").unwrap();
        let vars = e.variables();
        assert!(vars.contains(Var::U) && vars.contains(Var::X) && vars.contains(Var::T));
        assert!(!vars.contains(Var::V));
        assert!(!vars.is_subset_of(&[Var::U, Var::V]));
        assert!(Expression::parse("u+v").unwrap().variables().is_subset_of(&[Var::U, Var::V]));
    }
}
