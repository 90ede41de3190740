//! Univariate real expressions for coefficient functions such as `f(x)` and `g(x)`.
//!
//! Grammar (recursive descent, lowest precedence first):
//!
//! ```text
//! sum     := product (('+' | '-') product)*
//! product := unary (('*' | '/') unary)*
//! unary   := '-' unary | power
//! power   := atom ('^' unary)?
//! atom    := number | 'x' | func '(' sum ')' | '(' sum ')'
//! func    := sin | cos | tan | exp | log | sqrt | abs | atan
//! ```
//!
//! `^` is right-associative and binds tighter than unary minus, so `-x^2`
//! is `-(x^2)` and `2^3^2` is `2^9`. `log` is the natural logarithm.
//! Implicit multiplication and free identifiers are rejected.

use std::fmt;
use std::sync::Arc;

use thiserror::Error;

/// Malformed expression text.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("syntax error at offset {offset}: {message}")]
pub struct ParseError {
    /// Byte offset into the source text.
    pub offset: usize,
    pub message: String,
}

/// Failure to produce a finite real value.
#[derive(Debug, Clone, Copy, PartialEq, Error)]
pub enum EvalError {
    #[error("domain error: {what} at x = {x}")]
    Domain { what: &'static str, x: f64 },
    #[error("division by zero at x = {x}")]
    DivisionByZero { x: f64 },
    #[error("overflow at x = {x}")]
    Overflow { x: f64 },
}

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
    Sin,
    Cos,
    Tan,
    Exp,
    Log,
    Sqrt,
    Abs,
    Atan,
}

impl Func {
    pub const ALL: [Func; 8] = [
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Exp,
        Func::Log,
        Func::Sqrt,
        Func::Abs,
        Func::Atan,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Exp => "exp",
            Func::Log => "log",
            Func::Sqrt => "sqrt",
            Func::Abs => "abs",
            Func::Atan => "atan",
        }
    }

    fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }
}

/// Expression tree node. Every leaf is a constant or the variable `x`.
#[derive(Debug, Clone, PartialEq)]
pub enum Node {
    Const(f64),
    Var,
    Neg(Box<Node>),
    Binary(BinOp, Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

/// A parsed, immutable expression in the single variable `x`.
///
/// Cloning is cheap; evaluation takes `&self` and is safe from many threads.
#[derive(Debug, Clone, PartialEq)]
pub struct Expression {
    root: Arc<Node>,
}

impl Expression {
    pub fn parse(text: &str) -> Result<Self, ParseError> {
        parse(text)
    }

    pub fn from_node(root: Node) -> Self {
        Expression { root: Arc::new(root) }
    }

    pub fn constant(value: f64) -> Self {
        Self::from_node(Node::Const(value))
    }

    /// `factor * self`, used to build the transformed coefficients of
    /// reduced equations.
    pub fn scaled(&self, factor: f64) -> Self {
        Self::from_node(Node::Binary(
            BinOp::Mul,
            Box::new(Node::Const(factor)),
            Box::new((*self.root).clone()),
        ))
    }

    pub fn root(&self) -> &Node {
        &self.root
    }

    /// True when the tree contains no occurrence of `x`.
    pub fn is_constant(&self) -> bool {
        fn walk(n: &Node) -> bool {
            match n {
                Node::Const(_) => true,
                Node::Var => false,
                Node::Neg(a) | Node::Call(_, a) => walk(a),
                Node::Binary(_, a, b) => walk(a) && walk(b),
            }
        }
        walk(&self.root)
    }

    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        eval_node(&self.root, x)
    }
}

impl fmt::Display for Expression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_node(f, &self.root)
    }
}

fn write_node(f: &mut fmt::Formatter<'_>, n: &Node) -> fmt::Result {
    match n {
        Node::Const(c) if c.is_sign_negative() => write!(f, "({c})"),
        Node::Const(c) => write!(f, "{c}"),
        Node::Var => f.write_str("x"),
        Node::Neg(a) => {
            f.write_str("(-")?;
            write_node(f, a)?;
            f.write_str(")")
        }
        Node::Binary(op, a, b) => {
            let sym = match op {
                BinOp::Add => "+",
                BinOp::Sub => "-",
                BinOp::Mul => "*",
                BinOp::Div => "/",
                BinOp::Pow => "^",
            };
            f.write_str("(")?;
            write_node(f, a)?;
            f.write_str(sym)?;
            write_node(f, b)?;
            f.write_str(")")
        }
        Node::Call(func, a) => {
            write!(f, "{}(", func.name())?;
            write_node(f, a)?;
            f.write_str(")")
        }
    }
}

/// Parse expression text into an [`Expression`].
pub fn parse(text: &str) -> Result<Expression, ParseError> {
    let tokens = tokenize(text)?;
    let mut p = Parser { tokens: &tokens, pos: 0, len: text.len() };
    if tokens.is_empty() {
        return Err(ParseError { offset: 0, message: "empty expression".into() });
    }
    let root = p.sum()?;
    if let Some(t) = p.peek() {
        return Err(p.unexpected(t));
    }
    Ok(Expression::from_node(root))
}

/// Evaluate a parsed expression at `x`.
pub fn eval(e: &Expression, x: f64) -> Result<f64, EvalError> {
    e.eval(x)
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Token>, ParseError> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        if c.is_ascii_digit() || c == b'.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // exponent part: e or E, optional sign, at least one digit
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
            let v: f64 = s.parse().map_err(|_| ParseError {
                offset: start,
                message: format!("malformed number '{s}'"),
            })?;
            out.push(Token { tok: Tok::Num(v), offset: start });
            continue;
        }
        if c.is_ascii_alphabetic() || c == b'_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(text[start..i].to_string()), offset: start });
            continue;
        }
        let tok = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => Tok::Op(c as char),
            b'(' => Tok::LParen,
            b')' => Tok::RParen,
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ParseError {
                    offset: start,
                    message: format!("unexpected character '{ch}'"),
                });
            }
        };
        out.push(Token { tok, offset: start });
        i += 1;
    }
    Ok(out)
}

struct Parser<'a> {
    tokens: &'a [Token],
    pos: usize,
    len: usize,
}

impl<'a> Parser<'a> {
    fn peek(&self) -> Option<&'a Token> {
        self.tokens.get(self.pos)
    }

    fn bump(&mut self) -> Option<&'a Token> {
        let t = self.tokens.get(self.pos);
        self.pos += 1;
        t
    }

    fn eat_op(&mut self, ops: &[char]) -> Option<char> {
        match self.peek() {
            Some(Token { tok: Tok::Op(c), .. }) if ops.contains(c) => {
                self.pos += 1;
                Some(*c)
            }
            _ => None,
        }
    }

    fn unexpected(&self, t: &Token) -> ParseError {
        let what = match &t.tok {
            Tok::Num(v) => format!("number {v}"),
            Tok::Ident(s) => format!("identifier '{s}'"),
            Tok::Op(c) => format!("'{c}'"),
            Tok::LParen => "'('".into(),
            Tok::RParen => "')'".into(),
        };
        ParseError { offset: t.offset, message: format!("unexpected {what}") }
    }

    fn eof(&self) -> ParseError {
        ParseError { offset: self.len, message: "unexpected end of input".into() }
    }

    fn sum(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.product()?;
        while let Some(op) = self.eat_op(&['+', '-']) {
            let rhs = self.product()?;
            let op = if op == '+' { BinOp::Add } else { BinOp::Sub };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn product(&mut self) -> Result<Node, ParseError> {
        let mut lhs = self.unary()?;
        while let Some(op) = self.eat_op(&['*', '/']) {
            let rhs = self.unary()?;
            let op = if op == '*' { BinOp::Mul } else { BinOp::Div };
            lhs = Node::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ParseError> {
        if self.eat_op(&['-']).is_some() {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Node, ParseError> {
        let base = self.atom()?;
        if self.eat_op(&['^']).is_some() {
            let exp = self.unary()?;
            return Ok(Node::Binary(BinOp::Pow, Box::new(base), Box::new(exp)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> Result<Node, ParseError> {
        let t = self.bump().ok_or_else(|| self.eof())?;
        match &t.tok {
            Tok::Num(v) => Ok(Node::Const(*v)),
            Tok::Ident(name) if name == "x" => Ok(Node::Var),
            Tok::Ident(name) => {
                let func = Func::from_name(name).ok_or_else(|| ParseError {
                    offset: t.offset,
                    message: format!("unknown identifier '{name}'"),
                })?;
                match self.bump() {
                    Some(Token { tok: Tok::LParen, .. }) => {}
                    Some(other) => {
                        return Err(ParseError {
                            offset: other.offset,
                            message: format!("expected '(' after {name}"),
                        })
                    }
                    None => return Err(self.eof()),
                }
                let arg = self.sum()?;
                self.close_paren(t.offset)?;
                Ok(Node::Call(func, Box::new(arg)))
            }
            Tok::LParen => {
                let inner = self.sum()?;
                self.close_paren(t.offset)?;
                Ok(inner)
            }
            _ => Err(self.unexpected(t)),
        }
    }

    fn close_paren(&mut self, open_at: usize) -> Result<(), ParseError> {
        match self.bump() {
            Some(Token { tok: Tok::RParen, .. }) => Ok(()),
            Some(other) => Err(ParseError {
                offset: other.offset,
                message: format!("expected ')' to close '(' at offset {open_at}"),
            }),
            None => Err(ParseError {
                offset: self.len,
                message: format!("unbalanced '(' at offset {open_at}"),
            }),
        }
    }
}

/// Real power with the branch policy shared by the whole crate: a negative
/// base is only admitted for an integer exponent (within 2^-52 relative).
pub fn real_pow(base: f64, exp: f64) -> Option<f64> {
    if base >= 0.0 {
        if base == 0.0 && exp < 0.0 {
            return None;
        }
        return Some(base.powf(exp));
    }
    let n = exp.round();
    if (exp - n).abs() > f64::EPSILON * exp.abs().max(1.0) {
        return None;
    }
    if n.abs() <= i32::MAX as f64 {
        Some(base.powi(n as i32))
    } else {
        Some(base.powf(n))
    }
}

fn finite(v: f64, x: f64, what: &'static str) -> Result<f64, EvalError> {
    if v.is_nan() {
        Err(EvalError::Domain { what, x })
    } else if v.is_infinite() {
        Err(EvalError::Overflow { x })
    } else {
        Ok(v)
    }
}

fn eval_node(n: &Node, x: f64) -> Result<f64, EvalError> {
    match n {
        Node::Const(c) => finite(*c, x, "non-finite constant"),
        Node::Var => finite(x, x, "non-finite argument"),
        Node::Neg(a) => Ok(-eval_node(a, x)?),
        Node::Binary(op, a, b) => {
            let a = eval_node(a, x)?;
            let b = eval_node(b, x)?;
            match op {
                BinOp::Add => finite(a + b, x, "indeterminate sum"),
                BinOp::Sub => finite(a - b, x, "indeterminate difference"),
                BinOp::Mul => finite(a * b, x, "indeterminate product"),
                BinOp::Div => {
                    if b == 0.0 {
                        Err(EvalError::DivisionByZero { x })
                    } else {
                        finite(a / b, x, "indeterminate quotient")
                    }
                }
                BinOp::Pow => {
                    if a == 0.0 && b < 0.0 {
                        return Err(EvalError::DivisionByZero { x });
                    }
                    match real_pow(a, b) {
                        Some(v) => finite(v, x, "non-real power"),
                        None => Err(EvalError::Domain { what: "non-real power", x }),
                    }
                }
            }
        }
        Node::Call(func, a) => {
            let a = eval_node(a, x)?;
            match func {
                Func::Sin => finite(a.sin(), x, "sin of non-finite"),
                Func::Cos => finite(a.cos(), x, "cos of non-finite"),
                Func::Tan => finite(a.tan(), x, "tan pole"),
                Func::Exp => finite(a.exp(), x, "exp"),
                Func::Log => {
                    if a <= 0.0 {
                        Err(EvalError::Domain { what: "log of non-positive argument", x })
                    } else {
                        finite(a.ln(), x, "log")
                    }
                }
                Func::Sqrt => {
                    if a < 0.0 {
                        Err(EvalError::Domain { what: "sqrt of negative argument", x })
                    } else {
                        Ok(a.sqrt())
                    }
                }
                Func::Abs => Ok(a.abs()),
                Func::Atan => Ok(a.atan()),
            }
        }
    }
}
