//! Arithmetic expressions over `t`, `x`, `w` and the state integral `I`.
//!
//! Grammar: numbers, `+ - * /`, unary minus, parentheses and the functions
//! `sin cos exp floor` (one argument) and `min max` (two arguments).

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExprError {
    #[error("cannot parse `{src}` at column {column}: {message}")]
    Syntax {
        src: String,
        column: usize,
        message: String,
    },
    #[error("unknown symbol `{symbol}` in `{src}` (allowed: {allowed})")]
    UnknownSymbol {
        src: String,
        symbol: String,
        allowed: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Symbol {
    T,
    X,
    W,
    /// Integral of the current state over the domain.
    I,
}

impl Symbol {
    fn name(self) -> &'static str {
        match self {
            Symbol::T => "t",
            Symbol::X => "x",
            Symbol::W => "w",
            Symbol::I => "I",
        }
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

pub const ALL_SYMBOLS: &[Symbol] = &[Symbol::T, Symbol::X, Symbol::W, Symbol::I];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Func {
    Sin,
    Cos,
    Exp,
    Floor,
    Min,
    Max,
}

impl Func {
    fn lookup(name: &str) -> Option<Self> {
        Some(match name {
            "sin" => Func::Sin,
            "cos" => Func::Cos,
            "exp" => Func::Exp,
            "floor" => Func::Floor,
            "min" => Func::Min,
            "max" => Func::Max,
            _ => return None,
        })
    }

    fn arity(self) -> usize {
        match self {
            Func::Min | Func::Max => 2,
            _ => 1,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Node {
    Num(f64),
    Var(Symbol),
    Neg(Box<Node>),
    Bin(char, Box<Node>, Box<Node>),
    Call(Func, Vec<Node>),
}

impl Node {
    fn eval(&self, vars: &[f64; 4]) -> f64 {
        match self {
            Node::Num(v) => *v,
            Node::Var(s) => vars[*s as usize],
            Node::Neg(a) => -a.eval(vars),
            Node::Bin(op, a, b) => {
                let (a, b) = (a.eval(vars), b.eval(vars));
                match op {
                    '+' => a + b,
                    '-' => a - b,
                    '*' => a * b,
                    _ => a / b,
                }
            }
            Node::Call(f, args) => {
                let a = args[0].eval(vars);
                match f {
                    Func::Sin => a.sin(),
                    Func::Cos => a.cos(),
                    Func::Exp => a.exp(),
                    Func::Floor => a.floor(),
                    Func::Min => a.min(args[1].eval(vars)),
                    Func::Max => a.max(args[1].eval(vars)),
                }
            }
        }
    }

    fn visit_vars(&self, out: &mut Vec<Symbol>) {
        match self {
            Node::Num(_) => {}
            Node::Var(s) => {
                if !out.contains(s) {
                    out.push(*s)
                }
            }
            Node::Neg(a) => a.visit_vars(out),
            Node::Bin(_, a, b) => {
                a.visit_vars(out);
                b.visit_vars(out);
            }
            Node::Call(_, args) => args.iter().for_each(|a| a.visit_vars(out)),
        }
    }
}

struct Parser<'a> {
    src: &'a str,
    bytes: &'a [u8],
    pos: usize,
    allowed: &'a [Symbol],
}

impl Parser<'_> {
    fn fail<T>(&self, message: impl Into<String>) -> Result<T, ExprError> {
        Err(ExprError::Syntax {
            src: self.src.to_string(),
            column: self.pos + 1,
            message: message.into(),
        })
    }

    fn skip_ws(&mut self) {
        while self.pos < self.bytes.len() && self.bytes[self.pos].is_ascii_whitespace() {
            self.pos += 1;
        }
    }

    fn peek(&mut self) -> Option<u8> {
        self.skip_ws();
        self.bytes.get(self.pos).copied()
    }

    fn eat(&mut self, c: u8) -> bool {
        if self.peek() == Some(c) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expr(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.term()?;
        while let Some(c @ (b'+' | b'-')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(c as char, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Node, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(c @ (b'*' | b'/')) = self.peek() {
            self.pos += 1;
            lhs = Node::Bin(c as char, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Node, ExprError> {
        if self.eat(b'-') {
            return Ok(Node::Neg(Box::new(self.unary()?)));
        }
        if self.eat(b'+') {
            return self.unary();
        }
        self.atom()
    }

    fn atom(&mut self) -> Result<Node, ExprError> {
        match self.peek() {
            None => self.fail("unexpected end of expression"),
            Some(b'(') => {
                self.pos += 1;
                let inner = self.expr()?;
                if !self.eat(b')') {
                    return self.fail("expected `)`");
                }
                Ok(inner)
            }
            Some(c) if c.is_ascii_digit() || c == b'.' => self.number(),
            Some(c) if c.is_ascii_alphabetic() || c == b'_' => self.name(),
            Some(c) => self.fail(format!("unexpected `{}`", c as char)),
        }
    }

    fn number(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_digit() || b[self.pos] == b'.') {
            self.pos += 1;
        }
        if self.pos < b.len() && (b[self.pos] == b'e' || b[self.pos] == b'E') {
            let mut p = self.pos + 1;
            if p < b.len() && (b[p] == b'+' || b[p] == b'-') {
                p += 1;
            }
            if p < b.len() && b[p].is_ascii_digit() {
                while p < b.len() && b[p].is_ascii_digit() {
                    p += 1;
                }
                self.pos = p;
            }
        }
        match self.src[start..self.pos].parse::<f64>() {
            Ok(v) => Ok(Node::Num(v)),
            Err(_) => {
                self.pos = start;
                self.fail(format!("bad number `{}`", &self.src[start..self.pos.max(start + 1)]))
            }
        }
    }

    fn name(&mut self) -> Result<Node, ExprError> {
        let start = self.pos;
        let b = self.bytes;
        while self.pos < b.len() && (b[self.pos].is_ascii_alphanumeric() || b[self.pos] == b'_') {
            self.pos += 1;
        }
        let name = &self.src[start..self.pos];
        if let Some(func) = Func::lookup(name) {
            if !self.eat(b'(') {
                return self.fail(format!("expected `(` after `{name}`"));
            }
            let mut args = vec![self.expr()?];
            while self.eat(b',') {
                args.push(self.expr()?);
            }
            if !self.eat(b')') {
                return self.fail("expected `)`");
            }
            if args.len() != func.arity() {
                return self.fail(format!("`{name}` takes {} argument(s), got {}", func.arity(), args.len()));
            }
            return Ok(Node::Call(func, args));
        }
        match self.allowed.iter().find(|s| s.name() == name) {
            Some(&s) => Ok(Node::Var(s)),
            None => Err(ExprError::UnknownSymbol {
                src: self.src.to_string(),
                symbol: name.to_string(),
                allowed: self.allowed.iter().map(|s| s.name()).collect::<Vec<_>>().join(", "),
            }),
        }
    }
}

/// A parsed expression, evaluated with `(t, x, w, I)`.
#[derive(Debug, Clone, PartialEq)]
pub struct Expr {
    src: String,
    root: Node,
    vars: Vec<Symbol>,
}

impl Expr {
    pub fn parse(src: &str, allowed: &[Symbol]) -> Result<Self, ExprError> {
        let src = src.trim();
        let mut p = Parser {
            src,
            bytes: src.as_bytes(),
            pos: 0,
            allowed,
        };
        let root = p.expr()?;
        if p.peek().is_some() {
            return p.fail("unexpected trailing input");
        }
        let mut vars = Vec::new();
        root.visit_vars(&mut vars);
        Ok(Self {
            src: src.to_string(),
            root,
            vars,
        })
    }

    pub fn source(&self) -> &str {
        &self.src
    }

    pub fn uses(&self, s: Symbol) -> bool {
        self.vars.contains(&s)
    }

    pub fn eval(&self, t: f64, x: f64, w: f64, integral: f64) -> f64 {
        self.root.eval(&[t, x, w, integral])
    }
}
