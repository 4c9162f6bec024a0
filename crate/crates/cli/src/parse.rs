//! Pratt parser for the expression grammar.
//!
//! ```text
//! expr    := expr ('+' | '-') expr | expr ('*' | '/') expr | '-' expr
//!          | expr '^' expr            (right associative)
//!          | INT | IDENT | IDENT '\''* '(' args ')' | '(' expr ')'
//! ```
//!
//! Unary minus binds tighter than `*` and `/` but looser than `^`, so
//! `-x^2` is `-(x^2)`. `p/q` literals fold to exact rationals. `alpha` is an
//! alias for the order symbol `a`.

use std::fmt;

use kmn_core::expr::{diff, Expr, ExprError, Rational};
use num_bigint::BigInt;
use thiserror::Error;

/// Functions that may be applied to arbitrary arguments.
pub const USER_FUNCTIONS: [&str; 3] = ["h", "f", "g"];

#[derive(Debug, Error, Clone, PartialEq)]
pub struct ParseError {
    /// 1-based character column.
    pub column: usize,
    pub message: String,
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "column {}: {}", self.column, self.message)
    }
}

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Int(BigInt),
    Ident(String),
    Op(char),
    End,
}

#[derive(Clone, Debug)]
struct Token {
    tok: Tok,
    column: usize,
}

fn err<T>(column: usize, message: impl Into<String>) -> Result<T, ParseError> {
    Err(ParseError {
        column,
        message: message.into(),
    })
}

fn tokenize(src: &str) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = src.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = i + 1;
        if c.is_whitespace() {
            i += 1;
        } else if c.is_ascii_digit() {
            let start = i;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            if i < chars.len() && chars[i] == '.' {
                return err(i + 1, "decimal literals are not allowed; write p/q");
            }
            let text: String = chars[start..i].iter().collect();
            out.push(Token {
                tok: Tok::Int(text.parse().expect("digits")),
                column,
            });
        } else if c.is_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token {
                tok: Tok::Ident(chars[start..i].iter().collect()),
                column,
            });
        } else if "+-*/^(),'".contains(c) {
            out.push(Token { tok: Tok::Op(c), column });
            i += 1;
        } else if c == '.' {
            return err(column, "decimal literals are not allowed; write p/q");
        } else {
            return err(column, format!("unexpected character `{c}`"));
        }
    }
    out.push(Token {
        tok: Tok::End,
        column: chars.len() + 1,
    });
    Ok(out)
}

struct Parser {
    tokens: Vec<Token>,
    pos: usize,
}

const ADD: u8 = 10;
const MUL: u8 = 20;
const NEG: u8 = 25;
const POW: u8 = 30;

fn wrap(column: usize) -> impl Fn(ExprError) -> ParseError {
    move |e| ParseError {
        column,
        message: e.to_string(),
    }
}

impl Parser {
    fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    fn expect(&mut self, c: char) -> Result<(), ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Op(o) if o == c => Ok(()),
            _ => err(t.column, format!("expected `{c}`, found {}", describe(&t.tok))),
        }
    }

    fn expression(&mut self, min_bp: u8) -> Result<Expr, ParseError> {
        let mut lhs = self.prefix()?;
        loop {
            let (op, column) = match &self.peek().tok {
                Tok::Op(c @ ('+' | '-' | '*' | '/' | '^')) => (*c, self.peek().column),
                _ => break,
            };
            let (lbp, rbp) = match op {
                '+' | '-' => (ADD, ADD + 1),
                '*' | '/' => (MUL, MUL + 1),
                _ => (POW, POW),
            };
            if lbp < min_bp {
                break;
            }
            self.next();
            let rhs = self.expression(rbp)?;
            lhs = match op {
                '+' => lhs + rhs,
                '-' => lhs - rhs,
                '*' => lhs * rhs,
                '/' => {
                    if rhs.is_zero() {
                        return err(column, "division by zero");
                    }
                    lhs * Expr::recip(&rhs)
                }
                _ => Expr::pow(lhs, rhs),
            };
        }
        Ok(lhs)
    }

    fn prefix(&mut self) -> Result<Expr, ParseError> {
        let t = self.next();
        match t.tok {
            Tok::Int(n) => Ok(Expr::num(Rational::from_big(n, BigInt::from(1)).expect("nonzero denominator"))),
            Tok::Op('-') => Ok(-self.expression(NEG)?),
            Tok::Op('(') => {
                let e = self.expression(0)?;
                self.expect(')')?;
                Ok(e)
            }
            Tok::Ident(name) => self.identifier(name, t.column),
            other => err(t.column, format!("unexpected {}", describe(&other))),
        }
    }

    fn identifier(&mut self, name: String, column: usize) -> Result<Expr, ParseError> {
        let mut primes = 0u32;
        while self.peek().tok == Tok::Op('\'') {
            self.next();
            primes += 1;
        }
        if self.peek().tok != Tok::Op('(') {
            if primes > 0 {
                return err(column, format!("`{name}` with primes must be applied to an argument"));
            }
            return Ok(Expr::sym(if name == "alpha" { "a" } else { &name }));
        }
        self.next();
        let mut args = Vec::new();
        if self.peek().tok != Tok::Op(')') {
            loop {
                let arg_col = self.peek().column;
                args.push((self.expression(0)?, arg_col));
                if self.peek().tok == Tok::Op(',') {
                    self.next();
                } else {
                    break;
                }
            }
        }
        self.expect(')')?;
        let arity = |n: usize| -> Result<(), ParseError> {
            if args.len() != n {
                return err(column, format!("`{name}` takes {n} argument(s), got {}", args.len()));
            }
            Ok(())
        };
        if primes > 0 && !USER_FUNCTIONS.contains(&name.as_str()) {
            return err(column, format!("primes are only allowed on {}", USER_FUNCTIONS.join(", ")));
        }
        match name.as_str() {
            "diff" => {
                arity(3)?;
                let var = args[1].0.as_sym().ok_or(ParseError {
                    column: args[1].1,
                    message: "differentiation variable must be a symbol".into(),
                })?;
                let k = args[2]
                    .0
                    .as_int()
                    .filter(|k| (1..=64).contains(k))
                    .ok_or(ParseError {
                        column: args[2].1,
                        message: "derivative order must be a positive integer".into(),
                    })?;
                diff(&args[0].0, var, k as usize, None).map_err(wrap(column))
            }
            "fdiff" => {
                arity(3)?;
                let var = args[1].0.as_sym().ok_or(ParseError {
                    column: args[1].1,
                    message: "memory variable must be a symbol".into(),
                })?;
                Ok(Expr::frac(args[0].0.clone(), var, args[2].0.clone()))
            }
            "Gamma" => {
                arity(1)?;
                Ok(Expr::gamma(args[0].0.clone()))
            }
            "exp" => {
                arity(1)?;
                Ok(Expr::exp(args[0].0.clone()))
            }
            n if USER_FUNCTIONS.contains(&n) => {
                arity(1)?;
                Ok(Expr::func(n, primes, vec![args[0].0.clone()]))
            }
            _ => err(column, format!("unknown function `{name}`")),
        }
    }
}

fn describe(t: &Tok) -> String {
    match t {
        Tok::Int(n) => format!("number `{n}`"),
        Tok::Ident(s) => format!("identifier `{s}`"),
        Tok::Op(c) => format!("`{c}`"),
        Tok::End => "end of input".into(),
    }
}

/// Parses one expression.
pub fn parse_expression(src: &str) -> Result<Expr, ParseError> {
    let tokens = tokenize(src)?;
    let mut p = Parser { tokens, pos: 0 };
    if p.peek().tok == Tok::End {
        return err(1, "empty expression");
    }
    let e = p.expression(0)?;
    let t = p.peek();
    if t.tok != Tok::End {
        return err(t.column, format!("unexpected {}", describe(&t.tok)));
    }
    Ok(e)
}

/// Parses a data file: `#` starts a comment line, every other nonblank line
/// is one expression.
pub fn parse_lines(src: &str) -> Result<Vec<Expr>, (usize, ParseError)> {
    src.lines()
        .enumerate()
        .filter(|(_, l)| {
            let l = l.trim();
            !l.is_empty() && !l.starts_with('#')
        })
        .map(|(i, l)| parse_expression(l).map_err(|e| (i + 1, e)))
        .collect()
}
