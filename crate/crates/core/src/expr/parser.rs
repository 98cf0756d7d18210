//! Precedence-climbing parser for the scalar-field grammar.
//!
//! | level | operators          | associativity |
//! |-------|--------------------|---------------|
//! | 1     | `+` `-` (binary)   | left          |
//! | 2     | `*` `/`            | left          |
//! | 3     | `-` (unary)        | prefix        |
//! | 4     | `^`                | right         |
//!
//! Function application and parentheses bind tightest. `-x^2` parses as
//! `-(x^2)` and `2^-1` as `2^(-1)`.

use super::{BinOp, Expr, ExprError, Func};

#[derive(Debug, Clone, PartialEq)]
enum Token {
    Num(f64),
    Ident(String),
    Op(char),
    LParen,
    RParen,
    Comma,
}

#[derive(Debug, Clone)]
struct Spanned {
    token: Token,
    offset: usize,
}

fn tokenize(text: &str) -> Result<Vec<Spanned>, ExprError> {
    let bytes = text.as_bytes();
    let mut tokens = Vec::new();
    let mut i = 0;
    while i < bytes.len() {
        let c = bytes[i];
        if c.is_ascii_whitespace() {
            i += 1;
            continue;
        }
        let start = i;
        let token = match c {
            b'+' | b'-' | b'*' | b'/' | b'^' => {
                i += 1;
                Token::Op(c as char)
            }
            b'(' => {
                i += 1;
                Token::LParen
            }
            b')' => {
                i += 1;
                Token::RParen
            }
            b',' => {
                i += 1;
                Token::Comma
            }
            b'0'..=b'9' | b'.' => {
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
                let literal = &text[start..i];
                let value: f64 = literal.parse().map_err(|_| ExprError::Syntax {
                    offset: start,
                    message: format!("malformed number `{literal}`"),
                })?;
                Token::Num(value)
            }
            c if c.is_ascii_alphabetic() || c == b'_' => {
                while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                    i += 1;
                }
                Token::Ident(text[start..i].to_string())
            }
            _ => {
                let ch = text[start..].chars().next().unwrap_or('?');
                return Err(ExprError::Syntax {
                    offset: start,
                    message: format!("unexpected character `{ch}`"),
                });
            }
        };
        tokens.push(Spanned {
            token,
            offset: start,
        });
    }
    Ok(tokens)
}

pub(super) struct Parser<'a> {
    tokens: Vec<Spanned>,
    pos: usize,
    end: usize,
    coords: &'a [String],
}

impl<'a> Parser<'a> {
    pub(super) fn new(text: &str, coords: &'a [String]) -> Result<Self, ExprError> {
        if text.trim().is_empty() {
            return Err(ExprError::Empty);
        }
        Ok(Self {
            tokens: tokenize(text)?,
            pos: 0,
            end: text.len(),
            coords,
        })
    }

    pub(super) fn parse(mut self) -> Result<Expr, ExprError> {
        let expr = self.expr()?;
        if let Some(tok) = self.tokens.get(self.pos) {
            return Err(ExprError::Syntax {
                offset: tok.offset,
                message: format!("unexpected trailing {}", describe(&tok.token)),
            });
        }
        Ok(expr)
    }

    fn peek(&self) -> Option<&Token> {
        self.tokens.get(self.pos).map(|s| &s.token)
    }

    fn offset(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end, |s| s.offset)
    }

    fn next(&mut self) -> Option<Spanned> {
        let tok = self.tokens.get(self.pos).cloned();
        self.pos += 1;
        tok
    }

    fn expect(&mut self, want: Token, what: &str) -> Result<(), ExprError> {
        let offset = self.offset();
        match self.next() {
            Some(s) if s.token == want => Ok(()),
            Some(s) => Err(ExprError::Syntax {
                offset,
                message: format!("expected {what}, found {}", describe(&s.token)),
            }),
            None => Err(ExprError::Syntax {
                offset,
                message: format!("expected {what}, found end of input"),
            }),
        }
    }

    fn expr(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.term()?;
        while let Some(Token::Op(op @ ('+' | '-'))) = self.peek() {
            let op = if *op == '+' { BinOp::Add } else { BinOp::Sub };
            self.pos += 1;
            let rhs = self.term()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> Result<Expr, ExprError> {
        let mut lhs = self.unary()?;
        while let Some(Token::Op(op @ ('*' | '/'))) = self.peek() {
            let op = if *op == '*' { BinOp::Mul } else { BinOp::Div };
            self.pos += 1;
            let rhs = self.unary()?;
            lhs = Expr::Binary(op, Box::new(lhs), Box::new(rhs));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> Result<Expr, ExprError> {
        if let Some(Token::Op('-')) = self.peek() {
            self.pos += 1;
            let inner = self.unary()?;
            return Ok(Expr::Neg(Box::new(inner)));
        }
        self.power()
    }

    fn power(&mut self) -> Result<Expr, ExprError> {
        let base = self.primary()?;
        if let Some(Token::Op('^')) = self.peek() {
            self.pos += 1;
            let exponent = self.unary()?;
            return Ok(Expr::Binary(BinOp::Pow, Box::new(base), Box::new(exponent)));
        }
        Ok(base)
    }

    fn primary(&mut self) -> Result<Expr, ExprError> {
        let offset = self.offset();
        let Some(Spanned { token, .. }) = self.next() else {
            return Err(ExprError::Syntax {
                offset,
                message: "unexpected end of input".into(),
            });
        };
        match token {
            Token::Num(v) => Ok(Expr::Num(v)),
            Token::LParen => {
                let inner = self.expr()?;
                self.expect(Token::RParen, "`)`")?;
                Ok(inner)
            }
            Token::Ident(name) => {
                if let Some(func) = Func::from_name(&name) {
                    self.call(func, &name, offset)
                } else if let Some(index) = self.coords.iter().position(|c| *c == name) {
                    Ok(Expr::Var(index))
                } else {
                    Err(ExprError::UnknownIdentifier { name, offset })
                }
            }
            other => Err(ExprError::Syntax {
                offset,
                message: format!("unexpected {}", describe(&other)),
            }),
        }
    }

    fn call(&mut self, func: Func, name: &str, offset: usize) -> Result<Expr, ExprError> {
        self.expect(Token::LParen, &format!("`(` after `{name}`"))?;
        let mut args = Vec::new();
        if self.peek() != Some(&Token::RParen) {
            args.push(self.expr()?);
            while self.peek() == Some(&Token::Comma) {
                self.pos += 1;
                args.push(self.expr()?);
            }
        }
        self.expect(Token::RParen, "`)`")?;
        if args.len() != 1 {
            return Err(ExprError::Arity {
                name: name.to_string(),
                expected: 1,
                found: args.len(),
                offset,
            });
        }
        let arg = args.pop().expect("one argument");
        Ok(Expr::Call(func, Box::new(arg)))
    }
}

fn describe(token: &Token) -> String {
    match token {
        Token::Num(v) => format!("number `{v}`"),
        Token::Ident(s) => format!("identifier `{s}`"),
        Token::Op(c) => format!("`{c}`"),
        Token::LParen => "`(`".into(),
        Token::RParen => "`)`".into(),
        Token::Comma => "`,`".into(),
    }
}
