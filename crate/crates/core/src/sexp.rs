//! Parenthesized prefix text format.
//!
//! ```text
//! t ::= num | thole | (arrow t t)
//! e ::= (var id) | (lam id e) | (ap e e) | (num int) | (plus e e)
//!     | (asc e t) | (hole nat) | (nehole nat e)
//! ```
//!
//! Rendered edit states additionally wrap the cursor subterm in `(cursor ...)`.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::syntax::{is_ident, HExp, HTyp, HoleName};
use crate::zipper::{Path, ZExp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("parse error at {line}:{col}: {message}")]
pub struct ParseError {
    /// 1-based.
    pub line: usize,
    /// 1-based.
    pub col: usize,
    /// Tokens or token classes that would have been accepted here.
    pub expected: Vec<String>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub(crate) enum Tok {
    Open,
    Close,
    Atom(String),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Open => f.write_str("`(`"),
            Tok::Close => f.write_str("`)`"),
            Tok::Atom(a) => write!(f, "`{a}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn tokenize(src: &str) -> Vec<Spanned> {
    let mut out = Vec::new();
    let (mut line, mut col) = (1, 1);
    let mut chars = src.chars().peekable();
    while let Some(&c) = chars.peek() {
        match c {
            '\n' => {
                chars.next();
                line += 1;
                col = 1;
            }
            c if c.is_whitespace() => {
                chars.next();
                col += 1;
            }
            '(' | ')' => {
                chars.next();
                let tok = if c == '(' { Tok::Open } else { Tok::Close };
                out.push(Spanned { tok, line, col });
                col += 1;
            }
            _ => {
                let start = col;
                let mut atom = String::new();
                while let Some(&c) = chars.peek() {
                    if c.is_whitespace() || c == '(' || c == ')' {
                        break;
                    }
                    atom.push(c);
                    chars.next();
                    col += 1;
                }
                out.push(Spanned { tok: Tok::Atom(atom), line, col: start });
            }
        }
    }
    out.push(Spanned { tok: Tok::Eof, line, col });
    out
}

/// Recursive-descent parser over the token stream. Shared with the result
/// and macro grammars.
pub(crate) struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
    allow_cursor: bool,
    cursor: Option<Path>,
}

const EXP_KEYWORDS: &str = "`var`, `lam`, `ap`, `num`, `plus`, `asc`, `hole`, `nehole`";

impl Parser {
    pub(crate) fn new(src: &str) -> Parser {
        Parser { toks: tokenize(src), pos: 0, allow_cursor: false, cursor: None }
    }

    pub(crate) fn peek(&self) -> &Tok {
        &self.toks[self.pos].tok
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].tok.clone();
        if t != Tok::Eof {
            self.pos += 1;
        }
        t
    }

    pub(crate) fn error(&self, expected: &[&str]) -> ParseError {
        let here = &self.toks[self.pos];
        let expected: Vec<String> = expected.iter().map(|s| s.to_string()).collect();
        ParseError {
            line: here.line,
            col: here.col,
            message: format!("expected {}, found {}", expected.join(" or "), here.tok),
            expected,
        }
    }

    pub(crate) fn error_msg(&self, message: String) -> ParseError {
        let here = &self.toks[self.pos];
        ParseError { line: here.line, col: here.col, expected: vec![], message }
    }

    pub(crate) fn open(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Open => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&["`(`"])),
        }
    }

    pub(crate) fn close(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Close => {
                self.bump();
                Ok(())
            }
            _ => Err(self.error(&["`)`"])),
        }
    }

    pub(crate) fn atom(&mut self, what: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Atom(a) => {
                let a = a.clone();
                self.bump();
                Ok(a)
            }
            _ => Err(self.error(&[what])),
        }
    }

    pub(crate) fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Atom(a) if is_ident(a) => self.atom("identifier"),
            _ => Err(self.error(&["identifier"])),
        }
    }

    pub(crate) fn int(&mut self) -> Result<BigInt, ParseError> {
        match self.peek() {
            Tok::Atom(a) if is_int_literal(a) => {
                let n = BigInt::from_str(a).expect("checked literal");
                self.bump();
                Ok(n)
            }
            _ => Err(self.error(&["integer"])),
        }
    }

    pub(crate) fn nat(&mut self) -> Result<u64, ParseError> {
        match self.peek() {
            Tok::Atom(a) if !a.is_empty() && a.bytes().all(|b| b.is_ascii_digit()) => match a.parse::<u64>() {
                Ok(n) => {
                    self.bump();
                    Ok(n)
                }
                Err(_) => Err(self.error_msg(format!("hole name `{a}` out of range"))),
            },
            _ => Err(self.error(&["natural number"])),
        }
    }

    pub(crate) fn keyword(&mut self, allowed: &str) -> Result<String, ParseError> {
        match self.peek() {
            Tok::Atom(_) => self.atom(allowed),
            _ => Err(self.error(&[allowed])),
        }
    }

    pub(crate) fn finish(&mut self) -> Result<(), ParseError> {
        match self.peek() {
            Tok::Eof => Ok(()),
            _ => Err(self.error(&["end of input"])),
        }
    }

    pub(crate) fn typ(&mut self, path: &mut Vec<usize>) -> Result<HTyp, ParseError> {
        match self.peek().clone() {
            Tok::Atom(a) if a == "num" => {
                self.bump();
                Ok(HTyp::Num)
            }
            Tok::Atom(a) if a == "thole" => {
                self.bump();
                Ok(HTyp::Hole)
            }
            Tok::Open => {
                self.bump();
                let kw = self.keyword("`arrow`")?;
                match kw.as_str() {
                    "arrow" => {
                        path.push(0);
                        let a = self.typ(path)?;
                        path.pop();
                        path.push(1);
                        let b = self.typ(path)?;
                        path.pop();
                        self.close()?;
                        Ok(HTyp::arrow(a, b))
                    }
                    "cursor" if self.allow_cursor => {
                        self.mark_cursor(path)?;
                        let t = self.typ(path)?;
                        self.close()?;
                        Ok(t)
                    }
                    _ => {
                        self.pos -= 1;
                        Err(self.error(&["`arrow`"]))
                    }
                }
            }
            _ => Err(self.error(&["`num`", "`thole`", "`(`"])),
        }
    }

    fn mark_cursor(&mut self, path: &[usize]) -> Result<(), ParseError> {
        if self.cursor.is_some() {
            self.pos -= 1;
            return Err(self.error_msg("more than one cursor".into()));
        }
        self.cursor = Some(Path(path.to_vec()));
        Ok(())
    }

    pub(crate) fn exp(&mut self, path: &mut Vec<usize>) -> Result<HExp, ParseError> {
        self.open()?;
        let kw = self.keyword(EXP_KEYWORDS)?;
        let child = |p: &mut Parser, k: usize, path: &mut Vec<usize>| {
            path.push(k);
            let e = p.exp(path);
            path.pop();
            e
        };
        let e = match kw.as_str() {
            "var" => HExp::Var(self.ident()?),
            "lam" => {
                let x = self.ident()?;
                HExp::Lam(x, Box::new(child(self, 0, path)?))
            }
            "ap" => {
                let f = child(self, 0, path)?;
                HExp::ap(f, child(self, 1, path)?)
            }
            "num" => HExp::Num(self.int()?),
            "plus" => {
                let l = child(self, 0, path)?;
                HExp::plus(l, child(self, 1, path)?)
            }
            "asc" => {
                let s = child(self, 0, path)?;
                path.push(1);
                let t = self.typ(path)?;
                path.pop();
                HExp::asc(s, t)
            }
            "hole" => HExp::EHole(HoleName(self.nat()?)),
            "nehole" => {
                let u = HoleName(self.nat()?);
                HExp::NEHole(u, Box::new(child(self, 0, path)?))
            }
            "cursor" if self.allow_cursor => {
                self.mark_cursor(path)?;
                self.exp(path)?
            }
            _ => {
                self.pos -= 1;
                return Err(self.error(&[EXP_KEYWORDS]));
            }
        };
        self.close()?;
        Ok(e)
    }
}

fn is_int_literal(s: &str) -> bool {
    let digits = s.strip_prefix('-').unwrap_or(s);
    !digits.is_empty() && digits.bytes().all(|b| b.is_ascii_digit())
}

/// Parse one expression. Hole names must be pairwise distinct.
pub fn parse(src: &str) -> Result<HExp, ParseError> {
    let mut p = Parser::new(src);
    let e = p.exp(&mut Vec::new())?;
    p.finish()?;
    if let Some(u) = e.duplicate_hole() {
        return Err(ParseError { line: 1, col: 1, expected: vec![], message: format!("hole name {u} used more than once") });
    }
    Ok(e)
}

pub fn parse_typ(src: &str) -> Result<HTyp, ParseError> {
    let mut p = Parser::new(src);
    let t = p.typ(&mut Vec::new())?;
    p.finish()?;
    Ok(t)
}

/// Parse a rendered edit state containing exactly one `(cursor ...)` wrapper.
pub fn parse_zexp(src: &str) -> Result<ZExp, ParseError> {
    let mut p = Parser::new(src);
    p.allow_cursor = true;
    let e = p.exp(&mut Vec::new())?;
    p.finish()?;
    let Some(cursor) = p.cursor.take() else {
        return Err(p.error_msg("missing `(cursor ...)` mark".into()));
    };
    Ok(ZExp::new(e, cursor).expect("cursor path recorded during parse"))
}

pub fn serialize(e: &HExp) -> String {
    e.to_string()
}

pub fn serialize_typ(t: &HTyp) -> String {
    t.to_string()
}

fn write_typ(out: &mut String, t: &HTyp, cursor: Option<&[usize]>) {
    if cursor == Some(&[]) {
        out.push_str("(cursor ");
        write_typ(out, t, None);
        out.push(')');
        return;
    }
    let sub = |k: usize| match cursor {
        Some([first, rest @ ..]) if *first == k => Some(rest),
        _ => None,
    };
    match t {
        HTyp::Num => out.push_str("num"),
        HTyp::Hole => out.push_str("thole"),
        HTyp::Arrow(a, b) => {
            out.push_str("(arrow ");
            write_typ(out, a, sub(0));
            out.push(' ');
            write_typ(out, b, sub(1));
            out.push(')');
        }
    }
}

fn write_exp(out: &mut String, e: &HExp, cursor: Option<&[usize]>) {
    if cursor == Some(&[]) {
        out.push_str("(cursor ");
        write_exp(out, e, None);
        out.push(')');
        return;
    }
    let sub = |k: usize| match cursor {
        Some([first, rest @ ..]) if *first == k => Some(rest),
        _ => None,
    };
    match e {
        HExp::Var(x) => write!(out, "(var {x})").unwrap(),
        HExp::Lam(x, b) => {
            write!(out, "(lam {x} ").unwrap();
            write_exp(out, b, sub(0));
            out.push(')');
        }
        HExp::Ap(f, a) => {
            out.push_str("(ap ");
            write_exp(out, f, sub(0));
            out.push(' ');
            write_exp(out, a, sub(1));
            out.push(')');
        }
        HExp::Num(n) => write!(out, "(num {n})").unwrap(),
        HExp::Plus(l, r) => {
            out.push_str("(plus ");
            write_exp(out, l, sub(0));
            out.push(' ');
            write_exp(out, r, sub(1));
            out.push(')');
        }
        HExp::Asc(s, t) => {
            out.push_str("(asc ");
            write_exp(out, s, sub(0));
            out.push(' ');
            write_typ(out, t, sub(1));
            out.push(')');
        }
        HExp::EHole(u) => write!(out, "(hole {u})").unwrap(),
        HExp::NEHole(u, s) => {
            write!(out, "(nehole {u} ").unwrap();
            write_exp(out, s, sub(0));
            out.push(')');
        }
    }
}

/// Render an edit state with its cursor marked inline.
pub fn render_zexp(z: &ZExp) -> String {
    let mut out = String::new();
    write_exp(&mut out, z.expr(), Some(z.cursor().steps()));
    out
}

impl fmt::Display for HExp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_exp(&mut out, self, None);
        f.write_str(&out)
    }
}

impl fmt::Display for HTyp {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        write_typ(&mut out, self, None);
        f.write_str(&out)
    }
}

impl FromStr for HExp {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<HExp, ParseError> {
        parse(s)
    }
}

impl FromStr for HTyp {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<HTyp, ParseError> {
        parse_typ(s)
    }
}
