//! Action macros: small programs over primitive actions.
//!
//! Text form, used by the session protocol:
//!
//! ```text
//! m ::= (do <action>) | (seq m m ...) | (repeat m) | (orelse m m)
//! ```

use std::fmt;
use std::str::FromStr;

use crate::action::{apply_action, Action, ActionError};
use crate::sexp::{ParseError, Parser, Tok};
use crate::statics::TypeCtx;
use crate::syntax::HoleGen;
use crate::zipper::ZExp;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Macro {
    Prim(Action),
    Seq(Box<Macro>, Box<Macro>),
    /// Run the body until it fails; keeps the state of the last success.
    Repeat(Box<Macro>),
    /// Run the second branch from the original state if the first fails.
    OrElse(Box<Macro>, Box<Macro>),
}

impl Macro {
    pub fn prim(a: Action) -> Macro {
        Macro::Prim(a)
    }

    pub fn seq(a: Macro, b: Macro) -> Macro {
        Macro::Seq(Box::new(a), Box::new(b))
    }

    pub fn repeat(m: Macro) -> Macro {
        Macro::Repeat(Box::new(m))
    }

    pub fn or_else(a: Macro, b: Macro) -> Macro {
        Macro::OrElse(Box::new(a), Box::new(b))
    }
}

impl fmt::Display for Macro {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Macro::Prim(a) => write!(f, "(do {a})"),
            Macro::Seq(a, b) => write!(f, "(seq {a} {b})"),
            Macro::Repeat(m) => write!(f, "(repeat {m})"),
            Macro::OrElse(a, b) => write!(f, "(orelse {a} {b})"),
        }
    }
}

fn parse_macro(p: &mut Parser) -> Result<Macro, ParseError> {
    p.open()?;
    let kw = p.keyword("`do`, `seq`, `repeat`, `orelse`")?;
    let m = match kw.as_str() {
        "do" => {
            let mut words = Vec::new();
            while let Tok::Atom(_) = p.peek() {
                words.push(p.atom("action word")?);
            }
            let text = words.join(" ");
            text.parse::<Action>().map_err(|err| p.error_msg(err.to_string()))?.into()
        }
        "seq" => {
            let mut parts = vec![parse_macro(p)?, parse_macro(p)?];
            while *p.peek() == Tok::Open {
                parts.push(parse_macro(p)?);
            }
            let last = parts.pop().expect("at least two");
            parts.into_iter().rev().fold(last, |acc, m| Macro::seq(m, acc))
        }
        "repeat" => Macro::repeat(parse_macro(p)?),
        "orelse" => {
            let a = parse_macro(p)?;
            Macro::or_else(a, parse_macro(p)?)
        }
        _ => return Err(p.error(&["`do`, `seq`, `repeat`, `orelse`"])),
    };
    p.close()?;
    Ok(m)
}

impl From<Action> for Macro {
    fn from(a: Action) -> Macro {
        Macro::Prim(a)
    }
}

impl FromStr for Macro {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Macro, ParseError> {
        let mut p = Parser::new(s);
        let m = parse_macro(&mut p)?;
        p.finish()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MacroRun {
    pub state: ZExp,
    /// Primitive actions that took effect, in order. Replaying them from the
    /// initial state reproduces `state`.
    pub trace: Vec<Action>,
}

struct Runner<'a> {
    ctx: &'a TypeCtx,
    budget: usize,
}

type Outcome = (ZExp, HoleGen, Vec<Action>);

impl Runner<'_> {
    fn exec(&mut self, z: &ZExp, gen: HoleGen, m: &Macro) -> Result<Outcome, ActionError> {
        match m {
            Macro::Prim(a) => {
                if self.budget == 0 {
                    return Err(ActionError::BudgetExhausted);
                }
                self.budget -= 1;
                let mut gen = gen;
                let z2 = apply_action(self.ctx, z, a, &mut gen)?;
                Ok((z2, gen, vec![a.clone()]))
            }
            Macro::Seq(a, b) => {
                let (z1, g1, mut t1) = self.exec(z, gen, a)?;
                let (z2, g2, t2) = self.exec(&z1, g1, b)?;
                t1.extend(t2);
                Ok((z2, g2, t1))
            }
            Macro::Repeat(body) => {
                let (mut cur, mut g, mut trace) = (z.clone(), gen, Vec::new());
                loop {
                    match self.exec(&cur, g, body) {
                        Ok((z2, g2, t)) => {
                            cur = z2;
                            g = g2;
                            trace.extend(t);
                        }
                        Err(ActionError::Invalid(_)) => return Ok((cur, g, trace)),
                        Err(err) => return Err(err),
                    }
                }
            }
            Macro::OrElse(a, b) => match self.exec(z, gen, a) {
                Err(ActionError::Invalid(_)) => self.exec(z, gen, b),
                other => other,
            },
        }
    }
}

/// Run a macro with at most `budget` primitive action attempts.
pub fn run_macro(ctx: &TypeCtx, z: &ZExp, m: &Macro, budget: usize, gen: &mut HoleGen) -> Result<MacroRun, ActionError> {
    let mut runner = Runner { ctx, budget };
    let (state, g, trace) = runner.exec(z, *gen, m)?;
    *gen = g;
    Ok(MacroRun { state, trace })
}
