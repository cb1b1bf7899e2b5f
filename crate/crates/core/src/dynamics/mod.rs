//! Evaluation of incomplete programs.
//!
//! Evaluation is strict, left to right, and never gets stuck on a
//! well-typed program: a hole evaluates to a hole closure that records the
//! environment it was reached in, and eliminations blocked by a hole stay in
//! the result as indeterminate forms. Filling a hole in a result and resuming
//! gives the same result as filling the program and evaluating again.

pub mod step;

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use thiserror::Error;

use crate::sexp::{ParseError, Parser, Tok};
use crate::statics::{position_at, synthesize, StaticError, TypeCtx};
use crate::syntax::{HExp, HoleName};
use crate::zipper::find_hole;

/// Runtime environment. Maps every variable in scope to its result.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Env(BTreeMap<String, EvalResult>);

impl Env {
    pub fn new() -> Env {
        Env::default()
    }

    pub fn get(&self, x: &str) -> Option<&EvalResult> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: impl Into<String>, r: EvalResult) {
        self.0.insert(x.into(), r);
    }

    pub fn extend(&self, x: &str, r: EvalResult) -> Env {
        let mut out = self.clone();
        out.insert(x, r);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &EvalResult)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    fn map(&self, f: impl Fn(&EvalResult) -> EvalResult) -> Env {
        Env(self.0.iter().map(|(x, r)| (x.clone(), f(r))).collect())
    }
}

impl FromIterator<(String, EvalResult)> for Env {
    fn from_iter<I: IntoIterator<Item = (String, EvalResult)>>(iter: I) -> Env {
        Env(iter.into_iter().collect())
    }
}

/// Outcome of evaluating a possibly incomplete program.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum EvalResult {
    VNum(BigInt),
    VClosure(String, HExp, Env),
    /// An empty hole together with the environment it was reached in.
    IHole(HoleName, Env),
    INEHole(HoleName, Box<EvalResult>, Env),
    /// Application whose head is indeterminate, or a number reached through
    /// a type hole.
    IAp(Box<EvalResult>, Box<EvalResult>),
    /// Addition with an operand that is indeterminate or not a number.
    IPlus(Box<EvalResult>, Box<EvalResult>),
}

impl EvalResult {
    pub fn num(n: i64) -> EvalResult {
        EvalResult::VNum(BigInt::from(n))
    }

    pub fn is_value(&self) -> bool {
        matches!(self, EvalResult::VNum(_) | EvalResult::VClosure(..))
    }

    pub fn is_indeterminate(&self) -> bool {
        !self.is_value()
    }

    /// Checks the shape invariants of normal forms: no reducible
    /// application or addition remains anywhere in the result.
    pub fn is_normal(&self) -> bool {
        let env_ok = |env: &Env| env.iter().all(|(_, r)| r.is_normal());
        match self {
            EvalResult::VNum(_) => true,
            EvalResult::VClosure(_, _, env) | EvalResult::IHole(_, env) => env_ok(env),
            EvalResult::INEHole(_, r, env) => r.is_normal() && env_ok(env),
            EvalResult::IAp(f, a) => !matches!(**f, EvalResult::VClosure(..)) && f.is_normal() && a.is_normal(),
            EvalResult::IPlus(l, r) => {
                !(matches!(**l, EvalResult::VNum(_)) && matches!(**r, EvalResult::VNum(_))) && l.is_normal() && r.is_normal()
            }
        }
    }

    /// Names of holes whose closures occur anywhere in the result.
    pub fn mentions_hole(&self, u: HoleName) -> bool {
        let in_env = |env: &Env| env.iter().any(|(_, r)| r.mentions_hole(u));
        match self {
            EvalResult::VNum(_) => false,
            EvalResult::VClosure(_, body, env) => body.hole_names().contains(&u) || in_env(env),
            EvalResult::IHole(v, env) => *v == u || in_env(env),
            EvalResult::INEHole(v, r, env) => *v == u || r.mentions_hole(u) || in_env(env),
            EvalResult::IAp(a, b) | EvalResult::IPlus(a, b) => a.mentions_hole(u) || b.mentions_hole(u),
        }
    }
}

/// Evaluate a closed, well-typed program.
///
/// # Panics
///
/// On a free variable, which a well-typed closed program cannot contain.
pub fn evaluate(e: &HExp) -> EvalResult {
    eval_in(&Env::new(), e)
}

/// Evaluate under an environment binding every free variable of `e`.
pub fn eval_in(env: &Env, e: &HExp) -> EvalResult {
    match e {
        HExp::Var(x) => env.get(x).cloned().unwrap_or_else(|| panic!("free variable `{x}` during evaluation")),
        HExp::Lam(x, body) => EvalResult::VClosure(x.clone(), (**body).clone(), env.clone()),
        HExp::Ap(f, a) => {
            let f = eval_in(env, f);
            let a = eval_in(env, a);
            apply(f, a)
        }
        HExp::Num(n) => EvalResult::VNum(n.clone()),
        HExp::Plus(l, r) => {
            let l = eval_in(env, l);
            let r = eval_in(env, r);
            add(l, r)
        }
        HExp::Asc(s, _) => eval_in(env, s),
        HExp::EHole(u) => EvalResult::IHole(*u, env.clone()),
        HExp::NEHole(u, s) => EvalResult::INEHole(*u, Box::new(eval_in(env, s)), env.clone()),
    }
}

fn apply(f: EvalResult, a: EvalResult) -> EvalResult {
    match f {
        EvalResult::VClosure(x, body, env) => eval_in(&env.extend(&x, a), &body),
        f => EvalResult::IAp(Box::new(f), Box::new(a)),
    }
}

fn add(l: EvalResult, r: EvalResult) -> EvalResult {
    match (l, r) {
        (EvalResult::VNum(a), EvalResult::VNum(b)) => EvalResult::VNum(a + b),
        (l, r) => EvalResult::IPlus(Box::new(l), Box::new(r)),
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FillError {
    #[error("no empty hole named {0}")]
    UnknownHole(HoleName),
    #[error("filler is ill-typed for hole {hole}: {error}")]
    IllTypedFiller { hole: HoleName, error: StaticError },
    #[error("filler reuses hole name {0}")]
    HoleClash(HoleName),
    #[error("program is not statically meaningful: {0}")]
    NotMeaningful(StaticError),
}

impl FillError {
    pub fn code(&self) -> &'static str {
        match self {
            FillError::UnknownHole(_) => "E_UNKNOWN_HOLE",
            FillError::IllTypedFiller { .. } | FillError::HoleClash(_) => "E_ILL_TYPED_FILLER",
            FillError::NotMeaningful(e) => e.code(),
        }
    }
}

/// Instantiate the empty hole `u` of `e` with `filler`.
///
/// The filler is checked in the hole's own context and position, so it may
/// mention variables bound around the hole. The filled program must stay
/// statically meaningful under `ctx`.
pub fn fill(ctx: &TypeCtx, e: &HExp, u: HoleName, filler: &HExp) -> Result<HExp, FillError> {
    let hole = find_hole(e, u).filter(|h| matches!(h.kind, crate::zipper::HoleKind::Empty)).ok_or(FillError::UnknownHole(u))?;
    let existing = e.hole_names();
    if let Some(v) = filler.hole_names().into_iter().find(|v| existing.contains(v)) {
        return Err(FillError::HoleClash(v));
    }
    if let Some(v) = filler.duplicate_hole() {
        return Err(FillError::HoleClash(v));
    }
    let (hctx, pos) = position_at(ctx, e, &hole.path).map_err(FillError::NotMeaningful)?;
    let pos = pos.expect("holes are expressions");
    pos.check(&hctx, filler).map_err(|error| FillError::IllTypedFiller { hole: u, error })?;
    let filled = e.fill_hole(u, filler).expect("hole located above");
    synthesize(ctx, &filled).map_err(|error| FillError::IllTypedFiller { hole: u, error })?;
    Ok(filled)
}

/// Continue evaluation of `r` after instantiating hole `u` with `filler`.
///
/// Every closure of `u` is replaced by the filler evaluated in that
/// closure's environment, and enclosing eliminations that become reducible
/// are reduced. A result without `u` is returned unchanged.
pub fn resume(r: &EvalResult, u: HoleName, filler: &HExp) -> EvalResult {
    let env_of = |env: &Env| env.map(|r| resume(r, u, filler));
    match r {
        EvalResult::VNum(_) => r.clone(),
        EvalResult::VClosure(x, body, env) => {
            let mut found = false;
            let body = body.fill_inner(u, filler, &mut found);
            EvalResult::VClosure(x.clone(), body, env_of(env))
        }
        EvalResult::IHole(v, env) if *v == u => eval_in(&env_of(env), filler),
        EvalResult::IHole(v, env) => EvalResult::IHole(*v, env_of(env)),
        EvalResult::INEHole(v, inner, env) => EvalResult::INEHole(*v, Box::new(resume(inner, u, filler)), env_of(env)),
        EvalResult::IAp(f, a) => apply(resume(f, u, filler), resume(a, u, filler)),
        EvalResult::IPlus(l, r) => add(resume(l, u, filler), resume(r, u, filler)),
    }
}

fn write_env(f: &mut fmt::Formatter<'_>, env: &Env) -> fmt::Result {
    f.write_str("(")?;
    for (i, (x, r)) in env.iter().enumerate() {
        if i > 0 {
            f.write_str(" ")?;
        }
        write!(f, "({x} {r})")?;
    }
    f.write_str(")")
}

/// Results extend the expression grammar with `(vnum n)`,
/// `(vclosure x e env)`, `(ihole u env)`, `(inehole u r env)`, `(iap r r)`
/// and `(iplus r r)`, where `env ::= ((x r) ...)`.
impl fmt::Display for EvalResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            EvalResult::VNum(n) => write!(f, "(vnum {n})"),
            EvalResult::VClosure(x, body, env) => {
                write!(f, "(vclosure {x} {body} ")?;
                write_env(f, env)?;
                f.write_str(")")
            }
            EvalResult::IHole(u, env) => {
                write!(f, "(ihole {u} ")?;
                write_env(f, env)?;
                f.write_str(")")
            }
            EvalResult::INEHole(u, r, env) => {
                write!(f, "(inehole {u} {r} ")?;
                write_env(f, env)?;
                f.write_str(")")
            }
            EvalResult::IAp(a, b) => write!(f, "(iap {a} {b})"),
            EvalResult::IPlus(a, b) => write!(f, "(iplus {a} {b})"),
        }
    }
}

impl fmt::Display for Env {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write_env(f, self)
    }
}

const RESULT_KEYWORDS: &str = "`vnum`, `vclosure`, `ihole`, `inehole`, `iap`, `iplus`";

fn parse_env(p: &mut Parser) -> Result<Env, ParseError> {
    p.open()?;
    let mut env = Env::new();
    while *p.peek() == Tok::Open {
        p.open()?;
        let x = p.ident()?;
        let r = parse_result_in(p)?;
        p.close()?;
        env.insert(x, r);
    }
    p.close()?;
    Ok(env)
}

fn parse_result_in(p: &mut Parser) -> Result<EvalResult, ParseError> {
    p.open()?;
    let kw = p.keyword(RESULT_KEYWORDS)?;
    let r = match kw.as_str() {
        "vnum" => EvalResult::VNum(p.int()?),
        "vclosure" => {
            let x = p.ident()?;
            let body = p.exp(&mut Vec::new())?;
            EvalResult::VClosure(x, body, parse_env(p)?)
        }
        "ihole" => {
            let u = HoleName(p.nat()?);
            EvalResult::IHole(u, parse_env(p)?)
        }
        "inehole" => {
            let u = HoleName(p.nat()?);
            let r = parse_result_in(p)?;
            EvalResult::INEHole(u, Box::new(r), parse_env(p)?)
        }
        "iap" | "iplus" => {
            let a = parse_result_in(p)?;
            let b = parse_result_in(p)?;
            if kw == "iap" {
                EvalResult::IAp(Box::new(a), Box::new(b))
            } else {
                EvalResult::IPlus(Box::new(a), Box::new(b))
            }
        }
        _ => return Err(p.error(&[RESULT_KEYWORDS])),
    };
    p.close()?;
    Ok(r)
}

pub fn parse_result(src: &str) -> Result<EvalResult, ParseError> {
    let mut p = Parser::new(src);
    let r = parse_result_in(&mut p)?;
    p.finish()?;
    Ok(r)
}
