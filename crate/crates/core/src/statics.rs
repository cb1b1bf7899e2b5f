//! Bidirectional static semantics for incomplete programs.
//!
//! The type hole behaves like the unknown type of gradual typing: it is
//! consistent with every type and matches an arrow of holes. Empty and
//! non-empty holes synthesize the hole type; a non-empty hole still requires
//! its subject to synthesize, so it quarantines a type inconsistency but not
//! arbitrary breakage.

use std::collections::BTreeMap;
use std::fmt;

use thiserror::Error;

use crate::syntax::{HExp, HTyp};
use crate::zipper::{Path, ZExp};

/// Typing context. Later bindings shadow earlier ones.
#[derive(Debug, Clone, PartialEq, Eq, Default, Hash)]
pub struct TypeCtx(BTreeMap<String, HTyp>);

impl TypeCtx {
    pub fn new() -> TypeCtx {
        TypeCtx::default()
    }

    pub fn get(&self, x: &str) -> Option<&HTyp> {
        self.0.get(x)
    }

    pub fn insert(&mut self, x: impl Into<String>, t: HTyp) {
        self.0.insert(x.into(), t);
    }

    pub fn extend(&self, x: &str, t: HTyp) -> TypeCtx {
        let mut out = self.clone();
        out.insert(x, t);
        out
    }

    pub fn iter(&self) -> impl Iterator<Item = (&String, &HTyp)> {
        self.0.iter()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl FromIterator<(String, HTyp)> for TypeCtx {
    fn from_iter<I: IntoIterator<Item = (String, HTyp)>>(iter: I) -> TypeCtx {
        let mut ctx = TypeCtx::new();
        for (x, t) in iter {
            ctx.insert(x, t);
        }
        ctx
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StaticError {
    #[error("unbound variable `{0}`")]
    Unbound(String),
    #[error("an unannotated lambda cannot synthesize a type")]
    NoSynthRule,
    #[error("expected a type consistent with {expected}, found {found}")]
    Inconsistent { expected: HTyp, found: HTyp },
    #[error("cannot apply an expression of type {0}")]
    NotAFunction(HTyp),
    #[error("lambda checked against non-arrow type {0}")]
    LamAgainstNonArrow(HTyp),
}

impl StaticError {
    /// Stable code surfaced verbatim by the session protocol.
    pub fn code(&self) -> &'static str {
        match self {
            StaticError::Unbound(_) => "E_UNBOUND",
            StaticError::NoSynthRule => "E_NO_SYNTH",
            StaticError::Inconsistent { .. } => "E_INCONSISTENT",
            StaticError::NotAFunction(_) => "E_NOT_FUNCTION",
            StaticError::LamAgainstNonArrow(_) => "E_LAM_NON_ARROW",
        }
    }
}

/// Type consistency. Reflexive and symmetric, not transitive.
pub fn consistent(t1: &HTyp, t2: &HTyp) -> bool {
    match (t1, t2) {
        (HTyp::Hole, _) | (_, HTyp::Hole) => true,
        (HTyp::Num, HTyp::Num) => true,
        (HTyp::Arrow(a1, b1), HTyp::Arrow(a2, b2)) => consistent(a1, a2) && consistent(b1, b2),
        _ => false,
    }
}

pub fn matched_arrow(t: &HTyp) -> Option<(HTyp, HTyp)> {
    match t {
        HTyp::Arrow(a, b) => Some(((**a).clone(), (**b).clone())),
        HTyp::Hole => Some((HTyp::Hole, HTyp::Hole)),
        HTyp::Num => None,
    }
}

pub fn synthesize(ctx: &TypeCtx, e: &HExp) -> Result<HTyp, StaticError> {
    match e {
        HExp::Var(x) => ctx.get(x).cloned().ok_or_else(|| StaticError::Unbound(x.clone())),
        HExp::Lam(..) => Err(StaticError::NoSynthRule),
        HExp::Ap(f, a) => {
            let tf = synthesize(ctx, f)?;
            let (dom, cod) = matched_arrow(&tf).ok_or(StaticError::NotAFunction(tf))?;
            analyze(ctx, a, &dom)?;
            Ok(cod)
        }
        HExp::Num(_) => Ok(HTyp::Num),
        HExp::Plus(l, r) => {
            analyze(ctx, l, &HTyp::Num)?;
            analyze(ctx, r, &HTyp::Num)?;
            Ok(HTyp::Num)
        }
        HExp::Asc(s, t) => {
            analyze(ctx, s, t)?;
            Ok(t.clone())
        }
        HExp::EHole(_) => Ok(HTyp::Hole),
        HExp::NEHole(_, s) => {
            synthesize(ctx, s)?;
            Ok(HTyp::Hole)
        }
    }
}

pub fn analyze(ctx: &TypeCtx, e: &HExp, t: &HTyp) -> Result<(), StaticError> {
    match e {
        HExp::Lam(x, body) => {
            let (dom, cod) = matched_arrow(t).ok_or_else(|| StaticError::LamAgainstNonArrow(t.clone()))?;
            analyze(&ctx.extend(x, dom), body, &cod)
        }
        _ => {
            let found = synthesize(ctx, e)?;
            if consistent(t, &found) {
                Ok(())
            } else {
                Err(StaticError::Inconsistent { expected: t.clone(), found })
            }
        }
    }
}

/// Whether an expression position synthesizes or is analyzed against a type.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Position {
    Syn,
    Ana(HTyp),
}

impl Position {
    /// Check `e` in this position; returns the synthesized type for `Syn`.
    pub fn check(&self, ctx: &TypeCtx, e: &HExp) -> Result<Option<HTyp>, StaticError> {
        match self {
            Position::Syn => synthesize(ctx, e).map(Some),
            Position::Ana(t) => analyze(ctx, e, t).map(|_| None),
        }
    }
}

/// Context and position of child `k` of `e`, given the position of `e`.
/// `Ok(None)` means the child is the type annotation of an ascription.
pub fn child_position(ctx: &TypeCtx, e: &HExp, pos: &Position, k: usize) -> Result<Option<(TypeCtx, Position)>, StaticError> {
    let out = match (e, k) {
        (HExp::Lam(x, _), 0) => {
            let t = match pos {
                Position::Ana(t) => t,
                Position::Syn => return Err(StaticError::NoSynthRule),
            };
            let (dom, cod) = matched_arrow(t).ok_or_else(|| StaticError::LamAgainstNonArrow(t.clone()))?;
            (ctx.extend(x, dom), Position::Ana(cod))
        }
        (HExp::Ap(..), 0) | (HExp::NEHole(..), 0) => (ctx.clone(), Position::Syn),
        (HExp::Ap(f, _), 1) => {
            let tf = synthesize(ctx, f)?;
            let (dom, _) = matched_arrow(&tf).ok_or(StaticError::NotAFunction(tf))?;
            (ctx.clone(), Position::Ana(dom))
        }
        (HExp::Plus(..), 0 | 1) => (ctx.clone(), Position::Ana(HTyp::Num)),
        (HExp::Asc(_, t), 0) => (ctx.clone(), Position::Ana(t.clone())),
        (HExp::Asc(..), 1) => return Ok(None),
        _ => panic!("child_position: no child {k} of {}", e.tag()),
    };
    Ok(Some(out))
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Mode {
    Synthesized(HTyp),
    AnalyzedAgainst(HTyp),
    TypePosition,
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Mode::Synthesized(t) => write!(f, "(synthesized {t})"),
            Mode::AnalyzedAgainst(t) => write!(f, "(analyzed {t})"),
            Mode::TypePosition => f.write_str("(type-position)"),
        }
    }
}

/// What the type inspector shows for the cursor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct CursorInfo {
    pub mode: Mode,
    pub ctx: TypeCtx,
}

impl fmt::Display for CursorInfo {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} (ctx", self.mode)?;
        for (x, t) in self.ctx.iter() {
            write!(f, " ({x} {t})")?;
        }
        f.write_str(")")
    }
}

/// Position and context at `path`, after checking the whole program.
pub fn position_at(ctx: &TypeCtx, e: &HExp, path: &Path) -> Result<(TypeCtx, Option<Position>), StaticError> {
    synthesize(ctx, e)?;
    let mut cur = e;
    let mut ctx = ctx.clone();
    let mut pos = Position::Syn;
    for &k in path.steps() {
        match child_position(&ctx, cur, &pos, k)? {
            Some((c, p)) => {
                ctx = c;
                pos = p;
                cur = cur.children()[k];
            }
            None => return Ok((ctx, None)),
        }
    }
    Ok((ctx, Some(pos)))
}

pub fn cursor_info(ctx: &TypeCtx, z: &ZExp) -> Result<CursorInfo, StaticError> {
    let (inner, pos) = position_at(ctx, z.expr(), z.cursor())?;
    let mode = match pos {
        None => Mode::TypePosition,
        Some(Position::Ana(t)) => Mode::AnalyzedAgainst(t),
        Some(Position::Syn) => {
            let crate::zipper::Focus::Exp(sub) = z.focus() else {
                unreachable!("expression position")
            };
            Mode::Synthesized(synthesize(&inner, sub)?)
        }
    };
    Ok(CursorInfo { mode, ctx: inner })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::zipper::place_cursor;

    fn nn() -> HTyp {
        HTyp::arrow(HTyp::Num, HTyp::Num)
    }

    fn id_nn() -> HExp {
        HExp::asc(HExp::lam("x", HExp::var("x")), nn())
    }

    /// All types of depth at most `d`.
    fn types_upto(d: usize) -> Vec<HTyp> {
        if d == 0 {
            return vec![HTyp::Num, HTyp::Hole];
        }
        let smaller = types_upto(d - 1);
        let mut out = smaller.clone();
        for a in &smaller {
            for b in &smaller {
                let t = HTyp::arrow(a.clone(), b.clone());
                if !out.contains(&t) {
                    out.push(t);
                }
            }
        }
        out
    }

    #[test]
    fn consistency_examples() {
        assert!(consistent(&HTyp::Num, &HTyp::Hole));
        assert!(consistent(&HTyp::Num, &HTyp::Num));
        assert!(!consistent(&nn(), &HTyp::Num));
        assert!(consistent(&nn(), &HTyp::Hole));
        assert!(consistent(&HTyp::Hole, &HTyp::Num));
    }

    #[test]
    fn consistency_is_not_transitive_at_depth_two() {
        let ts = types_upto(2);
        let witness = ts.iter().any(|a| {
            ts.iter().any(|b| ts.iter().any(|c| consistent(a, b) && consistent(b, c) && !consistent(a, c)))
        });
        assert!(witness);
    }

    #[test]
    fn matched_arrow_table() {
        assert_eq!(matched_arrow(&HTyp::arrow(HTyp::Num, HTyp::Hole)), Some((HTyp::Num, HTyp::Hole)));
        assert_eq!(matched_arrow(&HTyp::Hole), Some((HTyp::Hole, HTyp::Hole)));
        assert_eq!(matched_arrow(&HTyp::Num), None);
        for t in types_upto(2) {
            if let Some((a, b)) = matched_arrow(&t) {
                assert!(consistent(&t, &HTyp::arrow(a, b)));
            }
        }
    }

    #[test]
    fn synthesis_examples() {
        let empty = TypeCtx::new();
        assert_eq!(synthesize(&empty, &HExp::hole(0)), Ok(HTyp::Hole));
        assert_eq!(synthesize(&empty, &HExp::ap(id_nn(), HExp::num(2))), Ok(HTyp::Num));
        assert_eq!(synthesize(&empty, &HExp::ap(HExp::hole(0), HExp::num(2))), Ok(HTyp::Hole));
    }

    #[test]
    fn synthesis_errors() {
        let empty = TypeCtx::new();
        assert_eq!(synthesize(&empty, &HExp::var("y")), Err(StaticError::Unbound("y".into())));
        assert_eq!(synthesize(&empty, &HExp::lam("x", HExp::var("x"))), Err(StaticError::NoSynthRule));
        assert_eq!(synthesize(&empty, &HExp::ap(HExp::num(1), HExp::num(2))), Err(StaticError::NotAFunction(HTyp::Num)));
        let err = synthesize(&empty, &HExp::plus(id_nn(), HExp::num(1))).unwrap_err();
        assert_eq!(err.code(), "E_INCONSISTENT");
        // a non-empty hole quarantines the inconsistency
        assert_eq!(synthesize(&empty, &HExp::plus(HExp::nehole(0, id_nn()), HExp::num(1))), Ok(HTyp::Num));
        // but its subject must still synthesize
        let bad = HExp::nehole(0, HExp::lam("x", HExp::var("x")));
        assert_eq!(synthesize(&empty, &bad), Err(StaticError::NoSynthRule));
    }

    #[test]
    fn analysis_examples() {
        let empty = TypeCtx::new();
        let id = HExp::lam("x", HExp::var("x"));
        assert_eq!(analyze(&empty, &id, &nn()), Ok(()));
        assert_eq!(analyze(&empty, &id, &HTyp::Hole), Ok(()));
        assert_eq!(
            analyze(&empty, &HExp::num(3), &nn()),
            Err(StaticError::Inconsistent { expected: nn(), found: HTyp::Num })
        );
        assert_eq!(analyze(&empty, &id, &HTyp::Num), Err(StaticError::LamAgainstNonArrow(HTyp::Num)));
    }

    #[test]
    fn shadowing() {
        let ctx = TypeCtx::new().extend("x", nn());
        let e = HExp::asc(HExp::lam("x", HExp::plus(HExp::var("x"), HExp::num(1))), nn());
        assert_eq!(synthesize(&ctx, &e), Ok(nn()));
    }

    #[test]
    fn cursor_info_examples() {
        let empty = TypeCtx::new();
        let z = place_cursor(HExp::ap(id_nn(), HExp::hole(0)), Path(vec![1])).unwrap();
        let info = cursor_info(&empty, &z).unwrap();
        assert_eq!(info.mode, Mode::AnalyzedAgainst(HTyp::Num));
        assert!(info.ctx.is_empty());

        let z = place_cursor(HExp::num(3), Path::root()).unwrap();
        assert_eq!(cursor_info(&empty, &z).unwrap().mode, Mode::Synthesized(HTyp::Num));

        let z = place_cursor(id_nn(), Path(vec![0, 0])).unwrap();
        let info = cursor_info(&empty, &z).unwrap();
        assert_eq!(info.mode, Mode::AnalyzedAgainst(HTyp::Num));
        assert_eq!(info.ctx, TypeCtx::new().extend("x", HTyp::Num));
        assert_eq!(info.to_string(), "(analyzed num) (ctx (x num))");

        let z = place_cursor(id_nn(), Path(vec![1, 0])).unwrap();
        assert_eq!(cursor_info(&empty, &z).unwrap().mode, Mode::TypePosition);

        let z = place_cursor(HExp::var("q"), Path::root()).unwrap();
        assert_eq!(cursor_info(&empty, &z), Err(StaticError::Unbound("q".into())));
    }
}
