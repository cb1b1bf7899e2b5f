//! The edit-action calculus.
//!
//! Every action maps a statically meaningful edit state to a statically
//! meaningful edit state, or fails and leaves the state alone. Edits that
//! would break typing are quarantined in fresh non-empty holes instead of
//! being rejected. `finish` is the one exception: it only removes a mark when
//! nothing else has to change.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use thiserror::Error;

use crate::statics::{analyze, child_position, matched_arrow, synthesize, Position, TypeCtx};
use crate::syntax::{is_ident, HExp, HTyp, HoleGen};
use crate::zipper::{holes_of, Path, ZExp};

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Direction {
    Child(usize),
    Parent,
    NextHole,
    PrevHole,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Shape {
    Asc,
    Var(String),
    Lam(String),
    Ap,
    NumLit(BigInt),
    Plus,
    NEHole,
    /// Type position only.
    Arrow,
    /// Type position only.
    Num,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Action {
    Move(Direction),
    Construct(Shape),
    Del,
    Finish,
}

impl Action {
    pub fn construct(shape: Shape) -> Action {
        Action::Construct(shape)
    }

    pub fn num(n: i64) -> Action {
        Action::Construct(Shape::NumLit(BigInt::from(n)))
    }

    pub fn var(x: &str) -> Action {
        Action::Construct(Shape::Var(x.to_string()))
    }

    pub fn lam(x: &str) -> Action {
        Action::Construct(Shape::Lam(x.to_string()))
    }

    pub fn child(k: usize) -> Action {
        Action::Move(Direction::Child(k))
    }

    pub fn parent() -> Action {
        Action::Move(Direction::Parent)
    }

    pub fn is_move(&self) -> bool {
        matches!(self, Action::Move(_))
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Action::Move(Direction::Child(k)) => write!(f, "move child {k}"),
            Action::Move(Direction::Parent) => f.write_str("move parent"),
            Action::Move(Direction::NextHole) => f.write_str("move nexthole"),
            Action::Move(Direction::PrevHole) => f.write_str("move prevhole"),
            Action::Construct(s) => match s {
                Shape::Asc => f.write_str("construct asc"),
                Shape::Var(x) => write!(f, "construct var {x}"),
                Shape::Lam(x) => write!(f, "construct lam {x}"),
                Shape::Ap => f.write_str("construct ap"),
                Shape::NumLit(n) => write!(f, "construct num {n}"),
                Shape::Plus => f.write_str("construct plus"),
                Shape::NEHole => f.write_str("construct nehole"),
                Shape::Arrow => f.write_str("construct arrow"),
                Shape::Num => f.write_str("construct numtype"),
            },
            Action::Del => f.write_str("del"),
            Action::Finish => f.write_str("finish"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("malformed action `{text}`: {reason}")]
pub struct ActionParseError {
    pub text: String,
    pub reason: String,
}

impl FromStr for Action {
    type Err = ActionParseError;

    fn from_str(s: &str) -> Result<Action, ActionParseError> {
        let words: Vec<&str> = s.split_whitespace().collect();
        let bad = |reason: &str| ActionParseError { text: s.to_string(), reason: reason.to_string() };
        let ident = |x: &str| if is_ident(x) { Ok(x.to_string()) } else { Err(bad("bad identifier")) };
        let action = match words.as_slice() {
            ["move", "child", k] => Action::Move(Direction::Child(k.parse().map_err(|_| bad("bad child index"))?)),
            ["move", "parent"] => Action::Move(Direction::Parent),
            ["move", "nexthole"] => Action::Move(Direction::NextHole),
            ["move", "prevhole"] => Action::Move(Direction::PrevHole),
            ["construct", "asc"] => Action::Construct(Shape::Asc),
            ["construct", "var", x] => Action::Construct(Shape::Var(ident(x)?)),
            ["construct", "lam", x] => Action::Construct(Shape::Lam(ident(x)?)),
            ["construct", "ap"] => Action::Construct(Shape::Ap),
            ["construct", "num", n] => {
                let digits = n.strip_prefix('-').unwrap_or(n);
                if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
                    return Err(bad("bad integer"));
                }
                Action::Construct(Shape::NumLit(n.parse().map_err(|_| bad("bad integer"))?))
            }
            ["construct", "plus"] => Action::Construct(Shape::Plus),
            ["construct", "nehole"] => Action::Construct(Shape::NEHole),
            ["construct", "arrow"] => Action::Construct(Shape::Arrow),
            ["construct", "numtype"] => Action::Construct(Shape::Num),
            ["del"] => Action::Del,
            ["finish"] => Action::Finish,
            _ => return Err(bad("unknown action")),
        };
        Ok(action)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("invalid action: {0}")]
    Invalid(String),
    #[error("macro step budget exhausted")]
    BudgetExhausted,
}

impl ActionError {
    pub fn code(&self) -> &'static str {
        match self {
            ActionError::Invalid(_) => "E_INVALID_ACTION",
            ActionError::BudgetExhausted => "E_BUDGET",
        }
    }
}

fn invalid<T>(reason: impl Into<String>) -> Result<T, ActionError> {
    Err(ActionError::Invalid(reason.into()))
}

/// Apply one action. Fresh hole names come from `gen`, which only advances
/// when the action succeeds.
pub fn apply_action(ctx: &TypeCtx, z: &ZExp, a: &Action, gen: &mut HoleGen) -> Result<ZExp, ActionError> {
    if let Err(err) = synthesize(ctx, z.expr()) {
        return invalid(format!("edit state is not statically meaningful: {err}"));
    }
    if let Action::Move(d) = a {
        let cursor = move_cursor(z, d)?;
        return Ok(ZExp::new(z.expr().clone(), cursor).expect("move targets are valid paths"));
    }
    let mut local_gen = *gen;
    let mut editor = Editor { gen: &mut local_gen, strict: matches!(a, Action::Finish) };
    let (e, cursor) = editor.edit(ctx, z.expr(), &Position::Syn, z.cursor().steps(), a)?;
    debug_assert!(synthesize(ctx, &e).is_ok(), "action {a} broke {e}");
    *gen = local_gen;
    Ok(ZExp::new(e, Path(cursor)).expect("editor returns a valid cursor"))
}

fn move_cursor(z: &ZExp, d: &Direction) -> Result<Path, ActionError> {
    let here = z.cursor();
    match d {
        Direction::Child(k) => {
            let p = here.child(*k);
            match ZExp::new(z.expr().clone(), p.clone()) {
                Ok(_) => Ok(p),
                Err(_) => invalid(format!("cursor node has no child {k}")),
            }
        }
        Direction::Parent => match here.parent() {
            Some(p) => Ok(p),
            None => invalid("cursor is at the root"),
        },
        Direction::NextHole => match holes_of(z.expr()).into_iter().find(|h| h.path > *here) {
            Some(h) => Ok(h.path),
            None => invalid("no hole after the cursor"),
        },
        Direction::PrevHole => match holes_of(z.expr()).into_iter().rev().find(|h| h.path < *here) {
            Some(h) => Ok(h.path),
            None => invalid("no hole before the cursor"),
        },
    }
}

fn prepend(k: usize, mut rest: Vec<usize>) -> Vec<usize> {
    rest.insert(0, k);
    rest
}

struct Editor<'g> {
    gen: &'g mut HoleGen,
    /// Refuse instead of quarantining when an edit would break typing.
    strict: bool,
}

impl Editor<'_> {
    /// Rewrite `e` (checked in `pos`) by applying `a` at `path`. The result
    /// again checks in `pos`; the returned path is the new cursor relative to
    /// the result.
    fn edit(&mut self, ctx: &TypeCtx, e: &HExp, pos: &Position, path: &[usize], a: &Action) -> Result<(HExp, Vec<usize>), ActionError> {
        let Some((&k, rest)) = path.split_first() else {
            let (e2, cursor) = self.local(ctx, e, pos, a)?;
            return self.fit(ctx, e2, cursor, pos);
        };

        if let (HExp::Asc(s, t), 1) = (e, k) {
            let (t2, tcursor) = type_edit(t, rest, a)?;
            let subject = match analyze(ctx, s, &t2) {
                Ok(()) => (**s).clone(),
                Err(_) if self.strict => return invalid("annotation change would break the subject"),
                // keep the old annotation inside the mark when the subject
                // cannot synthesize on its own
                Err(_) => match synthesize(ctx, s) {
                    Ok(_) => HExp::NEHole(self.gen.fresh(), s.clone()),
                    Err(_) => HExp::NEHole(self.gen.fresh(), Box::new(HExp::Asc(s.clone(), t.clone()))),
                },
            };
            return self.fit(ctx, HExp::asc(subject, t2), prepend(1, tcursor), pos);
        }

        let (cctx, cpos) = match child_position(ctx, e, pos, k) {
            Ok(Some(cp)) => cp,
            Ok(None) => unreachable!("type child handled above"),
            Err(err) => return invalid(format!("edit state is not statically meaningful: {err}")),
        };
        let child = e.children()[k];
        let (c2, ccursor) = self.edit(&cctx, child, &cpos, rest, a)?;
        let mut cursor = prepend(k, ccursor);
        let node = match (e, k) {
            (HExp::Lam(x, _), 0) => HExp::Lam(x.clone(), Box::new(c2)),
            (HExp::Ap(_, arg), 0) => {
                let head_ok = synthesize(ctx, &c2)
                    .ok()
                    .and_then(|tf| matched_arrow(&tf))
                    .is_some_and(|(dom, _)| analyze(ctx, arg, &dom).is_ok());
                if head_ok {
                    HExp::Ap(Box::new(c2), arg.clone())
                } else if self.strict {
                    return invalid("the application head would no longer fit its argument");
                } else {
                    cursor.insert(1, 0);
                    HExp::Ap(Box::new(HExp::NEHole(self.gen.fresh(), Box::new(c2))), arg.clone())
                }
            }
            (HExp::Ap(f, _), 1) => HExp::Ap(f.clone(), Box::new(c2)),
            (HExp::Plus(_, r), 0) => HExp::Plus(Box::new(c2), r.clone()),
            (HExp::Plus(l, _), 1) => HExp::Plus(l.clone(), Box::new(c2)),
            (HExp::Asc(_, t), 0) => HExp::Asc(Box::new(c2), t.clone()),
            (HExp::NEHole(u, _), 0) => HExp::NEHole(*u, Box::new(c2)),
            _ => unreachable!("child_position accepted step {k}"),
        };
        self.fit(ctx, node, cursor, pos)
    }

    /// Make `e` check in `pos`, wrapping it in a non-empty hole if needed.
    fn fit(&mut self, ctx: &TypeCtx, e: HExp, cursor: Vec<usize>, pos: &Position) -> Result<(HExp, Vec<usize>), ActionError> {
        match pos.check(ctx, &e) {
            Ok(_) => Ok((e, cursor)),
            Err(_) if self.strict => invalid("the hole's subject is still inconsistent with its position"),
            Err(err) => match (pos, synthesize(ctx, &e)) {
                (Position::Ana(_), Ok(_)) => Ok((HExp::NEHole(self.gen.fresh(), Box::new(e)), prepend(0, cursor))),
                _ => invalid(format!("edit cannot be made meaningful: {err}")),
            },
        }
    }

    /// `e` itself if it synthesizes, otherwise `e` ascribed with the type it
    /// is analyzed against. Returns the cursor offset of `e` in the result.
    fn synthesizing(&self, ctx: &TypeCtx, e: &HExp, pos: &Position) -> Result<(HExp, Vec<usize>), ActionError> {
        if synthesize(ctx, e).is_ok() {
            return Ok((e.clone(), vec![]));
        }
        match pos {
            Position::Ana(t) => Ok((HExp::asc(e.clone(), t.clone()), vec![0])),
            Position::Syn => invalid("expression at cursor does not synthesize"),
        }
    }

    fn local(&mut self, ctx: &TypeCtx, e: &HExp, pos: &Position, a: &Action) -> Result<(HExp, Vec<usize>), ActionError> {
        let on_hole = matches!(e, HExp::EHole(_));
        match a {
            Action::Move(_) => unreachable!("moves do not edit"),
            Action::Del => {
                if on_hole {
                    return invalid("nothing to delete");
                }
                Ok((HExp::EHole(self.gen.fresh()), vec![]))
            }
            Action::Finish => match e {
                HExp::NEHole(_, s) => Ok(((**s).clone(), vec![])),
                _ => invalid("cursor is not on a non-empty hole"),
            },
            Action::Construct(shape) => match shape {
                Shape::Arrow | Shape::Num => invalid("type constructor at an expression position"),
                Shape::Asc => {
                    let ann = match pos {
                        Position::Syn => synthesize(ctx, e).map_err(|err| ActionError::Invalid(err.to_string()))?,
                        Position::Ana(t) => t.clone(),
                    };
                    Ok((HExp::asc(e.clone(), ann), vec![1]))
                }
                Shape::Var(x) => {
                    if !on_hole {
                        return invalid("variables are constructed on an empty hole");
                    }
                    if ctx.get(x).is_none() {
                        return invalid(format!("`{x}` is not bound here"));
                    }
                    Ok((HExp::Var(x.clone()), vec![]))
                }
                Shape::NumLit(n) => {
                    if !on_hole {
                        return invalid("literals are constructed on an empty hole");
                    }
                    Ok((HExp::Num(n.clone()), vec![]))
                }
                Shape::Lam(x) => {
                    if !on_hole {
                        return invalid("lambdas are constructed on an empty hole");
                    }
                    match pos {
                        Position::Ana(t) if matched_arrow(t).is_some() => Ok((HExp::lam(x, HExp::EHole(self.gen.fresh())), vec![0])),
                        Position::Ana(_) => {
                            let mark = self.gen.fresh();
                            let body = self.gen.fresh();
                            let lam = HExp::asc(HExp::lam(x, HExp::EHole(body)), HTyp::Hole);
                            Ok((HExp::NEHole(mark, Box::new(lam)), vec![0, 0, 0]))
                        }
                        Position::Syn => {
                            let lam = HExp::lam(x, HExp::EHole(self.gen.fresh()));
                            Ok((HExp::asc(lam, HTyp::arrow(HTyp::Hole, HTyp::Hole)), vec![0, 0]))
                        }
                    }
                }
                Shape::Ap => {
                    let (mut head, _) = self.synthesizing(ctx, e, pos)?;
                    let tf = synthesize(ctx, &head).expect("synthesizing");
                    if matched_arrow(&tf).is_none() {
                        head = HExp::NEHole(self.gen.fresh(), Box::new(head));
                    }
                    Ok((HExp::ap(head, HExp::EHole(self.gen.fresh())), vec![1]))
                }
                Shape::Plus => {
                    let (mut left, _) = self.synthesizing(ctx, e, pos)?;
                    if analyze(ctx, &left, &HTyp::Num).is_err() {
                        left = HExp::NEHole(self.gen.fresh(), Box::new(left));
                    }
                    Ok((HExp::plus(left, HExp::EHole(self.gen.fresh())), vec![1]))
                }
                Shape::NEHole => {
                    let (subject, offset) = self.synthesizing(ctx, e, pos)?;
                    Ok((HExp::NEHole(self.gen.fresh(), Box::new(subject)), prepend(0, offset)))
                }
            },
        }
    }
}

/// Apply a type-position action at `path` inside `t`.
fn type_edit(t: &HTyp, path: &[usize], a: &Action) -> Result<(HTyp, Vec<usize>), ActionError> {
    if let Some((&k, rest)) = path.split_first() {
        let HTyp::Arrow(dom, cod) = t else {
            unreachable!("validated cursor path")
        };
        return Ok(match k {
            0 => {
                let (d2, c) = type_edit(dom, rest, a)?;
                (HTyp::Arrow(Box::new(d2), cod.clone()), prepend(0, c))
            }
            _ => {
                let (c2, c) = type_edit(cod, rest, a)?;
                (HTyp::Arrow(dom.clone(), Box::new(c2)), prepend(1, c))
            }
        });
    }
    match a {
        Action::Del if *t == HTyp::Hole => invalid("nothing to delete"),
        Action::Del => Ok((HTyp::Hole, vec![])),
        Action::Construct(Shape::Num) if *t == HTyp::Hole => Ok((HTyp::Num, vec![])),
        Action::Construct(Shape::Num) => invalid("`num` is constructed on a type hole"),
        Action::Construct(Shape::Arrow) => Ok((HTyp::arrow(t.clone(), HTyp::Hole), vec![1])),
        Action::Construct(_) => invalid("expression constructor at a type position"),
        Action::Finish => invalid("cursor is not on a non-empty hole"),
        Action::Move(_) => unreachable!("moves do not edit"),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sexp::render_zexp;
    use crate::zipper::{erase_cursor, place_cursor};

    fn nn() -> HTyp {
        HTyp::arrow(HTyp::Num, HTyp::Num)
    }

    fn at(e: HExp, p: &[usize]) -> ZExp {
        place_cursor(e, Path(p.to_vec())).unwrap()
    }

    fn run(ctx: &TypeCtx, z: &ZExp, a: Action) -> Result<ZExp, ActionError> {
        let mut gen = HoleGen::above(z.expr());
        apply_action(ctx, z, &a, &mut gen)
    }

    #[test]
    fn text_encoding_round_trips() {
        for text in [
            "move child 0",
            "move child 1",
            "move parent",
            "move nexthole",
            "move prevhole",
            "construct asc",
            "construct var x",
            "construct lam y",
            "construct ap",
            "construct num -42",
            "construct plus",
            "construct nehole",
            "construct arrow",
            "construct numtype",
            "del",
            "finish",
        ] {
            let a: Action = text.parse().unwrap();
            assert_eq!(a.to_string(), text);
        }
        for bad in ["", "move", "construct var 1x", "construct num 1.5", "jump", "del now"] {
            assert!(bad.parse::<Action>().is_err(), "{bad}");
        }
    }

    #[test]
    fn fill_hole_with_literal() {
        let z = run(&TypeCtx::new(), &at(HExp::hole(0), &[]), Action::num(3)).unwrap();
        assert_eq!(z, at(HExp::num(3), &[]));
    }

    #[test]
    fn lambda_against_num_is_quarantined() {
        // hole analyzed against num: the argument of an ascribed num -> num function
        let e = HExp::ap(HExp::asc(HExp::lam("y", HExp::var("y")), nn()), HExp::hole(0));
        let z = run(&TypeCtx::new(), &at(e, &[1]), Action::lam("x")).unwrap();
        let expected = HExp::ap(
            HExp::asc(HExp::lam("y", HExp::var("y")), nn()),
            HExp::nehole(1, HExp::asc(HExp::lam("x", HExp::hole(2)), HTyp::Hole)),
        );
        assert_eq!(z.expr(), &expected);
        assert_eq!(z.cursor(), &Path(vec![1, 0, 0, 0]));
        assert!(synthesize(&TypeCtx::new(), z.expr()).is_ok());
    }

    #[test]
    fn lambda_against_arrow_in_place() {
        let e = HExp::asc(HExp::hole(0), nn());
        let z = run(&TypeCtx::new(), &at(e, &[0]), Action::lam("x")).unwrap();
        assert_eq!(render_zexp(&z), "(asc (lam x (cursor (hole 1))) (arrow num num))");
    }

    #[test]
    fn lambda_in_synthetic_position_is_ascribed() {
        let z = run(&TypeCtx::new(), &at(HExp::hole(0), &[]), Action::lam("x")).unwrap();
        assert_eq!(render_zexp(&z), "(asc (lam x (cursor (hole 1))) (arrow thole thole))");
    }

    #[test]
    fn apply_a_number_wraps_the_head() {
        let z = run(&TypeCtx::new(), &at(HExp::num(3), &[]), Action::Construct(Shape::Ap)).unwrap();
        assert_eq!(render_zexp(&z), "(ap (nehole 0 (num 3)) (cursor (hole 1)))");
    }

    #[test]
    fn finish_examples() {
        let ctx = TypeCtx::new();
        // analyzed against num
        let e = HExp::plus(HExp::nehole(1, HExp::num(3)), HExp::num(0));
        let z = run(&ctx, &at(e, &[0]), Action::Finish).unwrap();
        assert_eq!(z.expr(), &HExp::plus(HExp::num(3), HExp::num(0)));
        // analyzed against num -> num
        let e = HExp::asc(HExp::nehole(1, HExp::num(3)), nn());
        let z = at(e, &[0]);
        assert!(matches!(run(&ctx, &z, Action::Finish), Err(ActionError::Invalid(_))));
        // subject that does not synthesize
        let e = HExp::nehole(1, HExp::lam("x", HExp::var("x")));
        assert!(matches!(run(&ctx, &at(e, &[]), Action::Finish), Err(ActionError::Invalid(_))));
        // application head that would stop being a function
        let e = HExp::ap(HExp::nehole(1, HExp::num(3)), HExp::num(2));
        assert!(run(&ctx, &at(e, &[0]), Action::Finish).is_err());
    }

    #[test]
    fn var_construction_checks_binding_and_type() {
        let ctx = TypeCtx::new().extend("f", nn());
        let e = HExp::plus(HExp::hole(0), HExp::num(1));
        let z = run(&ctx, &at(e.clone(), &[0]), Action::var("f")).unwrap();
        assert_eq!(z.expr(), &HExp::plus(HExp::nehole(1, HExp::var("f")), HExp::num(1)));
        assert_eq!(z.cursor(), &Path(vec![0, 0]));
        assert!(run(&ctx, &at(e, &[0]), Action::var("g")).is_err());
    }

    #[test]
    fn editing_the_head_keeps_the_application_meaningful() {
        // (ap (hole 0) (num 2)): putting a number in the head quarantines it
        let e = HExp::ap(HExp::hole(0), HExp::num(2));
        let z = run(&TypeCtx::new(), &at(e, &[0]), Action::num(7)).unwrap();
        assert_eq!(render_zexp(&z), "(ap (nehole 1 (cursor (num 7))) (num 2))");
    }

    #[test]
    fn annotation_edits() {
        let ctx = TypeCtx::new();
        let e = HExp::asc(HExp::lam("x", HExp::var("x")), HTyp::Hole);
        // thole -> num breaks the lambda, which is kept under its old annotation
        let z = run(&ctx, &at(e.clone(), &[1]), Action::Construct(Shape::Num)).unwrap();
        assert_eq!(render_zexp(&z), "(asc (nehole 0 (asc (lam x (var x)) thole)) (cursor num))");
        // arrow wraps and moves to the codomain
        let z = run(&ctx, &at(e, &[1]), Action::Construct(Shape::Arrow)).unwrap();
        assert_eq!(render_zexp(&z), "(asc (lam x (var x)) (arrow thole (cursor thole)))");
        assert!(run(&ctx, &z, Action::Del).is_err());
        assert!(run(&ctx, &z, Action::num(1)).is_err());
    }

    #[test]
    fn delete_replaces_with_fresh_hole() {
        let e = HExp::plus(HExp::num(1), HExp::hole(4));
        let z = run(&TypeCtx::new(), &at(e.clone(), &[0]), Action::Del).unwrap();
        assert_eq!(z.expr(), &HExp::plus(HExp::hole(5), HExp::hole(4)));
        assert!(run(&TypeCtx::new(), &at(e, &[1]), Action::Del).is_err());
    }

    #[test]
    fn movement() {
        let e = HExp::plus(HExp::hole(0), HExp::hole(1));
        let ctx = TypeCtx::new();
        let z = run(&ctx, &at(e.clone(), &[]), Action::Move(Direction::NextHole)).unwrap();
        assert_eq!(z.cursor(), &Path(vec![0]));
        let z = run(&ctx, &z, Action::Move(Direction::NextHole)).unwrap();
        assert_eq!(z.cursor(), &Path(vec![1]));
        assert!(run(&ctx, &z, Action::Move(Direction::NextHole)).is_err());
        let z = run(&ctx, &z, Action::Move(Direction::PrevHole)).unwrap();
        assert_eq!(z.cursor(), &Path(vec![0]));
        assert!(run(&ctx, &z, Action::Move(Direction::PrevHole)).is_err());
        assert!(run(&ctx, &z, Action::child(0)).is_err());
        let z = run(&ctx, &z, Action::parent()).unwrap();
        assert!(z.cursor().is_root());
        assert!(run(&ctx, &z, Action::parent()).is_err());
        assert_eq!(erase_cursor(&z), e);
    }

    #[test]
    fn failure_leaves_generator_alone() {
        let z = at(HExp::num(1), &[]);
        let mut gen = HoleGen::starting_at(10);
        assert!(apply_action(&TypeCtx::new(), &z, &Action::num(2), &mut gen).is_err());
        assert_eq!(gen.peek(), 10);
        apply_action(&TypeCtx::new(), &z, &Action::Del, &mut gen).unwrap();
        assert_eq!(gen.peek(), 11);
    }

    #[test]
    fn precondition_is_checked() {
        let z = at(HExp::var("nope"), &[]);
        assert!(run(&TypeCtx::new(), &z, Action::Del).is_err());
    }
}
