//! Action scripts that build a given term from an empty hole.

use thiserror::Error;

use crate::action::{apply_action, Action, ActionError, Direction, Shape};
use crate::statics::{synthesize, StaticError, TypeCtx};
use crate::syntax::{HExp, HTyp, HoleGen};
use crate::zipper::{Focus, ZExp};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ScriptError {
    #[error("term is not well typed: {0}")]
    NotWellTyped(StaticError),
    #[error("replay failed at step {step}: {error}")]
    Replay { step: usize, error: ActionError },
}

/// The state scripts start from: a lone empty hole named 0 under the cursor.
pub fn script_start() -> (ZExp, HoleGen) {
    (ZExp::at_root(HExp::hole(0)), HoleGen::starting_at(1))
}

/// Apply `actions` in order.
pub fn replay(ctx: &TypeCtx, start: &ZExp, actions: &[Action], gen: &mut HoleGen) -> Result<ZExp, ScriptError> {
    let mut z = start.clone();
    for (step, a) in actions.iter().enumerate() {
        z = apply_action(ctx, &z, a, gen).map_err(|error| ScriptError::Replay { step, error })?;
    }
    Ok(z)
}

struct Builder {
    ctx: TypeCtx,
    z: ZExp,
    gen: HoleGen,
    script: Vec<Action>,
}

impl Builder {
    fn push(&mut self, a: Action) -> Result<(), ScriptError> {
        let step = self.script.len();
        self.z = apply_action(&self.ctx, &self.z, &a, &mut self.gen).map_err(|error| ScriptError::Replay { step, error })?;
        self.script.push(a);
        Ok(())
    }

    fn up(&mut self) -> Result<(), ScriptError> {
        self.push(Action::Move(Direction::Parent))
    }

    fn down(&mut self, k: usize) -> Result<(), ScriptError> {
        self.push(Action::Move(Direction::Child(k)))
    }

    /// Cursor is on an empty hole; leaves the cursor on the built term.
    fn exp(&mut self, e: &HExp) -> Result<(), ScriptError> {
        match e {
            HExp::EHole(_) => Ok(()),
            HExp::Var(x) => self.push(Action::var(x)),
            HExp::Num(n) => self.push(Action::Construct(Shape::NumLit(n.clone()))),
            HExp::Lam(x, body) => {
                self.push(Action::lam(x))?;
                self.exp(body)?;
                self.up()
            }
            HExp::Ap(l, r) | HExp::Plus(l, r) => {
                let shape = if matches!(e, HExp::Ap(..)) { Shape::Ap } else { Shape::Plus };
                // the right operand first, while the left is still a hole
                self.push(Action::Construct(shape))?;
                self.exp(r)?;
                self.up()?;
                self.down(0)?;
                self.exp(l)?;
                self.up()
            }
            HExp::Asc(s, t) => {
                self.push(Action::Construct(Shape::Asc))?;
                if self.z.focus() != Focus::Typ(&HTyp::Hole) {
                    self.push(Action::Del)?;
                }
                self.typ(t)?;
                self.up()?;
                self.down(0)?;
                self.exp(s)?;
                self.up()
            }
            HExp::NEHole(_, s) => {
                self.push(Action::Construct(Shape::NEHole))?;
                self.exp(s)?;
                self.up()
            }
        }
    }

    /// Cursor is on a type hole.
    fn typ(&mut self, t: &HTyp) -> Result<(), ScriptError> {
        match t {
            HTyp::Hole => Ok(()),
            HTyp::Num => self.push(Action::Construct(Shape::Num)),
            HTyp::Arrow(a, b) => {
                self.push(Action::Construct(Shape::Arrow))?;
                self.typ(b)?;
                self.up()?;
                self.down(0)?;
                self.typ(a)?;
                self.up()
            }
        }
    }
}

/// Actions that build `e` starting from [`script_start`]. The final state
/// erases to `e` up to the naming of holes.
pub fn construct_script(e: &HExp) -> Result<Vec<Action>, ScriptError> {
    let ctx = TypeCtx::new();
    synthesize(&ctx, e).map_err(ScriptError::NotWellTyped)?;
    let (z, gen) = script_start();
    let mut b = Builder { ctx, z, gen, script: Vec::new() };
    b.exp(e)?;
    debug_assert_eq!(b.z.expr().canonical_holes(), e.canonical_holes());
    Ok(b.script)
}
