//! Kernel of a typed structure editor for a small lambda calculus with holes.
//!
//! Every edit state is a syntax tree with exactly one cursor. Incomplete
//! programs are type checked bidirectionally (holes behave like the unknown
//! type of gradual typing), edited through a checked action calculus,
//! evaluated to values or indeterminate results, and offered ranked action
//! suggestions that are valid by construction.

pub mod action;
pub mod dynamics;
pub mod gen;
pub mod macros;
pub mod notebook;
pub mod script;
pub mod session;
pub mod sexp;
pub mod statics;
pub mod suggest;
pub mod syntax;
pub mod zipper;

pub use action::{apply_action, Action, ActionError, Direction, Shape};
pub use dynamics::{evaluate, fill, resume, Env, EvalResult};
pub use macros::{run_macro, Macro};
pub use notebook::{Cell, CellId, Notebook};
pub use script::construct_script;
pub use sexp::ParseError;
pub use statics::{analyze, consistent, cursor_info, matched_arrow, synthesize, CursorInfo, Mode, StaticError, TypeCtx};
pub use suggest::{enumerate_valid, rank, train, Suggestion, SuggestionModel};
pub use syntax::{HExp, HTyp, HoleGen, HoleName};
pub use zipper::{erase_cursor, holes_of, place_cursor, HoleKind, Path, ZExp};
