//! Edit states: an expression with exactly one cursor, addressed by a path.
//!
//! Child indices follow the arity table: `Lam` has its body at 0, `Ap` and
//! `Plus` have two children, `Asc` has its subject at 0 and its type
//! annotation at 1, `NEHole` has its subject at 0. Inside a type, `Arrow` has
//! domain 0 and codomain 1.

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::syntax::{HExp, HTyp, HoleName};

/// Sequence of 0-based child indices from the root.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Path(pub Vec<usize>);

impl Path {
    pub fn root() -> Path {
        Path(Vec::new())
    }

    pub fn steps(&self) -> &[usize] {
        &self.0
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn child(&self, k: usize) -> Path {
        let mut steps = self.0.clone();
        steps.push(k);
        Path(steps)
    }

    pub fn parent(&self) -> Option<Path> {
        let (_, init) = self.0.split_last()?;
        Some(Path(init.to_vec()))
    }
}

impl From<Vec<usize>> for Path {
    fn from(v: Vec<usize>) -> Path {
        Path(v)
    }
}

/// Dotted rendering used by the notebook file; the root path is `root`.
impl fmt::Display for Path {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("root");
        }
        let parts: Vec<String> = self.0.iter().map(|k| k.to_string()).collect();
        f.write_str(&parts.join("."))
    }
}

impl FromStr for Path {
    type Err = String;

    fn from_str(s: &str) -> Result<Path, String> {
        if s == "root" {
            return Ok(Path::root());
        }
        s.split('.')
            .map(|p| p.parse::<usize>().map_err(|_| format!("bad path step `{p}`")))
            .collect::<Result<Vec<_>, _>>()
            .map(Path)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid path {path}: step {at} does not index a child")]
pub struct InvalidPath {
    pub path: Path,
    /// Position of the offending step.
    pub at: usize,
}

/// The subterm a path addresses.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Focus<'a> {
    Exp(&'a HExp),
    Typ(&'a HTyp),
}

/// Follow `path` from `e`. Returns the index of the first bad step on failure.
pub fn resolve<'a>(e: &'a HExp, path: &[usize]) -> Result<Focus<'a>, usize> {
    let mut focus = Focus::Exp(e);
    for (i, &k) in path.iter().enumerate() {
        focus = match focus {
            Focus::Exp(HExp::Asc(_, t)) if k == 1 => Focus::Typ(t),
            Focus::Exp(e) => match e.children().get(k) {
                Some(c) => Focus::Exp(c),
                None => return Err(i),
            },
            Focus::Typ(t) => match t.children().get(k) {
                Some(c) => Focus::Typ(c),
                None => return Err(i),
            },
        };
    }
    Ok(focus)
}

/// An expression together with one cursor. The cursor path is validated on
/// construction, so a `ZExp` always has exactly one well-placed cursor.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ZExp {
    expr: HExp,
    cursor: Path,
}

impl ZExp {
    pub fn new(expr: HExp, cursor: Path) -> Result<ZExp, InvalidPath> {
        match resolve(&expr, cursor.steps()) {
            Ok(_) => Ok(ZExp { expr, cursor }),
            Err(at) => Err(InvalidPath { path: cursor, at }),
        }
    }

    pub fn at_root(expr: HExp) -> ZExp {
        ZExp { expr, cursor: Path::root() }
    }

    pub fn expr(&self) -> &HExp {
        &self.expr
    }

    pub fn cursor(&self) -> &Path {
        &self.cursor
    }

    pub fn focus(&self) -> Focus<'_> {
        resolve(&self.expr, self.cursor.steps()).expect("cursor validated on construction")
    }

    pub fn into_parts(self) -> (HExp, Path) {
        (self.expr, self.cursor)
    }
}

pub fn place_cursor(e: HExp, p: Path) -> Result<ZExp, InvalidPath> {
    ZExp::new(e, p)
}

pub fn erase_cursor(z: &ZExp) -> HExp {
    z.expr.clone()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum HoleKind {
    Empty,
    NonEmpty,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HoleInfo {
    pub name: HoleName,
    pub path: Path,
    pub kind: HoleKind,
}

/// Every expression hole in pre-order (leftmost-outermost).
pub fn holes_of(e: &HExp) -> Vec<HoleInfo> {
    fn go(e: &HExp, path: &mut Vec<usize>, out: &mut Vec<HoleInfo>) {
        match e {
            HExp::EHole(u) => out.push(HoleInfo { name: *u, path: Path(path.clone()), kind: HoleKind::Empty }),
            HExp::NEHole(u, _) => out.push(HoleInfo { name: *u, path: Path(path.clone()), kind: HoleKind::NonEmpty }),
            _ => {}
        }
        for (k, c) in e.children().into_iter().enumerate() {
            path.push(k);
            go(c, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    go(e, &mut Vec::new(), &mut out);
    out
}

/// Every cursor position of `e` in pre-order, type positions included.
pub fn positions(e: &HExp) -> Vec<Path> {
    fn typ(t: &HTyp, path: &mut Vec<usize>, out: &mut Vec<Path>) {
        out.push(Path(path.clone()));
        for (k, c) in t.children().into_iter().enumerate() {
            path.push(k);
            typ(c, path, out);
            path.pop();
        }
    }
    fn exp(e: &HExp, path: &mut Vec<usize>, out: &mut Vec<Path>) {
        out.push(Path(path.clone()));
        for (k, c) in e.children().into_iter().enumerate() {
            path.push(k);
            exp(c, path, out);
            path.pop();
        }
        if let HExp::Asc(_, t) = e {
            path.push(1);
            typ(t, path, out);
            path.pop();
        }
    }
    let mut out = Vec::new();
    exp(e, &mut Vec::new(), &mut out);
    out
}

/// Path of the hole named `u`, if present.
pub fn find_hole(e: &HExp, u: HoleName) -> Option<HoleInfo> {
    holes_of(e).into_iter().find(|h| h.name == u)
}

/// Replace the expression at `path` (which must address an expression).
pub fn replace_exp(e: &HExp, path: &[usize], new: HExp) -> HExp {
    let Some((&k, rest)) = path.split_first() else {
        return new;
    };
    let sub = |c: &HExp| replace_exp(c, rest, new.clone());
    match (e, k) {
        (HExp::Lam(x, b), 0) => HExp::Lam(x.clone(), Box::new(sub(b))),
        (HExp::Ap(f, a), 0) => HExp::ap(sub(f), (**a).clone()),
        (HExp::Ap(f, a), 1) => HExp::ap((**f).clone(), sub(a)),
        (HExp::Plus(l, r), 0) => HExp::plus(sub(l), (**r).clone()),
        (HExp::Plus(l, r), 1) => HExp::plus((**l).clone(), sub(r)),
        (HExp::Asc(s, t), 0) => HExp::asc(sub(s), t.clone()),
        (HExp::NEHole(u, s), 0) => HExp::NEHole(*u, Box::new(sub(s))),
        _ => panic!("replace_exp: path does not address an expression"),
    }
}
