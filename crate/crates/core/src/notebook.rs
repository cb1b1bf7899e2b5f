//! Live notebooks: ordered cells, each binding a name to an edit state.
//!
//! A cell sees the names and types of the earlier cells that type check.
//! After every change exactly the changed cell and the cells that depend on
//! it, directly or through other cells, are re-checked and re-evaluated.

use std::collections::BTreeSet;
use std::fmt;

use thiserror::Error;

use crate::action::{apply_action, Action, ActionError};
use crate::dynamics::{eval_in, fill, resume, Env, EvalResult, FillError};
use crate::macros::{run_macro, Macro};
use crate::sexp::parse;
use crate::statics::{synthesize, StaticError, TypeCtx};
use crate::syntax::{is_ident, HExp, HTyp, HoleGen, HoleName};
use crate::zipper::{Path, ZExp};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CellId(pub String);

impl fmt::Display for CellId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for CellId {
    fn from(s: &str) -> CellId {
        CellId(s.to_string())
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Cell {
    pub id: CellId,
    pub name: String,
    pub state: ZExp,
    pub typ: Result<HTyp, StaticError>,
    /// Present exactly when `typ` is.
    pub result: Option<EvalResult>,
}

impl Cell {
    pub fn expr(&self) -> &HExp {
        self.state.expr()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum NotebookError {
    #[error("no cell `{0}`")]
    UnknownCell(String),
    #[error("a cell named `{0}` already exists")]
    DuplicateName(String),
    #[error("`{0}` is not a valid cell name")]
    BadName(String),
    #[error("hole {0} is already used in this notebook")]
    DuplicateHole(HoleName),
    #[error(transparent)]
    Action(#[from] ActionError),
    #[error(transparent)]
    Fill(#[from] FillError),
}

impl NotebookError {
    pub fn code(&self) -> &'static str {
        match self {
            NotebookError::UnknownCell(_) => "E_UNKNOWN_CELL",
            NotebookError::DuplicateName(_) => "E_DUPLICATE_NAME",
            NotebookError::BadName(_) => "E_PARSE",
            NotebookError::DuplicateHole(_) => "E_DUPLICATE_HOLE",
            NotebookError::Action(e) => e.code(),
            NotebookError::Fill(e) => e.code(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}{}: {message}", cell.map(|c| format!(" (cell {c})")).unwrap_or_default())]
pub struct NotebookParseError {
    pub line: usize,
    /// Zero-based index of the cell being read, if any.
    pub cell: Option<usize>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct Notebook {
    cells: Vec<Cell>,
    holes: HoleGen,
    next_cell: u64,
}

pub const HEADER: &str = "#hazelnb 1";

impl Notebook {
    pub fn new() -> Notebook {
        Notebook { cells: Vec::new(), holes: HoleGen::new(), next_cell: 1 }
    }

    pub fn cells(&self) -> &[Cell] {
        &self.cells
    }

    pub fn holes(&self) -> HoleGen {
        self.holes
    }

    pub fn cell(&self, id: &CellId) -> Option<&Cell> {
        self.cells.iter().find(|c| &c.id == id)
    }

    fn index(&self, id: &CellId) -> Result<usize, NotebookError> {
        self.cells.iter().position(|c| &c.id == id).ok_or_else(|| NotebookError::UnknownCell(id.0.clone()))
    }

    fn used_holes(&self) -> BTreeSet<HoleName> {
        self.cells.iter().flat_map(|c| c.expr().hole_names()).collect()
    }

    /// Names and types visible to cell `i`.
    pub fn ctx_before(&self, i: usize) -> TypeCtx {
        self.cells[..i].iter().filter_map(|c| c.typ.as_ref().ok().map(|t| (c.name.clone(), t.clone()))).collect()
    }

    /// Runtime bindings for the free variables of cell `i`.
    fn env_for(&self, i: usize) -> Env {
        let fv = self.cells[i].expr().free_vars();
        self.cells[..i]
            .iter()
            .filter(|c| fv.contains(&c.name))
            .filter_map(|c| c.result.clone().map(|r| (c.name.clone(), r)))
            .collect()
    }

    fn refresh(&mut self, i: usize) {
        let ctx = self.ctx_before(i);
        let typ = synthesize(&ctx, self.cells[i].expr());
        let result = typ.as_ref().ok().map(|_| eval_in(&self.env_for(i), self.cells[i].expr()));
        let cell = &mut self.cells[i];
        cell.typ = typ;
        cell.result = result;
    }

    /// Cell `i` and every later cell that refers, possibly through other
    /// cells, to it. In notebook order.
    pub fn dependents(&self, i: usize) -> Vec<usize> {
        let mut names = BTreeSet::from([self.cells[i].name.clone()]);
        let mut out = vec![i];
        for (j, c) in self.cells.iter().enumerate().skip(i + 1) {
            if c.expr().free_vars().iter().any(|x| names.contains(x)) {
                names.insert(c.name.clone());
                out.push(j);
            }
        }
        out
    }

    fn refresh_from(&mut self, i: usize) -> Vec<CellId> {
        let affected = self.dependents(i);
        for &j in &affected {
            self.refresh(j);
        }
        affected.into_iter().map(|j| self.cells[j].id.clone()).collect()
    }

    fn fresh_id(&mut self) -> CellId {
        loop {
            let id = CellId(format!("c{}", self.next_cell));
            self.next_cell += 1;
            if self.cell(&id).is_none() {
                return id;
            }
        }
    }

    /// Append a cell. Without an expression the cell starts as a fresh hole.
    pub fn add_cell(&self, name: &str, e: Option<HExp>) -> Result<(Notebook, CellId), NotebookError> {
        if !is_ident(name) {
            return Err(NotebookError::BadName(name.to_string()));
        }
        if self.cells.iter().any(|c| c.name == name) {
            return Err(NotebookError::DuplicateName(name.to_string()));
        }
        let mut nb = self.clone();
        let e = match e {
            Some(e) => {
                let used = self.used_holes();
                if let Some(u) = e.hole_names().into_iter().find(|u| used.contains(u)) {
                    return Err(NotebookError::DuplicateHole(u));
                }
                if let Some(u) = e.duplicate_hole() {
                    return Err(NotebookError::DuplicateHole(u));
                }
                nb.holes.bump_to(HoleGen::above(&e).peek());
                e
            }
            None => HExp::EHole(nb.holes.fresh()),
        };
        let id = nb.fresh_id();
        nb.cells.push(Cell { id: id.clone(), name: name.to_string(), state: ZExp::at_root(e), typ: Ok(HTyp::Hole), result: None });
        let last = nb.cells.len() - 1;
        nb.refresh(last);
        Ok((nb, id))
    }

    /// Apply an action to one cell, then recompute it and its dependents.
    pub fn edit_cell(&self, id: &CellId, a: &Action) -> Result<(Notebook, Vec<CellId>), NotebookError> {
        let i = self.index(id)?;
        let mut nb = self.clone();
        let ctx = nb.ctx_before(i);
        nb.cells[i].state = apply_action(&ctx, &self.cells[i].state, a, &mut nb.holes)?;
        let recomputed = nb.refresh_from(i);
        Ok((nb, recomputed))
    }

    /// Run a macro on one cell. Returns the primitive actions that took effect.
    pub fn macro_cell(&self, id: &CellId, m: &Macro, budget: usize) -> Result<(Notebook, Vec<Action>, Vec<CellId>), NotebookError> {
        let i = self.index(id)?;
        let mut nb = self.clone();
        let ctx = nb.ctx_before(i);
        let run = run_macro(&ctx, &self.cells[i].state, m, budget, &mut nb.holes)?;
        nb.cells[i].state = run.state;
        let recomputed = nb.refresh_from(i);
        Ok((nb, run.trace, recomputed))
    }

    /// Fill an empty hole of a cell and continue evaluation from the cached
    /// results instead of starting over.
    pub fn fill_and_resume_cell(&self, id: &CellId, u: HoleName, filler: &HExp) -> Result<(Notebook, Vec<CellId>), NotebookError> {
        let i = self.index(id)?;
        let used = self.used_holes();
        if let Some(v) = filler.hole_names().into_iter().find(|v| used.contains(v)) {
            return Err(FillError::HoleClash(v).into());
        }
        let old = &self.cells[i];
        let filled = fill(&self.ctx_before(i), old.expr(), u, filler)?;
        let same_scope = filled.free_vars() == old.expr().free_vars();
        let mut nb = self.clone();
        nb.holes.bump_to(HoleGen::above(filler).peek());
        nb.cells[i].state = ZExp::new(filled, old.state.cursor().clone()).expect("filling keeps every path valid");
        let affected = nb.dependents(i);
        for &j in &affected {
            let typ = synthesize(&nb.ctx_before(j), nb.cells[j].expr());
            match (&typ, &nb.cells[j].result) {
                (Ok(_), Some(prev)) if same_scope => {
                    let r = resume(prev, u, filler);
                    nb.cells[j].typ = typ;
                    nb.cells[j].result = Some(r);
                }
                _ => nb.refresh(j),
            }
        }
        let ids = affected.into_iter().map(|j| nb.cells[j].id.clone()).collect();
        Ok((nb, ids))
    }

    /// Every cell checked and evaluated again from nothing.
    pub fn recompute_all(&self) -> Notebook {
        let mut nb = self.clone();
        for i in 0..nb.cells.len() {
            nb.refresh(i);
        }
        nb
    }

    pub fn save(&self) -> String {
        let mut out = format!("{HEADER}\nnext-hole {}\n", self.holes.peek());
        for c in &self.cells {
            out.push_str(&format!("cell {} {} {}\n{}\n", c.id, c.name, c.state.cursor(), c.expr()));
        }
        out
    }

    pub fn load(text: &str) -> Result<Notebook, NotebookParseError> {
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty()).map(|(n, l)| (n + 1, l));
        let err = |line: usize, cell: Option<usize>, message: String| NotebookParseError { line, cell, message };
        match lines.next() {
            Some((_, l)) if l.trim() == HEADER => {}
            Some((n, _)) => return Err(err(n, None, format!("expected header `{HEADER}`"))),
            None => return Err(err(1, None, format!("expected header `{HEADER}`"))),
        }
        let mut nb = Notebook::new();
        let mut declared_holes = 0;
        let mut lines = lines.peekable();
        if let Some((n, l)) = lines.next_if(|(_, l)| l.starts_with("next-hole")) {
            declared_holes = l["next-hole".len()..].trim().parse().map_err(|_| err(n, None, "expected `next-hole <n>`".into()))?;
        }
        let mut index = 0;
        while let Some((n, head)) = lines.next() {
            let cell = Some(index);
            let words: Vec<&str> = head.split_whitespace().collect();
            let ["cell", id, name, path] = words[..] else {
                return Err(err(n, cell, "expected `cell <id> <name> <path>`".into()));
            };
            let cursor: Path = path.parse().map_err(|_| err(n, cell, format!("bad cursor path `{path}`")))?;
            let (m, body) = lines.next().ok_or_else(|| err(n + 1, cell, "missing cell expression".into()))?;
            let e = parse(body).map_err(|pe| err(m, cell, pe.to_string()))?;
            let state = ZExp::new(e.clone(), cursor).map_err(|ip| err(n, cell, ip.to_string()))?;
            if nb.cells.iter().any(|c| c.id.0 == id) {
                return Err(err(n, cell, format!("duplicate cell id `{id}`")));
            }
            let (next, _) = nb.add_cell(name, Some(e)).map_err(|ne| err(n, cell, ne.to_string()))?;
            nb = next;
            let last = nb.cells.last_mut().expect("just added");
            last.id = CellId(id.to_string());
            last.state = state;
            if let Some(k) = id.strip_prefix('c').and_then(|k| k.parse::<u64>().ok()) {
                nb.next_cell = nb.next_cell.max(k + 1);
            }
            index += 1;
        }
        nb.holes.bump_to(declared_holes);
        nb.next_cell = nb.next_cell.max(nb.cells.len() as u64 + 1);
        Ok(nb)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::action::Shape;
    use crate::syntax::HTyp;
    use num_bigint::BigInt;

    fn nb_of(cells: &[(&str, HExp)]) -> Notebook {
        let mut nb = Notebook::new();
        for (name, e) in cells {
            nb = nb.add_cell(name, Some(e.clone())).unwrap().0;
        }
        nb
    }

    #[test]
    fn independent_cells_recompute_alone() {
        let nb = nb_of(&[("a", HExp::hole(0)), ("b", HExp::hole(1))]);
        let (_, re) = nb.edit_cell(&"c2".into(), &Action::num(4)).unwrap();
        assert_eq!(re, vec![CellId::from("c2")]);
    }

    #[test]
    fn dependent_sees_upstream_value() {
        let nb = nb_of(&[("a", HExp::num(2)), ("b", HExp::plus(HExp::var("a"), HExp::hole(0)))]);
        let b = CellId::from("c2");
        let (nb, _) = nb.fill_and_resume_cell(&b, HoleName(0), &HExp::num(3)).unwrap();
        assert_eq!(nb.cell(&b).unwrap().result, Some(EvalResult::VNum(BigInt::from(5))));
        assert_eq!(nb, nb.recompute_all());
    }

    #[test]
    fn incomplete_upstream_gives_indeterminate_result() {
        let nb = nb_of(&[("a", HExp::hole(0)), ("b", HExp::plus(HExp::var("a"), HExp::num(1)))]);
        let r = nb.cell(&"c2".into()).unwrap().result.clone().unwrap();
        assert_eq!(r, EvalResult::IPlus(Box::new(EvalResult::IHole(HoleName(0), Env::new())), Box::new(EvalResult::num(1))));
    }

    #[test]
    fn fill_reaches_two_dependents() {
        let nb = nb_of(&[
            ("f", HExp::asc(HExp::lam("m", HExp::plus(HExp::hole(0), HExp::var("m"))), HTyp::arrow(HTyp::Num, HTyp::Num))),
            ("p", HExp::ap(HExp::var("f"), HExp::num(1))),
            ("q", HExp::ap(HExp::var("f"), HExp::num(2))),
        ]);
        let (filled, re) = nb.fill_and_resume_cell(&"c1".into(), HoleName(0), &HExp::var("m")).unwrap();
        assert_eq!(re.len(), 3);
        assert_eq!(filled.cell(&"c3".into()).unwrap().result, Some(EvalResult::num(4)));
        assert_eq!(filled, filled.recompute_all());
    }

    #[test]
    fn fill_with_new_cell_reference_still_coherent() {
        let nb = nb_of(&[("a", HExp::num(7)), ("b", HExp::plus(HExp::hole(0), HExp::num(1)))]);
        let (filled, _) = nb.fill_and_resume_cell(&"c2".into(), HoleName(0), &HExp::var("a")).unwrap();
        assert_eq!(filled.cell(&"c2".into()).unwrap().result, Some(EvalResult::num(8)));
        assert_eq!(filled, filled.recompute_all());
    }

    #[test]
    fn new_cell_reference_reaches_dependents() {
        let nb = nb_of(&[("a", HExp::num(7)), ("b", HExp::plus(HExp::hole(0), HExp::num(1))), ("c", HExp::var("b"))]);
        let (filled, re) = nb.fill_and_resume_cell(&"c2".into(), HoleName(0), &HExp::var("a")).unwrap();
        assert_eq!(re, vec![CellId::from("c2"), CellId::from("c3")]);
        assert_eq!(filled.cell(&"c3".into()).unwrap().result, Some(EvalResult::num(8)));
    }

    #[test]
    fn failures_leave_notebook_alone() {
        let nb = nb_of(&[("a", HExp::plus(HExp::hole(0), HExp::num(1)))]);
        let bad = HExp::asc(HExp::lam("x", HExp::var("x")), HTyp::arrow(HTyp::Num, HTyp::Num));
        let err = nb.fill_and_resume_cell(&"c1".into(), HoleName(0), &bad).unwrap_err();
        assert_eq!(err.code(), "E_ILL_TYPED_FILLER");
        assert_eq!(nb.edit_cell(&"zz".into(), &Action::Del).unwrap_err().code(), "E_UNKNOWN_CELL");
        assert_eq!(nb.add_cell("a", None).unwrap_err().code(), "E_DUPLICATE_NAME");
    }

    #[test]
    fn type_change_upstream_is_localized() {
        let nb = nb_of(&[("a", HExp::hole(0)), ("b", HExp::ap(HExp::var("a"), HExp::num(1))), ("c", HExp::num(9))]);
        let (nb, re) = nb.edit_cell(&"c1".into(), &Action::num(3)).unwrap();
        assert_eq!(re, vec![CellId::from("c1"), CellId::from("c2")]);
        assert!(nb.cell(&"c2".into()).unwrap().typ.is_err());
        assert!(nb.cell(&"c2".into()).unwrap().result.is_none());
        assert_eq!(nb.cell(&"c3".into()).unwrap().result, Some(EvalResult::num(9)));
    }

    #[test]
    fn save_load_round_trip() {
        let empty = Notebook::new();
        assert_eq!(Notebook::load(&empty.save()).unwrap(), empty);

        let nb = nb_of(&[("a", HExp::hole(0)), ("b", HExp::plus(HExp::var("a"), HExp::hole(1)))]);
        let (nb, _) = nb.edit_cell(&"c2".into(), &Action::child(1)).unwrap();
        let (nb, _) = nb.add_cell("c", None).unwrap();
        let (nb, _) = nb.edit_cell(&"c3".into(), &Action::construct(Shape::Plus)).unwrap();
        let text = nb.save();
        assert!(text.starts_with("#hazelnb 1\nnext-hole 4\ncell c1 a root\n(hole 0)\n"));
        assert_eq!(Notebook::load(&text).unwrap(), nb);
    }

    #[test]
    fn load_rejects_bad_files() {
        let dup = "#hazelnb 1\ncell c1 a root\n(num 1)\ncell c2 a root\n(num 2)\n";
        let e = Notebook::load(dup).unwrap_err();
        assert_eq!((e.line, e.cell), (4, Some(1)));
        let bad = "#hazelnb 1\ncell c1 a root\n(plus 1\n";
        assert_eq!(Notebook::load(bad).unwrap_err().cell, Some(0));
        assert!(Notebook::load("hello").is_err());
    }
}
