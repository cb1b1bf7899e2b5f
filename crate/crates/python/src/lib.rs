use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use hazel_core::dynamics::parse_result;
use hazel_core::notebook::{CellId, Notebook};
use hazel_core::script::script_start;
use hazel_core::session::Session;
use hazel_core::sexp::{parse, parse_zexp, render_zexp};
use hazel_core::suggest::{enumerate_valid, rank, train, SuggestionModel, Trace};
use hazel_core::{apply_action, construct_script, cursor_info, evaluate, fill, holes_of, resume, run_macro, synthesize};
use hazel_core::{Action, HExp, HoleGen, HoleName, Macro, TypeCtx, ZExp};

create_exception!(hazel_kernel, KernelError, PyValueError);

fn err(code: &str, msg: impl std::fmt::Display) -> PyErr {
    KernelError::new_err(format!("{code}: {msg}"))
}

fn parse_expr(src: &str) -> PyResult<HExp> {
    parse(src).map_err(|e| err("E_PARSE", e))
}

fn parse_action(src: &str) -> PyResult<Action> {
    src.parse().map_err(|e| err("E_PARSE", e))
}

/// An expression in s-expression form.
#[pyclass(name = "Expr", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpr(HExp);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_expr(src).map(PyExpr)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }

    /// Synthesized type in the empty context.
    fn synthesize(&self) -> PyResult<String> {
        synthesize(&TypeCtx::new(), &self.0).map(|t| t.to_string()).map_err(|e| err(e.code(), e))
    }

    fn evaluate(&self) -> PyResult<String> {
        self.synthesize()?;
        Ok(evaluate(&self.0).to_string())
    }

    fn holes(&self) -> Vec<u64> {
        holes_of(&self.0).into_iter().map(|h| h.name.0).collect()
    }

    fn size(&self) -> usize {
        self.0.size()
    }

    fn fill(&self, hole: u64, filler: &PyExpr) -> PyResult<PyExpr> {
        fill(&TypeCtx::new(), &self.0, HoleName(hole), &filler.0).map(PyExpr).map_err(|e| err(e.code(), e))
    }

    /// Actions that build this expression from an empty hole.
    fn construct_script(&self) -> PyResult<Vec<String>> {
        construct_script(&self.0).map(|s| s.iter().map(Action::to_string).collect()).map_err(|e| err("E_STATIC", e))
    }
}

/// An edit state: an expression with a cursor, written with a `(cursor ...)`
/// marker.
#[pyclass(name = "EditState", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyEditState(ZExp);

#[pymethods]
impl PyEditState {
    #[new]
    fn new(src: &str) -> PyResult<Self> {
        parse_zexp(src).map(PyEditState).map_err(|e| err("E_PARSE", e))
    }

    #[staticmethod]
    fn start() -> Self {
        PyEditState(script_start().0)
    }

    fn __str__(&self) -> String {
        render_zexp(&self.0)
    }

    fn __repr__(&self) -> String {
        format!("EditState('{}')", render_zexp(&self.0))
    }

    fn expr(&self) -> PyExpr {
        PyExpr(self.0.expr().clone())
    }

    fn cursor(&self) -> String {
        self.0.cursor().to_string()
    }

    fn apply(&self, action: &str) -> PyResult<PyEditState> {
        let a = parse_action(action)?;
        let mut gen = HoleGen::above(self.0.expr());
        apply_action(&TypeCtx::new(), &self.0, &a, &mut gen).map(PyEditState).map_err(|e| err(e.code(), e))
    }

    #[pyo3(signature = (program, budget = 1000))]
    fn run_macro(&self, program: &str, budget: usize) -> PyResult<(PyEditState, Vec<String>)> {
        let m: Macro = program.parse().map_err(|e| err("E_PARSE", e))?;
        let mut gen = HoleGen::above(self.0.expr());
        let run = run_macro(&TypeCtx::new(), &self.0, &m, budget, &mut gen).map_err(|e| err(e.code(), e))?;
        Ok((PyEditState(run.state), run.trace.iter().map(Action::to_string).collect()))
    }

    fn cursor_info(&self) -> PyResult<String> {
        cursor_info(&TypeCtx::new(), &self.0).map(|i| i.to_string()).map_err(|e| err(e.code(), e))
    }

    fn valid_actions(&self) -> Vec<String> {
        enumerate_valid(&TypeCtx::new(), &self.0).iter().map(Action::to_string).collect()
    }

    #[pyo3(signature = (k, model = None))]
    fn suggest(&self, k: usize, model: Option<&PyModel>) -> Vec<(String, f64)> {
        let default = SuggestionModel::default();
        let m = model.map(|m| &m.0).unwrap_or(&default);
        rank(m, &TypeCtx::new(), &self.0, k).into_iter().map(|s| (s.action.to_string(), s.probability)).collect()
    }
}

#[pyclass(name = "SuggestionModel", frozen)]
struct PyModel(SuggestionModel);

#[pymethods]
impl PyModel {
    #[new]
    #[pyo3(signature = (alpha = 1.0))]
    fn new(alpha: f64) -> PyResult<Self> {
        if alpha > 0.0 {
            Ok(PyModel(SuggestionModel::new(alpha)))
        } else {
            Err(err("E_PARSE", "alpha must be positive"))
        }
    }

    /// Train on action scripts, each replayed from the empty-hole start.
    #[staticmethod]
    fn train(scripts: Vec<Vec<String>>) -> PyResult<Self> {
        let traces = scripts
            .iter()
            .map(|s| s.iter().map(|a| parse_action(a)).collect::<PyResult<Vec<_>>>().map(Trace::from_script))
            .collect::<PyResult<Vec<_>>>()?;
        train(&traces).map(PyModel).map_err(|e| err("E_MALFORMED_TRACE", e))
    }

    #[staticmethod]
    fn load(text: &str) -> PyResult<Self> {
        SuggestionModel::load(text).map(PyModel).map_err(|e| err("E_PARSE", e))
    }

    fn save(&self) -> String {
        self.0.save()
    }

    fn total(&self) -> u64 {
        self.0.total()
    }
}

#[pyclass(name = "Notebook")]
struct PyNotebook(Notebook);

#[pymethods]
impl PyNotebook {
    #[new]
    fn new() -> Self {
        PyNotebook(Notebook::new())
    }

    #[staticmethod]
    fn load(text: &str) -> PyResult<Self> {
        Notebook::load(text).map(PyNotebook).map_err(|e| err("E_PARSE", e))
    }

    fn save(&self) -> String {
        self.0.save()
    }

    #[pyo3(signature = (name, expr = None))]
    fn add_cell(&mut self, name: &str, expr: Option<&str>) -> PyResult<String> {
        let e = expr.map(parse_expr).transpose()?;
        let (nb, id) = self.0.add_cell(name, e).map_err(|e| err(e.code(), e))?;
        self.0 = nb;
        Ok(id.0)
    }

    /// Apply an action to a cell; returns the recomputed cell ids.
    fn edit(&mut self, cell: &str, action: &str) -> PyResult<Vec<String>> {
        let a = parse_action(action)?;
        let (nb, ids) = self.0.edit_cell(&CellId::from(cell), &a).map_err(|e| err(e.code(), e))?;
        self.0 = nb;
        Ok(ids.into_iter().map(|id| id.0).collect())
    }

    fn fill(&mut self, cell: &str, hole: u64, filler: &str) -> PyResult<Vec<String>> {
        let f = parse_expr(filler)?;
        let (nb, ids) = self.0.fill_and_resume_cell(&CellId::from(cell), HoleName(hole), &f).map_err(|e| err(e.code(), e))?;
        self.0 = nb;
        Ok(ids.into_iter().map(|id| id.0).collect())
    }

    fn result(&self, cell: &str) -> PyResult<Option<String>> {
        let c = self.0.cell(&CellId::from(cell)).ok_or_else(|| err("E_UNKNOWN_CELL", cell))?;
        Ok(c.result.as_ref().map(|r| r.to_string()))
    }

    /// `(id, name, rendered edit state)` for every cell, in order.
    fn cells(&self) -> Vec<(String, String, String)> {
        self.0.cells().iter().map(|c| (c.id.0.clone(), c.name.clone(), render_zexp(&c.state))).collect()
    }
}

/// A protocol session; `handle` takes one request line.
#[pyclass(name = "Session")]
struct PySession(Session);

#[pymethods]
impl PySession {
    #[new]
    fn new() -> Self {
        PySession(Session::default())
    }

    fn handle(&mut self, line: &str) -> Option<String> {
        self.0.handle_line(line).map(|r| r.to_string())
    }
}

/// Fill `hole` in a serialized evaluation result and continue evaluating.
#[pyfunction(name = "resume")]
fn py_resume(result: &str, hole: u64, filler: &PyExpr) -> PyResult<String> {
    let r = parse_result(result).map_err(|e| err("E_PARSE", e))?;
    Ok(resume(&r, HoleName(hole), &filler.0).to_string())
}

#[pymodule]
fn hazel_kernel(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("KernelError", m.py().get_type::<KernelError>())?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PyEditState>()?;
    m.add_class::<PyModel>()?;
    m.add_class::<PyNotebook>()?;
    m.add_class::<PySession>()?;
    m.add_function(wrap_pyfunction!(py_resume, m)?)?;
    Ok(())
}
