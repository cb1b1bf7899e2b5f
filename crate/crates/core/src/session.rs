//! Line protocol over a notebook.
//!
//! Each request is one line, `<op> <args...>`; each response is one line,
//! either `ok <payload>` or `error <CODE> <message>`. Blank request lines are
//! skipped without a response.
//!
//! ```text
//! new                          reset to an empty notebook
//! new <name> [<expr>]          append a cell (an empty hole by default)
//! load <file> | save <file>
//! action <cell> <action>
//! macro <cell> <macro>
//! fill <cell> <hole> <expr>
//! cursor-info <cell> | result <cell> | suggest <cell> <k> | cells
//! ```

use std::fmt;
use std::io::{self, BufRead, Write};

use crate::action::Action;
use crate::dynamics::EvalResult;
use crate::macros::Macro;
use crate::notebook::{Cell, CellId, Notebook, NotebookError};
use crate::sexp::{parse, render_zexp};
use crate::statics::{cursor_info, StaticError};
use crate::suggest::{rank, SuggestionModel};
use crate::syntax::{HExp, HoleName};

pub const DEFAULT_BUDGET: usize = 10_000;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Request {
    Reset,
    NewCell { name: String, expr: Option<HExp> },
    Load(String),
    Save(String),
    Action(CellId, Action),
    Macro(CellId, Macro),
    CursorInfo(CellId),
    Result(CellId),
    Suggest(CellId, usize),
    Fill(CellId, HoleName, HExp),
    Cells,
}

impl Request {
    pub fn is_read_only(&self) -> bool {
        matches!(self, Request::Save(_) | Request::CursorInfo(_) | Request::Result(_) | Request::Suggest(..) | Request::Cells)
    }
}

fn split_word(s: &str) -> (&str, &str) {
    let s = s.trim_start();
    match s.find(char::is_whitespace) {
        Some(i) => (&s[..i], s[i..].trim()),
        None => (s, ""),
    }
}

fn need<'a>(what: &str, s: &'a str) -> Result<(&'a str, &'a str), String> {
    let (w, rest) = split_word(s);
    if w.is_empty() {
        Err(format!("missing {what}"))
    } else {
        Ok((w, rest))
    }
}

fn no_more(rest: &str) -> Result<(), String> {
    if rest.is_empty() {
        Ok(())
    } else {
        Err(format!("unexpected trailing input `{rest}`"))
    }
}

pub fn parse_request(line: &str) -> Result<Request, String> {
    let (op, rest) = split_word(line);
    let cell = |rest: &str| -> Result<(CellId, String), String> {
        let (id, rest) = need("cell id", rest)?;
        Ok((CellId(id.to_string()), rest.to_string()))
    };
    match op {
        "new" if rest.is_empty() => Ok(Request::Reset),
        "new" => {
            let (name, rest) = split_word(rest);
            let expr = if rest.is_empty() { None } else { Some(parse(rest).map_err(|e| e.to_string())?) };
            Ok(Request::NewCell { name: name.to_string(), expr })
        }
        "load" | "save" => {
            let (path, rest) = need("file path", rest)?;
            no_more(rest)?;
            Ok(if op == "load" { Request::Load(path.to_string()) } else { Request::Save(path.to_string()) })
        }
        "action" => {
            let (id, rest) = cell(rest)?;
            Ok(Request::Action(id, rest.parse::<Action>().map_err(|e| e.to_string())?))
        }
        "macro" => {
            let (id, rest) = cell(rest)?;
            Ok(Request::Macro(id, rest.parse::<Macro>().map_err(|e| e.to_string())?))
        }
        "cursor-info" | "result" => {
            let (id, rest) = cell(rest)?;
            no_more(&rest)?;
            Ok(if op == "result" { Request::Result(id) } else { Request::CursorInfo(id) })
        }
        "suggest" => {
            let (id, rest) = cell(rest)?;
            let (k, rest) = need("count", &rest)?;
            no_more(rest)?;
            let k: usize = k.parse().ok().filter(|k| *k >= 1).ok_or_else(|| format!("`{k}` is not a positive count"))?;
            Ok(Request::Suggest(id, k))
        }
        "fill" => {
            let (id, rest) = cell(rest)?;
            let (u, rest) = need("hole name", &rest)?;
            let u: u64 = u.parse().map_err(|_| format!("`{u}` is not a hole name"))?;
            Ok(Request::Fill(id, HoleName(u), parse(rest).map_err(|e| e.to_string())?))
        }
        "cells" => {
            no_more(rest)?;
            Ok(Request::Cells)
        }
        "" => Err("empty request".into()),
        _ => Err(format!("unknown op `{op}`")),
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Response {
    Ok(String),
    Error { code: String, message: String },
}

impl Response {
    fn error(code: &str, message: impl fmt::Display) -> Response {
        let message = message.to_string().replace(['\n', '\r'], " ");
        Response::Error { code: code.to_string(), message }
    }

    pub fn is_ok(&self) -> bool {
        matches!(self, Response::Ok(_))
    }
}

impl fmt::Display for Response {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Response::Ok(p) if p.is_empty() => f.write_str("ok"),
            Response::Ok(p) => write!(f, "ok {p}"),
            Response::Error { code, message } => write!(f, "error {code} {message}"),
        }
    }
}

impl From<NotebookError> for Response {
    fn from(e: NotebookError) -> Response {
        Response::error(e.code(), e)
    }
}

fn outcome(c: &Cell) -> String {
    match (&c.typ, &c.result) {
        (Ok(_), Some(r)) => r.to_string(),
        (Err(e), _) => format!("(error {})", e.code()),
        (Ok(_), None) => "none".to_string(),
    }
}

/// One connection's state.
#[derive(Debug, Clone)]
pub struct Session {
    notebook: Option<Notebook>,
    model: SuggestionModel,
    budget: usize,
}

impl Default for Session {
    fn default() -> Self {
        Session::new(SuggestionModel::default())
    }
}

impl Session {
    pub fn new(model: SuggestionModel) -> Session {
        Session { notebook: None, model, budget: DEFAULT_BUDGET }
    }

    pub fn notebook(&self) -> Option<&Notebook> {
        self.notebook.as_ref()
    }

    fn nb(&self) -> Result<&Notebook, Response> {
        self.notebook.as_ref().ok_or_else(|| Response::error("E_NO_SESSION", "no notebook; send `new` or `load` first"))
    }

    fn cell<'a>(nb: &'a Notebook, id: &CellId) -> Result<&'a Cell, Response> {
        nb.cell(id).ok_or_else(|| NotebookError::UnknownCell(id.0.clone()).into())
    }

    fn recomputed(nb: &Notebook, ids: &[CellId]) -> String {
        let items: Vec<String> =
            ids.iter().filter_map(|id| nb.cell(id)).map(|c| format!("({} {})", c.id, outcome(c))).collect();
        format!("(recomputed{}{})", if items.is_empty() { "" } else { " " }, items.join(" "))
    }

    fn edited(nb: Notebook, id: &CellId, extra: &str, ids: &[CellId]) -> (Option<Notebook>, Response) {
        let z = render_zexp(&nb.cell(id).expect("edited cell exists").state);
        let payload = format!("{id} {z}{extra} {}", Self::recomputed(&nb, ids));
        (Some(nb), Response::Ok(payload))
    }

    pub fn handle_line(&mut self, line: &str) -> Option<Response> {
        if line.trim().is_empty() {
            return None;
        }
        Some(match parse_request(line) {
            Ok(req) => self.handle(&req),
            Err(msg) => Response::error("E_PARSE", msg),
        })
    }

    pub fn handle(&mut self, req: &Request) -> Response {
        match self.step(req) {
            Ok((next, resp)) => {
                if let Some(nb) = next {
                    self.notebook = Some(nb);
                }
                resp
            }
            Err(resp) => resp,
        }
    }

    fn step(&self, req: &Request) -> Result<(Option<Notebook>, Response), Response> {
        match req {
            Request::Reset => Ok((Some(Notebook::new()), Response::Ok(String::new()))),
            Request::NewCell { name, expr } => {
                let (nb, id) = self.nb()?.add_cell(name, expr.clone())?;
                Ok(Self::edited(nb, &id, "", &[id.clone()]))
            }
            Request::Load(path) => {
                let text = std::fs::read_to_string(path).map_err(|e| Response::error("E_IO", format!("{path}: {e}")))?;
                let nb = Notebook::load(&text).map_err(|e| Response::error("E_PARSE", e))?;
                let resp = cells_payload(&nb);
                Ok((Some(nb), resp))
            }
            Request::Save(path) => {
                let text = self.nb()?.save();
                std::fs::write(path, text).map_err(|e| Response::error("E_IO", format!("{path}: {e}")))?;
                Ok((None, Response::Ok(format!("saved {path}"))))
            }
            Request::Action(id, a) => {
                let (nb, ids) = self.nb()?.edit_cell(id, a)?;
                Ok(Self::edited(nb, id, "", &ids))
            }
            Request::Macro(id, m) => {
                let (nb, trace, ids) = self.nb()?.macro_cell(id, m, self.budget)?;
                let trace: Vec<String> = trace.iter().map(|a| format!("({a})")).collect();
                let extra = format!(" (trace{}{})", if trace.is_empty() { "" } else { " " }, trace.join(" "));
                Ok(Self::edited(nb, id, &extra, &ids))
            }
            Request::Fill(id, u, filler) => {
                let (nb, ids) = self.nb()?.fill_and_resume_cell(id, *u, filler)?;
                Ok(Self::edited(nb, id, "", &ids))
            }
            Request::CursorInfo(id) => {
                let nb = self.nb()?;
                let i = nb.cells().iter().position(|c| &c.id == id).ok_or_else(|| Response::from(NotebookError::UnknownCell(id.0.clone())))?;
                let info = cursor_info(&nb.ctx_before(i), &nb.cells()[i].state).map_err(static_error)?;
                Ok((None, Response::Ok(format!("{id} {info}"))))
            }
            Request::Result(id) => {
                let c = Self::cell(self.nb()?, id)?;
                match (&c.typ, &c.result) {
                    (Err(e), _) => Err(static_error(e.clone())),
                    (Ok(_), r) => Ok((None, Response::Ok(format!("{id} {}", r.as_ref().map(EvalResult::to_string).unwrap_or("none".into()))))),
                }
            }
            Request::Suggest(id, k) => {
                let nb = self.nb()?;
                let i = nb.cells().iter().position(|c| &c.id == id).ok_or_else(|| Response::from(NotebookError::UnknownCell(id.0.clone())))?;
                let cell = &nb.cells()[i];
                if let Err(e) = &cell.typ {
                    return Err(static_error(e.clone()));
                }
                let items: Vec<String> = rank(&self.model, &nb.ctx_before(i), &cell.state, *k)
                    .iter()
                    .map(|s| format!("({:.6} {})", s.probability, s.action))
                    .collect();
                Ok((None, Response::Ok(format!("{id} (suggest{}{})", if items.is_empty() { "" } else { " " }, items.join(" ")))))
            }
            Request::Cells => Ok((None, cells_payload(self.nb()?))),
        }
    }
}

fn static_error(e: StaticError) -> Response {
    Response::error(e.code(), e)
}

fn cells_payload(nb: &Notebook) -> Response {
    let items: Vec<String> = nb
        .cells()
        .iter()
        .map(|c| {
            let typ = match &c.typ {
                Ok(t) => t.to_string(),
                Err(e) => format!("(error {})", e.code()),
            };
            format!("({} {} {} {})", c.id, c.name, typ, outcome(c))
        })
        .collect();
    Response::Ok(format!("(cells{}{})", if items.is_empty() { "" } else { " " }, items.join(" ")))
}

/// Serve requests from `input` until it ends. Returns the process exit code:
/// 0 at end of input, 1 when reading or writing fails.
pub fn repl<R: BufRead, W: Write>(session: &mut Session, input: R, mut output: W) -> i32 {
    for line in input.lines() {
        let Ok(line) = line else {
            return 1;
        };
        if let Some(resp) = session.handle_line(&line) {
            if writeln!(output, "{resp}").and_then(|_| output.flush()).is_err() {
                return 1;
            }
        }
    }
    0
}

/// Run a whole transcript through a fresh session and collect the responses.
pub fn run_transcript(model: SuggestionModel, requests: &str) -> io::Result<String> {
    let mut out = Vec::new();
    let mut session = Session::new(model);
    if repl(&mut session, requests.as_bytes(), &mut out) != 0 {
        return Err(io::Error::other("transcript failed"));
    }
    String::from_utf8(out).map_err(io::Error::other)
}
