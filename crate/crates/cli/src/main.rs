use std::fs;
use std::io::{self, BufReader, Read, Write};
use std::net::TcpListener;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use clap::{Parser, Subcommand};
use hazel_core::notebook::{Notebook, HEADER};
use hazel_core::script::script_start;
use hazel_core::sexp::{parse, parse_zexp, render_zexp};
use hazel_core::session::{repl, Session};
use hazel_core::statics::{position_at, Position};
use hazel_core::suggest::SuggestionModel;
use hazel_core::syntax::HoleGen;
use hazel_core::{apply_action, evaluate, holes_of, synthesize, Action, CursorInfo, HTyp, Mode, TypeCtx};

const IO_ERROR: u8 = 1;
const STATIC_ERROR: u8 = 2;

#[derive(Parser)]
#[command(name = "hazel-kernel", version, about = "Structure-editor kernel for a lambda calculus with holes")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Read protocol requests from stdin, answer on stdout.
    Repl {
        /// Suggestion model file.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Serve the protocol on a TCP port (on 127.0.0.1) or a unix socket path.
    Serve {
        #[arg(long)]
        socket: String,
        #[arg(long)]
        model: Option<PathBuf>,
        /// Stop accepting after this many connections.
        #[arg(long)]
        max_connections: Option<usize>,
    },
    /// Type check an expression or notebook file.
    Check { file: PathBuf },
    /// Evaluate an expression or notebook file.
    Eval { file: PathBuf },
    /// Replay a file of actions, one per line, from an empty hole.
    Script { file: PathBuf },
}

fn fail(code: u8, msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("{msg}");
    ExitCode::from(code)
}

fn read(path: &Path) -> Result<String, ExitCode> {
    fs::read_to_string(path).map_err(|e| fail(IO_ERROR, format!("error E_IO {}: {e}", path.display())))
}

fn load_model(path: &Option<PathBuf>) -> Result<SuggestionModel, ExitCode> {
    match path {
        None => Ok(SuggestionModel::default()),
        Some(p) => SuggestionModel::load(&read(p)?).map_err(|e| fail(IO_ERROR, format!("error E_IO {}: {e}", p.display()))),
    }
}

fn is_notebook(text: &str) -> bool {
    text.lines().find(|l| !l.trim().is_empty()).is_some_and(|l| l.trim() == HEADER)
}

fn load_notebook(text: &str) -> Result<Notebook, ExitCode> {
    Notebook::load(text).map_err(|e| fail(STATIC_ERROR, format!("error E_PARSE {e}")))
}

fn check(path: &Path) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    if is_notebook(&text) {
        let nb = match load_notebook(&text) {
            Ok(nb) => nb,
            Err(code) => return code,
        };
        let mut ok = true;
        for c in nb.cells() {
            match &c.typ {
                Ok(t) => println!("{} {} {t}", c.id, c.name),
                Err(e) => {
                    ok = false;
                    println!("{} {} error {} {e}", c.id, c.name, e.code());
                }
            }
        }
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(STATIC_ERROR) };
    }
    let e = match parse(&text) {
        Ok(e) => e,
        Err(err) => return fail(STATIC_ERROR, format!("error E_PARSE {err}")),
    };
    let ctx = TypeCtx::new();
    match synthesize(&ctx, &e) {
        Ok(t) => {
            println!("type {t}");
            for h in holes_of(&e) {
                let (inner, pos) = position_at(&ctx, &e, &h.path).expect("program checked above");
                let mode = match pos.expect("holes are expressions") {
                    Position::Syn => Mode::Synthesized(HTyp::Hole),
                    Position::Ana(t) => Mode::AnalyzedAgainst(t),
                };
                println!("hole {} {}", h.name, CursorInfo { mode, ctx: inner });
            }
            ExitCode::SUCCESS
        }
        Err(err) => fail(STATIC_ERROR, format!("error {} {err}", err.code())),
    }
}

fn eval(path: &Path) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    if is_notebook(&text) {
        let nb = match load_notebook(&text) {
            Ok(nb) => nb,
            Err(code) => return code,
        };
        let mut ok = true;
        for c in nb.cells() {
            match (&c.typ, &c.result) {
                (Ok(_), Some(r)) => println!("{} {} {r}", c.id, c.name),
                (Err(e), _) => {
                    ok = false;
                    println!("{} {} error {} {e}", c.id, c.name, e.code());
                }
                (Ok(_), None) => println!("{} {} none", c.id, c.name),
            }
        }
        return if ok { ExitCode::SUCCESS } else { ExitCode::from(STATIC_ERROR) };
    }
    let e = match parse(&text) {
        Ok(e) => e,
        Err(err) => return fail(STATIC_ERROR, format!("error E_PARSE {err}")),
    };
    match synthesize(&TypeCtx::new(), &e) {
        Ok(_) => {
            println!("{}", evaluate(&e));
            ExitCode::SUCCESS
        }
        Err(err) => fail(STATIC_ERROR, format!("error {} {err}", err.code())),
    }
}

/// Lines are actions in their text form. `#` starts a comment line. An
/// optional first line `start <edit state>` replaces the empty-hole start.
fn script(path: &Path) -> ExitCode {
    let text = match read(path) {
        Ok(t) => t,
        Err(code) => return code,
    };
    let ctx = TypeCtx::new();
    let (mut z, mut gen) = script_start();
    let mut first = true;
    for (n, line) in text.lines().enumerate() {
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if first {
            first = false;
            if let Some(rest) = line.strip_prefix("start ") {
                match parse_zexp(rest) {
                    Ok(s) => {
                        gen = HoleGen::above(s.expr());
                        z = s;
                        println!("{}", render_zexp(&z));
                        continue;
                    }
                    Err(err) => return fail(STATIC_ERROR, format!("error E_PARSE line {}: {err}", n + 1)),
                }
            }
        }
        let a: Action = match line.parse() {
            Ok(a) => a,
            Err(err) => return fail(STATIC_ERROR, format!("error E_PARSE line {}: {err}", n + 1)),
        };
        match apply_action(&ctx, &z, &a, &mut gen) {
            Ok(next) => {
                z = next;
                println!("{}", render_zexp(&z));
            }
            Err(err) => return fail(STATIC_ERROR, format!("error {} line {}: {err}", err.code(), n + 1)),
        }
    }
    ExitCode::SUCCESS
}

/// One session per connection, each on its own thread.
fn run_sessions<S, I>(incoming: I, model: &SuggestionModel, max: Option<usize>, split: fn(&S) -> io::Result<S>)
where
    S: Read + Write + Send + 'static,
    I: Iterator<Item = io::Result<S>>,
{
    let mut workers = Vec::new();
    for stream in incoming.take(max.unwrap_or(usize::MAX)) {
        let Ok(stream) = stream else { continue };
        let model = model.clone();
        workers.push(thread::spawn(move || {
            let Ok(reader) = split(&stream) else { return };
            let mut session = Session::new(model);
            repl(&mut session, BufReader::new(reader), stream);
        }));
    }
    for w in workers {
        let _ = w.join();
    }
}

fn serve(socket: &str, model: SuggestionModel, max: Option<usize>) -> ExitCode {
    if let Ok(port) = socket.parse::<u16>() {
        let listener = match TcpListener::bind(("127.0.0.1", port)) {
            Ok(l) => l,
            Err(e) => return fail(IO_ERROR, format!("error E_IO {socket}: {e}")),
        };
        if let Ok(addr) = listener.local_addr() {
            println!("listening {addr}");
        }
        run_sessions(listener.incoming(), &model, max, |s| s.try_clone());
        return ExitCode::SUCCESS;
    }
    serve_unix(socket, model, max)
}

#[cfg(unix)]
fn serve_unix(path: &str, model: SuggestionModel, max: Option<usize>) -> ExitCode {
    use std::os::unix::net::UnixListener;
    let listener = match UnixListener::bind(path) {
        Ok(l) => l,
        Err(e) => return fail(IO_ERROR, format!("error E_IO {path}: {e}")),
    };
    println!("listening {path}");
    run_sessions(listener.incoming(), &model, max, |s| s.try_clone());
    let _ = fs::remove_file(path);
    ExitCode::SUCCESS
}

#[cfg(not(unix))]
fn serve_unix(path: &str, _: SuggestionModel, _: Option<usize>) -> ExitCode {
    fail(IO_ERROR, format!("error E_IO {path}: unix sockets are not supported here; pass a port"))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Repl { model } => {
            let model = match load_model(&model) {
                Ok(m) => m,
                Err(code) => return code,
            };
            let mut session = Session::new(model);
            let code = repl(&mut session, io::stdin().lock(), io::stdout().lock());
            ExitCode::from(code as u8)
        }
        Command::Serve { socket, model, max_connections } => match load_model(&model) {
            Ok(m) => serve(&socket, m, max_connections),
            Err(code) => code,
        },
        Command::Check { file } => check(&file),
        Command::Eval { file } => eval(&file),
        Command::Script { file } => script(&file),
    }
}
