use std::fs;
use std::io::{BufRead, BufReader, Write};
use std::net::TcpStream;
use std::path::Path;
use std::process::{Command, Output, Stdio};

const BIN: &str = env!("CARGO_BIN_EXE_hazel-kernel");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

fn desk() -> String {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/tests/data/desk.hazelnb").to_str().unwrap().to_string()
}

#[test]
fn check_reports_type_and_holes() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "e.hz", "(ap (asc (lam x (plus (var x) (hole 1))) (arrow num num)) (hole 2))");
    let o = run(&["check", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "type num\nhole 1 (analyzed num) (ctx (x num))\nhole 2 (analyzed num) (ctx)\n");
}

#[test]
fn static_errors_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    let unbound = write(dir.path(), "u.hz", "(plus (var y) (num 1))");
    let garbled = write(dir.path(), "g.hz", "(plus (num 1)");
    for f in [&unbound, &garbled] {
        assert_eq!(run(&["check", f]).status.code(), Some(2));
        assert_eq!(run(&["eval", f]).status.code(), Some(2));
    }
    assert!(String::from_utf8_lossy(&run(&["check", &unbound]).stderr).contains("E_UNBOUND"));
}

#[test]
fn missing_files_exit_one() {
    for cmd in ["check", "eval", "script"] {
        assert_eq!(run(&[cmd, "/nonexistent/file.hz"]).status.code(), Some(1));
    }
    assert_eq!(run(&["repl", "--model", "/nonexistent/model.tsv"]).status.code(), Some(1));
}

#[test]
fn eval_prints_indeterminate_results() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "e.hz", "(plus (num 2) (hole 5))");
    let o = run(&["eval", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(iplus (vnum 2) (ihole 5 ()))\n");
}

#[test]
fn notebooks_check_and_eval_per_cell() {
    let o = run(&["eval", &desk()]);
    assert_eq!(o.status.code(), Some(0));
    let lines: Vec<String> = stdout(&o).lines().map(String::from).collect();
    assert_eq!(lines[0], "c1 data (vnum 6)");
    assert_eq!(lines[2], "c3 stats (iplus (vnum 6) (ihole 1 ((m (vnum 6)))))");
    let o = run(&["check", &desk()]);
    assert_eq!(stdout(&o), "c1 data num\nc2 summary (arrow num num)\nc3 stats num\n");
}

#[test]
fn script_replays_actions() {
    let dir = tempfile::tempdir().unwrap();
    let f = write(dir.path(), "s.txt", "# build 1 + 2\nconstruct plus\nconstruct num 2\n");
    let o = run(&["script", &f]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "(plus (hole 0) (cursor (hole 1)))\n(plus (hole 0) (cursor (num 2)))\n");
    let bad = write(dir.path(), "b.txt", "construct var nope\n");
    assert_eq!(run(&["script", &bad]).status.code(), Some(2));
    let start = write(dir.path(), "t.txt", "start (plus (cursor (hole 3)) (num 1))\nconstruct num 4\n");
    assert_eq!(stdout(&run(&["script", &start])).lines().last(), Some("(plus (cursor (num 4)) (num 1))"));
}

#[test]
fn repl_answers_each_line() {
    let mut child = Command::new(BIN).arg("repl").stdin(Stdio::piped()).stdout(Stdio::piped()).spawn().unwrap();
    child.stdin.take().unwrap().write_all(b"new\nnew a (plus (num 1) (num 2))\nresult c1\nbogus\n").unwrap();
    let o = child.wait_with_output().unwrap();
    assert_eq!(
        stdout(&o),
        "ok\nok c1 (cursor (plus (num 1) (num 2))) (recomputed (c1 (vnum 3)))\nok c1 (vnum 3)\nerror E_PARSE unknown op `bogus`\n"
    );
}

#[test]
fn serve_over_tcp() {
    let mut child = Command::new(BIN)
        .args(["serve", "--socket", "0", "--max-connections", "1"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut out = BufReader::new(child.stdout.take().unwrap());
    let mut banner = String::new();
    out.read_line(&mut banner).unwrap();
    let addr = banner.trim().strip_prefix("listening ").expect("banner names the address").to_string();
    let mut conn = TcpStream::connect(&addr).unwrap();
    conn.write_all(b"new\nnew a (num 4)\ncells\n").unwrap();
    conn.shutdown(std::net::Shutdown::Write).unwrap();
    let replies: Vec<String> = BufReader::new(conn).lines().map(Result::unwrap).collect();
    assert_eq!(replies.len(), 3);
    assert_eq!(replies[2], "ok (cells (c1 a num (vnum 4)))");
    assert!(child.wait().unwrap().success());
}

#[cfg(unix)]
#[test]
fn serve_over_unix_socket() {
    use std::os::unix::net::UnixStream;
    let dir = tempfile::tempdir().unwrap();
    let sock = dir.path().join("k.sock");
    let sock_arg = sock.to_str().unwrap();
    let mut child = Command::new(BIN)
        .args(["serve", "--socket", sock_arg, "--max-connections", "1"])
        .stdout(Stdio::piped())
        .spawn()
        .unwrap();
    let mut banner = String::new();
    BufReader::new(child.stdout.take().unwrap()).read_line(&mut banner).unwrap();
    assert_eq!(banner.trim(), format!("listening {sock_arg}"));
    let mut conn = UnixStream::connect(&sock).unwrap();
    conn.write_all(b"cells\n").unwrap();
    conn.shutdown(std::net::Shutdown::Write).unwrap();
    let replies: Vec<String> = BufReader::new(conn).lines().map(Result::unwrap).collect();
    assert_eq!(replies, vec!["error E_NO_SESSION no notebook; send `new` or `load` first".to_string()]);
    assert!(child.wait().unwrap().success());
}
