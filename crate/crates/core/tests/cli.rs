use std::path::{Path, PathBuf};
use std::process::{Command, Output};

const CORPUS: &str = concat!(env!("CARGO_MANIFEST_DIR"), "/corpus/corpus.sill");

fn sill(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sill"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exit code")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn write(dir: &Path, name: &str, text: &[u8]) -> PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

#[test]
fn check_corpus() {
    let out = sill(&["check", CORPUS]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
}

#[test]
fn check_rejects_weak_inc() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(CORPUS).unwrap().replace(
        "proc inc : (Std -o Std) /\\ (StdPos -o StdPos) /\\ (Empty -o StdPos)",
        "proc inc : Std -o Std",
    );
    let p = write(dir.path(), "weak.sill", text.as_bytes());
    let out = sill(&["check", p.to_str().unwrap()]);
    assert_eq!(code(&out), 1);
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("`inc`"), "{err}");
}

#[test]
fn check_error_codes() {
    let dir = tempfile::tempdir().unwrap();
    let garbage = write(dir.path(), "g.sill", b"\xff\xfe\x00 proc ???");
    assert_eq!(code(&sill(&["check", garbage.to_str().unwrap()])), 2);
    let bad = write(dir.path(), "b.sill", b"type = +{");
    assert_eq!(code(&sill(&["check", bad.to_str().unwrap()])), 2);
    let missing = dir.path().join("missing.sill");
    assert_eq!(code(&sill(&["check", missing.to_str().unwrap()])), 3);
    let loopy = write(dir.path(), "t.sill", b"type t = t");
    assert_eq!(code(&sill(&["check", loopy.to_str().unwrap()])), 1);
}

#[test]
fn subtype_queries() {
    let out = sill(&["subtype", CORPUS, "Pos", "Nat"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "Pos <= Nat : yes\n");
    let out = sill(&["subtype", CORPUS, "Nat", "Pos"]);
    assert_eq!(code(&out), 1);
    assert_eq!(stdout(&out), "Nat <= Pos : no\n");
    let out = sill(&[
        "subtype",
        CORPUS,
        "(Even \\/ 1) /\\ (Odd \\/ 1)",
        "(Even /\\ Odd) \\/ 1",
    ]);
    assert_eq!(code(&out), 0);
    assert_eq!(code(&sill(&["subtype", CORPUS, "Nat -o", "Nat"])), 2);
    assert_eq!(code(&sill(&["subtype", CORPUS, "Nope", "Nat"])), 2);
}

#[test]
fn run_mains() {
    let out = sill(&["run", CORPUS, "main_double3", "--seed", "7"]);
    assert_eq!(code(&out), 0);
    assert_eq!(stdout(&out), "succ×6 zero end\n");
    let out = sill(&["run", CORPUS, "main_z"]);
    assert_eq!(stdout(&out), "zero end\n");
    let out = sill(&["run", CORPUS, "main_inc7"]);
    assert_eq!(stdout(&out), "zero×3 one eps end\n");
}

#[test]
fn runs_are_byte_identical() {
    let a = sill(&["trace", CORPUS, "main_ctr2", "--seed", "3"]);
    let b = sill(&["trace", CORPUS, "main_ctr2", "--seed", "3"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let first = stdout(&a).lines().next().unwrap().to_string();
    assert_eq!(first, "defunfold root");
}

#[test]
fn trace_file() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("t.txt");
    let out = sill(&["run", CORPUS, "main_z", "--trace", p.to_str().unwrap()]);
    assert_eq!(code(&out), 0);
    let text = std::fs::read_to_string(&p).unwrap();
    assert!(text.lines().any(|l| l == "close e#1"), "{text}");
}

#[test]
fn failure_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let dl = write(
        dir.path(),
        "dl.sill",
        b"proc dl : 1\n  c <- dl = x : 1 <- (x.a; close x); wait x; close c\n",
    );
    assert_eq!(code(&sill(&["run", dl.to_str().unwrap(), "dl"])), 1);
    assert_eq!(
        code(&sill(&["run", dl.to_str().unwrap(), "dl", "--no-check"])),
        4
    );

    let spin = write(
        dir.path(),
        "spin.sill",
        b"proc spin : 1\n  c <- spin = c <- spin\n",
    );
    let out = sill(&["run", spin.to_str().unwrap(), "spin", "--fuel", "100"]);
    assert_eq!(code(&out), 5);

    let bad = write(
        dir.path(),
        "bad.sill",
        b"type Nat = +{zero: 1, succ: Nat}\nproc bad : Nat\n  c <- bad = c.eps; close c\n",
    );
    assert_eq!(
        code(&sill(&["run", bad.to_str().unwrap(), "bad", "--no-check"])),
        6
    );
}
