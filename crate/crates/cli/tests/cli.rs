use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn orbifix(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_orbifix")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn path(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

const EXAMPLE_1: &str = "p cnf 3 4\n1 2 3 0\n-1 -2 0\n-1 -3 0\n-2 -3 0\n";

fn gen_php(dir: &TempDir, m: usize, n: usize) -> PathBuf {
    let cnf = path(dir, &format!("php_{m}_{n}.cnf"));
    let o = orbifix(&["gen", "php", &m.to_string(), &n.to_string(), "--out", s(&cnf)]);
    assert!(o.status.success());
    cnf
}

#[test]
fn fix_then_check_php() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 5, 4);
    let proof = path(&dir, "p.sr");
    let out = path(&dir, "f2.cnf");
    let o = orbifix(&["fix", "--all", "--proof", s(&proof), "--out", s(&out), s(&cnf)]);
    // The units alone propagate to a conflict on PHP(5,4).
    assert_eq!(o.status.code(), Some(20));
    let fixed = fs::read_to_string(&out).unwrap();
    let units = fixed.lines().filter(|l| l.split_whitespace().count() == 2).count();
    assert!(units >= 7, "{fixed}");

    for strict in [false, true] {
        let mut args = vec!["check"];
        if strict {
            args.push("--strict");
        }
        args.extend([s(&cnf), s(&proof)]);
        let o = orbifix(&args);
        assert_eq!(o.status.code(), Some(0));
        assert!(stdout(&o).contains("s VERIFIED"));
    }
}

#[test]
fn check_against_wrong_formula_is_rejected() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 5, 4);
    let other = path(&dir, "ex1.cnf");
    fs::write(&other, EXAMPLE_1).unwrap();
    let proof = path(&dir, "e.sr");
    assert!(orbifix(&["fix", "--clausal", "--proof", s(&proof), s(&other)]).status.success());
    let o = orbifix(&["check", s(&cnf), s(&proof)]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("s REJECTED line 1"), "{}", stdout(&o));
}

#[test]
fn no_rules_is_passthrough_after_simplification() {
    let dir = TempDir::new().unwrap();
    let cnf = path(&dir, "f.cnf");
    fs::write(&cnf, "p cnf 3 3\n1 2 0\n2 1 0\n3 -3 0\n").unwrap();
    let o = orbifix(&["fix", s(&cnf)]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "p cnf 3 1\n1 2 0\n");
}

#[test]
fn invalid_generator_reports_its_index() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 3, 2);
    let sym = path(&dir, "bad.sym");
    fs::write(&sym, "(1 2)(3 4)(5 6)\n(1 3)\n").unwrap();
    let o = orbifix(&["fix", "--all", "--symmetries", s(&sym), s(&cnf)]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("generator 2"), "{err}");
}

#[test]
fn parse_errors_exit_2() {
    let dir = TempDir::new().unwrap();
    let cnf = path(&dir, "bad.cnf");
    fs::write(&cnf, "p cnf 2 1\n1 x 0\n").unwrap();
    assert_eq!(orbifix(&["fix", "--all", s(&cnf)]).status.code(), Some(2));

    let good = path(&dir, "ex1.cnf");
    fs::write(&good, EXAMPLE_1).unwrap();
    let proof = path(&dir, "bad.sr");
    fs::write(&proof, "1 0 t 0 m 1\n").unwrap();
    assert_eq!(orbifix(&["check", s(&good), s(&proof)]).status.code(), Some(2));

    let big = path(&dir, "big.cnf");
    fs::write(&big, EXAMPLE_1).unwrap();
    assert_eq!(orbifix(&["fix", "--max-input-bytes", "10", s(&big)]).status.code(), Some(2));
}

#[test]
fn stats_lines() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 4, 3);
    let o = orbifix(&["fix", "--orbitopal", "--stats", s(&cnf)]);
    let text = stdout(&o);
    assert!(text.contains("c units_orbitopal 4\n"), "{text}");
    assert!(text.contains("c group_order 144\n"), "{text}");
    assert!(text.contains("c ulcs 4\n"), "{text}");
    let header = text.lines().position(|l| l.starts_with("p cnf")).unwrap();
    assert!(text.lines().take(header).all(|l| l.starts_with("c ")));
}

#[test]
fn output_is_deterministic() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 4, 4);
    let run = |tag: &str| {
        let proof = path(&dir, &format!("{tag}.sr"));
        let o = orbifix(&["fix", "--all", "--proof", s(&proof), s(&cnf)]);
        (o.stdout, fs::read(&proof).unwrap())
    };
    assert_eq!(run("a"), run("b"));
}

#[test]
fn filter_stabilizers_on_parity() {
    let dir = TempDir::new().unwrap();
    let cnf = path(&dir, "par.cnf");
    let sym = path(&dir, "par.sym");
    let o = orbifix(&["gen", "parity", "5", "1", "--out", s(&cnf), "--symmetries", s(&sym)]);
    assert!(o.status.success());
    let proof = path(&dir, "par.sr");
    let o = orbifix(&[
        "fix",
        "--negation",
        "--ss-limit",
        "0",
        "--stats",
        "--symmetries",
        s(&sym),
        "--proof",
        s(&proof),
        s(&cnf),
    ]);
    assert!(stdout(&o).contains("c units_negation 1\n"), "{}", stdout(&o));
    assert_eq!(orbifix(&["check", s(&cnf), s(&proof)]).status.code(), Some(0));
}

#[test]
fn composition_with_external_refutation() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 3, 2);
    let proof = path(&dir, "p.sr");
    assert_eq!(orbifix(&["fix", "--orbitopal", "--proof", s(&proof), s(&cnf)]).status.code(), Some(20));
    // Drop the final empty clause and let the external proof supply it.
    let text = fs::read_to_string(&proof).unwrap();
    let prefix: String = text.lines().filter(|l| *l != "0").map(|l| format!("{l}\n")).collect();
    fs::write(&proof, prefix).unwrap();
    let refutation = path(&dir, "ref.drat");
    fs::write(&refutation, "0\n").unwrap();
    let o = orbifix(&["check", "--compose", s(&refutation), s(&cnf), s(&proof)]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("c refutation"));

    // Witnesses are not allowed in the appended part.
    fs::write(&refutation, "-1 0 t -1 2 0 m 0\n0\n").unwrap();
    assert_eq!(orbifix(&["check", "--compose", s(&refutation), s(&cnf), s(&proof)]).status.code(), Some(2));
}

#[test]
fn orbitope_hints_file() {
    let dir = TempDir::new().unwrap();
    let cnf = gen_php(&dir, 3, 2);
    let hints = path(&dir, "h.txt");
    fs::write(&hints, "1 3 5\n2 4 6\n").unwrap();
    let o = orbifix(&["fix", "--orbitopal", "--orbitopes", s(&hints), "--stats", s(&cnf)]);
    assert!(stdout(&o).contains("c orbitope 1 2x3\n"), "{}", stdout(&o));
    fs::write(&hints, "1 3\n2 5\n").unwrap();
    assert_eq!(orbifix(&["fix", "--orbitopal", "--orbitopes", s(&hints), s(&cnf)]).status.code(), Some(2));
}
