use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

const HOP2: &str = r#"{"modes":2,"statistics":"boson",
 "T":[[{"re":0,"im":0},{"re":-1,"im":0}],[{"re":-1,"im":0},{"re":0,"im":0}]],
 "V":[]}"#;

struct Dir(TempDir);

impl Dir {
    fn new() -> Self {
        Dir(TempDir::new().unwrap())
    }

    fn file(&self, name: &str, body: &str) -> PathBuf {
        let p = self.0.path().join(name);
        fs::write(&p, body).unwrap();
        p
    }
}

fn qspace(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_qspace"))
        .args(args)
        .env_remove("QSPACE_TOL")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

#[test]
fn fermion_ccr_check_is_exact() {
    let o = qspace(&["ccr-check", "--stats", "fermion", "--modes", "3"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "max residual 0.0e0\n");
}

#[test]
fn boson_ccr_check_needs_a_cap() {
    let o = qspace(&["ccr-check", "--stats", "boson", "--modes", "2"]);
    assert_eq!(o.status.code(), Some(2));
    let o = qspace(&[
        "ccr-check",
        "--stats",
        "boson",
        "--modes",
        "2",
        "--nmax",
        "3",
    ]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "max residual 0.0e0\n");
}

#[test]
fn antisymmetric_product_of_swapped_pair() {
    let d = Dir::new();
    let f12 = d.file(
        "f12.json",
        r#"{"statistics":"fermion","modes":3,"terms":[{"seq":[1,2],"re":1}]}"#,
    );
    let f21 = d.file(
        "f21.json",
        r#"{"statistics":"fermion","modes":3,"terms":[{"seq":[2,1],"re":1}]}"#,
    );
    let o = qspace(&[
        "product",
        "--kind",
        "asym",
        "--left",
        p(&f12),
        "--right",
        p(&f21),
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "-1 0\n");

    let o = qspace(&[
        "product",
        "--kind",
        "sym",
        "--left",
        p(&f12),
        "--right",
        p(&f21),
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn two_site_spectrum() {
    let d = Dir::new();
    let h = d.file("hop2.json", HOP2);
    let o = qspace(&["spectrum", "--hamiltonian", p(&h), "--sector", "1"]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(stdout(&o), "-1\n1\n");

    let o = qspace(&["spectrum", "--hamiltonian", p(&h), "--sector", "2"]);
    assert_eq!(stdout(&o), "-2\n0\n2\n");

    let o = qspace(&["spectrum", "--hamiltonian", p(&h)]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn apply_creation_operator() {
    let d = Dir::new();
    let op = d.file(
        "op.json",
        r#"{"statistics":"boson","terms":[{"re":1,"im":0,"ops":[{"act":"create","mode":0}]}]}"#,
    );
    let s = d.file(
        "s.json",
        r#"{"statistics":"boson","modes":2,"terms":[{"occ":[1,0],"re":1}]}"#,
    );
    let o = qspace(&["apply", "--op", p(&op), "--state", p(&s)]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "{\"statistics\":\"boson\",\"modes\":2,\"terms\":[{\"occ\":[2,0],\"re\":1.0,\"im\":0.0}]}\n"
    );
}

#[test]
fn rabi_oscillation_csv() {
    let d = Dir::new();
    let h = d.file("hop2.json", HOP2);
    let s = d.file(
        "s.json",
        r#"{"statistics":"boson","modes":2,"terms":[{"occ":[1,0],"re":1}]}"#,
    );
    let o = qspace(&[
        "evolve",
        "--hamiltonian",
        p(&h),
        "--state",
        p(&s),
        "--t",
        "1.5707963267948966",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
    assert_eq!(
        stdout(&o),
        "step,t,norm,N,n_0,n_1\n0,0,1,1,1,0\n1,0.785398163397,1,1,0.5,0.5\n2,1.57079632679,1,1,0,1\n"
    );
}

#[test]
fn unnormalized_initial_state_is_rejected() {
    let d = Dir::new();
    let h = d.file("hop2.json", HOP2);
    let s = d.file(
        "s.json",
        r#"{"statistics":"boson","modes":2,"terms":[{"occ":[1,0],"re":2}]}"#,
    );
    let o = qspace(&[
        "evolve",
        "--hamiltonian",
        p(&h),
        "--state",
        p(&s),
        "--t",
        "1",
        "--steps",
        "2",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn oracle_compare_agrees() {
    for stats in ["boson", "fermion"] {
        let o = qspace(&[
            "oracle-compare",
            "--modes",
            "3",
            "--particles",
            "2",
            "--stats",
            stats,
        ]);
        assert_eq!(o.status.code(), Some(0), "{}", stderr(&o));
        let out = stdout(&o);
        assert!(out.starts_with("max inner-product discrepancy "), "{out}");
        assert!(out.contains("\nmax eigenvalue discrepancy "), "{out}");
    }
    let o = qspace(&[
        "oracle-compare",
        "--modes",
        "5",
        "--particles",
        "2",
        "--stats",
        "boson",
    ]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn malformed_json_reports_path_and_byte() {
    let d = Dir::new();
    let h = d.file("bad.json", "{\"modes\":2,\n \"statistics\": }");
    let o = qspace(&["spectrum", "--hamiltonian", p(&h), "--sector", "1"]);
    assert_eq!(o.status.code(), Some(2));
    let err = stderr(&o);
    assert_eq!(err.lines().count(), 1, "{err}");
    assert!(err.contains("bad.json"), "{err}");
    assert!(err.contains("at byte 27"), "{err}");
}

#[test]
fn selfcheck_only_ccr() {
    let o = qspace(&["selfcheck", "--only", "ccr"]);
    assert_eq!(o.status.code(), Some(0));
    let out = stdout(&o);
    let reports: Vec<&str> = out.lines().filter(|l| l.starts_with('[')).collect();
    assert_eq!(reports.len(), 2, "{out}");
    assert!(reports.iter().all(|l| l.starts_with("[PASS]")));

    let o = qspace(&["selfcheck", "--only", "bogus"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn selfcheck_forced_failure() {
    let o = qspace(&["selfcheck", "--tol", "1e-300", "--only", "oracle,golden"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stdout(&o).contains("[FAIL]"));
}

#[test]
fn tolerance_from_environment() {
    let o = Command::new(env!("CARGO_BIN_EXE_qspace"))
        .args(["ccr-check", "--stats", "fermion", "--modes", "2"])
        .env("QSPACE_TOL", "1e-20")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(2));
    let o = Command::new(env!("CARGO_BIN_EXE_qspace"))
        .args([
            "ccr-check",
            "--stats",
            "fermion",
            "--modes",
            "2",
            "--tol",
            "1e-12",
        ])
        .env("QSPACE_TOL", "1e-20")
        .output()
        .unwrap();
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn output_does_not_depend_on_threads() {
    let d = Dir::new();
    let h = d.file(
        "h.json",
        r#"{"modes":3,"statistics":"fermion",
 "T":[[{"re":0.5},{"re":-1,"im":0.25},{"re":0}],
      [{"re":-1,"im":-0.25},{"re":0},{"re":-1}],
      [{"re":0},{"re":-1},{"re":-0.5}]],
 "V":[{"k":0,"l":1,"p":1,"q":0,"re":2.0},{"k":1,"l":0,"p":0,"q":1,"re":2.0}]}"#,
    );
    let one = qspace(&[
        "--threads",
        "1",
        "spectrum",
        "--hamiltonian",
        p(&h),
        "--nmax",
        "3",
    ]);
    let four = qspace(&[
        "--threads",
        "4",
        "spectrum",
        "--hamiltonian",
        p(&h),
        "--nmax",
        "3",
    ]);
    assert_eq!(one.status.code(), Some(0), "{}", stderr(&one));
    assert_eq!(stdout(&one), stdout(&four));
    assert_eq!(stdout(&one).lines().count(), 8);
}
