//! End-to-end runs of the `mana` binary.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use mana::fit::chord_x;
use mana::qsv::{StateFile, HEADER_LEN};
use mana_core::{PrimeDim, StateVector};
use tempfile::TempDir;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mana"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = run(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn code(args: &[&str]) -> i32 {
    run(args).status.code().unwrap()
}

fn p(dir: &TempDir, name: &str) -> PathBuf {
    dir.path().join(name)
}

fn s(path: &Path) -> &str {
    path.to_str().unwrap()
}

/// Rows of a CSV as string fields, header first.
fn rows(text: &str) -> Vec<Vec<String>> {
    text.lines()
        .map(|l| l.split(',').map(str::to_string).collect())
        .collect()
}

fn save(dir: &TempDir, name: &str, psi: StateVector) -> PathBuf {
    let path = p(dir, name);
    StateFile {
        energy: 0.0,
        j: 1.0,
        h: 1.0,
        p: f64::NAN,
        psi,
    }
    .save(&path)
    .unwrap();
    path
}

#[test]
fn solve_writes_reproducible_state_files() {
    let dir = TempDir::new().unwrap();
    let (a, b) = (p(&dir, "a.qsv"), p(&dir, "b.qsv"));
    let stdout = ok(&["solve", "--L", "6", "--h", "1.0", "--J", "1", "--out", s(&a)]);
    assert!(stdout.contains("energy = -") && stdout.contains("negation = "));
    ok(&["solve", "--L", "6", "--h", "1.0", "--J", "1", "--out", s(&b)]);
    let (x, y) = (std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(x.len(), HEADER_LEN + 16 * 729);
    assert_eq!(x, y);
    let state = StateFile::load(&a).unwrap();
    assert_eq!((state.j, state.h), (1.0, 1.0));
    assert!(state.p.is_nan());
    assert!((state.psi.norm() - 1.0).abs() < 1e-12);

    // the extended model
    let e = p(&dir, "e.qsv");
    ok(&["solve", "--L", "6", "--p", "0.1", "--out", s(&e)]);
    let ext = StateFile::load(&e).unwrap();
    assert_eq!(ext.p, 0.1);
    assert_ne!(ext.energy, state.energy);
}

#[test]
fn metadata_reproduces_runs() {
    let dir = TempDir::new().unwrap();
    let state = p(&dir, "gs.qsv");
    ok(&["solve", "--L", "4", "--h", "0.7", "--out", s(&state)]);
    let first = p(&dir, "first.csv");
    ok(&["mana", "--state", s(&state), "--method", "mc", "--samples", "2000", "--out", s(&first)]);
    let meta = std::fs::read_to_string(format!("{}.meta", first.display())).unwrap();
    assert!(meta.contains("# command = mana") && meta.contains("seed = "));

    // replay through the metadata, redirecting the output
    let second = p(&dir, "second.csv");
    ok(&["mana", "--config", &format!("{}.meta", first.display()), "--out", s(&second)]);
    let strip = |path: &Path| -> Vec<Vec<String>> {
        rows(&std::fs::read_to_string(path).unwrap())
            .into_iter()
            .map(|mut r| {
                r.pop(); // seconds
                r
            })
            .collect()
    };
    assert_eq!(strip(&first), strip(&second));
}

#[test]
fn config_files_sit_below_flags() {
    let dir = TempDir::new().unwrap();
    let cfg = p(&dir, "run.cfg");
    std::fs::write(&cfg, "# model\nL = 4\nh = 5\n").unwrap();
    let (a, b) = (p(&dir, "a.qsv"), p(&dir, "b.qsv"));
    ok(&["solve", "--config", s(&cfg), "--h", "0.5", "--out", s(&a)]);
    ok(&["solve", "--L", "4", "--h", "0.5", "--out", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    assert_eq!(code(&["solve", "--config", s(&p(&dir, "missing.cfg")), "--out", s(&a)]), 4);
}

#[test]
fn mana_exact_and_mc_agree() {
    let dir = TempDir::new().unwrap();
    let state = p(&dir, "gs.qsv");
    ok(&["solve", "--L", "6", "--h", "1", "--out", s(&state)]);
    let exact = rows(&ok(&["mana", "--state", s(&state)]));
    assert_eq!(exact[0].join(","), "L,d,h,J,p,method,mana,stderr,seconds");
    assert_eq!(exact[1][..6].join(","), "6,3,1,1,NaN,exact");
    let integrand = p(&dir, "integrand.csv");
    let mc = rows(&ok(&[
        "mana",
        "--state",
        s(&state),
        "--method",
        "mc",
        "--integrand-out",
        s(&integrand),
    ]));
    let (e, m, err): (f64, f64, f64) = (exact[1][6].parse().unwrap(), mc[1][6].parse().unwrap(), mc[1][7].parse().unwrap());
    assert!(err > 0.0 && (e - m).abs() < 3.0 * err, "{e} vs {m} +- {err}");
    let grid = rows(&std::fs::read_to_string(&integrand).unwrap());
    assert_eq!(grid[0].join(","), "beta,integrand,stderr");
    assert_eq!(grid[1][0], "1");
    assert_eq!(grid.last().unwrap()[0], "2");
}

#[test]
fn stabilizer_states_have_no_mana() {
    let dir = TempDir::new().unwrap();
    let zero = save(&dir, "zero.qsv", StateVector::basis(PrimeDim::qutrit(), 4, 0).unwrap());
    for method in ["exact", "mc"] {
        let out = rows(&ok(&["mana", "--state", s(&zero), "--method", method, "--samples", "500"]));
        assert_eq!(out[1][6..8].join(","), "0,0", "{method}");
    }
    // the diagonal rotation fixes |0...0>
    let rotated = p(&dir, "rot.qsv");
    ok(&["rotate", "--state", s(&zero), "--theta", "tgate", "--out", s(&rotated)]);
    let out = rows(&ok(&["mana", "--state", s(&rotated)]));
    assert_eq!(out[1][6], "0");
}

#[test]
fn rotation_by_zero_keeps_the_payload() {
    let dir = TempDir::new().unwrap();
    let state = p(&dir, "gs.qsv");
    ok(&["solve", "--L", "4", "--out", s(&state)]);
    let same = p(&dir, "same.qsv");
    ok(&["rotate", "--state", s(&state), "--theta", "0", "--out", s(&same)]);
    assert_eq!(std::fs::read(&state).unwrap(), std::fs::read(&same).unwrap());
    let turned = p(&dir, "turned.qsv");
    ok(&["rotate", "--state", s(&state), "--theta", "tgate", "--out", s(&turned)]);
    let before: f64 = rows(&ok(&["mana", "--state", s(&state)]))[1][6].parse().unwrap();
    let after: f64 = rows(&ok(&["mana", "--state", s(&turned)]))[1][6].parse().unwrap();
    assert!(after > before);

    let five = save(&dir, "five.qsv", StateVector::basis(PrimeDim::new(5).unwrap(), 2, 0).unwrap());
    assert_eq!(code(&["rotate", "--state", s(&five), "--theta", "1", "--out", s(&same)]), 2);
}

#[test]
fn sweep_emits_one_row_per_field() {
    let out = rows(&ok(&["sweep", "--L", "3,4", "--h-values", "0.5,1,2"]));
    assert_eq!(out.len(), 7);
    let fields: Vec<&str> = out[1..].iter().map(|r| r[2].as_str()).collect();
    assert_eq!(fields, ["0.5", "1", "2", "0.5", "1", "2"]);
    assert!(out[1..].iter().all(|r| r[5] == "exact" && r[7] == "0"));
}

#[test]
fn mutual_rows_and_product_states() {
    let dir = TempDir::new().unwrap();
    let s2 = 0.5f64.sqrt();
    let site = vec![
        mana_core::Complex64::new(0.0, 0.0),
        mana_core::Complex64::new(s2, 0.0),
        mana_core::Complex64::new(-s2, 0.0),
    ];
    let product = save(&dir, "prod.qsv", StateVector::product(PrimeDim::qutrit(), &vec![site; 4]).unwrap());
    for method in ["exact", "mc"] {
        let out = rows(&ok(&["mutual", "--state", s(&product), "--method", method, "--samples", "2000"]));
        assert_eq!(out[0].join(","), "L,ell,chord_x,I_M,stderr");
        assert_eq!(out.len(), 4);
        for r in &out[1..] {
            let (v, e): (f64, f64) = (r[3].parse().unwrap(), r[4].parse().unwrap());
            assert!(v.abs() <= 3.0 * e + 1e-12, "{method}: {r:?}");
            let ell: usize = r[1].parse().unwrap();
            assert_eq!(r[2], chord_x(ell, 4).to_string());
        }
        assert_eq!(out[1][2], out[3][2]);
    }
}

#[test]
fn failing_rows_become_nan() {
    let dir = TempDir::new().unwrap();
    let state = p(&dir, "gs.qsv");
    ok(&["solve", "--L", "4", "--out", s(&state)]);
    let csv = p(&dir, "m.csv");
    let out = run(&[
        "mutual",
        "--state",
        s(&state),
        "--samples",
        "200",
        "--min-acceptance",
        "1.5",
        "--out",
        s(&csv),
    ]);
    assert_eq!(out.status.code(), Some(3));
    let table = rows(&std::fs::read_to_string(&csv).unwrap());
    assert_eq!(table.len(), 4);
    assert!(table[1..].iter().all(|r| r[3] == "NaN" && r[4] == "NaN"));
    assert!(String::from_utf8_lossy(&out.stderr).contains("stuck"));
}

#[test]
fn fit_recovers_synthetic_slopes() {
    let dir = TempDir::new().unwrap();
    let csv = p(&dir, "syn.csv");
    let mut text = String::from("L,ell,chord_x,I_M,stderr\n");
    for ell in 1..24 {
        let x = chord_x(ell, 24);
        let noise = if ell % 3 == 0 { 1e-3 } else { -5e-4 };
        text.push_str(&format!("24,{ell},{x},{},0.001\n", 0.25 * x + 0.1 + noise));
    }
    std::fs::write(&csv, &text).unwrap();
    let fit_csv = p(&dir, "fit.csv");
    let out = ok(&["fit", "--input", s(&csv), "--out", s(&fit_csv)]);
    let line = out.lines().next().unwrap();
    let parts: Vec<f64> = line
        .trim_start_matches("slope = ")
        .split(" +- ")
        .map(|x| x.parse().unwrap())
        .collect();
    assert!((parts[0] - 0.25).abs() < 0.01 && parts[1] < 0.01, "{line}");
    let fitted = rows(&std::fs::read_to_string(&fit_csv).unwrap());
    assert_eq!(fitted[0].join(","), "x,n_points,slope,slope_err,gamma,gamma_err,r_squared");
    // window 2..=22
    assert_eq!(fitted[1][1], "21");
    // even-only keeps 2, 4, ..., 22
    let even = ok(&["fit", "--input", s(&csv), "--J", "-1"]);
    assert!(even.contains("points = 11"), "{even}");
    let forced = ok(&["fit", "--input", s(&csv), "--J", "-1", "--even-only", "false"]);
    assert!(forced.contains("points = 21"));
}

#[test]
fn fit_rejects_bad_input() {
    let dir = TempDir::new().unwrap();
    let short = p(&dir, "short.csv");
    std::fs::write(&short, "L,ell,chord_x,I_M,stderr\n6,2,0.5,0.1,0.01\n6,3,0.6,0.2,0.01\n").unwrap();
    assert_eq!(code(&["fit", "--input", s(&short)]), 2);
    let missing = p(&dir, "missing.csv");
    std::fs::write(&missing, "L,ell,chord_x,stderr\n6,2,0.5,0.01\n").unwrap();
    let out = run(&["fit", "--input", s(&missing)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("\"I_M\""));
    assert_eq!(code(&["fit", "--input", s(&p(&dir, "nowhere.csv"))]), 4);
}

#[test]
fn guards_and_io_errors() {
    let dir = TempDir::new().unwrap();
    let big = save(&dir, "big.qsv", StateVector::basis(PrimeDim::qutrit(), 8, 0).unwrap());
    let out = run(&["mana", "--state", s(&big)]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("limit 7"));
    assert_eq!(code(&["mutual", "--state", s(&big), "--ell-min", "8"]), 2);
    assert_eq!(code(&["mana", "--state", s(&p(&dir, "none.qsv"))]), 4);
    std::fs::write(p(&dir, "junk.qsv"), b"not a state").unwrap();
    assert_eq!(code(&["mana", "--state", s(&p(&dir, "junk.qsv"))]), 4);
    assert_eq!(code(&["solve", "--L", "16", "--out", s(&p(&dir, "x.qsv"))]), 2);
}
