//! End-to-end tests against the compiled binary: exit codes, JSON document
//! shape, file round trips, sampling determinism.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use symplectica::clifford::EMForm;
use symplectica::matrix::PhaseMatrix;
use symplectica::symplectic::{generator_exp, GeneratorId, SymplecticTransform};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_symplectica"))
}

fn run(args: &[&str]) -> (Output, Value) {
    let out = bin().args(args).output().expect("binary runs");
    let doc: Value = serde_json::from_slice(&out.stdout)
        .unwrap_or_else(|e| panic!("stdout is not JSON ({e}): {:?}", out));
    (out, doc)
}

fn write_matrix(dir: &Path, name: &str, m: &PhaseMatrix) -> PathBuf {
    let mut text = String::new();
    for i in 0..m.dim() {
        for j in 0..m.dim() {
            if j > 0 {
                text.push(' ');
            }
            let _ = write!(text, "{:.16e}", m.get(i, j));
        }
        text.push('\n');
    }
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

fn gamma0_4x4() -> PhaseMatrix {
    PhaseMatrix::symplectic_unit(4)
}

fn exp_gamma0(w: f64) -> PhaseMatrix {
    PhaseMatrix::identity(4).scale(w.cos()).add(&gamma0_4x4().scale(w.sin()))
}

#[test]
fn check_gamma0_is_hamiltonian_and_symplectic() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "g0.txt", &gamma0_4x4());
    let (out, doc) = run(&["check", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(doc["hamiltonian"], Value::Bool(true));
    assert_eq!(doc["symplectic"], Value::Bool(true));
    assert_eq!(doc["skew_hamiltonian"], Value::Bool(false));
    assert_eq!(doc["dirac_coefficients"][0], 1.0);
    assert_eq!(doc["input"]["dim"], 4);
    assert!(doc["input"]["sha256"].as_str().unwrap().len() == 64);
}

#[test]
fn check_identity_is_skew_hamiltonian() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "id.txt", &PhaseMatrix::identity(4));
    let (out, doc) = run(&["check", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(doc["skew_hamiltonian"], Value::Bool(true));
    assert_eq!(doc["hamiltonian"], Value::Bool(false));
}

#[test]
fn parse_errors_carry_line_numbers_and_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let p = dir.path().join("bad.txt");
    std::fs::write(&p, "0 1\n-1 0 99\n").unwrap();
    let (out, doc) = run(&["check", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(doc["status"], "error");
    assert_eq!(doc["error"]["code"], "ParseError");
    assert!(doc["error"]["message"].as_str().unwrap().contains("line 2"));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("line 2"));
}

#[test]
fn missing_file_exits_1() {
    let (out, doc) = run(&["eig", "/nonexistent/matrix.txt"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(doc["status"], "error");
}

fn coupled_fixture() -> PhaseMatrix {
    // forward-constructed: distinct elliptic blocks conjugated by a word
    let d = symplectica::clifford::dirac_basis();
    let diag = d.gamma(0).scale(1.5).add(&d.gamma(8).scale(0.5)); // blocks 2.0, 1.0
    let mut word = SymplecticTransform::identity(4);
    for (k, tau) in [(5usize, 0.4), (9, 0.7), (1, -0.3), (7, 1.1)] {
        word = word.then(&generator_exp(GeneratorId::new(k).unwrap(), tau).unwrap());
    }
    word.apply(&diag)
}

#[test]
fn decouple_fixture_reaches_tolerance_and_emits_files() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "h.txt", &coupled_fixture());
    let outp = dir.path().join("d.txt");
    let prefix = dir.path().join("t");
    let (out, doc) = run(&[
        "decouple",
        p.to_str().unwrap(),
        "--out",
        outp.to_str().unwrap(),
        "--emit-transform",
        prefix.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
    // emitted files parse back and agree with the document
    let text = std::fs::read_to_string(&outp).unwrap();
    assert_eq!(text.lines().count(), 4);
    assert!(dir.path().join("t.transform").exists());
    assert!(dir.path().join("t.inverse").exists());
    // block-diagonal: off-blocks of the result vanish
    let r = &doc["result"];
    for i in 0..2 {
        for j in 2..4 {
            assert!(r[i][j].as_f64().unwrap().abs() < 1e-12);
            assert!(r[j][i].as_f64().unwrap().abs() < 1e-12);
        }
    }
}

#[test]
fn decouple_complex_case_exits_2() {
    // pure bi-vector with E⃗·B⃗ ≠ 0 has K₂ < 0
    let dir = tempfile::tempdir().unwrap();
    let em = EMForm::new(0.0, [0.0; 3], [1.0, 0.0, 0.0], [0.7, 0.2, 0.0]);
    let p = write_matrix(dir.path(), "cx.txt", &em.assemble());
    let (out, doc) = run(&["decouple", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert_eq!(doc["error"]["code"], "ComplexEigenvalues");
    // eig rejects it the same way
    let (out, _) = run(&["eig", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn decouple_2x2_returns_input_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let m = PhaseMatrix::from_rows(&[vec![0.3, 1.2], vec![-0.9, -0.3]]).unwrap();
    let p = write_matrix(dir.path(), "h2.txt", &m);
    let (out, doc) = run(&["decouple", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert_eq!(doc["steps"], 0);
    for i in 0..2 {
        for j in 0..2 {
            assert_eq!(doc["result"][i][j].as_f64().unwrap(), m.get(i, j));
        }
    }
}

#[test]
fn decouple_accepts_skew_hamiltonian_input() {
    // the square of a Hamiltonian matrix is skew-Hamiltonian
    let dir = tempfile::tempdir().unwrap();
    let h = coupled_fixture();
    let c = h.mul(&h);
    let p = write_matrix(dir.path(), "c.txt", &c);
    let (out, doc) = run(&["decouple", p.to_str().unwrap()]);
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn normalform_flags_hyperbolic_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let m = PhaseMatrix::from_rows(&[vec![0.0, 1.5], vec![1.5, 0.0]]).unwrap();
    let p = write_matrix(dir.path(), "hyp.txt", &m);
    let (out, doc) = run(&["normalform", p.to_str().unwrap()]);
    assert!(out.status.success());
    let b = &doc["blocks"][0];
    assert_eq!(b["class"], "hyperbolic");
    assert_eq!(b["oscillator_form"], Value::Bool(false));
    assert!((b["omega"].as_f64().unwrap() - 1.5).abs() < 1e-14);
}

#[test]
fn eig_2x2_pure_rotation() {
    let dir = tempfile::tempdir().unwrap();
    let m = PhaseMatrix::from_rows(&[vec![0.0, 3.0], vec![-3.0, 0.0]]).unwrap();
    let p = write_matrix(dir.path(), "r.txt", &m);
    let (out, doc) = run(&["eig", p.to_str().unwrap()]);
    assert!(out.status.success());
    let pair = &doc["eigenvalues"][0];
    assert_eq!(pair["re"].as_f64().unwrap(), 0.0);
    assert!((pair["im"].as_f64().unwrap() - 3.0).abs() < 1e-14);
    assert_eq!(pair["class"], "elliptic");
}

#[test]
fn eig_pure_vector_4x4() {
    // 𝓔 = 1, P⃗ = (0.3, 0, 0): both pairs ±i√0.91
    let dir = tempfile::tempdir().unwrap();
    let em = EMForm::new(1.0, [0.3, 0.0, 0.0], [0.0; 3], [0.0; 3]);
    let p = write_matrix(dir.path(), "v.txt", &em.assemble());
    let (out, doc) = run(&["eig", p.to_str().unwrap()]);
    assert!(out.status.success());
    let want = 0.91f64.sqrt();
    for k in 0..2 {
        let pair = &doc["eigenvalues"][k];
        assert_eq!(pair["class"], "elliptic");
        assert!((pair["im"].as_f64().unwrap() - want).abs() < 1e-12);
    }
}

#[test]
fn normalform_reports_oscillator_blocks() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "h.txt", &coupled_fixture());
    let (out, doc) = run(&["normalform", p.to_str().unwrap()]);
    assert!(out.status.success());
    let blocks = doc["blocks"].as_array().unwrap();
    assert_eq!(blocks.len(), 2);
    let mut omegas: Vec<f64> =
        blocks.iter().map(|b| b["omega"].as_f64().unwrap()).collect();
    omegas.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!((omegas[0] - 1.0).abs() < 1e-9);
    assert!((omegas[1] - 2.0).abs() < 1e-9);
    for b in blocks {
        assert_eq!(b["class"], "elliptic");
        assert_eq!(b["oscillator_form"], Value::Bool(true));
    }
}

#[test]
fn exp_log_round_trip_through_files() {
    let dir = tempfile::tempdir().unwrap();
    let h = coupled_fixture();
    let hp = write_matrix(dir.path(), "h.txt", &h);
    let mp = dir.path().join("m.txt");
    let (out, doc) = run(&["exp", hp.to_str().unwrap(), "--out", mp.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(doc["symplectic_defect"].as_f64().unwrap() < 1e-10);
    let lp = dir.path().join("l.txt");
    let (out, doc) = run(&["log", mp.to_str().unwrap(), "--out", lp.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(doc["hamiltonian_defect"].as_f64().unwrap() < 1e-10);
    let ltext = std::fs::read_to_string(&lp).unwrap();
    let l = ltext
        .lines()
        .map(|row| row.split_whitespace().map(|t| t.parse::<f64>().unwrap()).collect::<Vec<_>>())
        .collect::<Vec<_>>();
    let lm = PhaseMatrix::from_rows(&l).unwrap();
    assert!(lm.max_abs_diff(&h) < 1e-8);
}

#[test]
fn log_of_non_symplectic_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "x.txt", &PhaseMatrix::identity(4).scale(2.0));
    let (out, doc) = run(&["log", p.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(doc["error"]["code"], "NotSymplectic");
}

#[test]
fn matched_samples_match_sigma() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "m.txt", &exp_gamma0(1.0));
    let sp = dir.path().join("samples.txt");
    let (out, doc) = run(&[
        "matched",
        p.to_str().unwrap(),
        "--emittances",
        "1,1",
        "--samples",
        "100000",
        "--seed",
        "42",
        "--samples-out",
        sp.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    // Σ = 1₄ for this fixture
    for i in 0..4 {
        for j in 0..4 {
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((doc["sigma"][i][j].as_f64().unwrap() - want).abs() < 1e-10);
        }
    }
    assert!(doc["fixed_point_error"].as_f64().unwrap() < 1e-10);
    // sample covariance within 3% of the identity entry-wise
    let text = std::fs::read_to_string(&sp).unwrap();
    let pts: Vec<Vec<f64>> = text
        .lines()
        .map(|l| l.split_whitespace().map(|t| t.parse().unwrap()).collect())
        .collect();
    assert_eq!(pts.len(), 100_000);
    let n = pts.len() as f64;
    for i in 0..4 {
        for j in 0..4 {
            let cov: f64 = pts.iter().map(|p| p[i] * p[j]).sum::<f64>() / n;
            let want = if i == j { 1.0 } else { 0.0 };
            assert!((cov - want).abs() < 0.03, "cov({i},{j}) = {cov}");
        }
    }
}

#[test]
fn matched_requires_samples_out_and_positive_emittances() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "m.txt", &exp_gamma0(1.0));
    let (out, doc) =
        run(&["matched", p.to_str().unwrap(), "--emittances", "1,1", "--samples", "10"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(doc["error"]["code"], "Usage");

    let (out, doc) = run(&["matched", p.to_str().unwrap(), "--emittances", "1,-1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(doc["error"]["code"], "NonPositiveEmittance");
}

#[test]
fn matched_unstable_lattice_exits_4() {
    let dir = tempfile::tempdir().unwrap();
    let boost = generator_exp(GeneratorId::new(1).unwrap(), 0.8).unwrap();
    let p = write_matrix(dir.path(), "u.txt", boost.matrix());
    let (out, doc) = run(&["matched", p.to_str().unwrap(), "--emittances", "1,1"]);
    assert_eq!(out.status.code(), Some(4));
    assert_eq!(doc["error"]["code"], "UnstableLattice");
}

#[test]
fn sampling_is_deterministic_and_env_seed_takes_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "m.txt", &exp_gamma0(0.6));
    let mut texts = Vec::new();
    for (name, seed_args, env) in [
        ("a.txt", vec!["--seed", "42"], None),
        ("b.txt", vec!["--seed", "42"], None),
        ("c.txt", vec!["--seed", "7"], None),
        ("d.txt", vec!["--seed", "42"], Some("7")),
    ] {
        let sp = dir.path().join(name);
        let mut cmd = bin();
        cmd.args(["matched", p.to_str().unwrap(), "--emittances", "2,0.5", "--samples", "64"])
            .args(&seed_args)
            .args(["--samples-out", sp.to_str().unwrap()]);
        match env {
            Some(v) => cmd.env("SYMPLECTICA_SEED", v),
            None => cmd.env_remove("SYMPLECTICA_SEED"),
        };
        let out = cmd.output().unwrap();
        assert!(out.status.success());
        texts.push(std::fs::read_to_string(&sp).unwrap());
    }
    assert_eq!(texts[0], texts[1], "same seed must reproduce samples");
    assert_ne!(texts[0], texts[2], "different seed must change samples");
    assert_eq!(texts[2], texts[3], "environment seed overrides the flag");
}

#[test]
fn exhausted_step_budget_exits_3() {
    // a coupled 8×8 cannot finish within a single block-step
    let dir = tempfile::tempdir().unwrap();
    let mut word = SymplecticTransform::identity(8);
    for (k, tau, lo, hi) in
        [(5usize, 0.5, 0, 1), (9, 0.7, 1, 2), (1, -0.4, 2, 3), (7, 0.9, 0, 2), (4, 0.3, 1, 3)]
    {
        let t = generator_exp(GeneratorId::new(k).unwrap(), tau)
            .unwrap()
            .embed_pairs(lo, hi, 8)
            .unwrap();
        word = word.then(&t);
    }
    let mut diag = PhaseMatrix::zeros(8);
    for (k, w) in [0.5, 1.1, 1.9, 2.6].iter().enumerate() {
        diag.set(2 * k, 2 * k + 1, *w);
        diag.set(2 * k + 1, 2 * k, -w);
    }
    let h = word.apply(&diag);
    let p = write_matrix(dir.path(), "big.txt", &h);
    let (out, doc) = run(&["decouple", p.to_str().unwrap(), "--max-sweeps", "1"]);
    assert_eq!(out.status.code(), Some(3));
    assert_eq!(doc["error"]["code"], "NoConvergence");
    // with the default budget the same matrix decouples
    let (out, doc) = run(&["decouple", p.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(doc["residual"].as_f64().unwrap() < 1e-12);
}

#[test]
fn selftest_passes_with_expected_counts() {
    let (out, doc) = run(&["selftest"]);
    assert!(out.status.success());
    assert_eq!(doc["all_pass"], Value::Bool(true));
    assert_eq!(doc["counts"]["classification_rows"], 16);
    assert_eq!(doc["counts"]["transform_cells"], 100);
    assert_eq!(doc["counts"]["scalar_product_cells"], 21);
    assert_eq!(doc["cells"].as_array().unwrap().len(), 137);
    // per-cell lines are diagnostics on stderr
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.lines().filter(|l| l.starts_with("selftest pass")).count() == 137);
}

#[test]
fn documents_record_options_for_reproducibility() {
    let dir = tempfile::tempdir().unwrap();
    let p = write_matrix(dir.path(), "h.txt", &coupled_fixture());
    let (_, doc) = run(&["decouple", p.to_str().unwrap(), "--tol", "1e-10", "--strategy", "2"]);
    assert_eq!(doc["options"]["tol"].as_f64().unwrap(), 1e-10);
    assert_eq!(doc["options"]["strategy"], 2);
    assert_eq!(doc["options"]["max_sweeps"], 64 * 2 * 2);
    assert_eq!(doc["schema"], "symplectica.result/1");
}
