//! `symplectica` — structure-preserving analysis of Hamiltonian,
//! skew-Hamiltonian and symplectic matrices from plain-text matrix files.
//!
//! Every command prints a single JSON result document on stdout; human
//! diagnostics go to stderr. Exit codes: 0 success, 1 usage/IO/parse
//! errors, 2 complex off-axis eigenvalues, 3 no convergence, 4 structural
//! domain errors (wrong matrix class, unstable lattice, branch points),
//! 5 selftest failures.

mod io;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use symplectica::beams::{matched_frame, matched_sigma_with, sample_matched, Emittances};
use symplectica::clifford::decompose4;
use symplectica::decouple4::Strategy;
use symplectica::jacobi::{jacobi_decouple, JacobiConfig};
use symplectica::matrix::PhaseMatrix;
use symplectica::spectrum::{
    block_normal_forms, spectrum_of, sympl_exp_with, sympl_log_with,
    EigenClass, Spectrum,
};
use symplectica::symplectic::{
    hamiltonian_defect, is_hamiltonian, is_skew_hamiltonian, is_symplectic,
    skew_hamiltonian_defect, symplectic_defect,
};
use symplectica::Error;

const SCHEMA: &str = "symplectica.result/1";

#[derive(Parser)]
#[command(
    name = "symplectica",
    about = "Block-diagonalize and analyze Hamiltonian, skew-Hamiltonian and symplectic matrices",
    long_about = "Structure-preserving matrix toolkit. Matrix files are plain text: one row per \
                  line, whitespace-separated numbers, '#' comments and blank lines ignored. \
                  Results are printed as a JSON document on stdout; diagnostics go to stderr. \
                  Random sampling uses a ChaCha12 stream with Box-Muller normals, seeded by \
                  --seed (the SYMPLECTICA_SEED environment variable takes precedence)."
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(clap::Args, Debug, Clone)]
struct DriverOpts {
    /// Relative off-block residual tolerance for the iterative decoupler
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    /// Cap on block-steps (default 64·n² for n canonical pairs)
    #[arg(long)]
    max_sweeps: Option<usize>,
    /// Four-step strategy variant (1 or 2)
    #[arg(long, default_value_t = 1)]
    strategy: u8,
}

impl DriverOpts {
    fn config(&self) -> Result<JacobiConfig, String> {
        let strategy = Strategy::from_number(self.strategy)
            .ok_or_else(|| format!("invalid strategy {}; expected 1 or 2", self.strategy))?;
        if self.tol <= 0.0 || self.tol.is_nan() {
            return Err(format!("tolerance must be positive, got {}", self.tol));
        }
        Ok(JacobiConfig { tolerance: self.tol, max_sweeps: self.max_sweeps, strategy })
    }

    fn describe(&self, pairs: usize) -> Value {
        json!({
            "tol": self.tol,
            "max_sweeps": self.max_sweeps.unwrap_or(64 * pairs * pairs),
            "strategy": self.strategy,
        })
    }
}

#[derive(Subcommand)]
enum Command {
    /// Report the structure class (Hamiltonian / skew-Hamiltonian /
    /// symplectic) and, for 4×4 inputs, the Dirac coefficient table
    Check { path: PathBuf },
    /// Block-diagonalize a Hamiltonian or skew-Hamiltonian matrix
    Decouple {
        path: PathBuf,
        #[command(flatten)]
        driver: DriverOpts,
        /// Write the block-diagonal result as a matrix file
        #[arg(long)]
        out: Option<PathBuf>,
        /// Write PREFIX.transform and PREFIX.inverse matrix files
        #[arg(long, value_name = "PREFIX")]
        emit_transform: Option<PathBuf>,
    },
    /// Eigenvalue pairs (±λ) with elliptic/hyperbolic classification
    Eig {
        path: PathBuf,
        #[command(flatten)]
        driver: DriverOpts,
    },
    /// Per-mode normal forms (ω·η₀ for elliptic, λ·η₁ for hyperbolic modes)
    Normalform {
        path: PathBuf,
        #[command(flatten)]
        driver: DriverOpts,
    },
    /// Matrix exponential of a Hamiltonian matrix (a symplectic matrix)
    Exp {
        path: PathBuf,
        #[command(flatten)]
        driver: DriverOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matrix logarithm of a symplectic matrix (a Hamiltonian matrix)
    Log {
        path: PathBuf,
        #[command(flatten)]
        driver: DriverOpts,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Matched second moments for a stable symplectic one-turn map, with
    /// optional Gaussian phase-space sampling
    Matched {
        path: PathBuf,
        /// Comma-separated strictly positive emittances, one per mode,
        /// assigned to modes by descending frequency
        #[arg(long, value_delimiter = ',', required = true)]
        emittances: Vec<f64>,
        /// Number of phase-space points to sample
        #[arg(long, default_value_t = 0)]
        samples: usize,
        /// RNG seed (overridden by SYMPLECTICA_SEED if set)
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// File for sampled points, one point per line (required with --samples)
        #[arg(long)]
        samples_out: Option<PathBuf>,
        #[command(flatten)]
        driver: DriverOpts,
    },
    /// Regenerate and verify the algebra's defining tables
    Selftest {
        /// Angle at which the transform tables are evaluated
        #[arg(long, default_value_t = 0.7)]
        tau: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (doc, code) = run(cli.command);
    println!("{}", serde_json::to_string_pretty(&doc).expect("serializable document"));
    ExitCode::from(code)
}

fn error_code(e: &Error) -> (&'static str, u8) {
    match e {
        Error::ComplexEigenvalues => ("ComplexEigenvalues", 2),
        Error::NoConvergence { .. } => ("NoConvergence", 3),
        Error::DimensionOdd(_) => ("DimensionOdd", 4),
        Error::DimensionMismatch(..) => ("DimensionMismatch", 4),
        Error::DimensionTooSmall(_) => ("DimensionTooSmall", 4),
        Error::NonFiniteEntry => ("NonFiniteEntry", 4),
        Error::NotHamiltonian { .. } => ("NotHamiltonian", 4),
        Error::NotStructured { .. } => ("NotStructured", 4),
        Error::NotSymplectic { .. } => ("NotSymplectic", 4),
        Error::BadGenerator(_) => ("BadGenerator", 4),
        Error::BadEmbedding(..) => ("BadEmbedding", 4),
        Error::HyperbolicOverflow(..) => ("HyperbolicOverflow", 4),
        Error::HyperbolicBlock(_) => ("HyperbolicBlock", 4),
        Error::LogBranch => ("LogBranch", 4),
        Error::UnstableLattice => ("UnstableLattice", 4),
        Error::NonPositiveEmittance => ("NonPositiveEmittance", 4),
    }
}

struct Input {
    matrix: PhaseMatrix,
    meta: Value,
}

fn load_input(command: &str, path: &Path) -> Result<Input, (Value, u8)> {
    let fail = |message: String| {
        eprintln!("symplectica {command}: {message}");
        (
            json!({
                "schema": SCHEMA,
                "command": command,
                "status": "error",
                "error": {"code": "ParseError", "message": message},
                "input": {"path": path.display().to_string()},
            }),
            1u8,
        )
    };
    let bytes = fs::read(path).map_err(|e| fail(format!("{}: {e}", path.display())))?;
    let digest = Sha256::digest(&bytes);
    let sha256: String = digest.iter().map(|b| format!("{b:02x}")).collect();
    let text = String::from_utf8(bytes).map_err(|_| fail("file is not valid UTF-8".into()))?;
    let matrix = io::parse_matrix(&text).map_err(|e| fail(e.to_string()))?;
    let meta = json!({
        "path": path.display().to_string(),
        "sha256": sha256,
        "dim": matrix.dim(),
    });
    Ok(Input { matrix, meta })
}

fn domain_error(command: &str, input: Value, options: Value, e: &Error) -> (Value, u8) {
    let (code, exit) = error_code(e);
    eprintln!("symplectica {command}: {e}");
    (
        json!({
            "schema": SCHEMA,
            "command": command,
            "input": input,
            "options": options,
            "status": "error",
            "error": {"code": code, "message": e.to_string()},
        }),
        exit,
    )
}

fn usage_error(command: &str, message: String) -> (Value, u8) {
    eprintln!("symplectica {command}: {message}");
    (
        json!({
            "schema": SCHEMA,
            "command": command,
            "status": "error",
            "error": {"code": "Usage", "message": message},
        }),
        1,
    )
}

fn write_file(command: &str, path: &Path, contents: &str) -> Result<(), (Value, u8)> {
    fs::write(path, contents)
        .map_err(|e| usage_error(command, format!("cannot write {}: {e}", path.display())))
}

fn matrix_rows(m: &PhaseMatrix) -> Value {
    let rows: Vec<Vec<f64>> = (0..m.dim()).map(|i| m.row(i).to_vec()).collect();
    json!(rows)
}

fn spectrum_json(s: &Spectrum) -> Value {
    json!(s
        .pairs()
        .iter()
        .map(|p| {
            json!({
                "re": p.re,
                "im": p.im,
                "class": p.class.label(),
                "omega": p.omega,
            })
        })
        .collect::<Vec<_>>())
}

fn run(command: Command) -> (Value, u8) {
    match command {
        Command::Check { path } => cmd_check(&path),
        Command::Decouple { path, driver, out, emit_transform } => {
            cmd_decouple(&path, &driver, out.as_deref(), emit_transform.as_deref())
        }
        Command::Eig { path, driver } => cmd_eig(&path, &driver),
        Command::Normalform { path, driver } => cmd_normalform(&path, &driver),
        Command::Exp { path, driver, out } => cmd_exp(&path, &driver, out.as_deref()),
        Command::Log { path, driver, out } => cmd_log(&path, &driver, out.as_deref()),
        Command::Matched { path, emittances, samples, seed, samples_out, driver } => {
            cmd_matched(&path, &emittances, samples, seed, samples_out.as_deref(), &driver)
        }
        Command::Selftest { tau } => cmd_selftest(tau),
    }
}

fn cmd_check(path: &Path) -> (Value, u8) {
    let input = match load_input("check", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let m = &input.matrix;
    let mut doc = json!({
        "schema": SCHEMA,
        "command": "check",
        "input": input.meta,
        "options": {"predicate_tol": symplectica::symplectic::STRUCT_TOL},
        "status": "ok",
        "hamiltonian": is_hamiltonian(m),
        "skew_hamiltonian": is_skew_hamiltonian(m),
        "symplectic": is_symplectic(m),
        "defects": {
            "hamiltonian": hamiltonian_defect(m),
            "skew_hamiltonian": skew_hamiltonian_defect(m),
            "symplectic": symplectic_defect(m),
        },
    });
    if m.dim() == 4 {
        let coeffs = decompose4(m).expect("4x4 decomposition");
        doc["dirac_coefficients"] = json!(coeffs.m.to_vec());
    }
    (doc, 0)
}

fn cmd_decouple(
    path: &Path,
    driver: &DriverOpts,
    out: Option<&Path>,
    emit_transform: Option<&Path>,
) -> (Value, u8) {
    let input = match load_input("decouple", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("decouple", msg),
    };
    let options = driver.describe(input.matrix.pairs());
    let report = match jacobi_decouple(&input.matrix, &cfg) {
        Ok(r) => r,
        Err(e) => return domain_error("decouple", input.meta, options, &e),
    };
    if let Some(p) = out {
        if let Err(e) = write_file("decouple", p, &io::serialize_matrix(&report.result)) {
            return e;
        }
    }
    let mut transform_files = Value::Null;
    if let Some(prefix) = emit_transform {
        let fwd = prefix.with_extension("transform");
        let inv = prefix.with_extension("inverse");
        if let Err(e) =
            write_file("decouple", &fwd, &io::serialize_matrix(report.transform.matrix()))
        {
            return e;
        }
        if let Err(e) =
            write_file("decouple", &inv, &io::serialize_matrix(report.transform.inverse_matrix()))
        {
            return e;
        }
        transform_files =
            json!({"transform": fwd.display().to_string(), "inverse": inv.display().to_string()});
    }
    let doc = json!({
        "schema": SCHEMA,
        "command": "decouple",
        "input": input.meta,
        "options": options,
        "status": "ok",
        "steps": report.steps,
        "residual": report.residual_history.last().copied().unwrap_or(0.0),
        "residual_history": report.residual_history,
        "result": matrix_rows(&report.result),
        "transform": matrix_rows(report.transform.matrix()),
        "transform_inverse": matrix_rows(report.transform.inverse_matrix()),
        "transform_files": transform_files,
    });
    (doc, 0)
}

fn cmd_eig(path: &Path, driver: &DriverOpts) -> (Value, u8) {
    let input = match load_input("eig", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("eig", msg),
    };
    let options = driver.describe(input.matrix.pairs());
    match spectrum_of(&input.matrix, &cfg) {
        Ok(s) => (
            json!({
                "schema": SCHEMA,
                "command": "eig",
                "input": input.meta,
                "options": options,
                "status": "ok",
                "eigenvalues": spectrum_json(&s),
            }),
            0,
        ),
        Err(e) => domain_error("eig", input.meta, options, &e),
    }
}

fn cmd_normalform(path: &Path, driver: &DriverOpts) -> (Value, u8) {
    let input = match load_input("normalform", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("normalform", msg),
    };
    let options = driver.describe(input.matrix.pairs());

    let (decoupled, transform_doc) = if input.matrix.dim() == 2 {
        (input.matrix.clone(), Value::Null)
    } else {
        match jacobi_decouple(&input.matrix, &cfg) {
            Ok(r) => {
                let t = matrix_rows(r.transform.matrix());
                (r.result, t)
            }
            Err(e) => return domain_error("normalform", input.meta, options, &e),
        }
    };

    let mut blocks = Vec::new();
    for (k, nf) in block_normal_forms(&decoupled).into_iter().enumerate() {
        match nf {
            Ok(nf) => {
                // hyperbolic normal forms extend the oscillator form and are
                // flagged as non-oscillator output
                blocks.push(json!({
                    "block": k,
                    "class": nf.class.label(),
                    "omega": nf.omega,
                    "orientation": nf.orientation,
                    "oscillator_form": nf.class == EigenClass::Elliptic,
                    "normal_form": matrix_rows(&nf.matrix()),
                    "block_transform": matrix_rows(nf.transform.matrix()),
                }));
            }
            Err(e) => return domain_error("normalform", input.meta, options, &e),
        }
    }
    (
        json!({
            "schema": SCHEMA,
            "command": "normalform",
            "input": input.meta,
            "options": options,
            "status": "ok",
            "decoupling_transform": transform_doc,
            "blocks": blocks,
        }),
        0,
    )
}

fn cmd_exp(path: &Path, driver: &DriverOpts, out: Option<&Path>) -> (Value, u8) {
    let input = match load_input("exp", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("exp", msg),
    };
    let options = driver.describe(input.matrix.pairs());
    match sympl_exp_with(&input.matrix, &cfg) {
        Ok(m) => {
            if let Some(p) = out {
                if let Err(e) = write_file("exp", p, &io::serialize_matrix(&m)) {
                    return e;
                }
            }
            (
                json!({
                    "schema": SCHEMA,
                    "command": "exp",
                    "input": input.meta,
                    "options": options,
                    "status": "ok",
                    "result": matrix_rows(&m),
                    "symplectic_defect": symplectic_defect(&m),
                }),
                0,
            )
        }
        Err(e) => domain_error("exp", input.meta, options, &e),
    }
}

fn cmd_log(path: &Path, driver: &DriverOpts, out: Option<&Path>) -> (Value, u8) {
    let input = match load_input("log", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("log", msg),
    };
    let options = driver.describe(input.matrix.pairs());
    match sympl_log_with(&input.matrix, &cfg) {
        Ok(m) => {
            if let Some(p) = out {
                if let Err(e) = write_file("log", p, &io::serialize_matrix(&m)) {
                    return e;
                }
            }
            (
                json!({
                    "schema": SCHEMA,
                    "command": "log",
                    "input": input.meta,
                    "options": options,
                    "status": "ok",
                    "result": matrix_rows(&m),
                    "hamiltonian_defect": hamiltonian_defect(&m),
                }),
                0,
            )
        }
        Err(e) => domain_error("log", input.meta, options, &e),
    }
}

fn cmd_matched(
    path: &Path,
    emittances: &[f64],
    samples: usize,
    seed_flag: u64,
    samples_out: Option<&Path>,
    driver: &DriverOpts,
) -> (Value, u8) {
    let input = match load_input("matched", path) {
        Ok(i) => i,
        Err(e) => return e,
    };
    let cfg = match driver.config() {
        Ok(c) => c,
        Err(msg) => return usage_error("matched", msg),
    };
    // the environment variable takes precedence over the flag
    let seed = match std::env::var("SYMPLECTICA_SEED") {
        Ok(s) => match s.parse::<u64>() {
            Ok(v) => v,
            Err(_) => {
                return usage_error("matched", format!("SYMPLECTICA_SEED is not a u64: '{s}'"))
            }
        },
        Err(_) => seed_flag,
    };
    let mut options = driver.describe(input.matrix.pairs());
    options["emittances"] = json!(emittances);
    options["samples"] = json!(samples);
    options["seed"] = json!(seed);
    options["rng"] = json!("ChaCha12 + Box-Muller");

    let eps = match Emittances::new(emittances.to_vec()) {
        Ok(e) => e,
        Err(e) => return domain_error("matched", input.meta, options, &e),
    };
    if samples > 0 && samples_out.is_none() {
        return usage_error("matched", "--samples requires --samples-out FILE".into());
    }

    let mm = match matched_sigma_with(&input.matrix, &eps, &cfg) {
        Ok(m) => m,
        Err(e) => return domain_error("matched", input.meta, options, &e),
    };
    let frame = match matched_frame(&input.matrix, &cfg) {
        Ok(f) => f,
        Err(e) => return domain_error("matched", input.meta, options, &e),
    };

    let mut samples_info = Value::Null;
    if samples > 0 {
        let pts = match sample_matched(&input.matrix, &eps, samples, seed) {
            Ok(p) => p,
            Err(e) => return domain_error("matched", input.meta, options, &e),
        };
        let out_path = samples_out.expect("checked above");
        if let Err(e) = write_file("matched", out_path, &io::serialize_points(&pts)) {
            return e;
        }
        samples_info = json!({
            "count": samples,
            "path": out_path.display().to_string(),
            "seed": seed,
        });
    }

    let m = &input.matrix;
    let fixed = m.mul(mm.sigma()).mul(&m.transpose());
    let fixed_point_error = fixed.sub(mm.sigma()).frobenius() / mm.sigma().frobenius();
    (
        json!({
            "schema": SCHEMA,
            "command": "matched",
            "input": input.meta,
            "options": options,
            "status": "ok",
            "sigma": matrix_rows(mm.sigma()),
            "s_matrix": matrix_rows(mm.s_matrix()),
            "mode_frequencies": frame.omegas,
            "emittance_assignment": frame.assignment,
            "fixed_point_error": fixed_point_error,
            "lax_traces": {"s2": mm.lax_trace(2), "s4": mm.lax_trace(4)},
            "samples": samples_info,
        }),
        0,
    )
}

fn cmd_selftest(tau: f64) -> (Value, u8) {
    let options = json!({"tau": tau, "cell_tol": 1e-12});
    let report = match symplectica::selftest::run(tau) {
        Ok(r) => r,
        Err(e) => return domain_error("selftest", Value::Null, options, &e),
    };
    let cells: Vec<Value> = report
        .cells
        .iter()
        .map(|c| json!({"table": c.table, "cell": c.label, "max_err": c.max_err, "pass": c.pass}))
        .collect();
    let all_pass = report.all_pass();
    for c in &report.cells {
        let status = if c.pass { "pass" } else { "FAIL" };
        eprintln!("selftest {status} [{}] {} (err {:.2e})", c.table, c.label, c.max_err);
    }
    let doc = json!({
        "schema": SCHEMA,
        "command": "selftest",
        "options": options,
        "status": if all_pass { "ok" } else { "error" },
        "counts": {
            "classification_rows": report.classification_rows,
            "transform_cells": report.transform_cells,
            "scalar_product_cells": report.eps_cells,
        },
        "all_pass": all_pass,
        "cells": cells,
    });
    if all_pass {
        (doc, 0)
    } else {
        eprintln!("symplectica selftest: table verification failed");
        (doc, 5)
    }
}
