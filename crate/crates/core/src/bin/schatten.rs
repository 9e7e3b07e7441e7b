//! `schatten`: command-line front end for the norm solvers and the SAT gadget builder.
//!
//! Exit codes: 0 success, 2 refusal (hard or open problem), 3 unconverged or unverified,
//! 4 input error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use serde::Serialize;
use serde_json::{json, Value};

use schatten_maps::dispatch::{dispatch, Method, Mode, Solution, SolveRequest};
use schatten_maps::error::exit;
use schatten_maps::io::{read_map, write_gadget_dir};
use schatten_maps::sat::{build_gadget_channels, gap_certify, GapReport, TwoOutOfFourInstance};
use schatten_maps::validation::{run_all, Level};
use schatten_maps::{Error, LinearMapRep, Result, SchattenIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Parser)]
#[command(name = "schatten", version, about = "Mixed Schatten norms and cb norms of linear maps on matrix algebras")]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "text")]
    format: Format,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compute a q->p norm, positive-input norm or cb norm of a map.
    Compute {
        #[arg(long)]
        map: PathBuf,
        /// Input index: a number >= 1, a fraction like 4/3, or inf.
        #[arg(long)]
        q: SchattenIndex,
        /// Output index.
        #[arg(long)]
        p: SchattenIndex,
        #[arg(long, value_enum, default_value = "norm")]
        mode: Mode,
        #[arg(long, value_enum, default_value = "auto")]
        method: Method,
        /// Relative tolerance in (0, 0.5].
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Compute the cb 1->p norm of a map.
    Cb {
        #[arg(long)]
        map: PathBuf,
        #[arg(long)]
        p: SchattenIndex,
        /// Restrict inputs on the extended system to PSD operators.
        #[arg(long)]
        positive: bool,
        #[arg(long, default_value_t = 1e-3)]
        eps: f64,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Build the four gadget channels of a 2-out-of-4 SAT instance and a gap report.
    ReduceSat {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        out: PathBuf,
        /// Output index used for the gap report.
        #[arg(long, default_value = "2")]
        p: SchattenIndex,
    },
    /// Decide an instance by enumeration and check the gadget gap on proper certificates.
    Certify {
        #[arg(long)]
        instance: PathBuf,
        #[arg(long)]
        eta: f64,
        #[arg(long)]
        p: SchattenIndex,
    },
    /// Run the acceptance criteria.
    Selftest {
        /// Use the full sample counts instead of the quick ones.
        #[arg(long)]
        full: bool,
        #[arg(long, default_value_t = 20240611)]
        seed: u64,
    },
}

/// Outcome of one command: a JSON document, a text rendering and an exit code.
struct Output {
    json: Value,
    text: String,
    code: i32,
}

fn map_summary(map: &LinearMapRep) -> Result<Value> {
    Ok(json!({ "in_dim": map.in_dim(), "out_dim": map.out_dim(), "flags": map.flags()? }))
}

fn solution_output(command: &str, map: &LinearMapRep, req: &SolveRequest, sol: &Solution) -> Result<Output> {
    let r = &sol.result;
    let json = json!({
        "command": command,
        "request": req,
        "map": map_summary(map)?,
        "result": r,
        "provenance": sol.provenance,
    });
    let mut text = format!(
        "value in [{:.12}, {}]\nmethod: {} ({} iterations)\nconverged: {}\ncertified upper bound: {}\nbasis: {}\n",
        r.value_lo,
        if r.value_hi.is_finite() { format!("{:.12}", r.value_hi) } else { "inf".into() },
        r.method,
        r.iterations,
        r.converged,
        r.certified_upper,
        sol.provenance.basis,
    );
    for d in &r.diagnostics {
        text.push_str(&format!("note: {d}\n"));
    }
    let code = if r.converged { exit::OK } else { exit::UNCONVERGED };
    Ok(Output { json, text, code })
}

fn read_instance(path: &Path) -> Result<TwoOutOfFourInstance> {
    let text = fs::read_to_string(path).map_err(|e| Error::Input(format!("{}: {e}", path.display())))?;
    TwoOutOfFourInstance::from_json(&text).map_err(|e| match e {
        Error::Json(j) => Error::Input(format!("instance file: {j}")),
        other => other,
    })
}

fn check_eta(eta: f64) -> Result<()> {
    if eta.is_finite() && eta > 0.0 {
        Ok(())
    } else {
        Err(Error::Input(format!("eta must be positive and finite, got {eta}")))
    }
}

fn report_text(r: &GapReport) -> String {
    let mut s = format!(
        "d = {}, m = {}, eta = {}, p = {}, variant {:?}\nsatisfiable: {}{}\ngadget bound: {:.12}\nmax proper-certificate value: {:.12}\n",
        r.d,
        r.m,
        r.eta,
        r.p,
        r.variant,
        r.satisfiable,
        r.witness.as_ref().map(|w| format!(" (witness {w})")).unwrap_or_default(),
        r.gadget_bound,
        r.max_certificate_value,
    );
    if !r.satisfiable {
        s.push_str(&format!("integrality margin: {:.6e}\nrelative gap: {:.6e}\n", r.margin, r.delta_gap));
    }
    s.push_str(&format!("verified: {}\nscope: {}\n", r.verified, r.scope));
    s
}

fn report_code(r: &GapReport) -> i32 {
    if r.verified {
        exit::OK
    } else {
        exit::UNCONVERGED
    }
}

#[derive(Serialize)]
struct CbRequest {
    p: SchattenIndex,
    positive: bool,
    eps: f64,
    seed: u64,
}

fn run(command: Command) -> Result<Output> {
    match command {
        Command::Compute { map, q, p, mode, method, eps, seed } => {
            let phi = read_map(&map)?;
            let req = SolveRequest { q, p, mode, method, eps, seed };
            let sol = dispatch(&phi, &req)?;
            solution_output("compute", &phi, &req, &sol)
        }
        Command::Cb { map, p, positive, eps, seed } => {
            let phi = read_map(&map)?;
            let mode = if positive { Mode::CbPositive } else { Mode::Cb };
            let req = SolveRequest { q: SchattenIndex::ONE, p, mode, method: Method::Auto, eps, seed };
            let sol = dispatch(&phi, &req)?;
            let mut out = solution_output("cb", &phi, &req, &sol)?;
            out.json["request"] = serde_json::to_value(CbRequest { p, positive, eps, seed })?;
            Ok(out)
        }
        Command::ReduceSat { instance, eta, out, p } => {
            check_eta(eta)?;
            let inst = read_instance(&instance)?;
            let g = build_gadget_channels(&inst, eta)?;
            let report = gap_certify(&inst, eta, p)?;
            let files = write_gadget_dir(&out, &g, &report)?;
            let names: Vec<String> = files.iter().map(|f| f.display().to_string()).collect();
            let mut text = report_text(&report);
            for n in &names {
                text.push_str(&format!("wrote {n}\n"));
            }
            let json = json!({ "command": "reduce-sat", "files": names, "report": report });
            Ok(Output { json, text, code: report_code(&report) })
        }
        Command::Certify { instance, eta, p } => {
            check_eta(eta)?;
            let inst = read_instance(&instance)?;
            let report = gap_certify(&inst, eta, p)?;
            let json = json!({ "command": "certify", "report": report });
            Ok(Output { text: report_text(&report), json, code: report_code(&report) })
        }
        Command::Selftest { full, seed } => {
            let level = if full { Level::Full } else { Level::Quick };
            let reports = run_all(level, seed);
            let passed = reports.iter().all(|r| r.passed);
            let mut text = String::new();
            for r in &reports {
                text.push_str(&r.line());
                text.push('\n');
                for f in &r.failures {
                    text.push_str(&format!("    failed: {f}\n"));
                }
            }
            let n_pass = reports.iter().filter(|r| r.passed).count();
            text.push_str(&format!("{n_pass}/{} criteria passed\n", reports.len()));
            let criteria: Vec<Value> = reports
                .iter()
                .map(|r| {
                    json!({ "id": r.id, "title": r.title, "passed": r.passed, "checks": r.checks,
                            "failures": r.failures, "notes": r.notes, "seconds": r.seconds })
                })
                .collect();
            let json = json!({ "command": "selftest", "level": if full { "full" } else { "quick" },
                               "seed": seed, "passed": passed, "criteria": criteria });
            Ok(Output { json, text, code: if passed { exit::OK } else { 1 } })
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { exit::INPUT } else { exit::OK };
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    let code = match run(cli.command) {
        Ok(out) => {
            let body = match cli.format {
                Format::Json => serde_json::to_string_pretty(&out.json).expect("serializable") + "\n",
                Format::Text => out.text,
            };
            // A closed pipe (e.g. `| head`) is not an error of the computation.
            let _ = std::io::stdout().lock().write_all(body.as_bytes());
            out.code
        }
        Err(e) => {
            match cli.format {
                Format::Json => {
                    let doc = json!({ "error": { "kind": e.kind(), "message": e.to_string() } });
                    let _ = writeln!(std::io::stdout().lock(), "{}", serde_json::to_string_pretty(&doc).expect("serializable"));
                }
                Format::Text => eprintln!("error: {e}"),
            }
            e.exit_code()
        }
    };
    ExitCode::from(code as u8)
}
