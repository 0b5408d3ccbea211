//! Command-line front end: argument handling, the verify suite and report
//! serialization. `run` returns the process exit code.

mod config;
pub mod verify;

use std::ffi::OsString;
use std::io::Write;

use clap::Parser;
use pyrafem::meshfem::{coefficient_preset, consistency_study, convergence_study, solution_preset, StudyResult};
use pyrafem::quadrature::conical_rule;
use pyrafem::spaces::{basis, exact_sequence_report, Family};
use serde_json::json;

pub use config::{Command, Format, RunConfig};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_CONFIG: u8 = 2;
pub const EXIT_SOLVER: u8 = 3;

/// JSON schema of the `verify` report.
pub const VERIFY_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "pyrafem verify report",
  "type": "object",
  "required": ["command", "k_max", "seed", "all_pass", "theorem_3_1_max_residual", "checks"],
  "properties": {
    "command": { "const": "verify" },
    "k_max": { "type": "integer", "minimum": 1 },
    "seed": { "type": "integer", "minimum": 0 },
    "all_pass": { "type": "boolean" },
    "theorem_3_1_max_residual": { "type": ["number", "null"] },
    "checks": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["name", "pass", "worst_residual", "detail"],
        "properties": {
          "name": { "type": "string" },
          "pass": { "type": "boolean" },
          "worst_residual": { "type": ["number", "null"] },
          "detail": { "type": "string" }
        }
      }
    }
  }
}"#;

/// JSON schema of the study reports (`convergence`, `consistency`).
pub const STUDY_SCHEMA: &str = r#"{
  "$schema": "https://json-schema.org/draft/2020-12/schema",
  "title": "pyrafem study result",
  "type": "object",
  "required": ["kind", "k", "q", "coefficient", "solution", "rows", "rates"],
  "properties": {
    "kind": { "enum": ["convergence", "consistency"] },
    "k": { "type": "integer", "minimum": 1 },
    "q": { "type": "integer", "minimum": 0 },
    "coefficient": { "type": "string" },
    "solution": { "type": "string" },
    "rows": {
      "type": "array",
      "items": {
        "type": "object",
        "required": ["n", "h", "dofs"],
        "properties": {
          "n": { "type": "integer", "minimum": 1 },
          "h": { "type": "number" },
          "dofs": { "type": "integer" },
          "l2_error": { "type": ["number", "null"] },
          "h1_error": { "type": ["number", "null"] },
          "consistency": { "type": ["number", "null"] },
          "consistency_dual": { "type": ["number", "null"] },
          "elliptic": { "type": ["number", "null"] },
          "elliptic_dual": { "type": ["number", "null"] }
        }
      }
    },
    "rates": { "type": "object", "additionalProperties": { "type": ["number", "null"] } }
  }
}"#;

/// Largest global system a study may build.
const MAX_DOFS: usize = 200_000;

enum Failure {
    Config(String),
    Solver(String),
}

impl From<pyrafem::Error> for Failure {
    fn from(e: pyrafem::Error) -> Self {
        match e {
            pyrafem::Error::Config(m) => Failure::Config(m),
            pyrafem::Error::InvalidOrder(_) => Failure::Config(e.to_string()),
            other => Failure::Solver(other.to_string()),
        }
    }
}

struct Output {
    text: String,
    /// Printed to standard error after the output is written.
    summary: Option<String>,
    code: u8,
}

/// Parses the arguments, runs one command and returns the exit code.
pub fn run<I, T>(args: I) -> u8
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let config = match RunConfig::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    if let Err(m) = config.validate() {
        eprintln!("error: {m}");
        return EXIT_CONFIG;
    }
    if let Err(m) = init_threads() {
        eprintln!("error: {m}");
        return EXIT_CONFIG;
    }
    let out = match execute(&config) {
        Ok(o) => o,
        Err(Failure::Config(m)) => {
            eprintln!("error: {m}");
            return EXIT_CONFIG;
        }
        Err(Failure::Solver(m)) => {
            eprintln!("error: {m}");
            return EXIT_SOLVER;
        }
    };
    let written = match &config.out {
        Some(path) => std::fs::write(path, &out.text).map_err(|e| format!("{}: {e}", path.display())),
        None => std::io::stdout().write_all(out.text.as_bytes()).map_err(|e| e.to_string()),
    };
    if let Err(m) = written {
        eprintln!("error: {m}");
        return EXIT_CONFIG;
    }
    if let Some(s) = out.summary {
        eprintln!("{s}");
    }
    out.code
}

fn init_threads() -> Result<(), String> {
    let Ok(v) = std::env::var("PYRAFEM_THREADS") else { return Ok(()) };
    let n: usize = v.trim().parse().map_err(|_| format!("PYRAFEM_THREADS={v:?} is not a thread count"))?;
    if n == 0 {
        return Err("PYRAFEM_THREADS must be at least 1".into());
    }
    // a second call in the same process keeps the first pool
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

fn execute(c: &RunConfig) -> Result<Output, Failure> {
    match c.command {
        Command::Verify => Ok(cmd_verify(c)),
        Command::Spaces => cmd_spaces(c),
        Command::Quadtable => cmd_quadtable(c),
        Command::Convergence | Command::Consistency => cmd_study(c),
    }
}

fn json_text(v: &impl serde::Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("plain data");
    s.push('\n');
    s
}

fn cmd_verify(c: &RunConfig) -> Output {
    let report = verify::run(c.k_max, c.seed);
    let failed: Vec<&str> = report.checks.iter().filter(|x| !x.pass).map(|x| x.name.as_str()).collect();
    let summary = if failed.is_empty() {
        format!("all {} checks pass", report.checks.len())
    } else {
        format!("failed checks: {}", failed.join(", "))
    };
    Output {
        code: if report.all_pass { EXIT_OK } else { EXIT_FAILED },
        text: json_text(&report),
        summary: Some(summary),
    }
}

fn cmd_spaces(c: &RunConfig) -> Result<Output, Failure> {
    let ks: Vec<usize> = match c.k {
        Some(k) => vec![k],
        None => (1..=c.k_max).collect(),
    };
    let ss: Vec<usize> = match c.s {
        Some(s) => vec![s],
        None => (0..4).collect(),
    };
    let mut rows = Vec::new();
    let mut sequences = Vec::new();
    for &k in &ks {
        for &s in &ss {
            let x: Vec<usize> = (0..=k).map(|r| basis(s, k, Family::ExactWeight(r)).map(|b| b.dim())).collect::<Result<_, _>>()?;
            rows.push(json!({
                "s": s,
                "k": k,
                "dim_underlying": basis(s, k, Family::Underlying)?.dim(),
                "dim_conforming": basis(s, k, Family::Conforming)?.dim(),
                "dim_reduced": basis(s, k, Family::Reduced)?.dim(),
                "dim_exact_weight": x,
            }));
        }
        let rep = exact_sequence_report(k)?;
        sequences.push(json!({
            "k": k,
            "dims_reduced": rep.dims,
            "ranks": rep.ranks,
            "euler_characteristic": rep.euler_characteristic,
            "exact": rep.exact(),
        }));
    }
    let text = match c.format.unwrap_or(Format::Json) {
        Format::Json => json_text(&json!({ "command": "spaces", "spaces": rows, "sequences": sequences })),
        Format::Csv => {
            let mut t = String::from("s,k,dim_underlying,dim_conforming,dim_reduced,dim_exact_weight\n");
            for r in &rows {
                let x: Vec<String> = r["dim_exact_weight"].as_array().into_iter().flatten().map(|v| v.to_string()).collect();
                t.push_str(&format!(
                    "{},{},{},{},{},{}\n",
                    r["s"], r["k"], r["dim_underlying"], r["dim_conforming"], r["dim_reduced"], x.join(";")
                ));
            }
            t
        }
    };
    Ok(Output { text, summary: None, code: EXIT_OK })
}

fn cmd_quadtable(c: &RunConfig) -> Result<Output, Failure> {
    let rule = conical_rule::<f64>(c.order())?;
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Json => json_text(&rule),
        Format::Csv => {
            let mut t = String::from("xi,eta,zeta,weight\n");
            for (p, w) in rule.points.iter().zip(&rule.weights) {
                t.push_str(&format!("{:.17e},{:.17e},{:.17e},{:.17e}\n", p[0], p[1], p[2], w));
            }
            t
        }
    };
    Ok(Output { text, summary: None, code: EXIT_OK })
}

/// Upper bound on the global degrees of freedom of an order-`k` space.
fn dof_estimate(k: usize, n: usize) -> usize {
    let side = 2 * n * k + 1;
    side.saturating_pow(3).saturating_add(6 * n * n * n * k.saturating_pow(3))
}

fn cmd_study(c: &RunConfig) -> Result<Output, Failure> {
    let k = c.order();
    let largest = *c.n.last().expect("validated non-empty");
    if dof_estimate(k, largest) > MAX_DOFS {
        return Err(Failure::Config(format!("k = {k}, n = {largest} exceeds {MAX_DOFS} degrees of freedom")));
    }
    let u = solution_preset(&c.u)?;
    let result: StudyResult = match c.command {
        Command::Convergence => {
            let a = coefficient_preset(c.a.as_deref().unwrap_or("identity"))?;
            convergence_study(k, c.q.unwrap_or(k), &c.n, &a, &u)?
        }
        _ => {
            if c.q.is_some() {
                return Err(Failure::Config("consistency uses the order-k rule; --q does not apply".into()));
            }
            let a = coefficient_preset(c.a.as_deref().unwrap_or("poly1"))?;
            consistency_study(k, &c.n, &a, &u)?
        }
    };
    let text = match c.format.unwrap_or(Format::Csv) {
        Format::Csv => result.to_csv(),
        Format::Json => json_text(&result.to_json()),
    };
    let r = &result.rates;
    let fmt = |v: Option<f64>| v.map_or("n/a".to_string(), |v| format!("{v:.3}"));
    let summary = match c.command {
        Command::Convergence => format!("fitted rates: l2 {} h1 {}", fmt(r.l2), fmt(r.h1)),
        _ => format!(
            "fitted rates: consistency {} (dual {}), elliptic {} (dual {})",
            fmt(r.consistency),
            fmt(r.consistency_dual),
            fmt(r.elliptic),
            fmt(r.elliptic_dual)
        ),
    };
    Ok(Output { text, summary: Some(summary), code: EXIT_OK })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solver_errors_map_to_exit_three() {
        let code = |e: pyrafem::Error| match Failure::from(e) {
            Failure::Config(_) => EXIT_CONFIG,
            Failure::Solver(_) => EXIT_SOLVER,
        };
        assert_eq!(code(pyrafem::Error::Indefinite), EXIT_SOLVER);
        assert_eq!(code(pyrafem::Error::SingularSystem), EXIT_SOLVER);
        assert_eq!(code(pyrafem::Error::Config("x".into())), EXIT_CONFIG);
        assert_eq!(code(pyrafem::Error::InvalidOrder(0)), EXIT_CONFIG);
    }

    #[test]
    fn dof_estimate_bounds_the_space() {
        let mesh = pyrafem::meshfem::build_cube_mesh(2).unwrap();
        for k in 1..=2 {
            let space = pyrafem::meshfem::GlobalSpace::new(&mesh, k, Family::Conforming).unwrap();
            assert!(space.n_dofs <= dof_estimate(k, 2));
        }
    }

    #[test]
    fn schemas_are_json() {
        for s in [VERIFY_SCHEMA, STUDY_SCHEMA] {
            serde_json::from_str::<serde_json::Value>(s).unwrap();
        }
    }
}
