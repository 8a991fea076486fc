mod args;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::Parser;
use serde::Serialize;
use serde_json::{json, Value};

use responsibility::aided_decision::{responsibility, ResponsibilityReport};
use responsibility::flowmodel::FlowModel;
use responsibility::simulate::{simulate_aws, SimConfig};
use responsibility::sweep::{grid_sweep, GridSpec};
use responsibility::Error;

use args::{Cli, Command, ComputeArgs, ModelArgs, SimulateArgs, SweepArgs};

const EXIT_PARAMETER: u8 = 1;
const EXIT_MODEL: u8 = 2;
const EXIT_DEGENERATE: u8 = 3;
const EXIT_SAMPLE: u8 = 4;

/// A failure with its exit code; the message goes to standard error.
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn parameter(message: impl Into<String>) -> Self {
        Failure {
            code: EXIT_PARAMETER,
            message: message.into(),
        }
    }
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match &e {
            Error::InvalidModel(_) => EXIT_MODEL,
            Error::DegenerateSample { .. } => EXIT_SAMPLE,
            e if e.is_degenerate_entropy() => EXIT_DEGENERATE,
            _ => EXIT_PARAMETER,
        };
        let message = match &e {
            Error::InvalidModel(diags) => diags
                .iter()
                .map(|d| format!("error: {d}"))
                .collect::<Vec<_>>()
                .join("\n"),
            e => format!("error: {e}"),
        };
        Failure { code, message }
    }
}

type Outcome = Result<String, Failure>;

/// Everything one invocation produces.
#[derive(Debug)]
struct Invocation {
    code: u8,
    stdout: String,
    stderr: String,
}

fn run<I, T>(argv: I) -> Invocation
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(e) => {
            let text = e.render().to_string();
            return match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => Invocation {
                    code: 0,
                    stdout: text,
                    stderr: String::new(),
                },
                _ => Invocation {
                    code: EXIT_PARAMETER,
                    stdout: String::new(),
                    stderr: text,
                },
            };
        }
    };
    let mut stderr = String::new();
    let outcome = match cli.command {
        Command::Compute(a) => run_compute(&a),
        Command::Sweep(a) => run_sweep(&a, &mut stderr),
        Command::Simulate(a) => run_simulate(&a),
        Command::Model(a) => run_model(&a),
    };
    match outcome {
        Ok(stdout) => Invocation {
            code: 0,
            stdout,
            stderr,
        },
        Err(f) => {
            stderr.push_str(&f.message);
            stderr.push('\n');
            Invocation {
                code: f.code,
                stdout: String::new(),
                stderr,
            }
        }
    }
}

fn main() -> ExitCode {
    let inv = run(std::env::args_os());
    eprint!("{}", inv.stderr);
    let mut stdout = std::io::stdout().lock();
    if stdout
        .write_all(inv.stdout.as_bytes())
        .and_then(|_| stdout.flush())
        .is_err()
    {
        return ExitCode::from(EXIT_PARAMETER);
    }
    ExitCode::from(inv.code)
}

fn to_json<T: Serialize>(value: &T) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("reports serialize");
    s.push('\n');
    s
}

fn run_compute(a: &ComputeArgs) -> Outcome {
    let params = a.scenario.scenario(a.d_human, a.d_automation);
    let report = responsibility(&params)?;
    if !a.self_check {
        return Ok(to_json(&report));
    }
    let err = self_check_error(&report);
    if err > 1e-12 {
        return Err(Failure::parameter(format!(
            "error: self-check failed, largest table inconsistency {err:e}"
        )));
    }
    let mut doc = serde_json::to_value(&report).expect("reports serialize");
    doc["self_check"] = json!({ "passed": true, "max_abs_error": err });
    Ok(to_json(&doc))
}

/// Largest disagreement between the joint table, its stored marginals, unit
/// mass and the entropy chain rule.
fn self_check_error(r: &ResponsibilityReport) -> f64 {
    let t = &r.tables;
    let rows = t.joint_xy.row_marginal();
    let cols = t.joint_xy.col_marginal();
    let mut worst: f64 = 0.0;
    for (a, b) in rows.probs().iter().zip(t.dist_y.probs()) {
        worst = worst.max((a - b).abs());
    }
    for (a, b) in cols.probs().iter().zip(t.dist_x.probs()) {
        worst = worst.max((a - b).abs());
    }
    let mass: f64 = t.joint_xy.cells().iter().flatten().sum();
    worst = worst.max((mass - 1.0).abs());
    worst.max((r.h_xy - r.h_y - r.h_x_given_y).abs())
}

fn run_sweep(a: &SweepArgs, warnings: &mut String) -> Outcome {
    let base = a.scenario.scenario(a.d_human, a.d_automation);
    let table = match a.preset {
        Some(p) => p.run(base)?,
        None => grid_sweep(&GridSpec::new(a.axis.clone(), base)?)?,
    };
    for e in &table.errors {
        let keys: Vec<String> = table
            .columns
            .iter()
            .zip(&e.keys)
            .map(|(c, k)| format!("{c}={k}"))
            .collect();
        warnings.push_str(&format!(
            "warning: skipped {}: {}\n",
            keys.join(" "),
            e.message
        ));
    }
    if table.rows.is_empty() {
        return Err(Failure::parameter(
            "error: no grid point could be evaluated",
        ));
    }
    let csv = table.to_csv();
    match &a.out {
        Some(path) => {
            fs::write(path, csv).map_err(|e| {
                Failure::parameter(format!("error: cannot write {}: {e}", path.display()))
            })?;
            Ok(String::new())
        }
        None => Ok(csv),
    }
}

fn run_simulate(a: &SimulateArgs) -> Outcome {
    let params = a.scenario.scenario(a.d_human, a.d_automation);
    let cfg = SimConfig::new(a.trials, a.seed)?;
    let result = simulate_aws(&params, &cfg)?;
    let mut doc = serde_json::to_value(&result).expect("results serialize");
    doc["params"] = serde_json::to_value(params).expect("params serialize");
    Ok(to_json(&doc))
}

fn run_model(a: &ModelArgs) -> Outcome {
    let text = fs::read_to_string(&a.file)
        .map_err(|e| Failure::parameter(format!("error: cannot read {}: {e}", a.file.display())))?;
    let model = FlowModel::from_json(&text)?;
    let diags = model.validate();
    if !diags.is_empty() {
        return Err(Error::InvalidModel(diags).into());
    }
    if a.validate_only {
        let doc: Value = json!({
            "valid": true,
            "variables": model.variables.len(),
            "output": model.output,
        });
        return Ok(to_json(&doc));
    }
    Ok(to_json(&model.general_responsibility()?))
}
