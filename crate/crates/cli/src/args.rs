use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use responsibility::aided_decision::{LoopMode, ScenarioParams, REFERENCE_P_T, REFERENCE_V_RATIO};
use responsibility::sweep::{Axis, Param, Preset};
use responsibility::{Error, Result};

/// Human causal responsibility in automation-aided decisions.
#[derive(Debug, Parser)]
#[command(name = "respcalc", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate one aided-detection scenario and print its report as JSON.
    Compute(ComputeArgs),
    /// Run a parameter sweep and emit CSV.
    Sweep(SweepArgs),
    /// Monte Carlo check of a scenario against the closed form.
    Simulate(SimulateArgs),
    /// Evaluate a general information-flow model file.
    Model(ModelArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum LoopModeArg {
    In,
    On,
}

impl From<LoopModeArg> for LoopMode {
    fn from(m: LoopModeArg) -> Self {
        match m {
            LoopModeArg::In => LoopMode::InTheLoop,
            LoopModeArg::On => LoopMode::OnTheLoop,
        }
    }
}

/// Scenario flags shared by every subcommand that builds a scenario.
#[derive(Debug, Clone, Args)]
pub struct ScenarioArgs {
    /// Prior probability that an entity is a target.
    #[arg(long = "pt", default_value_t = REFERENCE_P_T, allow_negative_numbers = true)]
    pub p_t: f64,
    /// Human payoff ratio (V_TN - V_FP) / (V_TP - V_FN).
    #[arg(long = "vratio-h", default_value_t = REFERENCE_V_RATIO, allow_negative_numbers = true)]
    pub v_ratio_human: f64,
    /// Automation payoff ratio.
    #[arg(long = "vratio-a", default_value_t = REFERENCE_V_RATIO, allow_negative_numbers = true)]
    pub v_ratio_automation: f64,
    /// Override the human's unaided criterion.
    #[arg(long = "beta-h", allow_negative_numbers = true)]
    pub beta_human: Option<f64>,
    /// Override the automation's criterion.
    #[arg(long = "beta-a", allow_negative_numbers = true)]
    pub beta_automation: Option<f64>,
    /// Echoed in the report; both modes compute the same thing.
    #[arg(long = "loop-mode", value_enum, default_value_t = LoopModeArg::In)]
    pub loop_mode: LoopModeArg,
}

impl ScenarioArgs {
    pub fn scenario(&self, d_human: f64, d_automation: f64) -> ScenarioParams {
        let mut p = ScenarioParams::new(self.p_t, d_human, d_automation)
            .with_v_ratios(self.v_ratio_human, self.v_ratio_automation)
            .with_loop_mode(self.loop_mode.into());
        if let Some(b) = self.beta_human {
            p = p.with_beta_human_base(b);
        }
        if let Some(b) = self.beta_automation {
            p = p.with_beta_automation(b);
        }
        p
    }
}

#[derive(Debug, Args)]
pub struct ComputeArgs {
    /// Human detection sensitivity d'.
    #[arg(long = "dh", allow_negative_numbers = true)]
    pub d_human: f64,
    /// Automation detection sensitivity d'.
    #[arg(long = "da", allow_negative_numbers = true)]
    pub d_automation: f64,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Verify table marginals and the entropy chain rule, and report the result.
    #[arg(long)]
    pub self_check: bool,
}

#[derive(Debug, Args)]
pub struct SweepArgs {
    /// Named sweep.
    #[arg(long, value_parser = parse_preset, conflicts_with = "axis", required_unless_present = "axis")]
    pub preset: Option<Preset>,
    /// `name=start:stop:step` or `name=v1,v2,...`; give once or twice.
    #[arg(long, value_parser = parse_axis)]
    pub axis: Vec<Axis>,
    /// Human d' for points whose axes leave it unset.
    #[arg(long = "dh", default_value_t = 2.0, allow_negative_numbers = true)]
    pub d_human: f64,
    /// Automation d' for points whose axes leave it unset.
    #[arg(long = "da", default_value_t = 2.0, allow_negative_numbers = true)]
    pub d_automation: f64,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
    /// Write the CSV here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[arg(long)]
    pub trials: u64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long = "dh", default_value_t = 2.0, allow_negative_numbers = true)]
    pub d_human: f64,
    #[arg(long = "da", default_value_t = 2.0, allow_negative_numbers = true)]
    pub d_automation: f64,
    #[command(flatten)]
    pub scenario: ScenarioArgs,
}

#[derive(Debug, Args)]
pub struct ModelArgs {
    /// JSON model file.
    #[arg(long)]
    pub file: PathBuf,
    /// Stop after validation.
    #[arg(long)]
    pub validate_only: bool,
}

fn parse_preset(s: &str) -> std::result::Result<Preset, String> {
    s.parse().map_err(|e: Error| e.to_string())
}

fn parse_axis(s: &str) -> std::result::Result<Axis, String> {
    axis_from_spec(s).map_err(|e| e.to_string())
}

/// Parses `name=start:stop:step` or `name=v1,v2,...`.
pub fn axis_from_spec(spec: &str) -> Result<Axis> {
    let (name, body) = spec
        .split_once('=')
        .ok_or_else(|| Error::InvalidGrid(format!("expected name=values, got '{spec}'")))?;
    let param: Param = name.trim().parse()?;
    let body = body.trim();
    if body.is_empty() {
        return Err(Error::InvalidGrid(format!("axis '{param}' has no values")));
    }
    let num = |t: &str| {
        t.trim()
            .parse::<f64>()
            .map_err(|_| Error::InvalidGrid(format!("axis '{param}': '{t}' is not a number")))
    };
    if body.contains(':') {
        let parts: Vec<&str> = body.split(':').collect();
        if parts.len() != 3 {
            return Err(Error::InvalidGrid(format!(
                "axis '{param}': range must be start:stop:step"
            )));
        }
        Axis::range(param, num(parts[0])?, num(parts[1])?, num(parts[2])?)
    } else {
        let values = body.split(',').map(num).collect::<Result<Vec<_>>>()?;
        Axis::values(param, values)
    }
}
