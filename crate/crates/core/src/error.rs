use thiserror::Error;

use crate::flowmodel::Diagnostic;
use crate::infotheory::Axis;
use crate::sdt::Branch;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("{name} must be {expected}, got {value}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        expected: &'static str,
    },

    #[error(
        "prior target probability {p_t} leaves no uncertainty; it must lie strictly inside (0, 1)"
    )]
    DegeneratePrior { p_t: f64 },

    #[error("cutoff is undefined for d' = 0 (every criterion maps to the same decision surface)")]
    SingularCutoff,

    #[error(
        "the {branch} branch is unreachable: the automation never produces that classification"
    )]
    UnreachableBranch { branch: Branch },

    #[error("target marginal on the {axis} axis has zero entropy; the uncertainty coefficient is undefined")]
    DegenerateTarget { axis: Axis },

    #[error(
        "human action has zero entropy (H(X) = {h_x}, H(Y) = {h_y}); responsibility is undefined"
    )]
    DegenerateAction { h_x: f64, h_y: f64 },

    #[error("output variable '{output}' has zero entropy; responsibility is undefined")]
    DegenerateOutput { output: String },

    #[error("all {trials} simulated trials fell into a single action category; the empirical ratio is undefined")]
    DegenerateSample { trials: u64 },

    #[error("model failed validation with {} diagnostic(s): {}", .0.len(), join_diagnostics(.0))]
    InvalidModel(Vec<Diagnostic>),

    #[error("joint state space has {atoms} atoms, above the enumeration limit of {limit}")]
    StateSpaceTooLarge { atoms: u128, limit: u128 },

    #[error("unknown variable '{0}'")]
    UnknownVariable(String),

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

impl Error {
    /// True for errors caused by a zero-entropy denominator.
    pub fn is_degenerate_entropy(&self) -> bool {
        matches!(
            self,
            Error::DegenerateTarget { .. }
                | Error::DegenerateAction { .. }
                | Error::DegenerateOutput { .. }
        )
    }
}

fn join_diagnostics(diags: &[Diagnostic]) -> String {
    diags
        .iter()
        .map(ToString::to_string)
        .collect::<Vec<_>>()
        .join("; ")
}

pub(crate) fn check_probability_open(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 && value < 1.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "in the open interval (0, 1)",
        })
    }
}

pub(crate) fn check_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            name,
            value,
            expected: "finite and > 0",
        })
    }
}
