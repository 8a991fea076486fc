//! Closed-form responsibility for an aided binary detection task.
//!
//! An automated module (sensitivity `d_automation`, criterion `beta_A`)
//! classifies each entity as target or noise. The human observes the entity
//! independently (sensitivity `d_human`), knows the module's rates, and
//! applies one of two expected-value-optimal criteria depending on the
//! module's call. The human's engage/abort choice X is the system output, so
//! `Resp = H(X | Y) / H(X)` with Y the module's classification.

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_probability_open, Error, Result};
use crate::infotheory::{
    conditional_entropy, entropy, joint_entropy, responsibility_ratio, Axis, JointPmf, Pmf,
};
use crate::sdt::{
    cutoff_from_beta, cutoff_from_log_beta, optimal_beta, outcome_rates,
    posterior_target_given_alarm, Branch, OutcomeRates, D_PRIME_MAX,
};

pub const REFERENCE_P_T: f64 = 0.2;
pub const REFERENCE_V_RATIO: f64 = 2.0 / 3.0;

/// Labels of the module classification Y, in table row order.
pub const Y_LABELS: [&str; 2] = ["target", "noise"];
/// Labels of the human action X, in table column order.
pub const X_LABELS: [&str; 2] = ["engage", "abort"];

/// Human-in-the-loop (active authorisation) or on-the-loop (passive veto).
/// Both produce the same engage/abort decision problem, so the mode is
/// recorded for reporting only.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub enum LoopMode {
    #[default]
    #[serde(rename = "in")]
    InTheLoop,
    #[serde(rename = "on")]
    OnTheLoop,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScenarioParams {
    pub p_t: f64,
    pub d_human: f64,
    pub d_automation: f64,
    pub v_ratio_automation: f64,
    pub v_ratio_human: f64,
    #[serde(default)]
    pub beta_automation_override: Option<f64>,
    /// The human's *unaided* optimal criterion. When set it replaces
    /// `v_ratio_human` by the payoff ratio that would produce it.
    #[serde(default)]
    pub beta_human_base_override: Option<f64>,
    #[serde(default)]
    pub loop_mode: LoopMode,
}

impl ScenarioParams {
    /// Scenario with both payoff ratios at the reference 2/3.
    pub fn new(p_t: f64, d_human: f64, d_automation: f64) -> Self {
        ScenarioParams {
            p_t,
            d_human,
            d_automation,
            v_ratio_automation: REFERENCE_V_RATIO,
            v_ratio_human: REFERENCE_V_RATIO,
            beta_automation_override: None,
            beta_human_base_override: None,
            loop_mode: LoopMode::default(),
        }
    }

    /// `p_t = 0.2`, both payoff ratios 2/3.
    pub fn reference(d_human: f64, d_automation: f64) -> Self {
        ScenarioParams::new(REFERENCE_P_T, d_human, d_automation)
    }

    pub fn with_v_ratios(mut self, human: f64, automation: f64) -> Self {
        self.v_ratio_human = human;
        self.v_ratio_automation = automation;
        self
    }

    pub fn with_beta_automation(mut self, beta: f64) -> Self {
        self.beta_automation_override = Some(beta);
        self
    }

    pub fn with_beta_human_base(mut self, beta: f64) -> Self {
        self.beta_human_base_override = Some(beta);
        self
    }

    pub fn with_loop_mode(mut self, mode: LoopMode) -> Self {
        self.loop_mode = mode;
        self
    }

    /// Sensitivity ratio `R = d_automation / d_human`.
    pub fn sensitivity_ratio(&self) -> f64 {
        self.d_automation / self.d_human
    }

    pub fn validate(&self) -> Result<()> {
        check_probability_open("p_t", self.p_t)?;
        check_sensitivity("d_human", self.d_human)?;
        check_sensitivity("d_automation", self.d_automation)?;
        check_positive("v_ratio_automation", self.v_ratio_automation)?;
        check_positive("v_ratio_human", self.v_ratio_human)?;
        if let Some(b) = self.beta_automation_override {
            check_positive("beta_automation", b)?;
        }
        if let Some(b) = self.beta_human_base_override {
            check_positive("beta_human_base", b)?;
        }
        Ok(())
    }

    /// The module's criterion: the override, else the optimal one.
    pub fn beta_automation(&self) -> Result<f64> {
        match self.beta_automation_override {
            Some(b) => check_positive("beta_automation", b),
            None => optimal_beta(self.p_t, self.v_ratio_automation),
        }
    }

    /// The human's payoff ratio, re-derived from `beta_human_base_override`
    /// when present (`beta * p_t / (1 - p_t)`).
    pub fn effective_v_ratio_human(&self) -> f64 {
        match self.beta_human_base_override {
            Some(b) => b * self.p_t / (1.0 - self.p_t),
            None => self.v_ratio_human,
        }
    }

    /// The human's criterion without automation support.
    pub fn beta_human_base(&self) -> Result<f64> {
        optimal_beta(self.p_t, self.effective_v_ratio_human())
    }
}

fn check_sensitivity(name: &'static str, d: f64) -> Result<f64> {
    if d.is_finite() && d > 0.0 && d <= D_PRIME_MAX {
        Ok(d)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: d,
            expected: "in (0, 50]",
        })
    }
}

/// The human's two criteria, one per automation classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DualCriteria {
    pub beta_given_alarm: f64,
    pub beta_given_noise: f64,
    pub c_given_alarm: f64,
    pub c_given_noise: f64,
}

impl DualCriteria {
    /// Criteria from explicit cutoffs; `±inf` encodes always/never engage.
    pub fn from_cutoffs(d_human: f64, c_given_alarm: f64, c_given_noise: f64) -> Result<Self> {
        check_sensitivity("d_human", d_human)?;
        for (name, c) in [
            ("c_given_alarm", c_given_alarm),
            ("c_given_noise", c_given_noise),
        ] {
            if c.is_nan() {
                return Err(Error::InvalidParameter {
                    name,
                    value: c,
                    expected: "a number",
                });
            }
        }
        Ok(DualCriteria {
            beta_given_alarm: (d_human * c_given_alarm).exp(),
            beta_given_noise: (d_human * c_given_noise).exp(),
            c_given_alarm,
            c_given_noise,
        })
    }

    /// Criteria from explicit likelihood ratios.
    pub fn from_betas(d_human: f64, beta_given_alarm: f64, beta_given_noise: f64) -> Result<Self> {
        Ok(DualCriteria {
            beta_given_alarm,
            beta_given_noise,
            c_given_alarm: cutoff_from_beta(d_human, beta_given_alarm)?,
            c_given_noise: cutoff_from_beta(d_human, beta_given_noise)?,
        })
    }

    pub fn cutoff(&self, branch: Branch) -> f64 {
        match branch {
            Branch::Target => self.c_given_alarm,
            Branch::Noise => self.c_given_noise,
        }
    }
}

/// Human outcome rates conditional on each automation classification.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BranchRates {
    pub given_alarm: OutcomeRates,
    pub given_noise: OutcomeRates,
}

impl BranchRates {
    pub fn get(&self, branch: Branch) -> &OutcomeRates {
        match branch {
            Branch::Target => &self.given_alarm,
            Branch::Noise => &self.given_noise,
        }
    }
}

/// Distribution of Y, joint of (Y, X) and distribution of X.
#[derive(Debug, Clone, PartialEq)]
pub struct AidedTables {
    pub dist_y: Pmf,
    /// Rows: Y in [`Y_LABELS`] order. Columns: X in [`X_LABELS`] order.
    pub joint_xy: JointPmf,
    pub dist_x: Pmf,
}

impl AidedTables {
    pub fn p_y(&self, branch: Branch) -> f64 {
        self.dist_y.probs()[branch_index(branch)]
    }

    pub fn p_engage(&self) -> f64 {
        self.dist_x.probs()[0]
    }

    pub fn cell(&self, branch: Branch, engage: bool) -> f64 {
        self.joint_xy
            .cell(branch_index(branch), if engage { 0 } else { 1 })
    }
}

fn branch_index(b: Branch) -> usize {
    match b {
        Branch::Target => 0,
        Branch::Noise => 1,
    }
}

#[derive(Serialize)]
struct YView {
    target: f64,
    noise: f64,
}

#[derive(Serialize)]
struct XView {
    engage: f64,
    abort: f64,
}

#[derive(Serialize)]
struct JointView {
    target: XView,
    noise: XView,
}

#[derive(Serialize)]
struct TablesView {
    dist_y: YView,
    joint_xy: JointView,
    dist_x: XView,
}

impl Serialize for AidedTables {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let x_row = |b| XView {
            engage: self.cell(b, true),
            abort: self.cell(b, false),
        };
        TablesView {
            dist_y: YView {
                target: self.p_y(Branch::Target),
                noise: self.p_y(Branch::Noise),
            },
            joint_xy: JointView {
                target: x_row(Branch::Target),
                noise: x_row(Branch::Noise),
            },
            dist_x: XView {
                engage: self.dist_x.probs()[0],
                abort: self.dist_x.probs()[1],
            },
        }
        .serialize(s)
    }
}

/// A detector's criterion, cutoff and resulting rates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DetectorSummary {
    pub d_prime: f64,
    pub beta: f64,
    pub cutoff: f64,
    pub p_tp: f64,
    pub p_fn: f64,
    pub p_fp: f64,
    pub p_tn: f64,
}

impl DetectorSummary {
    fn new(d_prime: f64, beta: f64, cutoff: f64, r: &OutcomeRates) -> Self {
        DetectorSummary {
            d_prime,
            beta,
            cutoff,
            p_tp: r.p_tp,
            p_fn: r.p_fn,
            p_fp: r.p_fp,
            p_tn: r.p_tn,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct HumanSummary {
    pub given_alarm: DetectorSummary,
    pub given_noise: DetectorSummary,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ResponsibilityReport {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub resp: f64,
    pub params: ScenarioParams,
    pub tables: AidedTables,
    pub automation: DetectorSummary,
    pub human: HumanSummary,
}

/// The module's outcome rates at its effective criterion.
pub fn automation_rates(params: &ScenarioParams) -> Result<OutcomeRates> {
    params.validate()?;
    let beta = params.beta_automation()?;
    outcome_rates(
        params.d_automation,
        cutoff_from_beta(params.d_automation, beta)?,
    )
}

/// ln of the optimal criterion `((1 - P) / P) * v` for the posterior `P` of a
/// branch, evaluated from the unnormalised branch weights so that a
/// posterior of exactly 0 or 1 maps to `±inf` rather than NaN.
fn branch_log_beta(
    p_t: f64,
    given_target: f64,
    given_noise: f64,
    v_ratio: f64,
    branch: Branch,
) -> Result<f64> {
    let t = p_t * given_target;
    let n = (1.0 - p_t) * given_noise;
    if t + n <= 0.0 {
        return Err(Error::UnreachableBranch { branch });
    }
    Ok(n.ln() - t.ln() + v_ratio.ln())
}

/// The human's posterior-updated criteria, given the automation rates the
/// human believes in (normally the true ones from [`automation_rates`]).
pub fn dual_criteria(params: &ScenarioParams, auto: &OutcomeRates) -> Result<DualCriteria> {
    params.validate()?;
    let v = params.effective_v_ratio_human();
    check_positive("v_ratio_human", v)?;
    let ln_alarm = branch_log_beta(params.p_t, auto.p_tp, auto.p_fp, v, Branch::Target)?;
    let ln_noise = branch_log_beta(params.p_t, auto.p_fn, auto.p_tn, v, Branch::Noise)?;
    Ok(DualCriteria {
        beta_given_alarm: ln_alarm.exp(),
        beta_given_noise: ln_noise.exp(),
        c_given_alarm: cutoff_from_log_beta(params.d_human, ln_alarm)?,
        c_given_noise: cutoff_from_log_beta(params.d_human, ln_noise)?,
    })
}

/// Human outcome rates under each branch cutoff. The human's observation is
/// independent of the module's given the true state.
pub fn human_conditional_rates(
    params: &ScenarioParams,
    dual: &DualCriteria,
) -> Result<BranchRates> {
    check_sensitivity("d_human", params.d_human)?;
    Ok(BranchRates {
        given_alarm: outcome_rates(params.d_human, dual.c_given_alarm)?,
        given_noise: outcome_rates(params.d_human, dual.c_given_noise)?,
    })
}

/// Assembles the Y, (Y, X) and X tables from the prior and both detectors'
/// rates.
pub fn tables_from_rates(
    p_t: f64,
    auto: &OutcomeRates,
    human: &BranchRates,
) -> Result<AidedTables> {
    if !(0.0..=1.0).contains(&p_t) {
        return Err(Error::InvalidParameter {
            name: "p_t",
            value: p_t,
            expected: "in [0, 1]",
        });
    }
    let q_t = 1.0 - p_t;
    let dist_y = [
        p_t * auto.p_tp + q_t * auto.p_fp,
        p_t * auto.p_fn + q_t * auto.p_tn,
    ];
    // Each cell sums over the true state: P(state) P(Y | state) P(X | state, Y).
    let row = |y_given_t: f64, y_given_n: f64, h: &OutcomeRates| {
        vec![
            p_t * y_given_t * h.p_tp + q_t * y_given_n * h.p_fp,
            p_t * y_given_t * h.p_fn + q_t * y_given_n * h.p_tn,
        ]
    };
    let cells = vec![
        row(auto.p_tp, auto.p_fp, &human.given_alarm),
        row(auto.p_fn, auto.p_tn, &human.given_noise),
    ];
    let dist_x = vec![cells[0][0] + cells[1][0], cells[0][1] + cells[1][1]];
    Ok(AidedTables {
        dist_y: Pmf::new(Y_LABELS.to_vec(), dist_y.to_vec())?,
        joint_xy: JointPmf::new(Y_LABELS.to_vec(), X_LABELS.to_vec(), cells)?,
        dist_x: Pmf::new(X_LABELS.to_vec(), dist_x)?,
    })
}

/// Tables for a scenario with the human's optimal dual criteria.
pub fn build_tables(params: &ScenarioParams) -> Result<AidedTables> {
    let auto = automation_rates(params)?;
    let dual = dual_criteria(params, &auto)?;
    let human = human_conditional_rates(params, &dual)?;
    tables_from_rates(params.p_t, &auto, &human)
}

/// Probability that the human engages an entity the module flagged as a
/// target.
pub fn engagement_probability_given_alarm(params: &ScenarioParams) -> Result<f64> {
    let auto = automation_rates(params)?;
    let dual = dual_criteria(params, &auto)?;
    engagement_given_alarm_with(params, &auto, &dual)
}

/// As [`engagement_probability_given_alarm`] with explicit human criteria.
pub fn engagement_given_alarm_with(
    params: &ScenarioParams,
    auto: &OutcomeRates,
    dual: &DualCriteria,
) -> Result<f64> {
    let post = posterior_target_given_alarm(params.p_t, auto)?;
    let h = human_conditional_rates(params, dual)?.given_alarm;
    Ok(post * h.p_tp + (1.0 - post) * h.p_fp)
}

/// Responsibility with the human's optimal dual criteria.
pub fn responsibility(params: &ScenarioParams) -> Result<ResponsibilityReport> {
    let auto = automation_rates(params)?;
    let dual = dual_criteria(params, &auto)?;
    report_with(params, &auto, &dual)
}

/// Responsibility with explicit human criteria (for instance a human who
/// ignores or rubber-stamps the module).
pub fn responsibility_with_criteria(
    params: &ScenarioParams,
    dual: &DualCriteria,
) -> Result<ResponsibilityReport> {
    let auto = automation_rates(params)?;
    report_with(params, &auto, dual)
}

fn report_with(
    params: &ScenarioParams,
    auto: &OutcomeRates,
    dual: &DualCriteria,
) -> Result<ResponsibilityReport> {
    let human = human_conditional_rates(params, dual)?;
    let tables = tables_from_rates(params.p_t, auto, &human)?;
    let resp = responsibility_ratio(&tables.joint_xy)?;
    let beta_a = params.beta_automation()?;
    Ok(ResponsibilityReport {
        h_x: entropy(&tables.dist_x),
        h_y: entropy(&tables.dist_y),
        h_xy: joint_entropy(&tables.joint_xy),
        h_x_given_y: conditional_entropy(&tables.joint_xy, Axis::Row),
        resp,
        params: *params,
        automation: DetectorSummary::new(
            params.d_automation,
            beta_a,
            cutoff_from_beta(params.d_automation, beta_a)?,
            auto,
        ),
        human: HumanSummary {
            given_alarm: DetectorSummary::new(
                params.d_human,
                dual.beta_given_alarm,
                dual.c_given_alarm,
                &human.given_alarm,
            ),
            given_noise: DetectorSummary::new(
                params.d_human,
                dual.beta_given_noise,
                dual.c_given_noise,
                &human.given_noise,
            ),
        },
        tables,
    })
}
