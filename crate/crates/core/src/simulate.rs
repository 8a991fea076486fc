//! Seedable Monte Carlo cross-check of the aided-detection closed form.
//!
//! Each trial consumes exactly three uniforms from a ChaCha20 stream seeded
//! with `ChaCha20Rng::seed_from_u64(seed)`, in this order:
//!
//! 1. entity state: target iff `u < p_t`
//! 2. automation observation: `mean + Phi^-1(u)`, classified "target" iff it
//!    exceeds the automation cutoff
//! 3. human observation: `mean + Phi^-1(u)`, "engage" iff it exceeds the
//!    human's cutoff for the automation's call
//!
//! where `mean` is `+d'/2` for targets and `-d'/2` for noise. A uniform is
//! built from the top 53 bits of `next_u64` as `(k + 0.5) / 2^53`, so it
//! never hits 0 or 1.

use rand_chacha::ChaCha20Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::aided_decision::{
    automation_rates, dual_criteria, responsibility, ScenarioParams, X_LABELS, Y_LABELS,
};
use crate::error::{Error, Result};
use crate::infotheory::{entropy_bits, responsibility_ratio, JointPmf};
use crate::sdt::{cutoff_from_beta, quantile_unchecked};

pub const GENERATOR_ID: &str = "chacha20/rand_chacha-0.9/seed_from_u64";

/// Rows: automation call (target, noise). Columns: human action (engage, abort).
pub type Counts = [[u64; 2]; 2];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    pub trials: u64,
    pub seed: u64,
}

impl SimConfig {
    pub fn new(trials: u64, seed: u64) -> Result<Self> {
        if trials == 0 {
            return Err(Error::InvalidParameter {
                name: "trials",
                value: 0.0,
                expected: ">= 1",
            });
        }
        Ok(SimConfig { trials, seed })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimResult {
    pub config: SimConfig,
    pub generator: &'static str,
    pub counts: Counts,
    pub empirical_joint: JointPmf,
    pub analytic_joint: JointPmf,
    pub empirical_resp: f64,
    /// Plug-in ratio with Miller-Madow corrected entropies, for comparison.
    pub empirical_resp_miller_madow: f64,
    pub analytic_resp: f64,
    pub max_cell_abs_error: f64,
}

#[derive(Serialize)]
struct Row<T> {
    engage: T,
    abort: T,
}

#[derive(Serialize)]
struct Table<T> {
    target: Row<T>,
    noise: Row<T>,
}

impl<T: Copy> Table<T> {
    fn from_fn(f: impl Fn(usize, usize) -> T) -> Self {
        let row = |y| Row {
            engage: f(y, 0),
            abort: f(y, 1),
        };
        Table {
            target: row(0),
            noise: row(1),
        }
    }
}

#[derive(Serialize)]
struct SimResultView<'a> {
    trials: u64,
    seed: u64,
    generator: &'a str,
    counts: Table<u64>,
    empirical_joint: Table<f64>,
    analytic_joint: Table<f64>,
    empirical_resp: f64,
    empirical_resp_miller_madow: f64,
    analytic_resp: f64,
    max_cell_abs_error: f64,
}

impl Serialize for SimResult {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        SimResultView {
            trials: self.config.trials,
            seed: self.config.seed,
            generator: self.generator,
            counts: Table::from_fn(|y, x| self.counts[y][x]),
            empirical_joint: Table::from_fn(|y, x| self.empirical_joint.cell(y, x)),
            analytic_joint: Table::from_fn(|y, x| self.analytic_joint.cell(y, x)),
            empirical_resp: self.empirical_resp,
            empirical_resp_miller_madow: self.empirical_resp_miller_madow,
            analytic_resp: self.analytic_resp,
            max_cell_abs_error: self.max_cell_abs_error,
        }
        .serialize(s)
    }
}

fn open_uniform(rng: &mut ChaCha20Rng) -> f64 {
    const SCALE: f64 = 1.0 / (1u64 << 53) as f64;
    ((rng.next_u64() >> 11) as f64 + 0.5) * SCALE
}

/// Tallies (automation call, human action) over `cfg.trials` sampled trials.
pub fn sample_counts(params: &ScenarioParams, cfg: &SimConfig) -> Result<Counts> {
    let auto = automation_rates(params)?;
    let c_auto = cutoff_from_beta(params.d_automation, params.beta_automation()?)?;
    let dual = dual_criteria(params, &auto)?;
    let half_a = 0.5 * params.d_automation;
    let half_h = 0.5 * params.d_human;

    let mut rng = ChaCha20Rng::seed_from_u64(cfg.seed);
    let mut counts: Counts = [[0; 2]; 2];
    for _ in 0..cfg.trials {
        let target = open_uniform(&mut rng) < params.p_t;
        let sign = if target { 1.0 } else { -1.0 };
        let obs_a = sign * half_a + quantile_unchecked(open_uniform(&mut rng));
        let alarm = obs_a > c_auto;
        let obs_h = sign * half_h + quantile_unchecked(open_uniform(&mut rng));
        let c_human = if alarm {
            dual.c_given_alarm
        } else {
            dual.c_given_noise
        };
        let engage = obs_h > c_human;
        counts[usize::from(!alarm)][usize::from(!engage)] += 1;
    }
    Ok(counts)
}

fn total(counts: &Counts) -> u64 {
    counts.iter().flatten().sum()
}

fn empirical_joint(counts: &Counts) -> Result<JointPmf> {
    let n = total(counts);
    if n == 0 {
        return Err(Error::InvalidParameter {
            name: "trials",
            value: 0.0,
            expected: ">= 1",
        });
    }
    let n = n as f64;
    let cells = counts
        .iter()
        .map(|r| r.iter().map(|&c| c as f64 / n).collect())
        .collect();
    JointPmf::new(Y_LABELS.to_vec(), X_LABELS.to_vec(), cells)
}

fn check_two_actions(counts: &Counts) -> Result<()> {
    let engage = counts[0][0] + counts[1][0];
    let abort = counts[0][1] + counts[1][1];
    if engage == 0 || abort == 0 {
        return Err(Error::DegenerateSample {
            trials: total(counts),
        });
    }
    Ok(())
}

/// Plug-in estimate of H(X|Y)/H(X) from a count table.
pub fn empirical_responsibility(counts: &Counts) -> Result<f64> {
    let joint = empirical_joint(counts)?;
    check_two_actions(counts)?;
    responsibility_ratio(&joint)
}

/// Same ratio with each entropy raised by the Miller-Madow term
/// `(k - 1) / (2 N ln 2)`, `k` the number of occupied cells.
pub fn miller_madow_responsibility(counts: &Counts) -> Result<f64> {
    let joint = empirical_joint(counts)?;
    check_two_actions(counts)?;
    let n = total(counts) as f64;
    let corrected = |probs: &[f64]| {
        let k = probs.iter().filter(|p| **p > 0.0).count() as f64;
        entropy_bits(probs) + (k - 1.0) / (2.0 * n * std::f64::consts::LN_2)
    };
    let cells: Vec<f64> = joint.cells().iter().flatten().copied().collect();
    let h_xy = corrected(&cells);
    let h_y = corrected(joint.row_marginal().probs());
    let h_x = corrected(joint.col_marginal().probs());
    Ok(((h_xy - h_y) / h_x).clamp(0.0, 1.0))
}

/// Runs the simulation and compares it with the closed form.
pub fn simulate_aws(params: &ScenarioParams, cfg: &SimConfig) -> Result<SimResult> {
    SimConfig::new(cfg.trials, cfg.seed)?;
    let analytic = responsibility(params)?;
    let counts = sample_counts(params, cfg)?;
    let joint = empirical_joint(&counts)?;
    let empirical_resp = empirical_responsibility(&counts)?;
    let analytic_joint = analytic.tables.joint_xy.clone();
    let max_cell_abs_error = joint
        .cells()
        .iter()
        .flatten()
        .zip(analytic_joint.cells().iter().flatten())
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok(SimResult {
        config: *cfg,
        generator: GENERATOR_ID,
        counts,
        empirical_resp_miller_madow: miller_madow_responsibility(&counts)?,
        empirical_joint: joint,
        analytic_joint,
        empirical_resp,
        analytic_resp: analytic.resp,
        max_cell_abs_error,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empirical_examples() {
        assert_eq!(
            empirical_responsibility(&[[250, 250], [250, 250]]).unwrap(),
            1.0
        );
        assert_eq!(
            empirical_responsibility(&[[500, 0], [0, 500]]).unwrap(),
            0.0
        );
    }

    #[test]
    fn one_sided_sample_is_degenerate() {
        assert_eq!(
            empirical_responsibility(&[[10, 0], [5, 0]]),
            Err(Error::DegenerateSample { trials: 15 })
        );
        assert!(empirical_responsibility(&[[0, 0], [0, 0]]).is_err());
    }

    #[test]
    fn miller_madow_stays_close_to_plug_in() {
        let c = [[300, 20], [15, 665]];
        let plain = empirical_responsibility(&c).unwrap();
        let mm = miller_madow_responsibility(&c).unwrap();
        assert!((plain - mm).abs() < 0.01);
    }

    #[test]
    fn zero_trials_rejected() {
        assert!(SimConfig::new(0, 1).is_err());
        let p = ScenarioParams::reference(2.0, 2.0);
        let cfg = SimConfig { trials: 0, seed: 1 };
        assert!(simulate_aws(&p, &cfg).is_err());
    }

    #[test]
    fn same_seed_same_counts() {
        let p = ScenarioParams::reference(2.0, 2.0);
        let cfg = SimConfig::new(20_000, 7).unwrap();
        let a = sample_counts(&p, &cfg).unwrap();
        let b = sample_counts(&p, &cfg).unwrap();
        assert_eq!(a, b);
        assert_eq!(total(&a), 20_000);
        let c = sample_counts(&p, &SimConfig::new(20_000, 8).unwrap()).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn uniforms_stay_open() {
        let mut rng = ChaCha20Rng::seed_from_u64(0);
        for _ in 0..10_000 {
            let u = open_uniform(&mut rng);
            assert!(u > 0.0 && u < 1.0);
        }
    }
}
