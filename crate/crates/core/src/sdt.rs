//! Equal-variance Gaussian signal detection.
//!
//! Noise observations are `N(-d'/2, 1)` and target observations `N(+d'/2, 1)`.
//! A detector with likelihood-ratio criterion `beta` calls "target" whenever
//! the observation exceeds the cutoff `c = ln(beta) / d'`.

use std::f64::consts::SQRT_2;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{check_positive, check_probability_open, Error, Result};

/// Largest accepted sensitivity. Beyond this the tail probabilities are below
/// double precision and limits have to be argued analytically.
pub const D_PRIME_MAX: f64 = 50.0;

/// Automation classification that selects the human's criterion.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Branch {
    /// The automation classified the entity as a target (alarm).
    Target,
    /// The automation classified the entity as noise (no alarm).
    Noise,
}

impl fmt::Display for Branch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Branch::Target => f.write_str("automation-target"),
            Branch::Noise => f.write_str("automation-noise"),
        }
    }
}

/// A detector's sensitivity and likelihood-ratio criterion.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SdtSensor {
    pub d_prime: f64,
    pub beta: f64,
}

impl SdtSensor {
    pub fn new(d_prime: f64, beta: f64) -> Result<Self> {
        check_d_prime("d_prime", d_prime)?;
        check_positive("beta", beta)?;
        Ok(SdtSensor { d_prime, beta })
    }

    pub fn cutoff(&self) -> Result<f64> {
        cutoff_from_beta(self.d_prime, self.beta)
    }

    pub fn rates(&self) -> Result<OutcomeRates> {
        outcome_rates(self.d_prime, self.cutoff()?)
    }
}

/// Outcome values of a binary engage/abort decision.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Payoffs {
    pub v_tp: f64,
    pub v_fn: f64,
    pub v_fp: f64,
    pub v_tn: f64,
}

impl Payoffs {
    pub fn new(v_tp: f64, v_fn: f64, v_fp: f64, v_tn: f64) -> Result<Self> {
        for (name, v) in [
            ("v_tp", v_tp),
            ("v_fn", v_fn),
            ("v_fp", v_fp),
            ("v_tn", v_tn),
        ] {
            if !v.is_finite() {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    expected: "finite",
                });
            }
        }
        if v_tp <= v_fn {
            return Err(Error::InvalidParameter {
                name: "v_tp - v_fn",
                value: v_tp - v_fn,
                expected: "> 0 (a hit must be worth more than a miss)",
            });
        }
        if v_tn <= v_fp {
            return Err(Error::InvalidParameter {
                name: "v_tn - v_fp",
                value: v_tn - v_fp,
                expected: "> 0 (a correct rejection must be worth more than a false alarm)",
            });
        }
        Ok(Payoffs {
            v_tp,
            v_fn,
            v_fp,
            v_tn,
        })
    }

    /// `(v_tn - v_fp) / (v_tp - v_fn)`.
    pub fn v_ratio(&self) -> f64 {
        (self.v_tn - self.v_fp) / (self.v_tp - self.v_fn)
    }
}

/// Validates the payoffs and returns their cost-benefit ratio.
pub fn v_ratio(p: &Payoffs) -> Result<f64> {
    let p = Payoffs::new(p.v_tp, p.v_fn, p.v_fp, p.v_tn)?;
    Ok(p.v_ratio())
}

/// Conditional outcome probabilities: `p_tp`, `p_fn` given a target and
/// `p_fp`, `p_tn` given noise.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OutcomeRates {
    pub p_tp: f64,
    pub p_fn: f64,
    pub p_fp: f64,
    pub p_tn: f64,
}

impl OutcomeRates {
    /// Rates from hit and false-alarm probabilities; complements fill the rest.
    pub fn from_hits(p_tp: f64, p_fp: f64) -> Result<Self> {
        for (name, v) in [("p_tp", p_tp), ("p_fp", p_fp)] {
            if !(0.0..=1.0).contains(&v) {
                return Err(Error::InvalidParameter {
                    name,
                    value: v,
                    expected: "in [0, 1]",
                });
            }
        }
        Ok(OutcomeRates {
            p_tp,
            p_fn: 1.0 - p_tp,
            p_fp,
            p_tn: 1.0 - p_fp,
        })
    }

    /// Probability of a "target" call, given the true state.
    pub fn positive_rate(&self, target: bool) -> f64 {
        if target {
            self.p_tp
        } else {
            self.p_fp
        }
    }

    /// Probability of a "noise" call, given the true state.
    pub fn negative_rate(&self, target: bool) -> f64 {
        if target {
            self.p_fn
        } else {
            self.p_tn
        }
    }
}

fn check_d_prime(name: &'static str, d: f64) -> Result<f64> {
    if d.is_finite() && (0.0..=D_PRIME_MAX).contains(&d) {
        Ok(d)
    } else {
        Err(Error::InvalidParameter {
            name,
            value: d,
            expected: "in [0, 50]",
        })
    }
}

/// Standard normal CDF for any non-NaN input, infinities included.
pub(crate) fn phi(x: f64) -> f64 {
    if x == f64::INFINITY {
        1.0
    } else if x == f64::NEG_INFINITY {
        0.0
    } else {
        0.5 * libm::erfc(-x / SQRT_2)
    }
}

/// Standard normal CDF via the complementary error function, accurate in
/// both tails.
pub fn std_normal_cdf(x: f64) -> Result<f64> {
    if !x.is_finite() {
        return Err(Error::InvalidParameter {
            name: "x",
            value: x,
            expected: "finite",
        });
    }
    Ok(phi(x))
}

/// Standard normal quantile for `p` in the open interval (0, 1).
pub fn std_normal_quantile(p: f64) -> Result<f64> {
    check_probability_open("p", p)?;
    Ok(quantile_unchecked(p))
}

/// Acklam's rational approximation polished by one Halley step against `phi`.
/// The upper half is mirrored so `1 - p` stays exact.
pub(crate) fn quantile_unchecked(p: f64) -> f64 {
    if p > 0.5 {
        return -quantile_lower(1.0 - p);
    }
    quantile_lower(p)
}

fn quantile_lower(p: f64) -> f64 {
    if p <= 0.0 {
        return f64::NEG_INFINITY;
    }
    const A: [f64; 6] = [
        -3.969683028665376e1,
        2.209460984245205e2,
        -2.759285104469687e2,
        1.38357751867269e2,
        -3.066479806614716e1,
        2.506628277459239,
    ];
    const B: [f64; 5] = [
        -5.447609879822406e1,
        1.615858368580409e2,
        -1.556989798598866e2,
        6.680131188771972e1,
        -1.328068155288572e1,
    ];
    const C: [f64; 6] = [
        -7.784894002430293e-3,
        -3.223964580411365e-1,
        -2.400758277161838,
        -2.549732539343734,
        4.374664141464968,
        2.938163982698783,
    ];
    const D: [f64; 4] = [
        7.784695709041462e-3,
        3.224671290700398e-1,
        2.445134137142996,
        3.754408661907416,
    ];
    let x = if p < 0.02425 {
        let q = (-2.0 * p.ln()).sqrt();
        (((((C[0] * q + C[1]) * q + C[2]) * q + C[3]) * q + C[4]) * q + C[5])
            / ((((D[0] * q + D[1]) * q + D[2]) * q + D[3]) * q + 1.0)
    } else {
        let q = p - 0.5;
        let r = q * q;
        (((((A[0] * r + A[1]) * r + A[2]) * r + A[3]) * r + A[4]) * r + A[5]) * q
            / (((((B[0] * r + B[1]) * r + B[2]) * r + B[3]) * r + B[4]) * r + 1.0)
    };
    let e = phi(x) - p;
    let u = e * (2.0 * std::f64::consts::PI).sqrt() * (0.5 * x * x).exp();
    x - u / (1.0 + 0.5 * x * u)
}

/// Observation-scale cutoff `ln(beta) / d'`.
pub fn cutoff_from_beta(d_prime: f64, beta: f64) -> Result<f64> {
    check_d_prime("d_prime", d_prime)?;
    check_positive("beta", beta)?;
    if d_prime == 0.0 {
        return Err(Error::SingularCutoff);
    }
    Ok(beta.ln() / d_prime)
}

/// Cutoff from a criterion already in log space; tolerates `±inf`
/// (always / never respond "target").
pub(crate) fn cutoff_from_log_beta(d_prime: f64, log_beta: f64) -> Result<f64> {
    check_d_prime("d_prime", d_prime)?;
    if log_beta.is_nan() {
        return Err(Error::InvalidParameter {
            name: "ln(beta)",
            value: log_beta,
            expected: "a number",
        });
    }
    if d_prime == 0.0 {
        return Err(Error::SingularCutoff);
    }
    Ok(log_beta / d_prime)
}

/// Likelihood ratio `f_t(c) / f_n(c) = exp(d' c)` at a cutoff.
pub fn likelihood_ratio_at(d_prime: f64, cutoff: f64) -> f64 {
    (d_prime * cutoff).exp()
}

/// Outcome rates of a detector with sensitivity `d_prime` and cutoff `c`.
///
/// An infinite cutoff is accepted and yields the always-respond (`-inf`) or
/// never-respond (`+inf`) detector.
pub fn outcome_rates(d_prime: f64, cutoff: f64) -> Result<OutcomeRates> {
    check_d_prime("d_prime", d_prime)?;
    if cutoff.is_nan() {
        return Err(Error::InvalidParameter {
            name: "cutoff",
            value: cutoff,
            expected: "a number",
        });
    }
    let half = 0.5 * d_prime;
    // Each tail is evaluated directly rather than as a complement so that
    // small probabilities keep full relative precision.
    Ok(OutcomeRates {
        p_tp: phi(half - cutoff),
        p_fn: phi(cutoff - half),
        p_fp: phi(-half - cutoff),
        p_tn: phi(cutoff + half),
    })
}

/// Expected-value maximising criterion `((1 - p_t) / p_t) * v_ratio`.
pub fn optimal_beta(p_t: f64, v_ratio: f64) -> Result<f64> {
    if !(p_t > 0.0 && p_t < 1.0) {
        return Err(Error::DegeneratePrior { p_t });
    }
    check_positive("v_ratio", v_ratio)?;
    Ok((1.0 - p_t) / p_t * v_ratio)
}

/// Posterior probability of a target after the detector called "target".
pub fn posterior_target_given_alarm(p_t: f64, rates: &OutcomeRates) -> Result<f64> {
    posterior(p_t, rates.p_tp, rates.p_fp, Branch::Target)
}

/// Posterior probability of a target after the detector called "noise".
pub fn posterior_target_given_noise(p_t: f64, rates: &OutcomeRates) -> Result<f64> {
    posterior(p_t, rates.p_fn, rates.p_tn, Branch::Noise)
}

fn posterior(p_t: f64, given_target: f64, given_noise: f64, branch: Branch) -> Result<f64> {
    if !(0.0..=1.0).contains(&p_t) {
        return Err(Error::InvalidParameter {
            name: "p_t",
            value: p_t,
            expected: "in [0, 1]",
        });
    }
    let num = p_t * given_target;
    let den = num + (1.0 - p_t) * given_noise;
    if den <= 0.0 {
        return Err(Error::UnreachableBranch { branch });
    }
    Ok(num / den)
}

/// Upper bound on the sensitivity of two independent detectors combined
/// optimally with continuous evidence, `sqrt(d_h^2 + d_a^2)`.
pub fn d_effective_max(d_human: f64, d_automation: f64) -> f64 {
    debug_assert!(d_human >= 0.0 && d_automation >= 0.0);
    d_human.hypot(d_automation)
}
