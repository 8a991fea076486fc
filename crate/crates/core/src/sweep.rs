//! Parameter sweeps over the aided-detection scenario, with CSV output.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::aided_decision::{responsibility, ScenarioParams};
use crate::error::{Error, Result};
use crate::numfmt::{sig12, snap12};

/// Sensitivity range used by the reference grids.
pub const D_PRIME_LOW: f64 = 0.6;
pub const D_PRIME_HIGH: f64 = 3.0;
pub const D_PRIME_STEP: f64 = 0.15;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Param {
    PT,
    DHuman,
    DAutomation,
    VRatioHuman,
    VRatioAutomation,
    /// Sets both payoff ratios.
    VRatio,
    BetaAutomation,
    BetaHumanBase,
    /// `beta_human_base = value * beta_automation`.
    BetaRatio,
}

impl Param {
    pub const ALL: [Param; 9] = [
        Param::PT,
        Param::DHuman,
        Param::DAutomation,
        Param::VRatioHuman,
        Param::VRatioAutomation,
        Param::VRatio,
        Param::BetaAutomation,
        Param::BetaHumanBase,
        Param::BetaRatio,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Param::PT => "p_t",
            Param::DHuman => "d_human",
            Param::DAutomation => "d_automation",
            Param::VRatioHuman => "v_ratio_human",
            Param::VRatioAutomation => "v_ratio_automation",
            Param::VRatio => "v_ratio",
            Param::BetaAutomation => "beta_automation",
            Param::BetaHumanBase => "beta_human_base",
            Param::BetaRatio => "beta_ratio",
        }
    }

    fn apply(self, p: &mut ScenarioParams, v: f64) -> Result<()> {
        match self {
            Param::PT => p.p_t = v,
            Param::DHuman => p.d_human = v,
            Param::DAutomation => p.d_automation = v,
            Param::VRatioHuman => p.v_ratio_human = v,
            Param::VRatioAutomation => p.v_ratio_automation = v,
            Param::VRatio => {
                p.v_ratio_human = v;
                p.v_ratio_automation = v;
            }
            Param::BetaAutomation => p.beta_automation_override = Some(v),
            Param::BetaHumanBase => p.beta_human_base_override = Some(v),
            Param::BetaRatio => {
                p.beta_human_base_override = Some(v * p.beta_automation()?);
            }
        }
        Ok(())
    }
}

impl fmt::Display for Param {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Param {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Param::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| {
                let known: Vec<_> = Param::ALL.iter().map(|p| p.name()).collect();
                Error::InvalidGrid(format!(
                    "unknown parameter '{s}' (known: {})",
                    known.join(", ")
                ))
            })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Axis {
    pub param: Param,
    pub values: Vec<f64>,
}

impl Axis {
    pub fn values(param: Param, values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidGrid(format!("axis '{param}' has no values")));
        }
        if let Some(v) = values.iter().find(|v| !v.is_finite()) {
            return Err(Error::InvalidGrid(format!("axis '{param}' contains {v}")));
        }
        Ok(Axis { param, values })
    }

    /// `start, start + step, ..` up to `stop` inclusive, each snapped to
    /// 12 significant digits.
    pub fn range(param: Param, start: f64, stop: f64, step: f64) -> Result<Self> {
        if !(step.is_finite() && step > 0.0) {
            return Err(Error::InvalidGrid(format!(
                "axis '{param}' step must be > 0, got {step}"
            )));
        }
        if !(start.is_finite() && stop.is_finite()) || stop < start {
            return Err(Error::InvalidGrid(format!(
                "axis '{param}' range {start}..{stop} is empty"
            )));
        }
        let n = ((stop - start) / step + 1e-9).floor() as usize + 1;
        Axis::values(
            param,
            (0..n).map(|i| snap12(start + i as f64 * step)).collect(),
        )
    }

    /// `n` log-spaced values from `low` to `high` inclusive.
    pub fn log_space(param: Param, low: f64, high: f64, n: usize) -> Result<Self> {
        if !(low > 0.0 && high >= low && n >= 1) {
            return Err(Error::InvalidGrid(format!(
                "axis '{param}' needs 0 < low <= high and n >= 1"
            )));
        }
        let (a, b) = (low.log10(), high.log10());
        let values = if n == 1 {
            vec![low]
        } else {
            (0..n)
                .map(|i| snap12(10f64.powf(a + (b - a) * i as f64 / (n - 1) as f64)))
                .collect()
        };
        Axis::values(param, values)
    }
}

/// One or two axes over a base scenario.
#[derive(Debug, Clone, PartialEq)]
pub struct GridSpec {
    pub axes: Vec<Axis>,
    pub base: ScenarioParams,
}

impl GridSpec {
    pub fn new(axes: Vec<Axis>, base: ScenarioParams) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!(
                "1 or 2 axes required, got {}",
                axes.len()
            )));
        }
        if axes.len() == 2 && axes[0].param == axes[1].param {
            return Err(Error::InvalidGrid(format!(
                "axis '{}' given twice",
                axes[0].param
            )));
        }
        if let Some(a) = axes.iter().find(|a| a.values.is_empty()) {
            return Err(Error::InvalidGrid(format!(
                "axis '{}' has no values",
                a.param
            )));
        }
        Ok(GridSpec { axes, base })
    }

    /// Sensitivity grid over `[0.6, 3.0]` in steps of 0.15 (17 x 17), human
    /// outer, automation inner.
    pub fn sensitivity_grid(base: ScenarioParams) -> Self {
        let axis = |p| Axis::range(p, D_PRIME_LOW, D_PRIME_HIGH, D_PRIME_STEP).expect("static");
        GridSpec {
            axes: vec![axis(Param::DHuman), axis(Param::DAutomation)],
            base,
        }
    }

    pub fn len(&self) -> usize {
        self.axes.iter().map(|a| a.values.len()).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Grid points in row-major order (first axis outermost).
    pub fn points(&self) -> Vec<Vec<f64>> {
        let mut out = vec![vec![]];
        for axis in &self.axes {
            out = out
                .into_iter()
                .flat_map(|prefix| {
                    axis.values.iter().map(move |&v| {
                        let mut p = prefix.clone();
                        p.push(v);
                        p
                    })
                })
                .collect();
        }
        out
    }

    fn scenario_at(&self, point: &[f64]) -> Result<ScenarioParams> {
        let mut p = self.base;
        // beta_ratio depends on the automation criterion, so it goes last.
        let mut deferred = None;
        for (axis, &v) in self.axes.iter().zip(point) {
            if axis.param == Param::BetaRatio {
                deferred = Some(v);
            } else {
                axis.param.apply(&mut p, v)?;
            }
        }
        if let Some(v) = deferred {
            p.validate()?;
            Param::BetaRatio.apply(&mut p, v)?;
        }
        Ok(p)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub keys: Vec<f64>,
    pub resp: f64,
    pub h_x: f64,
    pub h_y: f64,
    pub h_x_given_y: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RowError {
    pub keys: Vec<f64>,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepTable {
    pub columns: Vec<String>,
    pub rows: Vec<SweepRow>,
    pub errors: Vec<RowError>,
}

impl SweepTable {
    fn evaluate(columns: Vec<String>, points: Vec<(Vec<f64>, Result<ScenarioParams>)>) -> Self {
        let results: Vec<_> = points
            .into_par_iter()
            .map(|(keys, params)| {
                let report = params.and_then(|p| responsibility(&p));
                (keys, report)
            })
            .collect();
        let mut rows = Vec::new();
        let mut errors = Vec::new();
        for (keys, r) in results {
            match r {
                Ok(rep) => rows.push(SweepRow {
                    keys,
                    resp: rep.resp,
                    h_x: rep.h_x,
                    h_y: rep.h_y,
                    h_x_given_y: rep.h_x_given_y,
                }),
                Err(e) => errors.push(RowError {
                    keys,
                    message: e.to_string(),
                }),
            }
        }
        SweepTable {
            columns,
            rows,
            errors,
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Prepends `r = d_automation / d_human` (requires both columns).
    pub fn with_ratio_column(mut self) -> Result<Self> {
        let (Some(h), Some(a)) = (self.column("d_human"), self.column("d_automation")) else {
            return Err(Error::InvalidGrid(
                "ratio column needs d_human and d_automation axes".into(),
            ));
        };
        let add = |keys: &mut Vec<f64>| {
            let r = snap12(keys[a] / keys[h]);
            keys.insert(0, r);
        };
        self.rows.iter_mut().for_each(|r| add(&mut r.keys));
        self.errors.iter_mut().for_each(|r| add(&mut r.keys));
        self.columns.insert(0, "r".into());
        Ok(self)
    }

    /// Header of key columns then `resp,h_x,h_y,h_x_given_y`; LF endings.
    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        let mut header = self.columns.clone();
        header.extend(["resp", "h_x", "h_y", "h_x_given_y"].map(String::from));
        out.push_str(&header.join(","));
        out.push('\n');
        for row in &self.rows {
            let fields: Vec<String> = row
                .keys
                .iter()
                .chain([row.resp, row.h_x, row.h_y, row.h_x_given_y].iter())
                .map(|&v| sig12(v))
                .collect();
            out.push_str(&fields.join(","));
            out.push('\n');
        }
        out
    }
}

/// Evaluates every grid point. Failing points become [`RowError`]s.
pub fn grid_sweep(spec: &GridSpec) -> Result<SweepTable> {
    let spec = GridSpec::new(spec.axes.clone(), spec.base)?;
    let columns = spec
        .axes
        .iter()
        .map(|a| a.param.name().to_string())
        .collect();
    let points = spec
        .points()
        .into_iter()
        .map(|pt| {
            let p = spec.scenario_at(&pt);
            (pt, p)
        })
        .collect();
    Ok(SweepTable::evaluate(columns, points))
}

/// Which sensitivity a ratio sweep holds fixed.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Anchor {
    /// `d_human` fixed; `d_automation = r * d_human`.
    Human(f64),
    /// `d_automation` fixed; `d_human = d_automation / r`.
    Automation(f64),
}

/// Rows keyed by `r = d_automation / d_human`.
pub fn ratio_sweep(r_values: &[f64], anchor: Anchor, base: ScenarioParams) -> Result<SweepTable> {
    if r_values.is_empty() {
        return Err(Error::InvalidGrid("no ratio values".into()));
    }
    let columns = ["r", "d_human", "d_automation"].map(String::from).to_vec();
    let points = r_values
        .iter()
        .map(|&r| {
            let (dh, da) = match anchor {
                Anchor::Human(d) => (d, snap12(r * d)),
                Anchor::Automation(d) => (snap12(d / r), d),
            };
            let mut p = base;
            p.d_human = dh;
            p.d_automation = da;
            (vec![r, dh, da], Ok(p))
        })
        .collect();
    Ok(SweepTable::evaluate(columns, points))
}

/// Rows over `beta_human_base = ratio * beta_automation` at
/// `d_automation = r * base.d_human`.
pub fn beta_mismatch_sweep(
    beta_ratios: &[f64],
    r: f64,
    base: ScenarioParams,
) -> Result<SweepTable> {
    if beta_ratios.is_empty() {
        return Err(Error::InvalidGrid("no beta ratio values".into()));
    }
    let mut base = base;
    base.d_automation = snap12(r * base.d_human);
    base.validate()?;
    let beta_a = base.beta_automation()?;
    let columns = ["beta_ratio", "beta_human_base"].map(String::from).to_vec();
    let points = beta_ratios
        .iter()
        .map(|&k| {
            let b = k * beta_a;
            (vec![k, b], Ok(base.with_beta_human_base(b)))
        })
        .collect();
    Ok(SweepTable::evaluate(columns, points))
}

/// Built-in sweeps reproducing the reference figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// Sensitivity grid, 17 x 17.
    Fig4,
    /// Sensitivity grid with the ratio column prepended.
    Fig5,
    /// Criterion mismatch at R = 1/3 (d_human 2.7, d_automation 0.9).
    Fig6a,
    /// Criterion mismatch at R = 3 (d_human 0.9, d_automation 2.7).
    Fig6b,
    /// Criterion mismatch at R = 1.5 (d_human 0.9, d_automation 1.35).
    Fig6c,
}

/// Mismatch axis: 41 log-spaced ratios from 1e-2 to 1e2.
pub fn default_beta_ratios() -> Vec<f64> {
    Axis::log_space(Param::BetaRatio, 1e-2, 1e2, 41)
        .expect("static")
        .values
}

impl Preset {
    pub const ALL: [Preset; 5] = [
        Preset::Fig4,
        Preset::Fig5,
        Preset::Fig6a,
        Preset::Fig6b,
        Preset::Fig6c,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Fig4 => "fig4",
            Preset::Fig5 => "fig5",
            Preset::Fig6a => "fig6a",
            Preset::Fig6b => "fig6b",
            Preset::Fig6c => "fig6c",
        }
    }

    /// `(d_human, r)` for the mismatch presets.
    pub fn mismatch_setting(self) -> Option<(f64, f64)> {
        match self {
            Preset::Fig6a => Some((2.7, 1.0 / 3.0)),
            Preset::Fig6b => Some((0.9, 3.0)),
            Preset::Fig6c => Some((0.9, 1.5)),
            _ => None,
        }
    }

    /// Runs the preset over `base` (only `p_t` and the payoff ratios of
    /// `base` are used).
    pub fn run(self, base: ScenarioParams) -> Result<SweepTable> {
        match self {
            Preset::Fig4 => grid_sweep(&GridSpec::sensitivity_grid(base)),
            Preset::Fig5 => grid_sweep(&GridSpec::sensitivity_grid(base))?.with_ratio_column(),
            _ => {
                let (d_human, r) = self.mismatch_setting().expect("mismatch preset");
                let mut base = base;
                base.d_human = d_human;
                beta_mismatch_sweep(&default_beta_ratios(), r, base)
            }
        }
    }
}

impl FromStr for Preset {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| Error::InvalidGrid(format!("unknown preset '{s}'")))
    }
}
