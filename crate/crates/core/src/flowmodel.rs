//! General information-flow models.
//!
//! A [`FlowModel`] is a directed acyclic graph of discrete variables, each
//! tagged with the party that owns it and carrying a conditional probability
//! table (CPT). The comparative human responsibility for the single
//! output-owned variable Z is
//!
//! ```text
//! Resp = H(Z | all automation-owned variables) / H(Z)
//! ```
//!
//! evaluated by exact enumeration of the joint distribution.
//!
//! # CPT layout
//!
//! A variable with parents `p_1 .. p_k` has one CPT row per combination of
//! parent states, ordered lexicographically by parent declaration order with
//! the *last* parent varying fastest. Row `r` corresponds to parent states
//! `(s_1, .., s_k)` with `r = sum_i s_i * prod_{j > i} |p_j|`. Each row is a
//! distribution over the variable's own states, in declaration order. A
//! variable without parents has exactly one row.

use std::collections::HashMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::aided_decision::{
    automation_rates, dual_criteria, human_conditional_rates, ScenarioParams, X_LABELS, Y_LABELS,
};
use crate::error::{Error, Result};
use crate::infotheory::{
    conditional_entropy, entropy, joint_entropy, responsibility_ratio, theil_u, Axis, JointPmf,
    NORMALIZATION_TOLERANCE,
};

/// Largest joint state space that will be enumerated.
pub const MAX_ATOMS: u128 = 1 << 24;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Owner {
    Environment,
    Automation,
    Human,
    Output,
}

impl fmt::Display for Owner {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Owner::Environment => "environment",
            Owner::Automation => "automation",
            Owner::Human => "human",
            Owner::Output => "output",
        };
        f.write_str(s)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowVariable {
    pub name: String,
    pub owner: Owner,
    pub states: Vec<String>,
    #[serde(default)]
    pub parents: Vec<String>,
    pub cpt: Vec<Vec<f64>>,
}

impl FlowVariable {
    pub fn new<S: Into<String>>(
        name: S,
        owner: Owner,
        states: &[&str],
        parents: &[&str],
        cpt: Vec<Vec<f64>>,
    ) -> Self {
        FlowVariable {
            name: name.into(),
            owner,
            states: states.iter().map(|s| s.to_string()).collect(),
            parents: parents.iter().map(|s| s.to_string()).collect(),
            cpt,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FlowModel {
    pub variables: Vec<FlowVariable>,
    pub output: String,
}

/// One problem found by [`FlowModel::validate`].
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Diagnostic {
    Malformed {
        message: String,
    },
    NoVariables,
    DuplicateVariable {
        variable: String,
    },
    TooFewStates {
        variable: String,
        count: usize,
    },
    DuplicateState {
        variable: String,
        state: String,
    },
    DanglingParent {
        variable: String,
        parent: String,
    },
    DuplicateParent {
        variable: String,
        parent: String,
    },
    Cycle {
        path: Vec<String>,
    },
    CptRowCount {
        variable: String,
        expected: usize,
        found: usize,
    },
    CptRowLength {
        variable: String,
        row: usize,
        expected: usize,
        found: usize,
    },
    CptInvalidEntry {
        variable: String,
        row: usize,
        value: f64,
    },
    CptRowNotNormalized {
        variable: String,
        row: usize,
        sum: f64,
    },
    NoOutputVariable,
    MultipleOutputVariables {
        variables: Vec<String>,
    },
    OutputMismatch {
        output: String,
        reason: String,
    },
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        use Diagnostic::*;
        match self {
            Malformed { message } => write!(f, "malformed model file: {message}"),
            NoVariables => f.write_str("model declares no variables"),
            DuplicateVariable { variable } => write!(f, "variable '{variable}' declared twice"),
            TooFewStates { variable, count } => {
                write!(
                    f,
                    "variable '{variable}' has {count} state(s); at least 2 required"
                )
            }
            DuplicateState { variable, state } => {
                write!(f, "variable '{variable}' lists state '{state}' twice")
            }
            DanglingParent { variable, parent } => {
                write!(f, "variable '{variable}' has unknown parent '{parent}'")
            }
            DuplicateParent { variable, parent } => {
                write!(f, "variable '{variable}' lists parent '{parent}' twice")
            }
            Cycle { path } => write!(f, "cycle: {}", path.join(" -> ")),
            CptRowCount {
                variable,
                expected,
                found,
            } => write!(
                f,
                "variable '{variable}' has {found} CPT row(s); its parents require {expected}"
            ),
            CptRowLength {
                variable,
                row,
                expected,
                found,
            } => write!(
                f,
                "variable '{variable}' CPT row {row} has {found} entries; expected {expected}"
            ),
            CptInvalidEntry {
                variable,
                row,
                value,
            } => write!(
                f,
                "variable '{variable}' CPT row {row} contains {value}, not a probability"
            ),
            CptRowNotNormalized { variable, row, sum } => {
                write!(
                    f,
                    "variable '{variable}' CPT row {row} sums to {sum}, not 1"
                )
            }
            NoOutputVariable => f.write_str("no variable has owner 'output'"),
            MultipleOutputVariables { variables } => write!(
                f,
                "exactly one output variable allowed, found {}",
                variables.join(", ")
            ),
            OutputMismatch { output, reason } => write!(f, "output '{output}': {reason}"),
        }
    }
}

/// The model's full joint distribution. Atoms are indexed in mixed radix
/// over the variables in declaration order, last variable fastest.
#[derive(Debug, Clone, PartialEq)]
pub struct JointDistribution {
    pub names: Vec<String>,
    pub states: Vec<Vec<String>>,
    pub probs: Vec<f64>,
}

impl JointDistribution {
    pub fn cards(&self) -> Vec<usize> {
        self.states.iter().map(Vec::len).collect()
    }

    /// Probability of the atom with the given state indices.
    pub fn prob(&self, assignment: &[usize]) -> f64 {
        let idx = assignment
            .iter()
            .zip(self.cards())
            .fold(0, |acc, (s, c)| acc * c + s);
        self.probs[idx]
    }

    /// Marginal over `vars` (indices, repeats allowed), flattened in mixed
    /// radix with the last listed variable fastest.
    pub fn marginal(&self, vars: &[usize]) -> Vec<f64> {
        let cards = self.cards();
        let out_len: usize = vars.iter().map(|&v| cards[v]).product();
        let mut out = vec![0.0; out_len];
        let mut digits = vec![0usize; cards.len()];
        for &p in &self.probs {
            if p > 0.0 {
                let idx = vars.iter().fold(0, |acc, &v| acc * cards[v] + digits[v]);
                out[idx] += p;
            }
            increment(&mut digits, &cards);
        }
        out
    }
}

fn increment(digits: &mut [usize], cards: &[usize]) {
    for i in (0..digits.len()).rev() {
        digits[i] += 1;
        if digits[i] < cards[i] {
            return;
        }
        digits[i] = 0;
    }
}

/// Responsibility of the output variable with respect to the automation set.
///
/// `h_x` is H(Z), `h_y` the entropy of the compound automation variable and
/// `h_x_given_y` the conditional entropy of Z given it.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModelReport {
    pub h_x: f64,
    pub h_y: f64,
    pub h_xy: f64,
    pub h_x_given_y: f64,
    pub resp: f64,
    pub output: String,
    pub conditioning: Vec<String>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub notice: Option<String>,
}

struct Compiled {
    cards: Vec<usize>,
    parents: Vec<Vec<usize>>,
    cpt: Vec<Vec<Vec<f64>>>,
    output: usize,
}

impl FlowModel {
    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| {
            Error::InvalidModel(vec![Diagnostic::Malformed {
                message: e.to_string(),
            }])
        })
    }

    pub fn to_json_pretty(&self) -> String {
        serde_json::to_string_pretty(self).expect("model serialization is infallible")
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.variables.iter().position(|v| v.name == name)
    }

    /// Every structural problem in the model; empty when valid.
    pub fn validate(&self) -> Vec<Diagnostic> {
        let mut diags = Vec::new();
        if self.variables.is_empty() {
            diags.push(Diagnostic::NoVariables);
        }

        let mut index: HashMap<&str, usize> = HashMap::new();
        for (i, v) in self.variables.iter().enumerate() {
            if index.insert(v.name.as_str(), i).is_some() {
                diags.push(Diagnostic::DuplicateVariable {
                    variable: v.name.clone(),
                });
            }
        }

        for v in &self.variables {
            if v.states.len() < 2 {
                diags.push(Diagnostic::TooFewStates {
                    variable: v.name.clone(),
                    count: v.states.len(),
                });
            }
            for (k, s) in v.states.iter().enumerate() {
                if v.states[..k].contains(s) {
                    diags.push(Diagnostic::DuplicateState {
                        variable: v.name.clone(),
                        state: s.clone(),
                    });
                }
            }
            let mut parents_ok = true;
            for (k, p) in v.parents.iter().enumerate() {
                if !index.contains_key(p.as_str()) {
                    parents_ok = false;
                    diags.push(Diagnostic::DanglingParent {
                        variable: v.name.clone(),
                        parent: p.clone(),
                    });
                }
                if v.parents[..k].contains(p) {
                    diags.push(Diagnostic::DuplicateParent {
                        variable: v.name.clone(),
                        parent: p.clone(),
                    });
                }
            }
            if parents_ok {
                let expected: usize = v
                    .parents
                    .iter()
                    .map(|p| self.variables[index[p.as_str()]].states.len())
                    .product();
                if v.cpt.len() != expected {
                    diags.push(Diagnostic::CptRowCount {
                        variable: v.name.clone(),
                        expected,
                        found: v.cpt.len(),
                    });
                }
            }
            for (r, row) in v.cpt.iter().enumerate() {
                if row.len() != v.states.len() {
                    diags.push(Diagnostic::CptRowLength {
                        variable: v.name.clone(),
                        row: r,
                        expected: v.states.len(),
                        found: row.len(),
                    });
                    continue;
                }
                if let Some(&bad) = row
                    .iter()
                    .find(|p| !p.is_finite() || **p < 0.0 || **p > 1.0)
                {
                    diags.push(Diagnostic::CptInvalidEntry {
                        variable: v.name.clone(),
                        row: r,
                        value: bad,
                    });
                    continue;
                }
                let sum: f64 = row.iter().sum();
                if (sum - 1.0).abs() > NORMALIZATION_TOLERANCE {
                    diags.push(Diagnostic::CptRowNotNormalized {
                        variable: v.name.clone(),
                        row: r,
                        sum,
                    });
                }
            }
        }

        if let Some(path) = find_cycle(&self.variables, &index) {
            diags.push(Diagnostic::Cycle { path });
        }

        let outputs: Vec<String> = self
            .variables
            .iter()
            .filter(|v| v.owner == Owner::Output)
            .map(|v| v.name.clone())
            .collect();
        match outputs.len() {
            0 => diags.push(Diagnostic::NoOutputVariable),
            1 if outputs[0] != self.output => diags.push(Diagnostic::OutputMismatch {
                output: self.output.clone(),
                reason: format!("the output-owned variable is '{}'", outputs[0]),
            }),
            1 => {}
            _ => diags.push(Diagnostic::MultipleOutputVariables { variables: outputs }),
        }
        diags
    }

    fn compile(&self) -> Result<Compiled> {
        let diags = self.validate();
        if !diags.is_empty() {
            return Err(Error::InvalidModel(diags));
        }
        let cards: Vec<usize> = self.variables.iter().map(|v| v.states.len()).collect();
        let atoms = cards
            .iter()
            .fold(1u128, |acc, &c| acc.saturating_mul(c as u128));
        if atoms > MAX_ATOMS {
            return Err(Error::StateSpaceTooLarge {
                atoms,
                limit: MAX_ATOMS,
            });
        }
        let parents = self
            .variables
            .iter()
            .map(|v| {
                v.parents
                    .iter()
                    .map(|p| self.index_of(p).expect("validated"))
                    .collect()
            })
            .collect();
        let cpt = self
            .variables
            .iter()
            .map(|v| {
                v.cpt
                    .iter()
                    .map(|row| {
                        let s: f64 = row.iter().sum();
                        row.iter().map(|p| p / s).collect()
                    })
                    .collect()
            })
            .collect();
        Ok(Compiled {
            cards,
            parents,
            cpt,
            output: self.index_of(&self.output).expect("validated"),
        })
    }

    /// Exact joint distribution as the product of CPT entries.
    pub fn joint_distribution(&self) -> Result<JointDistribution> {
        let c = self.compile()?;
        Ok(enumerate(self, &c))
    }

    /// `H(Z | automation-owned variables) / H(Z)`.
    ///
    /// Without automation-owned variables the conditioning set is empty and
    /// the ratio is 1; the report then carries a notice.
    pub fn general_responsibility(&self) -> Result<ModelReport> {
        let c = self.compile()?;
        let joint = enumerate(self, &c);
        let automation: Vec<usize> = self
            .variables
            .iter()
            .enumerate()
            .filter(|(_, v)| v.owner == Owner::Automation)
            .map(|(i, _)| i)
            .collect();

        let mut vars = automation.clone();
        vars.push(c.output);
        let flat = joint.marginal(&vars);
        let z_card = c.cards[c.output];
        let cells: Vec<Vec<f64>> = flat.chunks(z_card).map(<[f64]>::to_vec).collect();
        let table = JointPmf::from_cells(cells)?;

        let h_z = entropy(&table.col_marginal());
        if h_z <= 0.0 {
            return Err(Error::DegenerateOutput {
                output: self.output.clone(),
            });
        }
        let resp = responsibility_ratio(&table)?;
        let notice = automation.is_empty().then(|| {
            "no automation-owned variables: conditioning set is empty, so Resp = 1".to_string()
        });
        Ok(ModelReport {
            h_x: h_z,
            h_y: entropy(&table.row_marginal()),
            h_xy: joint_entropy(&table),
            h_x_given_y: conditional_entropy(&table, Axis::Row),
            resp,
            output: self.output.clone(),
            conditioning: automation
                .iter()
                .map(|&i| self.variables[i].name.clone())
                .collect(),
            notice,
        })
    }

    /// Theil's U(a | b) from the marginal joint of two variables.
    pub fn theil_association(&self, a: &str, b: &str) -> Result<f64> {
        let ia = self
            .index_of(a)
            .ok_or_else(|| Error::UnknownVariable(a.to_string()))?;
        let ib = self
            .index_of(b)
            .ok_or_else(|| Error::UnknownVariable(b.to_string()))?;
        let joint = self.joint_distribution()?;
        let nb = self.variables[ib].states.len();
        let flat = joint.marginal(&[ia, ib]);
        let table = JointPmf::from_cells(flat.chunks(nb).map(<[f64]>::to_vec).collect())?;
        theil_u(&table, Axis::Row)
    }
}

fn enumerate(model: &FlowModel, c: &Compiled) -> JointDistribution {
    let n: usize = c.cards.iter().product();
    let mut probs = Vec::with_capacity(n);
    let mut digits = vec![0usize; c.cards.len()];
    for _ in 0..n {
        let mut p = 1.0;
        for (v, parents) in c.parents.iter().enumerate() {
            let row = parents
                .iter()
                .fold(0, |acc, &q| acc * c.cards[q] + digits[q]);
            p *= c.cpt[v][row][digits[v]];
            if p == 0.0 {
                break;
            }
        }
        probs.push(p);
        increment(&mut digits, &c.cards);
    }
    JointDistribution {
        names: model.variables.iter().map(|v| v.name.clone()).collect(),
        states: model.variables.iter().map(|v| v.states.clone()).collect(),
        probs,
    }
}

/// Returns one cycle through the parent graph as a closed path of names.
fn find_cycle(vars: &[FlowVariable], index: &HashMap<&str, usize>) -> Option<Vec<String>> {
    #[derive(Clone, Copy, PartialEq)]
    enum Mark {
        New,
        Active,
        Done,
    }

    fn visit(
        v: usize,
        vars: &[FlowVariable],
        index: &HashMap<&str, usize>,
        marks: &mut [Mark],
        stack: &mut Vec<usize>,
    ) -> Option<Vec<String>> {
        marks[v] = Mark::Active;
        stack.push(v);
        for p in &vars[v].parents {
            let Some(&u) = index.get(p.as_str()) else {
                continue;
            };
            match marks[u] {
                Mark::Active => {
                    let start = stack.iter().position(|&s| s == u).expect("on stack");
                    let mut path: Vec<String> = stack[start..]
                        .iter()
                        .map(|&s| vars[s].name.clone())
                        .collect();
                    path.push(vars[u].name.clone());
                    return Some(path);
                }
                Mark::New => {
                    if let Some(path) = visit(u, vars, index, marks, stack) {
                        return Some(path);
                    }
                }
                Mark::Done => {}
            }
        }
        stack.pop();
        marks[v] = Mark::Done;
        None
    }

    let mut marks = vec![Mark::New; vars.len()];
    let mut stack = Vec::new();
    (0..vars.len()).find_map(|v| {
        if marks[v] == Mark::New {
            visit(v, vars, index, &mut marks, &mut stack)
        } else {
            None
        }
    })
}

/// The aided-detection scenario as a three-variable network: environment
/// state T, automation classification Y (child of T) and the human's
/// engage/abort action X (child of T and Y), which is the system output.
pub fn aws_network(params: &ScenarioParams) -> Result<FlowModel> {
    let auto = automation_rates(params)?;
    let dual = dual_criteria(params, &auto)?;
    let human = human_conditional_rates(params, &dual)?;
    let (ha, hn) = (human.given_alarm, human.given_noise);
    Ok(FlowModel {
        variables: vec![
            FlowVariable::new(
                "T",
                Owner::Environment,
                &Y_LABELS,
                &[],
                vec![vec![params.p_t, 1.0 - params.p_t]],
            ),
            FlowVariable::new(
                "Y",
                Owner::Automation,
                &Y_LABELS,
                &["T"],
                vec![vec![auto.p_tp, auto.p_fn], vec![auto.p_fp, auto.p_tn]],
            ),
            FlowVariable::new(
                "X",
                Owner::Output,
                &X_LABELS,
                &["T", "Y"],
                vec![
                    vec![ha.p_tp, ha.p_fn],
                    vec![hn.p_tp, hn.p_fn],
                    vec![ha.p_fp, ha.p_tn],
                    vec![hn.p_fp, hn.p_tn],
                ],
            ),
        ],
        output: "X".into(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::aided_decision::responsibility;

    fn close(a: f64, b: f64, tol: f64) {
        assert!((a - b).abs() <= tol, "{a} vs {b} (tol {tol})");
    }

    fn chain() -> FlowModel {
        FlowModel {
            variables: vec![
                FlowVariable::new(
                    "A",
                    Owner::Automation,
                    &["0", "1"],
                    &[],
                    vec![vec![0.3, 0.7]],
                ),
                FlowVariable::new(
                    "Z",
                    Owner::Output,
                    &["0", "1"],
                    &["A"],
                    vec![vec![0.9, 0.1], vec![0.2, 0.8]],
                ),
            ],
            output: "Z".into(),
        }
    }

    #[test]
    fn valid_chain() {
        assert!(chain().validate().is_empty());
    }

    #[test]
    fn self_parent_is_a_cycle() {
        let mut m = chain();
        m.variables[0].parents = vec!["A".into()];
        m.variables[0].cpt = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let d = m.validate();
        assert!(
            d.contains(&Diagnostic::Cycle {
                path: vec!["A".into(), "A".into()]
            }),
            "{d:?}"
        );
    }

    #[test]
    fn longer_cycle_is_named() {
        let mut m = chain();
        m.variables[0].parents = vec!["Z".into()];
        m.variables[0].cpt = vec![vec![0.5, 0.5], vec![0.5, 0.5]];
        let d = m.validate();
        let cycle = d.iter().find_map(|d| match d {
            Diagnostic::Cycle { path } => Some(path.clone()),
            _ => None,
        });
        let path = cycle.expect("cycle diagnostic");
        assert_eq!(path.first(), path.last());
        assert!(path.contains(&"A".to_string()) && path.contains(&"Z".to_string()));
    }

    #[test]
    fn unnormalized_row_names_variable_and_row() {
        let mut m = chain();
        m.variables[1].cpt[1] = vec![0.2, 0.7];
        let d = m.validate();
        assert_eq!(d.len(), 1);
        match &d[0] {
            Diagnostic::CptRowNotNormalized { variable, row, sum } => {
                assert_eq!(variable, "Z");
                assert_eq!(*row, 1);
                close(*sum, 0.9, 1e-12);
            }
            other => panic!("unexpected {other:?}"),
        }
        assert!(matches!(
            m.general_responsibility(),
            Err(Error::InvalidModel(_))
        ));
    }

    #[test]
    fn collects_every_problem() {
        let m = FlowModel {
            variables: vec![
                FlowVariable::new("A", Owner::Output, &["x"], &["ghost"], vec![vec![1.0]]),
                FlowVariable::new(
                    "A",
                    Owner::Output,
                    &["x", "x"],
                    &[],
                    vec![vec![0.5, 0.5, 0.0]],
                ),
            ],
            output: "B".into(),
        };
        let d = m.validate();
        let has = |f: fn(&Diagnostic) -> bool| d.iter().any(f);
        assert!(has(|d| matches!(d, Diagnostic::DuplicateVariable { .. })));
        assert!(has(|d| matches!(d, Diagnostic::TooFewStates { .. })));
        assert!(has(|d| matches!(d, Diagnostic::DuplicateState { .. })));
        assert!(has(|d| matches!(d, Diagnostic::DanglingParent { .. })));
        assert!(has(|d| matches!(d, Diagnostic::CptRowLength { .. })));
        assert!(has(|d| matches!(
            d,
            Diagnostic::MultipleOutputVariables { .. }
        )));
    }

    #[test]
    fn missing_output_and_mismatched_name() {
        let mut m = chain();
        m.variables[1].owner = Owner::Human;
        assert!(m.validate().contains(&Diagnostic::NoOutputVariable));
        let mut m = chain();
        m.output = "A".into();
        assert!(matches!(
            m.validate().as_slice(),
            [Diagnostic::OutputMismatch { .. }]
        ));
    }

    #[test]
    fn cpt_row_count_checked_against_parents() {
        let mut m = chain();
        m.variables[1].cpt.pop();
        assert!(matches!(
            m.validate().as_slice(),
            [Diagnostic::CptRowCount {
                expected: 2,
                found: 1,
                ..
            }]
        ));
    }

    #[test]
    fn independent_fair_coins() {
        let m = FlowModel {
            variables: vec![
                FlowVariable::new(
                    "A",
                    Owner::Environment,
                    &["h", "t"],
                    &[],
                    vec![vec![0.5, 0.5]],
                ),
                FlowVariable::new("Z", Owner::Output, &["h", "t"], &[], vec![vec![0.5, 0.5]]),
            ],
            output: "Z".into(),
        };
        let j = m.joint_distribution().unwrap();
        assert_eq!(j.probs, vec![0.25; 4]);
    }

    #[test]
    fn copy_chain_has_diagonal_mass_only() {
        let m = FlowModel {
            variables: vec![
                FlowVariable::new(
                    "A",
                    Owner::Automation,
                    &["0", "1"],
                    &[],
                    vec![vec![0.4, 0.6]],
                ),
                FlowVariable::new(
                    "Z",
                    Owner::Output,
                    &["0", "1"],
                    &["A"],
                    vec![vec![1.0, 0.0], vec![0.0, 1.0]],
                ),
            ],
            output: "Z".into(),
        };
        let j = m.joint_distribution().unwrap();
        assert_eq!(j.probs, vec![0.4, 0.0, 0.0, 0.6]);
        assert_eq!(j.prob(&[1, 1]), 0.6);
        assert_eq!(m.general_responsibility().unwrap().resp, 0.0);
        close(m.theil_association("Z", "A").unwrap(), 1.0, 1e-15);
    }

    #[test]
    fn human_only_output_with_disconnected_automation() {
        let m = FlowModel {
            variables: vec![
                FlowVariable::new(
                    "Ya",
                    Owner::Automation,
                    &["0", "1"],
                    &[],
                    vec![vec![0.3, 0.7]],
                ),
                FlowVariable::new(
                    "Xs",
                    Owner::Human,
                    &["0", "1", "2"],
                    &[],
                    vec![vec![0.2, 0.5, 0.3]],
                ),
                FlowVariable::new(
                    "Z",
                    Owner::Output,
                    &["0", "1", "2"],
                    &["Xs"],
                    vec![
                        vec![1.0, 0.0, 0.0],
                        vec![0.0, 1.0, 0.0],
                        vec![0.0, 0.0, 1.0],
                    ],
                ),
            ],
            output: "Z".into(),
        };
        close(m.general_responsibility().unwrap().resp, 1.0, 1e-12);
        close(m.theil_association("Z", "Ya").unwrap(), 0.0, 1e-12);
    }

    #[test]
    fn empty_automation_set_gives_one_with_notice() {
        let mut m = chain();
        m.variables[0].owner = Owner::Environment;
        let r = m.general_responsibility().unwrap();
        assert_eq!(r.resp, 1.0);
        assert!(r.notice.is_some());
        assert!(r.conditioning.is_empty());
    }

    #[test]
    fn constant_output_is_degenerate() {
        let mut m = chain();
        m.variables[1].cpt = vec![vec![1.0, 0.0], vec![1.0, 0.0]];
        assert_eq!(
            m.general_responsibility(),
            Err(Error::DegenerateOutput { output: "Z".into() })
        );
    }

    #[test]
    fn state_space_guard() {
        let vars = (0..25)
            .map(|i| {
                let owner = if i == 24 {
                    Owner::Output
                } else {
                    Owner::Environment
                };
                FlowVariable::new(
                    format!("V{i}"),
                    owner,
                    &["0", "1"],
                    &[],
                    vec![vec![0.5, 0.5]],
                )
            })
            .collect();
        let m = FlowModel {
            variables: vars,
            output: "V24".into(),
        };
        assert_eq!(
            m.joint_distribution(),
            Err(Error::StateSpaceTooLarge {
                atoms: 1 << 25,
                limit: MAX_ATOMS
            })
        );
    }

    #[test]
    fn parent_rows_are_last_parent_fastest() {
        // Z = A xor B encoded with rows (A,B) = 00, 01, 10, 11.
        let m = FlowModel {
            variables: vec![
                FlowVariable::new(
                    "A",
                    Owner::Automation,
                    &["0", "1"],
                    &[],
                    vec![vec![0.5, 0.5]],
                ),
                FlowVariable::new(
                    "B",
                    Owner::Environment,
                    &["0", "1"],
                    &[],
                    vec![vec![0.9, 0.1]],
                ),
                FlowVariable::new(
                    "Z",
                    Owner::Output,
                    &["0", "1"],
                    &["A", "B"],
                    vec![
                        vec![1.0, 0.0],
                        vec![0.0, 1.0],
                        vec![0.0, 1.0],
                        vec![1.0, 0.0],
                    ],
                ),
            ],
            output: "Z".into(),
        };
        let j = m.joint_distribution().unwrap();
        close(j.prob(&[0, 1, 1]), 0.05, 1e-15);
        close(j.prob(&[1, 0, 1]), 0.45, 1e-15);
        assert_eq!(j.prob(&[1, 1, 1]), 0.0);
    }

    #[test]
    fn aws_network_matches_closed_form() {
        let p = ScenarioParams::reference(2.0, 2.0);
        let m = aws_network(&p).unwrap();
        assert!(m.validate().is_empty());
        let general = m.general_responsibility().unwrap();
        let closed = responsibility(&p).unwrap();
        close(general.resp, closed.resp, 1e-12);
        close(general.h_x, closed.h_x, 1e-12);
        close(general.h_y, closed.h_y, 1e-12);
        close(general.h_xy, closed.h_xy, 1e-12);

        let u = m.theil_association("X", "Y").unwrap();
        close(u, 1.0 - closed.resp, 1e-12);
    }

    #[test]
    fn malformed_json_is_a_diagnostic() {
        match FlowModel::from_json("{\"variables\": 3}") {
            Err(Error::InvalidModel(d)) => {
                assert!(matches!(d[0], Diagnostic::Malformed { .. }))
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn unknown_variable_in_association() {
        assert_eq!(
            chain().theil_association("A", "nope"),
            Err(Error::UnknownVariable("nope".into()))
        );
    }
}
