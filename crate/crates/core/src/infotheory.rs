//! Discrete information-theory primitives over finite probability tables.
//!
//! All logarithms are base 2, so every quantity is in bits. Zero-probability
//! cells are skipped, which realises the usual `0 * log2(0) = 0` convention.

use std::collections::HashSet;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Inputs whose total deviates from 1 by at most this much are renormalized.
pub const NORMALIZATION_TOLERANCE: f64 = 1e-9;

/// Mutual information values in `[-MI_CLAMP, 0)` are rounding noise.
const MI_CLAMP: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Axis {
    Row,
    Col,
}

impl Axis {
    pub fn other(self) -> Axis {
        match self {
            Axis::Row => Axis::Col,
            Axis::Col => Axis::Row,
        }
    }
}

impl fmt::Display for Axis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Axis::Row => f.write_str("row"),
            Axis::Col => f.write_str("column"),
        }
    }
}

/// A probability mass function over named categories.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Pmf {
    labels: Vec<String>,
    probs: Vec<f64>,
}

impl Pmf {
    pub fn new<S: Into<String>>(labels: Vec<S>, probs: Vec<f64>) -> Result<Self> {
        let labels: Vec<String> = labels.into_iter().map(Into::into).collect();
        if labels.len() != probs.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} labels for {} probabilities",
                labels.len(),
                probs.len()
            )));
        }
        check_unique(&labels, "category")?;
        let probs = normalized(probs)?;
        Ok(Pmf { labels, probs })
    }

    /// Builds a PMF labelled `"0"`, `"1"`, ...
    pub fn from_probs(probs: Vec<f64>) -> Result<Self> {
        let labels = index_labels(probs.len());
        Pmf::new(labels, probs)
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }

    pub fn prob(&self, label: &str) -> Option<f64> {
        self.labels
            .iter()
            .position(|l| l == label)
            .map(|i| self.probs[i])
    }
}

/// A two-way joint probability table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JointPmf {
    row_labels: Vec<String>,
    col_labels: Vec<String>,
    cells: Vec<Vec<f64>>,
}

impl JointPmf {
    pub fn new<S: Into<String>, T: Into<String>>(
        row_labels: Vec<S>,
        col_labels: Vec<T>,
        cells: Vec<Vec<f64>>,
    ) -> Result<Self> {
        let row_labels: Vec<String> = row_labels.into_iter().map(Into::into).collect();
        let col_labels: Vec<String> = col_labels.into_iter().map(Into::into).collect();
        if cells.len() != row_labels.len() {
            return Err(Error::InvalidDistribution(format!(
                "{} row labels for {} rows",
                row_labels.len(),
                cells.len()
            )));
        }
        if let Some((i, row)) = cells
            .iter()
            .enumerate()
            .find(|(_, r)| r.len() != col_labels.len())
        {
            return Err(Error::InvalidDistribution(format!(
                "row {i} has {} cells, expected {}",
                row.len(),
                col_labels.len()
            )));
        }
        check_unique(&row_labels, "row")?;
        check_unique(&col_labels, "column")?;

        let ncols = col_labels.len();
        let flat = normalized(cells.into_iter().flatten().collect())?;
        let cells = flat.chunks(ncols.max(1)).map(<[f64]>::to_vec).collect();
        Ok(JointPmf {
            row_labels,
            col_labels,
            cells,
        })
    }

    /// Builds a joint table with index labels on both axes.
    pub fn from_cells(cells: Vec<Vec<f64>>) -> Result<Self> {
        let nrows = cells.len();
        let ncols = cells.first().map_or(0, Vec::len);
        JointPmf::new(index_labels(nrows), index_labels(ncols), cells)
    }

    pub fn row_labels(&self) -> &[String] {
        &self.row_labels
    }

    pub fn col_labels(&self) -> &[String] {
        &self.col_labels
    }

    pub fn cells(&self) -> &[Vec<f64>] {
        &self.cells
    }

    pub fn cell(&self, row: usize, col: usize) -> f64 {
        self.cells[row][col]
    }

    pub fn shape(&self) -> (usize, usize) {
        (self.row_labels.len(), self.col_labels.len())
    }

    pub fn row_marginal(&self) -> Pmf {
        Pmf {
            labels: self.row_labels.clone(),
            probs: self.row_sums(),
        }
    }

    pub fn col_marginal(&self) -> Pmf {
        Pmf {
            labels: self.col_labels.clone(),
            probs: self.col_sums(),
        }
    }

    pub fn marginal(&self, axis: Axis) -> Pmf {
        match axis {
            Axis::Row => self.row_marginal(),
            Axis::Col => self.col_marginal(),
        }
    }

    pub fn transpose(&self) -> JointPmf {
        let (nrows, ncols) = self.shape();
        let cells = (0..ncols)
            .map(|c| (0..nrows).map(|r| self.cells[r][c]).collect())
            .collect();
        JointPmf {
            row_labels: self.col_labels.clone(),
            col_labels: self.row_labels.clone(),
            cells,
        }
    }

    fn row_sums(&self) -> Vec<f64> {
        self.cells.iter().map(|r| r.iter().sum()).collect()
    }

    fn col_sums(&self) -> Vec<f64> {
        let mut sums = vec![0.0; self.col_labels.len()];
        for row in &self.cells {
            for (s, v) in sums.iter_mut().zip(row) {
                *s += v;
            }
        }
        sums
    }
}

fn index_labels(n: usize) -> Vec<String> {
    (0..n).map(|i| i.to_string()).collect()
}

fn check_unique(labels: &[String], what: &str) -> Result<()> {
    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !seen.insert(l.as_str()) {
            return Err(Error::InvalidDistribution(format!(
                "duplicate {what} label '{l}'"
            )));
        }
    }
    Ok(())
}

fn normalized(mut probs: Vec<f64>) -> Result<Vec<f64>> {
    if probs.is_empty() {
        return Err(Error::InvalidDistribution("no categories".into()));
    }
    if let Some((i, p)) = probs
        .iter()
        .enumerate()
        .find(|(_, p)| !p.is_finite() || **p < 0.0)
    {
        return Err(Error::InvalidDistribution(format!(
            "probability {p} at index {i} is negative or not finite"
        )));
    }
    let total: f64 = probs.iter().sum();
    if (total - 1.0).abs() > NORMALIZATION_TOLERANCE {
        return Err(Error::InvalidDistribution(format!(
            "probabilities sum to {total}, not 1"
        )));
    }
    if total != 1.0 {
        probs.iter_mut().for_each(|p| *p /= total);
    }
    Ok(probs)
}

/// `-sum p log2 p` over the non-zero entries.
/// `-sum p log2(p / total)`, so a single occupied state is exactly zero even
/// when its mass is one ulp short of 1.
pub(crate) fn entropy_bits<'a, I: IntoIterator<Item = &'a f64>>(probs: I) -> f64 {
    let probs: Vec<f64> = probs.into_iter().copied().filter(|p| *p > 0.0).collect();
    let total: f64 = probs.iter().sum();
    let h: f64 = probs.iter().map(|&p| -p * (p / total).log2()).sum();
    h.max(0.0)
}

/// Shannon entropy in bits.
pub fn entropy(p: &Pmf) -> f64 {
    entropy_bits(&p.probs)
}

/// Entropy of the flattened joint table, H(row, col).
pub fn joint_entropy(j: &JointPmf) -> f64 {
    entropy_bits(j.cells.iter().flatten())
}

/// Entropy of the axis *other* than `conditioning`, given the `conditioning` axis.
///
/// Evaluated as `-sum p(a,b) log2 p(a,b)/p(b)` so that a deterministic
/// relationship yields exactly zero.
pub fn conditional_entropy(j: &JointPmf, conditioning: Axis) -> f64 {
    let h: f64 = match conditioning {
        Axis::Row => {
            let rows = j.row_sums();
            j.cells
                .iter()
                .zip(&rows)
                .filter(|(_, &pr)| pr > 0.0)
                .flat_map(|(row, &pr)| row.iter().map(move |&p| (p, pr)))
                .filter(|(p, _)| *p > 0.0)
                .map(|(p, pr)| -p * (p / pr).log2())
                .sum()
        }
        Axis::Col => {
            let cols = j.col_sums();
            j.cells
                .iter()
                .flat_map(|row| row.iter().zip(&cols))
                .filter(|(&p, &pc)| p > 0.0 && pc > 0.0)
                .map(|(&p, &pc)| -p * (p / pc).log2())
                .sum()
        }
    };
    h.max(0.0)
}

/// I(row; col) = H(row) + H(col) - H(row, col).
pub fn mutual_information(j: &JointPmf) -> f64 {
    let i = entropy_bits(&j.row_sums()) + entropy_bits(&j.col_sums()) - joint_entropy(j);
    if (-MI_CLAMP..0.0).contains(&i) {
        0.0
    } else {
        i
    }
}

/// Theil's uncertainty coefficient U(target | other) = I / H(target).
///
/// The relative *reduction* in uncertainty about the target axis once the
/// other axis is known.
pub fn theil_u(j: &JointPmf, target: Axis) -> Result<f64> {
    let h_target = entropy(&j.marginal(target));
    if h_target <= 0.0 {
        return Err(Error::DegenerateTarget { axis: target });
    }
    Ok((mutual_information(j) / h_target).clamp(0.0, 1.0))
}

/// H(target | other) / H(target): the relative uncertainty about the target
/// axis that *remains* once the other axis is known. Complement of
/// [`theil_u`] on the same axis.
pub fn remaining_uncertainty_ratio(j: &JointPmf, target: Axis) -> Result<f64> {
    let h_target = entropy(&j.marginal(target));
    if h_target <= 0.0 {
        return Err(Error::DegenerateTarget { axis: target });
    }
    Ok((conditional_entropy(j, target.other()) / h_target).clamp(0.0, 1.0))
}

/// Responsibility ratio H(X|Y) / H(X) where rows hold the automation
/// variable Y and columns hold the human action X.
pub fn responsibility_ratio(j: &JointPmf) -> Result<f64> {
    let h_x = entropy_bits(&j.col_sums());
    if h_x <= 0.0 {
        return Err(Error::DegenerateAction {
            h_x,
            h_y: entropy_bits(&j.row_sums()),
        });
    }
    Ok((conditional_entropy(j, Axis::Row) / h_x).clamp(0.0, 1.0))
}
