//! Design matrices built from a [`Dataset`].
//!
//! Ordered variables are encoded with cumulative "traffic light" indicators
//! `(x >= t1), (x >= t2), ...`. Because the indicators are cumulative,
//! removing one of them merges the two value bands on either side of its
//! threshold, which is what lets stepwise selection coarsen a variable.
//!
//! Plan files hold one directive per line:
//!
//! ```text
//! # comments and blank lines are ignored
//! traffic_light age: 16,17,18
//! categorical region
//! linear score
//! interact age>=16 region=north
//! levels region: south,north,west
//! intercept off
//! ```
//!
//! `levels` pins the reference level (first entry) and the dummy order of a
//! categorical variable; [`EncodingPlan::resolve`] writes it so a fitted
//! model encodes new data exactly as it encoded the training data.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt::Write as _;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::data::{ColumnData, Dataset};

pub const INTERCEPT: &str = "(Intercept)";

/// Joins parent names of an interaction column.
pub const INTERACTION_SEP: char = '×';

#[derive(Debug, Error, PartialEq)]
pub enum EncodingError {
    #[error("threshold set for `{0}` is empty")]
    EmptyThresholds(String),
    #[error("thresholds for `{0}` must be finite and strictly increasing")]
    NotIncreasing(String),
    #[error("unknown design column `{0}`")]
    UnknownColumn(String),
    #[error("the intercept column cannot be dropped")]
    DropIntercept,
    #[error("duplicate design column `{0}`")]
    DuplicateName(String),
    #[error("unknown variable `{0}`")]
    UnknownVariable(String),
    #[error("variable `{0}` is categorical; it needs a `categorical` directive")]
    NotNumeric(String),
    #[error("variable `{variable}` has level `{level}` not seen when the plan was resolved")]
    UnseenLevel { variable: String, level: String },
    #[error("column length {found} does not match design row count {expected}")]
    LengthMismatch { expected: usize, found: usize },
    #[error("column index {index} out of range for {len} columns")]
    BadIndex { index: usize, len: usize },
    #[error("plan line {line}: {message}")]
    Syntax { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, EncodingError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ThresholdSet {
    variable: String,
    thresholds: Vec<f64>,
}

impl ThresholdSet {
    pub fn new(variable: impl Into<String>, thresholds: Vec<f64>) -> Result<Self> {
        let variable = variable.into();
        if thresholds.is_empty() {
            return Err(EncodingError::EmptyThresholds(variable));
        }
        let ok = thresholds.iter().all(|t| t.is_finite())
            && thresholds.windows(2).all(|w| w[0] < w[1]);
        if !ok {
            return Err(EncodingError::NotIncreasing(variable));
        }
        Ok(Self {
            variable,
            thresholds,
        })
    }

    pub fn variable(&self) -> &str {
        &self.variable
    }

    pub fn thresholds(&self) -> &[f64] {
        &self.thresholds
    }

    pub fn column_name(&self, threshold: f64) -> String {
        threshold_name(&self.variable, threshold)
    }
}

pub fn threshold_name(variable: &str, threshold: f64) -> String {
    format!("{variable}>={threshold}")
}

pub fn level_name(variable: &str, level: &str) -> String {
    format!("{variable}={level}")
}

pub fn interaction_name(left: &str, right: &str) -> String {
    format!("{left}{INTERACTION_SEP}{right}")
}

/// One 0/1 column per threshold; entry `j` is 1 iff `value >= t_j`.
pub fn traffic_light(values: &[f64], thresholds: &ThresholdSet) -> Vec<Vec<f64>> {
    thresholds
        .thresholds
        .iter()
        .map(|&t| values.iter().map(|&x| if x >= t { 1.0 } else { 0.0 }).collect())
        .collect()
}

/// Where a design column came from.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Intercept,
    Linear {
        variable: String,
    },
    Threshold {
        variable: String,
        threshold: f64,
    },
    Level {
        variable: String,
        level: String,
        reference: String,
    },
    Interaction {
        left: String,
        right: String,
        squared: bool,
    },
}

impl Provenance {
    /// Source variable for main-effect columns; `None` for intercept and interactions.
    pub fn variable(&self) -> Option<&str> {
        match self {
            Provenance::Linear { variable }
            | Provenance::Threshold { variable, .. }
            | Provenance::Level { variable, .. } => Some(variable),
            Provenance::Intercept | Provenance::Interaction { .. } => None,
        }
    }

    pub fn is_intercept(&self) -> bool {
        matches!(self, Provenance::Intercept)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DesignColumn {
    pub name: String,
    pub provenance: Provenance,
}

/// Named `n x p` real matrix, stored column-major.
#[derive(Debug, Clone, PartialEq)]
pub struct DesignMatrix {
    columns: Vec<DesignColumn>,
    values: DMatrix<f64>,
}

impl DesignMatrix {
    pub fn new(columns: Vec<DesignColumn>, data: Vec<Vec<f64>>, n_rows: usize) -> Result<Self> {
        let mut seen = HashSet::new();
        for c in &columns {
            if !seen.insert(c.name.as_str()) {
                return Err(EncodingError::DuplicateName(c.name.clone()));
            }
        }
        for col in &data {
            if col.len() != n_rows {
                return Err(EncodingError::LengthMismatch {
                    expected: n_rows,
                    found: col.len(),
                });
            }
        }
        let values = DMatrix::from_iterator(n_rows, data.len(), data.into_iter().flatten());
        Ok(Self { columns, values })
    }

    /// Design of only an intercept column.
    pub fn intercept_only(n_rows: usize) -> Self {
        Self {
            columns: vec![DesignColumn {
                name: INTERCEPT.into(),
                provenance: Provenance::Intercept,
            }],
            values: DMatrix::from_element(n_rows, 1, 1.0),
        }
    }

    pub fn n_rows(&self) -> usize {
        self.values.nrows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.ncols()
    }

    pub fn columns(&self) -> &[DesignColumn] {
        &self.columns
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|c| c.name.as_str()).collect()
    }

    pub fn index_of(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    pub fn intercept_index(&self) -> Option<usize> {
        self.columns.iter().position(|c| c.provenance.is_intercept())
    }

    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.values
    }

    pub fn column(&self, j: usize) -> &[f64] {
        let n = self.n_rows();
        &self.values.as_slice()[j * n..(j + 1) * n]
    }

    pub fn column_by_name(&self, name: &str) -> Option<&[f64]> {
        self.index_of(name).map(|j| self.column(j))
    }

    pub fn row(&self, i: usize) -> Vec<f64> {
        self.values.row(i).iter().copied().collect()
    }

    /// Sub-design with the given columns, in the given order.
    pub fn select(&self, indices: &[usize]) -> DesignMatrix {
        DesignMatrix {
            columns: indices.iter().map(|&j| self.columns[j].clone()).collect(),
            values: self.values.select_columns(indices),
        }
    }

    /// Sub-design of the named columns.
    pub fn select_names(&self, names: &[&str]) -> Result<DesignMatrix> {
        let idx = names
            .iter()
            .map(|n| {
                self.index_of(n)
                    .ok_or_else(|| EncodingError::UnknownColumn(n.to_string()))
            })
            .collect::<Result<Vec<_>>>()?;
        Ok(self.select(&idx))
    }

    pub fn drop_column(&self, name: &str) -> Result<DesignMatrix> {
        let j = self
            .index_of(name)
            .ok_or_else(|| EncodingError::UnknownColumn(name.to_string()))?;
        if self.columns[j].provenance.is_intercept() {
            return Err(EncodingError::DropIntercept);
        }
        let keep: Vec<usize> = (0..self.n_cols()).filter(|&k| k != j).collect();
        Ok(self.select(&keep))
    }

    pub fn insert_column(
        &self,
        index: usize,
        column: DesignColumn,
        values: Vec<f64>,
    ) -> Result<DesignMatrix> {
        if index > self.n_cols() {
            return Err(EncodingError::BadIndex {
                index,
                len: self.n_cols(),
            });
        }
        if self.index_of(&column.name).is_some() {
            return Err(EncodingError::DuplicateName(column.name));
        }
        if values.len() != self.n_rows() {
            return Err(EncodingError::LengthMismatch {
                expected: self.n_rows(),
                found: values.len(),
            });
        }
        let mut columns = self.columns.clone();
        columns.insert(index, column);
        let mut data: Vec<Vec<f64>> = (0..self.n_cols()).map(|j| self.column(j).to_vec()).collect();
        data.insert(index, values);
        DesignMatrix::new(columns, data, self.n_rows())
    }

    pub fn append_column(&self, column: DesignColumn, values: Vec<f64>) -> Result<DesignMatrix> {
        self.insert_column(self.n_cols(), column, values)
    }

    /// Append the elementwise product of each named pair, named `a×b`.
    pub fn interactions(&self, pairs: &[(String, String)]) -> Result<DesignMatrix> {
        let mut out = self.clone();
        for (left, right) in pairs {
            let a = out
                .column_by_name(left)
                .ok_or_else(|| EncodingError::UnknownColumn(left.clone()))?;
            let b = out
                .column_by_name(right)
                .ok_or_else(|| EncodingError::UnknownColumn(right.clone()))?;
            let product: Vec<f64> = a.iter().zip(b).map(|(x, y)| x * y).collect();
            let column = DesignColumn {
                name: interaction_name(left, right),
                provenance: Provenance::Interaction {
                    left: left.clone(),
                    right: right.clone(),
                    squared: left == right,
                },
            };
            out = out.append_column(column, product)?;
        }
        Ok(out)
    }

    /// Indices of the columns that belong to the traffic-light family of `variable`.
    pub fn threshold_family(&self, variable: &str) -> Vec<usize> {
        self.columns
            .iter()
            .enumerate()
            .filter(|(_, c)| {
                matches!(&c.provenance, Provenance::Threshold { variable: v, .. } if v == variable)
            })
            .map(|(j, _)| j)
            .collect()
    }
}

/// A main-effect directive of a plan.
#[derive(Debug, Clone, PartialEq)]
pub enum Term {
    Linear(String),
    TrafficLight(ThresholdSet),
    Categorical(String),
}

impl Term {
    pub fn variable(&self) -> &str {
        match self {
            Term::Linear(v) | Term::Categorical(v) => v,
            Term::TrafficLight(t) => t.variable(),
        }
    }
}

/// Reference level first, then the dummy-coded levels in column order.
#[derive(Debug, Clone, PartialEq)]
pub struct Levels {
    pub reference: String,
    pub others: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EncodingPlan {
    pub terms: Vec<Term>,
    pub interactions: Vec<(String, String)>,
    pub intercept: bool,
    pub levels: BTreeMap<String, Levels>,
}

impl Default for EncodingPlan {
    fn default() -> Self {
        Self {
            terms: Vec::new(),
            interactions: Vec::new(),
            intercept: true,
            levels: BTreeMap::new(),
        }
    }
}

impl EncodingPlan {
    pub fn with_term(mut self, term: Term) -> Self {
        self.terms.push(term);
        self
    }

    pub fn with_interaction(mut self, left: impl Into<String>, right: impl Into<String>) -> Self {
        self.interactions.push((left.into(), right.into()));
        self
    }

    /// Pin categorical levels from `data` for every categorical term not
    /// already pinned. Reference is the most frequent level, ties broken by
    /// lexicographic order; other levels follow lexicographically.
    pub fn resolve(&self, data: &Dataset) -> Result<EncodingPlan> {
        let mut plan = self.clone();
        for term in &self.terms {
            if let Term::Categorical(var) = term {
                if plan.levels.contains_key(var) {
                    continue;
                }
                let column = data
                    .column(var)
                    .ok_or_else(|| EncodingError::UnknownVariable(var.clone()))?;
                let mut counts: BTreeMap<String, usize> = BTreeMap::new();
                for i in 0..column.len() {
                    *counts.entry(column.render(i)).or_default() += 1;
                }
                let Some(max) = counts.values().copied().max() else {
                    return Err(EncodingError::UnknownVariable(var.clone()));
                };
                // BTreeMap iterates lexicographically, so the first hit wins ties.
                let reference = counts
                    .iter()
                    .find(|(_, &c)| c == max)
                    .map(|(l, _)| l.clone())
                    .unwrap_or_default();
                let others = counts.keys().filter(|l| **l != reference).cloned().collect();
                plan.levels
                    .insert(var.clone(), Levels { reference, others });
            }
        }
        Ok(plan)
    }

    pub fn parse(text: &str) -> Result<EncodingPlan> {
        let mut plan = EncodingPlan::default();
        for (i, raw) in text.lines().enumerate() {
            let line_no = i + 1;
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let syntax = |message: &str| EncodingError::Syntax {
                line: line_no,
                message: message.to_string(),
            };
            let (keyword, rest) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let rest = rest.trim();
            match keyword {
                "traffic_light" => {
                    let (var, list) = rest
                        .split_once(':')
                        .ok_or_else(|| syntax("expected `traffic_light <var>: t1,t2,...`"))?;
                    let thresholds = parse_list(list)
                        .iter()
                        .map(|s| s.parse::<f64>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| syntax("thresholds must be numbers"))?;
                    plan.terms
                        .push(Term::TrafficLight(ThresholdSet::new(var.trim(), thresholds)?));
                }
                "categorical" | "linear" => {
                    if rest.is_empty() || rest.contains(char::is_whitespace) {
                        return Err(syntax("expected a single variable name"));
                    }
                    plan.terms.push(if keyword == "linear" {
                        Term::Linear(rest.to_string())
                    } else {
                        Term::Categorical(rest.to_string())
                    });
                }
                "interact" => {
                    let parts: Vec<&str> = rest.split_whitespace().collect();
                    if parts.len() != 2 {
                        return Err(syntax("expected `interact <colA> <colB>`"));
                    }
                    plan.interactions
                        .push((parts[0].to_string(), parts[1].to_string()));
                }
                "levels" => {
                    let (var, list) = rest
                        .split_once(':')
                        .ok_or_else(|| syntax("expected `levels <var>: ref,l2,...`"))?;
                    let mut levels = parse_list(list);
                    if levels.is_empty() {
                        return Err(syntax("levels list is empty"));
                    }
                    let reference = levels.remove(0);
                    plan.levels.insert(
                        var.trim().to_string(),
                        Levels {
                            reference,
                            others: levels,
                        },
                    );
                }
                "intercept" => {
                    plan.intercept = match rest {
                        "on" => true,
                        "off" => false,
                        _ => return Err(syntax("expected `intercept on` or `intercept off`")),
                    };
                }
                _ => return Err(syntax(&format!("unknown directive `{keyword}`"))),
            }
        }
        Ok(plan)
    }

    /// Text form accepted by [`EncodingPlan::parse`].
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        if !self.intercept {
            out.push_str("intercept off\n");
        }
        for term in &self.terms {
            match term {
                Term::Linear(v) => writeln!(out, "linear {v}"),
                Term::Categorical(v) => writeln!(out, "categorical {v}"),
                Term::TrafficLight(t) => {
                    let list: Vec<String> = t.thresholds.iter().map(|x| format!("{x}")).collect();
                    writeln!(out, "traffic_light {}: {}", t.variable, list.join(","))
                }
            }
            .expect("write to String");
        }
        for (var, levels) in &self.levels {
            let mut all = vec![levels.reference.clone()];
            all.extend(levels.others.iter().cloned());
            writeln!(out, "levels {var}: {}", all.join(",")).expect("write to String");
        }
        for (a, b) in &self.interactions {
            writeln!(out, "interact {a} {b}").expect("write to String");
        }
        out
    }
}

fn parse_list(list: &str) -> Vec<String> {
    list.split(',')
        .map(str::trim)
        .filter(|s| !s.is_empty())
        .map(str::to_string)
        .collect()
}

fn numeric_column<'a>(data: &'a Dataset, var: &str) -> Result<&'a [f64]> {
    match data.column(var) {
        None => Err(EncodingError::UnknownVariable(var.to_string())),
        Some(ColumnData::Text(_)) => Err(EncodingError::NotNumeric(var.to_string())),
        Some(ColumnData::Numeric(v)) => Ok(v),
    }
}

/// Column order: intercept, each term in plan order, then interactions.
pub fn build_design(data: &Dataset, plan: &EncodingPlan) -> Result<DesignMatrix> {
    let plan = plan.resolve(data)?;
    let n = data.n_rows();
    let mut columns = Vec::new();
    let mut values: Vec<Vec<f64>> = Vec::new();
    if plan.intercept {
        columns.push(DesignColumn {
            name: INTERCEPT.into(),
            provenance: Provenance::Intercept,
        });
        values.push(vec![1.0; n]);
    }
    for term in &plan.terms {
        match term {
            Term::Linear(var) => {
                values.push(numeric_column(data, var)?.to_vec());
                columns.push(DesignColumn {
                    name: var.clone(),
                    provenance: Provenance::Linear {
                        variable: var.clone(),
                    },
                });
            }
            Term::TrafficLight(set) => {
                let x = numeric_column(data, &set.variable)?;
                for (&t, col) in set.thresholds.iter().zip(traffic_light(x, set)) {
                    columns.push(DesignColumn {
                        name: set.column_name(t),
                        provenance: Provenance::Threshold {
                            variable: set.variable.clone(),
                            threshold: t,
                        },
                    });
                    values.push(col);
                }
            }
            Term::Categorical(var) => {
                let column = data
                    .column(var)
                    .ok_or_else(|| EncodingError::UnknownVariable(var.clone()))?;
                let levels = &plan.levels[var];
                let index: HashMap<&str, usize> = levels
                    .others
                    .iter()
                    .enumerate()
                    .map(|(k, l)| (l.as_str(), k))
                    .collect();
                let mut dummies = vec![vec![0.0; n]; levels.others.len()];
                for (i, cell) in (0..n).map(|i| column.render(i)).enumerate() {
                    if cell == levels.reference {
                        continue;
                    }
                    match index.get(cell.as_str()) {
                        Some(&k) => dummies[k][i] = 1.0,
                        None => {
                            return Err(EncodingError::UnseenLevel {
                                variable: var.clone(),
                                level: cell,
                            })
                        }
                    }
                }
                for (level, col) in levels.others.iter().zip(dummies) {
                    columns.push(DesignColumn {
                        name: level_name(var, level),
                        provenance: Provenance::Level {
                            variable: var.clone(),
                            level: level.clone(),
                            reference: levels.reference.clone(),
                        },
                    });
                    values.push(col);
                }
            }
        }
    }
    let design = DesignMatrix::new(columns, values, n)?;
    design.interactions(&plan.interactions)
}
