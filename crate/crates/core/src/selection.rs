//! Stepwise model selection for logistic regression.
//!
//! AIC mode greedily applies whichever single add or remove lowers
//! `AIC = 2p - 2l` the most and stops when no move lowers it. P-value mode
//! adds the candidate with the smallest p-value below `alpha_in`, then drops
//! the included term with the largest p-value above `alpha_out`, until
//! neither applies. Single columns are judged by their Wald p-value; groups
//! of several columns by a likelihood-ratio chi-square test.
//!
//! Candidate fits inside a step are independent and may run in parallel.
//! The move is then chosen by a sequential scan in design-column order, so
//! the earliest column wins ties whatever the execution mode.
//!
//! Only converged fits are eligible. A candidate whose fit fails (singular
//! design, separation, no convergence) is skipped. [`exhaustive_best_aic`]
//! applies the same rule, which makes it a valid oracle for the greedy search.

use std::collections::{BTreeSet, HashMap};
use std::fmt::{self, Write as _};

use thiserror::Error;

use crate::encoding::{DesignMatrix, Provenance};
use crate::exec::Execution;
use crate::glm::{fit, wald_p_values, FitError, FitOptions, LogisticFit};
use crate::special::chi_square_sf;

/// Hard ceiling on candidates for the exhaustive search (4096 fits).
pub const EXHAUSTIVE_LIMIT: usize = 12;

#[derive(Debug, Error, PartialEq)]
pub enum SelectionError {
    #[error("design has no intercept column")]
    MissingIntercept,
    #[error("starting model could not be fitted: {0}")]
    InitialFit(FitError),
    #[error("starting model did not converge")]
    InitialNotConverged,
    #[error("{found} candidate columns exceed the exhaustive limit of {limit}")]
    TooManyColumns { found: usize, limit: usize },
    #[error("invalid selection config: {0}")]
    InvalidConfig(String),
    #[error("no subset produced a converged fit")]
    NoValidSubset,
}

pub type Result<T> = std::result::Result<T, SelectionError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    Forward,
    Backward,
    Bidirectional,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Criterion {
    Aic,
    PValue,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Granularity {
    /// Every design column is its own candidate. Dropping one traffic-light
    /// dummy merges the two adjacent bands.
    SingleColumn,
    /// All columns of one source variable move together; interactions are
    /// only offered once both parents are in the model.
    VariableGroup,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectionConfig {
    pub direction: Direction,
    pub criterion: Criterion,
    pub alpha_in: f64,
    pub alpha_out: f64,
    pub granularity: Granularity,
    pub max_steps: usize,
    pub execution: Execution,
}

impl Default for SelectionConfig {
    fn default() -> Self {
        Self {
            direction: Direction::Bidirectional,
            criterion: Criterion::Aic,
            alpha_in: 0.10,
            alpha_out: 0.10,
            granularity: Granularity::SingleColumn,
            max_steps: 100,
            execution: Execution::default(),
        }
    }
}

impl SelectionConfig {
    pub fn validate(&self) -> Result<()> {
        let alpha_ok = |a: f64| a > 0.0 && a <= 1.0;
        if !alpha_ok(self.alpha_in) || !alpha_ok(self.alpha_out) {
            return Err(SelectionError::InvalidConfig("alpha must lie in (0, 1]".into()));
        }
        if self.max_steps < 1 {
            return Err(SelectionError::InvalidConfig("max_steps must be at least 1".into()));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StepAction {
    Add,
    Remove,
}

impl fmt::Display for StepAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StepAction::Add => "add",
            StepAction::Remove => "remove",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionStep {
    pub action: StepAction,
    pub columns: Vec<String>,
    pub aic_before: f64,
    pub aic_after: f64,
    pub log_likelihood_after: f64,
    pub n_params_after: usize,
    /// Test p-value that justified the move (p-value mode only).
    pub p_value: Option<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub initial_columns: Vec<String>,
    pub steps: Vec<SelectionStep>,
    pub final_columns: Vec<String>,
    pub warnings: Vec<String>,
}

impl SelectionTrace {
    /// Apply the steps to the initial model; equals `final_columns` as a set.
    pub fn replay(&self) -> BTreeSet<String> {
        let mut model: BTreeSet<String> = self.initial_columns.iter().cloned().collect();
        for step in &self.steps {
            for c in &step.columns {
                match step.action {
                    StepAction::Add => model.insert(c.clone()),
                    StepAction::Remove => model.remove(c),
                };
            }
        }
        model
    }

    /// Versioned tab-separated log, one step per line.
    pub fn to_text(&self) -> String {
        let mut s = String::from("# costcut-trace v1\n");
        let _ = writeln!(s, "# initial\t{}", self.initial_columns.join(","));
        s.push_str("step\taction\tcolumns\taic_before\taic_after\tlog_likelihood\tn_params\tp_value\n");
        for (i, st) in self.steps.iter().enumerate() {
            let _ = writeln!(
                s,
                "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
                i + 1,
                st.action,
                st.columns.join(","),
                st.aic_before,
                st.aic_after,
                st.log_likelihood_after,
                st.n_params_after,
                st.p_value.map_or("NA".into(), |p| format!("{p}"))
            );
        }
        let _ = writeln!(s, "# final\t{}", self.final_columns.join(","));
        for w in &self.warnings {
            let _ = writeln!(s, "# warning\t{w}");
        }
        s
    }
}

/// Candidate units: each is a sorted list of design column indices.
fn candidate_groups(design: &DesignMatrix, granularity: Granularity) -> Vec<Vec<usize>> {
    let mut groups: Vec<Vec<usize>> = Vec::new();
    let mut by_variable: HashMap<String, usize> = HashMap::new();
    for (j, col) in design.columns().iter().enumerate() {
        if col.provenance.is_intercept() {
            continue;
        }
        match (granularity, col.provenance.variable()) {
            (Granularity::VariableGroup, Some(var)) => {
                if let Some(&g) = by_variable.get(var) {
                    groups[g].push(j);
                } else {
                    by_variable.insert(var.to_string(), groups.len());
                    groups.push(vec![j]);
                }
            }
            _ => groups.push(vec![j]),
        }
    }
    groups
}

/// For each group, the groups holding its interaction parents (variable-group mode).
fn parent_groups(design: &DesignMatrix, groups: &[Vec<usize>]) -> Vec<Vec<usize>> {
    let mut group_of = vec![usize::MAX; design.n_cols()];
    for (g, cols) in groups.iter().enumerate() {
        for &j in cols {
            group_of[j] = g;
        }
    }
    groups
        .iter()
        .map(|cols| {
            let mut parents = BTreeSet::new();
            for &j in cols {
                if let Provenance::Interaction { left, right, .. } = &design.columns()[j].provenance {
                    for name in [left, right] {
                        if let Some(k) = design.index_of(name) {
                            if group_of[k] != usize::MAX {
                                parents.insert(group_of[k]);
                            }
                        }
                    }
                }
            }
            parents.into_iter().collect()
        })
        .collect()
}

struct Search<'a> {
    design: &'a DesignMatrix,
    outcome: &'a [u8],
    options: &'a FitOptions,
    intercept: usize,
    groups: Vec<Vec<usize>>,
    parents: Vec<Vec<usize>>,
    heredity: bool,
}

impl Search<'_> {
    fn columns_of(&self, model: &BTreeSet<usize>) -> Vec<usize> {
        let mut cols = vec![self.intercept];
        for &g in model {
            cols.extend_from_slice(&self.groups[g]);
        }
        cols.sort_unstable();
        cols
    }

    fn names(&self, cols: &[usize]) -> Vec<String> {
        cols.iter()
            .map(|&j| self.design.columns()[j].name.clone())
            .collect()
    }

    fn fit_model(&self, model: &BTreeSet<usize>) -> std::result::Result<LogisticFit, FitError> {
        let sub = self.design.select(&self.columns_of(model));
        fit(&sub, self.outcome, self.options)
    }

    fn can_add(&self, model: &BTreeSet<usize>, g: usize) -> bool {
        !model.contains(&g) && (!self.heredity || self.parents[g].iter().all(|p| model.contains(p)))
    }

    fn can_remove(&self, model: &BTreeSet<usize>, g: usize) -> bool {
        model.contains(&g)
            && (!self.heredity
                || !model
                    .iter()
                    .any(|&other| other != g && self.parents[other].contains(&g)))
    }

    /// p-value for the group `g` given fits with and without it.
    fn group_p_value(&self, g: usize, with: &LogisticFit, without_ll: f64) -> Option<f64> {
        let cols = &self.groups[g];
        if cols.len() == 1 {
            let name = &self.design.columns()[cols[0]].name;
            let k = with.column_names.iter().position(|c| c == name)?;
            wald_p_values(with).ok().map(|p| p[k])
        } else {
            let stat = (2.0 * (with.log_likelihood - without_ll)).max(0.0);
            Some(chi_square_sf(stat, cols.len()))
        }
    }
}

fn usable(result: std::result::Result<LogisticFit, FitError>) -> Option<LogisticFit> {
    result.ok().filter(|f| f.converged)
}

/// Stepwise search over the non-intercept columns of `design`.
pub fn stepwise(
    design: &DesignMatrix,
    outcome: &[u8],
    config: &SelectionConfig,
    fit_options: &FitOptions,
) -> Result<(LogisticFit, SelectionTrace)> {
    config.validate()?;
    let intercept = design.intercept_index().ok_or(SelectionError::MissingIntercept)?;
    let groups = candidate_groups(design, config.granularity);
    let parents = parent_groups(design, &groups);
    let search = Search {
        design,
        outcome,
        options: fit_options,
        intercept,
        heredity: config.granularity == Granularity::VariableGroup,
        groups,
        parents,
    };

    let mut model: BTreeSet<usize> = match config.direction {
        Direction::Backward => (0..search.groups.len()).collect(),
        Direction::Forward | Direction::Bidirectional => BTreeSet::new(),
    };
    let mut current = search.fit_model(&model).map_err(SelectionError::InitialFit)?;
    if !current.converged {
        return Err(SelectionError::InitialNotConverged);
    }
    let initial_columns = search.names(&search.columns_of(&model));
    let allow_add = config.direction != Direction::Backward;
    let allow_remove = config.direction != Direction::Forward;

    let mut steps = Vec::new();
    let mut warnings = Vec::new();
    let mut visited: BTreeSet<BTreeSet<usize>> = BTreeSet::new();
    visited.insert(model.clone());

    'outer: loop {
        if steps.len() >= config.max_steps {
            warnings.push(format!("stopped after max_steps = {}", config.max_steps));
            break;
        }
        let moves: Vec<(StepAction, usize)> = match config.criterion {
            Criterion::Aic => (0..search.groups.len())
                .filter_map(|g| {
                    if allow_add && search.can_add(&model, g) {
                        Some((StepAction::Add, g))
                    } else if allow_remove && search.can_remove(&model, g) {
                        Some((StepAction::Remove, g))
                    } else {
                        None
                    }
                })
                .collect(),
            Criterion::PValue => Vec::new(),
        };

        let chosen: Vec<(StepAction, usize, LogisticFit, Option<f64>)> = match config.criterion {
            Criterion::Aic => {
                let fits = config.execution.map(&moves, |&(action, g)| {
                    usable(search.fit_model(&toggled(&model, action, g)))
                });
                let mut best: Option<(usize, &LogisticFit)> = None;
                for (k, f) in fits.iter().enumerate() {
                    if let Some(f) = f {
                        if best.is_none_or(|(_, b)| f.aic < b.aic) {
                            best = Some((k, f));
                        }
                    }
                }
                match best {
                    Some((k, f)) if f.aic < current.aic => {
                        vec![(moves[k].0, moves[k].1, f.clone(), None)]
                    }
                    _ => break 'outer,
                }
            }
            Criterion::PValue => {
                let mut chosen = Vec::new();
                let mut working = model.clone();
                let mut working_fit = current.clone();
                if allow_add {
                    let adds: Vec<usize> = (0..search.groups.len())
                        .filter(|&g| search.can_add(&working, g))
                        .collect();
                    let fits = config.execution.map(&adds, |&g| {
                        usable(search.fit_model(&toggled(&working, StepAction::Add, g)))
                    });
                    let mut best: Option<(usize, f64)> = None;
                    for (k, f) in fits.iter().enumerate() {
                        let Some(f) = f else { continue };
                        if let Some(p) = search.group_p_value(adds[k], f, working_fit.log_likelihood) {
                            if best.is_none_or(|(_, bp)| p < bp) {
                                best = Some((k, p));
                            }
                        }
                    }
                    if let Some((k, p)) = best.filter(|&(_, p)| p < config.alpha_in) {
                        let f = fits[k].clone().expect("scored fits are usable");
                        working = toggled(&working, StepAction::Add, adds[k]);
                        working_fit = f.clone();
                        chosen.push((StepAction::Add, adds[k], f, Some(p)));
                    }
                }
                if allow_remove {
                    let removes: Vec<usize> = (0..search.groups.len())
                        .filter(|&g| search.can_remove(&working, g))
                        .collect();
                    let fits = config.execution.map(&removes, |&g| {
                        usable(search.fit_model(&toggled(&working, StepAction::Remove, g)))
                    });
                    let mut worst: Option<(usize, f64)> = None;
                    for (k, f) in fits.iter().enumerate() {
                        let Some(f) = f else { continue };
                        if let Some(p) = search.group_p_value(removes[k], &working_fit, f.log_likelihood) {
                            if worst.is_none_or(|(_, wp)| p > wp) {
                                worst = Some((k, p));
                            }
                        }
                    }
                    if let Some((k, p)) = worst.filter(|&(_, p)| p > config.alpha_out) {
                        let f = fits[k].clone().expect("scored fits are usable");
                        chosen.push((StepAction::Remove, removes[k], f, Some(p)));
                    }
                }
                if chosen.is_empty() {
                    break 'outer;
                }
                chosen
            }
        };

        for (action, g, next_fit, p_value) in chosen {
            let next = toggled(&model, action, g);
            if !visited.insert(next.clone()) {
                warnings.push(format!(
                    "cycle: {} {} would revisit an earlier model",
                    action,
                    search.names(&search.groups[g]).join(",")
                ));
                break 'outer;
            }
            steps.push(SelectionStep {
                action,
                columns: search.names(&search.groups[g]),
                aic_before: current.aic,
                aic_after: next_fit.aic,
                log_likelihood_after: next_fit.log_likelihood,
                n_params_after: next_fit.n_params(),
                p_value,
            });
            model = next;
            current = next_fit;
        }
    }

    let trace = SelectionTrace {
        initial_columns,
        steps,
        final_columns: current.column_names.clone(),
        warnings,
    };
    Ok((current, trace))
}

fn toggled(model: &BTreeSet<usize>, action: StepAction, g: usize) -> BTreeSet<usize> {
    let mut next = model.clone();
    match action {
        StepAction::Add => next.insert(g),
        StepAction::Remove => next.remove(&g),
    };
    next
}

#[derive(Debug, Clone, PartialEq)]
pub struct BestSubset {
    /// Selected columns in design order, intercept included.
    pub columns: Vec<String>,
    pub aic: f64,
    pub fit: LogisticFit,
    /// Subsets skipped because their fit failed or did not converge.
    pub skipped: usize,
}

/// Fit every subset of the non-intercept columns and return the lowest AIC.
/// Subsets are scanned in bitmask order; the first minimum wins.
pub fn exhaustive_best_aic(
    design: &DesignMatrix,
    outcome: &[u8],
    max_columns: usize,
    fit_options: &FitOptions,
    exec: Execution,
) -> Result<BestSubset> {
    let intercept = design.intercept_index().ok_or(SelectionError::MissingIntercept)?;
    let candidates: Vec<usize> = (0..design.n_cols()).filter(|&j| j != intercept).collect();
    let limit = max_columns.min(EXHAUSTIVE_LIMIT);
    if candidates.len() > limit {
        return Err(SelectionError::TooManyColumns {
            found: candidates.len(),
            limit,
        });
    }
    let masks = 1usize << candidates.len();
    let fits = exec.map_range(masks, |mask| {
        let mut cols = vec![intercept];
        cols.extend(
            candidates
                .iter()
                .enumerate()
                .filter(|(bit, _)| mask & (1 << bit) != 0)
                .map(|(_, &j)| j),
        );
        cols.sort_unstable();
        usable(fit(&design.select(&cols), outcome, fit_options))
    });
    let skipped = fits.iter().filter(|f| f.is_none()).count();
    let best = fits
        .into_iter()
        .flatten()
        .reduce(|best, f| if f.aic < best.aic { f } else { best })
        .ok_or(SelectionError::NoValidSubset)?;
    Ok(BestSubset {
        columns: best.column_names.clone(),
        aic: best.aic,
        fit: best,
        skipped,
    })
}
