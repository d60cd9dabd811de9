//! Binary logistic regression fitted by maximum likelihood.
//!
//! The optimizer is Newton-Raphson, which for the canonical logit link is
//! exactly iteratively reweighted least squares: each iteration solves
//! `(X'WX + ridge*D) delta = X'(y - p) - ridge*D*beta` with `W = diag(p(1-p))`
//! and `D` the identity with a zero on the intercept. A step that raises the
//! (penalized) deviance is halved, at most [`MAX_STEP_HALVINGS`] times.
//! Iteration stops when the absolute deviance change falls below the
//! tolerance or the iteration budget runs out. A coefficient crossing the
//! separation bound is recorded as a warning and, without a ridge penalty,
//! marks the fit unconverged; iteration still runs to the end so the
//! trajectory is in `history`.

use std::fmt;

use nalgebra::{DMatrix, DVector};
use thiserror::Error;

use crate::encoding::{DesignMatrix, Provenance};
use crate::exec::Execution;
use crate::special::two_sided_normal_p;

pub const MAX_STEP_HALVINGS: usize = 10;

/// Squared residual norm (of a unit-normalized column) below which the
/// column is treated as a linear combination of earlier columns.
pub const COLLINEARITY_TOLERANCE: f64 = 1e-10;

#[derive(Debug, Error, PartialEq)]
pub enum FitError {
    #[error("design has {rows} rows but outcome has {outcome} values")]
    LengthMismatch { rows: usize, outcome: usize },
    #[error("outcome must contain both classes (found {positives} ones in {n} rows)")]
    ConstantOutcome { positives: usize, n: usize },
    #[error("outcome values must be 0 or 1 (row {row})")]
    NonBinaryOutcome { row: usize },
    #[error("information matrix is singular; offending columns: {}", .columns.join(", "))]
    Singular { columns: Vec<String> },
    #[error("invalid fit options: {0}")]
    InvalidOptions(String),
    #[error("fit did not converge; refit with more iterations or a ridge penalty")]
    NotConverged,
    #[error("row has {found} values but the model has {expected} coefficients")]
    Arity { expected: usize, found: usize },
    #[error("probability {value} at row {row} is outside [0, 1]")]
    InvalidProbability { row: usize, value: f64 },
    #[error("probability {value} at row {row} contradicts outcome {outcome}: log-likelihood is -inf")]
    ImpossibleOutcome { row: usize, value: f64, outcome: u8 },
    #[error("design columns {found:?} do not match model columns {expected:?}")]
    ColumnMismatch {
        expected: Vec<String>,
        found: Vec<String>,
    },
}

pub type Result<T> = std::result::Result<T, FitError>;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FitOptions {
    pub max_iterations: usize,
    pub deviance_tolerance: f64,
    pub ridge: f64,
    pub separation_coefficient_bound: f64,
}

impl Default for FitOptions {
    fn default() -> Self {
        Self {
            max_iterations: 50,
            deviance_tolerance: 1e-8,
            ridge: 0.0,
            separation_coefficient_bound: 15.0,
        }
    }
}

impl FitOptions {
    pub fn validate(&self) -> Result<()> {
        if self.max_iterations < 1 {
            return Err(FitError::InvalidOptions("max_iterations must be at least 1".into()));
        }
        if !(self.deviance_tolerance > 0.0) {
            return Err(FitError::InvalidOptions("deviance_tolerance must be positive".into()));
        }
        if !(self.ridge >= 0.0) || !self.ridge.is_finite() {
            return Err(FitError::InvalidOptions("ridge must be a nonnegative number".into()));
        }
        if !(self.separation_coefficient_bound > 0.0) {
            return Err(FitError::InvalidOptions(
                "separation_coefficient_bound must be positive".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum FitWarning {
    /// Coefficients crossed the separation bound; the listed columns are the culprits.
    Separation { columns: Vec<String>, max_abs_coefficient: f64 },
    NotConverged { iterations: usize },
    StepHalvingExhausted { iteration: usize },
}

impl fmt::Display for FitWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FitWarning::Separation {
                columns,
                max_abs_coefficient,
            } => write!(
                f,
                "separation: |coefficient| reached {max_abs_coefficient:.3} on {}",
                columns.join(", ")
            ),
            FitWarning::NotConverged { iterations } => {
                write!(f, "no convergence after {iterations} iterations")
            }
            FitWarning::StepHalvingExhausted { iteration } => write!(
                f,
                "step halving exhausted at iteration {iteration}; deviance could not be reduced"
            ),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IterationRecord {
    pub iteration: usize,
    pub deviance: f64,
    pub max_abs_coefficient: f64,
    pub step_halvings: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LogisticFit {
    pub column_names: Vec<String>,
    pub coefficients: Vec<f64>,
    pub log_likelihood: f64,
    /// `2p - 2 * log_likelihood`, computed once at construction.
    pub aic: f64,
    pub covariance: DMatrix<f64>,
    pub iterations: usize,
    pub converged: bool,
    pub warnings: Vec<FitWarning>,
    pub history: Vec<IterationRecord>,
    pub n_obs: usize,
    pub n_positive: usize,
    pub intercept: Option<usize>,
    pub options: FitOptions,
}

impl LogisticFit {
    pub fn n_params(&self) -> usize {
        self.coefficients.len()
    }

    pub fn std_errors(&self) -> Vec<f64> {
        (0..self.n_params())
            .map(|j| self.covariance[(j, j)].max(0.0).sqrt())
            .collect()
    }

    pub fn coefficient(&self, name: &str) -> Option<f64> {
        self.column_names
            .iter()
            .position(|n| n == name)
            .map(|j| self.coefficients[j])
    }

    /// Log-odds for each row of a design whose columns match this fit by name.
    pub fn log_odds_design(&self, design: &DesignMatrix, exec: Execution) -> Result<Vec<f64>> {
        let names = design.names();
        let idx: Option<Vec<usize>> = self
            .column_names
            .iter()
            .map(|n| names.iter().position(|m| m == n))
            .collect();
        let idx = idx.ok_or_else(|| FitError::ColumnMismatch {
            expected: self.column_names.clone(),
            found: names.iter().map(|s| s.to_string()).collect(),
        })?;
        let columns: Vec<&[f64]> = idx.iter().map(|&j| design.column(j)).collect();
        Ok(exec.map_range(design.n_rows(), |i| {
            columns
                .iter()
                .zip(&self.coefficients)
                .map(|(col, b)| col[i] * b)
                .sum()
        }))
    }

    pub fn probabilities_design(&self, design: &DesignMatrix, exec: Execution) -> Result<Vec<f64>> {
        Ok(self
            .log_odds_design(design, exec)?
            .into_iter()
            .map(probability)
            .collect())
    }
}

/// Inverse logit, evaluated on the branch that cannot overflow.
pub fn probability(log_odds: f64) -> f64 {
    if log_odds >= 0.0 {
        1.0 / (1.0 + (-log_odds).exp())
    } else {
        let e = log_odds.exp();
        e / (1.0 + e)
    }
}

pub fn logit(p: f64) -> f64 {
    (p / (1.0 - p)).ln()
}

/// `beta . row`.
pub fn log_odds(fit: &LogisticFit, row: &[f64]) -> Result<f64> {
    if row.len() != fit.n_params() {
        return Err(FitError::Arity {
            expected: fit.n_params(),
            found: row.len(),
        });
    }
    Ok(row.iter().zip(&fit.coefficients).map(|(x, b)| x * b).sum())
}

/// Bernoulli log-likelihood `sum y ln p + (1 - y) ln(1 - p)`.
pub fn log_likelihood(probabilities: &[f64], outcome: &[u8]) -> Result<f64> {
    if probabilities.len() != outcome.len() {
        return Err(FitError::LengthMismatch {
            rows: probabilities.len(),
            outcome: outcome.len(),
        });
    }
    let mut total = 0.0;
    for (row, (&p, &y)) in probabilities.iter().zip(outcome).enumerate() {
        if !(0.0..=1.0).contains(&p) {
            return Err(FitError::InvalidProbability { row: row + 1, value: p });
        }
        let term = match y {
            1 => p.ln(),
            0 => (-p).ln_1p(),
            _ => return Err(FitError::NonBinaryOutcome { row: row + 1 }),
        };
        if term == f64::NEG_INFINITY {
            return Err(FitError::ImpossibleOutcome {
                row: row + 1,
                value: p,
                outcome: y,
            });
        }
        total += term;
    }
    Ok(total)
}

/// `2p - 2l` of a converged fit.
pub fn aic(fit: &LogisticFit) -> Result<f64> {
    if !fit.converged {
        return Err(FitError::NotConverged);
    }
    Ok(fit.aic)
}

pub fn aic_value(n_params: usize, log_likelihood: f64) -> f64 {
    2.0 * n_params as f64 - 2.0 * log_likelihood
}

/// Two-sided Wald p-values from `z = beta / se`.
pub fn wald_p_values(fit: &LogisticFit) -> Result<Vec<f64>> {
    if !fit.converged {
        return Err(FitError::NotConverged);
    }
    let se = wald_std_errors(fit)?;
    Ok(fit
        .coefficients
        .iter()
        .zip(se)
        .map(|(b, s)| two_sided_normal_p(b / s))
        .collect())
}

fn wald_std_errors(fit: &LogisticFit) -> Result<Vec<f64>> {
    let mut bad = Vec::new();
    let mut se = Vec::with_capacity(fit.n_params());
    for j in 0..fit.n_params() {
        let v = fit.covariance[(j, j)];
        if !(v > 0.0) || !v.is_finite() {
            bad.push(fit.column_names[j].clone());
        }
        se.push(v.sqrt());
    }
    if bad.is_empty() {
        Ok(se)
    } else {
        Err(FitError::Singular { columns: bad })
    }
}

// ln(1 + e^t) without overflow.
fn softplus(t: f64) -> f64 {
    t.max(0.0) + (-t.abs()).exp().ln_1p()
}

fn log_likelihood_from_eta(eta: &DVector<f64>, y: &DVector<f64>) -> f64 {
    eta.iter()
        .zip(y.iter())
        .map(|(&e, &yi)| if yi == 1.0 { -softplus(-e) } else { -softplus(e) })
        .sum()
}

/// Columns that are (numerically) linear combinations of earlier columns,
/// found by an incremental Cholesky factorization of the normalized Gram matrix.
pub fn dependent_columns(x: &DMatrix<f64>) -> Vec<usize> {
    let p = x.ncols();
    let norms: Vec<f64> = (0..p).map(|j| x.column(j).norm()).collect();
    let mut accepted: Vec<usize> = Vec::new();
    let mut factor: Vec<Vec<f64>> = Vec::new();
    let mut dependent = Vec::new();
    for j in 0..p {
        if norms[j] == 0.0 || !norms[j].is_finite() {
            dependent.push(j);
            continue;
        }
        let gram = |a: usize, b: usize| x.column(a).dot(&x.column(b)) / (norms[a] * norms[b]);
        let mut z = Vec::with_capacity(accepted.len());
        for (k, &a) in accepted.iter().enumerate() {
            let partial: f64 = (0..k).map(|m| factor[k][m] * z[m]).sum();
            z.push((gram(a, j) - partial) / factor[k][k]);
        }
        let residual = 1.0 - z.iter().map(|v| v * v).sum::<f64>();
        if residual < COLLINEARITY_TOLERANCE {
            dependent.push(j);
        } else {
            z.push(residual.sqrt());
            factor.push(z);
            accepted.push(j);
        }
    }
    dependent
}

struct Evaluation {
    eta: DVector<f64>,
    penalized_deviance: f64,
    log_likelihood: f64,
}

struct Problem<'a> {
    x: &'a DMatrix<f64>,
    y: DVector<f64>,
    penalty: DVector<f64>,
}

impl Problem<'_> {
    fn evaluate(&self, beta: &DVector<f64>) -> Evaluation {
        let eta = self.x * beta;
        let ll = log_likelihood_from_eta(&eta, &self.y);
        let pen: f64 = beta
            .iter()
            .zip(self.penalty.iter())
            .map(|(b, d)| d * b * b)
            .sum();
        Evaluation {
            eta,
            penalized_deviance: -2.0 * ll + pen,
            log_likelihood: ll,
        }
    }

    /// Penalized information matrix and score at `eta`.
    fn newton_system(&self, beta: &DVector<f64>, eta: &DVector<f64>) -> (DMatrix<f64>, DVector<f64>) {
        let p = eta.map(probability);
        let w = p.map(|pi| pi * (1.0 - pi));
        let mut xw = self.x.clone();
        for mut col in xw.column_iter_mut() {
            col.component_mul_assign(&w);
        }
        let mut info = self.x.tr_mul(&xw);
        let mut score = self.x.tr_mul(&(&self.y - &p));
        for j in 0..beta.len() {
            info[(j, j)] += self.penalty[j];
            score[j] -= self.penalty[j] * beta[j];
        }
        (info, score)
    }
}

/// Fit by Newton/IRLS. Non-convergence and separation are reported through
/// `converged` and `warnings`, not as errors.
pub fn fit(design: &DesignMatrix, outcome: &[u8], options: &FitOptions) -> Result<LogisticFit> {
    options.validate()?;
    let n = design.n_rows();
    if n != outcome.len() {
        return Err(FitError::LengthMismatch {
            rows: n,
            outcome: outcome.len(),
        });
    }
    if let Some(row) = outcome.iter().position(|&y| y > 1) {
        return Err(FitError::NonBinaryOutcome { row: row + 1 });
    }
    let positives = outcome.iter().filter(|&&y| y == 1).count();
    if positives == 0 || positives == n {
        return Err(FitError::ConstantOutcome { positives, n });
    }
    let names: Vec<String> = design.names().iter().map(|s| s.to_string()).collect();
    let x = design.matrix();
    let dependent = dependent_columns(x);
    if !dependent.is_empty() {
        return Err(FitError::Singular {
            columns: dependent.into_iter().map(|j| names[j].clone()).collect(),
        });
    }

    let p = design.n_cols();
    let intercept = design.intercept_index();
    let penalty = DVector::from_fn(p, |j, _| {
        if Some(j) == intercept {
            0.0
        } else {
            options.ridge
        }
    });
    let problem = Problem {
        x,
        y: DVector::from_iterator(n, outcome.iter().map(|&v| f64::from(v))),
        penalty,
    };

    let mut beta = DVector::zeros(p);
    if let Some(j) = intercept {
        beta[j] = logit(positives as f64 / n as f64);
    }
    let mut current = problem.evaluate(&beta);
    let mut history = Vec::new();
    let mut warnings = Vec::new();
    let mut converged = false;
    let mut separated = false;
    let mut iterations = 0;

    while iterations < options.max_iterations {
        iterations += 1;
        let (info, score) = problem.newton_system(&beta, &current.eta);
        let Some(chol) = info.cholesky() else {
            // Weights have collapsed to zero: the likelihood is flat in some
            // direction, which for a full-rank design means separation.
            separated = true;
            warnings.push(separation_warning(&names, &beta, intercept, options));
            break;
        };
        let delta = chol.solve(&score);

        let mut step = 1.0;
        let mut halvings = 0;
        let mut candidate = &beta + &delta;
        let mut next = problem.evaluate(&candidate);
        let slack = 1e-12 * current.penalized_deviance.abs().max(1.0);
        while !(next.penalized_deviance <= current.penalized_deviance + slack)
            && halvings < MAX_STEP_HALVINGS
        {
            halvings += 1;
            step *= 0.5;
            candidate = &beta + &delta * step;
            next = problem.evaluate(&candidate);
        }
        if !(next.penalized_deviance <= current.penalized_deviance + slack) {
            warnings.push(FitWarning::StepHalvingExhausted { iteration: iterations });
            break;
        }

        let change = (current.penalized_deviance - next.penalized_deviance).abs();
        beta = candidate;
        current = next;
        let max_abs = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
        history.push(IterationRecord {
            iteration: iterations,
            deviance: -2.0 * current.log_likelihood,
            max_abs_coefficient: max_abs,
            step_halvings: halvings,
        });

        if max_abs > options.separation_coefficient_bound && !separated {
            separated = true;
            warnings.push(separation_warning(&names, &beta, intercept, options));
        }
        if change < options.deviance_tolerance {
            converged = true;
            break;
        }
    }
    if separated && options.ridge == 0.0 {
        converged = false;
    }
    if !converged && !separated && !warnings.iter().any(|w| matches!(w, FitWarning::StepHalvingExhausted { .. })) {
        warnings.push(FitWarning::NotConverged { iterations });
    }

    let (info, _) = problem.newton_system(&beta, &current.eta);
    let covariance = info
        .clone()
        .cholesky()
        .map(|c| c.inverse())
        .unwrap_or_else(|| DMatrix::from_element(p, p, f64::NAN));

    let log_likelihood = current.log_likelihood;
    Ok(LogisticFit {
        column_names: names,
        coefficients: beta.iter().copied().collect(),
        log_likelihood,
        aic: aic_value(p, log_likelihood),
        covariance,
        iterations,
        converged,
        warnings,
        history,
        n_obs: n,
        n_positive: positives,
        intercept,
        options: *options,
    })
}

fn separation_warning(
    names: &[String],
    beta: &DVector<f64>,
    intercept: Option<usize>,
    options: &FitOptions,
) -> FitWarning {
    let max_abs = beta.iter().fold(0.0f64, |m, b| m.max(b.abs()));
    let over: Vec<usize> = (0..beta.len())
        .filter(|&j| beta[j].abs() > options.separation_coefficient_bound)
        .collect();
    let mut culprits: Vec<String> = over
        .iter()
        .filter(|&&j| Some(j) != intercept)
        .map(|&j| names[j].clone())
        .collect();
    if culprits.is_empty() {
        culprits = if over.is_empty() {
            // Reached through a collapsed information matrix: name the largest coefficient.
            let j = (0..beta.len())
                .max_by(|&a, &b| beta[a].abs().total_cmp(&beta[b].abs()))
                .unwrap_or(0);
            vec![names[j].clone()]
        } else {
            over.iter().map(|&j| names[j].clone()).collect()
        };
    }
    FitWarning::Separation {
        columns: culprits,
        max_abs_coefficient: max_abs,
    }
}

/// Analytic score `X'(y - p)` of the unpenalized log-likelihood at `beta`.
pub fn score(design: &DesignMatrix, outcome: &[u8], beta: &[f64]) -> Vec<f64> {
    let x = design.matrix();
    let b = DVector::from_column_slice(beta);
    let p = (x * b).map(probability);
    let y = DVector::from_iterator(outcome.len(), outcome.iter().map(|&v| f64::from(v)));
    x.tr_mul(&(y - p)).iter().copied().collect()
}

/// Unpenalized log-likelihood at `beta`, computed from the linear predictor.
pub fn log_likelihood_at(design: &DesignMatrix, outcome: &[u8], beta: &[f64]) -> f64 {
    let x = design.matrix();
    let eta = x * DVector::from_column_slice(beta);
    let y = DVector::from_iterator(outcome.len(), outcome.iter().map(|&v| f64::from(v)));
    log_likelihood_from_eta(&eta, &y)
}

/// True when the design carries a column of provenance `Intercept`.
pub fn has_intercept(design: &DesignMatrix) -> bool {
    design
        .columns()
        .iter()
        .any(|c| matches!(c.provenance, Provenance::Intercept))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding::{DesignColumn, INTERCEPT};
    use approx::assert_abs_diff_eq;

    fn design(cols: &[(&str, Vec<f64>)], intercept: bool) -> DesignMatrix {
        let n = cols.first().map(|c| c.1.len()).unwrap_or(0);
        let mut columns = Vec::new();
        let mut data = Vec::new();
        if intercept {
            columns.push(DesignColumn {
                name: INTERCEPT.into(),
                provenance: Provenance::Intercept,
            });
            data.push(vec![1.0; n]);
        }
        for (name, values) in cols {
            columns.push(DesignColumn {
                name: name.to_string(),
                provenance: Provenance::Linear { variable: name.to_string() },
            });
            data.push(values.clone());
        }
        DesignMatrix::new(columns, data, n).unwrap()
    }

    #[test]
    fn probability_examples() {
        assert_eq!(probability(0.0), 0.5);
        assert_abs_diff_eq!(probability(-(10f64.ln())), 1.0 / 11.0, epsilon = 1e-15);
        let z = (322.0f64 / 29678.0).ln();
        assert_abs_diff_eq!(probability(z), 322.0 / 30000.0, epsilon = 1e-15);
        assert_abs_diff_eq!(probability(-4.5237), 0.010733, epsilon = 1e-6);
        assert!(probability(-700.0) > 0.0);
        assert_eq!(probability(700.0), 1.0);
        assert!(probability(-800.0).is_finite());
    }

    #[test]
    fn log_likelihood_examples() {
        assert_abs_diff_eq!(
            log_likelihood(&[0.5, 0.5], &[0, 1]).unwrap(),
            2.0 * 0.5f64.ln(),
            epsilon = 1e-15
        );
        let eps = 1e-12;
        let ll = log_likelihood(&[1.0 - eps, eps], &[1, 0]).unwrap();
        assert!(ll.abs() < 1e-11);
        assert!(matches!(
            log_likelihood(&[1.0], &[0]),
            Err(FitError::ImpossibleOutcome { row: 1, .. })
        ));
        assert!(matches!(
            log_likelihood(&[0.5], &[0, 1]),
            Err(FitError::LengthMismatch { .. })
        ));
        assert!(matches!(
            log_likelihood(&[1.5], &[1]),
            Err(FitError::InvalidProbability { .. })
        ));
    }

    #[test]
    fn intercept_only_symmetric() {
        let d = DesignMatrix::intercept_only(4);
        let f = fit(&d, &[0, 0, 1, 1], &FitOptions::default()).unwrap();
        assert!(f.converged);
        assert_abs_diff_eq!(f.coefficients[0], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(f.log_likelihood, 4.0 * 0.5f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(aic(&f).unwrap(), 2.0 - 8.0 * 0.5f64.ln(), epsilon = 1e-12);
        assert_abs_diff_eq!(aic(&f).unwrap(), 7.5452, epsilon = 1e-4);
        assert_eq!(f.aic, 2.0 * 1.0 - 2.0 * f.log_likelihood);
        assert_eq!(log_odds(&f, &[1.0]).unwrap(), f.coefficients[0]);
        assert!(matches!(log_odds(&f, &[1.0, 2.0]), Err(FitError::Arity { .. })));
        assert_eq!(wald_p_values(&f).unwrap()[0], 1.0);
    }

    #[test]
    fn intercept_only_rare_event() {
        let n = 30_000;
        let mut y = vec![0u8; n];
        y[..322].iter_mut().for_each(|v| *v = 1);
        let f = fit(&DesignMatrix::intercept_only(n), &y, &FitOptions::default()).unwrap();
        let expected = (322.0f64 / 29678.0).ln();
        assert_abs_diff_eq!(f.coefficients[0], expected, epsilon = 1e-10);
        assert_abs_diff_eq!(f.coefficients[0], -4.5237, epsilon = 1e-4);
        let phat = 322.0 / 30000.0;
        let se = (1.0 / (n as f64 * phat * (1.0 - phat))).sqrt();
        assert_abs_diff_eq!(f.std_errors()[0], se, epsilon = 1e-10);
        assert_abs_diff_eq!(se, 0.0561, epsilon = 1e-4);
    }

    #[test]
    fn fit_errors() {
        let d = DesignMatrix::intercept_only(3);
        assert!(matches!(
            fit(&d, &[1, 1, 1], &FitOptions::default()),
            Err(FitError::ConstantOutcome { positives: 3, n: 3 })
        ));
        assert!(matches!(
            fit(&d, &[0, 0, 0], &FitOptions::default()),
            Err(FitError::ConstantOutcome { positives: 0, .. })
        ));
        assert!(matches!(
            fit(&d, &[0, 1], &FitOptions::default()),
            Err(FitError::LengthMismatch { .. })
        ));
        let opts = FitOptions {
            max_iterations: 0,
            ..FitOptions::default()
        };
        assert!(matches!(fit(&d, &[0, 1, 0], &opts), Err(FitError::InvalidOptions(_))));
    }

    #[test]
    fn duplicate_columns_are_singular() {
        let x = vec![0.1, 0.5, 0.9, 0.3, 0.7];
        let d = design(&[("a", x.clone()), ("b", x)], true);
        let err = fit(&d, &[0, 1, 1, 0, 1], &FitOptions::default()).unwrap_err();
        assert_eq!(err, FitError::Singular { columns: vec!["b".into()] });
        assert!(err.to_string().contains("b"));
    }

    #[test]
    fn separation_is_flagged() {
        let d = design(&[("x", vec![0.0, 0.0, 1.0, 1.0])], true);
        let f = fit(&d, &[0, 0, 1, 1], &FitOptions::default()).unwrap();
        assert!(!f.converged);
        let sep = f
            .warnings
            .iter()
            .find_map(|w| match w {
                FitWarning::Separation { columns, .. } => Some(columns.clone()),
                _ => None,
            })
            .expect("separation warning");
        assert_eq!(sep, vec!["x".to_string()]);
        assert!(f.warnings[0].to_string().starts_with("separation"));
        assert!(f.history.last().unwrap().max_abs_coefficient > 15.0);
        assert!(aic(&f).is_err());

        let ridge = FitOptions {
            ridge: 1.0,
            ..FitOptions::default()
        };
        let f = fit(&d, &[0, 0, 1, 1], &ridge).unwrap();
        assert!(f.converged);
        assert!(f.coefficients[1].abs() < 15.0);
    }

    #[test]
    fn non_convergence_reported() {
        let x = vec![0.2, 0.4, 0.6, 0.8, 1.0, 1.2];
        let d = design(&[("x", x)], true);
        let opts = FitOptions {
            max_iterations: 1,
            ..FitOptions::default()
        };
        let f = fit(&d, &[0, 1, 0, 1, 1, 0], &opts).unwrap();
        assert!(!f.converged);
        assert_eq!(f.warnings, vec![FitWarning::NotConverged { iterations: 1 }]);
    }

    #[test]
    fn zero_gain_column_adds_two_to_aic() {
        // x is balanced within each outcome class, so its MLE coefficient is 0.
        let y = [0u8, 0, 1, 1];
        let x = vec![1.0, -1.0, 1.0, -1.0];
        let base = fit(&DesignMatrix::intercept_only(4), &y, &FitOptions::default()).unwrap();
        let wider = fit(&design(&[("x", x)], true), &y, &FitOptions::default()).unwrap();
        assert_abs_diff_eq!(wider.coefficients[1], 0.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wider.aic - base.aic, 2.0, epsilon = 1e-12);
        assert_abs_diff_eq!(wald_p_values(&wider).unwrap()[1], 1.0, epsilon = 1e-12);
    }

    #[test]
    fn dependent_column_detection() {
        let a = vec![1.0, 2.0, 3.0, 4.0];
        let b = vec![2.0, 1.0, 0.0, 5.0];
        let c: Vec<f64> = a.iter().zip(&b).map(|(x, y)| 2.0 * x - y).collect();
        let d = design(&[("a", a), ("b", b), ("c", c), ("z", vec![0.0; 4])], true);
        assert_eq!(dependent_columns(d.matrix()), vec![3, 4]);
    }
}
