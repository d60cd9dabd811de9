//! Scoring decision rules in units of one false positive.
//!
//! With `cost_fp` normalized to 1 the total cost of a classifier is
//! `fp + r * fn`. The trivial rule "everyone negative" costs `r * positives`
//! and "everyone positive" costs `negatives`; a model is only worth using
//! when it beats the first of these.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::decision::{classify_all, policy_from_ratio, CostPolicy, Decision, DecisionError};
use crate::exec::Execution;

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("{labels} labels but {decisions} decisions")]
    LengthMismatch { labels: usize, decisions: usize },
    #[error("label at row {row} is not 0 or 1")]
    NonBinaryLabel { row: usize },
    #[error("metric undefined: {0}")]
    Undefined(String),
    #[error("{0} must lie strictly between 0 and 1, got {1}")]
    OutOfRange(&'static str, f64),
    #[error("ratio list is empty")]
    EmptyRatios,
    #[error("ratios must be positive and strictly ascending")]
    BadRatios,
    #[error(transparent)]
    Decision(#[from] DecisionError),
}

pub type Result<T> = std::result::Result<T, EvalError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub tp: u64,
    pub fp: u64,
    #[serde(rename = "fn")]
    pub fn_: u64,
    pub tn: u64,
}

impl ConfusionMatrix {
    pub const fn new(tp: u64, fp: u64, fn_: u64, tn: u64) -> Self {
        Self { tp, fp, fn_, tn }
    }

    pub fn positives(&self) -> u64 {
        self.tp + self.fn_
    }

    pub fn negatives(&self) -> u64 {
        self.fp + self.tn
    }

    pub fn total(&self) -> u64 {
        self.tp + self.fp + self.fn_ + self.tn
    }

    /// Everyone classified negative.
    pub fn all_negative(positives: u64, negatives: u64) -> Self {
        Self::new(0, 0, positives, negatives)
    }

    /// Everyone classified positive.
    pub fn all_positive(positives: u64, negatives: u64) -> Self {
        Self::new(positives, negatives, 0, 0)
    }
}

pub fn confusion(labels: &[u8], decisions: &[Decision]) -> Result<ConfusionMatrix> {
    if labels.len() != decisions.len() {
        return Err(EvalError::LengthMismatch {
            labels: labels.len(),
            decisions: decisions.len(),
        });
    }
    let mut cm = ConfusionMatrix::default();
    for (row, (&y, d)) in labels.iter().zip(decisions).enumerate() {
        match (y, d.action.is_positive()) {
            (1, true) => cm.tp += 1,
            (1, false) => cm.fn_ += 1,
            (0, true) => cm.fp += 1,
            (0, false) => cm.tn += 1,
            _ => return Err(EvalError::NonBinaryLabel { row: row + 1 }),
        }
    }
    Ok(cm)
}

/// `fp + r * fn`, in units of one false positive.
pub fn total_cost(cm: &ConfusionMatrix, policy: &CostPolicy) -> f64 {
    cm.fp as f64 + policy.relative_cost() * cm.fn_ as f64
}

/// `r * positives`: everyone let go.
pub fn baseline_all_negative(positives: u64, policy: &CostPolicy) -> f64 {
    policy.relative_cost() * positives as f64
}

/// `negatives`: everyone held.
pub fn baseline_all_positive(negatives: u64, _policy: &CostPolicy) -> f64 {
    negatives as f64
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DiagnosticMetrics {
    pub prevalence: f64,
    pub sensitivity: f64,
    pub specificity: f64,
    /// `sensitivity / (1 - specificity)`; `+inf` when specificity is 1.
    pub lr_plus: f64,
    pub lr_plus_infinite: bool,
    /// `tp / (tp + fp)`; `None` when nothing was classified positive.
    pub post_test_probability: Option<f64>,
}

pub fn diagnostic_metrics(cm: &ConfusionMatrix) -> Result<DiagnosticMetrics> {
    if cm.positives() == 0 {
        return Err(EvalError::Undefined("no positive cases".into()));
    }
    if cm.negatives() == 0 {
        return Err(EvalError::Undefined("no negative cases".into()));
    }
    let sensitivity = cm.tp as f64 / cm.positives() as f64;
    let specificity = cm.tn as f64 / cm.negatives() as f64;
    let false_positive_rate = cm.fp as f64 / cm.negatives() as f64;
    let lr_plus_infinite = cm.fp == 0;
    let lr_plus = if lr_plus_infinite {
        f64::INFINITY
    } else {
        sensitivity / false_positive_rate
    };
    let flagged = cm.tp + cm.fp;
    Ok(DiagnosticMetrics {
        prevalence: cm.positives() as f64 / cm.total() as f64,
        sensitivity,
        specificity,
        lr_plus,
        lr_plus_infinite,
        post_test_probability: (flagged > 0).then(|| cm.tp as f64 / flagged as f64),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LrForm {
    /// Posterior odds over prior odds (Bayes' rule).
    Odds,
    /// Target posterior over prevalence.
    ProbabilityRatio,
}

/// LR+ needed to lift `prevalence` to `target_posterior`.
pub fn required_lr_plus(prevalence: f64, target_posterior: f64, form: LrForm) -> Result<f64> {
    let open = |v: f64| v > 0.0 && v < 1.0;
    if !open(prevalence) {
        return Err(EvalError::OutOfRange("prevalence", prevalence));
    }
    if !open(target_posterior) {
        return Err(EvalError::OutOfRange("target posterior", target_posterior));
    }
    Ok(match form {
        LrForm::Odds => {
            (target_posterior / (1.0 - target_posterior)) / (prevalence / (1.0 - prevalence))
        }
        LrForm::ProbabilityRatio => target_posterior / prevalence,
    })
}

/// Cost ratio at which the model and the all-negative rule cost the same:
/// `fp + r * fn = r * positives`, so `r = fp / tp`. `None` when `tp = 0`.
pub fn break_even_ratio(cm: &ConfusionMatrix) -> Option<f64> {
    (cm.tp > 0).then(|| cm.fp as f64 / cm.tp as f64)
}

/// Fraction of the all-negative cost saved by the model; negative when the model is worse.
pub fn cost_saving_vs_all_negative(cm: &ConfusionMatrix, policy: &CostPolicy) -> Result<f64> {
    let baseline = baseline_all_negative(cm.positives(), policy);
    if baseline <= 0.0 {
        return Err(EvalError::Undefined("all-negative baseline costs nothing (no positives)".into()));
    }
    Ok((baseline - total_cost(cm, policy)) / baseline)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RequiredLr {
    pub target_posterior: f64,
    pub odds: f64,
    pub probability_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CostReport {
    pub policy: CostPolicy,
    pub confusion: ConfusionMatrix,
    pub metrics: Option<DiagnosticMetrics>,
    pub total_cost: f64,
    pub baseline_all_negative: f64,
    pub baseline_all_positive: f64,
    pub saving_vs_all_negative: Option<f64>,
    pub break_even_ratio: Option<f64>,
    pub required_lr_plus: Option<RequiredLr>,
}

/// Posterior used by [`evaluate`] for the required-LR+ figures.
pub const REPORT_TARGET_POSTERIOR: f64 = 0.5;

pub fn evaluate(cm: &ConfusionMatrix, policy: &CostPolicy) -> CostReport {
    let metrics = diagnostic_metrics(cm).ok();
    let required = metrics.and_then(|m| {
        let odds = required_lr_plus(m.prevalence, REPORT_TARGET_POSTERIOR, LrForm::Odds).ok()?;
        let ratio =
            required_lr_plus(m.prevalence, REPORT_TARGET_POSTERIOR, LrForm::ProbabilityRatio).ok()?;
        Some(RequiredLr {
            target_posterior: REPORT_TARGET_POSTERIOR,
            odds,
            probability_ratio: ratio,
        })
    });
    CostReport {
        policy: *policy,
        confusion: *cm,
        metrics,
        total_cost: total_cost(cm, policy),
        baseline_all_negative: baseline_all_negative(cm.positives(), policy),
        baseline_all_positive: baseline_all_positive(cm.negatives(), policy),
        saving_vs_all_negative: cost_saving_vs_all_negative(cm, policy).ok(),
        break_even_ratio: break_even_ratio(cm),
        required_lr_plus: required,
    }
}

/// Classify `probabilities` under `policy` and score them against `labels`.
pub fn evaluate_scores(probabilities: &[f64], labels: &[u8], policy: &CostPolicy) -> Result<CostReport> {
    let decisions = classify_all(probabilities, policy)?;
    let cm = confusion(labels, &decisions)?;
    Ok(evaluate(&cm, policy))
}

fn opt(v: Option<f64>, digits: usize) -> String {
    match v {
        Some(x) => format!("{x:.digits$}"),
        None => "undefined".into(),
    }
}

impl CostReport {
    pub fn to_text(&self) -> String {
        let cm = &self.confusion;
        let mut s = String::new();
        let w = &mut s;
        let _ = writeln!(w, "cost ratio (fn:fp)        {}:1", self.policy.relative_cost());
        let _ = writeln!(
            w,
            "probability cutpoint      {:.6} ({:.2}%)",
            self.policy.cutpoint(),
            100.0 * self.policy.cutpoint()
        );
        let _ = writeln!(w, "confusion                 tp={} fp={} fn={} tn={}", cm.tp, cm.fp, cm.fn_, cm.tn);
        let _ = writeln!(w, "total cost (fp units)     {}", self.total_cost);
        let _ = writeln!(w, "all-negative baseline     {}", self.baseline_all_negative);
        let _ = writeln!(w, "all-positive baseline     {}", self.baseline_all_positive);
        let _ = writeln!(
            w,
            "saving vs all-negative    {}",
            self.saving_vs_all_negative
                .map_or("undefined".into(), |v| format!("{:.1}%", 100.0 * v))
        );
        let _ = writeln!(w, "break-even cost ratio     {}", opt(self.break_even_ratio, 2));
        if let Some(m) = &self.metrics {
            let _ = writeln!(w, "prevalence                {:.6}", m.prevalence);
            let _ = writeln!(w, "sensitivity               {:.6}", m.sensitivity);
            let _ = writeln!(w, "specificity               {:.6}", m.specificity);
            let lr = if m.lr_plus_infinite {
                "infinite".to_string()
            } else {
                format!("{:.4}", m.lr_plus)
            };
            let _ = writeln!(w, "LR+                       {lr}");
            let _ = writeln!(w, "post-test probability     {}", opt(m.post_test_probability, 6));
        }
        if let Some(r) = &self.required_lr_plus {
            let _ = writeln!(
                w,
                "LR+ needed for {:.0}%       {:.2} (odds form), {:.2} (probability-ratio form)",
                100.0 * r.target_posterior,
                r.odds,
                r.probability_ratio
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepRow {
    pub ratio: f64,
    pub cutpoint: f64,
    pub confusion: ConfusionMatrix,
    pub total_cost: f64,
    pub baseline_all_negative: f64,
    pub saving_vs_all_negative: Option<f64>,
}

/// One row per cost ratio; rows are computed independently and returned in ratio order.
pub fn sweep(probabilities: &[f64], labels: &[u8], ratios: &[f64], exec: Execution) -> Result<Vec<SweepRow>> {
    if ratios.is_empty() {
        return Err(EvalError::EmptyRatios);
    }
    if ratios.iter().any(|&r| !(r > 0.0) || !r.is_finite()) || ratios.windows(2).any(|w| w[0] >= w[1]) {
        return Err(EvalError::BadRatios);
    }
    if probabilities.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            labels: labels.len(),
            decisions: probabilities.len(),
        });
    }
    exec.map(ratios, |&ratio| {
        let policy = policy_from_ratio(ratio)?;
        let report = evaluate_scores(probabilities, labels, &policy)?;
        Ok(SweepRow {
            ratio,
            cutpoint: policy.cutpoint(),
            confusion: report.confusion,
            total_cost: report.total_cost,
            baseline_all_negative: report.baseline_all_negative,
            saving_vs_all_negative: report.saving_vs_all_negative,
        })
    })
    .into_iter()
    .collect()
}
