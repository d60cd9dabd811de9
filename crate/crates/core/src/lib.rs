//! Cost-sensitive cutpoints for rare-event prediction.
//!
//! A false-negative to false-positive cost ratio `r` fixes the probability
//! cutpoint `1 / (1 + r)` at which both misclassification risks cost the
//! same. This crate fits the probabilities (logistic regression with
//! traffic-light dummies and stepwise AIC selection), classifies against the
//! cutpoint, and audits any classifier's confusion matrix in units of one
//! false positive.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the bad range.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod cli;
pub mod data;
pub mod decision;
pub mod encoding;
pub mod evaluation;
pub mod exec;
pub mod fixtures;
pub mod glm;
pub mod model_file;
pub mod selection;
pub mod special;

pub use data::{load_table, split, synth_rare_event, ColumnKind, ColumnSpec, Dataset, SplitSpec};
pub use decision::{classify, classify_all, expected_costs, make_policy, Action, CostPolicy, Decision};
pub use encoding::{build_design, traffic_light, DesignMatrix, EncodingPlan, ThresholdSet};
pub use evaluation::{confusion, total_cost, ConfusionMatrix, CostReport, DiagnosticMetrics};
pub use exec::Execution;
pub use glm::{fit, probability, FitOptions, LogisticFit};
pub use selection::{exhaustive_best_aic, stepwise, SelectionConfig, SelectionTrace};
