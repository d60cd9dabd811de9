//! Cost policies and the minimum-expected-cost decision rule.
//!
//! Only errors carry cost: a false negative costs `cost_fn`, a false
//! positive `cost_fp`, correct calls cost nothing. Predicting negative for a
//! subject with case probability `p` risks `p * cost_fn`; predicting
//! positive risks `(1 - p) * cost_fp`. The two are equal at
//! `p = 1 / (1 + r)` with `r = cost_fn / cost_fp`, and subjects at or above
//! that cutpoint are classified high-risk.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error, PartialEq)]
pub enum DecisionError {
    #[error("costs must be positive and finite (cost_fn = {cost_fn}, cost_fp = {cost_fp})")]
    NonPositiveCost { cost_fn: f64, cost_fp: f64 },
    #[error("probability {0} is outside [0, 1]")]
    ProbabilityOutOfRange(f64),
}

pub type Result<T> = std::result::Result<T, DecisionError>;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CostPolicy {
    cost_fn: f64,
    cost_fp: f64,
    relative_cost: f64,
    cutpoint: f64,
}

impl CostPolicy {
    pub fn cost_fn(&self) -> f64 {
        self.cost_fn
    }

    pub fn cost_fp(&self) -> f64 {
        self.cost_fp
    }

    /// `cost_fn / cost_fp`.
    pub fn relative_cost(&self) -> f64 {
        self.relative_cost
    }

    /// `1 / (1 + relative_cost)`.
    pub fn cutpoint(&self) -> f64 {
        self.cutpoint
    }

    /// The same policy with both costs multiplied by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<CostPolicy> {
        make_policy(self.cost_fn * factor, self.cost_fp * factor)
    }
}

pub fn make_policy(cost_fn: f64, cost_fp: f64) -> Result<CostPolicy> {
    let valid = |c: f64| c > 0.0 && c.is_finite();
    if !valid(cost_fn) || !valid(cost_fp) {
        return Err(DecisionError::NonPositiveCost { cost_fn, cost_fp });
    }
    let relative_cost = cost_fn / cost_fp;
    Ok(CostPolicy {
        cost_fn,
        cost_fp,
        relative_cost,
        cutpoint: 1.0 / (1.0 + relative_cost),
    })
}

/// Policy with `cost_fn = ratio` and `cost_fp = 1`.
pub fn policy_from_ratio(ratio: f64) -> Result<CostPolicy> {
    make_policy(ratio, 1.0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Action {
    /// Predict positive.
    HighRisk,
    /// Predict negative.
    LowRisk,
}

impl Action {
    pub fn is_positive(self) -> bool {
        self == Action::HighRisk
    }

    pub fn label(self) -> &'static str {
        match self {
            Action::HighRisk => "high",
            Action::LowRisk => "low",
        }
    }
}

impl fmt::Display for Action {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.label())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Decision {
    pub action: Action,
    pub probability: f64,
    /// Expected cost of predicting negative: `p * cost_fn`.
    pub cost_if_low: f64,
    /// Expected cost of predicting positive: `(1 - p) * cost_fp`.
    pub cost_if_high: f64,
}

fn check_probability(p: f64) -> Result<()> {
    if (0.0..=1.0).contains(&p) {
        Ok(())
    } else {
        Err(DecisionError::ProbabilityOutOfRange(p))
    }
}

/// `(cost if predicted negative, cost if predicted positive)`.
pub fn expected_costs(p: f64, policy: &CostPolicy) -> Result<(f64, f64)> {
    check_probability(p)?;
    Ok((p * policy.cost_fn, (1.0 - p) * policy.cost_fp))
}

/// High-risk iff `p >= cutpoint`.
pub fn classify(p: f64, policy: &CostPolicy) -> Result<Decision> {
    let (cost_if_low, cost_if_high) = expected_costs(p, policy)?;
    let action = if p >= policy.cutpoint {
        Action::HighRisk
    } else {
        Action::LowRisk
    };
    Ok(Decision {
        action,
        probability: p,
        cost_if_low,
        cost_if_high,
    })
}

pub fn classify_all(probabilities: &[f64], policy: &CostPolicy) -> Result<Vec<Decision>> {
    probabilities.iter().map(|&p| classify(p, policy)).collect()
}
