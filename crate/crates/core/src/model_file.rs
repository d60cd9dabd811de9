//! Versioned plain-text model files.
//!
//! Numbers are written with Rust's shortest round-trip `Display`, so a model
//! read back predicts bit-identically. Layout:
//!
//! ```text
//! # costcut-model v1
//! outcome <TAB> y
//! ...key/value lines...
//! [plan]
//! ...plan directives, categorical levels pinned...
//! [coefficients]
//! name <TAB> estimate <TAB> std_error
//! [covariance]
//! one row per line, tab separated
//! [end]
//! ```

use std::fmt::Write as _;
use std::io::{self, Read, Write};

use nalgebra::DMatrix;
use thiserror::Error;

use crate::encoding::{EncodingError, EncodingPlan};
use crate::glm::{FitOptions, LogisticFit};

pub const MODEL_HEADER: &str = "# costcut-model v1";

#[derive(Debug, Error)]
pub enum ModelFileError {
    #[error("not a costcut model file (missing `{MODEL_HEADER}` header)")]
    BadHeader,
    #[error("line {line}: {message}")]
    Syntax { line: usize, message: String },
    #[error("missing field `{0}`")]
    MissingField(&'static str),
    #[error("plan section: {0}")]
    Plan(#[from] EncodingError),
    #[error(transparent)]
    Io(#[from] io::Error),
}

pub type Result<T> = std::result::Result<T, ModelFileError>;

#[derive(Debug, Clone, PartialEq)]
pub struct ModelFile {
    pub outcome: String,
    /// Plan with categorical levels resolved against the training data.
    pub plan: EncodingPlan,
    pub fit: LogisticFit,
}

impl ModelFile {
    pub fn to_text(&self) -> String {
        let f = &self.fit;
        let mut s = String::new();
        let _ = writeln!(s, "{MODEL_HEADER}");
        let _ = writeln!(s, "outcome\t{}", self.outcome);
        let _ = writeln!(s, "n_obs\t{}", f.n_obs);
        let _ = writeln!(s, "n_positive\t{}", f.n_positive);
        let _ = writeln!(s, "log_likelihood\t{}", f.log_likelihood);
        let _ = writeln!(s, "aic\t{}", f.aic);
        let _ = writeln!(s, "converged\t{}", f.converged);
        let _ = writeln!(s, "iterations\t{}", f.iterations);
        let _ = writeln!(s, "max_iterations\t{}", f.options.max_iterations);
        let _ = writeln!(s, "deviance_tolerance\t{}", f.options.deviance_tolerance);
        let _ = writeln!(s, "ridge\t{}", f.options.ridge);
        let _ = writeln!(s, "separation_bound\t{}", f.options.separation_coefficient_bound);
        for w in &f.warnings {
            let _ = writeln!(s, "# warning: {w}");
        }
        s.push_str("[plan]\n");
        s.push_str(&self.plan.to_text());
        s.push_str("[coefficients]\n");
        for ((name, b), se) in f.column_names.iter().zip(&f.coefficients).zip(f.std_errors()) {
            let _ = writeln!(s, "{name}\t{b}\t{se}");
        }
        s.push_str("[covariance]\n");
        for i in 0..f.covariance.nrows() {
            let row: Vec<String> = (0..f.covariance.ncols())
                .map(|j| format!("{}", f.covariance[(i, j)]))
                .collect();
            let _ = writeln!(s, "{}", row.join("\t"));
        }
        s.push_str("[end]\n");
        s
    }

    pub fn write_to(&self, mut sink: impl Write) -> Result<()> {
        sink.write_all(self.to_text().as_bytes())?;
        Ok(())
    }

    pub fn read_from(mut source: impl Read) -> Result<ModelFile> {
        let mut text = String::new();
        source.read_to_string(&mut text)?;
        ModelFile::parse(&text)
    }

    pub fn parse(text: &str) -> Result<ModelFile> {
        let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
        match lines.next() {
            Some((_, h)) if h.trim_end() == MODEL_HEADER => {}
            _ => return Err(ModelFileError::BadHeader),
        }
        let syntax = |line: usize, message: String| ModelFileError::Syntax { line, message };
        fn num<T: std::str::FromStr>(line: usize, v: &str) -> Result<T> {
            v.trim().parse().map_err(|_| ModelFileError::Syntax {
                line,
                message: format!("cannot parse `{v}`"),
            })
        }

        let mut section = "header";
        let mut fields = std::collections::HashMap::<String, (usize, String)>::new();
        let mut plan_text = String::new();
        let mut names = Vec::new();
        let mut coefficients = Vec::new();
        let mut covariance_rows: Vec<Vec<f64>> = Vec::new();
        let mut ended = false;
        for (no, line) in lines {
            if let Some(name) = line.strip_prefix('[').and_then(|l| l.strip_suffix(']')) {
                section = match name {
                    "plan" | "coefficients" | "covariance" => name,
                    "end" => {
                        ended = true;
                        break;
                    }
                    _ => return Err(syntax(no, format!("unknown section [{name}]"))),
                };
                continue;
            }
            match section {
                "header" => {
                    if line.starts_with('#') || line.trim().is_empty() {
                        continue;
                    }
                    let (k, v) = line
                        .split_once('\t')
                        .ok_or_else(|| syntax(no, "expected `key<TAB>value`".into()))?;
                    fields.insert(k.to_string(), (no, v.to_string()));
                }
                "plan" => {
                    plan_text.push_str(line);
                    plan_text.push('\n');
                }
                "coefficients" => {
                    let parts: Vec<&str> = line.split('\t').collect();
                    if parts.len() != 3 {
                        return Err(syntax(no, "expected `name<TAB>estimate<TAB>std_error`".into()));
                    }
                    names.push(parts[0].to_string());
                    coefficients.push(num::<f64>(no, parts[1])?);
                }
                "covariance" => {
                    let row = line
                        .split('\t')
                        .map(|v| num::<f64>(no, v))
                        .collect::<Result<Vec<_>>>()?;
                    if row.len() != names.len() {
                        return Err(syntax(no, format!("expected {} covariance entries", names.len())));
                    }
                    covariance_rows.push(row);
                }
                _ => unreachable!(),
            }
        }
        if !ended {
            return Err(ModelFileError::MissingField("[end]"));
        }
        if covariance_rows.len() != names.len() {
            return Err(ModelFileError::MissingField("covariance"));
        }

        let field = |key: &'static str| fields.get(key).ok_or(ModelFileError::MissingField(key));
        let get_num = |key: &'static str| -> Result<f64> {
            let (no, v) = field(key)?;
            num(*no, v)
        };
        let get_usize = |key: &'static str| -> Result<usize> {
            let (no, v) = field(key)?;
            num(*no, v)
        };
        let converged = {
            let (no, v) = field("converged")?;
            num::<bool>(*no, v)?
        };
        let options = FitOptions {
            max_iterations: get_usize("max_iterations")?,
            deviance_tolerance: get_num("deviance_tolerance")?,
            ridge: get_num("ridge")?,
            separation_coefficient_bound: get_num("separation_bound")?,
        };
        let p = names.len();
        let covariance = DMatrix::from_fn(p, p, |i, j| covariance_rows[i][j]);
        let intercept = names.iter().position(|n| n == crate::encoding::INTERCEPT);
        let fit = LogisticFit {
            column_names: names,
            coefficients,
            log_likelihood: get_num("log_likelihood")?,
            aic: get_num("aic")?,
            covariance,
            iterations: get_usize("iterations")?,
            converged,
            warnings: Vec::new(),
            history: Vec::new(),
            n_obs: get_usize("n_obs")?,
            n_positive: get_usize("n_positive")?,
            intercept,
            options,
        };
        Ok(ModelFile {
            outcome: field("outcome")?.1.clone(),
            plan: EncodingPlan::parse(&plan_text)?,
            fit,
        })
    }
}
