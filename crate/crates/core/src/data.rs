//! Typed tabular data: delimited-file ingestion, train/validation splits and
//! a seeded generator of rare-event samples.
//!
//! Column kinds are inferred from the values unless a hint is supplied:
//!
//! * `binary` if every value is exactly 0 or 1,
//! * `ordinal` if every value is integer-valued and there are at most
//!   [`MAX_ORDINAL_LEVELS`] distinct values,
//! * `continuous` for any other all-numeric column,
//! * `categorical` when any value fails to parse as a finite number.
//!
//! Missing cells (empty or `NA`) are rejected; there is no imputation.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Integer-valued columns with more distinct values than this are continuous.
pub const MAX_ORDINAL_LEVELS: usize = 20;

/// Outcome column name used by the synthetic generator.
pub const SYNTH_OUTCOME: &str = "y";

/// Levels emitted for categorical columns by [`synth_rare_event`]. Level `k`
/// contributes `k * coefficient` to the linear predictor.
pub const SYNTH_LEVELS: [&str; 3] = ["a", "b", "c"];

/// Largest value drawn for ordinal synthetic columns (uniform on `0..=9`).
pub const SYNTH_ORDINAL_MAX: u32 = 9;

#[derive(Debug, Error)]
pub enum DataError {
    #[error("table is empty: {0}")]
    Empty(String),
    #[error("outcome column `{0}` not found in header")]
    MissingOutcome(String),
    #[error("non-binary outcome value `{value}` in column `{column}` at row {row}")]
    NonBinaryOutcome {
        column: String,
        row: usize,
        value: String,
    },
    #[error("ragged row {row}: expected {expected} fields, found {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },
    #[error("missing value in column `{column}` at row {row}")]
    MissingValue { column: String, row: usize },
    #[error("duplicate column name `{0}`")]
    DuplicateColumn(String),
    #[error("column `{column}` hinted as {kind} but row {row} holds `{value}`")]
    HintMismatch {
        column: String,
        kind: ColumnKind,
        row: usize,
        value: String,
    },
    #[error("unknown column `{0}`")]
    UnknownColumn(String),
    #[error("train fraction must lie strictly between 0 and 1, got {0}")]
    BadFraction(f64),
    #[error("cannot split {0} row(s) into two non-empty parts")]
    TooFewRows(usize),
    #[error("expected {expected} coefficients (intercept + one per feature), got {found}")]
    Arity { expected: usize, found: usize },
    #[error("synthetic sample size must be at least 1")]
    EmptySample,
    #[error("delimited text: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, DataError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColumnKind {
    Continuous,
    Ordinal,
    Categorical,
    Binary,
}

impl ColumnKind {
    pub fn is_numeric(self) -> bool {
        !matches!(self, ColumnKind::Categorical)
    }
}

impl fmt::Display for ColumnKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ColumnKind::Continuous => "continuous",
            ColumnKind::Ordinal => "ordinal",
            ColumnKind::Categorical => "categorical",
            ColumnKind::Binary => "binary",
        })
    }
}

impl FromStr for ColumnKind {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "continuous" => Ok(ColumnKind::Continuous),
            "ordinal" => Ok(ColumnKind::Ordinal),
            "categorical" => Ok(ColumnKind::Categorical),
            "binary" => Ok(ColumnKind::Binary),
            other => Err(format!("unknown column kind `{other}`")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ColumnSpec {
    pub name: String,
    pub kind: ColumnKind,
}

impl ColumnSpec {
    pub fn new(name: impl Into<String>, kind: ColumnKind) -> Self {
        Self {
            name: name.into(),
            kind,
        }
    }
}

/// Column storage. Categorical columns keep their text; everything else is `f64`.
#[derive(Debug, Clone, PartialEq)]
pub enum ColumnData {
    Numeric(Vec<f64>),
    Text(Vec<String>),
}

impl ColumnData {
    pub fn len(&self) -> usize {
        match self {
            ColumnData::Numeric(v) => v.len(),
            ColumnData::Text(v) => v.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn as_numeric(&self) -> Option<&[f64]> {
        match self {
            ColumnData::Numeric(v) => Some(v),
            ColumnData::Text(_) => None,
        }
    }

    pub fn as_text(&self) -> Option<&[String]> {
        match self {
            ColumnData::Text(v) => Some(v),
            ColumnData::Numeric(_) => None,
        }
    }

    /// Cell rendered the way [`Dataset::write_table`] writes it.
    pub fn render(&self, row: usize) -> String {
        match self {
            ColumnData::Numeric(v) => format!("{}", v[row]),
            ColumnData::Text(v) => v[row].clone(),
        }
    }

    fn select(&self, rows: &[usize]) -> ColumnData {
        match self {
            ColumnData::Numeric(v) => ColumnData::Numeric(rows.iter().map(|&i| v[i]).collect()),
            ColumnData::Text(v) => ColumnData::Text(rows.iter().map(|&i| v[i].clone()).collect()),
        }
    }
}

/// Options for [`Dataset::read`]. `load_table` is the strict entry point.
#[derive(Debug, Clone)]
pub struct LoadOptions {
    pub delimiter: u8,
    pub outcome: Option<String>,
    pub hints: HashMap<String, ColumnKind>,
    pub allow_empty: bool,
}

impl Default for LoadOptions {
    fn default() -> Self {
        Self {
            delimiter: b',',
            outcome: None,
            hints: HashMap::new(),
            allow_empty: false,
        }
    }
}

/// An immutable table of typed columns, optionally with a binary outcome.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset {
    schema: Vec<ColumnSpec>,
    columns: Vec<ColumnData>,
    outcome: Option<usize>,
    labels: Vec<u8>,
    n_rows: usize,
}

impl Dataset {
    /// Assemble a dataset from parts, checking the same invariants as the loader.
    pub fn from_columns(
        schema: Vec<ColumnSpec>,
        columns: Vec<ColumnData>,
        outcome: Option<&str>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for spec in &schema {
            if !seen.insert(spec.name.as_str()) {
                return Err(DataError::DuplicateColumn(spec.name.clone()));
            }
        }
        let n_rows = columns.first().map_or(0, ColumnData::len);
        for (i, col) in columns.iter().enumerate() {
            if col.len() != n_rows {
                return Err(DataError::Ragged {
                    row: n_rows.min(col.len()) + 1,
                    expected: n_rows,
                    found: col.len(),
                });
            }
            if schema[i].kind.is_numeric() != col.as_numeric().is_some() {
                return Err(DataError::HintMismatch {
                    column: schema[i].name.clone(),
                    kind: schema[i].kind,
                    row: 1,
                    value: if col.is_empty() { String::new() } else { col.render(0) },
                });
            }
        }
        let (outcome, labels) = match outcome {
            None => (None, Vec::new()),
            Some(name) => {
                let idx = schema
                    .iter()
                    .position(|c| c.name == name)
                    .ok_or_else(|| DataError::MissingOutcome(name.to_string()))?;
                let labels = labels_of(name, &columns[idx])?;
                (Some(idx), labels)
            }
        };
        let mut schema = schema;
        if let Some(idx) = outcome {
            schema[idx].kind = ColumnKind::Binary;
        }
        Ok(Self {
            schema,
            columns,
            outcome,
            labels,
            n_rows,
        })
    }

    /// Parse a delimited table with a header row. Lines starting with `#`
    /// are skipped, so versioned outputs of this crate can be read back.
    pub fn read<R: Read>(source: R, opts: &LoadOptions) -> Result<Self> {
        let mut reader = csv::ReaderBuilder::new()
            .delimiter(opts.delimiter)
            .has_headers(true)
            .comment(Some(b'#'))
            .flexible(true)
            .trim(csv::Trim::All)
            .from_reader(source);
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        if header.is_empty() || (header.len() == 1 && header[0].is_empty()) {
            return Err(DataError::Empty("no header row".into()));
        }
        let mut seen = HashSet::new();
        for name in &header {
            if !seen.insert(name.as_str()) {
                return Err(DataError::DuplicateColumn(name.clone()));
            }
        }
        if let Some(outcome) = &opts.outcome {
            if !header.iter().any(|h| h == outcome) {
                return Err(DataError::MissingOutcome(outcome.clone()));
            }
        }
        for name in opts.hints.keys() {
            if !header.iter().any(|h| h == name) {
                return Err(DataError::UnknownColumn(name.clone()));
            }
        }

        let mut cells: Vec<Vec<String>> = vec![Vec::new(); header.len()];
        for (i, record) in reader.records().enumerate() {
            let record = record?;
            let row = i + 1;
            if record.len() != header.len() {
                return Err(DataError::Ragged {
                    row,
                    expected: header.len(),
                    found: record.len(),
                });
            }
            for (j, field) in record.iter().enumerate() {
                if field.is_empty() || field.eq_ignore_ascii_case("na") {
                    return Err(DataError::MissingValue {
                        column: header[j].clone(),
                        row,
                    });
                }
                cells[j].push(field.to_string());
            }
        }
        if cells[0].is_empty() && !opts.allow_empty {
            return Err(DataError::Empty("header present but no data rows".into()));
        }

        let mut schema = Vec::with_capacity(header.len());
        let mut columns = Vec::with_capacity(header.len());
        for (name, raw) in header.into_iter().zip(cells) {
            let is_outcome = opts.outcome.as_deref() == Some(name.as_str());
            let hint = if is_outcome {
                Some(ColumnKind::Binary)
            } else {
                opts.hints.get(&name).copied()
            };
            if is_outcome {
                check_outcome_cells(&name, &raw)?;
            }
            let (kind, data) = type_column(&name, raw, hint)?;
            schema.push(ColumnSpec { name, kind });
            columns.push(data);
        }
        Self::from_columns(schema, columns, opts.outcome.as_deref())
    }

    pub fn schema(&self) -> &[ColumnSpec] {
        &self.schema
    }

    pub fn n_rows(&self) -> usize {
        self.n_rows
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.schema.iter().position(|c| c.name == name)
    }

    pub fn column(&self, name: &str) -> Option<&ColumnData> {
        self.column_index(name).map(|i| &self.columns[i])
    }

    pub fn column_at(&self, index: usize) -> &ColumnData {
        &self.columns[index]
    }

    pub fn spec(&self, name: &str) -> Option<&ColumnSpec> {
        self.schema.iter().find(|c| c.name == name)
    }

    pub fn outcome_name(&self) -> Option<&str> {
        self.outcome.map(|i| self.schema[i].name.as_str())
    }

    /// Outcome labels, each 0 or 1. Empty when the table has no outcome.
    pub fn outcome(&self) -> &[u8] {
        &self.labels
    }

    pub fn positives(&self) -> usize {
        self.labels.iter().filter(|&&y| y == 1).count()
    }

    pub fn prevalence(&self) -> f64 {
        self.positives() as f64 / self.n_rows as f64
    }

    /// Rows in the given order, keeping schema and outcome designation.
    pub fn select_rows(&self, rows: &[usize]) -> Dataset {
        Dataset {
            schema: self.schema.clone(),
            columns: self.columns.iter().map(|c| c.select(rows)).collect(),
            outcome: self.outcome,
            labels: if self.labels.is_empty() {
                Vec::new()
            } else {
                rows.iter().map(|&i| self.labels[i]).collect()
            },
            n_rows: rows.len(),
        }
    }

    /// Write the table with a header row. Numbers use the shortest
    /// representation that parses back to the same `f64`.
    pub fn write_table<W: Write>(&self, sink: W, delimiter: u8) -> Result<()> {
        let mut writer = csv::WriterBuilder::new()
            .delimiter(delimiter)
            .from_writer(sink);
        writer.write_record(self.schema.iter().map(|c| c.name.as_str()))?;
        for row in 0..self.n_rows {
            writer.write_record(self.columns.iter().map(|c| c.render(row)))?;
        }
        writer.flush()?;
        Ok(())
    }

    pub fn hints(&self) -> HashMap<String, ColumnKind> {
        self.schema
            .iter()
            .map(|c| (c.name.clone(), c.kind))
            .collect()
    }
}

/// Strict loader: the outcome column is required and the table must have rows.
pub fn load_table<R: Read>(
    source: R,
    outcome_name: &str,
    schema_hints: Option<&HashMap<String, ColumnKind>>,
) -> Result<Dataset> {
    let opts = LoadOptions {
        outcome: Some(outcome_name.to_string()),
        hints: schema_hints.cloned().unwrap_or_default(),
        ..LoadOptions::default()
    };
    Dataset::read(source, &opts)
}

pub fn load_path(path: &Path, opts: &LoadOptions) -> Result<Dataset> {
    let file = std::fs::File::open(path)?;
    Dataset::read(std::io::BufReader::new(file), opts)
}

fn check_outcome_cells(name: &str, raw: &[String]) -> Result<()> {
    for (i, cell) in raw.iter().enumerate() {
        match cell.parse::<f64>() {
            Ok(v) if v == 0.0 || v == 1.0 => {}
            _ => {
                return Err(DataError::NonBinaryOutcome {
                    column: name.to_string(),
                    row: i + 1,
                    value: cell.clone(),
                })
            }
        }
    }
    Ok(())
}

fn labels_of(name: &str, column: &ColumnData) -> Result<Vec<u8>> {
    match column {
        ColumnData::Numeric(values) => values
            .iter()
            .enumerate()
            .map(|(i, &v)| {
                if v == 0.0 {
                    Ok(0)
                } else if v == 1.0 {
                    Ok(1)
                } else {
                    Err(DataError::NonBinaryOutcome {
                        column: name.to_string(),
                        row: i + 1,
                        value: format!("{v}"),
                    })
                }
            })
            .collect(),
        ColumnData::Text(values) => Err(DataError::NonBinaryOutcome {
            column: name.to_string(),
            row: 1,
            value: values.first().cloned().unwrap_or_default(),
        }),
    }
}

fn type_column(
    name: &str,
    raw: Vec<String>,
    hint: Option<ColumnKind>,
) -> Result<(ColumnKind, ColumnData)> {
    if hint == Some(ColumnKind::Categorical) {
        return Ok((ColumnKind::Categorical, ColumnData::Text(raw)));
    }
    let mut parsed = Vec::with_capacity(raw.len());
    for (i, cell) in raw.iter().enumerate() {
        match cell.parse::<f64>() {
            Ok(v) if v.is_finite() => parsed.push(v),
            _ => match hint {
                Some(kind) => {
                    return Err(DataError::HintMismatch {
                        column: name.to_string(),
                        kind,
                        row: i + 1,
                        value: cell.clone(),
                    })
                }
                None => return Ok((ColumnKind::Categorical, ColumnData::Text(raw))),
            },
        }
    }
    let kind = match hint {
        Some(ColumnKind::Binary) => {
            if let Some(i) = parsed.iter().position(|&v| v != 0.0 && v != 1.0) {
                return Err(DataError::HintMismatch {
                    column: name.to_string(),
                    kind: ColumnKind::Binary,
                    row: i + 1,
                    value: raw[i].clone(),
                });
            }
            ColumnKind::Binary
        }
        Some(kind) => kind,
        None => infer_kind(&parsed),
    };
    Ok((kind, ColumnData::Numeric(parsed)))
}

/// The documented inference rule for an all-numeric column.
pub fn infer_kind(values: &[f64]) -> ColumnKind {
    if values.is_empty() {
        return ColumnKind::Continuous;
    }
    if values.iter().all(|&v| v == 0.0 || v == 1.0) {
        return ColumnKind::Binary;
    }
    if values.iter().all(|v| v.fract() == 0.0) {
        let distinct: BTreeSet<i64> = values.iter().map(|&v| v as i64).collect();
        if distinct.len() <= MAX_ORDINAL_LEVELS {
            return ColumnKind::Ordinal;
        }
    }
    ColumnKind::Continuous
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitSpec {
    train_fraction: f64,
    seed: u64,
}

impl SplitSpec {
    pub fn new(train_fraction: f64, seed: u64) -> Result<Self> {
        if !(train_fraction > 0.0 && train_fraction < 1.0) {
            return Err(DataError::BadFraction(train_fraction));
        }
        Ok(Self {
            train_fraction,
            seed,
        })
    }

    pub fn train_fraction(&self) -> f64 {
        self.train_fraction
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Training rows: `round(fraction * n)` clamped to `1..=n-1`.
    pub fn train_size(&self, n: usize) -> usize {
        let raw = (self.train_fraction * n as f64).round() as usize;
        raw.clamp(1, n.saturating_sub(1).max(1))
    }
}

/// Random partition into (train, holdout). Each part keeps the original row order.
pub fn split(data: &Dataset, spec: SplitSpec) -> Result<(Dataset, Dataset)> {
    let n = data.n_rows();
    if n < 2 {
        return Err(DataError::TooFewRows(n));
    }
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut seeded_rng(spec.seed));
    let n_train = spec.train_size(n);
    let mut train = order[..n_train].to_vec();
    let mut test = order[n_train..].to_vec();
    train.sort_unstable();
    test.sort_unstable();
    Ok((data.select_rows(&train), data.select_rows(&test)))
}

/// ChaCha8 stream seeded from a `u64`; output is identical on every platform.
pub fn seeded_rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Draw `n` rows from a logistic model.
///
/// Features per row, in schema order: continuous ~ U[0, 1), ordinal ~ uniform
/// on `0..=9`, binary ~ Bernoulli(1/2), categorical ~ uniform over
/// [`SYNTH_LEVELS`] (entering the predictor as level index 0, 1, 2). The
/// outcome is 1 when a further U[0, 1) draw falls below
/// `inverse_logit(coefficients[0] + sum_j coefficients[j+1] * x_j)`.
pub fn synth_rare_event(
    n: usize,
    coefficients: &[f64],
    feature_spec: &[ColumnSpec],
    seed: u64,
) -> Result<Dataset> {
    if n == 0 {
        return Err(DataError::EmptySample);
    }
    if coefficients.len() != feature_spec.len() + 1 {
        return Err(DataError::Arity {
            expected: feature_spec.len() + 1,
            found: coefficients.len(),
        });
    }
    let mut rng = seeded_rng(seed);
    let mut numeric: Vec<Vec<f64>> = vec![Vec::with_capacity(n); feature_spec.len()];
    let mut outcome = Vec::with_capacity(n);
    for _ in 0..n {
        let mut eta = coefficients[0];
        for (j, spec) in feature_spec.iter().enumerate() {
            let x = match spec.kind {
                ColumnKind::Continuous => rng.random::<f64>(),
                ColumnKind::Ordinal => rng.random_range(0..=SYNTH_ORDINAL_MAX) as f64,
                ColumnKind::Binary => f64::from(u8::from(rng.random::<bool>())),
                ColumnKind::Categorical => rng.random_range(0..SYNTH_LEVELS.len()) as f64,
            };
            eta += coefficients[j + 1] * x;
            numeric[j].push(x);
        }
        let p = crate::glm::probability(eta);
        outcome.push(if rng.random::<f64>() < p { 1.0 } else { 0.0 });
    }

    let mut schema: Vec<ColumnSpec> = feature_spec.to_vec();
    let mut columns: Vec<ColumnData> = feature_spec
        .iter()
        .zip(numeric)
        .map(|(spec, values)| match spec.kind {
            ColumnKind::Categorical => ColumnData::Text(
                values
                    .into_iter()
                    .map(|v| SYNTH_LEVELS[v as usize].to_string())
                    .collect(),
            ),
            _ => ColumnData::Numeric(values),
        })
        .collect();
    schema.push(ColumnSpec::new(SYNTH_OUTCOME, ColumnKind::Binary));
    columns.push(ColumnData::Numeric(outcome));
    Dataset::from_columns(schema, columns, Some(SYNTH_OUTCOME))
}
