//! The `costcut` command-line interface.
//!
//! Exit codes: 0 success, 1 computational or data failure, 2 usage error.
//! Every output file starts with a `# costcut-<kind> v1` line; the table
//! reader skips `#` lines, so outputs chain into later commands.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::data::{load_path, synth_rare_event, ColumnData, ColumnKind, ColumnSpec, Dataset, LoadOptions};
use crate::decision::{classify, make_policy, policy_from_ratio, CostPolicy};
use crate::encoding::{build_design, EncodingPlan, Term};
use crate::evaluation::{evaluate, evaluate_scores, sweep, ConfusionMatrix};
use crate::exec::Execution;
use crate::fixtures::{self, reference_checks, CheckStatus};
use crate::glm::{fit, wald_p_values, FitOptions, LogisticFit};
use crate::model_file::ModelFile;
use crate::selection::{stepwise, Criterion, Direction, Granularity, SelectionConfig};

#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Failure(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Failure(_) => 1,
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Usage(m) | CliError::Failure(m) => m,
        }
    }
}

fn fail(e: impl std::fmt::Display) -> CliError {
    CliError::Failure(e.to_string())
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

type CliResult<T> = Result<T, CliError>;

#[derive(Parser, Debug)]
#[command(name = "costcut", version, about = "Cost-ratio cutpoints, logistic fits and cost audits for rare-event classifiers")]
pub struct Cli {
    /// Run every parallel section on one thread.
    #[arg(long, global = true)]
    sequential: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fit a logistic regression, optionally with stepwise selection.
    Fit(FitArgs),
    /// Append log-odds and probability columns to a feature table.
    Predict(PredictArgs),
    /// Classify probabilities against a cost policy.
    Decide(DecideArgs),
    /// Cost report from scored data, explicit counts or a built-in fixture.
    Evaluate(EvaluateArgs),
    /// Total cost across a list of cost ratios.
    Sweep(SweepArgs),
    /// Recompute the reference cost figures from the built-in confusion counts.
    PaperCheck(PaperCheckArgs),
    /// Write a synthetic table drawn from a logistic model.
    Synth(SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum StepwiseMode {
    Aic,
    Pvalue,
    None,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum DirectionArg {
    Forward,
    Backward,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum GranularityArg {
    Column,
    Variable,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Machine,
}

#[derive(Args, Debug)]
struct FitArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    outcome: String,
    /// Encoding plan file. Without one, numeric columns enter linearly and
    /// text columns as categorical dummies.
    #[arg(long)]
    plan: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = StepwiseMode::None)]
    stepwise: StepwiseMode,
    /// Inclusion and exclusion threshold for `--stepwise pvalue`.
    #[arg(long, default_value_t = 0.10)]
    alpha: f64,
    /// Exclusion threshold, when it should differ from `--alpha`.
    #[arg(long)]
    alpha_out: Option<f64>,
    #[arg(long, value_enum, default_value_t = DirectionArg::Both)]
    direction: DirectionArg,
    #[arg(long, value_enum, default_value_t = GranularityArg::Column)]
    granularity: GranularityArg,
    #[arg(long, default_value_t = 100)]
    max_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    ridge: f64,
    #[arg(long, default_value_t = 50)]
    max_iterations: usize,
    /// Model file to write.
    #[arg(long)]
    out: PathBuf,
    /// Selection trace; defaults to `<out>.trace` when stepwise is on.
    #[arg(long)]
    trace: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PredictArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long)]
    data: PathBuf,
    /// Comma-separated columns copied to the output; default all input columns.
    #[arg(long, value_delimiter = ',')]
    id: Option<Vec<String>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug, Clone, Copy)]
struct PolicyArgs {
    /// False-negative cost in units of one false positive.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["cost_fn", "cost_fp"])]
    cost_ratio: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "cost_fp")]
    cost_fn: Option<f64>,
    #[arg(long, allow_hyphen_values = true, requires = "cost_fn")]
    cost_fp: Option<f64>,
}

impl PolicyArgs {
    fn policy(&self) -> CliResult<CostPolicy> {
        let policy = match (self.cost_ratio, self.cost_fn, self.cost_fp) {
            (Some(r), _, _) => policy_from_ratio(r),
            (None, Some(cfn), Some(cfp)) => make_policy(cfn, cfp),
            _ => return Err(usage("a cost policy is required: --cost-ratio R or --cost-fn A --cost-fp B")),
        };
        policy.map_err(usage)
    }
}

#[derive(Args, Debug)]
struct DecideArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long, default_value = "probability")]
    prob_column: String,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EvaluateArgs {
    /// Scored table with a probability column and a 0/1 label column.
    #[arg(long, conflicts_with_all = ["confusion", "fixture"])]
    data: Option<PathBuf>,
    /// Label column of `--data`.
    #[arg(long)]
    outcome: Option<String>,
    #[arg(long, default_value = "probability")]
    prob_column: String,
    /// Counts `tp,fp,fn,tn`.
    #[arg(long, value_delimiter = ',', num_args = 1, conflicts_with = "fixture")]
    confusion: Option<Vec<u64>>,
    /// Built-in counts: training-forest, training-benchmark, validation-forest.
    #[arg(long)]
    fixture: Option<String>,
    #[command(flatten)]
    policy: PolicyArgs,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SweepArgs {
    #[arg(long)]
    data: PathBuf,
    #[arg(long)]
    outcome: String,
    #[arg(long, default_value = "probability")]
    prob_column: String,
    /// Strictly increasing positive ratios, comma separated.
    #[arg(long, value_delimiter = ',', required = true)]
    ratios: Vec<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct PaperCheckArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args, Debug)]
struct SynthArgs {
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    n: u64,
    /// Intercept first, then one coefficient per feature.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true, required = true)]
    coefficients: Vec<f64>,
    /// `name:kind` pairs, kind one of continuous, ordinal, binary, categorical.
    #[arg(long, value_delimiter = ',')]
    features: Vec<String>,
    #[arg(long, default_value_t = 1)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Parse `args` (program name first) and run. Returns the exit code.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                stdout.write_all(text.as_bytes())
            } else {
                stderr.write_all(text.as_bytes())
            };
            return code;
        }
    };
    let exec = if cli.sequential {
        Execution::Sequential
    } else {
        Execution::Parallel
    };
    let result = match &cli.command {
        Command::Fit(a) => cmd_fit(a, exec, stdout, stderr),
        Command::Predict(a) => cmd_predict(a, exec, stdout),
        Command::Decide(a) => cmd_decide(a, stdout),
        Command::Evaluate(a) => cmd_evaluate(a, stdout),
        Command::Sweep(a) => cmd_sweep(a, exec, stdout),
        Command::PaperCheck(a) => cmd_paper_check(a, stdout),
        Command::Synth(a) => cmd_synth(a, stdout),
    };
    match result {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(stderr, "error: {}", e.message());
            e.exit_code()
        }
    }
}

/// Ten significant digits, printed in the shortest form that reads back exactly.
pub fn sig10(x: f64) -> String {
    if !x.is_finite() {
        return format!("{x}");
    }
    let rounded: f64 = format!("{x:.9e}").parse().expect("formatted float parses");
    format!("{rounded}")
}

fn emit(path: Option<&Path>, contents: &str, stdout: &mut dyn Write) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, contents).map_err(|e| fail(format!("{}: {e}", p.display()))),
        None => stdout.write_all(contents.as_bytes()).map_err(fail),
    }
}

fn read_table(path: &Path, outcome: Option<&str>, allow_empty: bool) -> CliResult<Dataset> {
    let opts = LoadOptions {
        outcome: outcome.map(str::to_string),
        allow_empty,
        ..LoadOptions::default()
    };
    load_path(path, &opts).map_err(|e| fail(format!("{}: {e}", path.display())))
}

fn csv_line(fields: &[String]) -> String {
    let mut w = csv::WriterBuilder::new().from_writer(Vec::new());
    w.write_record(fields).expect("write to memory");
    String::from_utf8(w.into_inner().expect("flush to memory")).expect("utf-8 input")
}

/// Every column except the outcome: numeric ones linear, text ones categorical.
pub fn default_plan(data: &Dataset) -> EncodingPlan {
    let mut plan = EncodingPlan::default();
    for spec in data.schema() {
        if Some(spec.name.as_str()) == data.outcome_name() {
            continue;
        }
        plan = plan.with_term(match data.column(&spec.name) {
            Some(ColumnData::Text(_)) => Term::Categorical(spec.name.clone()),
            _ => Term::Linear(spec.name.clone()),
        });
    }
    plan
}

/// Coefficient table with Wald statistics.
pub fn coefficient_table(f: &LogisticFit) -> String {
    let se = f.std_errors();
    let p = wald_p_values(f).unwrap_or_else(|_| vec![f64::NAN; f.n_params()]);
    let width = f.column_names.iter().map(|n| n.chars().count()).max().unwrap_or(4).max(4);
    let mut s = String::new();
    let _ = writeln!(s, "{:<width$}  {:>14}  {:>12}  {:>9}  {:>10}", "term", "estimate", "std_error", "z", "p_value");
    for (j, name) in f.column_names.iter().enumerate() {
        let b = f.coefficients[j];
        let _ = writeln!(
            s,
            "{name:<width$}  {b:>14.6}  {:>12.6}  {:>9.3}  {:>10.4e}",
            se[j],
            b / se[j],
            p[j]
        );
    }
    s
}

fn cmd_fit(a: &FitArgs, exec: Execution, stdout: &mut dyn Write, stderr: &mut dyn Write) -> CliResult<i32> {
    let options = FitOptions {
        max_iterations: a.max_iterations,
        ridge: a.ridge,
        ..FitOptions::default()
    };
    options.validate().map_err(usage)?;
    let config = SelectionConfig {
        direction: match a.direction {
            DirectionArg::Forward => Direction::Forward,
            DirectionArg::Backward => Direction::Backward,
            DirectionArg::Both => Direction::Bidirectional,
        },
        criterion: if a.stepwise == StepwiseMode::Pvalue {
            Criterion::PValue
        } else {
            Criterion::Aic
        },
        alpha_in: a.alpha,
        alpha_out: a.alpha_out.unwrap_or(a.alpha),
        granularity: match a.granularity {
            GranularityArg::Column => Granularity::SingleColumn,
            GranularityArg::Variable => Granularity::VariableGroup,
        },
        max_steps: a.max_steps,
        execution: exec,
    };
    config.validate().map_err(usage)?;
    let plan = match &a.plan {
        Some(p) => {
            let text = fs::read_to_string(p).map_err(|e| fail(format!("{}: {e}", p.display())))?;
            Some(EncodingPlan::parse(&text).map_err(|e| fail(format!("{}: {e}", p.display())))?)
        }
        None => None,
    };

    let data = read_table(&a.data, Some(&a.outcome), false)?;
    let plan = plan
        .unwrap_or_else(|| default_plan(&data))
        .resolve(&data)
        .map_err(fail)?;
    let design = build_design(&data, &plan).map_err(fail)?;

    let (model_fit, trace) = if a.stepwise == StepwiseMode::None {
        (fit(&design, data.outcome(), &options).map_err(fail)?, None)
    } else {
        let (f, t) = stepwise(&design, data.outcome(), &config, &options).map_err(fail)?;
        (f, Some(t))
    };
    for w in &model_fit.warnings {
        let _ = writeln!(stderr, "warning: {w}");
    }
    if !model_fit.converged {
        return Err(fail("the fit did not converge; no model written"));
    }

    let model = ModelFile {
        outcome: a.outcome.clone(),
        plan,
        fit: model_fit,
    };
    emit(Some(&a.out), &model.to_text(), stdout)?;
    if let Some(trace) = &trace {
        for w in &trace.warnings {
            let _ = writeln!(stderr, "warning: {w}");
        }
        let path = a.trace.clone().unwrap_or_else(|| {
            let mut p = a.out.clone().into_os_string();
            p.push(".trace");
            PathBuf::from(p)
        });
        emit(Some(&path), &trace.to_text(), stdout)?;
    }

    let f = &model.fit;
    let mut s = String::new();
    let _ = writeln!(s, "observations    {} ({} positive)", f.n_obs, f.n_positive);
    let _ = writeln!(s, "log-likelihood  {:.6}", f.log_likelihood);
    let _ = writeln!(s, "AIC             {:.6}", f.aic);
    let _ = writeln!(s, "iterations      {}", f.iterations);
    if let Some(t) = &trace {
        let _ = writeln!(s, "selection steps {}", t.steps.len());
    }
    s.push('\n');
    s.push_str(&coefficient_table(f));
    emit(None, &s, stdout)?;
    Ok(0)
}

/// Scores for `data` under `model`; the result has one entry per row.
pub fn score_table(model: &ModelFile, data: &Dataset, exec: Execution) -> CliResult<Vec<f64>> {
    let missing: Vec<&str> = model
        .plan
        .terms
        .iter()
        .map(Term::variable)
        .filter(|v| data.column(v).is_none())
        .collect();
    if !missing.is_empty() {
        return Err(fail(format!("table lacks model columns: {}", missing.join(", "))));
    }
    let design = build_design(data, &model.plan).map_err(fail)?;
    model.fit.log_odds_design(&design, exec).map_err(fail)
}

fn cmd_predict(a: &PredictArgs, exec: Execution, stdout: &mut dyn Write) -> CliResult<i32> {
    let text = fs::read_to_string(&a.model).map_err(|e| fail(format!("{}: {e}", a.model.display())))?;
    let model = ModelFile::parse(&text).map_err(|e| fail(format!("{}: {e}", a.model.display())))?;
    let raw = fs::read_to_string(&a.data).map_err(|e| fail(format!("{}: {e}", a.data.display())))?;
    if raw.lines().all(|l| l.trim().is_empty() || l.starts_with('#')) {
        return emit(a.out.as_deref(), "", stdout).map(|_| 0);
    }
    let data = read_table(&a.data, None, true)?;
    let ids: Vec<String> = match &a.id {
        Some(ids) => ids.clone(),
        None => data.schema().iter().map(|c| c.name.clone()).collect(),
    };
    let unknown: Vec<&str> = ids.iter().map(String::as_str).filter(|c| data.column(c).is_none()).collect();
    if !unknown.is_empty() && data.n_rows() > 0 {
        return Err(fail(format!("unknown --id columns: {}", unknown.join(", "))));
    }

    let mut out = String::from("# costcut-predictions v1\n");
    let mut header = ids.clone();
    header.push("log_odds".into());
    header.push("probability".into());
    if data.n_rows() == 0 {
        out.push_str(&csv_line(&header));
        return emit(a.out.as_deref(), &out, stdout).map(|_| 0);
    }
    let eta = score_table(&model, &data, exec)?;
    out.push_str(&csv_line(&header));
    let id_cols: Vec<&ColumnData> = ids.iter().map(|c| data.column(c).expect("checked above")).collect();
    for (i, &z) in eta.iter().enumerate() {
        let mut row: Vec<String> = id_cols.iter().map(|c| c.render(i)).collect();
        row.push(sig10(z));
        row.push(sig10(crate::glm::probability(z)));
        out.push_str(&csv_line(&row));
    }
    emit(a.out.as_deref(), &out, stdout)?;
    Ok(0)
}

fn probabilities(data: &Dataset, column: &str) -> CliResult<Vec<f64>> {
    match data.column(column) {
        Some(ColumnData::Numeric(v)) => {
            if let Some(bad) = v.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                return Err(fail(format!("probability {bad} in `{column}` is outside [0, 1]")));
            }
            Ok(v.clone())
        }
        Some(ColumnData::Text(_)) => Err(fail(format!("column `{column}` is not numeric"))),
        None if data.n_rows() == 0 => Ok(Vec::new()),
        None => Err(fail(format!("no `{column}` column in the table"))),
    }
}

fn cmd_decide(a: &DecideArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let policy = a.policy.policy()?;
    let data = read_table(&a.data, None, true)?;
    let probs = probabilities(&data, &a.prob_column)?;
    let mut out = String::from("# costcut-decisions v1\n");
    let mut header: Vec<String> = data.schema().iter().map(|c| c.name.clone()).collect();
    header.extend(["decision", "cost_if_low", "cost_if_high"].map(String::from));
    out.push_str(&csv_line(&header));
    for (i, &p) in probs.iter().enumerate() {
        let d = classify(p, &policy).map_err(fail)?;
        let mut row: Vec<String> = (0..data.schema().len()).map(|j| data.column_at(j).render(i)).collect();
        row.push(d.action.label().into());
        row.push(sig10(d.cost_if_low));
        row.push(sig10(d.cost_if_high));
        out.push_str(&csv_line(&row));
    }
    emit(a.out.as_deref(), &out, stdout)?;
    Ok(0)
}

fn cmd_evaluate(a: &EvaluateArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let policy = a.policy.policy()?;
    let report = if let Some(name) = &a.fixture {
        let cm = fixtures::named(name).ok_or_else(|| {
            usage(format!("unknown fixture `{name}`; expected one of {}", fixtures::FIXTURE_NAMES.join(", ")))
        })?;
        evaluate(&cm, &policy)
    } else if let Some(counts) = &a.confusion {
        let [tp, fp, fn_, tn] = counts[..] else {
            return Err(usage("--confusion takes four counts: tp,fp,fn,tn"));
        };
        evaluate(&ConfusionMatrix::new(tp, fp, fn_, tn), &policy)
    } else if let Some(path) = &a.data {
        let outcome = a
            .outcome
            .as_deref()
            .ok_or_else(|| usage("--outcome names the label column required with --data"))?;
        let data = read_table(path, Some(outcome), false)?;
        let probs = probabilities(&data, &a.prob_column)?;
        evaluate_scores(&probs, data.outcome(), &policy).map_err(fail)?
    } else {
        return Err(usage("evaluate needs --data, --confusion or --fixture"));
    };
    let text = match a.format {
        Format::Text => format!("# costcut-report v1\n{}", report.to_text()),
        Format::Machine => {
            let mut json = serde_json::json!({ "format": "costcut-report v1" });
            json["report"] = serde_json::to_value(&report).map_err(fail)?;
            serde_json::to_string_pretty(&json).map_err(fail)? + "\n"
        }
    };
    emit(a.out.as_deref(), &text, stdout)?;
    Ok(0)
}

fn cmd_sweep(a: &SweepArgs, exec: Execution, stdout: &mut dyn Write) -> CliResult<i32> {
    if a.ratios.is_empty() {
        return Err(usage("--ratios must list at least one ratio"));
    }
    let data = read_table(&a.data, Some(&a.outcome), false)?;
    let probs = probabilities(&data, &a.prob_column)?;
    let rows = sweep(&probs, data.outcome(), &a.ratios, exec).map_err(|e| match e {
        crate::evaluation::EvalError::EmptyRatios | crate::evaluation::EvalError::BadRatios => usage(e),
        other => fail(other),
    })?;
    let mut out = String::from("# costcut-sweep v1\n");
    out.push_str("ratio,cutpoint,tp,fp,fn,tn,total_cost,baseline_all_negative,saving_vs_all_negative\n");
    for r in rows {
        let cm = r.confusion;
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{}",
            r.ratio,
            sig10(r.cutpoint),
            cm.tp,
            cm.fp,
            cm.fn_,
            cm.tn,
            r.total_cost,
            r.baseline_all_negative,
            r.saving_vs_all_negative.map_or("NA".into(), sig10)
        );
    }
    emit(a.out.as_deref(), &out, stdout)?;
    Ok(0)
}

fn cmd_paper_check(a: &PaperCheckArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let checks = reference_checks();
    let ok = fixtures::all_pass(&checks);
    let text = match a.format {
        Format::Machine => {
            let json = serde_json::json!({ "format": "costcut-check v1", "all_pass": ok, "checks": checks });
            serde_json::to_string_pretty(&json).map_err(fail)? + "\n"
        }
        Format::Text => {
            let mut s = String::from("# costcut-check v1\n");
            for c in &checks {
                let tol = if c.status == CheckStatus::Info {
                    String::new()
                } else {
                    format!(" (tolerance {})", c.tolerance)
                };
                let _ = writeln!(
                    s,
                    "{:<12} {}: computed {} vs claimed {}{tol}",
                    c.status.label(),
                    c.name,
                    sig10(c.computed),
                    c.claimed
                );
                if let Some(note) = c.note {
                    let _ = writeln!(s, "{:<12}   {note}", "");
                }
            }
            let _ = writeln!(s, "{}", if ok { "all checks pass" } else { "some checks FAILED" });
            s
        }
    };
    emit(None, &text, stdout)?;
    Ok(if ok { 0 } else { 1 })
}

fn parse_feature(spec: &str) -> CliResult<ColumnSpec> {
    let (name, kind) = spec
        .split_once(':')
        .ok_or_else(|| usage(format!("feature `{spec}` should be name:kind")))?;
    let kind: ColumnKind = kind.trim().parse().map_err(|_| usage(format!("unknown column kind in `{spec}`")))?;
    Ok(ColumnSpec::new(name.trim(), kind))
}

fn cmd_synth(a: &SynthArgs, stdout: &mut dyn Write) -> CliResult<i32> {
    let features = a
        .features
        .iter()
        .filter(|f| !f.trim().is_empty())
        .map(|f| parse_feature(f))
        .collect::<CliResult<Vec<_>>>()?;
    if a.coefficients.len() != features.len() + 1 {
        return Err(usage(format!(
            "{} coefficients given; expected {} (intercept plus one per feature)",
            a.coefficients.len(),
            features.len() + 1
        )));
    }
    let n = usize::try_from(a.n).map_err(usage)?;
    let data = synth_rare_event(n, &a.coefficients, &features, a.seed).map_err(fail)?;
    let mut buf = format!("# costcut-synth v1 n={} seed={}\n", a.n, a.seed).into_bytes();
    data.write_table(&mut buf, b',').map_err(fail)?;
    emit(a.out.as_deref(), &String::from_utf8(buf).map_err(fail)?, stdout)?;
    Ok(0)
}
