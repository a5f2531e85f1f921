//! The `causalis` command line.
//!
//! Exit status: 0 when every reported verdict holds, 1 when some verdict
//! does not hold (or nothing distinguishes two models, or no cause is
//! found), 2 on any error.

use std::ffi::OsString;
use std::io::Write;
use std::num::NonZeroUsize;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};

use causalis_core::security::{authorization_violations, check_delegation_chain, check_robust_declassification};
use causalis_core::{
    check_actual_cause, distinguish, enumerate_causes, satisfies, Ac2Mode, CausalModel, Distinction, Formula, Fragment,
    PolicyLabels, SemanticsConfig, VarsPolicy,
};

use crate::report::{
    CauseRecord, CausesRecord, CheckRecord, ClassifyRecord, DistinguishRecord, ErrorRecord, PolicyRecord, Record,
    Style, ViolationRecord,
};
use crate::{parse_formula, parse_labels, parse_model, ParseError};

#[derive(Parser, Debug)]
#[command(name = "causalis", version, about = "Actual causality checks over finite structural causal models")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// Print one JSON record per line instead of text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Contingency rule for AC2.
    #[arg(long, global = true, value_enum, default_value_t = Semantics::EffectDisjoint)]
    pub semantics: Semantics,
    /// Colour for text output.
    #[arg(long, global = true, value_enum, env = "CAUSALIS_COLOR", default_value_t = ColorChoice::Auto)]
    pub color: ColorChoice,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Semantics {
    /// Contingency sets avoid the effect's variables.
    EffectDisjoint,
    /// Any contingency set outside the cause.
    Literal,
}

impl From<Semantics> for Ac2Mode {
    fn from(s: Semantics) -> Self {
        match s {
            Semantics::EffectDisjoint => Ac2Mode::EffectDisjoint,
            Semantics::Literal => Ac2Mode::Literal,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ColorChoice {
    Auto,
    Always,
    Never,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Evaluate a formula in each context of a model.
    Check(CheckArgs),
    /// List the actual causes of an effect.
    Causes(CausesArgs),
    /// Check robust declassification, authorization or a delegation chain.
    Policy(PolicyArgs),
    /// Find a formula true in the first model and false in the second.
    Distinguish(DistinguishArgs),
    /// Report the fragment and circularity of a formula.
    Classify(ClassifyArgs),
}

#[derive(Args, Debug)]
pub struct Input {
    /// Model file (`.cm`).
    #[arg(value_name = "MODEL")]
    model_path: Option<PathBuf>,
    /// Formula text.
    #[arg(value_name = "FORMULA")]
    formula_text: Option<String>,
    /// Same as MODEL.
    #[arg(long = "model", value_name = "PATH", conflicts_with = "model_path")]
    model_flag: Option<PathBuf>,
    /// Same as FORMULA.
    #[arg(long = "formula", value_name = "TEXT", conflicts_with = "formula_text")]
    formula_flag: Option<String>,
}

#[derive(Args, Debug)]
pub struct Contexts {
    /// Only evaluate in this context (repeatable).
    #[arg(long = "context", value_name = "NAME")]
    context: Vec<String>,
    /// Evaluate in every context (the default).
    #[arg(long, conflicts_with = "context")]
    all_contexts: bool,
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    contexts: Contexts,
}

#[derive(Args, Debug)]
pub struct CausesArgs {
    #[command(flatten)]
    input: Input,
    #[command(flatten)]
    contexts: Contexts,
    /// Largest cause pattern to consider.
    #[arg(long, value_name = "N")]
    max_width: Option<NonZeroUsize>,
    /// Drop causes that share a variable with the effect.
    #[arg(long)]
    non_circular: bool,
}

#[derive(Args, Debug)]
pub struct PolicyArgs {
    /// Model file (`.cm`).
    #[arg(value_name = "MODEL")]
    model_path: Option<PathBuf>,
    /// Labels file (`.labels`).
    #[arg(value_name = "LABELS")]
    labels_path: Option<PathBuf>,
    /// Same as MODEL.
    #[arg(long = "model", value_name = "PATH", conflicts_with = "model_path")]
    model_flag: Option<PathBuf>,
    /// Same as LABELS.
    #[arg(long = "labels", value_name = "PATH", conflicts_with = "labels_path")]
    labels_flag: Option<PathBuf>,
    /// Untrusted actor for authorization or delegation (default: every untrusted variable).
    #[arg(long)]
    actor: Option<String>,
    /// Privileged outcome; enables the authorization check.
    #[arg(long)]
    outcome: Option<String>,
    /// Trusted delegation chain, outermost first (comma-separated).
    #[arg(long, value_delimiter = ',', requires_all = ["actor", "outcome"])]
    chain: Option<Vec<String>>,
    #[command(flatten)]
    contexts: Contexts,
}

#[derive(Args, Debug)]
pub struct DistinguishArgs {
    /// Model in which the formula should hold.
    #[arg(value_name = "MODEL_A")]
    model_a: PathBuf,
    /// Model in which it should fail.
    #[arg(value_name = "MODEL_B")]
    model_b: PathBuf,
    /// Context of the first model (default: its first context).
    #[arg(long)]
    context_a: Option<String>,
    /// Context of the second model (default: its first context).
    #[arg(long)]
    context_b: Option<String>,
}

#[derive(Args, Debug)]
pub struct ClassifyArgs {
    #[command(flatten)]
    input: Input,
    /// Ignore intervention targets when testing circularity.
    #[arg(long)]
    exclude_intervention_targets: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{origin}: {source}")]
    Io { origin: String, source: std::io::Error },
    #[error("{origin}:{error}")]
    Parse { origin: String, error: Box<ParseError>, rendered: String },
    #[error(transparent)]
    Model(#[from] causalis_core::Error),
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn record(&self) -> ErrorRecord {
        match self {
            CliError::Parse { origin, error, .. } => ErrorRecord {
                message: error.kind.to_string(),
                origin: Some(origin.clone()),
                line: Some(error.span.line),
                column: Some(error.span.column),
            },
            CliError::Io { origin, source } => {
                ErrorRecord { message: source.to_string(), origin: Some(origin.clone()), line: None, column: None }
            }
            other => ErrorRecord { message: other.to_string(), origin: None, line: None, column: None },
        }
    }

    fn human(&self) -> String {
        match self {
            CliError::Parse { rendered, .. } => rendered.clone(),
            other => format!("error: {other}\n"),
        }
    }
}

fn read(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|source| CliError::Io { origin: path.display().to_string(), source })
}

fn parsed<T>(origin: &str, text: &str, r: Result<T, ParseError>) -> Result<T, CliError> {
    r.map_err(|error| CliError::Parse {
        origin: origin.to_string(),
        rendered: error.render(text, origin),
        error: Box::new(error),
    })
}

fn load_model(path: &Path) -> Result<CausalModel, CliError> {
    let text = read(path)?;
    parsed(&path.display().to_string(), &text, parse_model(&text))
}

fn load_formula(text: &str, model: &CausalModel) -> Result<Formula, CliError> {
    parsed("formula", text, parse_formula(text, model.signature()))
}

fn pick<T>(positional: Option<T>, flag: Option<T>, what: &str) -> Result<T, CliError> {
    positional.or(flag).ok_or_else(|| CliError::Usage(format!("missing {what}")))
}

impl Input {
    fn load(self) -> Result<(String, CausalModel, Formula), CliError> {
        let path = pick(self.model_path, self.model_flag, "model file (MODEL or --model)")?;
        let text = pick(self.formula_text, self.formula_flag, "formula (FORMULA or --formula)")?;
        let model = load_model(&path)?;
        let formula = load_formula(&text, &model)?;
        Ok((path.display().to_string(), model, formula))
    }
}

impl Contexts {
    fn select(&self, model: &CausalModel) -> Result<Vec<String>, CliError> {
        if self.context.is_empty() {
            return Ok(model.contexts().iter().map(|c| c.name().to_string()).collect());
        }
        for c in &self.context {
            model.context_index(c)?;
        }
        Ok(self.context.clone())
    }
}

fn micros(start: Instant) -> u64 {
    start.elapsed().as_micros().try_into().unwrap_or(u64::MAX)
}

fn check(args: CheckArgs, cfg: &SemanticsConfig) -> Result<Vec<Record>, CliError> {
    let (origin, model, formula) = args.input.load()?;
    let mut out = Vec::new();
    for ctx in args.contexts.select(&model)? {
        let start = Instant::now();
        let holds = satisfies(&model, &ctx, &formula, cfg)?;
        let mut record = CheckRecord {
            model: origin.clone(),
            context: ctx.clone(),
            semantics: cfg.ac2_mode.to_string(),
            formula: formula.to_string(),
            holds,
            witness: None,
            failure: None,
            elapsed_us: 0,
        };
        if let Formula::Cause(p, effect) = &formula {
            if p.as_concrete().is_ok() {
                record.set_verdict(&check_actual_cause(&model, &ctx, p, effect, cfg)?);
            }
        }
        record.elapsed_us = micros(start);
        out.push(Record::Check(record));
    }
    Ok(out)
}

fn causes(args: CausesArgs, cfg: &SemanticsConfig) -> Result<Vec<Record>, CliError> {
    let (origin, model, effect) = args.input.load()?;
    let cfg = SemanticsConfig { max_cause_width: args.max_width, ..*cfg };
    let effect_vars = effect.vars_of();
    let mut out = Vec::new();
    for ctx in args.contexts.select(&model)? {
        let start = Instant::now();
        let causes = enumerate_causes(&model, &ctx, &effect, &cfg)?
            .iter()
            .filter(|(p, _)| !args.non_circular || p.vars().all(|v| !effect_vars.contains(v)))
            .map(|(p, v)| CauseRecord::new(p, v))
            .collect();
        out.push(Record::Causes(CausesRecord {
            model: origin.clone(),
            context: ctx,
            semantics: cfg.ac2_mode.to_string(),
            effect: effect.to_string(),
            non_circular: args.non_circular,
            causes,
            elapsed_us: micros(start),
        }));
    }
    Ok(out)
}

fn policy(args: PolicyArgs, cfg: &SemanticsConfig) -> Result<Vec<Record>, CliError> {
    let path = pick(args.model_path, args.model_flag, "model file (MODEL or --model)")?;
    let origin = path.display().to_string();
    let model = load_model(&path)?;
    let labels = match args.labels_path.or(args.labels_flag) {
        Some(p) => {
            let text = read(&p)?;
            parsed(&p.display().to_string(), &text, parse_labels(&text, &model))?
        }
        None => PolicyLabels::default(),
    };
    let semantics = cfg.ac2_mode.to_string();
    let base = PolicyRecord {
        model: origin,
        semantics,
        check: String::new(),
        holds: true,
        actor: None,
        outcome: None,
        chain: None,
        context: None,
        formula: None,
        violations: Vec::new(),
        elapsed_us: 0,
    };
    let mut out = Vec::new();

    let start = Instant::now();
    let violations: Vec<ViolationRecord> =
        check_robust_declassification(&model, &labels, cfg)?.iter().map(ViolationRecord::from).collect();
    out.push(Record::Policy(PolicyRecord {
        check: "robust-declassification".into(),
        holds: violations.is_empty(),
        violations,
        elapsed_us: micros(start),
        ..base.clone()
    }));

    let actors: Vec<String> = match &args.actor {
        Some(a) => vec![a.clone()],
        None => labels.untrusted.clone(),
    };
    match (&args.chain, &args.outcome) {
        (Some(chain), Some(outcome)) => {
            let actor = args.actor.clone().expect("clap requires --actor with --chain");
            let names: Vec<&str> = chain.iter().map(String::as_str).collect();
            let mut all: Vec<&str> = names.clone();
            all.extend([actor.as_str(), outcome.as_str()]);
            let formula = Formula::wildcard_chain(&all)?.to_string();
            for ctx in args.contexts.select(&model)? {
                let start = Instant::now();
                let holds = check_delegation_chain(&model, &ctx, &names, &actor, outcome, cfg)?;
                out.push(Record::Policy(PolicyRecord {
                    check: "delegation".into(),
                    holds,
                    actor: Some(actor.clone()),
                    outcome: Some(outcome.clone()),
                    chain: Some(chain.clone()),
                    context: Some(ctx),
                    formula: Some(formula.clone()),
                    elapsed_us: micros(start),
                    ..base.clone()
                }));
            }
        }
        (None, Some(outcome)) => {
            for actor in actors {
                let start = Instant::now();
                let violations: Vec<ViolationRecord> = authorization_violations(&model, &labels, &actor, outcome, cfg)?
                    .iter()
                    .map(ViolationRecord::from)
                    .collect();
                out.push(Record::Policy(PolicyRecord {
                    check: "authorization".into(),
                    holds: violations.is_empty(),
                    actor: Some(actor),
                    outcome: Some(outcome.clone()),
                    violations,
                    elapsed_us: micros(start),
                    ..base.clone()
                }));
            }
        }
        _ => {}
    }
    Ok(out)
}

fn first_context(model: &CausalModel, given: Option<String>) -> Result<String, CliError> {
    match given {
        Some(c) => {
            model.context_index(&c)?;
            Ok(c)
        }
        None => Ok(model.contexts()[0].name().to_string()),
    }
}

fn distinguish_cmd(args: DistinguishArgs) -> Result<Vec<Record>, CliError> {
    let (m1, m2) = (load_model(&args.model_a)?, load_model(&args.model_b)?);
    let (u1, u2) = (first_context(&m1, args.context_a)?, first_context(&m2, args.context_b)?);
    let start = Instant::now();
    let d = distinguish(&m1, &u1, &m2, &u2)?;
    let cfg = SemanticsConfig::with_mode(Ac2Mode::EffectDisjoint);
    let (outcome, divergence) = match &d {
        Distinction::Atom(_) => ("atom", None),
        Distinction::Causal(p) => ("causal", Some((&p.divergence).into())),
        Distinction::Equivalent => ("models-equivalent", None),
    };
    let formula = d.formula();
    let (holds_in_a, holds_in_b) = match &formula {
        Some(f) => (Some(satisfies(&m1, &u1, f, &cfg)?), Some(satisfies(&m2, &u2, f, &cfg)?)),
        None => (None, None),
    };
    Ok(vec![Record::Distinguish(DistinguishRecord {
        model_a: args.model_a.display().to_string(),
        model_b: args.model_b.display().to_string(),
        context_a: u1,
        context_b: u2,
        semantics: cfg.ac2_mode.to_string(),
        outcome: outcome.into(),
        formula: formula.map(|f| f.to_string()),
        divergence,
        holds_in_a,
        holds_in_b,
        elapsed_us: micros(start),
    })])
}

fn classify(args: ClassifyArgs) -> Result<Vec<Record>, CliError> {
    let (_, _, formula) = args.input.load()?;
    let policy = VarsPolicy { intervention_targets: !args.exclude_intervention_targets };
    let class = formula.classify_with(policy);
    let fragment = match class.fragment {
        Fragment::Simple => "simple",
        Fragment::SimpleCausal => "simple-causal",
        Fragment::Nested => "nested",
    };
    Ok(vec![Record::Classify(ClassifyRecord {
        formula: formula.to_string(),
        fragment: fragment.into(),
        circular: class.circular,
        interventional: class.interventional,
        intervention_targets_counted: policy.intervention_targets,
        vars: formula.vars_with(policy).into_iter().collect(),
    })])
}

/// Runs a parsed command line and returns its records.
pub fn execute(cli: Cli) -> Result<Vec<Record>, CliError> {
    let cfg = SemanticsConfig::with_mode(cli.semantics.into());
    match cli.command {
        Command::Check(a) => check(a, &cfg),
        Command::Causes(a) => causes(a, &cfg),
        Command::Policy(a) => policy(a, &cfg),
        Command::Distinguish(a) => distinguish_cmd(a),
        Command::Classify(a) => classify(a),
    }
}

/// Parses `args`, runs the command and writes its output. Returns the exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write, tty: bool) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if e.use_stderr() { stderr.write_all(text.as_bytes()) } else { stdout.write_all(text.as_bytes()) };
            return code;
        }
    };
    let json = cli.json;
    let style = Style {
        color: match cli.color {
            ColorChoice::Always => true,
            ColorChoice::Never => false,
            ColorChoice::Auto => tty,
        },
    };
    match execute(cli) {
        Ok(records) => {
            for r in &records {
                let text = if json { r.to_json() + "\n" } else { r.human(style) };
                let _ = stdout.write_all(text.as_bytes());
            }
            if records.iter().all(Record::exit_ok) {
                0
            } else {
                1
            }
        }
        Err(e) => {
            if json {
                let _ = writeln!(stdout, "{}", Record::Error(e.record()).to_json());
            }
            let _ = stderr.write_all(e.human().as_bytes());
            2
        }
    }
}
