//! Verdict records. Each record renders as one JSON line or as a few lines
//! of text; both carry the same verdict data.

use std::fmt::Write as _;

use causalis_core::{CausePattern, CauseVerdict, Divergence, Failure, Violation, Witness};
use serde::{Deserialize, Serialize};

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Setting {
    pub var: String,
    pub value: String,
}

impl Setting {
    fn list(pairs: &[(String, String)]) -> Vec<Setting> {
        pairs.iter().map(|(var, value)| Setting { var: var.clone(), value: value.clone() }).collect()
    }
}

fn settings_text(s: &[Setting]) -> String {
    let parts: Vec<String> = s.iter().map(|s| format!("{}={}", s.var, s.value)).collect();
    format!("{{{}}}", parts.join(", "))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct WitnessRecord {
    pub contingency: Vec<Setting>,
    pub alternative: Vec<Setting>,
}

impl From<&Witness> for WitnessRecord {
    fn from(w: &Witness) -> Self {
        WitnessRecord { contingency: Setting::list(&w.contingency), alternative: Setting::list(&w.alternative) }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct FailureRecord {
    pub code: String,
    /// The smaller pattern that already satisfies AC2, for AC3 failures.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<Vec<Setting>>,
}

impl From<&Failure> for FailureRecord {
    fn from(f: &Failure) -> Self {
        let subset = match f {
            Failure::NotMinimal(s) => Some(Setting::list(s)),
            _ => None,
        };
        FailureRecord { code: f.code().to_string(), subset }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub model: String,
    pub context: String,
    pub semantics: String,
    pub formula: String,
    pub holds: bool,
    /// Details when the formula is a single cause statement with a concrete pattern.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub failure: Option<FailureRecord>,
    pub elapsed_us: u64,
}

impl CheckRecord {
    pub fn set_verdict(&mut self, v: &CauseVerdict) {
        self.witness = v.witness().map(WitnessRecord::from);
        self.failure = v.failure().map(FailureRecord::from);
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CauseRecord {
    pub pattern: String,
    pub witness: WitnessRecord,
}

impl CauseRecord {
    pub fn new(pattern: &CausePattern, v: &CauseVerdict) -> Self {
        CauseRecord { pattern: pattern.to_string(), witness: v.witness().expect("listed causes hold").into() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CausesRecord {
    pub model: String,
    pub context: String,
    pub semantics: String,
    pub effect: String,
    pub non_circular: bool,
    pub causes: Vec<CauseRecord>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ViolationRecord {
    pub context: String,
    pub variables: Vec<String>,
    pub formula: String,
}

impl From<&Violation> for ViolationRecord {
    fn from(v: &Violation) -> Self {
        ViolationRecord { context: v.context.clone(), variables: v.variables.clone(), formula: v.formula.to_string() }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PolicyRecord {
    pub model: String,
    pub semantics: String,
    /// `robust-declassification`, `authorization` or `delegation`.
    pub check: String,
    pub holds: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub actor: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain: Option<Vec<String>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub context: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default)]
    pub violations: Vec<ViolationRecord>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DivergenceRecord {
    pub var: String,
    pub input: Vec<Setting>,
    pub outputs: [String; 2],
}

impl From<&Divergence> for DivergenceRecord {
    fn from(d: &Divergence) -> Self {
        DivergenceRecord {
            var: d.var.clone(),
            input: Setting::list(&d.input),
            outputs: [d.outputs.0.clone(), d.outputs.1.clone()],
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DistinguishRecord {
    pub model_a: String,
    pub model_b: String,
    pub context_a: String,
    pub context_b: String,
    pub semantics: String,
    /// `atom`, `causal` or `models-equivalent`.
    pub outcome: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub formula: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub divergence: Option<DivergenceRecord>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds_in_a: Option<bool>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub holds_in_b: Option<bool>,
    pub elapsed_us: u64,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClassifyRecord {
    pub formula: String,
    pub fragment: String,
    pub circular: bool,
    pub interventional: bool,
    pub intervention_targets_counted: bool,
    pub vars: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ErrorRecord {
    pub message: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub origin: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub line: Option<usize>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub column: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "record", rename_all = "kebab-case")]
pub enum Record {
    Check(CheckRecord),
    Causes(CausesRecord),
    Policy(PolicyRecord),
    Distinguish(DistinguishRecord),
    Classify(ClassifyRecord),
    Error(ErrorRecord),
}

/// ANSI styling for verdict words.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Style {
    pub color: bool,
}

impl Style {
    fn verdict(self, ok: bool, text: &str) -> String {
        match (self.color, ok) {
            (false, _) => text.to_string(),
            (true, true) => format!("\x1b[32m{text}\x1b[0m"),
            (true, false) => format!("\x1b[31m{text}\x1b[0m"),
        }
    }
}

fn holds_word(holds: bool) -> &'static str {
    if holds {
        "holds"
    } else {
        "does not hold"
    }
}

fn witness_line(out: &mut String, w: &WitnessRecord) {
    writeln!(
        out,
        "  witness: contingency {}, alternative {}",
        settings_text(&w.contingency),
        settings_text(&w.alternative)
    )
    .unwrap();
}

impl Record {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("records serialize")
    }

    pub fn exit_ok(&self) -> bool {
        match self {
            Record::Check(r) => r.holds,
            Record::Causes(r) => !r.causes.is_empty(),
            Record::Policy(r) => r.holds,
            Record::Distinguish(r) => r.formula.is_some(),
            Record::Classify(_) => true,
            Record::Error(_) => false,
        }
    }

    pub fn human(&self, style: Style) -> String {
        let mut out = String::new();
        match self {
            Record::Check(r) => {
                writeln!(out, "{} [{}] {}", style.verdict(r.holds, holds_word(r.holds)), r.context, r.formula).unwrap();
                if let Some(w) = &r.witness {
                    witness_line(&mut out, w);
                }
                if let Some(f) = &r.failure {
                    match &f.subset {
                        Some(s) => writeln!(out, "  failure: {} via subset {}", f.code, settings_text(s)).unwrap(),
                        None => writeln!(out, "  failure: {}", f.code).unwrap(),
                    }
                }
                writeln!(out, "  model {}, {} semantics, {} us", r.model, r.semantics, r.elapsed_us).unwrap();
            }
            Record::Causes(r) => {
                let filter = if r.non_circular { " (non-circular)" } else { "" };
                let n = r.causes.len();
                let line = format!("{n} cause{}", if n == 1 { "" } else { "s" });
                writeln!(out, "{} [{}] of {}{filter}", style.verdict(n > 0, &line), r.context, r.effect).unwrap();
                for c in &r.causes {
                    writeln!(out, "  {}", c.pattern).unwrap();
                    write!(out, "  ").unwrap();
                    witness_line(&mut out, &c.witness);
                }
                writeln!(out, "  model {}, {} semantics, {} us", r.model, r.semantics, r.elapsed_us).unwrap();
            }
            Record::Policy(r) => {
                let mut head = r.check.clone();
                if let (Some(a), Some(o)) = (&r.actor, &r.outcome) {
                    match &r.chain {
                        Some(chain) => write!(head, " {} -> {a} -> {o}", chain.join(" -> ")).unwrap(),
                        None => write!(head, " {a} -> {o}").unwrap(),
                    }
                }
                if let Some(c) = &r.context {
                    write!(head, " [{c}]").unwrap();
                }
                let word = if r.holds { "ok" } else { "violated" };
                writeln!(out, "{} {head}", style.verdict(r.holds, word)).unwrap();
                if let Some(f) = &r.formula {
                    writeln!(out, "  formula: {f}").unwrap();
                }
                for v in &r.violations {
                    writeln!(out, "  violation [{}] {}: {}", v.context, v.variables.join(", "), v.formula).unwrap();
                }
                writeln!(out, "  model {}, {} semantics, {} us", r.model, r.semantics, r.elapsed_us).unwrap();
            }
            Record::Distinguish(r) => {
                let found = r.formula.is_some();
                writeln!(
                    out,
                    "{} {} [{}] vs {} [{}]",
                    style.verdict(found, &r.outcome),
                    r.model_a,
                    r.context_a,
                    r.model_b,
                    r.context_b
                )
                .unwrap();
                if let Some(f) = &r.formula {
                    writeln!(out, "  formula: {f}").unwrap();
                }
                if let Some(d) = &r.divergence {
                    writeln!(
                        out,
                        "  divergence: {} on {} gives {} vs {}",
                        d.var,
                        settings_text(&d.input),
                        d.outputs[0],
                        d.outputs[1]
                    )
                    .unwrap();
                }
                if let (Some(a), Some(b)) = (r.holds_in_a, r.holds_in_b) {
                    writeln!(out, "  verified: {} in {}, {} in {}", holds_word(a), r.model_a, holds_word(b), r.model_b)
                        .unwrap();
                }
                writeln!(out, "  {} semantics, {} us", r.semantics, r.elapsed_us).unwrap();
            }
            Record::Classify(r) => {
                let circ = if r.circular { "circular" } else { "non-circular" };
                let mut flags = vec![r.fragment.as_str(), circ];
                if r.interventional {
                    flags.push("interventional");
                }
                writeln!(out, "{} {}", flags.join(", "), r.formula).unwrap();
                let counted = if r.intervention_targets_counted { "counted" } else { "not counted" };
                writeln!(out, "  vars: {} (intervention targets {counted})", r.vars.join(", ")).unwrap();
            }
            Record::Error(r) => {
                let place = match (&r.origin, r.line, r.column) {
                    (Some(o), Some(l), Some(c)) => format!("{o}:{l}:{c}: "),
                    (Some(o), _, _) => format!("{o}: "),
                    _ => String::new(),
                };
                writeln!(out, "error: {place}{}", r.message).unwrap();
            }
        }
        out
    }
}
