//! Formulas: atoms, Boolean connectives, interventions, (nested) cause
//! statements, value binders and wildcard causes.
//!
//! Formulas refer to variables and values by name. [`Formula::check`]
//! resolves them against a [`Signature`]; [`Formula::desugar`] removes binders
//! and wildcards by expanding them into finite disjunctions.

use alloc::boxed::Box;
use alloc::collections::{BTreeMap, BTreeSet};
use alloc::format;
use alloc::string::{String, ToString};
use alloc::vec::Vec;
use core::fmt;

use crate::combinatorics::Product;
use crate::error::{Error, Result};
use crate::model::Signature;

/// How a cause-pattern entry fixes its variable's value.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Binding {
    Value(String),
    /// A value variable bound by an enclosing `exists`.
    Bound(String),
    /// Existentially closed at the cause itself.
    Wildcard,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PatternEntry {
    pub var: String,
    pub binding: Binding,
}

/// The cause side of a cause statement: a nonempty conjunction over distinct variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct CausePattern {
    entries: Vec<PatternEntry>,
}

impl CausePattern {
    pub fn new(entries: Vec<PatternEntry>) -> Result<Self> {
        if entries.is_empty() {
            return Err(Error::EmptyPattern);
        }
        for (i, e) in entries.iter().enumerate() {
            if entries[..i].iter().any(|o| o.var == e.var) {
                return Err(Error::DuplicatePatternVariable(e.var.clone()));
            }
        }
        Ok(CausePattern { entries })
    }

    /// A pattern of concrete `(variable, value)` pairs.
    pub fn concrete<V: AsRef<str>, X: AsRef<str>>(pairs: &[(V, X)]) -> Result<Self> {
        Self::new(
            pairs
                .iter()
                .map(|(v, x)| PatternEntry {
                    var: v.as_ref().to_string(),
                    binding: Binding::Value(x.as_ref().to_string()),
                })
                .collect(),
        )
    }

    /// A pattern in which every variable is a wildcard.
    pub fn wildcards<V: AsRef<str>>(vars: &[V]) -> Result<Self> {
        Self::new(
            vars.iter().map(|v| PatternEntry { var: v.as_ref().to_string(), binding: Binding::Wildcard }).collect(),
        )
    }

    pub fn entries(&self) -> &[PatternEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn has_wildcard(&self) -> bool {
        self.entries.iter().any(|e| e.binding == Binding::Wildcard)
    }

    /// `(variable, value)` pairs, if every entry is concrete.
    pub fn as_concrete(&self) -> Result<Vec<(&str, &str)>> {
        self.entries
            .iter()
            .map(|e| match &e.binding {
                Binding::Value(x) => Ok((e.var.as_str(), x.as_str())),
                _ => Err(Error::NonConcretePattern(e.var.clone())),
            })
            .collect()
    }

    pub fn vars(&self) -> impl Iterator<Item = &str> {
        self.entries.iter().map(|e| e.var.as_str())
    }
}

/// Settings of an intervention prefix `[X <- x, ...]`: nonempty, distinct targets.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Intervention {
    settings: Vec<(String, String)>,
}

impl Intervention {
    pub fn new(settings: Vec<(String, String)>) -> Result<Self> {
        if settings.is_empty() {
            return Err(Error::EmptyIntervention);
        }
        for (i, (v, _)) in settings.iter().enumerate() {
            if settings[..i].iter().any(|(o, _)| o == v) {
                return Err(Error::DuplicateInterventionTarget(v.clone()));
            }
        }
        Ok(Intervention { settings })
    }

    pub fn of<V: AsRef<str>, X: AsRef<str>>(pairs: &[(V, X)]) -> Result<Self> {
        Self::new(pairs.iter().map(|(v, x)| (v.as_ref().to_string(), x.as_ref().to_string())).collect())
    }

    pub fn settings(&self) -> &[(String, String)] {
        &self.settings
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Formula {
    Atom {
        var: String,
        value: String,
    },
    /// `X = v` where `v` is a value variable bound by an enclosing `exists`.
    Bound {
        var: String,
        binder: String,
    },
    /// Bare variable in a cause's effect: "whatever value `X` takes".
    Wildcard(String),
    Not(Box<Formula>),
    And(Box<Formula>, Box<Formula>),
    Or(Box<Formula>, Box<Formula>),
    Intervened(Intervention, Box<Formula>),
    Cause(CausePattern, Box<Formula>),
    Exists {
        binder: String,
        over: String,
        body: Box<Formula>,
    },
}

/// Tightest language fragment containing a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Fragment {
    /// Boolean combinations of atoms.
    Simple,
    /// Causes whose effects are cause-free.
    SimpleCausal,
    /// Causes whose effects contain causes.
    Nested,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct FragmentClass {
    pub fragment: Fragment,
    /// Some cause shares a variable between its pattern and its effect.
    pub circular: bool,
    /// The formula contains an intervention prefix.
    pub interventional: bool,
}

/// Which occurrences count as "variables of" a formula.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct VarsPolicy {
    pub intervention_targets: bool,
}

impl Default for VarsPolicy {
    fn default() -> Self {
        VarsPolicy { intervention_targets: true }
    }
}

impl Formula {
    pub fn atom(var: &str, value: &str) -> Formula {
        Formula::Atom { var: var.to_string(), value: value.to_string() }
    }

    pub fn bound(var: &str, binder: &str) -> Formula {
        Formula::Bound { var: var.to_string(), binder: binder.to_string() }
    }

    pub fn wildcard(var: &str) -> Formula {
        Formula::Wildcard(var.to_string())
    }

    #[allow(clippy::should_implement_trait)]
    pub fn not(f: Formula) -> Formula {
        Formula::Not(Box::new(f))
    }

    pub fn and(a: Formula, b: Formula) -> Formula {
        Formula::And(Box::new(a), Box::new(b))
    }

    pub fn or(a: Formula, b: Formula) -> Formula {
        Formula::Or(Box::new(a), Box::new(b))
    }

    /// Left-nested conjunction; `None` for an empty iterator.
    pub fn and_all(fs: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fs.into_iter().reduce(Formula::and)
    }

    /// Left-nested disjunction; `None` for an empty iterator.
    pub fn or_all(fs: impl IntoIterator<Item = Formula>) -> Option<Formula> {
        fs.into_iter().reduce(Formula::or)
    }

    pub fn intervened(settings: Intervention, body: Formula) -> Formula {
        Formula::Intervened(settings, Box::new(body))
    }

    pub fn cause(pattern: CausePattern, effect: Formula) -> Formula {
        Formula::Cause(pattern, Box::new(effect))
    }

    pub fn exists(binder: &str, over: &str, body: Formula) -> Formula {
        Formula::Exists { binder: binder.to_string(), over: over.to_string(), body: Box::new(body) }
    }

    /// Nested wildcard cause `vars[0] ~> (vars[1] ~> (... ~> vars[n-1]))`.
    pub fn wildcard_chain(vars: &[&str]) -> Result<Formula> {
        let (last, rest) = vars.split_last().ok_or(Error::EmptyPattern)?;
        let mut f = Formula::wildcard(last);
        for v in rest.iter().rev() {
            f = Formula::cause(CausePattern::wildcards(&[v])?, f);
        }
        Ok(f)
    }

    /// Variables occurring in the formula (atoms, bound and wildcard atoms,
    /// cause patterns, and intervention targets).
    pub fn vars_of(&self) -> BTreeSet<String> {
        self.vars_with(VarsPolicy::default())
    }

    pub fn vars_with(&self, policy: VarsPolicy) -> BTreeSet<String> {
        let mut out = BTreeSet::new();
        self.collect_vars(policy, &mut out);
        out
    }

    fn collect_vars(&self, policy: VarsPolicy, out: &mut BTreeSet<String>) {
        match self {
            Formula::Atom { var, .. } | Formula::Bound { var, .. } | Formula::Wildcard(var) => {
                out.insert(var.clone());
            }
            Formula::Not(a) => a.collect_vars(policy, out),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.collect_vars(policy, out);
                b.collect_vars(policy, out);
            }
            Formula::Intervened(s, body) => {
                if policy.intervention_targets {
                    out.extend(s.settings.iter().map(|(v, _)| v.clone()));
                }
                body.collect_vars(policy, out);
            }
            Formula::Cause(p, effect) => {
                out.extend(p.vars().map(String::from));
                effect.collect_vars(policy, out);
            }
            Formula::Exists { body, .. } => body.collect_vars(policy, out),
        }
    }

    fn cause_depth(&self) -> usize {
        match self {
            Formula::Atom { .. } | Formula::Bound { .. } | Formula::Wildcard(_) => 0,
            Formula::Not(a) | Formula::Intervened(_, a) | Formula::Exists { body: a, .. } => a.cause_depth(),
            Formula::And(a, b) | Formula::Or(a, b) => a.cause_depth().max(b.cause_depth()),
            Formula::Cause(_, e) => 1 + e.cause_depth(),
        }
    }

    fn any_node(&self, pred: &mut impl FnMut(&Formula) -> bool) -> bool {
        if pred(self) {
            return true;
        }
        match self {
            Formula::Atom { .. } | Formula::Bound { .. } | Formula::Wildcard(_) => false,
            Formula::Not(a) | Formula::Intervened(_, a) | Formula::Cause(_, a) | Formula::Exists { body: a, .. } => {
                a.any_node(pred)
            }
            Formula::And(a, b) | Formula::Or(a, b) => a.any_node(pred) || b.any_node(pred),
        }
    }

    pub fn classify(&self) -> FragmentClass {
        self.classify_with(VarsPolicy::default())
    }

    pub fn classify_with(&self, policy: VarsPolicy) -> FragmentClass {
        let fragment = match self.cause_depth() {
            0 => Fragment::Simple,
            1 => Fragment::SimpleCausal,
            _ => Fragment::Nested,
        };
        let circular = self.any_node(&mut |f| match f {
            Formula::Cause(p, effect) => {
                let effect_vars = effect.vars_with(policy);
                p.vars().any(|v| effect_vars.contains(v))
            }
            _ => false,
        });
        let interventional = self.any_node(&mut |f| matches!(f, Formula::Intervened(..)));
        FragmentClass { fragment, circular, interventional }
    }

    /// True if the formula contains no binders, bound atoms or wildcards.
    pub fn is_desugared(&self) -> bool {
        !self.any_node(&mut |f| match f {
            Formula::Bound { .. } | Formula::Wildcard(_) | Formula::Exists { .. } => true,
            Formula::Cause(p, _) => p.entries.iter().any(|e| !matches!(e.binding, Binding::Value(_))),
            _ => false,
        })
    }

    /// Validates names and values against a signature, binder scoping,
    /// wildcard placement, and that causes and interventions only mention
    /// endogenous variables.
    pub fn check(&self, sig: &Signature) -> Result<()> {
        let mut scope = Vec::new();
        self.check_in(sig, &mut scope)
    }

    fn check_in<'a>(&'a self, sig: &Signature, scope: &mut Vec<(&'a str, &'a str)>) -> Result<()> {
        match self {
            Formula::Atom { var, value } => sig.resolve(var, value).map(drop),
            Formula::Bound { var, binder } => check_bound(sig, scope, var, binder),
            Formula::Wildcard(v) => Err(Error::MisplacedWildcard(v.clone())),
            Formula::Not(a) => a.check_in(sig, scope),
            Formula::And(a, b) | Formula::Or(a, b) => {
                a.check_in(sig, scope)?;
                b.check_in(sig, scope)
            }
            Formula::Intervened(s, body) => {
                for (v, x) in &s.settings {
                    let id = sig.require_endogenous(v)?;
                    sig.require_value(id, x)?;
                }
                body.check_in(sig, scope)
            }
            Formula::Cause(p, effect) => {
                for e in &p.entries {
                    let id = sig.require_endogenous(&e.var)?;
                    match &e.binding {
                        Binding::Value(x) => drop(sig.require_value(id, x)?),
                        Binding::Bound(b) => check_bound(sig, scope, &e.var, b)?,
                        Binding::Wildcard => {}
                    }
                }
                for conjunct in effect_conjuncts(effect) {
                    match conjunct {
                        Formula::Wildcard(v) => drop(sig.require(v)?),
                        other => other.check_in(sig, scope)?,
                    }
                }
                Ok(())
            }
            Formula::Exists { binder, over, body } => {
                sig.require(over)?;
                scope.push((binder.as_str(), over.as_str()));
                let r = body.check_in(sig, scope);
                scope.pop();
                r
            }
        }
    }

    /// Removes all sugar: wildcard causes become existential closures at the
    /// cause, and every `exists` becomes a disjunction over its range. The
    /// result contains only atoms with concrete values, Boolean connectives,
    /// interventions and causes.
    pub fn desugar(&self, sig: &Signature) -> Result<Formula> {
        self.check(sig)?;
        Ok(self.expand(sig, &mut BTreeMap::new()))
    }

    fn expand(&self, sig: &Signature, env: &mut BTreeMap<String, String>) -> Formula {
        match self {
            Formula::Atom { .. } => self.clone(),
            Formula::Bound { var, binder } => Formula::Atom { var: var.clone(), value: env[binder.as_str()].clone() },
            Formula::Wildcard(_) => unreachable!("wildcards are expanded at their cause"),
            Formula::Not(a) => Formula::not(a.expand(sig, env)),
            Formula::And(a, b) => Formula::and(a.expand(sig, env), b.expand(sig, env)),
            Formula::Or(a, b) => Formula::or(a.expand(sig, env), b.expand(sig, env)),
            Formula::Intervened(s, body) => Formula::intervened(s.clone(), body.expand(sig, env)),
            Formula::Exists { binder, over, body } => {
                let range = sig.decl(sig.var(over).expect("checked")).range();
                let saved = env.remove(binder.as_str());
                let mut disjuncts = Vec::with_capacity(range.len());
                for value in range {
                    env.insert(binder.clone(), value.clone());
                    disjuncts.push(body.expand(sig, env));
                }
                env.remove(binder.as_str());
                if let Some(saved) = saved {
                    env.insert(binder.clone(), saved);
                }
                Formula::or_all(disjuncts).expect("ranges are nonempty")
            }
            Formula::Cause(p, effect) => {
                // Wildcards of the pattern, then of the effect, each ranging over its variable.
                let mut wild: Vec<&str> =
                    p.entries.iter().filter(|e| e.binding == Binding::Wildcard).map(|e| e.var.as_str()).collect();
                wild.extend(effect_conjuncts(effect).into_iter().filter_map(|c| match c {
                    Formula::Wildcard(v) => Some(v.as_str()),
                    _ => None,
                }));
                let radices = wild.iter().map(|v| sig.range_len(sig.var(v).expect("checked"))).collect();
                let mut disjuncts = Vec::new();
                for choice in Product::new(radices) {
                    let mut k = 0;
                    let mut next_value = |var: &str| {
                        let v = sig.value_name(sig.var(var).expect("checked"), choice[k]).to_string();
                        k += 1;
                        v
                    };
                    let entries = p
                        .entries
                        .iter()
                        .map(|e| PatternEntry {
                            var: e.var.clone(),
                            binding: Binding::Value(match &e.binding {
                                Binding::Value(x) => x.clone(),
                                Binding::Bound(b) => env[b.as_str()].clone(),
                                Binding::Wildcard => next_value(&e.var),
                            }),
                        })
                        .collect();
                    let effect = substitute_effect_wildcards(effect, &mut next_value).expand(sig, env);
                    disjuncts.push(Formula::Cause(CausePattern { entries }, Box::new(effect)));
                }
                Formula::or_all(disjuncts).expect("products over nonempty ranges are nonempty")
            }
        }
    }

    fn precedence(&self) -> u8 {
        match self {
            Formula::Exists { .. } => 0,
            Formula::Cause(p, e) if uses_arrow(p, e) => 0,
            Formula::Or(..) => 1,
            Formula::And(..) => 2,
            _ => 3,
        }
    }

    fn fmt_at(&self, f: &mut fmt::Formatter<'_>, min: u8) -> fmt::Result {
        let paren = self.precedence() < min;
        if paren {
            f.write_str("(")?;
        }
        match self {
            Formula::Atom { var, value } => write!(f, "{var}={value}")?,
            Formula::Bound { var, binder } => write!(f, "{var}={binder}")?,
            Formula::Wildcard(v) => f.write_str(v)?,
            Formula::Not(a) => {
                f.write_str("!")?;
                a.fmt_at(f, 3)?;
            }
            Formula::And(a, b) => {
                a.fmt_at(f, 2)?;
                f.write_str(" & ")?;
                b.fmt_at(f, 3)?;
            }
            Formula::Or(a, b) => {
                a.fmt_at(f, 1)?;
                f.write_str(" | ")?;
                b.fmt_at(f, 2)?;
            }
            Formula::Intervened(s, body) => {
                f.write_str("[")?;
                for (i, (v, x)) in s.settings.iter().enumerate() {
                    if i > 0 {
                        f.write_str(", ")?;
                    }
                    write!(f, "{v}<-{x}")?;
                }
                f.write_str("] ")?;
                body.fmt_at(f, 3)?;
            }
            Formula::Cause(p, e) => {
                if uses_arrow(p, e) {
                    write!(f, "{p} ~> ")?;
                    e.fmt_at(f, 0)?;
                } else {
                    write!(f, "cause({p}, ")?;
                    e.fmt_at(f, 0)?;
                    f.write_str(")")?;
                }
            }
            Formula::Exists { binder, over, body } => {
                write!(f, "exists {binder} in {over}. ")?;
                body.fmt_at(f, 0)?;
            }
        }
        if paren {
            f.write_str(")")?;
        }
        Ok(())
    }
}

fn check_bound(sig: &Signature, scope: &[(&str, &str)], var: &str, binder: &str) -> Result<()> {
    sig.require(var)?;
    match scope.iter().rev().find(|(b, _)| *b == binder) {
        // A binder ranges over one variable's values; using it for another
        // variable is only meaningful when the ranges coincide.
        Some((_, over)) => {
            let a = sig.decl(sig.require(over)?).range();
            let b = sig.decl(sig.require(var)?).range();
            if a == b {
                Ok(())
            } else {
                Err(Error::UnknownValue { var: var.to_string(), value: format!("{binder} (ranges over {over})") })
            }
        }
        None => Err(Error::UnboundBinder(binder.to_string())),
    }
}

/// Top-level conjuncts of an effect (the positions where wildcards may occur).
fn effect_conjuncts(effect: &Formula) -> Vec<&Formula> {
    match effect {
        Formula::And(a, b) => {
            let mut out = effect_conjuncts(a);
            out.extend(effect_conjuncts(b));
            out
        }
        other => alloc::vec![other],
    }
}

fn substitute_effect_wildcards(effect: &Formula, next_value: &mut impl FnMut(&str) -> String) -> Formula {
    match effect {
        Formula::And(a, b) => {
            let a = substitute_effect_wildcards(a, next_value);
            Formula::and(a, substitute_effect_wildcards(b, next_value))
        }
        Formula::Wildcard(v) => Formula::Atom { var: v.clone(), value: next_value(v) },
        other => other.clone(),
    }
}

fn uses_arrow(p: &CausePattern, effect: &Formula) -> bool {
    p.has_wildcard()
        || effect_conjuncts(effect).iter().any(|c| matches!(c, Formula::Wildcard(_)))
        || matches!(effect, Formula::Cause(q, e) if uses_arrow(q, e))
}

impl fmt::Display for CausePattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, e) in self.entries.iter().enumerate() {
            if i > 0 {
                f.write_str(" & ")?;
            }
            match &e.binding {
                Binding::Value(x) | Binding::Bound(x) => write!(f, "{}={}", e.var, x)?,
                Binding::Wildcard => f.write_str(&e.var)?,
            }
        }
        Ok(())
    }
}

/// Concrete syntax accepted by the formula parser of the `causalis` crate.
impl fmt::Display for Formula {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.fmt_at(f, 0)
    }
}
