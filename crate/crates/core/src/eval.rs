//! Satisfaction of formulas and the modified Halpern-Pearl cause check.
//!
//! `cause(X=x, phi)` holds at `(M, u)` when
//!
//! - AC1: `X=x` and `phi` both hold;
//! - AC2: for some contingency set `W` (disjoint from `X`) frozen at its
//!   actual values `w*` and some alternative `x' != x`,
//!   `[X <- x', W <- w*] !phi` holds;
//! - AC3: no strict nonempty subset of `X` satisfies AC2.
//!
//! Nested causes are evaluated in whatever intervened model encloses them,
//! with AC1 and `w*` read from that model's solution in the same context.

use alloc::boxed::Box;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;
use core::num::NonZeroUsize;

use crate::combinatorics::{subsets_by_size, Combinations, Product};
use crate::error::{Error, Result};
use crate::formula::{CausePattern, Formula};
use crate::model::{CausalModel, Signature, VarId, World};

/// Which variables AC2 may freeze.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub enum Ac2Mode {
    /// Contingency sets avoid the cause and every variable of the effect.
    #[default]
    EffectDisjoint,
    /// Contingency sets only avoid the cause.
    Literal,
}

impl Ac2Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Ac2Mode::EffectDisjoint => "effect-disjoint",
            Ac2Mode::Literal => "literal",
        }
    }
}

impl fmt::Display for Ac2Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SemanticsConfig {
    pub ac2_mode: Ac2Mode,
    /// Largest pattern considered by [`enumerate_causes`].
    pub max_cause_width: Option<NonZeroUsize>,
}

impl SemanticsConfig {
    pub fn with_mode(ac2_mode: Ac2Mode) -> Self {
        SemanticsConfig { ac2_mode, ..Self::default() }
    }

    pub fn literal() -> Self {
        Self::with_mode(Ac2Mode::Literal)
    }
}

/// AC2 witness: the frozen contingency set with its actual values, and the
/// alternative values of the cause variables.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Witness {
    pub contingency: Vec<(String, String)>,
    pub alternative: Vec<(String, String)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Failure {
    /// AC1: the cause pattern does not hold.
    CauseFalse,
    /// AC1: the effect does not hold.
    EffectFalse,
    /// AC2: no contingency set and alternative falsify the effect.
    NoWitness,
    /// AC3: this strict subset of the pattern already satisfies AC2.
    NotMinimal(Vec<(String, String)>),
}

impl Failure {
    pub fn code(&self) -> &'static str {
        match self {
            Failure::CauseFalse => "AC1-cause-false",
            Failure::EffectFalse => "AC1-effect-false",
            Failure::NoWitness => "AC2-no-witness",
            Failure::NotMinimal(_) => "AC3-not-minimal",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum CauseVerdict {
    Holds(Witness),
    Fails(Failure),
}

impl CauseVerdict {
    pub fn holds(&self) -> bool {
        matches!(self, CauseVerdict::Holds(_))
    }

    pub fn witness(&self) -> Option<&Witness> {
        match self {
            CauseVerdict::Holds(w) => Some(w),
            CauseVerdict::Fails(_) => None,
        }
    }

    pub fn failure(&self) -> Option<&Failure> {
        match self {
            CauseVerdict::Holds(_) => None,
            CauseVerdict::Fails(f) => Some(f),
        }
    }
}

/// Resolved, sugar-free formula.
#[derive(Clone, Debug)]
enum Expr {
    Atom(VarId, usize),
    Not(Box<Expr>),
    And(Box<Expr>, Box<Expr>),
    Or(Box<Expr>, Box<Expr>),
    Intervene(Vec<(VarId, usize)>, Box<Expr>),
    Cause(Box<CauseNode>),
}

#[derive(Clone, Debug)]
struct CauseNode {
    pattern: Vec<(VarId, usize)>,
    effect: Expr,
    /// Indexed by variable id.
    in_effect: Vec<bool>,
}

fn compile(f: &Formula, sig: &Signature) -> Result<Expr> {
    Ok(match f {
        Formula::Atom { var, value } => {
            let (v, x) = sig.resolve(var, value)?;
            Expr::Atom(v, x)
        }
        Formula::Not(a) => Expr::Not(Box::new(compile(a, sig)?)),
        Formula::And(a, b) => Expr::And(Box::new(compile(a, sig)?), Box::new(compile(b, sig)?)),
        Formula::Or(a, b) => Expr::Or(Box::new(compile(a, sig)?), Box::new(compile(b, sig)?)),
        Formula::Intervened(s, body) => {
            let settings = s
                .settings()
                .iter()
                .map(|(v, x)| {
                    let id = sig.require_endogenous(v)?;
                    Ok((id, sig.require_value(id, x)?))
                })
                .collect::<Result<Vec<_>>>()?;
            Expr::Intervene(settings, Box::new(compile(body, sig)?))
        }
        Formula::Cause(p, effect) => Expr::Cause(Box::new(compile_cause(p, effect, sig)?)),
        Formula::Bound { binder, .. } => return Err(Error::UnboundBinder(binder.clone())),
        Formula::Wildcard(v) => return Err(Error::MisplacedWildcard(v.clone())),
        Formula::Exists { binder, .. } => return Err(Error::UnboundBinder(binder.clone())),
    })
}

fn compile_cause(p: &CausePattern, effect: &Formula, sig: &Signature) -> Result<CauseNode> {
    let pattern = p
        .as_concrete()?
        .into_iter()
        .map(|(v, x)| {
            let id = sig.require_endogenous(v)?;
            Ok((id, sig.require_value(id, x)?))
        })
        .collect::<Result<Vec<_>>>()?;
    let mut in_effect = vec![false; sig.len()];
    for v in effect.vars_of() {
        in_effect[sig.require(&v)?] = true;
    }
    Ok(CauseNode { pattern, effect: compile(effect, sig)?, in_effect })
}

/// Raw witness: contingency variables and alternative values (parallel to the pattern subset).
type RawWitness = (Vec<VarId>, Vec<usize>);

enum RawVerdict {
    Holds(RawWitness),
    CauseFalse,
    EffectFalse,
    NoWitness,
    NotMinimal(Vec<usize>),
}

/// An intervened model, represented as constant overrides, with its solution.
struct Frame {
    overrides: Vec<Option<usize>>,
    world: World,
}

struct Evaluator<'m> {
    model: &'m CausalModel,
    context: usize,
    mode: Ac2Mode,
}

impl<'m> Evaluator<'m> {
    fn root(&self) -> Frame {
        let overrides = vec![None; self.model.signature().len()];
        let world = self.model.solve_with(self.context, &overrides);
        Frame { overrides, world }
    }

    fn child(&self, frame: &Frame, settings: impl IntoIterator<Item = (VarId, usize)>) -> Frame {
        let mut overrides = frame.overrides.clone();
        for (v, x) in settings {
            overrides[v] = Some(x);
        }
        let world = self.model.solve_with(self.context, &overrides);
        Frame { overrides, world }
    }

    fn holds(&self, e: &Expr, frame: &Frame) -> bool {
        match e {
            Expr::Atom(v, x) => frame.world.value(*v) == *x,
            Expr::Not(a) => !self.holds(a, frame),
            Expr::And(a, b) => self.holds(a, frame) && self.holds(b, frame),
            Expr::Or(a, b) => self.holds(a, frame) || self.holds(b, frame),
            Expr::Intervene(s, body) => self.holds(body, &self.child(frame, s.iter().copied())),
            Expr::Cause(node) => matches!(self.cause(node, frame), RawVerdict::Holds(_)),
        }
    }

    fn cause(&self, node: &CauseNode, frame: &Frame) -> RawVerdict {
        if node.pattern.iter().any(|&(v, x)| frame.world.value(v) != x) {
            return RawVerdict::CauseFalse;
        }
        if !self.holds(&node.effect, frame) {
            return RawVerdict::EffectFalse;
        }
        let all: Vec<usize> = (0..node.pattern.len()).collect();
        let Some(witness) = self.ac2(node, frame, &all) else {
            return RawVerdict::NoWitness;
        };
        for k in 1..node.pattern.len() {
            for subset in Combinations::new(node.pattern.len(), k) {
                if self.ac2(node, frame, &subset).is_some() {
                    return RawVerdict::NotMinimal(subset);
                }
            }
        }
        RawVerdict::Holds(witness)
    }

    /// AC2 for the pattern entries at positions `subset`.
    fn ac2(&self, node: &CauseNode, frame: &Frame, subset: &[usize]) -> Option<RawWitness> {
        let sig = self.model.signature();
        let xs: Vec<(VarId, usize)> = subset.iter().map(|&i| node.pattern[i]).collect();
        // Freezing an already-constant variable at its value changes nothing,
        // so such sets are equivalent to a smaller set tried earlier.
        let candidates: Vec<VarId> = sig
            .endogenous()
            .filter(|&w| xs.iter().all(|&(v, _)| v != w))
            .filter(|&w| self.mode == Ac2Mode::Literal || !node.in_effect[w])
            .filter(|&w| frame.overrides[w].is_none())
            .collect();
        let radices: Vec<usize> = xs.iter().map(|&(v, _)| sig.range_len(v)).collect();
        for w_idx in subsets_by_size(candidates.len(), 0..=candidates.len()) {
            let ws: Vec<VarId> = w_idx.iter().map(|&i| candidates[i]).collect();
            for alt in Product::new(radices.clone()) {
                if xs.iter().zip(&alt).all(|(&(_, x), &a)| x == a) {
                    continue;
                }
                let settings = xs
                    .iter()
                    .zip(&alt)
                    .map(|(&(v, _), &a)| (v, a))
                    .chain(ws.iter().map(|&w| (w, frame.world.value(w))));
                let child = self.child(frame, settings);
                if !self.holds(&node.effect, &child) {
                    return Some((ws, alt));
                }
            }
        }
        None
    }
}

fn named(sig: &Signature, pairs: impl IntoIterator<Item = (VarId, usize)>) -> Vec<(String, String)> {
    pairs.into_iter().map(|(v, x)| (sig.name(v).to_string(), sig.value_name(v, x).to_string())).collect()
}

fn verdict(sig: &Signature, node: &CauseNode, frame: &Frame, raw: RawVerdict) -> CauseVerdict {
    match raw {
        RawVerdict::Holds((ws, alt)) => CauseVerdict::Holds(Witness {
            contingency: named(sig, ws.iter().map(|&w| (w, frame.world.value(w)))),
            alternative: named(sig, node.pattern.iter().map(|&(v, _)| v).zip(alt)),
        }),
        RawVerdict::CauseFalse => CauseVerdict::Fails(Failure::CauseFalse),
        RawVerdict::EffectFalse => CauseVerdict::Fails(Failure::EffectFalse),
        RawVerdict::NoWitness => CauseVerdict::Fails(Failure::NoWitness),
        RawVerdict::NotMinimal(subset) => {
            CauseVerdict::Fails(Failure::NotMinimal(named(sig, subset.iter().map(|&i| node.pattern[i]))))
        }
    }
}

/// `(model, context) |= f`. Sugar is expanded first.
pub fn satisfies(model: &CausalModel, context: &str, f: &Formula, cfg: &SemanticsConfig) -> Result<bool> {
    let context = model.context_index(context)?;
    let expr = compile(&f.desugar(model.signature())?, model.signature())?;
    let ev = Evaluator { model, context, mode: cfg.ac2_mode };
    Ok(ev.holds(&expr, &ev.root()))
}

/// `f` holds in every context of the model.
pub fn valid(model: &CausalModel, f: &Formula, cfg: &SemanticsConfig) -> Result<bool> {
    if model.contexts().is_empty() {
        return Err(Error::NoContexts);
    }
    let expr = compile(&f.desugar(model.signature())?, model.signature())?;
    Ok((0..model.contexts().len()).all(|context| {
        let ev = Evaluator { model, context, mode: cfg.ac2_mode };
        ev.holds(&expr, &ev.root())
    }))
}

/// Full verdict for `cause(pattern, effect)` at `(model, context)`.
/// The pattern must be concrete.
pub fn check_actual_cause(
    model: &CausalModel,
    context: &str,
    pattern: &CausePattern,
    effect: &Formula,
    cfg: &SemanticsConfig,
) -> Result<CauseVerdict> {
    let context = model.context_index(context)?;
    let sig = model.signature();
    let node = compile_cause(pattern, &effect.desugar(sig)?, sig)?;
    let ev = Evaluator { model, context, mode: cfg.ac2_mode };
    let frame = ev.root();
    let raw = ev.cause(&node, &frame);
    Ok(verdict(sig, &node, &frame, raw))
}

/// Every pattern over endogenous variables (at their actual values, since AC1
/// forces them) that is an actual cause of `effect`, ordered by width and
/// then declaration order. Width is capped by `cfg.max_cause_width`.
pub fn enumerate_causes(
    model: &CausalModel,
    context: &str,
    effect: &Formula,
    cfg: &SemanticsConfig,
) -> Result<Vec<(CausePattern, CauseVerdict)>> {
    let context = model.context_index(context)?;
    let sig = model.signature();
    let effect = effect.desugar(sig)?;
    let ev = Evaluator { model, context, mode: cfg.ac2_mode };
    let frame = ev.root();
    let endo: Vec<VarId> = sig.endogenous().collect();
    let max = cfg.max_cause_width.map_or(endo.len(), |w| w.get().min(endo.len()));
    let mut out = Vec::new();
    for subset in subsets_by_size(endo.len(), 1..=max) {
        let pairs: Vec<(&str, &str)> = subset
            .iter()
            .map(|&i| {
                let v = endo[i];
                (sig.name(v), sig.value_name(v, frame.world.value(v)))
            })
            .collect();
        let pattern = CausePattern::concrete(&pairs)?;
        let node = compile_cause(&pattern, &effect, sig)?;
        let raw = ev.cause(&node, &frame);
        if let RawVerdict::Holds(_) = raw {
            let v = verdict(sig, &node, &frame, raw);
            out.push((pattern, v));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::formula::{Binding, Intervention, PatternEntry};

    fn pat(pairs: &[(&str, &str)]) -> CausePattern {
        CausePattern::concrete(pairs).unwrap()
    }

    fn atom(v: &str, x: &str) -> Formula {
        Formula::atom(v, x)
    }

    fn ed() -> SemanticsConfig {
        SemanticsConfig::default()
    }

    fn nested_lamp_formula() -> Formula {
        let inner = Formula::cause(pat(&[("Switch2", "on")]), Formula::bound("Lamp", "v"));
        Formula::cause(pat(&[("Switch1", "on")]), Formula::exists("v", "Lamp", inner))
    }

    #[test]
    fn satisfies_examples() {
        let and = catalog::and_lamp();
        let f = Formula::and(
            atom("Lamp", "on"),
            Formula::intervened(Intervention::of(&[("Switch1", "off")]).unwrap(), atom("Lamp", "off")),
        );
        assert!(satisfies(&and, "main", &f, &ed()).unwrap());
        let taut = Formula::or(atom("Lamp", "on"), Formula::not(atom("Lamp", "on")));
        assert!(satisfies(&and, "main", &taut, &ed()).unwrap());

        let nx = catalog::not_xor_lamp();
        let g = Formula::intervened(
            Intervention::of(&[("Switch1", "off")]).unwrap(),
            Formula::cause(pat(&[("Switch2", "on")]), atom("Lamp", "off")),
        );
        assert!(satisfies(&nx, "main", &g, &ed()).unwrap());
        assert_eq!(satisfies(&nx, "other", &g, &ed()), Err(Error::UnknownContext("other".into())));
    }

    #[test]
    fn valid_examples() {
        let and = catalog::and_lamp();
        assert!(valid(&and, &atom("Switch1", "on"), &ed()).unwrap());
        assert!(!valid(&and, &atom("Switch1", "off"), &ed()).unwrap());
    }

    #[test]
    fn single_switch_is_a_but_for_cause() {
        let v =
            check_actual_cause(&catalog::and_lamp(), "main", &pat(&[("Switch1", "on")]), &atom("Lamp", "on"), &ed())
                .unwrap();
        assert_eq!(
            v,
            CauseVerdict::Holds(Witness { contingency: vec![], alternative: vec![("Switch1".into(), "off".into())] })
        );
    }

    #[test]
    fn both_switches_are_not_minimal() {
        let v = check_actual_cause(
            &catalog::and_lamp(),
            "main",
            &pat(&[("Switch1", "on"), ("Switch2", "on")]),
            &atom("Lamp", "on"),
            &ed(),
        )
        .unwrap();
        assert_eq!(v, CauseVerdict::Fails(Failure::NotMinimal(vec![("Switch1".into(), "on".into())])));
    }

    #[test]
    fn farmer_verdicts() {
        let m = catalog::farmer();
        let wc = Formula::cause(pat(&[("W", "0")]), atom("C", "0"));
        assert!(check_actual_cause(&m, "main", &pat(&[("W", "0")]), &atom("C", "0"), &ed()).unwrap().holds());
        assert!(check_actual_cause(&m, "main", &pat(&[("R", "1")]), &wc, &ed()).unwrap().holds());
        let w2 = Formula::cause(pat(&[("W", "2")]), atom("C", "0"));
        assert_eq!(
            check_actual_cause(&m, "main", &pat(&[("R", "1")]), &w2, &ed()).unwrap(),
            CauseVerdict::Fails(Failure::EffectFalse)
        );
        let bound_w = CausePattern::new(vec![PatternEntry { var: "W".into(), binding: Binding::Bound("w".into()) }]);
        let some_w = Formula::exists("w", "W", Formula::cause(bound_w.unwrap(), atom("C", "0")));
        assert_eq!(
            check_actual_cause(&m, "main", &pat(&[("R", "1")]), &some_w, &ed()).unwrap(),
            CauseVerdict::Fails(Failure::NoWitness)
        );
    }

    #[test]
    fn literal_mode_freezes_lamp_in_not_xor() {
        let nx = catalog::not_xor_lamp();
        let f = nested_lamp_formula();
        assert!(!satisfies(&nx, "main", &f, &ed()).unwrap());
        assert!(satisfies(&nx, "main", &f, &SemanticsConfig::literal()).unwrap());
        let Formula::Cause(p, effect) = &f else { unreachable!() };
        let v = check_actual_cause(&nx, "main", p, effect, &SemanticsConfig::literal()).unwrap();
        let w = v.witness().unwrap();
        assert_eq!(w.contingency, vec![("Lamp".to_string(), "on".to_string())]);
    }

    #[test]
    fn modes_diverge_on_simple_effects() {
        // A copies B. Freezing A at its actual value is the only way to
        // falsify A=on | B=off, and that freezes an effect variable.
        let sig = Signature::builder()
            .exogenous("U", ["u"])
            .endogenous("A", ["on", "off"])
            .endogenous("B", ["on", "off"])
            .build()
            .unwrap();
        let m = CausalModel::builder(sig)
            .constant("B", "off")
            .equation("A", &["B"], |r| r[0].to_string())
            .context("main", &[("U", "u")])
            .build()
            .unwrap();
        let effect = Formula::or(atom("A", "on"), atom("B", "off"));
        let p = pat(&[("B", "off")]);
        let strict = check_actual_cause(&m, "main", &p, &effect, &ed()).unwrap();
        assert_eq!(strict.failure(), Some(&Failure::NoWitness));
        let literal = check_actual_cause(&m, "main", &p, &effect, &SemanticsConfig::literal()).unwrap();
        assert_eq!(literal.witness().unwrap().contingency, vec![("A".to_string(), "off".to_string())]);
    }

    #[test]
    fn enumerate_and_lamp() {
        let causes = enumerate_causes(&catalog::and_lamp(), "main", &atom("Lamp", "on"), &ed()).unwrap();
        let pats: Vec<String> = causes.iter().map(|(p, _)| alloc::format!("{p}")).collect();
        assert_eq!(pats, ["Switch1=on", "Switch2=on", "Lamp=on"]);
        let taut = Formula::or(atom("Lamp", "on"), Formula::not(atom("Lamp", "on")));
        assert!(enumerate_causes(&catalog::and_lamp(), "main", &taut, &ed()).unwrap().is_empty());
    }

    #[test]
    fn enumerate_respects_width() {
        let cfg = SemanticsConfig { max_cause_width: NonZeroUsize::new(1), ..ed() };
        let causes = enumerate_causes(&catalog::farmer(), "main", &atom("C", "0"), &cfg).unwrap();
        let pats: Vec<String> = causes.iter().map(|(p, _)| alloc::format!("{p}")).collect();
        assert_eq!(pats, ["W=0", "C=0"]);
    }

    #[test]
    fn exogenous_patterns_are_rejected() {
        let r = check_actual_cause(&catalog::and_lamp(), "main", &pat(&[("U", "u")]), &atom("Lamp", "on"), &ed());
        assert_eq!(r, Err(Error::Exogenous("U".into())));
    }
}
