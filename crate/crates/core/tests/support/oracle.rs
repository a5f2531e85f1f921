//! Brute-force reference semantics.
//!
//! Works on names through the public `intervene`/`solve` API, materialising
//! one intervened model per counterfactual. Binders and wildcards are handled
//! directly by substitution instead of going through `desugar`, and AC2 tries
//! every contingency set without pruning.

use std::collections::BTreeMap;

use causalis_core::{Ac2Mode, Binding, CausalModel, CausePattern, Formula};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Verdict {
    Holds,
    CauseFalse,
    EffectFalse,
    NoWitness,
    NotMinimal,
}

pub struct Oracle<'a> {
    pub context: &'a str,
    pub mode: Ac2Mode,
}

type Env = BTreeMap<String, String>;

fn subsets<T: Clone>(items: &[T]) -> Vec<Vec<T>> {
    let mut out = vec![Vec::new()];
    for item in items {
        let mut more: Vec<Vec<T>> = out
            .iter()
            .cloned()
            .map(|mut s| {
                s.push(item.clone());
                s
            })
            .collect();
        out.append(&mut more);
    }
    out
}

/// Every assignment of values to `vars`, each drawn from its range.
fn assignments(model: &CausalModel, vars: &[String]) -> Vec<Vec<String>> {
    let sig = model.signature();
    let mut out = vec![Vec::new()];
    for v in vars {
        let range = sig.decl(sig.var(v).unwrap()).range();
        out = out
            .into_iter()
            .flat_map(|prefix| {
                range.iter().map(move |x| {
                    let mut p = prefix.clone();
                    p.push(x.clone());
                    p
                })
            })
            .collect();
    }
    out
}

fn actual(model: &CausalModel, context: &str, var: &str) -> String {
    model.solve(context).unwrap().get(model.signature(), var).unwrap().to_string()
}

/// Top-level conjuncts, with the positions of wildcards replaced in order.
fn fill_effect(effect: &Formula, values: &mut impl Iterator<Item = String>) -> Formula {
    match effect {
        Formula::And(a, b) => {
            let a = fill_effect(a, values);
            Formula::and(a, fill_effect(b, values))
        }
        Formula::Wildcard(v) => Formula::atom(v, &values.next().unwrap()),
        other => other.clone(),
    }
}

fn effect_wildcards(effect: &Formula, out: &mut Vec<String>) {
    match effect {
        Formula::And(a, b) => {
            effect_wildcards(a, out);
            effect_wildcards(b, out);
        }
        Formula::Wildcard(v) => out.push(v.clone()),
        _ => {}
    }
}

impl Oracle<'_> {
    pub fn holds(&self, model: &CausalModel, f: &Formula) -> bool {
        self.eval(model, f, &Env::new())
    }

    fn eval(&self, model: &CausalModel, f: &Formula, env: &Env) -> bool {
        match f {
            Formula::Atom { var, value } => actual(model, self.context, var) == *value,
            Formula::Bound { var, binder } => actual(model, self.context, var) == env[binder],
            Formula::Wildcard(_) => panic!("wildcard outside a cause"),
            Formula::Not(a) => !self.eval(model, a, env),
            Formula::And(a, b) => self.eval(model, a, env) && self.eval(model, b, env),
            Formula::Or(a, b) => self.eval(model, a, env) || self.eval(model, b, env),
            Formula::Intervened(s, body) => self.eval(&model.intervene(s.settings()).unwrap(), body, env),
            Formula::Exists { binder, over, body } => {
                let sig = model.signature();
                sig.decl(sig.var(over).unwrap()).range().iter().any(|x| {
                    let mut inner = env.clone();
                    inner.insert(binder.clone(), x.clone());
                    self.eval(model, body, &inner)
                })
            }
            Formula::Cause(p, effect) => {
                let mut wild: Vec<String> =
                    p.entries().iter().filter(|e| e.binding == Binding::Wildcard).map(|e| e.var.clone()).collect();
                let n_pattern = wild.len();
                effect_wildcards(effect, &mut wild);
                assignments(model, &wild).into_iter().any(|choice| {
                    let mut pattern_values = choice[..n_pattern].iter().cloned();
                    let pattern: Vec<(String, String)> = p
                        .entries()
                        .iter()
                        .map(|e| {
                            let x = match &e.binding {
                                Binding::Value(x) => x.clone(),
                                Binding::Bound(b) => env[b].clone(),
                                Binding::Wildcard => pattern_values.next().unwrap(),
                            };
                            (e.var.clone(), x)
                        })
                        .collect();
                    let effect = fill_effect(effect, &mut choice[n_pattern..].iter().cloned());
                    self.cause(model, &pattern, &effect, env) == Verdict::Holds
                })
            }
        }
    }

    /// The modified HP definition for a concrete pattern.
    pub fn cause(&self, model: &CausalModel, pattern: &[(String, String)], effect: &Formula, env: &Env) -> Verdict {
        if pattern.iter().any(|(v, x)| actual(model, self.context, v) != *x) {
            return Verdict::CauseFalse;
        }
        if !self.eval(model, effect, env) {
            return Verdict::EffectFalse;
        }
        if !self.ac2(model, pattern, effect, env) {
            return Verdict::NoWitness;
        }
        let strict = subsets(pattern).into_iter().filter(|s| !s.is_empty() && s.len() < pattern.len());
        for sub in strict {
            if self.ac2(model, &sub, effect, env) {
                return Verdict::NotMinimal;
            }
        }
        Verdict::Holds
    }

    fn ac2(&self, model: &CausalModel, xs: &[(String, String)], effect: &Formula, env: &Env) -> bool {
        let sig = model.signature();
        let effect_vars = effect.vars_of();
        let others: Vec<String> = sig
            .endogenous()
            .map(|v| sig.name(v).to_string())
            .filter(|w| xs.iter().all(|(v, _)| v != w))
            .filter(|w| self.mode == Ac2Mode::Literal || !effect_vars.contains(w))
            .collect();
        let x_vars: Vec<String> = xs.iter().map(|(v, _)| v.clone()).collect();
        let alternatives: Vec<Vec<String>> = assignments(model, &x_vars)
            .into_iter()
            .filter(|alt| alt.iter().zip(xs).any(|(a, (_, x))| a != x))
            .collect();
        subsets(&others).into_iter().any(|ws| {
            alternatives.iter().any(|alt| {
                let mut settings: Vec<(String, String)> = x_vars.iter().cloned().zip(alt.iter().cloned()).collect();
                settings.extend(ws.iter().map(|w| (w.clone(), actual(model, self.context, w))));
                !self.eval(&model.intervene(&settings).unwrap(), effect, env)
            })
        })
    }
}

/// Oracle verdict for `cause(pattern, effect)` with a concrete pattern.
pub fn cause_verdict(
    model: &CausalModel,
    context: &str,
    pattern: &CausePattern,
    effect: &Formula,
    mode: Ac2Mode,
) -> Verdict {
    let pairs: Vec<(String, String)> =
        pattern.as_concrete().unwrap().into_iter().map(|(v, x)| (v.to_string(), x.to_string())).collect();
    Oracle { context, mode }.cause(model, &pairs, effect, &Env::new())
}

pub fn holds(model: &CausalModel, context: &str, f: &Formula, mode: Ac2Mode) -> bool {
    Oracle { context, mode }.holds(model, f)
}
