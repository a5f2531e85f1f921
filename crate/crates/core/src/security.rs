//! Security properties phrased as nested wildcard causes.
//!
//! - Robust declassification fails when an untrusted variable is a cause of
//!   a secret variable being a cause of a public one: `u ~> (s ~> p)`.
//! - Authorization: an untrusted actor may only cause an outcome if that
//!   causal relationship itself has a trusted cause: `b ~> (a ~> c)`.
//! - Delegation chains nest this further: `b ~> (d ~> (a ~> c))`.

use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::eval::{satisfies, SemanticsConfig};
use crate::formula::Formula;
use crate::model::CausalModel;

/// Partial labelling of endogenous variables. Unlabelled variables take
/// part in no check. Each class keeps declaration order.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PolicyLabels {
    pub secret: Vec<String>,
    pub public: Vec<String>,
    pub trusted: Vec<String>,
    pub untrusted: Vec<String>,
}

impl PolicyLabels {
    pub fn is_empty(&self) -> bool {
        self.secret.is_empty() && self.public.is_empty() && self.trusted.is_empty() && self.untrusted.is_empty()
    }

    /// Every name is endogenous in the model; secret/public and
    /// trusted/untrusted are disjoint.
    pub fn validate(&self, model: &CausalModel) -> Result<()> {
        let sig = model.signature();
        for name in self.secret.iter().chain(&self.public).chain(&self.trusted).chain(&self.untrusted) {
            sig.require_endogenous(name)?;
        }
        for (a, an, b, bn) in
            [(&self.secret, "secret", &self.public, "public"), (&self.trusted, "trusted", &self.untrusted, "untrusted")]
        {
            if let Some(v) = a.iter().find(|v| b.contains(v)) {
                return Err(Error::LabelConflict { var: v.clone(), first: an, second: bn });
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViolationKind {
    RobustDeclassification,
    UnauthorizedInfluence,
}

/// A policy breach: `formula` holds at `context`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Violation {
    pub kind: ViolationKind,
    /// `[untrusted, secret, public]` or `[actor, outcome]`.
    pub variables: Vec<String>,
    pub formula: Formula,
    pub context: String,
}

fn distinct(names: &[&str]) -> bool {
    names.iter().enumerate().all(|(i, n)| !names[..i].contains(n))
}

/// All `(context, untrusted, secret, public)` instances where `u ~> (s ~> p)` holds.
pub fn check_robust_declassification(
    model: &CausalModel,
    labels: &PolicyLabels,
    cfg: &SemanticsConfig,
) -> Result<Vec<Violation>> {
    labels.validate(model)?;
    let mut out = Vec::new();
    for u in &labels.untrusted {
        for s in &labels.secret {
            for p in &labels.public {
                let names = [u.as_str(), s.as_str(), p.as_str()];
                if !distinct(&names) {
                    continue;
                }
                let formula = Formula::wildcard_chain(&names)?;
                for ctx in model.contexts() {
                    if satisfies(model, ctx.name(), &formula, cfg)? {
                        out.push(Violation {
                            kind: ViolationKind::RobustDeclassification,
                            variables: names.iter().map(|n| n.to_string()).collect(),
                            formula: formula.clone(),
                            context: ctx.name().to_string(),
                        });
                    }
                }
            }
        }
    }
    Ok(out)
}

/// `chain[0] ~> (chain[1] ~> (... ~> (actor ~> outcome)))` at one context.
pub fn check_delegation_chain(
    model: &CausalModel,
    context: &str,
    chain: &[&str],
    actor: &str,
    outcome: &str,
    cfg: &SemanticsConfig,
) -> Result<bool> {
    let mut names: Vec<&str> = chain.to_vec();
    names.extend([actor, outcome]);
    for (i, n) in names.iter().enumerate() {
        model.signature().require_endogenous(n)?;
        if names[..i].contains(n) {
            return Err(Error::DuplicateChainName(n.to_string()));
        }
    }
    satisfies(model, context, &Formula::wildcard_chain(&names)?, cfg)
}

/// Contexts where `actor ~> outcome` holds without any trusted `b` such that
/// `b ~> (actor ~> outcome)`.
///
/// Experimental: authorization is only illustrated by small examples, and
/// this is one direct reading of it.
pub fn authorization_violations(
    model: &CausalModel,
    labels: &PolicyLabels,
    actor: &str,
    outcome: &str,
    cfg: &SemanticsConfig,
) -> Result<Vec<Violation>> {
    labels.validate(model)?;
    if !labels.untrusted.iter().any(|a| a == actor) {
        return Err(Error::NotUntrusted(actor.to_string()));
    }
    model.signature().require_endogenous(outcome)?;
    let influence = Formula::wildcard_chain(&[actor, outcome])?;
    let mut out = Vec::new();
    for ctx in model.contexts() {
        if !satisfies(model, ctx.name(), &influence, cfg)? {
            continue;
        }
        let mut authorized = false;
        for b in labels.trusted.iter().filter(|b| *b != actor && *b != outcome) {
            if check_delegation_chain(model, ctx.name(), &[b.as_str()], actor, outcome, cfg)? {
                authorized = true;
                break;
            }
        }
        if !authorized {
            out.push(Violation {
                kind: ViolationKind::UnauthorizedInfluence,
                variables: vec![actor.to_string(), outcome.to_string()],
                formula: influence.clone(),
                context: ctx.name().to_string(),
            });
        }
    }
    Ok(out)
}

/// In every context, `actor ~> outcome` implies some trusted `b ~> (actor ~> outcome)`.
pub fn check_authorization(
    model: &CausalModel,
    labels: &PolicyLabels,
    actor: &str,
    outcome: &str,
    cfg: &SemanticsConfig,
) -> Result<bool> {
    Ok(authorization_violations(model, labels, actor, outcome, cfg)?.is_empty())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog;
    use crate::model::Signature;

    fn names(v: &[&str]) -> Vec<String> {
        v.iter().map(|s| s.to_string()).collect()
    }

    fn aliens_labels() -> PolicyLabels {
        PolicyLabels { untrusted: names(&["B"]), secret: names(&["S"]), public: names(&["P"]), ..Default::default() }
    }

    fn auth_labels() -> PolicyLabels {
        PolicyLabels { trusted: names(&["B"]), untrusted: names(&["A"]), ..Default::default() }
    }

    fn aliens_with(p: impl Fn(&[&str]) -> &'static str) -> CausalModel {
        let sig = Signature::builder()
            .exogenous("U", ["u"])
            .endogenous("S", ["0", "1"])
            .endogenous("P", ["0", "1"])
            .endogenous("B", ["0", "1"])
            .build()
            .unwrap();
        CausalModel::builder(sig)
            .constant("S", "1")
            .constant("B", "1")
            .equation("P", &["S", "B"], p)
            .context("main", &[("U", "u")])
            .build()
            .unwrap()
    }

    #[test]
    fn bribe_breaks_robust_declassification() {
        let cfg = SemanticsConfig::default();
        let v = check_robust_declassification(&catalog::aliens(), &aliens_labels(), &cfg).unwrap();
        assert_eq!(v.len(), 1);
        assert_eq!(v[0].variables, names(&["B", "S", "P"]));
        assert_eq!(v[0].kind, ViolationKind::RobustDeclassification);
        assert_eq!(alloc::format!("{}", v[0].formula), "B ~> S ~> P");
        assert!(satisfies(&catalog::aliens(), &v[0].context, &v[0].formula, &cfg).unwrap());
    }

    #[test]
    fn unconditional_release_is_robust() {
        let cfg = SemanticsConfig::default();
        let m = aliens_with(|r| if r[0] == "1" { "1" } else { "0" });
        assert!(check_robust_declassification(&m, &aliens_labels(), &cfg).unwrap().is_empty());
        let constant = aliens_with(|_| "0");
        assert!(check_robust_declassification(&constant, &aliens_labels(), &cfg).unwrap().is_empty());
        assert!(check_robust_declassification(&catalog::aliens(), &PolicyLabels::default(), &cfg).unwrap().is_empty());
    }

    #[test]
    fn authorization_examples() {
        let cfg = SemanticsConfig::default();
        assert!(check_authorization(&catalog::obedient(), &auth_labels(), "A", "C", &cfg).unwrap());
        assert!(!check_authorization(&catalog::defiant(), &auth_labels(), "A", "C", &cfg).unwrap());
        // A is not a cause of S in the aliens model: vacuously authorized.
        let labels = PolicyLabels { untrusted: names(&["P"]), ..Default::default() };
        assert!(check_authorization(&catalog::aliens(), &labels, "P", "S", &cfg).unwrap());
        assert_eq!(
            check_authorization(&catalog::obedient(), &auth_labels(), "B", "C", &cfg),
            Err(Error::NotUntrusted("B".into()))
        );
    }

    #[test]
    fn delegation_examples() {
        let cfg = SemanticsConfig::default();
        assert!(check_delegation_chain(&catalog::obedient(), "main", &["B"], "A", "C", &cfg).unwrap());
        assert!(!check_delegation_chain(&catalog::defiant(), "main", &["B"], "A", "C", &cfg).unwrap());
        assert!(check_delegation_chain(&catalog::delegation_1(), "main", &["B", "D"], "A", "C", &cfg).unwrap());
        assert!(!check_delegation_chain(&catalog::delegation_2(), "main", &["B", "D"], "A", "C", &cfg).unwrap());
        assert!(check_delegation_chain(&catalog::obedient(), "main", &[], "A", "C", &cfg).unwrap());
        assert_eq!(
            check_delegation_chain(&catalog::obedient(), "main", &["A"], "A", "C", &cfg),
            Err(Error::DuplicateChainName("A".into()))
        );
    }

    #[test]
    fn label_validation() {
        let m = catalog::aliens();
        let clash = PolicyLabels { secret: names(&["S"]), public: names(&["S"]), ..Default::default() };
        assert!(matches!(clash.validate(&m), Err(Error::LabelConflict { .. })));
        let unknown = PolicyLabels { secret: names(&["Q"]), ..Default::default() };
        assert_eq!(unknown.validate(&m), Err(Error::UnknownVariable("Q".into())));
        let exo = PolicyLabels { public: names(&["U"]), ..Default::default() };
        assert_eq!(exo.validate(&m), Err(Error::Exogenous("U".into())));
    }
}
