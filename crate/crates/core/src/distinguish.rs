//! Formulas that hold in one model and fail in another.
//!
//! When the two solved worlds differ a single atom separates them. When they
//! coincide, the models can still be told apart by a circular cause formula
//! built around the first variable whose structural equation differs.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::combinatorics::{subsets_by_size, Product};
use crate::error::{Error, Result};
use crate::eval::{check_actual_cause, Ac2Mode, SemanticsConfig};
use crate::formula::{CausePattern, Formula};
use crate::model::{CausalModel, VarId, World};

/// The first point where two models' equations disagree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Divergence {
    pub var: String,
    /// Values of the endogenous variables `var` depends on, in declaration order.
    pub input: Vec<(String, String)>,
    /// Output of the first and second model's equation on `input`.
    pub outputs: (String, String),
}

/// A cause formula separating two models with the same solved world.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalSeparation {
    pub pattern: CausePattern,
    pub effect: Formula,
    pub divergence: Divergence,
    /// Always [`Ac2Mode::EffectDisjoint`]; the construction is only sound there.
    pub mode: Ac2Mode,
}

impl CausalSeparation {
    pub fn formula(&self) -> Formula {
        Formula::cause(self.pattern.clone(), self.effect.clone())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Distinction {
    /// The solved worlds differ at this atom.
    Atom(Formula),
    Causal(CausalSeparation),
    Equivalent,
}

impl Distinction {
    pub fn formula(&self) -> Option<Formula> {
        match self {
            Distinction::Atom(f) => Some(f.clone()),
            Distinction::Causal(p) => Some(p.formula()),
            Distinction::Equivalent => None,
        }
    }
}

struct Resolved {
    c1: usize,
    c2: usize,
    world: World,
}

fn same_signature(m1: &CausalModel, m2: &CausalModel) -> Result<()> {
    if m1.signature() != m2.signature() {
        return Err(Error::SignatureMismatch);
    }
    Ok(())
}

fn same_dependencies(m1: &CausalModel, m2: &CausalModel) -> Result<()> {
    let sig = m1.signature();
    for v in sig.endogenous() {
        for w in 0..sig.len() {
            if v != w && m1.depends_on_id(v, w) != m2.depends_on_id(v, w) {
                return Err(Error::DependencyMismatch { var: sig.name(v).to_string(), on: sig.name(w).to_string() });
            }
        }
    }
    Ok(())
}

fn first_difference(m: &CausalModel, a: &World, b: &World) -> Option<VarId> {
    (0..m.signature().len()).find(|&v| m.signature().is_endogenous(v) && a.value(v) != b.value(v))
}

fn resolve(m1: &CausalModel, u1: &str, m2: &CausalModel, u2: &str) -> Result<Resolved> {
    same_signature(m1, m2)?;
    same_dependencies(m1, m2)?;
    let (c1, c2) = (m1.context_index(u1)?, m2.context_index(u2)?);
    let (w1, w2) = (m1.solve_index(c1), m2.solve_index(c2));
    if let Some(v) = first_difference(m1, &w1, &w2) {
        return Err(Error::AssignmentMismatch(m1.signature().name(v).to_string()));
    }
    Ok(Resolved { c1, c2, world: w1 })
}

/// Inputs for evaluating an equation: exogenous values from the context,
/// endogenous values from `base`.
fn inputs(m: &CausalModel, context: usize, base: &World) -> Vec<usize> {
    let ctx = &m.contexts()[context];
    (0..m.signature().len()).map(|v| ctx.value(v).unwrap_or_else(|| base.value(v))).collect()
}

/// `(d, parents of d, least differing parent tuple)`.
fn raw_divergence(m1: &CausalModel, m2: &CausalModel, r: &Resolved) -> Option<(VarId, Vec<VarId>, Vec<usize>)> {
    let sig = m1.signature();
    let mut in1 = inputs(m1, r.c1, &r.world);
    let mut in2 = inputs(m2, r.c2, &r.world);
    for &d in m1.order() {
        let (Some(e1), Some(e2)) = (m1.equation(d), m2.equation(d)) else { continue };
        let parents: Vec<VarId> = sig.endogenous().filter(|&p| p != d && m1.depends_on_id(d, p)).collect();
        let radices = parents.iter().map(|&p| sig.range_len(p)).collect();
        for tuple in Product::new(radices) {
            for (&p, &x) in parents.iter().zip(&tuple) {
                in1[p] = x;
                in2[p] = x;
            }
            if e1.eval(sig, &in1) != e2.eval(sig, &in2) {
                return Some((d, parents, tuple));
            }
        }
        for &p in &parents {
            in1[p] = r.world.value(p);
            in2[p] = r.world.value(p);
        }
    }
    None
}

fn divergence_of(m1: &CausalModel, m2: &CausalModel, r: &Resolved) -> Option<(VarId, Vec<usize>, Divergence)> {
    let sig = m1.signature();
    let (d, parents, tuple) = raw_divergence(m1, m2, r)?;
    let mut in1 = inputs(m1, r.c1, &r.world);
    let mut in2 = inputs(m2, r.c2, &r.world);
    for (&p, &x) in parents.iter().zip(&tuple) {
        in1[p] = x;
        in2[p] = x;
    }
    let o1 = m1.equation(d)?.eval(sig, &in1);
    let o2 = m2.equation(d)?.eval(sig, &in2);
    let divergence = Divergence {
        var: sig.name(d).to_string(),
        input: parents
            .iter()
            .zip(&tuple)
            .map(|(&p, &x)| (sig.name(p).to_string(), sig.value_name(p, x).to_string()))
            .collect(),
        outputs: (sig.value_name(d, o1).to_string(), sig.value_name(d, o2).to_string()),
    };
    Some((d, in1, divergence))
}

/// The canonical divergence, or `None` when the equations agree everywhere.
/// Both models must share a signature, a depends-on relation and a solved world.
pub fn find_divergence(m1: &CausalModel, u1: &str, m2: &CausalModel, u2: &str) -> Result<Option<Divergence>> {
    let r = resolve(m1, u1, m2, u2)?;
    Ok(divergence_of(m1, m2, &r).map(|(_, _, d)| d))
}

fn build(m1: &CausalModel, u1: &str, m2: &CausalModel, r: &Resolved) -> Result<Option<CausalSeparation>> {
    let sig = m1.signature();
    let Some((d, v_prime, divergence)) = divergence_of(m1, m2, r) else { return Ok(None) };
    let pos = m1.order().iter().position(|&v| v == d).expect("d is endogenous");
    let mut below: Vec<VarId> = m1.order()[..pos].to_vec();
    below.sort_unstable();
    let out1 = sig.value_name(d, sig.require_value(d, &divergence.outputs.0)?);
    let effect = Formula::or_all(
        core::iter::once(Formula::not(Formula::atom(sig.name(d), out1)))
            .chain(below.iter().map(|&y| Formula::not(Formula::atom(sig.name(y), sig.value_name(y, v_prime[y]))))),
    )
    .expect("nonempty disjunction");
    let cfg = SemanticsConfig::with_mode(Ac2Mode::EffectDisjoint);
    for subset in subsets_by_size(below.len(), 1..=below.len()) {
        let pairs: Vec<(&str, &str)> =
            subset.iter().map(|&i| (sig.name(below[i]), sig.value_name(below[i], r.world.value(below[i])))).collect();
        let pattern = CausePattern::concrete(&pairs)?;
        if check_actual_cause(m1, u1, &pattern, &effect, &cfg)?.holds() {
            return Ok(Some(CausalSeparation { pattern, effect, divergence, mode: Ac2Mode::EffectDisjoint }));
        }
    }
    Err(Error::ConstructionFailed)
}

/// A circular cause formula true in `(m1, u1)` and false in `(m2, u2)`.
/// Requires a divergence to exist.
pub fn proposition1_formula(m1: &CausalModel, u1: &str, m2: &CausalModel, u2: &str) -> Result<CausalSeparation> {
    let r = resolve(m1, u1, m2, u2)?;
    build(m1, u1, m2, &r)?.ok_or(Error::ConstructionFailed)
}

/// Some formula true in `(m1, u1)` and false in `(m2, u2)`, if one exists
/// among atoms and the circular construction.
pub fn distinguish(m1: &CausalModel, u1: &str, m2: &CausalModel, u2: &str) -> Result<Distinction> {
    same_signature(m1, m2)?;
    let w1 = m1.solve(u1)?;
    let w2 = m2.solve(u2)?;
    if let Some(v) = first_difference(m1, &w1, &w2) {
        let sig = m1.signature();
        return Ok(Distinction::Atom(Formula::atom(sig.name(v), sig.value_name(v, w1.value(v)))));
    }
    let r = resolve(m1, u1, m2, u2)?;
    Ok(match build(m1, u1, m2, &r)? {
        Some(p) => Distinction::Causal(p),
        None => Distinction::Equivalent,
    })
}
