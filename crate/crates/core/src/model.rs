//! Finite, acyclic structural causal models.
//!
//! Variables are identified by their position in the [`Signature`] and values
//! by their position in the variable's range. Values are opaque symbols: the
//! model only ever compares them.

use alloc::collections::BTreeMap;
use alloc::string::{String, ToString};
use alloc::vec;
use alloc::vec::Vec;
use core::fmt;

use crate::combinatorics::Product;
use crate::error::{Error, Result};

/// Index of a variable in its signature (declaration order).
pub type VarId = usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum VarKind {
    Exogenous,
    Endogenous,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VarDecl {
    name: String,
    kind: VarKind,
    range: Vec<String>,
}

impl VarDecl {
    pub fn new<N, I, V>(name: N, kind: VarKind, range: I) -> Self
    where
        N: Into<String>,
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        VarDecl { name: name.into(), kind, range: range.into_iter().map(Into::into).collect() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn kind(&self) -> VarKind {
        self.kind
    }

    pub fn range(&self) -> &[String] {
        &self.range
    }

    pub fn value_index(&self, value: &str) -> Option<usize> {
        self.range.iter().position(|v| v == value)
    }
}

/// Exogenous and endogenous variables with their finite ranges, in declaration order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Signature {
    vars: Vec<VarDecl>,
    index: BTreeMap<String, VarId>,
}

impl Signature {
    pub fn builder() -> SignatureBuilder {
        SignatureBuilder::default()
    }

    pub fn new(vars: Vec<VarDecl>) -> Result<Self> {
        let mut index = BTreeMap::new();
        for (id, decl) in vars.iter().enumerate() {
            if index.insert(decl.name.clone(), id).is_some() {
                return Err(Error::DuplicateVariable(decl.name.clone()));
            }
            if decl.range.is_empty() {
                return Err(Error::EmptyRange(decl.name.clone()));
            }
            for (i, v) in decl.range.iter().enumerate() {
                if decl.range[..i].contains(v) {
                    return Err(Error::DuplicateValue { var: decl.name.clone(), value: v.clone() });
                }
            }
        }
        if !vars.iter().any(|d| d.kind == VarKind::Exogenous) {
            return Err(Error::NoExogenous);
        }
        if !vars.iter().any(|d| d.kind == VarKind::Endogenous) {
            return Err(Error::NoEndogenous);
        }
        Ok(Signature { vars, index })
    }

    pub fn len(&self) -> usize {
        self.vars.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vars.is_empty()
    }

    pub fn vars(&self) -> &[VarDecl] {
        &self.vars
    }

    pub fn decl(&self, id: VarId) -> &VarDecl {
        &self.vars[id]
    }

    pub fn name(&self, id: VarId) -> &str {
        &self.vars[id].name
    }

    pub fn var(&self, name: &str) -> Option<VarId> {
        self.index.get(name).copied()
    }

    pub fn require(&self, name: &str) -> Result<VarId> {
        self.var(name).ok_or_else(|| Error::UnknownVariable(name.to_string()))
    }

    /// Like [`Signature::require`], but rejects exogenous variables.
    pub fn require_endogenous(&self, name: &str) -> Result<VarId> {
        let id = self.require(name)?;
        if self.is_endogenous(id) {
            Ok(id)
        } else {
            Err(Error::Exogenous(name.to_string()))
        }
    }

    pub fn is_endogenous(&self, id: VarId) -> bool {
        self.vars[id].kind == VarKind::Endogenous
    }

    pub fn exogenous(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).filter(move |&i| !self.is_endogenous(i))
    }

    pub fn endogenous(&self) -> impl Iterator<Item = VarId> + '_ {
        (0..self.vars.len()).filter(move |&i| self.is_endogenous(i))
    }

    pub fn range_len(&self, id: VarId) -> usize {
        self.vars[id].range.len()
    }

    pub fn value_name(&self, id: VarId, value: usize) -> &str {
        &self.vars[id].range[value]
    }

    pub fn require_value(&self, id: VarId, value: &str) -> Result<usize> {
        self.vars[id]
            .value_index(value)
            .ok_or_else(|| Error::UnknownValue { var: self.vars[id].name.clone(), value: value.to_string() })
    }

    /// Resolves a `(variable, value)` pair of names.
    pub fn resolve(&self, var: &str, value: &str) -> Result<(VarId, usize)> {
        let id = self.require(var)?;
        Ok((id, self.require_value(id, value)?))
    }
}

#[derive(Default, Debug)]
pub struct SignatureBuilder {
    vars: Vec<VarDecl>,
}

impl SignatureBuilder {
    pub fn exogenous<I, V>(mut self, name: &str, range: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        self.vars.push(VarDecl::new(name, VarKind::Exogenous, range));
        self
    }

    pub fn endogenous<I, V>(mut self, name: &str, range: I) -> Self
    where
        I: IntoIterator<Item = V>,
        V: Into<String>,
    {
        self.vars.push(VarDecl::new(name, VarKind::Endogenous, range));
        self
    }

    pub fn build(self) -> Result<Signature> {
        Signature::new(self.vars)
    }
}

/// Structural equation of one endogenous variable: a total lookup table over
/// the declared parents. Rows are ordered with the first parent most
/// significant and every parent's values in range order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Equation {
    parents: Vec<VarId>,
    table: Vec<usize>,
}

impl Equation {
    pub fn constant(value: usize) -> Self {
        Equation { parents: Vec::new(), table: vec![value] }
    }

    /// Unchecked; [`CausalModel::new`] validates shape and ranges.
    pub fn from_table(parents: Vec<VarId>, table: Vec<usize>) -> Self {
        Equation { parents, table }
    }

    pub fn parents(&self) -> &[VarId] {
        &self.parents
    }

    pub fn table(&self) -> &[usize] {
        &self.table
    }

    pub fn is_constant(&self) -> bool {
        self.parents.is_empty()
    }

    fn expected_rows(&self, sig: &Signature) -> usize {
        self.parents.iter().map(|&p| sig.range_len(p)).product()
    }

    /// Row index for a full assignment (indexed by variable id).
    pub(crate) fn row_of(&self, sig: &Signature, values: &[usize]) -> usize {
        self.parents.iter().fold(0, |acc, &p| acc * sig.range_len(p) + values[p])
    }

    /// Output for a full assignment (indexed by variable id).
    pub fn eval(&self, sig: &Signature, values: &[usize]) -> usize {
        self.table[self.row_of(sig, values)]
    }

    /// Output for a tuple of parent values given in parent order.
    pub fn lookup(&self, sig: &Signature, parent_values: &[usize]) -> usize {
        let row = self.parents.iter().zip(parent_values).fold(0, |acc, (&p, &v)| acc * sig.range_len(p) + v);
        self.table[row]
    }

    /// `(parent tuple, output)` for every row, in table order.
    pub fn rows<'a>(&'a self, sig: &Signature) -> impl Iterator<Item = (Vec<usize>, usize)> + 'a {
        let radices = self.parents.iter().map(|&p| sig.range_len(p)).collect();
        Product::new(radices).zip(self.table.iter().copied())
    }

    fn depends_on_position(&self, sig: &Signature, pos: usize) -> bool {
        let radix = sig.range_len(self.parents[pos]);
        let stride: usize = self.parents[pos + 1..].iter().map(|&p| sig.range_len(p)).product();
        (0..self.table.len())
            .filter(|row| (row / stride).is_multiple_of(radix))
            .any(|row| (1..radix).any(|d| self.table[row + d * stride] != self.table[row]))
    }
}

/// A named setting of every exogenous variable.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Context {
    name: String,
    values: Vec<Option<usize>>,
}

impl Context {
    pub fn name(&self) -> &str {
        &self.name
    }

    /// Value of an exogenous variable; `None` for endogenous ones.
    pub fn value(&self, id: VarId) -> Option<usize> {
        self.values.get(id).copied().flatten()
    }
}

/// A total assignment to all variables, as produced by [`CausalModel::solve`].
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct World {
    values: Vec<usize>,
}

impl World {
    pub(crate) fn from_values(values: Vec<usize>) -> Self {
        World { values }
    }

    pub fn values(&self) -> &[usize] {
        &self.values
    }

    pub fn value(&self, id: VarId) -> usize {
        self.values[id]
    }

    pub fn get<'s>(&self, sig: &'s Signature, name: &str) -> Option<&'s str> {
        sig.var(name).map(|id| sig.value_name(id, self.values[id]))
    }

    /// `(variable, value)` names in declaration order.
    pub fn named<'s>(&'s self, sig: &'s Signature) -> impl Iterator<Item = (&'s str, &'s str)> + 's {
        self.values.iter().enumerate().map(move |(id, &v)| (sig.name(id), sig.value_name(id, v)))
    }
}

/// A structural causal model with one or more named contexts.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CausalModel {
    name: Option<String>,
    signature: Signature,
    equations: Vec<Option<Equation>>,
    contexts: Vec<Context>,
    order: Vec<VarId>,
}

impl CausalModel {
    pub fn builder(signature: Signature) -> ModelBuilder {
        ModelBuilder::new(signature)
    }

    /// Validates and assembles a model. `equations` is indexed by variable id
    /// and must hold `Some` exactly for the endogenous variables.
    pub fn new(
        name: Option<String>,
        signature: Signature,
        equations: Vec<Option<Equation>>,
        contexts: Vec<(String, Vec<(VarId, usize)>)>,
    ) -> Result<Self> {
        let sig = &signature;
        let mut equations = equations;
        if equations.len() > sig.len() {
            return Err(Error::UnknownVariable(alloc::format!("#{}", sig.len())));
        }
        equations.resize(sig.len(), None);
        for (id, eq) in equations.iter().enumerate() {
            let name = sig.name(id);
            match (sig.is_endogenous(id), eq) {
                (true, None) => return Err(Error::MissingEquation(name.to_string())),
                (false, Some(_)) => return Err(Error::EquationForExogenous(name.to_string())),
                (false, None) => {}
                (true, Some(eq)) => {
                    for (i, &p) in eq.parents.iter().enumerate() {
                        if p >= sig.len() {
                            return Err(Error::UnknownVariable(alloc::format!("#{p}")));
                        }
                        if p == id {
                            return Err(Error::SelfParent(name.to_string()));
                        }
                        if eq.parents[..i].contains(&p) {
                            return Err(Error::DuplicateParent {
                                var: name.to_string(),
                                parent: sig.name(p).to_string(),
                            });
                        }
                    }
                    let expected = eq.expected_rows(sig);
                    if eq.table.len() != expected {
                        return Err(Error::NonTotalTable { var: name.to_string(), expected, found: eq.table.len() });
                    }
                    if let Some(&bad) = eq.table.iter().find(|&&v| v >= sig.range_len(id)) {
                        return Err(Error::UnknownValue { var: name.to_string(), value: alloc::format!("#{bad}") });
                    }
                }
            }
        }

        let mut ctxs: Vec<Context> = Vec::with_capacity(contexts.len());
        for (cname, assignments) in contexts {
            if ctxs.iter().any(|c| c.name == cname) {
                return Err(Error::DuplicateContext(cname));
            }
            let mut values = vec![None; sig.len()];
            for (id, v) in assignments {
                if id >= sig.len() {
                    return Err(Error::UnknownVariable(alloc::format!("#{id}")));
                }
                if sig.is_endogenous(id) {
                    return Err(Error::EquationForExogenous(sig.name(id).to_string()));
                }
                if v >= sig.range_len(id) {
                    return Err(Error::UnknownValue { var: sig.name(id).to_string(), value: alloc::format!("#{v}") });
                }
                values[id] = Some(v);
            }
            if let Some(missing) = sig.exogenous().find(|&u| values[u].is_none()) {
                return Err(Error::IncompleteContext { context: cname, var: sig.name(missing).to_string() });
            }
            ctxs.push(Context { name: cname, values });
        }

        let mut model = CausalModel { name, signature, equations, contexts: ctxs, order: Vec::new() };
        model.order = model.compute_order()?;
        Ok(model)
    }

    pub fn name(&self) -> Option<&str> {
        self.name.as_deref()
    }

    pub fn with_name(mut self, name: Option<String>) -> Self {
        self.name = name;
        self
    }

    pub fn signature(&self) -> &Signature {
        &self.signature
    }

    pub fn equation(&self, id: VarId) -> Option<&Equation> {
        self.equations.get(id).and_then(Option::as_ref)
    }

    pub fn contexts(&self) -> &[Context] {
        &self.contexts
    }

    pub fn context_index(&self, name: &str) -> Result<usize> {
        self.contexts.iter().position(|c| c.name == name).ok_or_else(|| Error::UnknownContext(name.to_string()))
    }

    /// The cached dependency order (endogenous variables only).
    pub fn order(&self) -> &[VarId] {
        &self.order
    }

    pub(crate) fn depends_on_id(&self, v: VarId, w: VarId) -> bool {
        match self.equation(v) {
            Some(eq) => match eq.parents.iter().position(|&p| p == w) {
                Some(pos) => eq.depends_on_position(&self.signature, pos),
                None => false,
            },
            None => false,
        }
    }

    /// Whether the equation of `v` nontrivially reads `w`. Exogenous `v` depends on nothing.
    pub fn depends_on(&self, v: &str, w: &str) -> Result<bool> {
        let v = self.signature.require(v)?;
        let w = self.signature.require(w)?;
        Ok(v != w && self.depends_on_id(v, w))
    }

    fn compute_order(&self) -> Result<Vec<VarId>> {
        let sig = &self.signature;
        let endo: Vec<VarId> = sig.endogenous().collect();
        let deps: Vec<Vec<VarId>> = endo
            .iter()
            .map(|&v| {
                self.equation(v)
                    .map(|eq| {
                        eq.parents
                            .iter()
                            .copied()
                            .filter(|&p| sig.is_endogenous(p) && self.depends_on_id(v, p))
                            .collect()
                    })
                    .unwrap_or_default()
            })
            .collect();
        let mut placed = vec![false; sig.len()];
        let mut order = Vec::with_capacity(endo.len());
        while order.len() < endo.len() {
            let next =
                endo.iter().zip(&deps).find(|(&v, d)| !placed[v] && d.iter().all(|&p| placed[p])).map(|(&v, _)| v);
            match next {
                Some(v) => {
                    placed[v] = true;
                    order.push(v);
                }
                None => {
                    let stuck = endo.iter().filter(|&&v| !placed[v]).map(|&v| sig.name(v).to_string()).collect();
                    return Err(Error::CyclicModel(stuck));
                }
            }
        }
        Ok(order)
    }

    /// Topological order of the depends-on relation over endogenous
    /// variables, ties broken by declaration order.
    pub fn dependency_order(&self) -> Result<Vec<String>> {
        Ok(self.compute_order()?.into_iter().map(|v| self.signature.name(v).to_string()).collect())
    }

    /// Solution under extra constant overrides (indexed by variable id).
    pub(crate) fn solve_with(&self, context: usize, overrides: &[Option<usize>]) -> World {
        let ctx = &self.contexts[context];
        let mut values: Vec<usize> = ctx.values.iter().map(|v| v.unwrap_or(0)).collect();
        for &v in &self.order {
            values[v] = match overrides.get(v).copied().flatten() {
                Some(x) => x,
                None => self.equations[v].as_ref().map_or(0, |eq| eq.eval(&self.signature, &values)),
            };
        }
        World::from_values(values)
    }

    pub(crate) fn solve_index(&self, context: usize) -> World {
        self.solve_with(context, &[])
    }

    /// The unique world compatible with the model in the given context.
    pub fn solve(&self, context: &str) -> Result<World> {
        Ok(self.solve_index(self.context_index(context)?))
    }

    pub(crate) fn intervene_ids(&self, settings: &[(VarId, usize)]) -> CausalModel {
        let mut out = self.clone();
        for &(v, x) in settings {
            out.equations[v] = Some(Equation::constant(x));
        }
        out.order = out.compute_order().expect("constant equations cannot introduce cycles");
        out
    }

    /// The model with each target's equation replaced by a constant.
    pub fn intervene<V, X>(&self, settings: &[(V, X)]) -> Result<CausalModel>
    where
        V: AsRef<str>,
        X: AsRef<str>,
    {
        let mut resolved = Vec::with_capacity(settings.len());
        for (v, x) in settings {
            let id = self.signature.require_endogenous(v.as_ref())?;
            resolved.push((id, self.signature.require_value(id, x.as_ref())?));
        }
        Ok(self.intervene_ids(&resolved))
    }
}

/// Convenience builder taking names instead of ids.
#[derive(Debug)]
pub struct ModelBuilder {
    name: Option<String>,
    signature: Signature,
    equations: Vec<Option<Equation>>,
    contexts: Vec<(String, Vec<(VarId, usize)>)>,
    error: Option<Error>,
}

impl ModelBuilder {
    pub fn new(signature: Signature) -> Self {
        let n = signature.len();
        ModelBuilder { name: None, signature, equations: vec![None; n], contexts: Vec::new(), error: None }
    }

    pub fn name(mut self, name: &str) -> Self {
        self.name = Some(name.to_string());
        self
    }

    fn fail(&mut self, e: Error) {
        if self.error.is_none() {
            self.error = Some(e);
        }
    }

    fn set(&mut self, var: &str, eq: impl FnOnce(&Signature, VarId) -> Result<Equation>) {
        let result = self.signature.require(var).and_then(|id| {
            if !self.signature.is_endogenous(id) {
                return Err(Error::EquationForExogenous(var.to_string()));
            }
            if self.equations[id].is_some() {
                return Err(Error::DuplicateEquation(var.to_string()));
            }
            Ok((id, eq(&self.signature, id)?))
        });
        match result {
            Ok((id, eq)) => self.equations[id] = Some(eq),
            Err(e) => self.fail(e),
        }
    }

    pub fn constant(mut self, var: &str, value: &str) -> Self {
        self.set(var, |sig, id| Ok(Equation::constant(sig.require_value(id, value)?)));
        self
    }

    /// Equation given as a function from parent value names to an output value name.
    pub fn equation<F, S>(mut self, var: &str, parents: &[&str], f: F) -> Self
    where
        F: Fn(&[&str]) -> S,
        S: AsRef<str>,
    {
        self.set(var, |sig, id| {
            let parents = parents.iter().map(|p| sig.require(p)).collect::<Result<Vec<_>>>()?;
            let radices = parents.iter().map(|&p| sig.range_len(p)).collect();
            let mut table = Vec::new();
            for row in Product::new(radices) {
                let names: Vec<&str> = parents.iter().zip(&row).map(|(&p, &v)| sig.value_name(p, v)).collect();
                table.push(sig.require_value(id, f(&names).as_ref())?);
            }
            Ok(Equation::from_table(parents, table))
        });
        self
    }

    /// Equation given as the output column of its table, in canonical row order.
    pub fn table(mut self, var: &str, parents: &[&str], outputs: &[&str]) -> Self {
        self.set(var, |sig, id| {
            let parents = parents.iter().map(|p| sig.require(p)).collect::<Result<Vec<_>>>()?;
            let table = outputs.iter().map(|o| sig.require_value(id, o)).collect::<Result<Vec<_>>>()?;
            Ok(Equation::from_table(parents, table))
        });
        self
    }

    pub fn raw_equation(mut self, var: VarId, eq: Equation) -> Self {
        if var < self.equations.len() {
            self.equations[var] = Some(eq);
        } else {
            self.fail(Error::UnknownVariable(alloc::format!("#{var}")));
        }
        self
    }

    pub fn context(mut self, name: &str, assignments: &[(&str, &str)]) -> Self {
        match assignments.iter().map(|(v, x)| self.signature.resolve(v, x)).collect::<Result<Vec<_>>>() {
            Ok(values) => self.contexts.push((name.to_string(), values)),
            Err(e) => self.fail(e),
        }
        self
    }

    pub fn build(self) -> Result<CausalModel> {
        if let Some(e) = self.error {
            return Err(e);
        }
        CausalModel::new(self.name, self.signature, self.equations, self.contexts)
    }
}

impl fmt::Display for World {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?}", self.values)
    }
}
