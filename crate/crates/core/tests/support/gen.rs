//! Seeded generators for random models and formulas.

use rand::seq::SliceRandom;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use causalis_core::{
    Binding, CausalModel, CausePattern, Equation, Formula, Intervention, PatternEntry, Signature, VarId,
};

const NAME_POOLS: [[&str; 5]; 3] =
    [["A", "B", "C", "D", "E"], ["Rain", "Wind", "Fire", "Smoke", "Alarm"], ["X1", "X2", "Y", "Z_0", "Q"]];
const VALUE_POOLS: [[&str; 3]; 3] = [["0", "1", "2"], ["on", "off", "dim"], ["lo", "mid", "hi"]];
const BINDERS: [&str; 4] = ["x", "y", "z", "w"];

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

#[derive(Clone, Copy, Debug)]
pub struct ModelShape {
    pub max_endogenous: usize,
    pub max_range: usize,
    /// Chance that an earlier variable becomes a parent.
    pub parent_density: f64,
}

impl Default for ModelShape {
    fn default() -> Self {
        ModelShape { max_endogenous: 4, max_range: 3, parent_density: 0.5 }
    }
}

/// A random acyclic model. Variables are declared in an order unrelated to
/// the hidden topological order, and some declared parents may be trivial.
pub fn model(rng: &mut impl Rng, shape: ModelShape) -> CausalModel {
    let n = rng.gen_range(1..=shape.max_endogenous);
    let names = NAME_POOLS.choose(rng).unwrap();
    let values = VALUE_POOLS.choose(rng).unwrap();
    let exo_range = rng.gen_range(1..=2);
    let mut sig = Signature::builder().exogenous("U", values[..exo_range].iter().copied());
    let mut ranges = Vec::new();
    for name in &names[..n] {
        let k = rng.gen_range(2..=shape.max_range.max(2));
        sig = sig.endogenous(name, values[..k].iter().copied());
        ranges.push(k);
    }
    let sig = sig.build().unwrap();
    let endo: Vec<VarId> = sig.endogenous().collect();
    let mut topo = endo.clone();
    topo.shuffle(rng);
    let mut equations = vec![None; sig.len()];
    for (pos, &v) in topo.iter().enumerate() {
        let mut parents: Vec<VarId> =
            topo[..pos].iter().copied().filter(|_| rng.gen_bool(shape.parent_density)).collect();
        if exo_range > 1 && rng.gen_bool(0.3) {
            parents.push(0);
        }
        parents.shuffle(rng);
        let rows: usize = parents.iter().map(|&p| sig.range_len(p)).product();
        let k = sig.range_len(v);
        let table = (0..rows).map(|_| rng.gen_range(0..k)).collect();
        equations[v] = Some(Equation::from_table(parents, table));
    }
    let contexts = (0..exo_range).map(|i| (format!("c{i}"), vec![(0, i)])).collect();
    CausalModel::new(None, sig, equations, contexts).unwrap()
}

/// True if some equation differs on a row whose exogenous parents take their
/// values from `context`. Otherwise no formula can tell the models apart there.
pub fn differs_at(m1: &CausalModel, m2: &CausalModel, context: &str) -> bool {
    let sig = m1.signature();
    let ctx = &m1.contexts()[m1.context_index(context).unwrap()];
    sig.endogenous().any(|v| {
        let (e1, e2) = (m1.equation(v).unwrap(), m2.equation(v).unwrap());
        let parents = e1.parents();
        (0..e1.table().len()).any(|row| {
            let mut rest = row;
            let mut in_context = true;
            for &p in parents.iter().rev() {
                let k = sig.range_len(p);
                if let Some(x) = ctx.value(p) {
                    in_context &= x == rest % k;
                }
                rest /= k;
            }
            in_context && e1.table()[row] != e2.table()[row]
        })
    })
}

/// A second model with the same signature, depends-on relation and solved
/// world (in the first context) but an equation that differs somewhere
/// reachable from that context.
pub fn companion(rng: &mut impl Rng, m1: &CausalModel, attempts: usize) -> Option<CausalModel> {
    let sig = m1.signature();
    let ctx = m1.contexts()[0].name().to_string();
    let w1 = m1.solve(&ctx).unwrap();
    let endo: Vec<VarId> = sig.endogenous().filter(|&v| !m1.equation(v).unwrap().is_constant()).collect();
    if endo.is_empty() {
        return None;
    }
    for _ in 0..attempts {
        let mut equations: Vec<Option<Equation>> = (0..sig.len()).map(|v| m1.equation(v).cloned()).collect();
        let changes = rng.gen_range(1..=2);
        for _ in 0..changes {
            let v = *endo.choose(rng).unwrap();
            let eq = equations[v].take().unwrap();
            let mut table = eq.table().to_vec();
            let row = rng.gen_range(0..table.len());
            table[row] = rng.gen_range(0..sig.range_len(v));
            equations[v] = Some(Equation::from_table(eq.parents().to_vec(), table));
        }
        let contexts = m1
            .contexts()
            .iter()
            .map(|c| (c.name().to_string(), sig.exogenous().map(|u| (u, c.value(u).unwrap())).collect()))
            .collect();
        let Ok(m2) = CausalModel::new(None, sig.clone(), equations, contexts) else { continue };
        let same_deps = sig.endogenous().all(|v| {
            (0..sig.len()).all(|w| {
                m1.depends_on(sig.name(v), sig.name(w)).unwrap() == m2.depends_on(sig.name(v), sig.name(w)).unwrap()
            })
        });
        if same_deps && differs_at(m1, &m2, &ctx) && m2.solve(&ctx).unwrap() == w1 {
            return Some(m2);
        }
    }
    None
}

#[derive(Clone, Copy, Debug)]
pub struct FormulaShape {
    pub depth: usize,
    pub max_cause_nesting: usize,
    /// Allow `exists`, bound atoms and wildcards.
    pub sugar: bool,
    pub interventions: bool,
}

impl Default for FormulaShape {
    fn default() -> Self {
        FormulaShape { depth: 4, max_cause_nesting: 2, sugar: true, interventions: true }
    }
}

struct FormulaGen<'a, R> {
    rng: &'a mut R,
    sig: &'a Signature,
    shape: FormulaShape,
    /// Values favoured when picking atoms, so that causes often pass AC1.
    hint: Option<Vec<usize>>,
}

impl<R: Rng> FormulaGen<'_, R> {
    fn var(&mut self) -> VarId {
        self.rng.gen_range(0..self.sig.len())
    }

    fn endo(&mut self) -> VarId {
        let endo: Vec<VarId> = self.sig.endogenous().collect();
        *endo.choose(self.rng).unwrap()
    }

    fn value(&mut self, v: VarId) -> String {
        let k = self.sig.range_len(v);
        let x = match &self.hint {
            Some(w) if self.rng.gen_bool(0.6) => w[v],
            _ => self.rng.gen_range(0..k),
        };
        self.sig.value_name(v, x).to_string()
    }

    fn distinct_endo(&mut self, max: usize) -> Vec<VarId> {
        let mut endo: Vec<VarId> = self.sig.endogenous().collect();
        endo.shuffle(self.rng);
        let k = self.rng.gen_range(1..=max.min(endo.len()));
        endo.truncate(k);
        endo
    }

    fn binder_for(&mut self, v: VarId, scope: &[(String, VarId)]) -> Option<String> {
        let range = self.sig.decl(v).range();
        let usable: Vec<&String> =
            scope.iter().filter(|(_, over)| self.sig.decl(*over).range() == range).map(|(b, _)| b).collect();
        usable.choose(self.rng).map(|b| b.to_string())
    }

    fn leaf(&mut self, scope: &[(String, VarId)]) -> Formula {
        let v = self.var();
        if self.shape.sugar && self.rng.gen_bool(0.4) {
            if let Some(b) = self.binder_for(v, scope) {
                return Formula::bound(self.sig.name(v), &b);
            }
        }
        let x = self.value(v);
        Formula::atom(self.sig.name(v), &x)
    }

    fn formula(&mut self, depth: usize, nesting: usize, scope: &mut Vec<(String, VarId)>) -> Formula {
        if depth == 0 || self.rng.gen_bool(0.15) {
            return self.leaf(scope);
        }
        let mut choices = vec![0, 1, 2];
        if self.shape.interventions {
            choices.push(3);
        }
        if nesting < self.shape.max_cause_nesting {
            choices.extend([4, 4]);
        }
        if self.shape.sugar && scope.len() < BINDERS.len() {
            choices.push(5);
        }
        match *choices.choose(self.rng).unwrap() {
            0 => Formula::not(self.formula(depth - 1, nesting, scope)),
            1 => Formula::and(self.formula(depth - 1, nesting, scope), self.formula(depth - 1, nesting, scope)),
            2 => Formula::or(self.formula(depth - 1, nesting, scope), self.formula(depth - 1, nesting, scope)),
            3 => {
                let targets = self.distinct_endo(2);
                let settings: Vec<(String, String)> =
                    targets.iter().map(|&t| (self.sig.name(t).to_string(), self.value(t))).collect();
                Formula::intervened(Intervention::new(settings).unwrap(), self.formula(depth - 1, nesting, scope))
            }
            4 => self.cause(depth, nesting, scope),
            _ => {
                let binder = BINDERS[scope.len()].to_string();
                let over = self.var();
                scope.push((binder.clone(), over));
                let body = self.formula(depth - 1, nesting, scope);
                scope.pop();
                Formula::exists(&binder, self.sig.name(over), body)
            }
        }
    }

    fn cause(&mut self, depth: usize, nesting: usize, scope: &mut Vec<(String, VarId)>) -> Formula {
        let vars = self.distinct_endo(2);
        let entries = vars
            .iter()
            .map(|&v| {
                let binding = match self.rng.gen_range(0..4) {
                    0 if self.shape.sugar => Binding::Wildcard,
                    1 if self.shape.sugar => match self.binder_for(v, scope) {
                        Some(b) => Binding::Bound(b),
                        None => Binding::Value(self.value(v)),
                    },
                    _ => Binding::Value(self.value(v)),
                };
                PatternEntry { var: self.sig.name(v).to_string(), binding }
            })
            .collect();
        let mut effect = self.formula(depth - 1, nesting + 1, scope);
        if self.shape.sugar && self.rng.gen_bool(0.3) {
            let w = self.var();
            effect = if self.rng.gen_bool(0.5) {
                Formula::and(effect, Formula::wildcard(self.sig.name(w)))
            } else {
                Formula::wildcard(self.sig.name(w))
            };
        }
        Formula::cause(CausePattern::new(entries).unwrap(), effect)
    }
}

/// A random closed formula over the signature, well-formed for `check`.
pub fn formula(rng: &mut impl Rng, sig: &Signature, shape: FormulaShape) -> Formula {
    let depth = rng.gen_range(0..=shape.depth);
    FormulaGen { rng, sig, shape, hint: None }.formula(depth, 0, &mut Vec::new())
}

/// Like [`formula`], but atoms and patterns lean towards the values of the
/// model's first context.
pub fn formula_for(rng: &mut impl Rng, model: &CausalModel, shape: FormulaShape) -> Formula {
    let depth = rng.gen_range(shape.depth.min(1)..=shape.depth);
    let hint = Some(model.solve(model.contexts()[0].name()).unwrap().values().to_vec());
    FormulaGen { rng, sig: model.signature(), shape, hint }.formula(depth, 0, &mut Vec::new())
}

/// A random concrete pattern: distinct endogenous variables with values
/// leaning towards the model's first context.
pub fn pattern(rng: &mut impl Rng, model: &CausalModel, max_width: usize) -> CausePattern {
    let sig = model.signature();
    let hint = Some(model.solve(model.contexts()[0].name()).unwrap().values().to_vec());
    let mut g = FormulaGen { rng, sig, shape: FormulaShape::default(), hint };
    let vars = g.distinct_endo(max_width);
    let pairs: Vec<(String, String)> = vars.iter().map(|&v| (sig.name(v).to_string(), g.value(v))).collect();
    CausePattern::concrete(&pairs).unwrap()
}
