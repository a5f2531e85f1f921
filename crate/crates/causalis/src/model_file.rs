//! The `.cm` model format.
//!
//! ```text
//! model AndLamp
//! exo U : { u }
//! var Switch1 : { on, off }
//! var Switch2 : { on, off }
//! var Lamp : { on, off }
//! eq Switch1() = on
//! eq Switch2() = on
//! eq Lamp(Switch1, Switch2) = case { (on, on) -> on; default -> off }
//! context main { U = u }
//! ```
//!
//! Items may appear in any order. A `case` table lists rows over the
//! declared parent tuple and must be total once the `default` arm is applied.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use causalis_core::{CausalModel, Equation, Error as ModelError, Signature, VarDecl, VarId, VarKind};

use crate::syntax::{tokenize, Cursor, ParseError, ParseErrorKind, SourceSpan};

struct Decl {
    name: String,
    span: SourceSpan,
    kind: VarKind,
    values: Vec<(String, SourceSpan)>,
}

type Spanned = (String, SourceSpan);

/// Row inputs, the span of the row, and its output.
type Row = (Vec<Spanned>, SourceSpan, String, SourceSpan);

enum Rhs {
    Constant(String, SourceSpan),
    Case { rows: Vec<Row>, default: Option<Spanned> },
}

struct EqItem {
    var: String,
    span: SourceSpan,
    parents: Vec<(String, SourceSpan)>,
    rhs: Rhs,
}

struct ContextItem {
    name: String,
    span: SourceSpan,
    assignments: Vec<(String, SourceSpan, String, SourceSpan)>,
}

#[derive(Default)]
struct Items {
    name: Option<String>,
    decls: Vec<Decl>,
    eqs: Vec<EqItem>,
    contexts: Vec<ContextItem>,
}

fn word_list(c: &mut Cursor, open: &str, close: &str, what: &str) -> Result<Vec<(String, SourceSpan)>, ParseError> {
    c.expect_sym(open)?;
    let mut out = Vec::new();
    if c.eat_sym(close) {
        return Ok(out);
    }
    loop {
        out.push(c.expect_word(what)?);
        if c.eat_sym(close) {
            return Ok(out);
        }
        if !c.eat_sym(",") {
            return Err(c.unexpected(&format!("`,` or `{close}`")));
        }
    }
}

fn parse_items(src: &str) -> Result<Items, ParseError> {
    let mut c = Cursor::new(tokenize(src, false)?);
    let mut items = Items::default();
    while !c.at_eof() {
        let (kw, kw_span) = c.expect_word("`model`, `exo`, `var`, `eq` or `context`")?;
        match kw.as_str() {
            "model" => {
                let (name, _) = c.expect_word("a model name")?;
                if items.name.replace(name).is_some() {
                    return Err(ParseError::new(kw_span, ParseErrorKind::DuplicateModelName));
                }
            }
            "exo" | "var" => {
                let (name, span) = c.expect_variable()?;
                c.expect_sym(":")?;
                let values = word_list(&mut c, "{", "}", "a value")?;
                let kind = if kw == "exo" { VarKind::Exogenous } else { VarKind::Endogenous };
                items.decls.push(Decl { name, span, kind, values });
            }
            "eq" => {
                let (var, span) = c.expect_variable()?;
                let parents = word_list(&mut c, "(", ")", "a parent variable")?;
                c.expect_sym("=")?;
                let rhs = if c.at_word("case") && c.peek_at(1).tok == crate::syntax::Tok::Sym("{") {
                    c.bump();
                    parse_case(&mut c, &var)?
                } else {
                    let (v, s) = c.expect_word("a value or `case`")?;
                    Rhs::Constant(v, s)
                };
                items.eqs.push(EqItem { var, span, parents, rhs });
            }
            "context" => {
                let (name, span) = c.expect_word("a context name")?;
                c.expect_sym("{")?;
                let mut assignments = Vec::new();
                while !c.eat_sym("}") {
                    let (var, vs) = c.expect_variable()?;
                    c.expect_sym("=")?;
                    let (value, xs) = c.expect_word("a value")?;
                    assignments.push((var, vs, value, xs));
                    if !c.at_sym("}") && !c.eat_sym(",") && !c.eat_sym(";") {
                        return Err(c.unexpected("`,` or `}`"));
                    }
                }
                items.contexts.push(ContextItem { name, span, assignments });
            }
            _ => {
                return Err(ParseError::new(
                    kw_span,
                    ParseErrorKind::Unexpected {
                        expected: "`model`, `exo`, `var`, `eq` or `context`".into(),
                        found: format!("`{kw}`"),
                    },
                ))
            }
        }
    }
    Ok(items)
}

fn parse_case(c: &mut Cursor, var: &str) -> Result<Rhs, ParseError> {
    c.expect_sym("{")?;
    let mut rows = Vec::new();
    let mut default: Option<(String, SourceSpan)> = None;
    while !c.eat_sym("}") {
        if c.at_word("default") {
            let span = c.bump().span;
            c.expect_sym("->")?;
            let out = c.expect_word("a value")?;
            if default.replace(out).is_some() {
                return Err(ParseError::new(span, ParseErrorKind::DuplicateDefault(var.to_string())));
            }
        } else {
            let start = c.span();
            let row = word_list(c, "(", ")", "a value")?;
            c.expect_sym("->")?;
            let (out, out_span) = c.expect_word("a value")?;
            rows.push((row, start, out, out_span));
        }
        if !c.at_sym("}") && !c.eat_sym(";") {
            return Err(c.unexpected("`;` or `}`"));
        }
    }
    Ok(Rhs::Case { rows, default })
}

fn located(span: SourceSpan) -> impl Fn(ModelError) -> ParseError {
    move |e| ParseError::new(span, e)
}

fn value_of(sig: &Signature, var: VarId, value: &str, span: SourceSpan) -> Result<usize, ParseError> {
    sig.require_value(var, value).map_err(located(span))
}

fn build_equation(sig: &Signature, id: VarId, item: &EqItem) -> Result<Equation, ParseError> {
    let mut parents = Vec::with_capacity(item.parents.len());
    for (p, span) in &item.parents {
        let pid = sig.require(p).map_err(located(*span))?;
        if pid == id {
            return Err(ParseError::new(*span, ModelError::SelfParent(p.clone())));
        }
        if parents.contains(&pid) {
            return Err(ParseError::new(
                *span,
                ModelError::DuplicateParent { var: item.var.clone(), parent: p.clone() },
            ));
        }
        parents.push(pid);
    }
    let (rows, default) = match &item.rhs {
        Rhs::Constant(v, span) => {
            let x = value_of(sig, id, v, *span)?;
            if parents.is_empty() {
                return Ok(Equation::constant(x));
            }
            (&[][..], Some(x))
        }
        Rhs::Case { rows, default } => {
            let d = match default {
                Some((v, span)) => Some(value_of(sig, id, v, *span)?),
                None => None,
            };
            (&rows[..], d)
        }
    };
    let radices: Vec<usize> = parents.iter().map(|&p| sig.range_len(p)).collect();
    let size: usize = radices.iter().product();
    let mut table: Vec<Option<usize>> = vec![default; size];
    let mut seen = vec![false; size];
    for (row, span, out, out_span) in rows {
        let text = row.iter().map(|(v, _)| v.as_str()).collect::<Vec<_>>().join(", ");
        if row.len() != parents.len() {
            return Err(ParseError::new(
                *span,
                ParseErrorKind::RowArity {
                    var: item.var.clone(),
                    row: text,
                    expected: parents.len(),
                    found: row.len(),
                },
            ));
        }
        let mut index = 0;
        for ((v, vs), (&p, &radix)) in row.iter().zip(parents.iter().zip(&radices)) {
            index = index * radix + value_of(sig, p, v, *vs)?;
        }
        if std::mem::replace(&mut seen[index], true) {
            return Err(ParseError::new(*span, ParseErrorKind::DuplicateRow { var: item.var.clone(), row: text }));
        }
        table[index] = Some(value_of(sig, id, out, *out_span)?);
    }
    let found = table.iter().filter(|x| x.is_some()).count();
    if found < size {
        return Err(ParseError::new(
            item.span,
            ModelError::NonTotalTable { var: item.var.clone(), expected: size, found },
        ));
    }
    Ok(Equation::from_table(parents, table.into_iter().flatten().collect()))
}

/// Parses and validates a model: names, ranges, totality of tables,
/// acyclicity and complete contexts are all checked here.
pub fn parse_model(src: &str) -> Result<CausalModel, ParseError> {
    let items = parse_items(src)?;
    let start = SourceSpan { start: 0, end: 0, line: 1, column: 1 };
    let mut decl_spans: HashMap<&str, SourceSpan> = HashMap::new();
    for d in &items.decls {
        if decl_spans.insert(&d.name, d.span).is_some() {
            return Err(ParseError::new(d.span, ModelError::DuplicateVariable(d.name.clone())));
        }
        for (i, (v, span)) in d.values.iter().enumerate() {
            if d.values[..i].iter().any(|(w, _)| w == v) {
                return Err(ParseError::new(
                    *span,
                    ModelError::DuplicateValue { var: d.name.clone(), value: v.clone() },
                ));
            }
        }
    }
    let sig = Signature::new(
        items
            .decls
            .iter()
            .map(|d| VarDecl::new(d.name.as_str(), d.kind, d.values.iter().map(|(v, _)| v.as_str())))
            .collect(),
    )
    .map_err(|e| {
        let span = match &e {
            ModelError::EmptyRange(v) => decl_spans.get(v.as_str()).copied(),
            _ => None,
        };
        ParseError::new(span.unwrap_or(start), e)
    })?;

    let mut equations: Vec<Option<Equation>> = vec![None; sig.len()];
    let mut eq_spans: HashMap<VarId, SourceSpan> = HashMap::new();
    for item in &items.eqs {
        let id = sig.require(&item.var).map_err(located(item.span))?;
        if !sig.is_endogenous(id) {
            return Err(ParseError::new(item.span, ModelError::EquationForExogenous(item.var.clone())));
        }
        if equations[id].is_some() {
            return Err(ParseError::new(item.span, ModelError::DuplicateEquation(item.var.clone())));
        }
        equations[id] = Some(build_equation(&sig, id, item)?);
        eq_spans.insert(id, item.span);
    }
    for d in &items.decls {
        let id = sig.require(&d.name).expect("declared");
        if d.kind == VarKind::Endogenous && equations[id].is_none() {
            return Err(ParseError::new(d.span, ModelError::MissingEquation(d.name.clone())));
        }
    }

    let mut contexts = Vec::new();
    for (i, ctx) in items.contexts.iter().enumerate() {
        if items.contexts[..i].iter().any(|c| c.name == ctx.name) {
            return Err(ParseError::new(ctx.span, ModelError::DuplicateContext(ctx.name.clone())));
        }
        let mut values = Vec::new();
        for (var, vs, value, xs) in &ctx.assignments {
            let id = sig.require(var).map_err(located(*vs))?;
            if sig.is_endogenous(id) {
                return Err(ParseError::new(*vs, ModelError::UnknownVariable(format!("{var} (not exogenous)"))));
            }
            if values.iter().any(|&(v, _)| v == id) {
                return Err(ParseError::new(*vs, ParseErrorKind::DuplicateAssignment(var.clone())));
            }
            values.push((id, value_of(&sig, id, value, *xs)?));
        }
        if let Some(u) = sig.exogenous().find(|u| values.iter().all(|&(v, _)| v != *u)) {
            return Err(ParseError::new(
                ctx.span,
                ModelError::IncompleteContext { context: ctx.name.clone(), var: sig.name(u).to_string() },
            ));
        }
        contexts.push((ctx.name.clone(), values));
    }
    if contexts.is_empty() {
        let end = tokenize(src, false)?.last().map_or(start, |t| t.span);
        return Err(ParseError::new(end, ParseErrorKind::MissingContext));
    }

    CausalModel::new(items.name, sig.clone(), equations, contexts).map_err(|e| {
        let span = match &e {
            ModelError::CyclicModel(vars) => {
                vars.first().and_then(|v| sig.var(v)).and_then(|id| eq_spans.get(&id)).copied()
            }
            _ => None,
        };
        ParseError::new(span.unwrap_or(start), e)
    })
}

/// Canonical source text. Tables list every row whose output differs from
/// the most frequent output, which becomes the `default` arm.
pub fn print_model(model: &CausalModel) -> String {
    let sig = model.signature();
    let mut out = String::new();
    if let Some(name) = model.name() {
        writeln!(out, "model {name}").unwrap();
    }
    for d in sig.vars() {
        let kw = if d.kind() == VarKind::Exogenous { "exo" } else { "var" };
        writeln!(out, "{kw} {} : {{ {} }}", d.name(), d.range().join(", ")).unwrap();
    }
    for v in sig.endogenous() {
        let Some(eq) = model.equation(v) else { continue };
        let parents: Vec<&str> = eq.parents().iter().map(|&p| sig.name(p)).collect();
        write!(out, "eq {}({}) = ", sig.name(v), parents.join(", ")).unwrap();
        if eq.is_constant() {
            writeln!(out, "{}", sig.value_name(v, eq.table()[0])).unwrap();
            continue;
        }
        let mut counts: BTreeMap<usize, usize> = BTreeMap::new();
        for &x in eq.table() {
            *counts.entry(x).or_default() += 1;
        }
        let default = counts.iter().max_by(|a, b| a.1.cmp(b.1).then(b.0.cmp(a.0))).map(|(&x, _)| x).unwrap();
        let mut arms: Vec<String> = eq
            .rows(sig)
            .filter(|&(_, x)| x != default)
            .map(|(row, x)| {
                let cells: Vec<&str> = eq.parents().iter().zip(&row).map(|(&p, &r)| sig.value_name(p, r)).collect();
                format!("({}) -> {}", cells.join(", "), sig.value_name(v, x))
            })
            .collect();
        arms.push(format!("default -> {}", sig.value_name(v, default)));
        writeln!(out, "case {{ {} }}", arms.join("; ")).unwrap();
    }
    for ctx in model.contexts() {
        let assignments: Vec<String> = sig
            .exogenous()
            .filter_map(|u| ctx.value(u).map(|x| format!("{} = {}", sig.name(u), sig.value_name(u, x))))
            .collect();
        writeln!(out, "context {} {{ {} }}", ctx.name(), assignments.join(", ")).unwrap();
    }
    out
}
