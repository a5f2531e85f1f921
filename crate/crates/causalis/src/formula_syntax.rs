//! Concrete syntax for formulas.
//!
//! ```text
//! phi  := "exists" v "in" X "." phi
//!       | pat "~>" phi                      (right-associative, loosest)
//!       | phi "|" phi | phi "&" phi
//!       | "!" phi | "[" X "<-" x {"," X "<-" x} "]" phi
//!       | "cause(" pat "," phi ")" | "(" phi ")" | X "=" x | X "=" v | X
//! pat  := entry {"&" entry} ;  entry := X "=" x | X "=" v | X
//! ```
//!
//! Variables start with an uppercase letter, value variables with a
//! lowercase one. After `=`, a name bound by an enclosing `exists` is read
//! as that value variable, anything else as a value.

use causalis_core::{Binding, CausePattern, Error as ModelError, Formula, Intervention, PatternEntry, Signature};

use crate::syntax::{join, starts_lower, tokenize, Cursor, ParseError, ParseErrorKind, SourceSpan, Tok, Token};

struct Parser<'s> {
    c: Cursor,
    sig: &'s Signature,
    /// Binders in scope with the variable they range over.
    scope: Vec<(String, String)>,
}

impl Parser<'_> {
    fn variable(&mut self) -> Result<(String, SourceSpan), ParseError> {
        let (name, span) = self.c.expect_variable()?;
        self.sig.require(&name).map_err(|e| ParseError::new(span, e))?;
        Ok((name, span))
    }

    fn formula(&mut self) -> Result<Formula, ParseError> {
        if self.c.at_word("exists") && matches!(self.c.peek_at(1).tok, Tok::Word(_)) {
            self.c.bump();
            let (binder, bspan) = self.c.expect_word("a value variable")?;
            if !starts_lower(&binder) {
                return Err(ParseError::new(bspan, ParseErrorKind::BinderCase(binder)));
            }
            self.c.expect_keyword("in")?;
            let (over, _) = self.variable()?;
            self.c.expect_sym(".")?;
            self.scope.push((binder.clone(), over.clone()));
            let body = self.formula();
            self.scope.pop();
            return Ok(Formula::exists(&binder, &over, body?));
        }
        let start = self.c.span();
        let lhs = self.or()?;
        if self.c.at_sym("~>") {
            let end = self.c.bump().span;
            let pattern =
                as_pattern(&lhs).ok_or_else(|| ParseError::new(join(start, end), ParseErrorKind::NotAPattern))?;
            let pattern = CausePattern::new(pattern).map_err(|e| ParseError::new(start, e))?;
            let effect = self.formula()?;
            return Ok(Formula::cause(pattern, effect));
        }
        Ok(lhs)
    }

    fn or(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.and()?;
        while self.c.eat_sym("|") {
            f = Formula::or(f, self.and()?);
        }
        Ok(f)
    }

    fn and(&mut self) -> Result<Formula, ParseError> {
        let mut f = self.unary()?;
        while self.c.eat_sym("&") {
            f = Formula::and(f, self.unary()?);
        }
        Ok(f)
    }

    fn unary(&mut self) -> Result<Formula, ParseError> {
        if self.c.eat_sym("!") {
            return Ok(Formula::not(self.unary()?));
        }
        if self.c.at_sym("[") {
            let start = self.c.bump().span;
            let mut settings = Vec::new();
            loop {
                let (var, _) = self.variable()?;
                self.c.expect_sym("<-")?;
                let (value, vspan) = self.c.expect_word("a value")?;
                let id = self.sig.require(&var).expect("resolved");
                self.sig.require_value(id, &value).map_err(|e| ParseError::new(vspan, e))?;
                settings.push((var, value));
                if self.c.eat_sym("]") {
                    break;
                }
                self.c.expect_sym(",")?;
            }
            let settings = Intervention::new(settings).map_err(|e| ParseError::new(start, e))?;
            return Ok(Formula::intervened(settings, self.unary()?));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Formula, ParseError> {
        if self.c.eat_sym("(") {
            let f = self.formula()?;
            self.c.expect_sym(")")?;
            return Ok(f);
        }
        if self.c.at_word("cause") && self.c.peek_at(1).tok == Tok::Sym("(") {
            self.c.bump();
            self.c.bump();
            let start = self.c.span();
            let mut entries = vec![self.entry()?];
            while self.c.eat_sym("&") {
                entries.push(self.entry()?);
            }
            let pattern = CausePattern::new(entries).map_err(|e| ParseError::new(start, e))?;
            self.c.expect_sym(",")?;
            let effect = self.formula()?;
            self.c.expect_sym(")")?;
            return Ok(Formula::cause(pattern, effect));
        }
        match self.entry()? {
            PatternEntry { var, binding: Binding::Value(x) } => Ok(Formula::Atom { var, value: x }),
            PatternEntry { var, binding: Binding::Bound(b) } => Ok(Formula::Bound { var, binder: b }),
            PatternEntry { var, binding: Binding::Wildcard } => Ok(Formula::Wildcard(var)),
        }
    }

    /// `X=x`, `X=v` or a bare `X`.
    fn entry(&mut self) -> Result<PatternEntry, ParseError> {
        if !matches!(&self.c.peek().tok, Tok::Word(_)) {
            return Err(self.c.unexpected("a formula"));
        }
        let (var, _) = self.variable()?;
        if !self.c.eat_sym("=") {
            return Ok(PatternEntry { var, binding: Binding::Wildcard });
        }
        let (word, span) = self.c.expect_word("a value")?;
        if self.scope.iter().any(|(b, _)| *b == word) {
            return Ok(PatternEntry { var, binding: Binding::Bound(word) });
        }
        let id = self.sig.require(&var).expect("resolved");
        self.sig.require_value(id, &word).map_err(|e| ParseError::new(span, e))?;
        Ok(PatternEntry { var, binding: Binding::Value(word) })
    }
}

/// Reads a conjunction of atoms, bound atoms and wildcards as a cause pattern.
fn as_pattern(f: &Formula) -> Option<Vec<PatternEntry>> {
    match f {
        Formula::And(a, b) => {
            let mut entries = as_pattern(a)?;
            entries.extend(as_pattern(b)?);
            Some(entries)
        }
        Formula::Atom { var, value } => {
            Some(vec![PatternEntry { var: var.clone(), binding: Binding::Value(value.clone()) }])
        }
        Formula::Bound { var, binder } => {
            Some(vec![PatternEntry { var: var.clone(), binding: Binding::Bound(binder.clone()) }])
        }
        Formula::Wildcard(var) => Some(vec![PatternEntry { var: var.clone(), binding: Binding::Wildcard }]),
        _ => None,
    }
}

/// The first token naming `name`, for errors found after parsing.
fn locate(tokens: &[Token], name: &str) -> Option<SourceSpan> {
    tokens.iter().find(|t| matches!(&t.tok, Tok::Word(w) if w == name)).map(|t| t.span)
}

/// Parses a formula against a signature. Sugar (binders and wildcards) is
/// kept; the result passes [`Formula::check`].
pub fn parse_formula(src: &str, sig: &Signature) -> Result<Formula, ParseError> {
    let tokens = tokenize(src, false)?;
    let mut p = Parser { c: Cursor::new(tokens.clone()), sig, scope: Vec::new() };
    let f = p.formula()?;
    if !p.c.at_eof() {
        return Err(p.c.unexpected("end of input"));
    }
    f.check(sig).map_err(|e| {
        let name = match &e {
            ModelError::MisplacedWildcard(v)
            | ModelError::Exogenous(v)
            | ModelError::UnknownVariable(v)
            | ModelError::UnboundBinder(v) => Some(v.as_str()),
            ModelError::UnknownValue { var, .. } => Some(var.as_str()),
            _ => None,
        };
        let span = name.and_then(|n| locate(&tokens, n)).unwrap_or(tokens[0].span);
        ParseError::new(span, e)
    })?;
    Ok(f)
}
