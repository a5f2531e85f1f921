//! The `.labels` policy format: one class per line, whitespace-separated names.
//!
//! ```text
//! # aliens policy
//! secret: S
//! public: P
//! untrusted: B
//! ```

use causalis_core::{CausalModel, Error as ModelError, PolicyLabels};

use crate::syntax::{tokenize, Cursor, ParseError, ParseErrorKind, Tok};

/// Parses labels and validates them against the model. A class may appear
/// on several lines; its names accumulate.
pub fn parse_labels(src: &str, model: &CausalModel) -> Result<PolicyLabels, ParseError> {
    let tokens = tokenize(src, true)?;
    let mut c = Cursor::new(tokens.clone());
    let mut labels = PolicyLabels::default();
    loop {
        c.skip_newlines();
        if c.at_eof() {
            break;
        }
        let (class, span) = c.expect_word("a label class")?;
        let target = match class.as_str() {
            "secret" => &mut labels.secret,
            "public" => &mut labels.public,
            "trusted" => &mut labels.trusted,
            "untrusted" => &mut labels.untrusted,
            _ => return Err(ParseError::new(span, ParseErrorKind::UnknownLabelClass(class))),
        };
        c.expect_sym(":")?;
        while !c.at_eof() && !c.at_sym("\n") {
            let (name, span) = c.expect_variable()?;
            model.signature().require_endogenous(&name).map_err(|e| ParseError::new(span, e))?;
            if !target.contains(&name) {
                target.push(name);
            }
        }
    }
    labels.validate(model).map_err(|e| {
        let name = match &e {
            ModelError::LabelConflict { var, .. } => var.clone(),
            _ => String::new(),
        };
        let span = tokens
            .iter()
            .rev()
            .find(|t| matches!(&t.tok, Tok::Word(w) if *w == name))
            .map_or(tokens[0].span, |t| t.span);
        ParseError::new(span, e)
    })?;
    Ok(labels)
}

pub fn print_labels(labels: &PolicyLabels) -> String {
    let mut out = String::new();
    for (class, names) in [
        ("secret", &labels.secret),
        ("public", &labels.public),
        ("trusted", &labels.trusted),
        ("untrusted", &labels.untrusted),
    ] {
        if !names.is_empty() {
            out.push_str(&format!("{class}: {}\n", names.join(" ")));
        }
    }
    out
}
