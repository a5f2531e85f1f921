//! Tokens, source positions and diagnostics shared by the text formats.

use std::fmt;

use causalis_core::Error as ModelError;

/// A region of source text: byte offsets plus the 1-based line and column of `start`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash)]
pub struct SourceSpan {
    pub start: usize,
    pub end: usize,
    pub line: usize,
    pub column: usize,
}

impl fmt::Display for SourceSpan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}", self.line, self.column)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ParseErrorKind {
    #[error("unexpected character `{0}`")]
    UnexpectedChar(char),
    #[error("expected {expected}, found {found}")]
    Unexpected { expected: String, found: String },
    #[error("variable names start with an uppercase letter: `{0}`")]
    VariableCase(String),
    #[error("value variables start with a lowercase letter: `{0}`")]
    BinderCase(String),
    #[error("the model name is given twice")]
    DuplicateModelName,
    #[error("row ({row}) of `{var}` has {found} entries, expected {expected}")]
    RowArity { var: String, row: String, expected: usize, found: usize },
    #[error("row ({row}) of `{var}` is given twice")]
    DuplicateRow { var: String, row: String },
    #[error("duplicate `default` arm in the table of `{0}`")]
    DuplicateDefault(String),
    #[error("the model declares no context")]
    MissingContext,
    #[error("`{0}` is assigned twice in a context")]
    DuplicateAssignment(String),
    #[error("only a conjunction of `X=x` or bare `X` entries can stand left of `~>`")]
    NotAPattern,
    #[error("unknown label class `{0}` (expected secret, public, trusted or untrusted)")]
    UnknownLabelClass(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

/// A syntax or semantic error located in the source.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{span}: {kind}")]
pub struct ParseError {
    pub span: SourceSpan,
    pub kind: ParseErrorKind,
}

impl ParseError {
    pub fn new(span: SourceSpan, kind: impl Into<ParseErrorKind>) -> Self {
        ParseError { span, kind: kind.into() }
    }

    /// Multi-line rendering with the offending line and a caret underline.
    pub fn render(&self, source: &str, origin: &str) -> String {
        let line_text = source.lines().nth(self.span.line.saturating_sub(1)).unwrap_or("");
        let gutter = self.span.line.to_string().len();
        let width = source
            .get(self.span.start..self.span.end.max(self.span.start))
            .map_or(1, |s| s.chars().take_while(|&c| c != '\n').count().max(1));
        let pad = " ".repeat(gutter);
        let indent: String = line_text
            .chars()
            .take(self.span.column.saturating_sub(1))
            .map(|c| if c == '\t' { '\t' } else { ' ' })
            .collect();
        format!(
            "error: {}\n{pad}--> {origin}:{}\n{pad} |\n{} | {line_text}\n{pad} | {indent}{}\n",
            self.kind,
            self.span,
            self.span.line,
            "^".repeat(width)
        )
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Tok {
    /// Identifier or value: letters, digits and underscores.
    Word(String),
    Sym(&'static str),
    Eof,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Word(w) => write!(f, "`{w}`"),
            Tok::Sym(s) => write!(f, "`{s}`"),
            Tok::Eof => f.write_str("end of input"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Token {
    pub tok: Tok,
    pub span: SourceSpan,
}

const SYMBOLS: [&str; 17] = ["~>", "<-", "->", "{", "}", "(", ")", "[", "]", ",", ";", ":", "=", ".", "&", "|", "!"];

fn is_word_char(c: char) -> bool {
    c.is_alphanumeric() || c == '_'
}

/// Splits text into tokens. `#` starts a comment that runs to the end of the line.
/// Newlines are reported as `Sym("\n")` when `keep_newlines` is set.
pub fn tokenize(src: &str, keep_newlines: bool) -> Result<Vec<Token>, ParseError> {
    let mut out = Vec::new();
    let (mut line, mut line_start) = (1, 0);
    let mut chars = src.char_indices().peekable();
    while let Some(&(i, c)) = chars.peek() {
        let span_at = |end: usize| SourceSpan { start: i, end, line, column: src[line_start..i].chars().count() + 1 };
        if c == '\n' {
            if keep_newlines {
                out.push(Token { tok: Tok::Sym("\n"), span: span_at(i + 1) });
            }
            chars.next();
            line += 1;
            line_start = i + 1;
        } else if c.is_whitespace() {
            chars.next();
        } else if c == '#' {
            while chars.peek().is_some_and(|&(_, c)| c != '\n') {
                chars.next();
            }
        } else if is_word_char(c) {
            let mut end = i;
            while let Some(&(j, d)) = chars.peek() {
                if !is_word_char(d) {
                    break;
                }
                end = j + d.len_utf8();
                chars.next();
            }
            out.push(Token { tok: Tok::Word(src[i..end].to_string()), span: span_at(end) });
        } else if let Some(sym) = SYMBOLS.iter().find(|s| src[i..].starts_with(**s)) {
            for _ in 0..sym.chars().count() {
                chars.next();
            }
            out.push(Token { tok: Tok::Sym(sym), span: span_at(i + sym.len()) });
        } else {
            return Err(ParseError::new(span_at(i + c.len_utf8()), ParseErrorKind::UnexpectedChar(c)));
        }
    }
    let end = src.len();
    let column = src[line_start..].chars().count() + 1;
    out.push(Token { tok: Tok::Eof, span: SourceSpan { start: end, end, line, column } });
    Ok(out)
}

/// Position in a token stream with the usual lookahead helpers.
pub struct Cursor {
    tokens: Vec<Token>,
    pos: usize,
}

impl Cursor {
    pub fn new(tokens: Vec<Token>) -> Self {
        Cursor { tokens, pos: 0 }
    }

    pub fn peek(&self) -> &Token {
        &self.tokens[self.pos]
    }

    pub fn peek_at(&self, k: usize) -> &Token {
        &self.tokens[(self.pos + k).min(self.tokens.len() - 1)]
    }

    pub fn span(&self) -> SourceSpan {
        self.peek().span
    }

    pub fn bump(&mut self) -> Token {
        let t = self.tokens[self.pos].clone();
        if self.pos + 1 < self.tokens.len() {
            self.pos += 1;
        }
        t
    }

    pub fn at_sym(&self, sym: &str) -> bool {
        matches!(&self.peek().tok, Tok::Sym(s) if *s == sym)
    }

    pub fn at_word(&self, word: &str) -> bool {
        matches!(&self.peek().tok, Tok::Word(w) if w == word)
    }

    pub fn at_eof(&self) -> bool {
        self.peek().tok == Tok::Eof
    }

    pub fn eat_sym(&mut self, sym: &str) -> bool {
        let hit = self.at_sym(sym);
        if hit {
            self.bump();
        }
        hit
    }

    pub fn unexpected(&self, expected: &str) -> ParseError {
        let t = self.peek();
        ParseError::new(t.span, ParseErrorKind::Unexpected { expected: expected.to_string(), found: t.tok.to_string() })
    }

    pub fn expect_sym(&mut self, sym: &str) -> Result<SourceSpan, ParseError> {
        if self.at_sym(sym) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{}`", sym.escape_default())))
        }
    }

    pub fn expect_keyword(&mut self, word: &str) -> Result<SourceSpan, ParseError> {
        if self.at_word(word) {
            Ok(self.bump().span)
        } else {
            Err(self.unexpected(&format!("`{word}`")))
        }
    }

    pub fn expect_word(&mut self, what: &str) -> Result<(String, SourceSpan), ParseError> {
        match &self.peek().tok {
            Tok::Word(w) => {
                let w = w.clone();
                Ok((w, self.bump().span))
            }
            _ => Err(self.unexpected(what)),
        }
    }

    /// A word starting with an uppercase letter.
    pub fn expect_variable(&mut self) -> Result<(String, SourceSpan), ParseError> {
        let (name, span) = self.expect_word("a variable name")?;
        if !starts_upper(&name) {
            return Err(ParseError::new(span, ParseErrorKind::VariableCase(name)));
        }
        Ok((name, span))
    }

    pub fn skip_newlines(&mut self) {
        while self.eat_sym("\n") {}
    }
}

pub fn starts_upper(s: &str) -> bool {
    s.chars().next().is_some_and(char::is_uppercase)
}

pub fn starts_lower(s: &str) -> bool {
    s.chars().next().is_some_and(|c| c.is_lowercase())
}

/// Covers both spans (which must be in order).
pub fn join(a: SourceSpan, b: SourceSpan) -> SourceSpan {
    SourceSpan { end: b.end.max(a.end), ..a }
}
