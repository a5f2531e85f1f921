//! Text formats and command-line front end for `causalis-core`.
//!
//! - [`parse_model`] / [`print_model`]: the `.cm` model format;
//! - [`parse_formula`]: the formula language (printing is `Display` on
//!   [`causalis_core::Formula`]);
//! - [`parse_labels`]: `.labels` security policies;
//! - [`report`]: verdict records with JSON and human renderings;
//! - [`cli`]: the `causalis` command.

pub mod cli;
mod formula_syntax;
mod labels;
mod model_file;
pub mod report;
pub mod syntax;

pub use formula_syntax::parse_formula;
pub use labels::{parse_labels, print_labels};
pub use model_file::{parse_model, print_model};
pub use syntax::{ParseError, ParseErrorKind, SourceSpan};
