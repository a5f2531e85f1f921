//! Actual causality over finite, acyclic structural causal models.
//!
//! The crate is `no_std` (it only needs `alloc`). It covers:
//!
//! - [`model`]: signatures, structural equations, solving and interventions;
//! - [`formula`]: formulas with interventions, nested cause statements,
//!   value binders and wildcard causes, plus fragment classification;
//! - [`eval`]: satisfaction and the modified Halpern-Pearl cause check;
//! - [`security`]: robust declassification, authorization and delegation;
//! - [`mod@distinguish`]: formulas that separate two models;
//! - [`catalog`]: the standard example models (lamps, farmer, aliens, ...).

#![no_std]

extern crate alloc;

pub mod catalog;
mod combinatorics;
pub mod distinguish;
mod error;
pub mod eval;
pub mod formula;
pub mod model;
pub mod security;

pub use distinguish::{distinguish, find_divergence, proposition1_formula, CausalSeparation, Distinction, Divergence};
pub use error::{Error, Result};
pub use eval::{
    check_actual_cause, enumerate_causes, satisfies, valid, Ac2Mode, CauseVerdict, Failure, SemanticsConfig, Witness,
};
pub use formula::{Binding, CausePattern, Formula, Fragment, FragmentClass, Intervention, PatternEntry, VarsPolicy};
pub use model::{CausalModel, Equation, ModelBuilder, Signature, VarDecl, VarId, VarKind, World};
pub use security::{PolicyLabels, Violation, ViolationKind};
