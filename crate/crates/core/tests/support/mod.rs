//! Test support shared by the integration suites of both crates.
#![allow(dead_code)]

pub mod gen;
pub mod oracle;
