//! The standard example models: two-switch lamps, the relocating farmer,
//! the bribed official, and the authorization/delegation scenarios.
//!
//! Every model has a single exogenous variable `U` with range `{u}` and one
//! context named `main`.

use crate::model::{CausalModel, Signature};

fn signature(endogenous: &[(&str, &[&str])]) -> Signature {
    endogenous
        .iter()
        .fold(Signature::builder().exogenous("U", ["u"]), |b, (name, range)| b.endogenous(name, range.iter().copied()))
        .build()
        .expect("catalog signatures are well formed")
}

const ON_OFF: &[&str] = &["on", "off"];
const BIT: &[&str] = &["0", "1"];

fn lamp(name: &str, lamp: fn(&str, &str) -> bool) -> CausalModel {
    CausalModel::builder(signature(&[("Switch1", ON_OFF), ("Switch2", ON_OFF), ("Lamp", ON_OFF)]))
        .name(name)
        .constant("Switch1", "on")
        .constant("Switch2", "on")
        .equation("Lamp", &["Switch1", "Switch2"], |r| if lamp(r[0], r[1]) { "on" } else { "off" })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}

/// Lamp is on iff both switches are on.
pub fn and_lamp() -> CausalModel {
    lamp("AndLamp", |a, b| a == "on" && b == "on")
}

/// Lamp is on iff both switches are in the same position.
pub fn not_xor_lamp() -> CausalModel {
    lamp("NotXorLamp", |a, b| a == b)
}

/// `R` relocation (1 = moved south), `W` weather (0 drought, 1 fair, 2 flood), `C` crops survive.
pub fn farmer() -> CausalModel {
    CausalModel::builder(signature(&[("R", BIT), ("W", &["0", "1", "2"]), ("C", BIT)]))
        .name("Farmer")
        .constant("R", "1")
        .equation("W", &["R"], |r| if r[0] == "0" { "2" } else { "0" })
        .equation("C", &["W"], |r| if r[0] == "1" { "1" } else { "0" })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}

/// `S` secret contact, `P` press article, `B` bribe paid; `P = S` if bribed, else 0.
pub fn aliens() -> CausalModel {
    CausalModel::builder(signature(&[("S", BIT), ("P", BIT), ("B", BIT)]))
        .name("Aliens")
        .constant("S", "1")
        .constant("B", "1")
        .equation("P", &["S", "B"], |r| if r[1] == "1" { as_static(r[0]) } else { "0" })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}

fn flip(v: &str) -> &'static str {
    if v == "0" {
        "1"
    } else {
        "0"
    }
}

fn as_static(v: &str) -> &'static str {
    if v == "0" {
        "0"
    } else {
        "1"
    }
}

fn colour(name: &str, otherwise: fn(&str) -> &'static str) -> CausalModel {
    CausalModel::builder(signature(&[("A", BIT), ("B", BIT), ("C", BIT)]))
        .name(name)
        .constant("A", "0")
        .constant("B", "1")
        .equation("C", &["A", "B"], |r| if r[1] == "1" { as_static(r[0]) } else { otherwise(r[0]) })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}

/// `A` Alice's colour, `B` Bob's go-ahead; `C = A` if `B = 1`, else 1.
pub fn obedient() -> CausalModel {
    colour("Obedient", |_| "1")
}

/// As [`obedient`], but `C = 1 - A` when `B = 0`.
pub fn defiant() -> CausalModel {
    colour("Defiant", flip)
}

/// `C = A` if both `B = 1` and `D = 1`, else 1.
pub fn delegation_1() -> CausalModel {
    CausalModel::builder(signature(&[("A", BIT), ("B", BIT), ("D", BIT), ("C", BIT)]))
        .name("Delegation1")
        .constant("A", "0")
        .constant("B", "1")
        .constant("D", "1")
        .equation("C", &["A", "B", "D"], |r| if r[1] == "1" && r[2] == "1" { as_static(r[0]) } else { "1" })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}

/// `C = A` if `D = 1`, else 1; Bob has no say.
pub fn delegation_2() -> CausalModel {
    CausalModel::builder(signature(&[("A", BIT), ("B", BIT), ("D", BIT), ("C", BIT)]))
        .name("Delegation2")
        .constant("A", "0")
        .constant("B", "1")
        .constant("D", "1")
        .equation("C", &["A", "D"], |r| if r[1] == "1" { as_static(r[0]) } else { "1" })
        .context("main", &[("U", "u")])
        .build()
        .expect("catalog model")
}
