#[path = "../../core/tests/support/mod.rs"]
mod support;

use std::path::{Path, PathBuf};

use causalis::{parse_formula, parse_labels, parse_model, print_model};
use causalis_core::{
    catalog, check_actual_cause, enumerate_causes, satisfies, Ac2Mode, CausalModel, CausePattern, CauseVerdict,
    Failure, Formula, SemanticsConfig,
};
use support::oracle::{self, Verdict};

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name)
}

fn read(name: &str) -> String {
    std::fs::read_to_string(fixture(name)).unwrap()
}

fn model(name: &str) -> CausalModel {
    parse_model(&read(name)).unwrap_or_else(|e| panic!("{}", e.render(&read(name), name)))
}

fn mode(name: &str) -> Ac2Mode {
    match name {
        "effect-disjoint" => Ac2Mode::EffectDisjoint,
        "literal" => Ac2Mode::Literal,
        other => panic!("unknown semantics {other}"),
    }
}

/// Non-comment lines, split into `fields` whitespace-separated words and the rest.
fn golden(name: &str, fields: usize) -> Vec<(Vec<String>, String)> {
    read(name)
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| {
            let mut rest = l;
            let mut words = Vec::new();
            for _ in 0..fields {
                let (w, r) = rest.split_once(char::is_whitespace).unwrap();
                words.push(w.to_string());
                rest = r.trim_start();
            }
            (words, rest.to_string())
        })
        .collect()
}

type Build = fn() -> CausalModel;

#[test]
fn fixtures_match_the_catalog() {
    let pairs: [(&str, Build); 8] = [
        ("andlamp.cm", catalog::and_lamp),
        ("notxorlamp.cm", catalog::not_xor_lamp),
        ("farmer.cm", catalog::farmer),
        ("aliens.cm", catalog::aliens),
        ("obedient.cm", catalog::obedient),
        ("defiant.cm", catalog::defiant),
        ("delegation1.cm", catalog::delegation_1),
        ("delegation2.cm", catalog::delegation_2),
    ];
    for (file, build) in pairs {
        let m = model(file);
        assert_eq!(m, build(), "{file}");
        assert_eq!(parse_model(&print_model(&m)).unwrap(), m, "{file}");
    }
}

#[test]
fn label_fixtures_parse() {
    let aliens = parse_labels(&read("aliens.labels"), &model("aliens.cm")).unwrap();
    assert_eq!(
        (aliens.untrusted, aliens.secret, aliens.public),
        (vec!["B".into()], vec!["S".into()], vec!["P".into()])
    );
    let auth = parse_labels(&read("authorization.labels"), &model("defiant.cm")).unwrap();
    assert_eq!((auth.trusted, auth.untrusted), (vec!["B".into()], vec!["A".into()]));
    let deleg = parse_labels(&read("delegation.labels"), &model("delegation2.cm")).unwrap();
    assert_eq!(deleg.trusted, vec!["B".to_string(), "D".to_string()]);
}

#[test]
fn golden_verdicts() {
    let lines = golden("verdicts.golden", 3);
    assert!(lines.len() >= 20);
    for (words, text) in lines {
        let m = model(&words[0]);
        let mode = mode(&words[1]);
        let cfg = SemanticsConfig::with_mode(mode);
        let f = parse_formula(&text, m.signature()).unwrap();
        let (expected, code) = match words[2].split_once(':') {
            Some((e, c)) => (e, Some(c)),
            None => (words[2].as_str(), None),
        };
        for ctx in m.contexts() {
            let ctx = ctx.name();
            let got = satisfies(&m, ctx, &f, &cfg).unwrap();
            assert_eq!(got, expected == "holds", "{} {ctx} {text}", words[0]);
            assert_eq!(oracle::holds(&m, ctx, &f, mode), got, "oracle disagrees on {} {text}", words[0]);
            if let (Some(code), Formula::Cause(p, e)) = (code, &f) {
                let CauseVerdict::Fails(failure) = check_actual_cause(&m, ctx, p, e, &cfg).unwrap() else {
                    panic!("{text} should fail")
                };
                assert_eq!(failure.code(), code, "{text}");
            }
        }
    }
}

/// Every concrete pattern of actual values, checked by the oracle.
fn oracle_causes(m: &CausalModel, ctx: &str, effect: &Formula, mode: Ac2Mode) -> Vec<String> {
    let sig = m.signature();
    let world = m.solve(ctx).unwrap();
    let endo: Vec<_> = sig.endogenous().collect();
    let mut out = Vec::new();
    for mask in 1u32..(1 << endo.len()) {
        let pairs: Vec<(&str, &str)> = endo
            .iter()
            .enumerate()
            .filter(|(i, _)| mask & (1 << i) != 0)
            .map(|(_, &v)| (sig.name(v), sig.value_name(v, world.value(v))))
            .collect();
        let p = CausePattern::concrete(&pairs).unwrap();
        if oracle::cause_verdict(m, ctx, &p, effect, mode) == Verdict::Holds {
            out.push(p.to_string());
        }
    }
    out.sort();
    out
}

#[test]
fn golden_causes() {
    for (words, rest) in golden("causes.golden", 2) {
        let (effect_text, list) = rest.split_once(" => ").unwrap();
        let expected: Vec<String> =
            if list.trim() == "none" { Vec::new() } else { list.split(';').map(|s| s.trim().to_string()).collect() };
        let m = model(&words[0]);
        let mode = mode(&words[1]);
        let effect = parse_formula(effect_text, m.signature()).unwrap();
        for ctx in m.contexts() {
            let got: Vec<String> = enumerate_causes(&m, ctx.name(), &effect, &SemanticsConfig::with_mode(mode))
                .unwrap()
                .into_iter()
                .map(|(p, _)| p.to_string())
                .collect();
            assert_eq!(got, expected, "{} {effect_text}", words[0]);
            let mut sorted = got.clone();
            sorted.sort();
            assert_eq!(oracle_causes(&m, ctx.name(), &effect, mode), sorted, "oracle on {} {effect_text}", words[0]);
        }
    }
}

#[test]
fn circular_failure_names_the_switches() {
    let m = model("andlamp.cm");
    let f =
        parse_formula("Switch1=on & Switch2=on & Lamp=on ~> Switch1=on | Switch2=on | Lamp=on", m.signature()).unwrap();
    let Formula::Cause(p, e) = &f else { panic!() };
    let verdict = check_actual_cause(&m, "main", p, e, &SemanticsConfig::default()).unwrap();
    let subset = vec![("Switch1".to_string(), "on".to_string()), ("Switch2".to_string(), "on".to_string())];
    assert_eq!(verdict, CauseVerdict::Fails(Failure::NotMinimal(subset)));
}
