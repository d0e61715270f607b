//! Shared helpers for the integration tests: a reader for the transcribed
//! LaTeX expressions in `tests/fixtures/` and a few problem constructors.
#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;

use hadamard_ising::spinpoly::int;
use hadamard_ising::{Domain, KnownMatrix, Polynomial, ProblemSpec};
use regex::Regex;

pub fn fixture_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

/// Parses the right-hand side of a transcribed expression such as
/// `E_2(s_i) = 28 + 6s_0 + ... + 8s_4s_5` or the `\hat{\sigma}^z_{n}` form.
/// Every monomial must appear once; anything unrecognized panics.
pub fn parse_expression(text: &str, domain: Domain) -> Polynomial {
    let rhs = &text[text.find('=').expect("expression has '='") + 1..];
    let mut s: String = rhs.chars().filter(|c| !c.is_whitespace() && *c != '$').collect();
    for pat in [r"\hat{\sigma}^z_", r"\hat{\sigma}_", "s_", "q_"] {
        s = s.replace(pat, "v_");
    }
    let commas = Regex::new(r"(\d),(\d{3})").unwrap();
    while commas.is_match(&s) {
        s = commas.replace_all(&s, "$1$2").into_owned();
    }
    let term = Regex::new(r"^([+-])?(\d+)?((?:v_(?:\{\d+\}|\d))*)").unwrap();
    let var = Regex::new(r"v_(?:\{(\d+)\}|(\d))").unwrap();
    let mut terms: BTreeMap<Vec<u32>, i64> = BTreeMap::new();
    let mut rest = s.as_str();
    while !rest.is_empty() {
        let caps = term.captures(rest).unwrap();
        let whole = caps.get(0).unwrap().as_str();
        assert!(!whole.is_empty(), "cannot parse near {:?}", &rest[..rest.len().min(40)]);
        let sign = if caps.get(1).map(|m| m.as_str()) == Some("-") { -1 } else { 1 };
        let vars: Vec<u32> = var
            .captures_iter(caps.get(3).unwrap().as_str())
            .map(|c| c.get(1).or(c.get(2)).unwrap().as_str().parse().unwrap())
            .collect();
        let coeff: i64 = match caps.get(2) {
            Some(m) => m.as_str().parse().unwrap(),
            None => {
                assert!(!vars.is_empty(), "bare sign near {rest:?}");
                1
            }
        };
        let mut key = vars.clone();
        key.sort_unstable();
        assert!(terms.insert(key, sign * coeff).is_none(), "monomial {vars:?} listed twice");
        rest = &rest[whole.len()..];
    }
    Polynomial::from_terms(domain, terms.into_iter().map(|(k, c)| (k, int(c))))
}

pub fn load_fixture(name: &str, domain: Domain) -> Polynomial {
    let text = std::fs::read_to_string(fixture_path(name)).unwrap();
    parse_expression(&text, domain)
}

/// Human-readable summary of how two polynomials differ.
pub fn diff(expected: &Polynomial, got: &Polynomial) -> String {
    let d = got.try_sub(expected).unwrap();
    let shown: Vec<String> = d.terms().take(10).map(|(m, c)| format!("{c}*{m:?}")).collect();
    format!("{} differing terms (got - expected), first: {}", d.len(), shown.join(", "))
}

pub fn signs(s: &str) -> Vec<i8> {
    hadamard_ising::string_to_signs(s).unwrap()
}

pub fn completion(order: usize, known: &[&str]) -> ProblemSpec {
    ProblemSpec::Completion {
        order,
        known: KnownMatrix::parse(&known.join("\n")).unwrap(),
    }
}

/// The eleven known columns of the order-12 completion instance.
pub const COMPLETION12_KNOWN: [&str; 11] = [
    "++++++++++++",
    "+-+-+++---+-",
    "+--+-+++---+",
    "++--+-+++---",
    "+-+--+-+++--",
    "+--+--+-+++-",
    "+---+--+-+++",
    "++---+--+-++",
    "++++---+--+-",
    "+++---+--+-+",
    "++-+++---+--",
];

/// Its missing column, up to global sign.
pub const COMPLETION12_SOLUTION: &str = "+-+++---+--+";

pub fn completion12() -> ProblemSpec {
    completion(12, &COMPLETION12_KNOWN)
}
