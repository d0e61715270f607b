//! Decoding samples into matrices, orthogonality checks, consistent ancilla
//! extension and exhaustive oracles for small instances.

use std::fmt;

use rayon::prelude::*;
use serde::Serialize;
use thiserror::Error;

use crate::problems::{Layout, ProblemKind};
use crate::reduce::PipelineResult;
use crate::spinpoly::{Domain, IntegerPolynomial, Polynomial};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum VerifyError {
    #[error("expected at least {expected} spins, got {got}")]
    Length { expected: usize, got: usize },
    #[error("spin value {0} is not +1 or -1")]
    SpinValue(i8),
    #[error("matrix is {rows}x{cols}, not square")]
    NotSquare { rows: usize, cols: usize },
    #[error("vectors have unequal lengths")]
    UnequalLengths,
    #[error("exhaustive search over {vars} variables exceeds the budget of {budget} states")]
    BudgetExceeded { vars: usize, budget: u64 },
    #[error("polynomial has non-integral coefficients")]
    NonIntegral,
    #[error("polynomial is not in the spin domain")]
    NotSpin,
    #[error("E_2 = {e2} but E_k = {ek} on the consistent extension of state {state}")]
    Disagreement { state: u64, ek: i128, e2: i128 },
}

/// `rows x columns` sign matrix stored column by column.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SpinMatrix {
    rows: usize,
    columns: Vec<Vec<i8>>,
}

impl SpinMatrix {
    pub fn from_columns(columns: Vec<Vec<i8>>) -> Result<Self, VerifyError> {
        let rows = columns.first().map_or(0, Vec::len);
        if columns.iter().any(|c| c.len() != rows) {
            return Err(VerifyError::UnequalLengths);
        }
        if let Some(&v) = columns.iter().flatten().find(|&&v| v != 1 && v != -1) {
            return Err(VerifyError::SpinValue(v));
        }
        Ok(SpinMatrix { rows, columns })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.columns.len()
    }

    pub fn columns(&self) -> &[Vec<i8>] {
        &self.columns
    }

    pub fn get(&self, row: usize, col: usize) -> i8 {
        self.columns[col][row]
    }

    /// `B^T B`.
    pub fn gram(&self) -> Vec<Vec<i64>> {
        let n = self.cols();
        (0..n)
            .map(|i| (0..n).map(|j| dot(&self.columns[i], &self.columns[j])).collect())
            .collect()
    }
}

impl fmt::Display for SpinMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in 0..self.rows {
            let row: Vec<&str> = (0..self.cols())
                .map(|c| if self.get(r, c) > 0 { "+" } else { "-" })
                .collect();
            writeln!(f, "{}", row.join(" "))?;
        }
        Ok(())
    }
}

fn dot(a: &[i8], b: &[i8]) -> i64 {
    a.iter().zip(b).map(|(&x, &y)| (x as i64) * (y as i64)).sum()
}

/// Unknown columns filled column-major from the main block, followed by
/// the layout's known columns. Ancilla values are ignored.
pub fn decode(layout: &Layout, spins: &[i8]) -> Result<SpinMatrix, VerifyError> {
    let main = layout.main_count();
    if spins.len() < main {
        return Err(VerifyError::Length {
            expected: main,
            got: spins.len(),
        });
    }
    let m = layout.order();
    let mut columns: Vec<Vec<i8>> = spins[..main].chunks(m.max(1)).map(<[i8]>::to_vec).collect();
    columns.truncate(layout.unknown_cols());
    columns.extend(layout.known_columns().iter().cloned());
    SpinMatrix::from_columns(columns)
}

pub fn is_hadamard(b: &SpinMatrix) -> Result<bool, VerifyError> {
    if b.rows() != b.cols() {
        return Err(VerifyError::NotSquare {
            rows: b.rows(),
            cols: b.cols(),
        });
    }
    Ok(mutual_orthogonality(b.columns())?.is_empty())
}

/// Index pairs `(i, j)`, `i < j`, whose inner product is nonzero.
pub fn mutual_orthogonality(vectors: &[Vec<i8>]) -> Result<Vec<(usize, usize)>, VerifyError> {
    if let Some(first) = vectors.first() {
        if vectors.iter().any(|v| v.len() != first.len()) {
            return Err(VerifyError::UnequalLengths);
        }
    }
    let mut bad = Vec::new();
    for i in 0..vectors.len() {
        for j in i + 1..vectors.len() {
            if dot(&vectors[i], &vectors[j]) != 0 {
                bad.push((i, j));
            }
        }
    }
    Ok(bad)
}

fn check_main(layout: &Layout, main: &[i8], domain: Domain) -> Result<(), VerifyError> {
    if main.len() < layout.main_count() {
        return Err(VerifyError::Length {
            expected: layout.main_count(),
            got: main.len(),
        });
    }
    if let Some(&v) = main[..layout.main_count()].iter().find(|&&v| !domain.contains(v)) {
        return Err(VerifyError::SpinValue(v));
    }
    Ok(())
}

/// Spin assignment over all variables in which every ancilla is the image of
/// the Boolean AND of its pair: `-1` exactly when both partners are `-1`.
/// Only the first `main_count` entries of `main` are read.
pub fn consistent_ancilla_extension(layout: &Layout, main: &[i8]) -> Result<Vec<i8>, VerifyError> {
    check_main(layout, main, Domain::Spin)?;
    let mut full = main[..layout.main_count()].to_vec();
    full.resize(layout.total_vars(), 1);
    for (qi, qj, qk) in layout.ancilla_triples() {
        full[qk.index()] = if full[qi.index()] == -1 && full[qj.index()] == -1 { -1 } else { 1 };
    }
    Ok(full)
}

/// Boolean variant: each ancilla is the product of its pair.
pub fn consistent_ancilla_extension_boolean(layout: &Layout, main: &[i8]) -> Result<Vec<i8>, VerifyError> {
    check_main(layout, main, Domain::Boolean)?;
    let mut full = main[..layout.main_count()].to_vec();
    full.resize(layout.total_vars(), 0);
    for (qi, qj, qk) in layout.ancilla_triples() {
        full[qk.index()] = full[qi.index()] * full[qj.index()];
    }
    Ok(full)
}

/// What a sample is checked against.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Check {
    Hadamard,
    Orthogonal,
    Completion,
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Check::Hadamard => "hadamard",
            Check::Orthogonal => "orthogonal set",
            Check::Completion => "completion",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub check: Check,
    pub ok: bool,
    /// Column pairs that are not orthogonal.
    pub violations: Vec<(usize, usize)>,
}

/// Decodes `spins` and checks the property the layout's family asks for.
/// For completions every column (known ones included) must be mutually
/// orthogonal, so `v` and `-v` are both accepted.
pub fn check_sample(layout: &Layout, spins: &[i8]) -> Result<Verdict, VerifyError> {
    let b = decode(layout, spins)?;
    let check = match layout.kind() {
        ProblemKind::HSearch => Check::Hadamard,
        ProblemKind::OrthoSet => Check::Orthogonal,
        ProblemKind::Completion => Check::Completion,
    };
    let violations = mutual_orthogonality(b.columns())?;
    Ok(Verdict {
        check,
        ok: violations.is_empty(),
        violations,
    })
}

/// Outcome of an exhaustive search over the main block.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct OracleReport {
    pub main_vars: usize,
    pub states: u64,
    pub min_energy: i128,
    pub minimizer_count: u64,
    /// Lowest-index minimizer (main block only).
    pub witness: Vec<i8>,
}

/// Spins for enumeration index `x`: bit `i` set means `s_i = -1`.
pub fn spins_from_index(x: u64, n: usize) -> Vec<i8> {
    (0..n).map(|i| if x >> i & 1 == 1 { -1 } else { 1 }).collect()
}

fn check_budget(vars: usize, budget: u64) -> Result<u64, VerifyError> {
    if vars >= 63 || (1u64 << vars) > budget {
        return Err(VerifyError::BudgetExceeded { vars, budget });
    }
    Ok(1u64 << vars)
}

fn integer_spin_form(p: &Polynomial) -> Result<IntegerPolynomial, VerifyError> {
    if p.domain() != Domain::Spin {
        return Err(VerifyError::NotSpin);
    }
    p.to_integer_form().ok_or(VerifyError::NonIntegral)
}

/// Chunk boundaries for parallel enumeration; fixed so results never
/// depend on the worker count.
fn chunks(states: u64) -> Vec<(u64, u64)> {
    let size = (states / 256).max(1024);
    (0..states.div_ceil(size))
        .map(|c| (c * size, ((c + 1) * size).min(states)))
        .collect()
}

#[derive(Clone, Copy)]
struct Partial {
    min: i128,
    count: u64,
    first: u64,
}

fn merge(a: Option<Partial>, b: Option<Partial>) -> Option<Partial> {
    match (a, b) {
        (None, x) | (x, None) => x,
        (Some(a), Some(b)) => Some(match a.min.cmp(&b.min) {
            std::cmp::Ordering::Less => a,
            std::cmp::Ordering::Greater => b,
            std::cmp::Ordering::Equal => Partial {
                min: a.min,
                count: a.count + b.count,
                first: a.first.min(b.first),
            },
        }),
    }
}

/// Minimizes `E_k(s)` over every main-block assignment and checks that
/// `E_2(s)` agrees on each consistent extension.
pub fn brute_force_ground(result: &PipelineResult, budget: u64) -> Result<OracleReport, VerifyError> {
    let layout = &result.layout;
    let n = layout.main_count();
    let states = check_budget(n, budget)?;
    let ek = integer_spin_form(&result.ek_s)?;
    let e2 = integer_spin_form(&result.e2_s)?;
    let triples: Vec<(usize, usize, usize)> = layout
        .ancilla_triples()
        .into_iter()
        .map(|(a, b, c)| (a.index(), b.index(), c.index()))
        .collect();
    let total = layout.total_vars();

    let partials: Vec<Result<Option<Partial>, VerifyError>> = chunks(states)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut best: Option<Partial> = None;
            let mut spins = vec![1i8; total];
            for x in lo..hi {
                for (i, s) in spins.iter_mut().enumerate().take(n) {
                    *s = if x >> i & 1 == 1 { -1 } else { 1 };
                }
                for &(i, j, k) in &triples {
                    spins[k] = if spins[i] == -1 && spins[j] == -1 { -1 } else { 1 };
                }
                let a = ek.evaluate(&spins[..n]);
                let b = e2.evaluate(&spins);
                if a != b {
                    return Err(VerifyError::Disagreement { state: x, ek: a, e2: b });
                }
                best = merge(best, Some(Partial { min: a, count: 1, first: x }));
            }
            Ok(best)
        })
        .collect();
    let mut best = None;
    for p in partials {
        best = merge(best, p?);
    }
    let best = best.expect("at least one state");
    Ok(OracleReport {
        main_vars: n,
        states,
        min_energy: best.min,
        minimizer_count: best.count,
        witness: spins_from_index(best.first, n),
    })
}

/// Minimum of an integral spin polynomial over all `2^n` assignments of
/// its variables, with every minimizer in enumeration order.
pub fn exhaustive_minimizers(p: &Polynomial, budget: u64) -> Result<(i128, Vec<Vec<i8>>), VerifyError> {
    let n = p.var_bound();
    let states = check_budget(n, budget)?;
    let ip = integer_spin_form(p)?;
    let parts: Vec<(i128, Vec<u64>)> = chunks(states)
        .into_par_iter()
        .map(|(lo, hi)| {
            let mut min = i128::MAX;
            let mut at = Vec::new();
            for x in lo..hi {
                let e = ip.evaluate(&spins_from_index(x, n));
                if e < min {
                    min = e;
                    at.clear();
                }
                if e == min {
                    at.push(x);
                }
            }
            (min, at)
        })
        .collect();
    let min = parts.iter().map(|p| p.0).min().unwrap_or(0);
    let minimizers = parts
        .into_iter()
        .filter(|p| p.0 == min)
        .flat_map(|p| p.1)
        .map(|x| spins_from_index(x, n))
        .collect();
    Ok((min, minimizers))
}
