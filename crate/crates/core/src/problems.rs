//! Problem families, their variable layouts, and the k-body spin energy.
//!
//! Variables are laid out column-major: unknown column `c`, row `r` is
//! variable `c*M + r`. Ancillas follow the main block, one per row for every
//! pair of unknown columns, pairs in lexicographic order. Known columns are
//! logically placed after the unknown ones.

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::spinpoly::{int, Coeff, Domain, Polynomial, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ProblemError {
    #[error("matrix order {0} is not 1, 2 or a positive multiple of 4")]
    InvalidOrder(usize),
    #[error("column count {count} is out of range for order {order}")]
    InvalidCount { order: usize, count: usize },
    #[error("known column {index} has length {len}, expected {order}")]
    KnownLength { index: usize, len: usize, order: usize },
    #[error("known columns must hold only -1/+1 entries")]
    KnownValue,
    #[error("known-vector file, line {line}: {msg}")]
    KnownParse { line: usize, msg: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ProblemKind {
    HSearch,
    OrthoSet,
    Completion,
}

impl fmt::Display for ProblemKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ProblemKind::HSearch => "hsearch",
            ProblemKind::OrthoSet => "orthoset",
            ProblemKind::Completion => "completion",
        })
    }
}

/// Given +-1 column vectors of a partially known matrix.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KnownMatrix {
    columns: Vec<Vec<i8>>,
}

impl KnownMatrix {
    pub fn new(columns: Vec<Vec<i8>>) -> Result<Self, ProblemError> {
        if columns.iter().flatten().any(|&v| v != 1 && v != -1) {
            return Err(ProblemError::KnownValue);
        }
        Ok(KnownMatrix { columns })
    }

    /// Parses the known-vector text format: one column per line, entries
    /// `+`/`-` or `+1`/`-1` separated by whitespace. Blank lines and lines
    /// starting with `#` are skipped. A line of bare signs may also be
    /// written without separators (`+-+-`).
    pub fn parse(text: &str) -> Result<Self, ProblemError> {
        let mut columns = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let tokens: Vec<&str> = if line.split_whitespace().count() == 1
                && line.chars().all(|c| c == '+' || c == '-')
            {
                line.chars().map(|c| if c == '+' { "+" } else { "-" }).collect()
            } else {
                line.split_whitespace().collect()
            };
            let mut col = Vec::with_capacity(tokens.len());
            for tok in tokens {
                let v = match tok {
                    "+" | "+1" | "1" => 1,
                    "-" | "-1" => -1,
                    other => {
                        return Err(ProblemError::KnownParse {
                            line: n + 1,
                            msg: format!("unrecognized entry {other:?}"),
                        })
                    }
                };
                col.push(v);
            }
            columns.push(col);
        }
        Ok(KnownMatrix { columns })
    }

    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for col in &self.columns {
            let row: Vec<&str> = col.iter().map(|&v| if v > 0 { "+" } else { "-" }).collect();
            out.push_str(&row.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn columns(&self) -> &[Vec<i8>] {
        &self.columns
    }

    pub fn len(&self) -> usize {
        self.columns.len()
    }

    pub fn is_empty(&self) -> bool {
        self.columns.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ProblemSpec {
    /// Find a full Hadamard matrix of order M.
    HSearch { order: usize },
    /// Find `count` mutually orthogonal +-1 vectors of length M.
    OrthoSet { order: usize, count: usize },
    /// Find the missing columns of a Hadamard matrix given the known ones.
    Completion { order: usize, known: KnownMatrix },
}

fn check_order(order: usize) -> Result<(), ProblemError> {
    if order == 1 || order == 2 || (order > 0 && order.is_multiple_of(4)) {
        Ok(())
    } else {
        Err(ProblemError::InvalidOrder(order))
    }
}

impl ProblemSpec {
    pub fn kind(&self) -> ProblemKind {
        match self {
            ProblemSpec::HSearch { .. } => ProblemKind::HSearch,
            ProblemSpec::OrthoSet { .. } => ProblemKind::OrthoSet,
            ProblemSpec::Completion { .. } => ProblemKind::Completion,
        }
    }

    pub fn order(&self) -> usize {
        match self {
            ProblemSpec::HSearch { order }
            | ProblemSpec::OrthoSet { order, .. }
            | ProblemSpec::Completion { order, .. } => *order,
        }
    }

    pub fn unknown_cols(&self) -> usize {
        match self {
            ProblemSpec::HSearch { order } => *order,
            ProblemSpec::OrthoSet { count, .. } => *count,
            ProblemSpec::Completion { order, known } => order.saturating_sub(known.len()),
        }
    }

    pub fn known_columns(&self) -> &[Vec<i8>] {
        match self {
            ProblemSpec::Completion { known, .. } => known.columns(),
            _ => &[],
        }
    }

    pub fn validate(&self) -> Result<(), ProblemError> {
        let order = self.order();
        check_order(order)?;
        match self {
            ProblemSpec::HSearch { .. } => Ok(()),
            ProblemSpec::OrthoSet { count, .. } => {
                if *count == 0 || *count > order {
                    Err(ProblemError::InvalidCount { order, count: *count })
                } else {
                    Ok(())
                }
            }
            ProblemSpec::Completion { known, .. } => {
                if known.len() >= order {
                    return Err(ProblemError::InvalidCount {
                        order,
                        count: order.saturating_sub(known.len()),
                    });
                }
                for (index, col) in known.columns().iter().enumerate() {
                    if col.len() != order {
                        return Err(ProblemError::KnownLength {
                            index,
                            len: col.len(),
                            order,
                        });
                    }
                }
                Ok(())
            }
        }
    }
}

impl fmt::Display for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProblemSpec::HSearch { order } => write!(f, "hsearch(M={order})"),
            ProblemSpec::OrthoSet { order, count } => write!(f, "orthoset(M={order}, N={count})"),
            ProblemSpec::Completion { order, known } => {
                write!(f, "completion(M={order}, known={})", known.len())
            }
        }
    }
}

/// Meaning of every variable index for one problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Layout {
    kind: ProblemKind,
    order: usize,
    unknown_cols: usize,
    known: Vec<Vec<i8>>,
}

impl Layout {
    pub fn kind(&self) -> ProblemKind {
        self.kind
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn unknown_cols(&self) -> usize {
        self.unknown_cols
    }

    pub fn known_columns(&self) -> &[Vec<i8>] {
        &self.known
    }

    pub fn total_columns(&self) -> usize {
        self.unknown_cols + self.known.len()
    }

    pub fn main_count(&self) -> usize {
        self.unknown_cols * self.order
    }

    /// Unknown-column pairs `(i, j)`, `i < j`, in lexicographic order.
    pub fn pairs(&self) -> Vec<(usize, usize)> {
        let c = self.unknown_cols;
        (0..c).flat_map(|i| (i + 1..c).map(move |j| (i, j))).collect()
    }

    pub fn ancilla_count(&self) -> usize {
        let c = self.unknown_cols;
        self.order * c * c.saturating_sub(1) / 2
    }

    pub fn total_vars(&self) -> usize {
        self.main_count() + self.ancilla_count()
    }

    pub fn main_var(&self, row: usize, col: usize) -> VarId {
        debug_assert!(row < self.order && col < self.unknown_cols);
        VarId((col * self.order + row) as u32)
    }

    pub fn ancilla_var(&self, pair_index: usize, row: usize) -> VarId {
        debug_assert!(row < self.order);
        VarId((self.main_count() + pair_index * self.order + row) as u32)
    }

    /// `(q_{r,i}, q_{r,j}, ancilla)` for every ancilla, in ancilla order.
    pub fn ancilla_triples(&self) -> Vec<(VarId, VarId, VarId)> {
        let mut out = Vec::with_capacity(self.ancilla_count());
        for (p, (i, j)) in self.pairs().into_iter().enumerate() {
            for r in 0..self.order {
                out.push((self.main_var(r, i), self.main_var(r, j), self.ancilla_var(p, r)));
            }
        }
        out
    }

    pub fn is_main(&self, v: VarId) -> bool {
        v.index() < self.main_count()
    }

    /// Reconstructs a layout from its serialized description.
    pub fn from_parts(
        kind: ProblemKind,
        order: usize,
        unknown_cols: usize,
        known: Vec<Vec<i8>>,
    ) -> Result<Self, ProblemError> {
        let spec = match kind {
            ProblemKind::HSearch => {
                if unknown_cols != order || !known.is_empty() {
                    return Err(ProblemError::InvalidCount { order, count: unknown_cols });
                }
                ProblemSpec::HSearch { order }
            }
            ProblemKind::OrthoSet => {
                if !known.is_empty() {
                    return Err(ProblemError::InvalidCount { order, count: unknown_cols });
                }
                ProblemSpec::OrthoSet { order, count: unknown_cols }
            }
            ProblemKind::Completion => {
                if unknown_cols + known.len() != order {
                    return Err(ProblemError::InvalidCount { order, count: unknown_cols });
                }
                ProblemSpec::Completion {
                    order,
                    known: KnownMatrix::new(known)?,
                }
            }
        };
        layout_for(&spec)
    }
}

pub fn layout_for(spec: &ProblemSpec) -> Result<Layout, ProblemError> {
    spec.validate()?;
    Ok(Layout {
        kind: spec.kind(),
        order: spec.order(),
        unknown_cols: spec.unknown_cols(),
        known: spec.known_columns().to_vec(),
    })
}

/// One matrix column as polynomials: variables for unknown columns,
/// constants for known ones.
fn column_entries(layout: &Layout, col: usize) -> Vec<Polynomial> {
    let m = layout.order();
    if col < layout.unknown_cols() {
        (0..m)
            .map(|r| Polynomial::var(Domain::Spin, layout.main_var(r, col)))
            .collect()
    } else {
        layout.known_columns()[col - layout.unknown_cols()]
            .iter()
            .map(|&v| Polynomial::constant(Domain::Spin, int(v as i64)))
            .collect()
    }
}

/// Symbolic inner product of two columns.
fn inner_product(a: &[Polynomial], b: &[Polynomial]) -> Polynomial {
    a.iter().zip(b).fold(Polynomial::zero(Domain::Spin), |acc, (x, y)| {
        acc.try_add(&x.try_mul(y).expect("spin domain")).expect("spin domain")
    })
}

/// The k-body spin energy: sum of squared inner products over every pair of
/// columns (known columns included), with `s^2 = 1` applied.
pub fn build_ek_s(spec: &ProblemSpec) -> Result<Polynomial, ProblemError> {
    let layout = layout_for(spec)?;
    let cols: Vec<Vec<Polynomial>> = (0..layout.total_columns())
        .map(|c| column_entries(&layout, c))
        .collect();
    let mut energy = Polynomial::zero(Domain::Spin);
    for i in 0..cols.len() {
        for j in i + 1..cols.len() {
            let d = inner_product(&cols[i], &cols[j]);
            let d2 = d.try_mul(&d).expect("spin domain");
            energy = energy.try_add(&d2).expect("spin domain");
        }
    }
    Ok(energy)
}

/// Constant term of the k-body energy: M per column pair involving an
/// unknown column, plus the squared inner products of known-known pairs.
pub fn constant_of_ek(spec: &ProblemSpec) -> Result<Coeff, ProblemError> {
    spec.validate()?;
    let m = spec.order() as i64;
    let u = spec.unknown_cols();
    let known = spec.known_columns();
    let k = known.len();
    let unknown_pairs = (u * u.saturating_sub(1) / 2 + u * k) as i64;
    let mut total = int(m * unknown_pairs);
    for a in 0..k {
        for b in a + 1..k {
            let d: i64 = known[a]
                .iter()
                .zip(&known[b])
                .map(|(&x, &y)| (x * y) as i64)
                .sum();
            total += int(d * d);
        }
    }
    Ok(total)
}

/// Sylvester Hadamard matrix of order `2^n`, returned as columns.
pub fn sylvester(n: u32) -> Vec<Vec<i8>> {
    let mut h: Vec<Vec<i8>> = vec![vec![1]];
    for _ in 0..n {
        let size = h.len();
        let mut next = vec![vec![0i8; 2 * size]; 2 * size];
        for c in 0..size {
            for r in 0..size {
                let v = h[c][r];
                next[c][r] = v;
                next[c][r + size] = v;
                next[c + size][r] = v;
                next[c + size][r + size] = -v;
            }
        }
        h = next;
    }
    h
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn completion(order: usize, cols: &[&str]) -> ProblemSpec {
        let text = cols.join("\n");
        ProblemSpec::Completion {
            order,
            known: KnownMatrix::parse(&text).unwrap(),
        }
    }

    #[test]
    fn layout_sizes() {
        let l = layout_for(&ProblemSpec::HSearch { order: 4 }).unwrap();
        assert_eq!((l.main_count(), l.ancilla_count(), l.total_vars()), (16, 24, 40));

        let l = layout_for(&ProblemSpec::OrthoSet { order: 12, count: 3 }).unwrap();
        assert_eq!((l.main_count(), l.ancilla_count(), l.total_vars()), (36, 36, 72));

        let l = layout_for(&completion(2, &["+ +"])).unwrap();
        assert_eq!((l.main_count(), l.ancilla_count()), (2, 0));
    }

    #[test]
    fn hsearch4_ancilla_positions() {
        let l = layout_for(&ProblemSpec::HSearch { order: 4 }).unwrap();
        let t = l.ancilla_triples();
        assert_eq!(t[0], (VarId(0), VarId(4), VarId(16)));
        assert_eq!(t[4], (VarId(0), VarId(8), VarId(20)));
        // pair (2,3), row 3 is the last ancilla
        assert_eq!(t[23], (VarId(11), VarId(15), VarId(39)));
    }

    #[test]
    fn invalid_specs() {
        assert_eq!(
            layout_for(&ProblemSpec::HSearch { order: 6 }),
            Err(ProblemError::InvalidOrder(6))
        );
        assert!(layout_for(&ProblemSpec::OrthoSet { order: 4, count: 0 }).is_err());
        assert!(layout_for(&ProblemSpec::OrthoSet { order: 4, count: 5 }).is_err());
        assert!(layout_for(&completion(2, &["+ +", "+ -"])).is_err());
        assert!(matches!(
            layout_for(&completion(4, &["+ +"])),
            Err(ProblemError::KnownLength { .. })
        ));
    }

    #[test]
    fn known_file_formats() {
        let k = KnownMatrix::parse("# header\n+ - +1 -1\n\n++--\n").unwrap();
        assert_eq!(k.columns(), &[vec![1, -1, 1, -1], vec![1, 1, -1, -1]]);
        assert_eq!(KnownMatrix::parse(&k.to_text()).unwrap(), k);
        assert!(matches!(
            KnownMatrix::parse("+ x"),
            Err(ProblemError::KnownParse { line: 1, .. })
        ));
    }

    #[test]
    fn order_two_energies() {
        let ek = build_ek_s(&ProblemSpec::HSearch { order: 2 }).unwrap();
        assert_eq!(ek.to_string(), "2 + 2*s0*s1*s2*s3");
        let ek = build_ek_s(&completion(2, &["+ +"])).unwrap();
        assert_eq!(ek.to_string(), "2 + 2*s0*s1");
    }

    #[test]
    fn paper_term_counts() {
        let ek = build_ek_s(&ProblemSpec::HSearch { order: 4 }).unwrap();
        let st = ek.stats();
        assert_eq!((st.term_count, st.constant.clone()), (37, int(24)));
        assert!(ek.terms().filter(|(m, _)| m.degree() == 4).all(|(_, c)| *c == int(2)));

        assert_eq!(build_ek_s(&ProblemSpec::OrthoSet { order: 4, count: 3 }).unwrap().len(), 19);
        assert_eq!(build_ek_s(&completion(4, &["+ - + -", "+ + + +"])).unwrap().len(), 11);
    }

    #[test]
    fn constants() {
        assert_eq!(constant_of_ek(&ProblemSpec::HSearch { order: 4 }).unwrap(), int(24));
        assert_eq!(constant_of_ek(&ProblemSpec::OrthoSet { order: 4, count: 3 }).unwrap(), int(12));
        assert_eq!(constant_of_ek(&ProblemSpec::HSearch { order: 1 }).unwrap(), int(0));
        // non-orthogonal knowns contribute their squared inner product
        let spec = completion(4, &["+ + + +", "+ + + -"]);
        // 5 pairs touch an unknown column, the known pair has inner product 2
        assert_eq!(constant_of_ek(&spec).unwrap(), int(4 * 5 + 4));
        assert_eq!(build_ek_s(&spec).unwrap().constant_term(), int(24));
    }

    #[test]
    fn sylvester_is_orthogonal() {
        let h = sylvester(3);
        for a in 0..8 {
            for b in 0..8 {
                let d: i32 = h[a].iter().zip(&h[b]).map(|(&x, &y)| (x * y) as i32).sum();
                assert_eq!(d, if a == b { 8 } else { 0 });
            }
        }
    }

    fn gram_energy(cols: &[Vec<i8>]) -> i64 {
        let mut e = 0;
        for i in 0..cols.len() {
            for j in i + 1..cols.len() {
                let d: i64 = cols[i].iter().zip(&cols[j]).map(|(&a, &b)| (a * b) as i64).sum();
                e += d * d;
            }
        }
        e
    }

    proptest! {
        #[test]
        fn energy_matches_gram_oracle(
            which in 0usize..4,
            bits in prop::collection::vec(prop::bool::ANY, 16),
            kbits in prop::collection::vec(prop::bool::ANY, 8),
        ) {
            let spin = |b: bool| if b { -1i8 } else { 1 };
            let spec = match which {
                0 => ProblemSpec::HSearch { order: 2 },
                1 => ProblemSpec::HSearch { order: 4 },
                2 => ProblemSpec::OrthoSet { order: 4, count: 3 },
                _ => ProblemSpec::Completion {
                    order: 4,
                    known: KnownMatrix::new(vec![
                        kbits[..4].iter().map(|&b| spin(b)).collect(),
                        kbits[4..].iter().map(|&b| spin(b)).collect(),
                    ]).unwrap(),
                },
            };
            let layout = layout_for(&spec).unwrap();
            let assign: Vec<i8> = bits[..layout.main_count()].iter().map(|&b| spin(b)).collect();
            let mut cols: Vec<Vec<i8>> = (0..layout.unknown_cols())
                .map(|c| (0..layout.order()).map(|r| assign[layout.main_var(r, c).index()]).collect())
                .collect();
            cols.extend(layout.known_columns().iter().cloned());
            let ek = build_ek_s(&spec).unwrap();
            prop_assert!(ek.degree() <= 4);
            let v = ek.evaluate(&assign).unwrap();
            prop_assert_eq!(v, int(gram_energy(&cols)));
        }
    }
}
