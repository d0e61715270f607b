//! Ising coefficients extracted from a quadratic spin energy.
//!
//! Energy convention: `E(s) = offset + sum_i h_i s_i + sum_{i<j} J_ij s_i s_j`.
//! Coefficients stay exact; `scale` records the divisor applied by
//! [`IsingModel::normalize`], so `scale * E_normalized = E_raw`.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};
use thiserror::Error;

use crate::problems::{Layout, ProblemError, ProblemKind};
use crate::reduce::{s_to_q, PipelineResult};
use crate::spinpoly::{format_coeff, parse_coeff, Coeff, Domain, Polynomial};

pub const DOCUMENT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum IsingError {
    #[error("polynomial has degree {0}; only quadratic spin energies can be extracted")]
    DegreeTooHigh(usize),
    #[error("expected a spin-domain polynomial")]
    NotSpin,
    #[error("variable {var} is outside the layout's {num_vars} variables")]
    VariableOutOfRange { var: usize, num_vars: usize },
    #[error("model has no nonzero coefficient to normalize by")]
    AllZero,
    #[error("spin vector has length {got}, model has {expected} variables")]
    SpinLength { got: usize, expected: usize },
    #[error("spin value {0} is not -1 or +1")]
    SpinValue(i8),
    #[error("coupling key {0:?} is not an upper-triangular \"i,j\" pair")]
    BadCouplingKey(String),
    #[error("malformed model document: {0}")]
    Malformed(String),
    #[error(transparent)]
    Layout(#[from] ProblemError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IsingModel {
    offset: Coeff,
    h: Vec<Coeff>,
    j: BTreeMap<(usize, usize), Coeff>,
    scale: Coeff,
    layout: Layout,
}

impl IsingModel {
    /// Splits a quadratic spin polynomial into offset, biases and couplings.
    pub fn extract(p: &Polynomial, layout: &Layout) -> Result<Self, IsingError> {
        if p.domain() != Domain::Spin {
            return Err(IsingError::NotSpin);
        }
        let num_vars = layout.total_vars();
        let mut h = vec![Coeff::zero(); num_vars];
        let mut j = BTreeMap::new();
        let mut offset = Coeff::zero();
        for (m, c) in p.terms() {
            if let Some(&last) = m.indices().last() {
                if last as usize >= num_vars {
                    return Err(IsingError::VariableOutOfRange {
                        var: last as usize,
                        num_vars,
                    });
                }
            }
            match m.indices() {
                [] => offset = c.clone(),
                [a] => h[*a as usize] = c.clone(),
                [a, b] => {
                    j.insert((*a as usize, *b as usize), c.clone());
                }
                _ => return Err(IsingError::DegreeTooHigh(m.degree())),
            }
        }
        Ok(IsingModel {
            offset,
            h,
            j,
            scale: Coeff::one(),
            layout: layout.clone(),
        })
    }

    pub fn from_pipeline(result: &PipelineResult) -> Result<Self, IsingError> {
        Self::extract(&result.e2_s, &result.layout)
    }

    pub fn num_vars(&self) -> usize {
        self.h.len()
    }

    pub fn offset(&self) -> &Coeff {
        &self.offset
    }

    pub fn scale(&self) -> &Coeff {
        &self.scale
    }

    pub fn h(&self) -> &[Coeff] {
        &self.h
    }

    /// Nonzero couplings, keys `(i, j)` with `i < j`.
    pub fn couplings(&self) -> impl Iterator<Item = ((usize, usize), &Coeff)> {
        self.j.iter().map(|(&k, v)| (k, v))
    }

    pub fn coupling(&self, i: usize, j: usize) -> Coeff {
        let key = if i < j { (i, j) } else { (j, i) };
        self.j.get(&key).cloned().unwrap_or_else(Coeff::zero)
    }

    pub fn coupling_count(&self) -> usize {
        self.j.len()
    }

    pub fn layout(&self) -> &Layout {
        &self.layout
    }

    /// Largest magnitude among biases and couplings (offset excluded).
    pub fn max_abs_coefficient(&self) -> Coeff {
        self.h
            .iter()
            .chain(self.j.values())
            .map(|c| c.abs())
            .max()
            .unwrap_or_else(Coeff::zero)
    }

    /// Divides every coefficient, offset included, by the largest bias or
    /// coupling magnitude.
    pub fn normalize(&self) -> Result<Self, IsingError> {
        let k = self.max_abs_coefficient();
        if k.is_zero() {
            return Err(IsingError::AllZero);
        }
        Ok(IsingModel {
            offset: &self.offset / &k,
            h: self.h.iter().map(|c| c / &k).collect(),
            j: self.j.iter().map(|(&key, c)| (key, c / &k)).collect(),
            scale: &self.scale * &k,
            layout: self.layout.clone(),
        })
    }

    /// Negates `h` and `J`, giving the coefficients of the
    /// `-sum J s s - sum h s` form. Applying it twice is the identity.
    pub fn to_physics_convention(&self) -> Self {
        IsingModel {
            offset: self.offset.clone(),
            h: self.h.iter().map(|c| -c).collect(),
            j: self.j.iter().map(|(&key, c)| (key, -c)).collect(),
            scale: self.scale.clone(),
            layout: self.layout.clone(),
        }
    }

    fn check_spins(&self, spins: &[i8]) -> Result<(), IsingError> {
        if spins.len() != self.num_vars() {
            return Err(IsingError::SpinLength {
                got: spins.len(),
                expected: self.num_vars(),
            });
        }
        if let Some(&bad) = spins.iter().find(|&&s| s != 1 && s != -1) {
            return Err(IsingError::SpinValue(bad));
        }
        Ok(())
    }

    /// Exact energy without the offset.
    pub fn energy_exact(&self, spins: &[i8]) -> Result<Coeff, IsingError> {
        self.check_spins(spins)?;
        let mut e = Coeff::zero();
        for (c, &s) in self.h.iter().zip(spins) {
            if s > 0 {
                e += c;
            } else {
                e -= c;
            }
        }
        for (&(a, b), c) in &self.j {
            if spins[a] == spins[b] {
                e += c;
            } else {
                e -= c;
            }
        }
        Ok(e)
    }

    /// Exact energy including the offset.
    pub fn total_energy_exact(&self, spins: &[i8]) -> Result<Coeff, IsingError> {
        Ok(self.energy_exact(spins)? + &self.offset)
    }

    /// Spin polynomial with the same energy function.
    pub fn to_polynomial(&self) -> Polynomial {
        let mut terms = vec![(vec![], self.offset.clone())];
        terms.extend(
            self.h
                .iter()
                .enumerate()
                .map(|(i, c)| (vec![i as u32], c.clone())),
        );
        terms.extend(
            self.j
                .iter()
                .map(|(&(a, b), c)| (vec![a as u32, b as u32], c.clone())),
        );
        Polynomial::from_terms(Domain::Spin, terms)
    }

    /// Boolean (QUBO) form of the same energy, via `s = 1 - 2q`.
    pub fn to_qubo(&self) -> Polynomial {
        s_to_q(&self.to_polynomial()).expect("spin polynomial")
    }

    pub fn to_document(&self, stats: Option<BuildStats>) -> ModelDocument {
        ModelDocument {
            version: DOCUMENT_VERSION,
            domain: "spin".to_string(),
            num_vars: self.num_vars(),
            offset: format_coeff(&self.offset),
            scale: format_coeff(&self.scale),
            h: self.h.iter().map(format_coeff).collect(),
            j: self
                .j
                .iter()
                .map(|(&(a, b), c)| (format!("{a},{b}"), format_coeff(c)))
                .collect(),
            layout: LayoutDocument::from_layout(&self.layout),
            stats,
        }
    }

    pub fn from_document(doc: &ModelDocument) -> Result<Self, IsingError> {
        if doc.version != DOCUMENT_VERSION {
            return Err(IsingError::Malformed(format!("unsupported version {}", doc.version)));
        }
        if doc.domain != "spin" {
            return Err(IsingError::Malformed(format!("unsupported domain {:?}", doc.domain)));
        }
        let layout = doc.layout.to_layout()?;
        let n = doc.num_vars;
        if n != layout.total_vars() || doc.h.len() != n {
            return Err(IsingError::Malformed(format!(
                "num_vars {n}, {} biases, layout has {} variables",
                doc.h.len(),
                layout.total_vars()
            )));
        }
        let coeff = |s: &str| parse_coeff(s).ok_or_else(|| IsingError::Malformed(format!("bad coefficient {s:?}")));
        let h = doc.h.iter().map(|s| coeff(s)).collect::<Result<Vec<_>, _>>()?;
        let mut j = BTreeMap::new();
        for (key, value) in &doc.j {
            let (a, b) = key
                .split_once(',')
                .and_then(|(a, b)| Some((a.trim().parse::<usize>().ok()?, b.trim().parse::<usize>().ok()?)))
                .filter(|&(a, b)| a < b && b < n)
                .ok_or_else(|| IsingError::BadCouplingKey(key.clone()))?;
            let c = coeff(value)?;
            if !c.is_zero() {
                j.insert((a, b), c);
            }
        }
        let scale = coeff(&doc.scale)?;
        if !scale.is_positive() {
            return Err(IsingError::Malformed("scale must be positive".into()));
        }
        Ok(IsingModel {
            offset: coeff(&doc.offset)?,
            h,
            j,
            scale,
            layout,
        })
    }

    pub fn to_json(&self, stats: Option<BuildStats>) -> String {
        serde_json::to_string_pretty(&self.to_document(stats)).expect("model document serializes")
    }

    pub fn from_json(text: &str) -> Result<(Self, Option<BuildStats>), IsingError> {
        let doc: ModelDocument = serde_json::from_str(text)?;
        let model = Self::from_document(&doc)?;
        Ok((model, doc.stats))
    }

    /// SHA-256 of the canonical document (stats excluded).
    pub fn digest(&self) -> String {
        let text = serde_json::to_string(&self.to_document(None)).expect("model document serializes");
        format!("{:x}", Sha256::digest(text.as_bytes()))
    }

    /// Digest of the unnormalized model, shared by every rescaling of it.
    pub fn source_digest(&self) -> String {
        let raw = IsingModel {
            offset: &self.offset * &self.scale,
            h: self.h.iter().map(|c| c * &self.scale).collect(),
            j: self.j.iter().map(|(&k, c)| (k, c * &self.scale)).collect(),
            scale: Coeff::one(),
            layout: self.layout.clone(),
        };
        raw.digest()
    }

    /// Plain-text export: `c offset <v>`, then `h <i> <v>` for every
    /// variable and `J <i> <j> <v>` for every nonzero coupling.
    pub fn to_flat_text(&self) -> String {
        let f = |c: &Coeff| c.to_f64().unwrap_or(f64::NAN);
        let mut out = String::new();
        writeln!(out, "c offset {}", f(&self.offset)).unwrap();
        for (i, c) in self.h.iter().enumerate() {
            writeln!(out, "h {i} {}", f(c)).unwrap();
        }
        for (&(a, b), c) in &self.j {
            writeln!(out, "J {a} {b} {}", f(c)).unwrap();
        }
        out
    }
}

/// Per-stage numbers recorded alongside a built model.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct BuildStats {
    pub delta: u64,
    /// Term counts of E_k(s), E_k(q), E_2(q), E_2(s).
    pub stage_terms: [usize; 4],
    pub constant: String,
    pub max_abs_coefficient: String,
    pub main_vars: usize,
    pub ancilla_vars: usize,
    pub total_vars: usize,
}

impl BuildStats {
    pub fn from_pipeline(r: &PipelineResult) -> Self {
        let st = r.e2_s.stats();
        BuildStats {
            delta: r.delta.value(),
            stage_terms: r.stage_counts(),
            constant: format_coeff(&st.constant),
            max_abs_coefficient: format_coeff(&st.max_abs_coefficient),
            main_vars: r.layout.main_count(),
            ancilla_vars: r.layout.ancilla_count(),
            total_vars: r.layout.total_vars(),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct LayoutDocument {
    pub problem: ProblemKind,
    #[serde(rename = "M")]
    pub order: usize,
    /// Number of unknown columns.
    #[serde(rename = "N")]
    pub unknown: usize,
    /// Known columns as `+`/`-` strings.
    #[serde(default)]
    pub known_columns: Vec<String>,
}

impl LayoutDocument {
    pub fn from_layout(layout: &Layout) -> Self {
        LayoutDocument {
            problem: layout.kind(),
            order: layout.order(),
            unknown: layout.unknown_cols(),
            known_columns: layout.known_columns().iter().map(|c| crate::signs_to_string(c)).collect(),
        }
    }

    pub fn to_layout(&self) -> Result<Layout, IsingError> {
        let known = self
            .known_columns
            .iter()
            .map(|s| crate::string_to_signs(s).ok_or_else(|| IsingError::Malformed(format!("bad known column {s:?}"))))
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Layout::from_parts(self.problem, self.order, self.unknown, known)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelDocument {
    pub version: u32,
    pub domain: String,
    pub num_vars: usize,
    pub offset: String,
    pub scale: String,
    pub h: Vec<String>,
    #[serde(rename = "J")]
    pub j: BTreeMap<String, String>,
    pub layout: LayoutDocument,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub stats: Option<BuildStats>,
}
