//! Quadratization pipeline: `E_k(s) -> E_k(q) -> E_2(q) -> E_2(s)`.
//!
//! The spin/Boolean maps are `s = 1 - 2q` and `q = (1 - s)/2`. Every
//! product `q_{r,i} q_{r,j}` of two unknown columns in the same row is
//! replaced by its ancilla and one AND penalty is added per ancilla.

use std::fmt;

use log::warn;
use thiserror::Error;

use crate::problems::{build_ek_s, layout_for, Layout, ProblemError, ProblemSpec};
use crate::spinpoly::{int, ratio, Domain, PolyError, Polynomial, VarId};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ReduceError {
    #[error(transparent)]
    Problem(#[from] ProblemError),
    #[error(transparent)]
    Poly(#[from] PolyError),
    #[error("penalty weight must be positive")]
    ZeroDelta,
    #[error("expected a {expected:?} polynomial, got {got:?}")]
    WrongDomain { expected: Domain, got: Domain },
    #[error("variable {0} is outside the main block of the layout")]
    NotMainVariable(VarId),
    #[error("degree {0} remains after quadratization; layout has too few ancillas")]
    ResidualDegree(usize),
    #[error("non-integral coefficient in the final spin energy")]
    NonIntegral,
}

/// Penalty weight of the AND gadget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Delta(u64);

impl Delta {
    pub fn new(value: u64) -> Result<Self, ReduceError> {
        if value == 0 {
            return Err(ReduceError::ZeroDelta);
        }
        Ok(Delta(value))
    }

    pub fn value(self) -> u64 {
        self.0
    }

    /// 4M^2 for full search, 5M^2 for orthogonal sets, 2M^2 for completion.
    pub fn default_for(spec: &ProblemSpec) -> Self {
        let m2 = (spec.order() * spec.order()).max(1) as u64;
        let k = match spec {
            ProblemSpec::HSearch { .. } => 4,
            ProblemSpec::OrthoSet { .. } => 5,
            ProblemSpec::Completion { .. } => 2,
        };
        Delta(k * m2)
    }

    /// Whether the weight exceeds the largest squared inner product M^2.
    pub fn dominates(self, order: usize) -> bool {
        self.0 > (order * order) as u64
    }
}

impl fmt::Display for Delta {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.0)
    }
}

/// All four stages of the construction for one instance.
#[derive(Clone, Debug)]
pub struct PipelineResult {
    pub ek_s: Polynomial,
    pub ek_q: Polynomial,
    pub e2_q: Polynomial,
    pub e2_s: Polynomial,
    pub layout: Layout,
    pub delta: Delta,
}

impl PipelineResult {
    /// Term counts of `E_k(s)`, `E_k(q)`, `E_2(q)`, `E_2(s)`.
    pub fn stage_counts(&self) -> [usize; 4] {
        [self.ek_s.len(), self.ek_q.len(), self.e2_q.len(), self.e2_s.len()]
    }
}

fn expect_domain(p: &Polynomial, expected: Domain) -> Result<(), ReduceError> {
    if p.domain() != expected {
        return Err(ReduceError::WrongDomain {
            expected,
            got: p.domain(),
        });
    }
    Ok(())
}

/// Spin to Boolean: `s = 1 - 2q` for every variable.
pub fn s_to_q(p: &Polynomial) -> Result<Polynomial, ReduceError> {
    expect_domain(p, Domain::Spin)?;
    Ok(p.map_affine_all(&int(1), &int(-2), Domain::Boolean))
}

/// Boolean to spin: `q = (1 - s)/2` for every variable.
pub fn q_to_s(p: &Polynomial) -> Result<Polynomial, ReduceError> {
    expect_domain(p, Domain::Boolean)?;
    Ok(p.map_affine_all(&ratio(1, 2), &ratio(-1, 2), Domain::Spin))
}

/// `delta * (3 qk + qi qj - 2 qi qk - 2 qj qk)`; zero iff `qk = qi AND qj`.
pub fn h_and(qi: VarId, qj: VarId, qk: VarId, delta: Delta) -> Result<Polynomial, ReduceError> {
    if qi == qj || qi == qk || qj == qk {
        return Err(PolyError::DuplicateVars(vec![qi, qj, qk]).into());
    }
    let d = delta.value() as i64;
    Ok(Polynomial::from_terms(
        Domain::Boolean,
        [
            (vec![qk.0], int(3 * d)),
            (vec![qi.0, qj.0], int(d)),
            (vec![qi.0, qk.0], int(-2 * d)),
            (vec![qj.0, qk.0], int(-2 * d)),
        ],
    ))
}

/// Replaces every same-row product of two unknown columns by its ancilla
/// and adds one AND penalty per ancilla.
pub fn boolean_reduce(p: &Polynomial, layout: &Layout, delta: Delta) -> Result<Polynomial, ReduceError> {
    expect_domain(p, Domain::Boolean)?;
    if let Some(v) = p
        .terms()
        .flat_map(|(m, _)| m.vars())
        .find(|&v| !layout.is_main(v))
    {
        return Err(ReduceError::NotMainVariable(v));
    }
    let triples = layout.ancilla_triples();
    let mut out = p.clone();
    for &(qi, qj, qk) in &triples {
        out = out.substitute_pair(qi, qj, qk)?;
    }
    for &(qi, qj, qk) in &triples {
        out = out.try_add(&h_and(qi, qj, qk, delta)?)?;
    }
    let degree = out.degree();
    if degree > 2 {
        return Err(ReduceError::ResidualDegree(degree));
    }
    Ok(out)
}

/// Runs the full construction for `spec` with penalty weight `delta`.
pub fn run_pipeline(spec: &ProblemSpec, delta: Delta) -> Result<PipelineResult, ReduceError> {
    let layout = layout_for(spec)?;
    if !delta.dominates(layout.order()) {
        warn!(
            "delta {} does not exceed M^2 = {}; ground states may not be preserved",
            delta,
            layout.order() * layout.order()
        );
    }
    let ek_s = build_ek_s(spec)?;
    let ek_q = s_to_q(&ek_s)?;
    let e2_q = boolean_reduce(&ek_q, &layout, delta)?;
    let e2_s = q_to_s(&e2_q)?;
    if !e2_s.is_integral() {
        return Err(ReduceError::NonIntegral);
    }
    Ok(PipelineResult {
        ek_s,
        ek_q,
        e2_q,
        e2_s,
        layout,
        delta,
    })
}
