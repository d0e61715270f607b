//! Energy functions for Hadamard-matrix search problems.
//!
//! The crate builds the k-body spin energy of a problem instance
//! ([`problems`]), reduces it to a quadratic form with ancilla variables
//! ([`reduce`], on top of the exact polynomial algebra in [`spinpoly`]),
//! extracts Ising coefficients ([`ising`]), samples them with simulated
//! annealing ([`annealer`]) and checks the decoded matrices ([`verify`]).
//!
//! ```
//! use hadamard_ising::{run_pipeline, Delta, IsingModel, ProblemSpec};
//!
//! let r = run_pipeline(&ProblemSpec::HSearch { order: 2 }, Delta::new(16).unwrap()).unwrap();
//! assert_eq!(r.stage_counts(), [2, 16, 22, 22]);
//! let m = IsingModel::from_pipeline(&r).unwrap().normalize().unwrap();
//! assert_eq!(m.num_vars(), 6);
//! ```

pub mod annealer;
pub mod cli;
pub mod ising;
pub mod problems;
pub mod reduce;
pub mod spinpoly;
pub mod verify;

pub use annealer::{anneal, AnnealConfig, BetaRange, ResultSet, Sample, Schedule};
pub use ising::{BuildStats, IsingError, IsingModel};
pub use problems::{layout_for, KnownMatrix, Layout, ProblemKind, ProblemSpec};
pub use reduce::{run_pipeline, Delta, PipelineResult};
pub use spinpoly::{Coeff, Domain, Polynomial, VarId};
pub use verify::{brute_force_ground, check_sample, decode, SpinMatrix};

/// Renders spins as a `+`/`-` string.
pub fn signs_to_string(spins: &[i8]) -> String {
    spins.iter().map(|&s| if s > 0 { '+' } else { '-' }).collect()
}

/// Inverse of [`signs_to_string`]; `None` on any other character.
pub fn string_to_signs(s: &str) -> Option<Vec<i8>> {
    s.chars()
        .map(|c| match c {
            '+' => Some(1),
            '-' => Some(-1),
            _ => None,
        })
        .collect()
}
