//! Metropolis simulated annealing over an [`IsingModel`].
//!
//! Each read starts from a uniformly random spin vector drawn from its own
//! ChaCha stream `(seed, read_index)`, then performs `sweeps` passes of
//! single-spin Metropolis updates while the inverse temperature follows the
//! configured schedule. Reads are independent, so they run in parallel and
//! the merged result does not depend on thread scheduling.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ising::{IsingError, IsingModel};
use crate::spinpoly::{format_coeff, Coeff};

#[derive(Debug, Error)]
pub enum AnnealError {
    #[error("invalid anneal configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Ising(#[from] IsingError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Schedule {
    Geometric,
    Linear,
}

/// Inverse-temperature endpoints.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase", tag = "kind")]
pub enum BetaRange {
    /// Derived from the model: the hot end accepts the largest possible
    /// single-flip increase with probability 1/2, the cold end accepts the
    /// smallest one with probability 1/100.
    Auto,
    Fixed { min: f64, max: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnealConfig {
    pub sweeps: usize,
    pub reads: usize,
    pub beta: BetaRange,
    pub schedule: Schedule,
    pub seed: u64,
    /// Visit spins in a fresh random order each sweep instead of index order.
    #[serde(default)]
    pub random_order: bool,
}

impl Default for AnnealConfig {
    fn default() -> Self {
        AnnealConfig {
            sweeps: 1000,
            reads: 10,
            beta: BetaRange::Fixed { min: 0.1, max: 10.0 },
            schedule: Schedule::Geometric,
            seed: 0,
            random_order: false,
        }
    }
}

impl AnnealConfig {
    pub fn validate(&self) -> Result<(), AnnealError> {
        if self.sweeps == 0 {
            return Err(AnnealError::Config("sweeps must be positive".into()));
        }
        if self.reads == 0 {
            return Err(AnnealError::Config("reads must be positive".into()));
        }
        if let BetaRange::Fixed { min, max } = self.beta {
            if !(min > 0.0 && min < max && max.is_finite()) {
                return Err(AnnealError::Config(format!(
                    "beta range must satisfy 0 < min < max, got [{min}, {max}]"
                )));
            }
        }
        Ok(())
    }
}

/// One distinct final configuration.
#[derive(Clone, Debug, PartialEq)]
pub struct Sample {
    pub spins: Vec<i8>,
    /// Model energy without the offset.
    pub energy: f64,
    pub occurrences: usize,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ResultSet {
    /// Sorted by energy, ties by spin vector.
    pub samples: Vec<Sample>,
    pub config: AnnealConfig,
    pub model_digest: String,
}

impl ResultSet {
    pub fn total_reads(&self) -> usize {
        self.samples.iter().map(|s| s.occurrences).sum()
    }

    pub fn best(&self) -> Option<&Sample> {
        self.samples.first()
    }

    /// Reads whose energy is within `tol` of `target`.
    pub fn count_at(&self, target: f64, tol: f64) -> usize {
        self.samples
            .iter()
            .filter(|s| (s.energy - target).abs() <= tol)
            .map(|s| s.occurrences)
            .sum()
    }
}

/// Sparse f64 copy of the model used by the sweep loop.
struct Compiled {
    h: Vec<f64>,
    start: Vec<usize>,
    nbr: Vec<u32>,
    w: Vec<f64>,
}

impl Compiled {
    fn new(model: &IsingModel) -> Self {
        let n = model.num_vars();
        let mut adj: Vec<Vec<(u32, f64)>> = vec![Vec::new(); n];
        for ((a, b), c) in model.couplings() {
            let v = c.to_f64().unwrap_or(0.0);
            adj[a].push((b as u32, v));
            adj[b].push((a as u32, v));
        }
        let mut start = Vec::with_capacity(n + 1);
        let mut nbr = Vec::new();
        let mut w = Vec::new();
        start.push(0);
        for list in adj {
            for (j, v) in list {
                nbr.push(j);
                w.push(v);
            }
            start.push(nbr.len());
        }
        Compiled {
            h: model.h().iter().map(|c| c.to_f64().unwrap_or(0.0)).collect(),
            start,
            nbr,
            w,
        }
    }

    fn len(&self) -> usize {
        self.h.len()
    }

    fn neighbors(&self, i: usize) -> impl Iterator<Item = (usize, f64)> + '_ {
        let (a, b) = (self.start[i], self.start[i + 1]);
        self.nbr[a..b].iter().zip(&self.w[a..b]).map(|(&j, &v)| (j as usize, v))
    }

    /// `(hot, cold)` inverse temperatures derived from the coefficients.
    fn auto_beta(&self) -> (f64, f64) {
        let mut max_delta = 0.0f64;
        let mut min_delta = f64::INFINITY;
        for i in 0..self.len() {
            let mut sum = self.h[i].abs();
            let mut smallest = if self.h[i] != 0.0 { self.h[i].abs() } else { f64::INFINITY };
            for (_, v) in self.neighbors(i) {
                sum += v.abs();
                if v != 0.0 {
                    smallest = smallest.min(v.abs());
                }
            }
            max_delta = max_delta.max(2.0 * sum);
            min_delta = min_delta.min(2.0 * smallest);
        }
        if max_delta == 0.0 || !min_delta.is_finite() {
            return (0.1, 10.0);
        }
        let hot = std::f64::consts::LN_2 / max_delta;
        let cold = 100f64.ln() / min_delta;
        (hot, cold.max(hot * 1.000001))
    }
}

fn beta_schedule(min: f64, max: f64, sweeps: usize, schedule: Schedule) -> Vec<f64> {
    if sweeps == 1 {
        return vec![max];
    }
    let last = (sweeps - 1) as f64;
    (0..sweeps)
        .map(|k| {
            let t = k as f64 / last;
            match schedule {
                Schedule::Geometric => min * (max / min).powf(t),
                Schedule::Linear => min + (max - min) * t,
            }
        })
        .collect()
}

fn run_read(model: &Compiled, betas: &[f64], seed: u64, read: usize, random_order: bool) -> Vec<i8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(read as u64);
    let n = model.len();
    let mut spins: Vec<i8> = (0..n).map(|_| if rng.gen::<bool>() { 1 } else { -1 }).collect();
    let mut field: Vec<f64> = (0..n)
        .map(|i| model.h[i] + model.neighbors(i).map(|(j, v)| v * spins[j] as f64).sum::<f64>())
        .collect();
    let mut order: Vec<usize> = (0..n).collect();
    for &beta in betas {
        if random_order {
            for k in (1..n).rev() {
                order.swap(k, rng.gen_range(0..=k));
            }
        }
        for &i in &order {
            let s = spins[i] as f64;
            let delta = -2.0 * s * field[i];
            // exp(-40) is below the resolution of the uniform draw
            let accept = delta <= 0.0 || (beta * delta < 40.0 && rng.gen::<f64>() < (-beta * delta).exp());
            if accept {
                spins[i] = -spins[i];
                let change = -2.0 * s;
                for (j, v) in model.neighbors(i) {
                    field[j] += v * change;
                }
            }
        }
    }
    spins
}

/// Offset-excluded model energy.
pub fn energy(model: &IsingModel, spins: &[i8]) -> Result<f64, IsingError> {
    Ok(model.energy_exact(spins)?.to_f64().unwrap_or(f64::NAN))
}

/// Beta endpoints the sampler would use for `model` under `config`.
pub fn resolve_beta(model: &IsingModel, config: &AnnealConfig) -> (f64, f64) {
    match config.beta {
        BetaRange::Fixed { min, max } => (min, max),
        BetaRange::Auto => Compiled::new(model).auto_beta(),
    }
}

pub fn anneal(model: &IsingModel, config: &AnnealConfig) -> Result<ResultSet, AnnealError> {
    config.validate()?;
    let compiled = Compiled::new(model);
    let (bmin, bmax) = match config.beta {
        BetaRange::Fixed { min, max } => (min, max),
        BetaRange::Auto => compiled.auto_beta(),
    };
    let betas = beta_schedule(bmin, bmax, config.sweeps, config.schedule);
    let finals: Vec<Vec<i8>> = (0..config.reads)
        .into_par_iter()
        .map(|r| run_read(&compiled, &betas, config.seed, r, config.random_order))
        .collect();
    let mut counts: BTreeMap<Vec<i8>, usize> = BTreeMap::new();
    for s in finals {
        *counts.entry(s).or_default() += 1;
    }
    let mut samples = counts
        .into_iter()
        .map(|(spins, occurrences)| {
            Ok(Sample {
                energy: energy(model, &spins)?,
                spins,
                occurrences,
            })
        })
        .collect::<Result<Vec<_>, IsingError>>()?;
    samples.sort_by(|a, b| a.energy.total_cmp(&b.energy).then_with(|| a.spins.cmp(&b.spins)));
    Ok(ResultSet {
        samples,
        config: *config,
        model_digest: model.digest(),
    })
}

/// Energy levels and how many reads landed on each.
#[derive(Clone, Debug, PartialEq)]
pub struct Histogram {
    pub levels: Vec<(f64, usize)>,
}

pub fn histogram(r: &ResultSet) -> Histogram {
    let mut levels: Vec<(f64, usize)> = Vec::new();
    for s in &r.samples {
        match levels.last_mut() {
            Some((e, c)) if (s.energy - *e).abs() <= 1e-9 => *c += s.occurrences,
            _ => levels.push((s.energy, s.occurrences)),
        }
    }
    Histogram { levels }
}

impl Histogram {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("energy,count\n");
        for (e, c) in &self.levels {
            writeln!(out, "{e},{c}").unwrap();
        }
        out
    }
}

/// `spins,energy,occurrences` rows, one per distinct configuration.
pub fn occurrence_csv(r: &ResultSet) -> String {
    let mut out = String::from("spins,energy,occurrences\n");
    for s in &r.samples {
        writeln!(out, "{},{},{}", crate::signs_to_string(&s.spins), s.energy, s.occurrences).unwrap();
    }
    out
}

/// Serialized form of a [`ResultSet`].
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ResultsDocument {
    pub version: u32,
    /// Digest of the model that was annealed.
    pub model_digest: String,
    /// Digest of the unnormalized model it came from.
    pub source_digest: String,
    pub scale: String,
    pub offset: String,
    pub config: AnnealConfig,
    pub samples: Vec<SampleDocument>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SampleDocument {
    pub spins: String,
    pub energy: f64,
    /// Exact offset-excluded energy of the unnormalized model.
    pub raw_energy: String,
    pub occurrences: usize,
}

impl ResultsDocument {
    pub fn new(model: &IsingModel, r: &ResultSet) -> Result<Self, IsingError> {
        let samples = r
            .samples
            .iter()
            .map(|s| {
                let raw: Coeff = model.energy_exact(&s.spins)? * model.scale();
                Ok(SampleDocument {
                    spins: crate::signs_to_string(&s.spins),
                    energy: s.energy,
                    raw_energy: format_coeff(&raw),
                    occurrences: s.occurrences,
                })
            })
            .collect::<Result<Vec<_>, IsingError>>()?;
        Ok(ResultsDocument {
            version: crate::ising::DOCUMENT_VERSION,
            model_digest: r.model_digest.clone(),
            source_digest: model.source_digest(),
            scale: format_coeff(model.scale()),
            offset: format_coeff(model.offset()),
            config: r.config,
            samples,
        })
    }

    /// Spin vectors with their occurrence counts.
    pub fn spin_vectors(&self) -> Result<Vec<(Vec<i8>, usize)>, IsingError> {
        self.samples
            .iter()
            .map(|s| {
                crate::string_to_signs(&s.spins)
                    .map(|v| (v, s.occurrences))
                    .ok_or_else(|| IsingError::Malformed(format!("bad spin string {:?}", s.spins)))
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{layout_for, ProblemSpec};
    use crate::reduce::{run_pipeline, Delta};
    use crate::spinpoly::{int, Domain, Polynomial};

    fn order2_normalized() -> IsingModel {
        let r = run_pipeline(&ProblemSpec::HSearch { order: 2 }, Delta::new(16).unwrap()).unwrap();
        IsingModel::from_pipeline(&r).unwrap().normalize().unwrap()
    }

    #[test]
    fn single_variable_ground_state() {
        let layout = layout_for(&ProblemSpec::Completion {
            order: 2,
            known: crate::problems::KnownMatrix::parse("+ +").unwrap(),
        })
        .unwrap();
        let p = Polynomial::term(Domain::Spin, int(1), &[0]);
        let m = IsingModel::extract(&p, &layout).unwrap();
        let r = anneal(&m, &AnnealConfig { reads: 4, sweeps: 50, ..Default::default() }).unwrap();
        assert_eq!(r.total_reads(), 4);
        assert!(r.samples.iter().all(|s| s.spins[0] == -1 && s.energy == -1.0));
    }

    #[test]
    fn energy_of_all_up_order_two() {
        let m = order2_normalized();
        assert!((energy(&m, &[1; 6]).unwrap() + 2.0).abs() < 1e-12);
        assert!(energy(&m, &[1; 5]).is_err());
        assert!(energy(&m, &[1, 1, 1, 0, 1, 1]).is_err());
    }

    #[test]
    fn deterministic_given_seed() {
        let m = order2_normalized();
        let cfg = AnnealConfig { seed: 99, sweeps: 200, reads: 16, ..Default::default() };
        let a = anneal(&m, &cfg).unwrap();
        let b = anneal(&m, &cfg).unwrap();
        assert_eq!(a, b);
        let pool = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let c = pool.install(|| anneal(&m, &cfg).unwrap());
        assert_eq!(a, c);
    }

    #[test]
    fn samples_recompute_and_sum() {
        let m = order2_normalized();
        let cfg = AnnealConfig { seed: 3, random_order: true, ..Default::default() };
        let r = anneal(&m, &cfg).unwrap();
        assert_eq!(r.total_reads(), 10);
        for s in &r.samples {
            assert_eq!(s.energy, energy(&m, &s.spins).unwrap());
            // never below the true ground level -28/12
            assert!(s.energy >= -28.0 / 12.0 - 1e-12);
        }
        assert!(r.samples.windows(2).all(|w| w[0].energy <= w[1].energy));
    }

    #[test]
    fn config_validation() {
        let m = order2_normalized();
        for cfg in [
            AnnealConfig { reads: 0, ..Default::default() },
            AnnealConfig { sweeps: 0, ..Default::default() },
            AnnealConfig { beta: BetaRange::Fixed { min: 2.0, max: 1.0 }, ..Default::default() },
        ] {
            assert!(matches!(anneal(&m, &cfg), Err(AnnealError::Config(_))));
        }
    }

    #[test]
    fn auto_beta_range() {
        let m = order2_normalized();
        let (hot, cold) = resolve_beta(&m, &AnnealConfig { beta: BetaRange::Auto, ..Default::default() });
        // largest local field: |h_4| + sum |J_4j| = (12 + 8 + 4 + 8 + 4 + 8) / 12
        assert!((hot - std::f64::consts::LN_2 / (2.0 * 44.0 / 12.0)).abs() < 1e-12);
        // smallest nonzero coupling 2/12
        assert!((cold - 100f64.ln() / (2.0 * 2.0 / 12.0)).abs() < 1e-12);
        assert_eq!(resolve_beta(&m, &AnnealConfig::default()), (0.1, 10.0));
    }

    #[test]
    fn schedules() {
        let g = beta_schedule(0.1, 10.0, 3, Schedule::Geometric);
        assert!((g[1] - 1.0).abs() < 1e-12);
        let l = beta_schedule(0.0, 10.0, 3, Schedule::Linear);
        assert_eq!(l, vec![0.0, 5.0, 10.0]);
        assert_eq!(beta_schedule(0.1, 10.0, 1, Schedule::Geometric), vec![10.0]);
    }

    #[test]
    fn histogram_rows() {
        let m = order2_normalized();
        let r = anneal(&m, &AnnealConfig { seed: 5, ..Default::default() }).unwrap();
        let h = histogram(&r);
        assert_eq!(h.levels.iter().map(|l| l.1).sum::<usize>(), 10);
        assert!(h.to_csv().starts_with("energy,count\n"));
        let single = ResultSet {
            samples: vec![Sample { spins: vec![1], energy: -1.0, occurrences: 10 }],
            config: AnnealConfig::default(),
            model_digest: String::new(),
        };
        assert_eq!(histogram(&single).levels, vec![(-1.0, 10)]);
    }

    #[test]
    fn results_document_round_trip() {
        let m = order2_normalized();
        let r = anneal(&m, &AnnealConfig { seed: 1, ..Default::default() }).unwrap();
        let doc = ResultsDocument::new(&m, &r).unwrap();
        let text = serde_json::to_string(&doc).unwrap();
        let back: ResultsDocument = serde_json::from_str(&text).unwrap();
        assert_eq!(back, doc);
        let vecs = back.spin_vectors().unwrap();
        assert_eq!(vecs.iter().map(|v| v.1).sum::<usize>(), 10);
    }
}
