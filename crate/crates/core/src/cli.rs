//! Command-line driver. Exit codes: 0 success, 1 usage or I/O error,
//! 2 verification failure.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use num_traits::ToPrimitive;
use thiserror::Error;

use crate::annealer::{self, AnnealConfig, BetaRange, ResultsDocument, Schedule};
use crate::ising::{BuildStats, IsingModel};
use crate::problems::{KnownMatrix, ProblemSpec};
use crate::reduce::{run_pipeline, Delta, PipelineResult};
use crate::spinpoly::{format_coeff, Polynomial};
use crate::verify;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
    #[error("verification failed: {0}")]
    Verification(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Io { .. } => 1,
            CliError::Verification(_) => 2,
        }
    }
}

fn usage(e: impl std::fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

#[derive(Parser, Debug)]
#[command(name = "hadamard-ising", version, about = "Build, anneal and verify Hadamard-search Ising models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Build the quadratic model of a problem instance.
    Build {
        #[command(flatten)]
        problem: ProblemArgs,
        #[arg(long)]
        out: PathBuf,
    },
    /// Sample a model with simulated annealing.
    Anneal(AnnealArgs),
    /// Check annealing results against the model's problem.
    Verify {
        #[arg(long)]
        model: PathBuf,
        #[arg(long)]
        results: PathBuf,
    },
    /// Exhaustively solve a small instance over its main variables.
    Oracle {
        #[command(flatten)]
        problem: ProblemArgs,
        /// Maximum number of states to enumerate.
        #[arg(long, default_value_t = 1 << 24)]
        budget: u64,
    },
    /// Write a model in another format.
    Export {
        #[arg(long)]
        model: PathBuf,
        #[arg(long, value_enum, default_value_t = ExportFormat::Flat)]
        format: ExportFormat,
        /// Divide by the largest coefficient magnitude first.
        #[arg(long)]
        normalize: bool,
        /// Output file; stdout when absent.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Walk through the order-2 construction and check it against known values.
    Demo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Family {
    Hsearch,
    Orthoset,
    Completion,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum ExportFormat {
    /// `c`/`h`/`J` lines.
    Flat,
    Json,
    /// Boolean-domain polynomial, one term per line.
    Qubo,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ScheduleArg {
    Geometric,
    Linear,
}

#[derive(Args, Debug)]
struct ProblemArgs {
    #[arg(long, value_enum)]
    problem: Family,
    #[arg(long)]
    order: usize,
    /// Number of vectors (orthoset).
    #[arg(long)]
    count: Option<usize>,
    /// Known columns, one per line (completion).
    #[arg(long)]
    known: Option<PathBuf>,
    /// Penalty weight; defaults to 4M^2, 5M^2 or 2M^2 by family.
    #[arg(long)]
    delta: Option<u64>,
}

#[derive(Args, Debug)]
struct AnnealArgs {
    #[arg(long)]
    model: PathBuf,
    #[arg(long, default_value_t = 1000)]
    sweeps: usize,
    #[arg(long, default_value_t = 10)]
    reads: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Normalize coefficients before annealing (the default).
    #[arg(long, conflicts_with = "raw")]
    normalize: bool,
    /// Anneal the unnormalized coefficients.
    #[arg(long)]
    raw: bool,
    /// Initial inverse temperature (default 0.1).
    #[arg(long, requires = "beta_max")]
    beta_min: Option<f64>,
    /// Final inverse temperature (default 10).
    #[arg(long, requires = "beta_min")]
    beta_max: Option<f64>,
    /// Derive the inverse-temperature range from the model's coefficients.
    #[arg(long, conflicts_with_all = ["beta_min", "beta_max"])]
    auto_beta: bool,
    #[arg(long, value_enum, default_value_t = ScheduleArg::Geometric)]
    schedule: ScheduleArg,
    /// Visit spins in random order each sweep.
    #[arg(long)]
    random_order: bool,
    /// Results document.
    #[arg(long)]
    out: PathBuf,
    /// Histogram CSV; defaults to the results path with a `.csv` extension.
    #[arg(long)]
    csv: Option<PathBuf>,
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn write(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|source| CliError::Io {
        path: path.to_owned(),
        source,
    })
}

fn out_err(e: std::io::Error) -> CliError {
    CliError::Io {
        path: PathBuf::from("<stdout>"),
        source: e,
    }
}

impl ProblemArgs {
    fn spec(&self) -> Result<ProblemSpec, CliError> {
        let order = self.order;
        let spec = match self.problem {
            Family::Hsearch => ProblemSpec::HSearch { order },
            Family::Orthoset => ProblemSpec::OrthoSet {
                order,
                count: self.count.ok_or_else(|| usage("--count is required for orthoset"))?,
            },
            Family::Completion => {
                let path = self.known.as_ref().ok_or_else(|| usage("--known is required for completion"))?;
                ProblemSpec::Completion {
                    order,
                    known: KnownMatrix::parse(&read(path)?).map_err(usage)?,
                }
            }
        };
        if self.count.is_some() && !matches!(self.problem, Family::Orthoset) {
            return Err(usage("--count only applies to orthoset"));
        }
        if self.known.is_some() && !matches!(self.problem, Family::Completion) {
            return Err(usage("--known only applies to completion"));
        }
        spec.validate().map_err(usage)?;
        Ok(spec)
    }

    fn pipeline(&self) -> Result<PipelineResult, CliError> {
        let spec = self.spec()?;
        let delta = match self.delta {
            Some(d) => Delta::new(d).map_err(usage)?,
            None => Delta::default_for(&spec),
        };
        run_pipeline(&spec, delta).map_err(usage)
    }
}

fn load_model(path: &Path) -> Result<IsingModel, CliError> {
    IsingModel::from_json(&read(path)?)
        .map(|(m, _)| m)
        .map_err(|e| usage(format!("{}: {e}", path.display())))
}

fn f2(c: &crate::Coeff) -> String {
    format!("{:.2}", c.to_f64().unwrap_or(f64::NAN))
}

/// Parses `args` (program name first) and runs the command, writing
/// human-readable output to `out`.
pub fn run<I, T>(args: I, out: &mut dyn Write) -> Result<(), CliError>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            write!(out, "{e}").map_err(out_err)?;
            return Ok(());
        }
        Err(e) => return Err(CliError::Usage(e.to_string())),
    };
    match cli.command {
        Command::Build { problem, out: path } => build(&problem, &path, out),
        Command::Anneal(a) => anneal(&a, out),
        Command::Verify { model, results } => verify_cmd(&model, &results, out),
        Command::Oracle { problem, budget } => oracle(&problem, budget, out),
        Command::Export {
            model,
            format,
            normalize,
            out: path,
        } => export(&model, format, normalize, path.as_deref(), out),
        Command::Demo => demo(out),
    }
}

/// Entry point for the binary: runs and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let mut lock = stdout.lock();
    match run(args, &mut lock) {
        Ok(()) => 0,
        Err(e) => {
            let _ = lock.flush();
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

fn write_stats(out: &mut dyn Write, s: &BuildStats) -> std::io::Result<()> {
    let [a, b, c, d] = s.stage_terms;
    writeln!(out, "delta            {}", s.delta)?;
    writeln!(out, "terms            E_k(s)={a} E_k(q)={b} E_2(q)={c} E_2(s)={d}")?;
    writeln!(out, "constant         {}", s.constant)?;
    writeln!(out, "max |coefficient| {}", s.max_abs_coefficient)?;
    writeln!(
        out,
        "variables        {} ({} main + {} ancilla)",
        s.total_vars, s.main_vars, s.ancilla_vars
    )
}

fn build(problem: &ProblemArgs, path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let r = problem.pipeline()?;
    let model = IsingModel::from_pipeline(&r).map_err(usage)?;
    let stats = BuildStats::from_pipeline(&r);
    write(path, &model.to_json(Some(stats.clone())))?;
    writeln!(out, "model            {}", path.display()).map_err(out_err)?;
    write_stats(out, &stats).map_err(out_err)
}

fn anneal(a: &AnnealArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let source = load_model(&a.model)?;
    let model = if a.raw { source } else { source.normalize().map_err(usage)? };
    let beta = match (a.beta_min, a.beta_max) {
        _ if a.auto_beta => BetaRange::Auto,
        (Some(min), Some(max)) => BetaRange::Fixed { min, max },
        _ => AnnealConfig::default().beta,
    };
    let config = AnnealConfig {
        sweeps: a.sweeps,
        reads: a.reads,
        beta,
        schedule: match a.schedule {
            ScheduleArg::Geometric => Schedule::Geometric,
            ScheduleArg::Linear => Schedule::Linear,
        },
        seed: a.seed,
        random_order: a.random_order,
    };
    let results = annealer::anneal(&model, &config).map_err(usage)?;
    let doc = ResultsDocument::new(&model, &results).map_err(usage)?;
    write(&a.out, &serde_json::to_string_pretty(&doc).expect("results serialize"))?;
    let csv_path = a.csv.clone().unwrap_or_else(|| a.out.with_extension("csv"));
    write(&csv_path, &annealer::histogram(&results).to_csv())?;
    write(&csv_path.with_extension("samples.csv"), &annealer::occurrence_csv(&results))?;

    (|| -> std::io::Result<()> {
        writeln!(out, "scale {}  offset {}", format_coeff(model.scale()), f2(model.offset()))?;
        writeln!(out, "{:>5}  {:>9}  spins", "count", "energy")?;
        for s in &results.samples {
            writeln!(out, "{:>5}  {:>9.2}  {}", s.occurrences, s.energy, crate::signs_to_string(&s.spins))?;
        }
        if let Some(best) = results.best() {
            writeln!(out, "best energy {:.2}", best.energy)?;
        }
        Ok(())
    })()
    .map_err(out_err)
}

fn verify_cmd(model_path: &Path, results_path: &Path, out: &mut dyn Write) -> Result<(), CliError> {
    let model = load_model(model_path)?;
    let doc: ResultsDocument = serde_json::from_str(&read(results_path)?)
        .map_err(|e| usage(format!("{}: {e}", results_path.display())))?;
    if doc.source_digest != model.source_digest() {
        return Err(CliError::Verification(format!(
            "results were produced for a different model (digest {} vs {})",
            doc.source_digest,
            model.source_digest()
        )));
    }
    let samples = doc.spin_vectors().map_err(usage)?;
    let mut passed = 0;
    let mut no = 0;
    for ((spins, count), sd) in samples.iter().zip(&doc.samples) {
        let verdict = verify::check_sample(model.layout(), spins).map_err(usage)?;
        if verdict.ok {
            passed += count;
        }
        for _ in 0..*count {
            no += 1;
            writeln!(
                out,
                "{no:>3}  {}  {:>9.2}  {}",
                sd.spins,
                sd.energy,
                if verdict.ok { "Y" } else { "N" }
            )
            .map_err(out_err)?;
        }
    }
    let check = verify::check_sample(model.layout(), &vec![1; model.layout().main_count()])
        .map(|v| v.check.to_string())
        .unwrap_or_default();
    writeln!(out, "{passed}/{no} samples pass the {check} check").map_err(out_err)?;
    if passed == 0 {
        return Err(CliError::Verification("no sample passed".into()));
    }
    Ok(())
}

fn oracle(problem: &ProblemArgs, budget: u64, out: &mut dyn Write) -> Result<(), CliError> {
    let r = problem.pipeline()?;
    let rep = verify::brute_force_ground(&r, budget).map_err(|e| match e {
        verify::VerifyError::Disagreement { .. } => CliError::Verification(e.to_string()),
        other => usage(other),
    })?;
    let matrix = verify::decode(&r.layout, &rep.witness).map_err(usage)?;
    (|| -> std::io::Result<()> {
        writeln!(out, "states           {}", rep.states)?;
        writeln!(out, "min E_k          {}", rep.min_energy)?;
        writeln!(out, "minimizers       {}", rep.minimizer_count)?;
        writeln!(out, "witness          {}", crate::signs_to_string(&rep.witness))?;
        write!(out, "{matrix}")?;
        writeln!(out, "E_2 agrees with E_k on every consistent extension")
    })()
    .map_err(out_err)
}

fn export(
    path: &Path,
    format: ExportFormat,
    normalize: bool,
    dest: Option<&Path>,
    out: &mut dyn Write,
) -> Result<(), CliError> {
    let mut model = load_model(path)?;
    if normalize {
        model = model.normalize().map_err(usage)?;
    }
    let text = match format {
        ExportFormat::Flat => model.to_flat_text(),
        ExportFormat::Json => model.to_json(None),
        ExportFormat::Qubo => qubo_text(&model.to_qubo()),
    };
    match dest {
        Some(p) => write(p, &text),
        None => out.write_all(text.as_bytes()).map_err(out_err),
    }
}

/// `c <v>`, `q <i> <v>` and `Q <i> <j> <v>` lines with exact coefficients.
fn qubo_text(p: &Polynomial) -> String {
    let mut s = String::new();
    for (m, c) in p.terms() {
        let idx = m.indices();
        let line = match idx {
            [] => format!("c {}", format_coeff(c)),
            [i] => format!("q {i} {}", format_coeff(c)),
            [i, j] => format!("Q {i} {j} {}", format_coeff(c)),
            _ => unreachable!("model polynomials are quadratic"),
        };
        s.push_str(&line);
        s.push('\n');
    }
    s
}

/// The order-2 stages as printed by [`Polynomial`]'s `Display`.
pub const DEMO_GOLDENS: [(&str, &str); 4] = [
    ("E_k(s)", "2 + 2*s0*s1*s2*s3"),
    (
        "E_k(q)",
        "4 - 4*q0 - 4*q1 - 4*q2 - 4*q3 + 8*q0*q1 + 8*q0*q2 + 8*q0*q3 + 8*q1*q2 + 8*q1*q3 + 8*q2*q3 \
         - 16*q0*q1*q2 - 16*q0*q1*q3 - 16*q0*q2*q3 - 16*q1*q2*q3 + 32*q0*q1*q2*q3",
    ),
    (
        "E_2(q)",
        "4 - 4*q0 - 4*q1 - 4*q2 - 4*q3 + 56*q4 + 56*q5 + 8*q0*q1 + 16*q0*q2 + 8*q0*q3 - 32*q0*q4 \
         - 16*q0*q5 + 8*q1*q2 + 16*q1*q3 - 16*q1*q4 - 32*q1*q5 + 8*q2*q3 - 32*q2*q4 - 16*q2*q5 \
         - 16*q3*q4 - 32*q3*q5 + 32*q4*q5",
    ),
    (
        "E_2(s)",
        "28 + 6*s0 + 6*s1 + 6*s2 + 6*s3 - 12*s4 - 12*s5 + 2*s0*s1 + 4*s0*s2 + 2*s0*s3 - 8*s0*s4 \
         - 4*s0*s5 + 2*s1*s2 + 4*s1*s3 - 4*s1*s4 - 8*s1*s5 + 2*s2*s3 - 8*s2*s4 - 4*s2*s5 - 4*s3*s4 \
         - 8*s3*s5 + 8*s4*s5",
    ),
];

fn demo(out: &mut dyn Write) -> Result<(), CliError> {
    let r = run_pipeline(&ProblemSpec::HSearch { order: 2 }, Delta::new(16).expect("nonzero")).map_err(usage)?;
    let stages = [&r.ek_s, &r.ek_q, &r.e2_q, &r.e2_s];
    let mut mismatches = 0;
    for ((name, golden), p) in DEMO_GOLDENS.iter().zip(stages) {
        let shown = p.to_string();
        let golden = golden.split_whitespace().collect::<Vec<_>>().join(" ");
        let ok = shown == golden;
        if !ok {
            mismatches += 1;
        }
        (|| -> std::io::Result<()> {
            writeln!(out, "{name} ({} terms) {}", p.len(), if ok { "ok" } else { "MISMATCH" })?;
            writeln!(out, "  {shown}")?;
            if !ok {
                writeln!(out, "  expected {golden}")?;
            }
            Ok(())
        })()
        .map_err(out_err)?;
    }
    let model = IsingModel::from_pipeline(&r).map_err(usage)?.normalize().map_err(usage)?;
    writeln!(
        out,
        "normalized by {}: ground energy {}",
        format_coeff(model.scale()),
        f2(&-model.offset().clone())
    )
    .map_err(out_err)?;
    if mismatches > 0 {
        return Err(CliError::Verification(format!("{mismatches} stage(s) differ from the reference")));
    }
    Ok(())
}
