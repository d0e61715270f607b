//! C ABI over `hadamard-ising`.
//!
//! Models and result sets are opaque heap handles created by `hi_*`
//! constructors and released with the matching `*_free` function. Every
//! fallible call returns a [`HiStatus`]; on failure a description is
//! available from [`hi_last_error_message`] on the same thread. Panics never
//! cross the boundary: they are reported as `HI_STATUS_PANIC`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use hadamard_ising::annealer::{self, AnnealConfig, BetaRange, ResultSet, Schedule};
use hadamard_ising::{run_pipeline, verify, Delta, IsingModel, KnownMatrix, ProblemSpec};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HiStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    ParseError = 3,
    BufferTooSmall = 4,
    Panic = 99,
}

/// Problem family selector for [`hi_model_build`].
pub const HI_PROBLEM_HSEARCH: u32 = 0;
pub const HI_PROBLEM_ORTHOSET: u32 = 1;
pub const HI_PROBLEM_COMPLETION: u32 = 2;

pub const HI_SCHEDULE_GEOMETRIC: u32 = 0;
pub const HI_SCHEDULE_LINEAR: u32 = 1;

/// Opaque Ising model.
pub struct HiModel(IsingModel);

/// Opaque annealing result set.
pub struct HiResults(ResultSet);

/// Sampler settings. `beta_min == beta_max == 0` selects the range derived
/// from the model's coefficients.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct HiAnnealConfig {
    pub sweeps: u64,
    pub reads: u64,
    pub beta_min: f64,
    pub beta_max: f64,
    /// `HI_SCHEDULE_GEOMETRIC` or `HI_SCHEDULE_LINEAR`.
    pub schedule: u32,
    pub seed: u64,
    /// Nonzero visits spins in random order each sweep.
    pub random_order: u8,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

type Failure = (HiStatus, String);

fn invalid(e: impl std::fmt::Display) -> Failure {
    (HiStatus::InvalidArgument, e.to_string())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> HiStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => HiStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            HiStatus::Panic
        }
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), Failure> {
    if p.is_null() {
        Err((HiStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

/// # Safety
/// `p` must be null-checked and point to `len` readable values.
unsafe fn slice<'a, T>(p: *const T, len: usize) -> &'a [T] {
    if len == 0 {
        &[]
    } else {
        std::slice::from_raw_parts(p, len)
    }
}

/// Message describing the most recent failure on this thread. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn hi_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Default sampler settings: 1000 sweeps, 10 reads, geometric beta 0.1..10.
#[no_mangle]
pub extern "C" fn hi_anneal_config_default() -> HiAnnealConfig {
    let d = AnnealConfig::default();
    let (beta_min, beta_max) = match d.beta {
        BetaRange::Fixed { min, max } => (min, max),
        BetaRange::Auto => (0.0, 0.0),
    };
    HiAnnealConfig {
        sweeps: d.sweeps as u64,
        reads: d.reads as u64,
        beta_min,
        beta_max,
        schedule: HI_SCHEDULE_GEOMETRIC,
        seed: d.seed,
        random_order: 0,
    }
}

/// Builds the unnormalized quadratic model of a problem instance.
///
/// `count` is the number of vectors for orthogonal sets and is ignored
/// otherwise. For completions `known` holds `known_len` entries (+1/-1),
/// the known columns one after another, each of length `order`.
/// `delta == 0` selects the family's default penalty weight.
///
/// # Safety
/// `known` must point to `known_len` readable bytes (or be null with
/// `known_len == 0`); `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_model_build(
    problem: u32,
    order: usize,
    count: usize,
    known: *const i8,
    known_len: usize,
    delta: u64,
    out: *mut *mut HiModel,
) -> HiStatus {
    guard(|| {
        non_null(out, "out")?;
        if known_len > 0 {
            non_null(known, "known")?;
        }
        let spec = match problem {
            HI_PROBLEM_HSEARCH => ProblemSpec::HSearch { order },
            HI_PROBLEM_ORTHOSET => ProblemSpec::OrthoSet { order, count },
            HI_PROBLEM_COMPLETION => {
                if order == 0 || !known_len.is_multiple_of(order) {
                    return Err(invalid(format!("{known_len} known entries do not form columns of length {order}")));
                }
                let cols = slice(known, known_len).chunks(order).map(<[i8]>::to_vec).collect();
                ProblemSpec::Completion {
                    order,
                    known: KnownMatrix::new(cols).map_err(invalid)?,
                }
            }
            other => return Err(invalid(format!("unknown problem family {other}"))),
        };
        spec.validate().map_err(invalid)?;
        let delta = if delta == 0 {
            Delta::default_for(&spec)
        } else {
            Delta::new(delta).map_err(invalid)?
        };
        let r = run_pipeline(&spec, delta).map_err(invalid)?;
        let model = IsingModel::from_pipeline(&r).map_err(invalid)?;
        *out = Box::into_raw(Box::new(HiModel(model)));
        Ok(())
    })
}

/// Parses a model document.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_model_from_json(json: *const c_char, out: *mut *mut HiModel) -> HiStatus {
    guard(|| {
        non_null(json, "json")?;
        non_null(out, "out")?;
        let text = CStr::from_ptr(json)
            .to_str()
            .map_err(|e| (HiStatus::ParseError, e.to_string()))?;
        let (model, _) = IsingModel::from_json(text).map_err(|e| (HiStatus::ParseError, e.to_string()))?;
        *out = Box::into_raw(Box::new(HiModel(model)));
        Ok(())
    })
}

/// Serializes a model; release the string with [`hi_string_free`].
///
/// # Safety
/// `model` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_model_to_json(model: *const HiModel, out: *mut *mut c_char) -> HiStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let text = (*model).0.to_json(None);
        *out = CString::new(text).map_err(invalid)?.into_raw();
        Ok(())
    })
}

/// Number of spin variables, or 0 for a null handle.
///
/// # Safety
/// `model` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn hi_model_num_vars(model: *const HiModel) -> usize {
    if model.is_null() {
        0
    } else {
        (*model).0.num_vars()
    }
}

/// New model divided by its largest coefficient magnitude.
///
/// # Safety
/// `model` must come from this library; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn hi_model_normalize(model: *const HiModel, out: *mut *mut HiModel) -> HiStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(out, "out")?;
        let m = (*model).0.normalize().map_err(invalid)?;
        *out = Box::into_raw(Box::new(HiModel(m)));
        Ok(())
    })
}

/// Offset-excluded energy of `spins` (entries +1/-1).
///
/// # Safety
/// `spins` must point to `len` readable bytes; `out` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hi_model_energy(
    model: *const HiModel,
    spins: *const i8,
    len: usize,
    out: *mut f64,
) -> HiStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(spins, "spins")?;
        non_null(out, "out")?;
        *out = annealer::energy(&(*model).0, slice(spins, len)).map_err(invalid)?;
        Ok(())
    })
}

/// Anneals `model`; release the result with [`hi_results_free`].
///
/// # Safety
/// All pointers must be valid; `model` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn hi_anneal(
    model: *const HiModel,
    config: *const HiAnnealConfig,
    out: *mut *mut HiResults,
) -> HiStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(config, "config")?;
        non_null(out, "out")?;
        let c = *config;
        let beta = if c.beta_min == 0.0 && c.beta_max == 0.0 {
            BetaRange::Auto
        } else {
            BetaRange::Fixed {
                min: c.beta_min,
                max: c.beta_max,
            }
        };
        let schedule = match c.schedule {
            HI_SCHEDULE_GEOMETRIC => Schedule::Geometric,
            HI_SCHEDULE_LINEAR => Schedule::Linear,
            other => return Err(invalid(format!("unknown schedule {other}"))),
        };
        let cfg = AnnealConfig {
            sweeps: usize::try_from(c.sweeps).map_err(invalid)?,
            reads: usize::try_from(c.reads).map_err(invalid)?,
            beta,
            schedule,
            seed: c.seed,
            random_order: c.random_order != 0,
        };
        let r = annealer::anneal(&(*model).0, &cfg).map_err(invalid)?;
        *out = Box::into_raw(Box::new(HiResults(r)));
        Ok(())
    })
}

/// Number of distinct samples, or 0 for a null handle.
///
/// # Safety
/// `results` must be null or come from this library.
#[no_mangle]
pub unsafe extern "C" fn hi_results_len(results: *const HiResults) -> usize {
    if results.is_null() {
        0
    } else {
        (*results).0.samples.len()
    }
}

/// Copies sample `index` (samples are sorted by energy). `spins_out` must
/// hold at least the model's variable count; any of `energy` and
/// `occurrences` may be null.
///
/// # Safety
/// `spins_out` must point to `spins_cap` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn hi_results_sample(
    results: *const HiResults,
    index: usize,
    spins_out: *mut i8,
    spins_cap: usize,
    energy: *mut f64,
    occurrences: *mut u64,
) -> HiStatus {
    guard(|| {
        non_null(results, "results")?;
        non_null(spins_out, "spins_out")?;
        let samples = &(*results).0.samples;
        let s = samples
            .get(index)
            .ok_or_else(|| invalid(format!("sample index {index} out of range ({} samples)", samples.len())))?;
        if spins_cap < s.spins.len() {
            return Err((
                HiStatus::BufferTooSmall,
                format!("need {} spins, buffer holds {spins_cap}", s.spins.len()),
            ));
        }
        ptr::copy_nonoverlapping(s.spins.as_ptr(), spins_out, s.spins.len());
        if !energy.is_null() {
            *energy = s.energy;
        }
        if !occurrences.is_null() {
            *occurrences = s.occurrences as u64;
        }
        Ok(())
    })
}

/// Decodes `spins` with the model's layout and reports whether the result
/// is a Hadamard matrix, orthogonal set or valid completion.
///
/// # Safety
/// `spins` must point to `len` readable bytes; `ok` must be valid.
#[no_mangle]
pub unsafe extern "C" fn hi_verify_sample(
    model: *const HiModel,
    spins: *const i8,
    len: usize,
    ok: *mut bool,
) -> HiStatus {
    guard(|| {
        non_null(model, "model")?;
        non_null(spins, "spins")?;
        non_null(ok, "ok")?;
        let v = verify::check_sample((*model).0.layout(), slice(spins, len)).map_err(invalid)?;
        *ok = v.ok;
        Ok(())
    })
}

/// # Safety
/// `model` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn hi_model_free(model: *mut HiModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `results` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn hi_results_free(results: *mut HiResults) {
    if !results.is_null() {
        drop(Box::from_raw(results));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn hi_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
