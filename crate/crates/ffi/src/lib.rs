//! C ABI over `knapsack_moea`.
//!
//! Every fallible function returns a [`KmStatus`] and writes results through
//! out-pointers. On failure, [`km_last_error_message`] describes the error
//! for the calling thread. Handles are opaque and must be released with the
//! matching `*_free` function.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use knapsack_moea::harness::verify::greedy_objective;
use knapsack_moea::harness::{run_trial, InitMethod, TrialSetup};
use knapsack_moea::instances::{
    make_instance1, make_instance2, read_instance, write_instance, Instance1Params, Instance2Params,
};
use knapsack_moea::oracle::exact_optimum;
use knapsack_moea::{
    dominates, evaluate, Error, Evaluation, Item, KnapsackInstance, MoeaConfig, Solution,
    TrialTrajectory,
};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KmStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Io = 4,
    OracleCapacity = 5,
    Precondition = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum KmInit {
    Greedy = 0,
    Local = 1,
    Adversarial = 2,
}

/// Opaque knapsack instance.
pub struct KmInstance(KnapsackInstance);

/// Opaque run trajectory.
pub struct KmTrajectory(TrialTrajectory);

#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct KmMoeaOptions {
    pub population_size: usize,
    /// 0 leaves the generation budget unset.
    pub max_generations: u64,
    /// 0 leaves the evaluation budget unset.
    pub max_evaluations: u64,
    pub has_mutation_rate: bool,
    pub mutation_rate: f64,
    pub seed: u64,
    pub stream: u64,
}

/// One trajectory row; missing values are NaN.
#[repr(C)]
#[derive(Clone, Copy, Debug)]
pub struct KmTrajectoryRow {
    pub generation: u64,
    pub evaluations: u64,
    pub best_feasible: f64,
    pub best_ratio: f64,
    /// x_max, x_loc, x_vioa, x_viob, x_vioc, other feasible, other infeasible.
    pub composition: [usize; 7],
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> KmStatus {
    match e {
        Error::Contract(_) | Error::Validation(_) => KmStatus::InvalidArgument,
        Error::Parse { .. } => KmStatus::Parse,
        Error::Io { .. } => KmStatus::Io,
        Error::OracleCapacity { .. } => KmStatus::OracleCapacity,
        Error::Precondition(_) => KmStatus::Precondition,
    }
}

enum Fail {
    Null(&'static str),
    Arg(String),
    Lib(Error),
}

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail::Lib(e)
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> KmStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => KmStatus::Ok,
        Ok(Err(Fail::Null(what))) => {
            set_last_error(format!("{what} is null"));
            KmStatus::NullPointer
        }
        Ok(Err(Fail::Arg(msg))) => {
            set_last_error(msg);
            KmStatus::InvalidArgument
        }
        Ok(Err(Fail::Lib(e))) => {
            set_last_error(e.to_string());
            status_of(&e)
        }
        Err(_) => {
            set_last_error("internal panic".into());
            KmStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(p: *const T, what: &'static str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or(Fail::Null(what))
}

unsafe fn out<'a, T>(p: *mut T, what: &'static str) -> Result<&'a mut T, Fail> {
    p.as_mut().ok_or(Fail::Null(what))
}

unsafe fn path_arg(p: *const c_char) -> Result<PathBuf, Fail> {
    if p.is_null() {
        return Err(Fail::Null("path"));
    }
    CStr::from_ptr(p)
        .to_str()
        .map(PathBuf::from)
        .map_err(|_| Fail::Arg("path is not valid UTF-8".into()))
}

unsafe fn publish_instance(inst: KnapsackInstance, dst: *mut *mut KmInstance) -> Result<(), Fail> {
    *out(dst, "out")? = Box::into_raw(Box::new(KmInstance(inst)));
    Ok(())
}

/// Message for the last failed call on this thread, or NULL. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn km_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

#[no_mangle]
pub unsafe extern "C" fn km_instance1_new(
    alpha: f64,
    n: usize,
    out_instance: *mut *mut KmInstance,
) -> KmStatus {
    guard(|| {
        publish_instance(
            make_instance1(Instance1Params::new(alpha, n))?,
            out_instance,
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_instance2_new(
    n: usize,
    out_instance: *mut *mut KmInstance,
) -> KmStatus {
    guard(|| publish_instance(make_instance2(Instance2Params::new(n))?, out_instance))
}

/// Instance from `n` values and weights.
#[no_mangle]
pub unsafe extern "C" fn km_instance_new(
    values: *const f64,
    weights: *const f64,
    n: usize,
    capacity: f64,
    out_instance: *mut *mut KmInstance,
) -> KmStatus {
    guard(|| {
        if n > 0 && (values.is_null() || weights.is_null()) {
            return Err(Fail::Null("values or weights"));
        }
        let items = (0..n)
            .map(|i| Item::new(*values.add(i), *weights.add(i)))
            .collect();
        publish_instance(
            KnapsackInstance::new("custom", items, capacity)?,
            out_instance,
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_instance_read_json(
    path: *const c_char,
    out_instance: *mut *mut KmInstance,
) -> KmStatus {
    guard(|| publish_instance(read_instance(path_arg(path)?)?, out_instance))
}

#[no_mangle]
pub unsafe extern "C" fn km_instance_write_json(
    instance: *const KmInstance,
    path: *const c_char,
) -> KmStatus {
    guard(|| {
        Ok(write_instance(
            &deref(instance, "instance")?.0,
            path_arg(path)?,
        )?)
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_instance_size(
    instance: *const KmInstance,
    out_n: *mut usize,
) -> KmStatus {
    guard(|| {
        *out(out_n, "out_n")? = deref(instance, "instance")?.0.n();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_instance_capacity(
    instance: *const KmInstance,
    out_capacity: *mut f64,
) -> KmStatus {
    guard(|| {
        *out(out_capacity, "out_capacity")? = deref(instance, "instance")?.0.capacity();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_instance_free(instance: *mut KmInstance) {
    if !instance.is_null() {
        drop(Box::from_raw(instance));
    }
}

/// Objective and violation of the 0/1 vector `bits` (length `n`, nonzero = selected).
#[no_mangle]
pub unsafe extern "C" fn km_evaluate(
    instance: *const KmInstance,
    bits: *const u8,
    n: usize,
    out_objective: *mut f64,
    out_violation: *mut f64,
) -> KmStatus {
    guard(|| {
        let inst = &deref(instance, "instance")?.0;
        if n > 0 && bits.is_null() {
            return Err(Fail::Null("bits"));
        }
        let solution = Solution::from_bits((0..n).map(|i| *bits.add(i) != 0).collect());
        let e = evaluate(inst, &solution)?;
        *out(out_objective, "out_objective")? = e.objective;
        *out(out_violation, "out_violation")? = e.violation;
        Ok(())
    })
}

/// Whether (objective_a, violation_a) Pareto-dominates (objective_b, violation_b).
#[no_mangle]
pub extern "C" fn km_dominates(
    objective_a: f64,
    violation_a: f64,
    objective_b: f64,
    violation_b: f64,
) -> bool {
    dominates(
        &Evaluation::new(objective_a, violation_a),
        &Evaluation::new(objective_b, violation_b),
    )
}

/// Better objective of the by-value and by-ratio greedy solutions.
#[no_mangle]
pub unsafe extern "C" fn km_greedy(
    instance: *const KmInstance,
    out_objective: *mut f64,
) -> KmStatus {
    guard(|| {
        *out(out_objective, "out_objective")? = greedy_objective(&deref(instance, "instance")?.0)?;
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_exact_optimum(
    instance: *const KmInstance,
    out_optimum: *mut f64,
) -> KmStatus {
    guard(|| {
        let (opt, _) = exact_optimum(&deref(instance, "instance")?.0)?;
        *out(out_optimum, "out_optimum")? = opt.optimum;
        Ok(())
    })
}

/// One seeded run. Ratios are reported when the exact optimum is computable.
#[no_mangle]
pub unsafe extern "C" fn km_run_moea(
    instance: *const KmInstance,
    init: KmInit,
    options: *const KmMoeaOptions,
    out_trajectory: *mut *mut KmTrajectory,
) -> KmStatus {
    guard(|| {
        let inst = deref(instance, "instance")?.0.clone();
        let o = *deref(options, "options")?;
        let dst = out(out_trajectory, "out_trajectory")?;
        let config = MoeaConfig {
            population_size: o.population_size,
            mutation_rate: o.has_mutation_rate.then_some(o.mutation_rate),
            max_generations: (o.max_generations > 0).then_some(o.max_generations),
            max_evaluations: (o.max_evaluations > 0).then_some(o.max_evaluations),
            target_ratio: None,
            seed: o.seed,
            stream_id: o.stream,
        };
        let init = match init {
            KmInit::Greedy => InitMethod::Greedy,
            KmInit::Local => InitMethod::Local,
            KmInit::Adversarial => InitMethod::Adversarial,
        };
        let setup = TrialSetup::new(inst, init, config, None)?;
        *dst = Box::into_raw(Box::new(KmTrajectory(run_trial(&setup, o.stream)?)));
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_trajectory_len(
    trajectory: *const KmTrajectory,
    out_len: *mut usize,
) -> KmStatus {
    guard(|| {
        *out(out_len, "out_len")? = deref(trajectory, "trajectory")?.0.rows.len();
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_trajectory_row(
    trajectory: *const KmTrajectory,
    index: usize,
    out_row: *mut KmTrajectoryRow,
) -> KmStatus {
    guard(|| {
        let t = &deref(trajectory, "trajectory")?.0;
        let row = t
            .rows
            .get(index)
            .ok_or_else(|| Fail::Arg(format!("row {index} out of range (len {})", t.rows.len())))?;
        *out(out_row, "out_row")? = KmTrajectoryRow {
            generation: row.generation,
            evaluations: row.evaluations,
            best_feasible: row.best_feasible.unwrap_or(f64::NAN),
            best_ratio: row.best_ratio.unwrap_or(f64::NAN),
            composition: row.composition,
        };
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_trajectory_write_csv(
    trajectory: *const KmTrajectory,
    path: *const c_char,
) -> KmStatus {
    guard(|| {
        let t = &deref(trajectory, "trajectory")?.0;
        let path = path_arg(path)?;
        std::fs::write(&path, t.to_csv()).map_err(|e| Fail::Lib(Error::Io { path, source: e }))
    })
}

#[no_mangle]
pub unsafe extern "C" fn km_trajectory_free(trajectory: *mut KmTrajectory) {
    if !trajectory.is_null() {
        drop(Box::from_raw(trajectory));
    }
}
