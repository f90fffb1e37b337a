//! C ABI for the `twomode` engine.
//!
//! Every fallible function returns a status code (`TM_OK` on success). On
//! failure a human-readable message is stored per thread and can be read with
//! [`tm_last_error_message`]. Objects are opaque handles owned by the caller
//! and released with the matching `*_free` function.
//!
//! # Safety
//!
//! Handles must come from this library and not be used after being freed.
//! `state` arguments point to 4 doubles, array outputs to the documented
//! length, and string arguments are NUL-terminated.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, c_int, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use twomode::classifier::{classify, ClassifierConfig, ClassifyError, PhaseClass, Trapping};
use twomode::equilibria::{
    critical_lambda, default_seed_grid, normal_mode_frequencies, numeric_fixed_points, symmetric_fixed_points,
    EquilibriumError, PhaseMode, DEFAULT_LAMBDA_MAX,
};
use twomode::{eval_rhs, hamiltonian, integrate, IntegrateError, IntegratorConfig, ModelError, ModelParams, State};

pub const TM_OK: c_int = 0;
/// Null pointer, unknown enum value or similar caller error.
pub const TM_ERR_ARGUMENT: c_int = 1;
/// Parameters, state or configuration rejected by validation.
pub const TM_ERR_CONFIG: c_int = 2;
/// Integration or root finding failed (pole approach, step failure, no transition).
pub const TM_ERR_NUMERICAL: c_int = 3;
/// The trajectory could not be given a regime label.
pub const TM_ERR_UNCLASSIFIABLE: c_int = 5;
/// The output buffer is too small; the required size has been written.
pub const TM_ERR_BUFFER: c_int = 6;
/// A Rust panic was caught at the boundary.
pub const TM_ERR_PANIC: c_int = 7;

pub const TM_MODE_ZERO: c_int = 0;
pub const TM_MODE_PI: c_int = 1;

pub const TM_PHASE_ZERO: c_int = 0;
pub const TM_PHASE_PI: c_int = 1;
pub const TM_PHASE_RUNNING: c_int = 2;

pub const TM_TRAP_OSCILLATORY: c_int = 0;
pub const TM_TRAP_MQST_SEPARATED: c_int = 1;
pub const TM_TRAP_MQST_COEXISTING: c_int = 2;
pub const TM_TRAP_SWAPPING_AVOIDING: c_int = 3;
pub const TM_TRAP_SWAPPING_CHASING: c_int = 4;

/// Opaque model parameters.
pub struct TmParams(ModelParams);

/// Opaque sampled trajectory.
pub struct TmTrajectory(twomode::Trajectory);

/// Regime label of a trajectory.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TmLabel {
    pub phase_class_a: c_int,
    pub phase_class_b: c_int,
    pub trapping: c_int,
    pub mean_z_a: f64,
    pub mean_z_b: f64,
    pub corr_zz: f64,
}

/// An equilibrium with common phase `0` or `pi`.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct TmFixedPoint {
    pub z_a: f64,
    pub z_b: f64,
    /// 1 if linearly stable.
    pub stable: c_int,
    pub residual: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

struct Failure(c_int, String);

impl From<ModelError> for Failure {
    fn from(e: ModelError) -> Self {
        Failure(TM_ERR_CONFIG, e.to_string())
    }
}

impl From<IntegrateError> for Failure {
    fn from(e: IntegrateError) -> Self {
        let code = match e {
            IntegrateError::Model(_) | IntegrateError::InvalidConfig(_) => TM_ERR_CONFIG,
            _ => TM_ERR_NUMERICAL,
        };
        Failure(code, e.to_string())
    }
}

impl From<EquilibriumError> for Failure {
    fn from(e: EquilibriumError) -> Self {
        let code = match e {
            EquilibriumError::Model(_) | EquilibriumError::SymmetryViolation(_) => TM_ERR_CONFIG,
            _ => TM_ERR_NUMERICAL,
        };
        Failure(code, e.to_string())
    }
}

fn arg(msg: &str) -> Failure {
    Failure(TM_ERR_ARGUMENT, msg.to_string())
}

/// Runs `f`, translating errors and panics into a status code.
fn guard(f: impl FnOnce() -> Result<(), Failure>) -> c_int {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            TM_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            TM_ERR_PANIC
        }
    }
}

unsafe fn params<'a>(p: *const TmParams) -> Result<&'a ModelParams, Failure> {
    p.as_ref().map(|p| &p.0).ok_or_else(|| arg("params handle is null"))
}

unsafe fn state(s: *const f64) -> Result<State, Failure> {
    if s.is_null() {
        return Err(arg("state pointer is null"));
    }
    let v = std::slice::from_raw_parts(s, 4);
    Ok(State::new(v[0], v[1], v[2], v[3]))
}

fn mode(m: c_int) -> Result<PhaseMode, Failure> {
    match m {
        TM_MODE_ZERO => Ok(PhaseMode::Zero),
        TM_MODE_PI => Ok(PhaseMode::Pi),
        _ => Err(arg(&format!("unknown mode {m}"))),
    }
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(arg("output pointer is null"));
    }
    out.write(v);
    Ok(())
}

/// Message of the last failed call on this thread, or null if the last call
/// succeeded. Valid until the next call into the library on this thread.
#[no_mangle]
pub extern "C" fn tm_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn tm_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Symmetric parameters: `K_a = K_b = k`, `Lambda_a = Lambda_b = lambda`,
/// `f_a = f_b = 1/2`, constant tunnelling.
#[no_mangle]
pub unsafe extern "C" fn tm_params_new_symmetric(k: f64, lambda: f64, lambda_ab: f64, out: *mut *mut TmParams) -> c_int {
    guard(|| {
        let p = ModelParams::symmetric(k, lambda, lambda_ab);
        p.validate()?;
        write(out, Box::into_raw(Box::new(TmParams(p))))
    })
}

/// General constant-tunnelling parameters.
#[no_mangle]
pub unsafe extern "C" fn tm_params_new(
    f_a: f64,
    k_a: f64,
    k_b: f64,
    lambda_a: f64,
    lambda_b: f64,
    lambda_ab: f64,
    out: *mut *mut TmParams,
) -> c_int {
    guard(|| {
        let p = ModelParams {
            f_a,
            f_b: 1.0 - f_a,
            k_a,
            k_b,
            lambda_a,
            lambda_b,
            lambda_ab,
            ..ModelParams::symmetric(1.0, 0.0, 0.0)
        };
        p.validate()?;
        write(out, Box::into_raw(Box::new(TmParams(p))))
    })
}

/// Parameters from their JSON form (all fields, including variable
/// tunnelling and overlap corrections).
#[no_mangle]
pub unsafe extern "C" fn tm_params_from_json(json: *const c_char, out: *mut *mut TmParams) -> c_int {
    guard(|| {
        if json.is_null() {
            return Err(arg("json is null"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|_| Failure(TM_ERR_CONFIG, "json is not UTF-8".into()))?;
        let p: ModelParams =
            serde_json::from_str(text).map_err(|e| Failure(TM_ERR_CONFIG, format!("invalid parameters: {e}")))?;
        p.validate()?;
        write(out, Box::into_raw(Box::new(TmParams(p))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn tm_params_free(p: *mut TmParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Time derivative of `state = [Z_a, Z_b, phi_a, phi_b]` into `out[4]`.
#[no_mangle]
pub unsafe extern "C" fn tm_eval_rhs(p: *const TmParams, state_in: *const f64, out: *mut f64) -> c_int {
    guard(|| {
        let d = eval_rhs(params(p)?, &state(state_in)?)?;
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        std::slice::from_raw_parts_mut(out, 4).copy_from_slice(&d.to_array());
        Ok(())
    })
}

#[no_mangle]
pub unsafe extern "C" fn tm_hamiltonian(p: *const TmParams, state_in: *const f64, out: *mut f64) -> c_int {
    guard(|| {
        let h = hamiltonian(params(p)?, &state(state_in)?)?;
        write(out, h)
    })
}

/// Integrates from `state` to `t_end`, sampling every `sample_interval`,
/// with the default tolerances (`1e-10`).
#[no_mangle]
pub unsafe extern "C" fn tm_integrate(
    p: *const TmParams,
    state_in: *const f64,
    t_end: f64,
    sample_interval: f64,
    out: *mut *mut TmTrajectory,
) -> c_int {
    guard(|| {
        if out.is_null() {
            return Err(arg("output pointer is null"));
        }
        let cfg = IntegratorConfig { t_end, sample_interval, ..IntegratorConfig::default() };
        let traj = integrate(params(p)?, &state(state_in)?, &cfg)?;
        write(out, Box::into_raw(Box::new(TmTrajectory(traj))))
    })
}

#[no_mangle]
pub unsafe extern "C" fn tm_trajectory_free(t: *mut TmTrajectory) {
    if !t.is_null() {
        drop(Box::from_raw(t));
    }
}

/// Number of samples, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn tm_trajectory_len(t: *const TmTrajectory) -> usize {
    t.as_ref().map_or(0, |t| t.0.len())
}

/// Copies sample `i`: time, `state[4]` and energy. Any output may be null.
#[no_mangle]
pub unsafe extern "C" fn tm_trajectory_sample(
    t: *const TmTrajectory,
    i: usize,
    time: *mut f64,
    state_out: *mut f64,
    energy: *mut f64,
) -> c_int {
    guard(|| {
        let t = &t.as_ref().ok_or_else(|| arg("trajectory handle is null"))?.0;
        if i >= t.len() {
            return Err(arg(&format!("sample {i} out of range (length {})", t.len())));
        }
        if !time.is_null() {
            *time = t.times[i];
        }
        if !state_out.is_null() {
            std::slice::from_raw_parts_mut(state_out, 4).copy_from_slice(&t.states[i].to_array());
        }
        if !energy.is_null() {
            *energy = t.energies[i];
        }
        Ok(())
    })
}

/// Largest relative energy deviation from the first sample.
#[no_mangle]
pub unsafe extern "C" fn tm_trajectory_energy_drift(t: *const TmTrajectory, out: *mut f64) -> c_int {
    guard(|| {
        let t = &t.as_ref().ok_or_else(|| arg("trajectory handle is null"))?.0;
        write(out, t.relative_energy_drift())
    })
}

fn phase_code(c: PhaseClass) -> c_int {
    match c {
        PhaseClass::ZeroPhase => TM_PHASE_ZERO,
        PhaseClass::PiPhase => TM_PHASE_PI,
        PhaseClass::RunningPhase => TM_PHASE_RUNNING,
    }
}

fn trapping_code(t: Trapping) -> c_int {
    match t {
        Trapping::Oscillatory => TM_TRAP_OSCILLATORY,
        Trapping::MqstSeparated => TM_TRAP_MQST_SEPARATED,
        Trapping::MqstCoexisting => TM_TRAP_MQST_COEXISTING,
        Trapping::SwappingAvoiding => TM_TRAP_SWAPPING_AVOIDING,
        Trapping::SwappingChasing => TM_TRAP_SWAPPING_CHASING,
    }
}

/// Labels a trajectory with the default classifier settings.
#[no_mangle]
pub unsafe extern "C" fn tm_classify(t: *const TmTrajectory, out: *mut TmLabel) -> c_int {
    guard(|| {
        let t = &t.as_ref().ok_or_else(|| arg("trajectory handle is null"))?.0;
        let l = classify(t, &ClassifierConfig::default()).map_err(|e| match e {
            ClassifyError::Ambiguous { .. } => Failure(TM_ERR_UNCLASSIFIABLE, e.to_string()),
            _ => Failure(TM_ERR_CONFIG, e.to_string()),
        })?;
        write(
            out,
            TmLabel {
                phase_class_a: phase_code(l.phase_class_a),
                phase_class_b: phase_code(l.phase_class_b),
                trapping: trapping_code(l.trapping),
                mean_z_a: l.mean_z_a,
                mean_z_b: l.mean_z_b,
                corr_zz: l.corr_zz,
            },
        )
    })
}

/// Static NUL-terminated name of a trapping code, or null if unknown.
#[no_mangle]
pub extern "C" fn tm_trapping_name(code: c_int) -> *const c_char {
    let name: &'static [u8] = match code {
        TM_TRAP_OSCILLATORY => b"Oscillatory\0",
        TM_TRAP_MQST_SEPARATED => b"MQST_Separated\0",
        TM_TRAP_MQST_COEXISTING => b"MQST_Coexisting\0",
        TM_TRAP_SWAPPING_AVOIDING => b"Swapping_Avoiding\0",
        TM_TRAP_SWAPPING_CHASING => b"Swapping_Chasing\0",
        _ => return ptr::null(),
    };
    name.as_ptr().cast()
}

/// Small-oscillation frequencies about the trivial point of `mode`:
/// squared values into `omega2[2]` (larger first) and `*stable`.
#[no_mangle]
pub unsafe extern "C" fn tm_normal_modes(p: *const TmParams, m: c_int, omega2: *mut f64, stable: *mut c_int) -> c_int {
    guard(|| {
        let r = normal_mode_frequencies(params(p)?, mode(m)?)?;
        if omega2.is_null() {
            return Err(arg("output pointer is null"));
        }
        std::slice::from_raw_parts_mut(omega2, 2).copy_from_slice(&[r.omega2_plus, r.omega2_minus]);
        write(stable, c_int::from(r.is_stable()))
    })
}

/// Critical `Lambda` for `Lambda_ab = ratio * Lambda` with the template's `K`.
#[no_mangle]
pub unsafe extern "C" fn tm_critical_lambda(p: *const TmParams, m: c_int, ratio: f64, out: *mut f64) -> c_int {
    guard(|| {
        let v = critical_lambda(params(p)?, mode(m)?, ratio, DEFAULT_LAMBDA_MAX)?;
        write(out, v)
    })
}

/// Equilibria of `mode`: closed form for symmetric parameters, Newton from
/// the default seed grid otherwise. Writes at most `capacity` points and
/// the total count into `*count`; returns `TM_ERR_BUFFER` if they did not fit.
#[no_mangle]
pub unsafe extern "C" fn tm_fixed_points(
    p: *const TmParams,
    m: c_int,
    out: *mut TmFixedPoint,
    capacity: usize,
    count: *mut usize,
) -> c_int {
    guard(|| {
        let p = params(p)?;
        let m = mode(m)?;
        let points = if p.is_symmetric() {
            symmetric_fixed_points(p, m)?
        } else {
            numeric_fixed_points(p, m, &default_seed_grid())?.roots
        };
        write(count, points.len())?;
        if points.len() > capacity {
            return Err(Failure(
                TM_ERR_BUFFER,
                format!("{} fixed points do not fit in capacity {capacity}", points.len()),
            ));
        }
        if !points.is_empty() && out.is_null() {
            return Err(arg("output pointer is null"));
        }
        for (i, fp) in points.iter().enumerate() {
            out.add(i).write(TmFixedPoint {
                z_a: fp.z_a,
                z_b: fp.z_b,
                stable: c_int::from(fp.stable),
                residual: fp.residual,
            });
        }
        Ok(())
    })
}
