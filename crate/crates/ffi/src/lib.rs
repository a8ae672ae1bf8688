//! C ABI for the `nonlocal-lwr` solvers.
//!
//! Every function returns an [`NlStatus`]; on failure the message is
//! available from [`nl_last_error`] on the same thread. Simulations are
//! opaque handles created from a TOML run configuration and released with
//! [`nl_simulation_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use nonlocal_lwr::config::RunConfig;
use nonlocal_lwr::kernel::{quadrature_weights, KernelSpec};
use nonlocal_lwr::{project_initial, Error, RunOptions, Simulation};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NlStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    /// Invalid configuration, kernel, grid or initial data.
    Config = 3,
    /// The requested step exceeds the stability bound, or none exists.
    Cfl = 4,
    InvalidArgument = 5,
    /// The output buffer is shorter than required; nothing was written.
    BufferTooSmall = 6,
    Panic = 7,
    Other = 8,
}

/// Opaque simulation handle.
pub struct NlSimulation {
    sim: Simulation,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(msg).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

fn status_of(e: &Error) -> NlStatus {
    match e {
        Error::CflViolation { .. } | Error::DegenerateModel => NlStatus::Cfl,
        Error::Io(_) | Error::OutOfRange { .. } => NlStatus::Other,
        _ => NlStatus::Config,
    }
}

/// Runs `f`, recording any error or panic as the thread's last error.
fn guard(f: impl FnOnce() -> Result<(), (NlStatus, String)>) -> NlStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => NlStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            NlStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (NlStatus, String) {
    (status_of(&e), e.to_string())
}

unsafe fn read_str<'a>(s: *const c_char, what: &str) -> Result<&'a str, (NlStatus, String)> {
    if s.is_null() {
        return Err((NlStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(s)
        .to_str()
        .map_err(|_| (NlStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

unsafe fn sim_ref<'a>(sim: *const NlSimulation) -> Result<&'a NlSimulation, (NlStatus, String)> {
    sim.as_ref()
        .ok_or_else(|| (NlStatus::NullPointer, "simulation handle is null".to_string()))
}

unsafe fn sim_mut<'a>(sim: *mut NlSimulation) -> Result<&'a mut NlSimulation, (NlStatus, String)> {
    sim.as_mut()
        .ok_or_else(|| (NlStatus::NullPointer, "simulation handle is null".to_string()))
}

/// Last error message on this thread, or null. Valid until the next call
/// into this library from the same thread.
#[no_mangle]
pub extern "C" fn nl_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Builds a simulation at `t = 0` from a TOML run configuration.
///
/// # Safety
/// `config_toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_new(config_toml: *const c_char, out: *mut *mut NlSimulation) -> NlStatus {
    guard(|| {
        if out.is_null() {
            return Err((NlStatus::NullPointer, "out is null".into()));
        }
        *out = ptr::null_mut();
        let text = read_str(config_toml, "config_toml")?;
        let cfg = RunConfig::from_toml_str(text).map_err(lib_err)?;
        let p = cfg.build().map_err(lib_err)?;
        let state = project_initial(&p.initial, &p.grid).map_err(lib_err)?;
        let opts = RunOptions {
            entropy_check: cfg.outputs.entropy_check,
            ..RunOptions::default()
        };
        let sim = Simulation::new(&p.model, &p.kernel, state, &p.scheme, opts).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(NlSimulation { sim }));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sim` must come from [`nl_simulation_new`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_free(sim: *mut NlSimulation) {
    if !sim.is_null() {
        drop(Box::from_raw(sim));
    }
}

/// Advances by one full time step.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_step(sim: *mut NlSimulation) -> NlStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        let tau = s.sim.tau();
        s.sim.step(tau).map_err(lib_err)
    })
}

/// Advances to exactly `t`, shortening the last step. Earlier times are a no-op.
///
/// # Safety
/// `sim` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_run_to(sim: *mut NlSimulation, t: f64) -> NlStatus {
    guard(|| {
        let s = sim_mut(sim)?;
        if !t.is_finite() {
            return Err((NlStatus::InvalidArgument, format!("t = {t} is not finite")));
        }
        s.sim.advance_to(t).map_err(lib_err)
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_time(sim: *const NlSimulation, out: *mut f64) -> NlStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or((NlStatus::NullPointer, "out is null".to_string()))?;
        *out = s.sim.state().time;
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_tau(sim: *const NlSimulation, out: *mut f64) -> NlStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or((NlStatus::NullPointer, "out is null".to_string()))?;
        *out = s.sim.tau();
        Ok(())
    })
}

/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_n_cells(sim: *const NlSimulation, out: *mut usize) -> NlStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or((NlStatus::NullPointer, "out is null".to_string()))?;
        *out = s.sim.state().rho.len();
        Ok(())
    })
}

/// Copies the cell averages into `buf`, which must hold `n_cells` values.
///
/// # Safety
/// `sim` must be a live handle and `buf` valid for `len` writes.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_density(sim: *const NlSimulation, buf: *mut f64, len: usize) -> NlStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        if buf.is_null() {
            return Err((NlStatus::NullPointer, "buf is null".into()));
        }
        let rho = &s.sim.state().rho;
        if len < rho.len() {
            return Err((
                NlStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", rho.len()),
            ));
        }
        ptr::copy_nonoverlapping(rho.as_ptr(), buf, rho.len());
        Ok(())
    })
}

/// Total number of invariant violations recorded so far.
///
/// # Safety
/// `sim` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn nl_simulation_invariant_failures(sim: *const NlSimulation, out: *mut usize) -> NlStatus {
    guard(|| {
        let s = sim_ref(sim)?;
        let out = out.as_mut().ok_or((NlStatus::NullPointer, "out is null".to_string()))?;
        let i = s.sim.report().invariants;
        *out = i.max_principle_violations
            + i.negative_fluxes
            + i.velocity_bound_violations
            + i.tv_growth_violations
            + i.entropy_violations;
        Ok(())
    })
}

/// Cell weights `gamma_k` of a kernel given as a TOML table
/// (`family`, `eta`, optional `w0`, `coefficients`). The number of weights
/// is written to `n_out`; with a null or short `buf` only the count is
/// written and `BufferTooSmall` is returned.
///
/// # Safety
/// `kernel_toml` must be NUL-terminated, `n_out` valid, and `buf` valid
/// for `len` writes when non-null.
#[no_mangle]
pub unsafe extern "C" fn nl_kernel_weights(
    kernel_toml: *const c_char,
    h: f64,
    buf: *mut f64,
    len: usize,
    n_out: *mut usize,
) -> NlStatus {
    guard(|| {
        let text = read_str(kernel_toml, "kernel_toml")?;
        let n_out = n_out.as_mut().ok_or((NlStatus::NullPointer, "n_out is null".to_string()))?;
        let spec: KernelSpec =
            toml::from_str(text).map_err(|e| (NlStatus::Config, format!("kernel: {}", e.message())))?;
        let k = quadrature_weights(&spec, h).map_err(lib_err)?;
        let gamma = k.gamma();
        *n_out = gamma.len();
        if buf.is_null() || len < gamma.len() {
            return Err((
                NlStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} needed", gamma.len()),
            ));
        }
        ptr::copy_nonoverlapping(gamma.as_ptr(), buf, gamma.len());
        Ok(())
    })
}
