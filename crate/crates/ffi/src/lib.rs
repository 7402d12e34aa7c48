//! C ABI over `cavity-qst`.
//!
//! Every entry point returns a [`CqStatus`] and writes results through out
//! pointers. On failure a message is kept per thread and can be read with
//! [`cq_last_error_message`]. Panics never cross the boundary.
//!
//! Buffers follow one convention: the caller passes capacity `len`, the
//! callee writes the required element count to `*written` and returns
//! `CQ_STATUS_BUFFER_TOO_SMALL` without touching `buf` if it does not fit.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use cavity_qst::critical::{self, CriticalKind};
use cavity_qst::dynamics::{self, TimeGrid};
use cavity_qst::fock::SiteIndex;
use cavity_qst::model::ModelParams;
use cavity_qst::spectral::{self, SpectralDecomposition};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    BufferTooSmall = 3,
    ComputeFailed = 4,
    Panic = 5,
}

/// Hamiltonian parameters, mirrored field by field.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CqParams {
    pub n_bosons: u32,
    pub omega0: f64,
    pub omega: f64,
    pub anharm: f64,
    pub hop: f64,
    pub coupling: f64,
}

impl From<CqParams> for ModelParams {
    fn from(p: CqParams) -> Self {
        ModelParams {
            n_bosons: p.n_bosons as usize,
            omega0: p.omega0,
            omega: p.omega,
            anharm: p.anharm,
            hop: p.hop,
            coupling: p.coupling,
        }
    }
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CqCriticalKind {
    ExactCrossing = 0,
    AvoidedMinimum = 1,
}

/// Located critical coupling.
#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct CqCritical {
    pub g_c: f64,
    pub gap_at_gc: f64,
    pub kind: CqCriticalKind,
    pub bracket_lo: f64,
    pub bracket_hi: f64,
    pub iterations: u32,
}

/// Opaque handle holding one diagonalized Hamiltonian.
pub struct CqSystem {
    params: ModelParams,
    decomp: SpectralDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_last_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    let c = CString::new(msg).expect("interior nul removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

struct Failure(CqStatus, String);

impl From<cavity_qst::Error> for Failure {
    fn from(e: cavity_qst::Error) -> Self {
        let code = if e.is_usage() {
            CqStatus::InvalidArgument
        } else {
            CqStatus::ComputeFailed
        };
        Failure(code, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(CqStatus::NullPointer, format!("{what} is null"))
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(CqStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> CqStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CqStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_last_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_last_error(format!("panic: {msg}"));
            CqStatus::Panic
        }
    }
}

unsafe fn deref<'a, T>(ptr: *const T, what: &str) -> Result<&'a T, Failure> {
    ptr.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(ptr: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if ptr.is_null() {
        return Err(null(what));
    }
    ptr.write(value);
    Ok(())
}

unsafe fn copy_to_buffer(data: &[f64], buf: *mut f64, len: usize, written: *mut usize) -> Result<(), Failure> {
    write_out(written, data.len(), "written")?;
    if data.len() > len {
        return Err(Failure(
            CqStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} required", data.len()),
        ));
    }
    if data.is_empty() {
        return Ok(());
    }
    if buf.is_null() {
        return Err(null("buf"));
    }
    std::ptr::copy_nonoverlapping(data.as_ptr(), buf, data.len());
    Ok(())
}

fn site(n_bosons: usize, v: u32, p: u32) -> Result<SiteIndex, Failure> {
    let (v, p) = (v as usize, p as usize);
    if p > v || v > n_bosons {
        return Err(invalid(format!("site ({v}, {p}) outside 0 <= p <= v <= {n_bosons}")));
    }
    Ok(SiteIndex::new(v, p))
}

/// Diagonalizes the Hamiltonian for `params` and stores a new handle in `*out`.
///
/// # Safety
/// `params` must point to a valid `CqParams`; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_system_new(params: *const CqParams, out: *mut *mut CqSystem) -> CqStatus {
    guard(|| {
        let params: ModelParams = (*deref(params, "params")?).into();
        if out.is_null() {
            return Err(null("out"));
        }
        params.validate()?;
        let decomp = spectral::decompose(&params)?;
        out.write(Box::into_raw(Box::new(CqSystem { params, decomp })));
        Ok(())
    })
}

/// Releases a handle. Null is ignored.
///
/// # Safety
/// `sys` must come from `cq_system_new` and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn cq_system_free(sys: *mut CqSystem) {
    if !sys.is_null() {
        drop(Box::from_raw(sys));
    }
}

/// Hilbert-space dimension `(N_B + 1)(N_B + 2)/2`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_system_dim(sys: *const CqSystem, out: *mut usize) -> CqStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        write_out(out, sys.decomp.dim(), "out")
    })
}

/// Eigenvalues in ascending order.
///
/// # Safety
/// `sys` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cq_system_energies(
    sys: *const CqSystem,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> CqStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        copy_to_buffer(&sys.decomp.energies, buf, len, written)
    })
}

/// `E1 - E0`.
///
/// # Safety
/// `sys` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_system_gap(sys: *const CqSystem, out: *mut f64) -> CqStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let gap = sys.decomp.gap()?;
        write_out(out, gap, "out")
    })
}

/// Population imbalance `P1 - P2` at `steps + 1` equally spaced times in
/// `[0, tmax]`, starting from site `(v0, p0)`.
///
/// # Safety
/// `sys` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cq_system_imbalance(
    sys: *const CqSystem,
    v0: u32,
    p0: u32,
    tmax: f64,
    steps: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> CqStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let initial = site(sys.params.n_bosons, v0, p0)?;
        let grid = TimeGrid::new(tmax, steps)?;
        if grid.len() > len {
            write_out(written, grid.len(), "written")?;
            return Err(Failure(
                CqStatus::BufferTooSmall,
                format!("buffer holds {len} values, {} required", grid.len()),
            ));
        }
        let ts = dynamics::imbalance_trace(&sys.params, initial, &grid)?;
        copy_to_buffer(&ts.imbalance(), buf, len, written)
    })
}

/// Infinite-time averaged site probabilities in row-major site order.
/// `eps_deg <= 0` selects the default degeneracy tolerance.
///
/// # Safety
/// `sys` must be a live handle; `buf` must hold `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn cq_system_limiting(
    sys: *const CqSystem,
    v0: u32,
    p0: u32,
    eps_deg: f64,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> CqStatus {
    guard(|| {
        let sys = deref(sys, "sys")?;
        let initial = site(sys.params.n_bosons, v0, p0)?;
        if eps_deg.is_nan() {
            return Err(invalid("eps_deg is NaN"));
        }
        let eps = (eps_deg > 0.0).then_some(eps_deg);
        let profile = dynamics::limiting_profile_from(&sys.params, &sys.decomp, initial, eps)?;
        copy_to_buffer(&profile.values, buf, len, written)
    })
}

/// Critical coupling for `params` (its `coupling` field is ignored). Pass
/// `g_lo >= g_hi` to use the default bracket.
///
/// # Safety
/// `params` must be valid; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_find_critical(
    params: *const CqParams,
    g_lo: f64,
    g_hi: f64,
    out: *mut CqCritical,
) -> CqStatus {
    guard(|| {
        let params: ModelParams = (*deref(params, "params")?).into();
        if out.is_null() {
            return Err(null("out"));
        }
        params.validate()?;
        let bracket = (g_lo < g_hi).then_some((g_lo, g_hi));
        let r = critical::find_critical(&params, bracket)?;
        let kind = match r.kind {
            CriticalKind::ExactCrossing => CqCriticalKind::ExactCrossing,
            CriticalKind::AvoidedMinimum => CqCriticalKind::AvoidedMinimum,
        };
        out.write(CqCritical {
            g_c: r.g_c,
            gap_at_gc: r.gap_at_gc,
            kind,
            bracket_lo: r.bracket.0,
            bracket_hi: r.bracket.1,
            iterations: r.iterations.min(u32::MAX as usize) as u32,
        });
        Ok(())
    })
}

/// Effective hopping between the two localized configurations.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn cq_effective_hopping(n_bosons: u32, hop: f64, anharm: f64, out: *mut f64) -> CqStatus {
    guard(|| {
        let j = critical::effective_hopping(n_bosons as usize, hop, anharm)?;
        write_out(out, j, "out")
    })
}

/// Message of the last failed call on this thread, or null. The pointer
/// stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn cq_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(std::ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static nul-terminated string.
#[no_mangle]
pub extern "C" fn cq_version() -> *const c_char {
    static VERSION: &CStr = match CStr::from_bytes_with_nul(concat!(env!("CARGO_PKG_VERSION"), "\0").as_bytes()) {
        Ok(v) => v,
        Err(_) => panic!("version contains nul"),
    };
    VERSION.as_ptr()
}
