//! C ABI for the sacsim engine.
//!
//! The surface follows a uniform convention: every function returns a
//! [`SacsimStatus`]; results travel through out-pointers. Objects are
//! opaque handles created by `*_new` constructors and released by the
//! matching `*_free`; handles are immutable, so operations such as
//! evolution return fresh handles instead of mutating their inputs.
//! On failure a thread-local message is recorded and can be read with
//! [`sacsim_last_error_message`] until the next failing call on the
//! same thread. Panics never unwind across the boundary; they are
//! caught and reported as [`SacsimStatus::Panic`].
//!
//! Complex arrays cross the boundary as separate real and imaginary
//! `double` buffers; matrices are dense and row-major.

use std::cell::RefCell;
use std::ffi::CString;
use std::os::raw::c_char;
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::slice;

use ndarray::Array1;
use num_complex::Complex64;

use sacsim::dynamics::{evolve, EvolveMethod, QuadraticHamiltonian};
use sacsim::error::SimError;
use sacsim::statespace::{
    from_phase_space, operator_norm_distance, to_phase_space, BasisLabel, HiddenParticleSet,
    PureState,
};
use sacsim::tomography::sac_qst;

/// Result of every FFI call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SacsimStatus {
    /// The call succeeded.
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Arguments were malformed: domain violations, wrong buffer
    /// lengths, or inconsistent dimensions.
    InvalidArgument = 2,
    /// The computation failed numerically: structural checks,
    /// invariant breaches, or non-convergence.
    NumericalFailure = 3,
    /// An internal panic was caught at the boundary.
    Panic = 4,
}

/// Opaque handle: a normalized state vector.
pub struct SacsimState {
    inner: PureState,
}

/// Opaque handle: a Hermitian generator of the dynamics.
pub struct SacsimHamiltonian {
    inner: QuadraticHamiltonian,
}

/// Opaque handle: a phase-space particle configuration.
pub struct SacsimParticleSet {
    inner: HiddenParticleSet,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

enum FfiError {
    Null(&'static str),
    Sim(SimError),
}

impl From<SimError> for FfiError {
    fn from(e: SimError) -> Self {
        FfiError::Sim(e)
    }
}

fn record_failure(err: &FfiError) -> SacsimStatus {
    let (status, message) = match err {
        FfiError::Null(what) => (
            SacsimStatus::NullPointer,
            format!("{what} must not be null"),
        ),
        FfiError::Sim(e) => {
            let status = match e {
                SimError::InvalidArgument(_)
                | SimError::DimensionMismatch(_)
                | SimError::SizeLimit(_)
                | SimError::Io(_) => SacsimStatus::InvalidArgument,
                SimError::NotStructured(_)
                | SimError::InvalidParticleSet { .. }
                | SimError::InvariantBreach(_)
                | SimError::NoConvergence(_) => SacsimStatus::NumericalFailure,
            };
            (status, e.to_string())
        }
    };
    let message =
        CString::new(message).unwrap_or_else(|_| CString::new("invalid error message").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
    status
}

/// Runs a fallible body behind the unwind barrier and maps its outcome
/// onto a status code.
fn boundary(body: impl FnOnce() -> Result<(), FfiError>) -> SacsimStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => SacsimStatus::Ok,
        Ok(Err(e)) => record_failure(&e),
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| (*s).to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            let message = CString::new(format!("panic: {what}"))
                .unwrap_or_else(|_| CString::new("panic").unwrap());
            LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(message));
            SacsimStatus::Panic
        }
    }
}

fn require<'a, T>(ptr: *const T, what: &'static str) -> Result<&'a T, FfiError> {
    unsafe { ptr.as_ref() }.ok_or(FfiError::Null(what))
}

fn require_out<'a, T>(ptr: *mut T, what: &'static str) -> Result<&'a mut T, FfiError> {
    unsafe { ptr.as_mut() }.ok_or(FfiError::Null(what))
}

fn complex_array(
    re: *const f64,
    im: *const f64,
    len: usize,
) -> Result<Array1<Complex64>, FfiError> {
    if re.is_null() {
        return Err(FfiError::Null("re"));
    }
    if im.is_null() {
        return Err(FfiError::Null("im"));
    }
    let re = unsafe { slice::from_raw_parts(re, len) };
    let im = unsafe { slice::from_raw_parts(im, len) };
    Ok(re
        .iter()
        .zip(im)
        .map(|(&a, &b)| Complex64::new(a, b))
        .collect())
}

fn matrix_from_parts(
    dim: usize,
    re: *const f64,
    im: *const f64,
) -> Result<ndarray::Array2<Complex64>, FfiError> {
    let flat = complex_array(re, im, dim.checked_mul(dim).ok_or_else(|| {
        FfiError::Sim(SimError::SizeLimit(format!(
            "matrix dimension {dim} overflows"
        )))
    })?)?;
    flat.into_shape_with_order((dim, dim)).map_err(|e| {
        FfiError::Sim(SimError::DimensionMismatch(format!(
            "matrix reshape failed: {e}"
        )))
    })
}

fn expect_len(what: &'static str, expected: usize, got: usize) -> Result<(), FfiError> {
    if expected == got {
        Ok(())
    } else {
        Err(FfiError::Sim(SimError::DimensionMismatch(format!(
            "{what} buffer holds {got} values but {expected} are required"
        ))))
    }
}

/// Returns the library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sacsim_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Returns the message of the most recent failure on this thread, or
/// null if none occurred. The pointer stays valid until the next
/// failing call on the same thread; copy it if you need it longer.
#[no_mangle]
pub extern "C" fn sacsim_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| {
        slot.borrow()
            .as_ref()
            .map(|s| s.as_ptr())
            .unwrap_or(std::ptr::null())
    })
}

/// Builds a state from `dim` complex amplitudes, rescaling them to unit
/// norm. Fails on a zero or non-finite input vector.
#[no_mangle]
pub unsafe extern "C" fn sacsim_state_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SacsimState,
) -> SacsimStatus {
    boundary(|| {
        let out = require_out(out, "out")?;
        let amps = complex_array(re, im, dim)?;
        let state = PureState::normalized(amps)?;
        *out = Box::into_raw(Box::new(SacsimState { inner: state }));
        Ok(())
    })
}

/// Releases a state handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sacsim_state_free(state: *mut SacsimState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Writes the state dimension into `out_dim`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_state_dim(
    state: *const SacsimState,
    out_dim: *mut usize,
) -> SacsimStatus {
    boundary(|| {
        let state = require(state, "state")?;
        let out_dim = require_out(out_dim, "out_dim")?;
        *out_dim = state.inner.dim();
        Ok(())
    })
}

/// Copies the amplitudes into caller buffers of exactly `len == dim`
/// doubles each.
#[no_mangle]
pub unsafe extern "C" fn sacsim_state_amplitudes(
    state: *const SacsimState,
    re_out: *mut f64,
    im_out: *mut f64,
    len: usize,
) -> SacsimStatus {
    boundary(|| {
        let state = require(state, "state")?;
        if re_out.is_null() {
            return Err(FfiError::Null("re_out"));
        }
        if im_out.is_null() {
            return Err(FfiError::Null("im_out"));
        }
        expect_len("amplitude", state.inner.dim(), len)?;
        let re = slice::from_raw_parts_mut(re_out, len);
        let im = slice::from_raw_parts_mut(im_out, len);
        for (k, amp) in state.inner.amplitudes().iter().enumerate() {
            re[k] = amp.re;
            im[k] = amp.im;
        }
        Ok(())
    })
}

/// Writes |<a|b>|^2 into `out`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_state_fidelity(
    a: *const SacsimState,
    b: *const SacsimState,
    out: *mut f64,
) -> SacsimStatus {
    boundary(|| {
        let a = require(a, "a")?;
        let b = require(b, "b")?;
        let out = require_out(out, "out")?;
        *out = a.inner.fidelity(&b.inner)?;
        Ok(())
    })
}

/// Builds a Hamiltonian from a dense row-major `dim x dim` Hermitian
/// matrix.
#[no_mangle]
pub unsafe extern "C" fn sacsim_hamiltonian_new(
    dim: usize,
    re: *const f64,
    im: *const f64,
    out: *mut *mut SacsimHamiltonian,
) -> SacsimStatus {
    boundary(|| {
        let out = require_out(out, "out")?;
        let mat = matrix_from_parts(dim, re, im)?;
        let h = QuadraticHamiltonian::new(mat)?;
        *out = Box::into_raw(Box::new(SacsimHamiltonian { inner: h }));
        Ok(())
    })
}

/// Releases a Hamiltonian handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sacsim_hamiltonian_free(h: *mut SacsimHamiltonian) {
    if !h.is_null() {
        drop(Box::from_raw(h));
    }
}

/// Writes the Hamiltonian dimension into `out_dim`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_hamiltonian_dim(
    h: *const SacsimHamiltonian,
    out_dim: *mut usize,
) -> SacsimStatus {
    boundary(|| {
        let h = require(h, "h")?;
        let out_dim = require_out(out_dim, "out_dim")?;
        *out_dim = h.inner.dim();
        Ok(())
    })
}

/// Maps a state onto its phase-space particle configuration in the
/// computational frame: particle `i` sits at `(q_i, p_i) = (Re c_i,
/// Im c_i)`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_new(
    state: *const SacsimState,
    out: *mut *mut SacsimParticleSet,
) -> SacsimStatus {
    boundary(|| {
        let state = require(state, "state")?;
        let out = require_out(out, "out")?;
        let basis = BasisLabel::computational(state.inner.dim());
        let particles = to_phase_space(&state.inner, &basis)?;
        *out = Box::into_raw(Box::new(SacsimParticleSet { inner: particles }));
        Ok(())
    })
}

/// Releases a particle-set handle. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_free(particles: *mut SacsimParticleSet) {
    if !particles.is_null() {
        drop(Box::from_raw(particles));
    }
}

/// Writes the particle count into `out_dim`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_dim(
    particles: *const SacsimParticleSet,
    out_dim: *mut usize,
) -> SacsimStatus {
    boundary(|| {
        let particles = require(particles, "particles")?;
        let out_dim = require_out(out_dim, "out_dim")?;
        *out_dim = particles.inner.dim();
        Ok(())
    })
}

/// Copies positions and momenta into caller buffers of exactly
/// `len == dim` doubles each.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_read(
    particles: *const SacsimParticleSet,
    q_out: *mut f64,
    p_out: *mut f64,
    len: usize,
) -> SacsimStatus {
    boundary(|| {
        let particles = require(particles, "particles")?;
        if q_out.is_null() {
            return Err(FfiError::Null("q_out"));
        }
        if p_out.is_null() {
            return Err(FfiError::Null("p_out"));
        }
        expect_len("coordinate", particles.inner.dim(), len)?;
        let q = slice::from_raw_parts_mut(q_out, len);
        let p = slice::from_raw_parts_mut(p_out, len);
        q.copy_from_slice(
            particles
                .inner
                .positions()
                .as_slice()
                .expect("contiguous coordinates"),
        );
        p.copy_from_slice(
            particles
                .inner
                .momenta()
                .as_slice()
                .expect("contiguous coordinates"),
        );
        Ok(())
    })
}

/// Writes |Σ (q² + p²) − 1| into `out`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_norm_deviation(
    particles: *const SacsimParticleSet,
    out: *mut f64,
) -> SacsimStatus {
    boundary(|| {
        let particles = require(particles, "particles")?;
        let out = require_out(out, "out")?;
        *out = particles.inner.norm_deviation();
        Ok(())
    })
}

/// Reassembles the state encoded by a particle configuration.
#[no_mangle]
pub unsafe extern "C" fn sacsim_particles_to_state(
    particles: *const SacsimParticleSet,
    out: *mut *mut SacsimState,
) -> SacsimStatus {
    boundary(|| {
        let particles = require(particles, "particles")?;
        let out = require_out(out, "out")?;
        let state = from_phase_space(&particles.inner)?;
        *out = Box::into_raw(Box::new(SacsimState { inner: state }));
        Ok(())
    })
}

/// Propagates a particle configuration for time `t` under the exact
/// symplectic flow of `h` and returns the final configuration as a new
/// handle.
#[no_mangle]
pub unsafe extern "C" fn sacsim_evolve_exact(
    h: *const SacsimHamiltonian,
    particles: *const SacsimParticleSet,
    t: f64,
    out: *mut *mut SacsimParticleSet,
) -> SacsimStatus {
    boundary(|| {
        let h = require(h, "h")?;
        let particles = require(particles, "particles")?;
        let out = require_out(out, "out")?;
        let traj = evolve(&h.inner, &particles.inner, t, EvolveMethod::Exact, 1)?;
        *out = Box::into_raw(Box::new(SacsimParticleSet {
            inner: traj.final_state().clone(),
        }));
        Ok(())
    })
}

/// Runs state tomography on `state` with exact readout and copies the
/// reconstructed real description — `2(dim² − 1)` frame coordinates —
/// into `coords_out` (which must hold exactly `len` doubles). The
/// number of preparation runs consumed is written to `runs_out`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_qst_description(
    state: *const SacsimState,
    coords_out: *mut f64,
    len: usize,
    runs_out: *mut u64,
) -> SacsimStatus {
    boundary(|| {
        let state = require(state, "state")?;
        if coords_out.is_null() {
            return Err(FfiError::Null("coords_out"));
        }
        let runs_out = require_out(runs_out, "runs_out")?;
        let d = state.inner.dim();
        expect_len("description", 2 * (d * d - 1), len)?;
        let outcome = sac_qst(&state.inner)?;
        let coords = slice::from_raw_parts_mut(coords_out, len);
        coords.copy_from_slice(outcome.description());
        *runs_out = outcome.runs();
        Ok(())
    })
}

/// Writes the operator-norm distance between two dense row-major
/// `dim x dim` matrices into `out`.
#[no_mangle]
pub unsafe extern "C" fn sacsim_operator_norm_distance(
    dim: usize,
    a_re: *const f64,
    a_im: *const f64,
    b_re: *const f64,
    b_im: *const f64,
    out: *mut f64,
) -> SacsimStatus {
    boundary(|| {
        let out = require_out(out, "out")?;
        let a = matrix_from_parts(dim, a_re, a_im)?;
        let b = matrix_from_parts(dim, b_re, b_im)?;
        *out = operator_norm_distance(&a, &b)?;
        Ok(())
    })
}
