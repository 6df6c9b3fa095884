//! C ABI over the qbattery library.
//!
//! Objects are opaque handles created by constructor functions and released with the
//! matching `qb_*_free`. Every fallible function returns a [`QbStatus`]; on failure a
//! description is available from [`qb_last_error`] on the same thread. Panics never cross
//! the boundary: they are reported as [`QbStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use qbattery::battery::{
    charging_observable, classify_protocol, LadderHamiltonian, Verdict, CLASSIFY_TOL,
};
use qbattery::haar::{haar_average_exact, haar_average_mc, sample_haar_unitary};
use qbattery::protocols::{
    build_drive, closed_form_unitary, evolve_drive, induced_channel, ControlQubitState,
};
use qbattery::quantum::{QuantumChannel, UnitaryOperator};
use qbattery::topology::{flatten_composite, flow_index, BandedBlockUnitary, FlowIndexReport};
use qbattery::Error;

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    DimensionMismatch = 3,
    NotUnitary = 4,
    IncompleteChannel = 5,
    BandTooWide = 6,
    BufferTooSmall = 7,
    Panic = 8,
    Internal = 9,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum QbVerdict {
    UniversallyCharging = 0,
    UniversallyDischarging = 1,
    Neither = 2,
    Trivial = 3,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbClassification {
    pub verdict: QbVerdict,
    pub min_eig: f64,
    pub max_eig: f64,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbHaarEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub samples: usize,
}

#[repr(C)]
#[derive(Debug, Clone, Copy)]
pub struct QbFlowIndex {
    pub raw_value: f64,
    pub rounded: i64,
    pub residual: f64,
    pub band: usize,
    pub unitarity_warning: bool,
}

/// Energy ladder (opaque).
pub struct QbLadder(LadderHamiltonian);
/// Unitary operator (opaque).
pub struct QbUnitary(UnitaryOperator);
/// CPTP channel in Kraus form (opaque).
pub struct QbChannel(QuantumChannel);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_last_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &Error) -> QbStatus {
    match e {
        Error::Dimension(_) => QbStatus::DimensionMismatch,
        Error::Contract(_) | Error::InvalidLadder(_) | Error::Config(_) => {
            QbStatus::InvalidArgument
        }
        Error::NotUnitary { .. } => QbStatus::NotUnitary,
        Error::IncompleteChannel { .. } => QbStatus::IncompleteChannel,
        Error::BandTooWide { .. } => QbStatus::BandTooWide,
        Error::Io(_) | Error::Json(_) => QbStatus::Internal,
    }
}

/// Runs `f`, converting errors and panics to status codes.
fn guard(f: impl FnOnce() -> Result<(), (QbStatus, String)>) -> QbStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error("");
            QbStatus::Ok
        }
        Ok(Err((status, msg))) => {
            set_last_error(&msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_last_error(&msg);
            QbStatus::Panic
        }
    }
}

fn lib<T>(r: qbattery::Result<T>) -> Result<T, (QbStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (QbStatus, String) {
    (QbStatus::NullPointer, format!("{what} is null"))
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, (QbStatus, String)> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), (QbStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn write<T>(out: *mut T, value: T) -> Result<(), (QbStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = value;
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn qb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread (empty after a success). The pointer stays
/// valid until the next call into the library on the same thread.
#[no_mangle]
pub extern "C" fn qb_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Ladder with explicit strictly increasing energies.
///
/// # Safety
/// `energies` must point to `n` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_ladder_finite(
    energies: *const f64,
    n: usize,
    out: *mut *mut QbLadder,
) -> QbStatus {
    guard(|| {
        if energies.is_null() {
            return Err(null("energies"));
        }
        let e = std::slice::from_raw_parts(energies, n).to_vec();
        put(out, QbLadder(lib(LadderHamiltonian::finite(e))?))
    })
}

/// Ladder `0, d, 2d, ...` with `n` levels.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_ladder_uniform(
    n: usize,
    spacing: f64,
    out: *mut *mut QbLadder,
) -> QbStatus {
    guard(|| put(out, QbLadder(lib(LadderHamiltonian::uniform(n, spacing))?)))
}

/// Double-sided window with labels `-half_width..=half_width` and energies `label * spacing`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_ladder_double_sided(
    half_width: usize,
    spacing: f64,
    out: *mut *mut QbLadder,
) -> QbStatus {
    guard(|| {
        put(
            out,
            QbLadder(lib(LadderHamiltonian::double_sided(half_width, spacing))?),
        )
    })
}

/// # Safety
/// `ladder` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_ladder_dim(ladder: *const QbLadder, out: *mut usize) -> QbStatus {
    guard(|| write(out, get(ladder, "ladder")?.0.dim()))
}

/// # Safety
/// `ladder` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_ladder_free(ladder: *mut QbLadder) {
    if !ladder.is_null() {
        drop(Box::from_raw(ladder));
    }
}

/// Battery-qubit unitary obtained by time-evolving the two-segment drive.
///
/// # Safety
/// `ladder` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_protocol_unitary(
    ladder: *const QbLadder,
    out: *mut *mut QbUnitary,
) -> QbStatus {
    guard(|| {
        let h = &get(ladder, "ladder")?.0;
        put(out, QbUnitary(lib(evolve_drive(&build_drive(h)))?))
    })
}

/// Permutation-with-phases form of the drive unitary.
///
/// # Safety
/// `ladder` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_closed_form_unitary(
    ladder: *const QbLadder,
    out: *mut *mut QbUnitary,
) -> QbStatus {
    guard(|| {
        put(
            out,
            QbUnitary(closed_form_unitary(&get(ladder, "ladder")?.0)),
        )
    })
}

/// Haar-random `d x d` unitary drawn from `seed`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_haar_unitary(
    d: usize,
    seed: u64,
    out: *mut *mut QbUnitary,
) -> QbStatus {
    guard(|| {
        if d == 0 {
            return Err((
                QbStatus::InvalidArgument,
                "dimension must be positive".into(),
            ));
        }
        put(out, QbUnitary(sample_haar_unitary(d, seed)))
    })
}

/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_unitary_dim(u: *const QbUnitary, out: *mut usize) -> QbStatus {
    guard(|| write(out, get(u, "unitary")?.0.dim()))
}

/// Copies the entries in row-major order into `re` and `im`, each of length `len >= dim^2`.
///
/// # Safety
/// `u` must be a live handle; `re` and `im` must point to `len` writable doubles.
#[no_mangle]
pub unsafe extern "C" fn qb_unitary_entries(
    u: *const QbUnitary,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> QbStatus {
    guard(|| {
        let m = get(u, "unitary")?.0.matrix();
        let d = m.nrows();
        if re.is_null() || im.is_null() {
            return Err(null("entry buffer"));
        }
        if len < d * d {
            return Err((
                QbStatus::BufferTooSmall,
                format!("need {} entries, got {len}", d * d),
            ));
        }
        let re = std::slice::from_raw_parts_mut(re, len);
        let im = std::slice::from_raw_parts_mut(im, len);
        for i in 0..d {
            for j in 0..d {
                re[i * d + j] = m[(i, j)].re;
                im[i * d + j] = m[(i, j)].im;
            }
        }
        Ok(())
    })
}

/// # Safety
/// `u` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_unitary_free(u: *mut QbUnitary) {
    if !u.is_null() {
        drop(Box::from_raw(u));
    }
}

/// Battery channel induced by a battery-qubit unitary with the qubit prepared in
/// `cos(theta/2)|up> + e^{i phi} sin(theta/2)|down>`.
///
/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_induced_channel(
    u: *const QbUnitary,
    theta: f64,
    phi: f64,
    out: *mut *mut QbChannel,
) -> QbStatus {
    guard(|| {
        let u = &get(u, "unitary")?.0;
        let chi = lib(ControlQubitState::new(theta, phi))?;
        put(out, QbChannel(lib(induced_channel(u, &chi))?))
    })
}

/// # Safety
/// `u` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_from_unitary(
    u: *const QbUnitary,
    out: *mut *mut QbChannel,
) -> QbStatus {
    guard(|| {
        put(
            out,
            QbChannel(QuantumChannel::from_unitary(&get(u, "unitary")?.0)),
        )
    })
}

/// # Safety
/// `ch` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_kraus_count(ch: *const QbChannel, out: *mut usize) -> QbStatus {
    guard(|| write(out, get(ch, "channel")?.0.kraus().len()))
}

/// # Safety
/// `ch` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn qb_channel_free(ch: *mut QbChannel) {
    if !ch.is_null() {
        drop(Box::from_raw(ch));
    }
}

/// Spectral classification of the channel's charging observable on `ladder`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_classify(
    ch: *const QbChannel,
    ladder: *const QbLadder,
    out: *mut QbClassification,
) -> QbStatus {
    guard(|| {
        let ch = &get(ch, "channel")?.0;
        let h = &get(ladder, "ladder")?.0;
        let q = lib(charging_observable(ch, h))?;
        let c = lib(classify_protocol(&q, CLASSIFY_TOL))?;
        let verdict = match c.verdict {
            Verdict::UniversallyCharging => QbVerdict::UniversallyCharging,
            Verdict::UniversallyDischarging => QbVerdict::UniversallyDischarging,
            Verdict::Neither => QbVerdict::Neither,
            Verdict::Trivial => QbVerdict::Trivial,
        };
        write(
            out,
            QbClassification {
                verdict,
                min_eig: c.min_eig,
                max_eig: c.max_eig,
            },
        )
    })
}

/// Exact Haar average of the energy change.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_haar_exact(
    ch: *const QbChannel,
    ladder: *const QbLadder,
    out: *mut f64,
) -> QbStatus {
    guard(|| {
        let v = lib(haar_average_exact(
            &get(ch, "channel")?.0,
            &get(ladder, "ladder")?.0,
        ))?;
        write(out, v)
    })
}

/// Monte Carlo Haar average starting from the energy eigenstate `initial_level`.
///
/// # Safety
/// Handles must be live; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_haar_mc(
    ch: *const QbChannel,
    ladder: *const QbLadder,
    initial_level: usize,
    samples: usize,
    seed: u64,
    out: *mut QbHaarEstimate,
) -> QbStatus {
    guard(|| {
        let ch = &get(ch, "channel")?.0;
        let h = &get(ladder, "ladder")?.0;
        if initial_level >= h.dim() {
            return Err((
                QbStatus::InvalidArgument,
                format!("level {initial_level} outside ladder"),
            ));
        }
        let est = lib(haar_average_mc(
            ch,
            h,
            &h.projector(initial_level),
            samples,
            seed,
        ))?;
        write(
            out,
            QbHaarEstimate {
                mean: est.mean,
                std_error: est.stderr,
                samples: est.samples,
            },
        )
    })
}

fn flow_out(r: FlowIndexReport) -> QbFlowIndex {
    QbFlowIndex {
        raw_value: r.raw_value,
        rounded: r.rounded,
        residual: r.residual,
        band: r.band,
        unitarity_warning: r.unitarity_warning,
    }
}

/// Flow index of `T^power (x) I_internal_dim` on a window of half width `half_width`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_flow_index_shift(
    half_width: usize,
    internal_dim: usize,
    power: i64,
    cut: i64,
    out: *mut QbFlowIndex,
) -> QbStatus {
    guard(|| {
        let u = lib(BandedBlockUnitary::shift_power(
            half_width,
            internal_dim,
            power,
        ))?;
        write(out, flow_out(lib(flow_index(&u, cut))?))
    })
}

/// Flow index of the battery-qubit drive on a double-sided window.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn qb_flow_index_composite(
    half_width: usize,
    spacing: f64,
    cut: i64,
    out: *mut QbFlowIndex,
) -> QbStatus {
    guard(|| {
        let h = lib(LadderHamiltonian::double_sided(half_width, spacing))?;
        let u = lib(evolve_drive(&build_drive(&h)))?;
        let banded = lib(flatten_composite(&u, &h))?;
        write(out, flow_out(lib(flow_index(&banded, cut))?))
    })
}
