//! C ABI over the fermgrid compiler.
//!
//! Circuits cross the boundary as opaque `FgCircuit` handles owned by the
//! caller and released with `fg_circuit_free`. Every entry point returns an
//! `FgStatus`; on failure `fg_last_error` holds a message for the calling
//! thread. Panics never unwind into C: they surface as `FG_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use fermgrid::circuit::{metrics, Circuit};
use fermgrid::encodings::{convert_encoding_circuit, Encoding};
use fermgrid::fperm::{FermPermJob, Method};
use fermgrid::verify::{check_majorana_permutation, estimate_fidelity};
use fermgrid::workloads::{build_ffft_2d, FfftConfig, FfftVariant};
use fermgrid::{Error, Permutation};

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    VerificationFailed = 3,
    Internal = 4,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgMethod {
    Ours = 0,
    OnedFswap = 1,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgFfftVariant {
    FswapBaseline = 0,
    FpSandwich = 1,
    GammaSandwich = 2,
}

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum FgEncoding {
    JordanWigner = 0,
    BravyiKitaev = 1,
    Parity = 2,
}

/// Opaque compiled circuit.
pub struct FgCircuit {
    inner: Circuit,
}

/// Resource counts of a circuit after CNOT compilation.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct FgMetrics {
    pub cnot_depth: usize,
    pub gates: usize,
    pub idle: usize,
    pub qubits: usize,
    pub spacetime: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let text = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = text);
}

fn fail(status: FgStatus, msg: impl Into<String>) -> FgStatus {
    set_error(msg);
    status
}

fn from_lib(e: Error) -> FgStatus {
    fail(FgStatus::InvalidArgument, e.to_string())
}

/// Runs `f` with panics mapped to `Internal`.
fn guard(f: impl FnOnce() -> FgStatus) -> FgStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => fail(FgStatus::Internal, "internal panic"),
    }
}

fn method_of(raw: u32) -> Option<Method> {
    match raw {
        0 => Some(Method::Ours),
        1 => Some(Method::OnedFswap),
        _ => None,
    }
}

fn variant_of(raw: u32) -> Option<FfftVariant> {
    match raw {
        0 => Some(FfftVariant::FswapBaseline),
        1 => Some(FfftVariant::FpSandwich),
        2 => Some(FfftVariant::GammaSandwich),
        _ => None,
    }
}

fn encoding_of(raw: u32) -> Option<Encoding> {
    match raw {
        0 => Some(Encoding::JordanWigner),
        1 => Some(Encoding::BravyiKitaev),
        2 => Some(Encoding::Parity),
        _ => None,
    }
}

/// # Safety
/// `map` must point to `len` readable values.
unsafe fn read_permutation(map: *const usize, len: usize) -> Result<Permutation, FgStatus> {
    if map.is_null() {
        return Err(fail(FgStatus::NullPointer, "map is null"));
    }
    let slice = std::slice::from_raw_parts(map, len);
    Permutation::new(slice.to_vec()).map_err(from_lib)
}

/// # Safety
/// `out` must be a valid place for a handle pointer.
unsafe fn emit(out: *mut *mut FgCircuit, circuit: Result<Circuit, Error>) -> FgStatus {
    match circuit {
        Ok(inner) => {
            *out = Box::into_raw(Box::new(FgCircuit { inner }));
            FgStatus::Ok
        }
        Err(e) => from_lib(e),
    }
}

/// Message of the last failed call on this thread; empty when none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn fg_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Compiles the fermionic permutation sending mode `i` to `map[i]` on an
/// `side x side` grid. `method` is an `FgMethod` value.
///
/// # Safety
/// `map` must point to `len` readable values and `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_compile_fperm(
    map: *const usize,
    len: usize,
    side: usize,
    method: u32,
    out: *mut *mut FgCircuit,
) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return fail(FgStatus::NullPointer, "out is null");
        }
        let Some(method) = method_of(method) else {
            return fail(
                FgStatus::InvalidArgument,
                format!("unknown method {method}"),
            );
        };
        let perm = match read_permutation(map, len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        let job = FermPermJob {
            perm,
            side,
            method,
            seed_tag: None,
        };
        emit(out, job.compile())
    })
}

/// Builds the grid FFT. `variant` is an `FgFfftVariant` value.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_build_ffft(
    side: usize,
    variant: u32,
    out: *mut *mut FgCircuit,
) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return fail(FgStatus::NullPointer, "out is null");
        }
        let Some(variant) = variant_of(variant) else {
            return fail(
                FgStatus::InvalidArgument,
                format!("unknown variant {variant}"),
            );
        };
        emit(out, build_ffft_2d(&FfftConfig { side, variant }))
    })
}

/// Encoding conversion circuit on the order-`k` Hilbert layout. `from` and
/// `to` are `FgEncoding` values.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn fg_convert_encoding(
    from: u32,
    to: u32,
    k: u32,
    out: *mut *mut FgCircuit,
) -> FgStatus {
    guard(|| {
        if out.is_null() {
            return fail(FgStatus::NullPointer, "out is null");
        }
        let (Some(src), Some(dst)) = (encoding_of(from), encoding_of(to)) else {
            return fail(
                FgStatus::InvalidArgument,
                format!("unknown encoding pair {from}, {to}"),
            );
        };
        emit(out, convert_encoding_circuit(src, dst, k))
    })
}

/// # Safety
/// `circuit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fg_circuit_metrics(
    circuit: *const FgCircuit,
    out: *mut FgMetrics,
) -> FgStatus {
    guard(|| {
        if circuit.is_null() || out.is_null() {
            return fail(FgStatus::NullPointer, "null argument");
        }
        match metrics(&(*circuit).inner) {
            Ok(m) => {
                *out = FgMetrics {
                    cnot_depth: m.cnot_depth,
                    gates: m.gates,
                    idle: m.idle,
                    qubits: m.qubits,
                    spacetime: m.spacetime,
                };
                FgStatus::Ok
            }
            Err(e) => from_lib(e),
        }
    })
}

/// Analytic fidelity estimate at two-qubit error rate `p2q`.
///
/// # Safety
/// `m` must be readable and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fg_estimate_fidelity(
    m: *const FgMetrics,
    p2q: f64,
    out: *mut f64,
) -> FgStatus {
    guard(|| {
        if m.is_null() || out.is_null() {
            return fail(FgStatus::NullPointer, "null argument");
        }
        if !(0.0..1.0).contains(&p2q) {
            return fail(
                FgStatus::InvalidArgument,
                format!("p2q {p2q} outside [0, 1)"),
            );
        }
        let m = &*m;
        let lib = fermgrid::Metrics {
            cnot_depth: m.cnot_depth,
            gates: m.gates,
            idle: m.idle,
            qubits: m.qubits,
            spacetime: m.spacetime,
        };
        *out = estimate_fidelity(&lib, p2q);
        FgStatus::Ok
    })
}

/// Checks that the circuit conjugates every Majorana as the permutation
/// prescribes. `FG_STATUS_VERIFICATION_FAILED` when any string differs.
///
/// # Safety
/// `circuit` must be a live handle; `map` must point to `len` values.
#[no_mangle]
pub unsafe extern "C" fn fg_verify_fperm(
    circuit: *const FgCircuit,
    map: *const usize,
    len: usize,
    side: usize,
) -> FgStatus {
    guard(|| {
        if circuit.is_null() {
            return fail(FgStatus::NullPointer, "circuit is null");
        }
        let perm = match read_permutation(map, len) {
            Ok(p) => p,
            Err(s) => return s,
        };
        match check_majorana_permutation(&(*circuit).inner, &perm, side) {
            Ok(r) if r.passed() => FgStatus::Ok,
            Ok(r) => fail(
                FgStatus::VerificationFailed,
                format!("majoranas {:?} differ", r.failures),
            ),
            Err(e) => from_lib(e),
        }
    })
}

/// Circuit as JSON; release with `fg_string_free`.
///
/// # Safety
/// `circuit` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn fg_circuit_to_json(
    circuit: *const FgCircuit,
    out: *mut *mut c_char,
) -> FgStatus {
    guard(|| {
        if circuit.is_null() || out.is_null() {
            return fail(FgStatus::NullPointer, "null argument");
        }
        match CString::new((*circuit).inner.to_json()) {
            Ok(s) => {
                *out = s.into_raw();
                FgStatus::Ok
            }
            Err(_) => fail(FgStatus::Internal, "JSON contained a nul byte"),
        }
    })
}

/// # Safety
/// `s` must come from `fg_circuit_to_json` or be null.
#[no_mangle]
pub unsafe extern "C" fn fg_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// # Safety
/// `circuit` must come from this library or be null; it is invalid after.
#[no_mangle]
pub unsafe extern "C" fn fg_circuit_free(circuit: *mut FgCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Null-terminated crate version.
#[no_mangle]
pub extern "C" fn fg_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}
