//! C ABI over `ansatz-lab`.
//!
//! Every fallible call returns an `AL_*` status code. On failure the message
//! is kept per thread; fetch it with [`al_last_error`]. Handles are opaque
//! and must be released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ansatz_lab::circuit::{build_ansatz, AnsatzSpec, Circuit, Family};
use ansatz_lab::entangle::{layer_to_gf2, order, CxLayer, DEFAULT_ORDER_CAP};
use ansatz_lab::qsim::circuit_state;
use ansatz_lab::rank::{expressive_rank, Mode, RankOptions};
use ansatz_lab::reduce::combine_parameters;
use ansatz_lab::vqa::{exact_minimum, expectation, load_hamiltonian, optimize, Observable, OptimizeConfig};

pub const AL_OK: i32 = 0;
pub const AL_ERR_NULL: i32 = 1;
pub const AL_ERR_INVALID: i32 = 2;
pub const AL_ERR_IO: i32 = 3;
pub const AL_ERR_BUFFER: i32 = 4;
pub const AL_ERR_PANIC: i32 = 5;

/// Built or parsed circuit.
pub struct AlCircuit(Circuit);

/// Pauli-sum observable.
pub struct AlObservable(Observable);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(i32, String);

impl Failure {
    fn invalid(e: impl std::fmt::Display) -> Self {
        Failure(AL_ERR_INVALID, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            AL_OK
        }
        Ok(Err(Failure(code, msg))) => {
            set_error(&msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            AL_ERR_PANIC
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(AL_ERR_NULL, format!("{name} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Failure::invalid(format!("{name} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| Failure(AL_ERR_NULL, format!("{name} is null")))
}

unsafe fn out_arg<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| Failure(AL_ERR_NULL, format!("{name} is null")))
}

unsafe fn slice_arg<'a, T>(p: *const T, len: usize, name: &str) -> Result<&'a [T], Failure> {
    if len == 0 {
        return Ok(&[]);
    }
    if p.is_null() {
        return Err(Failure(AL_ERR_NULL, format!("{name} is null")));
    }
    Ok(std::slice::from_raw_parts(p, len))
}

/// Library version, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn al_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copies the calling thread's last error message into `buf` (truncated,
/// always NUL-terminated when `len > 0`). Returns the full message length
/// excluding the terminator.
///
/// # Safety
/// `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn al_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let e = e.borrow();
        let bytes = e.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr().cast(), buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Builds an ansatz. `family` is a slug such as `"rx-rz-cx-a"`.
///
/// # Safety
/// `family` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_build(
    family: *const c_char,
    n_qubits: usize,
    layers: usize,
    out: *mut *mut AlCircuit,
) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let f: Family = str_arg(family, "family")?.parse().map_err(Failure::invalid)?;
        let c = build_ansatz(&AnsatzSpec::new(f, n_qubits, layers)).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(AlCircuit(c)));
        Ok(())
    })
}

/// Parses a circuit from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_from_json(json: *const c_char, out: *mut *mut AlCircuit) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let c = Circuit::from_json(str_arg(json, "json")?).map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(AlCircuit(c)));
        Ok(())
    })
}

/// Writes the circuit JSON into `buf`. `needed` receives the byte length
/// including the terminator; `AL_ERR_BUFFER` if `len` is smaller.
///
/// # Safety
/// `c` must come from this library; `buf` must be null or valid for `len` bytes.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_to_json(
    c: *const AlCircuit,
    buf: *mut c_char,
    len: usize,
    needed: *mut usize,
) -> i32 {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let text = c.0.to_json();
        if let Some(n) = needed.as_mut() {
            *n = text.len() + 1;
        }
        if buf.is_null() || len < text.len() + 1 {
            return Err(Failure(AL_ERR_BUFFER, format!("need {} bytes", text.len() + 1)));
        }
        ptr::copy_nonoverlapping(text.as_ptr().cast(), buf, text.len());
        *buf.add(text.len()) = 0;
        Ok(())
    })
}

/// # Safety
/// `c` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_free(c: *mut AlCircuit) {
    if !c.is_null() {
        drop(Box::from_raw(c));
    }
}

/// Raw parameter count, CX count and entanglement layers.
///
/// # Safety
/// `c` must come from this library; the out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_resources(
    c: *const AlCircuit,
    params: *mut usize,
    cx: *mut usize,
    layers: *mut usize,
) -> i32 {
    guard(|| {
        let r = ref_arg(c, "circuit")?.0.resources();
        *out_arg(params, "params")? = r.params;
        *out_arg(cx, "cx")? = r.cx;
        *out_arg(layers, "layers")? = r.layers;
        Ok(())
    })
}

/// Effective parameter count after the exact rewrite rules.
///
/// # Safety
/// `c` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_effective_params(c: *const AlCircuit, out: *mut usize) -> i32 {
    guard(|| {
        let rep = combine_parameters(&ref_arg(c, "circuit")?.0).map_err(Failure::invalid)?;
        *out_arg(out, "out")? = rep.effective_count;
        Ok(())
    })
}

/// Jacobian rank; `state_mode` nonzero ranks the output state instead of the unitary.
///
/// # Safety
/// `c` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_circuit_rank(
    c: *const AlCircuit,
    state_mode: i32,
    seeds: usize,
    seed: u64,
    rel_tol: f64,
    out: *mut usize,
) -> i32 {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let mode = if state_mode != 0 { Mode::State } else { Mode::Unitary };
        let opts = RankOptions { mode, seeds, base_seed: seed, rel_tol };
        let r = expressive_rank(&c.0, &opts).map_err(Failure::invalid)?;
        *out_arg(out, "out")? = r.rank;
        Ok(())
    })
}

/// Parses a Pauli-sum text (`offset c` and `c PAULIS` lines).
///
/// # Safety
/// `text` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_observable_parse(text: *const c_char, out: *mut *mut AlObservable) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let o: Observable = str_arg(text, "text")?.parse().map_err(Failure::invalid)?;
        *out = Box::into_raw(Box::new(AlObservable(o)));
        Ok(())
    })
}

/// Loads a Pauli-sum file.
///
/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_observable_load(path: *const c_char, out: *mut *mut AlObservable) -> i32 {
    guard(|| {
        let out = out_arg(out, "out")?;
        let o = load_hamiltonian(str_arg(path, "path")?).map_err(|e| match e {
            ansatz_lab::vqa::VqaError::Io(m) => Failure(AL_ERR_IO, m),
            e => Failure::invalid(e),
        })?;
        *out = Box::into_raw(Box::new(AlObservable(o)));
        Ok(())
    })
}

/// # Safety
/// `o` must be null or come from this library, and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn al_observable_free(o: *mut AlObservable) {
    if !o.is_null() {
        drop(Box::from_raw(o));
    }
}

/// # Safety
/// `o` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_observable_n_qubits(o: *const AlObservable, out: *mut usize) -> i32 {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(o, "observable")?.0.n_qubits();
        Ok(())
    })
}

/// Exact minimum eigenvalue.
///
/// # Safety
/// `o` must come from this library; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_observable_exact_minimum(o: *const AlObservable, out: *mut f64) -> i32 {
    guard(|| {
        let m = exact_minimum(&ref_arg(o, "observable")?.0).map_err(Failure::invalid)?;
        *out_arg(out, "out")? = m.energy;
        Ok(())
    })
}

/// `⟨ψ(θ)|O|ψ(θ)⟩` for the circuit applied to `|0…0⟩`.
///
/// # Safety
/// Handles must come from this library; `theta` must hold `theta_len` values.
#[no_mangle]
pub unsafe extern "C" fn al_expectation(
    c: *const AlCircuit,
    o: *const AlObservable,
    theta: *const f64,
    theta_len: usize,
    out: *mut f64,
) -> i32 {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let o = ref_arg(o, "observable")?;
        let th = slice_arg(theta, theta_len, "theta")?;
        let s = circuit_state(&c.0, th).map_err(Failure::invalid)?;
        *out_arg(out, "out")? = expectation(&s, &o.0).map_err(Failure::invalid)?;
        Ok(())
    })
}

/// Multistart Nelder–Mead minimization of `⟨O⟩`. `max_evals == 0` selects
/// the default budget. Writes the best energy and `ε = |E_a − E|/|E|`
/// (absolute when `E = 0`).
///
/// # Safety
/// Handles must come from this library; out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_optimize(
    c: *const AlCircuit,
    o: *const AlObservable,
    restarts: usize,
    seed: u64,
    max_evals: usize,
    energy: *mut f64,
    epsilon: *mut f64,
) -> i32 {
    guard(|| {
        let c = ref_arg(c, "circuit")?;
        let o = ref_arg(o, "observable")?;
        let energy = out_arg(energy, "energy")?;
        let epsilon = out_arg(epsilon, "epsilon")?;
        let cfg = OptimizeConfig {
            restarts,
            seed,
            max_evals: (max_evals > 0).then_some(max_evals),
            ..OptimizeConfig::default()
        };
        let r = optimize(&c.0, &o.0, &cfg).map_err(Failure::invalid)?;
        *energy = r.e_a;
        *epsilon = r.epsilon;
        Ok(())
    })
}

/// Order of the CX layer given as `n_pairs` (control, target) pairs stored
/// flat in `pairs`.
///
/// # Safety
/// `pairs` must hold `2·n_pairs` values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn al_layer_order(pairs: *const usize, n_pairs: usize, n_qubits: usize, out: *mut u64) -> i32 {
    guard(|| {
        let flat = slice_arg(pairs, 2 * n_pairs, "pairs")?;
        let layer = CxLayer::new(flat.chunks_exact(2).map(|p| (p[0], p[1])).collect());
        let m = layer_to_gf2(&layer, n_qubits).map_err(Failure::invalid)?;
        *out_arg(out, "out")? = order(&m, DEFAULT_ORDER_CAP).map_err(Failure::invalid)?;
        Ok(())
    })
}
