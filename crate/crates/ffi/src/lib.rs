//! C ABI for the s4c workbench. Handles are opaque pointers created and
//! destroyed here; strings returned to the caller are NUL-terminated
//! copies released with [`s4c_string_free`]. Every function reports an
//! [`s4c_status`]; the first four values mirror the CLI exit codes.
#![allow(non_camel_case_types)]

use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use s4c::algebra::{self, FiniteAlgebra};
use s4c::decide::{self, DecideConfig, DecideError, Verdict};
use s4c::kripke::{self, KripkeModel, ModelError};
use s4c::prooftree;
use s4c::syntax::{self, Formula};
use s4c::wellfound;

/// Result of every call. `OK` and `INVALID` are the two verdict-carrying
/// successes; the rest are failures.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum s4c_status {
    /// Success; for decision calls, the queried statement is valid.
    S4C_OK = 0,
    /// Semantic negative: invalid, refuted, or rejected.
    S4C_INVALID = 1,
    /// A resource cap was hit before an answer was found.
    S4C_RESOURCE = 2,
    /// Malformed input: unparsable text or out-of-range indices.
    S4C_INPUT = 3,
    /// A required pointer argument was NULL.
    S4C_NULL_POINTER = 4,
    /// A string argument was not valid UTF-8.
    S4C_UTF8 = 5,
    /// An index argument was out of range.
    S4C_BOUNDS = 6,
    /// The library panicked; state is unchanged but the call did nothing.
    S4C_PANIC = 7,
}

use s4c_status::*;

/// Opaque formula handle.
pub struct s4c_formula(Formula);

/// Opaque model handle.
pub struct s4c_model(KripkeModel);

/// Opaque algebra handle.
pub struct s4c_algebra(FiniteAlgebra);

fn model_status(e: &ModelError) -> s4c_status {
    match e {
        ModelError::WorldOutOfRange(_) => S4C_BOUNDS,
        _ => S4C_INPUT,
    }
}

fn decide_status(e: &DecideError) -> s4c_status {
    match e {
        DecideError::AgentOutOfRange { .. } => S4C_INPUT,
        DecideError::ClosureTooLarge { .. } | DecideError::TooManySets { .. } => S4C_RESOURCE,
    }
}

/// Run `body`, turning panics into `S4C_PANIC` instead of unwinding into C.
fn guard(body: impl FnOnce() -> s4c_status) -> s4c_status {
    catch_unwind(AssertUnwindSafe(body)).unwrap_or(S4C_PANIC)
}

/// # Safety
/// `text` must be a NUL-terminated string or NULL.
unsafe fn utf8_in<'a>(text: *const c_char) -> Result<&'a str, s4c_status> {
    if text.is_null() {
        return Err(S4C_NULL_POINTER);
    }
    CStr::from_ptr(text).to_str().map_err(|_| S4C_UTF8)
}

fn string_out(out: *mut *mut c_char, text: String) -> s4c_status {
    match CString::new(text) {
        Ok(s) => {
            unsafe { *out = s.into_raw() };
            S4C_OK
        }
        Err(_) => S4C_INPUT,
    }
}

/// Collect a C array of formula handles into owned clones.
///
/// # Safety
/// `items` must point to `len` valid handles, or be NULL with `len == 0`.
unsafe fn formulas_in(
    items: *const *const s4c_formula,
    len: usize,
) -> Result<Vec<Formula>, s4c_status> {
    if len == 0 {
        return Ok(Vec::new());
    }
    if items.is_null() {
        return Err(S4C_NULL_POINTER);
    }
    let mut out = Vec::with_capacity(len);
    for k in 0..len {
        let p = *items.add(k);
        if p.is_null() {
            return Err(S4C_NULL_POINTER);
        }
        out.push((*p).0.clone());
    }
    Ok(out)
}

fn config(agents: u8, cap_closure: usize, cap_sets: usize) -> DecideConfig {
    let mut c = DecideConfig::new(agents);
    if cap_closure > 0 {
        c.max_closure = cap_closure;
    }
    if cap_sets > 0 {
        c.max_sets = cap_sets;
    }
    c
}

/// Library version as a static NUL-terminated string; do not free.
#[no_mangle]
pub extern "C" fn s4c_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Release a string returned by this library. NULL is a no-op.
///
/// # Safety
/// `s` must have been returned by this library and not freed before.
#[no_mangle]
pub unsafe extern "C" fn s4c_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

// ---------------------------------------------------------------------------
// Formulas
// ---------------------------------------------------------------------------

/// Parse a formula over agents `0..agents`.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_formula_parse(
    text: *const c_char,
    agents: u8,
    out: *mut *mut s4c_formula,
) -> s4c_status {
    if out.is_null() {
        return S4C_NULL_POINTER;
    }
    let text = match utf8_in(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    guard(|| match syntax::parse(text, agents) {
        Ok(f) => {
            *out = Box::into_raw(Box::new(s4c_formula(f)));
            S4C_OK
        }
        Err(_) => S4C_INPUT,
    })
}

/// Render a formula with `E`/negation sugar folded back in.
///
/// # Safety
/// `f` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_formula_render(
    f: *const s4c_formula,
    agents: u8,
    out: *mut *mut c_char,
) -> s4c_status {
    if f.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| string_out(out, syntax::render(&(*f).0, agents)))
}

/// Render a formula using only the primitive connectives.
///
/// # Safety
/// `f` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_formula_render_primitive(
    f: *const s4c_formula,
    out: *mut *mut c_char,
) -> s4c_status {
    if f.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| string_out(out, syntax::render_exact(&(*f).0)))
}

/// Number of connectives and atoms in the formula tree.
///
/// # Safety
/// `f` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_formula_size(f: *const s4c_formula, out: *mut usize) -> s4c_status {
    if f.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    *out = (*f).0.size();
    S4C_OK
}

/// Release a formula handle. NULL is a no-op.
///
/// # Safety
/// `f` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s4c_formula_free(f: *mut s4c_formula) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

// ---------------------------------------------------------------------------
// Models
// ---------------------------------------------------------------------------

/// Parse a model file.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_parse(
    text: *const c_char,
    out: *mut *mut s4c_model,
) -> s4c_status {
    if out.is_null() {
        return S4C_NULL_POINTER;
    }
    let text = match utf8_in(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    guard(|| match kripke::parse_model(text) {
        Ok(m) => {
            *out = Box::into_raw(Box::new(s4c_model(m)));
            S4C_OK
        }
        Err(_) => S4C_INPUT,
    })
}

/// Serialize a model in the plain-text model format.
///
/// # Safety
/// `m` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_write(
    m: *const s4c_model,
    out: *mut *mut c_char,
) -> s4c_status {
    if m.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| string_out(out, kripke::write_model(&(*m).0)))
}

/// Check the frame laws. `S4C_OK` when every relation is a preorder and
/// the reachability cache is exact, `S4C_INVALID` otherwise.
///
/// # Safety
/// `m` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_validate(m: *const s4c_model) -> s4c_status {
    if m.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| {
        if (*m).0.validate().is_valid() {
            S4C_OK
        } else {
            S4C_INVALID
        }
    })
}

/// Number of worlds.
///
/// # Safety
/// `m` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_world_count(
    m: *const s4c_model,
    out: *mut usize,
) -> s4c_status {
    if m.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    *out = (*m).0.world_count();
    S4C_OK
}

/// Name of world `world`.
///
/// # Safety
/// `m` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_world_name(
    m: *const s4c_model,
    world: usize,
    out: *mut *mut c_char,
) -> s4c_status {
    if m.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| {
        if world >= (*m).0.world_count() {
            return S4C_BOUNDS;
        }
        string_out(out, (*m).0.world_name(world).to_owned())
    })
}

/// Does the formula hold at one world? Writes `true`/`false` to `out`.
///
/// # Safety
/// `m` and `f` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_satisfies(
    m: *const s4c_model,
    world: usize,
    f: *const s4c_formula,
    out: *mut bool,
) -> s4c_status {
    if m.is_null() || f.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| match (*m).0.satisfies(world, &(*f).0) {
        Ok(v) => {
            *out = v;
            S4C_OK
        }
        Err(e) => model_status(&e),
    })
}

/// Does the formula hold at every world? Writes `true`/`false` to `out`.
///
/// # Safety
/// `m` and `f` must be live handles; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_globally_true(
    m: *const s4c_model,
    f: *const s4c_formula,
    out: *mut bool,
) -> s4c_status {
    if m.is_null() || f.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| match (*m).0.globally_true(&(*f).0) {
        Ok(v) => {
            *out = v;
            S4C_OK
        }
        Err(e) => model_status(&e),
    })
}

/// Release a model handle. NULL is a no-op.
///
/// # Safety
/// `m` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s4c_model_free(m: *mut s4c_model) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

// ---------------------------------------------------------------------------
// Algebras
// ---------------------------------------------------------------------------

/// Parse an algebra file.
///
/// # Safety
/// `text` must be NUL-terminated; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_parse(
    text: *const c_char,
    out: *mut *mut s4c_algebra,
) -> s4c_status {
    if out.is_null() {
        return S4C_NULL_POINTER;
    }
    let text = match utf8_in(text) {
        Ok(t) => t,
        Err(s) => return s,
    };
    guard(|| match algebra::parse_algebra(text) {
        Ok(a) => {
            *out = Box::into_raw(Box::new(s4c_algebra(a)));
            S4C_OK
        }
        Err(_) => S4C_INPUT,
    })
}

/// Serialize an algebra in the plain-text algebra format.
///
/// # Safety
/// `a` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_write(
    a: *const s4c_algebra,
    out: *mut *mut c_char,
) -> s4c_status {
    if a.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| string_out(out, algebra::write_algebra(&(*a).0)))
}

/// Check the interior-operator laws. `S4C_OK` when all hold,
/// `S4C_INVALID` otherwise.
///
/// # Safety
/// `a` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_validate(a: *const s4c_algebra) -> s4c_status {
    if a.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| {
        if (*a).0.validate().is_valid() {
            S4C_OK
        } else {
            S4C_INVALID
        }
    })
}

/// Number of elements in the carrier.
///
/// # Safety
/// `a` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_size(a: *const s4c_algebra, out: *mut usize) -> s4c_status {
    if a.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    *out = (*a).0.size();
    S4C_OK
}

/// Is the algebra standard? Checks the graph-theoretic account and
/// writes `true`/`false` to `out`.
///
/// # Safety
/// `a` must be a live handle; `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_standard(
    a: *const s4c_algebra,
    out: *mut bool,
) -> s4c_status {
    if a.is_null() || out.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| {
        *out = wellfound::check_standard(&(*a).0).standard;
        S4C_OK
    })
}

/// Release an algebra handle. NULL is a no-op.
///
/// # Safety
/// `a` must have come from this library and not be freed twice.
#[no_mangle]
pub unsafe extern "C" fn s4c_algebra_free(a: *mut s4c_algebra) {
    if !a.is_null() {
        drop(Box::from_raw(a));
    }
}

// ---------------------------------------------------------------------------
// Decision procedures
// ---------------------------------------------------------------------------

/// Decide validity. `S4C_OK` means valid. `S4C_INVALID` means refuted:
/// when `countermodel` is non-NULL it receives a refuting model, and
/// `world` (also optional) the index of the refuting world in it.
/// Passing 0 for a cap keeps the built-in default.
///
/// # Safety
/// `f` must be a live handle; `countermodel` and `world` may each be
/// NULL or valid pointers.
#[no_mangle]
pub unsafe extern "C" fn s4c_decide(
    f: *const s4c_formula,
    agents: u8,
    cap_closure: usize,
    cap_sets: usize,
    countermodel: *mut *mut s4c_model,
    world: *mut usize,
) -> s4c_status {
    if f.is_null() {
        return S4C_NULL_POINTER;
    }
    guard(|| {
        match decide::decide_valid(&(*f).0, &config(agents, cap_closure, cap_sets)) {
            Ok(Verdict::Valid) => {
                if !countermodel.is_null() {
                    *countermodel = std::ptr::null_mut();
                }
                S4C_OK
            }
            Ok(Verdict::Invalid(cm)) => {
                if !world.is_null() {
                    *world = cm.world;
                }
                if !countermodel.is_null() {
                    *countermodel = Box::into_raw(Box::new(s4c_model(cm.model)));
                }
                S4C_INVALID
            }
            Err(e) => decide_status(&e),
        }
    })
}

/// Decide whether globally-true premises `sigma` and locally-true
/// premises `gamma` force `f`. Verdict and countermodel conventions
/// follow [`s4c_decide`]; at a refuting world all of `gamma` holds and
/// `f` fails, while all of `sigma` holds everywhere.
///
/// # Safety
/// `sigma`/`gamma` must point to `n_sigma`/`n_gamma` live handles (NULL
/// allowed when the count is 0); `f` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn s4c_consequence(
    sigma: *const *const s4c_formula,
    n_sigma: usize,
    gamma: *const *const s4c_formula,
    n_gamma: usize,
    f: *const s4c_formula,
    agents: u8,
    cap_closure: usize,
    cap_sets: usize,
    countermodel: *mut *mut s4c_model,
    world: *mut usize,
) -> s4c_status {
    if f.is_null() {
        return S4C_NULL_POINTER;
    }
    let sigma = match formulas_in(sigma, n_sigma) {
        Ok(v) => v,
        Err(s) => return s,
    };
    let gamma = match formulas_in(gamma, n_gamma) {
        Ok(v) => v,
        Err(s) => return s,
    };
    guard(|| {
        match decide::derives_mixed(
            &sigma,
            &gamma,
            &(*f).0,
            &config(agents, cap_closure, cap_sets),
        ) {
            Ok(Verdict::Valid) => {
                if !countermodel.is_null() {
                    *countermodel = std::ptr::null_mut();
                }
                S4C_OK
            }
            Ok(Verdict::Invalid(cm)) => {
                if !world.is_null() {
                    *world = cm.world;
                }
                if !countermodel.is_null() {
                    *countermodel = Box::into_raw(Box::new(s4c_model(cm.model)));
                }
                S4C_INVALID
            }
            Err(e) => decide_status(&e),
        }
    })
}

/// Check a proof certificate against assumptions. `S4C_OK` means the
/// certificate is accepted; `conclusion` (optional) then receives the
/// formula it proves, rendered primitively. A certificate that fails a
/// rule check yields `S4C_INVALID`; unparsable text yields `S4C_INPUT`.
///
/// # Safety
/// `cert` must be NUL-terminated; `sigma` must point to `n_sigma` live
/// handles (NULL allowed when 0); `conclusion` may be NULL.
#[no_mangle]
pub unsafe extern "C" fn s4c_proof_check(
    cert: *const c_char,
    sigma: *const *const s4c_formula,
    n_sigma: usize,
    agents: u8,
    conclusion: *mut *mut c_char,
) -> s4c_status {
    let text = match utf8_in(cert) {
        Ok(t) => t,
        Err(s) => return s,
    };
    let sigma = match formulas_in(sigma, n_sigma) {
        Ok(v) => v,
        Err(s) => return s,
    };
    guard(|| {
        let node = match prooftree::parse_cert(text, agents) {
            Ok(n) => n,
            Err(_) => return S4C_INPUT,
        };
        match prooftree::check(&node, &sigma, agents) {
            Ok(()) => {
                if !conclusion.is_null() {
                    return string_out(conclusion, syntax::render_exact(node.formula()));
                }
                S4C_OK
            }
            Err(_) => S4C_INVALID,
        }
    })
}
