//! C ABI over `dgk`.
//!
//! Graphs and kernel bases live behind opaque handles. Every function
//! returns a [`DgkStatus`]; on failure a message for the calling thread is
//! available from [`dgk_last_error`]. Numeric results are written into
//! caller-owned `double` buffers in row-major order, and strings returned
//! by the library must be released with [`dgk_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dgk::dynamics::heat_kernel;
use dgk::ranking::{influence_vector, pagerank_resolvent};
use dgk::{
    build_matrix, parse_graph, reach_decomposition, DanglingPolicy, Digraph, Error, GraphFormat, KernelBases, Matrix,
    MatrixKind, Mode, Rational, Scalar,
};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgkStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Parse = 3,
    Disconnected = 4,
    InvalidArgument = 5,
    Numerical = 6,
    BufferTooSmall = 7,
    Panic = 8,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgkFormat {
    EdgeList = 0,
    Dot = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgkDangling {
    SelfLoop = 0,
    Uniform = 1,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DgkArithmetic {
    /// Exact rationals up to 512 vertices, f64 above.
    Auto = 0,
    Rational = 1,
    Float = 2,
}

/// A parsed, weakly connected weighted digraph.
pub struct DgkGraph {
    graph: Digraph,
}

enum Bases {
    Exact(KernelBases<Rational>),
    Float(KernelBases<f64>),
}

/// Right and left kernel bases of the random-walk Laplacian of a graph.
pub struct DgkKernels {
    graph: Digraph,
    bases: Bases,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(DgkStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Parse { .. } | Error::DuplicateEdge { .. } | Error::BadWeight { .. } => DgkStatus::Parse,
            Error::WeaklyDisconnected { .. } => DgkStatus::Disconnected,
            Error::SingularSystem
            | Error::ToleranceUnreachable { .. }
            | Error::MaxIterExceeded { .. }
            | Error::DecompositionMismatch(_)
            | Error::ZeroDegree { .. } => DgkStatus::Numerical,
            _ => DgkStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn set_last_error(message: String) {
    let c = CString::new(message.replace('\0', " ")).expect("interior nul bytes removed");
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(c));
}

fn guard(body: impl FnOnce() -> Result<(), Failure>) -> DgkStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|slot| *slot.borrow_mut() = None);
            DgkStatus::Ok
        }
        Ok(Err(Failure(status, message))) => {
            set_last_error(message);
            status
        }
        Err(_) => {
            set_last_error("internal panic".into());
            DgkStatus::Panic
        }
    }
}

fn null(what: &str) -> Failure {
    Failure(DgkStatus::NullPointer, format!("{what} is null"))
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn fill(buf: *mut f64, len: usize, values: &[f64]) -> Result<(), Failure> {
    if buf.is_null() {
        return Err(null("output buffer"));
    }
    if len < values.len() {
        return Err(Failure(
            DgkStatus::BufferTooSmall,
            format!("buffer holds {len} values, {} required", values.len()),
        ));
    }
    ptr::copy_nonoverlapping(values.as_ptr(), buf, values.len());
    Ok(())
}

fn flatten<T: Scalar>(m: &Matrix<T>) -> Vec<f64> {
    (0..m.rows())
        .flat_map(|i| m.row(i).iter().map(Scalar::to_f64).collect::<Vec<_>>())
        .collect()
}

fn policy(d: DgkDangling) -> DanglingPolicy {
    match d {
        DgkDangling::SelfLoop => DanglingPolicy::SelfLoop,
        DgkDangling::Uniform => DanglingPolicy::Uniform,
    }
}

fn mode(a: DgkArithmetic, n: usize) -> Mode {
    match a {
        DgkArithmetic::Auto => Mode::default_for(n),
        DgkArithmetic::Rational => Mode::Rational,
        DgkArithmetic::Float => Mode::Float,
    }
}

fn json_string(value: serde_json::Value) -> *mut c_char {
    CString::new(value.to_string())
        .expect("JSON has no nul bytes")
        .into_raw()
}

/// Message describing the last failure on this thread, or null after a
/// successful call. Owned by the library and valid until the next call.
#[no_mangle]
pub extern "C" fn dgk_last_error() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a nul-terminated graph description into a new handle.
///
/// # Safety
/// `text` must be a valid C string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgk_graph_parse(text: *const c_char, format: DgkFormat, out: *mut *mut DgkGraph) -> DgkStatus {
    guard(|| {
        if text.is_null() {
            return Err(null("text"));
        }
        let text = CStr::from_ptr(text)
            .to_str()
            .map_err(|e| Failure(DgkStatus::InvalidUtf8, e.to_string()))?;
        let format = match format {
            DgkFormat::EdgeList => GraphFormat::EdgeList,
            DgkFormat::Dot => GraphFormat::DotSubset,
        };
        let graph = parse_graph(text, format)?;
        reach_decomposition(&graph)?;
        write_out(out, Box::into_raw(Box::new(DgkGraph { graph })), "out")
    })
}

/// Releases a graph handle. Null is accepted.
///
/// # Safety
/// `g` must come from [`dgk_graph_parse`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgk_graph_free(g: *mut DgkGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dgk_graph_vertex_count(g: *const DgkGraph) -> usize {
    g.as_ref().map_or(0, |g| g.graph.n())
}

/// JSON reach decomposition: vertices, reaches, cabals, exclusive and
/// common parts. Free the string with [`dgk_string_free`].
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgk_graph_reaches_json(g: *const DgkGraph, out: *mut *mut c_char) -> DgkStatus {
    guard(|| {
        let g = &deref(g, "graph")?.graph;
        let dec = reach_decomposition(g)?;
        write_out(out, json_string(dec.to_json(g)), "out")
    })
}

/// Computes the kernel bases of `I − S` under the given dangling policy.
///
/// # Safety
/// `g` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_compute(
    g: *const DgkGraph,
    dangling: DgkDangling,
    arithmetic: DgkArithmetic,
    out: *mut *mut DgkKernels,
) -> DgkStatus {
    guard(|| {
        let graph = deref(g, "graph")?.graph.clone();
        let dec = reach_decomposition(&graph)?;
        let pol = Some(policy(dangling));
        let bases = match mode(arithmetic, graph.n()) {
            Mode::Rational => Bases::Exact(KernelBases::compute(
                &build_matrix::<Rational>(&graph, MatrixKind::RwLaplacian, pol)?,
                dec,
            )?),
            Mode::Float => Bases::Float(KernelBases::compute(
                &build_matrix::<f64>(&graph, MatrixKind::RwLaplacian, pol)?,
                dec,
            )?),
        };
        write_out(out, Box::into_raw(Box::new(DgkKernels { graph, bases })), "out")
    })
}

/// Releases a kernel handle. Null is accepted.
///
/// # Safety
/// `k` must come from [`dgk_kernels_compute`] and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_free(k: *mut DgkKernels) {
    if !k.is_null() {
        drop(Box::from_raw(k));
    }
}

/// Vertex count `n` and kernel dimension `k` (the number of reaches).
///
/// # Safety
/// `k` must be a live handle; `n_out` and `k_out` valid pointers.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_dims(k: *const DgkKernels, n_out: *mut usize, k_out: *mut usize) -> DgkStatus {
    guard(|| {
        let kernels = deref(k, "kernels")?;
        let (n, dim) = match &kernels.bases {
            Bases::Exact(b) => (b.n(), b.k()),
            Bases::Float(b) => (b.n(), b.k()),
        };
        write_out(n_out, n, "n_out")?;
        write_out(k_out, dim, "k_out")
    })
}

/// Right basis `Γ` as an `n × k` row-major matrix.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_gamma(k: *const DgkKernels, buf: *mut f64, len: usize) -> DgkStatus {
    guard(|| {
        let values = match &deref(k, "kernels")?.bases {
            Bases::Exact(b) => flatten(b.gamma()),
            Bases::Float(b) => flatten(b.gamma()),
        };
        fill(buf, len, &values)
    })
}

/// Left basis `Γ̄` as a `k × n` row-major matrix.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_gamma_bar(k: *const DgkKernels, buf: *mut f64, len: usize) -> DgkStatus {
    guard(|| {
        let values = match &deref(k, "kernels")?.bases {
            Bases::Exact(b) => flatten(b.gamma_bar()),
            Bases::Float(b) => flatten(b.gamma_bar()),
        };
        fill(buf, len, &values)
    })
}

/// Projection `Π = ΓΓ̄` as an `n × n` row-major matrix.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_projection(k: *const DgkKernels, buf: *mut f64, len: usize) -> DgkStatus {
    guard(|| {
        let values = match &deref(k, "kernels")?.bases {
            Bases::Exact(b) => flatten(b.projection()),
            Bases::Float(b) => flatten(b.projection()),
        };
        fill(buf, len, &values)
    })
}

/// Influence vector `(1ᵀ/n)Π` of length `n`.
///
/// # Safety
/// `buf` must hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_influence(k: *const DgkKernels, buf: *mut f64, len: usize) -> DgkStatus {
    guard(|| {
        let values: Vec<f64> = match &deref(k, "kernels")?.bases {
            Bases::Exact(b) => influence_vector(b).as_slice().iter().map(Scalar::to_f64).collect(),
            Bases::Float(b) => influence_vector(b).into_inner(),
        };
        fill(buf, len, &values)
    })
}

/// Kernel bases as JSON, with exact entries written as `"p/q"` strings.
/// Free the string with [`dgk_string_free`].
///
/// # Safety
/// `k` must be a live handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn dgk_kernels_json(k: *const DgkKernels, out: *mut *mut c_char) -> DgkStatus {
    guard(|| {
        let kernels = deref(k, "kernels")?;
        let value = match &kernels.bases {
            Bases::Exact(b) => b.to_json(&kernels.graph),
            Bases::Float(b) => b.to_json(&kernels.graph),
        };
        write_out(out, json_string(value), "out")
    })
}

/// Pagerank `(α/n)1ᵀ(αI + 𝓛)⁻¹` with `α = 1/β − 1`, length `n`.
///
/// # Safety
/// `g` must be a live handle and `buf` hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_pagerank(
    g: *const DgkGraph,
    beta: f64,
    dangling: DgkDangling,
    buf: *mut f64,
    len: usize,
) -> DgkStatus {
    guard(|| {
        let graph = &deref(g, "graph")?.graph;
        if !(beta > 0.0 && beta < 1.0) {
            return Err(Error::BadBeta.into());
        }
        let l = build_matrix::<f64>(graph, MatrixKind::RwLaplacian, Some(policy(dangling)))?;
        let p = pagerank_resolvent(l.data(), &(1.0 / beta - 1.0))?;
        fill(buf, len, p.as_slice())
    })
}

/// Heat kernel `e^{−𝓛t}` as an `n × n` row-major matrix.
///
/// # Safety
/// `g` must be a live handle and `buf` hold at least `len` doubles.
#[no_mangle]
pub unsafe extern "C" fn dgk_heat_kernel(
    g: *const DgkGraph,
    t: f64,
    tol: f64,
    dangling: DgkDangling,
    buf: *mut f64,
    len: usize,
) -> DgkStatus {
    guard(|| {
        let graph = &deref(g, "graph")?.graph;
        let l = build_matrix::<f64>(graph, MatrixKind::RwLaplacian, Some(policy(dangling)))?;
        fill(buf, len, &flatten(&heat_kernel(l.data(), t, tol)?))
    })
}

/// Releases a string returned by this library. Null is accepted.
///
/// # Safety
/// `s` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dgk_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
