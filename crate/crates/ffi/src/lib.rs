//! C interface to `unimap`.
//!
//! Every function returns a [`UnimapStatus`]; results go through out
//! pointers. Samplers and graphs are opaque handles released with their
//! `_free` function. Strings are copied into caller buffers: the required
//! length (without the terminating NUL) is always stored in `*out_len`,
//! and `UNIMAP_STATUS_BUFFER_TOO_SMALL` is returned when `cap` cannot hold
//! it plus the NUL. The message of the last failure on the calling thread
//! is available from [`unimap_last_error`].

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};

use unimap::maps::{PlaneTree, RootedGraph};
use unimap::sampler::UnicellularSampler;
use unimap::Error;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum UnimapStatus {
    Ok = 0,
    NullPointer = 1,
    OutOfRange = 2,
    Parity = 3,
    CapExceeded = 4,
    NoMaps = 5,
    BadCode = 6,
    Invalid = 7,
    BufferTooSmall = 8,
    Internal = 9,
    Panic = 10,
}

/// Sampler of uniform unicellular maps with its own random stream.
pub struct UnimapSampler {
    inner: UnicellularSampler,
    rng: ChaCha8Rng,
}

/// Underlying rooted graph of a sampled map.
pub struct UnimapGraph {
    inner: RootedGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> UnimapStatus {
    match e {
        Error::OutOfRange(_) => UnimapStatus::OutOfRange,
        Error::Parity(_) => UnimapStatus::Parity,
        Error::CapExceeded { .. } => UnimapStatus::CapExceeded,
        Error::NoMaps { .. } => UnimapStatus::NoMaps,
        Error::BadCode(_) => UnimapStatus::BadCode,
        Error::Internal(_) => UnimapStatus::Internal,
        _ => UnimapStatus::Invalid,
    }
}

/// Runs `f`, recording errors and turning panics into a status.
fn guard(f: impl FnOnce() -> Result<(), UnimapStatus>) -> UnimapStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => UnimapStatus::Ok,
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("panic inside unimap".into());
            UnimapStatus::Panic
        }
    }
}

fn lib<T>(r: unimap::Result<T>) -> Result<T, UnimapStatus> {
    r.map_err(|e| {
        set_error(e.to_string());
        status_of(&e)
    })
}

fn non_null<T>(p: *const T, what: &str) -> Result<(), UnimapStatus> {
    if p.is_null() {
        set_error(format!("{what} is null"));
        return Err(UnimapStatus::NullPointer);
    }
    Ok(())
}

/// # Safety
/// `buf` must be null or valid for `cap` bytes; `out_len` must be valid.
unsafe fn write_str(s: &str, buf: *mut c_char, cap: usize, out_len: *mut usize) -> Result<(), UnimapStatus> {
    non_null(out_len, "out_len")?;
    *out_len = s.len();
    if buf.is_null() || cap < s.len() + 1 {
        set_error(format!("buffer of {cap} bytes, need {}", s.len() + 1));
        return Err(UnimapStatus::BufferTooSmall);
    }
    std::ptr::copy_nonoverlapping(s.as_ptr(), buf as *mut u8, s.len());
    *buf.add(s.len()) = 0;
    Ok(())
}

/// # Safety
/// `p` must be a valid NUL-terminated string.
unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, UnimapStatus> {
    non_null(p, "string argument")?;
    CStr::from_ptr(p).to_str().map_err(|_| {
        set_error("string argument is not UTF-8".into());
        UnimapStatus::Invalid
    })
}

/// Copies the message of the last failure on this thread.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_last_error(buf: *mut c_char, cap: usize, out_len: *mut usize) -> UnimapStatus {
    let msg = LAST_ERROR.with(|e| e.borrow().clone());
    guard(|| write_str(&msg, buf, cap, out_len))
}

/// Library build identifier, a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn unimap_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr() as *const c_char
}

/// Number of rooted unicellular maps with `n` edges and genus `g`, in decimal.
///
/// # Safety
/// `buf` must be null or valid for `cap` bytes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_count(
    n: usize,
    g: usize,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> UnimapStatus {
    guard(|| {
        let count = unimap::exact::lehman_walsh_count(n, g);
        write_str(&count.to_string(), buf, cap, out_len)
    })
}

/// `beta_theta`, the root of `(1 - b^2) atanh(b) / b = 1 - 2 theta`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn unimap_solve_beta(theta: f64, out: *mut f64) -> UnimapStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lib(unimap::asympt::solve_beta_theta(theta))?;
        Ok(())
    })
}

/// Limit probability that the root has degree `d` when `g / n -> theta`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn unimap_root_degree_limit_pmf(theta: f64, d: usize, out: *mut f64) -> UnimapStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = lib(unimap::gw::root_degree_limit_pmf(theta, d))?;
        Ok(())
    })
}

/// Probability that the radius-`r` ball of the infinite limit tree is the
/// plane tree `code` of height `r`.
///
/// # Safety
/// `code` must be a NUL-terminated string; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn unimap_ball_probability(xi: f64, code: *const c_char, out: *mut f64) -> UnimapStatus {
    guard(|| {
        non_null(out, "out")?;
        let t = lib(PlaneTree::from_code(read_str(code)?))?;
        *out = lib(unimap::gw::ball_probability(xi, &t))?;
        Ok(())
    })
}

/// Exhaustive census: `counts[g]` maps of genus `g` with `n` edges,
/// `*out_len = n / 2 + 1` entries.
///
/// # Safety
/// `counts` must be null or valid for `cap` writes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_census(n: usize, counts: *mut u64, cap: usize, out_len: *mut usize) -> UnimapStatus {
    guard(|| {
        non_null(out_len, "out_len")?;
        let c = lib(unimap::oracle::census(n))?;
        let len = n / 2 + 1;
        *out_len = len;
        if counts.is_null() || cap < len {
            set_error(format!("buffer of {cap} entries, need {len}"));
            return Err(UnimapStatus::BufferTooSmall);
        }
        for g in 0..len {
            *counts.add(g) = c.get(g);
        }
        Ok(())
    })
}

/// New sampler of maps with `n` edges and genus `g`, seeded with `seed`.
///
/// # Safety
/// `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn unimap_sampler_new(n: usize, g: usize, seed: u64, out: *mut *mut UnimapSampler) -> UnimapStatus {
    guard(|| {
        non_null(out, "out")?;
        let inner = lib(UnicellularSampler::new(n, g))?;
        let s = UnimapSampler {
            inner,
            rng: ChaCha8Rng::seed_from_u64(seed),
        };
        *out = Box::into_raw(Box::new(s));
        Ok(())
    })
}

/// # Safety
/// `sampler` must be null or come from [`unimap_sampler_new`], freed once.
#[no_mangle]
pub unsafe extern "C" fn unimap_sampler_free(sampler: *mut UnimapSampler) {
    if !sampler.is_null() {
        drop(Box::from_raw(sampler));
    }
}

/// Draws the next map; the graph handle belongs to the caller.
///
/// # Safety
/// `sampler` must be a live handle; `out` must be valid for writes.
#[no_mangle]
pub unsafe extern "C" fn unimap_sampler_next(sampler: *mut UnimapSampler, out: *mut *mut UnimapGraph) -> UnimapStatus {
    guard(|| {
        non_null(sampler, "sampler")?;
        non_null(out, "out")?;
        let s = &mut *sampler;
        let sample = s.inner.sample(&mut s.rng);
        *out = Box::into_raw(Box::new(UnimapGraph { inner: sample.graph }));
        Ok(())
    })
}

/// # Safety
/// `graph` must be null or come from [`unimap_sampler_next`], freed once.
#[no_mangle]
pub unsafe extern "C" fn unimap_graph_free(graph: *mut UnimapGraph) {
    if !graph.is_null() {
        drop(Box::from_raw(graph));
    }
}

/// Vertex count, edge count and root degree (loops count twice).
///
/// # Safety
/// `graph` must be a live handle; the out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_graph_stats(
    graph: *const UnimapGraph,
    vertices: *mut usize,
    edges: *mut usize,
    root_degree: *mut usize,
) -> UnimapStatus {
    guard(|| {
        non_null(graph, "graph")?;
        non_null(vertices, "vertices")?;
        non_null(edges, "edges")?;
        non_null(root_degree, "root_degree")?;
        let g = &(*graph).inner;
        *vertices = g.n_vertices();
        *edges = g.n_edges();
        *root_degree = g.root_degree();
        Ok(())
    })
}

/// Edge endpoints as `2 * edges` entries `a0, b0, a1, b1, ...`.
///
/// # Safety
/// `ends` must be null or valid for `cap` writes; `out_len` must be valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_graph_edges(
    graph: *const UnimapGraph,
    ends: *mut usize,
    cap: usize,
    out_len: *mut usize,
) -> UnimapStatus {
    guard(|| {
        non_null(graph, "graph")?;
        non_null(out_len, "out_len")?;
        let g = &(*graph).inner;
        let len = 2 * g.n_edges();
        *out_len = len;
        if ends.is_null() || cap < len {
            set_error(format!("buffer of {cap} entries, need {len}"));
            return Err(UnimapStatus::BufferTooSmall);
        }
        for (i, e) in g.edges().iter().enumerate() {
            *ends.add(2 * i) = e[0];
            *ends.add(2 * i + 1) = e[1];
        }
        Ok(())
    })
}

/// Unordered shape code of the radius-`r` ball, or `UNIMAP_STATUS_INVALID`
/// when the ball is not a tree.
///
/// # Safety
/// `graph` must be a live handle; `buf` null or valid for `cap` bytes;
/// `out_len` valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_graph_ball_code(
    graph: *const UnimapGraph,
    r: usize,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> UnimapStatus {
    guard(|| {
        non_null(graph, "graph")?;
        let code = lib((*graph).inner.ball(r).unordered_code())?;
        write_str(&code, buf, cap, out_len)
    })
}

/// The graph as JSON: `{"v":..,"edges":[[a,b],..],"root_vertex":..,"root_edge":..}`.
///
/// # Safety
/// `graph` must be a live handle; `buf` null or valid for `cap` bytes;
/// `out_len` valid.
#[no_mangle]
pub unsafe extern "C" fn unimap_graph_to_json(
    graph: *const UnimapGraph,
    buf: *mut c_char,
    cap: usize,
    out_len: *mut usize,
) -> UnimapStatus {
    guard(|| {
        non_null(graph, "graph")?;
        let json = serde_json::to_string(&(*graph).inner).map_err(|e| {
            set_error(e.to_string());
            UnimapStatus::Internal
        })?;
        write_str(&json, buf, cap, out_len)
    })
}
