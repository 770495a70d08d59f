//! C ABI for the shortest-path solver: opaque graph and result handles,
//! integer status codes, no exceptions across the boundary. The header is
//! generated into `include/negpath.h` at build time.

use negpath::driver::{solve, SolveConfig, Solved};
use negpath::graph::{Graph, NegClass, Provenance, VertexId};
use negpath::shortcut::Strategy;
use negpath::stats::Stats;
use std::panic::{catch_unwind, AssertUnwindSafe};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NegpathStatus {
    NegpathOk = 0,
    NegpathNullPointer = 1,
    NegpathOutOfRange = 2,
    NegpathInvalidArgument = 3,
    NegpathUnreachable = 4,
    NegpathInternal = 5,
}

use NegpathStatus::*;

pub struct NegpathGraph {
    inner: Graph,
}

pub struct NegpathResult {
    inner: Solved,
}

/// Allocates a graph with `n` vertices, ids `0..n`. Free with
/// `negpath_graph_free`.
#[no_mangle]
pub extern "C" fn negpath_graph_new(n: u32) -> *mut NegpathGraph {
    Box::into_raw(Box::new(NegpathGraph { inner: Graph::new(n as usize) }))
}

#[no_mangle]
pub extern "C" fn negpath_graph_free(g: *mut NegpathGraph) {
    if !g.is_null() {
        drop(unsafe { Box::from_raw(g) });
    }
}

/// Adds a directed edge; parallel edges keep the minimum weight. Weight must
/// be finite.
#[no_mangle]
pub extern "C" fn negpath_graph_add_edge(
    g: *mut NegpathGraph,
    tail: u32,
    head: u32,
    weight: f64,
) -> NegpathStatus {
    let Some(g) = (unsafe { g.as_mut() }) else { return NegpathNullPointer };
    if !weight.is_finite() {
        return NegpathInvalidArgument;
    }
    let n = g.inner.vertex_count() as u32;
    if tail >= n || head >= n {
        return NegpathOutOfRange;
    }
    match g.inner.add_edge(
        tail as VertexId,
        head as VertexId,
        weight,
        NegClass::for_weight(weight),
        Provenance::Input,
    ) {
        Ok(_) => NegpathOk,
        Err(_) => NegpathInvalidArgument,
    }
}

/// Solves single-source shortest paths. `strategy`: 0 reference, 1 simple,
/// 2 bucketed. `base_threshold` 0 picks the automatic cutoff. Returns null on
/// bad arguments; free the result with `negpath_result_free`.
#[no_mangle]
pub extern "C" fn negpath_solve(
    g: *const NegpathGraph,
    source: u32,
    strategy: u32,
    base_threshold: u32,
    seed: u64,
) -> *mut NegpathResult {
    let Some(g) = (unsafe { g.as_ref() }) else { return std::ptr::null_mut() };
    if source as usize >= g.inner.vertex_count() {
        return std::ptr::null_mut();
    }
    let strategy = match strategy {
        0 => Strategy::Reference,
        1 => Strategy::Simple,
        2 => Strategy::Bucketed,
        _ => return std::ptr::null_mut(),
    };
    let cfg = SolveConfig {
        strategy,
        base_threshold: base_threshold as usize,
        seed,
        ..SolveConfig::default()
    };
    let solved = catch_unwind(AssertUnwindSafe(|| {
        let stats = Stats::default();
        solve(&g.inner, source as VertexId, &cfg, &stats)
    }));
    match solved {
        Ok(s) => Box::into_raw(Box::new(NegpathResult { inner: s })),
        Err(_) => std::ptr::null_mut(),
    }
}

/// 1 when the result is a negative-cycle certificate, 0 for distances,
/// negative on a null handle.
#[no_mangle]
pub extern "C" fn negpath_result_is_cycle(r: *const NegpathResult) -> i32 {
    match unsafe { r.as_ref() } {
        None => -1,
        Some(res) => matches!(res.inner, Solved::NegativeCycle(_)) as i32,
    }
}

/// Writes d(source, v) to `out`. `NegpathUnreachable` leaves `out` untouched;
/// cycle results report `NegpathInvalidArgument`.
#[no_mangle]
pub extern "C" fn negpath_result_distance(
    r: *const NegpathResult,
    v: u32,
    out: *mut f64,
) -> NegpathStatus {
    let Some(res) = (unsafe { r.as_ref() }) else { return NegpathNullPointer };
    if out.is_null() {
        return NegpathNullPointer;
    }
    match &res.inner {
        Solved::NegativeCycle(_) => NegpathInvalidArgument,
        Solved::Distances(d) => match d.get(v as usize) {
            None => NegpathOutOfRange,
            Some(None) => NegpathUnreachable,
            Some(Some(x)) => {
                unsafe { *out = *x };
                NegpathOk
            }
        },
    }
}

/// Number of vertices in the certificate walk (first == last); 0 unless the
/// result is a cycle.
#[no_mangle]
pub extern "C" fn negpath_result_cycle_len(r: *const NegpathResult) -> usize {
    match unsafe { r.as_ref() } {
        Some(NegpathResult { inner: Solved::NegativeCycle(c) }) => c.walk.len(),
        _ => 0,
    }
}

/// The i-th vertex of the certificate walk; u32::MAX out of range.
#[no_mangle]
pub extern "C" fn negpath_result_cycle_vertex(r: *const NegpathResult, i: usize) -> u32 {
    match unsafe { r.as_ref() } {
        Some(NegpathResult { inner: Solved::NegativeCycle(c) }) if i < c.walk.len() => c.walk[i],
        _ => u32::MAX,
    }
}

/// Total weight of the certificate walk; NaN when not a cycle result.
#[no_mangle]
pub extern "C" fn negpath_result_cycle_weight(r: *const NegpathResult) -> f64 {
    match unsafe { r.as_ref() } {
        Some(NegpathResult { inner: Solved::NegativeCycle(c) }) => c.total_weight,
        _ => f64::NAN,
    }
}

#[no_mangle]
pub extern "C" fn negpath_result_free(r: *mut NegpathResult) {
    if !r.is_null() {
        drop(unsafe { Box::from_raw(r) });
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_through_the_c_surface() {
        let g = negpath_graph_new(4);
        assert_eq!(negpath_graph_add_edge(g, 0, 1, 3.0), NegpathOk);
        assert_eq!(negpath_graph_add_edge(g, 1, 2, -4.0), NegpathOk);
        assert_eq!(negpath_graph_add_edge(g, 2, 3, 2.0), NegpathOk);
        assert_eq!(negpath_graph_add_edge(g, 9, 0, 1.0), NegpathOutOfRange);
        assert_eq!(negpath_graph_add_edge(g, 0, 1, f64::NAN), NegpathInvalidArgument);

        let r = negpath_solve(g, 0, 2, 0, 7);
        assert!(!r.is_null());
        assert_eq!(negpath_result_is_cycle(r), 0);
        let mut d = 0.0;
        assert_eq!(negpath_result_distance(r, 3, &mut d), NegpathOk);
        assert_eq!(d, 1.0);
        negpath_result_free(r);

        // close a negative loop and solve again
        assert_eq!(negpath_graph_add_edge(g, 2, 1, 1.0), NegpathOk);
        let r = negpath_solve(g, 0, 2, 0, 7);
        assert_eq!(negpath_result_is_cycle(r), 1);
        let len = negpath_result_cycle_len(r);
        assert!(len >= 3);
        assert_eq!(negpath_result_cycle_vertex(r, 0), negpath_result_cycle_vertex(r, len - 1));
        assert!(negpath_result_cycle_weight(r) < 0.0);
        negpath_result_free(r);
        negpath_graph_free(g);

        // null-safety
        assert_eq!(negpath_result_is_cycle(std::ptr::null()), -1);
        negpath_result_free(std::ptr::null_mut());
        negpath_graph_free(std::ptr::null_mut());
    }

    #[test]
    fn unreachable_reports_status() {
        let g = negpath_graph_new(2);
        let r = negpath_solve(g, 0, 2, 0, 1);
        let mut d = f64::MAX;
        assert_eq!(negpath_result_distance(r, 1, &mut d), NegpathUnreachable);
        assert_eq!(d, f64::MAX);
        assert_eq!(negpath_result_distance(r, 7, &mut d), NegpathOutOfRange);
        negpath_result_free(r);
        negpath_graph_free(g);
    }
}
