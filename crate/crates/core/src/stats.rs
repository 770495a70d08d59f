//! Run counters, aggregated across a whole solve including recursion.

use serde::Serialize;
use std::sync::atomic::{AtomicU64, Ordering};

#[derive(Debug, Default)]
pub struct Stats {
    pub edge_scans: AtomicU64,
    pub heap_ops: AtomicU64,
    pub copies_added: AtomicU64,
    pub steiner_vertices: AtomicU64,
    pub shortcut_edges: AtomicU64,
    pub iterations: AtomicU64,
    pub recursion_depth: AtomicU64,
    pub search_runs: AtomicU64,
}

impl Stats {
    pub fn bump(counter: &AtomicU64, by: u64) {
        counter.fetch_add(by, Ordering::Relaxed);
    }

    pub fn note_depth(&self, depth: u64) {
        self.recursion_depth.fetch_max(depth, Ordering::Relaxed);
    }

    pub fn snapshot(&self, wall_ms: f64) -> StatsSnapshot {
        StatsSnapshot {
            schema: 1,
            edge_scans: self.edge_scans.load(Ordering::Relaxed),
            heap_ops: self.heap_ops.load(Ordering::Relaxed),
            copies_added: self.copies_added.load(Ordering::Relaxed),
            steiner_vertices: self.steiner_vertices.load(Ordering::Relaxed),
            shortcut_edges: self.shortcut_edges.load(Ordering::Relaxed),
            iterations: self.iterations.load(Ordering::Relaxed),
            recursion_depth: self.recursion_depth.load(Ordering::Relaxed),
            search_runs: self.search_runs.load(Ordering::Relaxed),
            wall_ms,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct StatsSnapshot {
    pub schema: u32,
    pub edge_scans: u64,
    pub heap_ops: u64,
    pub copies_added: u64,
    pub steiner_vertices: u64,
    pub shortcut_edges: u64,
    pub iterations: u64,
    pub recursion_depth: u64,
    pub search_runs: u64,
    pub wall_ms: f64,
}
