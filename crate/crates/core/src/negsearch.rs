//! Balanced forward/backward searches around a negative vertex.
//!
//! For a negative vertex `r` with negative out-edge `(r, r')`, two layered
//! graphs are searched simultaneously with Dijkstra:
//!
//! * the out graph has `h + 2` copies of the hop-free edge set, each
//!   hop-counting edge advancing one layer and a free advance per vertex, all
//!   reweighted by `phi_out(v_i) = -d^{h+1-i}(v, V)`, which makes every edge
//!   non-negative. Distances to `(v, i)` decode to `d^i(r, v)`;
//! * the in graph is the mirror image over reversed edges with `h + 1` layers
//!   and `phi_in(v_i) = -d^{h-i}(V, v)`, decoding to `d^i(v, r)`.
//!
//! Processing alternates to keep the two processed sets balanced, inserts heap
//! candidates lazily (one outstanding out-neighbor per processed vertex, in
//! weight order), and stops when the two frontier minima together certify the
//! threshold `delta_r`: every omitted out-side pattern weighs at least
//! `-delta_r` and every omitted in-side pattern at least `delta_r`.

use crate::graph::{Graph, NegClass, VertexId};
use crate::hop::{brute_hop_distance, hop_sssp, Dir, HopDistances, Source};
use crate::stats::Stats;
use ordered_float::OrderedFloat;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap, HashMap, HashSet};

pub struct SearchContext<'a> {
    pub g: &'a Graph,
    pub h: usize,
    /// `to_any.at(i, v) = d^i(v, V)`; always finite (the empty walk).
    pub to_any: HopDistances,
    /// `from_any.at(i, v) = d^i(V, v)`; always finite.
    pub from_any: HopDistances,
}

pub fn build_context<'a>(g: &'a Graph, h: usize, stats: &Stats) -> SearchContext<'a> {
    let to_any = hop_sssp(g, Source::All, h + 1, Dir::In, stats);
    let from_any = hop_sssp(g, Source::All, h, Dir::Out, stats);
    SearchContext { g, h, to_any, from_any }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StrictSide {
    Out,
    In,
    /// Exhaustion corner: neither side's bound is known to be strict.
    Indeterminate,
}

#[derive(Debug, Clone)]
pub struct SearchResult {
    pub r: VertexId,
    pub r_prime: VertexId,
    pub delta: f64,
    pub strict: StrictSide,
    pub exhausted: bool,
    /// Vertices with at least one processed out-side copy.
    pub tilde_out: BTreeSet<VertexId>,
    /// Vertices with at least one processed in-side copy.
    pub tilde_in: BTreeSet<VertexId>,
    /// Decoded `d^1(r, v)` where the layer-1 out copy was processed (exact).
    pub out_d1: BTreeMap<VertexId, f64>,
    /// Decoded `d^0(v, r)` where the layer-0 in copy was processed (exact).
    pub in_d0: BTreeMap<VertexId, f64>,
    /// Decoded `d^{h+1}(r, v)` for members of the out set.
    pub out_vals: BTreeMap<VertexId, f64>,
    /// Decoded `d^h(v, r)` for members of the in set.
    pub in_vals: BTreeMap<VertexId, f64>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Side {
    Out,
    In,
}

type Key = u64;

const NO_PARENT: Key = u64::MAX;

struct SideSearch {
    side: Side,
    n: u64,
    /// Highest layer index: `h + 1` on the out side, `h` on the in side.
    top: usize,
    /// Final reweighted distance of processed layered vertices.
    dist: HashMap<Key, f64>,
    processed: HashSet<Key>,
    heap: BinaryHeap<Reverse<(OrderedFloat<f64>, Key, Key)>>,
    adj: HashMap<Key, Vec<(f64, Key)>>,
    cursor: HashMap<Key, usize>,
    vals: BTreeMap<VertexId, f64>,
    /// Best attained pattern weight per vertex (min over processed copies).
    pvs: BTreeMap<VertexId, f64>,
    /// Exact decodes of one distinguished layer: 1 on the out side (d^1(r,v)),
    /// 0 on the in side (d^0(v,r)).
    layer_vals: BTreeMap<VertexId, f64>,
}

impl SideSearch {
    fn key(&self, v: VertexId, layer: usize) -> Key {
        layer as u64 * self.n + v as u64
    }

    fn split(&self, k: Key) -> (VertexId, usize) {
        ((k % self.n) as VertexId, (k / self.n) as usize)
    }

    fn build_adj(&self, ctx: &SearchContext, k: Key) -> Vec<(f64, Key)> {
        let (v, i) = self.split(k);
        let top = self.top;
        let mut out: Vec<(f64, Key)> = Vec::new();
        let pot = |x: VertexId, j: usize| -> f64 {
            match self.side {
                Side::Out => -ctx.to_any.at(top - j, x).unwrap(),
                Side::In => -ctx.from_any.at(top - j, x).unwrap(),
            }
        };
        let edges: Vec<(VertexId, f64, NegClass)> = match self.side {
            Side::Out => ctx.g.out_edges(v).map(|e| (e.head, e.weight, e.class)).collect(),
            Side::In => ctx.g.in_edges(v).map(|e| (e.tail, e.weight, e.class)).collect(),
        };
        for (o, w, class) in edges {
            if class == NegClass::NonNegative {
                out.push((w + pot(v, i) - pot(o, i), self.key(o, i)));
            } else if i < top {
                out.push((w + pot(v, i) - pot(o, i + 1), self.key(o, i + 1)));
            }
        }
        if i < top {
            out.push((pot(v, i) - pot(v, i + 1), self.key(v, i + 1)));
        }
        out.sort_by(|a, b| (OrderedFloat(a.0), a.1).cmp(&(OrderedFloat(b.0), b.1)));
        out
    }

    /// Pushes the parent's next cheapest edge to an unprocessed vertex.
    fn advance(&mut self, parent: Key, stats: &Stats) {
        if parent == NO_PARENT {
            return;
        }
        let d = self.dist[&parent];
        let adj = self.adj.get(&parent).unwrap();
        let mut c = *self.cursor.get(&parent).unwrap();
        while c < adj.len() {
            let (w, t) = adj[c];
            c += 1;
            Stats::bump(&stats.edge_scans, 1);
            if !self.processed.contains(&t) {
                self.heap.push(Reverse((OrderedFloat(d + w), t, parent)));
                Stats::bump(&stats.heap_ops, 1);
                break;
            }
        }
        self.cursor.insert(parent, c);
    }

    fn process(&mut self, k: Key, d: f64, ctx: &SearchContext, r: VertexId, stats: &Stats) {
        self.processed.insert(k);
        self.dist.insert(k, d);
        let (v, i) = self.split(k);
        let top = self.top;
        let (decoded, pv) = match self.side {
            Side::Out => {
                let base = ctx.to_any.at(top, r).unwrap();
                let mask = ctx.to_any.at(top - i, v).unwrap();
                (d + base - mask, d + base)
            }
            Side::In => {
                let base = ctx.from_any.at(top, r).unwrap();
                let mask = ctx.from_any.at(top - i, v).unwrap();
                (d + base - mask, d + base)
            }
        };
        let e = self.vals.entry(v).or_insert(decoded);
        *e = e.min(decoded);
        let p = self.pvs.entry(v).or_insert(pv);
        *p = p.min(pv);
        let marked = match self.side {
            Side::Out => 1,
            Side::In => 0,
        };
        if i == marked {
            self.layer_vals.insert(v, decoded);
        }
        let adj = self.build_adj(ctx, k);
        self.adj.insert(k, adj);
        self.cursor.insert(k, 0);
        self.advance(k, stats);
    }

    /// Minimum distance to an unprocessed vertex, discarding stale entries.
    fn frontier(&mut self, stats: &Stats) -> Option<f64> {
        loop {
            let &Reverse((OrderedFloat(d), t, parent)) = self.heap.peek()?;
            if self.processed.contains(&t) {
                self.heap.pop();
                self.advance(parent, stats);
            } else {
                return Some(d);
            }
        }
    }

    /// Processes the frontier vertex.
    fn step(&mut self, ctx: &SearchContext, r: VertexId, stats: &Stats) {
        self.frontier(stats).expect("step only on non-empty frontier");
        let Reverse((OrderedFloat(d), t, parent)) = self.heap.pop().unwrap();
        self.process(t, d, ctx, r, stats);
        self.advance(parent, stats);
    }
}

pub fn search_from(ctx: &SearchContext, r: VertexId, stats: &Stats) -> SearchResult {
    Stats::bump(&stats.search_runs, 1);
    let r_prime = ctx
        .g
        .out_edges(r)
        .find(|e| e.class == NegClass::RealNegative)
        .expect("search target must have a negative out-edge")
        .head;
    let n = ctx.g.vertex_count() as u64;
    let h = ctx.h;
    let mk = |side, top| SideSearch {
        side,
        n,
        top,
        dist: HashMap::new(),
        processed: HashSet::new(),
        heap: BinaryHeap::new(),
        adj: HashMap::new(),
        cursor: HashMap::new(),
        vals: BTreeMap::new(),
        pvs: BTreeMap::new(),
        layer_vals: BTreeMap::new(),
    };
    let mut out = mk(Side::Out, h + 1);
    let mut inn = mk(Side::In, h);
    let phi_out_r0 = -ctx.to_any.at(h + 1, r).unwrap();
    let phi_in_r0 = -ctx.from_any.at(h, r).unwrap();
    let rhs = phi_out_r0 + phi_in_r0;
    out.process(out.key(r, 0), 0.0, ctx, r, stats);
    inn.process(inn.key(r, 0), 0.0, ctx, r, stats);
    let mut last = Side::In;
    let (d_out, d_in) = loop {
        let d_out = out.frontier(stats);
        let d_in = inn.frontier(stats);
        match (d_out, d_in) {
            (Some(o), Some(i)) if o + i < rhs => {}
            _ => break (d_out, d_in),
        }
        if inn.vals.len() < out.vals.len() {
            inn.step(ctx, r, stats);
            last = Side::In;
        } else {
            out.step(ctx, r, stats);
            last = Side::Out;
        }
    };
    // Any threshold between the frontier bounds leaves every unprocessed
    // vertex outside both sets: unprocessed labels sit at or above the
    // frontier, so their pattern weights are at least the frontier value
    // shifted by the respective h-hop potential. The interval is non-empty
    // exactly when the loop's stop condition holds.
    let lower = match d_out {
        Some(o) => -o + phi_out_r0,
        None => f64::NEG_INFINITY,
    };
    let upper = match d_in {
        Some(i) => i - phi_in_r0,
        None => f64::INFINITY,
    };
    debug_assert!(lower <= upper + 1e-9, "threshold interval empty: {lower} > {upper}");
    let exhausted = match last {
        Side::Out => d_in.is_none(),
        Side::In => d_out.is_none(),
    };
    let preferred = match last {
        Side::Out => upper,
        Side::In => lower,
    };
    let delta = if preferred.is_finite() {
        preferred
    } else if lower.is_finite() {
        lower
    } else if upper.is_finite() {
        upper
    } else {
        0.0
    };
    // Membership is certified per vertex: a processed vertex joins a set only
    // when its attained pattern weight clears the threshold. Filtered-out
    // vertices are safe to omit because their remaining (unprocessed) copies
    // are bounded by the frontier.
    let eps = 1e-9;
    out.vals.retain(|v, _| out.pvs[v] <= -delta + eps);
    inn.vals.retain(|v, _| inn.pvs[v] <= delta + eps);
    let member_pv_out = out
        .vals
        .keys()
        .map(|v| out.pvs[v])
        .fold(f64::NEG_INFINITY, f64::max);
    let member_pv_in = inn
        .vals
        .keys()
        .map(|v| inn.pvs[v])
        .fold(f64::NEG_INFINITY, f64::max);
    // claim strictness only where the attained pattern weights certify it
    let strict = if member_pv_out < -delta {
        StrictSide::Out
    } else if member_pv_in < delta {
        StrictSide::In
    } else {
        StrictSide::Indeterminate
    };
    SearchResult {
        r,
        r_prime,
        delta,
        strict,
        exhausted,
        tilde_out: out.pvs.keys().copied().collect(),
        tilde_in: inn.pvs.keys().copied().collect(),
        out_d1: out.layer_vals,
        in_d0: inn.layer_vals,
        out_vals: out.vals,
        in_vals: inn.vals,
    }
}

/// Best hop-bounded pattern weights through `v`, computed by the brute
/// oracle: `out(v) = min_i d^i(r, v) + d^{h+1-i}(v, V)` over `i = 0..=h+1`
/// and `in(v) = min_i d^i(v, r) + d^{h-i}(V, v)` over `i = 0..=h`.
fn pattern_values(g: &Graph, h: usize, r: VertexId) -> (Vec<Option<f64>>, Vec<Option<f64>>) {
    let from_r = brute_hop_distance(g, Source::Vertex(r), h + 1, Dir::Out);
    let to_r = brute_hop_distance(g, Source::Vertex(r), h, Dir::In);
    let to_any = brute_hop_distance(g, Source::All, h + 1, Dir::In);
    let from_any = brute_hop_distance(g, Source::All, h, Dir::Out);
    let n = g.vertex_count();
    let mut out_vals = vec![None; n];
    let mut in_vals = vec![None; n];
    for v in 0..n {
        for i in 0..=h + 1 {
            if let (Some(a), Some(b)) = (from_r.layers[i][v], to_any.layers[h + 1 - i][v]) {
                let cand = a + b;
                out_vals[v] = Some(out_vals[v].map_or(cand, |x: f64| x.min(cand)));
            }
            if i <= h {
                if let (Some(a), Some(b)) = (to_r.layers[i][v], from_any.layers[h - i][v]) {
                    let cand = a + b;
                    in_vals[v] = Some(in_vals[v].map_or(cand, |x: f64| x.min(cand)));
                }
            }
        }
    }
    (out_vals, in_vals)
}

/// Checks the search contract against the brute hop oracle; returns one
/// message per violated property.
pub fn verify_search(g: &Graph, h: usize, res: &SearchResult) -> Vec<String> {
    let (out_vals, in_vals) = pattern_values(g, h, res.r);
    let mut bad = Vec::new();
    let eps = 1e-9;
    for v in g.vertices() {
        let vu = v as usize;
        if res.out_vals.contains_key(&v) {
            match out_vals[vu] {
                Some(x) if x <= -res.delta + eps => {
                    if res.strict == StrictSide::Out && x >= -res.delta {
                        bad.push(format!("P5: out-side not strict at {v}: {x} vs {}", -res.delta));
                    }
                }
                other => bad.push(format!("P1: {v} in out-set but pattern {other:?} > {}", -res.delta)),
            }
        } else if let Some(x) = out_vals[vu] {
            if x < -res.delta - eps {
                bad.push(format!("P2: {v} omitted but out pattern {x} < {}", -res.delta));
            }
        }
        if res.in_vals.contains_key(&v) {
            match in_vals[vu] {
                Some(x) if x <= res.delta + eps => {
                    if res.strict == StrictSide::In && x >= res.delta {
                        bad.push(format!("P5: in-side not strict at {v}: {x} vs {}", res.delta));
                    }
                }
                other => bad.push(format!("P3: {v} in in-set but pattern {other:?} > {}", res.delta)),
            }
        } else if let Some(x) = in_vals[vu] {
            if x < res.delta - eps {
                bad.push(format!("P4: {v} omitted but in pattern {x} < {}", res.delta));
            }
        }
    }
    let (a, b) = (res.tilde_out.len() as i64, res.tilde_in.len() as i64);
    if (a - b).abs() > 1 && !res.exhausted {
        bad.push(format!("P6: processed counts unbalanced: out {a} in {b}"));
    }
    let d1 = brute_hop_distance(g, Source::Vertex(res.r), 1, Dir::Out);
    let d0 = brute_hop_distance(g, Source::Vertex(res.r), 0, Dir::In);
    for (&v, &x) in &res.out_d1 {
        match d1.layers[1][v as usize] {
            Some(t) if (t - x).abs() <= eps => {}
            other => bad.push(format!("P7: out d1 at {v}: decoded {x}, brute {other:?}")),
        }
    }
    for (&v, &x) in &res.in_d0 {
        match d0.layers[0][v as usize] {
            Some(t) if (t - x).abs() <= eps => {}
            other => bad.push(format!("P7: in d0 at {v}: decoded {x}, brute {other:?}")),
        }
    }
    bad
}
