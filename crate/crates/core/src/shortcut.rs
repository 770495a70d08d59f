//! Steiner hubs around negative vertices and shortcutting of the
//! locally-negative two-edge paths they introduce.
//!
//! `build_aux_graph` attaches one Steiner vertex per negative vertex and wires
//! it with the search-derived edge families: hub out-edges `(r~, v)` of weight
//! `d^1(r,v) + delta_r`, hub in-edges `(v, r~)` of weight `d^0(v,r) - delta_r`
//! (negative ones are classed ImaginaryNegative), plus real bypass edges for
//! members with a negative out-/in-edge. A two-edge path with exactly one
//! imaginary edge and non-negative total is "locally negative"; every such
//! path must survive as an equal-weight non-negative path after the imaginary
//! edges are deleted. Three interchangeable strategies do that: a brute-force
//! reference, a single size-threshold pass, and a bucketed multi-round pass
//! that adds O(log n) copies per vertex.

use crate::graph::{Graph, NegClass, Provenance, VertexId};
use crate::negsearch::{SearchResult, StrictSide};
use crate::stats::Stats;
use ordered_float::OrderedFloat;
use std::cmp::Reverse;
use std::collections::{BTreeMap, BTreeSet, BinaryHeap};

pub struct AuxGraph {
    pub graph: Graph,
    /// negative vertex -> its Steiner hub
    pub steiner_of: BTreeMap<VertexId, VertexId>,
    /// Steiner hubs added by this construction.
    pub steiner_set: BTreeSet<VertexId>,
    /// negative vertex -> head of its negative out-edge
    pub r_prime_of: BTreeMap<VertexId, VertexId>,
    /// r -> v -> weight of the hub in-edge (v, r~); keys are the in-members.
    pub in_w: BTreeMap<VertexId, BTreeMap<VertexId, f64>>,
    /// r -> v -> weight of the hub out-edge (r~, v); keys are the out-members.
    pub out_w: BTreeMap<VertexId, BTreeMap<VertexId, f64>>,
    /// r -> vertices with a processed in-side search copy.
    pub tilde_in: BTreeMap<VertexId, BTreeSet<VertexId>>,
    /// r -> vertices with a processed out-side search copy.
    pub tilde_out: BTreeMap<VertexId, BTreeSet<VertexId>>,
}

impl AuxGraph {
    pub fn tilde_size(&self, r: VertexId) -> usize {
        self.tilde_in[&r].len() + self.tilde_out[&r].len()
    }
}

fn within(val: f64, bound: f64, strict: bool) -> bool {
    if strict {
        val < bound
    } else {
        val <= bound
    }
}

/// Builds the hub graph on top of `gamma` from one balanced-search result per
/// negative vertex. Membership uses the exact layer decodes; the side whose
/// search bound is strict uses a strict inequality.
pub fn build_aux_graph(gamma: &Graph, results: &[SearchResult], stats: &Stats) -> AuxGraph {
    let mut g = gamma.clone();
    assert!(
        !gamma.edges().any(|e| e.class == NegClass::ImaginaryNegative),
        "input to the hub construction must be free of imaginary edges"
    );
    let mut aux = AuxGraph {
        graph: Graph::new(0),
        steiner_of: BTreeMap::new(),
        steiner_set: BTreeSet::new(),
        r_prime_of: BTreeMap::new(),
        in_w: BTreeMap::new(),
        out_w: BTreeMap::new(),
        tilde_in: BTreeMap::new(),
        tilde_out: BTreeMap::new(),
    };
    for res in results {
        let r = res.r;
        let hub = g.add_base_vertex(true);
        let strict_out = res.strict != StrictSide::In;
        let strict_in = res.strict != StrictSide::Out;
        let w_rr = g
            .get_edge(r, res.r_prime, NegClass::RealNegative)
            .expect("searched vertices keep their negative out-edge")
            .weight;

        // hub out-edges: members v with d^1(r,v) within -delta, plus r'
        let mut outs: BTreeMap<VertexId, f64> = BTreeMap::new();
        for (&v, &d1) in &res.out_d1 {
            if within(d1, -res.delta, strict_out) {
                outs.insert(v, d1 + res.delta);
            }
        }
        outs.entry(res.r_prime).or_insert(w_rr + res.delta);
        for (&v, &w) in &outs {
            let class = if w < 0.0 { NegClass::ImaginaryNegative } else { NegClass::NonNegative };
            g.add_edge(hub, v, w, class, Provenance::SteinerOut { hub: r }).unwrap();
            Stats::bump(&stats.shortcut_edges, 1);
        }

        // hub in-edges: members v with d^0(v,r) within delta, plus r itself
        let mut ins: BTreeMap<VertexId, f64> = BTreeMap::new();
        for (&v, &d0) in &res.in_d0 {
            if within(d0, res.delta, strict_in) {
                ins.insert(v, d0 - res.delta);
            }
        }
        ins.entry(r).or_insert(-res.delta);
        for (&v, &w) in &ins {
            let class = if w < 0.0 { NegClass::ImaginaryNegative } else { NegClass::NonNegative };
            g.add_edge(v, hub, w, class, Provenance::SteinerIn { hub: r }).unwrap();
            Stats::bump(&stats.shortcut_edges, 1);
        }

        // real bypasses: out-member v with negative out-edge (v, v') yields
        // (r, v'); in-member u' with negative in-edge (u, u') yields (u, r').
        for (&v, &w_hub) in &outs {
            let d1 = w_hub - res.delta;
            if let Some(e) = gamma.out_edges(v).find(|e| e.class == NegClass::RealNegative) {
                let w = d1 + e.weight;
                let class = if w < 0.0 { NegClass::RealNegative } else { NegClass::NonNegative };
                g.add_edge(r, e.head, w, class, Provenance::HubRealOut { hub: r, via: v }).unwrap();
                Stats::bump(&stats.shortcut_edges, 1);
            }
        }
        for (&u2, &w_hub) in &ins {
            let d0 = w_hub + res.delta;
            if let Some(e) = gamma.in_edges(u2).find(|e| e.class == NegClass::RealNegative) {
                let w = e.weight + d0 + w_rr;
                let class = if w < 0.0 { NegClass::RealNegative } else { NegClass::NonNegative };
                g.add_edge(e.tail, res.r_prime, w, class, Provenance::HubRealIn { hub: r, via: u2 })
                    .unwrap();
                Stats::bump(&stats.shortcut_edges, 1);
            }
        }

        aux.steiner_of.insert(r, hub);
        aux.steiner_set.insert(hub);
        aux.r_prime_of.insert(r, res.r_prime);
        aux.in_w.insert(r, ins);
        aux.out_w.insert(r, outs);
        aux.tilde_in.insert(r, res.tilde_in.clone());
        aux.tilde_out.insert(r, res.tilde_out.clone());
    }
    aux.graph = g;
    aux
}

#[derive(Debug, Clone)]
pub struct LnPath {
    pub u: VertexId,
    pub mid: VertexId,
    pub w: VertexId,
    pub weight: f64,
}

/// All two-edge paths through a non-hub midpoint with exactly one imaginary
/// edge and non-negative total weight (test oracle; quadratic).
pub fn enumerate_locally_negative(aux: &AuxGraph) -> Vec<LnPath> {
    let g = &aux.graph;
    let mut out = Vec::new();
    for e in g.edges() {
        if e.class != NegClass::ImaginaryNegative {
            continue;
        }
        if aux.steiner_set.contains(&e.head) {
            // (v, r~): extend backwards over non-negative in-edges of v
            for f in g.in_edges(e.tail) {
                if f.class == NegClass::NonNegative && f.weight + e.weight >= 0.0 {
                    out.push(LnPath { u: f.tail, mid: e.tail, w: e.head, weight: f.weight + e.weight });
                }
            }
        } else if aux.steiner_set.contains(&e.tail) {
            // (r~, v): extend forwards over non-negative out-edges of v
            for f in g.out_edges(e.head) {
                if f.class == NegClass::NonNegative && e.weight + f.weight >= 0.0 {
                    out.push(LnPath { u: e.tail, mid: e.head, w: f.head, weight: e.weight + f.weight });
                }
            }
        }
    }
    out
}

/// Shortest distance from `u` to `w` over NonNegative-class edges only.
fn nonneg_distance(g: &Graph, u: VertexId, w: VertexId) -> Option<f64> {
    let mut dist: BTreeMap<VertexId, f64> = BTreeMap::new();
    let mut heap = BinaryHeap::new();
    heap.push(Reverse((OrderedFloat(0.0), u)));
    while let Some(Reverse((OrderedFloat(d), v))) = heap.pop() {
        match dist.get(&v) {
            Some(_) => continue,
            None => {
                dist.insert(v, d);
            }
        }
        if v == w {
            return Some(d);
        }
        for e in g.out_edges(v) {
            if e.class == NegClass::NonNegative && !dist.contains_key(&e.head) {
                heap.push(Reverse((OrderedFloat(d + e.weight), e.head)));
            }
        }
    }
    dist.get(&w).copied()
}

/// True when `g` connects the path's endpoints by non-negative edges at no
/// more than the path's weight.
pub fn is_shortcut(g: &Graph, p: &LnPath) -> bool {
    matches!(nonneg_distance(g, p.u, p.w), Some(d) if d <= p.weight + 1e-9)
}

fn remove_imaginary(g: &mut Graph) {
    let imag: Vec<(VertexId, VertexId)> = g
        .edges()
        .filter(|e| e.class == NegClass::ImaginaryNegative)
        .map(|e| (e.tail, e.head))
        .collect();
    for (t, h) in imag {
        g.remove_edge(t, h, NegClass::ImaginaryNegative);
    }
}

/// Brute-force baseline: one direct edge per locally-negative path.
pub fn shortcut_reference(aux: &AuxGraph, stats: &Stats) -> Graph {
    let mut g = aux.graph.clone();
    for p in enumerate_locally_negative(aux) {
        g.add_edge(p.u, p.w, p.weight, NegClass::NonNegative, Provenance::ShortcutPath { mid: p.mid })
            .unwrap();
        Stats::bump(&stats.shortcut_edges, 1);
    }
    remove_imaginary(&mut g);
    g
}

/// Shortcuts every locally-negative path at hub `r` by brute force over the
/// midpoint neighborhoods.
fn brute_force_hub(g: &mut Graph, aux: &AuxGraph, r: VertexId, stats: &Stats) {
    let hub = aux.steiner_of[&r];
    for (&v, &wv) in &aux.in_w[&r] {
        if wv >= 0.0 {
            continue;
        }
        let ins: Vec<(VertexId, f64)> = g
            .in_edges(v)
            .filter(|f| f.class == NegClass::NonNegative)
            .map(|f| (f.tail, f.weight))
            .collect();
        for (u, wu) in ins {
            if wu + wv >= 0.0 {
                g.add_edge(u, hub, wu + wv, NegClass::NonNegative, Provenance::ShortcutPath { mid: v })
                    .unwrap();
                Stats::bump(&stats.shortcut_edges, 1);
            }
        }
    }
    for (&v, &wv) in &aux.out_w[&r] {
        if wv >= 0.0 {
            continue;
        }
        let outs: Vec<(VertexId, f64)> = g
            .out_edges(v)
            .filter(|f| f.class == NegClass::NonNegative)
            .map(|f| (f.head, f.weight))
            .collect();
        for (w, ww) in outs {
            if wv + ww >= 0.0 {
                g.add_edge(hub, w, wv + ww, NegClass::NonNegative, Provenance::ShortcutPath { mid: v })
                    .unwrap();
                Stats::bump(&stats.shortcut_edges, 1);
            }
        }
    }
}

/// Per-base-vertex copy shifts and witnesses for one group of hubs: the in
/// shift minimizes `w(v_j, r~) + delta(v_j)`, the out shift maximizes
/// `-w(r~, v_j) + delta(v_j)`; ties prefer the smallest `(r, v_j)`.
struct CopyPlan {
    /// base -> (shift, witness r)
    in_shift: BTreeMap<VertexId, (f64, VertexId)>,
    out_shift: BTreeMap<VertexId, (f64, VertexId)>,
}

fn plan_copies(g: &Graph, aux: &AuxGraph, group: &[VertexId]) -> CopyPlan {
    let mut plan = CopyPlan { in_shift: BTreeMap::new(), out_shift: BTreeMap::new() };
    for &r in group {
        for (&vj, &w) in &aux.in_w[&r] {
            let cand = w + g.delta(vj);
            let e = plan.in_shift.entry(g.base(vj)).or_insert((cand, r));
            if cand < e.0 {
                *e = (cand, r);
            }
        }
        for (&vj, &w) in &aux.out_w[&r] {
            let cand = -w + g.delta(vj);
            let e = plan.out_shift.entry(g.base(vj)).or_insert((cand, r));
            if cand > e.0 {
                *e = (cand, r);
            }
        }
    }
    plan
}

/// Adds the planned copies and runs the residual enumeration for `group`: for
/// every hub in-edge `(v_j, r~)` the remaining unshortcut predecessors must
/// live in the processed in-set of the witness hub of `base(v_j)` (mirror for
/// out-edges), so only those pairs are scanned.
fn copies_and_residuals(g: &mut Graph, aux: &AuxGraph, group: &[VertexId], stats: &Stats) {
    let plan = plan_copies(g, aux, group);
    for (&base, &(shift, _)) in &plan.in_shift {
        g.add_copy(base, shift);
        Stats::bump(&stats.copies_added, 1);
    }
    for (&base, &(shift, _)) in &plan.out_shift {
        g.add_copy(base, shift);
        Stats::bump(&stats.copies_added, 1);
    }
    for &r in group {
        let hub = aux.steiner_of[&r];
        for (&vj, &wv) in &aux.in_w[&r] {
            if wv >= 0.0 {
                continue;
            }
            let witness = plan.in_shift[&g.base(vj)].1;
            for &u in &aux.tilde_in[&witness] {
                if let Some(e) = g.get_edge(u, vj, NegClass::NonNegative) {
                    let w = e.weight + wv;
                    if w >= 0.0 {
                        g.add_edge(u, hub, w, NegClass::NonNegative, Provenance::ShortcutPath { mid: vj })
                            .unwrap();
                        Stats::bump(&stats.shortcut_edges, 1);
                    }
                }
            }
        }
        for (&vj, &wv) in &aux.out_w[&r] {
            if wv >= 0.0 {
                continue;
            }
            let witness = plan.out_shift[&g.base(vj)].1;
            for &w_end in &aux.tilde_out[&witness] {
                if let Some(e) = g.get_edge(vj, w_end, NegClass::NonNegative) {
                    let w = wv + e.weight;
                    if w >= 0.0 {
                        g.add_edge(hub, w_end, w, NegClass::NonNegative, Provenance::ShortcutPath { mid: vj })
                            .unwrap();
                        Stats::bump(&stats.shortcut_edges, 1);
                    }
                }
            }
        }
    }
}

/// Single-threshold strategy: hubs with processed sets of size >= kappa are
/// brute-forced; the rest are handled with one in/out copy pair per base
/// vertex plus the witness-guided residual scan.
pub fn shortcut_simple(aux: &AuxGraph, kappa: usize, stats: &Stats) -> Graph {
    let mut g = aux.graph.clone();
    let (big, small): (Vec<VertexId>, Vec<VertexId>) = aux
        .steiner_of
        .keys()
        .copied()
        .partition(|&r| aux.tilde_size(r) >= kappa);
    for &r in &big {
        brute_force_hub(&mut g, aux, r, stats);
    }
    copies_and_residuals(&mut g, aux, &small, stats);
    remove_imaginary(&mut g);
    g
}

pub fn default_kappa(n: usize) -> usize {
    (n as f64).powf(2.0 / 3.0).ceil().max(1.0) as usize
}

/// Bucketed strategy: hubs are grouped by halving size thresholds
/// `kappa_i = floor((2m + 1) / 2^(i-1))`; each round handles the hubs whose
/// processed-set size falls in `[kappa_{i+1}, kappa_i)` with its own copy pair
/// per base vertex, keeping every scan proportional to the hub's own set
/// size.
pub fn shortcut_bucketed(aux: &AuxGraph, stats: &Stats) -> Graph {
    let mut g = aux.graph.clone();
    let big = 2 * aux.graph.vertex_count() as u64 + 1;
    let rounds = 64 - big.leading_zeros() as usize + 1;
    let kappa = |i: usize| if i > 64 { 0 } else { (big >> (i - 1)) as usize };
    for i in 1..=rounds {
        let group: Vec<VertexId> = aux
            .steiner_of
            .keys()
            .copied()
            .filter(|&r| {
                let s = aux.tilde_size(r);
                s >= kappa(i + 1) && s < kappa(i)
            })
            .collect();
        if group.is_empty() {
            continue;
        }
        copies_and_residuals(&mut g, aux, &group, stats);
    }
    remove_imaginary(&mut g);
    g
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    Reference,
    Simple,
    Bucketed,
}

pub fn run_strategy(aux: &AuxGraph, strategy: Strategy, stats: &Stats) -> Graph {
    match strategy {
        Strategy::Reference => shortcut_reference(aux, stats),
        Strategy::Simple => shortcut_simple(aux, default_kappa(aux.graph.vertex_count()), stats),
        Strategy::Bucketed => shortcut_bucketed(aux, stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hop::{bellman_ford, brute_hop_distance, BellmanFord, Dir, Source};
    use crate::negsearch::{build_context, search_from};
    use crate::preprocess::split_negative_vertices;
    use rand::{Rng, SeedableRng};

    fn edge(g: &mut Graph, t: VertexId, h: VertexId, w: f64) {
        g.add_edge(t, h, w, NegClass::for_weight(w), Provenance::Input).unwrap();
    }

    fn search_all(g: &Graph, h: usize, stats: &Stats) -> Vec<SearchResult> {
        let ctx = build_context(g, h, stats);
        g.negative_vertices().iter().map(|&r| search_from(&ctx, r, stats)).collect()
    }

    fn all_dists(g: &Graph, upto: usize) -> Vec<Vec<Option<f64>>> {
        (0..upto)
            .map(|s| match bellman_ford(g, Source::Vertex(s as VertexId)) {
                BellmanFord::Distances(d) => d[..upto].to_vec(),
                BellmanFord::NegativeCycle(c) => panic!("unexpected negative cycle {c:?}"),
            })
            .collect()
    }

    fn dists_close(a: &[Vec<Option<f64>>], b: &[Vec<Option<f64>>]) -> bool {
        a.iter().zip(b).all(|(ra, rb)| {
            ra.iter().zip(rb).all(|(x, y)| match (x, y) {
                (None, None) => true,
                (Some(p), Some(q)) => (p - q).abs() <= 1e-9,
                _ => false,
            })
        })
    }

    #[test]
    fn no_hubs_changes_nothing() {
        let mut g = Graph::new(3);
        edge(&mut g, 0, 1, 2.0);
        edge(&mut g, 1, 2, 3.0);
        let stats = Stats::default();
        let aux = build_aux_graph(&g, &[], &stats);
        assert_eq!(aux.graph.edge_count(), g.edge_count());
        assert!(enumerate_locally_negative(&aux).is_empty());
        for strat in [Strategy::Reference, Strategy::Simple, Strategy::Bucketed] {
            let out = run_strategy(&aux, strat, &stats);
            assert!(!out.edges().any(|e| e.class == NegClass::ImaginaryNegative));
        }
    }

    #[test]
    fn hub_self_edge_weight_is_minus_delta() {
        let mut g = Graph::new(3);
        edge(&mut g, 0, 1, -4.0);
        edge(&mut g, 1, 2, 1.0);
        let (s, _) = split_negative_vertices(&g);
        let stats = Stats::default();
        let results = search_all(&s, 1, &stats);
        let aux = build_aux_graph(&s, &results, &stats);
        let r = results[0].r;
        let hub = aux.steiner_of[&r];
        let w = aux.graph.min_weight(r, hub).expect("self hub edge present");
        assert!((w - (-results[0].delta)).abs() <= 1e-9);
    }

    #[test]
    fn random_corpus_all_strategies_agree() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(23);
        let mut tested = 0;
        while tested < 120 {
            let n = rng.gen_range(2..=7);
            let mut g = Graph::new(n);
            for t in 0..n as VertexId {
                for h in 0..n as VertexId {
                    if t != h && rng.gen_bool(0.45) {
                        let w = if rng.gen_bool(0.35) {
                            -(rng.gen_range(1..=8) as f64)
                        } else {
                            rng.gen_range(0..=8) as f64
                        };
                        edge(&mut g, t, h, w);
                    }
                }
            }
            if matches!(bellman_ford(&g, Source::All), BellmanFord::NegativeCycle(_)) {
                continue;
            }
            tested += 1;
            let (gamma, _) = split_negative_vertices(&g);
            let stats = Stats::default();
            let results = search_all(&gamma, 1, &stats);
            let aux = build_aux_graph(&gamma, &results, &stats);
            let nv = gamma.vertex_count();
            let base_d = all_dists(&gamma, nv);
            // hub paths must not undercut real distances
            let aux_d = all_dists(&aux.graph, nv);
            assert!(dists_close(&base_d, &aux_d), "case {tested}: hub edges changed distances");
            let paths = enumerate_locally_negative(&aux);
            let outputs = [
                shortcut_reference(&aux, &stats),
                shortcut_simple(&aux, 1, &stats),
                shortcut_simple(&aux, default_kappa(nv), &stats),
                shortcut_simple(&aux, usize::MAX, &stats),
                shortcut_bucketed(&aux, &stats),
            ];
            for (si, out) in outputs.iter().enumerate() {
                assert!(
                    !out.edges().any(|e| e.class == NegClass::ImaginaryNegative),
                    "case {tested} strat {si}: imaginary edge left"
                );
                assert_eq!(
                    out.negative_vertices(),
                    gamma.negative_vertices(),
                    "case {tested} strat {si}: negative vertex set changed"
                );
                let out_d = all_dists(out, nv);
                assert!(dists_close(&base_d, &out_d), "case {tested} strat {si}: distances changed");
                for p in &paths {
                    assert!(
                        is_shortcut(out, p),
                        "case {tested} strat {si}: path {:?} not shortcut",
                        p
                    );
                }
                // shortcutting must reduce the hops needed by a third
                for h in 1..=5usize {
                    let hr = h - h / 3;
                    for s in 0..nv {
                        let dg = brute_hop_distance(&gamma, Source::Vertex(s as VertexId), h, Dir::Out);
                        let dn = brute_hop_distance(out, Source::Vertex(s as VertexId), hr, Dir::Out);
                        for t in 0..nv {
                            if let Some(x) = dg.layers[h][t] {
                                let y = dn.layers[hr][t];
                                assert!(
                                    matches!(y, Some(q) if q <= x + 1e-9),
                                    "case {tested} strat {si}: hop reduction failed s={s} t={t} h={h}: {x} vs {y:?}"
                                );
                            }
                        }
                    }
                }
            }
        }
    }
}
