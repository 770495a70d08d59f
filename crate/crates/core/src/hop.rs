//! Hop-bounded shortest walks and the Bellman-Ford reference.
//!
//! `d^i(s, v)` is the minimum weight of a walk from `s` to `v` that uses at
//! most `i` edges whose class counts as a negative hop (RealNegative or
//! ImaginaryNegative, regardless of current sign). NonNegative-class edges are
//! free and must have weight >= 0, which lets each hop layer close under a
//! single Dijkstra pass.

use crate::graph::{dist_add, dist_lt, dist_min, Dist, Graph, NegClass, VertexId};
use crate::stats::Stats;
use ordered_float::OrderedFloat;
use std::cmp::Reverse;
use std::collections::BinaryHeap;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Source {
    Vertex(VertexId),
    /// Virtual super-source with a zero-weight edge to every vertex.
    All,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Dir {
    Out,
    /// Walks measured *into* the sources (graph reversed).
    In,
}

/// Per-layer distances: `layer[i][v] = d^i(sources, v)` (or the reverse).
#[derive(Debug, Clone)]
pub struct HopDistances {
    pub layers: Vec<Vec<Dist>>,
}

impl HopDistances {
    pub fn at(&self, hops: usize, v: VertexId) -> Dist {
        self.layers[hops][v as usize]
    }

    pub fn last(&self) -> &[Dist] {
        self.layers.last().unwrap()
    }
}

fn init_dist(g: &Graph, source: Source) -> Vec<Dist> {
    let mut d = vec![None; g.vertex_count()];
    match source {
        Source::Vertex(s) => d[s as usize] = Some(0.0),
        Source::All => d.iter_mut().for_each(|x| *x = Some(0.0)),
    }
    d
}

/// Dijkstra closure over NonNegative-class edges, starting from the given
/// labels. Ties are broken by smallest vertex id via the heap key.
fn dijkstra_closure(g: &Graph, dist: &mut [Dist], dir: Dir, stats: &Stats) {
    let mut heap: BinaryHeap<Reverse<(OrderedFloat<f64>, VertexId)>> = BinaryHeap::new();
    for (v, d) in dist.iter().enumerate() {
        if let Some(d) = d {
            heap.push(Reverse((OrderedFloat(*d), v as VertexId)));
        }
    }
    let mut ops = heap.len() as u64;
    let mut scans = 0u64;
    while let Some(Reverse((OrderedFloat(d), v))) = heap.pop() {
        ops += 1;
        if dist[v as usize] != Some(d) {
            continue;
        }
        let edges: Box<dyn Iterator<Item = _>> = match dir {
            Dir::Out => Box::new(g.out_edges(v)),
            Dir::In => Box::new(g.in_edges(v)),
        };
        for e in edges {
            scans += 1;
            if e.class != NegClass::NonNegative {
                continue;
            }
            let o = match dir {
                Dir::Out => e.head,
                Dir::In => e.tail,
            };
            let nd = d + e.weight;
            if dist_lt(Some(nd), dist[o as usize]) {
                dist[o as usize] = Some(nd);
                heap.push(Reverse((OrderedFloat(nd), o)));
                ops += 1;
            }
        }
    }
    Stats::bump(&stats.heap_ops, ops);
    Stats::bump(&stats.edge_scans, scans);
}

/// One relaxation pass of every hop-counting edge from `prev` into `next`.
fn relax_hop_edges(g: &Graph, prev: &[Dist], next: &mut [Dist], dir: Dir, stats: &Stats) {
    let mut scans = 0u64;
    for e in g.edges() {
        scans += 1;
        if !e.class.counts_hop() {
            continue;
        }
        let (from, to) = match dir {
            Dir::Out => (e.tail, e.head),
            Dir::In => (e.head, e.tail),
        };
        let cand = dist_add(prev[from as usize], e.weight);
        if dist_lt(cand, next[to as usize]) {
            next[to as usize] = cand;
        }
    }
    Stats::bump(&stats.edge_scans, scans);
}

/// Computes `d^i(source, .)` for every `i` in `0..=h` (or distances into the
/// source set for `Dir::In`).
pub fn hop_sssp(g: &Graph, source: Source, h: usize, dir: Dir, stats: &Stats) -> HopDistances {
    let mut layers = Vec::with_capacity(h + 1);
    let mut cur = init_dist(g, source);
    dijkstra_closure(g, &mut cur, dir, stats);
    layers.push(cur);
    for i in 1..=h {
        let mut next = layers[i - 1].clone();
        relax_hop_edges(g, &layers[i - 1], &mut next, dir, stats);
        dijkstra_closure(g, &mut next, dir, stats);
        layers.push(next);
    }
    HopDistances { layers }
}

/// Independent oracle for `d^i`: plain relaxation sweeps per hop layer, no
/// Dijkstra involved. Exponential in nothing but O(h * n * m); test use only.
pub fn brute_hop_distance(g: &Graph, source: Source, h: usize, dir: Dir) -> HopDistances {
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().collect();
    let mut layers: Vec<Vec<Dist>> = Vec::with_capacity(h + 1);
    for i in 0..=h {
        let mut cur = if i == 0 { init_dist(g, source) } else { layers[i - 1].clone() };
        for _ in 0..=n {
            let mut changed = false;
            for e in &edges {
                let (from, to) = match dir {
                    Dir::Out => (e.tail, e.head),
                    Dir::In => (e.head, e.tail),
                };
                let cand = if e.class.counts_hop() {
                    if i == 0 {
                        None
                    } else {
                        dist_add(layers[i - 1][from as usize], e.weight)
                    }
                } else {
                    dist_add(cur[from as usize], e.weight)
                };
                if dist_lt(cand, cur[to as usize]) {
                    cur[to as usize] = cand;
                    changed = true;
                }
            }
            if !changed {
                break;
            }
        }
        layers.push(cur);
    }
    HopDistances { layers }
}

/// A closed walk of negative total weight; `walk` starts and ends at the same
/// vertex.
#[derive(Debug, Clone)]
pub struct CycleCertificate {
    pub walk: Vec<VertexId>,
    pub total_weight: f64,
}

impl CycleCertificate {
    /// Checks the walk is closed, every step is an edge, and the minimum
    /// available weights already sum below zero.
    pub fn verify(&self, g: &Graph) -> bool {
        if self.walk.len() < 2 || self.walk.first() != self.walk.last() {
            return false;
        }
        let mut total = 0.0;
        for pair in self.walk.windows(2) {
            match g.min_weight(pair[0], pair[1]) {
                Some(w) => total += w,
                None => return false,
            }
        }
        total < 0.0 && total <= self.total_weight
    }
}

#[derive(Debug, Clone)]
pub enum BellmanFord {
    Distances(Vec<Dist>),
    NegativeCycle(CycleCertificate),
}

/// Reference solver: exact distances from the source (classes ignored, weights
/// only), or a certificate for a negative cycle reachable from it.
pub fn bellman_ford(g: &Graph, source: Source) -> BellmanFord {
    let n = g.vertex_count();
    let edges: Vec<_> = g.edges().collect();
    let mut dist = init_dist(g, source);
    let mut pred: Vec<Option<VertexId>> = vec![None; n];
    let mut last_improved = None;
    for round in 0..n {
        let mut changed = false;
        for e in &edges {
            let cand = dist_add(dist[e.tail as usize], e.weight);
            if dist_lt(cand, dist[e.head as usize]) {
                dist[e.head as usize] = cand;
                pred[e.head as usize] = Some(e.tail);
                changed = true;
                last_improved = Some(e.head);
            }
        }
        if !changed {
            return BellmanFord::Distances(dist);
        }
        if round == n - 1 {
            break;
        }
    }
    // A relaxation succeeded on round n: walk predecessors back onto a cycle.
    let mut v = last_improved.expect("improvement recorded");
    for _ in 0..n {
        v = pred[v as usize].expect("improved vertices have predecessors");
    }
    let start = v;
    let mut walk = vec![start];
    let mut u = pred[start as usize].unwrap();
    while u != start {
        walk.push(u);
        u = pred[u as usize].unwrap();
    }
    walk.push(start);
    walk.reverse();
    let total_weight = walk
        .windows(2)
        .map(|p| g.min_weight(p[0], p[1]).expect("walk follows edges"))
        .sum();
    BellmanFord::NegativeCycle(CycleCertificate { walk, total_weight })
}

/// True when `d^{h+1}` improves on `d^h` anywhere, which (both layers being
/// fixpoints of the same relaxation operator otherwise) happens exactly when
/// a negative cycle is reachable from the sources.
pub fn hop_layers_detect_cycle(hd: &HopDistances) -> bool {
    let h = hd.layers.len() - 1;
    hd.layers[h]
        .iter()
        .zip(hd.layers[h - 1].iter())
        .any(|(a, b)| dist_lt(*a, *b))
}

/// Exact distances equal `d^h` once one more relaxation layer makes no
/// progress.
pub fn layers_stable(hd: &HopDistances) -> bool {
    !hop_layers_detect_cycle(hd)
}

pub fn dist_tables_equal(a: &[Dist], b: &[Dist]) -> bool {
    a.len() == b.len() && a.iter().zip(b.iter()).all(|(x, y)| x == y)
}

/// Minimum over all vertices of a distance table.
pub fn table_min(t: &[Dist]) -> Dist {
    t.iter().copied().fold(None, dist_min)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Provenance;

    fn edge(g: &mut Graph, t: VertexId, h: VertexId, w: f64) {
        g.add_edge(t, h, w, NegClass::for_weight(w), Provenance::Input).unwrap();
    }

    #[test]
    fn hop_layers_monotone_and_exact() {
        // 0 -> 1 (-2 hop), 1 -> 2 (3), 2 -> 3 (-1 hop)
        let mut g = Graph::new(4);
        edge(&mut g, 0, 1, -2.0);
        edge(&mut g, 1, 2, 3.0);
        edge(&mut g, 2, 3, -1.0);
        let s = Stats::default();
        let hd = hop_sssp(&g, Source::Vertex(0), 2, Dir::Out, &s);
        assert_eq!(hd.at(0, 3), None);
        assert_eq!(hd.at(1, 2), Some(1.0));
        assert_eq!(hd.at(1, 3), None);
        assert_eq!(hd.at(2, 3), Some(0.0));
    }

    #[test]
    fn hybrid_matches_brute_oracle() {
        let mut g = Graph::new(5);
        edge(&mut g, 0, 1, 4.0);
        edge(&mut g, 0, 2, -1.0);
        edge(&mut g, 2, 1, -3.0);
        edge(&mut g, 1, 3, 2.0);
        edge(&mut g, 3, 2, 1.0);
        edge(&mut g, 2, 4, 7.0);
        let s = Stats::default();
        for dir in [Dir::Out, Dir::In] {
            for src in [Source::Vertex(0), Source::All] {
                let a = hop_sssp(&g, src, 4, dir, &s);
                let b = brute_hop_distance(&g, src, 4, dir);
                for i in 0..=4 {
                    assert!(dist_tables_equal(&a.layers[i], &b.layers[i]), "i={i} {dir:?}");
                }
            }
        }
    }

    #[test]
    fn reverse_direction_measures_into_source() {
        let mut g = Graph::new(3);
        edge(&mut g, 0, 1, -5.0);
        edge(&mut g, 1, 2, 2.0);
        let s = Stats::default();
        let hd = hop_sssp(&g, Source::Vertex(2), 1, Dir::In, &s);
        assert_eq!(hd.at(1, 0), Some(-3.0));
        assert_eq!(hd.at(0, 1), Some(2.0));
    }

    #[test]
    fn bellman_ford_distances() {
        let mut g = Graph::new(4);
        edge(&mut g, 0, 1, 5.0);
        edge(&mut g, 1, 2, -7.0);
        edge(&mut g, 0, 2, 1.0);
        match bellman_ford(&g, Source::Vertex(0)) {
            BellmanFord::Distances(d) => {
                assert_eq!(d[2], Some(-2.0));
                assert_eq!(d[3], None);
            }
            BellmanFord::NegativeCycle(_) => panic!("no cycle here"),
        }
    }

    #[test]
    fn bellman_ford_finds_and_verifies_cycle() {
        let mut g = Graph::new(3);
        edge(&mut g, 0, 1, 2.0);
        edge(&mut g, 1, 2, -4.0);
        edge(&mut g, 2, 1, 1.0);
        match bellman_ford(&g, Source::Vertex(0)) {
            BellmanFord::NegativeCycle(c) => {
                assert!(c.verify(&g));
                assert!(c.total_weight < 0.0);
            }
            BellmanFord::Distances(_) => panic!("cycle expected"),
        }
    }

    #[test]
    fn layer_stall_detects_cycles_exactly() {
        let mut g = Graph::new(3);
        edge(&mut g, 0, 1, 1.0);
        edge(&mut g, 1, 0, -2.0);
        let s = Stats::default();
        let hd = hop_sssp(&g, Source::All, 3, Dir::Out, &s);
        assert!(hop_layers_detect_cycle(&hd));

        let mut g2 = Graph::new(3);
        edge(&mut g2, 0, 1, 1.0);
        edge(&mut g2, 1, 2, -2.0);
        let hd2 = hop_sssp(&g2, Source::All, 2, Dir::Out, &s);
        assert!(!hop_layers_detect_cycle(&hd2));
    }
}
