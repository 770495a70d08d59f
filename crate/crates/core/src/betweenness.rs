//! Potential computation that caps how often negative vertices sit inside
//! short hop-bounded walks.
//!
//! A vertex `v` in the designated negative set is *strongly between* `s` and
//! `t` (for hop bound `h`) when some walk pattern
//! `d^h(s', s) + d^h(s, v) + d^h(v, t) + d^h(t, t') < 0` exists. To drive
//! these counts down we build a layered graph: `4h + 1` copies of the
//! hop-free edge set, with every hop-counting edge advancing one layer and a
//! heavily negative edge (-4hM) from the forward rim to the backward rim at a
//! sampled set of hub vertices. Distances from a virtual source in that graph
//! give a potential under which any pair that still witnesses strong
//! betweenness through a sampled hub would contradict Dijkstra feasibility.

use crate::graph::{Graph, NegClass, Provenance, VertexId};
use crate::hop::{brute_hop_distance, CycleCertificate, Dir, Source};
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Debug, Clone)]
pub struct BetweennessConfig {
    /// Hop bound of the betweenness pattern; layers span `4h + 1` copies.
    pub h: usize,
    /// Betweenness budget the reduction aims for.
    pub b: f64,
    /// Multiplier in the sample-size bound `ceil(c * b * ln n)`.
    pub sample_constant: f64,
    pub seed: u64,
}

impl BetweennessConfig {
    pub fn new(h: usize, b: f64, seed: u64) -> Self {
        BetweennessConfig { h, b, sample_constant: 4.0, seed }
    }
}

/// Uniform sample without replacement of size
/// `min(|pool|, ceil(c * b * ln(max(n, 2))))`.
pub fn sample_hitting_set(
    pool: &[VertexId],
    n: usize,
    cfg: &BetweennessConfig,
) -> Vec<VertexId> {
    let ln = (n.max(2) as f64).ln();
    let want = (cfg.sample_constant * cfg.b * ln).ceil() as usize;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let mut pool: Vec<VertexId> = pool.to_vec();
    pool.sort_unstable();
    pool.shuffle(&mut rng);
    let mut s = pool[..want.min(pool.len())].to_vec();
    s.sort_unstable();
    s
}

/// Layer layout of the hub graph: base copy, forward rim 1..=2h, backward rim
/// 1..=2h. Vertex `(v, layer)` is encoded as `layer * n + v`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Layer {
    Base,
    Forward(usize),
    Backward(usize),
}

pub struct HubGraph {
    pub graph: Graph,
    pub n: usize,
    pub h: usize,
    pub m_big: f64,
}

impl HubGraph {
    pub fn encode(&self, v: VertexId, layer: Layer) -> VertexId {
        let idx = match layer {
            Layer::Base => 0,
            Layer::Forward(i) => i,
            Layer::Backward(i) => 2 * self.h + i,
        };
        (idx * self.n) as VertexId + v
    }

    pub fn decode(&self, x: VertexId) -> (VertexId, Layer) {
        let idx = x as usize / self.n;
        let v = (x as usize % self.n) as VertexId;
        let layer = if idx == 0 {
            Layer::Base
        } else if idx <= 2 * self.h {
            Layer::Forward(idx)
        } else {
            Layer::Backward(idx - 2 * self.h)
        };
        (v, layer)
    }
}

pub fn build_hub_graph(g: &Graph, hubs: &[VertexId], h: usize) -> HubGraph {
    let n = g.vertex_count();
    let m_big = 1.0 + g.max_abs_weight();
    let graph = Graph::new((4 * h + 1) * n);
    let mut hub = HubGraph { graph, n, h, m_big };
    let enc = |hg: &HubGraph, v, l| hg.encode(v, l);
    // hop-free edges replicated inside every layer
    for e in g.edges() {
        if e.class != NegClass::NonNegative {
            continue;
        }
        for idx in 0..(4 * h + 1) {
            let layer = if idx == 0 {
                Layer::Base
            } else if idx <= 2 * h {
                Layer::Forward(idx)
            } else {
                Layer::Backward(idx - 2 * h)
            };
            let (a, b) = (enc(&hub, e.tail, layer), enc(&hub, e.head, layer));
            hub.graph.add_edge(a, b, e.weight, NegClass::NonNegative, Provenance::Layered).unwrap();
        }
    }
    // layer-advancing steps: a free pass per vertex, plus one per hop edge
    for v in 0..n as VertexId {
        for i in 0..2 * h {
            let (ff, ft) = if i == 0 {
                (enc(&hub, v, Layer::Base), enc(&hub, v, Layer::Forward(1)))
            } else {
                (enc(&hub, v, Layer::Forward(i)), enc(&hub, v, Layer::Forward(i + 1)))
            };
            hub.graph.add_edge(ff, ft, hub.m_big, NegClass::NonNegative, Provenance::Layered).unwrap();
            let (bf, bt) = if i == 0 {
                (enc(&hub, v, Layer::Backward(1)), enc(&hub, v, Layer::Base))
            } else {
                (enc(&hub, v, Layer::Backward(i + 1)), enc(&hub, v, Layer::Backward(i)))
            };
            hub.graph.add_edge(bf, bt, hub.m_big, NegClass::NonNegative, Provenance::Layered).unwrap();
        }
    }
    for e in g.edges() {
        if !e.class.counts_hop() {
            continue;
        }
        let w = e.weight + hub.m_big;
        for i in 0..2 * h {
            let (ff, ft) = if i == 0 {
                (enc(&hub, e.tail, Layer::Base), enc(&hub, e.head, Layer::Forward(1)))
            } else {
                (enc(&hub, e.tail, Layer::Forward(i)), enc(&hub, e.head, Layer::Forward(i + 1)))
            };
            hub.graph.add_edge(ff, ft, w, NegClass::NonNegative, Provenance::Layered).unwrap();
            let (bf, bt) = if i == 0 {
                (enc(&hub, e.tail, Layer::Backward(1)), enc(&hub, e.head, Layer::Base))
            } else {
                (enc(&hub, e.tail, Layer::Backward(i + 1)), enc(&hub, e.head, Layer::Backward(i)))
            };
            hub.graph.add_edge(bf, bt, w, NegClass::NonNegative, Provenance::Layered).unwrap();
        }
    }
    for &w in hubs {
        let a = hub.encode(w, Layer::Forward(2 * h));
        let b = hub.encode(w, Layer::Backward(2 * h));
        hub.graph
            .add_edge(a, b, -4.0 * h as f64 * hub.m_big, NegClass::RealNegative, Provenance::Layered)
            .unwrap();
    }
    hub
}

/// Maps a negative cycle of the hub graph back to a closed walk of equal (or
/// lower) weight in the graph it was built from: layer-advancing free passes
/// and hub edges collapse (their +-M contributions cancel around each loop),
/// every other step keeps its underlying edge.
pub fn map_hub_cycle(hub: &HubGraph, c: &CycleCertificate) -> CycleCertificate {
    let mut walk: Vec<VertexId> = Vec::new();
    for pair in c.walk.windows(2) {
        let (u, _) = hub.decode(pair[0]);
        let (v, _) = hub.decode(pair[1]);
        if walk.is_empty() {
            walk.push(u);
        }
        if v != *walk.last().unwrap() {
            walk.push(v);
        }
    }
    if walk.first() != walk.last() {
        walk.push(walk[0]);
    }
    CycleCertificate { walk, total_weight: c.total_weight }
}

pub enum Reduction {
    Potential(Vec<f64>),
    /// Negative cycle in the input graph, mapped back from the hub graph.
    Cycle(CycleCertificate),
}

/// Callback contract: exact distances from a virtual source over all vertices
/// of the given graph, or a negative cycle certificate in it.
pub type SsspCallback<'a> =
    dyn FnMut(&Graph) -> Result<Vec<f64>, CycleCertificate> + 'a;

/// Runs the reduction for the designated negative set `neg`. On success the
/// returned potential is valid for `g` (no NonNegative edge goes negative).
pub fn strong_betweenness_reduce(
    g: &Graph,
    neg: &[VertexId],
    cfg: &BetweennessConfig,
    callback: &mut SsspCallback,
) -> Reduction {
    let hubs = sample_hitting_set(neg, g.vertex_count(), cfg);
    let hub = build_hub_graph(g, &hubs, cfg.h);
    match callback(&hub.graph) {
        Ok(dist) => {
            let phi: Vec<f64> = g
                .vertices()
                .map(|v| dist[hub.encode(v, Layer::Base) as usize])
                .collect();
            debug_assert!(g.potential_violations(&phi).is_empty());
            Reduction::Potential(phi)
        }
        Err(c) => Reduction::Cycle(map_hub_cycle(&hub, &c)),
    }
}

/// Brute-force strong betweenness count: how many designated negative
/// vertices `v` admit `d^h(V, s) + d^h(s, v) + d^h(v, t) + d^h(t, V) < 0`
/// for the given pair `(s, t)`. Test oracle; O(n^2 * m * h) overall setup.
pub struct SbwOracle {
    fwd: Vec<Vec<crate::graph::Dist>>,
    into_any: Vec<crate::graph::Dist>,
    from_any: Vec<crate::graph::Dist>,
}

impl SbwOracle {
    pub fn new(g: &Graph, h: usize) -> SbwOracle {
        let n = g.vertex_count();
        let mut fwd = Vec::with_capacity(n);
        for s in 0..n as VertexId {
            fwd.push(brute_hop_distance(g, Source::Vertex(s), h, Dir::Out).layers[h].clone());
        }
        let into_any = brute_hop_distance(g, Source::All, h, Dir::Out).layers[h].clone();
        let from_any = brute_hop_distance(g, Source::All, h, Dir::In).layers[h].clone();
        SbwOracle { fwd, into_any, from_any }
    }

    pub fn count(&self, s: VertexId, t: VertexId, neg: &[VertexId]) -> usize {
        neg.iter()
            .filter(|&&v| {
                let parts = [
                    self.into_any[s as usize],
                    self.fwd[s as usize][v as usize],
                    self.fwd[v as usize][t as usize],
                    self.from_any[t as usize],
                ];
                let total = parts.iter().try_fold(0.0, |acc, p| p.map(|x| acc + x));
                matches!(total, Some(x) if x < 0.0)
            })
            .count()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hop::{bellman_ford, BellmanFord};

    fn bf_callback(g: &Graph) -> Result<Vec<f64>, CycleCertificate> {
        match bellman_ford(g, Source::All) {
            BellmanFord::Distances(d) => Ok(d.into_iter().map(|x| x.unwrap()).collect()),
            BellmanFord::NegativeCycle(c) => Err(c),
        }
    }

    fn edge(g: &mut Graph, t: VertexId, h: VertexId, w: f64) {
        g.add_edge(t, h, w, NegClass::for_weight(w), Provenance::Input).unwrap();
    }

    #[test]
    fn sample_size_and_determinism() {
        let pool: Vec<VertexId> = (0..20).collect();
        let cfg = BetweennessConfig::new(2, 1.0, 7);
        let s1 = sample_hitting_set(&pool, 16, &cfg);
        let s2 = sample_hitting_set(&pool, 16, &cfg);
        assert_eq!(s1, s2);
        let want = (4.0 * 1.0 * (16f64).ln()).ceil() as usize;
        assert_eq!(s1.len(), want.min(20));
        assert!(s1.windows(2).all(|w| w[0] < w[1]));
    }

    #[test]
    fn potential_is_valid_and_reduces_betweenness() {
        // chain with heavy negative middle: 0 ->(-6) 1 ->(2) 2 ->(-6) 3, plus returns
        let mut g = Graph::new(4);
        edge(&mut g, 0, 1, -6.0);
        edge(&mut g, 1, 2, 2.0);
        edge(&mut g, 2, 3, -6.0);
        edge(&mut g, 3, 0, 20.0);
        let neg = g.negative_vertices();
        let cfg = BetweennessConfig { h: 2, b: neg.len() as f64, sample_constant: 4.0, seed: 1 };
        let mut cb = bf_callback;
        match strong_betweenness_reduce(&g, &neg, &cfg, &mut cb) {
            Reduction::Potential(phi) => {
                assert!(g.potential_violations(&phi).is_empty());
                let r = g.apply_potential(&phi, true).unwrap();
                // with every negative vertex sampled, no strong pair may remain
                let oracle = SbwOracle::new(&r, 2);
                for s in r.vertices() {
                    for t in r.vertices() {
                        assert_eq!(oracle.count(s, t, &neg), 0, "pair ({s},{t})");
                    }
                }
            }
            Reduction::Cycle(_) => panic!("graph has no negative cycle"),
        }
    }

    #[test]
    fn cycle_maps_back_with_weight() {
        // two-cycle a <-> b, both edges -1
        let mut g = Graph::new(2);
        edge(&mut g, 0, 1, -1.0);
        edge(&mut g, 1, 0, -1.0);
        let cfg = BetweennessConfig { h: 1, b: 1.0, sample_constant: 4.0, seed: 3 };
        let mut cb = bf_callback;
        match strong_betweenness_reduce(&g, &[0], &cfg, &mut cb) {
            Reduction::Cycle(c) => {
                // the certificate may wind the two-cycle more than once
                assert!(c.verify(&g));
                assert!(c.total_weight <= -2.0);
            }
            Reduction::Potential(_) => panic!("cycle expected"),
        }
    }

    #[test]
    fn subclaim_hub_bounded_walks_nonnegative() {
        let mut g = Graph::new(5);
        edge(&mut g, 0, 1, -3.0);
        edge(&mut g, 1, 2, 1.0);
        edge(&mut g, 2, 3, -4.0);
        edge(&mut g, 3, 4, 2.0);
        edge(&mut g, 4, 0, 9.0);
        let neg = g.negative_vertices();
        let cfg = BetweennessConfig { h: 2, b: neg.len() as f64, sample_constant: 4.0, seed: 5 };
        let mut cb = bf_callback;
        let phi = match strong_betweenness_reduce(&g, &neg, &cfg, &mut cb) {
            Reduction::Potential(phi) => phi,
            Reduction::Cycle(_) => panic!(),
        };
        let r = g.apply_potential(&phi, true).unwrap();
        // with every negative vertex sampled as a hub, any 2h-hop walk that
        // ends at a hub (or starts at one, for the mirror) is >= 0
        let into = brute_hop_distance(&r, Source::All, 2 * cfg.h, Dir::Out);
        let from = brute_hop_distance(&r, Source::All, 2 * cfg.h, Dir::In);
        for &x in &neg {
            if let Some(w) = into.layers[2 * cfg.h][x as usize] {
                assert!(w >= 0.0, "walk into hub {x} has weight {w}");
            }
            if let Some(w) = from.layers[2 * cfg.h][x as usize] {
                assert!(w >= 0.0, "walk out of hub {x} has weight {w}");
            }
        }
    }
}
