//! Normalizes a graph so every negative vertex has exactly one out-edge.
//!
//! For each vertex `u` with a RealNegative out-edge, all of `u`'s out-edges
//! move to a fresh copy `u'`, rebased by the cheapest out-weight `w1`:
//! `u` keeps the single edge `(u, u')` of weight `w1` (RealNegative) and `u'`
//! gets `(u', v_i)` of weight `w_i - w1 >= 0` (NonNegative). Afterwards every
//! negative edge is one of the `(u, u')` links, so each vertex touches at most
//! one negative edge.
//!
//! Weights of walks between old vertices are unchanged, but a walk that left
//! `u` through a formerly hop-free edge now pays one hop at `(u, u')`; the
//! split therefore preserves `d` exactly and can only raise `d^h` for small
//! `h`. `h = |negative vertices|` always suffices for simple paths.

use crate::graph::{Graph, NegClass, Provenance, VertexId};

#[derive(Debug, Clone, Default)]
pub struct SplitMap {
    /// (new satellite vertex, the vertex whose out-edges it took over)
    pub pairs: Vec<(VertexId, VertexId)>,
}

pub fn split_negative_vertices(g: &Graph) -> (Graph, SplitMap) {
    let mut out = g.clone();
    let mut map = SplitMap::default();
    for u in g.vertices() {
        let edges: Vec<_> = out.out_edges(u).collect();
        if !edges.iter().any(|e| e.class == NegClass::RealNegative) {
            continue;
        }
        assert!(
            edges.iter().all(|e| e.class != NegClass::ImaginaryNegative),
            "split input must not contain imaginary edges"
        );
        let w1 = edges.iter().map(|e| e.weight).fold(f64::INFINITY, f64::min);
        let u2 = out.add_copy_vertex(u, out.delta(u) + w1);
        for e in &edges {
            out.remove_edge(u, e.head, e.class);
            let head = if e.head == u { u2 } else { e.head };
            // self-loops at u reappear as (u', u), closing the loop through (u, u')
            let (tail, head) = if e.head == u { (u2, u) } else { (u2, head) };
            out.add_edge(tail, head, e.weight - w1, NegClass::NonNegative, Provenance::SplitMoved { from: u })
                .expect("rebased weights are non-negative");
        }
        out.add_edge(u, u2, w1, NegClass::RealNegative, Provenance::SplitLink)
            .expect("split link");
        map.pairs.push((u2, u));
    }
    debug_assert!(incident_negative_unique(&out));
    (out, map)
}

/// Every vertex touches at most one hop-counting edge, and every negative
/// vertex has exactly one out-edge.
pub fn incident_negative_unique(g: &Graph) -> bool {
    g.vertices().all(|v| {
        let neg_inc = g
            .out_edges(v)
            .chain(g.in_edges(v))
            .filter(|e| e.class.counts_hop())
            .count();
        let has_neg_out = g.out_edges(v).any(|e| e.class.counts_hop());
        neg_inc <= 1 && (!has_neg_out || g.out_edges(v).count() == 1)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Provenance;
    use crate::hop::{bellman_ford, brute_hop_distance, dist_tables_equal, BellmanFord, Dir, Source};

    fn edge(g: &mut Graph, t: VertexId, h: VertexId, w: f64) {
        g.add_edge(t, h, w, NegClass::for_weight(w), Provenance::Input).unwrap();
    }

    #[test]
    fn splits_move_all_out_edges() {
        // out-edges of 0: weights {-3, -1, 2}
        let mut g = Graph::new(4);
        edge(&mut g, 0, 1, -3.0);
        edge(&mut g, 0, 2, -1.0);
        edge(&mut g, 0, 3, 2.0);
        let (s, map) = split_negative_vertices(&g);
        assert_eq!(map.pairs.len(), 1);
        let u2 = map.pairs[0].0;
        assert_eq!(s.get_edge(0, u2, NegClass::RealNegative).unwrap().weight, -3.0);
        assert_eq!(s.get_edge(u2, 1, NegClass::NonNegative).unwrap().weight, 0.0);
        assert_eq!(s.get_edge(u2, 2, NegClass::NonNegative).unwrap().weight, 2.0);
        assert_eq!(s.get_edge(u2, 3, NegClass::NonNegative).unwrap().weight, 5.0);
        assert_eq!(s.out_edges(0).count(), 1);
        assert_eq!(s.delta(u2), -3.0);
        assert!(incident_negative_unique(&s));
    }

    #[test]
    fn exact_distances_preserved() {
        let mut g = Graph::new(5);
        edge(&mut g, 0, 1, -2.0);
        edge(&mut g, 0, 2, 3.0);
        edge(&mut g, 1, 3, -1.0);
        edge(&mut g, 2, 3, -4.0);
        edge(&mut g, 3, 4, 2.0);
        edge(&mut g, 1, 2, 1.0);
        let (s, _) = split_negative_vertices(&g);
        let before = match bellman_ford(&g, Source::Vertex(0)) {
            BellmanFord::Distances(d) => d,
            _ => panic!(),
        };
        let after = match bellman_ford(&s, Source::Vertex(0)) {
            BellmanFord::Distances(d) => d,
            _ => panic!(),
        };
        assert!(dist_tables_equal(&before, &after[..g.vertex_count()]));
    }

    #[test]
    fn hop_distances_never_drop_and_k_hops_suffice() {
        let mut g = Graph::new(4);
        edge(&mut g, 0, 1, -1.0);
        edge(&mut g, 0, 2, 5.0);
        edge(&mut g, 1, 2, 2.0);
        edge(&mut g, 2, 3, -3.0);
        edge(&mut g, 1, 3, 4.0);
        let (s, _) = split_negative_vertices(&g);
        let k = s.negative_vertices().len();
        let before = brute_hop_distance(&g, Source::Vertex(0), k + 1, Dir::Out);
        let after = brute_hop_distance(&s, Source::Vertex(0), k + 1, Dir::Out);
        for h in 0..=k {
            for v in 0..g.vertex_count() {
                assert!(
                    !crate::graph::dist_lt(after.layers[h][v], before.layers[h][v]),
                    "split must not shorten hop-bounded walks"
                );
            }
        }
        // k hops reach the exact distances
        let exact = match bellman_ford(&g, Source::Vertex(0)) {
            BellmanFord::Distances(d) => d,
            _ => panic!(),
        };
        for v in 0..g.vertex_count() {
            assert_eq!(after.layers[k][v], exact[v]);
        }
    }

    #[test]
    fn negative_self_loop_becomes_two_cycle() {
        let mut g = Graph::new(1);
        g.add_edge(0, 0, -2.0, NegClass::RealNegative, Provenance::Input).unwrap();
        let (s, map) = split_negative_vertices(&g);
        let u2 = map.pairs[0].0;
        assert_eq!(s.get_edge(0, u2, NegClass::RealNegative).unwrap().weight, -2.0);
        assert_eq!(s.get_edge(u2, 0, NegClass::NonNegative).unwrap().weight, 0.0);
        match bellman_ford(&s, Source::All) {
            BellmanFord::NegativeCycle(c) => assert!(c.verify(&s)),
            _ => panic!("negative loop must survive the split"),
        }
    }
}
