//! Seeded random instance generators for differential testing and benching.

use crate::graph::{Graph, NegClass, Provenance, VertexId};
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Erdős–Rényi style directed graph with integer weights. Each ordered pair
/// (u, v), u != v, gets an arc with probability `density`; a `neg_fraction`
/// coin decides whether the weight is drawn from `[weight_min, -1]` (when
/// `weight_min < 0`) or from `[0, weight_max]`.
pub fn gen_random(
    n: usize,
    density: f64,
    weight_min: i64,
    weight_max: i64,
    neg_fraction: f64,
    seed: u64,
) -> Graph {
    assert!((0.0..=1.0).contains(&density), "density in [0,1]");
    assert!((0.0..=1.0).contains(&neg_fraction), "neg_fraction in [0,1]");
    assert!(weight_min <= weight_max);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut g = Graph::new(n);
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u == v || !rng.gen_bool(density) {
                continue;
            }
            let w = if weight_min < 0 && rng.gen_bool(neg_fraction) {
                rng.gen_range(weight_min..=-1)
            } else {
                rng.gen_range(0.max(weight_min)..=weight_max.max(0))
            } as f64;
            g.add_edge(u, v, w, NegClass::for_weight(w), Provenance::Input).unwrap();
        }
    }
    g
}

/// Negative-cycle-free instance: non-negative integer weights reweighted by a
/// planted integer potential, so some arcs go negative but every cycle keeps
/// its non-negative total.
pub fn gen_planted(n: usize, density: f64, weight_max: i64, pot_range: i64, seed: u64) -> Graph {
    assert!((0.0..=1.0).contains(&density));
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pot: Vec<i64> = (0..n).map(|_| rng.gen_range(-pot_range..=pot_range)).collect();
    let mut g = Graph::new(n);
    for u in 0..n as VertexId {
        for v in 0..n as VertexId {
            if u == v || !rng.gen_bool(density) {
                continue;
            }
            let w = (rng.gen_range(0..=weight_max) + pot[u as usize] - pot[v as usize]) as f64;
            g.add_edge(u, v, w, NegClass::for_weight(w), Provenance::Input).unwrap();
        }
    }
    g
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::hop::{bellman_ford, BellmanFord, Source};
    use crate::io::serialize_graph;

    #[test]
    fn degenerate_parameters() {
        assert_eq!(gen_random(6, 0.0, -5, 5, 0.5, 1).edge_count(), 0);
        let g = gen_random(8, 0.7, -5, 5, 0.0, 2);
        assert!(g.negative_vertices().is_empty());
    }

    #[test]
    fn same_seed_same_bytes() {
        let a = serialize_graph(&gen_random(10, 0.4, -8, 8, 0.3, 77));
        let b = serialize_graph(&gen_random(10, 0.4, -8, 8, 0.3, 77));
        assert_eq!(a, b);
        let c = serialize_graph(&gen_random(10, 0.4, -8, 8, 0.3, 78));
        assert_ne!(a, c);
    }

    #[test]
    fn planted_instances_have_no_negative_cycle() {
        for seed in 0..20 {
            let g = gen_planted(12, 0.5, 6, 8, seed);
            for s in g.vertices() {
                assert!(matches!(
                    bellman_ford(&g, Source::Vertex(s)),
                    BellmanFord::Distances(_)
                ));
            }
        }
    }
}
