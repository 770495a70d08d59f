//! Directed multigraph with frozen edge classes, vertex copies, and potentials.
//!
//! Vertices are dense `u32` indices. Every vertex is either a *base* vertex or
//! a copy of a base vertex; a copy carries a shift `delta` relative to its
//! base. Edges are deduplicated per `(tail, head, class)`, keeping the minimum
//! weight. Edge classes are frozen at creation: a `RealNegative` edge stays
//! `RealNegative` even if reweighting makes its weight non-negative, and a
//! `NonNegative` edge must never go below zero.

use std::collections::BTreeMap;
use thiserror::Error;

pub type VertexId = u32;

/// Distance value; `None` means unreachable.
pub type Dist = Option<f64>;

pub fn dist_add(a: Dist, w: f64) -> Dist {
    a.map(|x| x + w)
}

/// Minimum of two distances where `None` acts as +infinity.
pub fn dist_min(a: Dist, b: Dist) -> Dist {
    match (a, b) {
        (Some(x), Some(y)) => Some(x.min(y)),
        (Some(x), None) | (None, Some(x)) => Some(x),
        (None, None) => None,
    }
}

/// `a < b` with `None` as +infinity.
pub fn dist_lt(a: Dist, b: Dist) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x < y,
        (Some(_), None) => true,
        _ => false,
    }
}

/// `a <= b` with `None` as +infinity.
pub fn dist_le(a: Dist, b: Dist) -> bool {
    match (a, b) {
        (Some(x), Some(y)) => x <= y,
        (None, Some(_)) => false,
        _ => true,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum NegClass {
    /// Counts as a negative hop; an ordinary graph edge.
    RealNegative,
    /// Counts as a negative hop; an auxiliary edge (copy link or Steiner
    /// edge) that is removed before the next iteration.
    ImaginaryNegative,
    /// Never counts as a hop; weight must stay >= 0.
    NonNegative,
}

impl NegClass {
    pub fn counts_hop(self) -> bool {
        !matches!(self, NegClass::NonNegative)
    }

    /// Class for a brand-new ordinary edge of the given weight.
    pub fn for_weight(w: f64) -> NegClass {
        if w < 0.0 {
            NegClass::RealNegative
        } else {
            NegClass::NonNegative
        }
    }
}

/// Where an edge came from, kept so that structures built downstream can be
/// traced back to the construction step that produced them.
#[derive(Debug, Clone, PartialEq)]
pub enum Provenance {
    Input,
    SplitLink,
    SplitMoved { from: VertexId },
    CopyLink,
    CopyRule { candidate: VertexId },
    SteinerOut { hub: VertexId },
    SteinerIn { hub: VertexId },
    HubRealOut { hub: VertexId, via: VertexId },
    HubRealIn { hub: VertexId, via: VertexId },
    ShortcutPath { mid: VertexId },
    Layered,
    Phantom,
}

#[derive(Debug, Clone, PartialEq)]
pub struct EdgeInfo {
    pub weight: f64,
    pub provenance: Provenance,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Edge {
    pub tail: VertexId,
    pub head: VertexId,
    pub weight: f64,
    pub class: NegClass,
}

#[derive(Debug, Clone)]
pub struct VertexMeta {
    /// Base vertex this one is a copy of (itself for base vertices).
    pub base: VertexId,
    /// Shift relative to the base vertex; 0 for base vertices (invariant I1).
    pub delta: f64,
    /// Steiner hub vertices are introduced by shortcutting and are never
    /// negative vertices.
    pub steiner: bool,
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("edge ({0}, {1}) of class NonNegative has negative weight {2}")]
    NegativeWeight(VertexId, VertexId, f64),
    #[error("vertex {0} out of range (graph has {1} vertices)")]
    VertexRange(VertexId, usize),
    #[error("potential has {0} entries, graph has {1} vertices")]
    PotentialLen(usize, usize),
    #[error("potential makes NonNegative edge ({0}, {1}) negative: {2}")]
    PotentialInvalid(VertexId, VertexId, f64),
}

/// Adjacency keyed by `(other endpoint, class)`; `BTreeMap` keeps iteration
/// deterministic.
type Adj = BTreeMap<(VertexId, NegClass), EdgeInfo>;

#[derive(Debug, Clone, Default)]
pub struct Graph {
    verts: Vec<VertexMeta>,
    out: Vec<Adj>,
    inc: Vec<Adj>,
    /// copies[b] lists every vertex whose base is b (b itself included).
    copies: Vec<Vec<VertexId>>,
    edge_count: usize,
}

impl Graph {
    pub fn new(n: usize) -> Graph {
        let mut g = Graph::default();
        for _ in 0..n {
            g.add_base_vertex(false);
        }
        g
    }

    pub fn vertex_count(&self) -> usize {
        self.verts.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn meta(&self, v: VertexId) -> &VertexMeta {
        &self.verts[v as usize]
    }

    pub fn base(&self, v: VertexId) -> VertexId {
        self.verts[v as usize].base
    }

    pub fn delta(&self, v: VertexId) -> f64 {
        self.verts[v as usize].delta
    }

    pub fn is_base(&self, v: VertexId) -> bool {
        self.verts[v as usize].base == v
    }

    pub fn is_steiner(&self, v: VertexId) -> bool {
        self.verts[v as usize].steiner
    }

    /// All vertices registered to the given base (the base itself included).
    pub fn copies_of(&self, base: VertexId) -> &[VertexId] {
        &self.copies[self.verts[base as usize].base as usize]
    }

    pub fn vertices(&self) -> impl Iterator<Item = VertexId> {
        0..self.verts.len() as VertexId
    }

    pub fn base_vertices(&self) -> impl Iterator<Item = VertexId> + '_ {
        self.vertices().filter(|&v| self.is_base(v))
    }

    pub fn add_base_vertex(&mut self, steiner: bool) -> VertexId {
        let id = self.verts.len() as VertexId;
        self.verts.push(VertexMeta { base: id, delta: 0.0, steiner });
        self.out.push(Adj::new());
        self.inc.push(Adj::new());
        self.copies.push(vec![id]);
        id
    }

    /// Registers a bare copy of `of` (flattening copy-of-copy to the base)
    /// without adding any edges.
    pub fn add_copy_vertex(&mut self, of: VertexId, delta: f64) -> VertexId {
        let base = self.verts[of as usize].base;
        let id = self.verts.len() as VertexId;
        self.verts.push(VertexMeta { base, delta, steiner: false });
        self.out.push(Adj::new());
        self.inc.push(Adj::new());
        self.copies.push(Vec::new());
        self.copies[base as usize].push(id);
        id
    }

    /// Inserts an edge, keeping the minimum weight per `(tail, head, class)`.
    /// Non-negative self-loops are dropped (they never lie on a shortest
    /// walk); negative self-loops are kept and count as hops.
    pub fn add_edge(
        &mut self,
        tail: VertexId,
        head: VertexId,
        weight: f64,
        class: NegClass,
        provenance: Provenance,
    ) -> Result<(), GraphError> {
        let n = self.verts.len();
        if tail as usize >= n {
            return Err(GraphError::VertexRange(tail, n));
        }
        if head as usize >= n {
            return Err(GraphError::VertexRange(head, n));
        }
        if class == NegClass::NonNegative && weight < 0.0 {
            return Err(GraphError::NegativeWeight(tail, head, weight));
        }
        if tail == head && weight >= 0.0 {
            return Ok(());
        }
        let key = (head, class);
        match self.out[tail as usize].get(&key) {
            Some(e) if e.weight <= weight => return Ok(()),
            Some(_) => {}
            None => self.edge_count += 1,
        }
        let info = EdgeInfo { weight, provenance };
        self.out[tail as usize].insert(key, info.clone());
        self.inc[head as usize].insert((tail, class), info);
        Ok(())
    }

    pub fn remove_edge(&mut self, tail: VertexId, head: VertexId, class: NegClass) {
        if self.out[tail as usize].remove(&(head, class)).is_some() {
            self.inc[head as usize].remove(&(tail, class));
            self.edge_count -= 1;
        }
    }

    pub fn out_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.out[v as usize].iter().map(move |(&(head, class), info)| Edge {
            tail: v,
            head,
            weight: info.weight,
            class,
        })
    }

    pub fn in_edges(&self, v: VertexId) -> impl Iterator<Item = Edge> + '_ {
        self.inc[v as usize].iter().map(move |(&(tail, class), info)| Edge {
            tail,
            head: v,
            weight: info.weight,
            class,
        })
    }

    pub fn edges(&self) -> impl Iterator<Item = Edge> + '_ {
        self.vertices().flat_map(move |v| self.out_edges(v))
    }

    pub fn get_edge(&self, tail: VertexId, head: VertexId, class: NegClass) -> Option<&EdgeInfo> {
        self.out[tail as usize].get(&(head, class))
    }

    /// Minimum weight over all classes between a pair, if any edge exists.
    pub fn min_weight(&self, tail: VertexId, head: VertexId) -> Dist {
        let mut best = None;
        for class in [NegClass::RealNegative, NegClass::ImaginaryNegative, NegClass::NonNegative] {
            if let Some(e) = self.get_edge(tail, head, class) {
                best = dist_min(best, Some(e.weight));
            }
        }
        best
    }

    /// Vertices with at least one RealNegative out-edge.
    pub fn negative_vertices(&self) -> Vec<VertexId> {
        self.vertices()
            .filter(|&v| self.out_edges(v).any(|e| e.class == NegClass::RealNegative))
            .collect()
    }

    pub fn max_abs_weight(&self) -> f64 {
        self.edges().map(|e| e.weight.abs()).fold(0.0, f64::max)
    }

    /// Reweights every edge by `w + phi(tail) - phi(head)` with classes kept,
    /// and updates copy shifts so that shifts stay relative to the reweighted
    /// base. With `strict`, fails if any NonNegative edge would go negative.
    pub fn apply_potential(&self, phi: &[f64], strict: bool) -> Result<Graph, GraphError> {
        if phi.len() != self.verts.len() {
            return Err(GraphError::PotentialLen(phi.len(), self.verts.len()));
        }
        let mut g = self.clone();
        for v in self.vertices() {
            let base = self.verts[v as usize].base;
            g.verts[v as usize].delta += phi[base as usize] - phi[v as usize];
        }
        for (adj, rev) in [(&mut g.out, false), (&mut g.inc, true)] {
            for (v, a) in adj.iter_mut().enumerate() {
                for (&(o, class), info) in a.iter_mut() {
                    let (tail, head) = if rev { (o, v as VertexId) } else { (v as VertexId, o) };
                    let w = info.weight + phi[tail as usize] - phi[head as usize];
                    if strict && class == NegClass::NonNegative && w < 0.0 {
                        return Err(GraphError::PotentialInvalid(tail, head, w));
                    }
                    info.weight = w;
                }
            }
        }
        Ok(g)
    }

    /// NonNegative edges that a potential would push below zero.
    pub fn potential_violations(&self, phi: &[f64]) -> Vec<Edge> {
        self.edges()
            .filter(|e| {
                e.class == NegClass::NonNegative
                    && e.weight + phi[e.tail as usize] - phi[e.head as usize] < 0.0
            })
            .collect()
    }

    /// Adds a new copy of `of` with shift `delta` and wires it with every
    /// admissible rebased edge: for each edge (u, v_i) incident to an existing
    /// copy v_i, the candidate weight is w +/- (delta(new) - delta(v_i)) and
    /// the edge is added (class NonNegative) when the minimum admissible
    /// candidate value is >= 0.
    pub fn add_copy(&mut self, of: VertexId, delta: f64) -> VertexId {
        let base = self.verts[of as usize].base;
        let siblings: Vec<VertexId> = self.copies[base as usize].clone();
        let new = self.add_copy_vertex(base, delta);
        // best incoming (u -> new) and outgoing (new -> w) candidates
        let mut best_in: BTreeMap<VertexId, (f64, VertexId)> = BTreeMap::new();
        let mut best_out: BTreeMap<VertexId, (f64, VertexId)> = BTreeMap::new();
        for &vi in &siblings {
            let dvi = self.verts[vi as usize].delta;
            for e in self.in_edges(vi) {
                let w = e.weight + delta - dvi;
                if w >= 0.0 {
                    let ent = best_in.entry(e.tail).or_insert((w, vi));
                    if w < ent.0 {
                        *ent = (w, vi);
                    }
                }
            }
            for e in self.out_edges(vi) {
                let w = e.weight + dvi - delta;
                if w >= 0.0 {
                    let ent = best_out.entry(e.head).or_insert((w, vi));
                    if w < ent.0 {
                        *ent = (w, vi);
                    }
                }
            }
        }
        for (u, (w, vi)) in best_in {
            if u != new {
                self.add_edge(u, new, w, NegClass::NonNegative, Provenance::CopyRule { candidate: vi })
                    .expect("copy-rule weights are non-negative");
            }
        }
        for (w_head, (w, vi)) in best_out {
            if w_head != new {
                self.add_edge(new, w_head, w, NegClass::NonNegative, Provenance::CopyRule { candidate: vi })
                    .expect("copy-rule weights are non-negative");
            }
        }
        new
    }
}

/// One invariant-I2 violation: an edge cheaper than the base-pair distance
/// plus shift difference allows.
#[derive(Debug, Clone)]
pub struct I2Violation {
    pub edge: Edge,
    pub bound: f64,
}

/// Checks invariant I2 given exact base-pair distances `base_dist(u0, v0)`.
/// Pairs with unreachable base distance impose no constraint.
pub fn check_invariant_i2<F>(g: &Graph, mut base_dist: F) -> Vec<I2Violation>
where
    F: FnMut(VertexId, VertexId) -> Dist,
{
    let mut out = Vec::new();
    for e in g.edges() {
        let (bu, bv) = (g.base(e.tail), g.base(e.head));
        if let Some(d) = base_dist(bu, bv) {
            let bound = d + g.delta(e.head) - g.delta(e.tail);
            if e.weight < bound {
                out.push(I2Violation { edge: e, bound });
            }
        }
    }
    out
}
