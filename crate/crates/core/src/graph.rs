//! Weighted-graph data model and the discrete differential/integral calculus.
//!
//! The working graph is the induced subgraph on `interior ∪ boundary`: every
//! functional in this crate only ever evaluates functions on that closed
//! vertex set. Vertex ids are opaque strings and all iteration runs in sorted
//! id order, so every sum is deterministic bit-for-bit.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Opaque vertex identifier. Ordering (lexicographic) fixes iteration order.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct VertexId(String);

impl VertexId {
    pub fn new(id: impl Into<String>) -> Self {
        VertexId(id.into())
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }
}

impl fmt::Display for VertexId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VertexId {
    fn from(s: &str) -> Self {
        VertexId(s.to_owned())
    }
}

impl From<String> for VertexId {
    fn from(s: String) -> Self {
        VertexId(s)
    }
}

impl std::borrow::Borrow<str> for VertexId {
    fn borrow(&self) -> &str {
        &self.0
    }
}

#[derive(Debug, Error)]
pub enum GraphError {
    #[error("duplicate vertex id {0}")]
    DuplicateVertex(VertexId),
    #[error("edge references unknown vertex {0}")]
    UnknownEdgeVertex(VertexId),
    #[error("self-loop on vertex {0}")]
    SelfLoop(VertexId),
    #[error("duplicate edge {0}-{1} (edges are unordered; list each pair once)")]
    DuplicateEdge(VertexId, VertexId),
    #[error("interior must be nonempty")]
    EmptyInterior,
    #[error("vertex {0} listed as both interior and boundary")]
    OverlappingDomain(VertexId),
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("function support does not match the working vertex set: {0}")]
    SupportMismatch(String),
    #[error("missing value at vertex {0}")]
    MissingValue(VertexId),
    #[error("boundary vertex {0} carries nonzero value {1}")]
    NonzeroBoundary(VertexId, f64),
    #[error("L^q norm requires q >= 1 (got {0})")]
    BadExponent(f64),
}

/// Finite graph with positive vertex measures μ and symmetric positive edge
/// weights. Edges are unordered pairs stored canonically, which enforces
/// `w_xy = w_yx` by construction.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    mu: BTreeMap<VertexId, f64>,
    edges: BTreeMap<(VertexId, VertexId), f64>,
    adjacency: BTreeMap<VertexId, Vec<(VertexId, f64)>>,
}

impl WeightedGraph {
    /// Builds a graph from vertex measures and an undirected edge list.
    ///
    /// Structural defects (duplicate vertices, unknown endpoints, self-loops,
    /// duplicate or doubly-listed edges) are rejected here; value-range
    /// defects such as `μ ≤ 0` are left to [`validate`] so that they can be
    /// reported rather than made unrepresentable.
    pub fn new(
        vertices: impl IntoIterator<Item = (VertexId, f64)>,
        edges: impl IntoIterator<Item = (VertexId, VertexId, f64)>,
    ) -> Result<Self, GraphError> {
        let mut mu = BTreeMap::new();
        for (id, m) in vertices {
            if mu.insert(id.clone(), m).is_some() {
                return Err(GraphError::DuplicateVertex(id));
            }
        }
        let mut edge_map = BTreeMap::new();
        for (x, y, w) in edges {
            if !mu.contains_key(&x) {
                return Err(GraphError::UnknownEdgeVertex(x));
            }
            if !mu.contains_key(&y) {
                return Err(GraphError::UnknownEdgeVertex(y));
            }
            if x == y {
                return Err(GraphError::SelfLoop(x));
            }
            let key = if x < y { (x, y) } else { (y, x) };
            if edge_map.insert(key.clone(), w).is_some() {
                return Err(GraphError::DuplicateEdge(key.0, key.1));
            }
        }
        let mut adjacency: BTreeMap<VertexId, Vec<(VertexId, f64)>> =
            mu.keys().map(|id| (id.clone(), Vec::new())).collect();
        for ((x, y), w) in &edge_map {
            adjacency.get_mut(x).unwrap().push((y.clone(), *w));
            adjacency.get_mut(y).unwrap().push((x.clone(), *w));
        }
        for list in adjacency.values_mut() {
            list.sort_by(|a, b| a.0.cmp(&b.0));
        }
        Ok(WeightedGraph {
            mu,
            edges: edge_map,
            adjacency,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.mu.len()
    }

    pub fn contains(&self, x: &VertexId) -> bool {
        self.mu.contains_key(x)
    }

    /// Vertex measure μ(x), if the vertex exists.
    pub fn measure(&self, x: &VertexId) -> Option<f64> {
        self.mu.get(x).copied()
    }

    /// Neighbors of `x` with edge weights, in sorted id order.
    pub fn neighbors(&self, x: &VertexId) -> &[(VertexId, f64)] {
        self.adjacency.get(x).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn vertices(&self) -> impl Iterator<Item = (&VertexId, f64)> {
        self.mu.iter().map(|(id, m)| (id, *m))
    }

    pub fn edges(&self) -> impl Iterator<Item = (&VertexId, &VertexId, f64)> {
        self.edges.iter().map(|((x, y), w)| (x, y, *w))
    }

    /// Σ μ(x) over all graph vertices.
    pub fn total_measure(&self) -> f64 {
        self.mu.values().sum()
    }
}

/// Split of the working vertices into interior (where the equation lives) and
/// the Dirichlet boundary (where functions vanish).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Domain {
    interior: BTreeSet<VertexId>,
    boundary: BTreeSet<VertexId>,
}

impl Domain {
    pub fn new(
        interior: impl IntoIterator<Item = VertexId>,
        boundary: impl IntoIterator<Item = VertexId>,
    ) -> Result<Self, GraphError> {
        let interior: BTreeSet<_> = interior.into_iter().collect();
        let boundary: BTreeSet<_> = boundary.into_iter().collect();
        if interior.is_empty() {
            return Err(GraphError::EmptyInterior);
        }
        if let Some(x) = interior.intersection(&boundary).next() {
            return Err(GraphError::OverlappingDomain(x.clone()));
        }
        Ok(Domain { interior, boundary })
    }

    pub fn interior(&self) -> &BTreeSet<VertexId> {
        &self.interior
    }

    pub fn boundary(&self) -> &BTreeSet<VertexId> {
        &self.boundary
    }

    pub fn is_interior(&self, x: &VertexId) -> bool {
        self.interior.contains(x)
    }

    pub fn is_working(&self, x: &VertexId) -> bool {
        self.interior.contains(x) || self.boundary.contains(x)
    }

    pub fn interior_count(&self) -> usize {
        self.interior.len()
    }

    pub fn working_count(&self) -> usize {
        self.interior.len() + self.boundary.len()
    }

    /// Interior then boundary, each in sorted order.
    pub fn working_vertices(&self) -> impl Iterator<Item = &VertexId> {
        self.interior.iter().chain(self.boundary.iter())
    }
}

/// Real-valued function on the working vertex set, identically zero on the
/// boundary. Values are stored for every working vertex.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct GraphFunction {
    values: BTreeMap<VertexId, f64>,
}

impl GraphFunction {
    pub fn zero(dom: &Domain) -> Self {
        let values = dom.working_vertices().map(|x| (x.clone(), 0.0)).collect();
        GraphFunction { values }
    }

    /// Builds a function from interior values; the boundary is filled with
    /// zeros and interior vertices missing from `values` default to zero.
    pub fn from_interior_values(
        dom: &Domain,
        values: impl IntoIterator<Item = (VertexId, f64)>,
    ) -> Result<Self, GraphError> {
        let mut out = Self::zero(dom);
        for (x, v) in values {
            if !dom.is_interior(&x) {
                return Err(GraphError::UnknownVertex(x));
            }
            out.values.insert(x, v);
        }
        Ok(out)
    }

    /// Builds a function from values over the full working set. Boundary
    /// entries must be exactly zero; missing vertices default to zero.
    pub fn from_full_values(
        dom: &Domain,
        values: impl IntoIterator<Item = (VertexId, f64)>,
    ) -> Result<Self, GraphError> {
        let mut out = Self::zero(dom);
        for (x, v) in values {
            if dom.is_interior(&x) {
                out.values.insert(x, v);
            } else if dom.boundary().contains(&x) {
                if v != 0.0 {
                    return Err(GraphError::NonzeroBoundary(x, v));
                }
            } else {
                return Err(GraphError::UnknownVertex(x));
            }
        }
        Ok(out)
    }

    pub fn value(&self, x: &VertexId) -> Option<f64> {
        self.values.get(x).copied()
    }

    pub fn values(&self) -> &BTreeMap<VertexId, f64> {
        &self.values
    }

    /// Pointwise positive part `max(u, 0)`.
    pub fn pos_part(&self) -> GraphFunction {
        let values = self
            .values
            .iter()
            .map(|(x, v)| (x.clone(), v.max(0.0)))
            .collect();
        GraphFunction { values }
    }

    /// Pointwise negative part `min(u, 0)` (nonpositive values kept as-is).
    pub fn neg_part(&self) -> GraphFunction {
        let values = self
            .values
            .iter()
            .map(|(x, v)| (x.clone(), v.min(0.0)))
            .collect();
        GraphFunction { values }
    }

    pub fn scaled(&self, factor: f64) -> GraphFunction {
        let values = self
            .values
            .iter()
            .map(|(x, v)| (x.clone(), factor * v))
            .collect();
        GraphFunction { values }
    }

    /// `a·u + b·v`; both functions must share the same working set.
    pub fn linear_comb(a: f64, u: &GraphFunction, b: f64, v: &GraphFunction) -> GraphFunction {
        debug_assert_eq!(u.values.len(), v.values.len());
        let values = u
            .values
            .iter()
            .map(|(x, uv)| (x.clone(), a * uv + b * v.values[x]))
            .collect();
        GraphFunction { values }
    }

    pub fn is_zero(&self) -> bool {
        self.values.values().all(|v| *v == 0.0)
    }

    pub fn has_positive_values(&self) -> bool {
        self.values.values().any(|v| *v > 0.0)
    }

    pub fn has_negative_values(&self) -> bool {
        self.values.values().any(|v| *v < 0.0)
    }

    pub fn max_abs(&self) -> f64 {
        self.values.values().fold(0.0, |acc, v| acc.max(v.abs()))
    }
}

/// Integration region: the interior Ω or the closure Ω ∪ ∂Ω.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Region {
    Interior,
    Closure,
}

/// The two edge sums over adjacent opposite-sign vertex pairs. Both are
/// nonpositive and equal by edge symmetry; they quantify how far the energy
/// is from splitting as `I(u) = I(u⁺) + I(u⁻)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossTerms {
    /// Σ over x with u(x)<0, neighbors y with u(y)>0 of `w_xy u⁻(x) u⁺(y)`.
    pub minus_plus: f64,
    /// Σ over x with u(x)>0, neighbors y with u(y)<0 of `w_xy u⁻(y) u⁺(x)`.
    pub plus_minus: f64,
}

impl CrossTerms {
    pub fn sum(&self) -> f64 {
        self.minus_plus + self.plus_minus
    }

    pub fn product(&self) -> f64 {
        self.minus_plus * self.plus_minus
    }

    pub fn square_sum(&self) -> f64 {
        self.minus_plus * self.minus_plus + self.plus_minus * self.plus_minus
    }
}

/// Checks every graph and domain invariant, returning human-readable
/// violation descriptions. Total: never fails, an empty list means the pair
/// is a valid working graph.
pub fn validate(graph: &WeightedGraph, dom: &Domain) -> Vec<String> {
    let mut violations = Vec::new();
    for x in dom.working_vertices() {
        if !graph.contains(x) {
            violations.push(format!("domain vertex {x} is not a graph vertex"));
        }
    }
    for (x, m) in graph.vertices() {
        if !(m > 0.0) || !m.is_finite() {
            violations.push(format!("vertex {x} has non-positive measure mu = {m}"));
        }
    }
    for (x, y, w) in graph.edges() {
        if !(w > 0.0) || !w.is_finite() {
            violations.push(format!("edge {x}-{y} has non-positive weight w = {w}"));
        }
    }
    // Closed-world check: no working vertex may see a neighbor outside the
    // working set.
    for x in dom.working_vertices() {
        for (y, _) in graph.neighbors(x) {
            if !dom.is_working(y) {
                violations.push(format!(
                    "vertex {x} has neighbor {y} outside the working set interior ∪ boundary"
                ));
            }
        }
    }
    for x in dom.boundary() {
        if graph.contains(x) {
            let touches_interior = graph.neighbors(x).iter().any(|(y, _)| dom.is_interior(y));
            if !touches_interior {
                violations.push(format!("boundary vertex {x} has no interior neighbor"));
            }
        }
    }
    violations
}

fn ensure_support(dom: &Domain, u: &GraphFunction) -> Result<(), GraphError> {
    if u.values.len() != dom.working_count() {
        return Err(GraphError::SupportMismatch(format!(
            "function has {} vertices, working set has {}",
            u.values.len(),
            dom.working_count()
        )));
    }
    for x in u.values.keys() {
        if !dom.is_working(x) {
            return Err(GraphError::SupportMismatch(format!(
                "function vertex {x} is not in the working set"
            )));
        }
    }
    Ok(())
}

/// μ-Laplacian `Δu(x) = (1/μ(x)) Σ_{y∼x} w_xy (u(y) − u(x))` at every
/// interior vertex.
pub fn laplacian(
    graph: &WeightedGraph,
    dom: &Domain,
    u: &GraphFunction,
) -> Result<BTreeMap<VertexId, f64>, GraphError> {
    ensure_support(dom, u)?;
    let mut out = BTreeMap::new();
    for x in dom.interior() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        let ux = u.values[x];
        let mut acc = 0.0;
        for (y, w) in graph.neighbors(x) {
            let uy = u
                .value(y)
                .ok_or_else(|| GraphError::MissingValue(y.clone()))?;
            acc += w * (uy - ux);
        }
        out.insert(x.clone(), acc / mu);
    }
    Ok(out)
}

/// Gradient form `Γ(u₁,u₂)(x) = (1/2μ(x)) Σ_{y∼x} w_xy (u₁(y)−u₁(x))(u₂(y)−u₂(x))`.
///
/// At boundary vertices the sum ranges over neighbors within the working set
/// only. `gamma(u, u, x)` is the squared gradient length `|∇u|²(x)`.
pub fn gamma(
    graph: &WeightedGraph,
    dom: &Domain,
    u1: &GraphFunction,
    u2: &GraphFunction,
    x: &VertexId,
) -> Result<f64, GraphError> {
    ensure_support(dom, u1)?;
    ensure_support(dom, u2)?;
    if !dom.is_working(x) {
        return Err(GraphError::UnknownVertex(x.clone()));
    }
    let mu = graph
        .measure(x)
        .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
    let u1x = u1.values[x];
    let u2x = u2.values[x];
    let mut acc = 0.0;
    for (y, w) in graph.neighbors(x) {
        let u1y = u1
            .value(y)
            .ok_or_else(|| GraphError::MissingValue(y.clone()))?;
        let u2y = u2
            .value(y)
            .ok_or_else(|| GraphError::MissingValue(y.clone()))?;
        acc += w * (u1y - u1x) * (u2y - u2x);
    }
    Ok(acc / (2.0 * mu))
}

/// Weighted sum `Σ μ(x) f(x)` over the requested region.
pub fn integrate(
    graph: &WeightedGraph,
    dom: &Domain,
    f: &BTreeMap<VertexId, f64>,
    region: Region,
) -> Result<f64, GraphError> {
    let mut acc = 0.0;
    let mut add = |x: &VertexId| -> Result<(), GraphError> {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        let v = f.get(x).ok_or_else(|| GraphError::MissingValue(x.clone()))?;
        acc += mu * v;
        Ok(())
    };
    for x in dom.interior() {
        add(x)?;
    }
    if region == Region::Closure {
        for x in dom.boundary() {
            add(x)?;
        }
    }
    Ok(acc)
}

/// Squared Dirichlet norm `‖u‖² = ∫_{Ω∪∂Ω} |∇u|² dμ`.
pub fn sobolev_norm_sq(
    graph: &WeightedGraph,
    dom: &Domain,
    u: &GraphFunction,
) -> Result<f64, GraphError> {
    ensure_support(dom, u)?;
    let mut acc = 0.0;
    for x in dom.working_vertices() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        acc += mu * gamma(graph, dom, u, u, x)?;
    }
    Ok(acc)
}

/// Dirichlet norm `‖u‖`; zero exactly when `u ≡ 0` on a connected working
/// graph with nonempty boundary.
pub fn sobolev_norm(
    graph: &WeightedGraph,
    dom: &Domain,
    u: &GraphFunction,
) -> Result<f64, GraphError> {
    Ok(sobolev_norm_sq(graph, dom, u)?.sqrt())
}

/// `L^q` norm over the interior; `q = ∞` gives the interior max of `|u|`.
pub fn lq_norm(
    graph: &WeightedGraph,
    dom: &Domain,
    u: &GraphFunction,
    q: f64,
) -> Result<f64, GraphError> {
    ensure_support(dom, u)?;
    if q.is_infinite() && q > 0.0 {
        let mut max = 0.0f64;
        for x in dom.interior() {
            max = max.max(u.values[x].abs());
        }
        return Ok(max);
    }
    if !(q >= 1.0) {
        return Err(GraphError::BadExponent(q));
    }
    let mut acc = 0.0;
    for x in dom.interior() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        acc += mu * u.values[x].abs().powf(q);
    }
    Ok(acc.powf(1.0 / q))
}

/// Embedding constant `K_q = (Σ μ(x))^{1/q} / μ_min^{1/2}` with the sum over
/// the working vertex set and the minimum over the interior. For `q = ∞` the
/// exponent `1/q` collapses to zero.
pub fn embedding_constant(
    graph: &WeightedGraph,
    dom: &Domain,
    q: f64,
) -> Result<f64, GraphError> {
    if !(q >= 1.0) && !(q.is_infinite() && q > 0.0) {
        return Err(GraphError::BadExponent(q));
    }
    let mut total = 0.0;
    for x in dom.working_vertices() {
        total += graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
    }
    let mut mu_min = f64::INFINITY;
    for x in dom.interior() {
        let mu = graph
            .measure(x)
            .ok_or_else(|| GraphError::UnknownVertex(x.clone()))?;
        mu_min = mu_min.min(mu);
    }
    let exponent = if q.is_infinite() { 0.0 } else { 1.0 / q };
    Ok(total.powf(exponent) / mu_min.sqrt())
}

/// The edge sums over adjacent opposite-sign pairs, each accumulated in
/// sorted vertex order. Sign sets use strict inequalities: an exact zero is
/// neither positive nor negative.
pub fn cross_terms(
    graph: &WeightedGraph,
    dom: &Domain,
    u: &GraphFunction,
) -> Result<CrossTerms, GraphError> {
    ensure_support(dom, u)?;
    let mut minus_plus = 0.0;
    let mut plus_minus = 0.0;
    for x in dom.interior() {
        let ux = u.values[x];
        if ux < 0.0 {
            for (y, w) in graph.neighbors(x) {
                let uy = u
                    .value(y)
                    .ok_or_else(|| GraphError::MissingValue(y.clone()))?;
                if uy > 0.0 {
                    minus_plus += w * ux * uy;
                }
            }
        } else if ux > 0.0 {
            for (y, w) in graph.neighbors(x) {
                let uy = u
                    .value(y)
                    .ok_or_else(|| GraphError::MissingValue(y.clone()))?;
                if uy < 0.0 {
                    plus_minus += w * uy * ux;
                }
            }
        }
    }
    Ok(CrossTerms {
        minus_plus,
        plus_minus,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixtures;

    fn vid(s: &str) -> VertexId {
        VertexId::from(s)
    }

    #[test]
    fn validate_accepts_path_fixture() {
        let (graph, dom) = fixtures::path(3);
        assert!(validate(&graph, &dom).is_empty());
    }

    #[test]
    fn validate_flags_neighbor_outside_working_set() {
        // v2 is a graph vertex but listed in neither interior nor boundary.
        let graph = WeightedGraph::new(
            [(vid("v0"), 1.0), (vid("v1"), 1.0), (vid("v2"), 1.0)],
            [
                (vid("v0"), vid("v1"), 1.0),
                (vid("v1"), vid("v2"), 1.0),
            ],
        )
        .unwrap();
        let dom = Domain::new([vid("v1")], [vid("v0")]).unwrap();
        let violations = validate(&graph, &dom);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert!(violations[0].contains("outside the working set"));
    }

    #[test]
    fn validate_flags_zero_weight() {
        let graph = WeightedGraph::new(
            [(vid("v0"), 1.0), (vid("v1"), 1.0), (vid("v2"), 1.0)],
            [
                (vid("v0"), vid("v1"), 1.0),
                (vid("v1"), vid("v2"), 0.0),
            ],
        )
        .unwrap();
        let dom = Domain::new([vid("v1")], [vid("v0"), vid("v2")]).unwrap();
        let violations = validate(&graph, &dom);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert!(violations[0].contains("non-positive weight"));
    }

    #[test]
    fn validate_flags_boundary_without_interior_neighbor() {
        let graph = WeightedGraph::new(
            [(vid("a"), 1.0), (vid("b"), 1.0), (vid("c"), 1.0)],
            [(vid("a"), vid("b"), 1.0), (vid("b"), vid("c"), 1.0)],
        )
        .unwrap();
        // c is boundary but only touches b, also boundary.
        let dom = Domain::new([vid("a")], [vid("b"), vid("c")]).unwrap();
        let violations = validate(&graph, &dom);
        assert_eq!(violations.len(), 1, "{violations:?}");
        assert!(violations[0].contains("no interior neighbor"));
    }

    #[test]
    fn construction_rejects_structural_defects() {
        let verts = [(vid("a"), 1.0), (vid("b"), 1.0)];
        assert!(matches!(
            WeightedGraph::new(verts.clone(), [(vid("a"), vid("a"), 1.0)]),
            Err(GraphError::SelfLoop(_))
        ));
        assert!(matches!(
            WeightedGraph::new(
                verts.clone(),
                [(vid("a"), vid("b"), 1.0), (vid("b"), vid("a"), 1.0)]
            ),
            Err(GraphError::DuplicateEdge(_, _))
        ));
        assert!(matches!(
            WeightedGraph::new(verts, [(vid("a"), vid("z"), 1.0)]),
            Err(GraphError::UnknownEdgeVertex(_))
        ));
        assert!(matches!(
            Domain::new([], [vid("a")]),
            Err(GraphError::EmptyInterior)
        ));
        assert!(matches!(
            Domain::new([vid("a")], [vid("a")]),
            Err(GraphError::OverlappingDomain(_))
        ));
    }

    #[test]
    fn laplacian_of_indicator_on_path() {
        let (graph, dom) = fixtures::path(3);
        let u = fixtures::indicator(&dom, "v1");
        let lap = laplacian(&graph, &dom, &u).unwrap();
        assert_eq!(lap.len(), 1);
        assert!((lap[&vid("v1")] - (-2.0)).abs() < 1e-15);
    }

    #[test]
    fn laplacian_of_zero_and_of_interior_constant() {
        let (graph, dom) = fixtures::path(5);
        let zero = GraphFunction::zero(&dom);
        for v in laplacian(&graph, &dom, &zero).unwrap().values() {
            assert_eq!(*v, 0.0);
        }
        // v2's neighbors v1, v3 are interior; a constant there has Δ = 0 at v2.
        let u = GraphFunction::from_interior_values(
            &dom,
            [(vid("v1"), 3.5), (vid("v2"), 3.5), (vid("v3"), 3.5)],
        )
        .unwrap();
        let lap = laplacian(&graph, &dom, &u).unwrap();
        assert_eq!(lap[&vid("v2")], 0.0);
    }

    #[test]
    fn laplacian_rejects_foreign_support() {
        let (graph, dom) = fixtures::path(3);
        let (_, other_dom) = fixtures::path(5);
        let u = GraphFunction::zero(&other_dom);
        assert!(matches!(
            laplacian(&graph, &dom, &u),
            Err(GraphError::SupportMismatch(_))
        ));
    }

    #[test]
    fn gamma_of_indicator_and_bilinearity() {
        let (graph, dom) = fixtures::path(3);
        let u = fixtures::indicator(&dom, "v1");
        let g = gamma(&graph, &dom, &u, &u, &vid("v1")).unwrap();
        assert!((g - 1.0).abs() < 1e-15);
        let zero = GraphFunction::zero(&dom);
        assert_eq!(gamma(&graph, &dom, &u, &zero, &vid("v1")).unwrap(), 0.0);
        assert!(matches!(
            gamma(&graph, &dom, &u, &u, &vid("nope")),
            Err(GraphError::UnknownVertex(_))
        ));
    }

    #[test]
    fn gamma_is_symmetric() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let (graph, dom) = fixtures::path(6);
        for _ in 0..20 {
            let u = fixtures::random_function(&dom, &mut rng);
            let v = fixtures::random_function(&dom, &mut rng);
            let x = vid(&format!("v{}", rng.gen_range(0..6)));
            let a = gamma(&graph, &dom, &u, &v, &x).unwrap();
            let b = gamma(&graph, &dom, &v, &u, &x).unwrap();
            assert!((a - b).abs() <= 1e-14 * (1.0 + a.abs()));
        }
    }

    #[test]
    fn integrate_indicator_constant_and_gradient_square() {
        let (graph, dom) = fixtures::path(3);
        let u = fixtures::indicator(&dom, "v1");
        let f = u.values().clone();
        assert_eq!(integrate(&graph, &dom, &f, Region::Interior).unwrap(), 1.0);

        let c = 2.5;
        let const_map: BTreeMap<_, _> = dom
            .working_vertices()
            .map(|x| (x.clone(), c))
            .collect();
        let total = integrate(&graph, &dom, &const_map, Region::Closure).unwrap();
        assert!((total - c * graph.total_measure()).abs() < 1e-12);

        let grad_sq: BTreeMap<_, _> = dom
            .working_vertices()
            .map(|x| (x.clone(), gamma(&graph, &dom, &u, &u, x).unwrap()))
            .collect();
        let e = integrate(&graph, &dom, &grad_sq, Region::Closure).unwrap();
        assert!((e - 2.0).abs() < 1e-15);

        let empty = BTreeMap::new();
        assert!(matches!(
            integrate(&graph, &dom, &empty, Region::Interior),
            Err(GraphError::MissingValue(_))
        ));
    }

    #[test]
    fn sobolev_norm_values_and_homogeneity() {
        use rand::{Rng, SeedableRng};
        let (graph, dom) = fixtures::path(3);
        let u = fixtures::indicator(&dom, "v1");
        assert!((sobolev_norm(&graph, &dom, &u).unwrap() - 2f64.sqrt()).abs() < 1e-15);
        assert_eq!(
            sobolev_norm(&graph, &dom, &GraphFunction::zero(&dom)).unwrap(),
            0.0
        );
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        for _ in 0..10 {
            let v = fixtures::random_function(&dom, &mut rng);
            let k: f64 = rng.gen_range(-4.0..4.0);
            let lhs = sobolev_norm(&graph, &dom, &v.scaled(k)).unwrap();
            let rhs = k.abs() * sobolev_norm(&graph, &dom, &v).unwrap();
            assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + rhs));
        }
    }

    #[test]
    fn lq_norm_values_and_errors() {
        let (graph, dom) = fixtures::path(3);
        let u = fixtures::indicator(&dom, "v1");
        assert_eq!(lq_norm(&graph, &dom, &u, 2.0).unwrap(), 1.0);
        assert_eq!(lq_norm(&graph, &dom, &u, f64::INFINITY).unwrap(), 1.0);
        assert!(matches!(
            lq_norm(&graph, &dom, &u, 0.5),
            Err(GraphError::BadExponent(_))
        ));
    }

    #[test]
    fn embedding_constant_values() {
        let (graph, dom) = fixtures::path(3);
        assert!((embedding_constant(&graph, &dom, 2.0).unwrap() - 3f64.sqrt()).abs() < 1e-15);
        assert!((embedding_constant(&graph, &dom, f64::INFINITY).unwrap() - 1.0).abs() < 1e-15);

        let graph4 = WeightedGraph::new(
            [(vid("v0"), 4.0), (vid("v1"), 4.0), (vid("v2"), 4.0)],
            [
                (vid("v0"), vid("v1"), 1.0),
                (vid("v1"), vid("v2"), 1.0),
            ],
        )
        .unwrap();
        let dom4 = Domain::new([vid("v1")], [vid("v0"), vid("v2")]).unwrap();
        assert!((embedding_constant(&graph4, &dom4, 1.0).unwrap() - 6.0).abs() < 1e-12);
    }

    #[test]
    fn embedding_inequality_on_random_functions() {
        // On path(3) the bound |u| ≤ K_q ‖u‖ holds for every u (the single
        // interior vertex has two unit-weight boundary edges). The broad
        // randomized embedding check lives in the verify suite.
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(5);
        let (graph, dom) = fixtures::path(3);
        for _ in 0..25 {
            let u = fixtures::random_function(&dom, &mut rng);
            let norm = sobolev_norm(&graph, &dom, &u).unwrap();
            for q in [1.0, 2.0, 4.0, f64::INFINITY] {
                let lq = lq_norm(&graph, &dom, &u, q).unwrap();
                let kq = embedding_constant(&graph, &dom, q).unwrap();
                assert!(lq <= kq * norm + 1e-12, "q={q}: {lq} > {}", kq * norm);
            }
        }
    }

    #[test]
    fn sign_parts_partition() {
        use rand::SeedableRng;
        let (_, dom) = fixtures::path(4);
        let u = GraphFunction::from_interior_values(
            &dom,
            [(vid("v1"), 1.0), (vid("v2"), -1.0)],
        )
        .unwrap();
        let pos = u.pos_part();
        let neg = u.neg_part();
        assert_eq!(pos.value(&vid("v1")).unwrap(), 1.0);
        assert_eq!(pos.value(&vid("v2")).unwrap(), 0.0);
        assert_eq!(neg.value(&vid("v1")).unwrap(), 0.0);
        assert_eq!(neg.value(&vid("v2")).unwrap(), -1.0);

        let nonneg = u.pos_part();
        assert!(nonneg.neg_part().is_zero());

        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        for _ in 0..20 {
            let v = fixtures::random_function(&dom, &mut rng);
            let sum = GraphFunction::linear_comb(1.0, &v.pos_part(), 1.0, &v.neg_part());
            for (x, val) in v.values() {
                assert_eq!(sum.value(x).unwrap(), *val);
                assert_eq!(v.pos_part().values()[x] * v.neg_part().values()[x], 0.0);
            }
        }
    }

    #[test]
    fn cross_terms_on_fixtures() {
        let (graph, dom) = fixtures::path(4);
        let u = GraphFunction::from_interior_values(
            &dom,
            [(vid("v1"), 1.0), (vid("v2"), -1.0)],
        )
        .unwrap();
        let ct = cross_terms(&graph, &dom, &u).unwrap();
        assert_eq!(ct.minus_plus, -1.0);
        assert_eq!(ct.plus_minus, -1.0);

        let one_signed = u.pos_part();
        let ct0 = cross_terms(&graph, &dom, &one_signed).unwrap();
        assert_eq!((ct0.minus_plus, ct0.plus_minus), (0.0, 0.0));

        let (graph5, dom5) = fixtures::path(5);
        let decoupled = GraphFunction::from_interior_values(
            &dom5,
            [(vid("v1"), 1.0), (vid("v2"), 0.0), (vid("v3"), -1.0)],
        )
        .unwrap();
        let ct5 = cross_terms(&graph5, &dom5, &decoupled).unwrap();
        assert_eq!((ct5.minus_plus, ct5.plus_minus), (0.0, 0.0));
    }

    #[test]
    fn greens_identity_on_random_inputs() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(21);
        let (graph, dom) = fixtures::path(7);
        for _ in 0..25 {
            let u = fixtures::random_function(&dom, &mut rng);
            let phi = fixtures::random_function(&dom, &mut rng);
            let lap = laplacian(&graph, &dom, &u).unwrap();
            let lhs: f64 = dom
                .interior()
                .iter()
                .map(|x| graph.measure(x).unwrap() * lap[x] * phi.values()[x])
                .sum();
            let mixed: BTreeMap<_, _> = dom
                .working_vertices()
                .map(|x| (x.clone(), gamma(&graph, &dom, &u, &phi, x).unwrap()))
                .collect();
            let rhs = integrate(&graph, &dom, &mixed, Region::Closure).unwrap();
            let scale = lhs.abs() + rhs.abs();
            assert!((lhs + rhs).abs() <= 1e-10 * (1.0 + scale));
        }
    }

    #[test]
    fn norm_splits_into_sign_parts_minus_cross_terms() {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(33);
        let (graph, dom) = fixtures::path(8);
        for _ in 0..25 {
            let u = fixtures::random_function(&dom, &mut rng);
            let ct = cross_terms(&graph, &dom, &u).unwrap();
            let norm_u = sobolev_norm_sq(&graph, &dom, &u).unwrap();
            let norm_p = sobolev_norm_sq(&graph, &dom, &u.pos_part()).unwrap();
            let norm_m = sobolev_norm_sq(&graph, &dom, &u.neg_part()).unwrap();
            let rhs = norm_p + norm_m - ct.sum();
            let scale = 1.0 + norm_u.abs() + norm_p + norm_m + ct.sum().abs();
            assert!((norm_u - rhs).abs() <= 1e-12 * scale);

            // Mixed-gradient identities for both sign parts.
            for part in [u.pos_part(), u.neg_part()] {
                let mixed: BTreeMap<_, _> = dom
                    .working_vertices()
                    .map(|x| (x.clone(), gamma(&graph, &dom, &u, &part, x).unwrap()))
                    .collect();
                let lhs = integrate(&graph, &dom, &mixed, Region::Closure).unwrap();
                let norm_part = sobolev_norm_sq(&graph, &dom, &part).unwrap();
                let rhs = norm_part - 0.5 * ct.sum();
                assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + lhs.abs() + rhs.abs()));
            }
        }
    }
}
