//! Small named graphs used across tests, examples, and the acceptance suite.
//! All fixtures use unit measures and unit edge weights.

use rand::Rng;
use rand_distr::StandardNormal;

use crate::graph::{Domain, GraphFunction, VertexId, WeightedGraph};

/// Path `v0 – v1 – … – v{n-1}` with the two endpoints as boundary.
/// `path(3)` is the smallest working graph: one interior vertex.
pub fn path(n: usize) -> (WeightedGraph, Domain) {
    assert!(n >= 3, "a path fixture needs at least 3 vertices");
    let ids: Vec<VertexId> = (0..n).map(|i| VertexId::new(format!("v{i}"))).collect();
    let vertices = ids.iter().map(|id| (id.clone(), 1.0));
    let edges = (0..n - 1).map(|i| (ids[i].clone(), ids[i + 1].clone(), 1.0));
    let graph = WeightedGraph::new(vertices, edges).unwrap();
    let interior = ids[1..n - 1].iter().cloned();
    let boundary = [ids[0].clone(), ids[n - 1].clone()];
    let dom = Domain::new(interior, boundary).unwrap();
    (graph, dom)
}

/// 6-cycle `v0 – … – v5 – v0` with the two opposite vertices v0, v3 as
/// boundary.
pub fn cycle6() -> (WeightedGraph, Domain) {
    let ids: Vec<VertexId> = (0..6).map(|i| VertexId::new(format!("v{i}"))).collect();
    let vertices = ids.iter().map(|id| (id.clone(), 1.0));
    let edges = (0..6).map(|i| (ids[i].clone(), ids[(i + 1) % 6].clone(), 1.0));
    let graph = WeightedGraph::new(vertices, edges).unwrap();
    let interior = [1usize, 2, 4, 5].iter().map(|&i| ids[i].clone());
    let boundary = [ids[0].clone(), ids[3].clone()];
    let dom = Domain::new(interior, boundary).unwrap();
    (graph, dom)
}

/// Star with a center and `leaves` rays; the last leaf is the boundary,
/// center and remaining leaves are interior.
pub fn star(leaves: usize) -> (WeightedGraph, Domain) {
    assert!(leaves >= 2, "a star fixture needs at least 2 leaves");
    let center = VertexId::new("c");
    let leaf_ids: Vec<VertexId> = (0..leaves).map(|i| VertexId::new(format!("l{i}"))).collect();
    let mut vertices = vec![(center.clone(), 1.0)];
    vertices.extend(leaf_ids.iter().map(|id| (id.clone(), 1.0)));
    let edges = leaf_ids.iter().map(|id| (center.clone(), id.clone(), 1.0));
    let graph = WeightedGraph::new(vertices, edges).unwrap();
    let mut interior = vec![center];
    interior.extend(leaf_ids[..leaves - 1].iter().cloned());
    let boundary = [leaf_ids[leaves - 1].clone()];
    let dom = Domain::new(interior, boundary).unwrap();
    (graph, dom)
}

/// 4×4 interior grid wrapped in a Dirichlet frame. Interior vertices sit at
/// `(i,j)` for `i,j ∈ 1..=4` with 4-neighbor adjacency; each frame vertex is
/// adjacent to exactly one interior vertex (no corner vertices).
pub fn grid4x4() -> (WeightedGraph, Domain) {
    let id = |i: i32, j: i32| VertexId::new(format!("g{i}_{j}"));
    let mut vertices = Vec::new();
    let mut interior = Vec::new();
    let mut boundary = Vec::new();
    for i in 1..=4 {
        for j in 1..=4 {
            vertices.push((id(i, j), 1.0));
            interior.push(id(i, j));
        }
    }
    for k in 1..=4 {
        for v in [id(0, k), id(5, k), id(k, 0), id(k, 5)] {
            vertices.push((v.clone(), 1.0));
            boundary.push(v);
        }
    }
    let mut edges = Vec::new();
    for i in 1..=4 {
        for j in 1..=4 {
            if i < 4 {
                edges.push((id(i, j), id(i + 1, j), 1.0));
            }
            if j < 4 {
                edges.push((id(i, j), id(i, j + 1), 1.0));
            }
        }
    }
    for k in 1..=4 {
        edges.push((id(0, k), id(1, k), 1.0));
        edges.push((id(5, k), id(4, k), 1.0));
        edges.push((id(k, 0), id(k, 1), 1.0));
        edges.push((id(k, 5), id(k, 4), 1.0));
    }
    let graph = WeightedGraph::new(vertices, edges).unwrap();
    let dom = Domain::new(interior, boundary).unwrap();
    (graph, dom)
}

/// Indicator of a single interior vertex.
pub fn indicator(dom: &Domain, vertex: &str) -> GraphFunction {
    GraphFunction::from_interior_values(dom, [(VertexId::from(vertex), 1.0)])
        .expect("indicator vertex must be interior")
}

/// Standard-normal values on the interior, zero on the boundary.
pub fn random_function(dom: &Domain, rng: &mut impl Rng) -> GraphFunction {
    let values = dom
        .interior()
        .iter()
        .map(|x| (x.clone(), rng.sample::<f64, _>(StandardNormal)))
        .collect::<Vec<_>>();
    GraphFunction::from_interior_values(dom, values).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::validate;

    #[test]
    fn fixtures_pass_validation() {
        for (graph, dom) in [path(3), path(4), path(5), cycle6(), star(5), grid4x4()] {
            assert!(validate(&graph, &dom).is_empty());
        }
    }

    #[test]
    fn grid_shape() {
        let (graph, dom) = grid4x4();
        assert_eq!(graph.vertex_count(), 32);
        assert_eq!(dom.interior_count(), 16);
        assert_eq!(dom.boundary().len(), 16);
    }
}
