//! File formats: graph, parameter, and function JSON, plus report
//! serialization helpers.
//!
//! Graph file:
//! ```json
//! { "vertices": [{"id": "v0", "mu": 1.0}],
//!   "edges": [{"u": "v0", "v": "v1", "w": 1.0}],
//!   "interior": ["v1"], "boundary": ["v0"] }
//! ```
//! Duplicate or doubly-listed edges are ingestion errors, and every vertex
//! must be listed in exactly one of `interior`/`boundary`. Parameter files
//! carry `a, b, lambda, p, r, k, m` plus the fields `Q` and `g`, each either
//! a single number (a constant field) or a map from interior vertex to
//! value; both default to the constant 1 when omitted. Function files are a
//! bare JSON object mapping vertex ids to values; boundary entries must be
//! zero and missing vertices default to zero.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::energy::{EnergyError, ModelParams};
use crate::graph::{Domain, GraphError, GraphFunction, VertexId, WeightedGraph};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("cannot read {path}: {source}")]
    Read {
        path: String,
        source: std::io::Error,
    },
    #[error("cannot write {path}: {source}")]
    Write {
        path: String,
        source: std::io::Error,
    },
    #[error("malformed JSON in {path}: {source}")]
    Json {
        path: String,
        source: serde_json::Error,
    },
    #[error("vertex {0} is listed in neither interior nor boundary")]
    UncoveredVertex(VertexId),
    #[error("unknown vertex {0} in domain listing")]
    UnknownDomainVertex(VertexId),
    #[error("graph/domain invariant violations: {}", .0.join("; "))]
    Violations(Vec<String>),
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Params(#[from] EnergyError),
}

#[derive(Debug, Deserialize)]
pub struct GraphFile {
    pub vertices: Vec<VertexEntry>,
    pub edges: Vec<EdgeEntry>,
    pub interior: Vec<String>,
    pub boundary: Vec<String>,
}

#[derive(Debug, Deserialize)]
pub struct VertexEntry {
    pub id: String,
    pub mu: f64,
}

#[derive(Debug, Deserialize)]
pub struct EdgeEntry {
    pub u: String,
    pub v: String,
    pub w: f64,
}

impl GraphFile {
    /// Builds and fully validates the working graph. Structural problems and
    /// any invariant violation reported by [`crate::graph::validate`] are
    /// ingestion errors.
    pub fn build(&self) -> Result<(WeightedGraph, Domain), FileError> {
        let vertices = self
            .vertices
            .iter()
            .map(|v| (VertexId::from(v.id.as_str()), v.mu));
        let edges = self.edges.iter().map(|e| {
            (
                VertexId::from(e.u.as_str()),
                VertexId::from(e.v.as_str()),
                e.w,
            )
        });
        let graph = WeightedGraph::new(vertices, edges)?;
        let interior: Vec<VertexId> = self.interior.iter().map(|s| VertexId::from(s.as_str())).collect();
        let boundary: Vec<VertexId> = self.boundary.iter().map(|s| VertexId::from(s.as_str())).collect();
        for x in interior.iter().chain(boundary.iter()) {
            if !graph.contains(x) {
                return Err(FileError::UnknownDomainVertex(x.clone()));
            }
        }
        let dom = Domain::new(interior, boundary)?;
        // The file contract is closed-world: every vertex belongs to the
        // working set.
        for (x, _) in graph.vertices() {
            if !dom.is_working(x) {
                return Err(FileError::UncoveredVertex(x.clone()));
            }
        }
        let violations = crate::graph::validate(&graph, &dom);
        if !violations.is_empty() {
            return Err(FileError::Violations(violations));
        }
        Ok((graph, dom))
    }
}

/// A field that is either one constant or a per-vertex map.
#[derive(Debug, Deserialize)]
#[serde(untagged)]
pub enum FieldSpec {
    Constant(f64),
    PerVertex(BTreeMap<String, f64>),
}

impl Default for FieldSpec {
    fn default() -> Self {
        FieldSpec::Constant(1.0)
    }
}

impl FieldSpec {
    fn resolve(&self, dom: &Domain) -> BTreeMap<VertexId, f64> {
        match self {
            FieldSpec::Constant(c) => dom.interior().iter().map(|x| (x.clone(), *c)).collect(),
            FieldSpec::PerVertex(map) => map
                .iter()
                .map(|(k, v)| (VertexId::from(k.as_str()), *v))
                .collect(),
        }
    }
}

#[derive(Debug, Deserialize)]
pub struct ParamsFile {
    pub a: f64,
    pub b: f64,
    pub lambda: f64,
    pub p: f64,
    pub r: f64,
    pub k: u32,
    pub m: u32,
    #[serde(rename = "Q", default)]
    pub q: FieldSpec,
    #[serde(default)]
    pub g: FieldSpec,
}

impl ParamsFile {
    /// Resolves constant fields against the domain and validates every
    /// parameter invariant.
    pub fn build(&self, dom: &Domain) -> Result<ModelParams, FileError> {
        let params = ModelParams {
            a: self.a,
            b: self.b,
            lambda: self.lambda,
            p: self.p,
            r: self.r,
            k: self.k,
            m: self.m,
            q_field: self.q.resolve(dom),
            g_field: self.g.resolve(dom),
        };
        params.validate(dom)?;
        Ok(params)
    }
}

fn read_to_string(path: &Path) -> Result<String, FileError> {
    std::fs::read_to_string(path).map_err(|source| FileError::Read {
        path: path.display().to_string(),
        source,
    })
}

fn parse<T: serde::de::DeserializeOwned>(path: &Path, text: &str) -> Result<T, FileError> {
    serde_json::from_str(text).map_err(|source| FileError::Json {
        path: path.display().to_string(),
        source,
    })
}

/// Reads and validates a graph file.
pub fn load_graph(path: &Path) -> Result<(WeightedGraph, Domain), FileError> {
    let text = read_to_string(path)?;
    let file: GraphFile = parse(path, &text)?;
    file.build()
}

/// Reads and validates a parameter file against a domain.
pub fn load_params(path: &Path, dom: &Domain) -> Result<ModelParams, FileError> {
    let text = read_to_string(path)?;
    let file: ParamsFile = parse(path, &text)?;
    file.build(dom)
}

/// Reads a function file (a bare id→value object). The zero boundary
/// condition is enforced, not assumed.
pub fn load_function(path: &Path, dom: &Domain) -> Result<GraphFunction, FileError> {
    let text = read_to_string(path)?;
    let map: BTreeMap<String, f64> = parse(path, &text)?;
    let values = map
        .into_iter()
        .map(|(k, v)| (VertexId::from(k.as_str()), v));
    Ok(GraphFunction::from_full_values(dom, values)?)
}

/// Writes pretty-printed JSON.
pub fn write_json<T: serde::Serialize>(path: &Path, value: &T) -> Result<(), FileError> {
    let text = serde_json::to_string_pretty(value).expect("report serialization cannot fail");
    std::fs::write(path, text + "\n").map_err(|source| FileError::Write {
        path: path.display().to_string(),
        source,
    })
}
