//! Graphs of groups over finite graphs with finite edge groups.
//!
//! Oriented edges are numbered so that `2k` is the edge as declared and
//! `2k + 1` its reverse; `bar(y) = y ^ 1`. The embedding stored for an
//! oriented edge `y` is `i_y : G_y -> G_{omega(y)}`.

mod collapse;
mod dsl;
mod spanning;

use std::collections::HashSet;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::groups::{Elem, FiniteGroup, GroupBackend, GroupError};

pub use collapse::{elementary_collapse, is_non_elementary, Elementarity, SimpleCase};
pub use dsl::{parse_gog, ParseError, ParseErrorKind};
pub use spanning::{spanning_tree, SpanningData};

pub type VertexId = usize;
/// Oriented edge id. `y ^ 1` is the reverse edge.
pub type EdgeId = usize;

#[inline]
pub fn bar(y: EdgeId) -> EdgeId {
    y ^ 1
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GogError {
    #[error("graph has no vertices")]
    NoVertices,
    #[error("edge {edge}: group is infinite; edge groups must be finite")]
    EdgeGroupInfinite { edge: String },
    #[error("edge {edge}: embedding into {vertex} is not a homomorphism")]
    EmbeddingNotHomomorphism { edge: String, vertex: String },
    #[error("edge {edge}: embedding into {vertex} is not injective")]
    EmbeddingNotInjective { edge: String, vertex: String },
    #[error("edge {edge}: embedding lands outside the group of {vertex}")]
    EmbeddingOutOfRange { edge: String, vertex: String },
    #[error("vertex {vertex}: generators do not generate the vertex group")]
    GeneratorsDoNotGenerate { vertex: String },
    #[error("vertex {vertex}: generator is not an element of the vertex group")]
    BadGenerator { vertex: String },
    #[error("edge {edge} refers to unknown vertex {index}")]
    UnknownVertex { edge: String, index: usize },
    #[error("graph is disconnected")]
    GraphDisconnected,
    #[error("edge {edge} is a loop")]
    EdgeIsLoop { edge: String },
    #[error("edge {edge}: embedding is not an isomorphism onto the vertex group")]
    NotIsomorphism { edge: String },
    #[error("unknown edge {0}")]
    UnknownEdge(String),
    #[error("unknown vertex {0}")]
    UnknownVertexName(String),
    #[error(transparent)]
    Group(#[from] GroupError),
}

/// A vertex group together with its chosen finite generating set `S_v`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VertexGroup {
    /// Name of the group declaration this vertex uses.
    pub group_name: String,
    pub backend: GroupBackend,
    pub gens: Vec<Elem>,
    pub gen_labels: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Vertex {
    pub name: String,
    pub group: VertexGroup,
}

/// An unoriented edge from `tail` to `head` as declared.
///
/// `embed_fwd` is `i_y` into the head group for the declared orientation
/// `y`, `embed_bwd` is `i_{bar y}` into the tail group.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Edge {
    pub name: String,
    pub tail: VertexId,
    pub head: VertexId,
    pub group_name: String,
    pub group: FiniteGroup,
    pub embed_fwd: Vec<Elem>,
    pub embed_bwd: Vec<Elem>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphOfGroups {
    pub vertices: Vec<Vertex>,
    pub edges: Vec<Edge>,
}

impl GraphOfGroups {
    /// Validates a structure built by hand or deserialized from JSON.
    pub fn new(vertices: Vec<Vertex>, edges: Vec<Edge>) -> Result<Self, GogError> {
        let g = GraphOfGroups { vertices, edges };
        g.validate()?;
        Ok(g)
    }

    pub fn from_json(text: &str) -> Result<Self, Box<dyn std::error::Error + Send + Sync>> {
        let g: GraphOfGroups = serde_json::from_str(text)?;
        g.validate()?;
        Ok(g)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph of groups serializes")
    }

    pub fn validate(&self) -> Result<(), GogError> {
        if self.vertices.is_empty() {
            return Err(GogError::NoVertices);
        }
        for v in &self.vertices {
            let b = &v.group.backend;
            if v.group.gens.iter().any(|s| !b.contains(s)) || v.group.gens.len() != v.group.gen_labels.len() {
                return Err(GogError::BadGenerator { vertex: v.name.clone() });
            }
            let generates = match b {
                GroupBackend::Finite { group } => {
                    let gens: Vec<u32> = v
                        .group
                        .gens
                        .iter()
                        .map(|s| match s {
                            Elem::Finite(x) => *x,
                            _ => unreachable!(),
                        })
                        .collect();
                    group.generated_subgroup(&gens).len() == group.order()
                }
                _ => {
                    let mut mine = v.group.gens.clone();
                    mine.sort();
                    let mut std = b.standard_generators();
                    std.sort();
                    mine == std
                }
            };
            if !generates {
                return Err(GogError::GeneratorsDoNotGenerate { vertex: v.name.clone() });
            }
        }
        for e in &self.edges {
            for (end, map) in [(e.head, &e.embed_fwd), (e.tail, &e.embed_bwd)] {
                let vertex = self
                    .vertices
                    .get(end)
                    .ok_or(GogError::UnknownVertex { edge: e.name.clone(), index: end })?;
                check_embedding(&e.name, &e.group, &vertex.name, &vertex.group.backend, map)?;
            }
        }
        Ok(())
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    /// Number of unoriented edges, `|O̅_Y|`.
    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn oriented_edges(&self) -> impl Iterator<Item = EdgeId> {
        0..2 * self.edges.len()
    }

    pub fn edge(&self, y: EdgeId) -> &Edge {
        &self.edges[y / 2]
    }

    pub fn alpha(&self, y: EdgeId) -> VertexId {
        let e = self.edge(y);
        if y % 2 == 0 {
            e.tail
        } else {
            e.head
        }
    }

    pub fn omega(&self, y: EdgeId) -> VertexId {
        self.alpha(bar(y))
    }

    pub fn is_loop(&self, y: EdgeId) -> bool {
        let e = self.edge(y);
        e.tail == e.head
    }

    pub fn edge_group(&self, y: EdgeId) -> &FiniteGroup {
        &self.edge(y).group
    }

    /// `i_y`, as the list of images of the edge group elements.
    pub fn embedding(&self, y: EdgeId) -> &[Elem] {
        let e = self.edge(y);
        if y % 2 == 0 {
            &e.embed_fwd
        } else {
            &e.embed_bwd
        }
    }

    pub fn vertex_group(&self, v: VertexId) -> &GroupBackend {
        &self.vertices[v].group.backend
    }

    /// Display name of an oriented edge; reversed edges carry a trailing `'`.
    pub fn edge_label(&self, y: EdgeId) -> String {
        let n = &self.edge(y).name;
        if y % 2 == 0 {
            n.clone()
        } else {
            format!("{n}'")
        }
    }

    pub fn edge_by_name(&self, name: &str) -> Option<EdgeId> {
        let (base, rev) = match name.strip_suffix('\'') {
            Some(b) => (b, true),
            None => (name, false),
        };
        self.edges.iter().position(|e| e.name == base).map(|k| 2 * k + rev as usize)
    }

    pub fn vertex_by_name(&self, name: &str) -> Option<VertexId> {
        self.vertices.iter().position(|v| v.name == name)
    }

    /// `[G_{omega(y)} : i_y(G_y)]`, `None` when infinite.
    pub fn image_index(&self, y: EdgeId) -> Option<usize> {
        let order = self.vertex_group(self.omega(y)).order()?;
        Some(order / self.edge_group(y).order())
    }

    /// Whether `i_y` is onto `G_{omega(y)}`.
    pub fn is_isomorphism(&self, y: EdgeId) -> bool {
        self.image_index(y) == Some(1)
    }

    pub fn all_vertex_groups_finite(&self) -> bool {
        self.vertices.iter().all(|v| v.group.backend.is_finite())
    }
}

fn check_embedding(
    edge: &str,
    source: &FiniteGroup,
    vertex: &str,
    target: &GroupBackend,
    map: &[Elem],
) -> Result<(), GogError> {
    let err_range = || GogError::EmbeddingOutOfRange { edge: edge.to_string(), vertex: vertex.to_string() };
    if map.len() != source.order() || map.iter().any(|x| !target.contains(x)) {
        return Err(err_range());
    }
    for a in source.elements() {
        for b in source.elements() {
            let lhs = &map[source.mul(a, b) as usize];
            let rhs = target.mul(&map[a as usize], &map[b as usize]);
            if *lhs != rhs {
                return Err(GogError::EmbeddingNotHomomorphism { edge: edge.to_string(), vertex: vertex.to_string() });
            }
        }
    }
    let distinct: HashSet<&Elem> = map.iter().collect();
    if distinct.len() != map.len() {
        return Err(GogError::EmbeddingNotInjective { edge: edge.to_string(), vertex: vertex.to_string() });
    }
    Ok(())
}
