//! Finite pieces of the Bass-Serre tree.
//!
//! A coset `x G_v` is keyed by the reduced path of `x p_v` with its trailing
//! element dropped, so tree vertices are reduced paths from the root and two
//! keys are adjacent exactly when one extends the other by a single step.
//! The root key is empty and stands for `1 G_{v0}`. Stars of vertices with an
//! infinite backend group are cut off at a fixed backend word length.

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt::Write as _;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::Dsu;
use crate::fundgroup::{CayleyBall, FundamentalGroup, NormalForm, PathKey};
use crate::gog::{bar, EdgeId, VertexId};
use crate::groups::Elem;
use crate::BudgetExceeded;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TreeError {
    #[error("vertex or edge is not in the ball")]
    NotInBall,
    #[error("the graph has no edges")]
    NoEdges,
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeVertex {
    pub key: PathKey,
    pub vertex_type: VertexId,
}

impl TreeVertex {
    pub fn from_key(fg: &FundamentalGroup, key: PathKey) -> Self {
        let vertex_type = fg.end_vertex(&key);
        TreeVertex { key, vertex_type }
    }

    /// The coset `x G_v`.
    pub fn of(fg: &FundamentalGroup, x: &NormalForm, v: VertexId) -> Self {
        TreeVertex { key: fg.vertex_key(x, v), vertex_type: v }
    }

    pub fn rep(&self, fg: &FundamentalGroup) -> NormalForm {
        fg.key_rep(&self.key)
    }

    /// Tree distance to the root vertex.
    pub fn depth(&self) -> usize {
        self.key.len()
    }

    /// The coset `gamma x G_v`.
    pub fn translate(&self, fg: &FundamentalGroup, gamma: &NormalForm) -> Self {
        TreeVertex::of(fg, &fg.multiply(gamma, &self.rep(fg)), self.vertex_type)
    }
}

/// An oriented edge of the tree, of type `edge_type` from `tail` to `head`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TreeEdge {
    pub edge_type: EdgeId,
    pub tail: PathKey,
    pub head: PathKey,
}

impl TreeEdge {
    /// The edge from the parent of `child` to `child`.
    pub fn to_child(child: &[(Elem, EdgeId)]) -> Self {
        let (_, z) = child.last().expect("the root has no parent edge");
        TreeEdge { edge_type: *z, tail: child[..child.len() - 1].to_vec(), head: child.to_vec() }
    }

    pub fn bar(&self) -> Self {
        TreeEdge { edge_type: bar(self.edge_type), tail: self.head.clone(), head: self.tail.clone() }
    }

    /// The endpoint farther from the root.
    pub fn child(&self) -> &PathKey {
        if self.head.len() > self.tail.len() {
            &self.head
        } else {
            &self.tail
        }
    }

    /// The same geometric edge oriented as its type in `A`.
    pub fn in_orientation(&self, fg: &FundamentalGroup) -> Self {
        if fg.spanning().in_orientation(self.edge_type) {
            self.clone()
        } else {
            self.bar()
        }
    }

    /// The canonical representative `phi`: the `gamma` with this edge equal to `gamma G_a`, `a` in `A`.
    pub fn rep(&self, fg: &FundamentalGroup) -> NormalForm {
        phi(fg, self)
    }

    /// Translate by `gamma`.
    pub fn translate(&self, fg: &FundamentalGroup, gamma: &NormalForm) -> Self {
        let tail = TreeVertex::from_key(fg, self.tail.clone()).translate(fg, gamma).key;
        let head = TreeVertex::from_key(fg, self.head.clone()).translate(fg, gamma).key;
        TreeEdge { edge_type: self.edge_type, tail, head }
    }
}

/// `phi(gamma G_a) = gamma` for the canonical coset representative.
pub fn phi(fg: &FundamentalGroup, e: &TreeEdge) -> NormalForm {
    let a = e.in_orientation(fg);
    let g = fg.graph();
    let v = g.alpha(a.edge_type);
    if a.head.len() > a.tail.len() {
        let (t, _) = a.head.last().unwrap();
        let mut b = fg.builder_from(&NormalForm { steps: a.tail.clone(), last: g.vertex_group(v).identity() });
        b.push_elem(t);
        for y in fg.spanning().path_to_root(v) {
            b.push_letter(y);
        }
        b.finish()
    } else {
        fg.key_rep(&a.tail)
    }
}

/// `phi` followed by a uniformly random element of the edge group: another element of the same coset.
pub fn phi_random<R: Rng>(fg: &FundamentalGroup, e: &TreeEdge, rng: &mut R) -> NormalForm {
    let a = e.in_orientation(fg).edge_type;
    let sub = fg.edge_subgroup(a);
    let h = &sub[rng.gen_range(0..sub.len())];
    fg.multiply(&phi(fg, e), h)
}

/// All elements of the coset `gamma G_a`.
pub fn edge_coset(fg: &FundamentalGroup, e: &TreeEdge) -> Vec<NormalForm> {
    let a = e.in_orientation(fg).edge_type;
    let gamma = phi(fg, e);
    fg.edge_subgroup(a).iter().map(|h| fg.multiply(&gamma, h)).collect()
}

/// Steps leaving the vertex with key `key`, excluding the way back to its parent.
/// The flag reports whether an infinite star was cut off at backend length `star_radius`.
pub fn child_steps(fg: &FundamentalGroup, key: &[(Elem, EdgeId)], star_radius: usize) -> (Vec<(Elem, EdgeId)>, bool) {
    let g = fg.graph();
    let v = fg.end_vertex(key);
    let back = key.last().map(|(_, z)| bar(*z));
    let mut out = Vec::new();
    let mut truncated = false;
    for z in g.oriented_edges().filter(|&z| g.alpha(z) == v) {
        let reps = match fg.transversal(z) {
            Some(r) => r,
            None => {
                truncated = true;
                g.vertex_group(v).backend_ball(star_radius)
            }
        };
        for t in reps {
            if Some(z) == back && fg.is_trivial_rep(z, &t) {
                continue;
            }
            out.push((t, z));
        }
    }
    (out, truncated)
}

/// Degree of a vertex of type `v` in the full tree; `None` when infinite.
pub fn full_degree(fg: &FundamentalGroup, v: VertexId) -> Option<usize> {
    let g = fg.graph();
    g.oriented_edges().filter(|&y| g.omega(y) == v).map(|y| g.image_index(y)).sum()
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeNode {
    pub vertex: TreeVertex,
    pub parent: Option<usize>,
    pub children: Vec<usize>,
    /// The star was cut off at the backend length limit.
    pub truncated: bool,
}

/// The combinatorial ball of radius `radius` about `1 G_{v0}`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct TreeBall {
    pub radius: usize,
    pub star_radius: usize,
    pub nodes: Vec<TreeNode>,
    #[serde(skip)]
    index: HashMap<PathKey, usize>,
}

pub const DEFAULT_STAR_RADIUS: usize = 2;

pub fn tree_ball(fg: &FundamentalGroup, radius: usize, star_radius: usize, budget: usize) -> Result<TreeBall, BudgetExceeded> {
    let root = TreeVertex::from_key(fg, Vec::new());
    let mut nodes = vec![TreeNode { vertex: root, parent: None, children: Vec::new(), truncated: false }];
    let mut frontier = vec![0usize];
    for _ in 0..radius {
        let expanded: Vec<(Vec<(Elem, EdgeId)>, bool)> =
            frontier.par_iter().map(|&i| child_steps(fg, &nodes[i].vertex.key, star_radius)).collect();
        let mut next = Vec::new();
        for (&i, (steps, truncated)) in frontier.iter().zip(expanded) {
            nodes[i].truncated = truncated;
            for s in steps {
                if nodes.len() >= budget {
                    return Err(BudgetExceeded { limit: budget });
                }
                let mut key = nodes[i].vertex.key.clone();
                key.push(s);
                let j = nodes.len();
                nodes.push(TreeNode {
                    vertex: TreeVertex::from_key(fg, key),
                    parent: Some(i),
                    children: Vec::new(),
                    truncated: false,
                });
                nodes[i].children.push(j);
                next.push(j);
            }
        }
        frontier = next;
    }
    for &i in &frontier {
        nodes[i].truncated = child_steps(fg, &nodes[i].vertex.key, star_radius).1;
    }
    let index = nodes.iter().enumerate().map(|(i, n)| (n.vertex.key.clone(), i)).collect();
    Ok(TreeBall { radius, star_radius, nodes, index })
}

impl TreeBall {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn num_edges(&self) -> usize {
        self.nodes.len() - 1
    }

    pub fn node(&self, key: &[(Elem, EdgeId)]) -> Option<usize> {
        self.index.get(key).copied()
    }

    pub fn depth(&self, i: usize) -> usize {
        self.nodes[i].vertex.depth()
    }

    /// Neighbours inside the ball.
    pub fn neighbours(&self, i: usize) -> impl Iterator<Item = usize> + '_ {
        self.nodes[i].parent.into_iter().chain(self.nodes[i].children.iter().copied())
    }

    /// All geometric edges, each oriented from parent to child.
    pub fn edges(&self) -> Vec<TreeEdge> {
        self.nodes.iter().skip(1).map(|n| TreeEdge::to_child(&n.vertex.key)).collect()
    }

    /// Whether the ball is a tree: connected with `|V| = |E| + 1`.
    pub fn is_tree(&self) -> bool {
        let mut dsu = Dsu::new(self.len());
        let mut edges = 0;
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                edges += 1;
                if !dsu.union(i, c) {
                    return false;
                }
            }
        }
        edges + 1 == self.len()
    }

    fn ancestors(&self, mut i: usize) -> Vec<usize> {
        let mut out = vec![i];
        while let Some(p) = self.nodes[i].parent {
            out.push(p);
            i = p;
        }
        out
    }

    /// The unique edge path from `u` to `w`.
    pub fn geodesic(&self, u: &TreeVertex, w: &TreeVertex) -> Result<Vec<TreeEdge>, TreeError> {
        let a = self.node(&u.key).ok_or(TreeError::NotInBall)?;
        let b = self.node(&w.key).ok_or(TreeError::NotInBall)?;
        let up = self.ancestors(a);
        let down = self.ancestors(b);
        let common: HashSet<usize> = up.iter().copied().collect();
        let lca = *down.iter().find(|x| common.contains(x)).unwrap();
        let mut path = Vec::new();
        for &x in up.iter().take_while(|&&x| x != lca) {
            path.push(TreeEdge::to_child(&self.nodes[x].vertex.key).bar());
        }
        let mut tail: Vec<TreeEdge> =
            down.iter().take_while(|&&x| x != lca).map(|&x| TreeEdge::to_child(&self.nodes[x].vertex.key)).collect();
        tail.reverse();
        path.extend(tail);
        Ok(path)
    }

    /// Node indices of the subtree hanging below `i`, including `i`.
    pub fn subtree(&self, i: usize) -> Vec<usize> {
        let mut out = Vec::new();
        let mut stack = vec![i];
        while let Some(x) = stack.pop() {
            out.push(x);
            stack.extend(self.nodes[x].children.iter().rev());
        }
        out
    }

    /// The two sides of the ball with the open edge removed; the first holds the tail.
    pub fn split_by_edge(&self, e: &TreeEdge) -> Result<(Vec<usize>, Vec<usize>), TreeError> {
        let c = self.node(e.child()).ok_or(TreeError::NotInBall)?;
        let parent = self.nodes[c].parent.ok_or(TreeError::NotInBall)?;
        let other = if *e.child() == e.head { &e.tail } else { &e.head };
        if self.node(other) != Some(parent) {
            return Err(TreeError::NotInBall);
        }
        let below = self.subtree(c);
        let inside: HashSet<usize> = below.iter().copied().collect();
        let mut rest: Vec<usize> = (0..self.len()).filter(|x| !inside.contains(x)).collect();
        let mut below = below;
        below.sort_unstable();
        rest.sort_unstable();
        Ok(if *e.child() == e.head { (rest, below) } else { (below, rest) })
    }

    /// Tree distances from a set of nodes, within the ball.
    pub fn distances(&self, sources: &[usize]) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.len()];
        let mut queue = VecDeque::new();
        for &s in sources {
            dist[s] = 0;
            queue.push_back(s);
        }
        while let Some(u) = queue.pop_front() {
            for w in self.neighbours(u) {
                if dist[w] == usize::MAX {
                    dist[w] = dist[u] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// DOT rendering with vertex labels `<type>:<rep>`.
    pub fn to_dot(&self, fg: &FundamentalGroup) -> String {
        let g = fg.graph();
        let mut out = String::from("graph tree {\n");
        for (i, n) in self.nodes.iter().enumerate() {
            let label = format!("{}:{}", g.vertices[n.vertex.vertex_type].name, fg.display(&n.vertex.rep(fg)));
            let _ = writeln!(out, "  n{i} [label=\"{}\"];", label.replace('"', "\\\""));
        }
        for (i, n) in self.nodes.iter().enumerate() {
            for &c in &n.children {
                let (_, z) = self.nodes[c].vertex.key.last().unwrap();
                let _ = writeln!(out, "  n{i} -- n{c} [label=\"{}\"];", g.edge_label(*z));
            }
        }
        out.push_str("}\n");
        out
    }
}

/// The subtree spanned by the identity edge cosets `G_y`, `y` in `A`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TilingTree {
    pub vertices: Vec<TreeVertex>,
    pub edges: Vec<TreeEdge>,
}

/// The edge `G_y` from `G_{alpha(y)}` to `s_y G_{omega(y)}`.
pub fn identity_edge(fg: &FundamentalGroup, y: EdgeId) -> TreeEdge {
    let g = fg.graph();
    let tail = fg.vertex_key(&fg.identity(), g.alpha(y));
    let head = fg.vertex_key(&fg.stable_letter(y), g.omega(y));
    TreeEdge { edge_type: y, tail, head }
}

pub fn tiling_tree(fg: &FundamentalGroup) -> Result<TilingTree, TreeError> {
    let g = fg.graph();
    if g.num_edges() == 0 {
        return Err(TreeError::NoEdges);
    }
    let e = fg.identity();
    let mut vertices: Vec<TreeVertex> = Vec::new();
    let mut edges = Vec::new();
    for &y in &fg.spanning().orientation {
        let edge = identity_edge(fg, y);
        let tail = TreeVertex::of(fg, &e, g.alpha(y));
        let head = TreeVertex::from_key(fg, edge.head.clone());
        edges.push(edge);
        for v in [tail, head] {
            if !vertices.contains(&v) {
                vertices.push(v);
            }
        }
    }
    let mut dsu = Dsu::new(vertices.len());
    let pos = |k: &PathKey| vertices.iter().position(|v| v.key == *k).unwrap();
    for ed in &edges {
        dsu.union(pos(&ed.tail), pos(&ed.head));
    }
    let r = dsu.find(0);
    assert!((0..vertices.len()).all(|i| dsu.find(i) == r), "tiling tree is connected");
    Ok(TilingTree { vertices, edges })
}

impl TilingTree {
    /// Whether `gamma T` and `T` share a vertex.
    pub fn meets_translate(&self, fg: &FundamentalGroup, gamma: &NormalForm) -> bool {
        let mine: HashSet<&PathKey> = self.vertices.iter().map(|v| &v.key).collect();
        self.vertices.iter().any(|v| mine.contains(&v.translate(fg, gamma).key))
    }
}

/// Tree distance between two vertex keys.
pub fn key_distance(u: &[(Elem, EdgeId)], w: &[(Elem, EdgeId)]) -> usize {
    let l = common_prefix(u, w);
    u.len() + w.len() - 2 * l
}

fn common_prefix(u: &[(Elem, EdgeId)], w: &[(Elem, EdgeId)]) -> usize {
    u.iter().zip(w).take_while(|(a, b)| a == b).count()
}

/// The unique edge path from `u` to `w`, computed from the keys alone.
pub fn tree_geodesic(u: &TreeVertex, w: &TreeVertex) -> Vec<TreeEdge> {
    let l = common_prefix(&u.key, &w.key);
    let mut path: Vec<TreeEdge> = (l + 1..=u.key.len()).rev().map(|i| TreeEdge::to_child(&u.key[..i]).bar()).collect();
    path.extend((l + 1..=w.key.len()).map(|i| TreeEdge::to_child(&w.key[..i])));
    path
}

/// Whether the vertex with key `x` lies on the head side of `e` once the open edge is removed.
pub fn on_head_side(e: &TreeEdge, x: &[(Elem, EdgeId)]) -> bool {
    let below = x.starts_with(e.child());
    below == (*e.child() == e.head)
}

/// Pairs `(edge, v)` of the ball where some `gamma` in the edge coset has
/// `gamma G_v` farther than `bound` from the edge.
pub fn edge_to_type_violations(fg: &FundamentalGroup, ball: &TreeBall, bound: usize) -> Vec<(TreeEdge, VertexId)> {
    let types = fg.graph().num_vertices();
    ball.edges()
        .into_par_iter()
        .flat_map_iter(|e| {
            let coset = edge_coset(fg, &e);
            (0..types)
                .filter(|&v| {
                    coset.iter().any(|gamma| {
                        let k = fg.vertex_key(gamma, v);
                        key_distance(&k, &e.tail).min(key_distance(&k, &e.head)) > bound
                    })
                })
                .map(|v| (e.clone(), v))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Largest `d_S` diameter of an edge coset, which by left invariance is that of the identity cosets.
pub fn max_edge_coset_diameter(fg: &FundamentalGroup, cayley: &CayleyBall) -> Option<usize> {
    let mut best = 0;
    for y in fg.graph().oriented_edges() {
        let sub = fg.edge_subgroup(y);
        for x in &sub {
            for z in &sub {
                best = best.max(cayley.word_distance(fg, x, z)?);
            }
        }
    }
    Some(best)
}

/// Largest number of ball edges sharing the same `phi` value.
pub fn max_phi_preimage(fg: &FundamentalGroup, ball: &TreeBall) -> usize {
    let mut counts: HashMap<NormalForm, usize> = HashMap::new();
    for e in ball.edges() {
        *counts.entry(phi(fg, &e)).or_default() += 1;
    }
    counts.into_values().max().unwrap_or(0)
}
