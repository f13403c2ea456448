use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use super::{bar, EdgeId, GogError, GraphOfGroups, VertexId};

/// A BFS spanning tree `T` with an orientation `A` of the edges.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SpanningData {
    pub root: VertexId,
    /// Per unoriented edge: whether it lies in `T`.
    pub in_tree: Vec<bool>,
    /// Per unoriented edge: the oriented edge chosen for `A`.
    pub orientation: Vec<EdgeId>,
    /// Per vertex: the tree edge entering it from its parent.
    pub parent_edge: Vec<Option<EdgeId>>,
    /// Per vertex: the oriented tree edges from the root to it.
    pub tree_path: Vec<Vec<EdgeId>>,
    /// Vertices in BFS order.
    pub order: Vec<VertexId>,
}

/// BFS from `root`, scanning outgoing oriented edges in id order.
pub fn spanning_tree(g: &GraphOfGroups, root: VertexId) -> Result<SpanningData, GogError> {
    let n = g.num_vertices();
    if root >= n {
        return Err(GogError::UnknownVertexName(root.to_string()));
    }
    let mut parent_edge: Vec<Option<EdgeId>> = vec![None; n];
    let mut seen = vec![false; n];
    let mut tree_path = vec![Vec::new(); n];
    let mut in_tree = vec![false; g.num_edges()];
    let mut order = Vec::with_capacity(n);
    seen[root] = true;
    let mut queue = VecDeque::from([root]);
    while let Some(u) = queue.pop_front() {
        order.push(u);
        for y in g.oriented_edges() {
            if g.alpha(y) != u {
                continue;
            }
            let w = g.omega(y);
            if !seen[w] {
                seen[w] = true;
                parent_edge[w] = Some(y);
                in_tree[y / 2] = true;
                let mut p = tree_path[u].clone();
                p.push(y);
                tree_path[w] = p;
                queue.push_back(w);
            }
        }
    }
    if order.len() != n {
        return Err(GogError::GraphDisconnected);
    }
    let mut orientation: Vec<EdgeId> = (0..g.num_edges()).map(|k| 2 * k).collect();
    for y in parent_edge.iter().flatten() {
        orientation[y / 2] = *y;
    }
    Ok(SpanningData { root, in_tree, orientation, parent_edge, tree_path, order })
}

impl SpanningData {
    pub fn is_tree_edge(&self, y: EdgeId) -> bool {
        self.in_tree[y / 2]
    }

    pub fn in_orientation(&self, y: EdgeId) -> bool {
        self.orientation[y / 2] == y
    }

    /// Oriented tree edges pointing away from the root.
    pub fn tree_edges(&self) -> Vec<EdgeId> {
        self.parent_edge.iter().flatten().copied().collect::<std::collections::BTreeSet<_>>().into_iter().collect()
    }

    /// Non-tree edges in their `A` orientation.
    pub fn non_tree_edges(&self) -> Vec<EdgeId> {
        (0..self.in_tree.len()).filter(|&k| !self.in_tree[k]).map(|k| self.orientation[k]).collect()
    }

    /// The tree path from `v` back to the root.
    pub fn path_to_root(&self, v: VertexId) -> Vec<EdgeId> {
        self.tree_path[v].iter().rev().map(|&y| bar(y)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::parse_gog;

    #[test]
    fn single_loop_is_not_in_tree() {
        let g = parse_gog("vertex v trivial\nedge s v -- v group trivial embed_fwd {} embed_bwd {}\n").unwrap();
        let sd = spanning_tree(&g, 0).unwrap();
        assert_eq!(sd.tree_edges(), Vec::<EdgeId>::new());
        assert_eq!(sd.non_tree_edges(), vec![0]);
    }

    #[test]
    fn segment_edge_is_in_tree() {
        let g = parse_gog(crate::gog::tests::DINF).unwrap();
        let sd = spanning_tree(&g, 0).unwrap();
        assert_eq!(sd.tree_edges(), vec![0]);
        assert_eq!(sd.tree_path[1], vec![0]);
        let sd = spanning_tree(&g, 1).unwrap();
        assert_eq!(sd.tree_edges(), vec![1]);
        assert!(sd.in_orientation(1));
        assert_eq!(sd.path_to_root(0), vec![0]);
    }

    #[test]
    fn theta_graph_takes_least_edge() {
        let text = "\
vertex a trivial
vertex b trivial
edge e0 a -- b group trivial embed_fwd {} embed_bwd {}
edge e1 a -- b group trivial embed_fwd {} embed_bwd {}
edge e2 b -- a group trivial embed_fwd {} embed_bwd {}
";
        let g = parse_gog(text).unwrap();
        let sd = spanning_tree(&g, 0).unwrap();
        assert_eq!(sd.tree_edges(), vec![0]);
        assert_eq!(sd.non_tree_edges(), vec![2, 4]);
        for k in 0..3 {
            assert!(sd.in_orientation(sd.orientation[k]));
            assert!(!sd.in_orientation(bar(sd.orientation[k])));
        }
    }

    #[test]
    fn disconnected_graph_is_rejected() {
        let g = parse_gog("vertex a trivial\nvertex b trivial\n").unwrap();
        assert_eq!(spanning_tree(&g, 0), Err(GogError::GraphDisconnected));
    }

    #[test]
    fn deterministic() {
        let text = "vertex a trivial\nvertex b trivial\nvertex c trivial\nedge x a -- b group trivial embed_fwd {} embed_bwd {}\nedge y c -- b group trivial embed_fwd {} embed_bwd {}\nedge z a -- c group trivial embed_fwd {} embed_bwd {}\n";
        let a = spanning_tree(&parse_gog(text).unwrap(), 0).unwrap();
        let b = spanning_tree(&parse_gog(text).unwrap(), 0).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.tree_edges(), vec![0, 4]);
        assert_eq!(a.orientation, vec![0, 2, 4]);
    }
}
