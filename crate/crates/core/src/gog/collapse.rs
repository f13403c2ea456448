use std::collections::{BTreeSet, HashMap};

use serde::{Deserialize, Serialize};

use super::{bar, EdgeId, GogError, GraphOfGroups};
use crate::groups::Elem;

/// Contracts the non-loop edge `y` whose embedding `i_y` is onto `G_{omega(y)}`.
///
/// The new vertex keeps the name and group of `alpha(y)`. An embedding
/// `i_z` into the removed vertex becomes `i_{bar y} . i_y^{-1} . i_z`.
pub fn elementary_collapse(g: &GraphOfGroups, y: EdgeId) -> Result<GraphOfGroups, GogError> {
    if y >= 2 * g.num_edges() {
        return Err(GogError::UnknownEdge(y.to_string()));
    }
    let name = g.edge(y).name.clone();
    if g.is_loop(y) {
        return Err(GogError::EdgeIsLoop { edge: name });
    }
    if !g.is_isomorphism(y) {
        return Err(GogError::NotIsomorphism { edge: name });
    }
    let keep = g.alpha(y);
    let gone = g.omega(y);
    let i_y = g.embedding(y);
    let i_ybar = g.embedding(bar(y));
    let back: HashMap<&Elem, usize> = i_y.iter().enumerate().map(|(h, x)| (x, h)).collect();
    let transport = |x: &Elem| i_ybar[back[x]].clone();
    let reindex = |v: usize| {
        let v = if v == gone { keep } else { v };
        if v > gone {
            v - 1
        } else {
            v
        }
    };

    let vertices = g.vertices.iter().enumerate().filter(|(v, _)| *v != gone).map(|(_, v)| v.clone()).collect();
    let mut edges = Vec::with_capacity(g.num_edges() - 1);
    for (k, e) in g.edges.iter().enumerate() {
        if k == y / 2 {
            continue;
        }
        let mut e = e.clone();
        if e.head == gone {
            e.embed_fwd = e.embed_fwd.iter().map(transport).collect();
        }
        if e.tail == gone {
            e.embed_bwd = e.embed_bwd.iter().map(transport).collect();
        }
        e.head = reindex(e.head);
        e.tail = reindex(e.tail);
        edges.push(e);
    }
    GraphOfGroups::new(vertices, edges)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SimpleCase {
    /// One vertex, no edges.
    SingleVertex,
    /// One non-loop edge whose images have index 2 on both sides.
    IndexTwoEdge,
    /// One loop whose two embeddings are isomorphisms.
    IsomorphicLoop,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Elementarity {
    NonElementary,
    SimplyElementary(SimpleCase),
    /// Reduces to a simply elementary graph; `collapses` lists the oriented
    /// edge labels contracted, in order.
    ReducesTo { case: SimpleCase, collapses: Vec<String> },
}

impl Elementarity {
    pub fn is_non_elementary(&self) -> bool {
        matches!(self, Elementarity::NonElementary)
    }
}

fn simple_case(g: &GraphOfGroups) -> Option<SimpleCase> {
    match (g.num_vertices(), g.num_edges()) {
        (1, 0) => Some(SimpleCase::SingleVertex),
        (2, 1) if g.image_index(0) == Some(2) && g.image_index(1) == Some(2) => Some(SimpleCase::IndexTwoEdge),
        (1, 1) if g.is_isomorphism(0) && g.is_isomorphism(1) => Some(SimpleCase::IsomorphicLoop),
        _ => None,
    }
}

type Key = (BTreeSet<String>, BTreeSet<String>);

fn key(g: &GraphOfGroups) -> Key {
    (g.vertices.iter().map(|v| v.name.clone()).collect(), g.edges.iter().map(|e| e.name.clone()).collect())
}

fn search(g: &GraphOfGroups, memo: &mut HashMap<Key, Option<(SimpleCase, Vec<String>)>>) -> Option<(SimpleCase, Vec<String>)> {
    if let Some(c) = simple_case(g) {
        return Some((c, Vec::new()));
    }
    let k = key(g);
    if let Some(r) = memo.get(&k) {
        return r.clone();
    }
    let mut found = None;
    for y in g.oriented_edges() {
        if g.is_loop(y) || !g.is_isomorphism(y) {
            continue;
        }
        let h = elementary_collapse(g, y).expect("collapse preconditions checked");
        if let Some((c, mut rest)) = search(&h, memo) {
            rest.insert(0, g.edge_label(y));
            found = Some((c, rest));
            break;
        }
    }
    memo.insert(k, found.clone());
    found
}

/// Searches all collapse sequences for a simply elementary reduction.
pub fn is_non_elementary(g: &GraphOfGroups) -> Elementarity {
    let mut memo = HashMap::new();
    match search(g, &mut memo) {
        None => Elementarity::NonElementary,
        Some((c, seq)) if seq.is_empty() => Elementarity::SimplyElementary(c),
        Some((case, collapses)) => Elementarity::ReducesTo { case, collapses },
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gog::parse_gog;

    #[test]
    fn collapse_isomorphic_segment() {
        let text = "\
group G2 cyclic 2
vertex v1 G2 gens [a]
vertex v2 G2 gens [b]
edge y v1 -- v2 group G2 embed_fwd {a:b} embed_bwd {a:a}
";
        let g = parse_gog(text).unwrap();
        let h = elementary_collapse(&g, 0).unwrap();
        assert_eq!(h.num_vertices(), 1);
        assert_eq!(h.num_edges(), 0);
        assert_eq!(h.vertices[0].name, "v1");
        assert_eq!(
            is_non_elementary(&g),
            Elementarity::ReducesTo { case: SimpleCase::SingleVertex, collapses: vec!["y".into()] }
        );
    }

    #[test]
    fn collapse_errors() {
        let g = parse_gog(crate::gog::tests::DINF).unwrap();
        assert!(matches!(elementary_collapse(&g, 0), Err(GogError::NotIsomorphism { .. })));
        let l = parse_gog("vertex v trivial\nedge s v -- v group trivial embed_fwd {} embed_bwd {}\n").unwrap();
        assert!(matches!(elementary_collapse(&l, 0), Err(GogError::EdgeIsLoop { .. })));
    }

    #[test]
    fn transport_into_kept_vertex() {
        // u -z- w -y- v with y collapsed from v: z's map into w moves into v.
        let text = "\
group G2 cyclic 2
group G4 cyclic 4
vertex v G4 gens [c]
vertex w G2 gens [b]
vertex u G2 gens [a]
edge y v -- w group G2 embed_fwd {1:1} embed_bwd {1:2}
edge z u -- w group G2 embed_fwd {1:1} embed_bwd {1:1}
";
        let g = parse_gog(text).unwrap();
        let h = elementary_collapse(&g, 0).unwrap();
        assert_eq!(h.num_vertices(), 2);
        let z = &h.edges[0];
        assert_eq!(h.vertices[z.head].name, "v");
        assert_eq!(z.embed_fwd, vec![Elem::Finite(0), Elem::Finite(2)]);
    }

    #[test]
    fn dihedral_is_simply_elementary() {
        let g = parse_gog(crate::gog::tests::DINF).unwrap();
        assert_eq!(is_non_elementary(&g), Elementarity::SimplyElementary(SimpleCase::IndexTwoEdge));
    }

    #[test]
    fn z2_z3_is_non_elementary() {
        let text = "\
vertex v1 cyclic 2 gens [a]
vertex v2 cyclic 3 gens [b]
edge e v1 -- v2 group trivial embed_fwd {} embed_bwd {}
";
        assert_eq!(is_non_elementary(&parse_gog(text).unwrap()), Elementarity::NonElementary);
    }

    #[test]
    fn two_loops_are_non_elementary() {
        let text = "\
vertex v trivial
edge s v -- v group trivial embed_fwd {} embed_bwd {}
edge t v -- v group trivial embed_fwd {} embed_bwd {}
";
        assert_eq!(is_non_elementary(&parse_gog(text).unwrap()), Elementarity::NonElementary);
    }

    #[test]
    fn single_loop_is_simply_elementary() {
        let g = parse_gog("vertex v trivial\nedge s v -- v group trivial embed_fwd {} embed_bwd {}\n").unwrap();
        assert_eq!(is_non_elementary(&g), Elementarity::SimplyElementary(SimpleCase::IsomorphicLoop));
    }
}
