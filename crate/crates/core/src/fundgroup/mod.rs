//! The fundamental group of a graph of groups.
//!
//! Elements are reduced edge paths `t_1 y_1 t_2 y_2 ... t_n y_n g` starting
//! and ending at the root of the spanning tree, with `t_i` drawn from fixed
//! left transversals of `i_{bar y_i}(G_{y_i})` in `G_{alpha(y_i)}` and the
//! final `g` arbitrary. The relation `i_{bar y}(h) y = y i_y(h)` pushes
//! edge-group elements to the right, so every path has exactly one such form.
//! A vertex generator `s` of `G_v` is the loop `p_v s p_v^{-1}` where `p_v` is
//! the tree path to `v`; the stable letter of a non-tree edge `y` is
//! `p_{alpha(y)} y p_{omega(y)}^{-1}`.

mod ball;
mod presentation;

use std::collections::HashMap;
use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::gog::{bar, spanning_tree, EdgeId, GogError, GraphOfGroups, SpanningData, VertexId};
use crate::groups::{cosets, Elem, GroupBackend, Side};

pub use ball::{word_metric_ball, CayleyBall, DEFAULT_BUDGET};
pub use presentation::{emit_presentation, GenSource, Presentation};

/// A reduced path from the root, without its trailing vertex-group element.
pub type PathKey = Vec<(Elem, EdgeId)>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NormalForm {
    pub steps: Vec<(Elem, EdgeId)>,
    pub last: Elem,
}

impl NormalForm {
    /// Number of edge letters.
    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }
}

/// Left coset data for `i_{bar z}(G_z)` inside the finite group `G_{alpha(z)}`.
#[derive(Debug, Clone)]
struct Transversal {
    reps: Vec<u32>,
    /// `g -> (t, h)` with `g = t * i_{bar z}(h)`.
    decomp: Vec<(u32, u32)>,
    /// `g -> h` when `g = i_{bar z}(h)`.
    member: Vec<Option<u32>>,
}

/// A graph of groups with a spanning tree, ready for arithmetic.
#[derive(Debug, Clone)]
pub struct FundamentalGroup {
    g: GraphOfGroups,
    sd: SpanningData,
    /// Per oriented edge `z`; `None` when `G_{alpha(z)}` is an infinite backend.
    transversals: Vec<Option<Transversal>>,
    /// Identity of each edge group.
    edge_identity: Vec<u32>,
}

impl FundamentalGroup {
    pub fn new(g: GraphOfGroups, root: VertexId) -> Result<Self, GogError> {
        let sd = spanning_tree(&g, root)?;
        Ok(Self::with_spanning(g, sd))
    }

    pub fn with_spanning(g: GraphOfGroups, sd: SpanningData) -> Self {
        let mut transversals = Vec::with_capacity(2 * g.num_edges());
        for z in g.oriented_edges() {
            let t = g.vertex_group(g.alpha(z)).as_finite().map(|group| {
                let into = g.embedding(bar(z));
                let image: Vec<u32> = into.iter().map(fin).collect();
                let cs = cosets(group, &image, Side::Left).expect("embedded image is a subgroup");
                let mut member = vec![None; group.order()];
                for (h, &x) in image.iter().enumerate() {
                    member[x as usize] = Some(h as u32);
                }
                let mut decomp = vec![(0, 0); group.order()];
                let mut reps = Vec::with_capacity(cs.len());
                for (k, c) in cs.iter().enumerate() {
                    let t = if k == 0 { group.identity() } else { c[0] };
                    reps.push(t);
                    for &x in c {
                        let h = member[group.mul(group.inv(t), x) as usize].expect("coset decomposition");
                        decomp[x as usize] = (t, h);
                    }
                }
                Transversal { reps, decomp, member }
            });
            transversals.push(t);
        }
        let edge_identity = g.edges.iter().map(|e| e.group.identity()).collect();
        FundamentalGroup { g, sd, transversals, edge_identity }
    }

    pub fn graph(&self) -> &GraphOfGroups {
        &self.g
    }

    pub fn spanning(&self) -> &SpanningData {
        &self.sd
    }

    pub fn root(&self) -> VertexId {
        self.sd.root
    }

    pub fn identity(&self) -> NormalForm {
        NormalForm { steps: Vec::new(), last: self.g.vertex_group(self.root()).identity() }
    }

    pub fn is_identity(&self, x: &NormalForm) -> bool {
        x.steps.is_empty() && self.g.vertex_group(self.root()).is_identity(&x.last)
    }

    /// The vertex a path ends at.
    pub fn end_vertex(&self, steps: &[(Elem, EdgeId)]) -> VertexId {
        steps.last().map_or(self.root(), |(_, z)| self.g.omega(*z))
    }

    /// Builder positioned at the end of `x`.
    pub fn builder_from(&self, x: &NormalForm) -> PathBuilder<'_> {
        let vertex = self.end_vertex(&x.steps);
        PathBuilder { fg: self, steps: x.steps.clone(), trailing: x.last.clone(), vertex }
    }

    pub fn builder(&self) -> PathBuilder<'_> {
        self.builder_from(&self.identity())
    }

    pub fn multiply(&self, x: &NormalForm, y: &NormalForm) -> NormalForm {
        let mut b = self.builder_from(x);
        b.push_path(y);
        b.finish()
    }

    pub fn invert(&self, x: &NormalForm) -> NormalForm {
        let mut b = self.builder();
        let mut at = self.end_vertex(&x.steps);
        b.push_elem(&self.g.vertex_group(at).inv(&x.last));
        for (t, z) in x.steps.iter().rev() {
            b.push_letter(bar(*z));
            at = self.g.alpha(*z);
            b.push_elem(&self.g.vertex_group(at).inv(t));
        }
        b.finish()
    }

    pub fn pow(&self, x: &NormalForm, k: i64) -> NormalForm {
        let base = if k < 0 { self.invert(x) } else { x.clone() };
        let mut acc = self.identity();
        for _ in 0..k.unsigned_abs() {
            acc = self.multiply(&acc, &base);
        }
        acc
    }

    /// `p_v s p_v^{-1}` for `s` in `G_v`.
    pub fn vertex_element(&self, v: VertexId, s: &Elem) -> NormalForm {
        let mut b = self.builder();
        for &y in &self.sd.tree_path[v] {
            b.push_letter(y);
        }
        b.push_elem(s);
        for y in self.sd.path_to_root(v) {
            b.push_letter(y);
        }
        b.finish()
    }

    /// The stable letter `p_{alpha(y)} y p_{omega(y)}^{-1}`; for tree edges this is the identity.
    pub fn stable_letter(&self, y: EdgeId) -> NormalForm {
        let mut b = self.builder();
        for &z in &self.sd.tree_path[self.g.alpha(y)] {
            b.push_letter(z);
        }
        b.push_letter(y);
        for z in self.sd.path_to_root(self.g.omega(y)) {
            b.push_letter(z);
        }
        b.finish()
    }

    /// Left transversal of `i_{bar z}(G_z)` in `G_{alpha(z)}`, identity first.
    /// `None` for infinite backends, where every element is its own representative.
    pub fn transversal(&self, z: EdgeId) -> Option<Vec<Elem>> {
        self.transversals[z].as_ref().map(|t| t.reps.iter().map(|&x| Elem::Finite(x)).collect())
    }

    /// Writes `g` in `G_{alpha(z)}` as `t * i_{bar z}(h)`.
    fn decompose(&self, z: EdgeId, g: &Elem) -> (Elem, u32) {
        match &self.transversals[z] {
            Some(t) => {
                let (r, h) = t.decomp[fin(g) as usize];
                (Elem::Finite(r), h)
            }
            None => (g.clone(), self.edge_identity[z / 2]),
        }
    }

    /// `h` with `g = i_{bar z}(h)`, if any.
    fn preimage(&self, z: EdgeId, g: &Elem) -> Option<u32> {
        match &self.transversals[z] {
            Some(t) => t.member[fin(g) as usize],
            None => self.g.vertex_group(self.g.alpha(z)).is_identity(g).then_some(self.edge_identity[z / 2]),
        }
    }

    /// Whether `t` is the representative of the identity coset for `z`.
    pub fn is_trivial_rep(&self, z: EdgeId, t: &Elem) -> bool {
        self.g.vertex_group(self.g.alpha(z)).is_identity(t)
    }

    /// Key of the coset `x G_v`: the reduced path of `x p_v` without its trailing element.
    pub fn vertex_key(&self, x: &NormalForm, v: VertexId) -> PathKey {
        let mut b = self.builder_from(x);
        for &y in &self.sd.tree_path[v] {
            b.push_letter(y);
        }
        b.steps
    }

    /// Canonical representative `W p_v^{-1}` of the coset with key `W`.
    pub fn key_rep(&self, key: &[(Elem, EdgeId)]) -> NormalForm {
        let v = self.end_vertex(key);
        let mut b =
            PathBuilder { fg: self, steps: key.to_vec(), trailing: self.g.vertex_group(v).identity(), vertex: v };
        for y in self.sd.path_to_root(v) {
            b.push_letter(y);
        }
        b.finish()
    }

    /// Whether `x G_v = gamma G_v`.
    pub fn coset_membership(&self, x: &NormalForm, v: VertexId, gamma: &NormalForm) -> bool {
        self.vertex_key(x, v) == self.vertex_key(gamma, v)
    }

    /// Embedded copy `p_{alpha(y)} i_{bar y}(G_y) p_{alpha(y)}^{-1}` of an edge group.
    pub fn edge_subgroup(&self, y: EdgeId) -> Vec<NormalForm> {
        let a = self.g.alpha(y);
        self.g.embedding(bar(y)).iter().map(|x| self.vertex_element(a, x)).collect()
    }

    /// The vertex generators `S_v` and stable letters, unsymmetrized.
    pub fn generating_set(&self) -> GeneratingSet {
        let mut elements = Vec::new();
        let mut labels = Vec::new();
        for (v, vx) in self.g.vertices.iter().enumerate() {
            for (s, l) in vx.group.gens.iter().zip(&vx.group.gen_labels) {
                elements.push(self.vertex_element(v, s));
                labels.push(l.clone());
            }
        }
        for y in self.sd.non_tree_edges() {
            elements.push(self.stable_letter(y));
            labels.push(self.g.edge_label(y));
        }
        GeneratingSet { elements, labels }
    }

    /// `S` closed under inversion, identity and duplicates removed, original order kept.
    pub fn symmetric_generating_set(&self) -> GeneratingSet {
        let s = self.generating_set();
        let mut out = GeneratingSet { elements: Vec::new(), labels: Vec::new() };
        let push = |x: NormalForm, l: String, out: &mut GeneratingSet| {
            if !self.is_identity(&x) && !out.elements.contains(&x) {
                out.elements.push(x);
                out.labels.push(l);
            }
        };
        for (x, l) in s.elements.iter().zip(&s.labels) {
            push(x.clone(), l.clone(), &mut out);
        }
        for (x, l) in s.elements.iter().zip(&s.labels) {
            push(self.invert(x), format!("{l}^-1"), &mut out);
        }
        out
    }

    /// Multiplies out a word over `letters`, with `-(i+1)` for the inverse of `letters[i]`.
    pub fn evaluate(&self, letters: &[NormalForm], word: &[i32]) -> NormalForm {
        let mut acc = self.identity();
        for &l in word {
            let x = &letters[l.unsigned_abs() as usize - 1];
            acc = if l > 0 { self.multiply(&acc, x) } else { self.multiply(&acc, &self.invert(x)) };
        }
        acc
    }

    pub fn elem_text(&self, v: VertexId, x: &Elem) -> String {
        match (self.g.vertex_group(v), x) {
            (GroupBackend::Finite { group }, Elem::Finite(i)) => group.labels()[*i as usize].clone(),
            (_, Elem::Abelian(c)) => format!("({})", c.iter().map(|k| k.to_string()).collect::<Vec<_>>().join(",")),
            (_, Elem::Word(w)) => {
                let letters: Vec<String> =
                    w.iter().map(|&l| if l > 0 { format!("x{l}") } else { format!("X{}", -l) }).collect();
                format!("<{}>", letters.join(""))
            }
            _ => "?".into(),
        }
    }

    /// Text form such as `v1:1 e v2:2 e'`; identity syllables are omitted, the identity prints as `1`.
    pub fn display(&self, x: &NormalForm) -> String {
        self.display_path(&x.steps, Some(&x.last))
    }

    pub fn display_path(&self, steps: &[(Elem, EdgeId)], last: Option<&Elem>) -> String {
        let mut out = String::new();
        let mut at = self.root();
        let word = |v: VertexId, e: &Elem, out: &mut String| {
            if !self.g.vertex_group(v).is_identity(e) {
                let _ = write!(out, "{}{}:{}", if out.is_empty() { "" } else { " " }, self.g.vertices[v].name, self.elem_text(v, e));
            }
        };
        for (t, z) in steps {
            word(at, t, &mut out);
            let _ = write!(out, "{}{}", if out.is_empty() { "" } else { " " }, self.g.edge_label(*z));
            at = self.g.omega(*z);
        }
        if let Some(e) = last {
            word(at, e, &mut out);
        }
        if out.is_empty() {
            out.push('1');
        }
        out
    }

    /// Parses a word such as `a*b^-1*t^2` over the labels of [`Self::generating_set`]
    /// or the generator names of the emitted presentation. `1` is the identity.
    pub fn parse_element(&self, text: &str) -> Result<NormalForm, String> {
        let s = self.generating_set();
        let p = emit_presentation(self);
        let pres = p.generator_elements(self);
        let mut acc = self.identity();
        for token in text.split(['*', ' ']).map(str::trim).filter(|t| !t.is_empty()) {
            let (name, k) = match token.split_once('^') {
                Some((n, k)) => (n, k.parse::<i64>().map_err(|_| format!("bad exponent in `{token}`"))?),
                None => (token, 1),
            };
            if name == "1" {
                continue;
            }
            let x = s
                .position(name)
                .map(|i| &s.elements[i])
                .or_else(|| p.generators.iter().position(|g| g == name).map(|i| &pres[i]))
                .ok_or_else(|| format!("unknown generator `{name}`"))?;
            acc = self.multiply(&acc, &self.pow(x, k));
        }
        Ok(acc)
    }
}

fn fin(x: &Elem) -> u32 {
    match x {
        Elem::Finite(i) => *i,
        _ => panic!("expected a finite-group element"),
    }
}

/// Incremental normalizer for paths starting at the root.
#[derive(Debug, Clone)]
pub struct PathBuilder<'a> {
    fg: &'a FundamentalGroup,
    steps: Vec<(Elem, EdgeId)>,
    trailing: Elem,
    vertex: VertexId,
}

impl PathBuilder<'_> {
    pub fn vertex(&self) -> VertexId {
        self.vertex
    }

    /// Right-multiplies by an element of the current vertex group.
    pub fn push_elem(&mut self, g: &Elem) {
        self.trailing = self.fg.g.vertex_group(self.vertex).mul(&self.trailing, g);
    }

    /// Appends the edge letter `z`, which must start at the current vertex.
    pub fn push_letter(&mut self, z: EdgeId) {
        let g = &self.fg.g;
        assert_eq!(g.alpha(z), self.vertex, "edge {} does not start at the current vertex", g.edge_label(z));
        if let Some((_, prev)) = self.steps.last() {
            if *prev == bar(z) {
                if let Some(h) = self.fg.preimage(z, &self.trailing) {
                    let (t, _) = self.steps.pop().unwrap();
                    let w = g.omega(z);
                    self.trailing = g.vertex_group(w).mul(&t, &g.embedding(z)[h as usize]);
                    self.vertex = w;
                    return;
                }
            }
        }
        let (t, h) = self.fg.decompose(z, &self.trailing);
        self.steps.push((t, z));
        self.vertex = g.omega(z);
        self.trailing = g.embedding(z)[h as usize].clone();
    }

    /// Appends a whole normal form (a loop at the root).
    pub fn push_path(&mut self, y: &NormalForm) {
        for (t, z) in &y.steps {
            self.push_elem(t);
            self.push_letter(*z);
        }
        self.push_elem(&y.last);
    }

    pub fn steps(&self) -> &[(Elem, EdgeId)] {
        &self.steps
    }

    pub fn finish(self) -> NormalForm {
        NormalForm { steps: self.steps, last: self.trailing }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GeneratingSet {
    pub elements: Vec<NormalForm>,
    pub labels: Vec<String>,
}

impl GeneratingSet {
    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    pub fn position(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l == label)
    }

    pub fn by_label(&self) -> HashMap<&str, &NormalForm> {
        self.labels.iter().map(String::as_str).zip(&self.elements).collect()
    }
}
