use std::collections::{HashMap, HashSet, VecDeque};

use serde::{Deserialize, Serialize};

use super::{FundamentalGroup, NormalForm};
use crate::abelian::{abelian_invariants, exponent_sums, AbelianInvariants};
use crate::gog::{bar, EdgeId, VertexId};
use crate::groups::{reduce_word, Elem, GroupBackend};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GenSource {
    /// The `index`-th generator of `S_v`.
    Vertex { vertex: VertexId, index: usize },
    /// The stable letter of a non-tree edge, in its chosen orientation.
    Stable { edge: EdgeId },
}

/// A finite presentation; words use letters `±(i+1)` for generator `i`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Presentation {
    pub generators: Vec<String>,
    pub sources: Vec<GenSource>,
    pub relators: Vec<Vec<i32>>,
}

struct VertexWords {
    /// Word for each element of a finite vertex group, or the basis letters of a backend.
    finite: Option<Vec<Vec<i32>>>,
    letters: Vec<i32>,
    relators: Vec<Vec<i32>>,
}

fn inverse_word(w: &[i32]) -> Vec<i32> {
    w.iter().rev().map(|l| -l).collect()
}

fn vertex_words(backend: &GroupBackend, gens: &[Elem], offset: i32) -> VertexWords {
    let letters: Vec<i32> = (0..gens.len() as i32).map(|i| offset + i + 1).collect();
    match backend {
        GroupBackend::Finite { group } => {
            let fin: Vec<u32> = gens
                .iter()
                .map(|s| match s {
                    Elem::Finite(x) => *x,
                    _ => unreachable!(),
                })
                .collect();
            let mut words: Vec<Option<Vec<i32>>> = vec![None; group.order()];
            let mut tree: HashSet<(u32, usize)> = HashSet::new();
            words[group.identity() as usize] = Some(Vec::new());
            let mut queue = VecDeque::from([group.identity()]);
            let mut order = Vec::new();
            while let Some(x) = queue.pop_front() {
                order.push(x);
                for (k, &s) in fin.iter().enumerate() {
                    let y = group.mul(x, s);
                    if words[y as usize].is_none() {
                        let mut w = words[x as usize].clone().unwrap();
                        w.push(letters[k]);
                        words[y as usize] = Some(w);
                        tree.insert((x, k));
                        queue.push_back(y);
                    }
                }
            }
            let words: Vec<Vec<i32>> = words.into_iter().map(|w| w.expect("generators generate")).collect();
            let mut relators = Vec::new();
            for &x in &order {
                for (k, &s) in fin.iter().enumerate() {
                    if tree.contains(&(x, k)) {
                        continue;
                    }
                    let mut r = words[x as usize].clone();
                    r.push(letters[k]);
                    r.extend(inverse_word(&words[group.mul(x, s) as usize]));
                    relators.push(r);
                }
            }
            VertexWords { finite: Some(words), letters, relators }
        }
        GroupBackend::FreeAbelian { .. } => {
            let mut relators = Vec::new();
            for i in 0..letters.len() {
                for j in i + 1..letters.len() {
                    let (a, b) = (letters[i], letters[j]);
                    relators.push(vec![a, b, -a, -b]);
                }
            }
            VertexWords { finite: None, letters, relators }
        }
        GroupBackend::Free { .. } => VertexWords { finite: None, letters, relators: Vec::new() },
    }
}

impl VertexWords {
    /// Word for `x`, with backend basis vectors mapped through the declared generator order.
    fn word(&self, gens: &[Elem], backend: &GroupBackend, x: &Elem) -> Vec<i32> {
        match (&self.finite, x) {
            (Some(w), Elem::Finite(i)) => w[*i as usize].clone(),
            (None, _) => {
                let basis = backend.standard_generators();
                let letter_of = |i: usize| {
                    let pos = gens.iter().position(|g| *g == basis[i]).expect("backend generators are the basis");
                    self.letters[pos]
                };
                match x {
                    Elem::Abelian(c) => {
                        let mut w = Vec::new();
                        for (i, &k) in c.iter().enumerate() {
                            let l = letter_of(i);
                            for _ in 0..k.unsigned_abs() {
                                w.push(if k > 0 { l } else { -l });
                            }
                        }
                        w
                    }
                    Elem::Word(ls) => ls
                        .iter()
                        .map(|&l| {
                            let m = letter_of(l.unsigned_abs() as usize - 1);
                            if l > 0 {
                                m
                            } else {
                                -m
                            }
                        })
                        .collect(),
                    Elem::Finite(_) => unreachable!(),
                }
            }
            _ => unreachable!(),
        }
    }
}

/// The presentation of the fundamental group relative to the spanning tree.
///
/// Generators are the `S_v` followed by one stable letter per non-tree edge,
/// so `s_{bar y}` is `s_y^{-1}`. Relators are freely reduced, deduplicated,
/// and empty ones dropped.
pub fn emit_presentation(fg: &FundamentalGroup) -> Presentation {
    let g = fg.graph();
    let sd = fg.spanning();
    let mut generators = Vec::new();
    let mut sources = Vec::new();
    let mut words = Vec::new();
    let mut relators: Vec<Vec<i32>> = Vec::new();

    let mut seen_names: HashMap<String, usize> = HashMap::new();
    for v in &g.vertices {
        for l in &v.group.gen_labels {
            *seen_names.entry(l.clone()).or_default() += 1;
        }
    }
    for (vi, v) in g.vertices.iter().enumerate() {
        let vw = vertex_words(&v.group.backend, &v.group.gens, generators.len() as i32);
        for (k, l) in v.group.gen_labels.iter().enumerate() {
            let name = if seen_names[l] > 1 { format!("{}_{l}", v.name) } else { l.clone() };
            generators.push(name);
            sources.push(GenSource::Vertex { vertex: vi, index: k });
        }
        relators.extend(vw.relators.iter().cloned());
        words.push(vw);
    }
    let word_of = |v: VertexId, x: &Elem| words[v].word(&g.vertices[v].group.gens, g.vertex_group(v), x);

    let mut stable: HashMap<usize, i32> = HashMap::new();
    for y in sd.non_tree_edges() {
        let mut name = format!("s_{}", g.edge(y).name);
        while generators.contains(&name) {
            name.push('_');
        }
        generators.push(name);
        sources.push(GenSource::Stable { edge: y });
        stable.insert(y / 2, generators.len() as i32);
    }

    for k in 0..g.num_edges() {
        let y = sd.orientation[k];
        let e = g.edge(y);
        let (a, w) = (g.alpha(y), g.omega(y));
        for h in e.group.elements().filter(|&h| h != e.group.identity()) {
            let fwd = word_of(w, &g.embedding(y)[h as usize]);
            let bwd = word_of(a, &g.embedding(bar(y))[h as usize]);
            let mut r = inverse_word(&fwd);
            match stable.get(&k) {
                None => r.extend(bwd),
                Some(&s) => {
                    r.push(-s);
                    r.extend(bwd);
                    r.push(s);
                }
            }
            relators.push(r);
        }
    }

    let mut seen = HashSet::new();
    let relators = relators
        .into_iter()
        .map(|r| reduce_word(&r))
        .filter(|r| !r.is_empty() && seen.insert(r.clone()))
        .collect();
    Presentation { generators, sources, relators }
}

impl Presentation {
    pub fn word_text(&self, w: &[i32]) -> String {
        if w.is_empty() {
            return "1".into();
        }
        let mut parts: Vec<String> = Vec::new();
        let mut i = 0;
        while i < w.len() {
            let mut j = i;
            while j < w.len() && w[j] == w[i] {
                j += 1;
            }
            let name = &self.generators[w[i].unsigned_abs() as usize - 1];
            let k = (j - i) as i64 * w[i].signum() as i64;
            parts.push(if k == 1 { name.clone() } else { format!("{name}^{k}") });
            i = j;
        }
        parts.join("*")
    }

    /// Plain text `< a, b | a^2, b^2 >`.
    pub fn to_text(&self) -> String {
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_text(r)).collect();
        format!("< {} | {} >", self.generators.join(", "), rels.join(", "))
    }

    /// GAP input defining `G` as a quotient of a free group.
    pub fn to_gap(&self) -> String {
        let quoted: Vec<String> = self.generators.iter().map(|g| format!("\"{g}\"")).collect();
        let mut out = format!("F := FreeGroup({});\n", if quoted.is_empty() { "0".into() } else { quoted.join(", ") });
        for (i, g) in self.generators.iter().enumerate() {
            out.push_str(&format!("{g} := F.{};\n", i + 1));
        }
        let rels: Vec<String> = self.relators.iter().map(|r| self.word_text(r)).collect();
        out.push_str(&format!("G := F / [{}];\n", rels.join(", ")));
        out
    }

    pub fn abelianization(&self) -> AbelianInvariants {
        let m: Vec<Vec<i64>> = self.relators.iter().map(|r| exponent_sums(r, self.generators.len())).collect();
        abelian_invariants(&m, self.generators.len())
    }

    /// Group elements for the generators.
    pub fn generator_elements(&self, fg: &FundamentalGroup) -> Vec<NormalForm> {
        let g = fg.graph();
        self.sources
            .iter()
            .map(|s| match *s {
                GenSource::Vertex { vertex, index } => fg.vertex_element(vertex, &g.vertices[vertex].group.gens[index]),
                GenSource::Stable { edge } => fg.stable_letter(edge),
            })
            .collect()
    }
}
