//! The line-oriented text format for graphs of groups.
//!
//! ```text
//! group G2 cyclic 2
//! group G3 table [[0,1,2],[1,2,0],[2,0,1]]
//! vertex v1 G2 gens [a]
//! vertex v2 G3 gens [b]
//! edge e1 v1 -- v2 group trivial embed_fwd {} embed_bwd {}
//! ```
//!
//! Group specs are `cyclic n`, `table [[..]]`, `free n`, `free_abelian n`
//! or `trivial`, either declared by name or written inline. Generator names
//! in `gens [..]` bind, in order, to the default generators of the group
//! (the basis for the infinite backends); `name=expr` binds explicitly.
//! Element expressions are products of generator names with optional integer
//! powers, bare integers (table indices) or `e` for the identity.
//! Embedding maps `{k:v, ..}` send edge-group elements to vertex-group
//! elements and are extended multiplicatively; the keys must generate the
//! edge group. Edge-group names come from the edge's own `gens` clause or,
//! failing that, from the first vertex declared over the same group.

use std::collections::{HashMap, VecDeque};
use std::fmt::Write as _;

use thiserror::Error;

use super::{check_embedding, Edge, GogError, GraphOfGroups, Vertex, VertexGroup};
use crate::groups::{check_group, Elem, FiniteGroup, GroupBackend, GroupError};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("line {line}, column {col}: {kind}")]
pub struct ParseError {
    pub line: usize,
    pub col: usize,
    pub kind: ParseErrorKind,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseErrorKind {
    #[error("syntax error: {0}")]
    SyntaxError(String),
    #[error("unknown group {0}")]
    UnknownGroupRef(String),
    #[error("unknown vertex {0}")]
    UnknownVertex(String),
    #[error("unknown element {0}")]
    UnknownElement(String),
    #[error("duplicate name {0}")]
    DuplicateName(String),
    #[error("edge {edge}: group is infinite; edge groups must be finite")]
    EdgeGroupInfinite { edge: String },
    #[error("edge {edge}: embedding into {vertex} is not injective")]
    EmbeddingNotInjective { edge: String, vertex: String },
    #[error("edge {edge}: embedding into {vertex} is not a homomorphism")]
    EmbeddingNotHomomorphism { edge: String, vertex: String },
    #[error("edge {edge}: map keys do not generate the edge group")]
    EmbeddingUndetermined { edge: String },
    #[error("invalid group: {0}")]
    InvalidGroup(GroupError),
    #[error("{0}")]
    Invalid(GogError),
    #[error("no vertices declared")]
    NoVertices,
}

impl From<GogError> for ParseErrorKind {
    fn from(e: GogError) -> Self {
        match e {
            GogError::EmbeddingNotInjective { edge, vertex } => ParseErrorKind::EmbeddingNotInjective { edge, vertex },
            GogError::EmbeddingNotHomomorphism { edge, vertex } => {
                ParseErrorKind::EmbeddingNotHomomorphism { edge, vertex }
            }
            GogError::EdgeGroupInfinite { edge } => ParseErrorKind::EdgeGroupInfinite { edge },
            other => ParseErrorKind::Invalid(other),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Int(i64),
    Punct(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    col: usize,
}

fn tokenize(line: &str, lineno: usize) -> Result<Vec<Token>, ParseError> {
    let chars: Vec<char> = line.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let col = i + 1;
        if c == '#' {
            break;
        }
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            let start = i;
            while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                i += 1;
            }
            out.push(Token { tok: Tok::Ident(chars[start..i].iter().collect()), col });
            continue;
        }
        if c.is_ascii_digit() || (c == '-' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
            let start = i;
            i += 1;
            while i < chars.len() && chars[i].is_ascii_digit() {
                i += 1;
            }
            let s: String = chars[start..i].iter().collect();
            let v = s.parse::<i64>().map_err(|_| ParseError {
                line: lineno,
                col,
                kind: ParseErrorKind::SyntaxError(format!("integer {s} out of range")),
            })?;
            out.push(Token { tok: Tok::Int(v), col });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            out.push(Token { tok: Tok::Punct("--"), col });
            i += 2;
            continue;
        }
        let p = match c {
            '[' => "[",
            ']' => "]",
            '{' => "{",
            '}' => "}",
            ',' => ",",
            ':' => ":",
            '=' => "=",
            '^' => "^",
            '*' => "*",
            _ => {
                return Err(ParseError {
                    line: lineno,
                    col,
                    kind: ParseErrorKind::SyntaxError(format!("unexpected character {c:?}")),
                })
            }
        };
        out.push(Token { tok: Tok::Punct(p), col });
        i += 1;
    }
    Ok(out)
}

struct Cursor<'a> {
    toks: &'a [Token],
    pos: usize,
    line: usize,
    eol: usize,
}

impl<'a> Cursor<'a> {
    fn err(&self, kind: ParseErrorKind) -> ParseError {
        let col = self.toks.get(self.pos).map_or(self.eol, |t| t.col);
        ParseError { line: self.line, col, kind }
    }

    fn err_at(&self, col: usize, kind: ParseErrorKind) -> ParseError {
        ParseError { line: self.line, col, kind }
    }

    fn syntax(&self, msg: impl Into<String>) -> ParseError {
        self.err(ParseErrorKind::SyntaxError(msg.into()))
    }

    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|t| &t.tok)
    }

    fn col(&self) -> usize {
        self.toks.get(self.pos).map_or(self.eol, |t| t.col)
    }

    fn ident(&mut self) -> Result<String, ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) => {
                let s = s.clone();
                self.pos += 1;
                Ok(s)
            }
            _ => Err(self.syntax("expected a name")),
        }
    }

    fn int(&mut self) -> Result<i64, ParseError> {
        match self.peek() {
            Some(Tok::Int(v)) => {
                let v = *v;
                self.pos += 1;
                Ok(v)
            }
            _ => Err(self.syntax("expected an integer")),
        }
    }

    fn keyword(&mut self, kw: &str) -> Result<(), ParseError> {
        match self.peek() {
            Some(Tok::Ident(s)) if s == kw => {
                self.pos += 1;
                Ok(())
            }
            _ => Err(self.syntax(format!("expected `{kw}`"))),
        }
    }

    fn at_keyword(&self, kw: &str) -> bool {
        matches!(self.peek(), Some(Tok::Ident(s)) if s == kw)
    }

    fn punct(&mut self, p: &str) -> Result<(), ParseError> {
        if self.at_punct(p) {
            self.pos += 1;
            Ok(())
        } else {
            Err(self.syntax(format!("expected `{p}`")))
        }
    }

    fn at_punct(&self, p: &str) -> bool {
        matches!(self.peek(), Some(Tok::Punct(q)) if *q == p)
    }

    fn end(&self) -> Result<(), ParseError> {
        if self.pos < self.toks.len() {
            Err(self.syntax("unexpected trailing input"))
        } else {
            Ok(())
        }
    }
}

const KINDS: [&str; 5] = ["cyclic", "table", "free", "free_abelian", "trivial"];

fn group_spec(cur: &mut Cursor<'_>) -> Result<GroupBackend, ParseError> {
    let col = cur.col();
    let kind = cur.ident()?;
    let nonneg = |cur: &mut Cursor<'_>| -> Result<usize, ParseError> {
        let v = cur.int()?;
        usize::try_from(v).map_err(|_| cur.syntax("expected a non-negative integer"))
    };
    Ok(match kind.as_str() {
        "trivial" => GroupBackend::finite(FiniteGroup::trivial()),
        "cyclic" => {
            let n = nonneg(cur)?;
            if n == 0 {
                return Err(cur.err_at(col, ParseErrorKind::InvalidGroup(GroupError::Empty)));
            }
            GroupBackend::finite(FiniteGroup::cyclic(n))
        }
        "free" | "free_abelian" => {
            let n = nonneg(cur)?;
            match (n, kind.as_str()) {
                (0, _) => GroupBackend::finite(FiniteGroup::trivial()),
                (n, "free") => GroupBackend::Free { rank: n },
                (n, _) => GroupBackend::FreeAbelian { rank: n },
            }
        }
        "table" => {
            cur.punct("[")?;
            let mut rows = Vec::new();
            loop {
                cur.punct("[")?;
                let mut row = Vec::new();
                if !cur.at_punct("]") {
                    loop {
                        row.push(nonneg(cur)?);
                        if cur.at_punct(",") {
                            cur.pos += 1;
                        } else {
                            break;
                        }
                    }
                }
                cur.punct("]")?;
                rows.push(row);
                if cur.at_punct(",") {
                    cur.pos += 1;
                } else {
                    break;
                }
            }
            cur.punct("]")?;
            GroupBackend::finite(check_group(&rows).map_err(|e| cur.err_at(col, ParseErrorKind::InvalidGroup(e)))?)
        }
        other => return Err(cur.err_at(col, ParseErrorKind::SyntaxError(format!("unknown group kind `{other}`")))),
    })
}

/// Either an inline spec or a reference to a declared group.
fn group_ref(
    cur: &mut Cursor<'_>,
    groups: &HashMap<String, GroupBackend>,
) -> Result<(String, GroupBackend), ParseError> {
    let col = cur.col();
    match cur.peek() {
        Some(Tok::Ident(s)) if KINDS.contains(&s.as_str()) => {
            let start = cur.pos;
            let b = group_spec(cur)?;
            let name = cur.toks[start..cur.pos]
                .iter()
                .map(|t| match &t.tok {
                    Tok::Ident(s) => s.clone(),
                    Tok::Int(v) => v.to_string(),
                    Tok::Punct(p) => p.to_string(),
                })
                .collect::<Vec<_>>()
                .join(" ");
            Ok((name, b))
        }
        _ => {
            let name = cur.ident()?;
            let b = groups
                .get(&name)
                .cloned()
                .ok_or_else(|| cur.err_at(col, ParseErrorKind::UnknownGroupRef(name.clone())))?;
            Ok((name, b))
        }
    }
}

type Names = Vec<(String, Elem)>;

fn lookup(names: &Names, s: &str) -> Option<Elem> {
    names.iter().find(|(n, _)| n == s).map(|(_, e)| e.clone())
}

fn pow(b: &GroupBackend, x: &Elem, k: i64) -> Elem {
    let base = if k < 0 { b.inv(x) } else { x.clone() };
    let mut acc = b.identity();
    for _ in 0..k.unsigned_abs() {
        acc = b.mul(&acc, &base);
    }
    acc
}

fn elem_expr(cur: &mut Cursor<'_>, b: &GroupBackend, names: &Names) -> Result<Elem, ParseError> {
    let mut acc = b.identity();
    loop {
        let col = cur.col();
        let factor = match cur.peek().cloned() {
            Some(Tok::Ident(s)) => {
                cur.pos += 1;
                match lookup(names, &s) {
                    Some(x) => x,
                    None if s == "e" => b.identity(),
                    None => return Err(cur.err_at(col, ParseErrorKind::UnknownElement(s))),
                }
            }
            Some(Tok::Int(v)) => {
                cur.pos += 1;
                match b {
                    GroupBackend::Finite { group } if v >= 0 && (v as usize) < group.order() => Elem::Finite(v as u32),
                    _ => return Err(cur.err_at(col, ParseErrorKind::UnknownElement(v.to_string()))),
                }
            }
            _ => return Err(cur.syntax("expected an element")),
        };
        let factor = if cur.at_punct("^") {
            cur.pos += 1;
            let k = cur.int()?;
            pow(b, &factor, k)
        } else {
            factor
        };
        acc = b.mul(&acc, &factor);
        if cur.at_punct("*") {
            cur.pos += 1;
        } else {
            return Ok(acc);
        }
    }
}

/// `gens [a, b=expr, ..]`; bare names bind to the default generators in order.
fn gen_list(cur: &mut Cursor<'_>, b: &GroupBackend) -> Result<Names, ParseError> {
    cur.punct("[")?;
    let defaults = b.standard_generators();
    let mut names: Names = Vec::new();
    let mut bare = 0;
    if !cur.at_punct("]") {
        loop {
            let col = cur.col();
            let name = cur.ident()?;
            if names.iter().any(|(n, _)| *n == name) {
                return Err(cur.err_at(col, ParseErrorKind::DuplicateName(name)));
            }
            let value = if cur.at_punct("=") {
                cur.pos += 1;
                elem_expr(cur, b, &names)?
            } else {
                let v = defaults.get(bare).cloned().ok_or_else(|| {
                    cur.err_at(col, ParseErrorKind::SyntaxError(format!("no default generator left for `{name}`")))
                })?;
                bare += 1;
                v
            };
            names.push((name, value));
            if cur.at_punct(",") {
                cur.pos += 1;
            } else {
                break;
            }
        }
    }
    cur.punct("]")?;
    Ok(names)
}

fn default_names(prefix: &str, b: &GroupBackend) -> Names {
    match b {
        GroupBackend::Finite { group } => group
            .elements()
            .filter(|&x| x != group.identity())
            .map(|x| (format!("{prefix}_{x}"), Elem::Finite(x)))
            .collect(),
        _ => b
            .standard_generators()
            .into_iter()
            .enumerate()
            .map(|(i, s)| (format!("{prefix}_x{}", i + 1), s))
            .collect(),
    }
}

struct EmbedSpec {
    col: usize,
    pairs: Vec<(u32, Elem)>,
}

fn embed_map(
    cur: &mut Cursor<'_>,
    edge_group: &FiniteGroup,
    edge_names: &Names,
    target: &GroupBackend,
    target_names: &Names,
) -> Result<EmbedSpec, ParseError> {
    let col = cur.col();
    cur.punct("{")?;
    let src = GroupBackend::finite(edge_group.clone());
    let mut pairs = Vec::new();
    if !cur.at_punct("}") {
        loop {
            let k = match elem_expr(cur, &src, edge_names)? {
                Elem::Finite(x) => x,
                _ => unreachable!(),
            };
            cur.punct(":")?;
            let v = elem_expr(cur, target, target_names)?;
            pairs.push((k, v));
            if cur.at_punct(",") {
                cur.pos += 1;
            } else {
                break;
            }
        }
    }
    cur.punct("}")?;
    Ok(EmbedSpec { col, pairs })
}

/// Extends a map given on some edge-group elements to the whole group.
fn extend_map(
    edge: &str,
    vertex: &str,
    source: &FiniteGroup,
    target: &GroupBackend,
    pairs: &[(u32, Elem)],
) -> Result<Vec<Elem>, ParseErrorKind> {
    let mut image: Vec<Option<Elem>> = vec![None; source.order()];
    image[source.identity() as usize] = Some(target.identity());
    let mut queue = VecDeque::from([source.identity()]);
    while let Some(x) = queue.pop_front() {
        let ix = image[x as usize].clone().unwrap();
        for (k, v) in pairs {
            let y = source.mul(x, *k);
            let iy = target.mul(&ix, v);
            match &image[y as usize] {
                None => {
                    image[y as usize] = Some(iy);
                    queue.push_back(y);
                }
                Some(prev) if *prev != iy => {
                    return Err(ParseErrorKind::EmbeddingNotHomomorphism {
                        edge: edge.to_string(),
                        vertex: vertex.to_string(),
                    })
                }
                Some(_) => {}
            }
        }
    }
    image
        .into_iter()
        .collect::<Option<Vec<_>>>()
        .ok_or_else(|| ParseErrorKind::EmbeddingUndetermined { edge: edge.to_string() })
}

struct VertexDecl {
    vertex: Vertex,
    names: Names,
}

/// Parses and fully validates a graph of groups.
pub fn parse_gog(text: &str) -> Result<GraphOfGroups, ParseError> {
    let mut groups: HashMap<String, GroupBackend> = HashMap::new();
    let mut vertices: Vec<VertexDecl> = Vec::new();
    let mut edges: Vec<Edge> = Vec::new();
    let mut last_line = 0;

    for (i, raw) in text.lines().enumerate() {
        let lineno = i + 1;
        last_line = lineno;
        let toks = tokenize(raw, lineno)?;
        if toks.is_empty() {
            continue;
        }
        let mut cur = Cursor { toks: &toks, pos: 0, line: lineno, eol: raw.chars().count() + 1 };
        let col = cur.col();
        let kw = cur.ident()?;
        match kw.as_str() {
            "group" => {
                let ncol = cur.col();
                let name = cur.ident()?;
                if groups.contains_key(&name) || KINDS.contains(&name.as_str()) {
                    return Err(cur.err_at(ncol, ParseErrorKind::DuplicateName(name)));
                }
                let b = group_spec(&mut cur)?;
                cur.end()?;
                groups.insert(name, b);
            }
            "vertex" => {
                let ncol = cur.col();
                let name = cur.ident()?;
                if vertices.iter().any(|v| v.vertex.name == name) {
                    return Err(cur.err_at(ncol, ParseErrorKind::DuplicateName(name)));
                }
                let (group_name, backend) = group_ref(&mut cur, &groups)?;
                let names = if cur.at_keyword("gens") {
                    cur.pos += 1;
                    gen_list(&mut cur, &backend)?
                } else {
                    default_names(&name, &backend)
                };
                cur.end()?;
                let vg = VertexGroup {
                    group_name,
                    backend,
                    gens: names.iter().map(|(_, e)| e.clone()).collect(),
                    gen_labels: names.iter().map(|(n, _)| n.clone()).collect(),
                };
                let vertex = Vertex { name, group: vg };
                super::GraphOfGroups { vertices: vec![vertex.clone()], edges: vec![] }
                    .validate()
                    .map_err(|e| cur.err_at(ncol, e.into()))?;
                vertices.push(VertexDecl { vertex, names });
            }
            "edge" => {
                let ncol = cur.col();
                let name = cur.ident()?;
                if edges.iter().any(|e| e.name == name) {
                    return Err(cur.err_at(ncol, ParseErrorKind::DuplicateName(name)));
                }
                let endpoint = |cur: &mut Cursor<'_>| -> Result<usize, ParseError> {
                    let c = cur.col();
                    let v = cur.ident()?;
                    vertices
                        .iter()
                        .position(|d| d.vertex.name == v)
                        .ok_or_else(|| cur.err_at(c, ParseErrorKind::UnknownVertex(v)))
                };
                let tail = endpoint(&mut cur)?;
                cur.punct("--")?;
                let head = endpoint(&mut cur)?;
                cur.keyword("group")?;
                let gcol = cur.col();
                let (group_name, backend) = group_ref(&mut cur, &groups)?;
                let group = match backend {
                    GroupBackend::Finite { group } => group,
                    _ => return Err(cur.err_at(gcol, ParseErrorKind::EdgeGroupInfinite { edge: name })),
                };
                let gb = GroupBackend::finite(group.clone());
                let edge_names = if cur.at_keyword("gens") {
                    cur.pos += 1;
                    gen_list(&mut cur, &gb)?
                } else {
                    vertices
                        .iter()
                        .find(|d| d.vertex.group.group_name == group_name && d.vertex.group.backend == gb)
                        .map(|d| d.names.clone())
                        .unwrap_or_default()
                };
                cur.keyword("embed_fwd")?;
                let fwd = embed_map(
                    &mut cur,
                    &group,
                    &edge_names,
                    &vertices[head].vertex.group.backend,
                    &vertices[head].names,
                )?;
                cur.keyword("embed_bwd")?;
                let bwd = embed_map(
                    &mut cur,
                    &group,
                    &edge_names,
                    &vertices[tail].vertex.group.backend,
                    &vertices[tail].names,
                )?;
                cur.end()?;
                let mut maps = Vec::new();
                for (spec, end) in [(&fwd, head), (&bwd, tail)] {
                    let v = &vertices[end].vertex;
                    let map = extend_map(&name, &v.name, &group, &v.group.backend, &spec.pairs)
                        .map_err(|k| cur.err_at(spec.col, k))?;
                    check_embedding(&name, &group, &v.name, &v.group.backend, &map)
                        .map_err(|e| cur.err_at(spec.col, e.into()))?;
                    maps.push(map);
                }
                let embed_bwd = maps.pop().unwrap();
                let embed_fwd = maps.pop().unwrap();
                edges.push(Edge { name, tail, head, group_name, group, embed_fwd, embed_bwd });
            }
            other => {
                return Err(cur.err_at(col, ParseErrorKind::SyntaxError(format!("unknown statement `{other}`"))));
            }
        }
    }
    if vertices.is_empty() {
        return Err(ParseError { line: last_line.max(1), col: 1, kind: ParseErrorKind::NoVertices });
    }
    let g = GraphOfGroups { vertices: vertices.into_iter().map(|d| d.vertex).collect(), edges };
    g.validate().map_err(|e| ParseError { line: last_line, col: 1, kind: e.into() })?;
    Ok(g)
}

fn spec_text(b: &GroupBackend) -> String {
    match b {
        GroupBackend::Finite { group } => {
            let rows: Vec<String> = group
                .table_rows()
                .iter()
                .map(|r| format!("[{}]", r.iter().map(|x| x.to_string()).collect::<Vec<_>>().join(",")))
                .collect();
            format!("table [{}]", rows.join(","))
        }
        GroupBackend::FreeAbelian { rank } => format!("free_abelian {rank}"),
        GroupBackend::Free { rank } => format!("free {rank}"),
    }
}

fn elem_text(e: &Elem) -> String {
    match e {
        Elem::Finite(x) => x.to_string(),
        _ => "e".to_string(),
    }
}

impl GraphOfGroups {
    /// Writes the structure back in the text format; `parse_gog` of the output
    /// reproduces `self` exactly.
    pub fn to_dsl(&self) -> String {
        let mut out = String::new();
        let mut declared: Vec<(String, GroupBackend)> = Vec::new();
        let mut name_for = |b: &GroupBackend, preferred: &str, out: &mut String| -> String {
            if let Some((n, _)) = declared.iter().find(|(_, d)| d == b) {
                return n.clone();
            }
            let base: String = preferred.chars().filter(|c| c.is_ascii_alphanumeric() || *c == '_').collect();
            let base = if base.is_empty() || !base.starts_with(|c: char| c.is_ascii_alphabetic()) {
                format!("G{base}")
            } else {
                base
            };
            let mut name = base.clone();
            let mut k = 1;
            while declared.iter().any(|(n, _)| *n == name) || KINDS.contains(&name.as_str()) {
                k += 1;
                name = format!("{base}_{k}");
            }
            let _ = writeln!(out, "group {name} {}", spec_text(b));
            declared.push((name.clone(), b.clone()));
            name
        };
        let mut vertex_lines = Vec::new();
        for v in &self.vertices {
            let gname = name_for(&v.group.backend, &v.group.group_name, &mut out);
            let gens: Vec<String> = match &v.group.backend {
                GroupBackend::Finite { .. } => v
                    .group
                    .gen_labels
                    .iter()
                    .zip(&v.group.gens)
                    .map(|(n, e)| format!("{n}={}", elem_text(e)))
                    .collect(),
                _ => v.group.gen_labels.clone(),
            };
            vertex_lines.push(format!("vertex {} {} gens [{}]", v.name, gname, gens.join(", ")));
        }
        let mut edge_lines = Vec::new();
        for e in &self.edges {
            let gb = GroupBackend::finite(e.group.clone());
            let gname = name_for(&gb, &e.group_name, &mut out);
            let keys = e.group.default_generators();
            let map = |m: &[Elem]| -> String {
                keys.iter().map(|&k| format!("{k}:{}", elem_text(&m[k as usize]))).collect::<Vec<_>>().join(", ")
            };
            edge_lines.push(format!(
                "edge {} {} -- {} group {} embed_fwd {{{}}} embed_bwd {{{}}}",
                e.name,
                self.vertices[e.tail].name,
                self.vertices[e.head].name,
                gname,
                map(&e.embed_fwd),
                map(&e.embed_bwd)
            ));
        }
        for l in vertex_lines.into_iter().chain(edge_lines) {
            out.push_str(&l);
            out.push('\n');
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_trivial_vertex() {
        let g = parse_gog("vertex v trivial\n").unwrap();
        assert_eq!(g.num_vertices(), 1);
        assert_eq!(g.num_edges(), 0);
        assert_eq!(g.vertices[0].group.gens, Vec::<Elem>::new());
    }

    #[test]
    fn infinite_dihedral_input() {
        let g = parse_gog(super::super::tests::DINF).unwrap();
        assert_eq!(g.num_vertices(), 2);
        assert_eq!(g.num_edges(), 1);
        assert_eq!(g.edges[0].group.order(), 1);
        assert_eq!(g.vertices[0].group.gens, vec![Elem::Finite(1)]);
        assert_eq!(g.vertices[1].group.gen_labels, vec!["b".to_string()]);
    }

    #[test]
    fn the_documented_example() {
        let text = "\
group G2 cyclic 2
group G3 table [[0,1,2],[1,2,0],[2,0,1]]
group ZZ free_abelian 2
vertex v1 G2 gens [a]
vertex v2 G3 gens [b]
edge e1 v1 -- v2 group trivial embed_fwd {} embed_bwd {}
edge e2 v1 -- v1 group G2 embed_fwd {a:a} embed_bwd {a:a}
";
        let g = parse_gog(text).unwrap();
        assert_eq!(g.num_edges(), 2);
        assert!(g.is_isomorphism(2));
        assert!(g.is_isomorphism(3));
    }

    #[test]
    fn infinite_edge_group_rejected() {
        let text = "vertex v free_abelian 1 gens [x]\nedge y v -- v group free 1 embed_fwd {} embed_bwd {}\n";
        let err = parse_gog(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EdgeGroupInfinite { edge: "y".into() });
        assert_eq!(err.line, 2);
        assert_eq!(err.col, 21);
    }

    #[test]
    fn non_injective_embedding() {
        let text = "\
group G2 cyclic 2
vertex v1 G2 gens [a]
vertex v2 trivial
edge y v1 -- v2 group G2 embed_fwd {a:e} embed_bwd {a:a}
";
        let err = parse_gog(text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::EmbeddingNotInjective { .. }), "{err}");
        assert_eq!(err.line, 4);
    }

    #[test]
    fn torsion_cannot_embed_in_free_abelian() {
        let text = "\
group G2 cyclic 2
vertex v1 G2 gens [a]
vertex v2 free_abelian 2 gens [x, y]
edge y v1 -- v2 group G2 embed_fwd {a:x} embed_bwd {a:a}
";
        let err = parse_gog(text).unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::EmbeddingNotHomomorphism { .. }), "{err}");
    }

    #[test]
    fn unknown_group_and_syntax_errors() {
        let err = parse_gog("vertex v G7\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownGroupRef("G7".into()));
        assert_eq!((err.line, err.col), (1, 10));
        let err = parse_gog("group G cyclic\n").unwrap_err();
        assert!(matches!(err.kind, ParseErrorKind::SyntaxError(_)));
        let err = parse_gog("# nothing\n").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::NoVertices);
        let err = parse_gog("vertex v trivial\nedge y v -- w group trivial embed_fwd {} embed_bwd {}").unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::UnknownVertex("w".into()));
    }

    #[test]
    fn keys_must_generate() {
        let text = "\
group G4 cyclic 4
vertex v G4 gens [a]
edge y v -- v group G4 embed_fwd {2:2} embed_bwd {a:a}
";
        let err = parse_gog(text).unwrap_err();
        assert_eq!(err.kind, ParseErrorKind::EmbeddingUndetermined { edge: "y".into() });
    }

    #[test]
    fn element_expressions() {
        let text = "\
group G6 cyclic 6
vertex v G6 gens [a]
edge y v -- v group cyclic 2 gens [t] embed_fwd {t:a^3} embed_bwd {t:a*a^-4}
";
        let g = parse_gog(text).unwrap();
        assert_eq!(g.edges[0].embed_fwd, vec![Elem::Finite(0), Elem::Finite(3)]);
        assert_eq!(g.edges[0].embed_bwd, vec![Elem::Finite(0), Elem::Finite(3)]);
    }

    #[test]
    fn dsl_round_trip_is_exact() {
        for text in [
            super::super::tests::DINF,
            "group G3 cyclic 3\nvertex v G3 gens [b]\nvertex w free_abelian 2 gens [x, y]\nedge y v -- w group trivial embed_fwd {} embed_bwd {}\nedge l v -- v group G3 embed_fwd {b:b} embed_bwd {b:b^2}\n",
        ] {
            let g = parse_gog(text).unwrap();
            let again = parse_gog(&g.to_dsl()).unwrap();
            assert_eq!(g.vertices.len(), again.vertices.len());
            for (a, b) in g.vertices.iter().zip(&again.vertices) {
                assert_eq!(a.group.backend, b.group.backend);
                assert_eq!(a.group.gens, b.group.gens);
                assert_eq!(a.group.gen_labels, b.group.gen_labels);
            }
            for (a, b) in g.edges.iter().zip(&again.edges) {
                assert_eq!((a.tail, a.head, &a.embed_fwd, &a.embed_bwd), (b.tail, b.head, &b.embed_fwd, &b.embed_bwd));
            }
            assert_eq!(g.to_dsl(), again.to_dsl());
        }
    }
}
