//! Exact group arithmetic.
//!
//! Finite groups are given extensionally by a multiplication table. The two
//! infinite backends, free abelian `Z^n` and free `F_n`, carry canonical
//! reduced forms so their word problem is a direct comparison.

use std::collections::{BTreeSet, HashSet, VecDeque};
use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum GroupError {
    #[error("table is not square: row {row} has {len} entries, expected {order}")]
    NotSquare { row: usize, len: usize, order: usize },
    #[error("entry {value} at ({row}, {col}) is out of range for order {order}")]
    EntryOutOfRange { row: usize, col: usize, value: usize, order: usize },
    #[error("not a Latin square: {line} {index} repeats element {value}")]
    NotLatinSquare { line: Line, index: usize, value: usize },
    #[error("no two-sided identity element")]
    NoIdentity,
    #[error("not associative: ({a}*{b})*{c} != {a}*({b}*{c})")]
    NotAssociative { a: usize, b: usize, c: usize },
    #[error("element set is not a subgroup (witness {a}, {b})")]
    NotASubgroup { a: usize, b: usize },
    #[error("map has {got} entries, source order is {expected}")]
    MapLength { got: usize, expected: usize },
    #[error("map sends {value} outside the target of order {order}")]
    MapOutOfRange { value: usize, order: usize },
    #[error("map is not a homomorphism at ({a}, {b})")]
    NotHomomorphism { a: usize, b: usize },
    #[error("map is not injective: {a} and {b} have the same image")]
    NotInjective { a: usize, b: usize },
    #[error("empty group table")]
    Empty,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Line {
    Row,
    Column,
}

impl fmt::Display for Line {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Line::Row => f.write_str("row"),
            Line::Column => f.write_str("column"),
        }
    }
}

/// A validated finite group, stored as a flat multiplication table.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "FiniteGroupRepr", into = "FiniteGroupRepr")]
pub struct FiniteGroup {
    order: usize,
    labels: Vec<String>,
    table: Vec<u32>,
    identity: u32,
    inverse: Vec<u32>,
}

#[derive(Serialize, Deserialize)]
struct FiniteGroupRepr {
    labels: Vec<String>,
    table: Vec<Vec<usize>>,
}

impl TryFrom<FiniteGroupRepr> for FiniteGroup {
    type Error = GroupError;

    fn try_from(repr: FiniteGroupRepr) -> Result<Self, Self::Error> {
        let mut g = check_group(&repr.table)?;
        if repr.labels.len() == g.order {
            g.labels = repr.labels;
        }
        Ok(g)
    }
}

impl From<FiniteGroup> for FiniteGroupRepr {
    fn from(g: FiniteGroup) -> Self {
        FiniteGroupRepr { table: g.table_rows(), labels: g.labels }
    }
}

/// Validates a multiplication table.
///
/// Errors name the first violating row, column or triple.
pub fn check_group(table: &[Vec<usize>]) -> Result<FiniteGroup, GroupError> {
    let order = table.len();
    if order == 0 {
        return Err(GroupError::Empty);
    }
    for (row, r) in table.iter().enumerate() {
        if r.len() != order {
            return Err(GroupError::NotSquare { row, len: r.len(), order });
        }
        for (col, &value) in r.iter().enumerate() {
            if value >= order {
                return Err(GroupError::EntryOutOfRange { row, col, value, order });
            }
        }
    }
    let mut seen = vec![usize::MAX; order];
    for (row, r) in table.iter().enumerate() {
        for &value in r {
            if seen[value] == row {
                return Err(GroupError::NotLatinSquare { line: Line::Row, index: row, value });
            }
            seen[value] = row;
        }
    }
    seen.fill(usize::MAX);
    for col in 0..order {
        for r in table {
            let value = r[col];
            if seen[value] == col {
                return Err(GroupError::NotLatinSquare { line: Line::Column, index: col, value });
            }
            seen[value] = col;
        }
    }
    let identity = (0..order)
        .find(|&e| (0..order).all(|x| table[e][x] == x && table[x][e] == x))
        .ok_or(GroupError::NoIdentity)?;
    for a in 0..order {
        for b in 0..order {
            let ab = table[a][b];
            for c in 0..order {
                if table[ab][c] != table[a][table[b][c]] {
                    return Err(GroupError::NotAssociative { a, b, c });
                }
            }
        }
    }
    let flat: Vec<u32> = table.iter().flatten().map(|&x| x as u32).collect();
    let inverse = (0..order)
        .map(|a| (0..order).find(|&b| table[a][b] == identity).unwrap() as u32)
        .collect();
    Ok(FiniteGroup {
        order,
        labels: (0..order).map(|i| i.to_string()).collect(),
        table: flat,
        identity: identity as u32,
        inverse,
    })
}

impl FiniteGroup {
    pub fn trivial() -> Self {
        check_group(&[vec![0]]).unwrap()
    }

    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table: Vec<Vec<usize>> = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        check_group(&table).unwrap()
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> u32 {
        self.identity
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.order);
        self.labels = labels;
        self
    }

    #[inline]
    pub fn mul(&self, a: u32, b: u32) -> u32 {
        self.table[a as usize * self.order + b as usize]
    }

    #[inline]
    pub fn inv(&self, a: u32) -> u32 {
        self.inverse[a as usize]
    }

    pub fn elements(&self) -> impl Iterator<Item = u32> {
        0..self.order as u32
    }

    pub fn table_rows(&self) -> Vec<Vec<usize>> {
        self.table.chunks(self.order).map(|r| r.iter().map(|&x| x as usize).collect()).collect()
    }

    /// Closure of `gens` under multiplication, sorted by index.
    pub fn generated_subgroup(&self, gens: &[u32]) -> Vec<u32> {
        let mut seen = vec![false; self.order];
        let mut queue = VecDeque::from([self.identity]);
        seen[self.identity as usize] = true;
        while let Some(x) = queue.pop_front() {
            for &s in gens {
                let y = self.mul(x, s);
                if !seen[y as usize] {
                    seen[y as usize] = true;
                    queue.push_back(y);
                }
            }
        }
        (0..self.order as u32).filter(|&x| seen[x as usize]).collect()
    }

    /// Greedy generating set: repeatedly add the least element not yet generated.
    pub fn default_generators(&self) -> Vec<u32> {
        let mut gens = Vec::new();
        let mut span = vec![self.identity];
        while span.len() < self.order {
            let next = (0..self.order as u32).find(|x| span.binary_search(x).is_err()).unwrap();
            gens.push(next);
            span = self.generated_subgroup(&gens);
        }
        gens
    }

    fn check_subgroup(&self, elements: &[u32]) -> Result<(), GroupError> {
        let set: HashSet<u32> = elements.iter().copied().collect();
        if !set.contains(&self.identity) {
            return Err(GroupError::NotASubgroup { a: self.identity as usize, b: self.identity as usize });
        }
        for &a in &set {
            for &b in &set {
                if !set.contains(&self.mul(a, self.inv(b))) {
                    return Err(GroupError::NotASubgroup { a: a as usize, b: b as usize });
                }
            }
        }
        Ok(())
    }

    /// Index of the subgroup with the given elements.
    pub fn index_of(&self, subgroup_len: usize) -> usize {
        self.order / subgroup_len
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Side {
    /// Cosets `gH`.
    Left,
    /// Cosets `Hg`.
    Right,
}

/// Partitions `group` into cosets of the subgroup.
///
/// The first coset is the subgroup itself; every coset is sorted by index and
/// the cosets are ordered by their least element.
pub fn cosets(group: &FiniteGroup, subgroup: &[u32], side: Side) -> Result<Vec<Vec<u32>>, GroupError> {
    group.check_subgroup(subgroup)?;
    let sub: BTreeSet<u32> = subgroup.iter().copied().collect();
    let mut assigned = vec![false; group.order()];
    let mut out = Vec::new();
    for g in group.elements() {
        if assigned[g as usize] {
            continue;
        }
        let mut coset: Vec<u32> = sub
            .iter()
            .map(|&h| match side {
                Side::Left => group.mul(g, h),
                Side::Right => group.mul(h, g),
            })
            .collect();
        coset.sort_unstable();
        for &x in &coset {
            assigned[x as usize] = true;
        }
        out.push(coset);
    }
    // the subgroup is the coset of the identity, which need not be index 0
    let pos = out.iter().position(|c| c.binary_search(&group.identity()).is_ok()).unwrap();
    let first = out.remove(pos);
    out.insert(0, first);
    Ok(out)
}

/// A validated injective homomorphism between finite groups.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Monomorphism {
    pub source_order: usize,
    pub target_order: usize,
    pub map: Vec<u32>,
}

pub fn check_monomorphism(
    source: &FiniteGroup,
    target: &FiniteGroup,
    map: &[u32],
) -> Result<Monomorphism, GroupError> {
    if map.len() != source.order() {
        return Err(GroupError::MapLength { got: map.len(), expected: source.order() });
    }
    if let Some(&v) = map.iter().find(|&&v| v as usize >= target.order()) {
        return Err(GroupError::MapOutOfRange { value: v as usize, order: target.order() });
    }
    for a in source.elements() {
        for b in source.elements() {
            if map[source.mul(a, b) as usize] != target.mul(map[a as usize], map[b as usize]) {
                return Err(GroupError::NotHomomorphism { a: a as usize, b: b as usize });
            }
        }
    }
    let mut owner = vec![u32::MAX; target.order()];
    for a in source.elements() {
        let img = map[a as usize] as usize;
        if owner[img] != u32::MAX {
            return Err(GroupError::NotInjective { a: owner[img] as usize, b: a as usize });
        }
        owner[img] = a;
    }
    Ok(Monomorphism { source_order: source.order(), target_order: target.order(), map: map.to_vec() })
}

impl Monomorphism {
    pub fn apply(&self, a: u32) -> u32 {
        self.map[a as usize]
    }

    pub fn is_onto(&self) -> bool {
        self.source_order == self.target_order
    }

    pub fn image(&self) -> Vec<u32> {
        let mut v = self.map.clone();
        v.sort_unstable();
        v
    }
}

/// An element of a vertex group.
///
/// Free words use letters `±(i+1)` for the `i`-th basis element and are kept
/// freely reduced.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Elem {
    Finite(u32),
    Abelian(Vec<i64>),
    Word(Vec<i32>),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum GroupBackend {
    Finite { group: FiniteGroup },
    FreeAbelian { rank: usize },
    Free { rank: usize },
}

/// Freely reduces a word over letters `±(i+1)`.
pub fn reduce_word(word: &[i32]) -> Vec<i32> {
    let mut out: Vec<i32> = Vec::with_capacity(word.len());
    for &x in word {
        debug_assert!(x != 0);
        if out.last() == Some(&-x) {
            out.pop();
        } else {
            out.push(x);
        }
    }
    out
}

impl GroupBackend {
    pub fn finite(group: FiniteGroup) -> Self {
        GroupBackend::Finite { group }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, GroupBackend::Finite { .. })
    }

    pub fn as_finite(&self) -> Option<&FiniteGroup> {
        match self {
            GroupBackend::Finite { group } => Some(group),
            _ => None,
        }
    }

    /// Group order, `None` for the infinite backends (and for the trivial rank-0 ones it is 1).
    pub fn order(&self) -> Option<usize> {
        match self {
            GroupBackend::Finite { group } => Some(group.order()),
            GroupBackend::FreeAbelian { rank: 0 } | GroupBackend::Free { rank: 0 } => Some(1),
            _ => None,
        }
    }

    pub fn identity(&self) -> Elem {
        match self {
            GroupBackend::Finite { group } => Elem::Finite(group.identity()),
            GroupBackend::FreeAbelian { rank } => Elem::Abelian(vec![0; *rank]),
            GroupBackend::Free { .. } => Elem::Word(Vec::new()),
        }
    }

    pub fn is_identity(&self, a: &Elem) -> bool {
        match (self, a) {
            (GroupBackend::Finite { group }, Elem::Finite(x)) => *x == group.identity(),
            (_, Elem::Abelian(v)) => v.iter().all(|&c| c == 0),
            (_, Elem::Word(w)) => w.is_empty(),
            _ => false,
        }
    }

    pub fn mul(&self, a: &Elem, b: &Elem) -> Elem {
        match (self, a, b) {
            (GroupBackend::Finite { group }, Elem::Finite(x), Elem::Finite(y)) => Elem::Finite(group.mul(*x, *y)),
            (GroupBackend::FreeAbelian { .. }, Elem::Abelian(x), Elem::Abelian(y)) => {
                Elem::Abelian(x.iter().zip(y).map(|(p, q)| p + q).collect())
            }
            (GroupBackend::Free { .. }, Elem::Word(x), Elem::Word(y)) => {
                let mut w = x.clone();
                for &l in y {
                    if w.last() == Some(&-l) {
                        w.pop();
                    } else {
                        w.push(l);
                    }
                }
                Elem::Word(w)
            }
            _ => panic!("element kind does not match group backend"),
        }
    }

    pub fn inv(&self, a: &Elem) -> Elem {
        match (self, a) {
            (GroupBackend::Finite { group }, Elem::Finite(x)) => Elem::Finite(group.inv(*x)),
            (_, Elem::Abelian(v)) => Elem::Abelian(v.iter().map(|c| -c).collect()),
            (_, Elem::Word(w)) => Elem::Word(w.iter().rev().map(|l| -l).collect()),
            _ => panic!("element kind does not match group backend"),
        }
    }

    pub fn contains(&self, a: &Elem) -> bool {
        match (self, a) {
            (GroupBackend::Finite { group }, Elem::Finite(x)) => (*x as usize) < group.order(),
            (GroupBackend::FreeAbelian { rank }, Elem::Abelian(v)) => v.len() == *rank,
            (GroupBackend::Free { rank }, Elem::Word(w)) => {
                w.iter().all(|&l| l != 0 && l.unsigned_abs() as usize <= *rank) && reduce_word(w) == *w
            }
            _ => false,
        }
    }

    /// The standard basis of a backend, or the greedy generators of a finite group.
    pub fn standard_generators(&self) -> Vec<Elem> {
        match self {
            GroupBackend::Finite { group } => group.default_generators().into_iter().map(Elem::Finite).collect(),
            GroupBackend::FreeAbelian { rank } => (0..*rank)
                .map(|i| {
                    let mut v = vec![0; *rank];
                    v[i] = 1;
                    Elem::Abelian(v)
                })
                .collect(),
            GroupBackend::Free { rank } => (0..*rank as i32).map(|i| Elem::Word(vec![i + 1])).collect(),
        }
    }

    /// Word length with respect to the standard basis of a backend. `None` for finite groups,
    /// whose lengths depend on the chosen generators.
    pub fn backend_length(&self, a: &Elem) -> Option<usize> {
        match a {
            Elem::Abelian(v) => Some(v.iter().map(|c| c.unsigned_abs() as usize).sum()),
            Elem::Word(w) => Some(w.len()),
            Elem::Finite(_) => None,
        }
    }

    /// All backend elements of standard length at most `r`, ordered by length and then by value.
    pub fn backend_ball(&self, r: usize) -> Vec<Elem> {
        let mut out = match self {
            GroupBackend::Finite { .. } => panic!("backend_ball on a finite group"),
            GroupBackend::FreeAbelian { rank } => {
                let mut acc = vec![Vec::new()];
                for _ in 0..*rank {
                    let mut next = Vec::new();
                    for v in &acc {
                        let used: usize = v.iter().map(|c: &i64| c.unsigned_abs() as usize).sum();
                        let room = (r - used) as i64;
                        for c in -room..=room {
                            let mut w = v.clone();
                            w.push(c);
                            next.push(w);
                        }
                    }
                    acc = next;
                }
                acc.into_iter().map(Elem::Abelian).collect::<Vec<_>>()
            }
            GroupBackend::Free { rank } => {
                let mut all = vec![Vec::new()];
                let mut frontier = vec![Vec::<i32>::new()];
                for _ in 0..r {
                    let mut next = Vec::new();
                    for w in &frontier {
                        for i in 1..=*rank as i32 {
                            for l in [i, -i] {
                                if w.last() != Some(&-l) {
                                    let mut x = w.clone();
                                    x.push(l);
                                    next.push(x);
                                }
                            }
                        }
                    }
                    all.extend(next.iter().cloned());
                    frontier = next;
                }
                all.into_iter().map(Elem::Word).collect()
            }
        };
        out.sort_by(|a, b| {
            let la = self.backend_length(a).unwrap();
            let lb = self.backend_length(b).unwrap();
            la.cmp(&lb).then_with(|| a.cmp(b))
        });
        out
    }

    pub fn describe(&self) -> String {
        match self {
            GroupBackend::Finite { group } => format!("finite of order {}", group.order()),
            GroupBackend::FreeAbelian { rank } => format!("free abelian of rank {rank}"),
            GroupBackend::Free { rank } => format!("free of rank {rank}"),
        }
    }
}
