//! Finite-depth models of the boundary of the Bass-Serre tree, limit sets of
//! vertex cosets, and checks of the dense amalgam conditions.
//!
//! A branch of depth `d` is an immersed edge path of length `d` from the root
//! vertex, that is a vertex of the tree ball at depth `d`. Two branches are at
//! visual distance `2^-s`, where `s` is the length of their common prefix.
//! Infinite vertex groups have their stars cut off at `star_radius`, and a step
//! out of such a vertex with label of backend length at least `star_radius` is a
//! far exit.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::bass_serre::{key_distance, tree_ball, TreeBall, TreeVertex};
use crate::fundgroup::{FundamentalGroup, NormalForm, PathKey};
use crate::BudgetExceeded;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoundaryError {
    #[error("depth {depth} is below the required {required}")]
    DepthTooSmall { depth: usize, required: usize },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

#[derive(Debug, Clone)]
pub struct BoundaryApprox {
    pub depth: usize,
    pub tree: TreeBall,
    /// Tree nodes at depth `depth`, in lexicographic order.
    pub branches: Vec<usize>,
    /// For each tree node, the half-open range of branches below it.
    ranges: Vec<(usize, usize)>,
    /// For each branch, the depth of the vertex its last far exit leaves.
    last_far_exit: Vec<Option<usize>>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BoundarySummary {
    pub depth: usize,
    pub star_radius: usize,
    pub branches: usize,
    /// Tree vertices at each depth.
    pub level_sizes: Vec<usize>,
    pub dead_ends: usize,
    pub truncated_stars: usize,
}

pub fn boundary_approx(fg: &FundamentalGroup, depth: usize, star_radius: usize, budget: usize) -> Result<BoundaryApprox, BudgetExceeded> {
    let tree = tree_ball(fg, depth, star_radius, budget)?;
    let branches: Vec<usize> = (0..tree.len()).filter(|&i| tree.depth(i) == depth).collect();
    let mut ranges = vec![(usize::MAX, 0); tree.len()];
    for (b, &i) in branches.iter().enumerate() {
        ranges[i] = (b, b + 1);
    }
    for i in (1..tree.len()).rev() {
        let p = tree.nodes[i].parent.unwrap();
        let (lo, hi) = ranges[i];
        if lo < hi {
            ranges[p] = (ranges[p].0.min(lo), ranges[p].1.max(hi));
        }
    }
    for r in &mut ranges {
        if r.0 == usize::MAX {
            *r = (0, 0);
        }
    }
    let g = fg.graph();
    let last_far_exit = branches
        .iter()
        .map(|&i| {
            let key = &tree.nodes[i].vertex.key;
            key.iter().enumerate().rev().find_map(|(j, (t, z))| {
                let far = g.vertex_group(g.alpha(*z)).backend_length(t).is_some_and(|l| l >= star_radius);
                far.then_some(j)
            })
        })
        .collect();
    Ok(BoundaryApprox { depth, tree, branches, ranges, last_far_exit })
}

impl BoundaryApprox {
    pub fn len(&self) -> usize {
        self.branches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.branches.is_empty()
    }

    pub fn key(&self, b: usize) -> &PathKey {
        &self.tree.nodes[self.branches[b]].vertex.key
    }

    /// Length of the common prefix of two branches.
    pub fn split(&self, a: usize, b: usize) -> usize {
        self.key(a).iter().zip(self.key(b)).take_while(|(x, y)| x == y).count()
    }

    /// Visual distance `2^-split`, and `0` from a branch to itself.
    pub fn distance(&self, a: usize, b: usize) -> f64 {
        if a == b {
            0.0
        } else {
            0.5f64.powi(self.split(a, b) as i32)
        }
    }

    /// Branches through a tree node: the basis set of the edge above it.
    pub fn basis_set(&self, node: usize) -> std::ops::Range<usize> {
        let (lo, hi) = self.ranges[node];
        lo..hi
    }

    /// The node of branch `b` at depth `k`.
    pub fn ancestor(&self, b: usize, k: usize) -> usize {
        let mut i = self.branches[b];
        while self.tree.depth(i) > k {
            i = self.tree.nodes[i].parent.unwrap();
        }
        i
    }

    /// Tree nodes above the last layer with nothing below them.
    pub fn dead_ends(&self) -> Vec<usize> {
        (0..self.tree.len()).filter(|&i| self.tree.depth(i) < self.depth && self.tree.nodes[i].children.is_empty()).collect()
    }

    pub fn summary(&self) -> BoundarySummary {
        let mut level_sizes = vec![0; self.depth + 1];
        for i in 0..self.tree.len() {
            level_sizes[self.tree.depth(i)] += 1;
        }
        BoundarySummary {
            depth: self.depth,
            star_radius: self.tree.star_radius,
            branches: self.len(),
            level_sizes,
            dead_ends: self.dead_ends().len(),
            truncated_stars: self.tree.nodes.iter().filter(|n| n.truncated).count(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct CantorVerdict {
    pub pass: bool,
    pub no_dead_ends: bool,
    /// Every branch meets a vertex with at least two children among its last `window` ancestors.
    pub windowed_branching: bool,
    pub basis_separates: bool,
    pub window: usize,
    pub witness: Option<String>,
}

/// Finite-depth test for a Cantor space: no dead ends, branching within the
/// last three levels of every branch, and singleton basis sets at full depth.
pub fn cantor_check(fg: &FundamentalGroup, b: &BoundaryApprox) -> Result<CantorVerdict, BoundaryError> {
    const WINDOW: usize = 3;
    if b.depth < WINDOW {
        return Err(BoundaryError::DepthTooSmall { depth: b.depth, required: WINDOW });
    }
    let dead = b.dead_ends();
    let mut witness = dead.first().map(|&i| format!("dead end at {}", fg.display_path(&b.tree.nodes[i].vertex.key, None)));
    let lonely = (0..b.len()).find(|&x| {
        (b.depth - WINDOW..b.depth).all(|k| b.tree.nodes[b.ancestor(x, k)].children.len() < 2)
    });
    if witness.is_none() {
        witness = lonely.map(|x| format!("no branching near {}", fg.display_path(b.key(x), None)));
    }
    let basis_separates = b.branches.iter().all(|&i| b.basis_set(i).len() == 1);
    let empty = b.is_empty();
    let no_dead_ends = dead.is_empty();
    let windowed_branching = lonely.is_none();
    Ok(CantorVerdict {
        pass: !empty && no_dead_ends && windowed_branching && basis_separates,
        no_dead_ends,
        windowed_branching,
        basis_separates,
        window: WINDOW,
        witness: if empty { Some("empty boundary".into()) } else { witness },
    })
}

/// Directions of the limit set of a vertex coset at the depth of `b`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LimitSetApprox {
    pub coset: TreeVertex,
    pub depth: usize,
    /// Sorted branch indices.
    pub directions: Vec<usize>,
}

/// The branches whose last far exit leaves the vertex `coset`. Empty for
/// finite vertex groups and for vertices outside the ball.
pub fn limit_set_approx(b: &BoundaryApprox, coset: &TreeVertex) -> LimitSetApprox {
    let k = coset.depth();
    let directions = match b.tree.node(&coset.key) {
        Some(node) => b.basis_set(node).filter(|&x| b.last_far_exit[x] == Some(k)).collect(),
        None => Vec::new(),
    };
    LimitSetApprox { coset: coset.clone(), depth: b.depth, directions }
}

/// The family of nonempty limit sets of cosets at depth `d - 2` and `d - 1`.
///
/// Deeper far exits belong to deeper cosets, so these sets are pairwise disjoint.
pub fn limit_set_family(b: &BoundaryApprox) -> Vec<LimitSetApprox> {
    let lo = b.depth.saturating_sub(2);
    (0..b.tree.len())
        .filter(|&i| (lo..b.depth).contains(&b.tree.depth(i)))
        .map(|i| limit_set_approx(b, &b.tree.nodes[i].vertex))
        .filter(|w| !w.directions.is_empty())
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ConditionVerdict {
    pub condition: String,
    pub pass: bool,
    pub checked: usize,
    pub witnesses: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AmalgamCertificate {
    pub depth: usize,
    pub members: usize,
    pub directions: usize,
    pub branches: usize,
    pub conditions: Vec<ConditionVerdict>,
    /// `(k, largest visual diameter of a member at tree distance at least k)`.
    pub max_diameter_by_distance: Vec<(usize, f64)>,
    pub density_epsilon: f64,
    pub saturation_violations: usize,
}

impl AmalgamCertificate {
    pub fn pass(&self) -> bool {
        self.conditions.iter().all(|c| c.pass)
    }
}

const MAX_WITNESSES: usize = 8;

fn verdict(condition: &str, checked: usize, witnesses: Vec<String>) -> ConditionVerdict {
    let pass = witnesses.is_empty();
    ConditionVerdict { condition: condition.into(), pass, checked, witnesses: witnesses.into_iter().take(MAX_WITNESSES).collect() }
}

/// Prefix sums of a branch mask, for counting inside basis sets.
fn prefix_counts(mask: &[bool]) -> Vec<usize> {
    let mut out = vec![0; mask.len() + 1];
    for (i, &m) in mask.iter().enumerate() {
        out[i + 1] = out[i] + usize::from(m);
    }
    out
}

fn count_in(prefix: &[usize], r: std::ops::Range<usize>) -> usize {
    prefix[r.end] - prefix[r.start]
}

fn count_sorted(sorted: &[usize], r: std::ops::Range<usize>) -> usize {
    sorted.partition_point(|&x| x < r.end) - sorted.partition_point(|&x| x < r.start)
}

/// Checks (a1)-(a5) at depth `d` with `epsilon = 2^(2-d)`:
/// (a1) members are pairwise disjoint; (a2) members at tree distance `k` from
/// the root have diameter at most `2^(1-k)`; (a3) every member has non-member
/// branches within `epsilon` of each of its directions; (a4) the union for
/// each vertex type is `epsilon`-dense; (a5) for sampled pairs of members, the
/// split at an edge of the geodesic between their cosets is saturated by every
/// member not attached to that edge and separates the pair.
pub fn amalgam_check(
    fg: &FundamentalGroup,
    b: &BoundaryApprox,
    family: &[LimitSetApprox],
    samples: usize,
    seed: u64,
) -> Result<AmalgamCertificate, BoundaryError> {
    if b.depth < 4 {
        return Err(BoundaryError::DepthTooSmall { depth: b.depth, required: 4 });
    }
    let d = b.depth;
    let n = b.len();
    let name = |x: usize| fg.display_path(b.key(x), None);
    let mut conditions = Vec::new();

    let mut owner: Vec<Option<usize>> = vec![None; n];
    let mut overlaps = Vec::new();
    for (m, w) in family.iter().enumerate() {
        for &x in &w.directions {
            match owner[x] {
                Some(o) if o != m => overlaps.push(format!("{} lies in members {o} and {m}", name(x))),
                _ => owner[x] = Some(m),
            }
        }
    }
    let total: usize = family.iter().map(|w| w.directions.len()).sum();
    conditions.push(verdict("a1", total, overlaps));

    let mut by_depth = vec![0.0f64; d + 1];
    let mut null_witnesses = Vec::new();
    for w in family {
        let k = w.coset.depth();
        let diam = w.directions.iter().map(|&x| b.distance(w.directions[0], x)).fold(0.0, f64::max);
        by_depth[k] = by_depth[k].max(diam);
    }
    let mut max_diameter_by_distance = Vec::new();
    let mut running = 0.0f64;
    for k in (0..=d).rev() {
        running = running.max(by_depth[k]);
        if running > 2f64.powi(1 - k as i32) {
            null_witnesses.push(format!("diameter {running} at distance {k}"));
        }
        max_diameter_by_distance.push((k, running));
    }
    max_diameter_by_distance.reverse();
    conditions.push(verdict("a2", family.len(), null_witnesses));

    let window = d - 2;
    let mut dense_witnesses = Vec::new();
    for w in family {
        for &x in &w.directions {
            let r = b.basis_set(b.ancestor(x, window));
            if count_sorted(&w.directions, r.clone()) == r.len() {
                dense_witnesses.push(format!("{} has no non-member within 2^-{window}", name(x)));
                break;
            }
        }
    }
    conditions.push(verdict("a3", total, dense_witnesses));

    let types = fg.graph().num_vertices();
    let mut union_witnesses = Vec::new();
    for v in 0..types {
        let mask: Vec<bool> = (0..n).map(|x| owner[x].is_some_and(|m| family[m].coset.vertex_type == v)).collect();
        if !mask.contains(&true) {
            continue;
        }
        let prefix = prefix_counts(&mask);
        if let Some(x) = (0..n).find(|&x| count_in(&prefix, b.basis_set(b.ancestor(x, window))) == 0) {
            union_witnesses.push(format!("no direction of type {} within 2^-{window} of {}", fg.graph().vertices[v].name, name(x)));
        }
    }
    conditions.push(verdict("a4", n, union_witnesses));

    let mut saturation_violations = 0;
    let mut split_witnesses = Vec::new();
    let mut checked = 0;
    if family.len() >= 2 {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        for _ in 0..samples {
            let i = rng.gen_range(0..family.len());
            let j = rng.gen_range(0..family.len() - 1);
            let j = if j >= i { j + 1 } else { j };
            let (c, c2) = (&family[i].coset, &family[j].coset);
            let Some(below) = split_node(b, c, c2) else { continue };
            checked += 1;
            let r = b.basis_set(below);
            let attached = |w: &LimitSetApprox| {
                let node = b.tree.node(&w.coset.key).unwrap();
                node == below || Some(node) == b.tree.nodes[below].parent
            };
            for w in family.iter().filter(|w| !attached(w)) {
                let inside = count_sorted(&w.directions, r.clone());
                if inside != 0 && inside != w.directions.len() {
                    saturation_violations += 1;
                    if split_witnesses.len() < MAX_WITNESSES {
                        split_witnesses.push(format!(
                            "member at {} straddles the split between {} and {}",
                            fg.display_path(&w.coset.key, None),
                            fg.display_path(&c.key, None),
                            fg.display_path(&c2.key, None)
                        ));
                    }
                }
            }
        }
    }
    conditions.push(verdict("a5", checked, split_witnesses));

    Ok(AmalgamCertificate {
        depth: d,
        members: family.len(),
        directions: total,
        branches: n,
        conditions,
        max_diameter_by_distance,
        density_epsilon: 2f64.powi(2 - d as i32),
        saturation_violations,
    })
}

/// The lower endpoint of the geodesic edge between `u` and `w` closest to their meeting point.
fn split_node(b: &BoundaryApprox, u: &TreeVertex, w: &TreeVertex) -> Option<usize> {
    let l = u.key.iter().zip(&w.key).take_while(|(x, y)| x == y).count();
    let child = if u.key.len() > l { &u.key[..=l] } else { &w.key[..=l] };
    b.tree.node(child)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Verdict {
    Pass,
    Fail,
    NotApplicable,
}

/// Every direction of every member has a branch outside all members within `2^(2-d)`.
pub fn branch_density_check(fg: &FundamentalGroup, b: &BoundaryApprox, family: &[LimitSetApprox]) -> Result<(Verdict, Option<String>), BoundaryError> {
    if fg.graph().num_edges() == 0 {
        return Ok((Verdict::NotApplicable, Some("no tree edges".into())));
    }
    if b.depth < 4 {
        return Err(BoundaryError::DepthTooSmall { depth: b.depth, required: 4 });
    }
    let mut member = vec![false; b.len()];
    for w in family {
        for &x in &w.directions {
            member[x] = true;
        }
    }
    let free: Vec<bool> = member.iter().map(|m| !m).collect();
    let prefix = prefix_counts(&free);
    let window = b.depth - 2;
    let gap = (0..b.len()).find(|&x| member[x] && count_in(&prefix, b.basis_set(b.ancestor(x, window))) == 0);
    Ok(match gap {
        Some(x) => (Verdict::Fail, Some(format!("no branch point direction near {}", fg.display_path(b.key(x), None)))),
        None => (Verdict::Pass, None),
    })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DirectionClass {
    BranchPoint { prefix: PathKey },
    VertexPoint { coset: TreeVertex },
    Inconclusive,
}

/// Classifies the accumulation direction of a sequence of group elements.
///
/// It is a vertex point when one tree vertex lies within tree distance `r` of a
/// projection of every sample. It is a branch point when the common prefixes of
/// consecutive projections of the root orbit grow by more than `2(r + D)`,
/// measured from their smallest value to the last one, where `D` bounds the
/// distance between the projections of one element. The two criteria exclude
/// each other.
pub fn classify_direction(fg: &FundamentalGroup, samples: &[NormalForm], r: usize) -> DirectionClass {
    if samples.len() < 2 {
        return DirectionClass::Inconclusive;
    }
    let types = fg.graph().num_vertices();
    let projections: Vec<Vec<TreeVertex>> =
        samples.iter().map(|x| (0..types).map(|v| TreeVertex::of(fg, x, v)).collect()).collect();
    let mut best: Option<(usize, &TreeVertex)> = None;
    for c in projections.iter().flatten() {
        let worst = projections
            .iter()
            .map(|ps| ps.iter().map(|p| key_distance(&p.key, &c.key)).min().unwrap())
            .max()
            .unwrap();
        if worst <= r && best.is_none_or(|(w, _)| worst < w) {
            best = Some((worst, c));
        }
    }
    if let Some((_, c)) = best {
        return DirectionClass::VertexPoint { coset: c.clone() };
    }
    let root = fg.root();
    let spread = projections[0].iter().map(|p| key_distance(&p.key, &projections[0][root].key)).max().unwrap();
    let splits: Vec<usize> = projections
        .windows(2)
        .map(|w| w[0][root].key.iter().zip(&w[1][root].key).take_while(|(a, b)| a == b).count())
        .collect();
    let last = *splits.last().unwrap();
    let low = *splits.iter().min().unwrap();
    if last - low > 2 * (r + spread) {
        let prefix = projections[projections.len() - 1][root].key[..last].to_vec();
        return DirectionClass::BranchPoint { prefix };
    }
    DirectionClass::Inconclusive
}

#[cfg(test)]
mod tests;
