//! R-paths, R-separation and empirical checks of the separation lemmas on
//! finite pieces of Cayley graphs.

use std::collections::{BTreeMap, HashMap, VecDeque};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::dsu::Dsu;
use crate::fundgroup::{CayleyBall, FundamentalGroup, NormalForm};
use crate::BudgetExceeded;

mod cayley;
mod ends;

pub use cayley::{verify_cayley_separation, verify_k_construction, SeparationSpace};
pub use ends::{ends_estimate, EndsReport, EndsVerdict};

/// A finite metric space with integer distances.
pub trait FiniteMetric: Sync {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Points at distance at most `r` from `i`, with their distances, `i` included.
    fn within(&self, i: usize, r: usize) -> Vec<(usize, usize)>;

    /// `d(i, j)`, or `None` when it is not known to the space.
    fn distance(&self, i: usize, j: usize) -> Option<usize>;
}

/// An explicit distance matrix.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MatrixMetric {
    pub d: Vec<Vec<usize>>,
}

impl MatrixMetric {
    /// The subspace on `keep`, reindexed in that order.
    pub fn restrict(&self, keep: &[usize]) -> MatrixMetric {
        MatrixMetric { d: keep.iter().map(|&i| keep.iter().map(|&j| self.d[i][j]).collect()).collect() }
    }
}

impl FiniteMetric for MatrixMetric {
    fn len(&self) -> usize {
        self.d.len()
    }

    fn within(&self, i: usize, r: usize) -> Vec<(usize, usize)> {
        self.d[i].iter().enumerate().filter(|(_, &d)| d <= r).map(|(j, &d)| (j, d)).collect()
    }

    fn distance(&self, i: usize, j: usize) -> Option<usize> {
        Some(self.d[i][j])
    }
}

/// The path metric of the ball's own Cayley graph.
#[derive(Debug, Clone, Copy)]
pub struct GraphMetric<'a> {
    pub ball: &'a CayleyBall,
}

impl FiniteMetric for GraphMetric<'_> {
    fn len(&self) -> usize {
        self.ball.len()
    }

    fn within(&self, i: usize, r: usize) -> Vec<(usize, usize)> {
        let mut seen = HashMap::from([(i, 0usize)]);
        let mut out = vec![(i, 0)];
        let mut queue = VecDeque::from([i]);
        while let Some(u) = queue.pop_front() {
            let du = seen[&u];
            if du == r {
                continue;
            }
            for &w in &self.ball.adjacency[u] {
                let w = w as usize;
                if let std::collections::hash_map::Entry::Vacant(e) = seen.entry(w) {
                    e.insert(du + 1);
                    out.push((w, du + 1));
                    queue.push_back(w);
                }
            }
        }
        out
    }

    fn distance(&self, i: usize, j: usize) -> Option<usize> {
        let d = self.ball.graph_distances(&[i])[j];
        (d != u32::MAX).then_some(d as usize)
    }
}

/// The word metric `d_S` of the whole group, restricted to the ball.
#[derive(Debug, Clone, Copy)]
pub struct WordMetric<'a> {
    pub fg: &'a FundamentalGroup,
    pub ball: &'a CayleyBall,
}

impl FiniteMetric for WordMetric<'_> {
    fn len(&self) -> usize {
        self.ball.len()
    }

    fn within(&self, i: usize, r: usize) -> Vec<(usize, usize)> {
        let x = &self.ball.elements[i];
        let mut out = Vec::new();
        for (w, &l) in self.ball.elements.iter().zip(&self.ball.layer) {
            if l as usize > r {
                break;
            }
            if let Some(j) = self.ball.index_of(&self.fg.multiply(x, w)) {
                out.push((j, l as usize));
            }
        }
        out
    }

    fn distance(&self, i: usize, j: usize) -> Option<usize> {
        self.ball.word_distance(self.fg, &self.ball.elements[i], &self.ball.elements[j])
    }
}

/// A partition of the non-excluded points into R-path components.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Components {
    /// Component of each point, `None` for excluded points.
    pub label: Vec<Option<usize>>,
    pub sizes: Vec<usize>,
}

impl Components {
    pub fn count(&self) -> usize {
        self.sizes.len()
    }

    pub fn same(&self, i: usize, j: usize) -> bool {
        matches!((self.label[i], self.label[j]), (Some(a), Some(b)) if a == b)
    }
}

/// Maximal R-path components of `space \ excluded`, labelled in order of first point.
pub fn r_components<M: FiniteMetric>(space: &M, excluded: &[bool], r: usize) -> Components {
    assert!(r > 0, "R must be positive");
    let n = space.len();
    let neighbours: Vec<Vec<usize>> = (0..n)
        .into_par_iter()
        .map(|i| {
            if excluded[i] {
                return Vec::new();
            }
            space.within(i, r).into_iter().map(|(j, _)| j).filter(|&j| j > i && !excluded[j]).collect()
        })
        .collect();
    let mut dsu = Dsu::new(n);
    for (i, ns) in neighbours.iter().enumerate() {
        for &j in ns {
            dsu.union(i, j);
        }
    }
    let mut roots = HashMap::new();
    let mut label = vec![None; n];
    let mut sizes = Vec::new();
    for i in (0..n).filter(|&i| !excluded[i]) {
        let root = dsu.find(i);
        let c = *roots.entry(root).or_insert_with(|| {
            sizes.push(0);
            sizes.len() - 1
        });
        sizes[c] += 1;
        label[i] = Some(c);
    }
    Components { label, sizes }
}

/// `d(i, set)` when it is at most `cap`.
pub fn distance_to_set<M: FiniteMetric>(space: &M, i: usize, set: &[bool], cap: usize) -> Option<usize> {
    space.within(i, cap).into_iter().filter(|&(j, _)| set[j]).map(|(_, d)| d).min()
}

/// The closed neighbourhood `N_r(set)` as a membership mask.
pub fn neighbourhood<M: FiniteMetric>(space: &M, set: &[usize], r: usize) -> Vec<bool> {
    let mut out = vec![false; space.len()];
    for &i in set {
        for (j, _) in space.within(i, r) {
            out[j] = true;
        }
    }
    out
}

fn mask(n: usize, set: &[usize]) -> Vec<bool> {
    let mut m = vec![false; n];
    for &i in set {
        m[i] = true;
    }
    m
}

/// Whether `set` R-separates `x0` from `x1`: both lie at distance at least `r`
/// from it and in different R-path components of its complement.
pub fn r_separates<M: FiniteMetric>(space: &M, set: &[usize], x0: usize, x1: usize, r: usize) -> bool {
    let m = mask(space.len(), set);
    if m[x0] || m[x1] {
        return false;
    }
    if distance_to_set(space, x0, &m, r - 1).is_some() || distance_to_set(space, x1, &m, r - 1).is_some() {
        return false;
    }
    !r_reachable(space, &m, x0, x1, r)
}

fn r_reachable<M: FiniteMetric>(space: &M, excluded: &[bool], x0: usize, x1: usize, r: usize) -> bool {
    let mut seen = vec![false; space.len()];
    seen[x0] = true;
    let mut queue = VecDeque::from([x0]);
    while let Some(u) = queue.pop_front() {
        if u == x1 {
            return true;
        }
        for (w, _) in space.within(u, r) {
            if !excluded[w] && !seen[w] {
                seen[w] = true;
                queue.push_back(w);
            }
        }
    }
    false
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Failure {
    pub sample: usize,
    pub x0: String,
    pub x1: String,
    pub reason: String,
}

/// Outcome of a separation check over one or more instances.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SeparationReport {
    pub instance: String,
    pub r: usize,
    /// The separating set of a single instance, or one description per sample.
    pub separating_set: Vec<String>,
    pub samples: usize,
    /// Samples with no geodesic edge between the chosen vertices.
    pub not_applicable: usize,
    pub witness_pairs_tested: usize,
    /// Measured constants, such as `diam_p` or `r0`.
    pub quantities: BTreeMap<String, usize>,
    pub failures: Vec<Failure>,
}

impl SeparationReport {
    fn new(instance: String, r: usize) -> Self {
        SeparationReport {
            instance,
            r,
            separating_set: Vec::new(),
            samples: 0,
            not_applicable: 0,
            witness_pairs_tested: 0,
            quantities: BTreeMap::new(),
            failures: Vec::new(),
        }
    }

    pub fn holds(&self) -> bool {
        self.failures.is_empty()
    }

    pub fn verdict(&self) -> &'static str {
        if self.holds() {
            "holds"
        } else {
            "fails"
        }
    }

    pub fn to_text(&self) -> String {
        let mut out = format!(
            "{}\nR = {}\nsamples: {} ({} not applicable)\nwitness pairs: {}\n",
            self.instance, self.r, self.samples, self.not_applicable, self.witness_pairs_tested
        );
        for (k, v) in &self.quantities {
            out.push_str(&format!("{k} = {v}\n"));
        }
        for f in &self.failures {
            out.push_str(&format!("failure in sample {}: {} / {}: {}\n", f.sample, f.x0, f.x1, f.reason));
        }
        out.push_str(&format!("verdict: {}\n", self.verdict()));
        out
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub enum Precondition {
    /// A chosen point lies in the set.
    InSet,
    /// The set does not separate the points in the graph.
    NotSeparated,
    /// A point is closer to the set than required.
    TooClose { distance: usize, required: usize },
    /// The ball is too small for the requested check.
    BallTooSmall { required: usize },
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeparationError {
    #[error("precondition unmet: {condition:?} at {witness}")]
    PreconditionUnmet { condition: Precondition, witness: String },
    #[error("counts {counts:?} do not stabilize")]
    Inconclusive { counts: Vec<usize> },
    #[error(transparent)]
    Budget(#[from] BudgetExceeded),
}

/// Checks that `N_{ceil(R/2)}(set)` R-separates `x0` from `x1` in a graph
/// metric, given that `set` separates them and both are at distance at least
/// `ceil(3R/2)` from it.
pub fn verify_thickening_lemma<M: FiniteMetric>(
    space: &M,
    set: &[usize],
    x0: usize,
    x1: usize,
    r: usize,
    name: impl Fn(usize) -> String,
) -> Result<SeparationReport, SeparationError> {
    let m = mask(space.len(), set);
    let unmet = |condition, x: usize| Err(SeparationError::PreconditionUnmet { condition, witness: name(x) });
    for x in [x0, x1] {
        if m[x] {
            return unmet(Precondition::InSet, x);
        }
    }
    if r_reachable(space, &m, x0, x1, 1) {
        return unmet(Precondition::NotSeparated, x0);
    }
    let required = (3 * r).div_ceil(2);
    for x in [x0, x1] {
        if let Some(d) = distance_to_set(space, x, &m, required - 1) {
            return unmet(Precondition::TooClose { distance: d, required }, x);
        }
    }
    let half = r.div_ceil(2);
    let thick = neighbourhood(space, set, half);
    let thick_set: Vec<usize> = (0..space.len()).filter(|&i| thick[i]).collect();
    let mut report = SeparationReport::new(format!("N_{half}(I) for |I| = {}", set.len()), r);
    report.separating_set = thick_set.iter().map(|&i| name(i)).collect();
    report.samples = 1;
    report.witness_pairs_tested = 1;
    if !r_separates(space, &thick_set, x0, x1, r) {
        report.failures.push(Failure {
            sample: 0,
            x0: name(x0),
            x1: name(x1),
            reason: "thickened set does not R-separate".into(),
        });
    }
    Ok(report)
}

/// Display names for ball points, for use with [`verify_thickening_lemma`].
pub fn element_names<'a>(fg: &'a FundamentalGroup, elements: &'a [NormalForm]) -> impl Fn(usize) -> String + 'a {
    move |i| fg.display(&elements[i])
}
