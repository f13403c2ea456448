use std::collections::{HashMap, HashSet};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use super::{distance_to_set, r_components, Failure, GraphMetric, Precondition, SeparationError, SeparationReport, WordMetric};
use crate::bass_serre::{edge_coset, identity_edge, key_distance, on_head_side, phi, tree_geodesic, TreeEdge, TreeVertex};
use crate::fundgroup::{word_metric_ball, CayleyBall, FundamentalGroup, NormalForm, PathKey};
use crate::gog::VertexId;

/// Failures kept per sample; the rest are only counted.
const FAILURES_PER_SAMPLE: usize = 8;

/// A Cayley ball together with the tree vertices of its points.
pub struct SeparationSpace<'a> {
    pub fg: &'a FundamentalGroup,
    pub ball: CayleyBall,
    /// `keys[i][v]` is the key of `x_i G_v`.
    keys: Vec<Vec<PathKey>>,
    by_vertex: HashMap<(VertexId, PathKey), Vec<usize>>,
}

struct Outcome {
    pairs: usize,
    failures: Vec<Failure>,
    extra_failures: usize,
}

impl<'a> SeparationSpace<'a> {
    pub fn new(fg: &'a FundamentalGroup, radius: usize, budget: usize) -> Result<Self, SeparationError> {
        let ball = word_metric_ball(fg, radius, budget)?;
        let types = fg.graph().num_vertices();
        let keys: Vec<Vec<PathKey>> =
            ball.elements.par_iter().map(|x| (0..types).map(|v| fg.vertex_key(x, v)).collect()).collect();
        let mut by_vertex: HashMap<(VertexId, PathKey), Vec<usize>> = HashMap::new();
        for (i, ks) in keys.iter().enumerate() {
            for (v, k) in ks.iter().enumerate() {
                by_vertex.entry((v, k.clone())).or_default().push(i);
            }
        }
        Ok(SeparationSpace { fg, ball, keys, by_vertex })
    }

    pub fn metric(&self) -> WordMetric<'_> {
        WordMetric { fg: self.fg, ball: &self.ball }
    }

    /// Ball points in the coset of a tree vertex.
    pub fn vertex_points(&self, v: &TreeVertex) -> &[usize] {
        self.by_vertex.get(&(v.vertex_type, v.key.clone())).map_or(&[], Vec::as_slice)
    }

    fn name(&self, i: usize) -> String {
        self.fg.display(&self.ball.elements[i])
    }

    /// Membership mask of `xs * B_S(r)` inside the ball.
    fn thicken(&self, xs: &[NormalForm], r: usize) -> Vec<bool> {
        let mut out = vec![false; self.ball.len()];
        for x in xs {
            for (w, &l) in self.ball.elements.iter().zip(&self.ball.layer) {
                if l as usize > r {
                    break;
                }
                if let Some(j) = self.ball.index_of(&self.fg.multiply(x, w)) {
                    out[j] = true;
                }
            }
        }
        out
    }

    /// `d_S(x_i, set)`, or `None` when every point of `set` is farther than the radius.
    fn distance_to(&self, i: usize, set: &[NormalForm]) -> Option<usize> {
        set.iter().filter_map(|c| self.ball.word_distance(self.fg, &self.ball.elements[i], c)).min()
    }

    /// Checks that `N_{ceil(R/2)}(e)` R-separates the far interior points of `u` from those of `w`.
    fn check_triple(&self, u: &TreeVertex, w: &TreeVertex, e: &TreeEdge, r: usize, sample: usize) -> Outcome {
        let coset = edge_coset(self.fg, e);
        let half = r.div_ceil(2);
        let far = (3 * r).div_ceil(2);
        let limit = self.ball.radius.saturating_sub(r + 1);
        let removed = self.thicken(&coset, half);
        let pick = |v: &TreeVertex| -> Vec<usize> {
            self.vertex_points(v)
                .iter()
                .copied()
                .filter(|&i| self.ball.layer[i] as usize <= limit && self.distance_to(i, &coset).is_none_or(|d| d > far))
                .collect()
        };
        let (d0, d1) = (pick(u), pick(w));
        let mut out = Outcome { pairs: d0.len() * d1.len(), failures: Vec::new(), extra_failures: 0 };
        if out.pairs == 0 {
            return out;
        }
        let metric = self.metric();
        let comps = r_components(&metric, &removed, r);
        let mut push = |f: Failure| {
            if out.failures.len() < FAILURES_PER_SAMPLE {
                out.failures.push(f);
            } else {
                out.extra_failures += 1;
            }
        };
        for &x in d0.iter().chain(&d1) {
            if let Some(d) = distance_to_set(&metric, x, &removed, r - 1) {
                push(Failure { sample, x0: self.name(x), x1: String::new(), reason: format!("at distance {d} < R from the separating set") });
            }
        }
        let mut right: HashMap<usize, usize> = HashMap::new();
        for &y in &d1 {
            if let Some(c) = comps.label[y] {
                right.entry(c).or_insert(y);
            }
        }
        for &x in &d0 {
            if let Some(&y) = comps.label[x].and_then(|c| right.get(&c)) {
                push(Failure { sample, x0: self.name(x), x1: self.name(y), reason: "joined by an R-path".into() });
            }
        }
        out
    }

    /// A single instance of the Cayley separation check.
    pub fn check(&self, u: &TreeVertex, w: &TreeVertex, e: &TreeEdge, r: usize) -> SeparationReport {
        let o = self.check_triple(u, w, e, r, 0);
        let mut report = SeparationReport::new(format!("Cayley separation across {}", self.edge_text(e)), r);
        report.samples = 1;
        report.separating_set.push(format!("N_{}({})", r.div_ceil(2), self.edge_text(e)));
        report.witness_pairs_tested = o.pairs;
        report.failures = o.failures;
        report.quantities.insert("unlisted_failures".into(), o.extra_failures);
        report
    }

    fn edge_text(&self, e: &TreeEdge) -> String {
        let a = e.in_orientation(self.fg);
        format!("{} G_{}", self.fg.display(&phi(self.fg, &a)), self.fg.graph().edge_label(a.edge_type))
    }
}

/// Samples pairs of tree vertices and an edge on their geodesic, and checks that
/// the `ceil(R/2)`-neighbourhood of the edge coset R-separates, in `(Gamma, d_S)`,
/// the points of the two vertex cosets lying outside its `ceil(3R/2)`-neighbourhood.
///
/// Witnesses are kept at distance at least `R + 1` from the sphere of the ball.
pub fn verify_cayley_separation(
    fg: &FundamentalGroup,
    ball_radius: usize,
    samples: usize,
    r: usize,
    seed: u64,
    budget: usize,
) -> Result<SeparationReport, SeparationError> {
    assert!(r > 0, "R must be positive");
    let space = SeparationSpace::new(fg, ball_radius, budget)?;
    let interior = space.ball.within(ball_radius.saturating_sub(r + 1));
    let types = fg.graph().num_vertices();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pick_vertex = |rng: &mut ChaCha8Rng| {
        let x = &space.ball.elements[interior[rng.gen_range(0..interior.len())]];
        TreeVertex::of(fg, x, rng.gen_range(0..types))
    };
    let triples: Vec<Option<(TreeVertex, TreeVertex, TreeEdge)>> = (0..samples)
        .map(|_| {
            let u = pick_vertex(&mut rng);
            let w = pick_vertex(&mut rng);
            let path = tree_geodesic(&u, &w);
            if path.is_empty() {
                return None;
            }
            let e = path[rng.gen_range(0..path.len())].clone();
            Some((u, w, e))
        })
        .collect();
    let outcomes: Vec<Option<Outcome>> = triples
        .par_iter()
        .enumerate()
        .map(|(i, t)| t.as_ref().map(|(u, w, e)| space.check_triple(u, w, e, r, i)))
        .collect();

    let mut report = SeparationReport::new(format!("Cayley separation, ball radius {ball_radius}"), r);
    report.samples = samples;
    let mut with_witnesses = 0;
    let mut extra = 0;
    for (t, o) in triples.iter().zip(outcomes) {
        match (t, o) {
            (Some((_, _, e)), Some(o)) => {
                report.separating_set.push(format!("N_{}({})", r.div_ceil(2), space.edge_text(e)));
                report.witness_pairs_tested += o.pairs;
                with_witnesses += usize::from(o.pairs > 0);
                extra += o.extra_failures;
                report.failures.extend(o.failures);
            }
            _ => report.not_applicable += 1,
        }
    }
    report.quantities.insert("ball_size".into(), space.ball.len());
    report.quantities.insert("samples_with_witnesses".into(), with_witnesses);
    report.quantities.insert("unlisted_failures".into(), extra);
    Ok(report)
}

struct KOutcome {
    r0: usize,
    bound_failures: Vec<Failure>,
    probe_points: usize,
    probe_failures: Vec<Failure>,
    pairs: usize,
}

/// Checks the separation of coset unions by translates of `K = I_r L`, where `E`
/// is the Cayley graph, `L` the closed star of the identity,
/// `P = {g : gL meets L} = B_S(2)`, `r = ceil(diam(P)/2)` and
/// `I_r = N_r(union of the edge groups)`.
///
/// Removing `gK` from the graph deletes the vertices of `N_1(g I_r)` and every
/// edge touching them. For each sampled edge the smallest `R0` that makes
/// `gK` separate `M \ N_{R0}` from `M' \ N_{R0}` is measured and compared to
/// `diam(I_{ceil(3 diam(P)/2)})`; pairs beyond that bound which are not
/// separated are failures. The probe checks that every vertex coset farther
/// than `r_probe` from the edge in the tree is separated from every such coset
/// across it.
pub fn verify_k_construction(
    fg: &FundamentalGroup,
    ball_radius: usize,
    edges: usize,
    r_probe: usize,
    seed: u64,
    budget: usize,
) -> Result<SeparationReport, SeparationError> {
    if ball_radius < 4 {
        return Err(SeparationError::PreconditionUnmet {
            condition: Precondition::BallTooSmall { required: 4 },
            witness: format!("radius {ball_radius}"),
        });
    }
    let space = SeparationSpace::new(fg, ball_radius, budget)?;
    let ball = &space.ball;
    let mut report = SeparationReport::new(format!("K construction, ball radius {ball_radius}"), 0);
    let orientation = &fg.spanning().orientation;
    if orientation.is_empty() {
        report.samples = edges;
        report.not_applicable = edges;
        return Ok(report);
    }

    let p = ball.within(2);
    let diam_p = p
        .iter()
        .flat_map(|&i| p.iter().map(move |&j| (i, j)))
        .map(|(i, j)| ball.word_distance(fg, &ball.elements[i], &ball.elements[j]).expect("radius covers B(4)"))
        .max()
        .unwrap_or(0);
    let r = diam_p.div_ceil(2);
    report.r = diam_p;

    let mut union: Vec<NormalForm> = Vec::new();
    for &y in orientation {
        for h in fg.edge_subgroup(y) {
            if !union.contains(&h) {
                union.push(h);
            }
        }
    }
    let i_r = neighbourhood_elements(fg, ball, &union, r);
    let bound_radius = (3 * diam_p).div_ceil(2);
    let (bound, exact) = coset_union_diameter(fg, &union, bound_radius, budget);

    let interior = ball.within(ball_radius - 1);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let near = ball.within(ball_radius / 3);
    let sampled: Vec<TreeEdge> = (0..edges)
        .map(|_| {
            let g = &ball.elements[near[rng.gen_range(0..near.len())]];
            let y = orientation[rng.gen_range(0..orientation.len())];
            identity_edge(fg, y).translate(fg, g)
        })
        .collect();
    let outcomes: Vec<KOutcome> = sampled
        .par_iter()
        .enumerate()
        .map(|(s, e)| k_check(&space, e, &i_r, &interior, bound, r_probe, s))
        .collect();

    report.samples = edges;
    let mut r0 = 0;
    let mut probe_points = 0;
    let mut probe_failures = 0;
    for (e, o) in sampled.iter().zip(outcomes) {
        let g = phi(fg, e);
        report.separating_set.push(format!("{} K", fg.display(&g)));
        r0 = r0.max(o.r0);
        probe_points += o.probe_points;
        probe_failures += o.probe_failures.len();
        report.witness_pairs_tested += o.pairs;
        report.failures.extend(o.bound_failures);
        report.failures.extend(o.probe_failures);
    }
    report.quantities.insert("diam_p".into(), diam_p);
    report.quantities.insert("i_r_radius".into(), r);
    report.quantities.insert("i_r_size".into(), i_r.len());
    report.quantities.insert("k_vertices".into(), neighbourhood_elements(fg, ball, &i_r, 1).len());
    report.quantities.insert("r0".into(), r0);
    report.quantities.insert("r0_bound".into(), bound);
    report.quantities.insert("r0_bound_exact".into(), usize::from(exact));
    report.quantities.insert("r_probe".into(), r_probe);
    report.quantities.insert("probe_points".into(), probe_points);
    report.quantities.insert("probe_failures".into(), probe_failures);
    Ok(report)
}

/// `xs * B_S(r)` as a list of distinct elements.
fn neighbourhood_elements(fg: &FundamentalGroup, ball: &CayleyBall, xs: &[NormalForm], r: usize) -> Vec<NormalForm> {
    let mut seen = HashSet::new();
    let mut out = Vec::new();
    for x in xs {
        for (w, &l) in ball.elements.iter().zip(&ball.layer) {
            if l as usize > r {
                break;
            }
            let y = fg.multiply(x, w);
            if seen.insert(y.clone()) {
                out.push(y);
            }
        }
    }
    out
}

/// `diam N_r(union)`, exactly when a ball of the needed radius fits the budget,
/// otherwise the triangle-inequality bound.
fn coset_union_diameter(fg: &FundamentalGroup, union: &[NormalForm], r: usize, budget: usize) -> (usize, bool) {
    let lengths: Vec<usize> = union.iter().map(|x| x.len()).collect();
    let reach = 2 * (r + lengths.iter().max().copied().unwrap_or(0));
    let Ok(big) = word_metric_ball(fg, reach, budget) else {
        let diam_u = union
            .iter()
            .flat_map(|x| union.iter().map(move |y| (x, y)))
            .map(|(x, y)| fg.multiply(&fg.invert(x), y).len())
            .max()
            .unwrap_or(0);
        return (2 * r + diam_u, false);
    };
    let set = neighbourhood_elements(fg, &big, union, r);
    let diam = set
        .par_iter()
        .map(|x| {
            let xi = fg.invert(x);
            set.iter().map(|y| big.length(&fg.multiply(&xi, y)).expect("ball covers the set")).max().unwrap_or(0)
        })
        .max()
        .unwrap_or(0);
    (diam, true)
}

fn k_check(
    space: &SeparationSpace<'_>,
    e: &TreeEdge,
    i_r: &[NormalForm],
    interior: &[usize],
    bound: usize,
    r_probe: usize,
    sample: usize,
) -> KOutcome {
    let fg = space.fg;
    let ball = &space.ball;
    let g = phi(fg, e);
    let translated: Vec<NormalForm> = i_r.iter().map(|x| fg.multiply(&g, x)).collect();
    let removed = space.thicken(&translated, 1);
    let comps = r_components(&GraphMetric { ball }, &removed, 1);
    let coset = edge_coset(fg, e);
    let beyond = ball.radius + 1;
    let mut out = KOutcome { r0: 0, bound_failures: Vec::new(), probe_points: 0, probe_failures: Vec::new(), pairs: 0 };
    let push = |list: &mut Vec<Failure>, f: Failure| {
        if list.len() < FAILURES_PER_SAMPLE {
            list.push(f);
        }
    };

    // Per component, the farthest point from the edge coset on each side.
    let mut far: HashMap<usize, [Option<(usize, usize)>; 2]> = HashMap::new();
    let mut side_counts = [0usize; 2];
    let mut probe_side: HashMap<usize, [Option<usize>; 2]> = HashMap::new();
    for &i in interior {
        let keys = &space.keys[i];
        let head: Vec<bool> = keys.iter().map(|k| on_head_side(e, k)).collect();
        let sides = [head.iter().any(|h| !h), head.iter().any(|&h| h)];
        let d = space.distance_to(i, &coset).unwrap_or(beyond);
        for s in 0..2 {
            if !sides[s] {
                continue;
            }
            side_counts[s] += 1;
            match comps.label[i] {
                None => {
                    out.r0 = out.r0.max(d);
                    if d > bound {
                        push(&mut out.bound_failures, Failure {
                            sample,
                            x0: space.name(i),
                            x1: String::new(),
                            reason: format!("lies in the translate of K at distance {d} from the edge coset"),
                        });
                    }
                }
                Some(c) => {
                    let slot = &mut far.entry(c).or_default()[s];
                    if slot.is_none_or(|(best, _)| d > best) {
                        *slot = Some((d, i));
                    }
                }
            }
        }
        for (k, &h) in keys.iter().zip(&head) {
            if key_distance(k, &e.tail).min(key_distance(k, &e.head)) <= r_probe {
                continue;
            }
            out.probe_points += 1;
            let s = usize::from(h);
            match comps.label[i] {
                None => push(&mut out.probe_failures, Failure {
                    sample,
                    x0: space.name(i),
                    x1: String::new(),
                    reason: "probe point lies in the translate of K".into(),
                }),
                Some(c) => {
                    let slot = probe_side.entry(c).or_default();
                    slot[s].get_or_insert(i);
                    if let [Some(a), Some(b)] = *slot {
                        if s == 1 && b == i || s == 0 && a == i {
                            push(&mut out.probe_failures, Failure {
                                sample,
                                x0: space.name(a),
                                x1: space.name(b),
                                reason: "probe points joined outside the translate of K".into(),
                            });
                        }
                    }
                }
            }
        }
    }
    out.pairs = side_counts[0] * side_counts[1];
    let mut components: Vec<_> = far.into_iter().collect();
    components.sort_unstable_by_key(|(c, _)| *c);
    for (_, sides) in components {
        if let [Some((d0, a)), Some((d1, b))] = sides {
            let m = d0.min(d1);
            out.r0 = out.r0.max(m);
            if m > bound {
                push(&mut out.bound_failures, Failure {
                    sample,
                    x0: space.name(a),
                    x1: space.name(b),
                    reason: format!("joined outside the translate of K at distances {d0}, {d1} from the edge coset"),
                });
            }
        }
    }
    out
}
