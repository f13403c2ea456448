use super::*;
use crate::bass_serre::{identity_edge, phi, phi_random, TreeEdge, DEFAULT_STAR_RADIUS};
use crate::corpus::load;
use crate::fundgroup::DEFAULT_BUDGET;
use crate::groups::Elem;
use proptest::prelude::*;

fn fg(name: &str) -> FundamentalGroup {
    FundamentalGroup::new(load(name), 0).unwrap()
}

fn approx(f: &FundamentalGroup, d: usize) -> BoundaryApprox {
    boundary_approx(f, d, DEFAULT_STAR_RADIUS, DEFAULT_BUDGET).unwrap()
}

/// Paths of length `d` in a tree where a vertex of type `v` has `degree[v]`
/// neighbours and types alternate along edges.
fn alternating_path_count(degree: [usize; 2], root: usize, d: usize) -> usize {
    fn go(degree: [usize; 2], v: usize, left: usize, first: bool) -> usize {
        if left == 0 {
            return 1;
        }
        let out = if first { degree[v] } else { degree[v] - 1 };
        out * go(degree, 1 - v, left - 1, false)
    }
    go(degree, root, d, true)
}

#[test]
fn dihedral_has_two_branches() {
    let f = fg("dinf");
    for d in 1..=8 {
        let b = approx(&f, d);
        assert_eq!(b.len(), 2);
        assert_eq!(b.distance(0, 1), 1.0);
    }
}

#[test]
fn free_product_branch_count() {
    let f = fg("z2z3");
    for d in 1..=6 {
        assert_eq!(approx(&f, d).len(), alternating_path_count([2, 3], 0, d), "d={d}");
    }
}

#[test]
fn no_edges_means_empty_boundary() {
    let b = approx(&fg("trivial"), 3);
    assert!(b.is_empty());
    assert!(!cantor_check(&fg("trivial"), &b).unwrap().pass);
}

#[test]
fn cantor_verdicts() {
    let f = fg("z2z3");
    for d in 5..=7 {
        assert!(cantor_check(&f, &approx(&f, d)).unwrap().pass, "d={d}");
    }
    let f = fg("f2");
    assert!(cantor_check(&f, &approx(&f, 5)).unwrap().pass);
    let f = fg("dinf");
    let v = cantor_check(&f, &approx(&f, 6)).unwrap();
    assert!(!v.pass);
    assert!(!v.windowed_branching);
    assert!(v.no_dead_ends && v.basis_separates);
    assert!(matches!(cantor_check(&f, &approx(&f, 2)), Err(BoundaryError::DepthTooSmall { .. })));
}

#[test]
fn branches_are_immersed_and_canonical() {
    let f = fg("sl2z");
    let b = approx(&f, 5);
    for x in 0..b.len() {
        let key = b.key(x);
        for i in 0..=key.len() {
            let v = TreeVertex::from_key(&f, key[..i].to_vec());
            assert_eq!(v.translate(&f, &f.identity()).key, key[..i].to_vec());
        }
        for i in 0..key.len().saturating_sub(1) {
            let (a, c) = (TreeVertex::from_key(&f, key[..i].to_vec()), TreeVertex::from_key(&f, key[..i + 2].to_vec()));
            assert_ne!(a, c);
        }
    }
}

#[test]
fn basis_sets_partition_each_level() {
    let f = fg("zz2");
    let b = approx(&f, 4);
    for k in 0..=4 {
        let mut covered = vec![0; b.len()];
        for i in (0..b.tree.len()).filter(|&i| b.tree.depth(i) == k) {
            for x in b.basis_set(i) {
                covered[x] += 1;
            }
        }
        assert!(covered.iter().all(|&c| c == 1), "level {k}");
    }
}

#[test]
fn refinement_projects_onto_shallower_boundary() {
    for name in ["z2z3", "sl2z", "z2z2"] {
        let f = fg(name);
        let (coarse, fine) = (approx(&f, 3), approx(&f, 4));
        let mut hit = vec![false; coarse.len()];
        for x in 0..fine.len() {
            let node = coarse.tree.node(&fine.key(x)[..3]).unwrap();
            let y = coarse.basis_set(node).start;
            hit[y] = true;
        }
        assert!(hit.iter().all(|&h| h), "{name}");
    }
}

#[test]
fn visual_metric_is_an_ultrametric() {
    let f = fg("zz2");
    let b = approx(&f, 5);
    let n = b.len();
    for i in (0..n).step_by(7) {
        for j in (0..n).step_by(11) {
            for k in (0..n).step_by(13) {
                assert!(b.distance(i, k) <= b.distance(i, j).max(b.distance(j, k)));
            }
        }
    }
}

#[test]
fn distinct_branches_part_below_their_split() {
    let f = fg("z2z3");
    let b = approx(&f, 6);
    for x in 0..b.len() {
        for y in x + 1..b.len() {
            let s = b.split(x, y);
            assert!(b.distance(x, y) >= 0.5f64.powi(6));
            assert_ne!(b.ancestor(x, s + 1), b.ancestor(y, s + 1));
        }
    }
}

#[test]
fn finite_vertex_groups_have_empty_limit_sets() {
    let f = fg("z2z3");
    let b = approx(&f, 4);
    assert!(limit_set_approx(&b, &b.tree.nodes[0].vertex).directions.is_empty());
    assert!(limit_set_family(&b).is_empty());
}

#[test]
fn root_limit_set_avoids_the_other_factor() {
    let f = fg("z2z2");
    let b = approx(&f, 4);
    let root = limit_set_approx(&b, &b.tree.nodes[0].vertex);
    assert!(!root.directions.is_empty());
    let e = identity_edge(&f, 0);
    let across = b.basis_set(b.tree.node(&e.head).unwrap());
    assert!(root.directions.iter().all(|x| !across.contains(x)));
}

#[test]
fn limit_sets_refine_coherently() {
    let f = fg("z2z2");
    let (coarse, fine) = (approx(&f, 3), approx(&f, 4));
    for i in (0..coarse.tree.len()).filter(|&i| coarse.tree.depth(i) < 3) {
        let c = &coarse.tree.nodes[i].vertex;
        let small = limit_set_approx(&coarse, c);
        for x in limit_set_approx(&fine, c).directions {
            let node = coarse.tree.node(&fine.key(x)[..3]).unwrap();
            assert!(small.directions.contains(&coarse.basis_set(node).start));
        }
    }
}

#[test]
fn limit_sets_are_translation_invariant() {
    let f = fg("z2z2");
    let b = approx(&f, 4);
    let tree = &b.tree;
    let at_depth = |k: usize| (0..tree.len()).filter(move |&i| tree.depth(i) == k);
    let c = b.tree.nodes[at_depth(2).next().unwrap()].vertex.clone();
    let suffixes = |v: &TreeVertex| -> Vec<PathKey> {
        let mut s: Vec<PathKey> = limit_set_approx(&b, v).directions.iter().map(|&x| b.key(x)[v.depth()..].to_vec()).collect();
        s.sort_by_key(|k| format!("{k:?}"));
        s
    };
    let mine = suffixes(&c);
    assert!(!mine.is_empty());
    let mut compared = 0;
    for j in at_depth(2).step_by(37).take(20) {
        let other = b.tree.nodes[j].vertex.clone();
        if other.vertex_type != c.vertex_type {
            continue;
        }
        let gamma = f.multiply(&other.rep(&f), &f.invert(&c.rep(&f)));
        let theirs = suffixes(&other);
        for s in &mine {
            let mut first = c.key.clone();
            first.push(s[0].clone());
            let image = TreeVertex::from_key(&f, first).translate(&f, &gamma);
            let mut expected = other.key.clone();
            expected.push(s[0].clone());
            if image.key == expected {
                assert!(theirs.contains(s));
                compared += 1;
            }
        }
    }
    assert!(compared > 0);
}

#[test]
fn dense_amalgam_conditions_for_two_planes() {
    let f = fg("z2z2");
    let b = approx(&f, 5);
    let family = limit_set_family(&b);
    let cert = amalgam_check(&f, &b, &family, 200, 7).unwrap();
    assert!(cert.pass(), "{cert:?}");
    assert!(cert.members > 0);
    for &(k, diam) in &cert.max_diameter_by_distance {
        assert!(diam <= 2f64.powi(1 - k as i32));
    }
    assert!(cert.max_diameter_by_distance.windows(2).all(|w| w[1].1 <= w[0].1));
    assert_eq!(branch_density_check(&f, &b, &family).unwrap().0, Verdict::Pass);
}

#[test]
fn overlapping_members_fail_disjointness() {
    let f = fg("z2z2");
    let b = approx(&f, 4);
    let mut family = limit_set_family(&b);
    let mut clone = family[0].clone();
    clone.coset = family[1].coset.clone();
    family.push(clone);
    let cert = amalgam_check(&f, &b, &family, 20, 1).unwrap();
    let a1 = &cert.conditions[0];
    assert_eq!(a1.condition, "a1");
    assert!(!a1.pass);
    assert!(!a1.witnesses.is_empty());
}

#[test]
fn finite_factors_pass_vacuously() {
    let f = fg("z2z3");
    let b = approx(&f, 5);
    let family = limit_set_family(&b);
    let cert = amalgam_check(&f, &b, &family, 20, 1).unwrap();
    assert!(cert.pass());
    assert_eq!(cert.members, 0);
    assert!(cantor_check(&f, &b).unwrap().pass);
    assert_eq!(branch_density_check(&f, &b, &family).unwrap().0, Verdict::Pass);
}

#[test]
fn density_without_edges_is_not_applicable() {
    let f = fg("z2");
    let b = approx(&f, 4);
    assert_eq!(branch_density_check(&f, &b, &[]).unwrap().0, Verdict::NotApplicable);
}

#[test]
fn amalgam_check_needs_depth() {
    let f = fg("z2z2");
    let b = approx(&f, 3);
    assert!(matches!(amalgam_check(&f, &b, &[], 1, 0), Err(BoundaryError::DepthTooSmall { required: 4, .. })));
}

fn along_branch(f: &FundamentalGroup, key: &[(Elem, usize)], random: Option<u64>) -> Vec<NormalForm> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(random.unwrap_or(0));
    (1..=key.len())
        .map(|n| {
            let e = TreeEdge::to_child(&key[..n]);
            if random.is_some() {
                phi_random(f, &e, &mut rng)
            } else {
                phi(f, &e)
            }
        })
        .collect()
}

#[test]
fn classify_examples() {
    let f = fg("z2z2");
    let gamma = f.multiply(&f.vertex_element(1, &Elem::Abelian(vec![3, -1])), &f.vertex_element(0, &Elem::Abelian(vec![0, 2])));
    let coset: Vec<NormalForm> = (0..12).map(|k| f.multiply(&gamma, &f.vertex_element(1, &Elem::Abelian(vec![k, 2 * k - 5])))).collect();
    match classify_direction(&f, &coset, 1) {
        DirectionClass::VertexPoint { coset: c } => assert_eq!(c, TreeVertex::of(&f, &gamma, 1)),
        other => panic!("{other:?}"),
    }

    let g = fg("z2z3");
    let b = approx(&g, 10);
    let key = b.key(b.len() / 3).clone();
    for random in [None, Some(5)] {
        match classify_direction(&g, &along_branch(&g, &key, random), 1) {
            DirectionClass::BranchPoint { prefix } => {
                assert!(key.starts_with(&prefix));
                assert!(prefix.len() >= 6);
            }
            other => panic!("{other:?}"),
        }
    }

    let other = b.key(2 * b.len() / 3).clone();
    let (xs, ys) = (along_branch(&g, &key, None), along_branch(&g, &other, None));
    let mixed: Vec<NormalForm> = xs.into_iter().zip(ys).flat_map(|(x, y)| [x, y]).collect();
    assert_eq!(classify_direction(&g, &mixed, 1), DirectionClass::Inconclusive);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn backend_coset_sequences_are_vertex_points(a in -3i64..4, b in -3i64..4, steps in prop::collection::vec((-6i64..7, -6i64..7), 3..10)) {
        let f = fg("z2z2");
        let gamma = f.vertex_element(1, &Elem::Abelian(vec![a, b]));
        let gamma = f.multiply(&f.vertex_element(0, &Elem::Abelian(vec![1, 0])), &gamma);
        let xs: Vec<NormalForm> = steps.iter().map(|&(p, q)| f.multiply(&gamma, &f.vertex_element(0, &Elem::Abelian(vec![p, q])))).collect();
        let is_vertex = matches!(classify_direction(&f, &xs, 1), DirectionClass::VertexPoint { .. });
        prop_assert!(is_vertex);
    }

    #[test]
    fn branch_sequences_are_branch_points(pick in 0usize..1000, seed in 0u64..50) {
        let f = fg("zz2");
        let b = approx(&f, 9);
        let key = b.key(pick % b.len()).clone();
        let c1 = classify_direction(&f, &along_branch(&f, &key, None), 1);
        let c2 = classify_direction(&f, &along_branch(&f, &key, Some(seed)), 1);
        for c in [c1, c2] {
            match c {
                DirectionClass::BranchPoint { prefix } => prop_assert!(key.starts_with(&prefix)),
                other => prop_assert!(false, "{:?}", other),
            }
        }
    }
}
