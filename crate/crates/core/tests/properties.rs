use amalgam_core::corpus::load;
use amalgam_core::gog::{elementary_collapse, is_non_elementary, spanning_tree, Elementarity};
use amalgam_core::{emit_presentation, parse_gog, AbelianInvariants, FundamentalGroup, GraphOfGroups};
use proptest::prelude::*;

mod common;

const ORDERS: [u32; 4] = [2, 3, 4, 6];

#[derive(Debug, Clone)]
enum EdgeKind {
    Trivial,
    /// Edge group the whole vertex group on both sides, `c -> g^k` at the head.
    Iso(u32),
    /// Edge group of order 2 into two even-order vertices.
    Half,
}

#[derive(Debug, Clone)]
struct Spec {
    orders: Vec<u32>,
    /// `(tail, head, kind)` with tail and head vertex indices.
    edges: Vec<(usize, usize, EdgeKind)>,
}

fn coprime(a: u32, b: u32) -> bool {
    (1..=a.min(b)).filter(|d| a % d == 0 && b % d == 0).max() == Some(1)
}

fn spec() -> impl Strategy<Value = Spec> {
    (2usize..6)
        .prop_flat_map(|n| {
            (
                prop::collection::vec(prop::sample::select(ORDERS.to_vec()), n),
                prop::collection::vec((any::<prop::sample::Index>(), 0u8..4, 1u32..6), n - 1),
                prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..2),
            )
        })
        .prop_map(|(mut orders, parents, extra)| {
            let mut edges = Vec::new();
            for (i, (p, kind, k)) in parents.into_iter().enumerate() {
                let (child, parent) = (i + 1, p.index(i + 1));
                let kind = match kind {
                    0 | 1 => {
                        orders[child] = orders[parent];
                        let k = (k..k + 6).find(|&k| coprime(k, orders[parent])).unwrap();
                        EdgeKind::Iso(k)
                    }
                    2 if orders[child] % 2 == 0 && orders[parent] % 2 == 0 => EdgeKind::Half,
                    _ => EdgeKind::Trivial,
                };
                edges.push((parent, child, kind));
            }
            let n = orders.len();
            for (a, b) in extra {
                edges.push((a.index(n), b.index(n), EdgeKind::Trivial));
            }
            Spec { orders, edges }
        })
}

/// DSL text with vertex `i` named `vnames[i]`, edge `j` named `enames[j]`,
/// declared in the given orders.
fn render(s: &Spec, vnames: &[String], enames: &[String], vorder: &[usize], eorder: &[usize]) -> String {
    let mut out = String::new();
    for o in ORDERS {
        out.push_str(&format!("group C{o} cyclic {o}\n"));
    }
    for &i in vorder {
        out.push_str(&format!("vertex {} C{} gens [g{i}]\n", vnames[i], s.orders[i]));
    }
    for &j in eorder {
        let (t, h, kind) = &s.edges[j];
        let (t, h) = (*t, *h);
        let body = match kind {
            EdgeKind::Trivial => "group trivial embed_fwd {} embed_bwd {}".to_string(),
            EdgeKind::Iso(k) => format!("group C{} gens [c] embed_fwd {{c:g{h}^{k}}} embed_bwd {{c:g{t}}}", s.orders[t]),
            EdgeKind::Half => format!(
                "group C2 gens [c] embed_fwd {{c:g{h}^{}}} embed_bwd {{c:g{t}^{}}}",
                s.orders[h] / 2,
                s.orders[t] / 2
            ),
        };
        out.push_str(&format!("edge {} {} -- {} {body}\n", enames[j], vnames[t], vnames[h]));
    }
    out
}

fn plain(s: &Spec) -> GraphOfGroups {
    let v: Vec<String> = (0..s.orders.len()).map(|i| format!("v{i}")).collect();
    let e: Vec<String> = (0..s.edges.len()).map(|j| format!("e{j}")).collect();
    let vo: Vec<usize> = (0..v.len()).collect();
    let eo: Vec<usize> = (0..e.len()).collect();
    parse_gog(&render(s, &v, &e, &vo, &eo)).unwrap()
}

fn abelianization(g: &GraphOfGroups) -> AbelianInvariants {
    emit_presentation(&FundamentalGroup::new(g.clone(), 0).unwrap()).abelianization()
}

fn shape(e: &Elementarity) -> String {
    match e {
        Elementarity::NonElementary => "non-elementary".into(),
        Elementarity::SimplyElementary(c) => format!("{c:?}"),
        Elementarity::ReducesTo { .. } => "reduces".into(),
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn collapse_preserves_abelianization(s in spec()) {
        let g = plain(&s);
        let before = abelianization(&g);
        let mut collapsed = 0;
        for y in g.oriented_edges() {
            if g.is_loop(y) || !g.is_isomorphism(y) {
                continue;
            }
            let h = elementary_collapse(&g, y).unwrap();
            prop_assert_eq!(h.num_edges() + 1, g.num_edges());
            prop_assert_eq!(abelianization(&h), before.clone());
            collapsed += 1;
        }
        prop_assume!(collapsed > 0);
    }

    #[test]
    fn elementarity_ignores_names(s in spec(), perms in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 20)) {
        let g = plain(&s);
        let base = is_non_elementary(&g);
        let (n, m) = (s.orders.len(), s.edges.len());
        for (a, b) in perms {
            let mut vorder: Vec<usize> = (0..n).collect();
            vorder.rotate_left(a.index(n));
            let mut eorder: Vec<usize> = (0..m).collect();
            if m > 0 {
                eorder.rotate_left(b.index(m));
                eorder.reverse();
            }
            let vnames: Vec<String> = (0..n).map(|i| format!("x{}", (i * 7 + a.index(97)) % 101)).collect();
            let enames: Vec<String> = (0..m).map(|j| format!("y{}", (j * 5 + b.index(89)) % 97)).collect();
            let renamed = parse_gog(&render(&s, &vnames, &enames, &(0..n).collect::<Vec<_>>(), &(0..m).collect::<Vec<_>>())).unwrap();
            let got = is_non_elementary(&renamed);
            match (&base, &got) {
                (Elementarity::ReducesTo { case, collapses }, Elementarity::ReducesTo { case: c2, collapses: k2 }) => {
                    prop_assert_eq!(case, c2);
                    let back: Vec<String> = k2
                        .iter()
                        .map(|l| {
                            let (name, prime) = l.strip_suffix('\'').map_or((l.as_str(), ""), |n| (n, "'"));
                            let j = enames.iter().position(|e| e == name).unwrap();
                            format!("e{j}{prime}")
                        })
                        .collect();
                    prop_assert_eq!(collapses, &back);
                }
                _ => prop_assert_eq!(&base, &got),
            }
            let shuffled = parse_gog(&render(&s, &vnames, &enames, &vorder, &eorder)).unwrap();
            prop_assert_eq!(base.is_non_elementary(), is_non_elementary(&shuffled).is_non_elementary());
            if !matches!(base, Elementarity::ReducesTo { .. }) {
                prop_assert_eq!(shape(&base), shape(&is_non_elementary(&shuffled)));
            }
        }
    }

    #[test]
    fn normal_forms_agree_with_rewriting(pick in 0usize..4,
        u in prop::collection::vec(0usize..4, 0..12),
        v in prop::collection::vec(0usize..4, 0..12),
        inserts in prop::collection::vec((any::<prop::sample::Index>(), any::<prop::sample::Index>()), 0..6)) {
        let (name, oracle) = common::corpus_oracles().swap_remove(pick);
        let f = FundamentalGroup::new(load(name), 0).unwrap();
        let s = f.symmetric_generating_set();
        let k = oracle.letters.len();
        let eval = |w: &[usize]| w.iter().fold(f.identity(), |acc, &i| f.multiply(&acc, &s.elements[i]));
        let (u, v): (Vec<usize>, Vec<usize>) = (u.iter().map(|i| i % k).collect(), v.iter().map(|i| i % k).collect());
        prop_assert_eq!(eval(&u) == eval(&v), oracle.reduce(&u) == oracle.reduce(&v));
        let trivial = oracle.trivial_words();
        let mut w = u.clone();
        for (at, which) in inserts {
            let pos = at.index(w.len() + 1);
            let t = &trivial[which.index(trivial.len())];
            w.splice(pos..pos, t.iter().copied());
        }
        prop_assert_eq!(oracle.reduce(&w), oracle.reduce(&u));
        prop_assert_eq!(eval(&w), eval(&u));
    }
}

#[test]
fn spanning_trees_are_deterministic() {
    for (name, text) in amalgam_core::corpus::ENTRIES {
        let (a, b) = (parse_gog(text).unwrap(), parse_gog(text).unwrap());
        assert_eq!(spanning_tree(&a, 0).unwrap(), spanning_tree(&b, 0).unwrap(), "{name}");
    }
}

#[test]
fn abelianizations_of_the_corpus() {
    let free = |rank: usize, torsion: &[u64]| AbelianInvariants { rank, torsion: torsion.to_vec() };
    let want = [
        ("trivial", free(0, &[])),
        ("dinf", free(0, &[2, 2])),
        ("z2z3", free(0, &[6])),
        ("f2", free(2, &[])),
        ("loop", free(1, &[])),
        ("z2", free(2, &[])),
        ("z2z2", free(4, &[])),
        ("zz2", free(1, &[2])),
        ("sl2z", free(0, &[12])),
        ("z2xz", free(1, &[2])),
        ("dinf3", free(0, &[2, 2])),
    ];
    for (name, inv) in want {
        assert_eq!(abelianization(&load(name)), inv, "{name}");
    }
}
