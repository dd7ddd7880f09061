//! Property-based invariants over randomly drawn parameters: closed-form
//! construction counts, exact density formulas, solver round trips,
//! witness identities, complex surgery laws, balance-oracle agreement,
//! and sampler determinism.

use std::collections::BTreeSet;

use proptest::prelude::*;

use kttree::complexes::TComplex;
use kttree::constructions::{bc_tree, canonical_witness, star_tree, ConstructionId};
use kttree::density::{
    density_type1, density_type2, is_balanced, is_balanced_exhaustive, rooted_density,
    witness_counts, Balance,
};
use kttree::experiment::gnp;
use kttree::iso::rooted_isomorphic;
use kttree::planner::{plan_family, solve_type1, solve_type2};
use kttree::{choose2, q, Graph, Q, RootedGraph};

fn cases(n: u32) -> ProptestConfig {
    ProptestConfig { cases: n, ..ProptestConfig::default() }
}

proptest! {
    #![proptest_config(cases(64))]

    /// Spine trees have the advertised vertex, edge, root, and density
    /// counts for every admissible (a, b).
    #[test]
    fn bc_tree_closed_forms(a in 1i64..10, extra in 1i64..10) {
        let b = a + extra;
        let f = bc_tree(a, b).unwrap();
        prop_assert_eq!(f.unrooted().len() as i64, a);
        prop_assert_eq!(f.graph.edge_count() as i64, b);
        prop_assert_eq!(f.roots.len() as i64, b - a + 1);
        prop_assert_eq!(rooted_density(&f).unwrap(), q(b, a));
    }

    /// Star trees splice t leaves per spine vertex and keep density b/a.
    #[test]
    fn star_tree_closed_forms(t in 1i64..5, a in 1i64..5, extra in 0i64..5) {
        let b = (t * a).max(a + 1) + extra;
        let f = star_tree(t, a, b).unwrap();
        prop_assert_eq!(f.unrooted().len() as i64, a);
        prop_assert_eq!(rooted_density(&f).unwrap(), q(b, a));
    }

    /// Clique-tree densities: the closed forms equal the literal
    /// edge-over-vertex ratio of the built graph.
    #[test]
    fn type1_density_formula(t in 3i64..6, s_off in 0i64..3, a in 1i64..4, extra in 1i64..4) {
        let s = 1 + s_off % (t / 2);
        let b = a + extra;
        prop_assume!(density_type1(t, a, b, s).is_ok());
        let f = (ConstructionId::Type1 { t, a, b, s }).build().unwrap();
        prop_assert_eq!(rooted_density(&f).unwrap(), density_type1(t, a, b, s).unwrap());
    }

    #[test]
    fn type2_density_formula(t_half in 1i64..4, a_half in 1i64..4, extra in 0i64..6) {
        let (t, a) = (2 * t_half + 1, 2 * a_half);
        let b = 2 * a + 2 + extra;
        let f = (ConstructionId::Type2 { t, a, b }).build().unwrap();
        prop_assert_eq!(rooted_density(&f).unwrap(), density_type2(t, a, b).unwrap());
    }

    /// Solver round trips: any admissible rational is realized exactly.
    #[test]
    fn type1_solver_round_trip(t in 3i64..8, s_pick in 0i64..4, y in 2i64..12, k in 1i64..40) {
        let s = 1 + s_pick % (t / 2);
        let lo = if 2 * s < t { y * (t + s - 1) / 2 } else { y * (3 * t - 2) / 4 };
        let width = if 2 * s < t { y * s / 2 } else { 5 * y };
        prop_assume!(width >= 1);
        let x = lo + 1 + (k - 1) % width;
        let d = q(x, y);
        let (a, b) = solve_type1(t, s, d).unwrap();
        prop_assert!(0 < a && a < b);
        prop_assert_eq!(density_type1(t, a, b, s).unwrap(), d);
    }

    #[test]
    fn type2_solver_round_trip(t_half in 1i64..4, y in 2i64..10, k in 1i64..40) {
        let t = 2 * t_half + 1;
        let x = y * (t - 1) + k;
        let d = q(x, y);
        let (a, b) = solve_type2(t, d).unwrap();
        prop_assert!(a >= 2 && a % 2 == 0 && b >= 2 * a + 2);
        prop_assert_eq!(density_type2(t, a, b).unwrap(), d);
    }

    /// The witness of a clique tree has exactly the construction's
    /// vertex count, and its counts obey the type-vector identity.
    #[test]
    fn witness_matches_host(t in 3i64..5, a in 1i64..3, extra in 1i64..3, s in 1i64..2) {
        let b = a + extra;
        prop_assume!(density_type1(t, a, b, s).is_ok());
        let id = ConstructionId::Type1 { t, a, b, s };
        let host = id.build().unwrap();
        let w = canonical_witness(&id).unwrap();
        prop_assert!(w.validate(&host.graph).is_ok());
        let (v, _) = witness_counts(t, &w.type_vector());
        prop_assert_eq!(v as usize, host.graph.n());
    }

    /// Plans always hit the exact target density and only contain
    /// members at least that dense.
    #[test]
    fn plan_members_dense_enough(t in 2i64..6, y in 2i64..8, k in 1i64..30) {
        let x = y + 1 + (k - 1) % (t * y - y - 1).max(1);
        prop_assume!(x < t * y);
        let target = q(x, y);
        let plan = plan_family(t, target).unwrap();
        let d = Q::from_integer(choose2(t)) / (Q::from_integer(t) - target);
        prop_assert_eq!(plan.density, d);
        for m in &plan.members {
            prop_assert!(m.density >= d);
        }
    }
}

fn random_rooted(seed: u64, n: usize, p: f64, roots: usize) -> RootedGraph {
    let g = gnp(n, p, seed);
    RootedGraph::new(g, 0..roots.min(n.saturating_sub(1))).unwrap()
}

proptest! {
    #![proptest_config(cases(48))]

    /// The fast balance oracle agrees with blunt exhaustive enumeration.
    #[test]
    fn balance_oracles_agree(seed in 0u64..5000, n in 3usize..9, roots in 1usize..3) {
        let f = random_rooted(seed, n, 0.5, roots);
        prop_assume!(!f.unrooted().is_empty());
        let fast = is_balanced(&f, 22).unwrap();
        let slow = is_balanced_exhaustive(&f, 22).unwrap();
        match (fast, slow) {
            (Balance::Balanced, Balance::Balanced) => {}
            (Balance::Counterexample(_), Balance::Counterexample(_)) => {}
            (a, b) => prop_assert!(false, "oracles disagree: {a:?} vs {b:?}"),
        }
    }

    /// Rooted isomorphism is reflexive and respects vertex relabeling.
    #[test]
    fn rooted_iso_reflexive_and_relabels(seed in 0u64..5000, n in 2usize..8, shift in 1usize..7) {
        let f = random_rooted(seed, n, 0.5, 1);
        prop_assert!(rooted_isomorphic(&f, &f, false).unwrap());
        let perm: Vec<usize> = (0..n).map(|v| (v + shift) % n).collect();
        let g = Graph::with_edges(n, f.graph.edges().map(|(u, v)| (perm[u], perm[v]))).unwrap();
        let g = RootedGraph::new(g, f.roots.iter().map(|&r| perm[r])).unwrap();
        prop_assert!(rooted_isomorphic(&f, &g, false).unwrap());
    }

    /// Removing no vertices is the identity; removing everything leaves
    /// the empty complex; surgery never grows a level.
    #[test]
    fn remove_vertices_laws(seed in 0u64..5000, n in 4usize..8) {
        let g = gnp(n, 0.6, seed);
        let c = kttree::complexes::clique_complex(&g, 3);
        prop_assert_eq!(&c.remove_vertices(&BTreeSet::new()), &c);
        let all: BTreeSet<usize> = (0..n).collect();
        prop_assert_eq!(c.remove_vertices(&all).total_sets(), 0);
        let one: BTreeSet<usize> = [0].into();
        let r = c.remove_vertices(&one);
        for k in 1..3 {
            prop_assert!(r.level(k).len() <= c.level(k).len() + c.level(k + 1).len());
        }
        prop_assert!(r.level(3).len() <= c.level(3).len());
    }

    /// Pruning is idempotent and only shrinks the complex.
    #[test]
    fn prune_laws(seed in 0u64..5000, n in 5usize..9, th1 in 1u64..4, th2 in 1u64..3) {
        let g = gnp(n, 0.6, seed);
        let c = kttree::complexes::clique_complex(&g, 3);
        let f = move |k: usize| if k == 1 { th1 } else { th2 };
        let p = c.prune(f);
        prop_assert!(p.total_sets() <= c.total_sets());
        prop_assert_eq!(&p.prune(f), &p);
    }

    /// Inserting the closure of each top reproduces the complex.
    #[test]
    fn complex_rebuild_from_tops(seed in 0u64..5000, n in 4usize..8) {
        let g = gnp(n, 0.6, seed);
        let c = kttree::complexes::clique_complex(&g, 3).prune(|_| 1);
        let mut rebuilt = TComplex::new(3, n);
        for top in c.level(3) {
            rebuilt.insert_closed(top).unwrap();
        }
        prop_assert_eq!(&rebuilt, &c);
    }

    /// The random-graph sampler is a pure function of (n, p, seed).
    #[test]
    fn gnp_deterministic(seed in 0u64..100000, n in 1usize..30) {
        let a = gnp(n, 0.4, seed);
        let b = gnp(n, 0.4, seed);
        prop_assert_eq!(a.edges().collect::<Vec<_>>(), b.edges().collect::<Vec<_>>());
    }
}
