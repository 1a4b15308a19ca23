use proptest::prelude::*;

use stratavol::exact::int;
use stratavol::perm::{self, Perm};
use stratavol::ribbon::{self, PerimeterPair, Wall};
use stratavol::sts::SquareTiledSurface;

fn arb_perm(n: usize) -> impl Strategy<Value = Perm> {
    Just((0..n).collect::<Vec<_>>()).prop_shuffle()
}

fn arb_surface() -> impl Strategy<Value = SquareTiledSurface> {
    (1usize..=7)
        .prop_flat_map(|n| (arb_perm(n), arb_perm(n)))
        .prop_map(|(r, u)| SquareTiledSurface::new(r, u).unwrap())
}

fn conjugate(p: &[usize], by: &[usize]) -> Perm {
    perm::compose(by, &perm::compose(p, &perm::inverse(by)))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn cylinders_tile_the_surface(s in arb_surface()) {
        prop_assume!(s.is_connected());
        let cyl = s.cylinder_decomposition().unwrap();
        let area: usize = cyl.iter().map(|c| c.circumference * c.height).sum();
        prop_assert_eq!(area, s.squares());
    }

    #[test]
    fn surface_invariants_survive_relabelling(
        (s, by) in arb_surface().prop_flat_map(|s| { let n = s.squares(); (Just(s), arb_perm(n)) })
    ) {
        prop_assume!(s.is_connected());
        let t = SquareTiledSurface::new(conjugate(s.right(), &by), conjugate(s.up(), &by)).unwrap();
        prop_assert_eq!(s.genus(), t.genus());
        let mut a = s.cylinder_decomposition().unwrap();
        let mut b = t.cylinder_decomposition().unwrap();
        a.sort();
        b.sort();
        prop_assert_eq!(a, b);
    }

    #[test]
    fn canonical_form_ignores_relabelling(p in arb_perm(6), q in arb_perm(6), by in arb_perm(6)) {
        prop_assume!(perm::is_transitive(6, &[&p, &q]));
        let none: [&[usize]; 0] = [];
        let c1 = perm::canonical_form(&[&p, &q], &none).unwrap();
        let (p2, q2) = (conjugate(&p, &by), conjugate(&q, &by));
        let c2 = perm::canonical_form(&[&p2, &q2], &none).unwrap();
        prop_assert_eq!(c1.code, c2.code);
        prop_assert_eq!(c1.automorphisms, c2.automorphisms);
    }

    #[test]
    fn positive_tree_count_is_scale_invariant(case in 0usize..69, seed in 0u64..1000, c in 2i64..5) {
        let cases = ribbon::partition_wall_cases(4, 4);
        let (b, w) = &cases[case % cases.len()];
        let wall = Wall::partition(b, w).unwrap();
        let p = ribbon::wall_sample_point(&wall, seed).unwrap();
        let k = p.k();
        let l = p.l();
        let scaled = p.scale(&int(c));
        prop_assert_eq!(
            ribbon::count_positive_trees(k, l, &p).unwrap(),
            ribbon::count_positive_trees(k, l, &scaled).unwrap()
        );
        prop_assert_eq!(ribbon::cell_signature(&p), ribbon::cell_signature(&scaled));
    }

    #[test]
    fn positive_tree_count_is_constant_on_a_wall(case in 0usize..69, s1 in 0u64..1000, s2 in 0u64..1000) {
        let cases = ribbon::partition_wall_cases(4, 4);
        let (b, w) = &cases[case % cases.len()];
        prop_assert_eq!(ribbon::p0_oracle(b, w, s1).unwrap(), ribbon::p0_oracle(b, w, s2).unwrap());
    }

    #[test]
    fn colour_swap_preserves_positive_trees(case in 0usize..69, seed in 0u64..1000) {
        let cases = ribbon::partition_wall_cases(4, 4);
        let (b, w) = &cases[case % cases.len()];
        prop_assert_eq!(ribbon::p0_oracle(b, w, seed).unwrap(), ribbon::p0_oracle(w, b, seed).unwrap());
    }

    #[test]
    fn star_has_exactly_one_metric(l1 in 1i64..8, l2 in 1i64..8) {
        let p = PerimeterPair::from_ints(&[l1, l2], &[l1 + l2]);
        let family = ribbon::enumerate_graphs(0, 2, 1).unwrap();
        for (tree, _) in family.iter() {
            let n = ribbon::count_metrics(tree, &p).unwrap();
            prop_assert!(n <= 1);
        }
        prop_assert_eq!(ribbon::counting_function(0, 2, 1, &p).unwrap(), int(1));
    }
}

#[test]
fn one_face_graphs_satisfy_euler() {
    for (g, k, l) in [(0, 2, 3), (0, 3, 3), (1, 1, 1), (1, 2, 2), (1, 1, 3), (2, 1, 1)] {
        let family = ribbon::enumerate_graphs(g, k, l).unwrap();
        assert!(!family.is_empty(), "({g},{k},{l}) should be nonempty");
        for (graph, aut) in family.iter() {
            assert_eq!(graph.faces(), 1);
            assert_eq!(graph.genus(), Some(g));
            assert_eq!(graph.black_vertices() + graph.white_vertices(), k + l);
            assert_eq!(graph.edges() + 1, k + l + 2 * g as usize);
            assert!(*aut >= 1);
        }
    }
}
