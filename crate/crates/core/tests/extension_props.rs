mod common;

use proptest::prelude::*;

use pdd_core::extension::{
    ancestor_sets, canonical_extension, check_parents, exact_min_nsw, greedy_extension, topo_path_extension,
    validate_extension, width_report, TreeExtension,
};
use pdd_core::random::{random_instance, GammaStyle};
use pdd_core::{FoodWeb, Rational, SpeciesId};

use common::*;

fn web(seed: u64, n: usize, p: f64) -> FoodWeb {
    random_instance(seed, n, p, &GammaStyle::Alpha(Rational::one()))
        .unwrap()
        .web()
        .clone()
}

/// Minimum over every rooted tree on `0..n` that satisfies the ancestor
/// condition, by enumerating parent functions.
fn min_nsw_by_enumeration(web: &FoodWeb) -> usize {
    let n = web.len();
    let mut best = usize::MAX;
    let mut code = vec![0usize; n];
    loop {
        // code[v] == v marks the root; otherwise code[v] is the parent
        let roots = (0..n).filter(|&v| code[v] == v).count();
        if roots == 1 {
            let parent: Vec<Option<SpeciesId>> =
                (0..n).map(|v| (code[v] != v).then_some(SpeciesId(code[v]))).collect();
            if let Ok(t) = check_parents(web, parent) {
                best = best.min(max_ancestor_set(web, &t));
            }
        }
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            code[i] += 1;
            if code[i] < n {
                break;
            }
            code[i] = 0;
            i += 1;
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(150))]

    #[test]
    fn ancestor_sets_and_widths_match_definitions(seed in any::<u64>(), n in 1usize..11, p in 0.0f64..0.8) {
        let web = web(seed, n, p);
        for t in [topo_path_extension(&web), greedy_extension(&web)] {
            prop_assert!(is_extension(&web, &t));
            let anc = ancestor_sets(&web, &t);
            let report = width_report(&web, &t);
            for v in web.species() {
                let oracle = ancestor_set(&web, &t, v);
                let got: std::collections::BTreeSet<SpeciesId> = anc.members(v).iter().copied().collect();
                prop_assert_eq!(&got, &oracle);
                prop_assert_eq!(report.node[v.0], oracle.len());
                prop_assert_eq!(report.edge[v.0], edge_width(&web, &t, v));
                prop_assert!(report.node[v.0] <= report.edge[v.0]);
            }
            prop_assert_eq!(report.max_node, max_ancestor_set(&web, &t));
        }
    }

    #[test]
    fn every_topological_order_gives_a_valid_canonical_extension(seed in any::<u64>(), n in 1usize..10, p in 0.0f64..0.8, shuffle in any::<u64>()) {
        let web = web(seed, n, p);
        // a random topological order: repeatedly pick an available species
        let mut placed = vec![false; n];
        let mut order = Vec::new();
        let mut x = shuffle;
        while order.len() < n {
            let avail: Vec<SpeciesId> = web
                .species()
                .filter(|&v| !placed[v.0] && web.prey_of(v).iter().all(|(u, _)| placed[u.0]))
                .collect();
            x = x.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            let v = avail[(x >> 33) as usize % avail.len()];
            placed[v.0] = true;
            order.push(v);
        }
        let t = canonical_extension(&web, &order);
        prop_assert!(validate_extension(&web, &t).is_ok());
        prop_assert!(is_extension(&web, &t));
    }

    #[test]
    fn exact_is_at_most_heuristics(seed in any::<u64>(), n in 1usize..11, p in 0.0f64..0.8) {
        let web = web(seed, n, p);
        let (t, w) = exact_min_nsw(&web, 10).unwrap();
        prop_assert!(is_extension(&web, &t));
        prop_assert_eq!(w, max_ancestor_set(&web, &t));
        prop_assert!(w <= max_ancestor_set(&web, &topo_path_extension(&web)));
        prop_assert!(w <= max_ancestor_set(&web, &greedy_extension(&web)));
    }
}

#[test]
fn exact_matches_enumeration_of_all_extensions() {
    for seed in 0..60u64 {
        let n = 1 + (seed % 6) as usize;
        let web = web(seed, n, [0.3, 0.5, 0.8][(seed % 3) as usize]);
        let (_, w) = exact_min_nsw(&web, 10).unwrap();
        assert_eq!(w, min_nsw_by_enumeration(&web), "seed {seed} n {n}");
    }
}

#[test]
fn stars_and_chains() {
    // root with k prey: width k at the root's position
    for k in 1..6 {
        let names: Vec<String> = (0..=k).map(|i| format!("x{i}")).collect();
        let arcs: Vec<(String, String)> = (1..=k).map(|i| (names[i].clone(), names[0].clone())).collect();
        let web = FoodWeb::new(&names, &arcs).unwrap();
        assert_eq!(exact_min_nsw(&web, 10).unwrap().1, k);
        assert_eq!(min_nsw_by_enumeration(&web), k);
    }
    let chain = FoodWeb::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
    assert_eq!(exact_min_nsw(&chain, 10).unwrap().1, 1);
    let t = TreeExtension::path(&chain.topological_order());
    assert_eq!(width_report(&chain, &t).max_node, 1);
}
