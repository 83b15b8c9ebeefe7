mod common;

use proptest::prelude::*;

use pdd_core::brute::solve_bruteforce;
use pdd_core::dp::{fill_tables, solve_dp, DpOptions};
use pdd_core::extension::{build_extension, Strategy as ExtStrategy};
use pdd_core::random::{random_instance, GammaStyle};
use pdd_core::{PddInstance, Rational, Score, SpeciesId, SpeciesSet};

use common::*;

fn instance() -> impl Strategy<Value = PddInstance> {
    let style = prop_oneof![
        Just(GammaStyle::Alpha(Rational::new(1, 2))),
        Just(GammaStyle::Alpha(Rational::new(1, 3))),
        (1u32..6).prop_map(GammaStyle::SmallDenominator),
    ];
    (any::<u64>(), 1usize..10, 0.1f64..0.7, style).prop_map(|(seed, n, p, s)| random_instance(seed, n, p, &s).unwrap())
}

/// `S[v, A', ℓ]` from the definition: the best `ℓ`-subset `Y` of the
/// subtree of `v` such that every non-source member of `Y` is fed by
/// `Y ∪ A'`.
fn compatible_oracle(inst: &PddInstance, zone: &[SpeciesId], helpers: &SpeciesSet, ell: usize) -> Score {
    let n = inst.len();
    let mut best = Score::NegInf;
    for mask in 0u32..1 << zone.len() {
        if mask.count_ones() as usize != ell {
            continue;
        }
        let y = SpeciesSet::from_ids(n, (0..zone.len()).filter(|i| mask >> i & 1 == 1).map(|i| zone[i]));
        let mut fed = y.clone();
        fed.union_with(helpers);
        let ok = y.iter().all(|v| {
            let web = inst.web();
            if web.is_source(v) {
                return true;
            }
            let got = web
                .arcs()
                .iter()
                .enumerate()
                .filter(|(_, a)| a.predator == v && fed.contains(a.prey))
                .fold(Rational::zero(), |acc, (i, _)| acc + inst.gamma(i).clone());
            got >= Rational::one()
        });
        if ok {
            best = best.max(Score::Finite(total_diversity(inst, &y) as i64));
        }
    }
    best
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(120))]

    #[test]
    fn dp_equals_brute_force(inst in instance(), threads in 1usize..4) {
        let brute = solve_bruteforce(&inst).unwrap();
        for s in ExtStrategy::ALL {
            let t = build_extension(inst.web(), s, 10).unwrap();
            let r = solve_dp(&inst, &t, &DpOptions { threads }).unwrap();
            prop_assert_eq!(r.optimum, brute.optimum);
            prop_assert_eq!(r.decision, brute.decision);
            let w = r.witness.unwrap();
            prop_assert!(viable_by_sum(&inst, &w));
            prop_assert!(w.len() as u64 <= inst.budget());
            prop_assert_eq!(Score::Finite(total_diversity(&inst, &w) as i64), r.optimum);
        }
    }

    #[test]
    fn table_entries_match_the_definition(inst in instance(), pick in any::<u64>()) {
        let t = build_extension(inst.web(), ExtStrategy::Greedy, 10).unwrap();
        let tables = fill_tables(&inst, &t, &DpOptions::default()).unwrap();
        let n = inst.len();
        let web = inst.web();
        let v = SpeciesId(pick as usize % n);
        let anc: Vec<SpeciesId> = ancestor_set(web, &t, v).into_iter().collect();
        let zone: Vec<SpeciesId> = subtree(&t, v).into_iter().collect();
        let cap = tables.budget().min(zone.len());
        for mask in 0u32..1 << anc.len() {
            let helpers = SpeciesSet::from_ids(n, (0..anc.len()).filter(|i| mask >> i & 1 == 1).map(|i| anc[i]));
            for ell in 0..=cap {
                let got = tables.entry(v, &helpers, ell).unwrap();
                prop_assert_eq!(got, compatible_oracle(&inst, &zone, &helpers, ell), "v {:?} A' {:?} l {}", v, helpers, ell);
            }
        }
    }
}

#[test]
fn budget_above_n_is_clamped() {
    let inst = random_instance(3, 6, 0.4, &GammaStyle::Alpha(Rational::new(1, 2))).unwrap();
    let big = inst.clone().with_budget_target(100, 0);
    let t = build_extension(big.web(), ExtStrategy::Topo, 10).unwrap();
    let r = solve_dp(&big, &t, &DpOptions::default()).unwrap();
    assert_eq!(r.optimum, solve_bruteforce(&big).unwrap().optimum);
    assert_eq!(r.stats.budget, 6);
}
