//! Oracles and generators shared by the integration tests. Everything here
//! is recomputed from the definitions without the library's helpers.

#![allow(dead_code)]

use std::collections::BTreeSet;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use pdd_core::extension::TreeExtension;
use pdd_core::random::{random_instance, GammaStyle};
use pdd_core::reduction::{CdsInstance, CdsSolution};
use pdd_core::{FoodWeb, PddInstance, Rational, SpeciesId, SpeciesSet};

pub struct Case {
    pub seed: u64,
    pub n: usize,
    pub p: f64,
    pub style: GammaStyle,
    pub inst: PddInstance,
}

/// The shared random corpus: sizes 1..=10, arc probabilities 0.2/0.4/0.6,
/// alpha-style and small-denominator weights.
pub fn corpus(count: usize) -> Vec<Case> {
    let alphas = [Rational::new(1, 2), Rational::new(1, 3), Rational::new(2, 3), Rational::one()];
    (0..count)
        .map(|i| {
            let n = 1 + i % 10;
            let p = [0.2, 0.4, 0.6][(i / 10) % 3];
            let style = if (i / 30) % 2 == 0 {
                GammaStyle::Alpha(alphas[(i / 60) % 4].clone())
            } else {
                GammaStyle::SmallDenominator(2 + ((i / 60) % 5) as u32)
            };
            let seed = 1000 + i as u64;
            let inst = random_instance(seed, n, p, &style).unwrap();
            Case { seed, n, p, style, inst }
        })
        .collect()
}

pub fn parent_chain(t: &TreeExtension, v: SpeciesId) -> Vec<SpeciesId> {
    let mut out = Vec::new();
    let mut cur = t.parent(v);
    while let Some(p) = cur {
        out.push(p);
        cur = t.parent(p);
    }
    out
}

/// Proper ancestors of `v` by walking parent pointers.
pub fn proper_ancestors(t: &TreeExtension, v: SpeciesId) -> BTreeSet<SpeciesId> {
    parent_chain(t, v).into_iter().collect()
}

/// `v` and everything below it.
pub fn subtree(t: &TreeExtension, v: SpeciesId) -> BTreeSet<SpeciesId> {
    (0..t.len())
        .map(SpeciesId)
        .filter(|&w| w == v || parent_chain(t, w).contains(&v))
        .collect()
}

/// `A_v`: proper ancestors of `v` with an arc into the subtree of `v`.
pub fn ancestor_set(web: &FoodWeb, t: &TreeExtension, v: SpeciesId) -> BTreeSet<SpeciesId> {
    let anc = proper_ancestors(t, v);
    let sub = subtree(t, v);
    web.arcs()
        .iter()
        .filter(|a| anc.contains(&a.prey) && sub.contains(&a.predator))
        .map(|a| a.prey)
        .collect()
}

/// Arcs from a proper ancestor of `v` into the subtree of `v`.
pub fn edge_width(web: &FoodWeb, t: &TreeExtension, v: SpeciesId) -> usize {
    let anc = proper_ancestors(t, v);
    let sub = subtree(t, v);
    web.arcs()
        .iter()
        .filter(|a| anc.contains(&a.prey) && sub.contains(&a.predator))
        .count()
}

pub fn max_ancestor_set(web: &FoodWeb, t: &TreeExtension) -> usize {
    web.species().map(|v| ancestor_set(web, t, v).len()).max().unwrap_or(0)
}

/// Every arc tail is a proper ancestor of its head.
pub fn is_extension(web: &FoodWeb, t: &TreeExtension) -> bool {
    t.len() == web.len()
        && web
            .arcs()
            .iter()
            .all(|a| proper_ancestors(t, a.predator).contains(&a.prey))
}

/// Viability by summing the incoming weights arc by arc.
pub fn viable_by_sum(inst: &PddInstance, s: &SpeciesSet) -> bool {
    let web = inst.web();
    s.iter().all(|v| {
        let arcs: Vec<usize> = (0..web.arcs().len()).filter(|&i| web.arcs()[i].predator == v).collect();
        if arcs.is_empty() {
            return true;
        }
        let got = arcs
            .iter()
            .filter(|&&i| s.contains(web.arcs()[i].prey))
            .fold(Rational::zero(), |acc, &i| acc + inst.gamma(i).clone());
        got >= Rational::one()
    })
}

/// ½-PDD viability by counting: every non-source member has at least half
/// of its prey selected.
pub fn viable_by_half_count(web: &FoodWeb, s: &SpeciesSet) -> bool {
    s.iter().all(|v| {
        let prey: Vec<SpeciesId> = web.arcs().iter().filter(|a| a.predator == v).map(|a| a.prey).collect();
        prey.is_empty() || 2 * prey.iter().filter(|&&u| s.contains(u)).count() >= prey.len()
    })
}

pub fn total_diversity(inst: &PddInstance, s: &SpeciesSet) -> u64 {
    s.iter().map(|v| inst.diversities()[v.0]).sum()
}

/// Every lex-smallest-first exhaustive optimum, recomputed independently.
pub fn brute_optimum(inst: &PddInstance) -> u64 {
    let n = inst.len();
    let b = inst.budget().min(n as u64) as u32;
    (0u32..1 << n)
        .filter(|m| m.count_ones() <= b)
        .map(|m| SpeciesSet::from_ids(n, (0..n).filter(|i| m >> i & 1 == 1).map(SpeciesId)))
        .filter(|s| viable_by_sum(inst, s))
        .map(|s| total_diversity(inst, &s))
        .max()
        .unwrap()
}

/// Checks `(S, f)` against the CDS definition directly.
pub fn cds_valid(cds: &CdsInstance, sol: &CdsSolution) -> bool {
    let n = cds.len();
    let s: BTreeSet<usize> = sol.dominating.iter().copied().collect();
    if s.len() != sol.dominating.len() || s.len() as u64 > cds.k() || s.iter().any(|&v| v >= n) {
        return false;
    }
    let adjacent = |u: usize, v: usize| cds.edges().iter().any(|&(a, b)| (a, b) == (u, v) || (a, b) == (v, u));
    for v in 0..n {
        let f = sol.assignment.get(&v);
        match (s.contains(&v), f) {
            (true, None) => {}
            (false, Some(&u)) if s.contains(&u) && adjacent(u, v) => {}
            _ => return false,
        }
    }
    s.iter().all(|&u| sol.assignment.values().filter(|&&x| x == u).count() as u64 <= cds.capacity(u))
}

/// A random CDS instance: `n` vertices, each edge with probability `p`,
/// capacities in `0..=deg + 2`, `k` in `0..=n`.
pub fn random_cds(seed: u64, n: usize, p: f64) -> CdsInstance {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                edges.push((u, v));
            }
        }
    }
    let deg = |v: usize| edges.iter().filter(|&&(a, b)| a == v || b == v).count() as u64;
    let capacity: Vec<u64> = (0..n).map(|v| rng.gen_range(0..=deg(v) + 2)).collect();
    let k = rng.gen_range(0..=n as u64);
    let names = (0..n).map(|i| format!("x{i}")).collect();
    CdsInstance::from_indexed(names, edges, capacity, k).unwrap()
}

/// `(2B − 1)(ℓ + max(0, r − δ)) + (2M − 1)(r − ℓ) + max(0, δ − r) + 1`,
/// in signed arithmetic.
pub fn quota_formula(delta: i64, ell: i64, r: i64, m: i64, b: i64) -> i64 {
    (2 * b - 1) * (ell + (r - delta).max(0)) + (2 * m - 1) * (r - ell) + (delta - r).max(0) + 1
}
