//! Exhaustive oracles over species subsets.

use std::cmp::Ordering;
use std::time::Instant;

use crate::dp::SolveError;
use crate::foodweb::{diversity, is_viable, PddInstance, SpeciesId};
use crate::solution::{Score, SolveResult, SolveStats};
use crate::species_set::SpeciesSet;

pub const BRUTE_FORCE_LIMIT: usize = 22;
pub const ENUMERATE_LIMIT: usize = 16;

/// Calls `visit` on every subset of `0..n` of size `k`, in lexicographic
/// order of the ascending member lists.
fn for_each_combination(n: usize, k: usize, mut visit: impl FnMut(&[usize])) {
    if k > n {
        return;
    }
    let mut idx: Vec<usize> = (0..k).collect();
    loop {
        visit(&idx);
        // advance the rightmost index that can still move
        let Some(i) = (0..k).rev().find(|&i| idx[i] < n - k + i) else {
            return;
        };
        idx[i] += 1;
        for j in i + 1..k {
            idx[j] = idx[j - 1] + 1;
        }
    }
}

/// Maximum diversity over all viable sets of size at most `B`; the witness
/// is the lexicographically smallest optimum.
pub fn solve_bruteforce(inst: &PddInstance) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let n = inst.len();
    if n > BRUTE_FORCE_LIMIT {
        return Err(SolveError::TooLarge {
            n,
            limit: BRUTE_FORCE_LIMIT,
        });
    }
    let budget = inst.budget().min(n as u64) as usize;
    let mut best: Option<(i64, SpeciesSet)> = None;
    let mut checked = 0u64;
    for k in 0..=budget {
        for_each_combination(n, k, |idx| {
            checked += 1;
            let set = SpeciesSet::from_ids(n, idx.iter().map(|&i| SpeciesId(i)));
            if !is_viable(inst, &set) {
                return;
            }
            let d = diversity(inst, &set);
            let better = match &best {
                None => true,
                Some((bd, bs)) => d > *bd || (d == *bd && set.lex_cmp(bs) == Ordering::Less),
            };
            if better {
                best = Some((d, set));
            }
        });
    }
    let (opt, witness) = best.expect("the empty set is always viable");
    Ok(SolveResult {
        optimum: Score::Finite(opt),
        decision: opt as u64 >= inst.target(),
        witness: Some(witness),
        stats: SolveStats {
            budget,
            subsets_checked: checked,
            elapsed: start.elapsed(),
            ..Default::default()
        },
    })
}

/// All viable sets of size at most `max_size`, lexicographically ordered.
pub fn enumerate_viable(inst: &PddInstance, max_size: usize) -> Result<Vec<SpeciesSet>, SolveError> {
    let n = inst.len();
    if n > ENUMERATE_LIMIT {
        return Err(SolveError::TooLarge {
            n,
            limit: ENUMERATE_LIMIT,
        });
    }
    let mut out = Vec::new();
    for k in 0..=max_size.min(n) {
        for_each_combination(n, k, |idx| {
            let set = SpeciesSet::from_ids(n, idx.iter().map(|&i| SpeciesId(i)));
            if is_viable(inst, &set) {
                out.push(set);
            }
        });
    }
    out.sort_by(|a, b| a.lex_cmp(b));
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::foodweb::fixtures::w1;
    use crate::foodweb::FoodWeb;
    use crate::rational::Rational;

    fn names(inst: &PddInstance, sets: &[SpeciesSet]) -> Vec<Vec<String>> {
        sets.iter()
            .map(|s| inst.set_names(s).into_iter().map(String::from).collect())
            .collect()
    }

    #[test]
    fn combinations_lexicographic() {
        let mut seen = Vec::new();
        for_each_combination(4, 2, |c| seen.push(c.to_vec()));
        assert_eq!(seen, vec![vec![0, 1], vec![0, 2], vec![0, 3], vec![1, 2], vec![1, 3], vec![2, 3]]);
        let mut count = 0;
        for_each_combination(3, 0, |c| {
            assert!(c.is_empty());
            count += 1
        });
        assert_eq!(count, 1);
        for_each_combination(2, 3, |_| panic!("no 3-subsets of 2"));
    }

    #[test]
    fn w1_bruteforce() {
        let r = solve_bruteforce(&w1(2, 8)).unwrap();
        assert_eq!(r.optimum, Score::Finite(8));
        assert!(r.decision);
        assert_eq!(r.witness.unwrap().to_vec(), vec![SpeciesId(0), SpeciesId(1)]);
        let r = solve_bruteforce(&w1(0, 0)).unwrap();
        assert_eq!(r.optimum, Score::Finite(0));
        assert!(r.witness.unwrap().is_empty());
        assert!(!solve_bruteforce(&w1(2, 9)).unwrap().decision);
    }

    #[test]
    fn chain_of_full_weights_takes_everything() {
        let web = FoodWeb::new(&["a", "b", "c", "d"], &[("a", "b"), ("b", "c"), ("c", "d")]).unwrap();
        let inst = PddInstance::new(web, vec![Rational::one(); 3], vec![1, 2, 3, 4], 4, 0).unwrap();
        let r = solve_bruteforce(&inst).unwrap();
        assert_eq!(r.optimum, Score::Finite(10));
    }

    #[test]
    fn w1_enumeration() {
        let inst = w1(3, 0);
        let two = enumerate_viable(&inst, 2).unwrap();
        assert_eq!(names(&inst, &two), vec![vec![], vec!["a"], vec!["a", "b"]] as Vec<Vec<&str>>);
        let three = enumerate_viable(&inst, 3).unwrap();
        assert_eq!(
            names(&inst, &three),
            vec![vec![], vec!["a"], vec!["a", "b"], vec!["a", "b", "c"]] as Vec<Vec<&str>>
        );
        assert_eq!(enumerate_viable(&inst, 0).unwrap().len(), 1);
    }

    #[test]
    fn limits() {
        let names: Vec<String> = (0..23).map(|i| format!("x{i}")).collect();
        let web = FoodWeb::new::<String>(&names, &[]).unwrap();
        let inst = PddInstance::new(web, vec![], vec![1; 23], 1, 0).unwrap();
        assert!(solve_bruteforce(&inst).unwrap_err().to_string().starts_with("too large"));
        assert!(enumerate_viable(&inst, 1).is_err());
    }
}
