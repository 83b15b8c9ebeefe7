//! Seeded random instances for test corpora.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::foodweb::{make_alpha_instance, Arc, FoodWeb, PddInstance, SpeciesId};
use crate::rational::Rational;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum GammaStyle {
    /// `gamma(u, v) = 1 / (alpha * deg⁻(v))`, clamped to 1.
    Alpha(Rational),
    /// Each arc independently gets `p/q` with `q` uniform in `1..=max_den`
    /// and `p` uniform in `1..=q`.
    SmallDenominator(u32),
}

#[derive(Clone, Debug, PartialEq, thiserror::Error)]
pub enum GenerateError {
    #[error("n >= 1 required")]
    Empty,
    #[error("arc probability {0} outside [0,1]")]
    Probability(f64),
    #[error("bad gamma style: {0}")]
    GammaStyle(String),
}

/// A random DAG: a random permutation fixes the topological order and each
/// forward pair becomes an arc with probability `arc_probability`.
/// Diversities are uniform in `1..=10`, the budget in `0..=n` and the target
/// in `0..=d(X)`.
pub fn random_instance(
    seed: u64,
    n: usize,
    arc_probability: f64,
    gamma_style: &GammaStyle,
) -> Result<PddInstance, GenerateError> {
    if n == 0 {
        return Err(GenerateError::Empty);
    }
    if !(0.0..=1.0).contains(&arc_probability) {
        return Err(GenerateError::Probability(arc_probability));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut arcs = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            if rng.gen_bool(arc_probability) {
                arcs.push(Arc {
                    prey: SpeciesId(order[i]),
                    predator: SpeciesId(order[j]),
                });
            }
        }
    }
    let names = (0..n).map(|i| format!("s{i}")).collect();
    let web = FoodWeb::from_indexed(names, arcs).expect("forward arcs form a DAG");
    let diversity: Vec<u64> = (0..n).map(|_| rng.gen_range(1..=10)).collect();
    let total: u64 = diversity.iter().sum();
    let budget = rng.gen_range(0..=n as u64);
    let target = rng.gen_range(0..=total);
    let inst = match gamma_style {
        GammaStyle::Alpha(alpha) => make_alpha_instance(web, alpha, diversity, budget, target)
            .map_err(|e| GenerateError::GammaStyle(e.to_string()))?,
        GammaStyle::SmallDenominator(max_den) => {
            if *max_den == 0 {
                return Err(GenerateError::GammaStyle("max denominator must be >= 1".into()));
            }
            let gamma = web
                .arcs()
                .iter()
                .map(|_| {
                    let q = rng.gen_range(1..=*max_den);
                    let p = rng.gen_range(1..=q);
                    Rational::new(p, q)
                })
                .collect();
            PddInstance::new(web, gamma, diversity, budget, target).expect("generated values are in range")
        }
    };
    Ok(inst)
}
