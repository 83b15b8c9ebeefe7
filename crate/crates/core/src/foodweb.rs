//! Food webs, arc weights and viability.
//!
//! A food web is a DAG whose arcs point from prey to predator. A species set
//! is viable when every member with at least one prey receives total arc
//! weight at least one from the prey it shares the set with. All weight
//! arithmetic is exact.

use std::collections::{HashMap, HashSet};
use std::fmt;

use crate::rational::Rational;
use crate::species_set::SpeciesSet;

/// Dense index of a species in its food web.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SpeciesId(pub usize);

impl SpeciesId {
    pub fn index(self) -> usize {
        self.0
    }
}

/// A prey → predator arc.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Arc {
    pub prey: SpeciesId,
    pub predator: SpeciesId,
}

/// A problem found while checking a food web or instance.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum Violation {
    #[error("empty species name at position {0}")]
    EmptyName(usize),
    #[error("duplicate species `{0}`")]
    DuplicateSpecies(String),
    #[error("unknown species `{0}`")]
    UnknownSpecies(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("duplicate arc {0} -> {1}")]
    DuplicateArc(String, String),
    #[error("cycle through {}", .0.join(", "))]
    Cycle(Vec<String>),
    #[error("gamma out of (0,1] on arc {prey} -> {predator}: {gamma}")]
    GammaOutOfRange {
        prey: String,
        predator: String,
        gamma: Rational,
    },
    #[error("non-positive diversity {value} for `{species}`")]
    NonPositiveDiversity { species: String, value: i128 },
    #[error("total diversity exceeds the 64-bit range")]
    DiversityOverflow,
    #[error("alpha {0} outside (0,1]")]
    AlphaOutOfRange(Rational),
}

/// Wraps one or more violations so they can travel through `?`.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}", render_violations(.0))]
pub struct InvalidInstance(pub Vec<Violation>);

fn render_violations(v: &[Violation]) -> String {
    v.iter().map(|x| x.to_string()).collect::<Vec<_>>().join("; ")
}

#[derive(Clone, Debug)]
pub struct FoodWeb {
    names: Vec<String>,
    index: HashMap<String, SpeciesId>,
    arcs: Vec<Arc>,
    // (prey, arc index) per predator
    prey: Vec<Vec<(SpeciesId, usize)>>,
    predators: Vec<Vec<SpeciesId>>,
}

impl FoodWeb {
    /// Builds a web from species names and named arcs, rejecting cycles,
    /// self-loops, parallel arcs and bad names.
    pub fn new<S: AsRef<str>>(names: &[S], arcs: &[(S, S)]) -> Result<Self, InvalidInstance> {
        let mut violations = Vec::new();
        let mut index = HashMap::with_capacity(names.len());
        for (i, name) in names.iter().enumerate() {
            let name = name.as_ref();
            if name.is_empty() {
                violations.push(Violation::EmptyName(i));
            } else if index.insert(name.to_string(), SpeciesId(i)).is_some() {
                violations.push(Violation::DuplicateSpecies(name.to_string()));
            }
        }
        let mut resolved = Vec::with_capacity(arcs.len());
        for (u, v) in arcs {
            let lookup = |s: &str| index.get(s).copied().ok_or_else(|| Violation::UnknownSpecies(s.to_string()));
            match (lookup(u.as_ref()), lookup(v.as_ref())) {
                (Ok(p), Ok(q)) => resolved.push(Arc { prey: p, predator: q }),
                (a, b) => violations.extend(a.err().into_iter().chain(b.err())),
            }
        }
        if !violations.is_empty() {
            return Err(InvalidInstance(violations));
        }
        let names = names.iter().map(|s| s.as_ref().to_string()).collect();
        Self::from_indexed(names, resolved)
    }

    /// Builds a web from names and index-based arcs.
    pub fn from_indexed(names: Vec<String>, arcs: Vec<Arc>) -> Result<Self, InvalidInstance> {
        let n = names.len();
        let mut violations = Vec::new();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if name.is_empty() {
                violations.push(Violation::EmptyName(i));
            } else if index.insert(name.clone(), SpeciesId(i)).is_some() {
                violations.push(Violation::DuplicateSpecies(name.clone()));
            }
        }
        let mut seen = HashSet::with_capacity(arcs.len());
        let mut prey = vec![Vec::new(); n];
        let mut predators = vec![Vec::new(); n];
        for (i, arc) in arcs.iter().enumerate() {
            assert!(arc.prey.0 < n && arc.predator.0 < n, "arc endpoint out of range");
            if arc.prey == arc.predator {
                violations.push(Violation::SelfLoop(names[arc.prey.0].clone()));
                continue;
            }
            if !seen.insert(*arc) {
                violations.push(Violation::DuplicateArc(
                    names[arc.prey.0].clone(),
                    names[arc.predator.0].clone(),
                ));
                continue;
            }
            prey[arc.predator.0].push((arc.prey, i));
            predators[arc.prey.0].push(arc.predator);
        }
        for list in &mut prey {
            list.sort();
        }
        for list in &mut predators {
            list.sort();
        }
        let web = FoodWeb {
            names,
            index,
            arcs,
            prey,
            predators,
        };
        if let Some(cycle) = web.find_cycle() {
            violations.push(Violation::Cycle(
                cycle.iter().map(|v| web.names[v.0].clone()).collect(),
            ));
        }
        if violations.is_empty() {
            Ok(web)
        } else {
            Err(InvalidInstance(violations))
        }
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn species(&self) -> impl ExactSizeIterator<Item = SpeciesId> {
        (0..self.names.len()).map(SpeciesId)
    }

    pub fn name(&self, id: SpeciesId) -> &str {
        &self.names[id.0]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<SpeciesId> {
        self.index.get(name).copied()
    }

    pub fn arcs(&self) -> &[Arc] {
        &self.arcs
    }

    /// Prey of `v` with the index of the connecting arc, sorted by prey.
    pub fn prey_of(&self, v: SpeciesId) -> &[(SpeciesId, usize)] {
        &self.prey[v.0]
    }

    pub fn predators_of(&self, v: SpeciesId) -> &[SpeciesId] {
        &self.predators[v.0]
    }

    pub fn in_degree(&self, v: SpeciesId) -> usize {
        self.prey[v.0].len()
    }

    pub fn out_degree(&self, v: SpeciesId) -> usize {
        self.predators[v.0].len()
    }

    pub fn is_source(&self, v: SpeciesId) -> bool {
        self.prey[v.0].is_empty()
    }

    /// Kahn's algorithm with smallest-index-first tie-breaking.
    pub fn topological_order(&self) -> Vec<SpeciesId> {
        self.kahn().expect("food web is acyclic by construction")
    }

    fn kahn(&self) -> Option<Vec<SpeciesId>> {
        use std::cmp::Reverse;
        use std::collections::BinaryHeap;
        let n = self.len();
        let mut indeg: Vec<usize> = (0..n).map(|v| self.prey[v].len()).collect();
        let mut ready: BinaryHeap<Reverse<usize>> =
            (0..n).filter(|&v| indeg[v] == 0).map(Reverse).collect();
        let mut order = Vec::with_capacity(n);
        while let Some(Reverse(v)) = ready.pop() {
            order.push(SpeciesId(v));
            for w in &self.predators[v] {
                indeg[w.0] -= 1;
                if indeg[w.0] == 0 {
                    ready.push(Reverse(w.0));
                }
            }
        }
        (order.len() == n).then_some(order)
    }

    fn find_cycle(&self) -> Option<Vec<SpeciesId>> {
        if self.kahn().is_some() {
            return None;
        }
        // iterative DFS colouring to report one cycle
        let n = self.len();
        let mut colour = vec![0u8; n];
        let mut parent = vec![usize::MAX; n];
        for start in 0..n {
            if colour[start] != 0 {
                continue;
            }
            let mut stack = vec![(start, 0usize)];
            colour[start] = 1;
            while let Some(&mut (v, ref mut next)) = stack.last_mut() {
                if *next < self.predators[v].len() {
                    let w = self.predators[v][*next].0;
                    *next += 1;
                    match colour[w] {
                        0 => {
                            colour[w] = 1;
                            parent[w] = v;
                            stack.push((w, 0));
                        }
                        1 => {
                            let mut cycle = vec![SpeciesId(w)];
                            let mut cur = v;
                            while cur != w {
                                cycle.push(SpeciesId(cur));
                                cur = parent[cur];
                            }
                            cycle[1..].reverse();
                            return Some(cycle);
                        }
                        _ => {}
                    }
                } else {
                    colour[v] = 2;
                    stack.pop();
                }
            }
        }
        unreachable!("Kahn's algorithm found a cycle that DFS did not")
    }
}

/// An unvalidated instance as it comes out of a parser or generator.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct InstanceDraft {
    pub species: Vec<(String, i128)>,
    pub arcs: Vec<(String, String, Rational)>,
    pub budget: u64,
    pub target: u64,
}

/// A validated Weighted PDD instance `(F, d, gamma, B, D)`.
#[derive(Clone, Debug)]
pub struct PddInstance {
    web: FoodWeb,
    gamma: Vec<Rational>,
    diversity: Vec<u64>,
    budget: u64,
    target: u64,
}

impl PddInstance {
    /// `gamma` is indexed like `web.arcs()`, `diversity` like the species.
    pub fn new(
        web: FoodWeb,
        gamma: Vec<Rational>,
        diversity: Vec<u64>,
        budget: u64,
        target: u64,
    ) -> Result<Self, InvalidInstance> {
        assert_eq!(gamma.len(), web.arcs().len(), "one gamma per arc");
        assert_eq!(diversity.len(), web.len(), "one diversity per species");
        let mut violations = Vec::new();
        for (arc, g) in web.arcs().iter().zip(&gamma) {
            if !g.is_unit_interval() {
                violations.push(Violation::GammaOutOfRange {
                    prey: web.name(arc.prey).to_string(),
                    predator: web.name(arc.predator).to_string(),
                    gamma: g.clone(),
                });
            }
        }
        let mut total: i64 = 0;
        let mut overflow = false;
        for (v, &d) in diversity.iter().enumerate() {
            if d == 0 {
                violations.push(Violation::NonPositiveDiversity {
                    species: web.name(SpeciesId(v)).to_string(),
                    value: 0,
                });
            }
            match i64::try_from(d).ok().and_then(|d| total.checked_add(d)) {
                Some(t) => total = t,
                None => overflow = true,
            }
        }
        if overflow {
            violations.push(Violation::DiversityOverflow);
        }
        if !violations.is_empty() {
            return Err(InvalidInstance(violations));
        }
        Ok(PddInstance {
            web,
            gamma,
            diversity,
            budget,
            target,
        })
    }

    pub fn from_draft(draft: &InstanceDraft) -> Result<Self, InvalidInstance> {
        let violations = validate_instance(draft);
        if !violations.is_empty() {
            return Err(InvalidInstance(violations));
        }
        let names: Vec<&str> = draft.species.iter().map(|(n, _)| n.as_str()).collect();
        let arcs: Vec<(&str, &str)> = draft.arcs.iter().map(|(u, v, _)| (u.as_str(), v.as_str())).collect();
        let web = FoodWeb::new(&names, &arcs)?;
        let gamma = draft.arcs.iter().map(|(_, _, g)| g.clone()).collect();
        let diversity = draft.species.iter().map(|&(_, d)| d as u64).collect();
        PddInstance::new(web, gamma, diversity, draft.budget, draft.target)
    }

    pub fn to_draft(&self) -> InstanceDraft {
        InstanceDraft {
            species: self
                .web
                .species()
                .map(|v| (self.web.name(v).to_string(), self.diversity[v.0] as i128))
                .collect(),
            arcs: self
                .web
                .arcs()
                .iter()
                .zip(&self.gamma)
                .map(|(a, g)| (self.web.name(a.prey).to_string(), self.web.name(a.predator).to_string(), g.clone()))
                .collect(),
            budget: self.budget,
            target: self.target,
        }
    }

    pub fn web(&self) -> &FoodWeb {
        &self.web
    }

    pub fn len(&self) -> usize {
        self.web.len()
    }

    pub fn is_empty(&self) -> bool {
        self.web.is_empty()
    }

    pub fn gamma(&self, arc: usize) -> &Rational {
        &self.gamma[arc]
    }

    pub fn gammas(&self) -> &[Rational] {
        &self.gamma
    }

    pub fn diversity_of(&self, v: SpeciesId) -> u64 {
        self.diversity[v.0]
    }

    pub fn diversities(&self) -> &[u64] {
        &self.diversity
    }

    pub fn budget(&self) -> u64 {
        self.budget
    }

    pub fn target(&self) -> u64 {
        self.target
    }

    pub fn with_budget_target(mut self, budget: u64, target: u64) -> Self {
        self.budget = budget;
        self.target = target;
        self
    }

    pub fn empty_set(&self) -> SpeciesSet {
        SpeciesSet::empty(self.len())
    }

    pub fn set_of<'a>(&self, names: impl IntoIterator<Item = &'a str>) -> Option<SpeciesSet> {
        let mut set = self.empty_set();
        for name in names {
            set.insert(self.web.lookup(name)?);
        }
        Some(set)
    }

    pub fn set_names(&self, set: &SpeciesSet) -> Vec<&str> {
        set.iter().map(|v| self.web.name(v)).collect()
    }
}

/// `gamma_v(S)`: total weight of arcs `(u, v)` with `u` in `s`.
pub fn gamma_sum(inst: &PddInstance, v: SpeciesId, s: &SpeciesSet) -> Rational {
    inst.web
        .prey_of(v)
        .iter()
        .filter(|(u, _)| s.contains(*u))
        .map(|&(_, arc)| &inst.gamma[arc])
        .sum()
}

/// True iff every non-source member of `s` receives weight at least one from
/// its prey in `s`.
pub fn is_viable(inst: &PddInstance, s: &SpeciesSet) -> bool {
    first_starving(inst, s).is_none()
}

/// The smallest-index member of `s` lacking prey, with its received weight.
pub fn first_starving(inst: &PddInstance, s: &SpeciesSet) -> Option<(SpeciesId, Rational)> {
    s.iter().find_map(|v| {
        if inst.web.is_source(v) {
            return None;
        }
        let got = gamma_sum(inst, v, s);
        (got < Rational::one()).then_some((v, got))
    })
}

/// `d(S)`.
pub fn diversity(inst: &PddInstance, s: &SpeciesSet) -> i64 {
    s.iter().map(|v| inst.diversity[v.0] as i64).sum()
}

/// `gamma(u, v) = 1 / (alpha * deg⁻(v))`, clamped to 1.
pub fn alpha_gamma(alpha: &Rational, in_degree: usize) -> Rational {
    (alpha.clone() * Rational::from_integer(in_degree as i64)).recip().min(Rational::one())
}

/// The alpha-PDD instance on `web`.
pub fn make_alpha_instance(
    web: FoodWeb,
    alpha: &Rational,
    diversity: Vec<u64>,
    budget: u64,
    target: u64,
) -> Result<PddInstance, InvalidInstance> {
    if !alpha.is_unit_interval() {
        return Err(InvalidInstance(vec![Violation::AlphaOutOfRange(alpha.clone())]));
    }
    let gamma = web
        .arcs()
        .iter()
        .map(|a| alpha_gamma(alpha, web.in_degree(a.predator)))
        .collect();
    PddInstance::new(web, gamma, diversity, budget, target)
}

/// Every problem with a draft; empty when it describes a valid instance.
pub fn validate_instance(draft: &InstanceDraft) -> Vec<Violation> {
    let names: Vec<&str> = draft.species.iter().map(|(n, _)| n.as_str()).collect();
    let arcs: Vec<(&str, &str)> = draft.arcs.iter().map(|(u, v, _)| (u.as_str(), v.as_str())).collect();
    let mut violations = match FoodWeb::new(&names, &arcs) {
        Ok(_) => Vec::new(),
        Err(InvalidInstance(v)) => v,
    };
    for (u, v, g) in &draft.arcs {
        if !g.is_unit_interval() {
            violations.push(Violation::GammaOutOfRange {
                prey: u.clone(),
                predator: v.clone(),
                gamma: g.clone(),
            });
        }
    }
    let mut total: i128 = 0;
    for (name, d) in &draft.species {
        if *d < 1 {
            violations.push(Violation::NonPositiveDiversity {
                species: name.clone(),
                value: *d,
            });
        }
        total = total.saturating_add(*d);
    }
    if total > i64::MAX as i128 {
        violations.push(Violation::DiversityOverflow);
    }
    violations
}

impl fmt::Display for SpeciesId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "#{}", self.0)
    }
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// a→b (1), a→c (1/2), b→c (1/2); d = a:5, b:3, c:4.
    pub fn w1(budget: u64, target: u64) -> PddInstance {
        let web = FoodWeb::new(&["a", "b", "c"], &[("a", "b"), ("a", "c"), ("b", "c")]).unwrap();
        PddInstance::new(
            web,
            vec![Rational::one(), Rational::new(1, 2), Rational::new(1, 2)],
            vec![5, 3, 4],
            budget,
            target,
        )
        .unwrap()
    }
}
