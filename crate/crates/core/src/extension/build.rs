//! Extension constructions.
//!
//! Every topological order `σ` induces a canonical extension in which the
//! subtree of `v` is the weakly connected component of `v` in the subgraph
//! induced by `v` and its successors in `σ`. Taking a preorder of any valid
//! extension as `σ` never increases any node's ancestor set, so minimising
//! over canonical extensions reaches the node scanwidth.

use std::collections::VecDeque;

use crate::foodweb::{FoodWeb, SpeciesId};

use super::width::{width_report_with, NodeWidthRule};
use super::TreeExtension;

pub const DEFAULT_NODE_LIMIT: usize = 10;
const HARD_NODE_LIMIT: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExactSearchError {
    #[error("too large: {n} species exceeds the exact-search limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// The path following the smallest-index-first topological order.
pub fn topo_path_extension(web: &FoodWeb) -> TreeExtension {
    TreeExtension::path(&web.topological_order())
}

/// Canonical extension of `order`, which must be topological for `web`.
/// Remaining component roots hang below `order[0]`.
pub fn canonical_extension(web: &FoodWeb, order: &[SpeciesId]) -> TreeExtension {
    let n = web.len();
    assert_eq!(order.len(), n, "order must list every species");
    let mut dsu = Dsu::new(n);
    let mut tree_root: Vec<usize> = (0..n).collect();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    for &v in order.iter().rev() {
        seen[v.0] = true;
        let mut adopted = Vec::new();
        for &w in web.predators_of(v) {
            assert!(seen[w.0], "order is not topological");
            let r = tree_root[dsu.find(w.0)];
            if !adopted.contains(&r) {
                adopted.push(r);
            }
        }
        for r in adopted {
            parent[r] = Some(v);
            dsu.union(r, v.0);
        }
        let rep = dsu.find(v.0);
        tree_root[rep] = v.0;
    }
    if let Some(&first) = order.first() {
        for v in 0..n {
            if v != first.0 && parent[v].is_none() {
                parent[v] = Some(first);
            }
        }
    }
    TreeExtension::from_parents(parent).expect("canonical construction yields a tree")
}

/// Ancestor-set size of `v` in the canonical extension of any order whose
/// prefix before `v` is `placed`.
fn canonical_width(web: &FoodWeb, placed: &[bool], v: SpeciesId, scratch: &mut Scratch) -> usize {
    scratch.reset();
    scratch.in_comp[v.0] = true;
    scratch.queue.push_back(v.0);
    let mut count = 0;
    while let Some(x) = scratch.queue.pop_front() {
        let x = SpeciesId(x);
        for &w in web.predators_of(x) {
            if !placed[w.0] && !scratch.in_comp[w.0] {
                scratch.in_comp[w.0] = true;
                scratch.touched.push(w.0);
                scratch.queue.push_back(w.0);
            }
        }
        for &(u, _) in web.prey_of(x) {
            if placed[u.0] {
                if !scratch.counted[u.0] {
                    scratch.counted[u.0] = true;
                    scratch.touched.push(u.0);
                    count += 1;
                }
            } else if !scratch.in_comp[u.0] {
                scratch.in_comp[u.0] = true;
                scratch.touched.push(u.0);
                scratch.queue.push_back(u.0);
            }
        }
    }
    scratch.touched.push(v.0);
    count
}

struct Scratch {
    in_comp: Vec<bool>,
    counted: Vec<bool>,
    touched: Vec<usize>,
    queue: VecDeque<usize>,
}

impl Scratch {
    fn new(n: usize) -> Self {
        Scratch {
            in_comp: vec![false; n],
            counted: vec![false; n],
            touched: Vec::new(),
            queue: VecDeque::new(),
        }
    }

    fn reset(&mut self) {
        for &x in &self.touched {
            self.in_comp[x] = false;
            self.counted[x] = false;
        }
        self.touched.clear();
        self.queue.clear();
    }
}

/// Builds an order by repeatedly placing the available species (all prey
/// already placed) whose canonical node width is smallest, smallest index on
/// ties, and returns its canonical extension. Valid and deterministic; not
/// guaranteed to beat [`topo_path_extension`].
pub fn greedy_extension(web: &FoodWeb) -> TreeExtension {
    let n = web.len();
    let mut placed = vec![false; n];
    let mut missing_prey: Vec<usize> = web.species().map(|v| web.in_degree(v)).collect();
    let mut scratch = Scratch::new(n);
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let best = web
            .species()
            .filter(|v| !placed[v.0] && missing_prey[v.0] == 0)
            .map(|v| (canonical_width(web, &placed, v, &mut scratch), v))
            .min()
            .expect("a DAG always has an available species");
        let v = best.1;
        placed[v.0] = true;
        order.push(v);
        for &w in web.predators_of(v) {
            missing_prey[w.0] -= 1;
        }
    }
    canonical_extension(web, &order)
}

/// How an extension is obtained when none is supplied.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Strategy {
    /// [`topo_path_extension`]
    Topo,
    /// [`greedy_extension`]
    Greedy,
    /// [`exact_min_nsw`]
    Exact,
}

impl Strategy {
    pub const ALL: [Strategy; 3] = [Strategy::Topo, Strategy::Greedy, Strategy::Exact];

    pub fn name(self) -> &'static str {
        match self {
            Strategy::Topo => "topo",
            Strategy::Greedy => "greedy",
            Strategy::Exact => "exact",
        }
    }
}

/// Runs `strategy`; only the exact search can fail, when `web` has more than
/// `exact_limit` species.
pub fn build_extension(
    web: &FoodWeb,
    strategy: Strategy,
    exact_limit: usize,
) -> Result<TreeExtension, ExactSearchError> {
    Ok(match strategy {
        Strategy::Topo => topo_path_extension(web),
        Strategy::Greedy => greedy_extension(web),
        Strategy::Exact => exact_min_nsw(web, exact_limit)?.0,
    })
}

/// Minimum node width over all extensions, by dynamic programming over the
/// placed prefix of a topological order.
pub fn exact_min_nsw(web: &FoodWeb, node_limit: usize) -> Result<(TreeExtension, usize), ExactSearchError> {
    exact_min_nsw_with(web, node_limit, NodeWidthRule::default())
}

pub fn exact_min_nsw_with(
    web: &FoodWeb,
    node_limit: usize,
    rule: NodeWidthRule,
) -> Result<(TreeExtension, usize), ExactSearchError> {
    let n = web.len();
    let limit = node_limit.min(HARD_NODE_LIMIT);
    if n > limit {
        return Err(ExactSearchError::TooLarge { n, limit });
    }
    let prey_mask: Vec<u32> = web
        .species()
        .map(|v| web.prey_of(v).iter().fold(0u32, |m, (u, _)| m | 1 << u.0))
        .collect();
    let self_term: Vec<usize> = web.species().map(|v| rule.self_term(web, v)).collect();
    let states = 1usize << n;
    let mut best = vec![u32::MAX; states];
    let mut last = vec![u8::MAX; states];
    best[0] = 0;
    let mut placed = vec![false; n];
    let mut scratch = Scratch::new(n);
    for mask in 0..states {
        if best[mask] == u32::MAX {
            continue;
        }
        for (i, p) in placed.iter_mut().enumerate() {
            *p = mask >> i & 1 == 1;
        }
        for v in 0..n {
            if mask >> v & 1 == 1 || prey_mask[v] & !(mask as u32) != 0 {
                continue;
            }
            let w = canonical_width(web, &placed, SpeciesId(v), &mut scratch) + self_term[v];
            let cand = best[mask].max(w as u32);
            let next = mask | 1 << v;
            if cand < best[next] {
                best[next] = cand;
                last[next] = v as u8;
            }
        }
    }
    let mut order = Vec::with_capacity(n);
    let mut mask = states - 1;
    while mask != 0 {
        let v = last[mask] as usize;
        order.push(SpeciesId(v));
        mask &= !(1 << v);
    }
    order.reverse();
    let t = canonical_extension(web, &order);
    let width = best[states - 1] as usize;
    debug_assert_eq!(width_report_with(web, &t, rule).max_node, width);
    Ok((t, width))
}

struct Dsu {
    parent: Vec<usize>,
}

impl Dsu {
    fn new(n: usize) -> Self {
        Dsu { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (a, b) = (self.find(a), self.find(b));
        if a != b {
            self.parent[a] = b;
        }
    }
}
