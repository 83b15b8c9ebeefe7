use crate::foodweb::{FoodWeb, SpeciesId};
use crate::species_set::SpeciesSet;

use super::TreeExtension;

/// `A_v` for every node: the proper ancestors of `v` with an arc into the
/// subtree of `v`, sorted by species index.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AncestorSets {
    sets: Vec<Vec<SpeciesId>>,
}

impl AncestorSets {
    pub fn members(&self, v: SpeciesId) -> &[SpeciesId] {
        &self.sets[v.0]
    }

    pub fn as_set(&self, v: SpeciesId) -> SpeciesSet {
        SpeciesSet::from_ids(self.sets.len(), self.sets[v.0].iter().copied())
    }

    /// `max_v |A_v|`.
    pub fn max_len(&self) -> usize {
        self.sets.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.sets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sets.is_empty()
    }
}

/// How a node counts itself in its node width.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub enum NodeWidthRule {
    /// Node width is `|A_v|`.
    #[default]
    AncestorsOnly,
    /// `|A_v|`, plus one when `v` has a predator.
    SelfIfPredators,
    /// `|A_v| + 1`.
    SelfAlways,
}

impl NodeWidthRule {
    pub(crate) fn self_term(self, web: &FoodWeb, v: SpeciesId) -> usize {
        match self {
            NodeWidthRule::AncestorsOnly => 0,
            NodeWidthRule::SelfIfPredators => usize::from(web.out_degree(v) > 0),
            NodeWidthRule::SelfAlways => 1,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidthReport {
    pub rule: NodeWidthRule,
    pub node: Vec<usize>,
    pub edge: Vec<usize>,
    pub max_node: usize,
    pub max_edge: usize,
}

/// For every arc `(u, w)`, walks from `w` up to (excluding) `u`; the arc
/// crosses into the subtree of each visited node.
fn walk_arcs(web: &FoodWeb, t: &TreeExtension, mut visit: impl FnMut(SpeciesId, SpeciesId)) {
    for arc in web.arcs() {
        let mut cur = arc.predator;
        while cur != arc.prey {
            visit(cur, arc.prey);
            cur = t
                .parent(cur)
                .expect("arc tail must be a proper ancestor of its head");
        }
    }
}

pub fn ancestor_sets(web: &FoodWeb, t: &TreeExtension) -> AncestorSets {
    let mut sets = vec![Vec::new(); web.len()];
    walk_arcs(web, t, |node, tail| sets[node.0].push(tail));
    for s in &mut sets {
        s.sort();
        s.dedup();
    }
    AncestorSets { sets }
}

pub fn width_report(web: &FoodWeb, t: &TreeExtension) -> WidthReport {
    width_report_with(web, t, NodeWidthRule::default())
}

pub fn width_report_with(web: &FoodWeb, t: &TreeExtension, rule: NodeWidthRule) -> WidthReport {
    let anc = ancestor_sets(web, t);
    let mut edge = vec![0; web.len()];
    walk_arcs(web, t, |node, _| edge[node.0] += 1);
    let node: Vec<usize> = web
        .species()
        .map(|v| anc.members(v).len() + rule.self_term(web, v))
        .collect();
    WidthReport {
        rule,
        max_node: node.iter().copied().max().unwrap_or(0),
        max_edge: edge.iter().copied().max().unwrap_or(0),
        node,
        edge,
    }
}
