//! Tree extensions of food webs.
//!
//! A tree extension is a rooted tree on the species in which the tail of
//! every food-web arc is a proper ancestor of its head. The dynamic program
//! runs over such a tree; its cost is governed by the ancestor sets computed
//! in [`width`].

mod build;
mod width;

pub use build::{
    build_extension, canonical_extension, exact_min_nsw, exact_min_nsw_with, greedy_extension, topo_path_extension,
    ExactSearchError, Strategy, DEFAULT_NODE_LIMIT,
};
pub use width::{ancestor_sets, width_report, width_report_with, AncestorSets, NodeWidthRule, WidthReport};

use crate::foodweb::{FoodWeb, SpeciesId};

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum ExtensionViolation {
    #[error("extension covers {got} species but the food web has {expected}")]
    SpanMismatch { expected: usize, got: usize },
    #[error("not a single rooted tree: {0}")]
    NotATree(String),
    #[error("arc {prey} -> {predator}: tail is not a proper ancestor of head")]
    AncestorCondition { prey: String, predator: String },
}

/// A rooted tree over species `0..n`, with children ordered by the smallest
/// species index in their subtree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TreeExtension {
    parent: Vec<Option<SpeciesId>>,
    root: Option<SpeciesId>,
    children: Vec<Vec<SpeciesId>>,
    depth: Vec<usize>,
    // preorder interval [tin, tout)
    tin: Vec<usize>,
    tout: Vec<usize>,
    preorder: Vec<SpeciesId>,
}

impl TreeExtension {
    /// Checks that `parent` describes one rooted tree (or is empty).
    pub fn from_parents(parent: Vec<Option<SpeciesId>>) -> Result<Self, ExtensionViolation> {
        let n = parent.len();
        if let Some((v, p)) = parent
            .iter()
            .enumerate()
            .find_map(|(v, p)| p.filter(|p| p.0 >= n).map(|p| (v, p)))
        {
            return Err(ExtensionViolation::NotATree(format!(
                "parent {} of node {v} out of range",
                p.0
            )));
        }
        let roots: Vec<usize> = (0..n).filter(|&v| parent[v].is_none()).collect();
        if n > 0 && roots.len() != 1 {
            return Err(ExtensionViolation::NotATree(format!("{} roots", roots.len())));
        }
        let mut children = vec![Vec::new(); n];
        for (v, p) in parent.iter().enumerate() {
            if let Some(p) = p {
                children[p.0].push(SpeciesId(v));
            }
        }
        let root = roots.first().map(|&r| SpeciesId(r));
        let mut depth = vec![0; n];
        let mut order = Vec::with_capacity(n);
        if let Some(r) = root {
            let mut stack = vec![r];
            while let Some(v) = stack.pop() {
                order.push(v);
                for &c in &children[v.0] {
                    depth[c.0] = depth[v.0] + 1;
                    stack.push(c);
                }
            }
        }
        if order.len() != n {
            return Err(ExtensionViolation::NotATree(format!(
                "{} nodes unreachable from the root",
                n - order.len()
            )));
        }
        // subtree minimum, bottom-up
        let mut subtree_min: Vec<usize> = (0..n).collect();
        for &v in order.iter().rev() {
            if let Some(p) = parent[v.0] {
                subtree_min[p.0] = subtree_min[p.0].min(subtree_min[v.0]);
            }
        }
        for list in &mut children {
            list.sort_by_key(|c| subtree_min[c.0]);
        }
        let mut tin = vec![0; n];
        let mut tout = vec![0; n];
        let mut preorder = Vec::with_capacity(n);
        if let Some(r) = root {
            // (node, entered)
            let mut stack = vec![(r, false)];
            while let Some((v, entered)) = stack.pop() {
                if entered {
                    tout[v.0] = preorder.len();
                    continue;
                }
                tin[v.0] = preorder.len();
                preorder.push(v);
                stack.push((v, true));
                for &c in children[v.0].iter().rev() {
                    stack.push((c, false));
                }
            }
        }
        Ok(TreeExtension {
            parent,
            root,
            children,
            depth,
            tin,
            tout,
            preorder,
        })
    }

    /// A path visiting `order` top to bottom.
    pub fn path(order: &[SpeciesId]) -> Self {
        let mut parent = vec![None; order.len()];
        for w in order.windows(2) {
            parent[w[1].0] = Some(w[0]);
        }
        Self::from_parents(parent).expect("a path is a tree")
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    pub fn root(&self) -> Option<SpeciesId> {
        self.root
    }

    pub fn parent(&self, v: SpeciesId) -> Option<SpeciesId> {
        self.parent[v.0]
    }

    pub fn parents(&self) -> &[Option<SpeciesId>] {
        &self.parent
    }

    pub fn children(&self, v: SpeciesId) -> &[SpeciesId] {
        &self.children[v.0]
    }

    pub fn is_leaf(&self, v: SpeciesId) -> bool {
        self.children[v.0].is_empty()
    }

    pub fn depth(&self, v: SpeciesId) -> usize {
        self.depth[v.0]
    }

    /// Nodes in preorder, children visited in their stored order.
    pub fn preorder(&self) -> &[SpeciesId] {
        &self.preorder
    }

    /// Children before parents.
    pub fn postorder(&self) -> impl Iterator<Item = SpeciesId> + '_ {
        self.preorder.iter().rev().copied()
    }

    pub fn is_proper_ancestor(&self, u: SpeciesId, v: SpeciesId) -> bool {
        self.tin[u.0] < self.tin[v.0] && self.tout[v.0] <= self.tout[u.0]
    }

    /// `Z_v`: `v` and all its descendants.
    pub fn descendants(&self, v: SpeciesId) -> &[SpeciesId] {
        &self.preorder[self.tin[v.0]..self.tout[v.0]]
    }
}

/// Checks the ancestor condition for every arc of `web`.
pub fn validate_extension(web: &FoodWeb, t: &TreeExtension) -> Result<(), Vec<ExtensionViolation>> {
    if t.len() != web.len() {
        return Err(vec![ExtensionViolation::SpanMismatch {
            expected: web.len(),
            got: t.len(),
        }]);
    }
    let violations: Vec<_> = web
        .arcs()
        .iter()
        .filter(|a| !t.is_proper_ancestor(a.prey, a.predator))
        .map(|a| ExtensionViolation::AncestorCondition {
            prey: web.name(a.prey).to_string(),
            predator: web.name(a.predator).to_string(),
        })
        .collect();
    if violations.is_empty() {
        Ok(())
    } else {
        Err(violations)
    }
}

/// Builds an extension from a raw parent map and validates it against `web`.
pub fn check_parents(
    web: &FoodWeb,
    parent: Vec<Option<SpeciesId>>,
) -> Result<TreeExtension, Vec<ExtensionViolation>> {
    if parent.len() != web.len() {
        return Err(vec![ExtensionViolation::SpanMismatch {
            expected: web.len(),
            got: parent.len(),
        }]);
    }
    let t = TreeExtension::from_parents(parent).map_err(|e| vec![e])?;
    validate_extension(web, &t)?;
    Ok(t)
}
