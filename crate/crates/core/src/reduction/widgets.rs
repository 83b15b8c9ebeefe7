//! Selector and quota widgets.
//!
//! Both are in-trees: every arc points towards the root and only the root
//! touches the rest of the food web.

use serde::Serialize;

use crate::foodweb::{Arc, SpeciesId};

use super::ReductionError;

/// Upper bound on the species a single reduction may create.
pub const MAX_REDUCED_SPECIES: u64 = 50_000_000;

/// Accumulates species and arcs of a food web under construction.
#[derive(Clone, Debug, Default)]
pub struct WebBuilder {
    pub names: Vec<String>,
    pub arcs: Vec<Arc>,
}

impl WebBuilder {
    pub fn add(&mut self, name: String) -> SpeciesId {
        self.names.push(name);
        SpeciesId(self.names.len() - 1)
    }

    pub fn arc(&mut self, prey: SpeciesId, predator: SpeciesId) {
        self.arcs.push(Arc { prey, predator });
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum WidgetKind {
    /// `S(C)`
    Selector { c: u64 },
    /// `Q(δ, ℓ, r, M)`: `δ` external prey, at least `ℓ` of them required,
    /// `r` sets the demand, medium prey cost `M` each.
    Quota { delta: u64, ell: u64, r: u64, m: u64 },
}

/// Where the species of one widget live in the reduced web.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WidgetSpec {
    pub kind: WidgetKind,
    pub root: SpeciesId,
    /// Selector leaves.
    pub leaves: Vec<SpeciesId>,
    pub big: Vec<SpeciesId>,
    pub big_prey: Vec<Vec<SpeciesId>>,
    pub medium: Vec<SpeciesId>,
    pub medium_prey: Vec<Vec<SpeciesId>>,
    pub small: Vec<SpeciesId>,
}

impl WidgetSpec {
    fn empty(kind: WidgetKind, root: SpeciesId) -> Self {
        WidgetSpec {
            kind,
            root,
            leaves: Vec::new(),
            big: Vec::new(),
            big_prey: Vec::new(),
            medium: Vec::new(),
            medium_prey: Vec::new(),
            small: Vec::new(),
        }
    }

    /// Every species of the widget, root first.
    pub fn members(&self) -> impl Iterator<Item = SpeciesId> + '_ {
        std::iter::once(self.root)
            .chain(self.leaves.iter().copied())
            .chain(self.big.iter().copied())
            .chain(self.big_prey.iter().flatten().copied())
            .chain(self.medium.iter().copied())
            .chain(self.medium_prey.iter().flatten().copied())
            .chain(self.small.iter().copied())
    }

    pub fn len(&self) -> usize {
        1 + self.leaves.len()
            + self.big.len()
            + self.big_prey.iter().map(Vec::len).sum::<usize>()
            + self.medium.len()
            + self.medium_prey.iter().map(Vec::len).sum::<usize>()
            + self.small.len()
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Prey of the root inside the widget.
    pub fn internal_root_prey(&self) -> usize {
        self.leaves.len() + self.big.len() + self.medium.len() + self.small.len()
    }

    /// Species count predicted by the widget's type.
    pub fn expected_len(&self, budget: u64) -> u64 {
        match self.kind {
            WidgetKind::Selector { c } => selector_size(c),
            WidgetKind::Quota { delta, ell, r, m } => quota_size(delta, ell, r, m, budget),
        }
    }
}

/// `2C − 1`.
pub fn selector_size(c: u64) -> u64 {
    2 * c - 1
}

/// `(2B − 1)(ℓ + max(0, r − δ)) + (2M − 1)(r − ℓ) + max(0, δ − r) + 1`.
pub fn quota_size(delta: u64, ell: u64, r: u64, m: u64, budget: u64) -> u64 {
    (2 * budget - 1) * (ell + r.saturating_sub(delta)) + (2 * m - 1) * (r - ell) + delta.saturating_sub(r) + 1
}

/// `S(C)`: root `name` with `2(C − 1)` source prey.
pub fn build_selector(b: &mut WebBuilder, c: u64, name: &str) -> Result<WidgetSpec, ReductionError> {
    if c == 0 {
        return Err(ReductionError::Parameter("selector needs C >= 1".into()));
    }
    check_room(b, selector_size(c))?;
    let root = b.add(name.to_string());
    let mut w = WidgetSpec::empty(WidgetKind::Selector { c }, root);
    for i in 0..2 * (c - 1) {
        let leaf = b.add(format!("{name}.leaf{i}"));
        b.arc(leaf, root);
        w.leaves.push(leaf);
    }
    Ok(w)
}

/// `Q(δ, ℓ, r, M)` with root `name`: `ℓ + max(0, r − δ)` big prey with
/// `2(B − 1)` source prey each, `r − ℓ` medium prey with `2(M − 1)` source
/// prey each, and `max(0, δ − r)` small source prey. The `δ` external prey
/// are wired by the caller.
pub fn build_quota(
    b: &mut WebBuilder,
    delta: u64,
    ell: u64,
    r: u64,
    m: u64,
    budget: u64,
    name: &str,
) -> Result<WidgetSpec, ReductionError> {
    if ell > r {
        return Err(ReductionError::Parameter(format!("quota needs ell <= r, got {ell} > {r}")));
    }
    if m == 0 || budget == 0 {
        return Err(ReductionError::Parameter("quota needs M >= 1 and B >= 1".into()));
    }
    let size = (2 * budget - 1)
        .checked_mul(ell + r.saturating_sub(delta))
        .and_then(|x| x.checked_add((2 * m - 1).checked_mul(r - ell)?))
        .ok_or(ReductionError::Overflow)?;
    check_room(b, size)?;
    let root = b.add(name.to_string());
    let mut w = WidgetSpec::empty(WidgetKind::Quota { delta, ell, r, m }, root);
    for i in 0..ell + r.saturating_sub(delta) {
        let big = b.add(format!("{name}.big{i}"));
        b.arc(big, root);
        let prey: Vec<_> = (0..2 * (budget - 1))
            .map(|j| {
                let p = b.add(format!("{name}.big{i}.p{j}"));
                b.arc(p, big);
                p
            })
            .collect();
        w.big.push(big);
        w.big_prey.push(prey);
    }
    for i in 0..r - ell {
        let med = b.add(format!("{name}.med{i}"));
        b.arc(med, root);
        let prey: Vec<_> = (0..2 * (m - 1))
            .map(|j| {
                let p = b.add(format!("{name}.med{i}.p{j}"));
                b.arc(p, med);
                p
            })
            .collect();
        w.medium.push(med);
        w.medium_prey.push(prey);
    }
    for i in 0..delta.saturating_sub(r) {
        let small = b.add(format!("{name}.small{i}"));
        b.arc(small, root);
        w.small.push(small);
    }
    Ok(w)
}

fn check_room(b: &WebBuilder, extra: u64) -> Result<(), ReductionError> {
    if b.len() as u64 + extra > MAX_REDUCED_SPECIES {
        return Err(ReductionError::TooLarge(MAX_REDUCED_SPECIES));
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn selector_sizes() {
        let mut b = WebBuilder::default();
        let s = build_selector(&mut b, 1, "r").unwrap();
        assert_eq!((b.len(), b.arcs.len()), (1, 0));
        assert!(s.leaves.is_empty());

        let mut b = WebBuilder::default();
        build_selector(&mut b, 13, "r").unwrap();
        assert_eq!((b.len(), b.arcs.len()), (25, 24));

        let mut b = WebBuilder::default();
        let s = build_selector(&mut b, 4, "r").unwrap();
        assert_eq!(s.leaves.len(), 6);
        assert!(b.arcs.iter().all(|a| a.predator == s.root));
        assert!(build_selector(&mut b, 0, "z").is_err());
    }

    #[test]
    fn quota_edge_type() {
        let mut b = WebBuilder::default();
        let q = build_quota(&mut b, 1, 1, 2, 4, 20, "x").unwrap();
        assert_eq!((q.big.len(), q.medium.len(), q.small.len()), (2, 1, 0));
        assert_eq!(b.len(), 86);
        assert_eq!(b.len() as u64, quota_size(1, 1, 2, 4, 20));
        assert_eq!(b.arcs.len(), 85);
        assert_eq!(q.len(), 86);
        assert!(q.big_prey.iter().all(|p| p.len() == 38));
        assert!(q.medium_prey.iter().all(|p| p.len() == 6));
    }

    #[test]
    fn quota_minimal() {
        let mut b = WebBuilder::default();
        let q = build_quota(&mut b, 1, 1, 1, 1, 7, "x").unwrap();
        assert_eq!((q.big.len(), q.medium.len(), q.small.len()), (1, 0, 0));
        assert_eq!(q.internal_root_prey() as u64 + 1, 2);
    }

    #[test]
    fn quota_empty() {
        let mut b = WebBuilder::default();
        let q = build_quota(&mut b, 0, 0, 0, 3, 5, "x").unwrap();
        assert_eq!(b.len(), 1);
        assert_eq!(q.internal_root_prey(), 0);
    }

    #[test]
    fn quota_parameter_errors() {
        let mut b = WebBuilder::default();
        assert!(build_quota(&mut b, 1, 3, 2, 1, 5, "x").is_err());
        assert!(build_quota(&mut b, 1, 0, 2, 0, 5, "x").is_err());
        assert!(build_quota(&mut b, 1, 0, 2, 1, 0, "x").is_err());
    }

    #[test]
    fn quota_small_side() {
        // δ > r: small prey fill the gap
        let mut b = WebBuilder::default();
        let q = build_quota(&mut b, 5, 0, 2, 3, 4, "x").unwrap();
        assert_eq!((q.big.len(), q.medium.len(), q.small.len()), (0, 2, 3));
        assert_eq!(b.len() as u64, quota_size(5, 0, 2, 3, 4));
        assert_eq!(q.internal_root_prey() as u64 + 5, 2 * 5);
    }
}
