//! Dynamic program over a tree extension.
//!
//! For a node `v`, a subset `A'` of its ancestor set `A_v` and a size `ℓ`,
//! `S[v, A', ℓ]` is the largest diversity of an `ℓ`-subset `P` of the
//! subtree `Z_v` such that every non-source member of `P` is fed by
//! `P ∪ A'`. Rows are filled bottom-up; a node either takes itself (`P₀ =
//! {v}`, allowed when `A'` alone feeds it) or not, and the children's rows
//! are merged by max-plus convolution over their sizes. Each child is read
//! at the subset `A_w ∩ (A' ∪ P₀)`.
//!
//! Rows only store sizes up to `min(B', |Z_v|)`; larger sizes are `-∞`.

use std::time::Instant;

use rayon::prelude::*;

use crate::extension::{ancestor_sets, validate_extension, ExtensionViolation, TreeExtension};
use crate::foodweb::{PddInstance, SpeciesId};
use crate::rational::Rational;
use crate::solution::{Score, SolveResult, SolveStats};
use crate::species_set::SpeciesSet;

/// Largest ancestor set the bitmask encoding accepts.
pub const MAX_ANCESTORS: usize = 26;

#[derive(Clone, Debug)]
pub struct DpOptions {
    /// Worker threads used across subsets of one node; 1 runs sequentially.
    pub threads: usize,
}

impl Default for DpOptions {
    fn default() -> Self {
        DpOptions { threads: 1 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum SolveError {
    #[error("invalid extension: {}", .0.iter().map(|v| v.to_string()).collect::<Vec<_>>().join("; "))]
    Extension(Vec<ExtensionViolation>),
    #[error("ancestor set of size {0} exceeds the supported maximum of {MAX_ANCESTORS}")]
    WidthTooLarge(usize),
    #[error("too large: {n} species exceeds the brute-force limit of {limit}")]
    TooLarge { n: usize, limit: usize },
    #[error("internal error: {0}")]
    Internal(String),
}

/// Main-table row `S[v, ·, ·]` plus the breadcrumbs needed to rebuild a
/// witness.
#[derive(Clone, Debug)]
pub struct DpRow {
    v: SpeciesId,
    anc: Vec<SpeciesId>,
    cap: usize,
    values: Vec<Score>,
    take_self: Vec<bool>,
    // ((mask * 2 + p0) * t + j) * (cap + 1) + ℓ'  ->  ℓ_j
    splits: Vec<u32>,
    // per child: mask * 2 + p0  ->  child mask
    child_masks: Vec<Vec<u32>>,
}

impl DpRow {
    pub fn node(&self) -> SpeciesId {
        self.v
    }

    /// `A_v` in bit order.
    pub fn ancestors(&self) -> &[SpeciesId] {
        &self.anc
    }

    /// Largest stored size; entries beyond are `-∞`.
    pub fn cap(&self) -> usize {
        self.cap
    }

    pub fn masks(&self) -> usize {
        1 << self.anc.len()
    }

    pub fn get(&self, mask: usize, ell: usize) -> Score {
        if ell > self.cap {
            Score::NegInf
        } else {
            self.values[mask * (self.cap + 1) + ell]
        }
    }

    /// Entries `ℓ = 0..=cap` for one subset.
    pub fn slice(&self, mask: usize) -> &[Score] {
        &self.values[mask * (self.cap + 1)..(mask + 1) * (self.cap + 1)]
    }

    /// Whether the optimum at `(mask, ℓ)` includes `v` itself.
    pub fn takes_self(&self, mask: usize, ell: usize) -> bool {
        self.take_self[mask * (self.cap + 1) + ell]
    }

    /// Bitmask of `subset` over this row's ancestors, if `subset ⊆ A_v`.
    pub fn mask_of(&self, subset: &SpeciesSet) -> Option<usize> {
        let mut mask = 0;
        for s in subset.iter() {
            mask |= 1 << self.anc.iter().position(|&a| a == s)?;
        }
        Some(mask)
    }

    pub fn subset_of(&self, mask: usize, universe: usize) -> SpeciesSet {
        SpeciesSet::from_ids(
            universe,
            self.anc.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &a)| a),
        )
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// Merged child rows for one `(v, A', P₀)`: `values[j][ℓ']` is the best
/// total over the first `j + 1` children using `ℓ'` species.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AuxRow {
    pub values: Vec<Vec<Score>>,
    /// `splits[j][ℓ']`: size given to child `j` at the optimum; zero row for
    /// `j = 0`.
    pub splits: Vec<Vec<u32>>,
}

impl AuxRow {
    /// Final merge level, or the empty-partition row when there are no
    /// children.
    pub fn last(&self, cap: usize) -> Vec<Score> {
        match self.values.last() {
            Some(v) => v.clone(),
            None => {
                let mut id = vec![Score::NegInf; cap + 1];
                id[0] = Score::ZERO;
                id
            }
        }
    }
}

/// Max-plus convolution of `rows` in order, truncated to sizes `0..=cap`.
/// Missing trailing entries of a row count as `-∞`. Ties keep the smallest
/// size for the newer child.
pub fn aux_combine(rows: &[&[Score]], cap: usize) -> AuxRow {
    let mut values: Vec<Vec<Score>> = Vec::with_capacity(rows.len());
    let mut splits: Vec<Vec<u32>> = Vec::with_capacity(rows.len());
    for (j, row) in rows.iter().enumerate() {
        if j == 0 {
            let mut first = vec![Score::NegInf; cap + 1];
            for (l, &x) in row.iter().take(cap + 1).enumerate() {
                first[l] = x;
            }
            values.push(first);
            splits.push(vec![0; cap + 1]);
            continue;
        }
        let prev = &values[j - 1];
        let mut next = vec![Score::NegInf; cap + 1];
        let mut split = vec![0u32; cap + 1];
        for l in 0..=cap {
            for b in 0..=l.min(row.len().saturating_sub(1)) {
                let cand = prev[l - b] + row[b];
                if cand > next[l] {
                    next[l] = cand;
                    split[l] = b as u32;
                }
            }
        }
        values.push(next);
        splits.push(split);
    }
    AuxRow { values, splits }
}

/// Per-node inputs shared by the leaf and internal cases.
struct NodeCtx<'a> {
    inst: &'a PddInstance,
    v: SpeciesId,
    anc: &'a [SpeciesId],
    cap: usize,
}

impl NodeCtx<'_> {
    /// `P₀ = {v}` allowed, per subset.
    fn self_allowed(&self) -> Vec<bool> {
        let web = self.inst.web();
        let masks = 1usize << self.anc.len();
        if web.is_source(self.v) {
            return vec![true; masks];
        }
        let weights: Vec<Rational> = self
            .anc
            .iter()
            .map(|&a| {
                web.prey_of(self.v)
                    .iter()
                    .find(|(u, _)| *u == a)
                    .map(|&(_, arc)| self.inst.gamma(arc).clone())
                    .unwrap_or_else(Rational::zero)
            })
            .collect();
        let mut sums = vec![Rational::zero(); masks];
        for mask in 1..masks {
            let low = mask.trailing_zeros() as usize;
            sums[mask] = sums[mask & (mask - 1)].clone() + &weights[low];
        }
        sums.into_iter().map(|s| s >= Rational::one()).collect()
    }
}

struct MaskOut {
    values: Vec<Score>,
    take_self: Vec<bool>,
    splits: Vec<u32>,
    aux_entries: u64,
}

fn child_mask_table(v: SpeciesId, anc: &[SpeciesId], child: &DpRow) -> Vec<u32> {
    // bit source for each child ancestor: None = v itself
    let slots: Vec<Option<usize>> = child
        .anc
        .iter()
        .map(|&a| {
            if a == v {
                None
            } else {
                Some(anc.iter().position(|&x| x == a).expect("A_w ⊆ A_v ∪ {v}"))
            }
        })
        .collect();
    let masks = 1usize << anc.len();
    let mut table = vec![0u32; masks * 2];
    for mask in 0..masks {
        for p0 in 0..2 {
            let mut cm = 0u32;
            for (i, slot) in slots.iter().enumerate() {
                let bit = match slot {
                    None => p0 == 1,
                    Some(pos) => mask >> pos & 1 == 1,
                };
                cm |= (bit as u32) << i;
            }
            table[mask * 2 + p0] = cm;
        }
    }
    table
}

fn build_row(ctx: &NodeCtx<'_>, children: &[&DpRow], threads: usize) -> (DpRow, u64) {
    let masks = 1usize << ctx.anc.len();
    let cap = ctx.cap;
    let t = children.len();
    let allowed = ctx.self_allowed();
    let child_masks: Vec<Vec<u32>> = children.iter().map(|c| child_mask_table(ctx.v, ctx.anc, c)).collect();
    let d_self = Score::Finite(ctx.inst.diversity_of(ctx.v) as i64);

    let compute = |mask: usize| -> MaskOut {
        let mut values = vec![Score::NegInf; cap + 1];
        let mut take_self = vec![false; cap + 1];
        let mut splits = vec![0u32; 2 * t * (cap + 1)];
        let mut aux_entries = 0;
        for p0 in 0..2usize {
            if p0 == 1 && !allowed[mask] {
                continue;
            }
            let rows: Vec<&[Score]> = children
                .iter()
                .zip(&child_masks)
                .map(|(c, table)| c.slice(table[mask * 2 + p0] as usize))
                .collect();
            let aux = aux_combine(&rows, cap);
            aux_entries += (t * (cap + 1)) as u64;
            let merged = aux.last(cap);
            let gain = if p0 == 1 { d_self } else { Score::ZERO };
            for l in p0..=cap {
                let cand = gain + merged[l - p0];
                if cand > values[l] {
                    values[l] = cand;
                    take_self[l] = p0 == 1;
                }
            }
            for (j, split) in aux.splits.iter().enumerate() {
                let at = (p0 * t + j) * (cap + 1);
                splits[at..at + cap + 1].copy_from_slice(split);
            }
        }
        MaskOut {
            values,
            take_self,
            splits,
            aux_entries,
        }
    };

    let outs: Vec<MaskOut> = if threads > 1 && masks > 1 {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| (0..masks).into_par_iter().map(compute).collect())
    } else {
        (0..masks).map(compute).collect()
    };

    let mut values = Vec::with_capacity(masks * (cap + 1));
    let mut take_self = Vec::with_capacity(masks * (cap + 1));
    let mut splits = Vec::with_capacity(masks * 2 * t * (cap + 1));
    let mut aux_entries = 0;
    for out in outs {
        values.extend(out.values);
        take_self.extend(out.take_self);
        splits.extend(out.splits);
        aux_entries += out.aux_entries;
    }
    let row = DpRow {
        v: ctx.v,
        anc: ctx.anc.to_vec(),
        cap,
        values,
        take_self,
        splits,
        child_masks,
    };
    (row, aux_entries)
}

/// Row of a leaf `v` with ancestor set `anc`.
pub fn dp_leaf(inst: &PddInstance, v: SpeciesId, anc: &[SpeciesId], budget: usize) -> DpRow {
    let ctx = NodeCtx {
        inst,
        v,
        anc,
        cap: budget.min(1),
    };
    build_row(&ctx, &[], 1).0
}

/// Row of an internal node from its children's rows, given in child order.
/// `cap` is `min(B', |Z_v|)`.
pub fn dp_internal(
    inst: &PddInstance,
    v: SpeciesId,
    anc: &[SpeciesId],
    children: &[&DpRow],
    cap: usize,
    opts: &DpOptions,
) -> DpRow {
    let ctx = NodeCtx { inst, v, anc, cap };
    build_row(&ctx, children, opts.threads).0
}

/// All rows of the program, indexed by species.
#[derive(Clone, Debug)]
pub struct DpTables {
    rows: Vec<DpRow>,
    budget: usize,
    root: Option<SpeciesId>,
    pub stats: SolveStats,
}

impl DpTables {
    pub fn row(&self, v: SpeciesId) -> &DpRow {
        &self.rows[v.0]
    }

    pub fn budget(&self) -> usize {
        self.budget
    }

    /// `S[v, A', ℓ]`; `None` if `subset ⊄ A_v`.
    pub fn entry(&self, v: SpeciesId, subset: &SpeciesSet, ell: usize) -> Option<Score> {
        let row = &self.rows[v.0];
        row.mask_of(subset).map(|m| row.get(m, ell))
    }

    /// `max_{ℓ ≤ B'} S[ρ, ∅, ℓ]` and the smallest size attaining it.
    pub fn optimum(&self) -> (Score, usize) {
        let Some(root) = self.root else {
            return (Score::ZERO, 0);
        };
        let row = &self.rows[root.0];
        let mut best = (Score::NegInf, 0);
        for l in 0..=self.budget.min(row.cap) {
            if row.get(0, l) > best.0 {
                best = (row.get(0, l), l);
            }
        }
        best
    }
}

/// Fills every row bottom-up over `t`.
pub fn fill_tables(inst: &PddInstance, t: &TreeExtension, opts: &DpOptions) -> Result<DpTables, SolveError> {
    let start = Instant::now();
    validate_extension(inst.web(), t).map_err(SolveError::Extension)?;
    let n = inst.len();
    let budget = (inst.budget().min(n as u64)) as usize;
    let anc = ancestor_sets(inst.web(), t);
    let widest = anc.max_len();
    if widest > MAX_ANCESTORS {
        return Err(SolveError::WidthTooLarge(widest));
    }
    let mut subtree = vec![1usize; n];
    let mut rows: Vec<Option<DpRow>> = vec![None; n];
    let mut stats = SolveStats {
        max_ancestors: widest,
        budget,
        ..Default::default()
    };
    for v in t.postorder() {
        for &c in t.children(v) {
            subtree[v.0] += subtree[c.0];
        }
        let children: Vec<&DpRow> = t
            .children(v)
            .iter()
            .map(|c| rows[c.0].as_ref().expect("children precede parents in postorder"))
            .collect();
        let ctx = NodeCtx {
            inst,
            v,
            anc: anc.members(v),
            cap: budget.min(subtree[v.0]),
        };
        let (row, aux) = build_row(&ctx, &children, opts.threads);
        stats.main_entries += row.len() as u64;
        stats.aux_entries += aux;
        rows[v.0] = Some(row);
    }
    stats.elapsed = start.elapsed();
    Ok(DpTables {
        rows: rows.into_iter().map(|r| r.expect("every node filled")).collect(),
        budget,
        root: t.root(),
        stats,
    })
}

/// Rebuilds an optimal set by walking the breadcrumbs down from the root.
pub fn extract_witness(tables: &DpTables, t: &TreeExtension, inst: &PddInstance) -> Result<SpeciesSet, SolveError> {
    let mut set = inst.empty_set();
    let Some(root) = t.root() else {
        return Ok(set);
    };
    let (best, ell) = tables.optimum();
    if !best.is_finite() {
        return Err(SolveError::Internal("no finite root entry".into()));
    }
    let mut stack = vec![(root, 0usize, ell)];
    while let Some((v, mask, ell)) = stack.pop() {
        let row = &tables.rows[v.0];
        if !row.get(mask, ell).is_finite() {
            return Err(SolveError::Internal(format!(
                "breadcrumb leads to -inf at node {} (mask {mask}, size {ell})",
                inst.web().name(v)
            )));
        }
        let p0 = row.takes_self(mask, ell) as usize;
        if p0 == 1 {
            set.insert(v);
        }
        let mut rem = ell - p0;
        let kids = t.children(v);
        let k = kids.len();
        if k == 0 {
            if rem != 0 {
                return Err(SolveError::Internal(format!("leaf {} asked for {rem} more", inst.web().name(v))));
            }
            continue;
        }
        for j in (0..k).rev() {
            let lj = if j == 0 {
                rem
            } else {
                row.splits[((mask * 2 + p0) * k + j) * (row.cap + 1) + rem] as usize
            };
            let cm = row.child_masks[j][mask * 2 + p0] as usize;
            stack.push((kids[j], cm, lj));
            rem -= lj;
        }
    }
    Ok(set)
}

/// Solves `inst` over the extension `t`.
pub fn solve_dp(inst: &PddInstance, t: &TreeExtension, opts: &DpOptions) -> Result<SolveResult, SolveError> {
    let start = Instant::now();
    let tables = fill_tables(inst, t, opts)?;
    let (optimum, _) = tables.optimum();
    let witness = extract_witness(&tables, t, inst)?;
    let mut stats = tables.stats.clone();
    stats.elapsed = start.elapsed();
    let decision = optimum.finite().is_some_and(|x| x as u64 >= inst.target());
    Ok(SolveResult {
        optimum,
        witness: Some(witness),
        decision,
        stats,
    })
}
