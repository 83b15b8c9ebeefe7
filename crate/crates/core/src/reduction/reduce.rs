//! The reduction proper.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::foodweb::{diversity, first_starving, make_alpha_instance, FoodWeb, PddInstance, SpeciesId};
use crate::rational::Rational;
use crate::species_set::SpeciesSet;

use super::cds::{CdsInstance, CdsSolution};
use super::widgets::{build_quota, build_selector, WebBuilder, WidgetKind, WidgetSpec};
use super::ReductionError;

/// The integers every widget and the budget/target are built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct ReductionParams {
    pub n: u64,
    pub m: u64,
    pub c: u64,
    pub b: u64,
    pub d0: u64,
    pub d1: u64,
    pub d: u64,
}

/// `C = 3m + 1`, `B = Ck + C·Σc + 2n + 4m`, `D₀ = 2n(C + B) + 2m(2C + 5)`,
/// `D₁ = (n + 1)D₀`, `D = 2nD₁ + kD₀`.
pub fn derive_params(cds: &CdsInstance) -> Result<ReductionParams, ReductionError> {
    fn go(cds: &CdsInstance) -> Option<ReductionParams> {
        let n = cds.len() as u64;
        let m = cds.edges().len() as u64;
        let k = cds.k();
        let cap_sum = cds.capacities().iter().try_fold(0u64, |acc, &x| acc.checked_add(x))?;
        let c = m.checked_mul(3)?.checked_add(1)?;
        let b = c
            .checked_mul(k)?
            .checked_add(c.checked_mul(cap_sum)?)?
            .checked_add(n.checked_mul(2)?)?
            .checked_add(m.checked_mul(4)?)?;
        let d0 = n
            .checked_mul(2)?
            .checked_mul(c.checked_add(b)?)?
            .checked_add(m.checked_mul(2)?.checked_mul(c.checked_mul(2)?.checked_add(5)?)?)?;
        let d1 = n.checked_add(1)?.checked_mul(d0)?;
        let d = n.checked_mul(2)?.checked_mul(d1)?.checked_add(k.checked_mul(d0)?)?;
        Some(ReductionParams { n, m, c, b, d0, d1, d })
    }
    go(cds).ok_or(ReductionError::Overflow)
}

/// The three widgets owned by one CDS vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexWidgets {
    /// `S_v`, rooted at `v₀`.
    pub selector: WidgetSpec,
    /// `Q_v¹`, rooted at `v₁`.
    pub q1: WidgetSpec,
    /// `Q_v²`, rooted at `v₂`.
    pub q2: WidgetSpec,
}

/// How the reduced instance decomposes into widgets.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReductionMap {
    pub params: ReductionParams,
    /// The normalized input the instance was built from.
    pub cds: CdsInstance,
    pub vertices: Vec<VertexWidgets>,
    /// `Q_{u,v}` keyed by the ordered pair `(u, v)`.
    pub edges: BTreeMap<(usize, usize), WidgetSpec>,
}

impl ReductionMap {
    pub fn v0(&self, v: usize) -> SpeciesId {
        self.vertices[v].selector.root
    }

    pub fn v1(&self, v: usize) -> SpeciesId {
        self.vertices[v].q1.root
    }

    pub fn v2(&self, v: usize) -> SpeciesId {
        self.vertices[v].q2.root
    }

    pub fn e(&self, u: usize, v: usize) -> Option<SpeciesId> {
        self.edges.get(&(u, v)).map(|w| w.root)
    }

    /// Every widget, vertex widgets first.
    pub fn widgets(&self) -> impl Iterator<Item = &WidgetSpec> + '_ {
        self.vertices
            .iter()
            .flat_map(|w| [&w.selector, &w.q1, &w.q2])
            .chain(self.edges.values())
    }
}

pub fn root_v0(x: &str) -> String {
    format!("v0@{x}")
}

pub fn root_v1(x: &str) -> String {
    format!("v1@{x}")
}

pub fn root_v2(x: &str) -> String {
    format!("v2@{x}")
}

pub fn root_e(u: &str, v: &str) -> String {
    format!("e@{u}>{v}")
}

/// Builds the ½-PDD instance of a CDS instance. Capacities are clamped to
/// degrees and `k` to `n` first.
pub fn reduce_cds(cds: &CdsInstance) -> Result<(PddInstance, ReductionMap), ReductionError> {
    let cds = cds.normalized();
    let p = derive_params(&cds)?;
    let mut b = WebBuilder::default();
    let mut vertices = Vec::with_capacity(cds.len());
    for v in 0..cds.len() {
        let x = cds.name(v);
        let deg = cds.degree(v) as u64;
        let selector = build_selector(&mut b, p.c, &root_v0(x))?;
        let q1 = build_quota(&mut b, deg, 0, cds.capacity(v), p.c + 1, p.b, &root_v1(x))?;
        let q2 = build_quota(&mut b, deg + 1, 1, 1, 1, p.b, &root_v2(x))?;
        vertices.push(VertexWidgets { selector, q1, q2 });
    }
    let mut edges = BTreeMap::new();
    for &(u, v) in cds.edges() {
        for (s, t) in [(u, v), (v, u)] {
            let w = build_quota(&mut b, 1, 1, 2, p.c, p.b, &root_e(cds.name(s), cds.name(t)))?;
            edges.insert((s, t), w);
        }
    }
    for w in &vertices {
        b.arc(w.selector.root, w.q2.root);
    }
    for &(u, v) in cds.edges() {
        for (s, t) in [(u, v), (v, u)] {
            let e_st = edges[&(s, t)].root;
            let e_ts = edges[&(t, s)].root;
            b.arc(vertices[s].selector.root, e_st);
            b.arc(e_st, vertices[s].q1.root);
            b.arc(e_ts, vertices[s].q2.root);
        }
    }
    let mut div = vec![1u64; b.len()];
    for w in &vertices {
        div[w.selector.root.0] = p.d0;
        div[w.q1.root.0] = p.d1;
        div[w.q2.root.0] = p.d1;
    }
    let web = FoodWeb::from_indexed(b.names, b.arcs)?;
    let inst = make_alpha_instance(web, &Rational::new(1, 2), div, p.b, p.d)?;
    let map = ReductionMap {
        params: p,
        cds,
        vertices,
        edges,
    };
    Ok((inst, map))
}

/// Adds the root of a quota widget and just enough of its interior, given
/// that `present` of its external prey are already selected.
fn fill_quota(w: &WidgetSpec, present: u64, p: &mut SpeciesSet) -> Result<(), ReductionError> {
    let WidgetKind::Quota { delta, ell, r, m } = w.kind else {
        return Err(ReductionError::WitnessFailed("expected a quota widget".into()));
    };
    if present < ell || present > delta {
        return Err(ReductionError::WitnessFailed(format!(
            "quota needs {ell}..={delta} external prey, got {present}"
        )));
    }
    let t = delta.max(r);
    p.insert(w.root);
    let small = (w.small.len() as u64).min(t - present) as usize;
    for &s in &w.small[..small] {
        p.insert(s);
    }
    let medium = r.saturating_sub(present) as usize;
    for (i, &x) in w.medium[..medium].iter().enumerate() {
        p.insert(x);
        for &y in &w.medium_prey[i][..(m - 1) as usize] {
            p.insert(y);
        }
    }
    Ok(())
}

/// The species set a CDS solution translates to: viable, within budget and
/// reaching the target.
pub fn forward_witness(
    cds: &CdsInstance,
    sol: &CdsSolution,
    map: &ReductionMap,
) -> Result<SpeciesSet, ReductionError> {
    if cds.normalized() != map.cds {
        return Err(ReductionError::Precondition("map was built from a different CDS instance".into()));
    }
    let g = &map.cds;
    sol.validate(g)?;
    let n = g.len();
    let k = g.k() as usize;

    let mut in_s = vec![false; n];
    for &v in &sol.dominating {
        in_s[v] = true;
    }
    let mut size = sol.dominating.len();
    for slot in in_s.iter_mut() {
        if size >= k {
            break;
        }
        if !*slot {
            *slot = true;
            size += 1;
        }
    }
    let f: BTreeMap<usize, usize> = sol
        .assignment
        .iter()
        .filter(|(v, _)| !in_s[**v])
        .map(|(&v, &u)| (v, u))
        .collect();
    let mut load = vec![0u64; n];
    for &u in f.values() {
        load[u] += 1;
    }

    let c = map.params.c as usize;
    let total: usize = map.widgets().map(WidgetSpec::len).sum();
    let mut p = SpeciesSet::empty(total);
    for v in 0..n {
        let w = &map.vertices[v];
        if in_s[v] {
            p.insert(w.selector.root);
            for &leaf in &w.selector.leaves[..c - 1] {
                p.insert(leaf);
            }
        } else {
            let e = &map.edges[&(f[&v], v)];
            fill_quota(e, 1, &mut p)?;
        }
        fill_quota(&w.q1, load[v], &mut p)?;
        fill_quota(&w.q2, 1, &mut p)?;
    }
    Ok(p)
}

/// Reads a CDS solution back off a viable set that meets the budget and the
/// target: `S` is the set of vertices whose `v₀` is selected and `f(v)` the
/// smallest `u` with `e_{u,v}` selected.
pub fn extract_cds_solution(
    map: &ReductionMap,
    inst: &PddInstance,
    p: &SpeciesSet,
) -> Result<CdsSolution, ReductionError> {
    if p.universe() != inst.len() {
        return Err(ReductionError::Precondition(format!(
            "set over {} species, instance has {}",
            p.universe(),
            inst.len()
        )));
    }
    if let Some((v, got)) = first_starving(inst, p) {
        return Err(ReductionError::Precondition(format!(
            "not viable: {} lacks prey ({got} < 1)",
            inst.web().name(v)
        )));
    }
    if p.len() as u64 > inst.budget() {
        return Err(ReductionError::Precondition(format!(
            "|P| = {} exceeds B = {}",
            p.len(),
            inst.budget()
        )));
    }
    let d = diversity(inst, p);
    if d < inst.target() as i64 {
        return Err(ReductionError::Precondition(format!(
            "diversity {d} below D = {}",
            inst.target()
        )));
    }
    let g = &map.cds;
    let dominating: Vec<usize> = (0..g.len()).filter(|&v| p.contains(map.v0(v))).collect();
    let mut assignment = BTreeMap::new();
    for v in 0..g.len() {
        if p.contains(map.v0(v)) {
            continue;
        }
        let Some(&u) = g
            .neighbours(v)
            .iter()
            .find(|&&u| map.e(u, v).is_some_and(|e| p.contains(e)))
        else {
            return Err(ReductionError::ExtractionFailed(format!("no e[*>{}] selected", g.name(v))));
        };
        assignment.insert(v, u);
    }
    let sol = CdsSolution {
        dominating,
        assignment,
    };
    sol.validate(g)
        .map_err(|e| ReductionError::ExtractionFailed(e.to_string()))?;
    Ok(sol)
}

/// Recovers the (normalized) CDS instance and the widget map of a reduced
/// instance from its species names alone, then checks that reducing the
/// recovered instance reproduces `inst` exactly.
pub fn recover_reduction(inst: &PddInstance) -> Result<(CdsInstance, ReductionMap), ReductionError> {
    let bad = |msg: String| ReductionError::NotReduced(msg);
    let mut names: Vec<String> = Vec::new();
    let mut index: BTreeMap<String, usize> = BTreeMap::new();
    let mut ordered: Vec<(String, String)> = Vec::new();
    let mut medium: BTreeMap<String, u64> = BTreeMap::new();
    for name in inst.web().names() {
        let mut parts = name.split('.');
        let root = parts.next().unwrap_or_default();
        let role = parts.next();
        if let Some(x) = root.strip_prefix("v0@") {
            if role.is_none() {
                index.insert(x.to_string(), names.len());
                names.push(x.to_string());
            }
        } else if let Some(x) = root.strip_prefix("v1@") {
            if role.is_some_and(|r| r.starts_with("med")) && parts.next().is_none() {
                *medium.entry(x.to_string()).or_default() += 1;
            }
        } else if let Some(pair) = root.strip_prefix("e@") {
            if role.is_none() {
                let (u, v) = pair.split_once('>').ok_or_else(|| bad(format!("malformed edge root `{name}`")))?;
                ordered.push((u.to_string(), v.to_string()));
            }
        } else if !root.starts_with("v2@") {
            return Err(bad(format!("unexpected species `{name}`")));
        }
    }
    let mut edges = Vec::new();
    let mut seen = std::collections::BTreeSet::new();
    for (u, v) in &ordered {
        let (Some(&a), Some(&b)) = (index.get(u), index.get(v)) else {
            return Err(bad(format!("edge {u}>{v} names an unknown vertex")));
        };
        if seen.insert((a.min(b), a.max(b))) {
            edges.push((a, b));
        }
    }
    let capacity: Vec<u64> = names.iter().map(|x| medium.get(x).copied().unwrap_or(0)).collect();
    let base = CdsInstance::from_indexed(names.clone(), edges.clone(), capacity.clone(), 0)?;
    let p0 = derive_params(&base)?;
    // B grows by exactly C per unit of k
    let k = (inst.budget().checked_sub(p0.b)).filter(|x| x % p0.c == 0).map(|x| x / p0.c);
    let k = k.ok_or_else(|| bad(format!("budget {} does not fit the recovered graph", inst.budget())))?;
    let cds = CdsInstance::from_indexed(names, edges, capacity, k)?;
    let (rebuilt, map) = reduce_cds(&cds)?;
    if rebuilt.to_draft() != inst.to_draft() {
        return Err(bad("reducing the recovered CDS instance gives a different instance".into()));
    }
    Ok((map.cds.clone(), map))
}
