//! Capacitated Dominating Set instances, solutions and an exhaustive oracle.

use std::collections::{BTreeMap, HashMap, HashSet};

pub const CDS_BRUTE_LIMIT: usize = 16;

#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
pub enum CdsError {
    #[error("bad vertex name `{0}` (expected [A-Za-z0-9_-]+)")]
    BadName(String),
    #[error("duplicate vertex `{0}`")]
    DuplicateVertex(String),
    #[error("unknown vertex `{0}`")]
    UnknownVertex(String),
    #[error("self-loop on `{0}`")]
    SelfLoop(String),
    #[error("parallel edge {0} -- {1}")]
    ParallelEdge(String, String),
    #[error("invalid solution: {0}")]
    InvalidSolution(String),
    #[error("too large: {n} vertices exceeds the brute-force limit of {limit}")]
    TooLarge { n: usize, limit: usize },
}

/// Vertex names stay within this alphabet so that reduced species names
/// (`v0@x`, `e@u>v`, `x.big0.p3`, ...) parse back unambiguously.
pub fn is_vertex_name(name: &str) -> bool {
    !name.is_empty() && name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-')
}

/// `(G, c, k)`: a simple undirected graph with vertex capacities and a
/// budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CdsInstance {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
    capacity: Vec<u64>,
    k: u64,
}

impl CdsInstance {
    pub fn new<S: AsRef<str>>(
        vertices: &[(S, u64)],
        edges: &[(S, S)],
        k: u64,
    ) -> Result<Self, CdsError> {
        let mut index = HashMap::new();
        let mut names = Vec::with_capacity(vertices.len());
        let mut capacity = Vec::with_capacity(vertices.len());
        for (name, cap) in vertices {
            let name = name.as_ref();
            if !is_vertex_name(name) {
                return Err(CdsError::BadName(name.to_string()));
            }
            if index.insert(name.to_string(), names.len()).is_some() {
                return Err(CdsError::DuplicateVertex(name.to_string()));
            }
            names.push(name.to_string());
            capacity.push(*cap);
        }
        let lookup = |s: &str| index.get(s).copied().ok_or_else(|| CdsError::UnknownVertex(s.to_string()));
        let mut resolved = Vec::with_capacity(edges.len());
        for (u, v) in edges {
            resolved.push((lookup(u.as_ref())?, lookup(v.as_ref())?));
        }
        Self::from_indexed(names, resolved, capacity, k)
    }

    pub fn from_indexed(
        names: Vec<String>,
        edges: Vec<(usize, usize)>,
        capacity: Vec<u64>,
        k: u64,
    ) -> Result<Self, CdsError> {
        assert_eq!(names.len(), capacity.len());
        let n = names.len();
        let mut index = HashMap::with_capacity(n);
        for (i, name) in names.iter().enumerate() {
            if !is_vertex_name(name) {
                return Err(CdsError::BadName(name.clone()));
            }
            if index.insert(name.clone(), i).is_some() {
                return Err(CdsError::DuplicateVertex(name.clone()));
            }
        }
        let mut adj = vec![Vec::new(); n];
        let mut seen = HashSet::new();
        for &(u, v) in &edges {
            assert!(u < n && v < n, "edge endpoint out of range");
            if u == v {
                return Err(CdsError::SelfLoop(names[u].clone()));
            }
            if !seen.insert((u.min(v), u.max(v))) {
                return Err(CdsError::ParallelEdge(names[u].clone(), names[v].clone()));
            }
            adj[u].push(v);
            adj[v].push(u);
        }
        for list in &mut adj {
            list.sort();
        }
        Ok(CdsInstance {
            names,
            index,
            edges,
            adj,
            capacity,
            k,
        })
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }

    pub fn name(&self, v: usize) -> &str {
        &self.names[v]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn lookup(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbours(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn is_adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    pub fn capacity(&self, v: usize) -> u64 {
        self.capacity[v]
    }

    pub fn capacities(&self) -> &[u64] {
        &self.capacity
    }

    pub fn k(&self) -> u64 {
        self.k
    }

    /// Capacities clamped to degrees and `k` clamped to `n`; the answer is
    /// unchanged since no vertex can dominate more than its neighbours.
    pub fn normalized(&self) -> CdsInstance {
        let mut out = self.clone();
        for v in 0..self.len() {
            out.capacity[v] = self.capacity[v].min(self.degree(v) as u64);
        }
        out.k = self.k.min(self.len() as u64);
        out
    }
}

/// `(S, f)` with `f: V \ S -> S`.
#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct CdsSolution {
    /// Sorted.
    pub dominating: Vec<usize>,
    /// `f`, keyed by dominated vertex.
    pub assignment: BTreeMap<usize, usize>,
}

impl CdsSolution {
    /// `k_u = |f⁻¹(u)|` for every vertex.
    pub fn loads(&self, n: usize) -> Vec<u64> {
        let mut load = vec![0; n];
        for &u in self.assignment.values() {
            load[u] += 1;
        }
        load
    }

    pub fn validate(&self, cds: &CdsInstance) -> Result<(), CdsError> {
        let bad = |msg: String| Err(CdsError::InvalidSolution(msg));
        let n = cds.len();
        let mut in_set = vec![false; n];
        for &v in &self.dominating {
            if v >= n {
                return bad(format!("vertex {v} out of range"));
            }
            if in_set[v] {
                return bad(format!("{} listed twice", cds.name(v)));
            }
            in_set[v] = true;
        }
        if self.dominating.len() as u64 > cds.k() {
            return bad(format!("|S| = {} exceeds k = {}", self.dominating.len(), cds.k()));
        }
        for v in 0..n {
            match (in_set[v], self.assignment.get(&v)) {
                (true, Some(_)) => return bad(format!("{} is in S but also assigned", cds.name(v))),
                (false, None) => return bad(format!("{} is not dominated", cds.name(v))),
                (false, Some(&u)) => {
                    if u >= n || !in_set[u] {
                        return bad(format!("{} assigned to a vertex outside S", cds.name(v)));
                    }
                    if !cds.is_adjacent(u, v) {
                        return bad(format!("{} assigned to non-neighbour {}", cds.name(v), cds.name(u)));
                    }
                }
                (true, None) => {}
            }
        }
        if self.assignment.keys().any(|&v| v >= n) {
            return bad("assignment key out of range".into());
        }
        for (u, load) in self.loads(n).into_iter().enumerate() {
            if load > cds.capacity(u) {
                return bad(format!("{} dominates {load} > capacity {}", cds.name(u), cds.capacity(u)));
            }
        }
        Ok(())
    }
}

/// Capacitated assignment of `V \ S` to adjacent members of `S`, by
/// augmenting paths. Neighbours are tried in index order.
pub fn assign_dominated(cds: &CdsInstance, dominating: &[usize]) -> Option<BTreeMap<usize, usize>> {
    let n = cds.len();
    let mut in_set = vec![false; n];
    for &v in dominating {
        in_set[v] = true;
    }
    let mut owned: Vec<Vec<usize>> = vec![Vec::new(); n];
    let mut owner: Vec<Option<usize>> = vec![None; n];

    fn augment(
        cds: &CdsInstance,
        in_set: &[bool],
        v: usize,
        visited: &mut [bool],
        owned: &mut [Vec<usize>],
        owner: &mut [Option<usize>],
    ) -> bool {
        for &u in cds.neighbours(v) {
            if !in_set[u] || visited[u] {
                continue;
            }
            visited[u] = true;
            if (owned[u].len() as u64) < cds.capacity(u) {
                owned[u].push(v);
                owner[v] = Some(u);
                return true;
            }
            for i in 0..owned[u].len() {
                let other = owned[u][i];
                if augment(cds, in_set, other, visited, owned, owner) {
                    owned[u][i] = v;
                    owner[v] = Some(u);
                    return true;
                }
            }
        }
        false
    }

    for v in 0..n {
        if in_set[v] {
            continue;
        }
        let mut visited = vec![false; n];
        if !augment(cds, &in_set, v, &mut visited, &mut owned, &mut owner) {
            return None;
        }
    }
    Some((0..n).filter_map(|v| owner[v].map(|u| (v, u))).collect())
}

/// The first feasible `(S, f)` with `S` in lexicographic order, or `None`.
pub fn solve_cds_bruteforce(cds: &CdsInstance) -> Result<Option<CdsSolution>, CdsError> {
    let n = cds.len();
    if n > CDS_BRUTE_LIMIT {
        return Err(CdsError::TooLarge {
            n,
            limit: CDS_BRUTE_LIMIT,
        });
    }
    let k = cds.k().min(n as u64) as usize;
    let mut candidates: Vec<Vec<usize>> = (0u32..1 << n)
        .filter(|m| m.count_ones() as usize <= k)
        .map(|m| (0..n).filter(|&i| m >> i & 1 == 1).collect())
        .collect();
    candidates.sort();
    for dominating in candidates {
        if let Some(assignment) = assign_dominated(cds, &dominating) {
            return Ok(Some(CdsSolution {
                dominating,
                assignment,
            }));
        }
    }
    Ok(None)
}

#[cfg(test)]
pub(crate) mod fixtures {
    use super::*;

    /// a–b, b–d, b–c, d–c with capacities a:1, b:1, c:2, d:2.
    pub fn fig1(k: u64) -> CdsInstance {
        CdsInstance::new(
            &[("a", 1), ("b", 1), ("c", 2), ("d", 2)],
            &[("a", "b"), ("b", "d"), ("b", "c"), ("d", "c")],
            k,
        )
        .unwrap()
    }

    pub fn single(c: u64, k: u64) -> CdsInstance {
        CdsInstance::new(&[("v", c)], &[], k).unwrap()
    }
}
