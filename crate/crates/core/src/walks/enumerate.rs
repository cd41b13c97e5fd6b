//! Counting walks whose traversed edges form a simple path with every edge
//! used at least twice.

use std::collections::{BTreeMap, HashSet};

use crate::error::{Error, Result};

/// Longest walk the enumerators accept.
pub const WALK_LENGTH_CAP: usize = 14;

/// `counts[s]` is the number of canonical walks of length `t` covering a path
/// of `s` edges, each edge traversed at least twice.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct WalkCountTable {
    pub t: usize,
    pub counts: BTreeMap<usize, u64>,
}

fn check_length(t: usize) -> Result<()> {
    if t == 0 {
        return Err(Error::InvalidParameter("walk length must be positive".into()));
    }
    if t % 2 == 1 {
        return Err(Error::OddLength(t));
    }
    if t > WALK_LENGTH_CAP {
        return Err(Error::BudgetExceeded { requested: t, cap: WALK_LENGTH_CAP });
    }
    Ok(())
}

/// Enumerates walks in canonical first-visit labelling: every step goes to an
/// already visited vertex or to the next unused label.
///
/// A new edge may only lead to a fresh vertex from an endpoint of degree below
/// two, so the edge set stays a simple path. A prefix is abandoned once more
/// edges have multiplicity one than there are steps left.
pub fn count_even_path_walks(t: usize) -> Result<WalkCountTable> {
    check_length(t)?;
    Ok(WalkCountTable { t, counts: count_path_walks_unchecked(t) })
}

pub(crate) fn count_path_walks_unchecked(t: usize) -> BTreeMap<usize, u64> {
    let size = t + 2;
    let mut state = Search {
        t,
        size,
        mult: vec![0u8; size * size],
        deg: vec![0u8; size],
        singles: 0,
        edges: 0,
        counts: BTreeMap::new(),
    };
    state.walk(0, 0, 1);
    state.counts
}

struct Search {
    t: usize,
    size: usize,
    mult: Vec<u8>,
    deg: Vec<u8>,
    singles: usize,
    edges: usize,
    counts: BTreeMap<usize, u64>,
}

impl Search {
    fn walk(&mut self, step: usize, cur: usize, visited: usize) {
        if self.singles > self.t - step {
            return;
        }
        if step == self.t {
            *self.counts.entry(self.edges).or_insert(0) += 1;
            return;
        }
        for v in 0..=visited {
            if v == cur || v >= self.size {
                continue;
            }
            let (a, b) = (cur.min(v), cur.max(v));
            let idx = a * self.size + b;
            match self.mult[idx] {
                0 => {
                    if v < visited || self.deg[cur] >= 2 {
                        continue;
                    }
                    self.mult[idx] = 1;
                    self.deg[cur] += 1;
                    self.deg[v] += 1;
                    self.singles += 1;
                    self.edges += 1;
                    self.walk(step + 1, v, visited + 1);
                    self.mult[idx] = 0;
                    self.deg[cur] -= 1;
                    self.deg[v] -= 1;
                    self.singles -= 1;
                    self.edges -= 1;
                }
                m => {
                    self.mult[idx] = m + 1;
                    if m == 1 {
                        self.singles -= 1;
                    }
                    self.walk(step + 1, v, visited);
                    if m == 1 {
                        self.singles += 1;
                    }
                    self.mult[idx] = m;
                }
            }
        }
    }
}

/// Second enumerator built on a different principle: every labelled walk over
/// a pool of `t/2 + 1` vertices is generated, its multigraph is tested
/// directly, and isomorphic copies are merged by relabelling vertices in
/// order of first visit. Exponential in `t`; meant for cross-checks only.
pub fn count_even_path_walks_bruteforce(t: usize) -> Result<WalkCountTable> {
    check_length(t)?;
    if t > 8 {
        return Err(Error::BudgetExceeded { requested: t, cap: 8 });
    }
    let pool = t / 2 + 1;
    let mut seen: HashSet<Vec<u8>> = HashSet::new();
    let mut counts = BTreeMap::new();
    let mut seq = vec![0u8; t + 1];
    let total = pool.pow(t as u32 + 1);
    for code in 0..total {
        let mut c = code;
        for x in seq.iter_mut() {
            *x = (c % pool) as u8;
            c /= pool;
        }
        if seq.windows(2).any(|w| w[0] == w[1]) {
            continue;
        }
        let Some(edges) = path_edge_count(&seq, pool) else { continue };
        let canon = relabel(&seq);
        if seen.insert(canon) {
            *counts.entry(edges).or_insert(0) += 1;
        }
    }
    Ok(WalkCountTable { t, counts })
}

/// Number of distinct edges when they form a simple path with all
/// multiplicities at least two.
fn path_edge_count(seq: &[u8], pool: usize) -> Option<usize> {
    let mut mult = vec![0usize; pool * pool];
    for w in seq.windows(2) {
        let (a, b) = (w[0].min(w[1]) as usize, w[0].max(w[1]) as usize);
        mult[a * pool + b] += 1;
    }
    let edges: Vec<(usize, usize)> = (0..pool)
        .flat_map(|a| (a + 1..pool).map(move |b| (a, b)))
        .filter(|&(a, b)| mult[a * pool + b] > 0)
        .collect();
    if edges.iter().any(|&(a, b)| mult[a * pool + b] < 2) {
        return None;
    }
    let mut deg = vec![0usize; pool];
    let mut parent: Vec<usize> = (0..pool).collect();
    fn find(p: &mut [usize], x: usize) -> usize {
        let mut r = x;
        while p[r] != r {
            r = p[r];
        }
        p[x] = r;
        r
    }
    for &(a, b) in &edges {
        deg[a] += 1;
        deg[b] += 1;
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra == rb {
            return None;
        }
        parent[ra] = rb;
    }
    let vertices = deg.iter().filter(|&&d| d > 0).count();
    (deg.iter().all(|&d| d <= 2) && vertices == edges.len() + 1).then_some(edges.len())
}

fn relabel(seq: &[u8]) -> Vec<u8> {
    let mut map = [u8::MAX; 256];
    let mut next = 0u8;
    seq.iter()
        .map(|&v| {
            if map[v as usize] == u8::MAX {
                map[v as usize] = next;
                next += 1;
            }
            map[v as usize]
        })
        .collect()
}
