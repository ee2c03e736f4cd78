//! The sets `V_0 = M(k)` and `V_j = {α : n_j(α) ≥ k − 1}`, and the four
//! checks behind the level-`k` certificate: the union of their cliques covers
//! every Cayley edge, is chordal, the sets satisfy running intersection, and
//! the translate `α ↦ α − j·(1,…,1)` carries each `V_j` into `V_0`.

use super::{build_cayley, group_size, signature, Exponent};
use crate::error::Result;
use fixedbitset::FixedBitSet;

#[derive(Debug, Clone)]
pub struct CoverSets {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// `sets[j]` holds the codes of `V_j`.
    pub sets: Vec<FixedBitSet>,
}

impl CoverSets {
    pub fn sizes(&self) -> Vec<usize> {
        self.sets.iter().map(|s| s.count_ones(..)).collect()
    }

    pub fn members(&self, j: usize) -> Vec<Exponent> {
        self.sets[j].ones().map(|c| Exponent::from_code(c, self.n, self.m)).collect()
    }
}

/// The cover at the level `k = ⌊n/2⌋ + 1`.
pub fn build_cover_sets(n: usize, m: usize, budget: usize) -> Result<CoverSets> {
    build_cover_sets_at_level(n, m, n / 2 + 1, budget)
}

pub fn build_cover_sets_at_level(n: usize, m: usize, k: usize, budget: usize) -> Result<CoverSets> {
    let size = group_size(n, m, budget)?;
    let mut sets = vec![FixedBitSet::with_capacity(size); m];
    for code in 0..size {
        let sig = signature(&Exponent::from_code(code, n, m), m);
        if sig.max_count() <= k {
            sets[0].insert(code);
        }
        for j in 1..m {
            if sig.0[j - 1] + 1 >= k {
                sets[j].insert(code);
            }
        }
    }
    Ok(CoverSets { n, m, k, sets })
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoverReport {
    pub n: usize,
    pub m: usize,
    pub k: usize,
    /// Every Cayley edge lies inside some `V_j`.
    pub covers_all_edges: bool,
    /// The union of the cliques on the `V_j` is chordal.
    pub chordal: bool,
    /// `V_j ∩ (V_0 ∪ … ∪ V_{j−1}) ⊆ V_0` for every `j ≥ 1`.
    pub rip_holds: bool,
    /// `V_j − j·(1,…,1) = {α : n_0(α) ≥ k − 1} ⊆ V_0` for every `j ≥ 1`.
    pub translations_ok: bool,
    /// `|V_0|, …, |V_{m−1}|`; `|V_0| = |M(k)|`.
    pub clique_sizes: Vec<usize>,
}

impl CoverReport {
    pub fn all_hold(&self) -> bool {
        self.covers_all_edges && self.chordal && self.rip_holds && self.translations_ok
    }
}

pub fn verify_cover(n: usize, m: usize, budget: usize) -> Result<CoverReport> {
    verify_cover_at_level(n, m, n / 2 + 1, budget)
}

/// Runs the four checks for an arbitrary `k`, so that perturbed levels can
/// be shown to fail.
pub fn verify_cover_at_level(n: usize, m: usize, k: usize, budget: usize) -> Result<CoverReport> {
    let cover = build_cover_sets_at_level(n, m, k, budget)?;
    let size = cover.sets[0].len();
    let cayley = build_cayley(n, m, budget)?;

    let mut membership: Vec<Vec<usize>> = vec![Vec::new(); size];
    for (j, s) in cover.sets.iter().enumerate() {
        for v in s.ones() {
            membership[v].push(j);
        }
    }
    let covers_all_edges = cayley.adjacency.iter().enumerate().all(|(a, nb)| {
        nb.iter().all(|&b| membership[a].iter().any(|&j| cover.sets[j].contains(b)))
    });

    let mut earlier = cover.sets[0].clone();
    let mut rip_holds = true;
    for j in 1..m {
        let mut meet = cover.sets[j].clone();
        meet.intersect_with(&earlier);
        rip_holds &= meet.is_subset(&cover.sets[0]);
        earlier.union_with(&cover.sets[j]);
    }

    let mut translations_ok = true;
    let shift_all = |code: usize, j: usize| -> usize {
        let alpha = Exponent::from_code(code, n, m);
        Exponent(alpha.entries().iter().map(|&a| (a + m - j) % m).collect()).code(m)
    };
    for j in 1..m {
        let mut image = FixedBitSet::with_capacity(size);
        for v in cover.sets[j].ones() {
            image.insert(shift_all(v, j));
        }
        let mut target = FixedBitSet::with_capacity(size);
        target.extend((0..size).filter(|&c| signature(&Exponent::from_code(c, n, m), m).count(0, n) + 1 >= k));
        translations_ok &= image.is_subset(&cover.sets[0]) && image == target;
    }

    // Γ: vertices of Z_m^n, edges inside any V_j.
    let mut adjacency = vec![FixedBitSet::with_capacity(size); size];
    for (v, row) in adjacency.iter_mut().enumerate() {
        for &j in &membership[v] {
            row.union_with(&cover.sets[j]);
        }
        row.set(v, false);
    }
    let chordal = is_chordal(&adjacency);

    Ok(CoverReport { n, m, k, covers_all_edges, chordal, rip_holds, translations_ok, clique_sizes: cover.sizes() })
}

/// Chordality test: maximum cardinality search, then verification that the
/// reverse visiting order is a perfect elimination ordering.
pub fn is_chordal(adjacency: &[FixedBitSet]) -> bool {
    let size = adjacency.len();
    if size == 0 {
        return true;
    }
    // Maximum cardinality search, ties to the smallest index.
    let mut weight = vec![0usize; size];
    let mut numbered = FixedBitSet::with_capacity(size);
    let mut visit = Vec::with_capacity(size);
    for _ in 0..size {
        let v = (0..size)
            .filter(|&v| !numbered.contains(v))
            .max_by(|&a, &b| weight[a].cmp(&weight[b]).then(b.cmp(&a)))
            .expect("unnumbered vertex remains");
        numbered.insert(v);
        visit.push(v);
        for w in adjacency[v].ones() {
            if !numbered.contains(w) {
                weight[w] += 1;
            }
        }
    }
    // Elimination order: reverse of the visit order.
    let elimination: Vec<usize> = visit.into_iter().rev().collect();
    let mut position = vec![0usize; size];
    for (p, &v) in elimination.iter().enumerate() {
        position[v] = p;
    }
    let mut later = FixedBitSet::with_capacity(size);
    later.insert_range(..);
    for &v in &elimination {
        later.set(v, false);
        let mut ahead = adjacency[v].clone();
        ahead.intersect_with(&later);
        let Some(parent) = ahead.ones().min_by_key(|&u| position[u]) else {
            continue;
        };
        ahead.set(parent, false);
        if !ahead.is_subset(&adjacency[parent]) {
            return false;
        }
    }
    true
}
