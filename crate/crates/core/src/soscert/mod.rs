//! Signature grading of the character group `Z_m^n`, level-k monomials, the
//! two-coordinate Cayley graph, the chordal cover `V_0, …, V_{m−1}` with its
//! checks, and the level-k moment relaxation.
//!
//! Exponents `α ∈ Z_m^n` are addressed by their base-`m` code
//! `Σ_i α_i m^{n−1−i}`, so code order is lexicographic order.

mod cover;
mod moment;

pub use cover::{
    build_cover_sets, build_cover_sets_at_level, is_chordal, verify_cover, verify_cover_at_level, CoverReport,
    CoverSets,
};
pub use moment::{moment_relaxation, MomentConfig, MomentResult, MOMENT_BASIS_BUDGET};

use crate::error::{Error, Result};

/// Default ceiling on `m^n` for the exhaustive checks.
pub const DEFAULT_BUDGET: usize = 1 << 20;

#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Exponent(Vec<usize>);

impl Exponent {
    pub fn new(m: usize, alpha: Vec<usize>) -> Result<Self> {
        if let Some(&a) = alpha.iter().find(|&&a| a >= m) {
            return Err(Error::arg(format!("exponent entry {a} is not below m = {m}")));
        }
        Ok(Exponent(alpha))
    }

    pub fn from_code(code: usize, n: usize, m: usize) -> Self {
        let mut alpha = vec![0; n];
        let mut c = code;
        for slot in alpha.iter_mut().rev() {
            *slot = c % m;
            c /= m;
        }
        Exponent(alpha)
    }

    pub fn code(&self, m: usize) -> usize {
        self.0.iter().fold(0, |acc, &a| acc * m + a)
    }

    pub fn entries(&self) -> &[usize] {
        &self.0
    }

    /// `β − α (mod m)`, the exponent of `conj(z^α) z^β`.
    pub fn difference(&self, other: &Exponent, m: usize) -> Exponent {
        Exponent(self.0.iter().zip(&other.0).map(|(&a, &b)| (b + m - a) % m).collect())
    }

    /// Number of coordinates where the exponent is nonzero.
    pub fn support(&self) -> usize {
        self.0.iter().filter(|&&a| a != 0).count()
    }
}

/// `(n_1, …, n_{m−1})`, where `n_i` counts the coordinates equal to `i`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Signature(pub Vec<usize>);

impl Signature {
    pub fn max_count(&self) -> usize {
        self.0.iter().copied().max().unwrap_or(0)
    }

    /// `n_i`, with `n_0` recovered as `n − Σ counts`.
    pub fn count(&self, value: usize, n: usize) -> usize {
        if value == 0 {
            n - self.0.iter().sum::<usize>()
        } else {
            self.0[value - 1]
        }
    }
}

pub fn signature(alpha: &Exponent, m: usize) -> Signature {
    let mut counts = vec![0; m.saturating_sub(1)];
    for &a in alpha.entries() {
        if a != 0 {
            counts[a - 1] += 1;
        }
    }
    Signature(counts)
}

pub(crate) fn group_size(n: usize, m: usize, budget: usize) -> Result<usize> {
    (0..n)
        .try_fold(1usize, |acc, _| acc.checked_mul(m).filter(|&v| v <= budget))
        .ok_or_else(|| Error::Budget {
            what: format!("enumerating Z_{m}^{n}"),
            required: (m as u128).saturating_pow(n as u32),
            budget: budget as u128,
        })
}

/// Exponents whose every nonzero value occurs at most `k` times, in code order.
pub fn level_monomials(n: usize, m: usize, k: usize) -> Result<Vec<Exponent>> {
    let size = group_size(n, m, DEFAULT_BUDGET)?;
    Ok((0..size)
        .map(|c| Exponent::from_code(c, n, m))
        .filter(|a| signature(a, m).max_count() <= k)
        .collect())
}

/// `Cay(Z_m^n, S)` with `S` the nonzero exponents supported on at most two
/// coordinates.
#[derive(Debug, Clone)]
pub struct CayleyGraph {
    pub n: usize,
    pub m: usize,
    /// Sorted neighbour codes of every vertex.
    pub adjacency: Vec<Vec<usize>>,
}

impl CayleyGraph {
    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.adjacency.iter().map(Vec::len).sum::<usize>() / 2
    }

    pub fn is_adjacent(&self, a: usize, b: usize) -> bool {
        self.adjacency[a].binary_search(&b).is_ok()
    }
}

pub fn build_cayley(n: usize, m: usize, budget: usize) -> Result<CayleyGraph> {
    let size = group_size(n, m, budget)?;
    let mut pow = vec![1usize; n];
    for i in (0..n.saturating_sub(1)).rev() {
        pow[i] = pow[i + 1] * m;
    }
    let adjacency = (0..size)
        .map(|v| {
            let alpha = Exponent::from_code(v, n, m);
            let shift = |code: usize, i: usize, c: usize| code - alpha.0[i] * pow[i] + ((alpha.0[i] + c) % m) * pow[i];
            let mut nb = Vec::new();
            for i in 0..n {
                for c1 in 1..m {
                    nb.push(shift(v, i, c1));
                    for j in (i + 1)..n {
                        for c2 in 1..m {
                            let w = shift(v, i, c1);
                            nb.push(w - alpha.0[j] * pow[j] + ((alpha.0[j] + c2) % m) * pow[j]);
                        }
                    }
                }
            }
            nb.sort_unstable();
            nb
        })
        .collect();
    Ok(CayleyGraph { n, m, adjacency })
}

/// Whether every Cayley edge `{β, γ}` has `|n_j(γ) − n_j(β)| ≤ 2` for all
/// `1 ≤ j ≤ m−1`, checked exhaustively.
pub fn verify_adjacency_lemma(n: usize, m: usize, budget: usize) -> Result<bool> {
    let g = build_cayley(n, m, budget)?;
    let sigs: Vec<Signature> = (0..g.vertex_count()).map(|v| signature(&Exponent::from_code(v, n, m), m)).collect();
    Ok(g.adjacency.iter().enumerate().all(|(v, nb)| {
        nb.iter().all(|&w| sigs[v].0.iter().zip(&sigs[w].0).all(|(a, b)| a.abs_diff(*b) <= 2))
    }))
}

/// A non-adjacent pair breaking the signature bound, if any: shows the bound
/// is specific to Cayley edges. Returns `(β, γ, j, |n_j(γ) − n_j(β)|)`.
pub fn adjacency_converse_witness(
    n: usize,
    m: usize,
    budget: usize,
) -> Result<Option<(Exponent, Exponent, usize, usize)>> {
    let g = build_cayley(n, m, budget)?;
    let size = g.vertex_count();
    let sigs: Vec<Signature> = (0..size).map(|v| signature(&Exponent::from_code(v, n, m), m)).collect();
    for a in 0..size {
        for b in (a + 1)..size {
            if g.is_adjacent(a, b) {
                continue;
            }
            for j in 1..m {
                let d = sigs[a].0[j - 1].abs_diff(sigs[b].0[j - 1]);
                if d > 2 {
                    return Ok(Some((Exponent::from_code(a, n, m), Exponent::from_code(b, n, m), j, d)));
                }
            }
        }
    }
    Ok(None)
}
