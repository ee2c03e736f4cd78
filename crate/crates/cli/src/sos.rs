//! The `verify-sos` driver: combinatorial cover checks plus a numerical
//! level-k bound on one seeded instance per `(n, m)`.

use crate::CliError;
use rootsqp::exact::brute_force;
use rootsqp::instances::gen_potts_instance;
use rootsqp::soscert::{
    level_monomials, moment_relaxation, verify_adjacency_lemma, verify_cover_at_level, CoverReport, MomentConfig,
    MOMENT_BASIS_BUDGET,
};
use std::fmt;

/// Moment bound versus brute force on one instance.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentCheck {
    pub level: usize,
    pub bound: f64,
    pub brute_force: f64,
    pub gap: f64,
    pub converged: bool,
}

impl MomentCheck {
    pub fn exact(&self) -> bool {
        self.converged && self.gap.abs() <= 1e-3 * (1.0 + self.brute_force.abs())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SosLine {
    pub cover: CoverReport,
    pub lemma: bool,
    pub basis_size: usize,
    /// `None` when `|M(k)|` exceeds the moment budget.
    pub moment: Option<MomentCheck>,
    /// Level `n/2` for even `n`, measured only.
    pub half_level: Option<MomentCheck>,
}

impl SosLine {
    /// Every asserted check held. `half_level` is never asserted.
    pub fn passed(&self) -> bool {
        self.cover.all_hold() && self.lemma && self.moment.as_ref().map_or(true, MomentCheck::exact)
    }
}

fn triple(c: &Option<MomentCheck>) -> String {
    match c {
        Some(c) => format!("({:.9}, {:.9}, {:.3e}){}", c.bound, c.brute_force, c.gap, if c.converged { "" } else { "!" }),
        None => "skipped".into(),
    }
}

impl fmt::Display for SosLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = &self.cover;
        write!(
            f,
            "n={} m={} k={} |M(k)|={} covers_all_edges={} chordal={} rip_holds={} translations_ok={} lemma={} cliques={:?} moment={}",
            c.n,
            c.m,
            c.k,
            self.basis_size,
            c.covers_all_edges,
            c.chordal,
            c.rip_holds,
            c.translations_ok,
            self.lemma,
            c.clique_sizes,
            triple(&self.moment)
        )?;
        if c.n % 2 == 0 {
            write!(f, " level_n/2={}", triple(&self.half_level))?;
        }
        Ok(())
    }
}

fn moment_check(n: usize, m: usize, k: usize, seed: u64, budget: u128) -> Result<Option<MomentCheck>, CliError> {
    if k == 0 || level_monomials(n, m, k)?.len() > MOMENT_BASIS_BUDGET {
        return Ok(None);
    }
    let inst = gen_potts_instance(n, m, -10.0, 10.0, seed)?;
    let truth = brute_force(&inst, budget)?.value;
    let r = moment_relaxation(&inst, k, &MomentConfig::default())?;
    Ok(Some(MomentCheck { level: k, bound: r.value, brute_force: truth, gap: r.value - truth, converged: r.converged }))
}

/// Runs every check for one `(n, m)`; `level` overrides `⌊n/2⌋ + 1`.
pub fn verify_sos(
    n: usize,
    m: usize,
    level: Option<usize>,
    seed: u64,
    group_budget: usize,
    brute_budget: u128,
) -> Result<SosLine, CliError> {
    let k = level.unwrap_or(n / 2 + 1);
    let cover = verify_cover_at_level(n, m, k, group_budget)?;
    let lemma = verify_adjacency_lemma(n, m, group_budget)?;
    let basis_size = level_monomials(n, m, k)?.len();
    let moment = moment_check(n, m, k, seed, brute_budget)?;
    let half_level = if n % 2 == 0 { moment_check(n, m, n / 2, seed, brute_budget)? } else { None };
    Ok(SosLine { cover, lemma, basis_size, moment, half_level })
}

/// All `(n, m)` with `2 ≤ n, m ≤ 5` and `m^n ≤ 10⁴`.
pub fn default_grid() -> Vec<(usize, usize)> {
    let mut v = Vec::new();
    for n in 2..=5 {
        for m in 2..=5usize {
            if m.pow(n as u32) <= 10_000 {
                v.push((n, m));
            }
        }
    }
    v
}
