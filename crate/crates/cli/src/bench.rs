//! Basic versus zonotope branch-and-bound timing on MIMO and Potts
//! instances, and the relaxation ratio study on periodic grids.
//!
//! Times cover the solver call only; building the reformulation is excluded.

use crate::io::Table;
use crate::CliError;
use rootsqp::exact::{brute_force, branch_and_bound, BnbConfig, SolveReport};
use rootsqp::instances::{gen_grid_instance, gen_mimo_instance, gen_potts_instance};
use rootsqp::reformulate::{basic_reformulation, zonotope_reformulation};
use rootsqp::relax::{solve_sdp, SdpConfig};
use rootsqp::ProblemInstance;

/// The SNR grid `10^p`, `p = −1, …, 4`.
pub const DEFAULT_SNRS: [f64; 6] = [0.1, 1.0, 10.0, 100.0, 1000.0, 10000.0];

pub fn default_potts_sizes(m: usize) -> Vec<usize> {
    match m {
        2 | 4 => vec![6, 8, 10],
        6 => vec![5, 6, 7],
        8 => vec![4, 5, 6],
        _ => vec![4, 5],
    }
}

/// One instance solved by both arms.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchSample {
    pub key: f64,
    pub seed: u64,
    pub bropt: f64,
    pub zropt: f64,
    pub brtime: f64,
    pub zrtime: f64,
    pub matched: bool,
}

/// One point of the figure table: averages over a point's samples.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    /// SNR or `n`.
    pub key: f64,
    pub bravg: f64,
    pub zravg: f64,
    pub bropt: f64,
    pub zropt: f64,
    pub matched: bool,
}

pub fn optima_match(bropt: f64, zropt: f64) -> bool {
    (bropt - zropt).abs() <= 1e-6 * (1.0 + bropt.abs())
}

#[derive(Debug, Clone, Default)]
pub struct BenchOutput {
    pub rows: Vec<BenchRow>,
    pub samples: Vec<BenchSample>,
}

impl BenchOutput {
    /// `<key>,bravg,zravg`, one row per point.
    pub fn figure_table(&self, key: &str) -> Table {
        let mut t = Table::new(&[key, "bravg", "zravg"]);
        for r in &self.rows {
            t.push(vec![Some(r.key), Some(r.bravg), Some(r.zravg)]);
        }
        t
    }

    /// Per-instance optima and times.
    pub fn detail_table(&self, key: &str) -> Table {
        let mut t = Table::new(&[key, "seed", "bropt", "zropt", "brtime", "zrtime", "matched"]);
        for s in &self.samples {
            t.push(vec![
                Some(s.key),
                Some(s.seed as f64),
                Some(s.bropt),
                Some(s.zropt),
                Some(s.brtime),
                Some(s.zrtime),
                Some(if s.matched { 1.0 } else { 0.0 }),
            ]);
        }
        t
    }

    /// `Σ bravg / Σ zravg` over all points.
    pub fn speedup(&self) -> f64 {
        let b: f64 = self.rows.iter().map(|r| r.bravg).sum();
        let z: f64 = self.rows.iter().map(|r| r.zravg).sum();
        b / z
    }
}

fn proven(r: SolveReport, arm: &str, seed: u64) -> Result<SolveReport, CliError> {
    if r.proven_optimal {
        Ok(r)
    } else {
        Err(CliError::Budget(format!("{arm} branch and bound hit its budget on seed {seed}")))
    }
}

fn solve_both(inst: &ProblemInstance, key: f64, seed: u64, config: &BnbConfig) -> Result<BenchSample, CliError> {
    let basic = basic_reformulation(inst);
    let zono = zonotope_reformulation(inst)?;
    let br = proven(branch_and_bound(&basic, config)?, "basic", seed)?;
    let zr = proven(branch_and_bound(&zono, config)?, "zonotope", seed)?;
    let matched = optima_match(br.value, zr.value);
    if !matched {
        return Err(CliError::Assertion(format!(
            "optima differ on seed {seed} (key {key}): basic {} vs zonotope {}",
            br.value, zr.value
        )));
    }
    Ok(BenchSample {
        key,
        seed,
        bropt: br.value,
        zropt: zr.value,
        brtime: br.wall_time.as_secs_f64(),
        zrtime: zr.wall_time.as_secs_f64(),
        matched,
    })
}

fn need_even(m: usize) -> Result<(), CliError> {
    if m % 2 == 1 || m == 0 {
        return Err(CliError::Argument(format!("the zonotope arm needs even m, got {m}")));
    }
    Ok(())
}

fn run_points(
    keys: &[f64],
    instances: usize,
    seed: u64,
    config: &BnbConfig,
    make: impl Fn(f64, u64) -> Result<ProblemInstance, CliError>,
) -> Result<BenchOutput, CliError> {
    if instances == 0 {
        return Err(CliError::Argument("need at least one instance per point".into()));
    }
    let mut out = BenchOutput::default();
    for (p, &key) in keys.iter().enumerate() {
        let mut point = Vec::with_capacity(instances);
        for i in 0..instances {
            let s = seed + (p * instances + i) as u64;
            point.push(solve_both(&make(key, s)?, key, s, config)?);
        }
        let k = point.len() as f64;
        let mean = |f: fn(&BenchSample) -> f64| point.iter().map(f).sum::<f64>() / k;
        out.rows.push(BenchRow {
            key,
            bravg: mean(|s| s.brtime),
            zravg: mean(|s| s.zrtime),
            bropt: mean(|s| s.bropt),
            zropt: mean(|s| s.zropt),
            matched: point.iter().all(|s| s.matched),
        });
        out.samples.extend(point);
    }
    Ok(out)
}

/// Instance `i` at SNR point `p` uses seed `seed + p·instances + i`.
pub fn bench_mimo(
    d: usize,
    n: usize,
    m: usize,
    snrs: &[f64],
    instances: usize,
    seed: u64,
    config: &BnbConfig,
) -> Result<BenchOutput, CliError> {
    need_even(m)?;
    run_points(snrs, instances, seed, config, |snr, s| Ok(gen_mimo_instance(d, n, m, snr, s)?.0))
}

/// Couplings uniform on `[−10, 10]`; seeds as in [`bench_mimo`].
pub fn bench_potts(
    m: usize,
    sizes: &[usize],
    instances: usize,
    seed: u64,
    config: &BnbConfig,
) -> Result<BenchOutput, CliError> {
    need_even(m)?;
    let keys: Vec<f64> = sizes.iter().map(|&n| n as f64).collect();
    run_points(&keys, instances, seed, config, |n, s| Ok(gen_potts_instance(n as usize, m, -10.0, 10.0, s)?))
}

#[derive(Debug, Clone, PartialEq)]
pub struct RatioRow {
    pub instance: usize,
    pub m: usize,
    pub sdp_upper: f64,
    pub e0: f64,
    /// `None` when `e0 ≤ 0`.
    pub ratio: Option<f64>,
}

pub fn ratio_table(rows: &[RatioRow]) -> Table {
    let mut t = Table::new(&["m", "sdp_upper", "e0", "ratio"]);
    for r in rows {
        t.push(vec![Some(r.m as f64), Some(r.sdp_upper), Some(r.e0), r.ratio]);
    }
    t
}

/// SDP bound against the exact ground energy on `instances` grids `Z_side^dims`.
///
/// The SDP is solved once per grid with `m` = the first entry of `m_list`;
/// its value does not depend on `m` because the grid couplings are real.
pub fn ratio_study(
    side: usize,
    dims: usize,
    m_list: &[usize],
    instances: usize,
    seed: u64,
    budget: u128,
) -> Result<Vec<RatioRow>, CliError> {
    if m_list.is_empty() || m_list.contains(&0) {
        return Err(CliError::Argument("m list must be nonempty with positive entries".into()));
    }
    let mut rows = Vec::new();
    for i in 0..instances {
        let s = seed + i as u64;
        let grid = gen_grid_instance(side, dims, m_list[0], s)?;
        let sdp = solve_sdp(&grid.instance, &SdpConfig { seed: s, ..SdpConfig::default() })?;
        let sdp_upper = sdp.upper_bound();
        for &m in m_list {
            let e0 = brute_force(&grid.instance.with_m(m)?, budget)?.value;
            let ratio = (e0 > 0.0).then(|| sdp_upper / e0);
            rows.push(RatioRow { instance: i, m, sdp_upper, e0, ratio });
        }
    }
    Ok(rows)
}
