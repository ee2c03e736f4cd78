//! Acceptance criteria, one line each. Runs without the libtest harness so
//! the lines show under a plain `cargo test`.

use rootsqp::exact::{brute_force, branch_and_bound, BnbConfig};
use rootsqp::instances::{evaluate_objective, gen_grid_instance, gen_mimo_instance, gen_potts_instance};
use rootsqp::reformulate::{
    basic_reformulation, decode, quarter_reformulation, zonotope_reformulation, BinaryQuadraticProgram,
};
use rootsqp::relax::{rounding_correlation, RoundingScheme};
use rootsqp::soscert::{moment_relaxation, verify_adjacency_lemma, verify_cover, MomentConfig, DEFAULT_BUDGET};
use rootsqp::{Complex64, ProblemInstance};
use rootsqp_cli::bench::{bench_mimo, ratio_study, DEFAULT_SNRS};
use rootsqp_cli::io::Table;
use rootsqp_cli::sos::default_grid;
use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::{Duration, Instant};

const BRUTE: u128 = 1 << 24;

type Outcome = Result<String, String>;

fn zonotope_vertex_map() -> Outcome {
    for m in (2..=16).step_by(2) {
        let half = m / 2;
        let s = (PI / m as f64).sin();
        let mut hits = vec![0usize; m];
        let mut worst: f64 = 0.0;
        for bits in 0..(1u32 << half) {
            let eps: Vec<f64> = (0..half).map(|k| if bits >> k & 1 == 1 { -1.0 } else { 1.0 }).collect();
            let t = eps.iter().enumerate().fold(Complex64::default(), |acc, (k, e)| {
                let a = (2 * k + 1) as f64 * PI / m as f64;
                acc + Complex64::new(a.sin(), -a.cos()) * (s * e)
            });
            for (j, hit) in hits.iter_mut().enumerate() {
                let err = (t - Complex64::from_polar(1.0, 2.0 * PI * j as f64 / m as f64)).norm();
                if err <= 1e-9 {
                    *hit += 1;
                    worst = worst.max(err);
                }
            }
            let tv = eps.windows(2).filter(|w| w[0] != w[1]).count();
            let on_circle = (t.norm() - 1.0).abs() <= 1e-9;
            if on_circle != (tv <= 1) {
                return Err(format!("m={m}: cube vertex {eps:?} lands at |T|={} with {tv} sign changes", t.norm()));
            }
        }
        if hits.iter().any(|&h| h != 1) || worst > 1e-12 {
            return Err(format!("m={m}: hit counts {hits:?}, worst error {worst:e}"));
        }
        let zmap = rootsqp::reformulate::ZonotopeMap::new(m).map_err(|e| e.to_string())?;
        for (e, pat) in zmap.patterns().iter().enumerate() {
            let err = (zmap.apply(pat) - Complex64::from_polar(1.0, 2.0 * PI * e as f64 / m as f64)).norm();
            if err > 1e-12 {
                return Err(format!("m={m}: library pattern for exponent {e} misses by {err:e}"));
            }
        }
    }
    Ok("even m in 2..=16, each root hit once, error <= 1e-12".into())
}

fn close(a: f64, b: f64, rel: f64) -> bool {
    (a - b).abs() <= rel * b.abs().max(1.0)
}

fn solved_value(bqp: &BinaryQuadraticProgram, inst: &ProblemInstance) -> Result<f64, String> {
    let r = branch_and_bound(bqp, &BnbConfig::default()).map_err(|e| e.to_string())?;
    if !r.proven_optimal {
        return Err("branch and bound stopped early".into());
    }
    let z = decode(bqp, r.argument.as_binary().unwrap()).map_err(|e| e.to_string())?;
    let v = evaluate_objective(inst, &z).map_err(|e| e.to_string())?;
    if !close(v, r.value, 1e-9) {
        return Err(format!("decoded point evaluates to {v}, solver reported {}", r.value));
    }
    Ok(r.value)
}

/// Even seeds: real couplings on `[−10, 10]`; odd seeds: complex MIMO couplings.
fn mixed_instance(n: usize, m: usize, seed: u64) -> ProblemInstance {
    if seed % 2 == 0 {
        gen_potts_instance(n, m, -10.0, 10.0, seed).unwrap()
    } else {
        gen_mimo_instance(3, n - 1, m, 10.0, seed).unwrap().0
    }
}

fn reformulation_equivalence() -> Outcome {
    let mut solves = 0;
    for n in [2, 3] {
        for m in [2, 4, 6, 8] {
            for seed in 0..20 {
                let inst = mixed_instance(n, m, seed);
                let truth = brute_force(&inst, BRUTE).map_err(|e| e.to_string())?.value;
                let mut programs = vec![("basic", basic_reformulation(&inst))];
                programs.push(("zonotope", zonotope_reformulation(&inst).map_err(|e| e.to_string())?));
                if m == 4 {
                    programs.push(("quarter", quarter_reformulation(&inst).map_err(|e| e.to_string())?));
                }
                for (name, p) in &programs {
                    let v = solved_value(p, &inst).map_err(|e| format!("{name} n={n} m={m} seed={seed}: {e}"))?;
                    if !close(v, truth, 1e-9) {
                        return Err(format!("{name} n={n} m={m} seed={seed}: {v} vs brute force {truth}"));
                    }
                    solves += 1;
                }
            }
        }
    }
    Ok(format!("{solves} branch-and-bound optima equal brute force"))
}

fn sos_cover() -> Outcome {
    let grid = default_grid();
    for &(n, m) in &grid {
        let r = verify_cover(n, m, DEFAULT_BUDGET).map_err(|e| e.to_string())?;
        if !r.all_hold() {
            return Err(format!("cover flags at n={n} m={m}: {r:?}"));
        }
        if !verify_adjacency_lemma(n, m, DEFAULT_BUDGET).map_err(|e| e.to_string())? {
            return Err(format!("adjacency lemma fails at n={n} m={m}"));
        }
    }
    Ok(format!("{} (n, m) pairs, four flags and the lemma hold", grid.len()))
}

fn level_exactness() -> Outcome {
    let cfg = MomentConfig::default();
    let mut worst: f64 = 0.0;
    let mut count = 0;
    for n in [2, 3] {
        for m in [2, 3, 4] {
            for seed in 0..10 {
                let inst = gen_potts_instance(n, m, -10.0, 10.0, 100 + seed).unwrap();
                let truth = brute_force(&inst, BRUTE).map_err(|e| e.to_string())?.value;
                let tol = 1e-3 * (1.0 + truth.abs());
                let mut previous = f64::INFINITY;
                for k in 1..=n {
                    let r = moment_relaxation(&inst, k, &cfg).map_err(|e| e.to_string())?;
                    if !r.converged {
                        return Err(format!("n={n} m={m} seed={seed} k={k}: solver did not converge"));
                    }
                    if r.value > previous + tol {
                        return Err(format!("n={n} m={m} seed={seed}: level {k} bound {} above level {} bound {previous}", r.value, k - 1));
                    }
                    if r.value < truth - tol {
                        return Err(format!("n={n} m={m} seed={seed} k={k}: bound {} below optimum {truth}", r.value));
                    }
                    if k == n / 2 + 1 {
                        let gap = (r.value - truth).abs();
                        if gap > tol {
                            return Err(format!("n={n} m={m} seed={seed}: level {k} gap {gap:e}"));
                        }
                        worst = worst.max(gap / (1.0 + truth.abs()));
                        count += 1;
                    }
                    previous = r.value;
                }
            }
        }
    }
    Ok(format!("{count} instances exact at level n/2+1, worst relative gap {worst:.2e}, monotone in k"))
}

fn rounding_statistics() -> Outcome {
    let mut worst: f64 = 0.0;
    for scheme in [RoundingScheme::Quad, RoundingScheme::Gw] {
        for ambient in [2, 50] {
            for theta in [0.3, 0.8, 1.2, 2.0, 2.8] {
                let st = rounding_correlation(scheme, theta, ambient, 100_000, 2024).map_err(|e| e.to_string())?;
                if st.z_score() > 4.0 {
                    return Err(format!("{scheme:?} ambient={ambient} theta={theta}: {st:?}"));
                }
                worst = worst.max(st.z_score());
            }
        }
    }
    Ok(format!("quad and gw within {worst:.2} standard errors of 1 - 2θ/π"))
}

fn ratio_sanity() -> Outcome {
    let mut lo = f64::INFINITY;
    let mut hi: f64 = 0.0;
    let mut count = 0;
    for (side, dims) in [(2, 3), (6, 1), (12, 1)] {
        for seed in 0..10 {
            if !gen_grid_instance(side, dims, 2, seed).map_err(|e| e.to_string())?.bipartite {
                return Err(format!("grid {side}^{dims} is not bipartite"));
            }
        }
        let rows = ratio_study(side, dims, &[2], 10, 0, BRUTE).map_err(|e| e.to_string())?;
        for r in rows {
            let ratio = r.ratio.ok_or_else(|| format!("grid {side}^{dims} #{}: E0 = {}", r.instance, r.e0))?;
            if !(1.0 - 1e-6..=1.782 + 0.02).contains(&ratio) {
                return Err(format!("grid {side}^{dims} #{}: ratio {ratio}", r.instance));
            }
            lo = lo.min(ratio);
            hi = hi.max(ratio);
            count += 1;
        }
    }
    Ok(format!("{count} bipartite grids, ratios in [{lo:.4}, {hi:.4}]"))
}

fn mimo_bench() -> Outcome {
    let mut notes = Vec::new();
    for m in [4, 8] {
        let out = bench_mimo(8, 5, m, &DEFAULT_SNRS, 10, 0, &BnbConfig::default()).map_err(|e| e.to_string())?;
        if out.rows.len() != DEFAULT_SNRS.len() || out.samples.len() != 60 || !out.samples.iter().all(|s| s.matched) {
            return Err(format!("m={m}: {} rows, {} samples", out.rows.len(), out.samples.len()));
        }
        let file = tempfile::NamedTempFile::new().map_err(|e| e.to_string())?;
        out.figure_table("snr").write(file.reopen().map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
        let text = std::fs::read_to_string(file.path()).map_err(|e| e.to_string())?;
        if text.lines().next() != Some("snr,bravg,zravg") {
            return Err(format!("m={m}: header {:?}", text.lines().next()));
        }
        let back = Table::read(text.as_bytes()).map_err(|e| e.to_string())?;
        if back != out.figure_table("snr") {
            return Err(format!("m={m}: table does not round-trip"));
        }
        notes.push(format!("m={m} basic/zonotope time {:.2}x", out.speedup()));
    }
    Ok(format!("120 instances matched; {}", notes.join(", ")))
}

fn e0_chain() -> Outcome {
    for seed in 0..20u64 {
        let n = 2 + (seed % 3) as usize;
        let inst = gen_potts_instance(n, 2, -10.0, 10.0, 500 + seed).unwrap();
        let e = |m: usize| -> Result<f64, String> {
            Ok(brute_force(&inst.with_m(m).map_err(|e| e.to_string())?, BRUTE).map_err(|e| e.to_string())?.value)
        };
        let (e2, e4, e8) = (e(2)?, e(4)?, e(8)?);
        if e4 < e2 - 1e-9 || e8 < e4 - 1e-9 {
            return Err(format!("seed {seed}, n={n}: E0 = {e2}, {e4}, {e8} for m = 2, 4, 8"));
        }
    }
    Ok("20 real instances with n <= 4 satisfy E0(8) >= E0(4) >= E0(2)".into())
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome, u64); 8] = [
        ("zonotope vertex map", zonotope_vertex_map, 1),
        ("reformulation equivalence", reformulation_equivalence, 60),
        ("sos cover verification", sos_cover, 120),
        ("level exactness", level_exactness, 600),
        ("rounding statistics", rounding_statistics, 120),
        ("relaxation ratio sanity", ratio_sanity, 300),
        ("benchmark harness", mimo_bench, 600),
        ("E0 monotonicity chain", e0_chain, 60),
    ];
    let mut failures = 0;
    for (i, (name, check, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let elapsed = start.elapsed();
        let outcome = match outcome {
            Ok(msg) if elapsed > Duration::from_secs(*limit) => Err(format!("{msg}; took {elapsed:.1?}, limit {limit}s")),
            other => other,
        };
        match outcome {
            Ok(msg) => println!("criterion {} [{name}]: PASS ({msg}; {elapsed:.2?})", i + 1),
            Err(msg) => {
                failures += 1;
                println!("criterion {} [{name}]: FAIL ({msg}; {elapsed:.2?})", i + 1);
            }
        }
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
