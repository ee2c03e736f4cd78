//! The complex SDP relaxation `max { Σ_ij Q_ij Z_ij : Z ⪰ 0, Z_ii = 1 }`
//! solved over low-rank factors `Z = V V*`, a diagonal dual certificate, and
//! randomized roundings of the factor back to `B_m^n`.
//!
//! The primal is a lower estimate; `primal_value + dual_gap_estimate` is a
//! certified upper bound on the SDP value and therefore on the discrete
//! optimum.

use crate::error::{Error, Result};
use crate::exact::{Argument, SolveReport};
use crate::instances::{evaluate_objective, ProblemInstance, RootsAssignment};
use crate::linalg::{min_eigenvalue, CMatrix};
use crate::rng::{complex_normal, normal, substream, Stream};
use crate::roots;
use num_complex::Complex64;
use rand::Rng;
use std::f64::consts::PI;
use std::time::Instant;

/// `n × r` factor with unit-norm rows; its Gram matrix `V V*` is feasible for
/// the relaxation. Row `i` is the vector attached to variable `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct GramFactor {
    v: CMatrix,
    real: bool,
}

impl GramFactor {
    /// Normalizes every row. Zero rows are rejected.
    pub fn new(mut v: CMatrix) -> Result<Self> {
        for i in 0..v.nrows() {
            let norm = v.row(i).iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
            if !(norm > 0.0) || !norm.is_finite() {
                return Err(Error::arg(format!("row {i} has norm {norm}")));
            }
            for k in 0..v.ncols() {
                v[(i, k)] /= norm;
            }
        }
        let real = v.iter().all(|c| c.im == 0.0);
        Ok(GramFactor { v, real })
    }

    /// Factor with real rows.
    pub fn from_real_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let n = rows.len();
        let r = rows.first().map_or(0, |x| x.len());
        if n == 0 || r == 0 || rows.iter().any(|x| x.len() != r) {
            return Err(Error::arg("rows must be nonempty and of equal length"));
        }
        Self::new(CMatrix::from_fn(n, r, |i, k| Complex64::new(rows[i][k], 0.0)))
    }

    pub fn n(&self) -> usize {
        self.v.nrows()
    }

    pub fn rank(&self) -> usize {
        self.v.ncols()
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.v
    }

    pub fn is_real(&self) -> bool {
        self.real
    }

    /// `Z_ij = ⟨V_i, V_j⟩ = Σ_k conj(V_ik) V_jk`, so that a rank-one factor
    /// `V_i = z_i` gives `Z_ij = conj(z_i) z_j`.
    pub fn gram(&self) -> CMatrix {
        let n = self.n();
        CMatrix::from_fn(n, n, |i, j| (0..self.rank()).map(|k| self.v[(i, k)].conj() * self.v[(j, k)]).sum())
    }

    /// Rows as real vectors: the real parts for a real factor, otherwise the
    /// concatenation `(Re V_i, Im V_i)`.
    fn realified(&self) -> Vec<Vec<f64>> {
        (0..self.n())
            .map(|i| {
                let row = self.v.row(i);
                let mut out: Vec<f64> = row.iter().map(|c| c.re).collect();
                if !self.real {
                    out.extend(row.iter().map(|c| c.im));
                }
                out
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpResult {
    pub primal_value: f64,
    pub factor: GramFactor,
    pub dual_gap_estimate: f64,
    pub iterations: usize,
    /// Final Riemannian gradient norm of the kept restart.
    pub gradient_norm: f64,
    pub converged: bool,
}

impl SdpResult {
    /// Certified upper bound on the SDP value.
    pub fn upper_bound(&self) -> f64 {
        self.primal_value + self.dual_gap_estimate
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SdpConfig {
    /// Factor rank; `None` picks `⌈√(2n)⌉ + 1`.
    pub rank: Option<usize>,
    /// Stop when the Riemannian gradient norm falls below this.
    pub tol: f64,
    /// Sweeps per restart.
    pub max_iters: usize,
    pub seed: u64,
    pub restarts: u32,
    /// Force real (`Some(true)`) or complex factors; `None` uses real factors
    /// exactly when `Q` is real.
    pub real_factors: Option<bool>,
}

impl Default for SdpConfig {
    fn default() -> Self {
        SdpConfig { rank: None, tol: 1e-9, max_iters: 20_000, seed: 0, restarts: 3, real_factors: None }
    }
}

pub fn default_rank(n: usize) -> usize {
    ((2.0 * n as f64).sqrt().ceil() as usize) + 1
}

/// `Re tr(Q V V*)` = `Σ_ij Q_ij ⟨V_i, V_j⟩`.
pub fn factor_objective(q: &CMatrix, factor: &GramFactor) -> f64 {
    let qv = q * factor.matrix();
    row_inner_sum(factor.matrix(), &qv)
}

/// `Σ_i Re⟨A_i, B_i⟩` over rows.
fn row_inner_sum(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

/// Norm of the Riemannian gradient `2(QV)_i − 2Re⟨V_i,(QV)_i⟩ V_i`.
fn riemannian_gradient_norm(v: &CMatrix, qv: &CMatrix) -> f64 {
    let (n, r) = v.shape();
    let mut acc = 0.0;
    for i in 0..n {
        let radial: f64 = (0..r).map(|k| (v[(i, k)].conj() * qv[(i, k)]).re).sum();
        for k in 0..r {
            acc += (2.0 * (qv[(i, k)] - v[(i, k)] * radial)).norm_sqr();
        }
    }
    acc.sqrt()
}

/// Certified gap from the dual candidate `Λ = diag(Re (Q V V*)_ii)`:
/// `n · max(0, −λ_min(Λ − Q)) + tr Λ − primal`, clamped at zero.
pub fn dual_gap(q: &CMatrix, factor: &GramFactor, primal: f64) -> f64 {
    let n = q.nrows();
    let qv = q * factor.matrix();
    let mut slack = -q.clone();
    let mut trace = 0.0;
    for i in 0..n {
        let lambda: f64 = (0..factor.rank()).map(|k| (factor.matrix()[(i, k)].conj() * qv[(i, k)]).re).sum();
        slack[(i, i)] += Complex64::new(lambda, 0.0);
        trace += lambda;
    }
    let shift = (-min_eigenvalue(&slack)).max(0.0);
    (n as f64 * shift + trace - primal).max(0.0)
}

/// Row-by-row ascent: each row is replaced by its normalized partial
/// gradient `Σ_{j≠i} Q_ij V_j`, which maximizes the objective in that row.
fn ascend(q: &CMatrix, v: &mut CMatrix, tol: f64, max_iters: usize) -> (usize, f64) {
    let (n, r) = v.shape();
    let mut g = vec![Complex64::default(); r];
    let mut iters = 0;
    let mut grad = riemannian_gradient_norm(v, &(q * &*v));
    while iters < max_iters && grad > tol {
        for i in 0..n {
            g.iter_mut().for_each(|x| *x = Complex64::default());
            for j in 0..n {
                if j == i {
                    continue;
                }
                let qij = q[(i, j)];
                if qij.re == 0.0 && qij.im == 0.0 {
                    continue;
                }
                for k in 0..r {
                    g[k] += qij * v[(j, k)];
                }
            }
            let norm = g.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt();
            if norm > 0.0 {
                for k in 0..r {
                    v[(i, k)] = g[k] / norm;
                }
            }
        }
        iters += 1;
        grad = riemannian_gradient_norm(v, &(q * &*v));
    }
    (iters, grad)
}

/// Solves the relaxation with `config.restarts` random starts and keeps the
/// best primal; the reported gap is measured against the tightest certified
/// upper bound over all restarts.
pub fn solve_sdp(inst: &ProblemInstance, config: &SdpConfig) -> Result<SdpResult> {
    if !(config.tol > 0.0) {
        return Err(Error::arg("tolerance must be positive"));
    }
    let n = inst.n();
    let q = inst.q();
    if crate::linalg::hermitian_defect(q) > 0.0 {
        return Err(Error::arg("coupling matrix is not Hermitian"));
    }
    let real = match config.real_factors {
        Some(true) if !inst.is_real() => return Err(Error::arg("real factors need a real coupling matrix")),
        Some(flag) => flag,
        None => inst.is_real(),
    };
    let rank = config.rank.unwrap_or_else(|| default_rank(n)).max(1);

    let mut best: Option<(f64, GramFactor, usize, f64)> = None;
    let mut best_upper = f64::INFINITY;
    for restart in 0..config.restarts.max(1) {
        let mut rng = substream(config.seed, Stream::SdpStart(restart));
        let start = CMatrix::from_fn(n, rank, |_, _| {
            if real {
                Complex64::new(normal(&mut rng), 0.0)
            } else {
                complex_normal(&mut rng)
            }
        });
        let mut v = GramFactor::new(start)?.v;
        let (iters, grad) = ascend(q, &mut v, config.tol, config.max_iters);
        let factor = GramFactor::new(v)?;
        let primal = factor_objective(q, &factor);
        best_upper = best_upper.min(primal + dual_gap(q, &factor, primal));
        if best.as_ref().map_or(true, |b| primal > b.0) {
            best = Some((primal, factor, iters, grad));
        }
    }
    let (primal_value, factor, iterations, gradient_norm) = best.expect("at least one restart");
    Ok(SdpResult {
        primal_value,
        factor,
        dual_gap_estimate: (best_upper - primal_value).max(0.0),
        iterations,
        gradient_norm,
        converged: gradient_norm <= config.tol,
    })
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn gaussian_vector<R: Rng>(rng: &mut R, dim: usize) -> Vec<f64> {
    (0..dim).map(|_| normal(rng)).collect()
}

/// Two orthonormal directions from Gram–Schmidt on two Gaussian vectors.
fn random_orthonormal_pair<R: Rng>(rng: &mut R, dim: usize) -> (Vec<f64>, Vec<f64>) {
    loop {
        let mut e1 = gaussian_vector(rng, dim);
        let mut e2 = gaussian_vector(rng, dim);
        let n1 = dot(&e1, &e1).sqrt();
        if n1 == 0.0 {
            continue;
        }
        e1.iter_mut().for_each(|x| *x /= n1);
        let proj = dot(&e1, &e2);
        e2.iter_mut().zip(&e1).for_each(|(x, y)| *x -= proj * y);
        let n2 = dot(&e2, &e2).sqrt();
        if n2 <= 1e-12 {
            continue;
        }
        e2.iter_mut().for_each(|x| *x /= n2);
        return (e1, e2);
    }
}

pub fn gw_round_with<R: Rng>(factor: &GramFactor, rng: &mut R) -> RootsAssignment {
    let rows = factor.realified();
    let g = gaussian_vector(rng, rows[0].len());
    let exps = rows.iter().map(|v| if dot(v, &g) >= 0.0 { 0 } else { 1 }).collect();
    RootsAssignment::new(2, exps).expect("exponents are 0 or 1")
}

/// Hyperplane rounding: `z_i = sign(⟨V_i, g⟩)` for a Gaussian `g`, zero
/// projections going to `+1`.
pub fn gw_round(factor: &GramFactor, seed: u64) -> RootsAssignment {
    gw_round_with(factor, &mut substream(seed, Stream::Rounding(0)))
}

pub fn mgon_round_with<R: Rng>(factor: &GramFactor, m: usize, rng: &mut R) -> Result<RootsAssignment> {
    if m < 2 {
        return Err(Error::arg(format!("root order must be at least 2, got {m}")));
    }
    let rows = factor.realified();
    let (e1, e2) = random_orthonormal_pair(rng, rows[0].len());
    let phase = Complex64::from_polar(1.0, -rng.gen_range(0.0..2.0 * PI));
    let exps = rows
        .iter()
        .map(|v| roots::nearest_exponent(phase * Complex64::new(dot(v, &e1), dot(v, &e2)), m))
        .collect();
    RootsAssignment::new(m, exps)
}

/// Random plane plus random m-gon: project every row onto a random plane
/// and take the nearest vertex of a uniformly rotated regular m-gon.
pub fn mgon_round(factor: &GramFactor, m: usize, seed: u64) -> Result<RootsAssignment> {
    mgon_round_with(factor, m, &mut substream(seed, Stream::Rounding(0)))
}

pub fn quad_round_with<R: Rng>(factor: &GramFactor, rng: &mut R) -> RootsAssignment {
    let rows = factor.realified();
    let (e1, e2) = random_orthonormal_pair(rng, rows[0].len());
    let exps = rows
        .iter()
        .map(|v| match (dot(v, &e1) >= 0.0, dot(v, &e2) >= 0.0) {
            (true, true) => 0,
            (false, true) => 1,
            (false, false) => 2,
            (true, false) => 3,
        })
        .collect();
    RootsAssignment::new(4, exps).expect("exponents below 4")
}

/// Quadrant rounding for `m = 4`: the signs of the projections on two random
/// orthonormal directions pick `1, i, −1, −i`.
pub fn quad_round(factor: &GramFactor, seed: u64) -> RootsAssignment {
    quad_round_with(factor, &mut substream(seed, Stream::Rounding(0)))
}

/// `Re(conj(u_i) u_j)`.
pub fn correlation(z: &RootsAssignment, i: usize, j: usize) -> f64 {
    let v = z.values();
    (v[i].conj() * v[j]).re
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RoundingScheme {
    /// Hyperplane rounding, `m = 2` only.
    Gw,
    /// Random m-gon rounding, any `m`.
    Mgon,
    /// Quadrant rounding, `m = 4` only.
    Quad,
}

impl std::str::FromStr for RoundingScheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "gw" => Ok(RoundingScheme::Gw),
            "mgon" => Ok(RoundingScheme::Mgon),
            "quad" => Ok(RoundingScheme::Quad),
            other => Err(Error::arg(format!("unknown rounding scheme {other:?}"))),
        }
    }
}

#[derive(Debug, Clone)]
pub struct RelaxReport {
    pub report: SolveReport,
    pub sdp: SdpResult,
    /// `(primal + gap) / max(best rounded value, ε)`.
    pub ratio: f64,
}

/// Solves the relaxation, then keeps the best of `trials` roundings.
pub fn relax_and_round(
    inst: &ProblemInstance,
    scheme: RoundingScheme,
    trials: u32,
    seed: u64,
    sdp_config: &SdpConfig,
) -> Result<RelaxReport> {
    let m = inst.m();
    match scheme {
        RoundingScheme::Gw if m != 2 => return Err(Error::arg(format!("gw rounding needs m = 2, got {m}"))),
        RoundingScheme::Quad if m != 4 => return Err(Error::arg(format!("quad rounding needs m = 4, got {m}"))),
        _ => {}
    }
    if trials == 0 {
        return Err(Error::arg("need at least one rounding trial"));
    }
    let start = Instant::now();
    let sdp = solve_sdp(inst, &SdpConfig { seed, ..sdp_config.clone() })?;
    let mut best: Option<(f64, RootsAssignment)> = None;
    let mut history = vec![];
    for t in 0..trials {
        let mut rng = substream(seed, Stream::Rounding(t));
        let z = match scheme {
            RoundingScheme::Gw => gw_round_with(&sdp.factor, &mut rng),
            RoundingScheme::Mgon => mgon_round_with(&sdp.factor, m, &mut rng)?,
            RoundingScheme::Quad => quad_round_with(&sdp.factor, &mut rng),
        };
        let value = evaluate_objective(inst, &z)?;
        if best.as_ref().map_or(true, |(b, _)| value > *b) {
            history.push(value);
            best = Some((value, z));
        }
    }
    let (value, z) = best.expect("trials > 0");
    let ratio = sdp.upper_bound() / value.max(f64::EPSILON);
    Ok(RelaxReport {
        report: SolveReport {
            value,
            argument: Argument::Roots(z),
            nodes_explored: trials as u64,
            wall_time: start.elapsed(),
            proven_optimal: false,
            incumbent_history: history,
        },
        sdp,
        ratio,
    })
}

/// Monte-Carlo summary of `Re(conj(u_0) u_1)` for two unit rows at angle `θ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorrelationStats {
    pub theta: f64,
    pub ambient: usize,
    pub trials: u32,
    pub mean: f64,
    pub std_error: f64,
    /// `1 − 2θ/π`.
    pub expected: f64,
}

impl CorrelationStats {
    /// Distance from the expected value in standard errors.
    pub fn z_score(&self) -> f64 {
        if self.std_error == 0.0 {
            if self.mean == self.expected { 0.0 } else { f64::INFINITY }
        } else {
            (self.mean - self.expected).abs() / self.std_error
        }
    }
}

/// Rounds the rows `e_1` and `cos θ e_1 + sin θ e_2` of `R^ambient` `trials`
/// times. `Gw` and `Quad` are supported, as is `Mgon` with `m = 4`.
pub fn rounding_correlation(
    scheme: RoundingScheme,
    theta: f64,
    ambient: usize,
    trials: u32,
    seed: u64,
) -> Result<CorrelationStats> {
    if ambient < 2 {
        return Err(Error::arg(format!("two rows at an angle need ambient dimension >= 2, got {ambient}")));
    }
    if trials < 2 {
        return Err(Error::arg("need at least two trials"));
    }
    let mut a = vec![0.0; ambient];
    let mut b = vec![0.0; ambient];
    a[0] = 1.0;
    b[0] = theta.cos();
    b[1] = theta.sin();
    let factor = GramFactor::from_real_rows(&[a, b])?;
    let mut rng = substream(seed, Stream::Rounding(0));
    let (mut s, mut s2) = (0.0, 0.0);
    for _ in 0..trials {
        let z = match scheme {
            RoundingScheme::Gw => gw_round_with(&factor, &mut rng),
            RoundingScheme::Quad => quad_round_with(&factor, &mut rng),
            RoundingScheme::Mgon => mgon_round_with(&factor, 4, &mut rng)?,
        };
        let c = correlation(&z, 0, 1);
        s += c;
        s2 += c * c;
    }
    let n = trials as f64;
    let mean = s / n;
    let var = ((s2 - n * mean * mean) / (n - 1.0)).max(0.0);
    Ok(CorrelationStats {
        theta,
        ambient,
        trials,
        mean,
        std_error: (var / n).sqrt(),
        expected: 1.0 - 2.0 * theta / PI,
    })
}
