//! Level-k moment relaxation of `max z* Q z` over `B_m^n`.
//!
//! The moment matrix is indexed by `M(k)` with `H[α, β] = y(β − α)`, unit
//! diagonal, and must be Hermitian PSD; the objective is
//! `Σ_i Q_ii + Re Σ_{i≠j} Q_ij y(e_j − e_i)`.
//!
//! The program is solved with ADMM on the splitting "PSD cone ∩ moment
//! structure": the structure projection averages each difference class, the
//! cone projection clips eigenvalues. Residual balancing adapts the penalty.

use super::{level_monomials, Exponent};
use crate::error::{Error, Result};
use crate::instances::ProblemInstance;
use crate::linalg::{project_psd, CMatrix};
use num_complex::Complex64;
use std::collections::HashMap;

/// Largest `|M(k)|` accepted.
pub const MOMENT_BASIS_BUDGET: usize = 200;

#[derive(Debug, Clone, PartialEq)]
pub struct MomentConfig {
    /// Stop when primal and dual residuals (normalized scale) fall below this.
    pub tol: f64,
    pub max_iters: usize,
    pub basis_budget: usize,
}

impl Default for MomentConfig {
    fn default() -> Self {
        MomentConfig { tol: 1e-7, max_iters: 50_000, basis_budget: MOMENT_BASIS_BUDGET }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MomentResult {
    /// Level-k upper bound on the discrete maximum.
    pub value: f64,
    pub level: usize,
    pub basis_size: usize,
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    /// False when `max_iters` ran out first; the value is then unreliable.
    pub converged: bool,
}

struct Structure {
    size: usize,
    /// Class id of every entry, row-major.
    class_of: Vec<usize>,
    class_len: Vec<usize>,
    zero_class: usize,
}

impl Structure {
    fn new(basis: &[Exponent], m: usize) -> (Self, HashMap<Vec<usize>, usize>) {
        let size = basis.len();
        let mut ids: HashMap<Vec<usize>, usize> = HashMap::new();
        let mut class_of = Vec::with_capacity(size * size);
        let mut class_len = Vec::new();
        for a in basis {
            for b in basis {
                let d = a.difference(b, m).entries().to_vec();
                let next = ids.len();
                let id = *ids.entry(d).or_insert(next);
                if id == class_len.len() {
                    class_len.push(0);
                }
                class_len[id] += 1;
                class_of.push(id);
            }
        }
        let zero_class = ids[&vec![0; basis[0].entries().len()]];
        (Structure { size, class_of, class_len, zero_class }, ids)
    }

    /// Frobenius projection onto matrices constant on every class with unit
    /// diagonal.
    fn project(&self, h: &CMatrix) -> CMatrix {
        let mut sums = vec![Complex64::default(); self.class_len.len()];
        for i in 0..self.size {
            for j in 0..self.size {
                sums[self.class_of[i * self.size + j]] += h[(i, j)];
            }
        }
        for (s, &len) in sums.iter_mut().zip(&self.class_len) {
            *s /= len as f64;
        }
        sums[self.zero_class] = Complex64::new(1.0, 0.0);
        CMatrix::from_fn(self.size, self.size, |i, j| sums[self.class_of[i * self.size + j]])
    }
}

fn frobenius(h: &CMatrix) -> f64 {
    h.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt()
}

/// `Re Σ conj(A_ij) B_ij`.
fn inner(a: &CMatrix, b: &CMatrix) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x.conj() * y).re).sum()
}

pub fn moment_relaxation(inst: &ProblemInstance, k: usize, config: &MomentConfig) -> Result<MomentResult> {
    let (n, m) = (inst.n(), inst.m());
    let q = inst.q();
    let basis = level_monomials(n, m, k)?;
    if basis.len() > config.basis_budget {
        return Err(Error::Budget {
            what: format!("level-{k} moment matrix for n={n}, m={m}"),
            required: basis.len() as u128,
            budget: config.basis_budget as u128,
        });
    }
    let (structure, ids) = Structure::new(&basis, m);
    let size = structure.size;

    // Objective coefficient of every difference class.
    let constant: f64 = (0..n).map(|i| q[(i, i)].re).sum();
    let mut coef = vec![Complex64::default(); structure.class_len.len()];
    for i in 0..n {
        for j in 0..n {
            if i == j || q[(i, j)] == Complex64::default() {
                continue;
            }
            let mut gamma = vec![0; n];
            gamma[j] = 1;
            gamma[i] = (gamma[i] + m - 1) % m;
            let id = *ids.get(&gamma).ok_or_else(|| {
                Error::arg(format!("level {k} is too low to represent the coupling ({i}, {j})"))
            })?;
            coef[id] += q[(i, j)];
        }
    }
    // Spread each coefficient evenly over its class: ⟨C, H⟩ = Re Σ coef_γ y_γ.
    let c = CMatrix::from_fn(size, size, |i, j| {
        let id = structure.class_of[i * size + j];
        coef[id].conj() / structure.class_len[id] as f64
    });
    let scale = frobenius(&c);
    if scale == 0.0 {
        return Ok(MomentResult {
            value: constant,
            level: k,
            basis_size: size,
            iterations: 0,
            primal_residual: 0.0,
            dual_residual: 0.0,
            converged: true,
        });
    }
    let c = c / Complex64::new(scale, 0.0);

    let mut rho = 1.0;
    let mut x = CMatrix::identity(size, size);
    let mut u = CMatrix::zeros(size, size);
    let mut y = x.clone();
    let (mut r_primal, mut r_dual) = (f64::INFINITY, f64::INFINITY);
    let mut iterations = 0;
    let dim_scale = size as f64;
    while iterations < config.max_iters {
        iterations += 1;
        y = structure.project(&(&x - &u + &c * Complex64::new(1.0 / rho, 0.0)));
        let x_prev = x;
        x = project_psd(&(&y + &u));
        u += &y - &x;
        r_primal = frobenius(&(&y - &x)) / dim_scale;
        r_dual = rho * frobenius(&(&x - &x_prev)) / dim_scale;
        if r_primal <= config.tol && r_dual <= config.tol {
            break;
        }
        if iterations % 25 == 0 {
            if r_primal > 10.0 * r_dual {
                rho *= 2.0;
                u /= Complex64::new(2.0, 0.0);
            } else if r_dual > 10.0 * r_primal {
                rho /= 2.0;
                u *= Complex64::new(2.0, 0.0);
            }
        }
    }
    let converged = r_primal <= config.tol && r_dual <= config.tol;
    Ok(MomentResult {
        value: constant + scale * inner(&c, &y),
        level: k,
        basis_size: size,
        iterations,
        primal_residual: r_primal,
        dual_residual: r_dual,
        converged,
    })
}
