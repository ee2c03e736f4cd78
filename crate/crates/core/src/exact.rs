//! Ground-truth solvers: exhaustive enumeration of `B_m^n` and a depth-first
//! block branch-and-bound for [`BinaryQuadraticProgram`]s.

use crate::error::{Error, Result};
use crate::instances::{evaluate_objective, ProblemInstance, RootsAssignment};
use crate::reformulate::BinaryQuadraticProgram;
use crate::roots;
use num_complex::Complex64;
use std::time::{Duration, Instant};

#[derive(Debug, Clone, PartialEq)]
pub enum Argument {
    Roots(RootsAssignment),
    Binary(Vec<i8>),
}

impl Argument {
    pub fn as_roots(&self) -> Option<&RootsAssignment> {
        match self {
            Argument::Roots(z) => Some(z),
            Argument::Binary(_) => None,
        }
    }

    pub fn as_binary(&self) -> Option<&[i8]> {
        match self {
            Argument::Binary(x) => Some(x),
            Argument::Roots(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub value: f64,
    pub argument: Argument,
    pub nodes_explored: u64,
    /// Wall-clock solve time. Never part of a correctness check.
    pub wall_time: Duration,
    pub proven_optimal: bool,
    /// Successive incumbent values, in the order they were found.
    pub incumbent_history: Vec<f64>,
}

/// Number of points brute force visits: `m^{n−1}` (the first exponent is fixed
/// to 0 by global phase invariance).
pub fn brute_force_size(n: usize, m: usize) -> u128 {
    (m as u128).checked_pow(n.saturating_sub(1) as u32).unwrap_or(u128::MAX)
}

/// Exact maximum over `B_m^n` by enumeration with `z_1 = 1`.
///
/// Points are visited in lexicographic order of the exponent vector and only
/// strict improvements replace the incumbent, so the reported maximizer is
/// the lexicographically smallest one (up to 1e-12 relative ties).
pub fn brute_force(inst: &ProblemInstance, budget: u128) -> Result<SolveReport> {
    let (n, m) = (inst.n(), inst.m());
    let required = brute_force_size(n, m);
    if required > budget {
        return Err(Error::Budget { what: format!("brute force over B_{m}^{n}"), required, budget });
    }
    let start = Instant::now();
    let q = inst.q();
    let table = roots::table(m);
    let mut exps = vec![0usize; n];
    let mut z = vec![table[0]; n];

    // field[i] = Σ_{l≠i} Q_il z_l
    let field_of = |z: &[Complex64]| -> Vec<Complex64> {
        (0..n).map(|i| (0..n).filter(|&l| l != i).map(|l| q[(i, l)] * z[l]).sum()).collect()
    };
    let exact = |z: &[Complex64]| crate::instances::quadratic_form(q, z).re;
    let mut field = field_of(&z);
    let mut value = exact(&z);

    let mut best = value;
    let mut best_exps = exps.clone();
    let mut history = vec![best];
    let mut visited: u64 = 1;

    'outer: loop {
        // Odometer over positions 1..n, last position fastest.
        let mut pos = n;
        loop {
            if pos <= 1 {
                break 'outer;
            }
            pos -= 1;
            let old = z[pos];
            let (next, wrapped) = if exps[pos] + 1 == m { (0, true) } else { (exps[pos] + 1, false) };
            exps[pos] = next;
            z[pos] = table[next];
            let delta = z[pos] - old;
            value += 2.0 * (delta.conj() * field[pos]).re;
            for (i, f) in field.iter_mut().enumerate() {
                if i != pos {
                    *f += q[(i, pos)] * delta;
                }
            }
            if !wrapped {
                break;
            }
        }
        visited += 1;
        if visited % 4096 == 0 {
            field = field_of(&z);
            value = exact(&z);
        }
        if value > best + 1e-12 * (1.0 + best.abs()) {
            best = value;
            best_exps.copy_from_slice(&exps);
            history.push(best);
        }
    }

    let argument = RootsAssignment::new(m, best_exps)?;
    let value = evaluate_objective(inst, &argument)?;
    Ok(SolveReport {
        value,
        argument: Argument::Roots(argument),
        nodes_explored: visited,
        wall_time: start.elapsed(),
        proven_optimal: true,
        incumbent_history: history,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BranchingOrder {
    /// Blocks in index order.
    Index,
    /// Blocks by descending `Σ|M_ij|` over their rows, ties by index.
    GreedyDegree,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BnbConfig {
    pub node_budget: u64,
    pub time_budget: Duration,
    pub branching_order: BranchingOrder,
}

impl Default for BnbConfig {
    fn default() -> Self {
        BnbConfig {
            node_budget: 50_000_000,
            time_budget: Duration::from_secs(600),
            branching_order: BranchingOrder::GreedyDegree,
        }
    }
}

/// A node about to be expanded, as seen by a [`branch_and_bound_observed`] callback.
#[derive(Debug, Clone)]
pub struct NodeView<'a> {
    /// `(block, pattern index)` for every decided block, in branching order.
    pub decided: &'a [(usize, usize)],
    /// Upper bound on the objective (offset included) over the subtree.
    pub bound: f64,
}

struct Tables {
    blocks: usize,
    block_size: usize,
    domains: Vec<Vec<Vec<i8>>>,
    /// self_val[c][p] = pᵀ M_cc p
    self_val: Vec<Vec<f64>>,
    /// pair[c][d][p][q] = 2 pᵀ M_cd q for c ≠ d
    pair: Vec<Vec<Vec<Vec<f64>>>>,
    /// max over (p, q) of pair[c][d]
    pair_max: Vec<Vec<f64>>,
}

impl Tables {
    fn new(bqp: &BinaryQuadraticProgram) -> Self {
        let b = bqp.block_size();
        let blocks = bqp.dim / b;
        let domains = bqp.block_domains();
        let mm = &bqp.matrix;
        let bilinear = |c: usize, d: usize, p: &[i8], q: &[i8]| -> f64 {
            let mut acc = 0.0;
            for (a, &pa) in p.iter().enumerate() {
                if pa == 0 {
                    continue;
                }
                let mut row = 0.0;
                for (e, &qe) in q.iter().enumerate() {
                    row += mm[(c * b + a, d * b + e)] * qe as f64;
                }
                acc += pa as f64 * row;
            }
            acc
        };
        let self_val = (0..blocks)
            .map(|c| domains[c].iter().map(|p| bilinear(c, c, p, p)).collect())
            .collect();
        let mut pair = vec![vec![Vec::new(); blocks]; blocks];
        let mut pair_max = vec![vec![0.0; blocks]; blocks];
        for c in 0..blocks {
            for d in 0..blocks {
                if c == d {
                    continue;
                }
                let t: Vec<Vec<f64>> = domains[c]
                    .iter()
                    .map(|p| domains[d].iter().map(|q| 2.0 * bilinear(c, d, p, q)).collect())
                    .collect();
                pair_max[c][d] = t.iter().flatten().copied().fold(f64::NEG_INFINITY, f64::max);
                pair[c][d] = t;
            }
        }
        Tables { blocks, block_size: b, domains, self_val, pair, pair_max }
    }
}

fn block_order(bqp: &BinaryQuadraticProgram, order: BranchingOrder) -> Vec<usize> {
    let b = bqp.block_size();
    let blocks = bqp.dim / b;
    let mut idx: Vec<usize> = (0..blocks).collect();
    if order == BranchingOrder::GreedyDegree {
        let mass: Vec<f64> = (0..blocks)
            .map(|c| (c * b..(c + 1) * b).map(|i| bqp.matrix.row(i).iter().map(|v| v.abs()).sum::<f64>()).sum())
            .collect();
        idx.sort_by(|&a, &c| mass[c].total_cmp(&mass[a]).then(a.cmp(&c)));
    }
    idx
}

struct Search<'a, F: FnMut(&NodeView)> {
    t: Tables,
    order: Vec<usize>,
    /// tail_pairs[k] = Σ pair_max over unordered pairs within order[k..]
    tail_pairs: Vec<f64>,
    config: BnbConfig,
    start: Instant,
    nodes: u64,
    aborted: bool,
    incumbent: f64,
    incumbent_choice: Option<Vec<(usize, usize)>>,
    history: Vec<f64>,
    decided: Vec<(usize, usize)>,
    observer: &'a mut F,
}

impl<'a, F: FnMut(&NodeView)> Search<'a, F> {
    fn budget_exhausted(&mut self) -> bool {
        if self.aborted {
            return true;
        }
        if self.nodes >= self.config.node_budget
            || (self.nodes % 1024 == 0 && self.start.elapsed() > self.config.time_budget)
        {
            self.aborted = true;
        }
        self.aborted
    }

    /// Optimistic completion value of the undecided blocks `order[depth..]`,
    /// given linear terms `lin` from the decided blocks.
    fn completion_bound(&self, depth: usize, lin: &[Vec<f64>]) -> f64 {
        let mut acc = self.tail_pairs[depth];
        for &c in &self.order[depth..] {
            acc += lin[c]
                .iter()
                .zip(&self.t.self_val[c])
                .map(|(l, s)| l + s)
                .fold(f64::NEG_INFINITY, f64::max);
        }
        acc
    }

    fn offer(&mut self, value: f64) {
        if self.incumbent_choice.is_none() || value > self.incumbent {
            self.incumbent = value;
            self.incumbent_choice = Some(self.decided.clone());
            self.history.push(value);
        }
    }

    fn prunable(&self, bound: f64) -> bool {
        self.incumbent_choice.is_some() && bound <= self.incumbent + 1e-12 * (1.0 + self.incumbent.abs())
    }

    /// Expands the node at `depth` whose decided blocks contribute `fixed`.
    fn expand(&mut self, depth: usize, fixed: f64, lin: &[Vec<f64>], bound: f64) {
        self.nodes += 1;
        (self.observer)(&NodeView { decided: &self.decided, bound });
        if depth == self.t.blocks {
            self.offer(fixed);
            return;
        }
        let c = self.order[depth];
        let rest = &self.order[depth + 1..];

        // Child bounds for every pattern of block c.
        let mut children: Vec<(f64, usize, f64, Vec<Vec<f64>>)> = Vec::with_capacity(self.t.domains[c].len());
        for p in 0..self.t.domains[c].len() {
            let child_fixed = fixed + self.t.self_val[c][p] + lin[c][p];
            let mut child_lin = lin.to_vec();
            for &d in rest {
                for (q, v) in child_lin[d].iter_mut().enumerate() {
                    *v += self.t.pair[c][d][p][q];
                }
            }
            let child_bound = child_fixed + self.completion_bound(depth + 1, &child_lin);
            children.push((child_bound, p, child_fixed, child_lin));
        }
        children.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1)));

        for (child_bound, p, child_fixed, child_lin) in children {
            if self.budget_exhausted() {
                return;
            }
            if self.prunable(child_bound) {
                // Children are sorted by bound, so the rest are prunable too.
                return;
            }
            self.decided.push((c, p));
            self.expand(depth + 1, child_fixed, &child_lin, child_bound);
            self.decided.pop();
        }
    }
}

/// Exact maximization of `xᵀ M x + offset` over the program's feasible set.
///
/// Branching is block-wise over the allowed patterns (blocks of one variable
/// for unconstrained programs). The bound at a node is the exact value of
/// the decided blocks plus, for every undecided block, its best pattern
/// against the decided part, plus the largest possible value of every
/// undecided–undecided block pair.
pub fn branch_and_bound(bqp: &BinaryQuadraticProgram, config: &BnbConfig) -> Result<SolveReport> {
    branch_and_bound_observed(bqp, config, |_| {})
}

/// [`branch_and_bound`] with a callback invoked at every explored node.
pub fn branch_and_bound_observed<F: FnMut(&NodeView)>(
    bqp: &BinaryQuadraticProgram,
    config: &BnbConfig,
    mut observer: F,
) -> Result<SolveReport> {
    if config.node_budget == 0 || config.time_budget.is_zero() {
        return Err(Error::arg("branch-and-bound budgets must be positive"));
    }
    let start = Instant::now();
    // Re-validate: the fields are public and may have been edited.
    let bqp = BinaryQuadraticProgram::new(
        bqp.matrix.clone(),
        bqp.domain,
        bqp.constraint.clone(),
        bqp.offset,
        bqp.decoder,
    )?;
    let t = Tables::new(&bqp);
    let order = block_order(&bqp, config.branching_order);
    let blocks = t.blocks;
    let mut tail_pairs = vec![0.0; blocks + 1];
    for k in (0..blocks).rev() {
        let c = order[k];
        tail_pairs[k] = tail_pairs[k + 1] + order[k + 1..].iter().map(|&d| t.pair_max[c][d]).sum::<f64>();
    }
    let lin: Vec<Vec<f64>> = t.domains.iter().map(|d| vec![0.0; d.len()]).collect();

    // The search works with offset-free values; the observer sees bounds
    // with the offset included.
    let offset = bqp.offset;
    let mut shifted = |v: &NodeView| observer(&NodeView { decided: v.decided, bound: v.bound + offset });
    let mut search = Search {
        t,
        order,
        tail_pairs,
        config: *config,
        start,
        nodes: 0,
        aborted: false,
        incumbent: f64::NEG_INFINITY,
        incumbent_choice: None,
        history: Vec::new(),
        decided: Vec::with_capacity(blocks),
        observer: &mut shifted,
    };
    let root_bound = search.completion_bound(0, &lin);
    search.expand(0, 0.0, &lin, root_bound);

    let choice = search
        .incumbent_choice
        .clone()
        .ok_or_else(|| Error::arg("budget exhausted before any feasible point was found"))?;
    let b = search.t.block_size;
    let mut x = vec![0i8; bqp.dim];
    for &(c, p) in &choice {
        x[c * b..(c + 1) * b].copy_from_slice(&search.t.domains[c][p]);
    }
    let value = bqp.value(&x);
    let history = search.history.iter().map(|v| v + offset).collect();
    Ok(SolveReport {
        value,
        argument: Argument::Binary(x),
        nodes_explored: search.nodes,
        wall_time: start.elapsed(),
        proven_optimal: !search.aborted,
        incumbent_history: history,
    })
}

/// Exhaustive maximum over the program's feasible set; the oracle for
/// [`branch_and_bound`]. Refuses when the feasible set exceeds `budget`.
pub fn enumerate_program(bqp: &BinaryQuadraticProgram, budget: u128) -> Result<SolveReport> {
    let start = Instant::now();
    let domains = bqp.block_domains();
    let b = bqp.block_size();
    let required = domains.iter().try_fold(1u128, |acc, d| acc.checked_mul(d.len() as u128)).unwrap_or(u128::MAX);
    if required > budget {
        return Err(Error::Budget { what: "program enumeration".into(), required, budget });
    }
    let mut choice = vec![0usize; domains.len()];
    let mut x = vec![0i8; bqp.dim];
    let mut best: Option<(f64, Vec<i8>)> = None;
    let mut count = 0u64;
    loop {
        for (c, &p) in choice.iter().enumerate() {
            x[c * b..(c + 1) * b].copy_from_slice(&domains[c][p]);
        }
        let v = bqp.value(&x);
        count += 1;
        if best.as_ref().map_or(true, |(bv, _)| v > *bv) {
            best = Some((v, x.clone()));
        }
        let mut pos = domains.len();
        loop {
            if pos == 0 {
                let (value, x) = best.unwrap();
                return Ok(SolveReport {
                    value,
                    argument: Argument::Binary(x),
                    nodes_explored: count,
                    wall_time: start.elapsed(),
                    proven_optimal: true,
                    incumbent_history: vec![],
                });
            }
            pos -= 1;
            choice[pos] += 1;
            if choice[pos] < domains[pos].len() {
                break;
            }
            choice[pos] = 0;
        }
    }
}

/// `xᵀ M x + offset` after checking domain and block constraints.
pub fn certify_solution(bqp: &BinaryQuadraticProgram, x: &[i8]) -> Result<f64> {
    bqp.check_feasible(x)?;
    Ok(bqp.value(x))
}
