//! Problem instances, the objective `Re(z* Q z)`, and the three generators.

use crate::error::{Error, Result};
use crate::linalg::{hermitian_defect, hermitian_part, CMatrix};
use crate::rng::{complex_normal, substream, Stream};
use crate::roots;
use num_complex::Complex64;
use rand::Rng;

/// Tolerance used when validating Hermitian input.
pub const HERMITIAN_TOL: f64 = 1e-12;

/// Largest vertex count the grid generator will build.
pub const GRID_SIZE_BUDGET: usize = 1 << 16;

/// A Hermitian coupling matrix together with the root order `m`.
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance {
    n: usize,
    m: usize,
    q: CMatrix,
    pub label: String,
    pub seed: Option<u64>,
}

impl ProblemInstance {
    /// Validates shape, `m ≥ 2` and Hermitian symmetry to [`HERMITIAN_TOL`],
    /// then stores the exact Hermitian part of `q`.
    pub fn new(q: CMatrix, m: usize, label: impl Into<String>) -> Result<Self> {
        let n = q.nrows();
        if n == 0 || q.ncols() != n {
            return Err(Error::arg(format!(
                "coupling matrix must be square and nonempty, got {}x{}",
                q.nrows(),
                q.ncols()
            )));
        }
        if m < 2 {
            return Err(Error::arg(format!("root order must be at least 2, got {m}")));
        }
        if q.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            return Err(Error::arg("coupling matrix has non-finite entries"));
        }
        let defect = hermitian_defect(&q);
        if defect > HERMITIAN_TOL {
            return Err(Error::arg(format!("coupling matrix is not Hermitian (defect {defect:e})")));
        }
        Ok(ProblemInstance { n, m, q: hermitian_part(&q), label: label.into(), seed: None })
    }

    /// Real symmetric couplings given row-major.
    pub fn from_real(n: usize, m: usize, entries: &[f64], label: impl Into<String>) -> Result<Self> {
        if entries.len() != n * n {
            return Err(Error::arg(format!("expected {} entries, got {}", n * n, entries.len())));
        }
        let q = CMatrix::from_fn(n, n, |i, j| Complex64::new(entries[i * n + j], 0.0));
        Self::new(q, m, label)
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    /// Same couplings, different root order.
    pub fn with_m(&self, m: usize) -> Result<Self> {
        if m < 2 {
            return Err(Error::arg(format!("root order must be at least 2, got {m}")));
        }
        Ok(ProblemInstance { m, ..self.clone() })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn q(&self) -> &CMatrix {
        &self.q
    }

    /// True when every coupling has zero imaginary part.
    pub fn is_real(&self) -> bool {
        self.q.iter().all(|c| c.im == 0.0)
    }
}

/// A point of `B_m^n`, stored by exponents: `z_i = ω^{exponents[i]}`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct RootsAssignment {
    m: usize,
    exponents: Vec<usize>,
}

impl RootsAssignment {
    pub fn new(m: usize, exponents: Vec<usize>) -> Result<Self> {
        if m < 2 {
            return Err(Error::arg(format!("root order must be at least 2, got {m}")));
        }
        if let Some((i, &e)) = exponents.iter().enumerate().find(|(_, &e)| e >= m) {
            return Err(Error::arg(format!("exponent {e} at position {i} is not below m = {m}")));
        }
        Ok(RootsAssignment { m, exponents })
    }

    pub fn zeros(m: usize, n: usize) -> Self {
        RootsAssignment { m, exponents: vec![0; n] }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn len(&self) -> usize {
        self.exponents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.exponents.is_empty()
    }

    pub fn exponents(&self) -> &[usize] {
        &self.exponents
    }

    pub fn values(&self) -> Vec<Complex64> {
        self.exponents.iter().map(|&e| roots::root(self.m, e)).collect()
    }

    /// Multiplies every entry by `ω^shift`.
    pub fn rotated(&self, shift: usize) -> Self {
        let m = self.m;
        RootsAssignment { m, exponents: self.exponents.iter().map(|&e| (e + shift) % m).collect() }
    }

    /// Reinterprets the assignment in `B_target` when `m` divides `target`.
    pub fn lift(&self, target: usize) -> Result<Self> {
        if target % self.m != 0 {
            return Err(Error::arg(format!("{} does not divide {target}", self.m)));
        }
        let f = target / self.m;
        RootsAssignment::new(target, self.exponents.iter().map(|&e| e * f).collect())
    }
}

/// `Re(z* Q z) = Re Σ_ij Q_ij conj(z_i) z_j`.
pub fn evaluate_objective(inst: &ProblemInstance, z: &RootsAssignment) -> Result<f64> {
    if z.m != inst.m {
        return Err(Error::arg(format!("assignment has m = {}, instance has m = {}", z.m, inst.m)));
    }
    if z.len() != inst.n {
        return Err(Error::arg(format!("assignment has length {}, instance has n = {}", z.len(), inst.n)));
    }
    let value = quadratic_form(&inst.q, &z.values());
    debug_assert!(value.im.abs() <= 1e-10 * (1.0 + value.re.abs()), "imaginary residue {}", value.im);
    Ok(value.re)
}

/// `z* Q z` for an arbitrary complex vector.
pub fn quadratic_form(q: &CMatrix, z: &[Complex64]) -> Complex64 {
    let n = z.len();
    let mut acc = Complex64::default();
    for i in 0..n {
        let mut row = Complex64::default();
        for j in 0..n {
            row += q[(i, j)] * z[j];
        }
        acc += z[i].conj() * row;
    }
    acc
}

/// Random real symmetric couplings: the upper triangle (diagonal included) is
/// i.i.d. uniform on `[lo, hi]` and mirrored.
pub fn gen_potts_instance(n: usize, m: usize, lo: f64, hi: f64, seed: u64) -> Result<ProblemInstance> {
    if !(lo < hi) {
        return Err(Error::arg(format!("need lo < hi, got [{lo}, {hi}]")));
    }
    if n == 0 {
        return Err(Error::arg("n must be positive"));
    }
    let mut rng = substream(seed, Stream::Couplings);
    let mut q = CMatrix::zeros(n, n);
    for i in 0..n {
        for j in i..n {
            let v = rng.gen_range(lo..=hi);
            q[(i, j)] = Complex64::new(v, 0.0);
            q[(j, i)] = Complex64::new(v, 0.0);
        }
    }
    Ok(ProblemInstance::new(q, m, format!("potts n={n} m={m} U[{lo},{hi}]"))?.with_seed(seed))
}

/// A periodic nearest-neighbour grid together with its parity colouring.
#[derive(Debug, Clone)]
pub struct GridInstance {
    pub instance: ProblemInstance,
    /// Coordinate-sum parity of every vertex.
    pub coloring: Vec<u8>,
    /// Whether `coloring` is a proper 2-colouring of the coupling graph
    /// (false for odd `L`, where the wrap-around closes odd cycles).
    pub bipartite: bool,
    pub side: usize,
    pub dims: usize,
}

/// Vertex `index` of `Z_L^d` in mixed radix, least significant coordinate first.
fn grid_coords(mut index: usize, side: usize, dims: usize) -> Vec<usize> {
    let mut c = Vec::with_capacity(dims);
    for _ in 0..dims {
        c.push(index % side);
        index /= side;
    }
    c
}

/// Nearest-neighbour couplings on the torus `Z_L^d`, i.i.d. uniform on
/// `[-1, 1]`. For `L = 2` the wrap edge coincides with the direct edge and the
/// two draws are summed.
pub fn gen_grid_instance(side: usize, dims: usize, m: usize, coupling_seed: u64) -> Result<GridInstance> {
    if side < 2 || dims < 1 {
        return Err(Error::arg(format!("need L >= 2 and d >= 1, got L = {side}, d = {dims}")));
    }
    let n = (0..dims).try_fold(1usize, |acc, _| acc.checked_mul(side).filter(|&v| v <= GRID_SIZE_BUDGET));
    let n = n.ok_or_else(|| Error::Budget {
        what: format!("grid {side}^{dims}"),
        required: (side as u128).saturating_pow(dims as u32),
        budget: GRID_SIZE_BUDGET as u128,
    })?;

    let mut rng = substream(coupling_seed, Stream::Couplings);
    let mut q = CMatrix::zeros(n, n);
    let mut stride = 1;
    for _axis in 0..dims {
        for v in 0..n {
            let coord = (v / stride) % side;
            let w = v - coord * stride + ((coord + 1) % side) * stride;
            let j: f64 = rng.gen_range(-1.0..=1.0);
            q[(v, w)] += Complex64::new(j, 0.0);
            q[(w, v)] += Complex64::new(j, 0.0);
        }
        stride *= side;
    }

    let coloring: Vec<u8> = (0..n)
        .map(|v| (grid_coords(v, side, dims).iter().sum::<usize>() % 2) as u8)
        .collect();
    let bipartite = (0..n).all(|i| (0..n).all(|j| q[(i, j)].norm() == 0.0 || coloring[i] != coloring[j]));
    let instance = ProblemInstance::new(q, m, format!("grid L={side} d={dims} m={m}"))?.with_seed(coupling_seed);
    Ok(GridInstance { instance, coloring, bipartite, side, dims })
}

/// Channel, observation and transmitted symbols behind a MIMO instance.
#[derive(Debug, Clone)]
pub struct MimoGroundTruth {
    /// `d × n` channel matrix.
    pub channel: CMatrix,
    /// Received vector `r = H x* + σ v`.
    pub received: Vec<Complex64>,
    pub symbols: RootsAssignment,
    pub sigma: f64,
}

impl MimoGroundTruth {
    /// `‖H x − r z₀‖²` for the extended assignment `(z₀, x)`.
    pub fn residual(&self, z: &RootsAssignment) -> f64 {
        let vals = z.values();
        let (z0, x) = (vals[0], &vals[1..]);
        let d = self.channel.nrows();
        (0..d)
            .map(|row| {
                let hx: Complex64 = x.iter().enumerate().map(|(j, xj)| self.channel[(row, j)] * xj).sum();
                (hx - self.received[row] * z0).norm_sqr()
            })
            .sum()
    }
}

/// Maximum-likelihood m-PSK detection as an `(n+1)`-variable instance with
/// `Q = [[−r*r, r*H], [H*r, −H*H]]`, so that `z* Q z = −‖H x − r z₀‖²`.
pub fn gen_mimo_instance(
    d: usize,
    n: usize,
    m: usize,
    snr: f64,
    seed: u64,
) -> Result<(ProblemInstance, MimoGroundTruth)> {
    if d == 0 || n == 0 {
        return Err(Error::arg(format!("need d, n >= 1, got d = {d}, n = {n}")));
    }
    if !(snr > 0.0) || !snr.is_finite() {
        return Err(Error::arg(format!("snr must be positive and finite, got {snr}")));
    }
    let sigma = 1.0 / snr.sqrt();
    let mut h_rng = substream(seed, Stream::Channel);
    let channel = CMatrix::from_fn(d, n, |_, _| Complex64::default());
    let mut channel = channel;
    for i in 0..d {
        for j in 0..n {
            channel[(i, j)] = complex_normal(&mut h_rng);
        }
    }
    let mut v_rng = substream(seed, Stream::Noise);
    let noise: Vec<Complex64> = (0..d).map(|_| complex_normal(&mut v_rng)).collect();
    let mut x_rng = substream(seed, Stream::Symbols);
    let symbols = RootsAssignment::new(m, (0..n).map(|_| x_rng.gen_range(0..m)).collect())?;
    let x = symbols.values();

    let received: Vec<Complex64> = (0..d)
        .map(|i| (0..n).map(|j| channel[(i, j)] * x[j]).sum::<Complex64>() + noise[i] * sigma)
        .collect();

    let mut q = CMatrix::zeros(n + 1, n + 1);
    q[(0, 0)] = Complex64::new(-received.iter().map(|r| r.norm_sqr()).sum::<f64>(), 0.0);
    for j in 0..n {
        // (r* H)_j
        let rh: Complex64 = (0..d).map(|i| received[i].conj() * channel[(i, j)]).sum();
        q[(0, j + 1)] = rh;
        q[(j + 1, 0)] = rh.conj();
    }
    for a in 0..n {
        for b in 0..n {
            let hh: Complex64 = (0..d).map(|i| channel[(i, a)].conj() * channel[(i, b)]).sum();
            q[(a + 1, b + 1)] = -hh;
        }
    }
    let inst = ProblemInstance::new(hermitian_part(&q), m, format!("mimo d={d} n={n} m={m} snr={snr}"))?
        .with_seed(seed);
    Ok((inst, MimoGroundTruth { channel, received, symbols, sigma }))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    fn swap_matrix() -> ProblemInstance {
        ProblemInstance::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0], "swap").unwrap()
    }

    #[test]
    fn zero_and_identity_objectives() {
        for m in 2..6 {
            let zero = ProblemInstance::new(CMatrix::zeros(3, 3), m, "zero").unwrap();
            let id = ProblemInstance::new(CMatrix::identity(3, 3), m, "id").unwrap();
            let z = RootsAssignment::new(m, vec![0, 1, m - 1]).unwrap();
            assert_eq!(evaluate_objective(&zero, &z).unwrap(), 0.0);
            assert!((evaluate_objective(&id, &z).unwrap() - 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn two_by_two_swap() {
        let z = RootsAssignment::new(2, vec![0, 0]).unwrap();
        assert_eq!(evaluate_objective(&swap_matrix(), &z).unwrap(), 2.0);
        let z = RootsAssignment::new(2, vec![0, 1]).unwrap();
        assert_eq!(evaluate_objective(&swap_matrix(), &z).unwrap(), -2.0);
    }

    #[test]
    fn mismatches_are_argument_errors() {
        let inst = swap_matrix();
        let wrong_m = RootsAssignment::new(3, vec![0, 0]).unwrap();
        let wrong_n = RootsAssignment::new(2, vec![0]).unwrap();
        assert!(matches!(evaluate_objective(&inst, &wrong_m), Err(Error::Argument(_))));
        assert!(matches!(evaluate_objective(&inst, &wrong_n), Err(Error::Argument(_))));
        assert!(RootsAssignment::new(3, vec![3]).is_err());
        assert!(RootsAssignment::new(1, vec![0]).is_err());
    }

    #[test]
    fn non_hermitian_rejected() {
        let q = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 1.), c(1., 1.), c(0., 0.)]);
        assert!(ProblemInstance::new(q, 3, "bad").is_err());
        let q = CMatrix::from_row_slice(2, 2, &[c(0., 0.), c(1., 1.), c(1., -1.), c(0., 0.)]);
        assert!(ProblemInstance::new(q, 3, "ok").is_ok());
        assert!(ProblemInstance::new(CMatrix::identity(2, 2), 1, "m1").is_err());
    }

    #[test]
    fn potts_is_deterministic_symmetric_and_in_range() {
        let a = gen_potts_instance(5, 4, -10.0, 10.0, 11).unwrap();
        let b = gen_potts_instance(5, 4, -10.0, 10.0, 11).unwrap();
        let other = gen_potts_instance(5, 4, -10.0, 10.0, 12).unwrap();
        assert_eq!(a.q(), b.q());
        assert_ne!(a.q(), other.q());
        assert!(a.is_real());
        for i in 0..5 {
            for j in 0..5 {
                let v = a.q()[(i, j)].re;
                assert!((-10.0..=10.0).contains(&v));
                assert_eq!(v, a.q()[(j, i)].re);
            }
        }
        assert!(gen_potts_instance(3, 4, 1.0, 1.0, 0).is_err());
    }

    fn coupled_pairs(inst: &ProblemInstance) -> Vec<(usize, usize)> {
        let n = inst.n();
        let mut out = vec![];
        for i in 0..n {
            for j in (i + 1)..n {
                if inst.q()[(i, j)].norm() > 0.0 {
                    out.push((i, j));
                }
            }
        }
        out
    }

    #[test]
    fn smallest_grids() {
        let g = gen_grid_instance(2, 1, 2, 3).unwrap();
        assert_eq!(g.instance.n(), 2);
        assert_eq!(coupled_pairs(&g.instance), vec![(0, 1)]);

        // 2x2 torus: each vertex keeps exactly two distinct neighbours.
        let g = gen_grid_instance(2, 2, 2, 3).unwrap();
        assert_eq!(g.instance.n(), 4);
        let pairs = coupled_pairs(&g.instance);
        assert_eq!(pairs.len(), 4);
        for v in 0..4 {
            assert_eq!(pairs.iter().filter(|(a, b)| *a == v || *b == v).count(), 2);
        }
    }

    #[test]
    fn parity_coloring_is_proper_for_even_side() {
        for (side, dims) in [(2, 1), (2, 2), (2, 3), (4, 2), (6, 1)] {
            let g = gen_grid_instance(side, dims, 2, 5).unwrap();
            assert!(g.bipartite, "L={side} d={dims}");
            for (i, j) in coupled_pairs(&g.instance) {
                assert_ne!(g.coloring[i], g.coloring[j]);
            }
            assert_eq!(g.instance.q().diagonal().iter().map(|c| c.norm()).sum::<f64>(), 0.0);
        }
        let odd = gen_grid_instance(3, 2, 2, 5).unwrap();
        assert!(!odd.bipartite);
        assert_eq!(coupled_pairs(&odd.instance).len(), 18);
    }

    #[test]
    fn grid_budget_refused() {
        assert!(matches!(gen_grid_instance(10, 6, 2, 0), Err(Error::Budget { .. })));
        assert!(gen_grid_instance(1, 2, 2, 0).is_err());
    }

    #[test]
    fn mimo_objective_is_negated_residual() {
        for seed in 0..5 {
            let (inst, truth) = gen_mimo_instance(4, 3, 4, 10.0, seed).unwrap();
            assert_eq!(inst.n(), 4);
            let mut rng = substream(seed + 100, Stream::Symbols);
            for _ in 0..20 {
                let z = RootsAssignment::new(4, (0..4).map(|_| rng.gen_range(0..4)).collect()).unwrap();
                let f = evaluate_objective(&inst, &z).unwrap();
                let res = truth.residual(&z);
                assert!((f + res).abs() <= 1e-9 * (1.0 + res), "{f} vs {res}");
            }
        }
    }

    #[test]
    fn mimo_is_deterministic() {
        let (a, ta) = gen_mimo_instance(3, 2, 8, 1.0, 9).unwrap();
        let (b, tb) = gen_mimo_instance(3, 2, 8, 1.0, 9).unwrap();
        assert_eq!(a, b);
        assert_eq!(ta.symbols, tb.symbols);
        assert!((ta.sigma - 1.0).abs() < 1e-15);
    }

    #[test]
    fn global_phase_invariance() {
        let (inst, _) = gen_mimo_instance(3, 3, 6, 2.0, 4).unwrap();
        let z = RootsAssignment::new(6, vec![1, 4, 2, 5]).unwrap();
        let f = evaluate_objective(&inst, &z).unwrap();
        for c in 0..6 {
            let g = evaluate_objective(&inst, &z.rotated(c)).unwrap();
            assert!((f - g).abs() < 1e-9 * (1.0 + f.abs()));
        }
    }
}
