//! Exact real binary reformulations of `max z* Q z` over `B_m^n`.
//!
//! Three encodings are provided:
//!
//! | encoding | variables | domain | constraint |
//! |----------|-----------|--------|------------|
//! | [`basic_reformulation`] | `m·n` | `{0,1}` | one-hot blocks of size `m` |
//! | [`zonotope_reformulation`] (even `m`) | `m·n/2` | `{±1}` | each block is one of the `m` patterns `±w_k` |
//! | [`quarter_reformulation`] (`m = 4`) | `2n` | `{±1}` | none |
//!
//! The zonotope encoding rests on the regular m-gon being the image of the cube
//! `[-1,1]^{m/2}` under a linear map `T`; the cube vertices landing on the
//! m-gon vertices are exactly the sign vectors with at most one sign change,
//! `w_k = (−1,…,−1, 1,…,1)` with `k` leading `−1`s and their negatives.

use crate::error::{Error, Result};
use crate::instances::{ProblemInstance, RootsAssignment};
use crate::roots;
use nalgebra::DMatrix;
use num_complex::Complex64;
use std::f64::consts::PI;

pub const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum VarDomain {
    ZeroOne,
    PlusMinusOne,
}

impl VarDomain {
    pub fn values(self) -> [i8; 2] {
        match self {
            VarDomain::ZeroOne => [0, 1],
            VarDomain::PlusMinusOne => [-1, 1],
        }
    }

    pub fn contains(self, v: i8) -> bool {
        self.values().contains(&v)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Constraint {
    None,
    /// Each consecutive block of `block` variables sums to one.
    OneHot { block: usize },
    /// Each consecutive block of `block` variables equals one of `allowed`.
    BlockPatterns { block: usize, allowed: Vec<Vec<i8>> },
}

impl Constraint {
    pub fn block_size(&self) -> Option<usize> {
        match self {
            Constraint::None => None,
            Constraint::OneHot { block } | Constraint::BlockPatterns { block, .. } => Some(*block),
        }
    }
}

/// Which reformulation produced a program, and therefore how to decode it.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DecoderTag {
    Basic { m: usize },
    Zonotope { m: usize },
    Quarter,
    /// Hand-built program with no decoder.
    Raw,
}

/// Maximize `xᵀ M x + offset` over a binary domain with optional block constraints.
#[derive(Debug, Clone, PartialEq)]
pub struct BinaryQuadraticProgram {
    pub dim: usize,
    pub matrix: DMatrix<f64>,
    pub domain: VarDomain,
    pub constraint: Constraint,
    pub offset: f64,
    pub decoder: DecoderTag,
}

impl BinaryQuadraticProgram {
    /// Validates the shape and symmetry (to [`SYMMETRY_TOL`]) and stores `(M + Mᵀ)/2`.
    pub fn new(
        matrix: DMatrix<f64>,
        domain: VarDomain,
        constraint: Constraint,
        offset: f64,
        decoder: DecoderTag,
    ) -> Result<Self> {
        let dim = matrix.nrows();
        if matrix.ncols() != dim {
            return Err(Error::arg(format!("matrix must be square, got {}x{}", dim, matrix.ncols())));
        }
        let mut worst: f64 = 0.0;
        for i in 0..dim {
            for j in (i + 1)..dim {
                worst = worst.max((matrix[(i, j)] - matrix[(j, i)]).abs());
            }
        }
        if worst > SYMMETRY_TOL {
            return Err(Error::arg(format!("matrix is not symmetric (defect {worst:e})")));
        }
        match &constraint {
            Constraint::None => {}
            Constraint::OneHot { block } => {
                if *block == 0 || dim % block != 0 {
                    return Err(Error::arg(format!("one-hot block {block} does not divide dim {dim}")));
                }
                if domain != VarDomain::ZeroOne {
                    return Err(Error::arg("one-hot blocks need the 0/1 domain"));
                }
            }
            Constraint::BlockPatterns { block, allowed } => {
                if *block == 0 || dim % block != 0 {
                    return Err(Error::arg(format!("pattern block {block} does not divide dim {dim}")));
                }
                if allowed.is_empty() {
                    return Err(Error::arg("pattern list is empty"));
                }
                for p in allowed {
                    if p.len() != *block || p.iter().any(|&v| !domain.contains(v)) {
                        return Err(Error::arg(format!("pattern {p:?} is not a length-{block} domain vector")));
                    }
                }
            }
        }
        let matrix = (&matrix + matrix.transpose()) * 0.5;
        Ok(BinaryQuadraticProgram { dim, matrix, domain, constraint, offset, decoder })
    }

    /// `xᵀ M x + offset`, without any feasibility check.
    pub fn value(&self, x: &[i8]) -> f64 {
        let mut acc = 0.0;
        for i in 0..self.dim {
            if x[i] == 0 {
                continue;
            }
            let mut row = 0.0;
            for j in 0..self.dim {
                row += self.matrix[(i, j)] * x[j] as f64;
            }
            acc += x[i] as f64 * row;
        }
        acc + self.offset
    }

    /// Size of the blocks branched on: the constraint block, or 1 when unconstrained.
    pub fn block_size(&self) -> usize {
        self.constraint.block_size().unwrap_or(1)
    }

    /// The values each block may take, one list per block.
    pub fn block_domains(&self) -> Vec<Vec<Vec<i8>>> {
        let b = self.block_size();
        let per_block: Vec<Vec<i8>> = match &self.constraint {
            Constraint::None => self.domain.values().iter().map(|&v| vec![v]).collect(),
            Constraint::OneHot { block } => (0..*block)
                .map(|k| (0..*block).map(|i| i8::from(i == k)).collect())
                .collect(),
            Constraint::BlockPatterns { allowed, .. } => allowed.clone(),
        };
        vec![per_block; self.dim / b]
    }

    /// Checks `x` against the domain and constraints, naming the first bad block.
    pub fn check_feasible(&self, x: &[i8]) -> Result<()> {
        if x.len() != self.dim {
            return Err(Error::arg(format!("point has length {}, program has dim {}", x.len(), self.dim)));
        }
        let b = self.block_size();
        for (blk, chunk) in x.chunks(b).enumerate() {
            if let Some(&v) = chunk.iter().find(|&&v| !self.domain.contains(v)) {
                return Err(Error::Feasibility { block: blk, reason: format!("value {v} outside the {:?} domain", self.domain) });
            }
            match &self.constraint {
                Constraint::None => {}
                Constraint::OneHot { .. } => {
                    let s: i32 = chunk.iter().map(|&v| v as i32).sum();
                    if s != 1 {
                        return Err(Error::Feasibility { block: blk, reason: format!("one-hot block sums to {s}") });
                    }
                }
                Constraint::BlockPatterns { allowed, .. } => {
                    if !allowed.iter().any(|p| p.as_slice() == chunk) {
                        return Err(Error::Feasibility { block: blk, reason: format!("{chunk:?} is not an allowed pattern") });
                    }
                }
            }
        }
        Ok(())
    }
}

/// Symmetric real matrix from a dense builder, symmetrized.
fn symmetrized(mut m: DMatrix<f64>) -> DMatrix<f64> {
    let t = m.transpose();
    m += t;
    m * 0.5
}

/// The one-hot encoding with `x_{j,k} = 1` iff `z_j = ω^k`; objective
/// `xᵀ Re(Q ⊗ W) x` with `W_{ab} = ω^{b−a}`.
pub fn basic_reformulation(inst: &ProblemInstance) -> BinaryQuadraticProgram {
    let (n, m) = (inst.n(), inst.m());
    let q = inst.q();
    let w: Vec<Complex64> = roots::table(m);
    let mut mat = DMatrix::zeros(m * n, m * n);
    for j in 0..n {
        for l in 0..n {
            let qjl = q[(j, l)];
            for a in 0..m {
                for b in 0..m {
                    mat[(j * m + a, l * m + b)] = (qjl * w[(b + m - a) % m]).re;
                }
            }
        }
    }
    BinaryQuadraticProgram::new(
        symmetrized(mat),
        VarDomain::ZeroOne,
        Constraint::OneHot { block: m },
        0.0,
        DecoderTag::Basic { m },
    )
    .expect("basic reformulation is well formed")
}

pub fn encode_basic(z: &RootsAssignment) -> Vec<i8> {
    let m = z.m();
    let mut x = vec![0i8; m * z.len()];
    for (j, &e) in z.exponents().iter().enumerate() {
        x[j * m + e] = 1;
    }
    x
}

pub fn decode_basic(x: &[i8], m: usize) -> Result<RootsAssignment> {
    if m < 2 || x.len() % m != 0 {
        return Err(Error::Decode { block: 0, reason: format!("length {} is not a multiple of m = {m}", x.len()) });
    }
    let mut exps = Vec::with_capacity(x.len() / m);
    for (blk, chunk) in x.chunks(m).enumerate() {
        if chunk.iter().any(|&v| v != 0 && v != 1) || chunk.iter().map(|&v| v as i32).sum::<i32>() != 1 {
            return Err(Error::Decode { block: blk, reason: format!("{chunk:?} is not one-hot") });
        }
        exps.push(chunk.iter().position(|&v| v == 1).unwrap());
    }
    RootsAssignment::new(m, exps)
}

/// The linear map `T : R^{m/2} → C` whose image of the cube is the regular
/// m-gon, with the sign patterns that land on its vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct ZonotopeMap {
    m: usize,
    /// Row 0 is `Re T(e_k)`, row 1 is `Im T(e_k)`.
    a: DMatrix<f64>,
    /// `patterns[e]` is the sign vector mapped to `ω^e`.
    patterns: Vec<Vec<i8>>,
}

/// `w_k`: `k` leading `−1`s followed by `+1`s.
pub fn w_pattern(half: usize, k: usize) -> Vec<i8> {
    (0..half).map(|j| if j < k { -1 } else { 1 }).collect()
}

/// `Σ_j |ε_j − ε_{j+1}|`.
pub fn total_variation(eps: &[i8]) -> i32 {
    eps.windows(2).map(|w| (w[0] as i32 - w[1] as i32).abs()).sum()
}

impl ZonotopeMap {
    pub fn new(m: usize) -> Result<Self> {
        if m < 2 || m % 2 != 0 {
            return Err(Error::Unsupported(format!("zonotope map needs an even m >= 2, got {m}")));
        }
        let half = m / 2;
        let s = (PI / m as f64).sin();
        let mut a = DMatrix::zeros(2, half);
        for k in 1..=half {
            let angle = (2 * k - 1) as f64 * PI / m as f64;
            a[(0, k - 1)] = s * angle.sin();
            a[(1, k - 1)] = -s * angle.cos();
        }
        let patterns = (0..m).map(|e| Self::pattern_for(half, e)).collect();
        Ok(ZonotopeMap { m, a, patterns })
    }

    /// `+w_e` for `1 ≤ e ≤ m/2`; otherwise `−w_{(e + m/2) mod m}`. In
    /// particular exponent 0 is `−w_{m/2} = (1,…,1)`.
    fn pattern_for(half: usize, e: usize) -> Vec<i8> {
        let m = 2 * half;
        if (1..=half).contains(&e) {
            w_pattern(half, e)
        } else {
            w_pattern(half, (e + half) % m).into_iter().map(|v| -v).collect()
        }
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// The `2 × m/2` real matrix of `T`.
    pub fn matrix(&self) -> &DMatrix<f64> {
        &self.a
    }

    /// The sign pattern of each exponent, indexed by exponent.
    pub fn patterns(&self) -> &[Vec<i8>] {
        &self.patterns
    }

    pub fn apply(&self, eps: &[i8]) -> Complex64 {
        let (mut re, mut im) = (0.0, 0.0);
        for (k, &e) in eps.iter().enumerate() {
            re += self.a[(0, k)] * e as f64;
            im += self.a[(1, k)] * e as f64;
        }
        Complex64::new(re, im)
    }

    /// Exponent encoded by a block, if the block is one of the `m` patterns.
    pub fn exponent_of(&self, eps: &[i8]) -> Option<usize> {
        self.patterns.iter().position(|p| p.as_slice() == eps)
    }
}

/// `A·ε` as a complex number. Feasible patterns land on `B_m`; others land
/// inside the m-gon.
pub fn zonotope_vertex_map(zmap: &ZonotopeMap, eps: &[i8]) -> Result<Complex64> {
    if eps.len() != zmap.m / 2 {
        return Err(Error::arg(format!("expected {} signs, got {}", zmap.m / 2, eps.len())));
    }
    Ok(zmap.apply(eps))
}

/// `Q̃ = (I_n ⊗ A)ᵀ Q_R (I_n ⊗ A)` over `{±1}^{nm/2}` with every block
/// restricted to the `m` patterns `±w_k`.
pub fn zonotope_reformulation(inst: &ProblemInstance) -> Result<BinaryQuadraticProgram> {
    let (n, m) = (inst.n(), inst.m());
    let zmap = ZonotopeMap::new(m)?;
    let half = m / 2;
    let a = zmap.matrix();
    let q = inst.q();
    let mut mat = DMatrix::zeros(n * half, n * half);
    for i in 0..n {
        for j in 0..n {
            let (re, im) = (q[(i, j)].re, q[(i, j)].im);
            let block = nalgebra::Matrix2::new(re, -im, im, re);
            for p in 0..half {
                let ap = nalgebra::Vector2::new(a[(0, p)], a[(1, p)]);
                for r in 0..half {
                    let ar = nalgebra::Vector2::new(a[(0, r)], a[(1, r)]);
                    mat[(i * half + p, j * half + r)] = ap.dot(&(block * ar));
                }
            }
        }
    }
    let mut allowed = zmap.patterns().to_vec();
    allowed.sort();
    BinaryQuadraticProgram::new(
        symmetrized(mat),
        VarDomain::PlusMinusOne,
        Constraint::BlockPatterns { block: half, allowed },
        0.0,
        DecoderTag::Zonotope { m },
    )
}

pub fn encode_zonotope(z: &RootsAssignment) -> Result<Vec<i8>> {
    let zmap = ZonotopeMap::new(z.m())?;
    Ok(z.exponents().iter().flat_map(|&e| zmap.patterns()[e].clone()).collect())
}

/// Block `+w_k` decodes to exponent `k`, block `−w_k` to `k + m/2 (mod m)`.
pub fn decode_zonotope(x: &[i8], m: usize) -> Result<RootsAssignment> {
    let zmap = ZonotopeMap::new(m)?;
    let half = m / 2;
    if x.len() % half != 0 {
        return Err(Error::Decode { block: 0, reason: format!("length {} is not a multiple of m/2 = {half}", x.len()) });
    }
    let exps = x
        .chunks(half)
        .enumerate()
        .map(|(blk, chunk)| {
            zmap.exponent_of(chunk).ok_or_else(|| Error::Decode {
                block: blk,
                reason: format!("{chunk:?} has total variation {} > 2 or non-sign entries", total_variation(chunk)),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RootsAssignment::new(m, exps)
}

/// For `m = 4`: substitute `w = (1+i) z = x + i y` with `x, y ∈ {±1}^n`, giving
/// `½ vᵀ [[Re Q, −Im Q], [Im Q, Re Q]] v` over `v = (x, y) ∈ {±1}^{2n}`.
pub fn quarter_reformulation(inst: &ProblemInstance) -> Result<BinaryQuadraticProgram> {
    if inst.m() != 4 {
        return Err(Error::Unsupported(format!("quarter reformulation needs m = 4, got {}", inst.m())));
    }
    let n = inst.n();
    let q = inst.q();
    let mut mat = DMatrix::zeros(2 * n, 2 * n);
    for i in 0..n {
        for j in 0..n {
            let (re, im) = (q[(i, j)].re, q[(i, j)].im);
            mat[(i, j)] = 0.5 * re;
            mat[(i, n + j)] = -0.5 * im;
            mat[(n + i, j)] = 0.5 * im;
            mat[(n + i, n + j)] = 0.5 * re;
        }
    }
    BinaryQuadraticProgram::new(symmetrized(mat), VarDomain::PlusMinusOne, Constraint::None, 0.0, DecoderTag::Quarter)
}

// (1+i)·ω^e for e = 0..3, as (x, y) signs.
const QUARTER_SIGNS: [(i8, i8); 4] = [(1, 1), (-1, 1), (-1, -1), (1, -1)];

pub fn encode_quarter(z: &RootsAssignment) -> Result<Vec<i8>> {
    if z.m() != 4 {
        return Err(Error::Unsupported(format!("quarter encoding needs m = 4, got {}", z.m())));
    }
    let n = z.len();
    let mut v = vec![0i8; 2 * n];
    for (i, &e) in z.exponents().iter().enumerate() {
        v[i] = QUARTER_SIGNS[e].0;
        v[n + i] = QUARTER_SIGNS[e].1;
    }
    Ok(v)
}

pub fn decode_quarter(v: &[i8]) -> Result<RootsAssignment> {
    if v.len() % 2 != 0 {
        return Err(Error::Decode { block: 0, reason: format!("odd length {}", v.len()) });
    }
    let n = v.len() / 2;
    let exps = (0..n)
        .map(|i| {
            QUARTER_SIGNS.iter().position(|&s| s == (v[i], v[n + i])).ok_or_else(|| Error::Decode {
                block: i,
                reason: format!("({}, {}) is not a sign pair", v[i], v[n + i]),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    RootsAssignment::new(4, exps)
}

/// Decodes with whichever map produced `bqp`.
pub fn decode(bqp: &BinaryQuadraticProgram, x: &[i8]) -> Result<RootsAssignment> {
    match bqp.decoder {
        DecoderTag::Basic { m } => decode_basic(x, m),
        DecoderTag::Zonotope { m } => decode_zonotope(x, m),
        DecoderTag::Quarter => decode_quarter(x),
        DecoderTag::Raw => Err(Error::Decode { block: 0, reason: "program has no decoder".into() }),
    }
}

/// Inverse of [`decode`].
pub fn encode(bqp: &BinaryQuadraticProgram, z: &RootsAssignment) -> Result<Vec<i8>> {
    match bqp.decoder {
        DecoderTag::Basic { .. } => Ok(encode_basic(z)),
        DecoderTag::Zonotope { .. } => encode_zonotope(z),
        DecoderTag::Quarter => encode_quarter(z),
        DecoderTag::Raw => Err(Error::arg("program has no encoder")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instances::evaluate_objective;
    use crate::linalg::CMatrix;
    use crate::rng::{complex_normal, substream, Stream};

    fn random_hermitian(n: usize, m: usize, seed: u64) -> ProblemInstance {
        let mut rng = substream(seed, Stream::Channel);
        let mut q = CMatrix::zeros(n, n);
        for i in 0..n {
            q[(i, i)] = Complex64::new(complex_normal(&mut rng).re, 0.0);
            for j in (i + 1)..n {
                let c = complex_normal(&mut rng);
                q[(i, j)] = c;
                q[(j, i)] = c.conj();
            }
        }
        ProblemInstance::new(q, m, "random").unwrap()
    }

    fn all_assignments(n: usize, m: usize) -> Vec<RootsAssignment> {
        let total = m.pow(n as u32);
        (0..total)
            .map(|mut code| {
                let e = (0..n).map(|_| { let d = code % m; code /= m; d }).collect();
                RootsAssignment::new(m, e).unwrap()
            })
            .collect()
    }

    #[test]
    fn basic_single_variable() {
        let inst = ProblemInstance::from_real(1, 2, &[3.5], "c").unwrap();
        let bqp = basic_reformulation(&inst);
        assert_eq!(bqp.dim, 2);
        assert_eq!(bqp.value(&[1, 0]), 3.5);
        assert_eq!(bqp.value(&[0, 1]), 3.5);
    }

    #[test]
    fn basic_swap_antialigned() {
        let inst = ProblemInstance::from_real(2, 2, &[0., 1., 1., 0.], "swap").unwrap();
        let bqp = basic_reformulation(&inst);
        let x = encode_basic(&RootsAssignment::new(2, vec![0, 1]).unwrap());
        assert_eq!(x, vec![1, 0, 0, 1]);
        assert_eq!(bqp.value(&x), -2.0);
    }

    #[test]
    fn basic_matches_objective_exhaustively() {
        let inst = random_hermitian(3, 5, 1);
        let bqp = basic_reformulation(&inst);
        for z in all_assignments(3, 5) {
            let x = encode_basic(&z);
            bqp.check_feasible(&x).unwrap();
            let f = evaluate_objective(&inst, &z).unwrap();
            assert!((bqp.value(&x) - f).abs() < 1e-9);
            assert_eq!(decode_basic(&x, 5).unwrap(), z);
        }
    }

    #[test]
    fn decode_basic_cases() {
        assert_eq!(decode_basic(&[1, 0, 0], 3).unwrap().exponents(), &[0]);
        assert_eq!(decode_basic(&[0, 0, 1], 3).unwrap().exponents(), &[2]);
        assert!(matches!(decode_basic(&[1, 1, 0], 3), Err(Error::Decode { block: 0, .. })));
        assert!(matches!(decode_basic(&[0, 1, 0, 0, 0, 0], 3), Err(Error::Decode { block: 1, .. })));
    }

    #[test]
    fn zonotope_matrix_for_m4() {
        let z = ZonotopeMap::new(4).unwrap();
        let expect = [[0.5, 0.5], [-0.5, 0.5]];
        for r in 0..2 {
            for c in 0..2 {
                assert!((z.matrix()[(r, c)] - expect[r][c]).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn zonotope_patterns_hit_every_vertex_once() {
        for m in (2..=16).step_by(2) {
            let z = ZonotopeMap::new(m).unwrap();
            assert_eq!(z.patterns().len(), m);
            for (e, p) in z.patterns().iter().enumerate() {
                assert!((z.apply(p) - roots::root(m, e)).norm() < 1e-12, "m={m} e={e}");
                assert!(total_variation(p) <= 2);
            }
        }
        assert!(matches!(ZonotopeMap::new(5), Err(Error::Unsupported(_))));
    }

    #[test]
    fn total_variation_characterizes_patterns() {
        for m in (2..=16).step_by(2) {
            let half = m / 2;
            let z = ZonotopeMap::new(m).unwrap();
            for code in 0u32..(1 << half) {
                let eps: Vec<i8> = (0..half).map(|j| if code >> j & 1 == 1 { -1 } else { 1 }).collect();
                assert_eq!(total_variation(&eps) <= 2, z.exponent_of(&eps).is_some(), "{eps:?}");
            }
        }
    }

    #[test]
    fn zonotope_vertex_examples() {
        let z6 = ZonotopeMap::new(6).unwrap();
        assert!((zonotope_vertex_map(&z6, &[1, 1, 1]).unwrap() - Complex64::new(1.0, 0.0)).norm() < 1e-12);
        let e = Complex64::from_polar(1.0, PI / 3.0);
        assert!((zonotope_vertex_map(&z6, &[-1, 1, 1]).unwrap() - e).norm() < 1e-12);
        let z8 = ZonotopeMap::new(8).unwrap();
        assert!(zonotope_vertex_map(&z8, &[1, -1, 1, -1]).unwrap().norm() < 1.0 - 1e-3);
        assert!(zonotope_vertex_map(&z8, &[1, 1]).is_err());
    }

    #[test]
    fn decode_zonotope_cases() {
        assert_eq!(decode_zonotope(&[1, 1], 4).unwrap().exponents(), &[0]);
        assert_eq!(decode_zonotope(&[-1, 1], 4).unwrap().exponents(), &[1]);
        assert_eq!(decode_zonotope(&[-1, -1], 4).unwrap().exponents(), &[2]);
        assert_eq!(decode_zonotope(&[1, -1], 4).unwrap().exponents(), &[3]);
        assert!(matches!(decode_zonotope(&[1, -1, 1, -1], 8), Err(Error::Decode { .. })));
        // -w_{m/2} = (1,...,1) is exponent 0 and +w_{m/2} is exponent m/2.
        assert_eq!(decode_zonotope(&[-1, -1, -1], 6).unwrap().exponents(), &[3]);
    }

    #[test]
    fn zonotope_rejects_odd_m() {
        let inst = random_hermitian(2, 5, 3);
        assert!(matches!(zonotope_reformulation(&inst), Err(Error::Unsupported(_))));
    }

    #[test]
    fn zonotope_pattern_count() {
        let inst = random_hermitian(2, 6, 3);
        let bqp = zonotope_reformulation(&inst).unwrap();
        assert_eq!(bqp.dim, 6);
        match &bqp.constraint {
            Constraint::BlockPatterns { block, allowed } => {
                assert_eq!(*block, 3);
                assert_eq!(allowed.len(), 6);
            }
            other => panic!("unexpected constraint {other:?}"),
        }
    }

    #[test]
    fn reformulations_match_objective_exhaustively() {
        for m in [2, 4, 6, 8] {
            for n in 1..=3 {
                let inst = random_hermitian(n, m, (10 * m + n) as u64);
                let basic = basic_reformulation(&inst);
                let zono = zonotope_reformulation(&inst).unwrap();
                let quarter = (m == 4).then(|| quarter_reformulation(&inst).unwrap());
                for z in all_assignments(n, m) {
                    let f = evaluate_objective(&inst, &z).unwrap();
                    let mut programs = vec![&basic, &zono];
                    programs.extend(quarter.as_ref());
                    for bqp in programs {
                        let x = encode(bqp, &z).unwrap();
                        bqp.check_feasible(&x).unwrap();
                        assert!((bqp.value(&x) - f).abs() < 1e-9, "{:?} m={m} n={n}", bqp.decoder);
                        assert_eq!(decode(bqp, &x).unwrap(), z);
                    }
                }
            }
        }
    }

    #[test]
    fn quarter_small_cases() {
        let inst = ProblemInstance::from_real(1, 4, &[2.5], "c").unwrap();
        let bqp = quarter_reformulation(&inst).unwrap();
        for v in [[1, 1], [1, -1], [-1, 1], [-1, -1]] {
            assert!((bqp.value(&v) - 2.5).abs() < 1e-15);
        }
        let swap = ProblemInstance::from_real(2, 4, &[0., 1., 1., 0.], "swap").unwrap();
        let bqp = quarter_reformulation(&swap).unwrap();
        let mut best = f64::NEG_INFINITY;
        for code in 0..16u32 {
            let v: Vec<i8> = (0..4).map(|j| if code >> j & 1 == 1 { -1 } else { 1 }).collect();
            best = best.max(bqp.value(&v));
        }
        assert_eq!(best, 2.0);
        assert!(quarter_reformulation(&swap.with_m(8).unwrap()).is_err());
    }

    #[test]
    fn program_validation() {
        let m = DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(BinaryQuadraticProgram::new(m, VarDomain::PlusMinusOne, Constraint::None, 0.0, DecoderTag::Raw).is_err());
        let m = DMatrix::identity(3, 3);
        assert!(BinaryQuadraticProgram::new(m.clone(), VarDomain::ZeroOne, Constraint::OneHot { block: 2 }, 0.0, DecoderTag::Raw).is_err());
        let bad = Constraint::BlockPatterns { block: 3, allowed: vec![vec![1, 0, 1]] };
        assert!(BinaryQuadraticProgram::new(m, VarDomain::PlusMinusOne, bad, 0.0, DecoderTag::Raw).is_err());
    }

    #[test]
    fn feasibility_errors_name_the_block() {
        let inst = random_hermitian(2, 3, 0);
        let bqp = basic_reformulation(&inst);
        match bqp.check_feasible(&[1, 0, 0, 1, 1, 0]) {
            Err(Error::Feasibility { block, .. }) => assert_eq!(block, 1),
            other => panic!("{other:?}"),
        }
    }
}
