//! Exact and relaxed maximization of complex quadratic forms `z* Q z` over
//! vectors of m'th roots of unity.
//!
//! The crate is organized around a [`ProblemInstance`](instances::ProblemInstance):
//!
//! - [`instances`]: the objective, assignments, and the random Potts, grid and
//!   MIMO generators.
//! - [`reformulate`]: exact translations into real binary quadratic programs
//!   (one-hot, zonotope for even `m`, and the unconstrained `m = 4` form).
//! - [`exact`]: brute-force enumeration and a block branch-and-bound solver.
//! - [`relax`]: the complex SDP relaxation with a certified dual bound, and the
//!   hyperplane, m-gon and quadrant roundings.
//! - [`soscert`]: signatures, level-k monomials, the Cayley graph, the chordal
//!   cover checks, and the level-k moment relaxation.
//!
//! ```
//! use rootsqp::instances::{ProblemInstance, RootsAssignment, evaluate_objective};
//! use rootsqp::exact::brute_force;
//! use num_complex::Complex64;
//! use nalgebra::DMatrix;
//!
//! let one = Complex64::new(1.0, 0.0);
//! let q = DMatrix::from_row_slice(2, 2, &[Complex64::default(), one, one, Complex64::default()]);
//! let inst = ProblemInstance::new(q, 4, "pair").unwrap();
//! let z = RootsAssignment::new(4, vec![0, 2]).unwrap();
//! assert_eq!(evaluate_objective(&inst, &z).unwrap(), -2.0);
//! assert_eq!(brute_force(&inst, 1 << 20).unwrap().value, 2.0);
//! ```

pub mod error;
pub mod exact;
pub mod instances;
pub mod linalg;
pub mod reformulate;
pub mod relax;
pub mod rng;
pub mod roots;
pub mod soscert;

pub use error::{Error, Result};
pub use instances::{ProblemInstance, RootsAssignment};
pub use num_complex::Complex64;
