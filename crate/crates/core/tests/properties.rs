use proptest::prelude::*;
use rootsqp::exact::{brute_force, enumerate_program};
use rootsqp::instances::{evaluate_objective, gen_mimo_instance, gen_potts_instance};
use rootsqp::reformulate::{basic_reformulation, decode, encode, quarter_reformulation, zonotope_reformulation};
use rootsqp::soscert::{level_monomials, signature, Exponent};
use rootsqp::{ProblemInstance, RootsAssignment};

fn instance(n: usize, m: usize, seed: u64, complex: bool) -> ProblemInstance {
    if complex {
        gen_mimo_instance(3, n - 1, m, 5.0, seed).unwrap().0
    } else {
        gen_potts_instance(n, m, -10.0, 10.0, seed).unwrap()
    }
}

fn assignment(m: usize, n: usize) -> impl Strategy<Value = RootsAssignment> {
    prop::collection::vec(0..m, n).prop_map(move |e| RootsAssignment::new(m, e).unwrap())
}

proptest! {
    #[test]
    fn global_phase_invariance(seed in 0u64..1000, complex: bool, shift in 0usize..8,
                               z in (2usize..5).prop_flat_map(|n| assignment(8, n))) {
        let inst = instance(z.len(), 8, seed, complex);
        let a = evaluate_objective(&inst, &z).unwrap();
        let b = evaluate_objective(&inst, &z.rotated(shift)).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * (1.0 + a.abs()));
    }

    #[test]
    fn encodings_preserve_value(seed in 0u64..1000, complex: bool, z in assignment(4, 3)) {
        let inst = instance(3, 4, seed, complex);
        let v = evaluate_objective(&inst, &z).unwrap();
        for p in [basic_reformulation(&inst), zonotope_reformulation(&inst).unwrap(), quarter_reformulation(&inst).unwrap()] {
            let x = encode(&p, &z).unwrap();
            p.check_feasible(&x).unwrap();
            prop_assert_eq!(&decode(&p, &x).unwrap(), &z);
            prop_assert!((p.value(&x) - v).abs() <= 1e-9 * (1.0 + v.abs()));
        }
    }

    #[test]
    fn program_maximum_is_the_roots_maximum(seed in 0u64..1000, complex: bool, m in prop::sample::select(vec![2usize, 4, 6])) {
        let inst = instance(2, m, seed, complex);
        let truth = brute_force(&inst, 1 << 20).unwrap().value;
        let p = zonotope_reformulation(&inst).unwrap();
        let best = enumerate_program(&p, 1 << 20).unwrap().value;
        prop_assert!((best - truth).abs() <= 1e-9 * (1.0 + truth.abs()));
    }

    #[test]
    fn level_membership_is_signature_bound(n in 1usize..5, m in 2usize..5, k in 0usize..4, code in 0usize..625) {
        let size = m.pow(n as u32);
        let alpha = Exponent::from_code(code % size, n, m);
        let inside = level_monomials(n, m, k).unwrap().contains(&alpha);
        prop_assert_eq!(inside, signature(&alpha, m).max_count() <= k);
    }
}
