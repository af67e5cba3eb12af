//! Randomized property tests for the exact integer linear algebra layer and
//! the root-datum word machinery.

use num_bigint::BigInt as Int;
use num_traits::{One, Signed, Zero};
use proptest::prelude::*;

use hecke_compare::catalog;
use hecke_compare::intlin::{
    cokernel, fixed_sublattice, in_span, int, kernel_basis, saturate_span, smith_normal_form,
    solve_integer, IntMat,
};

fn mat_strategy(max_dim: usize, max_abs: i64) -> impl Strategy<Value = IntMat> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(move |(r, c)| {
        proptest::collection::vec(-max_abs..=max_abs, r * c)
            .prop_map(move |e| IntMat::from_i64(r, c, &e))
    })
}

/// A unimodular matrix assembled from elementary row operations.
fn unimodular_from_ops(n: usize, ops: &[(usize, usize, i64)]) -> IntMat {
    let mut u = IntMat::identity(n);
    for &(i, j, c) in ops {
        let (i, j) = (i % n, j % n);
        if i == j {
            continue;
        }
        // row_i += c * row_j
        let mut e = IntMat::identity(n);
        *e.at_mut(i, j) = int(c);
        u = e.mul(&u);
    }
    u
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    // U * M * V equals the diagonal form exactly and both transforms are
    // unimodular.
    #[test]
    fn snf_reconstructs(m in mat_strategy(5, 6)) {
        let snf = smith_normal_form(&m);
        prop_assert_eq!(snf.u.mul(&m).mul(&snf.v), snf.s.clone());
        let du = snf.u.det();
        let dv = snf.v.det();
        prop_assert!(du.abs().is_one(), "det U = {du}");
        prop_assert!(dv.abs().is_one(), "det V = {dv}");
        // divisibility chain along the diagonal
        let diag = snf.diagonal();
        for w in diag.windows(2) {
            if !w[0].is_zero() {
                prop_assert!((&w[1] % &w[0]).is_zero(), "chain broken: {diag:?}");
            } else {
                prop_assert!(w[1].is_zero());
            }
        }
    }

    // Invariant factors are unchanged by unimodular change of basis on
    // either side.
    #[test]
    fn cokernel_invariant_under_unimodular(
        m in mat_strategy(4, 5),
        ops_u in proptest::collection::vec((0..4_usize, 0..4_usize, -2_i64..=2), 0..8),
        ops_v in proptest::collection::vec((0..4_usize, 0..4_usize, -2_i64..=2), 0..8),
    ) {
        let g = cokernel(&m).group;
        let u = unimodular_from_ops(m.rows, &ops_u);
        let v = unimodular_from_ops(m.cols, &ops_v);
        let g2 = cokernel(&u.mul(&m).mul(&v)).group;
        prop_assert_eq!(g.free_rank, g2.free_rank);
        prop_assert_eq!(g.torsion.clone(), g2.torsion.clone());
        // the torsion list never contains 1 and forms a chain
        for t in &g.torsion {
            prop_assert!(*t >= int(2));
        }
        for w in g.torsion.windows(2) {
            prop_assert!((&w[1] % &w[0]).is_zero());
        }
    }

    // Kernel vectors are genuine solutions of M x = 0 and the kernel basis
    // is saturated: no new vectors appear after saturation.
    #[test]
    fn kernel_is_saturated(m in mat_strategy(4, 5)) {
        let k = kernel_basis(&m);
        for j in 0..k.cols {
            let v = k.col(j);
            prop_assert!(m.mul_vec(&v).iter().all(|c| c.is_zero()));
        }
        let sat = saturate_span(&k);
        prop_assert_eq!(sat.cols, k.cols);
        for j in 0..sat.cols {
            prop_assert!(in_span(&k, &sat.col(j)), "saturation grew the kernel");
        }
    }

    // Any returned solution of M x = w is exact; if the right-hand side is
    // constructed inside the column span a solution must exist.
    #[test]
    fn integer_solve_is_exact(m in mat_strategy(4, 5), coeffs in proptest::collection::vec(-3_i64..=3, 5)) {
        let x0: Vec<Int> = coeffs.iter().take(m.cols).map(|&c| int(c)).collect();
        let w = m.mul_vec(&x0);
        let x = solve_integer(&m, &w).expect("constructed rhs must be solvable");
        prop_assert_eq!(m.mul_vec(&x), w);
    }

    // Vectors in the fixed sublattice are fixed by the automorphism, and the
    // sublattice is saturated.
    #[test]
    fn fixed_sublattice_is_fixed_and_saturated(ops in proptest::collection::vec((0..3_usize, 0..3_usize, -1_i64..=1), 0..6)) {
        // build a finite-order automorphism as a signed permutation
        let mut a = IntMat::from_i64(3, 3, &[0, 1, 0, 1, 0, 0, 0, 0, -1]);
        for (i, j, c) in ops {
            if i != j && c != 0 {
                // conjugate by an elementary matrix to vary the basis
                let mut e = IntMat::identity(3);
                *e.at_mut(i, j) = int(c);
                let einv = e.inverse().unwrap();
                a = e.mul(&a).mul(&einv);
            }
        }
        let f = fixed_sublattice(&a, 24).unwrap();
        for j in 0..f.cols {
            let v = f.col(j);
            prop_assert_eq!(a.mul_vec(&v), v);
        }
        let sat = saturate_span(&f);
        prop_assert_eq!(sat.cols, f.cols);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    // For every Weyl group element of a catalog datum, the matrix rebuilt
    // from the reduced word equals the stored matrix and the word length
    // equals the number of positive roots sent negative.
    #[test]
    fn reduced_words_recover_matrices(name_idx in 0..catalog::builtin_names().len(), pick in any::<u64>()) {
        let name = catalog::builtin_names()[name_idx];
        let spec = catalog::builtin(name).unwrap();
        let datum = &spec.datum;
        let elems = datum.weyl_group_elements(200_000).unwrap();
        let e = &elems[(pick as usize) % elems.len()];
        let mut prod = IntMat::identity(datum.rank);
        for &s in &e.word {
            prod = prod.mul(&datum.simple_reflection(s));
        }
        prop_assert_eq!(prod.clone(), e.matrix.clone());
        let neg = datum
            .positive_roots()
            .into_iter()
            .filter(|&p| !datum.is_positive_root(&e.matrix.mul_vec(&datum.roots[p])))
            .count();
        prop_assert_eq!(e.word.len(), neg);
    }
}
