//! Property tests for the structural invariants of the library.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use proptest::prelude::*;

use qm_core::blocks::{block_to_fqm, decompose, recompose_check, BlockDescriptor};
use qm_core::classify::equivalent;
use qm_core::discriminant::discriminant_module;
use qm_core::exact::FracMod1;
use qm_core::fqm::FiniteQuadraticModule;
use qm_core::guards::Guards;
use qm_core::intmat::{self, IMat};
use qm_core::lattice::{hyperbolic_plane, GramMatrix};
use qm_core::modular::{central_charge, state_space_dim};

fn frac_strategy() -> impl Strategy<Value = FracMod1> {
    (0u64..1000, 1u64..1000)
        .prop_map(|(n, d)| FracMod1::new(BigInt::from(n), BigInt::from(d)).unwrap())
}

/// Small blocks whose direct sums stay within the default guards.
fn block_strategy() -> impl Strategy<Value = BlockDescriptor> {
    prop_oneof![
        (prop_oneof![Just(3u64), Just(5), Just(7)], 1u32..=1).prop_flat_map(|(p, r)| {
            (1..p.pow(r)).prop_map(move |a| BlockDescriptor::AOdd { p, r, a })
        }),
        (1u32..=3).prop_flat_map(|r| {
            (0..1u64 << r).prop_map(move |k| BlockDescriptor::ATwo { r, a: 2 * k + 1 })
        }),
        (1u32..=2).prop_map(|r| BlockDescriptor::B { r }),
        (1u32..=2).prop_map(|r| BlockDescriptor::C { r }),
    ]
}

fn module_strategy() -> impl Strategy<Value = FiniteQuadraticModule> {
    proptest::collection::vec(block_strategy(), 1..=2).prop_map(|blocks| {
        let mut m = FiniteQuadraticModule::trivial();
        for d in &blocks {
            m = m.direct_sum(&block_to_fqm(d).unwrap());
        }
        m
    })
}

/// Symmetric matrix with even diagonal; not necessarily invertible.
fn symmetric_even_rows() -> impl Strategy<Value = Vec<Vec<BigInt>>> {
    (1usize..=3).prop_flat_map(|n| {
        proptest::collection::vec(-6i64..=6, n * n).prop_map(move |vals| {
            let mut rows = vec![vec![BigInt::from(0); n]; n];
            for i in 0..n {
                for j in i..n {
                    let v = vals[i * n + j];
                    let v = if i == j { 2 * v } else { v };
                    rows[i][j] = BigInt::from(v);
                    rows[j][i] = BigInt::from(v);
                }
            }
            rows
        })
    })
}

fn gram_strategy() -> impl Strategy<Value = GramMatrix> {
    symmetric_even_rows().prop_filter_map("must be nondegenerate", |rows| {
        GramMatrix::new(rows).ok()
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn frac_add_sub_round_trip(a in frac_strategy(), b in frac_strategy()) {
        prop_assert_eq!(&(&(&a + &b) - &b), &a);
        prop_assert_eq!(&(-&(-&a)), &a);
        prop_assert_eq!(&a.double(), &(&a + &a));
    }

    #[test]
    fn snf_transforms_are_exact(rows in symmetric_even_rows()) {
        let a = IMat::from_rows(rows);
        let snf = intmat::smith_normal_form(&a);
        prop_assert_eq!(snf.u.mul(&a).mul(&snf.v), snf.d.clone());
        // diagonal divisibility chain
        let n = a.rows.min(a.cols);
        for i in 0..n.saturating_sub(1) {
            let d0 = &snf.d[(i, i)];
            let d1 = &snf.d[(i + 1, i + 1)];
            if !d0.is_zero() && !d1.is_zero() {
                prop_assert!((d1 % d0).is_zero());
            }
        }
    }

    #[test]
    fn discriminant_order_is_determinant(k in gram_strategy()) {
        let m = discriminant_module(&k).unwrap().module;
        prop_assert_eq!(BigInt::from(m.order()), k.determinant().abs());
    }

    #[test]
    fn discriminant_respects_direct_sum(k1 in gram_strategy(), k2 in gram_strategy()) {
        let guards = Guards::with_module_order(4096 * 4096);
        let lhs = discriminant_module(&k1.direct_sum(&k2)).unwrap().module;
        let rhs = discriminant_module(&k1)
            .unwrap()
            .module
            .direct_sum(&discriminant_module(&k2).unwrap().module);
        prop_assert!(lhs.is_isomorphic(&rhs, &guards).unwrap().is_some());
    }

    #[test]
    fn unimodular_stabilization_is_invisible(k in gram_strategy()) {
        let guards = Guards::with_module_order(1 << 40);
        let verdict = equivalent(&k, &k.direct_sum(&hyperbolic_plane()), &guards).unwrap();
        prop_assert!(verdict.is_equivalent());
    }

    #[test]
    fn polarization_identity(m in module_strategy()) {
        // b(x, y) = Q(x+y) - Q(x) - Q(y) on sampled elements
        let mut els = m.elements();
        let xs: Vec<_> = els.by_ref().take(12).collect();
        for x in &xs {
            for y in &xs {
                let lhs = m.eval_b(x, y);
                let rhs = &(&m.eval_q(&m.add(x, y)) - &m.eval_q(x)) - &m.eval_q(y);
                prop_assert_eq!(lhs, rhs);
            }
        }
    }

    #[test]
    fn decompose_recomposes(m in module_strategy()) {
        let guards = Guards::default();
        let blocks = decompose(&m, &guards).unwrap();
        prop_assert!(recompose_check(&m, &blocks, &guards).unwrap());
    }

    #[test]
    fn witness_transports_the_form(m in module_strategy()) {
        let guards = Guards::default();
        // a module is isomorphic to itself with generators permuted by any
        // found witness; verify form transport on the images
        let witness = m.is_isomorphic(&m, &guards).unwrap().unwrap();
        for (i, img) in witness.iter().enumerate() {
            prop_assert_eq!(m.eval_q(&m.generator(i)), m.eval_q(img));
            for (j, img2) in witness.iter().enumerate().skip(i + 1) {
                prop_assert_eq!(
                    m.eval_b(&m.generator(i), &m.generator(j)),
                    m.eval_b(img, img2)
                );
            }
        }
    }

    #[test]
    fn central_charge_is_additive(a in block_strategy(), b in block_strategy()) {
        let guards = Guards::default();
        let ma = block_to_fqm(&a).unwrap();
        let mb = block_to_fqm(&b).unwrap();
        let ca = central_charge(&ma, &guards).unwrap();
        let cb = central_charge(&mb, &guards).unwrap();
        let csum = central_charge(&ma.direct_sum(&mb), &guards).unwrap();
        prop_assert_eq!(u32::from(csum), (u32::from(ca) + u32::from(cb)) % 8);
    }

    #[test]
    fn dimension_recurrence(m in module_strategy(), g in 0u32..4) {
        prop_assert_eq!(
            state_space_dim(&m, g + 1),
            state_space_dim(&m, g) * m.order()
        );
    }
}
