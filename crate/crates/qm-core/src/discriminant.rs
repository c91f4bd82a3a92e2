//! The discriminant construction: from an even lattice presentation K to the
//! finite quadratic module on Λ*/KΛ, with Q([u]) = uᵀK⁻¹u / 2 mod 1 computed
//! exactly through the adjugate.

use num_bigint::{BigInt, BigUint};
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::fqm::FiniteQuadraticModule;
use crate::guards::Guards;
use crate::lattice::GramMatrix;

/// The discriminant module of a lattice together with lifts of its abstract
/// generators to dual-basis coordinate vectors in Λ*.
pub struct DiscriminantResult {
    pub module: FiniteQuadraticModule,
    pub generator_lifts: Vec<Vec<BigInt>>,
}

/// Compute (G_K, q_K) for a valid Gram matrix. Elements of Λ* are written in
/// the dual basis, so the quotient Λ*/KΛ is the integer cokernel of K; the
/// invariant factors and generator lifts come from the Smith form, and the
/// form values from the adjugate: Q(u) = uᵀ·adj(K)·u / (2·det K) mod 1.
pub fn discriminant_module(k: &GramMatrix) -> Result<DiscriminantResult> {
    let n = k.rank();
    if n == 0 {
        return Ok(DiscriminantResult {
            module: FiniteQuadraticModule::trivial(),
            generator_lifts: Vec::new(),
        });
    }
    let snf = k.smith_normal_form();
    let u_inv = snf.u.inverse_unimodular();
    let det = k.determinant();
    let two_det = &det * 2;
    let adj = k.matrix().adjugate();

    let mut orders: Vec<BigUint> = Vec::new();
    let mut lifts: Vec<Vec<BigInt>> = Vec::new();
    for j in 0..n {
        let d = snf.d[(j, j)].clone();
        if d.is_one() {
            continue;
        }
        debug_assert!(d > BigInt::zero());
        orders.push(d.to_biguint().expect("Smith diagonal is positive"));
        lifts.push((0..n).map(|i| u_inv[(i, j)].clone()).collect());
    }

    let quad = |u: &[BigInt], v: &[BigInt]| -> BigInt {
        // uᵀ · adj(K) · v
        let mut acc = BigInt::zero();
        for (i, ui) in u.iter().enumerate() {
            if ui.is_zero() {
                continue;
            }
            for (j, vj) in v.iter().enumerate() {
                if vj.is_zero() {
                    continue;
                }
                acc += ui * vj * &adj[(i, j)];
            }
        }
        acc
    };

    let kk = orders.len();
    let q_gen: Vec<FracMod1> = lifts
        .iter()
        .map(|u| FracMod1::from_ratio(&quad(u, u), &two_det))
        .collect();
    let mut b_upper = Vec::new();
    for i in 0..kk.saturating_sub(1) {
        let row: Vec<FracMod1> = (i + 1..kk)
            .map(|j| FracMod1::from_ratio(&quad(&lifts[i], &lifts[j]), &det))
            .collect();
        b_upper.push(row);
    }
    let module = FiniteQuadraticModule::new(orders, q_gen, b_upper).map_err(|e| {
        Error::Internal(format!("discriminant module failed validation: {e}"))
    })?;

    // standing hypothesis: the discriminant form is nondegenerate; assert
    // whenever the order is within the default guard
    let guards = Guards::default();
    if guards.check_module_order(&module.order()).is_ok() {
        debug_assert!(module.is_nondegenerate(&guards).unwrap_or(true));
    }

    Ok(DiscriminantResult {
        module,
        generator_lifts: lifts,
    })
}

/// |G_K|, asserted equal to |det K|.
pub fn order_check(k: &GramMatrix) -> BigUint {
    let result = discriminant_module(k).expect("valid Gram matrix");
    let order = result.module.order();
    assert_eq!(
        BigInt::from(order.clone()),
        k.determinant().abs(),
        "|G_K| must equal |det K|"
    );
    order
}
