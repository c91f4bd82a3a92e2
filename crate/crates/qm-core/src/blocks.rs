//! The four indecomposable block types of a finite quadratic module and the
//! orthogonal decomposition of an arbitrary nondegenerate module into blocks.
//!
//! Splitting is done per prime. For odd p, an element x of maximal order p^r
//! whose Q-value has denominator exactly p^r is split off as an A-block and
//! the rest is projected onto its b-orthogonal complement. For p = 2, the
//! same works when some maximal-order element has Q-denominator 2^{r+1}
//! (an A-block); otherwise a hyperbolic pair is split off and identified as a
//! B- or C-block by brute-force isomorphism. The returned list is *a*
//! decomposition, not a canonical one; uniqueness questions are delegated to
//! the isomorphism test.

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::dense::DenseForm;
use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::fqm::{FiniteQuadraticModule, GroupElement};
use crate::guards::Guards;

/// One indecomposable block. `a` is stored mod p^r for `AOdd` and mod
/// 2^{r+1} for `ATwo`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum BlockDescriptor {
    /// (Z/p^r, x ↦ ax²/p^r), p odd prime, gcd(a, p) = 1.
    AOdd { p: u64, r: u32, a: u64 },
    /// (Z/2^r, x ↦ ax²/2^{r+1}), a odd.
    ATwo { r: u32, a: u64 },
    /// ((Z/2^r)², (x,y) ↦ (x² + xy + y²)/2^r).
    B { r: u32 },
    /// ((Z/2^r)², (x,y) ↦ xy/2^r).
    C { r: u32 },
}

fn is_small_prime(p: u64) -> bool {
    if p < 2 {
        return false;
    }
    let mut d = 2u64;
    while d * d <= p {
        if p % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

impl BlockDescriptor {
    /// Group order of the block.
    pub fn order(&self) -> BigUint {
        match self {
            BlockDescriptor::AOdd { p, r, .. } => BigUint::from(*p).pow(*r),
            BlockDescriptor::ATwo { r, .. } => BigUint::from(2u32).pow(*r),
            BlockDescriptor::B { r } | BlockDescriptor::C { r } => {
                BigUint::from(2u32).pow(2 * r)
            }
        }
    }

    pub fn validate(&self) -> Result<()> {
        match *self {
            BlockDescriptor::AOdd { p, r, a } => {
                if p < 3 || !is_small_prime(p) {
                    return Err(Error::InvalidBlockParameters(format!(
                        "AOdd requires an odd prime p, got {p}"
                    )));
                }
                if r == 0 {
                    return Err(Error::InvalidBlockParameters("AOdd requires r >= 1".into()));
                }
                if a % p == 0 {
                    return Err(Error::InvalidBlockParameters(format!(
                        "AOdd requires gcd(a, p) = 1, got a = {a}, p = {p}"
                    )));
                }
            }
            BlockDescriptor::ATwo { r, a } => {
                if r == 0 {
                    return Err(Error::InvalidBlockParameters("ATwo requires r >= 1".into()));
                }
                if a % 2 == 0 {
                    return Err(Error::InvalidBlockParameters(format!(
                        "ATwo requires odd a, got {a}"
                    )));
                }
            }
            BlockDescriptor::B { r } | BlockDescriptor::C { r } => {
                if r == 0 {
                    return Err(Error::InvalidBlockParameters("B/C require r >= 1".into()));
                }
            }
        }
        Ok(())
    }
}

/// Materialize a block as a finite quadratic module.
pub fn block_to_fqm(d: &BlockDescriptor) -> Result<FiniteQuadraticModule> {
    d.validate()?;
    let f = |n: u64, den: u64| FracMod1::new(BigInt::from(n), BigInt::from(den)).unwrap();
    match *d {
        BlockDescriptor::AOdd { p, r, a } => {
            let pr = p.pow(r);
            FiniteQuadraticModule::new(vec![BigUint::from(pr)], vec![f(a % pr, pr)], vec![])
        }
        BlockDescriptor::ATwo { r, a } => {
            let m = 1u64 << r;
            FiniteQuadraticModule::new(vec![BigUint::from(m)], vec![f(a % (2 * m), 2 * m)], vec![])
        }
        BlockDescriptor::B { r } => {
            let m = 1u64 << r;
            FiniteQuadraticModule::new(
                vec![BigUint::from(m), BigUint::from(m)],
                vec![f(1, m), f(1, m)],
                vec![vec![f(1, m)]],
            )
        }
        BlockDescriptor::C { r } => {
            let m = 1u64 << r;
            FiniteQuadraticModule::new(
                vec![BigUint::from(m), BigUint::from(m)],
                vec![FracMod1::zero(), FracMod1::zero()],
                vec![vec![f(1, m)]],
            )
        }
    }
}

/// Orthogonally decompose a nondegenerate module into indecomposable blocks.
pub fn decompose(m: &FiniteQuadraticModule, guards: &Guards) -> Result<Vec<BlockDescriptor>> {
    let limit = guards.check_module_order(&m.order())?;
    if !m.is_nondegenerate(guards)? {
        return Err(Error::DegenerateModule);
    }
    let mut blocks = Vec::new();
    for p in m.primes() {
        let part = m.primary_part(&p);
        let p64 = u64::try_from(&p).map_err(|_| Error::SizeGuardExceeded {
            order: p.to_string(),
            limit,
        })?;
        split_primary(&part, p64, limit, &mut blocks)?;
    }
    Ok(blocks)
}

/// True iff the direct sum of the blocks is isomorphic to `m`.
pub fn recompose_check(
    m: &FiniteQuadraticModule,
    blocks: &[BlockDescriptor],
    guards: &Guards,
) -> Result<bool> {
    let mut sum = FiniteQuadraticModule::trivial();
    for b in blocks {
        sum = sum.direct_sum(&block_to_fqm(b)?);
    }
    Ok(m.is_isomorphic(&sum, guards)?.is_some())
}

/// Denominator of the scaled value `v / modulus` after reduction.
fn den_of(v: u64, modulus: u64) -> u64 {
    modulus / v.gcd(&modulus)
}

/// Modular inverse for odd/unit `a` mod `m`.
fn inv_mod(a: u64, m: u64) -> u64 {
    let (mut t, mut new_t) = (0i128, 1i128);
    let (mut r, mut new_r) = (m as i128, (a % m) as i128);
    while new_r != 0 {
        let q = r / new_r;
        (t, new_t) = (new_t, t - q * new_t);
        (r, new_r) = (new_r, r - q * new_r);
    }
    assert_eq!(r, 1, "not a unit");
    (t.rem_euclid(m as i128)) as u64
}

/// Recursively split the p-primary module `m` (p odd or 2) into blocks.
fn split_primary(
    m: &FiniteQuadraticModule,
    p: u64,
    limit: u64,
    out: &mut Vec<BlockDescriptor>,
) -> Result<()> {
    if m.is_trivial() {
        return Ok(());
    }
    let dense = DenseForm::new(m, limit)?;
    let max_ord = *dense.orders.last().expect("nontrivial module");
    let r = max_ord.trailing_zeros(); // valid only for p = 2
    let modulus = dense.modulus;

    // A-block scan: first element (lex order) of maximal order whose
    // Q-denominator is maximal (p^r for odd p, 2^{r+1} for p = 2)
    let want_den = if p == 2 { 2 * max_ord } else { max_ord };
    let mut split_x: Option<Vec<u64>> = None;
    for idx in 1..dense.total {
        let x = dense.coords_of(idx);
        if dense.order_of(&x) == max_ord && den_of(dense.q_of(&x), modulus) == want_den {
            split_x = Some(x);
            break;
        }
    }

    if let Some(x) = split_x {
        let qx = dense.q_of(&x);
        // a = Q(x) · want_den, already reduced
        let a = qx / (modulus / want_den);
        if p == 2 {
            out.push(BlockDescriptor::ATwo { r, a });
        } else {
            let rr = log_pow(max_ord, p);
            out.push(BlockDescriptor::AOdd { p, r: rr, a });
        }
        // project every generator onto the orthogonal complement of x:
        // g - c·x with c solving c·b(x,x) = b(x,g) at denominator max_ord
        let s = modulus / max_ord;
        let w = dense.b_of(&x, &x); // scaled b(x,x); unit·s by construction
        debug_assert_eq!(w % s, 0);
        let w_unit = (w / s) % max_ord;
        let w_inv = inv_mod(w_unit, max_ord);
        let complement = project_complement(m, &dense, limit, |dense, g| {
            let v = dense.b_of(&x, g);
            debug_assert_eq!(v % s, 0);
            let c = ((v / s) as u128 * w_inv as u128 % max_ord as u128) as u64;
            vec![(c, x.clone())]
        })?;
        return split_primary(&complement, p, limit, out);
    }

    // p = 2, even type: split a hyperbolic pair. An A-scan miss for odd p
    // contradicts nondegeneracy.
    if p != 2 {
        return Err(Error::Internal(
            "odd primary part has no splitting element; module must be degenerate".into(),
        ));
    }
    let x = (1..dense.total)
        .map(|idx| dense.coords_of(idx))
        .find(|x| dense.order_of(x) == max_ord)
        .ok_or_else(|| Error::Internal("no element of maximal order".into()))?;
    let y = (1..dense.total)
        .map(|idx| dense.coords_of(idx))
        .find(|y| den_of(dense.b_of(&x, y), modulus) == max_ord)
        .ok_or_else(|| {
            Error::Internal("no partner at full pairing denominator; degenerate module".into())
        })?;

    let to_el = |c: &[u64]| -> GroupElement {
        m.element(c.iter().map(|&v| BigInt::from(v)).collect())
    };
    let (sub, _) = m.submodule(&[to_el(&x), to_el(&y)]);
    debug_assert_eq!(
        sub.orders(),
        &[BigUint::from(max_ord), BigUint::from(max_ord)]
    );
    let guards = Guards::with_module_order(limit);
    let b_cand = block_to_fqm(&BlockDescriptor::B { r })?;
    let block = if sub.is_isomorphic(&b_cand, &guards)?.is_some() {
        BlockDescriptor::B { r }
    } else {
        let c_cand = block_to_fqm(&BlockDescriptor::C { r })?;
        if sub.is_isomorphic(&c_cand, &guards)?.is_none() {
            return Err(Error::Internal(
                "rank-2 even submodule is neither B nor C".into(),
            ));
        }
        BlockDescriptor::C { r }
    };
    out.push(block);

    // scaled 2x2 Gram of the pair, invertible mod 2^r
    let s = modulus / max_ord;
    let gxx = dense.b_of(&x, &x) / s % max_ord;
    let gxy = dense.b_of(&x, &y) / s % max_ord;
    let gyy = dense.b_of(&y, &y) / s % max_ord;
    let det = ((gxx as u128 * gyy as u128 + (max_ord as u128 * max_ord as u128)
        - gxy as u128 * gxy as u128)
        % max_ord as u128) as u64;
    let det_inv = inv_mod(det, max_ord);
    let complement = project_complement(m, &dense, limit, |dense, g| {
        let tx = dense.b_of(&x, g) / s % max_ord;
        let ty = dense.b_of(&y, g) / s % max_ord;
        // (α, β) = G⁻¹ · (tx, ty) mod 2^r via the adjugate
        let m128 = max_ord as u128;
        let alpha = ((gyy as u128 * tx as u128 + (m128 * m128 - gxy as u128 * ty as u128))
            % m128) as u64;
        let beta = ((gxx as u128 * ty as u128 + (m128 * m128 - gxy as u128 * tx as u128))
            % m128) as u64;
        let alpha = (alpha as u128 * det_inv as u128 % m128) as u64;
        let beta = (beta as u128 * det_inv as u128 % m128) as u64;
        vec![(alpha, x.clone()), (beta, y.clone())]
    })?;
    split_primary(&complement, 2, limit, out)
}

fn log_pow(mut n: u64, p: u64) -> u32 {
    let mut r = 0;
    while n > 1 {
        debug_assert_eq!(n % p, 0);
        n /= p;
        r += 1;
    }
    r
}

/// Build the orthogonal complement module: replace each generator g by
/// g - Σ cᵢ·xᵢ with the coefficients supplied by `coeffs_for`, then
/// re-present the span of the projections. Asserts orthogonality of every
/// projection against the split vectors.
fn project_complement(
    m: &FiniteQuadraticModule,
    dense: &DenseForm,
    _limit: u64,
    coeffs_for: impl Fn(&DenseForm, &[u64]) -> Vec<(u64, Vec<u64>)>,
) -> Result<FiniteQuadraticModule> {
    let k = m.num_generators();
    let mut projections = Vec::with_capacity(k);
    let mut split_vectors: Vec<Vec<u64>> = Vec::new();
    for i in 0..k {
        let mut g = vec![0u64; k];
        g[i] = 1;
        let corrections = coeffs_for(dense, &g);
        let mut el = m.generator(i);
        for (c, x) in &corrections {
            if split_vectors.iter().all(|v| v != x) {
                split_vectors.push(x.clone());
            }
            let x_el = m.element(x.iter().map(|&v| BigInt::from(v)).collect());
            el = m.add(&el, &m.neg(&m.scale_el(&BigInt::from(*c), &x_el)));
        }
        projections.push(el);
    }
    // orthogonality of the split at every step
    for proj in &projections {
        let pc: Vec<u64> = proj
            .coeffs
            .iter()
            .map(|c| u64::try_from(c).expect("canonical coefficient"))
            .collect();
        for x in &split_vectors {
            debug_assert_eq!(dense.b_of(x, &pc), 0, "projection must be b-orthogonal");
        }
    }
    let (sub, _) = m.submodule(&projections);
    Ok(sub)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::discriminant::discriminant_module;
    use crate::lattice::GramMatrix;

    fn f(n: i64, d: i64) -> FracMod1 {
        FracMod1::new(n, d).unwrap()
    }

    #[test]
    fn block_modules() {
        let m = block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap();
        assert_eq!(m.orders(), &[BigUint::from(3u32)]);
        assert_eq!(m.q_gen(), &[f(1, 3)]);
        let m = block_to_fqm(&BlockDescriptor::ATwo { r: 1, a: 1 }).unwrap();
        assert_eq!(m.orders(), &[BigUint::from(2u32)]);
        assert_eq!(m.q_gen(), &[f(1, 4)]);
        let m = block_to_fqm(&BlockDescriptor::C { r: 2 }).unwrap();
        assert_eq!(m.eval_q(&m.element_i64(&[1, 1])), f(1, 4));
        let m = block_to_fqm(&BlockDescriptor::B { r : 1 }).unwrap();
        assert_eq!(m.eval_q(&m.element_i64(&[1, 1])), f(1, 2));
    }

    #[test]
    fn invalid_blocks_rejected() {
        assert!(block_to_fqm(&BlockDescriptor::AOdd { p: 4, r: 1, a: 1 }).is_err());
        assert!(block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 3 }).is_err());
        assert!(block_to_fqm(&BlockDescriptor::ATwo { r: 1, a: 2 }).is_err());
        assert!(block_to_fqm(&BlockDescriptor::B { r: 0 }).is_err());
    }

    #[test]
    fn decompose_examples() {
        let guards = Guards::default();
        assert!(decompose(&FiniteQuadraticModule::trivial(), &guards)
            .unwrap()
            .is_empty());
        let a2 = GramMatrix::from_i64(&[&[2, 1], &[1, 2]]).unwrap();
        let m = discriminant_module(&a2).unwrap().module;
        assert_eq!(
            decompose(&m, &guards).unwrap(),
            vec![BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }]
        );
        let u2 = GramMatrix::from_i64(&[&[0, 2], &[2, 0]]).unwrap();
        let m = discriminant_module(&u2).unwrap().module;
        assert_eq!(decompose(&m, &guards).unwrap(), vec![BlockDescriptor::C { r: 1 }]);
        // Z/6 with Q(g) = 7/12
        let m = block_to_fqm(&BlockDescriptor::ATwo { r: 1, a: 1 })
            .unwrap()
            .direct_sum(&block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap());
        assert_eq!(
            decompose(&m, &guards).unwrap(),
            vec![
                BlockDescriptor::ATwo { r: 1, a: 1 },
                BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }
            ]
        );
    }

    #[test]
    fn degenerate_rejected() {
        let guards = Guards::default();
        let deg =
            FiniteQuadraticModule::new(vec![BigUint::from(2u32)], vec![f(1, 2)], vec![]).unwrap();
        assert!(matches!(
            decompose(&deg, &guards),
            Err(Error::DegenerateModule)
        ));
    }

    #[test]
    fn recompose_checks() {
        let guards = Guards::default();
        let a13 = block_to_fqm(&BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }).unwrap();
        assert!(recompose_check(
            &a13,
            &[BlockDescriptor::AOdd { p: 3, r: 1, a: 1 }],
            &guards
        )
        .unwrap());
        assert!(!recompose_check(
            &a13,
            &[BlockDescriptor::AOdd { p: 3, r: 1, a: 2 }],
            &guards
        )
        .unwrap());
        assert!(recompose_check(&FiniteQuadraticModule::trivial(), &[], &guards).unwrap());
    }

    #[test]
    fn block_round_trip_small_grid() {
        let guards = Guards::default();
        let mut grid: Vec<BlockDescriptor> = Vec::new();
        for p in [3u64, 5] {
            for r in 1..=1u32 {
                for a in 1..p.pow(r) {
                    if a % p != 0 {
                        grid.push(BlockDescriptor::AOdd { p, r, a });
                    }
                }
            }
        }
        for r in 1..=2u32 {
            for a in (1..2u64.pow(r + 1)).step_by(2) {
                grid.push(BlockDescriptor::ATwo { r, a });
            }
            grid.push(BlockDescriptor::B { r });
            grid.push(BlockDescriptor::C { r });
        }
        for d in grid {
            let m = block_to_fqm(&d).unwrap();
            let blocks = decompose(&m, &guards).unwrap();
            assert_eq!(blocks.len(), 1, "block {d:?} must stay indecomposable");
            let m2 = block_to_fqm(&blocks[0]).unwrap();
            assert!(
                m.is_isomorphic(&m2, &guards).unwrap().is_some(),
                "round trip failed for {d:?}, got {:?}",
                blocks[0]
            );
        }
    }

    #[test]
    fn mixed_sum_decomposes_soundly() {
        let guards = Guards::default();
        let m = block_to_fqm(&BlockDescriptor::B { r: 1 })
            .unwrap()
            .direct_sum(&block_to_fqm(&BlockDescriptor::ATwo { r: 2, a: 3 }).unwrap())
            .direct_sum(&block_to_fqm(&BlockDescriptor::AOdd { p: 5, r: 1, a: 2 }).unwrap());
        let blocks = decompose(&m, &guards).unwrap();
        let order: BigUint = blocks.iter().map(|b| b.order()).product();
        assert_eq!(order, m.order());
        assert!(recompose_check(&m, &blocks, &guards).unwrap());
    }
}
