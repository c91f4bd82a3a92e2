//! Realization of finite quadratic modules by even integral lattices.
//!
//! Each indecomposable block is realized either from a small closed-form
//! table or by a deterministic bounded search over symmetric even-diagonal
//! integer matrices, pruned by determinant and verified by the discriminant
//! oracle. Verified realizations are kept in a cache that can be persisted
//! to disk; cache entries are re-verified on use and recomputed if stale.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use num_bigint::{BigInt, BigUint};
use num_traits::ToPrimitive;

use crate::blocks::{block_to_fqm, decompose, BlockDescriptor};
use crate::discriminant::discriminant_module;
use crate::error::{Error, Result};
use crate::fqm::FiniteQuadraticModule;
use crate::guards::Guards;
use crate::lattice::GramMatrix;
use crate::modular::central_charge;

/// Search budget for a single block realization.
#[derive(Debug, Clone, Copy)]
pub struct SearchBudget {
    pub max_rank: usize,
    /// Off-diagonal entry bounds tried in order (diagonal entries range over
    /// even values up to twice the bound).
    pub entry_bounds: &'static [i64],
}

impl Default for SearchBudget {
    fn default() -> Self {
        SearchBudget {
            max_rank: 5,
            entry_bounds: &[2, 4, 8, 16],
        }
    }
}

/// Verified block realizations, persistable as JSON.
pub struct RealizationCache {
    entries: BTreeMap<String, Vec<Vec<BigInt>>>,
    path: Option<PathBuf>,
}

fn block_key(d: &BlockDescriptor) -> String {
    match d {
        BlockDescriptor::AOdd { p, r, a } => format!("AOdd:p={p},r={r},a={a}"),
        BlockDescriptor::ATwo { r, a } => format!("ATwo:r={r},a={a}"),
        BlockDescriptor::B { r } => format!("B:r={r}"),
        BlockDescriptor::C { r } => format!("C:r={r}"),
    }
}

impl RealizationCache {
    pub fn in_memory() -> Self {
        RealizationCache {
            entries: BTreeMap::new(),
            path: None,
        }
    }

    /// Load from a JSON file; a missing file yields an empty cache bound to
    /// the path.
    pub fn load(path: &Path) -> Result<Self> {
        let mut cache = RealizationCache {
            entries: BTreeMap::new(),
            path: Some(path.to_path_buf()),
        };
        if !path.exists() {
            return Ok(cache);
        }
        let text = std::fs::read_to_string(path)
            .map_err(|e| Error::Parse(format!("cannot read cache {path:?}: {e}")))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| Error::Parse(format!("bad cache JSON: {e}")))?;
        let obj = value
            .as_object()
            .ok_or_else(|| Error::Parse("cache JSON must be an object".into()))?;
        for (k, v) in obj {
            let rows = crate::io::json_to_int_rows(v)?;
            cache.entries.insert(k.clone(), rows);
        }
        Ok(cache)
    }

    pub fn save(&self) -> Result<()> {
        let Some(path) = &self.path else {
            return Ok(());
        };
        let mut obj = serde_json::Map::new();
        for (k, rows) in &self.entries {
            obj.insert(k.clone(), crate::io::int_rows_to_json(rows));
        }
        std::fs::write(path, serde_json::to_string_pretty(&obj).unwrap())
            .map_err(|e| Error::Internal(format!("cannot write cache {path:?}: {e}")))?;
        Ok(())
    }

    fn get(&self, d: &BlockDescriptor) -> Option<&Vec<Vec<BigInt>>> {
        self.entries.get(&block_key(d))
    }

    fn put(&mut self, d: &BlockDescriptor, rows: Vec<Vec<BigInt>>) {
        self.entries.insert(block_key(d), rows);
    }
}

/// Verify that `k` realizes the module of block `d`.
fn verify_realization(k: &GramMatrix, target: &FiniteQuadraticModule) -> Result<bool> {
    let order = target.order();
    let det = k.determinant();
    if det.magnitude() != &order {
        return Ok(false);
    }
    let disc = discriminant_module(k)?;
    if disc.module.orders() != target.orders() {
        return Ok(false);
    }
    let limit = order.to_u64().unwrap_or(u64::MAX).max(4096);
    let guards = Guards::with_module_order(limit);
    Ok(disc.module.is_isomorphic(target, &guards)?.is_some())
}

/// Closed-form realizations that need no search.
fn closed_form(d: &BlockDescriptor) -> Option<GramMatrix> {
    match *d {
        BlockDescriptor::ATwo { r, a } => {
            let m = 1i64 << r;
            let modulus = 2 * m as u64;
            if a % modulus == 1 {
                Some(GramMatrix::from_i64(&[&[m]]).unwrap())
            } else if a % modulus == modulus - 1 {
                Some(GramMatrix::from_i64(&[&[-m]]).unwrap())
            } else {
                None
            }
        }
        BlockDescriptor::C { r } => {
            let m = 1i64 << r;
            Some(GramMatrix::from_i64(&[&[0, m], &[m, 0]]).unwrap())
        }
        _ => None,
    }
}

/// Realize one block: cache, closed form, then bounded deterministic search.
pub fn realize_block(d: &BlockDescriptor, cache: &mut RealizationCache) -> Result<GramMatrix> {
    realize_block_with_budget(d, cache, SearchBudget::default())
}

pub fn realize_block_with_budget(
    d: &BlockDescriptor,
    cache: &mut RealizationCache,
    budget: SearchBudget,
) -> Result<GramMatrix> {
    d.validate()?;
    let target = block_to_fqm(d)?;
    if let Some(rows) = cache.get(d) {
        // stale entries are rejected and recomputed
        if let Ok(k) = GramMatrix::new(rows.clone()) {
            if verify_realization(&k, &target)? {
                return Ok(k);
            }
        }
    }
    if let Some(k) = closed_form(d) {
        debug_assert!(verify_realization(&k, &target)?);
        cache.put(d, k.to_rows());
        return Ok(k);
    }
    if let Some(k) = glue_construct(d, &target, budget)? {
        cache.put(d, k.to_rows());
        return Ok(k);
    }
    let k = search_block(d, &target, budget)?;
    cache.put(d, k.to_rows());
    Ok(k)
}

/// Realize a whole module: decompose into blocks, realize each, direct-sum.
pub fn realize(
    m: &FiniteQuadraticModule,
    guards: &Guards,
    cache: &mut RealizationCache,
) -> Result<GramMatrix> {
    let blocks = decompose(m, guards)?;
    let mut k = GramMatrix::empty();
    for b in &blocks {
        k = k.direct_sum(&realize_block(b, cache)?);
    }
    Ok(k)
}

/// Seed lattice whose discriminant is the 2-adic block plus junk of odd
/// order. ⟨a·2^r⟩ has cyclic discriminant with 2-part exactly the a-twisted
/// 2-adic block, and 2^r·A₂ has 2-part the even hyperbolic-twist block; in
/// both cases the odd leftover is removed afterwards by passing to even
/// overlattices.
fn glue_seed(d: &BlockDescriptor) -> Option<GramMatrix> {
    match *d {
        BlockDescriptor::ATwo { r, a } => {
            let n = (a as i64) << r;
            Some(GramMatrix::from_i64(&[&[n]]).unwrap())
        }
        BlockDescriptor::B { r } => {
            let m = 1i64 << r;
            Some(GramMatrix::from_i64(&[&[2 * m, m], &[m, 2 * m]]).unwrap())
        }
        _ => None,
    }
}

/// Realize a block by seeding, cancelling the odd junk with its negated
/// realization, and gluing the paired junk away along isotropic elements.
fn glue_construct(
    d: &BlockDescriptor,
    target: &FiniteQuadraticModule,
    budget: SearchBudget,
) -> Result<Option<GramMatrix>> {
    let Some(seed) = glue_seed(d) else {
        return Ok(None);
    };
    let disc = discriminant_module(&seed)?;
    let limit = disc.module.order().to_u64().unwrap_or(u64::MAX).max(4096);
    let guards = Guards::with_module_order(limit);
    let blocks = decompose(&disc.module, &guards)?;
    let mut k = seed;
    for b in &blocks {
        // negate each odd component so the junk pairs up as q ⊕ (−q)
        if let BlockDescriptor::AOdd { p, r, a } = *b {
            let neg = BlockDescriptor::AOdd {
                p,
                r,
                a: p.pow(r) - a,
            };
            let aux = search_block(&neg, &block_to_fqm(&neg)?, budget)?;
            k = k.direct_sum(&aux);
        }
    }
    glue_reduce(k, target)
}

/// Shrink the discriminant by even overlattices: each isotropic element of
/// odd order yields an index-|h| extension whose discriminant is h⊥/⟨h⟩.
/// Backtracks over candidates until only the target order remains.
fn glue_reduce(k: GramMatrix, target: &FiniteQuadraticModule) -> Result<Option<GramMatrix>> {
    let disc = discriminant_module(&k)?;
    if disc.module.order() == target.order() {
        return if verify_realization(&k, target)? {
            Ok(Some(k))
        } else {
            Ok(None)
        };
    }
    let n = k.rank();
    let mut candidates: Vec<(BigUint, Vec<BigInt>)> = Vec::new();
    for x in disc.module.elements() {
        let ord = disc.module.order_of(&x);
        use num_traits::{One, Zero};
        if ord.is_one() || (&ord % 2u32).is_zero() || !disc.module.eval_q(&x).is_zero() {
            continue;
        }
        let mut u = vec![BigInt::zero(); n];
        for (j, c) in x.coeffs.iter().enumerate() {
            for (ui, lj) in u.iter_mut().zip(&disc.generator_lifts[j]) {
                *ui += c * lj;
            }
        }
        candidates.push((ord, u));
    }
    // larger extensions first: fewer gluing steps to the target
    candidates.sort_by(|a, b| b.0.cmp(&a.0));
    for (_, u) in candidates {
        if let Some(bigger) = overlattice(&k, &u)? {
            if let Some(found) = glue_reduce(bigger, target)? {
                return Ok(Some(found));
            }
        }
    }
    Ok(None)
}

/// The even overlattice L + Z·w for w = K⁻¹u, expressed in a new basis.
/// Returns None when the extension is not integral or not even.
fn overlattice(k: &GramMatrix, u: &[BigInt]) -> Result<Option<GramMatrix>> {
    use num_traits::Zero;
    let n = k.rank();
    let det = k.determinant();
    let adj = k.matrix().adjugate();
    // rows spanning det·(Z^n + Z·w): det times the standard basis, plus
    // det·w = adj(K)·u
    let mut stack = crate::intmat::IMat::zero(n + 1, n);
    for i in 0..n {
        stack[(i, i)] = det.clone();
    }
    for j in 0..n {
        let mut acc = BigInt::zero();
        for (i, ui) in u.iter().enumerate() {
            acc += &adj[(j, i)] * ui;
        }
        stack[(n, j)] = acc;
    }
    let snf = crate::intmat::smith_normal_form(&stack);
    let v_inv = snf.v.inverse_unimodular();
    // row-space basis: dᵢ times row i of V⁻¹
    let mut r = crate::intmat::IMat::zero(n, n);
    for i in 0..n {
        for j in 0..n {
            r[(i, j)] = &snf.d[(i, i)] * &v_inv[(i, j)];
        }
    }
    let g = r.mul(k.matrix()).mul(&r.transpose());
    let det_sq = &det * &det;
    let mut rows = vec![vec![BigInt::zero(); n]; n];
    for (i, row) in rows.iter_mut().enumerate() {
        for (j, out) in row.iter_mut().enumerate() {
            let (q, rem) = num_integer::Integer::div_rem(&g[(i, j)], &det_sq);
            if !rem.is_zero() {
                return Ok(None);
            }
            *out = q;
        }
    }
    Ok(GramMatrix::new(rows).ok())
}

/// Deterministic bounded search. Candidate ranks run 1..=max_rank with the
/// parity forced by the central charge; for each rank the admissible
/// signatures fix the determinant sign, and candidates are enumerated in a
/// fixed order (definite forms in reduced shape, indefinite forms by growing
/// entry bound), pruned by determinant before the discriminant oracle runs.
fn search_block(
    d: &BlockDescriptor,
    target: &FiniteQuadraticModule,
    budget: SearchBudget,
) -> Result<GramMatrix> {
    let order_big = target.order();
    let order = order_big.to_u64().ok_or_else(|| {
        Error::RealizationNotFound(format!("block order {order_big} too large to search"))
    })? as i64;
    let limit = (order as u64).max(4096);
    let guards = Guards::with_module_order(limit);
    let charge = central_charge(target, &guards)? as i64;

    for rank in 1..=budget.max_rank {
        let n = rank as i64;
        if (n - charge).rem_euclid(2) != 0 {
            continue; // signature and rank have the same parity
        }
        for n_minus in 0..=rank {
            let sigma = n - 2 * n_minus as i64;
            if (sigma - charge).rem_euclid(8) != 0 {
                continue;
            }
            let det_target = if n_minus % 2 == 0 { order } else { -order };
            let found = if n_minus == 0 || n_minus == rank {
                search_definite(rank, order, n_minus == rank, target)?
            } else {
                search_indefinite(rank, det_target, budget.entry_bounds, target)?
            };
            if let Some(k) = found {
                return Ok(k);
            }
        }
    }
    Err(Error::RealizationNotFound(format!(
        "block {d:?}: exhausted ranks 1..={} with entry bounds {:?}",
        budget.max_rank, budget.entry_bounds
    )))
}

/// Hermite-style bound on the diagonal product of a reduced positive
/// definite form: γₙⁿ · det, with γₙⁿ for n ≤ 5 from the known constants.
fn diag_product_bound(rank: usize, det: i64) -> i64 {
    let gamma_pow: i64 = match rank {
        1 => 1,
        2 => 2,  // ceil(4/3)
        3 => 2,
        4 => 4,
        5 => 8,
        _ => 16,
    };
    gamma_pow * det
}

/// Enumerate Minkowski-style reduced candidates: sorted even diagonal
/// 2 ≤ a₁₁ ≤ … ≤ aₙₙ with bounded product, off-diagonals |aᵢⱼ| ≤ aᵢᵢ/2.
fn search_definite(
    rank: usize,
    det: i64,
    negate: bool,
    target: &FiniteQuadraticModule,
) -> Result<Option<GramMatrix>> {
    let bound = diag_product_bound(rank, det);
    let mut diag = vec![0i64; rank];
    let mut result = None;
    enumerate_diagonals(&mut diag, 0, 2, bound, &mut |diag| {
        if result.is_some() {
            return Ok(());
        }
        let mut mat = vec![vec![0i64; rank]; rank];
        for (i, &a) in diag.iter().enumerate() {
            mat[i][i] = a;
        }
        let pairs: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| (i + 1..rank).map(move |j| (i, j)))
            .collect();
        result = try_offdiagonals(&mut mat, &pairs, 0, det, negate, target)?;
        Ok(())
    })?;
    Ok(result)
}

fn enumerate_diagonals(
    diag: &mut Vec<i64>,
    idx: usize,
    min: i64,
    budget: i64,
    f: &mut dyn FnMut(&[i64]) -> Result<()>,
) -> Result<()> {
    if idx == diag.len() {
        return f(diag);
    }
    let remaining = (diag.len() - idx) as u32;
    let mut a = min;
    // all remaining entries are >= a, so a^remaining must fit the budget
    while a.checked_pow(remaining).map_or(false, |p| p <= budget) {
        diag[idx] = a;
        enumerate_diagonals(diag, idx + 1, a, budget / a, f)?;
        a += 2;
    }
    Ok(())
}

fn try_offdiagonals(
    mat: &mut Vec<Vec<i64>>,
    pairs: &[(usize, usize)],
    t: usize,
    det: i64,
    negate: bool,
    target: &FiniteQuadraticModule,
) -> Result<Option<GramMatrix>> {
    if t == pairs.len() {
        return check_candidate(mat, det * if negate { sign_pow(mat.len()) } else { 1 }, negate, target);
    }
    let (i, j) = pairs[t];
    let half = mat[i][i].min(mat[j][j]) / 2;
    for v in -half..=half {
        mat[i][j] = v;
        mat[j][i] = v;
        if let Some(k) = try_offdiagonals(mat, pairs, t + 1, det, negate, target)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn sign_pow(n: usize) -> i64 {
    if n % 2 == 0 {
        1
    } else {
        -1
    }
}

/// Exhaustive bounded enumeration for indefinite signatures.
fn search_indefinite(
    rank: usize,
    det_target: i64,
    bounds: &[i64],
    target: &FiniteQuadraticModule,
) -> Result<Option<GramMatrix>> {
    for &bound in bounds {
        let mut mat = vec![vec![0i64; rank]; rank];
        let slots: Vec<(usize, usize)> = (0..rank)
            .flat_map(|i| (i..rank).map(move |j| (i, j)))
            .collect();
        if let Some(k) = fill_slots(&mut mat, &slots, 0, bound, det_target, target)? {
            return Ok(Some(k));
        }
    }
    Ok(None)
}

fn fill_slots(
    mat: &mut Vec<Vec<i64>>,
    slots: &[(usize, usize)],
    t: usize,
    bound: i64,
    det_target: i64,
    target: &FiniteQuadraticModule,
) -> Result<Option<GramMatrix>> {
    if t == slots.len() {
        return check_candidate(mat, det_target, false, target);
    }
    let (i, j) = slots[t];
    let (lo, hi, step) = if i == j {
        (-2 * bound, 2 * bound, 2)
    } else {
        (-bound, bound, 1)
    };
    let mut v = lo;
    while v <= hi {
        mat[i][j] = v;
        mat[j][i] = v;
        if let Some(k) = fill_slots(mat, slots, t + 1, bound, det_target, target)? {
            return Ok(Some(k));
        }
        v += step;
    }
    Ok(None)
}

fn det_i64(m: &[Vec<i64>]) -> i128 {
    let n = m.len();
    let mut a: Vec<Vec<i128>> = m
        .iter()
        .map(|r| r.iter().map(|&x| x as i128).collect())
        .collect();
    // fraction-free elimination
    let mut sign = 1i128;
    let mut prev = 1i128;
    for k in 0..n.saturating_sub(1) {
        if a[k][k] == 0 {
            let Some(i) = (k + 1..n).find(|&i| a[i][k] != 0) else {
                return 0;
            };
            a.swap(k, i);
            sign = -sign;
        }
        for i in k + 1..n {
            for j in k + 1..n {
                a[i][j] = (a[i][j] * a[k][k] - a[i][k] * a[k][j]) / prev;
            }
            a[i][k] = 0;
        }
        prev = a[k][k];
    }
    if n == 0 {
        return 1;
    }
    sign * a[n - 1][n - 1]
}

fn check_candidate(
    mat: &[Vec<i64>],
    det_target: i64,
    negate: bool,
    target: &FiniteQuadraticModule,
) -> Result<Option<GramMatrix>> {
    let rows: Vec<Vec<i64>> = if negate {
        mat.iter().map(|r| r.iter().map(|&x| -x).collect()).collect()
    } else {
        mat.to_vec()
    };
    if det_i64(&rows) != det_target as i128 {
        return Ok(None);
    }
    let refs: Vec<&[i64]> = rows.iter().map(|r| r.as_slice()).collect();
    let Ok(k) = GramMatrix::from_i64(&refs) else {
        return Ok(None);
    };
    if verify_realization(&k, target)? {
        Ok(Some(k))
    } else {
        Ok(None)
    }
}
