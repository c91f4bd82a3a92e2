//! Classification decisions: equivalence of lattice presentations through
//! their discriminant modules, and enumeration of nondegenerate finite
//! quadratic modules of a given order up to isomorphism.

use num_bigint::{BigInt, BigUint};

use crate::blocks::{block_to_fqm, BlockDescriptor};
use crate::discriminant::discriminant_module;
use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::fqm::{FiniteQuadraticModule, GroupElement};
use crate::guards::Guards;
use crate::lattice::GramMatrix;
use crate::modular::central_charge;

/// Why two presentations are not equivalent, by the first invariant that
/// separates their discriminant modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum InequivalenceReason {
    OrderMismatch,
    InvariantFactorMismatch,
    QMultisetMismatch,
    ExhaustedSearch,
}

impl std::fmt::Display for InequivalenceReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let s = match self {
            InequivalenceReason::OrderMismatch => "discriminant orders differ",
            InequivalenceReason::InvariantFactorMismatch => "invariant factors differ",
            InequivalenceReason::QMultisetMismatch => "Q-value multisets differ",
            InequivalenceReason::ExhaustedSearch => "no isomorphism exists (search exhausted)",
        };
        f.write_str(s)
    }
}

#[derive(Debug)]
pub enum Verdict {
    /// Generator images of an isomorphism between the discriminant modules.
    Equivalent { witness: Vec<GroupElement> },
    Inequivalent { reason: InequivalenceReason },
}

impl Verdict {
    pub fn is_equivalent(&self) -> bool {
        matches!(self, Verdict::Equivalent { .. })
    }
}

/// Sorted multiset of (order, Q) pairs over all elements; a necessary
/// isomorphism invariant.
fn order_q_multiset(m: &FiniteQuadraticModule) -> Vec<(BigUint, FracMod1)> {
    let mut pairs: Vec<(BigUint, FracMod1)> = m
        .elements()
        .map(|x| (m.order_of(&x), m.eval_q(&x)))
        .collect();
    pairs.sort();
    pairs
}

/// Decide whether two presentations define the same theory: their
/// discriminant modules are compared invariant by invariant, then by
/// isomorphism search.
pub fn equivalent(k1: &GramMatrix, k2: &GramMatrix, guards: &Guards) -> Result<Verdict> {
    let m1 = discriminant_module(k1)?.module;
    let m2 = discriminant_module(k2)?.module;
    if m1.order() != m2.order() {
        return Ok(Verdict::Inequivalent {
            reason: InequivalenceReason::OrderMismatch,
        });
    }
    guards.check_module_order(&m1.order())?;
    if m1.orders() != m2.orders() {
        return Ok(Verdict::Inequivalent {
            reason: InequivalenceReason::InvariantFactorMismatch,
        });
    }
    if order_q_multiset(&m1) != order_q_multiset(&m2) {
        return Ok(Verdict::Inequivalent {
            reason: InequivalenceReason::QMultisetMismatch,
        });
    }
    match m1.is_isomorphic(&m2, guards)? {
        Some(witness) => Ok(Verdict::Equivalent { witness }),
        None => Ok(Verdict::Inequivalent {
            reason: InequivalenceReason::ExhaustedSearch,
        }),
    }
}

/// Necessary isomorphism invariants: invariant factors, the (order, Q)
/// multiset, and the central charge. Equal keys do not imply isomorphism.
pub fn classification_key(
    m: &FiniteQuadraticModule,
    guards: &Guards,
) -> Result<(Vec<BigUint>, Vec<(BigUint, FracMod1)>, u8)> {
    guards.check_module_order(&m.order())?;
    Ok((
        m.orders().to_vec(),
        order_q_multiset(m),
        central_charge(m, guards)?,
    ))
}

/// Representatives collected so far, deduplicated by isomorphism with a key
/// prefilter, keeping the lexicographically least serialization per class.
struct ClassSet {
    classes: Vec<(String, FiniteQuadraticModule)>,
    guards: Guards,
}

impl ClassSet {
    fn new(guards: Guards) -> Self {
        ClassSet {
            classes: Vec::new(),
            guards,
        }
    }

    fn insert(&mut self, m: FiniteQuadraticModule) -> Result<()> {
        let key = format!("{:?}", classification_key(&m, &self.guards)?);
        for (k, rep) in self.classes.iter_mut() {
            if *k == key && rep.is_isomorphic(&m, &self.guards)?.is_some() {
                if m.serial_key() < rep.serial_key() {
                    *rep = m;
                }
                return Ok(());
            }
        }
        self.classes.push((key, m));
        Ok(())
    }

    fn into_sorted(self) -> Vec<FiniteQuadraticModule> {
        let mut out: Vec<FiniteQuadraticModule> =
            self.classes.into_iter().map(|(_, m)| m).collect();
        out.sort_by_key(|m| m.serial_key());
        out
    }
}

/// Representatives of the indecomposable blocks of a given prime-power
/// order, one per isomorphism class.
fn block_class_reps(q: u64) -> Vec<BlockDescriptor> {
    let mut out = Vec::new();
    // split q = p^r
    let p = (2..=q).find(|d| q % d == 0).expect("q > 1");
    let mut r = 0u32;
    let mut t = q;
    while t > 1 {
        if t % p != 0 {
            return out; // not a prime power: no blocks
        }
        t /= p;
        r += 1;
    }
    if p == 2 {
        // odd a up to square units: a mod 8 suffices for r >= 2, a mod 4 for r = 1
        let reps: &[u64] = if r == 1 { &[1, 3] } else { &[1, 3, 5, 7] };
        for &a in reps {
            out.push(BlockDescriptor::ATwo { r, a });
        }
        if r % 2 == 0 && q >= 4 {
            // order 4^s blocks exist only when the power is even
            out.push(BlockDescriptor::B { r: r / 2 });
            out.push(BlockDescriptor::C { r: r / 2 });
        }
    } else {
        // units mod p^r split into squares and non-squares
        let nqr = (2..p).find(|&n| {
            // Euler criterion: n^((p-1)/2) != 1 mod p
            mod_pow(n, (p - 1) / 2, p) != 1
        });
        out.push(BlockDescriptor::AOdd { p, r, a: 1 });
        if let Some(n) = nqr {
            out.push(BlockDescriptor::AOdd { p, r, a: n });
        }
        out.retain(|d| d.validate().is_ok());
    }
    out
}

fn mod_pow(mut base: u64, mut exp: u64, modulus: u64) -> u64 {
    let mut acc = 1u64;
    base %= modulus;
    while exp > 0 {
        if exp & 1 == 1 {
            acc = acc * base % modulus;
        }
        base = base * base % modulus;
        exp >>= 1;
    }
    acc
}

/// All nondegenerate finite quadratic modules of order `n` up to
/// isomorphism, built as direct sums of indecomposable blocks.
pub fn enumerate_fqm(n: u64, guards: &Guards) -> Result<Vec<FiniteQuadraticModule>> {
    guards.check_enum_order(n)?;
    if n == 0 {
        return Err(Error::InvalidModule("order must be positive".into()));
    }
    if n == 1 {
        return Ok(vec![FiniteQuadraticModule::trivial()]);
    }
    // every block order is a prime power dividing n
    let mut palette: Vec<(u64, BlockDescriptor)> = Vec::new();
    for q in 2..=n {
        if n % q == 0 {
            for d in block_class_reps(q) {
                palette.push((q, d));
            }
        }
    }
    let mut set = ClassSet::new(*guards);
    let mut stack: Vec<usize> = Vec::new();
    collect_multisets(&palette, 0, n, &mut stack, &mut |chosen| {
        let mut m = FiniteQuadraticModule::trivial();
        for &i in chosen {
            m = m.direct_sum(&block_to_fqm(&palette[i].1)?);
        }
        set.insert(m)
    })?;
    Ok(set.into_sorted())
}

fn collect_multisets(
    palette: &[(u64, BlockDescriptor)],
    start: usize,
    remaining: u64,
    stack: &mut Vec<usize>,
    f: &mut dyn FnMut(&[usize]) -> Result<()>,
) -> Result<()> {
    if remaining == 1 {
        return f(stack);
    }
    for i in start..palette.len() {
        let (q, _) = palette[i];
        if remaining % q == 0 {
            stack.push(i);
            collect_multisets(palette, i, remaining / q, stack, f)?;
            stack.pop();
        }
    }
    Ok(())
}

/// Result of first-principles enumeration: class representatives plus the
/// number of degenerate forms that were generated and filtered out.
pub struct DirectEnumeration {
    pub classes: Vec<FiniteQuadraticModule>,
    pub degenerate_count: usize,
}

/// Enumerate by brute force over every abelian group of order `n` and every
/// well-defined assignment of Q and b values on its generators.
pub fn enumerate_fqm_direct(n: u64, guards: &Guards) -> Result<DirectEnumeration> {
    guards.check_enum_order(n)?;
    if n == 0 {
        return Err(Error::InvalidModule("order must be positive".into()));
    }
    if n == 1 {
        return Ok(DirectEnumeration {
            classes: vec![FiniteQuadraticModule::trivial()],
            degenerate_count: 0,
        });
    }
    let mut set = ClassSet::new(*guards);
    let mut degenerate = 0usize;
    for shape in invariant_factor_chains(n) {
        enumerate_on_shape(&shape, guards, &mut set, &mut degenerate)?;
    }
    Ok(DirectEnumeration {
        classes: set.into_sorted(),
        degenerate_count: degenerate,
    })
}

/// Divisor chains d₁ | d₂ | … | dₘ with product n and every dᵢ > 1.
fn invariant_factor_chains(n: u64) -> Vec<Vec<u64>> {
    fn rec(n: u64, max: u64, acc: &mut Vec<u64>, out: &mut Vec<Vec<u64>>) {
        if n == 1 {
            let mut chain = acc.clone();
            chain.reverse(); // built largest-first
            out.push(chain);
            return;
        }
        // next factor divides both n and the previous (larger) factor
        for d in 2..=n.min(max) {
            if n % d == 0 && max % d == 0 {
                acc.push(d);
                rec(n / d, d, acc, out);
                acc.pop();
            }
        }
    }
    let mut out = Vec::new();
    rec(n, n, &mut Vec::new(), &mut out);
    out
}

fn enumerate_on_shape(
    shape: &[u64],
    guards: &Guards,
    set: &mut ClassSet,
    degenerate: &mut usize,
) -> Result<()> {
    let m = shape.len();
    // generator values: q_i = k/(2dᵢ) needs dᵢ·k even for dᵢ²·q_i ≡ 0
    let q_choices: Vec<Vec<FracMod1>> = shape
        .iter()
        .map(|&d| {
            (0..2 * d)
                .filter(|k| (d * k) % 2 == 0)
                .map(|k| FracMod1::new(BigInt::from(k), BigInt::from(2 * d)).unwrap())
                .collect()
        })
        .collect();
    // pair values: b_ij = k/gcd(dᵢ, dⱼ)
    let mut pair_choices: Vec<Vec<FracMod1>> = Vec::new();
    for i in 0..m {
        for j in i + 1..m {
            let g = num_integer::gcd(shape[i], shape[j]);
            pair_choices.push(
                (0..g)
                    .map(|k| FracMod1::new(BigInt::from(k), BigInt::from(g)).unwrap())
                    .collect(),
            );
        }
    }
    let orders: Vec<BigUint> = shape.iter().map(|&d| BigUint::from(d)).collect();
    let mut counters = vec![0usize; m + pair_choices.len()];
    loop {
        let q_gen: Vec<FracMod1> = (0..m).map(|i| q_choices[i][counters[i]].clone()).collect();
        let mut b_upper: Vec<Vec<FracMod1>> = Vec::new();
        let mut t = 0usize;
        for i in 0..m.saturating_sub(1) {
            let row: Vec<FracMod1> = (i + 1..m)
                .map(|_| {
                    let v = pair_choices[t][counters[m + t]].clone();
                    t += 1;
                    v
                })
                .collect();
            b_upper.push(row);
        }
        // the constructor enforces well-definedness; combinations that fail
        // are not quadratic modules at all
        if let Ok(module) = FiniteQuadraticModule::new(orders.clone(), q_gen, b_upper) {
            if module.is_nondegenerate(guards)? {
                set.insert(module)?;
            } else {
                *degenerate += 1;
            }
        }
        // mixed-radix increment
        let mut pos = 0usize;
        loop {
            if pos == counters.len() {
                return Ok(());
            }
            let radix = if pos < m {
                q_choices[pos].len()
            } else {
                pair_choices[pos - m].len()
            };
            counters[pos] += 1;
            if counters[pos] < radix {
                break;
            }
            counters[pos] = 0;
            pos += 1;
        }
    }
}
