//! Finite quadratic modules: a finite abelian group in invariant-factor form
//! with a Q/Z-valued quadratic form given on generators, plus the induced
//! bilinear form b(x,y) = Q(x+y) - Q(x) - Q(y).

use num_bigint::{BigInt, BigUint};
use num_integer::Integer;
use num_traits::{One, ToPrimitive, Zero};

use crate::dense::{isomorphism_search, DenseForm};
use crate::error::{Error, Result};
use crate::exact::FracMod1;
use crate::guards::Guards;
use crate::intmat::{self, IMat};

/// A finite abelian group ⊕ Z/dᵢ with d₁ | d₂ | … (each dᵢ > 1) and a
/// quadratic form determined by its generator values and cross terms:
/// Q(Σ nᵢgᵢ) = Σ nᵢ²·q_gen[i] + Σ_{i<j} nᵢnⱼ·b_gen[i][j].
#[derive(Clone, PartialEq, Eq)]
pub struct FiniteQuadraticModule {
    orders: Vec<BigUint>,
    q_gen: Vec<FracMod1>,
    /// Full symmetric matrix with b[i][i] = 2·q_gen[i].
    b_full: Vec<Vec<FracMod1>>,
}

/// An element in canonical coordinates: 0 ≤ coeffs[i] < dᵢ.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupElement {
    pub coeffs: Vec<BigInt>,
}

impl std::fmt::Debug for GroupElement {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.coeffs.iter().map(|c| c.to_string()).collect();
        write!(f, "({})", parts.join(", "))
    }
}

impl std::fmt::Debug for FiniteQuadraticModule {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "Fqm(orders={:?}, q={:?})",
            self.orders
                .iter()
                .map(|d| d.to_string())
                .collect::<Vec<_>>(),
            self.q_gen
        )
    }
}

impl FiniteQuadraticModule {
    /// Build a module from invariant factors, generator Q-values, and the
    /// strictly upper-triangular cross terms (row-major, row i of length
    /// k-1-i). Enforces well-definedness of Q and b; does NOT require
    /// nondegeneracy, so degenerate forms are constructible for testing.
    pub fn new(
        orders: Vec<BigUint>,
        q_gen: Vec<FracMod1>,
        b_upper: Vec<Vec<FracMod1>>,
    ) -> Result<Self> {
        let k = orders.len();
        if q_gen.len() != k {
            return Err(Error::InvalidModule(format!(
                "expected {k} generator Q-values, got {}",
                q_gen.len()
            )));
        }
        if b_upper.len() != k.saturating_sub(1) && !(k == 0 && b_upper.is_empty()) {
            return Err(Error::InvalidModule(format!(
                "expected {} cross-term rows, got {}",
                k.saturating_sub(1),
                b_upper.len()
            )));
        }
        let one = BigUint::one();
        for (i, d) in orders.iter().enumerate() {
            if *d <= one {
                return Err(Error::InvalidModule(format!(
                    "invariant factor at index {i} must exceed 1"
                )));
            }
            if i + 1 < k && !(&orders[i + 1] % d).is_zero() {
                return Err(Error::InvalidModule(format!(
                    "invariant factors must form a divisibility chain; {} does not divide {}",
                    d,
                    orders[i + 1]
                )));
            }
        }
        for (i, q) in q_gen.iter().enumerate() {
            let d = BigInt::from(orders[i].clone());
            let two_d = &d * 2;
            let rem: BigInt = &two_d % BigInt::from(q.den().clone());
            if !rem.is_zero() {
                return Err(Error::InvalidModule(format!(
                    "q_gen[{i}] = {q} has denominator not dividing 2·d{i} = {two_d}"
                )));
            }
            if !q.scale(&(&d * &d)).is_zero() {
                return Err(Error::InvalidModule(format!(
                    "q_gen[{i}] = {q} is not well defined on Z/{d}"
                )));
            }
        }
        for (i, row) in b_upper.iter().enumerate() {
            if row.len() != k - 1 - i {
                return Err(Error::InvalidModule(format!(
                    "cross-term row {i} has length {}, expected {}",
                    row.len(),
                    k - 1 - i
                )));
            }
            for (t, bij) in row.iter().enumerate() {
                let j = i + 1 + t;
                let g = orders[i].gcd(&orders[j]);
                if !(&g % bij.den()).is_zero() {
                    return Err(Error::InvalidModule(format!(
                        "b_gen[{i}][{j}] = {bij} has denominator not dividing gcd(d{i}, d{j}) = {g}"
                    )));
                }
            }
        }
        let mut b_full = vec![vec![FracMod1::zero(); k]; k];
        for i in 0..k {
            b_full[i][i] = q_gen[i].double();
        }
        for (i, row) in b_upper.iter().enumerate() {
            for (t, bij) in row.iter().enumerate() {
                let j = i + 1 + t;
                b_full[i][j] = bij.clone();
                b_full[j][i] = bij.clone();
            }
        }
        Ok(FiniteQuadraticModule {
            orders,
            q_gen,
            b_full,
        })
    }

    pub fn trivial() -> Self {
        FiniteQuadraticModule {
            orders: Vec::new(),
            q_gen: Vec::new(),
            b_full: Vec::new(),
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.orders.is_empty()
    }

    pub fn num_generators(&self) -> usize {
        self.orders.len()
    }

    pub fn orders(&self) -> &[BigUint] {
        &self.orders
    }

    pub fn q_gen(&self) -> &[FracMod1] {
        &self.q_gen
    }

    /// Strictly upper-triangular cross terms, row-major.
    pub fn b_upper(&self) -> Vec<Vec<FracMod1>> {
        let k = self.num_generators();
        (0..k.saturating_sub(1))
            .map(|i| (i + 1..k).map(|j| self.b_full[i][j].clone()).collect())
            .collect()
    }

    /// b on a generator pair, including b(gᵢ,gᵢ) = 2·q_gen[i].
    pub fn b_pair(&self, i: usize, j: usize) -> &FracMod1 {
        &self.b_full[i][j]
    }

    /// Group order ∏ dᵢ.
    pub fn order(&self) -> BigUint {
        self.orders.iter().product()
    }

    /// Exponent of the group: the largest invariant factor.
    pub fn exponent(&self) -> BigUint {
        self.orders.last().cloned().unwrap_or_else(BigUint::one)
    }

    pub fn zero(&self) -> GroupElement {
        GroupElement {
            coeffs: vec![BigInt::zero(); self.num_generators()],
        }
    }

    /// Canonicalize coefficients mod dᵢ.
    pub fn element(&self, coeffs: Vec<BigInt>) -> GroupElement {
        assert_eq!(coeffs.len(), self.num_generators(), "coefficient count");
        GroupElement {
            coeffs: coeffs
                .into_iter()
                .zip(&self.orders)
                .map(|(c, d)| c.mod_floor(&BigInt::from(d.clone())))
                .collect(),
        }
    }

    pub fn element_i64(&self, coeffs: &[i64]) -> GroupElement {
        self.element(coeffs.iter().map(|&c| BigInt::from(c)).collect())
    }

    pub fn generator(&self, i: usize) -> GroupElement {
        let mut c = vec![BigInt::zero(); self.num_generators()];
        c[i] = BigInt::one();
        GroupElement { coeffs: c }
    }

    pub fn add(&self, x: &GroupElement, y: &GroupElement) -> GroupElement {
        self.element(
            x.coeffs
                .iter()
                .zip(&y.coeffs)
                .map(|(a, b)| a + b)
                .collect(),
        )
    }

    pub fn neg(&self, x: &GroupElement) -> GroupElement {
        self.element(x.coeffs.iter().map(|c| -c).collect())
    }

    pub fn scale_el(&self, n: &BigInt, x: &GroupElement) -> GroupElement {
        self.element(x.coeffs.iter().map(|c| c * n).collect())
    }

    /// Exact Q(x) from the generator values and cross terms.
    pub fn eval_q(&self, x: &GroupElement) -> FracMod1 {
        let mut acc = FracMod1::zero();
        for (i, ci) in x.coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            acc = &acc + &self.q_gen[i].scale(&(ci * ci));
            for (j, cj) in x.coeffs.iter().enumerate().skip(i + 1) {
                if cj.is_zero() {
                    continue;
                }
                acc = &acc + &self.b_full[i][j].scale(&(ci * cj));
            }
        }
        acc
    }

    /// Exact b(x,y); symmetric and bilinear.
    pub fn eval_b(&self, x: &GroupElement, y: &GroupElement) -> FracMod1 {
        let mut acc = FracMod1::zero();
        for (i, xi) in x.coeffs.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.coeffs.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                acc = &acc + &self.b_full[i][j].scale(&(xi * yj));
            }
        }
        acc
    }

    /// Exponent of the mutual braiding phase Ω(u,v) = exp(2πi·b(u,v)).
    pub fn omega_exponent(&self, u: &GroupElement, v: &GroupElement) -> FracMod1 {
        self.eval_b(u, v)
    }

    /// Least m ≥ 1 with m·x = 0.
    pub fn order_of(&self, x: &GroupElement) -> BigUint {
        let mut m = BigUint::one();
        for (c, d) in x.coeffs.iter().zip(&self.orders) {
            if !c.is_zero() {
                let c = c.to_biguint().expect("canonical coefficients nonnegative");
                m = m.lcm(&(d / c.gcd(d)));
            }
        }
        m
    }

    /// All elements in lexicographic order of canonical coefficients.
    /// Intended for guarded, small modules only.
    pub fn elements(&self) -> impl Iterator<Item = GroupElement> + '_ {
        let total = self
            .order()
            .to_u64()
            .expect("element enumeration requires a small module");
        let orders: Vec<u64> = self.orders.iter().map(|d| d.to_u64().unwrap()).collect();
        (0..total).map(move |mut idx| {
            let mut c = vec![BigInt::zero(); orders.len()];
            for i in (0..orders.len()).rev() {
                c[i] = BigInt::from(idx % orders[i]);
                idx /= orders[i];
            }
            GroupElement { coeffs: c }
        })
    }

    /// Orthogonal direct sum, re-normalized to invariant-factor form
    /// (generators of coprime orders recombined via the Smith form).
    pub fn direct_sum(&self, other: &Self) -> Self {
        let k1 = self.num_generators();
        let k2 = other.num_generators();
        let orders: Vec<BigUint> = self
            .orders
            .iter()
            .chain(&other.orders)
            .cloned()
            .collect();
        let q: Vec<FracMod1> = self.q_gen.iter().chain(&other.q_gen).cloned().collect();
        let mut b = vec![vec![FracMod1::zero(); k1 + k2]; k1 + k2];
        for i in 0..k1 {
            for j in 0..k1 {
                b[i][j] = self.b_full[i][j].clone();
            }
        }
        for i in 0..k2 {
            for j in 0..k2 {
                b[k1 + i][k1 + j] = other.b_full[i][j].clone();
            }
        }
        let raw = RawPresentation { orders, q, b };
        raw.normalize().0
    }

    /// The submodule of all elements of p-power order.
    pub fn primary_part(&self, p: &BigUint) -> Self {
        self.primary_part_with_lifts(p).0
    }

    /// Primary part together with lifts of its generators into this module.
    pub fn primary_part_with_lifts(&self, p: &BigUint) -> (Self, Vec<GroupElement>) {
        let mut gens = Vec::new();
        for (i, d) in self.orders.iter().enumerate() {
            let mut p_pow = BigUint::one();
            let mut rest = d.clone();
            while (&rest % p).is_zero() {
                rest /= p;
                p_pow *= p;
            }
            if !p_pow.is_one() {
                gens.push(self.scale_el(&BigInt::from(rest), &self.generator(i)));
            }
        }
        self.submodule(&gens)
    }

    /// Present the subgroup generated by the given elements as a standalone
    /// module in invariant-factor form, with Q and b restricted from this
    /// module. Also returns lifts of the new generators into this module.
    pub(crate) fn submodule(&self, gens: &[GroupElement]) -> (Self, Vec<GroupElement>) {
        let kp = self.num_generators();
        let m = gens.len();
        if m == 0 {
            return (Self::trivial(), Vec::new());
        }
        // relation lattice L = { n in Z^m : Σ nᵢ·gensᵢ = 0 }, found as the
        // kernel of [Y | diag(d)] projected to the first m coordinates
        let mut stacked = IMat::zero(kp, m + kp);
        for (j, g) in gens.iter().enumerate() {
            for i in 0..kp {
                stacked[(i, j)] = g.coeffs[i].clone();
            }
        }
        for i in 0..kp {
            stacked[(i, m + i)] = BigInt::from(self.orders[i].clone());
        }
        let kernel = intmat::kernel_basis(&stacked);
        let mut rel = IMat::zero(m, kernel.len());
        for (j, v) in kernel.iter().enumerate() {
            for i in 0..m {
                rel[(i, j)] = v[i].clone();
            }
        }
        let snf = intmat::smith_normal_form(&rel);
        let u_inv = snf.u.inverse_unimodular();
        let mut orders = Vec::new();
        let mut lifts = Vec::new();
        for j in 0..m {
            let d = if j < snf.d.rows.min(snf.d.cols) {
                snf.d[(j, j)].clone()
            } else {
                BigInt::zero()
            };
            debug_assert!(
                !d.is_zero(),
                "relation lattice must have full rank in a finite group"
            );
            if d.is_one() {
                continue;
            }
            // new generator j expressed in the parent: Σᵢ U⁻¹[i][j] · gensᵢ
            let mut acc = self.zero();
            for i in 0..m {
                let c = &u_inv[(i, j)];
                if !c.is_zero() {
                    acc = self.add(&acc, &self.scale_el(c, &gens[i]));
                }
            }
            orders.push(d.to_biguint().expect("positive invariant factor"));
            lifts.push(acc);
        }
        let q: Vec<FracMod1> = lifts.iter().map(|x| self.eval_q(x)).collect();
        let k = lifts.len();
        let mut b = vec![vec![FracMod1::zero(); k]; k];
        for i in 0..k {
            for j in 0..k {
                b[i][j] = self.eval_b(&lifts[i], &lifts[j]);
            }
        }
        let module = FiniteQuadraticModule {
            orders,
            q_gen: q,
            b_full: b,
        };
        debug_assert!(module.check_well_defined().is_ok());
        (module, lifts)
    }

    fn check_well_defined(&self) -> Result<()> {
        let clone = Self::new(
            self.orders.clone(),
            self.q_gen.clone(),
            self.b_upper(),
        )?;
        debug_assert_eq!(clone.b_full, self.b_full);
        Ok(())
    }

    /// True iff x ↦ b(x,·) has trivial kernel. Brute-force scan, guarded.
    pub fn is_nondegenerate(&self, guards: &Guards) -> Result<bool> {
        if self.is_trivial() {
            return Ok(true);
        }
        let dense = DenseForm::new(self, guards.max_module_order)?;
        Ok(!dense.has_radical())
    }

    /// Search for a Q-preserving group isomorphism to `other`. On success,
    /// returns the images of this module's generators in `other`.
    pub fn is_isomorphic(
        &self,
        other: &Self,
        guards: &Guards,
    ) -> Result<Option<Vec<GroupElement>>> {
        if self.orders != other.orders {
            return Ok(None);
        }
        if self.is_trivial() {
            return Ok(Some(Vec::new()));
        }
        let a = DenseForm::new(self, guards.max_module_order)?;
        let b = DenseForm::new(other, guards.max_module_order)?;
        match isomorphism_search(&a, &b) {
            None => Ok(None),
            Some(images) => Ok(Some(
                images
                    .into_iter()
                    .map(|c| other.element(c.into_iter().map(BigInt::from).collect()))
                    .collect(),
            )),
        }
    }

    /// Deterministic serialization key used to pick canonical representatives.
    pub fn serial_key(&self) -> String {
        let orders: Vec<String> = self.orders.iter().map(|d| d.to_string()).collect();
        let q: Vec<String> = self.q_gen.iter().map(|v| v.to_string()).collect();
        let b: Vec<String> = self
            .b_upper()
            .iter()
            .flat_map(|row| row.iter().map(|v| v.to_string()))
            .collect();
        format!("[{}];[{}];[{}]", orders.join(","), q.join(","), b.join(","))
    }

    /// Primes dividing the group order, ascending.
    pub fn primes(&self) -> Vec<BigUint> {
        let mut primes = Vec::new();
        for d in &self.orders {
            let mut n = d.clone();
            let mut p = BigUint::from(2u32);
            while &p * &p <= n {
                if (&n % &p).is_zero() {
                    if !primes.contains(&p) {
                        primes.push(p.clone());
                    }
                    while (&n % &p).is_zero() {
                        n /= &p;
                    }
                }
                p += 1u32;
            }
            if n > BigUint::one() && !primes.contains(&n) {
                primes.push(n);
            }
        }
        primes.sort();
        primes
    }
}

/// A not-yet-normalized presentation: orders need not form a chain.
pub(crate) struct RawPresentation {
    pub orders: Vec<BigUint>,
    pub q: Vec<FracMod1>,
    /// Full symmetric matrix with b[i][i] = 2·q[i].
    pub b: Vec<Vec<FracMod1>>,
}

impl RawPresentation {
    pub fn eval_q(&self, coeffs: &[BigInt]) -> FracMod1 {
        let mut acc = FracMod1::zero();
        for (i, ci) in coeffs.iter().enumerate() {
            if ci.is_zero() {
                continue;
            }
            acc = &acc + &self.q[i].scale(&(ci * ci));
            for (j, cj) in coeffs.iter().enumerate().skip(i + 1) {
                if cj.is_zero() {
                    continue;
                }
                acc = &acc + &self.b[i][j].scale(&(ci * cj));
            }
        }
        acc
    }

    pub fn eval_b(&self, x: &[BigInt], y: &[BigInt]) -> FracMod1 {
        let mut acc = FracMod1::zero();
        for (i, xi) in x.iter().enumerate() {
            if xi.is_zero() {
                continue;
            }
            for (j, yj) in y.iter().enumerate() {
                if yj.is_zero() {
                    continue;
                }
                acc = &acc + &self.b[i][j].scale(&(xi * yj));
            }
        }
        acc
    }

    /// Re-present in invariant-factor form. Returns the module and, for each
    /// new generator, its integer coordinates in the raw generators.
    pub fn normalize(&self) -> (FiniteQuadraticModule, Vec<Vec<BigInt>>) {
        let k = self.orders.len();
        if k == 0 {
            return (FiniteQuadraticModule::trivial(), Vec::new());
        }
        let mut rel = IMat::zero(k, k);
        for i in 0..k {
            rel[(i, i)] = BigInt::from(self.orders[i].clone());
        }
        let snf = intmat::smith_normal_form(&rel);
        let u_inv = snf.u.inverse_unimodular();
        let mut orders = Vec::new();
        let mut lifts: Vec<Vec<BigInt>> = Vec::new();
        for j in 0..k {
            let d = snf.d[(j, j)].clone();
            if d.is_one() {
                continue;
            }
            orders.push(d.to_biguint().expect("positive invariant factor"));
            lifts.push((0..k).map(|i| u_inv[(i, j)].clone()).collect());
        }
        let q: Vec<FracMod1> = lifts.iter().map(|x| self.eval_q(x)).collect();
        let kk = lifts.len();
        let mut b = vec![vec![FracMod1::zero(); kk]; kk];
        for i in 0..kk {
            for j in 0..kk {
                b[i][j] = self.eval_b(&lifts[i], &lifts[j]);
            }
        }
        (
            FiniteQuadraticModule {
                orders,
                q_gen: q,
                b_full: b,
            },
            lifts,
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f(n: i64, d: i64) -> FracMod1 {
        FracMod1::new(n, d).unwrap()
    }

    fn orders(v: &[u64]) -> Vec<BigUint> {
        v.iter().map(|&d| BigUint::from(d)).collect()
    }

    /// The A-block Z/2 with Q(g) = 1/4 (semion module).
    fn semion() -> FiniteQuadraticModule {
        FiniteQuadraticModule::new(orders(&[2]), vec![f(1, 4)], vec![]).unwrap()
    }

    fn a3(a: i64) -> FiniteQuadraticModule {
        FiniteQuadraticModule::new(orders(&[3]), vec![f(a, 3)], vec![]).unwrap()
    }

    /// (Z/2)² with Q((x,y)) = xy/2: the C-block at r = 1.
    fn c1() -> FiniteQuadraticModule {
        FiniteQuadraticModule::new(
            orders(&[2, 2]),
            vec![f(0, 1), f(0, 1)],
            vec![vec![f(1, 2)]],
        )
        .unwrap()
    }

    #[test]
    fn construction_validates() {
        assert!(FiniteQuadraticModule::new(orders(&[2]), vec![f(1, 3)], vec![]).is_err());
        assert!(FiniteQuadraticModule::new(orders(&[3, 2]), vec![f(1, 3), f(1, 4)], vec![vec![f(0, 1)]]).is_err());
        // cross term with too large a denominator
        assert!(FiniteQuadraticModule::new(
            orders(&[2, 4]),
            vec![f(1, 4), f(1, 8)],
            vec![vec![f(1, 4)]],
        )
        .is_err());
        // odd order: q must have denominator dividing d, not 2d
        assert!(FiniteQuadraticModule::new(orders(&[3]), vec![f(1, 6)], vec![]).is_err());
    }

    #[test]
    fn eval_q_examples() {
        let m = semion();
        assert_eq!(m.eval_q(&m.element_i64(&[1])), f(1, 4));
        assert_eq!(m.eval_q(&m.zero()), FracMod1::zero());
        let c = c1();
        assert_eq!(c.eval_q(&c.element_i64(&[1, 1])), f(1, 2));
        assert_eq!(c.eval_q(&c.element_i64(&[1, 0])), f(0, 1));
    }

    #[test]
    fn eval_b_examples() {
        let m = a3(1);
        let g = m.generator(0);
        assert_eq!(m.eval_b(&g, &m.zero()), FracMod1::zero());
        assert_eq!(m.eval_b(&g, &g), f(2, 3));
        let c = c1();
        assert_eq!(
            c.eval_b(&c.element_i64(&[1, 0]), &c.element_i64(&[0, 1])),
            f(1, 2)
        );
        assert_eq!(
            c.omega_exponent(&c.element_i64(&[1, 0]), &c.element_i64(&[0, 1])),
            f(1, 2)
        );
    }

    #[test]
    fn polarization_identity() {
        // b(x,y) = Q(x+y) - Q(x) - Q(y), re-derived from eval_q
        let m = FiniteQuadraticModule::new(
            orders(&[2, 4]),
            vec![f(1, 4), f(3, 8)],
            vec![vec![f(1, 2)]],
        )
        .unwrap();
        for x in m.elements() {
            for y in m.elements() {
                let lhs = m.eval_b(&x, &y);
                let rhs = &(&m.eval_q(&m.add(&x, &y)) - &m.eval_q(&x)) - &m.eval_q(&y);
                assert_eq!(lhs, rhs);
                assert_eq!(m.eval_b(&x, &x), m.eval_q(&x).double());
            }
        }
    }

    #[test]
    fn order_of_elements() {
        let m = FiniteQuadraticModule::new(
            orders(&[2, 6]),
            vec![f(1, 4), f(1, 12)],
            vec![vec![f(0, 1)]],
        )
        .unwrap();
        assert_eq!(m.order_of(&m.zero()), BigUint::from(1u32));
        assert_eq!(m.order_of(&m.element_i64(&[1, 3])), BigUint::from(2u32));
        let z4 = FiniteQuadraticModule::new(orders(&[4]), vec![f(1, 8)], vec![]).unwrap();
        assert_eq!(z4.order_of(&z4.element_i64(&[2])), BigUint::from(2u32));
    }

    #[test]
    fn direct_sum_crt_recombination() {
        let m = semion().direct_sum(&a3(1));
        assert_eq!(m.orders(), &orders(&[6]));
        assert_eq!(m.eval_q(&m.generator(0)), f(7, 12));
        // unit of the sum
        let m2 = m.direct_sum(&FiniteQuadraticModule::trivial());
        assert_eq!(m2.orders(), m.orders());
        assert_eq!(m2.q_gen(), m.q_gen());
        // same-prime sum keeps two generators
        let m3 = semion().direct_sum(&semion());
        assert_eq!(m3.orders(), &orders(&[2, 2]));
        assert_eq!(m3.q_gen(), &[f(1, 4), f(1, 4)]);
        assert_eq!(m3.b_upper(), vec![vec![f(0, 1)]]);
        // orders multiply
        assert_eq!(m.order(), BigUint::from(6u32));
    }

    #[test]
    fn primary_parts() {
        let m = semion().direct_sum(&a3(1));
        let two = m.primary_part(&BigUint::from(2u32));
        assert_eq!(two.orders(), &orders(&[2]));
        assert_eq!(two.q_gen(), &[f(1, 4)]);
        let three = m.primary_part(&BigUint::from(3u32));
        assert_eq!(three.orders(), &orders(&[3]));
        assert_eq!(three.q_gen(), &[f(1, 3)]);
        let five = m.primary_part(&BigUint::from(5u32));
        assert!(five.is_trivial());
        let p3 = a3(1).primary_part(&BigUint::from(3u32));
        assert_eq!(p3.orders(), a3(1).orders());
        assert_eq!(p3.q_gen(), a3(1).q_gen());
        // parts of distinct primes are b-orthogonal
        let (_, lifts2) = m.primary_part_with_lifts(&BigUint::from(2u32));
        let (_, lifts3) = m.primary_part_with_lifts(&BigUint::from(3u32));
        for x in &lifts2 {
            for y in &lifts3 {
                assert!(m.eval_b(x, y).is_zero());
            }
        }
    }

    #[test]
    fn nondegeneracy() {
        let guards = Guards::default();
        assert!(semion().is_nondegenerate(&guards).unwrap());
        assert!(FiniteQuadraticModule::trivial()
            .is_nondegenerate(&guards)
            .unwrap());
        // Q(g) = 1/2 on Z/2 gives b(g,g) = 0: degenerate
        let deg = FiniteQuadraticModule::new(orders(&[2]), vec![f(1, 2)], vec![]).unwrap();
        assert!(!deg.is_nondegenerate(&guards).unwrap());
        // guard trips
        let tiny = Guards {
            max_module_order: 1,
            ..Guards::default()
        };
        assert!(matches!(
            semion().is_nondegenerate(&tiny),
            Err(Error::SizeGuardExceeded { .. })
        ));
    }

    #[test]
    fn isomorphism_basics() {
        let guards = Guards::default();
        // A³₂ vs A⁷₂: q = 3/4 both (a only matters mod 2^{r+1})
        let m1 = FiniteQuadraticModule::new(orders(&[2]), vec![f(3, 4)], vec![]).unwrap();
        let m2 = FiniteQuadraticModule::new(orders(&[2]), vec![f(7, 4)], vec![]).unwrap();
        assert!(m1.is_isomorphic(&m2, &guards).unwrap().is_some());
        // A¹₃ vs A²₃ are distinct
        assert!(a3(1).is_isomorphic(&a3(2), &guards).unwrap().is_none());
        // reflexivity with identity-like witness
        let w = c1().is_isomorphic(&c1(), &guards).unwrap().unwrap();
        assert_eq!(w.len(), 2);
        // witness transports Q
        let m = semion().direct_sum(&a3(2));
        let w = m.is_isomorphic(&m, &guards).unwrap().unwrap();
        for (i, img) in w.iter().enumerate() {
            assert_eq!(m.eval_q(img), m.eval_q(&m.generator(i)));
        }
    }

    #[test]
    fn isomorphism_transports_q_everywhere() {
        let guards = Guards::default();
        // two presentations of the same module: swap the two generators of C-block
        let m1 = FiniteQuadraticModule::new(
            orders(&[2, 2]),
            vec![f(1, 4), f(1, 4)],
            vec![vec![f(1, 2)]],
        )
        .unwrap();
        let m2 = FiniteQuadraticModule::new(
            orders(&[2, 2]),
            vec![f(1, 4), f(1, 4)],
            vec![vec![f(1, 2)]],
        )
        .unwrap();
        let w = m1.is_isomorphic(&m2, &guards).unwrap().unwrap();
        for x in m1.elements() {
            let img = x
                .coeffs
                .iter()
                .zip(&w)
                .fold(m2.zero(), |acc, (c, g)| m2.add(&acc, &m2.scale_el(c, g)));
            assert_eq!(m1.eval_q(&x), m2.eval_q(&img));
        }
    }
}
