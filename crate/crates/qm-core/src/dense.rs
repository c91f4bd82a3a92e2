//! Machine-integer fast path for element scans over a finite quadratic
//! module. All form values are held as numerators modulo a shared
//! denominator `D = 2 * exponent`, so Q and b evaluations are u64 modular
//! arithmetic. Built only for modules whose order passes the size guard.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, ToPrimitive};

use crate::error::{Error, Result};
use crate::fqm::FiniteQuadraticModule;
use crate::intmat::{self, IMat};

pub(crate) struct DenseForm {
    pub orders: Vec<u64>,
    pub total: u64,
    /// Common denominator for all Q and b values.
    pub modulus: u64,
    /// Scaled numerators of Q on generators.
    pub q: Vec<u64>,
    /// Full symmetric scaled bilinear matrix; b[i][i] = 2 q[i] mod modulus.
    pub b: Vec<Vec<u64>>,
}

fn mulmod(a: u64, b: u64, m: u64) -> u64 {
    ((a as u128 * b as u128) % m as u128) as u64
}

impl DenseForm {
    pub fn new(m: &FiniteQuadraticModule, limit: u64) -> Result<DenseForm> {
        let order = m.order();
        let total = match u64::try_from(&order) {
            Ok(n) if n <= limit => n,
            _ => {
                return Err(Error::SizeGuardExceeded {
                    order: order.to_string(),
                    limit,
                })
            }
        };
        let orders: Vec<u64> = m
            .orders()
            .iter()
            .map(|d| d.to_u64().expect("invariant factor fits u64 when total does"))
            .collect();
        let modulus = 2 * orders.last().copied().unwrap_or(1);
        let scale = |f: &crate::exact::FracMod1| -> u64 {
            let den = f.den().to_u64().expect("denominator divides modulus");
            debug_assert_eq!(modulus % den, 0);
            let num = f.num().to_u64().expect("numerator below denominator");
            num * (modulus / den) % modulus
        };
        let k = m.num_generators();
        let q: Vec<u64> = m.q_gen().iter().map(&scale).collect();
        let mut b = vec![vec![0u64; k]; k];
        for i in 0..k {
            for j in 0..k {
                b[i][j] = scale(m.b_pair(i, j));
            }
        }
        Ok(DenseForm {
            orders,
            total,
            modulus,
            q,
            b,
        })
    }

    pub fn k(&self) -> usize {
        self.orders.len()
    }

    /// Decode an index into coordinates, first coordinate most significant,
    /// so index order is lexicographic order on canonical coefficients.
    pub fn coords_of(&self, mut idx: u64) -> Vec<u64> {
        let k = self.k();
        let mut c = vec![0u64; k];
        for i in (0..k).rev() {
            c[i] = idx % self.orders[i];
            idx /= self.orders[i];
        }
        c
    }

    pub fn index_of(&self, coords: &[u64]) -> u64 {
        let mut idx = 0u64;
        for (c, d) in coords.iter().zip(&self.orders) {
            idx = idx * d + (c % d);
        }
        idx
    }

    /// Scaled numerator of Q(x) modulo `modulus`.
    pub fn q_of(&self, coords: &[u64]) -> u64 {
        let m = self.modulus;
        let mut acc = 0u64;
        for (i, &ci) in coords.iter().enumerate() {
            let ci = ci % m;
            acc = (acc + mulmod(mulmod(ci, ci, m), self.q[i], m)) % m;
            for (j, &cj) in coords.iter().enumerate().skip(i + 1) {
                acc = (acc + mulmod(mulmod(ci, cj % m, m), self.b[i][j], m)) % m;
            }
        }
        acc
    }

    /// Scaled numerator of b(x, y) modulo `modulus`.
    pub fn b_of(&self, x: &[u64], y: &[u64]) -> u64 {
        let m = self.modulus;
        let mut acc = 0u64;
        for (i, &xi) in x.iter().enumerate() {
            if xi == 0 {
                continue;
            }
            let xi = xi % m;
            for (j, &yj) in y.iter().enumerate() {
                if yj == 0 {
                    continue;
                }
                acc = (acc + mulmod(mulmod(xi, yj % m, m), self.b[i][j], m)) % m;
            }
        }
        acc
    }

    pub fn order_of(&self, coords: &[u64]) -> u64 {
        let mut m = 1u64;
        for (&c, &d) in coords.iter().zip(&self.orders) {
            if c != 0 {
                m = m.lcm(&(d / c.gcd(&d)));
            }
        }
        m
    }

    /// Q numerators for every element, indexed by element index.
    pub fn q_table(&self) -> Vec<u64> {
        (0..self.total)
            .map(|idx| self.q_of(&self.coords_of(idx)))
            .collect()
    }

    /// True iff some nonzero element pairs to zero with every generator.
    pub fn has_radical(&self) -> bool {
        let k = self.k();
        let gens: Vec<Vec<u64>> = (0..k)
            .map(|i| {
                let mut g = vec![0u64; k];
                g[i] = 1;
                g
            })
            .collect();
        for idx in 1..self.total {
            let x = self.coords_of(idx);
            if gens.iter().all(|g| self.b_of(&x, g) == 0) {
                return true;
            }
        }
        false
    }

    /// Multiset of (element order, scaled Q value), sorted.
    pub fn order_q_multiset(&self) -> Vec<(u64, u64)> {
        let mut v: Vec<(u64, u64)> = (0..self.total)
            .map(|idx| {
                let c = self.coords_of(idx);
                (self.order_of(&c), self.q_of(&c))
            })
            .collect();
        v.sort_unstable();
        v
    }
}

/// Backtracking search for a Q-preserving group isomorphism `a -> b`,
/// returning generator images in `b` coordinates. Requires equal invariant
/// factors (hence equal moduli). Deterministic: images are scanned in
/// lexicographic order.
pub(crate) fn isomorphism_search(a: &DenseForm, b: &DenseForm) -> Option<Vec<Vec<u64>>> {
    debug_assert_eq!(a.orders, b.orders);
    let k = a.k();
    if k == 0 {
        return Some(Vec::new());
    }
    if a.order_q_multiset() != b.order_q_multiset() {
        return None;
    }
    let q_table = b.q_table();
    // assign images for generators in decreasing order of invariant factor
    let mut images: Vec<Vec<u64>> = Vec::with_capacity(k);
    let levels: Vec<usize> = (0..k).rev().collect();
    if assign(a, b, &q_table, &levels, 0, &mut images) {
        // images were pushed for generators k-1, k-2, ..., 0; restore order
        images.reverse();
        Some(images)
    } else {
        None
    }
}

fn assign(
    a: &DenseForm,
    b: &DenseForm,
    q_table: &[u64],
    levels: &[usize],
    depth: usize,
    images: &mut Vec<Vec<u64>>,
) -> bool {
    if depth == levels.len() {
        return spans_whole_group(b, images);
    }
    let gen = levels[depth];
    let d = a.orders[gen];
    // candidates form the subgroup annihilated by d: coordinate j runs over
    // multiples of orders[j] / gcd(orders[j], d)
    let steps: Vec<u64> = b.orders.iter().map(|&o| o / o.gcd(&d)).collect();
    let counts: Vec<u64> = b.orders.iter().map(|&o| o.gcd(&d)).collect();
    let k = b.k();
    let mut counter = vec![0u64; k];
    loop {
        let cand: Vec<u64> = counter
            .iter()
            .zip(&steps)
            .map(|(&c, &s)| c * s)
            .collect();
        let idx = b.index_of(&cand);
        if q_table[idx as usize] == a.q[gen]
            && images
                .iter()
                .enumerate()
                .all(|(d2, img)| b.b_of(&cand, img) == a.b[gen][levels[d2]])
        {
            images.push(cand);
            if assign(a, b, q_table, levels, depth + 1, images) {
                return true;
            }
            images.pop();
        }
        // mixed-radix increment, last coordinate fastest (lexicographic)
        let mut i = k;
        loop {
            if i == 0 {
                return false;
            }
            i -= 1;
            counter[i] += 1;
            if counter[i] < counts[i] {
                break;
            }
            counter[i] = 0;
        }
    }
}

/// Do the images generate all of `b`? Checked exactly by a Smith form of the
/// image matrix stacked with the order relations.
fn spans_whole_group(b: &DenseForm, images: &[Vec<u64>]) -> bool {
    let k = b.k();
    let cols = images.len() + k;
    let mut m = IMat::zero(k, cols);
    for (j, img) in images.iter().enumerate() {
        for i in 0..k {
            m[(i, j)] = BigInt::from(img[i]);
        }
    }
    for i in 0..k {
        m[(i, images.len() + i)] = BigInt::from(b.orders[i]);
    }
    let snf = intmat::smith_normal_form(&m);
    (0..k).all(|i| snf.d[(i, i)].is_one())
}
