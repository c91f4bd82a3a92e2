//! Dense matrices over the integers with exact algorithms: fraction-free
//! determinants, adjugates, and Smith normal form with accumulated
//! unimodular transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// Row-major dense integer matrix.
#[derive(Clone, PartialEq, Eq)]
pub struct IMat {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl std::fmt::Debug for IMat {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        writeln!(f, "IMat {}x{} [", self.rows, self.cols)?;
        for i in 0..self.rows {
            let row: Vec<String> = (0..self.cols).map(|j| self[(i, j)].to_string()).collect();
            writeln!(f, "  [{}]", row.join(", "))?;
        }
        write!(f, "]")
    }
}

impl std::ops::Index<(usize, usize)> for IMat {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for IMat {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

impl IMat {
    pub fn zero(rows: usize, cols: usize) -> Self {
        IMat {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zero(n, n);
        for i in 0..n {
            m[(i, i)] = BigInt::one();
        }
        m
    }

    pub fn from_rows(rows: Vec<Vec<BigInt>>) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |row| row.len());
        assert!(rows.iter().all(|row| row.len() == c));
        IMat {
            rows: r,
            cols: c,
            data: rows.into_iter().flatten().collect(),
        }
    }

    pub fn from_i64(rows: &[&[i64]]) -> Self {
        Self::from_rows(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)].clone()).collect())
            .collect()
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn transpose(&self) -> IMat {
        let mut t = IMat::zero(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t[(j, i)] = self[(i, j)].clone();
            }
        }
        t
    }

    pub fn mul(&self, other: &IMat) -> IMat {
        assert_eq!(self.cols, other.rows);
        let mut out = IMat::zero(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self[(i, k)];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let prod = a * &other[(k, j)];
                    out[(i, j)] += prod;
                }
            }
        }
        out
    }

    /// Fraction-free Bareiss determinant. Panics if not square.
    pub fn determinant(&self) -> BigInt {
        assert!(self.is_square());
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut m = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if m[(k, k)].is_zero() {
                // pivot search below row k
                let mut found = None;
                for i in k + 1..n {
                    if !m[(i, k)].is_zero() {
                        found = Some(i);
                        break;
                    }
                }
                match found {
                    Some(i) => {
                        for j in 0..n {
                            let a = m[(k, j)].clone();
                            m[(k, j)] = m[(i, j)].clone();
                            m[(i, j)] = a;
                        }
                        sign = -sign;
                    }
                    None => return BigInt::zero(),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let num = &m[(i, j)] * &m[(k, k)] - &m[(i, k)] * &m[(k, j)];
                    let (q, r) = num.div_rem(&prev);
                    debug_assert!(r.is_zero());
                    m[(i, j)] = q;
                }
                m[(i, k)] = BigInt::zero();
            }
            prev = m[(k, k)].clone();
        }
        sign * m[(n - 1, n - 1)].clone()
    }

    /// Adjugate via cofactors: `self · adj = det · I`.
    pub fn adjugate(&self) -> IMat {
        assert!(self.is_square());
        let n = self.rows;
        let mut adj = IMat::zero(n, n);
        for i in 0..n {
            for j in 0..n {
                let minor = self.minor(i, j).determinant();
                let sign = if (i + j) % 2 == 0 { 1 } else { -1 };
                adj[(j, i)] = minor * BigInt::from(sign);
            }
        }
        adj
    }

    fn minor(&self, row: usize, col: usize) -> IMat {
        let mut m = IMat::zero(self.rows - 1, self.cols - 1);
        let mut ii = 0;
        for i in 0..self.rows {
            if i == row {
                continue;
            }
            let mut jj = 0;
            for j in 0..self.cols {
                if j == col {
                    continue;
                }
                m[(ii, jj)] = self[(i, j)].clone();
                jj += 1;
            }
            ii += 1;
        }
        m
    }

    /// Inverse of a unimodular matrix (|det| = 1).
    pub fn inverse_unimodular(&self) -> IMat {
        let det = self.determinant();
        let adj = self.adjugate();
        assert!(det.abs().is_one(), "matrix is not unimodular");
        if det.is_one() {
            adj
        } else {
            let mut neg = adj;
            for x in neg.data.iter_mut() {
                *x = -std::mem::take(x);
            }
            neg
        }
    }

    pub fn is_identity(&self) -> bool {
        self.is_square() && *self == IMat::identity(self.rows)
    }
}

/// Smith normal form `U · A · V = D` with `U`, `V` unimodular and `D`
/// diagonal, nonnegative, with `d_1 | d_2 | …`.
pub struct Snf {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

pub fn smith_normal_form(a: &IMat) -> Snf {
    let mut d = a.clone();
    let mut u = IMat::identity(a.rows);
    let mut v = IMat::identity(a.cols);
    let t_max = a.rows.min(a.cols);

    for t in 0..t_max {
        loop {
            // smallest nonzero pivot in the trailing submatrix
            let mut pivot: Option<(usize, usize)> = None;
            for i in t..d.rows {
                for j in t..d.cols {
                    if d[(i, j)].is_zero() {
                        continue;
                    }
                    match &pivot {
                        Some((pi, pj)) if d[(*pi, *pj)].abs() <= d[(i, j)].abs() => {}
                        _ => pivot = Some((i, j)),
                    }
                }
            }
            let Some((pi, pj)) = pivot else {
                // trailing block is zero; done
                make_positive_and_chain(&mut d, &mut u, &mut v, t);
                return Snf { u, d, v };
            };
            swap_rows(&mut d, &mut u, t, pi);
            swap_cols(&mut d, &mut v, t, pj);

            let mut clean = true;
            for i in t + 1..d.rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let q = div_nearest(&d[(i, t)], &d[(t, t)]);
                if !q.is_zero() {
                    row_sub(&mut d, &mut u, i, t, &q);
                }
                if !d[(i, t)].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..d.cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let q = div_nearest(&d[(t, j)], &d[(t, t)]);
                if !q.is_zero() {
                    col_sub(&mut d, &mut v, j, t, &q);
                }
                if !d[(t, j)].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                continue;
            }
            // pivot divides everything it must; check divisibility of the rest
            let mut fixed = true;
            'scan: for i in t + 1..d.rows {
                for j in t + 1..d.cols {
                    if !(&d[(i, j)] % &d[(t, t)]).is_zero() {
                        // fold row i into row t to force a smaller pivot
                        let one = BigInt::from(-1);
                        row_sub(&mut d, &mut u, t, i, &one);
                        fixed = false;
                        break 'scan;
                    }
                }
            }
            if fixed {
                break;
            }
        }
    }
    make_positive_and_chain(&mut d, &mut u, &mut v, t_max);
    Snf { u, d, v }
}

fn make_positive_and_chain(d: &mut IMat, u: &mut IMat, _v: &mut IMat, upto: usize) {
    for t in 0..upto.min(d.rows).min(d.cols) {
        if d[(t, t)].is_negative() {
            for j in 0..d.cols {
                d[(t, j)] = -std::mem::take(&mut d[(t, j)]);
            }
            for j in 0..u.cols {
                u[(t, j)] = -std::mem::take(&mut u[(t, j)]);
            }
        }
    }
}

fn swap_rows(d: &mut IMat, u: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for j in 0..d.cols {
        let t = d[(a, j)].clone();
        d[(a, j)] = d[(b, j)].clone();
        d[(b, j)] = t;
    }
    for j in 0..u.cols {
        let t = u[(a, j)].clone();
        u[(a, j)] = u[(b, j)].clone();
        u[(b, j)] = t;
    }
}

fn swap_cols(d: &mut IMat, v: &mut IMat, a: usize, b: usize) {
    if a == b {
        return;
    }
    for i in 0..d.rows {
        let t = d[(i, a)].clone();
        d[(i, a)] = d[(i, b)].clone();
        d[(i, b)] = t;
    }
    for i in 0..v.rows {
        let t = v[(i, a)].clone();
        v[(i, a)] = v[(i, b)].clone();
        v[(i, b)] = t;
    }
}

/// row_i -= q * row_k, mirrored on U.
fn row_sub(d: &mut IMat, u: &mut IMat, i: usize, k: usize, q: &BigInt) {
    for j in 0..d.cols {
        let delta = q * &d[(k, j)];
        d[(i, j)] -= delta;
    }
    for j in 0..u.cols {
        let delta = q * &u[(k, j)];
        u[(i, j)] -= delta;
    }
}

/// col_j -= q * col_k, mirrored on V.
fn col_sub(d: &mut IMat, v: &mut IMat, j: usize, k: usize, q: &BigInt) {
    for i in 0..d.rows {
        let delta = q * &d[(i, k)];
        d[(i, j)] -= delta;
    }
    for i in 0..v.rows {
        let delta = q * &v[(i, k)];
        v[(i, j)] -= delta;
    }
}

/// Round-to-nearest quotient, so remainders shrink fast.
fn div_nearest(a: &BigInt, b: &BigInt) -> BigInt {
    let (mut q, r) = a.div_rem(b);
    let two_r = r.abs() * BigInt::from(2);
    if two_r > b.abs() {
        if (a.is_negative()) != (b.is_negative()) {
            q -= 1;
        } else {
            q += 1;
        }
    }
    q
}

/// Basis for the integer kernel of `a`, as columns.
pub fn kernel_basis(a: &IMat) -> Vec<Vec<BigInt>> {
    let snf = smith_normal_form(a);
    let rank = (0..a.rows.min(a.cols))
        .take_while(|&i| !snf.d[(i, i)].is_zero())
        .count();
    (rank..a.cols)
        .map(|j| (0..a.cols).map(|i| snf.v[(i, j)].clone()).collect())
        .collect()
}
