//! Even integral lattice presentations as symmetric integer matrices.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::intmat::{self, IMat};

/// A validated Gram matrix: symmetric, even diagonal, nonzero determinant.
/// The rank-0 matrix is legal and acts as the unit of the direct sum.
#[derive(Clone, PartialEq, Eq)]
pub struct GramMatrix {
    mat: IMat,
}

impl std::fmt::Debug for GramMatrix {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "GramMatrix{:?}", self.mat)
    }
}

/// `U · K · V = D` with `U`, `V` unimodular and `D` the Smith form.
pub struct SnfResult {
    pub u: IMat,
    pub d: IMat,
    pub v: IMat,
}

impl GramMatrix {
    /// Validate a raw square integer matrix as an even lattice presentation.
    pub fn new(rows: Vec<Vec<BigInt>>) -> Result<Self> {
        let n = rows.len();
        for row in &rows {
            if row.len() != n {
                return Err(Error::NotSquare);
            }
        }
        let mat = IMat::from_rows(rows);
        for i in 0..n {
            for j in i + 1..n {
                if mat[(i, j)] != mat[(j, i)] {
                    return Err(Error::NotSymmetric(i, j));
                }
            }
        }
        for i in 0..n {
            if mat[(i, i)].is_odd() {
                return Err(Error::OddDiagonal(i));
            }
        }
        if n > 0 && mat.determinant().is_zero() {
            return Err(Error::Singular);
        }
        Ok(GramMatrix { mat })
    }

    pub fn from_i64(rows: &[&[i64]]) -> Result<Self> {
        Self::new(
            rows.iter()
                .map(|r| r.iter().map(|&x| BigInt::from(x)).collect())
                .collect(),
        )
    }

    /// The rank-0 presentation of the trivial lattice.
    pub fn empty() -> Self {
        GramMatrix {
            mat: IMat::zero(0, 0),
        }
    }

    pub fn rank(&self) -> usize {
        self.mat.rows
    }

    pub fn entry(&self, i: usize, j: usize) -> &BigInt {
        &self.mat[(i, j)]
    }

    pub fn matrix(&self) -> &IMat {
        &self.mat
    }

    pub fn to_rows(&self) -> Vec<Vec<BigInt>> {
        self.mat.to_rows()
    }

    /// Exact signed determinant; 1 for the empty matrix.
    pub fn determinant(&self) -> BigInt {
        self.mat.determinant()
    }

    /// Counts of positive and negative eigenvalues, computed by exact
    /// symmetric congruence reduction over the rationals. When the remaining
    /// diagonal is all zero, the basis change x -> x + y on a pair with a
    /// nonzero off-diagonal entry exposes a pivot.
    pub fn signature(&self) -> (usize, usize) {
        let n = self.rank();
        // work on numerators only: congruence by diagonal scaling keeps signs
        let mut a: Vec<Vec<BigInt>> = self.mat.to_rows();
        let mut pos = 0usize;
        let mut neg = 0usize;
        for k in 0..n {
            if a[k][k].is_zero() {
                // symmetric pivoting: bring a nonzero diagonal entry to (k,k)
                if let Some(i) = (k + 1..n).find(|&i| !a[i][i].is_zero()) {
                    a.swap(k, i);
                    for row in a.iter_mut() {
                        row.swap(k, i);
                    }
                } else {
                    // all remaining diagonal zero; find off-diagonal pivot
                    let mut pivot = None;
                    'outer: for i in k..n {
                        for j in i + 1..n {
                            if !a[i][j].is_zero() {
                                pivot = Some((i, j));
                                break 'outer;
                            }
                        }
                    }
                    let Some((i, j)) = pivot else { break };
                    // x_i -> x_i + x_j makes a[i][i] = 2 a[i][j] != 0
                    for t in 0..n {
                        let add = a[t][j].clone();
                        a[t][i] += add;
                    }
                    for t in 0..n {
                        let add = a[j][t].clone();
                        a[i][t] += add;
                    }
                    if i != k {
                        a.swap(k, i);
                        for row in a.iter_mut() {
                            row.swap(k, i);
                        }
                    }
                }
            }
            let d = a[k][k].clone();
            if d.is_zero() {
                break;
            }
            if d.is_positive() {
                pos += 1;
            } else {
                neg += 1;
            }
            // eliminate row/col k: row_i -> d*row_i - a[i][k]*row_k (and the
            // symmetric column op); scaling by d multiplies the remaining
            // diagonal by d^2 > 0, so eigenvalue signs are preserved
            for i in k + 1..n {
                let f = a[i][k].clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = &a[i][j] * &d - &f * &a[k][j];
                    a[i][j] = t;
                }
            }
            for i in k + 1..n {
                let f = a[k][i].clone();
                if f.is_zero() {
                    continue;
                }
                for j in k..n {
                    let t = &a[j][i] * &d - &f * &a[j][k];
                    a[j][i] = t;
                }
            }
        }
        debug_assert_eq!(pos + neg, n, "nondegenerate matrix must diagonalize fully");
        (pos, neg)
    }

    /// Smith normal form with transforms; `U·K·V = D` is re-checked exactly.
    pub fn smith_normal_form(&self) -> SnfResult {
        let snf = intmat::smith_normal_form(&self.mat);
        debug_assert_eq!(snf.u.mul(&self.mat).mul(&snf.v), snf.d);
        debug_assert!(snf.u.determinant().abs().is_one());
        debug_assert!(snf.v.determinant().abs().is_one());
        SnfResult {
            u: snf.u,
            d: snf.d,
            v: snf.v,
        }
    }

    /// Block-diagonal direct sum.
    pub fn direct_sum(&self, other: &GramMatrix) -> GramMatrix {
        let n1 = self.rank();
        let n2 = other.rank();
        let mut m = IMat::zero(n1 + n2, n1 + n2);
        for i in 0..n1 {
            for j in 0..n1 {
                m[(i, j)] = self.mat[(i, j)].clone();
            }
        }
        for i in 0..n2 {
            for j in 0..n2 {
                m[(n1 + i, n1 + j)] = other.mat[(i, j)].clone();
            }
        }
        GramMatrix { mat: m }
    }

    pub fn negated(&self) -> GramMatrix {
        let rows = self
            .mat
            .to_rows()
            .into_iter()
            .map(|r| r.into_iter().map(|x| -x).collect())
            .collect();
        GramMatrix {
            mat: IMat::from_rows(rows),
        }
    }
}

/// Gram matrix of the E8 root lattice (standard root basis), used in tests
/// and as a convenient unimodular summand.
pub fn e8_gram() -> GramMatrix {
    GramMatrix::from_i64(&[
        &[2, -1, 0, 0, 0, 0, 0, 0],
        &[-1, 2, -1, 0, 0, 0, 0, 0],
        &[0, -1, 2, -1, 0, 0, 0, -1],
        &[0, 0, -1, 2, -1, 0, 0, 0],
        &[0, 0, 0, -1, 2, -1, 0, 0],
        &[0, 0, 0, 0, -1, 2, -1, 0],
        &[0, 0, 0, 0, 0, -1, 2, 0],
        &[0, 0, -1, 0, 0, 0, 0, 2],
    ])
    .expect("E8 Gram matrix is valid")
}

/// The rank-2 even unimodular hyperbolic plane.
pub fn hyperbolic_plane() -> GramMatrix {
    GramMatrix::from_i64(&[&[0, 1], &[1, 0]]).expect("U is valid")
}
