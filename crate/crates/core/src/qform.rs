//! Exact linear algebra on symmetric integer matrices.
//!
//! Everything here is exact: classification uses a symmetric elimination over
//! a [`Field`] with diagonal pivoting, kernels are computed by reduced row
//! echelon form, and the determinant routines are fraction-free (Bareiss) over
//! integers. The determinant side is deliberately a separate code path so it
//! can serve as a cross-check of the elimination side.

// elimination updates one row from another, so index loops are the clear form
#![allow(clippy::needless_range_loop)]

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{CheckedMul, CheckedSub, Signed, Zero};
use thiserror::Error;

use crate::scalar::{Field, RationalField};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QformError {
    #[error("matrix rows have inconsistent lengths (expected {expected}, row {row} has {found})")]
    NotSquare { expected: usize, row: usize, found: usize },
    #[error("matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("matrix must have positive dimension")]
    Empty,
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("linear system is singular")]
    Singular,
    #[error("exhaustive minor check limited to dimension {limit}, got {dim}")]
    TooLarge { dim: usize, limit: usize },
}

/// Symmetric integer matrix, stored row-major.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct SymMatrix {
    dim: usize,
    entries: Vec<i64>,
}

impl SymMatrix {
    pub fn from_rows(rows: &[Vec<i64>]) -> Result<Self, QformError> {
        let dim = rows.len();
        if dim == 0 {
            return Err(QformError::Empty);
        }
        for (row, r) in rows.iter().enumerate() {
            if r.len() != dim {
                return Err(QformError::NotSquare {
                    expected: dim,
                    row,
                    found: r.len(),
                });
            }
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if rows[i][j] != rows[j][i] {
                    return Err(QformError::NotSymmetric(i, j));
                }
            }
        }
        Ok(Self {
            dim,
            entries: rows.iter().flatten().copied().collect(),
        })
    }

    /// Builds a matrix from a closure over the upper triangle, mirrored below.
    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> i64) -> Self {
        assert!(dim > 0, "matrix must have positive dimension");
        let mut entries = vec![0; dim * dim];
        for i in 0..dim {
            for j in i..dim {
                let v = f(i, j);
                entries[i * dim + j] = v;
                entries[j * dim + i] = v;
            }
        }
        Self { dim, entries }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn get(&self, i: usize, j: usize) -> i64 {
        self.entries[i * self.dim + j]
    }

    pub fn rows(&self) -> Vec<Vec<i64>> {
        self.entries.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    /// Principal submatrix on `support` (in the given order).
    pub fn submatrix(&self, support: &[usize]) -> Result<Self, QformError> {
        if support.is_empty() {
            return Err(QformError::Empty);
        }
        for &i in support {
            if i >= self.dim {
                return Err(QformError::IndexOutOfRange {
                    index: i,
                    dim: self.dim,
                });
            }
        }
        Ok(Self::from_fn(support.len(), |a, b| self.get(support[a], support[b])))
    }

    /// `PᵀMP` for the permutation sending position `i` to `perm[i]`.
    pub fn permuted(&self, perm: &[usize]) -> Result<Self, QformError> {
        if perm.len() != self.dim {
            return Err(QformError::DimensionMismatch {
                expected: self.dim,
                found: perm.len(),
            });
        }
        self.submatrix(perm)
    }

    /// `M·x` over any field.
    pub fn apply<T: Field>(&self, x: &[T]) -> Vec<T> {
        assert_eq!(x.len(), self.dim, "vector length must match matrix dimension");
        (0..self.dim)
            .map(|i| {
                x.iter().enumerate().fold(T::zero(), |acc, (j, xj)| {
                    let e = self.get(i, j);
                    if e == 0 {
                        acc
                    } else {
                        acc + T::from_small(e) * xj.clone()
                    }
                })
            })
            .collect()
    }

    /// The bilinear pairing `xᵀ M y`.
    pub fn pair<T: Field>(&self, x: &[T], y: &[T]) -> T {
        let my = self.apply(y);
        x.iter().zip(my).fold(T::zero(), |acc, (a, b)| acc + a.clone() * b)
    }

    /// Sum of all entries, i.e. `1ᵀ M 1`.
    pub fn total(&self) -> i64 {
        self.entries.iter().sum()
    }
}

impl fmt::Debug for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_list().entries(self.rows()).finish()
    }
}

impl fmt::Display for SymMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, row) in self.rows().iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
            write!(f, "[{}]", cells.join(", "))?;
        }
        write!(f, "]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum DefinitenessKind {
    NegativeDefinite,
    NegativeSemidefinite,
    Other,
}

impl DefinitenessKind {
    pub fn as_str(self) -> &'static str {
        match self {
            DefinitenessKind::NegativeDefinite => "negative_definite",
            DefinitenessKind::NegativeSemidefinite => "negative_semidefinite",
            DefinitenessKind::Other => "other",
        }
    }
}

impl fmt::Display for DefinitenessKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classification of a symmetric matrix, with a kernel basis when it is
/// negative semidefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct Definiteness<Q> {
    pub kind: DefinitenessKind,
    /// Primitive integral vectors spanning the kernel; empty unless
    /// `kind` is [`DefinitenessKind::NegativeSemidefinite`].
    pub kernel_basis: Vec<Vec<Q>>,
}

/// Classifies `m` exactly and, for the semidefinite case, returns a
/// normalized kernel basis.
pub fn definiteness<Q: RationalField>(m: &SymMatrix) -> Definiteness<Q> {
    let kind = classify::<Q>(m);
    let kernel_basis = if kind == DefinitenessKind::NegativeSemidefinite {
        kernel::<Q>(m)
    } else {
        Vec::new()
    };
    Definiteness { kind, kernel_basis }
}

/// Symmetric elimination on `-M` with diagonal pivoting.
///
/// `-M` is positive semidefinite iff every step finds a positive diagonal
/// pivot, or the remaining block is identically zero. A negative diagonal
/// entry, or a zero diagonal entry with a nonzero entry in its row, rules out
/// semidefiniteness.
pub fn classify<T: Field>(m: &SymMatrix) -> DefinitenessKind {
    let n = m.dim();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| (0..n).map(|j| T::from_small(-m.get(i, j))).collect())
        .collect();
    let mut remaining: Vec<usize> = (0..n).collect();
    let mut full_rank = true;

    while !remaining.is_empty() {
        if remaining.iter().any(|&i| a[i][i].is_negative()) {
            return DefinitenessKind::Other;
        }
        let pivot = remaining
            .iter()
            .copied()
            .filter(|&i| a[i][i].is_positive())
            .max_by(|&i, &j| a[i][i].partial_cmp(&a[j][j]).expect("field elements are ordered"));
        let Some(p) = pivot else {
            // all remaining diagonal entries vanish
            let nonzero = remaining.iter().any(|&i| remaining.iter().any(|&j| !a[i][j].is_zero()));
            if nonzero {
                return DefinitenessKind::Other;
            }
            full_rank = false;
            break;
        };
        remaining.retain(|&i| i != p);
        let piv = a[p][p].clone();
        for &i in &remaining {
            if a[i][p].is_zero() {
                continue;
            }
            let factor = a[i][p].clone() / piv.clone();
            for &j in &remaining {
                let delta = factor.clone() * a[p][j].clone();
                a[i][j] = a[i][j].clone() - delta;
            }
        }
    }

    if full_rank {
        DefinitenessKind::NegativeDefinite
    } else {
        DefinitenessKind::NegativeSemidefinite
    }
}

/// Kernel of `m` as primitive integral vectors.
///
/// Each vector is scaled to coprime integer entries; its sign is chosen so
/// that all entries are non-negative when possible, otherwise so that the
/// first nonzero entry is positive.
pub fn kernel<Q: RationalField>(m: &SymMatrix) -> Vec<Vec<Q>> {
    let n = m.dim();
    let mut a: Vec<Vec<Q>> = m
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(Q::from_small).collect())
        .collect();

    let mut pivot_cols = Vec::new();
    let mut row = 0;
    for col in 0..n {
        if row == n {
            break;
        }
        let Some(found) = (row..n).find(|&r| !a[r][col].is_zero()) else {
            continue;
        };
        a.swap(row, found);
        let piv = a[row][col].clone();
        for v in a[row].iter_mut() {
            *v = v.clone() / piv.clone();
        }
        for r in 0..n {
            if r == row || a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone();
            for c in 0..n {
                let delta = factor.clone() * a[row][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
        }
        pivot_cols.push(col);
        row += 1;
    }

    let free: Vec<usize> = (0..n).filter(|c| !pivot_cols.contains(c)).collect();
    free.into_iter()
        .map(|fc| {
            let mut v = vec![Q::zero(); n];
            v[fc] = Q::one();
            for (r, &pc) in pivot_cols.iter().enumerate() {
                v[pc] = -a[r][fc].clone();
            }
            primitive(v)
        })
        .collect()
}

/// Scales a nonzero rational vector to coprime integers with the sign
/// convention documented on [`kernel`].
pub fn primitive<Q: RationalField>(v: Vec<Q>) -> Vec<Q> {
    let denom = crate::scalar::common_denominator(&v);
    let ints: Vec<Q::Int> = v
        .iter()
        .map(|x| x.numer_int() * (denom.clone() / x.denom_int()))
        .collect();
    let g = ints.iter().fold(Q::Int::zero(), |g, x| g.gcd(x));
    if g.is_zero() {
        return v;
    }
    let all_nonpos = ints.iter().all(|x| !x.is_positive());
    let first_negative = ints.iter().find(|x| !x.is_zero()).is_some_and(|x| x.is_negative());
    let flip = all_nonpos || (first_negative && !ints.iter().all(|x| !x.is_negative()));
    ints.into_iter()
        .map(|x| {
            let x = x / g.clone();
            Q::from_int(if flip { -x } else { x })
        })
        .collect()
}

/// Solves `M_S x = rhs` where `M_S` is the principal submatrix of `m` on
/// `support`. The result is indexed like `support`.
pub fn solve_linear<T: Field>(m: &SymMatrix, support: &[usize], rhs: &[T]) -> Result<Vec<T>, QformError> {
    if rhs.len() != support.len() {
        return Err(QformError::DimensionMismatch {
            expected: support.len(),
            found: rhs.len(),
        });
    }
    if support.is_empty() {
        return Ok(Vec::new());
    }
    let sub = m.submatrix(support)?;
    let n = sub.dim();
    let mut a: Vec<Vec<T>> = (0..n)
        .map(|i| {
            let mut row: Vec<T> = (0..n).map(|j| T::from_small(sub.get(i, j))).collect();
            row.push(rhs[i].clone());
            row
        })
        .collect();

    for col in 0..n {
        let Some(found) = (col..n).find(|&r| !a[r][col].is_zero()) else {
            return Err(QformError::Singular);
        };
        a.swap(col, found);
        let piv = a[col][col].clone();
        for r in (col + 1)..n {
            if a[r][col].is_zero() {
                continue;
            }
            let factor = a[r][col].clone() / piv.clone();
            for c in col..=n {
                let delta = factor.clone() * a[col][c].clone();
                a[r][c] = a[r][c].clone() - delta;
            }
        }
    }

    let mut x = vec![T::zero(); n];
    for i in (0..n).rev() {
        let mut acc = a[i][n].clone();
        for j in (i + 1)..n {
            acc = acc - a[i][j].clone() * x[j].clone();
        }
        x[i] = acc / a[i][i].clone();
    }
    Ok(x)
}

/// Fraction-free (Bareiss) determinant with checked arithmetic.
///
/// Returns `None` only if an intermediate value overflows `I`.
pub fn det_checked<I>(rows: &[Vec<I>]) -> Option<I>
where
    I: Integer + Signed + Clone + CheckedMul + CheckedSub,
{
    let n = rows.len();
    if n == 0 {
        return Some(I::one());
    }
    let mut a = rows.to_vec();
    let mut sign = I::one();
    let mut prev = I::one();
    for k in 0..n - 1 {
        if a[k][k].is_zero() {
            match (k + 1..n).find(|&r| !a[r][k].is_zero()) {
                Some(s) => {
                    a.swap(k, s);
                    sign = -sign;
                }
                None => return Some(I::zero()),
            }
        }
        for i in (k + 1)..n {
            for j in (k + 1)..n {
                let lhs = a[i][j].checked_mul(&a[k][k])?;
                let rhs = a[i][k].checked_mul(&a[k][j])?;
                a[i][j] = lhs.checked_sub(&rhs)? / prev.clone();
            }
            a[i][k] = I::zero();
        }
        prev = a[k][k].clone();
    }
    Some(sign * a[n - 1][n - 1].clone())
}

/// Exact determinant of an integer matrix; tries `i128` before `BigInt`.
pub fn determinant(rows: &[Vec<BigInt>]) -> BigInt {
    let small: Option<Vec<Vec<i128>>> = rows
        .iter()
        .map(|r| r.iter().map(|v| i128::try_from(v).ok()).collect())
        .collect();
    if let Some(d) = small.as_deref().and_then(det_checked) {
        return BigInt::from(d);
    }
    det_checked(rows).expect("BigInt arithmetic cannot overflow")
}

/// Largest dimension accepted by [`definiteness_by_minors`].
pub const MINOR_CHECK_LIMIT: usize = 16;

/// Independent classification through principal minors.
///
/// Negative definiteness follows Sylvester's criterion on the leading
/// principal minors; semidefiniteness checks every principal minor of `-M`
/// for non-negativity.
pub fn definiteness_by_minors(m: &SymMatrix) -> Result<DefinitenessKind, QformError> {
    let n = m.dim();
    if n > MINOR_CHECK_LIMIT {
        return Err(QformError::TooLarge {
            dim: n,
            limit: MINOR_CHECK_LIMIT,
        });
    }
    let neg: Vec<Vec<BigInt>> = m
        .rows()
        .into_iter()
        .map(|r| r.into_iter().map(|v| BigInt::from(-v)).collect())
        .collect();

    let leading_positive = (1..=n).all(|k| {
        let sub: Vec<Vec<BigInt>> = neg[..k].iter().map(|r| r[..k].to_vec()).collect();
        determinant(&sub).is_positive()
    });
    if leading_positive {
        return Ok(DefinitenessKind::NegativeDefinite);
    }

    for mask in 1u32..(1u32 << n) {
        let idx: Vec<usize> = (0..n).filter(|i| mask & (1 << i) != 0).collect();
        let sub: Vec<Vec<BigInt>> = idx
            .iter()
            .map(|&i| idx.iter().map(|&j| neg[i][j].clone()).collect())
            .collect();
        if determinant(&sub).is_negative() {
            return Ok(DefinitenessKind::Other);
        }
    }
    Ok(DefinitenessKind::NegativeSemidefinite)
}
