//! Dense matrices and vectors whose rows and columns carry an index kind.
//!
//! `qB` and `E` are `L x R`, the q-bipartite Laplacian and the inverses are
//! `R x L`, and the full distance matrices are `Vertex x Vertex`. Products
//! check that the inner kinds agree, so a transposed operand is rejected
//! instead of silently multiplied.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly::Poly;
use crate::ratfun::RatFun;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum IndexKind {
    L,
    R,
    Vertex,
}

impl fmt::Display for IndexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            IndexKind::L => "L",
            IndexKind::R => "R",
            IndexKind::Vertex => "Vertex",
        };
        f.write_str(s)
    }
}

/// Commutative ring operations needed by the generic matrix code.
pub trait Scalar: Clone + PartialEq + fmt::Debug + Send + Sync {
    fn zero_elem() -> Self;
    fn one_elem() -> Self;
    fn from_i64(c: i64) -> Self;
    fn is_zero_elem(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
}

macro_rules! scalar_via_ops {
    ($t:ty, $zero:expr, $one:expr) => {
        impl Scalar for $t {
            fn zero_elem() -> Self {
                $zero
            }
            fn one_elem() -> Self {
                $one
            }
            fn from_i64(c: i64) -> Self {
                Poly::from(c).into()
            }
            fn is_zero_elem(&self) -> bool {
                <$t>::is_zero(self)
            }
            fn add(&self, o: &Self) -> Self {
                self + o
            }
            fn sub(&self, o: &Self) -> Self {
                self - o
            }
            fn mul(&self, o: &Self) -> Self {
                self * o
            }
            fn neg(&self) -> Self {
                -self
            }
        }
    };
}

scalar_via_ops!(Poly, Poly::zero(), Poly::one());
scalar_via_ops!(RatFun, RatFun::zero(), RatFun::one());

impl Scalar for BigInt {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn from_i64(c: i64) -> Self {
        c.into()
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

impl Scalar for BigRational {
    fn zero_elem() -> Self {
        Zero::zero()
    }
    fn one_elem() -> Self {
        One::one()
    }
    fn from_i64(c: i64) -> Self {
        BigRational::from_integer(c.into())
    }
    fn is_zero_elem(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
}

#[derive(Clone, PartialEq, Debug)]
pub struct Matrix<T> {
    rows: usize,
    cols: usize,
    row_kind: IndexKind,
    col_kind: IndexKind,
    entries: Vec<T>,
}

pub type PolyMat = Matrix<Poly>;
pub type RatMat = Matrix<RatFun>;
pub type IntMat = Matrix<BigInt>;
pub type QMat = Matrix<BigRational>;

impl<T: Scalar> Matrix<T> {
    pub fn from_fn(
        rows: usize,
        cols: usize,
        row_kind: IndexKind,
        col_kind: IndexKind,
        mut f: impl FnMut(usize, usize) -> T,
    ) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Matrix {
            rows,
            cols,
            row_kind,
            col_kind,
            entries,
        }
    }

    pub fn from_rows(row_kind: IndexKind, col_kind: IndexKind, rows: Vec<Vec<T>>) -> Result<Self> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err(Error::DimensionMismatch("ragged rows".into()));
        }
        Ok(Matrix {
            rows: r,
            cols: c,
            row_kind,
            col_kind,
            entries: rows.into_iter().flatten().collect(),
        })
    }

    pub fn zeros(rows: usize, cols: usize, row_kind: IndexKind, col_kind: IndexKind) -> Self {
        Self::from_fn(rows, cols, row_kind, col_kind, |_, _| T::zero_elem())
    }

    pub fn identity(n: usize, kind: IndexKind) -> Self {
        Self::from_fn(n, n, kind, kind, |i, j| {
            if i == j {
                T::one_elem()
            } else {
                T::zero_elem()
            }
        })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row_kind(&self) -> IndexKind {
        self.row_kind
    }

    pub fn col_kind(&self) -> IndexKind {
        self.col_kind
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &T {
        &self.entries[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: T) {
        self.entries[i * self.cols + j] = v;
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.entries[i * self.cols..(i + 1) * self.cols]
    }

    pub fn to_rows(&self) -> Vec<Vec<T>> {
        (0..self.rows).map(|i| self.row(i).to_vec()).collect()
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Matrix<U> {
        Matrix {
            rows: self.rows,
            cols: self.cols,
            row_kind: self.row_kind,
            col_kind: self.col_kind,
            entries: self.entries.iter().map(f).collect(),
        }
    }

    pub fn try_map<U: Scalar>(
        &self,
        f: impl Fn(usize, usize, &T) -> Result<U>,
    ) -> Result<Matrix<U>> {
        let mut entries = Vec::with_capacity(self.entries.len());
        for (k, e) in self.entries.iter().enumerate() {
            entries.push(f(k / self.cols.max(1), k % self.cols.max(1), e)?);
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            row_kind: self.row_kind,
            col_kind: self.col_kind,
            entries,
        })
    }

    /// Same entries with different index-kind metadata.
    pub fn with_kinds(mut self, row_kind: IndexKind, col_kind: IndexKind) -> Self {
        self.row_kind = row_kind;
        self.col_kind = col_kind;
        self
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(
            self.cols,
            self.rows,
            self.col_kind,
            self.row_kind,
            |i, j| self.get(j, i).clone(),
        )
    }

    pub fn mul(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if self.col_kind != rhs.row_kind {
            return Err(Error::IndexKindMismatch {
                left: self.col_kind,
                right: rhs.row_kind,
            });
        }
        Ok(Self::from_fn(
            self.rows,
            rhs.cols,
            self.row_kind,
            rhs.col_kind,
            |i, j| {
                let mut acc = T::zero_elem();
                for k in 0..self.cols {
                    let a = self.get(i, k);
                    if a.is_zero_elem() {
                        continue;
                    }
                    let b = rhs.get(k, j);
                    if b.is_zero_elem() {
                        continue;
                    }
                    acc = acc.add(&a.mul(b));
                }
                acc
            },
        ))
    }

    pub fn mul_vec(&self, v: &Vector<T>) -> Result<Vector<T>> {
        if self.cols != v.len() || self.col_kind != v.kind {
            return Err(Error::IndexKindMismatch {
                left: self.col_kind,
                right: v.kind,
            });
        }
        let entries = (0..self.rows)
            .map(|i| {
                self.row(i)
                    .iter()
                    .zip(&v.entries)
                    .fold(T::zero_elem(), |acc, (a, b)| acc.add(&a.mul(b)))
            })
            .collect();
        Ok(Vector::new(self.row_kind, entries))
    }

    /// `v^t M`.
    pub fn vec_mul(&self, v: &Vector<T>) -> Result<Vector<T>> {
        self.transpose().mul_vec(v)
    }

    fn zip_with(&self, rhs: &Matrix<T>, f: impl Fn(&T, &T) -> T) -> Result<Matrix<T>> {
        if self.rows != rhs.rows || self.cols != rhs.cols {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} against {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        if self.row_kind != rhs.row_kind || self.col_kind != rhs.col_kind {
            return Err(Error::IndexKindMismatch {
                left: self.row_kind,
                right: rhs.row_kind,
            });
        }
        Ok(Matrix {
            rows: self.rows,
            cols: self.cols,
            row_kind: self.row_kind,
            col_kind: self.col_kind,
            entries: self
                .entries
                .iter()
                .zip(&rhs.entries)
                .map(|(a, b)| f(a, b))
                .collect(),
        })
    }

    pub fn add(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(rhs, |a, b| a.add(b))
    }

    pub fn sub(&self, rhs: &Matrix<T>) -> Result<Matrix<T>> {
        self.zip_with(rhs, |a, b| a.sub(b))
    }

    pub fn scale(&self, c: &T) -> Matrix<T> {
        self.map(|a| a.mul(c))
    }

    pub fn is_identity(&self) -> bool {
        self.is_square()
            && (0..self.rows).all(|i| {
                (0..self.cols).all(|j| {
                    let e = self.get(i, j);
                    if i == j {
                        *e == T::one_elem()
                    } else {
                        e.is_zero_elem()
                    }
                })
            })
    }

    /// First entry that differs from `other` as `(i, j, self - other)`.
    pub fn first_difference(&self, other: &Matrix<T>) -> Option<(usize, usize, T)> {
        if self.rows != other.rows || self.cols != other.cols {
            return Some((self.rows, self.cols, T::zero_elem()));
        }
        (0..self.rows)
            .flat_map(|i| (0..self.cols).map(move |j| (i, j)))
            .find(|&(i, j)| self.get(i, j) != other.get(i, j))
            .map(|(i, j)| (i, j, self.get(i, j).sub(other.get(i, j))))
    }

    /// Simultaneous reordering: new `(i, j)` is old `(rows[i], cols[j])`.
    pub fn permute(&self, rows: &[usize], cols: &[usize]) -> Matrix<T> {
        Self::from_fn(
            rows.len(),
            cols.len(),
            self.row_kind,
            self.col_kind,
            |i, j| self.get(rows[i], cols[j]).clone(),
        )
    }

    /// Copy `block` into `self` with its top-left corner at `(r0, c0)`.
    pub fn put_block(&mut self, r0: usize, c0: usize, block: &Matrix<T>) {
        for i in 0..block.rows {
            for j in 0..block.cols {
                self.set(r0 + i, c0 + j, block.get(i, j).clone());
            }
        }
    }

    pub fn row_sums(&self) -> Vector<T> {
        Vector::new(
            self.row_kind,
            (0..self.rows)
                .map(|i| self.row(i).iter().fold(T::zero_elem(), |a, b| a.add(b)))
                .collect(),
        )
    }

    pub fn col_sums(&self) -> Vector<T> {
        Vector::new(
            self.col_kind,
            (0..self.cols)
                .map(|j| (0..self.rows).fold(T::zero_elem(), |a, i| a.add(self.get(i, j))))
                .collect(),
        )
    }

    /// Outer product `u v^t`.
    pub fn outer(u: &Vector<T>, v: &Vector<T>) -> Matrix<T> {
        Self::from_fn(u.len(), v.len(), u.kind, v.kind, |i, j| {
            u.entries[i].mul(&v.entries[j])
        })
    }
}

impl PolyMat {
    pub fn eval(&self, q0: &BigRational) -> QMat {
        self.map(|p| p.eval(q0))
    }

    /// Largest entry degree (0 for an all-zero matrix).
    pub fn max_degree(&self) -> usize {
        self.entries
            .iter()
            .filter_map(|p| p.degree())
            .max()
            .unwrap_or(0)
    }
}

impl RatMat {
    pub fn from_poly(m: &PolyMat) -> RatMat {
        m.map(|p| RatFun::from_poly(p.clone()))
    }

    /// Entrywise evaluation; a pole reports the entry it occurred in.
    pub fn eval(&self, q0: &BigRational) -> Result<QMat> {
        self.try_map(|i, j, r| {
            r.eval(q0).map_err(|_| Error::PoleAtPoint {
                point: crate::ratfun::format_rational(q0),
                location: Some((i, j)),
            })
        })
    }
}

impl QMat {
    /// Clear denominators: returns `(M', d)` with `self = M' / d`.
    pub fn to_scaled(&self) -> ScaledMat {
        let den = self
            .entries
            .iter()
            .fold(BigInt::one(), |acc, r| acc.lcm(r.denom()));
        let ints = self.map(|r| r.numer() * (&den / r.denom()));
        ScaledMat { ints, den }
    }
}

/// A rational matrix stored as an integer matrix over one common denominator;
/// products of large evaluated matrices stay in integer arithmetic.
#[derive(Clone, Debug, PartialEq)]
pub struct ScaledMat {
    pub ints: IntMat,
    pub den: BigInt,
}

impl ScaledMat {
    /// Product with rows computed in parallel and accumulated in place.
    pub fn mul(&self, rhs: &ScaledMat) -> Result<ScaledMat> {
        let (a, b) = (&self.ints, &rhs.ints);
        if a.cols != b.rows {
            return Err(Error::DimensionMismatch(format!(
                "{}x{} times {}x{}",
                a.rows, a.cols, b.rows, b.cols
            )));
        }
        if a.col_kind != b.row_kind {
            return Err(Error::IndexKindMismatch {
                left: a.col_kind,
                right: b.row_kind,
            });
        }
        let rows: Vec<Vec<BigInt>> = (0..a.rows)
            .into_par_iter()
            .map(|i| {
                let mut acc = vec![BigInt::zero(); b.cols];
                for (k, x) in a.row(i).iter().enumerate() {
                    if Zero::is_zero(x) {
                        continue;
                    }
                    for (s, y) in acc.iter_mut().zip(b.row(k)) {
                        if !Zero::is_zero(y) {
                            *s += x * y;
                        }
                    }
                }
                acc
            })
            .collect();
        Ok(ScaledMat {
            ints: Matrix::from_rows(a.row_kind, b.col_kind, rows)?,
            den: &self.den * &rhs.den,
        })
    }

    pub fn to_rational(&self) -> QMat {
        self.ints
            .map(|a| BigRational::new(a.clone(), self.den.clone()))
    }

    pub fn is_identity(&self) -> bool {
        self.ints.is_square()
            && (0..self.ints.rows()).all(|i| {
                (0..self.ints.cols()).all(|j| {
                    let e = self.ints.get(i, j);
                    if i == j {
                        *e == self.den
                    } else {
                        Zero::is_zero(e)
                    }
                })
            })
    }
}

/// A vector indexed by one side of the bipartition.
#[derive(Clone, PartialEq, Debug)]
pub struct Vector<T> {
    kind: IndexKind,
    entries: Vec<T>,
}

pub type PolyVec = Vector<Poly>;

impl<T: Scalar> Vector<T> {
    pub fn new(kind: IndexKind, entries: Vec<T>) -> Self {
        Vector { kind, entries }
    }

    pub fn ones(n: usize, kind: IndexKind) -> Self {
        Vector::new(kind, vec![T::one_elem(); n])
    }

    pub fn unit(n: usize, k: usize, kind: IndexKind) -> Self {
        let mut e = vec![T::zero_elem(); n];
        e[k] = T::one_elem();
        Vector::new(kind, e)
    }

    pub fn kind(&self) -> IndexKind {
        self.kind
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[T] {
        &self.entries
    }

    pub fn get(&self, i: usize) -> &T {
        &self.entries[i]
    }

    pub fn sum(&self) -> T {
        self.entries.iter().fold(T::zero_elem(), |a, b| a.add(b))
    }

    pub fn scale(&self, c: &T) -> Self {
        Vector::new(self.kind, self.entries.iter().map(|a| a.mul(c)).collect())
    }

    pub fn add(&self, o: &Self) -> Self {
        Vector::new(
            self.kind,
            self.entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.add(b))
                .collect(),
        )
    }

    pub fn sub(&self, o: &Self) -> Self {
        Vector::new(
            self.kind,
            self.entries
                .iter()
                .zip(&o.entries)
                .map(|(a, b)| a.sub(b))
                .collect(),
        )
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Vector<U> {
        Vector::new(self.kind, self.entries.iter().map(f).collect())
    }

    /// Append one entry.
    pub fn push(mut self, x: T) -> Self {
        self.entries.push(x);
        self
    }

    pub fn permute(&self, order: &[usize]) -> Self {
        Vector::new(
            self.kind,
            order.iter().map(|&i| self.entries[i].clone()).collect(),
        )
    }

    /// Column matrix.
    pub fn as_column(&self) -> Matrix<T> {
        Matrix::from_fn(self.len(), 1, self.kind, IndexKind::Vertex, |i, _| {
            self.entries[i].clone()
        })
    }
}
