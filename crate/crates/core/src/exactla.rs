//! Exact linear algebra used as an independent referee: fraction-free
//! determinants, Gauss-Jordan inverses over `Q(q)`, integer ranks and
//! adjugates, characteristic polynomials and Sturm root counting.
//!
//! Nothing here calls the closed-form constructors.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{IndexKind, IntMat, Matrix, PolyMat, RatMat, Scalar};
use crate::poly::Poly;
use crate::ratfun::RatFun;

/// Rings with an exact division used by Bareiss elimination.
pub trait ExactDiv: Scalar {
    /// `self / d`, where `d` is known to divide `self`.
    fn exact_div(&self, d: &Self) -> Self;
}

impl ExactDiv for Poly {
    fn exact_div(&self, d: &Self) -> Self {
        self.div_exact(d).expect("Bareiss divisions are exact")
    }
}

impl ExactDiv for BigInt {
    fn exact_div(&self, d: &Self) -> Self {
        self / d
    }
}

/// Fraction-free Gaussian elimination in place. Returns the pivot columns and
/// whether an odd number of row swaps happened. After the call, row `k` holds
/// the `k`-th leading principal Bareiss row.
fn bareiss<T: ExactDiv>(a: &mut [Vec<T>]) -> (Vec<usize>, bool) {
    let rows = a.len();
    let cols = a.first().map_or(0, Vec::len);
    let mut prev = T::one_elem();
    let mut pivots = Vec::new();
    let mut odd = false;
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(k) = (r..rows).find(|&i| !a[i][c].is_zero_elem()) else {
            continue;
        };
        if k != r {
            a.swap(k, r);
            odd = !odd;
        }
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = a[i][j].mul(&a[r][c]).sub(&a[i][c].mul(&a[r][j]));
                a[i][j] = v.exact_div(&prev);
            }
            a[i][c] = T::zero_elem();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    (pivots, odd)
}

/// Determinant by Bareiss elimination; all divisions are exact.
pub fn det_bareiss<T: ExactDiv>(m: &Matrix<T>) -> T {
    assert!(m.is_square(), "determinant of a non-square matrix");
    let n = m.rows();
    if n == 0 {
        return T::one_elem();
    }
    let mut a = m.to_rows();
    let (pivots, odd) = bareiss(&mut a);
    if pivots.len() < n {
        return T::zero_elem();
    }
    let d = a[n - 1][n - 1].clone();
    if odd {
        d.neg()
    } else {
        d
    }
}

/// Rank by fraction-free elimination.
pub fn rank<T: ExactDiv>(m: &Matrix<T>) -> usize {
    let mut a = m.to_rows();
    bareiss(&mut a).0.len()
}

pub fn rank_int(m: &IntMat) -> usize {
    rank(m)
}

/// Adjugate via cofactors: `adj(m)[i][j] = (-1)^(i+j) det(m without row j, column i)`.
pub fn adjugate<T: ExactDiv>(m: &Matrix<T>) -> Matrix<T> {
    assert!(m.is_square(), "adjugate of a non-square matrix");
    let n = m.rows();
    let (rk, ck) = (m.col_kind(), m.row_kind());
    if n == 1 {
        return Matrix::identity(1, rk).with_kinds(rk, ck);
    }
    Matrix::from_fn(n, n, rk, ck, |i, j| {
        let keep_r: Vec<usize> = (0..n).filter(|&x| x != j).collect();
        let keep_c: Vec<usize> = (0..n).filter(|&x| x != i).collect();
        let d = det_bareiss(&m.permute(&keep_r, &keep_c));
        if (i + j) % 2 == 1 {
            d.neg()
        } else {
            d
        }
    })
}

pub fn adjugate_int(m: &IntMat) -> IntMat {
    adjugate(m)
}

/// Inverse over the rational-function field by Gauss-Jordan elimination,
/// pivoting on the entry of smallest degree in each column.
///
/// The result has the transposed index kinds, so `m * inverse = I`.
pub fn inverse_gauss(m: &PolyMat) -> Result<RatMat> {
    if !m.is_square() {
        return Err(Error::DimensionMismatch(
            "inverse of a non-square matrix".into(),
        ));
    }
    let n = m.rows();
    let mut a: Vec<Vec<RatFun>> = m
        .to_rows()
        .into_iter()
        .enumerate()
        .map(|(i, row)| {
            let mut row: Vec<RatFun> = row.into_iter().map(RatFun::from_poly).collect();
            row.extend((0..n).map(|j| {
                if i == j {
                    RatFun::one()
                } else {
                    RatFun::zero()
                }
            }));
            row
        })
        .collect();
    for c in 0..n {
        let k = (c..n)
            .filter(|&i| !a[i][c].is_zero_elem())
            .min_by_key(|&i| a[i][c].height())
            .ok_or(Error::SingularMatrix)?;
        a.swap(k, c);
        let inv = a[c][c].inv()?;
        for x in a[c].iter_mut() {
            *x = &*x * &inv;
        }
        let pivot_row = a[c].clone();
        for (i, row) in a.iter_mut().enumerate() {
            if i == c || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (x, p) in row.iter_mut().zip(&pivot_row) {
                if !p.is_zero() {
                    *x = &*x - &(&f * p);
                }
            }
        }
    }
    let inv: Vec<Vec<RatFun>> = a.into_iter().map(|row| row[n..].to_vec()).collect();
    Matrix::from_rows(m.col_kind(), m.row_kind(), inv)
}

/// `det(x I - m)` as a polynomial in `x`.
pub fn charpoly_exact(m: &IntMat) -> Poly {
    assert!(
        m.is_square(),
        "characteristic polynomial of a non-square matrix"
    );
    let x = Matrix::from_fn(
        m.rows(),
        m.cols(),
        IndexKind::Vertex,
        IndexKind::Vertex,
        |i, j| {
            let c = -m.get(i, j);
            if i == j {
                Poly::new(vec![c, 1.into()])
            } else {
                Poly::constant(c)
            }
        },
    );
    det_bareiss(&x)
}

/// `p / gcd(p, p')`, primitive with positive leading coefficient.
pub fn squarefree_part(p: &Poly) -> Poly {
    assert!(!p.is_zero(), "squarefree part of zero");
    let g = p.gcd(&p.derivative()).expect("p is nonzero");
    p.div_exact(&g).expect("gcd divides p").primitive_part()
}

/// Whether `p(m)` is the zero matrix.
pub fn annihilates(m: &IntMat, p: &Poly) -> bool {
    let n = m.rows();
    let kind = m.row_kind();
    let id = IntMat::identity(n, kind);
    let mut acc = IntMat::zeros(n, n, kind, kind);
    for c in p.coeffs().iter().rev() {
        acc = acc
            .mul(&m.clone().with_kinds(kind, kind))
            .expect("square")
            .add(&id.scale(c))
            .expect("same shape");
    }
    acc.entries().iter().all(Zero::is_zero)
}

/// One end of a real interval.
#[derive(Clone, Debug, PartialEq)]
pub enum Bound {
    Unbounded,
    Open(BigRational),
    Closed(BigRational),
}

#[derive(Clone, Debug, PartialEq)]
pub struct Interval {
    pub lo: Bound,
    pub hi: Bound,
}

impl Interval {
    pub fn new(lo: Bound, hi: Bound) -> Self {
        Interval { lo, hi }
    }

    pub fn everything() -> Self {
        Interval::new(Bound::Unbounded, Bound::Unbounded)
    }
}

fn sturm_chain(p: &Poly) -> Vec<Poly> {
    let mut chain = vec![p.clone(), p.derivative()];
    loop {
        let n = chain.len();
        if chain[n - 1].is_zero() {
            chain.pop();
            return chain;
        }
        // positive rescaling keeps the sign pattern of the chain
        let r = -chain[n - 2].signed_pseudo_rem(&chain[n - 1]);
        let c = r.content();
        let r = if c.is_zero() {
            r
        } else {
            Poly::new(r.coeffs().iter().map(|a| a / &c).collect())
        };
        chain.push(r);
    }
}

fn sign_changes(signs: impl Iterator<Item = i8>) -> usize {
    let mut last = 0;
    let mut count = 0;
    for s in signs.filter(|&s| s != 0) {
        if last != 0 && s != last {
            count += 1;
        }
        last = s;
    }
    count
}

fn sign_of(x: &BigRational) -> i8 {
    if x.is_positive() {
        1
    } else if x.is_negative() {
        -1
    } else {
        0
    }
}

fn variations_at(chain: &[Poly], x: Option<&BigRational>, plus_infinity: bool) -> usize {
    sign_changes(chain.iter().map(|s| match x {
        Some(x) => sign_of(&s.eval(x)),
        None => {
            let lead = s
                .leading()
                .map_or(0, |l| if l.is_positive() { 1 } else { -1 });
            let odd = s.degree().unwrap_or(0) % 2 == 1;
            if !plus_infinity && odd {
                -lead
            } else {
                lead
            }
        }
    }))
}

/// Number of distinct real roots of a squarefree `p` in `interval`, by Sturm's
/// theorem.
pub fn count_real_roots(p: &Poly, interval: &Interval) -> usize {
    if p.degree().unwrap_or(0) == 0 {
        return 0;
    }
    let chain = sturm_chain(p);
    let lo = match &interval.lo {
        Bound::Unbounded => None,
        Bound::Open(a) | Bound::Closed(a) => Some(a),
    };
    let hi = match &interval.hi {
        Bound::Unbounded => None,
        Bound::Open(b) | Bound::Closed(b) => Some(b),
    };
    if let (Some(a), Some(b)) = (lo, hi) {
        if a > b {
            return 0;
        }
    }
    // roots in (lo, hi]
    let va = variations_at(&chain, lo, false);
    let vb = variations_at(&chain, hi, true);
    let mut count = va.saturating_sub(vb);
    if let Bound::Closed(a) = &interval.lo {
        if p.eval(a).is_zero() {
            count += 1;
        }
    }
    if let Bound::Open(b) = &interval.hi {
        if p.eval(b).is_zero() {
            count -= 1;
        }
    }
    count
}

/// Diagonalizability and eigenvalue-sign evidence for an integer matrix.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureEvidence {
    pub charpoly: Poly,
    pub squarefree: Poly,
    pub diagonalizable: bool,
    pub all_eigen_nonneg: bool,
    /// Distinct real eigenvalues.
    pub real_root_count: usize,
}

/// A matrix is diagonalizable over `C` iff the squarefree part of its
/// characteristic polynomial annihilates it. All eigenvalues are real and
/// nonnegative iff that squarefree part has only real roots, none negative.
pub fn conjecture_evidence(m: &IntMat) -> ConjectureEvidence {
    let charpoly = charpoly_exact(m);
    let squarefree = squarefree_part(&charpoly);
    let diagonalizable = annihilates(m, &squarefree);
    let real_root_count = count_real_roots(&squarefree, &Interval::everything());
    let negative = count_real_roots(
        &squarefree,
        &Interval::new(Bound::Unbounded, Bound::Open(BigRational::zero())),
    );
    let all_eigen_nonneg = real_root_count == squarefree.degree().unwrap_or(0) && negative == 0;
    ConjectureEvidence {
        charpoly,
        squarefree,
        diagonalizable,
        all_eigen_nonneg,
        real_root_count,
    }
}
