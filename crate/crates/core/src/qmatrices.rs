//! Builders for the q-bipartite distance matrix `qB`, the exponential
//! bipartite distance matrix `E`, the q-bipartite Laplacian `qL`, the full
//! distance matrices `qD` and `eD`, q-signed degree vectors and `qtau`, the
//! `bd_q` index and the closed-form inverses.
//!
//! Every builder is written once over a table of q-scalars, so the same code
//! produces polynomial matrices and their exact values at a rational point.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::error::{Error, Result};
use crate::exactla::det_bareiss;
use crate::matched::{MatchedTree, Side};
use crate::matrix::{IndexKind, Matrix, PolyMat, PolyVec, QMat, RatMat, Scalar, Vector};
use crate::poly::{qdeg, qint, Poly};
use crate::ratfun::RatFun;
use crate::tree::Tree;

/// Powers, q-integers and q-degrees up to a size bound, either as polynomials
/// or as values at a fixed rational point.
pub struct QTables<T> {
    q2: T,
    qint: Vec<T>,
    qpow: Vec<T>,
    qdeg: Vec<T>,
}

impl QTables<Poly> {
    pub fn symbolic(n: usize) -> Self {
        QTables {
            q2: Poly::q().pow(2),
            qint: (0..=n).map(qint).collect(),
            qpow: (0..=n).map(|k| Poly::monomial(BigInt::one(), k)).collect(),
            qdeg: std::iter::once(Poly::zero())
                .chain((1..=n).map(|k| qdeg(k).expect("k >= 1")))
                .collect(),
        }
    }
}

impl QTables<BigRational> {
    pub fn at(q0: &BigRational, n: usize) -> Self {
        let mut qpow = Vec::with_capacity(n + 1);
        let mut qint = Vec::with_capacity(n + 1);
        let mut pw = BigRational::one();
        let mut acc = BigRational::zero();
        for _ in 0..=n {
            qint.push(acc.clone());
            acc += &pw;
            qpow.push(pw.clone());
            pw *= q0;
        }
        let q2 = q0 * q0;
        let qdeg = (0..=n)
            .map(|k| {
                if k == 0 {
                    BigRational::zero()
                } else {
                    BigRational::one() + &q2 * BigRational::from_integer(BigInt::from(k - 1))
                }
            })
            .collect();
        QTables {
            q2,
            qint,
            qpow,
            qdeg,
        }
    }
}

fn kind_of(s: Side) -> IndexKind {
    match s {
        Side::L => IndexKind::L,
        Side::R => IndexKind::R,
    }
}

fn bipartite_with<T: Scalar>(mt: &MatchedTree, table: &[T]) -> Matrix<T> {
    let rows: Vec<Vec<T>> = mt
        .left()
        .iter()
        .map(|&l| {
            let d = mt.tree().distances_from(l);
            mt.right().iter().map(|&r| table[d[r]].clone()).collect()
        })
        .collect();
    Matrix::from_rows(IndexKind::L, IndexKind::R, rows).expect("square by construction")
}

fn laplacian_with<T: Scalar>(mt: &MatchedTree, t: &QTables<T>) -> Matrix<T> {
    let rows: Vec<Vec<T>> = (0..mt.p())
        .map(|i| {
            let r = mt.r(i);
            let dr = &t.qdeg[mt.degree(r)];
            let alt = mt.alternating_from(r);
            (0..mt.p())
                .map(|j| {
                    let l = mt.l(j);
                    let dl = &t.qdeg[mt.degree(l)];
                    if i == j {
                        return dr.mul(dl).sub(&t.q2);
                    }
                    match alt[l] {
                        Some(k) if k % 2 == 1 => dr.mul(dl),
                        Some(_) => dr.mul(dl).neg(),
                        None if mt.tree().adjacent(r, l) => t.q2.neg(),
                        None => T::zero_elem(),
                    }
                })
                .collect()
        })
        .collect();
    Matrix::from_rows(IndexKind::R, IndexKind::L, rows).expect("square by construction")
}

fn signed_degree_with<T: Scalar>(mt: &MatchedTree, v: usize, t: &QTables<T>) -> Vector<T> {
    let other = mt.side(v).opposite();
    let alt = mt.alternating_from(v);
    let entries = mt
        .vertices_of(other)
        .iter()
        .map(|&x| {
            let d = &t.qdeg[mt.degree(x)];
            match alt[x] {
                Some(k) if k % 2 == 1 => d.clone(),
                Some(_) => d.neg(),
                None => T::zero_elem(),
            }
        })
        .collect();
    Vector::new(kind_of(other), entries)
}

fn tau_with<T: Scalar>(mt: &MatchedTree, t: &QTables<T>) -> (Vector<T>, Vector<T>) {
    let diffs = mt.diffs();
    let at = |v: usize| {
        let d = mt.degree(v) as i64;
        let c = (1 - d) * (1 + diffs[v]);
        t.q2.mul(&T::from_i64(c)).sub(&T::from_i64(diffs[v]))
    };
    (
        Vector::new(IndexKind::L, mt.left().iter().map(|&v| at(v)).collect()),
        Vector::new(IndexKind::R, mt.right().iter().map(|&v| at(v)).collect()),
    )
}

/// `qB`: `L x R`, entry `(i, j)` is `[dist(l_i, r_j)]_q`.
pub fn build_qb(mt: &MatchedTree) -> PolyMat {
    bipartite_with(mt, &QTables::symbolic(mt.n()).qint)
}

/// `E`: `L x R`, entry `(i, j)` is `q^dist(l_i, r_j)`.
pub fn build_e(mt: &MatchedTree) -> PolyMat {
    bipartite_with(mt, &QTables::symbolic(mt.n()).qpow)
}

/// `qL`: `R x L`. The diagonal holds `d(r_i)_q d(l_i)_q - q^2`; off the
/// diagonal the entry is `+d(r_i)_q d(l_j)_q` or `-d(r_i)_q d(l_j)_q` when the
/// `r_i`-`l_j` path is odd or even alternating, `-q^2` when `r_i` and `l_j`
/// are joined by a non-matching edge, and 0 otherwise.
pub fn build_ql(mt: &MatchedTree) -> PolyMat {
    laplacian_with(mt, &QTables::symbolic(mt.n()))
}

/// q-signed degree vector at `v`, indexed by the side opposite to `v`.
pub fn qsigned_degree_vector(mt: &MatchedTree, v: usize) -> Result<PolyVec> {
    if v >= mt.n() {
        return Err(Error::InvalidVertex(v));
    }
    Ok(signed_degree_with(mt, v, &QTables::symbolic(mt.n())))
}

/// Restrictions to `L` and `R` of `tau(v) = (1 - d(v))(1 + diff(v)) q^2 - diff(v)`.
pub fn qtau(mt: &MatchedTree) -> (PolyVec, PolyVec) {
    tau_with(mt, &QTables::symbolic(mt.n()))
}

pub fn build_qb_at(mt: &MatchedTree, q0: &BigRational) -> QMat {
    bipartite_with(mt, &QTables::at(q0, mt.n()).qint)
}

pub fn build_e_at(mt: &MatchedTree, q0: &BigRational) -> QMat {
    bipartite_with(mt, &QTables::at(q0, mt.n()).qpow)
}

pub fn build_ql_at(mt: &MatchedTree, q0: &BigRational) -> QMat {
    laplacian_with(mt, &QTables::at(q0, mt.n()))
}

pub fn qtau_at(mt: &MatchedTree, q0: &BigRational) -> (Vector<BigRational>, Vector<BigRational>) {
    tau_with(mt, &QTables::at(q0, mt.n()))
}

fn full_with(t: &Tree, table: &[Poly]) -> PolyMat {
    let d = t.distances();
    Matrix::from_fn(
        t.n(),
        t.n(),
        IndexKind::Vertex,
        IndexKind::Vertex,
        |i, j| table[d[i][j]].clone(),
    )
}

/// `qD`: `[dist(i, j)]_q` over all vertex pairs of any tree.
pub fn build_full_qd(t: &Tree) -> PolyMat {
    full_with(t, &QTables::symbolic(t.n()).qint)
}

/// `eD`: `q^dist(i, j)` over all vertex pairs of any tree.
pub fn build_full_ed(t: &Tree) -> PolyMat {
    full_with(t, &QTables::symbolic(t.n()).qpow)
}

/// `(q(1 + q))^(p-1)`, the factor removed from `det qB`.
pub fn bdq_factor(p: usize) -> Poly {
    Poly::from_i64s(&[0, 1, 1]).pow((p - 1) as u32)
}

/// `bd_q` from the determinant: `(-1)^(p-1) det qB / (q(1+q))^(p-1)`.
pub fn bdq_det(mt: &MatchedTree) -> Result<Poly> {
    let det = det_bareiss(&build_qb(mt));
    let bd = det.div_exact(&bdq_factor(mt.p()))?;
    Ok(if mt.p().is_multiple_of(2) { -bd } else { bd })
}

/// `bd_q` by peeling pendant `P_2`s: each attachment at `v` adds
/// `(1 + q)(1 + diff(v))`, with `diff` taken in the smaller tree, and
/// `bd_q(P_2) = 1`.
pub fn bdq_recursive(mt: &MatchedTree) -> Poly {
    let mut total: i64 = 0;
    let mut cur = mt.clone();
    while cur.p() > 1 {
        let d = cur.detach_p2().expect("p >= 2");
        total += 1 + d.tree.diff(d.site);
        cur = d.tree;
    }
    &Poly::one() + &Poly::from_i64s(&[total, total])
}

/// `E^{-1} = qL / (q(1 - q^2))`, `R x L`.
pub fn inverse_e_formula(mt: &MatchedTree) -> RatMat {
    let den = inverse_e_denominator();
    build_ql(mt).map(|x| RatFun::new(x.clone(), den.clone()).expect("nonzero denominator"))
}

/// `qB^{-1} = -qL / (q(1+q)) + tau_r tau_l^t / (q bd_q)`, `R x L`.
pub fn inverse_qb_formula(mt: &MatchedTree) -> Result<RatMat> {
    inverse_qb_with(mt, &bdq_recursive(mt))
}

/// [`inverse_qb_formula`] with a precomputed `bd_q`.
pub fn inverse_qb_with(mt: &MatchedTree, bd: &Poly) -> Result<RatMat> {
    if bd.is_zero() {
        return Err(Error::BdqZero);
    }
    let ql = build_ql(mt);
    let (tl, tr) = qtau(mt);
    let one_plus_q = Poly::from_i64s(&[1, 1]);
    let den = inverse_qb_denominator(bd);
    let mut out = Vec::with_capacity(mt.p());
    for i in 0..mt.p() {
        let mut row = Vec::with_capacity(mt.p());
        for j in 0..mt.p() {
            let rank_one = &(&one_plus_q * tr.get(i)) * tl.get(j);
            let num = &rank_one - &(ql.get(i, j) * bd);
            row.push(RatFun::new(num, den.clone())?);
        }
        out.push(row);
    }
    Matrix::from_rows(IndexKind::R, IndexKind::L, out)
}

/// `q(1 - q^2)`, the denominator of the closed form for `E^{-1}`.
pub fn inverse_e_denominator() -> Poly {
    Poly::from_i64s(&[0, 1, 0, -1])
}

/// `q(1 + q) bd_q`, the common denominator of the closed form for `qB^{-1}`.
pub fn inverse_qb_denominator(bd: &Poly) -> Poly {
    &Poly::from_i64s(&[0, 1, 1]) * bd
}

/// Evaluate a closed-form inverse at `q0`. Points where the formula's own
/// denominator vanishes are rejected even if cancellation removed the factor
/// from every entry.
pub fn eval_formula(m: &RatMat, formula_den: &Poly, q0: &BigRational) -> Result<QMat> {
    if formula_den.eval(q0).is_zero() {
        return Err(Error::PoleAtPoint {
            point: crate::ratfun::format_rational(q0),
            location: Some((0, 0)),
        });
    }
    m.eval(q0)
}

/// `E^{-1}` at `q0`, defined for `q0` outside `{0, 1, -1}`.
pub fn eval_inverse_e(mt: &MatchedTree, q0: &BigRational) -> Result<QMat> {
    eval_formula(&inverse_e_formula(mt), &inverse_e_denominator(), q0)
}

/// `qB^{-1}` at `q0`, defined when `q0` is not 0 or -1 and `bd_q(q0) != 0`.
pub fn eval_inverse_qb(mt: &MatchedTree, q0: &BigRational) -> Result<QMat> {
    let bd = bdq_recursive(mt);
    let inv = inverse_qb_with(mt, &bd)?;
    eval_formula(&inv, &inverse_qb_denominator(&bd), q0)
}

/// The bipartite Laplacian at `q = 1` as an integer matrix, `R x L`.
pub fn laplacian_q1(mt: &MatchedTree) -> Matrix<BigInt> {
    build_ql(mt).map(Poly::at_one)
}

/// `B^{-1} = -L/2 + tau_r tau_l^t / bd` at `q = 1`.
pub fn inverse_b_q1(mt: &MatchedTree) -> Result<QMat> {
    let bd = bdq_recursive(mt).at_one();
    if bd.is_zero() {
        return Err(Error::BdZero);
    }
    let lap = laplacian_q1(mt);
    let (tl, tr) = qtau(mt);
    let (tl, tr): (Vec<BigInt>, Vec<BigInt>) = (
        tl.entries().iter().map(Poly::at_one).collect(),
        tr.entries().iter().map(Poly::at_one).collect(),
    );
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    Ok(Matrix::from_fn(
        mt.p(),
        mt.p(),
        IndexKind::R,
        IndexKind::L,
        |i, j| {
            let a = -BigRational::from_integer(lap.get(i, j).clone()) * &half;
            a + BigRational::new(&tr[i] * &tl[j], bd.clone())
        },
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::IntMat;

    fn p(c: &[i64]) -> Poly {
        Poly::from_i64s(c)
    }

    fn pmat(rk: IndexKind, ck: IndexKind, rows: &[&[&[i64]]]) -> PolyMat {
        PolyMat::from_rows(
            rk,
            ck,
            rows.iter()
                .map(|r| r.iter().map(|c| p(c)).collect())
                .collect(),
        )
        .unwrap()
    }

    /// Path 0-1-2-3 with `l_1 = 0, r_1 = 1, l_2 = 2, r_2 = 3`.
    fn p4_ascending() -> MatchedTree {
        MatchedTree::with_labels(Tree::path(4), vec![0, 2], vec![1, 3]).unwrap()
    }

    /// Path 1-0-2-3 with `l_1 = 0, r_1 = 1, l_2 = 3, r_2 = 2`.
    fn p4_canonical() -> MatchedTree {
        let t = Tree::from_edges(&[(0, 1), (0, 2), (2, 3)]).unwrap();
        MatchedTree::with_labels(t, vec![0, 3], vec![1, 2]).unwrap()
    }

    fn p6() -> MatchedTree {
        MatchedTree::new(Tree::path(6)).unwrap()
    }

    #[test]
    fn qb_and_e_examples() {
        let p2 = MatchedTree::p2();
        assert_eq!(build_qb(&p2), pmat(IndexKind::L, IndexKind::R, &[&[&[1]]]));
        assert_eq!(
            build_e(&p2),
            pmat(IndexKind::L, IndexKind::R, &[&[&[0, 1]]])
        );
        let p4 = p4_ascending();
        assert_eq!(
            build_qb(&p4),
            pmat(
                IndexKind::L,
                IndexKind::R,
                &[&[&[1], &[1, 1, 1]], &[&[1], &[1]]]
            )
        );
        assert_eq!(
            build_e(&p4),
            pmat(
                IndexKind::L,
                IndexKind::R,
                &[&[&[0, 1], &[0, 0, 0, 1]], &[&[0, 1], &[0, 1]]]
            )
        );
        let one = BigRational::one();
        assert_eq!(
            build_e(&p4).eval(&one),
            QMat::from_fn(2, 2, IndexKind::L, IndexKind::R, |_, _| one.clone())
        );
        let b1: IntMat = build_qb(&p4).map(Poly::at_one);
        assert_eq!(
            b1.to_rows(),
            vec![vec![1.into(), 3.into()], vec![1.into(), 1.into()]]
        );
    }

    #[test]
    fn ql_examples() {
        assert_eq!(
            build_ql(&MatchedTree::p2()),
            pmat(IndexKind::R, IndexKind::L, &[&[&[1, 0, -1]]])
        );
        assert_eq!(
            build_ql(&p4_canonical()),
            pmat(
                IndexKind::R,
                IndexKind::L,
                &[&[&[1], &[-1]], &[&[0, 0, -1], &[1]]]
            )
        );
    }

    #[test]
    fn full_matrix_examples() {
        let qd = build_full_qd(&Tree::path(3));
        assert_eq!(
            qd,
            pmat(
                IndexKind::Vertex,
                IndexKind::Vertex,
                &[
                    &[&[], &[1], &[1, 1]],
                    &[&[1], &[], &[1]],
                    &[&[1, 1], &[1], &[]]
                ]
            )
        );
        assert_eq!(det_bareiss(&qd), p(&[2, 2]));
        let ed = build_full_ed(&Tree::path(2));
        assert_eq!(det_bareiss(&ed), p(&[1, 0, -1]));
        assert!((0..2).all(|i| ed.get(i, i).is_one()));
    }

    #[test]
    fn signed_degree_examples() {
        let mu = qsigned_degree_vector(&MatchedTree::p2(), 0).unwrap();
        assert_eq!(mu.entries(), &[p(&[1])]);
        assert_eq!(mu.kind(), IndexKind::R);
        let mu = qsigned_degree_vector(&p4_canonical(), 2).unwrap();
        assert_eq!(mu.entries(), &[Poly::zero(), p(&[1])]);
        assert_eq!(mu.kind(), IndexKind::L);
        let mu = qsigned_degree_vector(&p4_ascending(), 3).unwrap();
        assert_eq!(mu.entries(), &[p(&[-1]), p(&[1, 0, 1])]);
        assert!(qsigned_degree_vector(&p4_ascending(), 4).is_err());
    }

    #[test]
    fn tau_examples() {
        let (tl, tr) = qtau(&MatchedTree::p2());
        assert_eq!(
            (tl.entries(), tr.entries()),
            (&[p(&[1])][..], &[p(&[1])][..])
        );
        let (tl, tr) = qtau(&p4_canonical());
        assert_eq!(tr.entries(), &[Poly::zero(), p(&[1])]);
        assert_eq!(tl.entries(), &[p(&[1]), Poly::zero()]);
    }

    #[test]
    fn bdq_examples() {
        assert!(bdq_det(&MatchedTree::p2()).unwrap().is_one());
        assert!(bdq_recursive(&MatchedTree::p2()).is_one());
        assert!(bdq_det(&p4_ascending()).unwrap().is_one());
        assert!(bdq_recursive(&p4_canonical()).is_one());
        assert_eq!(det_bareiss(&build_qb(&p4_ascending())), p(&[0, -1, -1]));
        assert_eq!(bdq_det(&p6()).unwrap(), p(&[2, 1]));
        assert_eq!(bdq_recursive(&p6()), p(&[2, 1]));
    }

    #[test]
    fn inverse_examples() {
        let inv = inverse_e_formula(&MatchedTree::p2());
        assert_eq!(inv.get(0, 0), &RatFun::new(p(&[1]), p(&[0, 1])).unwrap());
        let inv = inverse_qb_formula(&MatchedTree::p2()).unwrap();
        assert!(inv.get(0, 0).is_one());

        let mt = p4_canonical();
        let e = RatMat::from_poly(&build_e(&mt));
        assert!(e.mul(&inverse_e_formula(&mt)).unwrap().is_identity());

        let a = |n: &[i64]| RatFun::new(p(n), p(&[0, 1, 1])).unwrap();
        let inv = inverse_qb_formula(&p4_canonical()).unwrap();
        let expected = RatMat::from_rows(
            IndexKind::R,
            IndexKind::L,
            vec![vec![a(&[-1]), a(&[1])], vec![a(&[1, 1, 1]), a(&[-1])]],
        )
        .unwrap();
        assert_eq!(inv, expected);
        assert!(inverse_qb_with(&mt, &Poly::zero()).is_err());
    }

    #[test]
    fn inverse_at_one() {
        let r = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert_eq!(
            inverse_b_q1(&MatchedTree::p2()).unwrap().get(0, 0),
            &r(1, 1)
        );
        let inv = inverse_b_q1(&p4_canonical()).unwrap();
        assert_eq!(
            inv.to_rows(),
            vec![vec![r(-1, 2), r(1, 2)], vec![r(3, 2), r(-1, 2)]]
        );
        let sym = inverse_qb_formula(&p4_canonical()).unwrap();
        assert_eq!(sym.eval(&BigRational::one()).unwrap(), inv);
    }

    #[test]
    fn inverse_e_has_pole_at_one() {
        let p2 = MatchedTree::p2();
        for q0 in [0, 1, -1] {
            let q0 = BigRational::from_integer(q0.into());
            assert!(matches!(
                eval_inverse_e(&p2, &q0),
                Err(Error::PoleAtPoint {
                    location: Some((0, 0)),
                    ..
                })
            ));
        }
        let two = BigRational::from_integer(2.into());
        assert_eq!(
            eval_inverse_e(&p2, &two).unwrap().get(0, 0),
            &BigRational::new(1.into(), 2.into())
        );
        let p4 = p4_canonical();
        assert!(eval_inverse_qb(&p4, &BigRational::from_integer((-1).into())).is_err());
        assert!(eval_inverse_qb(&p4, &BigRational::one()).is_ok());
    }

    #[test]
    fn evaluated_builders_match_symbolic() {
        let mt = p6();
        let q0 = BigRational::new(5.into(), 3.into());
        assert_eq!(build_qb_at(&mt, &q0), build_qb(&mt).eval(&q0));
        assert_eq!(build_e_at(&mt, &q0), build_e(&mt).eval(&q0));
        assert_eq!(build_ql_at(&mt, &q0), build_ql(&mt).eval(&q0));
        let (tl, tr) = qtau(&mt);
        let (al, ar) = qtau_at(&mt, &q0);
        assert_eq!(tl.map(|x| x.eval(&q0)), al);
        assert_eq!(tr.map(|x| x.eval(&q0)), ar);
    }
}
