//! Property tests for the invariants of the algebra, the labeling and the
//! identity suite.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use proptest::prelude::*;

use qbd::exactla::{
    adjugate, charpoly_exact, count_real_roots, det_bareiss, inverse_gauss, Bound, Interval,
};
use qbd::matched::{random_nonsingular, Alternation};
use qbd::qmatrices::*;
use qbd::verify::{run_evaluated, run_suite, SuiteOptions};
use qbd::{IndexKind, IntMat, MatchedTree, Matrix, Poly, PolyMat, RatFun, RatMat};

fn small_poly() -> impl Strategy<Value = Poly> {
    prop::collection::vec(-4i64..=4, 0..4).prop_map(|c| Poly::from_i64s(&c))
}

fn poly_matrix(n: usize) -> impl Strategy<Value = PolyMat> {
    prop::collection::vec(small_poly(), n * n).prop_map(move |es| {
        Matrix::from_fn(n, n, IndexKind::L, IndexKind::R, |i, j| {
            es[i * n + j].clone()
        })
    })
}

fn int_matrix() -> impl Strategy<Value = IntMat> {
    (1usize..=5).prop_flat_map(|n| {
        prop::collection::vec(-5i64..=5, n * n).prop_map(move |es| {
            Matrix::from_fn(n, n, IndexKind::R, IndexKind::L, |i, j| {
                BigInt::from(es[i * n + j])
            })
        })
    })
}

fn rational() -> impl Strategy<Value = BigRational> {
    (-20i64..=20, 1i64..=7).prop_map(|(a, b)| BigRational::new(a.into(), b.into()))
}

fn tree() -> impl Strategy<Value = MatchedTree> {
    (1usize..=6, any::<u64>()).prop_map(|(p, seed)| random_nonsingular(p, seed))
}

fn cofactor_det(m: &PolyMat) -> Poly {
    fn go(rows: &[Vec<Poly>], cols: &[usize]) -> Poly {
        if cols.is_empty() {
            return Poly::one();
        }
        let mut total = Poly::zero();
        for (k, &c) in cols.iter().enumerate() {
            let rest: Vec<usize> = cols.iter().copied().filter(|&x| x != c).collect();
            let term = &rows[0][c] * &go(&rows[1..], &rest);
            total = if k % 2 == 0 {
                &total + &term
            } else {
                &total - &term
            };
        }
        total
    }
    go(&m.to_rows(), &(0..m.cols()).collect::<Vec<_>>())
}

fn shuffle(n: usize, seed: u64) -> Vec<usize> {
    let mut order: Vec<usize> = (0..n).collect();
    let mut s = seed | 1;
    for i in (1..n).rev() {
        s ^= s << 13;
        s ^= s >> 7;
        s ^= s << 17;
        order.swap(i, (s % (i as u64 + 1)) as usize);
    }
    order
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn bareiss_matches_cofactor_expansion(m in (1usize..=4).prop_flat_map(poly_matrix)) {
        prop_assert_eq!(det_bareiss(&m), cofactor_det(&m));
    }

    #[test]
    fn adjugate_times_matrix_is_det_identity(m in (1usize..=4).prop_flat_map(poly_matrix)) {
        let n = m.rows();
        let det = det_bareiss(&m);
        let lhs = adjugate(&m).mul(&m).unwrap();
        let rhs = PolyMat::identity(n, IndexKind::R).scale(&det);
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn gauss_jordan_inverts(m in (1usize..=3).prop_flat_map(poly_matrix)) {
        let n = m.rows();
        match inverse_gauss(&m) {
            Ok(inv) => {
                prop_assert!(!det_bareiss(&m).is_zero());
                let prod = RatMat::from_poly(&m).mul(&inv).unwrap();
                prop_assert_eq!(prod, RatMat::identity(n, IndexKind::L));
            }
            Err(_) => prop_assert!(det_bareiss(&m).is_zero()),
        }
    }

    #[test]
    fn charpoly_constant_term_is_signed_det(m in int_matrix()) {
        let n = m.rows();
        let cp = charpoly_exact(&m);
        let det = det_bareiss(&m);
        let signed = if n % 2 == 0 { det } else { -det };
        prop_assert_eq!(cp.coeff(0), signed);
        prop_assert_eq!(cp.degree(), Some(n));
    }

    #[test]
    fn sturm_count_is_scale_invariant(
        roots in prop::collection::btree_set(-6i64..=6, 1..5),
        c in prop::sample::select(vec![-3i64, -1, 2, 5]),
    ) {
        let p = roots.iter().fold(Poly::one(), |acc, &r| &acc * &Poly::from_i64s(&[-r, 1]));
        let all = Interval::new(Bound::Unbounded, Bound::Unbounded);
        prop_assert_eq!(count_real_roots(&p, &all), roots.len());
        prop_assert_eq!(count_real_roots(&p.scale(&BigInt::from(c)), &all), roots.len());
        let nonneg = Interval::new(Bound::Closed(BigRational::zero()), Bound::Unbounded);
        prop_assert_eq!(count_real_roots(&p, &nonneg), roots.iter().filter(|&&r| r >= 0).count());
    }

    #[test]
    fn ratfun_arithmetic_agrees_with_evaluation(
        a in small_poly(), b in small_poly(), c in small_poly(), d in small_poly(), q0 in rational(),
    ) {
        prop_assume!(!b.is_zero() && !d.is_zero());
        prop_assume!(!b.eval(&q0).is_zero() && !d.eval(&q0).is_zero());
        let x = RatFun::new(a, b).unwrap();
        let y = RatFun::new(c, d).unwrap();
        let (xv, yv) = (x.eval(&q0).unwrap(), y.eval(&q0).unwrap());
        prop_assert_eq!((&x * &y).eval(&q0).unwrap(), &xv * &yv);
        prop_assert_eq!((&x + &y).eval(&q0).unwrap(), &xv + &yv);
        if !x.is_zero() && !xv.is_zero() {
            prop_assert_eq!(x.inv().unwrap().eval(&q0).unwrap(), BigRational::one() / xv);
        }
    }

    #[test]
    fn suite_is_invariant_under_vertex_relabeling(mt in tree(), seed in any::<u64>()) {
        let perm = shuffle(mt.n(), seed);
        let moved = mt.relabel_vertices(&perm).unwrap();
        prop_assert_eq!(build_ql(&moved), build_ql(&mt));
        prop_assert_eq!(build_qb(&moved), build_qb(&mt));
        prop_assert_eq!(moved.canonical_code(), mt.canonical_code());
    }

    #[test]
    fn pair_reordering_permutes_matrices(mt in tree(), seed in any::<u64>()) {
        let order = shuffle(mt.p(), seed);
        let re = mt.reorder_pairs(&order, false).unwrap();
        prop_assert_eq!(build_ql(&re), build_ql(&mt).permute(&order, &order));
        prop_assert_eq!(build_qb(&re), build_qb(&mt).permute(&order, &order));
        prop_assert_eq!(bdq_det(&re).unwrap(), bdq_det(&mt).unwrap());
        prop_assert_eq!(bdq_recursive(&re), bdq_recursive(&mt));
        let report = run_suite(&re, SuiteOptions { oracle: false, ..SuiteOptions::default() });
        prop_assert!(report.passed(), "{:?}", report);
    }

    #[test]
    fn side_swap_keeps_every_identity(mt in tree(), seed in any::<u64>()) {
        let order = shuffle(mt.p(), seed);
        let swapped = mt.reorder_pairs(&order, true).unwrap();
        let report = run_suite(&swapped, SuiteOptions { oracle: false, ..SuiteOptions::default() });
        prop_assert!(report.passed(), "{:?}", report);
        prop_assert_eq!(bdq_det(&swapped).unwrap(), bdq_det(&mt).unwrap());
    }

    #[test]
    fn alternating_paths_agree_with_classification(mt in tree()) {
        for u in 0..mt.n() {
            let reach = mt.alternating_from(u);
            for v in (0..mt.n()).filter(|&v| v != u) {
                let expected = match reach[v] {
                    None => Alternation::NotAlternating,
                    Some(k) if k % 2 == 1 => Alternation::OddAlternating,
                    Some(_) => Alternation::EvenAlternating,
                };
                prop_assert_eq!(mt.classify_path(u, v).alternation, expected, "{} -> {}", u, v);
            }
        }
    }

    #[test]
    fn symbolic_matrices_evaluate_pointwise(mt in tree(), q0 in rational()) {
        prop_assert_eq!(build_qb(&mt).eval(&q0), build_qb_at(&mt, &q0));
        prop_assert_eq!(build_e(&mt).eval(&q0), build_e_at(&mt, &q0));
        prop_assert_eq!(build_ql(&mt).eval(&q0), build_ql_at(&mt, &q0));
    }

    #[test]
    fn symbolic_pass_implies_evaluated_pass(mt in tree(), pts in prop::collection::vec(rational(), 3)) {
        let bd = bdq_recursive(&mt);
        let one = BigRational::one();
        let usable: Vec<BigRational> = pts
            .into_iter()
            .filter(|q| !q.is_zero() && *q != one && *q != -one.clone() && !bd.eval(q).is_zero())
            .collect();
        let report = run_evaluated(&mt, &usable);
        prop_assert!(report.passed(), "{:?}", report);
    }
}
