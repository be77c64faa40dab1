//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit on any
//! failure. Zero tolerance throughout; every comparison is exact.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use qbd::matrix::Vector;
use qbd::qmatrices::{bdq_det, bdq_recursive, build_e, build_ql, qtau};
use qbd::verify::{
    default_q_points, run_conjecture, run_enumerated, run_full_trees, run_random, SuiteOptions,
    VerificationReport,
};
use qbd::{IndexKind, MatchedTree, Poly, PolyMat, RatFun, RatMat, Tree};

const THREADS: usize = 4;
/// Nonsingular trees on 2p vertices, p = 1..=6, as counted by the Prüfer
/// oracle in `tests/oracles.rs`.
const NONSINGULAR_COUNTS: [usize; 6] = [1, 1, 2, 5, 15, 49];
/// Trees on n = 2..=10 vertices.
const FULL_TREE_COUNT: usize = 200;

struct Outcome {
    pass: bool,
    detail: String,
}

/// Pass/fail over the named checks of reports with `p <= p_max`.
fn tally(
    reports: &[VerificationReport],
    p_max: usize,
    names: &[&str],
) -> (usize, usize, Option<String>) {
    let mut checked = 0;
    let mut failed = 0;
    let mut first = None;
    for r in reports.iter().filter(|r| r.p.is_some_and(|p| p <= p_max)) {
        for c in r.checks.iter().filter(|c| names.contains(&c.name.as_str())) {
            checked += 1;
            if !c.pass {
                failed += 1;
                first.get_or_insert_with(|| {
                    format!(
                        "tree {} {}: {}",
                        r.tree,
                        c.name,
                        c.witness.as_deref().unwrap_or("")
                    )
                });
            }
        }
    }
    (checked, failed, first)
}

fn from_tally(
    trees: usize,
    (checked, failed, first): (usize, usize, Option<String>),
    extra: bool,
) -> Outcome {
    let mut detail = format!("{trees} trees, {checked} checks, {failed} failures");
    if let Some(w) = first {
        detail.push_str(&format!("; first: {w}"));
    }
    Outcome {
        pass: failed == 0 && checked > 0 && extra,
        detail,
    }
}

fn trees_upto(reports: &[VerificationReport], p_max: usize) -> usize {
    reports
        .iter()
        .filter(|r| r.p.is_some_and(|p| p <= p_max))
        .count()
}

fn golden() -> Outcome {
    let q2 = Poly::from_i64s(&[0, 0, 1]);
    let p4 = MatchedTree::new(Tree::from_edges(&[(0, 1), (0, 2), (2, 3)]).unwrap()).unwrap();
    let p6 = MatchedTree::new(Tree::path(6)).unwrap();
    let mut misses = Vec::new();

    let ql = build_ql(&p4);
    let expected = PolyMat::from_rows(
        IndexKind::R,
        IndexKind::L,
        vec![
            vec![Poly::one(), -Poly::one()],
            vec![-q2.clone(), Poly::one()],
        ],
    )
    .unwrap();
    if ql != expected {
        misses.push(format!("qL(P4) = {:?}", ql.to_rows()));
    }
    for (name, mt, want) in [
        ("P4", &p4, Poly::one()),
        ("P6", &p6, Poly::from_i64s(&[2, 1])),
    ] {
        let (det, rec) = (bdq_det(mt), bdq_recursive(mt));
        if det.as_ref() != Ok(&want) || rec != want {
            misses.push(format!("bd_q({name}) = {det:?} / {rec}"));
        }
    }
    let (_, tau_r) = qtau(&p4);
    if tau_r != Vector::new(IndexKind::R, vec![Poly::zero(), Poly::one()]) {
        misses.push(format!("tau_r(P4) = {:?}", tau_r.entries()));
    }
    let scale = RatFun::new(Poly::one(), Poly::from_i64s(&[0, 1, 0, -1])).unwrap();
    let inv = RatMat::from_poly(&ql).scale(&scale);
    let prod = RatMat::from_poly(&build_e(&p4)).mul(&inv).unwrap();
    if prod != RatMat::identity(2, IndexKind::L) {
        misses.push("E(P4) qL(P4) / (q (1 - q^2)) is not I".into());
    }
    Outcome {
        pass: misses.is_empty(),
        detail: if misses.is_empty() {
            "qL(P4), bd_q(P4) = 1, bd_q(P6) = 2 + q, tau_r(P4) = (0, 1), E(P4) inverse".into()
        } else {
            misses.join("; ")
        },
    }
}

fn main() -> ExitCode {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(THREADS)
        .build()
        .expect("thread pool");
    let mut lines: Vec<(usize, &str, Outcome, Duration)> = Vec::new();

    pool.install(|| {
        let t = Instant::now();
        let reports = run_enumerated(6, SuiteOptions::default());
        let suite_time = t.elapsed();
        let counts_ok = (1..=6).all(|p| {
            reports.iter().filter(|r| r.p == Some(p)).count() == NONSINGULAR_COUNTS[p - 1]
        });

        let mut c1 = from_tally(
            reports.len(),
            tally(
                &reports,
                6,
                &[
                    "det_E",
                    "det_qL",
                    "bdq",
                    "sum_mu",
                    "row_col_sums",
                    "B_tau",
                    "ql_qb_product",
                    "inverse_E",
                    "inverse_qB",
                ],
            ),
            counts_ok && suite_time < Duration::from_secs(600),
        );
        if !counts_ok {
            c1.detail.push_str("; tree counts differ from the oracle");
        }
        lines.push((1, "exhaustive identity suite, 2p <= 12", c1, suite_time));

        lines.push((
            2,
            "inverse formulas equal Gauss-Jordan, 2p <= 10",
            from_tally(
                trees_upto(&reports, 5),
                tally(&reports, 5, &["inverse_E", "inverse_qB"]),
                true,
            ),
            suite_time,
        ));

        let splits = tally(&reports, 5, &["block_decomposition"]).0;
        let mut c3 = from_tally(
            trees_upto(&reports, 5),
            tally(&reports, 5, &["attach_update", "block_decomposition"]),
            splits > 0,
        );
        c3.detail
            .push_str(&format!(" ({splits} trees with a split vertex)"));
        lines.push((
            3,
            "attachment updates and block decomposition, 2p <= 10",
            c3,
            suite_time,
        ));

        lines.push((
            4,
            "q = 1 specialization, 2p <= 12",
            from_tally(reports.len(), tally(&reports, 6, &["q1_properties"]), true),
            suite_time,
        ));

        let t = Instant::now();
        let full = run_full_trees(10);
        let full_time = t.elapsed();
        let all: Vec<VerificationReport> = full
            .into_iter()
            .map(|mut r| {
                r.p = Some(0);
                r
            })
            .collect();
        let n = all.len();
        lines.push((
            5,
            "full-matrix determinants, every tree with n <= 10",
            from_tally(n, tally(&all, 0, &["full_dq_ed"]), n == FULL_TREE_COUNT),
            full_time,
        ));

        let t = Instant::now();
        let rows = run_conjecture(6);
        let conj_time = t.elapsed();
        let bad = rows.iter().find(|r| !r.holds());
        lines.push((
            6,
            "q = 1 Laplacian diagonalizable with nonnegative spectrum, 2p <= 12",
            Outcome {
                pass: bad.is_none() && rows.len() == NONSINGULAR_COUNTS.iter().sum::<usize>(),
                detail: match bad {
                    None => format!("{} trees, no counterexample", rows.len()),
                    Some(r) => format!(
                        "counterexample {} charpoly {}",
                        r.tree.code_hex(),
                        r.evidence.charpoly
                    ),
                },
            },
            conj_time,
        ));

        let t = Instant::now();
        lines.push((7, "golden values", golden(), t.elapsed()));

        let t = Instant::now();
        let random = run_random(100, 5, 1, &default_q_points());
        let random_time = t.elapsed();
        let n = random.len();
        let mut c8 = from_tally(
            n,
            tally(
                &random,
                100,
                &random[0]
                    .checks
                    .iter()
                    .map(|c| c.name.as_str())
                    .collect::<Vec<_>>(),
            ),
            n == 5 && random_time < Duration::from_secs(60),
        );
        c8.detail.push_str(" at q in {2, 1/2, 3, -2, 5/3}");
        lines.push((
            8,
            "random p = 100, seeds 1..=5, exact evaluation",
            c8,
            random_time,
        ));
    });

    let mut all_pass = true;
    for (k, title, outcome, time) in &lines {
        all_pass &= outcome.pass;
        println!(
            "{} criterion {k}: {title}: {} [{:.2}s]",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail,
            time.as_secs_f64()
        );
    }
    println!(
        "{} of {} criteria pass",
        lines.iter().filter(|l| l.2.pass).count(),
        lines.len()
    );
    if all_pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
