//! The identity suite. Each check is a pure function of a matched tree and
//! returns pass, or fail with a witness naming the offending index and the
//! nonzero residual.
//!
//! Exhaustive runs compare canonical polynomial and rational-function forms.
//! Large random trees are checked by exact evaluation at rational points.

use std::fmt::Display;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::exactla::{
    adjugate_int, conjecture_evidence, det_bareiss, inverse_gauss, rank_int, ConjectureEvidence,
};
use crate::matched::{enumerate_nonsingular, is_corona, random_nonsingular, MatchedTree, Side};
use crate::matrix::{IndexKind, Matrix, PolyMat, PolyVec, QMat, RatMat, Scalar, Vector};
use crate::poly::Poly;
use crate::qmatrices::*;
use crate::ratfun::format_rational;
use crate::tree::{all_trees, Tree};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Scope {
    SingleTree,
    PerVertex,
    AttachmentPair,
}

/// A named identity and the statement it verifies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub statement: &'static str,
    pub scope: Scope,
}

pub const CHECKS: &[IdentityCheck] = &[
    IdentityCheck { name: "det_E", statement: "det E = q^p (1 - q^2)^(p-1)", scope: Scope::SingleTree },
    IdentityCheck { name: "det_qL", statement: "det qL = 1 - q^2", scope: Scope::SingleTree },
    IdentityCheck {
        name: "bdq",
        statement: "det qB = (-1)^(p-1) q^(p-1) (1+q)^(p-1) bd_q, and the determinant and recursive bd_q agree",
        scope: Scope::SingleTree,
    },
    IdentityCheck { name: "sum_mu", statement: "1^t mu_u = (diff(u) + 1) q^2 - diff(u)", scope: Scope::PerVertex },
    IdentityCheck {
        name: "row_col_sums",
        statement: "1^t qL = (1 - q^2) tau_l^t and qL 1 = (1 - q^2) tau_r",
        scope: Scope::SingleTree,
    },
    IdentityCheck { name: "B_tau", statement: "qB tau_r = bd_q 1 and tau_l^t qB = bd_q 1^t", scope: Scope::SingleTree },
    IdentityCheck {
        name: "ql_qb_product",
        statement: "-qL qB + (1 + q) tau_r 1^t = q (1 + q) I",
        scope: Scope::SingleTree,
    },
    IdentityCheck { name: "inverse_E", statement: "E qL / (q (1 - q^2)) = I", scope: Scope::SingleTree },
    IdentityCheck {
        name: "inverse_qB",
        statement: "qB (-qL / (q (1 + q)) + tau_r tau_l^t / (q bd_q)) = I",
        scope: Scope::SingleTree,
    },
    IdentityCheck {
        name: "attach_update",
        statement: "qL and tau_r after attaching a P2 follow from qL, mu_v, tau_r and diff(v) before",
        scope: Scope::AttachmentPair,
    },
    IdentityCheck {
        name: "block_decomposition",
        statement: "qL is reassembled from the blocks obtained by splitting at an L vertex",
        scope: Scope::PerVertex,
    },
    IdentityCheck {
        name: "q1_properties",
        statement: "at q = 1: zero row and column sums, all-ones adjugate, rank p-1, symmetric iff corona, -L/2 + tau_r tau_l^t / bd inverts B",
        scope: Scope::SingleTree,
    },
    IdentityCheck {
        name: "full_dq_ed",
        statement: "det qD = (-1)^(n-1) (n-1) (1+q)^(n-2) and det eD = (1 - q^2)^(n-1)",
        scope: Scope::SingleTree,
    },
];

/// Outcome of one check.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub pass: bool,
    pub witness: Option<String>,
}

impl CheckResult {
    pub fn pass(name: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: true,
            witness: None,
        }
    }

    pub fn fail(name: impl Into<String>, witness: impl Into<String>) -> Self {
        CheckResult {
            name: name.into(),
            pass: false,
            witness: Some(witness.into()),
        }
    }

    fn from_witness(name: &str, witness: Option<String>) -> Self {
        match witness {
            None => CheckResult::pass(name),
            Some(w) => CheckResult::fail(name, w),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerificationReport {
    /// Hex encoding of the canonical tree code.
    pub tree: String,
    /// Number of matching pairs; `None` for trees checked without a matching.
    pub p: Option<usize>,
    pub checks: Vec<CheckResult>,
}

impl VerificationReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &CheckResult> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

/// `TREES <n> CHECKS <m> FAIL <k>`.
pub fn summary_line(reports: &[VerificationReport]) -> String {
    let checks: usize = reports.iter().map(|r| r.checks.len()).sum();
    let fails: usize = reports.iter().map(|r| r.failures().count()).sum();
    format!("TREES {} CHECKS {} FAIL {}", reports.len(), checks, fails)
}

fn entry_witness<T: Scalar + Display>(lhs: &Matrix<T>, rhs: &Matrix<T>) -> Option<String> {
    if lhs.rows() != rhs.rows() || lhs.cols() != rhs.cols() {
        return Some(format!(
            "shape {}x{} against {}x{}",
            lhs.rows(),
            lhs.cols(),
            rhs.rows(),
            rhs.cols()
        ));
    }
    lhs.first_difference(rhs)
        .map(|(i, j, d)| format!("entry ({}, {}): residual {}", i + 1, j + 1, d))
}

fn vector_witness<T: Scalar + Display>(lhs: &Vector<T>, rhs: &Vector<T>) -> Option<String> {
    if lhs.len() != rhs.len() {
        return Some(format!("length {} against {}", lhs.len(), rhs.len()));
    }
    (0..lhs.len())
        .find(|&i| lhs.get(i) != rhs.get(i))
        .map(|i| format!("entry {}: residual {}", i + 1, lhs.get(i).sub(rhs.get(i))))
}

fn poly_witness(lhs: &Poly, rhs: &Poly) -> Option<String> {
    (lhs != rhs).then(|| format!("residual {}", lhs - rhs))
}

fn q2() -> Poly {
    Poly::from_i64s(&[0, 0, 1])
}

fn one_minus_q2() -> Poly {
    Poly::from_i64s(&[1, 0, -1])
}

pub fn check_det_e(mt: &MatchedTree) -> CheckResult {
    let p = mt.p() as u32;
    let expected = &Poly::q().pow(p) * &one_minus_q2().pow(p - 1);
    CheckResult::from_witness("det_E", poly_witness(&det_bareiss(&build_e(mt)), &expected))
}

pub fn check_det_ql(mt: &MatchedTree) -> CheckResult {
    CheckResult::from_witness(
        "det_qL",
        poly_witness(&det_bareiss(&build_ql(mt)), &one_minus_q2()),
    )
}

pub fn check_bdq(mt: &MatchedTree) -> CheckResult {
    let name = "bdq";
    let rec = bdq_recursive(mt);
    let det = det_bareiss(&build_qb(mt));
    let bd = match bdq_det(mt) {
        Ok(bd) => bd,
        Err(e) => return CheckResult::fail(name, format!("det qB = {det}: {e}")),
    };
    if bd != rec {
        return CheckResult::fail(
            name,
            format!(
                "determinant bd_q {bd} against recursive bd_q {rec}: residual {}",
                &bd - &rec
            ),
        );
    }
    let sign = if mt.p() % 2 == 1 {
        Poly::one()
    } else {
        -Poly::one()
    };
    let rebuilt = &(&sign * &bdq_factor(mt.p())) * &bd;
    CheckResult::from_witness(name, poly_witness(&det, &rebuilt))
}

pub fn check_sum_mu(mt: &MatchedTree) -> CheckResult {
    let witness = (0..mt.n()).find_map(|u| {
        let mu = qsigned_degree_vector(mt, u).expect("vertex in range");
        let diff = mt.diff(u);
        let expected = &(&q2() * &Poly::from(diff + 1)) - &Poly::from(diff);
        poly_witness(&mu.sum(), &expected).map(|w| format!("vertex {u}: {w}"))
    });
    CheckResult::from_witness("sum_mu", witness)
}

pub fn check_row_col_sums(mt: &MatchedTree) -> CheckResult {
    let name = "row_col_sums";
    let ql = build_ql(mt);
    let (tl, tr) = qtau(mt);
    let c = one_minus_q2();
    if let Some(w) = vector_witness(&ql.col_sums(), &tl.scale(&c)) {
        return CheckResult::fail(name, format!("column sums, {w}"));
    }
    if let Some(w) = vector_witness(&ql.row_sums(), &tr.scale(&c)) {
        return CheckResult::fail(name, format!("row sums, {w}"));
    }
    CheckResult::from_witness(
        name,
        poly_witness(&tl.sum(), &tr.sum())
            .map(|w| format!("sum of tau_l against sum of tau_r, {w}")),
    )
}

pub fn check_b_tau(mt: &MatchedTree) -> CheckResult {
    let name = "B_tau";
    let qb = build_qb(mt);
    let (tl, tr) = qtau(mt);
    let bd = bdq_recursive(mt);
    let right = qb.mul_vec(&tr).expect("kinds agree");
    if let Some(w) = vector_witness(&right, &Vector::ones(mt.p(), IndexKind::L).scale(&bd)) {
        return CheckResult::fail(name, format!("qB tau_r, {w}"));
    }
    let left = qb.vec_mul(&tl).expect("kinds agree");
    CheckResult::from_witness(
        name,
        vector_witness(&left, &Vector::ones(mt.p(), IndexKind::R).scale(&bd))
            .map(|w| format!("tau_l^t qB, {w}")),
    )
}

pub fn check_ql_qb_product(mt: &MatchedTree) -> CheckResult {
    let ql = build_ql(mt);
    let qb = build_qb(mt);
    let (_, tr) = qtau(mt);
    let p = mt.p();
    let one_plus_q = Poly::from_i64s(&[1, 1]);
    let lhs = ql
        .mul(&qb)
        .expect("kinds agree")
        .scale(&-Poly::one())
        .add(&PolyMat::outer(
            &tr.scale(&one_plus_q),
            &Vector::ones(p, IndexKind::R),
        ))
        .expect("same shape");
    let rhs = PolyMat::identity(p, IndexKind::R).scale(&Poly::from_i64s(&[0, 1, 1]));
    CheckResult::from_witness("ql_qb_product", entry_witness(&lhs, &rhs))
}

fn check_inverse(name: &str, m: &PolyMat, formula: Result<RatMat>, oracle: bool) -> CheckResult {
    let inv = match formula {
        Ok(inv) => inv,
        Err(e) => return CheckResult::fail(name, e.to_string()),
    };
    let prod = RatMat::from_poly(m).mul(&inv).expect("kinds agree");
    let id = RatMat::identity(m.rows(), m.row_kind());
    if let Some(w) = entry_witness(&prod, &id) {
        return CheckResult::fail(name, format!("product, {w}"));
    }
    if oracle {
        match inverse_gauss(m) {
            Ok(reference) => {
                if let Some(w) = entry_witness(&inv, &reference) {
                    return CheckResult::fail(name, format!("against Gauss-Jordan, {w}"));
                }
            }
            Err(e) => return CheckResult::fail(name, format!("Gauss-Jordan: {e}")),
        }
    }
    CheckResult::pass(name)
}

pub fn check_inverse_e(mt: &MatchedTree, oracle: bool) -> CheckResult {
    check_inverse("inverse_E", &build_e(mt), Ok(inverse_e_formula(mt)), oracle)
}

pub fn check_inverse_qb(mt: &MatchedTree, oracle: bool) -> CheckResult {
    check_inverse("inverse_qB", &build_qb(mt), inverse_qb_formula(mt), oracle)
}

/// `qL` after attaching a `P_2` at `v`, assembled from the smaller tree.
pub fn attached_laplacian(mt: &MatchedTree, v: usize) -> Result<PolyMat> {
    let p = mt.p();
    let k = mt.index(v);
    let ql = build_ql(mt);
    let mu = qsigned_degree_vector(mt, v)?;
    let q2 = q2();
    let mut out = PolyMat::zeros(p + 1, p + 1, IndexKind::R, IndexKind::L);
    for i in 0..p {
        for j in 0..p {
            let mut x = ql.get(i, j).clone();
            match mt.side(v) {
                Side::L if j == k => x = &x + &(&q2 * mu.get(i)),
                Side::R if i == k => x = &x + &(&q2 * mu.get(j)),
                _ => {}
            }
            out.set(i, j, x);
        }
    }
    for i in 0..p {
        let (col, row) = match mt.side(v) {
            Side::L => (-mu.get(i), if i == k { -&q2 } else { Poly::zero() }),
            Side::R => (if i == k { -&q2 } else { Poly::zero() }, -mu.get(i)),
        };
        out.set(i, p, col);
        out.set(p, i, row);
    }
    out.set(p, p, Poly::one());
    Ok(out)
}

/// `tau_r` after attaching a `P_2` at `v`, updated from the smaller tree.
pub fn attached_tau_r(mt: &MatchedTree, v: usize) -> Result<PolyVec> {
    let (_, tr) = qtau(mt);
    let k = mt.index(v);
    match mt.side(v) {
        Side::R => {
            let c = Poly::from(1 + mt.diff(v));
            let mut e = Vector::unit(mt.p(), k, IndexKind::R).scale(&q2());
            e = e.push(-Poly::one());
            Ok(tr.push(Poly::zero()).sub(&e.scale(&c)))
        }
        Side::L => {
            let mu = qsigned_degree_vector(mt, v)?;
            Ok(tr.push(Poly::one()).sub(&mu.push(Poly::zero())))
        }
    }
}

/// Compare the attachment formulas with the from-scratch matrices at `v`.
pub fn check_attach_at(mt: &MatchedTree, v: usize) -> Result<Option<String>> {
    let big = mt.attach_p2(v)?;
    if let Some(w) = entry_witness(&build_ql(&big), &attached_laplacian(mt, v)?) {
        return Ok(Some(format!("vertex {v}: qL {w}")));
    }
    let (_, tr) = qtau(&big);
    Ok(vector_witness(&tr, &attached_tau_r(mt, v)?).map(|w| format!("vertex {v}: tau_r {w}")))
}

pub fn check_attach_update(mt: &MatchedTree) -> CheckResult {
    let witness = (0..mt.n()).find_map(|v| match check_attach_at(mt, v) {
        Ok(w) => w,
        Err(e) => Some(format!("vertex {v}: {e}")),
    });
    CheckResult::from_witness("attach_update", witness)
}

/// Pieces of a split at an `L` vertex `x`: deleting the non-matching edges at
/// `x` leaves `x`'s own component followed by one component per neighbor.
pub struct Split {
    /// Component trees, the first containing `x` as its last `L` label and
    /// each later one starting with the cut neighbor as `r_1`.
    pub parts: Vec<MatchedTree>,
    /// `x` in the first part.
    pub center: usize,
    /// The cut neighbor in each later part.
    pub anchors: Vec<usize>,
    /// Pair order of the whole tree matching the concatenated parts.
    pub order: Vec<usize>,
}

/// Split `mt` at the `L` vertex with label index `k`.
pub fn split_at(mt: &MatchedTree, k: usize) -> Result<Split> {
    if k >= mt.p() {
        return Err(Error::InvalidVertex(k));
    }
    let x = mt.l(k);
    let s = mt.degree(x);
    if s < 2 {
        return Err(Error::DegreeTooSmall {
            vertex: x,
            degree: s,
        });
    }
    let cut: Vec<usize> = mt
        .tree()
        .neighbors(x)
        .iter()
        .copied()
        .filter(|&y| y != mt.mate(x))
        .collect();
    // component id per vertex, walking without the cut edges
    let mut comp = vec![usize::MAX; mt.n()];
    let roots: Vec<usize> = std::iter::once(x).chain(cut.iter().copied()).collect();
    for (c, &root) in roots.iter().enumerate() {
        let mut stack = vec![root];
        comp[root] = c;
        while let Some(u) = stack.pop() {
            for &w in mt.tree().neighbors(u) {
                let is_cut = (u == x && cut.contains(&w)) || (w == x && cut.contains(&u));
                if !is_cut && comp[w] == usize::MAX {
                    comp[w] = c;
                    stack.push(w);
                }
            }
        }
    }
    let mut parts = Vec::with_capacity(s);
    let mut anchors = Vec::with_capacity(s - 1);
    let mut order = Vec::with_capacity(mt.p());
    let mut center = 0;
    for (c, &root) in roots.iter().enumerate() {
        let mut pairs: Vec<usize> = (0..mt.p()).filter(|&i| comp[mt.l(i)] == c).collect();
        let lead = mt.index(root);
        pairs.retain(|&i| i != lead);
        if c == 0 {
            pairs.push(lead);
        } else {
            pairs.insert(0, lead);
        }
        let verts: Vec<usize> = (0..mt.n()).filter(|&v| comp[v] == c).collect();
        let local = |v: usize| verts.binary_search(&v).expect("vertex in component");
        let edges: Vec<(usize, usize)> = mt
            .tree()
            .edges()
            .iter()
            .filter(|&&(a, b)| comp[a] == c && comp[b] == c)
            .map(|&(a, b)| (local(a), local(b)))
            .collect();
        let tree = if edges.is_empty() {
            Tree::single_vertex()
        } else {
            Tree::from_edges(&edges)?
        };
        let part = MatchedTree::with_labels(
            tree,
            pairs.iter().map(|&i| local(mt.l(i))).collect(),
            pairs.iter().map(|&i| local(mt.r(i))).collect(),
        )?;
        if c == 0 {
            center = local(x);
        } else {
            anchors.push(local(root));
        }
        parts.push(part);
        order.extend(pairs);
    }
    Ok(Split {
        parts,
        center,
        anchors,
        order,
    })
}

/// `qL` of the whole tree assembled from a [`Split`], in the split's pair
/// order.
pub fn assemble_split(split: &Split) -> PolyMat {
    let sizes: Vec<usize> = split.parts.iter().map(MatchedTree::p).collect();
    let offsets: Vec<usize> = sizes
        .iter()
        .scan(0, |acc, &s| {
            let o = *acc;
            *acc += s;
            Some(o)
        })
        .collect();
    let p: usize = sizes.iter().sum();
    let s = split.parts.len();
    let q2 = q2();
    let first = &split.parts[0];
    let k1 = sizes[0] - 1;
    let mu_x = qsigned_degree_vector(first, split.center).expect("center in range");
    let mut out = PolyMat::zeros(p, p, IndexKind::R, IndexKind::L);

    let mut top = build_ql(first);
    let lift = Poly::from((s - 1) as i64);
    for i in 0..sizes[0] {
        let x = top.get(i, k1) + &(&(&lift * &q2) * mu_x.get(i));
        top.set(i, k1, x);
    }
    out.put_block(0, 0, &top);

    for (b, part) in split.parts.iter().enumerate().skip(1) {
        let off = offsets[b];
        let mu_r = qsigned_degree_vector(part, split.anchors[b - 1]).expect("anchor in range");
        out.put_block(0, off, &PolyMat::outer(&mu_x, &mu_r).scale(&-Poly::one()));
        out.set(off, k1, -&q2);
        let mut diag = build_ql(part);
        for j in 0..sizes[b] {
            let x = diag.get(0, j) + &(&q2 * mu_r.get(j));
            diag.set(0, j, x);
        }
        out.put_block(off, off, &diag);
    }
    out
}

pub fn check_block_at(mt: &MatchedTree, k: usize) -> Result<Option<String>> {
    let split = split_at(mt, k)?;
    let whole = build_ql(mt).permute(&split.order, &split.order);
    Ok(entry_witness(&whole, &assemble_split(&split))
        .map(|w| format!("split at l{} (vertex {}): {w}", k + 1, mt.l(k))))
}

/// Block decomposition at every `L` vertex of degree at least 2; `None` when
/// there is no such vertex.
pub fn check_block_decomposition(mt: &MatchedTree) -> Option<CheckResult> {
    let ks: Vec<usize> = (0..mt.p()).filter(|&k| mt.degree(mt.l(k)) >= 2).collect();
    if ks.is_empty() {
        return None;
    }
    let witness = ks.into_iter().find_map(|k| match check_block_at(mt, k) {
        Ok(w) => w,
        Err(e) => Some(e.to_string()),
    });
    Some(CheckResult::from_witness("block_decomposition", witness))
}

pub fn check_q1_properties(mt: &MatchedTree) -> CheckResult {
    let name = "q1_properties";
    let p = mt.p();
    let lap = laplacian_q1(mt);
    if let Some(i) = lap.row_sums().entries().iter().position(|x| !x.is_zero()) {
        return CheckResult::fail(
            name,
            format!("row {} sums to {}", i + 1, lap.row_sums().get(i)),
        );
    }
    if let Some(j) = lap.col_sums().entries().iter().position(|x| !x.is_zero()) {
        return CheckResult::fail(
            name,
            format!("column {} sums to {}", j + 1, lap.col_sums().get(j)),
        );
    }
    let adj = adjugate_int(&lap);
    if let Some(k) = adj.entries().iter().position(|x| !x.is_one()) {
        return CheckResult::fail(
            name,
            format!(
                "adjugate entry ({}, {}) is {}",
                k / p + 1,
                k % p + 1,
                adj.entries()[k]
            ),
        );
    }
    let rank = rank_int(&lap);
    if rank + 1 != p {
        return CheckResult::fail(name, format!("rank {rank}, expected {}", p - 1));
    }
    let symmetric = (0..p).all(|i| (0..p).all(|j| lap.get(i, j) == lap.get(j, i)));
    if symmetric != is_corona(mt) {
        return CheckResult::fail(
            name,
            format!("symmetric = {symmetric} but corona = {}", is_corona(mt)),
        );
    }
    let b1 = build_qb(mt).eval(&BigRational::one());
    match inverse_b_q1(mt) {
        Ok(inv) => {
            let prod = b1.mul(&inv).expect("kinds agree");
            CheckResult::from_witness(
                name,
                entry_witness(&prod, &QMat::identity(p, IndexKind::L))
                    .map(|w| format!("B times inverse, {w}")),
            )
        }
        Err(e) => CheckResult::fail(name, e.to_string()),
    }
}

pub fn check_full_dq_ed(t: &Tree) -> CheckResult {
    let name = "full_dq_ed";
    let n = t.n();
    if n < 2 {
        return CheckResult::fail(name, "needs at least two vertices");
    }
    let sign: i64 = if n % 2 == 1 { 1 } else { -1 };
    let qd_expected =
        &Poly::from(sign * (n as i64 - 1)) * &Poly::from_i64s(&[1, 1]).pow(n as u32 - 2);
    if let Some(w) = poly_witness(&det_bareiss(&build_full_qd(t)), &qd_expected) {
        return CheckResult::fail(name, format!("det qD, {w}"));
    }
    let ed_expected = one_minus_q2().pow(n as u32 - 1);
    CheckResult::from_witness(
        name,
        poly_witness(&det_bareiss(&build_full_ed(t)), &ed_expected).map(|w| format!("det eD, {w}")),
    )
}

/// Which of the heavier checks a suite run includes.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct SuiteOptions {
    /// Compare both inverse formulas with Gauss-Jordan.
    pub oracle: bool,
    pub attachments: bool,
    pub blocks: bool,
    pub full_matrices: bool,
}

impl Default for SuiteOptions {
    fn default() -> Self {
        SuiteOptions {
            oracle: true,
            attachments: true,
            blocks: true,
            full_matrices: true,
        }
    }
}

/// Every applicable symbolic check on one tree.
pub fn run_suite(mt: &MatchedTree, opts: SuiteOptions) -> VerificationReport {
    let mut checks = vec![
        check_det_e(mt),
        check_det_ql(mt),
        check_bdq(mt),
        check_sum_mu(mt),
        check_row_col_sums(mt),
        check_b_tau(mt),
        check_ql_qb_product(mt),
        check_inverse_e(mt, opts.oracle),
        check_inverse_qb(mt, opts.oracle),
    ];
    if opts.attachments {
        checks.push(check_attach_update(mt));
    }
    if opts.blocks {
        checks.extend(check_block_decomposition(mt));
    }
    checks.push(check_q1_properties(mt));
    if opts.full_matrices {
        checks.push(check_full_dq_ed(mt.tree()));
    }
    VerificationReport {
        tree: mt.code_hex(),
        p: Some(mt.p()),
        checks,
    }
}

/// Suite over every nonsingular tree with `1 <= p <= p_max`, ordered by `p`
/// and then canonical code.
pub fn run_enumerated(p_max: usize, opts: SuiteOptions) -> Vec<VerificationReport> {
    (1..=p_max)
        .flat_map(|p| {
            enumerate_nonsingular(p)
                .par_iter()
                .map(|mt| run_suite(mt, opts))
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Full-matrix determinant check over every tree with `2 <= n <= n_max`.
pub fn run_full_trees(n_max: usize) -> Vec<VerificationReport> {
    (2..=n_max)
        .flat_map(|n| {
            all_trees(n)
                .par_iter()
                .map(|t| VerificationReport {
                    tree: hex::encode(t.canonical_code()),
                    p: None,
                    checks: vec![check_full_dq_ed(t)],
                })
                .collect::<Vec<_>>()
        })
        .collect()
}

/// Default evaluation points for random runs.
pub fn default_q_points() -> Vec<BigRational> {
    [(2, 1), (1, 2), (3, 1), (-2, 1), (5, 3)]
        .into_iter()
        .map(|(a, b)| BigRational::new(BigInt::from(a), BigInt::from(b)))
        .collect()
}

fn rat_vec_witness(lhs: &[BigRational], rhs: &BigRational) -> Option<String> {
    lhs.iter().position(|x| x != rhs).map(|i| {
        format!(
            "entry {}: residual {}",
            i + 1,
            format_rational(&(&lhs[i] - rhs))
        )
    })
}

/// Entry of `ints / den` that differs from `expected(i, j)`.
fn scaled_witness(
    m: &crate::matrix::ScaledMat,
    expected: impl Fn(usize, usize) -> BigRational + Sync,
) -> Option<String> {
    let (r, c) = (m.ints.rows(), m.ints.cols());
    (0..r * c)
        .into_par_iter()
        .find_first(|&k| {
            let (i, j) = (k / c, k % c);
            let e = expected(i, j);
            m.ints.get(i, j) * e.denom() != e.numer() * &m.den
        })
        .map(|k| {
            let (i, j) = (k / c, k % c);
            let got = BigRational::new(m.ints.get(i, j).clone(), m.den.clone());
            format!(
                "entry ({}, {}): residual {}",
                i + 1,
                j + 1,
                format_rational(&(got - expected(i, j)))
            )
        })
}

/// The product identities of the suite evaluated exactly at each `q0`.
pub fn run_evaluated(mt: &MatchedTree, q_points: &[BigRational]) -> VerificationReport {
    let bd_poly = bdq_recursive(mt);
    let p = mt.p();
    let mut checks = Vec::new();
    for q0 in q_points {
        let tag = format_rational(q0);
        let named = |n: &str| format!("{n}@{tag}");
        let qb = build_qb_at(mt, q0);
        let e = build_e_at(mt, q0);
        let ql = build_ql_at(mt, q0);
        let (tl, tr) = qtau_at(mt, q0);
        let bd = bd_poly.eval(q0);
        let one = BigRational::one();
        let q2 = q0 * q0;
        let one_plus_q = &one + q0;

        let bt = qb
            .mul_vec(&tr)
            .ok()
            .and_then(|v| rat_vec_witness(v.entries(), &bd).map(|w| format!("qB tau_r, {w}")))
            .or_else(|| {
                qb.vec_mul(&tl).ok().and_then(|v| {
                    rat_vec_witness(v.entries(), &bd).map(|w| format!("tau_l^t qB, {w}"))
                })
            });
        checks.push(CheckResult::from_witness(&named("B_tau"), bt));

        let c = &one - &q2;
        let cols = ql.col_sums();
        let rows = ql.row_sums();
        let rc = (0..p)
            .find(|&j| cols.get(j) != &(&c * tl.get(j)))
            .map(|j| {
                format!(
                    "column {} residual {}",
                    j + 1,
                    format_rational(&(cols.get(j) - &c * tl.get(j)))
                )
            })
            .or_else(|| {
                (0..p).find(|&i| rows.get(i) != &(&c * tr.get(i))).map(|i| {
                    format!(
                        "row {} residual {}",
                        i + 1,
                        format_rational(&(rows.get(i) - &c * tr.get(i)))
                    )
                })
            });
        checks.push(CheckResult::from_witness(&named("row_col_sums"), rc));

        let ql_s = ql.to_scaled();
        let qb_s = qb.to_scaled();
        let product = ql_s.mul(&qb_s).map(|prod| {
            let diag = q0 * &one_plus_q;
            // qL qB = (1 + q) tau_r 1^t - q (1 + q) I
            scaled_witness(&prod, |i, j| {
                let t = &one_plus_q * tr.get(i);
                if i == j {
                    t - &diag
                } else {
                    t
                }
            })
        });
        checks.push(match product {
            Ok(w) => CheckResult::from_witness(&named("ql_qb_product"), w),
            Err(err) => CheckResult::fail(named("ql_qb_product"), err.to_string()),
        });

        let e_den = q0 * &c;
        let inv_e = if e_den.is_zero() {
            Err(format!("q = {tag} is excluded: q must avoid 0, 1 and -1"))
        } else {
            let mut inv = ql_s.clone();
            inv.ints = inv.ints.map(|x| x * e_den.denom());
            inv.den = &inv.den * e_den.numer();
            e.to_scaled()
                .mul(&inv)
                .map_err(|err| err.to_string())
                .map(|prod| identity_witness(&prod))
        };
        checks.push(match inv_e {
            Ok(w) => CheckResult::from_witness(&named("inverse_E"), w),
            Err(w) => CheckResult::fail(named("inverse_E"), w),
        });

        let qb_den = q0 * &one_plus_q;
        let inv_qb = if qb_den.is_zero() {
            Err(format!("q = {tag} is excluded: q must avoid 0 and -1"))
        } else if bd.is_zero() {
            Err(format!("bd_q vanishes at q = {tag}"))
        } else {
            let a = -(&one / &qb_den);
            let b = &one / (q0 * &bd);
            let inv = QMat::from_fn(p, p, IndexKind::R, IndexKind::L, |i, j| {
                &a * ql.get(i, j) + &b * tr.get(i) * tl.get(j)
            });
            qb_s.mul(&inv.to_scaled())
                .map_err(|err| err.to_string())
                .map(|prod| identity_witness(&prod))
        };
        checks.push(match inv_qb {
            Ok(w) => CheckResult::from_witness(&named("inverse_qB"), w),
            Err(w) => CheckResult::fail(named("inverse_qB"), w),
        });
    }
    VerificationReport {
        tree: mt.code_hex(),
        p: Some(p),
        checks,
    }
}

fn identity_witness(m: &crate::matrix::ScaledMat) -> Option<String> {
    let one = BigRational::one();
    let zero = BigRational::zero();
    scaled_witness(m, |i, j| if i == j { one.clone() } else { zero.clone() })
}

/// Evaluated identities on `trials` random trees with seeds `seed, seed+1, ...`.
pub fn run_random(
    p: usize,
    trials: usize,
    seed: u64,
    q_points: &[BigRational],
) -> Vec<VerificationReport> {
    (0..trials as u64)
        .into_par_iter()
        .map(|t| run_evaluated(&random_nonsingular(p, seed + t), q_points))
        .collect()
}

/// Conjecture evidence for the bipartite Laplacian at `q = 1` of one tree.
#[derive(Clone, Debug, PartialEq)]
pub struct ConjectureRow {
    pub tree: MatchedTree,
    pub evidence: ConjectureEvidence,
}

impl ConjectureRow {
    pub fn holds(&self) -> bool {
        self.evidence.diagonalizable && self.evidence.all_eigen_nonneg
    }
}

/// Evidence rows for every nonsingular tree with `1 <= p <= p_max`.
pub fn run_conjecture(p_max: usize) -> Vec<ConjectureRow> {
    (1..=p_max)
        .flat_map(|p| {
            enumerate_nonsingular(p)
                .into_par_iter()
                .map(|mt| {
                    let evidence = conjecture_evidence(&laplacian_q1(&mt));
                    ConjectureRow { tree: mt, evidence }
                })
                .collect::<Vec<_>>()
        })
        .collect()
}
