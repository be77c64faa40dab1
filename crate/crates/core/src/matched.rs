//! Nonsingular trees: a tree together with its unique perfect matching and a
//! standard `(L, R)` labeling in which `l_i` is matched to `r_i`.
//!
//! A path is *alternating* when its edges alternate between matching and
//! non-matching edges and both its first and last edges belong to the
//! matching. Such a path with `k` matching edges has `k - 1` non-matching
//! edges and joins an `L` vertex to an `R` vertex. It is *odd* or *even*
//! according to the parity of `k`. The trivial path of length zero is not
//! alternating.

use std::collections::{BTreeMap, VecDeque};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::tree::Tree;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    L,
    R,
}

impl Side {
    pub fn opposite(self) -> Side {
        match self {
            Side::L => Side::R,
            Side::R => Side::L,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Alternation {
    OddAlternating,
    EvenAlternating,
    NotAlternating,
}

/// Classification of a tree path between two distinct vertices.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PathClass {
    pub alternation: Alternation,
    /// The path is a single edge.
    pub adjacent: bool,
    /// The path is a single matching edge.
    pub matching_edge: bool,
}

/// Unique perfect matching of a tree by repeated leaf stripping: a leaf must be
/// matched to its only neighbor, after which both are removed.
pub fn perfect_matching(t: &Tree) -> Result<Vec<(usize, usize)>> {
    let n = t.n();
    if n % 2 == 1 {
        return Err(Error::NotNonsingular);
    }
    let mut deg: Vec<usize> = (0..n).map(|v| t.degree(v)).collect();
    let mut removed = vec![false; n];
    let mut queue: VecDeque<usize> = (0..n).filter(|&v| deg[v] == 1).collect();
    let mut pairs = Vec::with_capacity(n / 2);
    while let Some(v) = queue.pop_front() {
        if removed[v] {
            continue;
        }
        let u = t
            .neighbors(v)
            .iter()
            .copied()
            .find(|&w| !removed[w])
            .ok_or(Error::NotNonsingular)?;
        removed[v] = true;
        removed[u] = true;
        pairs.push((v.min(u), v.max(u)));
        for &w in t.neighbors(u) {
            if removed[w] {
                continue;
            }
            deg[w] -= 1;
            match deg[w] {
                0 => return Err(Error::NotNonsingular),
                1 => queue.push_back(w),
                _ => {}
            }
        }
    }
    if pairs.len() * 2 != n {
        return Err(Error::NotNonsingular);
    }
    pairs.sort_unstable();
    Ok(pairs)
}

/// A nonsingular tree with a standard vertex bipartition.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MatchedTree {
    tree: Tree,
    mate: Vec<usize>,
    side: Vec<Side>,
    index: Vec<usize>,
    left: Vec<usize>,
    right: Vec<usize>,
}

impl MatchedTree {
    /// Find the perfect matching and apply [`standard_labeling`].
    pub fn new(tree: Tree) -> Result<MatchedTree> {
        let m = perfect_matching(&tree)?;
        Ok(standard_labeling(tree, &m))
    }

    /// Build from an explicit labeling: `left[i]` and `right[i]` are the
    /// vertices `l_{i+1}` and `r_{i+1}`.
    pub fn with_labels(tree: Tree, left: Vec<usize>, right: Vec<usize>) -> Result<MatchedTree> {
        let n = tree.n();
        if left.len() != right.len() || 2 * left.len() != n {
            return Err(Error::InvalidLabels(format!(
                "{} L labels and {} R labels for {} vertices",
                left.len(),
                right.len(),
                n
            )));
        }
        let mut side = vec![None; n];
        let mut index = vec![0; n];
        let mut mate = vec![0; n];
        for (i, (&l, &r)) in left.iter().zip(&right).enumerate() {
            for (v, s) in [(l, Side::L), (r, Side::R)] {
                if v >= n {
                    return Err(Error::InvalidVertex(v));
                }
                if side[v].is_some() {
                    return Err(Error::InvalidLabels(format!("vertex {v} labeled twice")));
                }
                side[v] = Some(s);
                index[v] = i;
            }
            if !tree.adjacent(l, r) {
                return Err(Error::InvalidLabels(format!(
                    "l{} = {l} and r{} = {r} are not adjacent",
                    i + 1,
                    i + 1
                )));
            }
            mate[l] = r;
            mate[r] = l;
        }
        let side: Vec<Side> = side.into_iter().map(|s| s.expect("all labeled")).collect();
        if let Some(&(u, v)) = tree.edges().iter().find(|&&(u, v)| side[u] == side[v]) {
            return Err(Error::InvalidLabels(format!(
                "edge [{u},{v}] joins two vertices on the same side"
            )));
        }
        Ok(MatchedTree {
            tree,
            mate,
            side,
            index,
            left,
            right,
        })
    }

    /// The path `P_2` with `l_1 = 0` and `r_1 = 1`.
    pub fn p2() -> MatchedTree {
        let tree = Tree::from_edges(&[(0, 1)]).expect("an edge is a tree");
        MatchedTree::with_labels(tree, vec![0], vec![1]).expect("valid labels")
    }

    pub fn tree(&self) -> &Tree {
        &self.tree
    }

    /// Number of matching pairs; the tree has `2p` vertices.
    pub fn p(&self) -> usize {
        self.left.len()
    }

    pub fn n(&self) -> usize {
        self.tree.n()
    }

    pub fn mate(&self, v: usize) -> usize {
        self.mate[v]
    }

    pub fn side(&self, v: usize) -> Side {
        self.side[v]
    }

    /// 0-based label index: `v` is `l_{index+1}` or `r_{index+1}`.
    pub fn index(&self, v: usize) -> usize {
        self.index[v]
    }

    pub fn left(&self) -> &[usize] {
        &self.left
    }

    pub fn right(&self) -> &[usize] {
        &self.right
    }

    pub fn l(&self, i: usize) -> usize {
        self.left[i]
    }

    pub fn r(&self, i: usize) -> usize {
        self.right[i]
    }

    /// Vertices of side `s` in label order.
    pub fn vertices_of(&self, s: Side) -> &[usize] {
        match s {
            Side::L => &self.left,
            Side::R => &self.right,
        }
    }

    pub fn degree(&self, v: usize) -> usize {
        self.tree.degree(v)
    }

    /// Matching edges `(l_i, r_i)` in label order.
    pub fn matching(&self) -> Vec<(usize, usize)> {
        self.left
            .iter()
            .copied()
            .zip(self.right.iter().copied())
            .collect()
    }

    pub fn is_matching_edge(&self, u: usize, v: usize) -> bool {
        self.mate[u] == v
    }

    pub fn canonical_code(&self) -> Vec<u8> {
        self.tree.canonical_code()
    }

    pub fn code_hex(&self) -> String {
        hex::encode(self.canonical_code())
    }

    /// All-pairs distances.
    pub fn distances(&self) -> Vec<Vec<usize>> {
        self.tree.distances()
    }

    /// Walk the unique `u`-`v` path and classify it.
    pub fn classify_path(&self, u: usize, v: usize) -> PathClass {
        assert_ne!(u, v, "classify_path needs distinct endpoints");
        let path = self.tree.path_between(u, v);
        let edges: Vec<bool> = path
            .windows(2)
            .map(|w| self.is_matching_edge(w[0], w[1]))
            .collect();
        let adjacent = edges.len() == 1;
        let matching_edge = adjacent && edges[0];
        let alternates = edges.windows(2).all(|w| w[0] != w[1]);
        let ends_matched = edges[0] && edges[edges.len() - 1];
        let alternation = if alternates && ends_matched {
            let k = edges.iter().filter(|&&m| m).count();
            if k % 2 == 1 {
                Alternation::OddAlternating
            } else {
                Alternation::EvenAlternating
            }
        } else {
            Alternation::NotAlternating
        };
        PathClass {
            alternation,
            adjacent,
            matching_edge,
        }
    }

    /// For every vertex `x`, the number of matching edges on the `source`-`x`
    /// path when that path is alternating, and `None` otherwise.
    ///
    /// Runs in linear time by following only alternating continuations: from a
    /// vertex reached by a matching edge, step along any non-matching edge and
    /// then the forced matching edge.
    pub fn alternating_from(&self, source: usize) -> Vec<Option<usize>> {
        let mut out = vec![None; self.n()];
        let first = self.mate[source];
        out[first] = Some(1);
        // (vertex reached by a matching edge, its predecessor, matching-edge count)
        let mut stack = vec![(first, source, 1usize)];
        while let Some((x, prev, k)) = stack.pop() {
            for &y in self.tree.neighbors(x) {
                if y == prev || self.mate[x] == y {
                    continue;
                }
                let z = self.mate[y];
                out[z] = Some(k + 1);
                stack.push((z, y, k + 1));
            }
        }
        out
    }

    /// `|even alternating paths from v| - |odd alternating paths from v|`.
    pub fn diff(&self, v: usize) -> i64 {
        self.alternating_from(v)
            .into_iter()
            .flatten()
            .map(|k| if k % 2 == 0 { 1 } else { -1 })
            .sum()
    }

    /// `diff` at every vertex, indexed by vertex id.
    pub fn diffs(&self) -> Vec<i64> {
        (0..self.n()).map(|v| self.diff(v)).collect()
    }

    /// Attach a new `P_2` at `v`: new vertices `u` (joined to `v`) and `w`
    /// (joined to `u`), with `[u, w]` matched. If `v` is in `L` then
    /// `u = r_{p+1}` and `w = l_{p+1}`; otherwise `u = l_{p+1}` and
    /// `w = r_{p+1}`.
    pub fn attach_p2(&self, v: usize) -> Result<MatchedTree> {
        if v >= self.n() {
            return Err(Error::InvalidVertex(v));
        }
        let mut tree = self.tree.clone();
        let u = tree.push_leaf(v);
        let w = tree.push_leaf(u);
        let mut out = self.clone();
        out.tree = tree;
        out.mate.extend([w, u]);
        let i = self.p();
        out.index.extend([i, i]);
        match self.side[v] {
            Side::L => {
                out.side.extend([Side::R, Side::L]);
                out.right.push(u);
                out.left.push(w);
            }
            Side::R => {
                out.side.extend([Side::L, Side::R]);
                out.left.push(u);
                out.right.push(w);
            }
        }
        Ok(out)
    }

    /// Inverse of [`attach_p2`](Self::attach_p2): remove a pendant `P_2`,
    /// i.e. a leaf `w` whose partner `u` has degree 2. Among the candidates the
    /// pair with the largest label index is removed.
    pub fn detach_p2(&self) -> Result<Detached> {
        if self.p() < 2 {
            return Err(Error::DimensionMismatch(
                "detach_p2 needs at least two matching pairs".into(),
            ));
        }
        let (pair, w, u) = (0..self.p())
            .rev()
            .find_map(|i| {
                let (l, r) = (self.left[i], self.right[i]);
                if self.degree(l) == 1 && self.degree(r) == 2 {
                    Some((i, l, r))
                } else if self.degree(r) == 1 && self.degree(l) == 2 {
                    Some((i, r, l))
                } else {
                    None
                }
            })
            .expect("a longest path ends in a pendant P2");
        let site_old = self
            .tree
            .neighbors(u)
            .iter()
            .copied()
            .find(|&x| x != w)
            .expect("u has degree 2");
        let shift = |x: usize| x - usize::from(x > u) - usize::from(x > w);
        let edges: Vec<_> = self
            .tree
            .edges()
            .iter()
            .filter(|&&(a, b)| a != u && a != w && b != u && b != w)
            .map(|&(a, b)| (shift(a), shift(b)))
            .collect();
        let tree = Tree::from_edges(&edges)?;
        let keep = |xs: &[usize]| -> Vec<usize> {
            xs.iter()
                .enumerate()
                .filter(|&(i, _)| i != pair)
                .map(|(_, &x)| shift(x))
                .collect()
        };
        let smaller = MatchedTree::with_labels(tree, keep(&self.left), keep(&self.right))?;
        Ok(Detached {
            tree: smaller,
            site: shift(site_old),
            removed_pair: pair,
            removed: (u, w),
        })
    }

    /// Apply a vertex permutation (`v` becomes `perm[v]`) keeping labels.
    pub fn relabel_vertices(&self, perm: &[usize]) -> Result<MatchedTree> {
        let tree = self.tree.relabel(perm)?;
        let left = self.left.iter().map(|&v| perm[v]).collect();
        let right = self.right.iter().map(|&v| perm[v]).collect();
        MatchedTree::with_labels(tree, left, right)
    }

    /// Reorder the matching pairs: new pair `i` is old pair `order[i]`.
    /// When `swap_sides` is set, `L` and `R` are exchanged as well.
    pub fn reorder_pairs(&self, order: &[usize], swap_sides: bool) -> Result<MatchedTree> {
        let pick = |xs: &[usize]| -> Vec<usize> { order.iter().map(|&i| xs[i]).collect() };
        let (mut l, mut r) = (pick(&self.left), pick(&self.right));
        if swap_sides {
            std::mem::swap(&mut l, &mut r);
        }
        MatchedTree::with_labels(self.tree.clone(), l, r)
    }
}

/// Result of [`MatchedTree::detach_p2`].
#[derive(Clone, Debug)]
pub struct Detached {
    pub tree: MatchedTree,
    /// Attachment site in the smaller tree's vertex ids.
    pub site: usize,
    /// 0-based label index of the removed pair in the larger tree.
    pub removed_pair: usize,
    /// Removed vertices `(u, w)` in the larger tree's ids; `u` was adjacent to
    /// the site and `w` was a leaf.
    pub removed: (usize, usize),
}

/// Standard labeling: 2-color from vertex 0 (which goes to `L`), then number
/// the matching pairs by ascending id of their `L` endpoint.
pub fn standard_labeling(tree: Tree, matching: &[(usize, usize)]) -> MatchedTree {
    let side: Vec<Side> = tree
        .distances_from(0)
        .into_iter()
        .map(|d| if d % 2 == 0 { Side::L } else { Side::R })
        .collect();
    let mut pairs: Vec<(usize, usize)> = matching
        .iter()
        .map(|&(a, b)| if side[a] == Side::L { (a, b) } else { (b, a) })
        .collect();
    pairs.sort_unstable();
    let (left, right) = pairs.into_iter().unzip();
    MatchedTree::with_labels(tree, left, right)
        .expect("a perfect matching gives a standard labeling")
}

/// Every isomorphism class of nonsingular trees on `2p` vertices, generated by
/// closing `{P_2}` under `P_2`-attachment. Representatives are in canonical form
/// with the standard labeling; the list is sorted by canonical code.
pub fn enumerate_nonsingular(p: usize) -> Vec<MatchedTree> {
    assert!(p >= 1, "p must be positive");
    let mut level = vec![MatchedTree::new(Tree::path(2).canonical_form()).expect("P2")];
    for _ in 1..p {
        let grown: Vec<(Vec<u8>, Tree)> = level
            .par_iter()
            .flat_map_iter(|mt| {
                (0..mt.n()).map(move |v| {
                    let t = mt.attach_p2(v).expect("vertex in range").tree;
                    (t.canonical_code(), t)
                })
            })
            .collect();
        let mut classes: BTreeMap<Vec<u8>, Tree> = BTreeMap::new();
        for (code, t) in grown {
            classes.entry(code).or_insert(t);
        }
        level = classes
            .into_values()
            .map(|t| {
                MatchedTree::new(t.canonical_form()).expect("attachment keeps a perfect matching")
            })
            .collect();
    }
    level
}

/// Random nonsingular tree: start from `P_2` and attach `p - 1` new `P_2`s at
/// uniformly chosen vertices, using a ChaCha8 generator seeded with `seed`.
pub fn random_nonsingular(p: usize, seed: u64) -> MatchedTree {
    assert!(p >= 1, "p must be positive");
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut mt = MatchedTree::p2();
    for _ in 1..p {
        let v = rng.gen_range(0..mt.n());
        mt = mt.attach_p2(v).expect("vertex in range");
    }
    mt
}

/// Corona test: `T = F o K_1` exactly when every matching edge has a leaf
/// endpoint.
pub fn is_corona(mt: &MatchedTree) -> bool {
    mt.matching()
        .into_iter()
        .all(|(l, r)| mt.degree(l) == 1 || mt.degree(r) == 1)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn p4_path() -> MatchedTree {
        MatchedTree::new(Tree::path(4)).unwrap()
    }

    #[test]
    fn matching_examples() {
        assert_eq!(perfect_matching(&Tree::path(2)).unwrap(), vec![(0, 1)]);
        assert_eq!(
            perfect_matching(&Tree::path(4)).unwrap(),
            vec![(0, 1), (2, 3)]
        );
        let star = Tree::from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert!(matches!(
            perfect_matching(&star),
            Err(Error::NotNonsingular)
        ));
        assert!(matches!(
            perfect_matching(&Tree::path(3)),
            Err(Error::NotNonsingular)
        ));
    }

    #[test]
    fn standard_labeling_examples() {
        let p2 = MatchedTree::new(Tree::path(2)).unwrap();
        assert_eq!((p2.left(), p2.right()), (&[0][..], &[1][..]));
        let p4 = p4_path();
        assert_eq!((p4.left(), p4.right()), (&[0, 2][..], &[1, 3][..]));
        let p6 = MatchedTree::new(Tree::path(6)).unwrap();
        assert_eq!((p6.left(), p6.right()), (&[0, 2, 4][..], &[1, 3, 5][..]));
    }

    #[test]
    fn distance_examples() {
        let p4 = p4_path();
        let d = p4.distances();
        assert_eq!(d[p4.l(0)][p4.r(0)], 1);
        assert_eq!(d[p4.l(1)][p4.r(0)], 1);
        assert_eq!(d[p4.l(0)][p4.r(1)], 3);
    }

    #[test]
    fn classify_examples() {
        let p4 = p4_path();
        let c = p4.classify_path(p4.r(0), p4.l(1));
        assert_eq!(c.alternation, Alternation::NotAlternating);
        assert!(c.adjacent && !c.matching_edge);
        let c = p4.classify_path(p4.l(0), p4.r(1));
        assert_eq!(c.alternation, Alternation::EvenAlternating);
        for i in 0..2 {
            let c = p4.classify_path(p4.l(i), p4.r(i));
            assert_eq!(c.alternation, Alternation::OddAlternating);
            assert!(c.matching_edge);
        }
    }

    #[test]
    fn diff_examples() {
        assert_eq!(MatchedTree::p2().diff(0), -1);
        // P4 as P2 with a new P2 at l1: r1 - l1 - r2 - l2
        let p4 = MatchedTree::p2().attach_p2(0).unwrap();
        assert_eq!(p4.diff(p4.r(0)), 0);
        assert_eq!(p4.diff(p4.l(1)), 0);
        assert_eq!(p4.diff(p4.l(0)), -1);
        assert_eq!(p4.diff(p4.r(1)), -1);
    }

    #[test]
    fn attach_labels_follow_the_side_of_the_site() {
        let p2 = MatchedTree::p2();
        let a = p2.attach_p2(0).unwrap();
        assert!(a.tree().adjacent(a.r(1), a.l(0)));
        assert_eq!(a.degree(a.l(1)), 1);
        let b = p2.attach_p2(1).unwrap();
        assert!(b.tree().adjacent(b.l(1), b.r(0)));
        let p6 = a.attach_p2(a.l(1)).unwrap();
        assert_eq!(p6.canonical_code(), Tree::path(6).canonical_code());
    }

    #[test]
    fn detach_examples() {
        let p4 = p4_path();
        let d = p4.detach_p2().unwrap();
        assert_eq!(d.tree.p(), 1);
        // pair (l2, r2) = (2, 3) goes; the site is r1 = 1
        assert_eq!(d.removed, (2, 3));
        assert_eq!(d.site, 1);
        assert_eq!(d.tree.side(d.site), Side::R);
        let p6 = MatchedTree::new(Tree::path(6)).unwrap();
        let d = p6.detach_p2().unwrap();
        assert_eq!(d.tree.canonical_code(), Tree::path(4).canonical_code());
        assert_eq!(d.tree.degree(d.site), 1);
        assert!(MatchedTree::p2().detach_p2().is_err());
    }

    #[test]
    fn attach_then_detach_round_trips() {
        let base = random_nonsingular(6, 3);
        for v in 0..base.n() {
            let d = base.attach_p2(v).unwrap().detach_p2().unwrap();
            assert_eq!(d.tree, base);
            assert_eq!(d.site, v);
        }
    }

    #[test]
    fn enumeration_small_levels() {
        assert_eq!(enumerate_nonsingular(1).len(), 1);
        assert_eq!(enumerate_nonsingular(2).len(), 1);
        let three = enumerate_nonsingular(3);
        assert!(three
            .iter()
            .any(|t| t.canonical_code() == Tree::path(6).canonical_code()));
    }

    #[test]
    fn random_is_deterministic() {
        assert_eq!(random_nonsingular(1, 99), MatchedTree::p2());
        assert_eq!(random_nonsingular(5, 7), random_nonsingular(5, 7));
        let big = random_nonsingular(100, 1);
        assert_eq!(big.n(), 200);
        assert_eq!(perfect_matching(big.tree()).unwrap().len(), 100);
    }

    #[test]
    fn with_labels_rejects_bad_input() {
        let t = Tree::path(4);
        assert!(MatchedTree::with_labels(t.clone(), vec![0, 2], vec![1, 3]).is_ok());
        assert!(MatchedTree::with_labels(t.clone(), vec![0, 3], vec![1, 2]).is_err());
        assert!(MatchedTree::with_labels(t.clone(), vec![0], vec![1]).is_err());
        assert!(MatchedTree::with_labels(t, vec![1, 2], vec![0, 3]).is_err());
    }

    #[test]
    fn corona_detection() {
        assert!(is_corona(&MatchedTree::p2()));
        assert!(is_corona(&p4_path()));
        assert!(!is_corona(&MatchedTree::new(Tree::path(6)).unwrap()));
    }
}
