//! Unlabeled-tree plumbing: validation, all-pairs distances, AHU canonical
//! codes and isomorphism-class enumeration.

use std::collections::{BTreeMap, VecDeque};

use crate::error::{Error, Result};

/// A finite tree on vertices `0..n`.
#[derive(Clone, PartialEq, Eq, Debug)]
pub struct Tree {
    n: usize,
    edges: Vec<(usize, usize)>,
    adj: Vec<Vec<usize>>,
}

impl Tree {
    /// Validate an edge list. The vertex count is `edges.len() + 1`.
    pub fn from_edges(edges: &[(usize, usize)]) -> Result<Tree> {
        let n = edges.len() + 1;
        let mut adj = vec![Vec::new(); n];
        let mut norm = Vec::with_capacity(edges.len());
        for &(u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::NotATree(format!(
                    "edge [{u},{v}] uses an id outside 0..{n}"
                )));
            }
            if u == v {
                return Err(Error::NotATree(format!("self-loop at {u}")));
            }
            norm.push((u.min(v), u.max(v)));
            adj[u].push(v);
            adj[v].push(u);
        }
        norm.sort_unstable();
        if let Some(w) = norm.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::NotATree(format!(
                "duplicate edge [{},{}]",
                w[0].0, w[0].1
            )));
        }
        for a in &mut adj {
            a.sort_unstable();
        }
        let t = Tree {
            n,
            edges: norm,
            adj,
        };
        let reached = t.bfs_order(0).len();
        if reached != n {
            return Err(Error::NotATree(format!(
                "disconnected: {reached} of {n} vertices reachable from 0"
            )));
        }
        Ok(t)
    }

    pub fn single_vertex() -> Tree {
        Tree {
            n: 1,
            edges: Vec::new(),
            adj: vec![Vec::new()],
        }
    }

    pub fn path(n: usize) -> Tree {
        assert!(n >= 1);
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Tree::from_edges(&edges).expect("a path is a tree")
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Edges with `u < v`, sorted lexicographically.
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    pub fn neighbors(&self, v: usize) -> &[usize] {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.adj[u].binary_search(&v).is_ok()
    }

    /// Add a new vertex joined to `v`; returns its id.
    pub(crate) fn push_leaf(&mut self, v: usize) -> usize {
        let u = self.n;
        self.n += 1;
        self.adj.push(vec![v]);
        self.adj[v].push(u);
        self.adj[v].sort_unstable();
        self.edges.push((v.min(u), v.max(u)));
        self.edges.sort_unstable();
        u
    }

    fn bfs_order(&self, root: usize) -> Vec<usize> {
        let mut seen = vec![false; self.n];
        let mut order = Vec::with_capacity(self.n);
        let mut queue = VecDeque::from([root]);
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            order.push(v);
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    queue.push_back(w);
                }
            }
        }
        order
    }

    /// Parent pointers of the tree rooted at `root` (`usize::MAX` at the root).
    pub fn parents(&self, root: usize) -> Vec<usize> {
        let mut parent = vec![usize::MAX; self.n];
        let mut queue = VecDeque::from([root]);
        let mut seen = vec![false; self.n];
        seen[root] = true;
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if !seen[w] {
                    seen[w] = true;
                    parent[w] = v;
                    queue.push_back(w);
                }
            }
        }
        parent
    }

    /// Vertices on the unique `u`-`v` path, from `u` to `v`.
    pub fn path_between(&self, u: usize, v: usize) -> Vec<usize> {
        let parent = self.parents(v);
        let mut path = vec![u];
        let mut x = u;
        while x != v {
            x = parent[x];
            path.push(x);
        }
        path
    }

    pub fn distances_from(&self, root: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.n];
        dist[root] = 0;
        let mut queue = VecDeque::from([root]);
        while let Some(v) = queue.pop_front() {
            for &w in &self.adj[v] {
                if dist[w] == usize::MAX {
                    dist[w] = dist[v] + 1;
                    queue.push_back(w);
                }
            }
        }
        dist
    }

    /// All-pairs distances, one breadth-first search per vertex.
    pub fn distances(&self) -> Vec<Vec<usize>> {
        (0..self.n).map(|v| self.distances_from(v)).collect()
    }

    /// One or two centroids, ascending.
    pub fn centroids(&self) -> Vec<usize> {
        let order = self.bfs_order(0);
        let parent = self.parents(0);
        let mut size = vec![1usize; self.n];
        for &v in order.iter().rev() {
            if parent[v] != usize::MAX {
                size[parent[v]] += size[v];
            }
        }
        let mut out = Vec::new();
        for v in 0..self.n {
            let mut heaviest = self.n - size[v];
            for &w in &self.adj[v] {
                if w != parent[v] {
                    heaviest = heaviest.max(size[w]);
                }
            }
            if 2 * heaviest <= self.n {
                out.push(v);
            }
        }
        out
    }

    /// AHU encoding of the tree rooted at `root`: `(` children-sorted `)`.
    pub fn rooted_code(&self, root: usize) -> Vec<u8> {
        self.rooted_codes(root)[root].clone()
    }

    fn rooted_codes(&self, root: usize) -> Vec<Vec<u8>> {
        let order = self.bfs_order(root);
        let parent = self.parents(root);
        let mut codes: Vec<Vec<u8>> = vec![Vec::new(); self.n];
        for &v in order.iter().rev() {
            let mut kids: Vec<&Vec<u8>> = self.adj[v]
                .iter()
                .filter(|&&w| w != parent[v])
                .map(|&w| &codes[w])
                .collect();
            kids.sort();
            let mut c = Vec::with_capacity(2 + kids.iter().map(|k| k.len()).sum::<usize>());
            c.push(b'(');
            for k in kids {
                c.extend_from_slice(k);
            }
            c.push(b')');
            codes[v] = c;
        }
        codes
    }

    /// Canonical code: the smaller AHU encoding over the centroids. Two trees
    /// have equal codes exactly when they are isomorphic.
    pub fn canonical_code(&self) -> Vec<u8> {
        self.centroids()
            .into_iter()
            .map(|c| self.rooted_code(c))
            .min()
            .expect("every tree has a centroid")
    }

    /// Isomorphic copy whose vertex ids follow the preorder of the canonical
    /// rooted encoding (children visited in code order).
    pub fn canonical_form(&self) -> Tree {
        let root = self
            .centroids()
            .into_iter()
            .min_by_key(|&c| self.rooted_code(c))
            .expect("every tree has a centroid");
        let codes = self.rooted_codes(root);
        let parent = self.parents(root);
        let mut new_id = vec![usize::MAX; self.n];
        let mut next = 0;
        let mut stack = vec![root];
        while let Some(v) = stack.pop() {
            new_id[v] = next;
            next += 1;
            let mut kids: Vec<usize> = self.adj[v]
                .iter()
                .copied()
                .filter(|&w| w != parent[v])
                .collect();
            kids.sort_by(|&a, &b| codes[a].cmp(&codes[b]).then(a.cmp(&b)));
            stack.extend(kids.into_iter().rev());
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (new_id[u], new_id[v]))
            .collect();
        Tree::from_edges(&edges).expect("relabeling preserves tree structure")
    }

    /// Relabel vertices: vertex `v` becomes `perm[v]`.
    pub fn relabel(&self, perm: &[usize]) -> Result<Tree> {
        if perm.len() != self.n {
            return Err(Error::DimensionMismatch(format!(
                "permutation of length {} for {} vertices",
                perm.len(),
                self.n
            )));
        }
        let edges: Vec<_> = self
            .edges
            .iter()
            .map(|&(u, v)| (perm[u], perm[v]))
            .collect();
        Tree::from_edges(&edges)
    }
}

/// One representative (in canonical form) of every isomorphism class of trees
/// on `n` vertices, sorted by canonical code.
pub fn all_trees(n: usize) -> Vec<Tree> {
    assert!(n >= 1);
    let mut level = vec![Tree::single_vertex()];
    for _ in 1..n {
        let mut next: BTreeMap<Vec<u8>, Tree> = BTreeMap::new();
        for t in &level {
            for v in 0..t.n() {
                let mut grown = t.clone();
                grown.push_leaf(v);
                next.entry(grown.canonical_code())
                    .or_insert_with(|| grown.canonical_form());
            }
        }
        level = next.into_values().collect();
    }
    level
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_examples() {
        assert_eq!(Tree::from_edges(&[(0, 1)]).unwrap().n(), 2);
        let p4 = Tree::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        assert_eq!(p4.n(), 4);
        assert!(matches!(
            Tree::from_edges(&[(0, 1), (2, 3)]),
            Err(Error::NotATree(_))
        ));
    }

    #[test]
    fn rejects_malformed_edges() {
        assert!(Tree::from_edges(&[(0, 0)]).is_err());
        assert!(Tree::from_edges(&[(0, 1), (1, 0)]).is_err());
        assert!(Tree::from_edges(&[(0, 5)]).is_err());
        // cycle on 0,1,2 leaves vertex 3 unreachable
        assert!(Tree::from_edges(&[(0, 1), (1, 2), (2, 0)]).is_err());
    }

    #[test]
    fn code_is_isomorphism_invariant() {
        let a = Tree::from_edges(&[(0, 1), (1, 2), (2, 3)]).unwrap();
        let b = Tree::from_edges(&[(3, 1), (1, 0), (0, 2)]).unwrap();
        assert_eq!(a.canonical_code(), b.canonical_code());
        let star = Tree::from_edges(&[(0, 1), (0, 2), (0, 3)]).unwrap();
        assert_ne!(a.canonical_code(), star.canonical_code());
        assert_eq!(a.canonical_code(), a.canonical_code());
    }

    #[test]
    fn canonical_form_has_same_code() {
        let t = Tree::from_edges(&[(4, 1), (1, 0), (0, 2), (2, 3), (2, 5)]).unwrap();
        let c = t.canonical_form();
        assert_eq!(t.canonical_code(), c.canonical_code());
        assert_eq!(c.canonical_form(), c);
    }

    #[test]
    fn small_tree_counts() {
        // unlabeled trees on n vertices: 1, 1, 1, 2, 3, 6, 11, 23, 47, 106
        let counts: Vec<usize> = (1..=10).map(|n| all_trees(n).len()).collect();
        assert_eq!(counts, vec![1, 1, 1, 2, 3, 6, 11, 23, 47, 106]);
    }

    #[test]
    fn distances_on_path() {
        let p = Tree::path(4);
        assert_eq!(p.distances()[0], vec![0, 1, 2, 3]);
        assert_eq!(p.path_between(3, 0), vec![3, 2, 1, 0]);
    }
}
