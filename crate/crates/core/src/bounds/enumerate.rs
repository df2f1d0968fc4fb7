//! Exact QMSTP by recursive edge inclusion/exclusion over spanning trees.

use crate::error::{QmstError, Result};
use crate::graph::Graph;
use crate::instances::{CostMatrix, Instance};

pub const MAX_ENUMERATION_N: usize = 12;

/// Union-find with undo (union by size, no path compression).
struct RollbackDsu {
    parent: Vec<usize>,
    size: Vec<usize>,
    history: Vec<Option<(usize, usize)>>,
}

impl RollbackDsu {
    fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            history: Vec::new(),
        }
    }

    fn find(&self, mut v: usize) -> usize {
        while self.parent[v] != v {
            v = self.parent[v];
        }
        v
    }

    fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut ra, mut rb) = (self.find(a), self.find(b));
        if ra == rb {
            return false;
        }
        if self.size[ra] < self.size[rb] {
            std::mem::swap(&mut ra, &mut rb);
        }
        self.parent[rb] = ra;
        self.size[ra] += self.size[rb];
        self.history.push(Some((ra, rb)));
        true
    }

    fn undo(&mut self) {
        if let Some(Some((ra, rb))) = self.history.pop() {
            self.parent[rb] = rb;
            self.size[ra] -= self.size[rb];
        }
    }
}

/// Whether the current forest plus edges `from..` spans the graph.
fn can_still_span(g: &Graph, dsu: &RollbackDsu, from: usize, components: usize) -> bool {
    if components == 1 {
        return true;
    }
    // scratch union-find over component roots
    let n = g.n();
    let mut parent: Vec<usize> = (0..n).map(|v| dsu.find(v)).collect();
    fn root(p: &mut [usize], mut v: usize) -> usize {
        while p[v] != v {
            p[v] = p[p[v]];
            v = p[v];
        }
        v
    }
    let mut left = components;
    for &(u, v) in &g.edges()[from..] {
        let (a, b) = (root(&mut parent, u), root(&mut parent, v));
        if a != b {
            parent[a] = b;
            left -= 1;
            if left == 1 {
                return true;
            }
        }
    }
    false
}

struct Search<'a> {
    g: &'a Graph,
    q: &'a CostMatrix,
    dsu: RollbackDsu,
    tree: Vec<usize>,
    /// `inc[e] = q_ee + 2 Σ_{f∈tree} q_ef`.
    inc: Vec<f64>,
    min_off: f64,
    cost: f64,
    best: f64,
    best_tree: Vec<usize>,
    scratch: Vec<f64>,
    leaves: u64,
}

impl Search<'_> {
    fn completion_bound(&mut self, from: usize) -> f64 {
        let k = self.g.n() - 1 - self.tree.len();
        if k == 0 {
            return 0.0;
        }
        self.scratch.clear();
        self.scratch.extend_from_slice(&self.inc[from..]);
        let (small, kth, _) = self.scratch.select_nth_unstable_by(k - 1, f64::total_cmp);
        let sum_k: f64 = small.iter().sum::<f64>() + *kth;
        sum_k + (k * (k - 1)) as f64 * self.min_off
    }

    fn add(&mut self, e: usize) {
        self.cost += self.inc[e];
        let row = self.q.matrix().column(e);
        for (f, v) in self.inc.iter_mut().enumerate() {
            *v += 2.0 * row[f];
        }
        self.tree.push(e);
    }

    fn remove(&mut self) {
        let e = self.tree.pop().expect("non-empty tree");
        let row = self.q.matrix().column(e);
        for (f, v) in self.inc.iter_mut().enumerate() {
            *v -= 2.0 * row[f];
        }
        self.cost -= self.inc[e];
    }

    fn recurse(&mut self, idx: usize, components: usize) {
        let n = self.g.n();
        if self.tree.len() == n - 1 {
            self.leaves += 1;
            if self.cost < self.best {
                self.best = self.cost;
                self.best_tree = self.tree.clone();
            }
            return;
        }
        let m = self.g.m();
        if m - idx < n - 1 - self.tree.len() {
            return;
        }
        if self.cost + self.completion_bound(idx) >= self.best {
            return;
        }
        let (u, v) = self.g.edge(idx);
        if self.dsu.union(u, v) {
            self.add(idx);
            self.recurse(idx + 1, components - 1);
            self.remove();
            self.dsu.undo();
        }
        if can_still_span(self.g, &self.dsu, idx + 1, components) {
            self.recurse(idx + 1, components);
        }
    }
}

/// Exact minimum of `xᵀQx` over spanning trees, with an argmin (edge indices).
pub fn brute_force_qmstp(inst: &Instance) -> Result<(f64, Vec<usize>)> {
    brute_force_with_incumbent(inst, None)
}

/// Same as [`brute_force_qmstp`], seeded with a known tree to prune against.
pub fn brute_force_with_incumbent(
    inst: &Instance,
    incumbent: Option<&[usize]>,
) -> Result<(f64, Vec<usize>)> {
    let g = &inst.graph;
    if g.n() > MAX_ENUMERATION_N {
        return Err(QmstError::TooLarge {
            n: g.n(),
            max: MAX_ENUMERATION_N,
        });
    }
    if g.n() == 0 || !g.is_connected() {
        return Err(QmstError::Disconnected);
    }
    if g.n() == 1 {
        return Ok((0.0, Vec::new()));
    }
    let m = g.m();
    let qm = inst.q.matrix();
    let mut min_off = f64::INFINITY;
    for j in 0..m {
        for i in 0..m {
            if i != j {
                min_off = min_off.min(qm[(i, j)]);
            }
        }
    }
    if !min_off.is_finite() {
        min_off = 0.0;
    }
    let (best, best_tree) = match incumbent {
        Some(t) => {
            let mut t = t.to_vec();
            t.sort_unstable();
            (inst.q.tree_cost(&t), t)
        }
        None => (f64::INFINITY, Vec::new()),
    };
    let mut search = Search {
        g,
        q: &inst.q,
        dsu: RollbackDsu::new(g.n()),
        tree: Vec::with_capacity(g.n()),
        inc: (0..m).map(|e| qm[(e, e)]).collect(),
        min_off,
        cost: 0.0,
        best,
        best_tree,
        scratch: Vec::with_capacity(m),
        leaves: 0,
    };
    search.recurse(0, g.n());
    let mut tree = search.best_tree;
    tree.sort_unstable();
    // recompute from scratch to avoid drift from incremental updates
    Ok((inst.q.tree_cost(&tree), tree))
}

/// Calls `visit` with the edge set of every spanning tree of `g`.
pub fn for_each_spanning_tree(g: &Graph, mut visit: impl FnMut(&[usize])) {
    fn go(
        g: &Graph,
        dsu: &mut RollbackDsu,
        tree: &mut Vec<usize>,
        idx: usize,
        components: usize,
        visit: &mut dyn FnMut(&[usize]),
    ) {
        if components == 1 {
            visit(tree);
            return;
        }
        if idx == g.m() {
            return;
        }
        let (u, v) = g.edge(idx);
        if dsu.union(u, v) {
            tree.push(idx);
            go(g, dsu, tree, idx + 1, components - 1, visit);
            tree.pop();
            dsu.undo();
        }
        if can_still_span(g, dsu, idx + 1, components) {
            go(g, dsu, tree, idx + 1, components, visit);
        }
    }
    if g.n() == 0 {
        return;
    }
    let mut dsu = RollbackDsu::new(g.n());
    let mut tree = Vec::new();
    go(g, &mut dsu, &mut tree, 0, g.n(), &mut visit);
}

pub fn count_spanning_trees(g: &Graph) -> u64 {
    let mut count = 0;
    for_each_spanning_tree(g, |_| count += 1);
    count
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    fn k4_with(q: DMatrix<f64>) -> Instance {
        Instance::new(Graph::complete(4), CostMatrix::new(q).unwrap(), None).unwrap()
    }

    #[test]
    fn cayley_counts() {
        for n in 2..7 {
            assert_eq!(count_spanning_trees(&Graph::complete(n)), (n as u64).pow(n as u32 - 2));
        }
        assert_eq!(count_spanning_trees(&Graph::cycle(6)), 6);
        assert_eq!(count_spanning_trees(&Graph::path(6)), 1);
    }

    #[test]
    fn k4_identity_and_ones() {
        let (v, t) = brute_force_qmstp(&k4_with(DMatrix::identity(6, 6))).unwrap();
        assert_eq!(v, 3.0);
        assert_eq!(t.len(), 3);
        let (v, _) = brute_force_qmstp(&k4_with(DMatrix::from_element(6, 6, 1.0))).unwrap();
        assert_eq!(v, 9.0);
    }

    #[test]
    fn rejects_large_and_disconnected() {
        let big = Graph::complete(13);
        let m = big.m();
        let inst = Instance::new(big, CostMatrix::new(DMatrix::zeros(m, m)).unwrap(), None).unwrap();
        assert!(matches!(brute_force_qmstp(&inst), Err(QmstError::TooLarge { .. })));
        let g = Graph::new(4, &[(0, 1), (2, 3)]).unwrap();
        let inst = Instance::new(g, CostMatrix::new(DMatrix::zeros(2, 2)).unwrap(), None).unwrap();
        assert!(matches!(brute_force_qmstp(&inst), Err(QmstError::Disconnected)));
    }
}
