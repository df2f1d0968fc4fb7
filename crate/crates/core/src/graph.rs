//! Simple undirected graphs with a fixed edge ordering, Laplacian algebra and
//! the algebraic-connectivity test for spanning trees.
//!
//! Vertices are 0-based internally. Edge `k` is the unordered pair `edges[k]`,
//! stored with the smaller endpoint first. The ordering defines the bijection
//! between symmetric matrices supported on `E` and vectors of length `m`
//! ([`b_map`] / [`b_adjoint`]).

use std::f64::consts::PI;

use nalgebra::{DMatrix, DVector};

use crate::error::{QmstError, Result};
use crate::linalg;

#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    edges: Vec<(usize, usize)>,
    /// `edge_id[u * n + v]` is the index of edge {u, v}, if present.
    edge_id: Vec<Option<usize>>,
    incident: Vec<Vec<usize>>,
}

impl Graph {
    /// Builds a graph keeping the given edge order.
    ///
    /// Rejects self-loops, duplicate edges and out-of-range endpoints.
    /// Connectivity is not required here; see [`Graph::is_connected`].
    pub fn new(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut edge_id = vec![None; n * n];
        let mut incident = vec![Vec::new(); n];
        let mut stored = Vec::with_capacity(edges.len());
        for (k, &(a, b)) in edges.iter().enumerate() {
            for v in [a, b] {
                if v >= n {
                    return Err(QmstError::InvalidVertex { vertex: v, n });
                }
            }
            if a == b {
                return Err(QmstError::SelfLoop(a));
            }
            let (u, v) = (a.min(b), a.max(b));
            if edge_id[u * n + v].is_some() {
                return Err(QmstError::DuplicateEdge(u, v));
            }
            edge_id[u * n + v] = Some(k);
            edge_id[v * n + u] = Some(k);
            incident[u].push(k);
            incident[v].push(k);
            stored.push((u, v));
        }
        Ok(Self {
            n,
            edges: stored,
            edge_id,
            incident,
        })
    }

    /// Builds a graph with edges sorted lexicographically on
    /// `(min endpoint, max endpoint)`.
    pub fn with_lexicographic_order(n: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut sorted: Vec<(usize, usize)> =
            edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect();
        sorted.sort_unstable();
        Self::new(n, &sorted)
    }

    pub fn complete(n: usize) -> Self {
        let mut edges = Vec::with_capacity(n * n.saturating_sub(1) / 2);
        for u in 0..n {
            for v in (u + 1)..n {
                edges.push((u, v));
            }
        }
        Self::new(n, &edges).expect("complete graph is simple")
    }

    pub fn path(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        Self::new(n, &edges).expect("path is simple")
    }

    pub fn star(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|v| (0, v)).collect();
        Self::new(n, &edges).expect("star is simple")
    }

    pub fn cycle(n: usize) -> Self {
        let mut edges: Vec<_> = (1..n).map(|v| (v - 1, v)).collect();
        edges.push((0, n - 1));
        Self::with_lexicographic_order(n, &edges).expect("cycle is simple")
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.edges.len()
    }

    #[inline]
    pub fn edges(&self) -> &[(usize, usize)] {
        &self.edges
    }

    #[inline]
    pub fn edge(&self, k: usize) -> (usize, usize) {
        self.edges[k]
    }

    pub fn edge_index(&self, u: usize, v: usize) -> Option<usize> {
        if u >= self.n || v >= self.n {
            return None;
        }
        self.edge_id[u * self.n + v]
    }

    #[inline]
    pub fn adjacent(&self, u: usize, v: usize) -> bool {
        self.edge_index(u, v).is_some()
    }

    /// Edge indices of `δ(i)`.
    pub fn delta(&self, i: usize) -> Result<&[usize]> {
        self.incident
            .get(i)
            .map(Vec::as_slice)
            .ok_or(QmstError::InvalidVertex { vertex: i, n: self.n })
    }

    pub fn degree(&self, i: usize) -> Result<usize> {
        self.delta(i).map(<[usize]>::len)
    }

    /// `δ(i)` without bounds checking, for hot loops over valid vertices.
    #[inline]
    pub(crate) fn incident(&self, i: usize) -> &[usize] {
        &self.incident[i]
    }

    pub fn adjacency(&self) -> DMatrix<f64> {
        b_adjoint(&DVector::from_element(self.m(), 1.0), self)
    }

    pub fn is_connected(&self) -> bool {
        if self.n == 0 {
            return true;
        }
        let mut seen = vec![false; self.n];
        let mut stack = vec![0];
        seen[0] = true;
        let mut count = 1;
        while let Some(u) = stack.pop() {
            for &k in &self.incident[u] {
                let (a, b) = self.edges[k];
                let w = if a == u { b } else { a };
                if !seen[w] {
                    seen[w] = true;
                    count += 1;
                    stack.push(w);
                }
            }
        }
        count == self.n
    }

    /// Checks the invariants required by the solver entry points.
    pub fn check_solver_ready(&self) -> Result<()> {
        if self.n < 3 {
            return Err(QmstError::TooFewVertices(self.n));
        }
        if !self.is_connected() {
            return Err(QmstError::Disconnected);
        }
        Ok(())
    }

    pub fn is_independent(&self, vertices: &[usize]) -> bool {
        first_adjacent_pair(self, vertices).is_none()
    }
}

pub(crate) fn first_adjacent_pair(g: &Graph, vertices: &[usize]) -> Option<(usize, usize)> {
    for (a, &u) in vertices.iter().enumerate() {
        for &v in &vertices[a + 1..] {
            if u == v || g.adjacent(u, v) {
                return Some((u, v));
            }
        }
    }
    None
}

/// `β = 2(1 − cos(π/n))`, the algebraic connectivity of the path on `n`
/// vertices, and `α = β/n`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpectralConstants {
    pub beta: f64,
    pub alpha: f64,
}

pub fn spectral_constants(n: usize) -> Result<SpectralConstants> {
    if n < 3 {
        return Err(QmstError::TooFewVertices(n));
    }
    let beta = 2.0 * (1.0 - (PI / n as f64).cos());
    Ok(SpectralConstants {
        beta,
        alpha: beta / n as f64,
    })
}

/// `Diag(X 1) − X`.
pub fn laplacian(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    if x.nrows() != x.ncols() {
        return Err(QmstError::DimensionMismatch {
            expected: x.nrows(),
            got: x.ncols(),
        });
    }
    let row_sums = x.column_sum();
    Ok(DMatrix::from_diagonal(&row_sums) - x)
}

/// The matrix `Diag(X1) − X + αJ − βI` of the tree LMI.
pub fn tree_lmi_matrix(x: &DMatrix<f64>) -> Result<DMatrix<f64>> {
    let n = x.nrows();
    let c = spectral_constants(n)?;
    let mut l = laplacian(x)?;
    l.add_scalar_mut(c.alpha);
    for i in 0..n {
        l[(i, i)] -= c.beta;
    }
    Ok(l)
}

/// Tests whether the `(n−1)`-edge graph with adjacency `X` is a tree through
/// `Diag(X1) − X + αJ − βI ⪰ 0`.
pub fn is_tree_lmi(x: &DMatrix<f64>) -> Result<bool> {
    let n = x.nrows();
    let total: f64 = x.iter().sum();
    let expected = 2 * n.saturating_sub(1);
    if (total - expected as f64).abs() > 1e-9 {
        return Err(QmstError::WrongEdgeCount {
            expected: n.saturating_sub(1),
            got: (total / 2.0).round().max(0.0) as usize,
        });
    }
    linalg::is_psd(&tree_lmi_matrix(x)?)
}

/// `ℬ(X)`: the entries of `X` on the edge positions, in edge order.
pub fn b_map(x: &DMatrix<f64>, g: &Graph) -> Result<DVector<f64>> {
    let n = g.n();
    if x.nrows() != n || x.ncols() != n {
        return Err(QmstError::DimensionMismatch {
            expected: n,
            got: x.nrows(),
        });
    }
    for j in 0..n {
        for i in 0..n {
            if x[(i, j)] != 0.0 && g.edge_index(i, j).is_none() {
                return Err(QmstError::SupportOutsideEdges(i, j));
            }
        }
    }
    Ok(DVector::from_iterator(
        g.m(),
        g.edges().iter().map(|&(u, v)| x[(u, v)]),
    ))
}

/// `ℬ*(x)`: places `x_k` at both `(u, v)` and `(v, u)` of edge `k`.
pub fn b_adjoint(x: &DVector<f64>, g: &Graph) -> DMatrix<f64> {
    let mut out = DMatrix::zeros(g.n(), g.n());
    for (k, &(u, v)) in g.edges().iter().enumerate() {
        out[(u, v)] = x[k];
        out[(v, u)] = x[k];
    }
    out
}

/// Greedy partition of `vertices` into independent sets of `g`, visiting
/// vertices by descending degree (ties by vertex id).
pub fn greedy_independent_partition(vertices: &[usize], g: &Graph) -> Vec<Vec<usize>> {
    let mut order: Vec<usize> = vertices.to_vec();
    order.sort_unstable();
    order.dedup();
    order.sort_by(|&a, &b| {
        g.incident(b)
            .len()
            .cmp(&g.incident(a).len())
            .then(a.cmp(&b))
    });
    let mut classes: Vec<Vec<usize>> = Vec::new();
    for v in order {
        match classes
            .iter_mut()
            .find(|c| c.iter().all(|&u| !g.adjacent(u, v)))
        {
            Some(class) => class.push(v),
            None => classes.push(vec![v]),
        }
    }
    classes
}
