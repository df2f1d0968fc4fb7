use std::ops::{Deref, DerefMut};

use nalgebra::DMatrix;

use super::simplex::project_capped_simplex;

/// The lifted matrix `Ỹ = (Y y; yᵀ ω)` of order `m + 1`.
#[derive(Debug, Clone, PartialEq)]
pub struct LiftedMatrix(pub DMatrix<f64>);

impl LiftedMatrix {
    /// `(xxᵀ x; xᵀ 1)` for a 0/1 (or fractional) edge vector.
    pub fn rank_one(x: &[f64]) -> Self {
        let m = x.len();
        let mut v = x.to_vec();
        v.push(1.0);
        Self(DMatrix::from_fn(m + 1, m + 1, |i, j| v[i] * v[j]))
    }

    /// Lift of the spanning tree with the given edge support.
    pub fn tree_lift(m: usize, tree_edges: &[usize]) -> Self {
        let mut x = vec![0.0; m];
        for &e in tree_edges {
            x[e] = 1.0;
        }
        Self::rank_one(&x)
    }

    #[inline]
    pub fn m(&self) -> usize {
        self.0.nrows() - 1
    }

    /// The vector `y` (last column without the corner).
    pub fn y(&self) -> Vec<f64> {
        let m = self.m();
        (0..m).map(|e| self.0[(e, m)]).collect()
    }

    pub fn corner(&self) -> f64 {
        let m = self.m();
        self.0[(m, m)]
    }

    pub fn into_inner(self) -> DMatrix<f64> {
        self.0
    }
}

impl Deref for LiftedMatrix {
    type Target = DMatrix<f64>;

    fn deref(&self) -> &DMatrix<f64> {
        &self.0
    }
}

impl DerefMut for LiftedMatrix {
    fn deref_mut(&mut self) -> &mut DMatrix<f64> {
        &mut self.0
    }
}

/// Projection onto
/// `𝒴 = {Ỹ = (Y y; yᵀ 1) : diag(Y) = y, 0 ≤ Ỹ ≤ J, tr(Ỹ) = n}`.
///
/// Only the symmetric part of `m` matters, since `𝒴` consists of symmetric
/// matrices. The coupled diagonal/last-column entries are the capped-simplex
/// projection of `diag(Z)/3 + 2z/3`; off-diagonal entries are clamped.
pub fn project_y(mat: &DMatrix<f64>, n: usize) -> LiftedMatrix {
    let dim = mat.nrows();
    debug_assert_eq!(dim, mat.ncols());
    let m = dim - 1;
    let target: Vec<f64> = (0..m)
        .map(|e| {
            let z = 0.5 * (mat[(e, m)] + mat[(m, e)]);
            mat[(e, e)] / 3.0 + 2.0 * z / 3.0
        })
        .collect();
    let v = project_capped_simplex(&target, n as f64 - 1.0);
    let mut out = DMatrix::zeros(dim, dim);
    for j in 0..m {
        for i in 0..j {
            let s = (0.5 * (mat[(i, j)] + mat[(j, i)])).clamp(0.0, 1.0);
            out[(i, j)] = s;
            out[(j, i)] = s;
        }
        out[(j, j)] = v[j];
        out[(j, m)] = v[j];
        out[(m, j)] = v[j];
    }
    out[(m, m)] = 1.0;
    LiftedMatrix(out)
}
