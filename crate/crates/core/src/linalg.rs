//! Small dense symmetric linear algebra helpers shared by the solver modules.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{QmstError, Result};

/// Relative tolerance used by [`is_psd`].
pub const PSD_TOL: f64 = 1e-8;

pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn symmetrize_in_place(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for j in 0..n {
        for i in (j + 1)..n {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// Eigendecomposition of the symmetric part of `m`, eigenvalues ascending.
pub fn sym_eigen(m: &DMatrix<f64>) -> Result<(DVector<f64>, DMatrix<f64>)> {
    let s = symmetrize(m);
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 0).ok_or(QmstError::Eigen)?;
    let n = eig.eigenvalues.len();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    Ok((values, vectors))
}

pub fn sym_eigenvalues(m: &DMatrix<f64>) -> Result<DVector<f64>> {
    let s = symmetrize(m);
    let eig = SymmetricEigen::try_new(s, f64::EPSILON, 0).ok_or(QmstError::Eigen)?;
    let mut v: Vec<f64> = eig.eigenvalues.iter().copied().collect();
    v.sort_by(f64::total_cmp);
    Ok(DVector::from_vec(v))
}

pub fn lambda_min(m: &DMatrix<f64>) -> Result<f64> {
    Ok(sym_eigenvalues(m)?[0])
}

pub fn lambda_max(m: &DMatrix<f64>) -> Result<f64> {
    let v = sym_eigenvalues(m)?;
    Ok(v[v.len() - 1])
}

/// PSD test: `λ_min ≥ −PSD_TOL · max(1, ‖M‖_F)` after symmetrization.
pub fn is_psd(m: &DMatrix<f64>) -> Result<bool> {
    if m.nrows() == 0 {
        return Ok(true);
    }
    let tol = PSD_TOL * m.norm().max(1.0);
    Ok(lambda_min(m)? >= -tol)
}

/// `Wᵀ M W`.
pub fn congruence_t(w: &DMatrix<f64>, m: &DMatrix<f64>) -> DMatrix<f64> {
    w.transpose() * m * w
}

/// `W R Wᵀ`.
pub fn congruence(w: &DMatrix<f64>, r: &DMatrix<f64>) -> DMatrix<f64> {
    w * r * w.transpose()
}
