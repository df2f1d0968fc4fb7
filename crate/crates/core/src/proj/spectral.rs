use nalgebra::{DMatrix, DVector};

use super::simplex::project_simplex;
use crate::error::Result;
use crate::linalg;

/// Projection onto `ℛ = {R ⪰ 0, tr(R) = n}`: project the spectrum of the
/// symmetric part of `m` onto the simplex `Δ_n`.
pub fn project_r(m: &DMatrix<f64>, n: usize) -> Result<DMatrix<f64>> {
    let (values, vectors) = linalg::sym_eigen(m)?;
    let projected = project_simplex(values.as_slice(), n as f64);
    let lambda = DVector::from_vec(projected);
    // only columns with positive weight contribute
    let mut out = DMatrix::zeros(m.nrows(), m.ncols());
    for (k, &l) in lambda.iter().enumerate() {
        if l > 0.0 {
            let u = vectors.column(k);
            out.ger(l, &u, &u, 1.0);
        }
    }
    linalg::symmetrize_in_place(&mut out);
    Ok(out)
}
