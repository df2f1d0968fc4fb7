//! Dykstra's cyclic projection onto `𝒴_𝒞 = 𝒴 ∩ 𝒴_{𝒞_1} ∩ … ∩ 𝒴_{𝒞_Nmax}`.

use nalgebra::DMatrix;
use rayon::prelude::*;

use super::cuts::CutClusters;
use super::lifted::{project_y, LiftedMatrix};
use super::rlt::project_tkf_in_place;
use crate::error::{QmstError, Result};
use crate::graph::Graph;

/// Default cap on full Dykstra cycles.
pub const DEFAULT_MAX_CYCLES: usize = 10_000;

/// Rows shorter than this are projected sequentially.
const PAR_MIN_ROWS: usize = 16;

#[derive(Debug, Clone)]
pub struct DykstraOutcome {
    pub matrix: LiftedMatrix,
    pub converged: bool,
    pub cycles: usize,
    /// `‖X_old − X‖_F` after each cycle.
    pub residuals: Vec<f64>,
}

/// Row `f` of `x` in `T_f^K` coordinates.
fn gather_row(x: &DMatrix<f64>, f: usize) -> Vec<f64> {
    let m = x.nrows() - 1;
    let mut a = Vec::with_capacity(m + 2);
    a.extend((0..=m).map(|e| x[(f, e)]));
    a.push(x[(m, f)]);
    a
}

fn scatter_row(x: &mut DMatrix<f64>, f: usize, z: &[f64]) {
    let m = x.nrows() - 1;
    for (e, &v) in z[..=m].iter().enumerate() {
        x[(f, e)] = v;
    }
    x[(m, f)] = z[m + 1];
}

pub fn dykstra_project(
    mat: &DMatrix<f64>,
    clusters: &CutClusters,
    g: &Graph,
    n: usize,
    eps_proj: f64,
) -> Result<DykstraOutcome> {
    dykstra_project_capped(mat, clusters, g, n, eps_proj, DEFAULT_MAX_CYCLES)
}

pub fn dykstra_project_capped(
    mat: &DMatrix<f64>,
    clusters: &CutClusters,
    g: &Graph,
    n: usize,
    eps_proj: f64,
    max_cycles: usize,
) -> Result<DykstraOutcome> {
    let m = g.m();
    if mat.nrows() != m + 1 || mat.ncols() != m + 1 {
        return Err(QmstError::DimensionMismatch {
            expected: m + 1,
            got: mat.nrows(),
        });
    }
    if clusters.is_empty() {
        return Ok(DykstraOutcome {
            matrix: project_y(mat, n),
            converged: true,
            cycles: 1,
            residuals: Vec::new(),
        });
    }

    let mut x = mat.clone();
    let mut p = DMatrix::<f64>::zeros(m + 1, m + 1);
    // corrections for the cut blocks live only on the rows each block touches
    let mut q: Vec<Vec<Vec<f64>>> = clusters
        .clusters()
        .iter()
        .map(|cl| cl.iter().map(|_| vec![0.0; m + 2]).collect())
        .collect();
    let mut residuals = Vec::new();

    for cycle in 1..=max_cycles {
        let x_old = x.clone();

        let tmp = &x + &p;
        x = project_y(&tmp, n).into_inner();
        p = tmp - &x;

        for (cluster, corr) in clusters.clusters().iter().zip(q.iter_mut()) {
            let project = |((f, k), qk): (&(usize, Vec<usize>), &mut Vec<f64>)| {
                let mut a = gather_row(&x, *f);
                for (ai, qi) in a.iter_mut().zip(qk.iter()) {
                    *ai += qi;
                }
                let mut z = a.clone();
                project_tkf_in_place(&mut z, *f, k, g);
                for ((qi, ai), zi) in qk.iter_mut().zip(&a).zip(&z) {
                    *qi = ai - zi;
                }
                (*f, z)
            };
            let rows: Vec<(usize, Vec<f64>)> = if cluster.len() >= PAR_MIN_ROWS {
                cluster.par_iter().zip(corr.par_iter_mut()).map(project).collect()
            } else {
                cluster.iter().zip(corr.iter_mut()).map(project).collect()
            };
            for (f, z) in rows {
                scatter_row(&mut x, f, &z);
            }
        }

        let res = (&x_old - &x).norm();
        residuals.push(res);
        if res < eps_proj {
            return Ok(DykstraOutcome {
                matrix: LiftedMatrix(x),
                converged: true,
                cycles: cycle,
                residuals,
            });
        }
    }
    log::debug!("dykstra hit the cycle cap ({max_cycles})");
    Ok(DykstraOutcome {
        matrix: LiftedMatrix(x),
        converged: false,
        cycles: max_cycles,
        residuals,
    })
}
