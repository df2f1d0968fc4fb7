//! Safe lower bound `lb(S) = min_{Ỹ∈𝒴_𝒞} ⟨Q̃ + S, Ỹ⟩ − n·λ_max(WᵀSW)`.
//!
//! The LP over `𝒴_𝒞` is solved with an interior point method only to obtain
//! multipliers `μ ≥ 0` for the cuts. The reported value is the Lagrangian
//! `min_{Ỹ∈𝒴} ⟨C − Σ μ_if A_if, Ỹ⟩`, which has a closed form and is a lower
//! bound on the LP optimum for every `μ ≥ 0`, so solver inaccuracy can only
//! weaken the bound, never invalidate it.

use std::collections::BTreeMap;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{
    DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT,
};
use nalgebra::DMatrix;

use crate::error::{QmstError, Result};
use crate::graph::Graph;
use crate::linalg;
use crate::proj::{Cut, CutClusters};

/// Relative padding added to `λ_max(WᵀSW)` before it is subtracted.
const LAMBDA_PAD: f64 = 1e-9;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SafeBound {
    pub value: f64,
    pub lambda_max_term: f64,
    pub lp_value: f64,
}

pub fn valid_lower_bound(
    s: &DMatrix<f64>,
    q_tilde: &DMatrix<f64>,
    w: &DMatrix<f64>,
    cuts: &CutClusters,
    g: &Graph,
    n: usize,
) -> Result<SafeBound> {
    let dim = q_tilde.nrows();
    if s.nrows() != dim || s.ncols() != dim || w.nrows() != dim {
        return Err(QmstError::DimensionMismatch {
            expected: dim,
            got: s.nrows(),
        });
    }
    let c = q_tilde + s;
    let lp_value = lp_min_over_yc(&c, cuts, g, n)?;
    let lambda = linalg::lambda_max(&linalg::congruence_t(w, s))? + LAMBDA_PAD * s.norm();
    Ok(SafeBound {
        value: lp_value - n as f64 * lambda,
        lambda_max_term: lambda,
        lp_value,
    })
}

/// Closed-form `min ⟨C, Ỹ⟩` over `𝒴` for a square cost `C` of order `m + 1`.
///
/// Off-diagonal pairs contribute `min(0, c_ef + c_fe)`; the coupled
/// diagonal/last-column entries carry `c_ff + c_{f,m+1} + c_{m+1,f}` and are
/// minimized over `{0 ≤ y ≤ 1, Σy = n − 1}` by taking the `n − 1` smallest.
pub fn min_over_y(c: &DMatrix<f64>, n: usize) -> f64 {
    let m = c.nrows() - 1;
    let mut total = c[(m, m)];
    for j in 0..m {
        for i in 0..j {
            total += (c[(i, j)] + c[(j, i)]).min(0.0);
        }
    }
    let mut coupled: Vec<f64> = (0..m).map(|f| c[(f, f)] + c[(f, m)] + c[(m, f)]).collect();
    coupled.sort_by(f64::total_cmp);
    total += coupled.iter().take(n - 1).sum::<f64>();
    total
}

/// Adds `−μ · A_if` to `c`, where `⟨A_if, Ỹ⟩ = Σ_{e∈δ(i)} Ỹ_{f,e} − Ỹ_{f,f}`.
fn subtract_cut(c: &mut DMatrix<f64>, cut: Cut, mu: f64, g: &Graph) {
    let f = cut.edge;
    for &e in g.incident(cut.vertex) {
        c[(f, e)] -= mu;
    }
    c[(f, f)] += mu;
}

/// Lagrangian bound for given cut multipliers (negative entries are clamped).
pub fn lagrangian_bound(c: &DMatrix<f64>, cuts: &[Cut], mu: &[f64], g: &Graph, n: usize) -> f64 {
    let mut shifted = c.clone();
    for (&cut, &mu) in cuts.iter().zip(mu) {
        if mu > 0.0 {
            subtract_cut(&mut shifted, cut, mu, g);
        }
    }
    min_over_y(&shifted, n)
}

/// `min ⟨C, Ỹ⟩` over `𝒴_𝒞`.
pub fn lp_min_over_yc(c: &DMatrix<f64>, cuts: &CutClusters, g: &Graph, n: usize) -> Result<f64> {
    let m = g.m();
    if c.nrows() != m + 1 || c.ncols() != m + 1 {
        return Err(QmstError::DimensionMismatch {
            expected: m + 1,
            got: c.nrows(),
        });
    }
    if n < 2 || n - 1 > m {
        return Err(QmstError::InvalidParameter(format!(
            "need 1 <= n - 1 <= m, got n = {n}, m = {m}"
        )));
    }
    if cuts.is_empty() {
        return Ok(min_over_y(c, n));
    }
    let mu = cut_multipliers(c, cuts.cuts(), g, n)?;
    Ok(lagrangian_bound(c, cuts.cuts(), &mu, g, n))
}

/// Solves the LP over `𝒴_𝒞` restricted to the variables the cuts touch and
/// returns the cut multipliers.
///
/// Variables: `y_f` for every edge, plus `y_{ef}` for each pair appearing in
/// some cut. All other pairs are separable and do not affect the multipliers.
fn cut_multipliers(c: &DMatrix<f64>, cuts: &[Cut], g: &Graph, n: usize) -> Result<Vec<f64>> {
    let m = g.m();
    let mut pair_var: BTreeMap<(usize, usize), usize> = BTreeMap::new();
    for cut in cuts {
        for &e in g.incident(cut.vertex) {
            if e != cut.edge {
                let key = (e.min(cut.edge), e.max(cut.edge));
                let next = m + pair_var.len();
                pair_var.entry(key).or_insert(next);
            }
        }
    }
    let nvar = m + pair_var.len();

    let mut q = vec![0.0; nvar];
    for f in 0..m {
        q[f] = c[(f, f)] + c[(f, m)] + c[(m, f)];
    }
    for (&(e, f), &k) in &pair_var {
        q[k] = c[(e, f)] + c[(f, e)];
    }
    // scale the objective for the interior point method; μ scales back
    let scale = q.iter().fold(0.0f64, |a, &v| a.max(v.abs())).max(1e-12);
    for v in q.iter_mut() {
        *v /= scale;
    }

    let mut rows = Vec::new();
    let mut cols = Vec::new();
    let mut vals = Vec::new();
    let mut b = Vec::new();
    let mut row = 0;
    // Σ y = n − 1
    for f in 0..m {
        rows.push(row);
        cols.push(f);
        vals.push(1.0);
    }
    b.push((n - 1) as f64);
    row += 1;
    // 0 ≤ x ≤ 1
    for k in 0..nvar {
        rows.push(row);
        cols.push(k);
        vals.push(1.0);
        b.push(1.0);
        row += 1;
        rows.push(row);
        cols.push(k);
        vals.push(-1.0);
        b.push(0.0);
        row += 1;
    }
    // y_f − Σ_{e∈δ(i)\f} y_fe ≤ 0 (for i on f the diagonal cancels)
    let first_cut_row = row;
    for cut in cuts {
        let f = cut.edge;
        let on_f = g.incident(cut.vertex).contains(&f);
        if !on_f {
            rows.push(row);
            cols.push(f);
            vals.push(1.0);
        }
        for &e in g.incident(cut.vertex) {
            if e != f {
                rows.push(row);
                cols.push(pair_var[&(e.min(f), e.max(f))]);
                vals.push(-1.0);
            }
        }
        b.push(0.0);
        row += 1;
    }
    let nrows = row;

    let a = CscMatrix::new_from_triplets(nrows, nvar, rows, cols, vals);
    let p = CscMatrix::<f64>::zeros((nvar, nvar));
    let cones = [
        SupportedConeT::ZeroConeT(1),
        SupportedConeT::NonnegativeConeT(nrows - 1),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-10)
        .tol_gap_rel(1e-10)
        .tol_feas(1e-10)
        .max_iter(400)
        .build()
        .map_err(|e| QmstError::Lp(format!("{e:?}")))?;
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings)
        .map_err(|e| QmstError::Lp(format!("{e:?}")))?;
    solver.solve();
    match solver.solution.status {
        SolverStatus::Solved => {}
        SolverStatus::AlmostSolved
        | SolverStatus::MaxIterations
        | SolverStatus::InsufficientProgress => {
            log::warn!(
                "LP finished with status {:?}; bound stays valid but may be weak",
                solver.solution.status
            );
        }
        other => return Err(QmstError::Lp(format!("solver status {other:?}"))),
    }
    Ok(solver.solution.z[first_cut_row..nrows]
        .iter()
        .map(|&z| (z * scale).max(0.0))
        .collect())
}
