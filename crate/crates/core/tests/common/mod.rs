//! Reference solvers used as oracles. None of them share code with the
//! projections under test: the QP oracle enumerates active sets, the conic
//! oracle models the feasible sets entry by entry, and the LP oracle uses a
//! simplex method.

#![allow(dead_code)]

use std::collections::BTreeMap;

use clarabel::algebra::CscMatrix;
use clarabel::solver::{DefaultSettingsBuilder, DefaultSolver, IPSolver, SolverStatus, SupportedConeT};
use microlp::{ComparisonOp, OptimizationDirection, Problem};
use nalgebra::{DMatrix, DVector};
use qmst_core::graph::Graph;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// `min ½ Σ w_i (x_i − a_i)²` s.t. `E x = e`, `G x ≥ h`.
#[derive(Debug, Clone, Default)]
pub struct Qp {
    pub w: Vec<f64>,
    pub a: Vec<f64>,
    pub eq: Vec<(Vec<f64>, f64)>,
    pub ineq: Vec<(Vec<f64>, f64)>,
}

impl Qp {
    pub fn projection(a: &[f64]) -> Self {
        Self {
            w: vec![1.0; a.len()],
            a: a.to_vec(),
            ..Self::default()
        }
    }

    fn objective(&self, x: &[f64]) -> f64 {
        x.iter()
            .zip(&self.a)
            .zip(&self.w)
            .map(|((xi, ai), wi)| 0.5 * wi * (xi - ai).powi(2))
            .sum()
    }

    /// Enumerates every subset of inequalities as the active set and keeps
    /// the best KKT point (primal feasible, nonnegative multipliers).
    pub fn solve_active_set(&self) -> Option<Vec<f64>> {
        let n = self.a.len();
        let k = self.ineq.len();
        assert!(k <= 22, "active-set enumeration over {k} inequalities");
        let tol = 1e-9;
        let mut best: Option<(f64, Vec<f64>)> = None;
        for mask in 0u64..(1u64 << k) {
            let active: Vec<usize> = (0..k).filter(|&j| mask >> j & 1 == 1).collect();
            let rows = self.eq.len() + active.len();
            if rows > n {
                continue;
            }
            let dim = n + rows;
            let mut kkt = DMatrix::zeros(dim, dim);
            let mut rhs = DVector::zeros(dim);
            for i in 0..n {
                kkt[(i, i)] = self.w[i];
                rhs[i] = self.w[i] * self.a[i];
            }
            let constraint_rows = self
                .eq
                .iter()
                .chain(active.iter().map(|&j| &self.ineq[j]));
            for (r, (coef, b)) in constraint_rows.enumerate() {
                for i in 0..n {
                    kkt[(i, n + r)] = -coef[i];
                    kkt[(n + r, i)] = coef[i];
                }
                rhs[n + r] = *b;
            }
            let Some(sol) = kkt.clone().lu().solve(&rhs) else {
                continue;
            };
            if (&kkt * &sol - &rhs).amax() > 1e-8 * (1.0 + rhs.amax()) {
                continue;
            }
            let x: Vec<f64> = sol.iter().take(n).copied().collect();
            let feasible = self.ineq.iter().all(|(g, h)| dot(g, &x) >= h - tol)
                && self.eq.iter().all(|(e, b)| (dot(e, &x) - b).abs() <= 1e-8);
            let duals_ok = (0..active.len()).all(|r| sol[n + self.eq.len() + r] >= -tol);
            if feasible && duals_ok {
                let obj = self.objective(&x);
                if best.as_ref().is_none_or(|(b, _)| obj < *b) {
                    best = Some((obj, x));
                }
            }
        }
        best.map(|(_, x)| x)
    }
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn max_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// KKT certificate for `x = argmin ‖x − v‖` over `{lo ≤ x ≤ hi, Σx = s}`:
/// some shift `θ` gives `x_i = clamp(v_i − θ, lo, hi)`.
pub fn box_simplex_certificate(v: &[f64], x: &[f64], s: f64, lo: f64, hi: f64) -> f64 {
    let free: Vec<usize> = (0..x.len())
        .filter(|&i| x[i] > lo + 1e-9 && x[i] < hi - 1e-9)
        .collect();
    let sum_err = (x.iter().sum::<f64>() - s).abs();
    let bound_err = x.iter().fold(0.0f64, |m, &xi| m.max(lo - xi).max(xi - hi));
    // θ from the free coordinates; otherwise the lower end of the admissible
    // interval [max_{x_i=lo} (v_i − lo), min_{x_i=hi} (v_i − hi)]
    let theta = if free.is_empty() {
        let at_lo = (0..x.len())
            .filter(|&i| x[i] <= lo + 1e-9)
            .map(|i| v[i] - lo)
            .fold(f64::NEG_INFINITY, f64::max);
        let at_hi = (0..x.len())
            .filter(|&i| x[i] >= hi - 1e-9)
            .map(|i| v[i] - hi)
            .fold(f64::INFINITY, f64::min);
        if at_lo.is_finite() {
            at_lo
        } else {
            at_hi
        }
    } else {
        free.iter().map(|&i| v[i] - x[i]).sum::<f64>() / free.len() as f64
    };
    let kkt_err = (0..x.len()).fold(0.0f64, |m, i| {
        m.max((x[i] - (v[i] - theta).clamp(lo, hi)).abs())
    });
    sum_err.max(bound_err).max(kkt_err)
}

/// Index of the symmetric variable for entry `(i, j)` of an `(m+1)`-square
/// lifted matrix, corner excluded.
struct SymVars {
    m: usize,
    index: BTreeMap<(usize, usize), usize>,
}

impl SymVars {
    fn new(m: usize) -> Self {
        let mut index = BTreeMap::new();
        for j in 0..=m {
            for i in 0..=j {
                if !(i == m && j == m) {
                    let next = index.len();
                    index.insert((i, j), next);
                }
            }
        }
        Self { m, index }
    }

    fn get(&self, i: usize, j: usize) -> usize {
        self.index[&(i.min(j), i.max(j))]
    }

    fn len(&self) -> usize {
        self.index.len()
    }
}

/// Coefficients of `Σ_{e∈δ(i)} Ỹ_fe − Ỹ_ff` over the symmetric variables.
fn cut_row(vars: &SymVars, g: &Graph, i: usize, f: usize) -> BTreeMap<usize, f64> {
    let mut row = BTreeMap::new();
    for (k, &(u, v)) in g.edges().iter().enumerate() {
        if u == i || v == i {
            *row.entry(vars.get(f, k)).or_insert(0.0) += 1.0;
        }
    }
    *row.entry(vars.get(f, f)).or_insert(0.0) -= 1.0;
    row
}

/// Frobenius projection of `mat` onto the symmetric matrices of `𝒴` that
/// satisfy the listed cuts, by an interior point QP over all entries.
pub fn conic_projection_oracle(
    mat: &DMatrix<f64>,
    g: &Graph,
    n: usize,
    cuts: &[(usize, usize)],
) -> DMatrix<f64> {
    let m = g.m();
    let vars = SymVars::new(m);
    let nv = vars.len();
    let sym = 0.5 * (mat + mat.transpose());
    let mut p_diag = vec![0.0; nv];
    let mut q = vec![0.0; nv];
    for (&(i, j), &k) in &vars.index {
        let w = if i == j { 1.0 } else { 2.0 };
        p_diag[k] = 2.0 * w;
        q[k] = -2.0 * w * sym[(i, j)];
    }
    let p = CscMatrix::new_from_triplets(nv, nv, (0..nv).collect(), (0..nv).collect(), p_diag);

    let (mut rows, mut cols, mut vals, mut b) = (Vec::new(), Vec::new(), Vec::new(), Vec::new());
    let mut r = 0;
    let mut push = |coef: &BTreeMap<usize, f64>, rhs: f64, r: &mut usize| {
        for (&c, &v) in coef {
            if v != 0.0 {
                rows.push(*r);
                cols.push(c);
                vals.push(v);
            }
        }
        b.push(rhs);
        *r += 1;
    };
    // equalities: diagonal = last column, trace
    for f in 0..m {
        let coef = BTreeMap::from([(vars.get(f, f), 1.0), (vars.get(f, m), -1.0)]);
        push(&coef, 0.0, &mut r);
    }
    let trace: BTreeMap<usize, f64> = (0..m).map(|f| (vars.get(f, f), 1.0)).collect();
    push(&trace, (n - 1) as f64, &mut r);
    let n_eq = r;
    for k in 0..nv {
        push(&BTreeMap::from([(k, 1.0)]), 1.0, &mut r);
        push(&BTreeMap::from([(k, -1.0)]), 0.0, &mut r);
    }
    for &(i, f) in cuts {
        let coef: BTreeMap<usize, f64> =
            cut_row(&vars, g, i, f).into_iter().map(|(k, v)| (k, -v)).collect();
        push(&coef, 0.0, &mut r);
    }
    let a = CscMatrix::new_from_triplets(r, nv, rows, cols, vals);
    let cones = [
        SupportedConeT::ZeroConeT(n_eq),
        SupportedConeT::NonnegativeConeT(r - n_eq),
    ];
    let settings = DefaultSettingsBuilder::default()
        .verbose(false)
        .tol_gap_abs(1e-11)
        .tol_gap_rel(1e-11)
        .tol_feas(1e-11)
        .max_iter(500)
        .build()
        .unwrap();
    let mut solver = DefaultSolver::new(&p, &q, &a, &b, &cones, settings).unwrap();
    solver.solve();
    assert!(
        matches!(solver.solution.status, SolverStatus::Solved | SolverStatus::AlmostSolved),
        "oracle QP status {:?}",
        solver.solution.status
    );
    let mut out = DMatrix::zeros(m + 1, m + 1);
    for (&(i, j), &k) in &vars.index {
        out[(i, j)] = solver.solution.x[k];
        out[(j, i)] = solver.solution.x[k];
    }
    out[(m, m)] = 1.0;
    out
}

/// `min ⟨C, Ỹ⟩` over the symmetric matrices of `𝒴` satisfying the cuts, by
/// the simplex method.
pub fn lp_oracle(c: &DMatrix<f64>, g: &Graph, n: usize, cuts: &[(usize, usize)]) -> f64 {
    let m = g.m();
    let sv = SymVars::new(m);
    let mut coef = vec![0.0; sv.len()];
    for (&(i, j), &k) in &sv.index {
        coef[k] = if i == j { c[(i, j)] } else { c[(i, j)] + c[(j, i)] };
    }
    let mut lp = Problem::new(OptimizationDirection::Minimize);
    let x: Vec<_> = coef.iter().map(|&o| lp.add_var(o, (0.0, 1.0))).collect();
    for f in 0..m {
        lp.add_constraint([(x[sv.get(f, f)], 1.0), (x[sv.get(f, m)], -1.0)], ComparisonOp::Eq, 0.0);
    }
    let trace: Vec<_> = (0..m).map(|f| (x[sv.get(f, f)], 1.0)).collect();
    lp.add_constraint(trace, ComparisonOp::Eq, (n - 1) as f64);
    for &(i, f) in cuts {
        let row: Vec<_> = cut_row(&sv, g, i, f)
            .into_iter()
            .filter(|&(_, v)| v != 0.0)
            .map(|(k, v)| (x[k], v))
            .collect();
        if !row.is_empty() {
            lp.add_constraint(row, ComparisonOp::Ge, 0.0);
        }
    }
    let sol = lp.solve().expect("oracle LP solves").into_solution().expect("LP solution");
    sol.objective() + c[(m, m)]
}

/// Random connected graph on `n` vertices with lexicographic edge order.
pub fn random_graph(rng: &mut ChaCha8Rng, n: usize, p: f64) -> Graph {
    loop {
        let mut edges = Vec::new();
        for u in 0..n {
            for v in (u + 1)..n {
                if rng.gen::<f64>() < p {
                    edges.push((u, v));
                }
            }
        }
        let g = Graph::new(n, &edges).unwrap();
        if g.is_connected() {
            return g;
        }
    }
}

/// Random independent subset of `candidates`.
pub fn random_independent_set(rng: &mut ChaCha8Rng, g: &Graph, candidates: &[usize]) -> Vec<usize> {
    let mut order = candidates.to_vec();
    order.shuffle(rng);
    let mut k: Vec<usize> = Vec::new();
    for v in order {
        if rng.gen_bool(0.7) && k.iter().all(|&u| !g.adjacent(u, v)) {
            k.push(v);
        }
    }
    k.sort_unstable();
    k
}

pub fn random_matrix(rng: &mut ChaCha8Rng, r: usize, c: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    DMatrix::from_fn(r, c, |_, _| rng.gen_range(lo..hi))
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize, lo: f64, hi: f64) -> DMatrix<f64> {
    let a = random_matrix(rng, d, d, lo, hi);
    0.5 * (&a + a.transpose())
}

pub mod sweeps;
