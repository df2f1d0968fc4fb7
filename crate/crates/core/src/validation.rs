//! Executable checks of structural facts about the formulations: two `K4`
//! points separating the linear and semidefinite relaxations, and the
//! rounding identity behind the cut-set and RLT cuts.
//!
//! `K4` edges are in lexicographic order, so the first three edges are the
//! ones incident to vertex 0 and the last three form the opposite triangle.

use std::fmt;

use nalgebra::{DMatrix, DVector};

use crate::bounds::for_each_spanning_tree;
use crate::error::Result;
use crate::graph::{b_map, spectral_constants, tree_lmi_matrix, Graph};
use crate::linalg;

const TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct SubCheck {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CheckReport {
    pub name: String,
    pub checks: Vec<SubCheck>,
}

impl CheckReport {
    fn new(name: &str) -> Self {
        Self {
            name: name.to_owned(),
            checks: Vec::new(),
        }
    }

    fn record(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(SubCheck {
            name: name.into(),
            passed,
            detail: detail.into(),
        });
    }

    pub fn passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn failures(&self) -> impl Iterator<Item = &SubCheck> {
        self.checks.iter().filter(|c| !c.passed)
    }
}

impl fmt::Display for CheckReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let failed = self.failures().count();
        writeln!(
            f,
            "[{}] {} ({} checks, {} failed)",
            if failed == 0 { "PASS" } else { "FAIL" },
            self.name,
            self.checks.len(),
            failed
        )?;
        for c in &self.checks {
            writeln!(
                f,
                "  {} {}: {}",
                if c.passed { "ok  " } else { "FAIL" },
                c.name,
                c.detail
            )?;
        }
        Ok(())
    }
}

/// Edge vector and lifted matrix satisfying every cut-set constraint while
/// `(Y x; xᵀ 1)` is indefinite.
#[derive(Debug, Clone, PartialEq)]
pub struct CutsetExample {
    pub x: DVector<f64>,
    pub y: DMatrix<f64>,
}

impl CutsetExample {
    pub fn standard() -> Self {
        let third = 1.0 / 3.0;
        let x = DVector::from_row_slice(&[2.0 * third, 2.0 * third, 2.0 * third, third, third, third]);
        let mut y = DMatrix::zeros(6, 6);
        for a in 0..3 {
            for b in 0..3 {
                y[(a, b)] = third + if a == b { third } else { 0.0 };
            }
            y[(a, a + 3)] = 2.0 * third;
            y[(a + 3, a)] = 2.0 * third;
            y[(a + 3, a + 3)] = third;
        }
        Self { x, y }
    }
}

/// Fractional adjacency matrix and lifted matrix satisfying the semidefinite
/// constraints while violating the cut-set constraint at vertex 0.
#[derive(Debug, Clone, PartialEq)]
pub struct MisdpExample {
    pub x: DMatrix<f64>,
    pub y: DMatrix<f64>,
}

impl MisdpExample {
    pub fn standard() -> Self {
        let x = DMatrix::from_fn(4, 4, |i, j| match (i, j) {
            _ if i == j => 0.0,
            (0, _) | (_, 0) => 0.25,
            _ => 0.75,
        });
        let y = DMatrix::from_fn(6, 6, |a, b| {
            let eye = if a == b { 3.0 / 16.0 } else { 0.0 };
            match (a < 3, b < 3) {
                (true, true) => 1.0 / 16.0 + eye,
                (false, false) => 9.0 / 16.0 + eye,
                _ => 3.0 / 16.0,
            }
        });
        Self { x, y }
    }
}

fn lift(y: &DMatrix<f64>, x: &DVector<f64>) -> DMatrix<f64> {
    let m = x.len();
    let mut z = DMatrix::zeros(m + 1, m + 1);
    z.view_mut((0, 0), (m, m)).copy_from(y);
    for e in 0..m {
        z[(e, m)] = x[e];
        z[(m, e)] = x[e];
    }
    z[(m, m)] = 1.0;
    z
}

fn max_abs(m: impl IntoIterator<Item = f64>) -> f64 {
    m.into_iter().fold(0.0, |a, v| a.max(v.abs()))
}

/// Smallest `Σ_{e∈δ(S)} x_e` over nonempty proper subsets `S`, with its `S`.
fn min_cut_value(g: &Graph, x: &[f64]) -> (f64, u32) {
    let n = g.n();
    let mut best = (f64::INFINITY, 0);
    for mask in 1u32..(1 << n) - 1 {
        let v: f64 = g
            .edges()
            .iter()
            .zip(x)
            .filter(|(&(u, w), _)| ((mask >> u) ^ (mask >> w)) & 1 == 1)
            .map(|(_, &xe)| xe)
            .sum();
        if v < best.0 {
            best = (v, mask);
        }
    }
    best
}

pub fn check_counterexample_cutset_feasible() -> Result<CheckReport> {
    check_cutset_example(&CutsetExample::standard())
}

pub fn check_cutset_example(ex: &CutsetExample) -> Result<CheckReport> {
    let g = Graph::complete(4);
    let n = g.n();
    let mut rep = CheckReport::new("K4 point feasible for the cut-set relaxation");
    let (x, y) = (&ex.x, &ex.y);

    let diag_err = max_abs((0..6).map(|e| y[(e, e)] - x[e]));
    rep.record("diag(Y) = x", diag_err <= TOL, format!("max error {diag_err:.2e}"));

    let row_err = max_abs((0..6).map(|e| y.row(e).sum() - (n - 1) as f64 * x[e]));
    rep.record("Y 1 = (n-1) x", row_err <= TOL, format!("max error {row_err:.2e}"));

    let lo = y.min();
    let hi = y.max();
    rep.record(
        "0 <= Y <= J",
        lo >= -TOL && hi <= 1.0 + TOL,
        format!("entries in [{lo:.4}, {hi:.4}]"),
    );

    let asym = (y - y.transpose()).amax();
    rep.record("Y symmetric", asym <= TOL, format!("max asymmetry {asym:.2e}"));

    let xs: Vec<f64> = x.iter().copied().collect();
    let (cut, mask) = min_cut_value(&g, &xs);
    rep.record(
        "all 14 cut-set sums >= 1",
        cut >= 1.0 - TOL,
        format!("minimum {cut:.6} at S = {mask:04b}"),
    );

    let z = lift(y, x);
    let eig = linalg::sym_eigenvalues(&z)?;
    let closest = eig
        .iter()
        .copied()
        .min_by(|a, b| (a + 1.0 / 3.0).abs().total_cmp(&(b + 1.0 / 3.0).abs()))
        .unwrap_or(f64::NAN);
    rep.record(
        "Z has eigenvalue -1/3",
        (closest + 1.0 / 3.0).abs() <= TOL,
        format!("closest eigenvalue {closest:.12}"),
    );
    let psd = linalg::is_psd(&z)?;
    rep.record("Z not PSD", !psd, format!("lambda_min {:.6}", eig[0]));
    Ok(rep)
}

pub fn check_counterexample_misdp_feasible() -> Result<CheckReport> {
    check_misdp_example(&MisdpExample::standard())
}

pub fn check_misdp_example(ex: &MisdpExample) -> Result<CheckReport> {
    let g = Graph::complete(4);
    let n = g.n();
    let mut rep = CheckReport::new("K4 point feasible for the semidefinite relaxation");
    let (xm, y) = (&ex.x, &ex.y);

    let bx = b_map(xm, &g)?;
    let expected = [0.25, 0.25, 0.25, 0.75, 0.75, 0.75];
    let b_err = max_abs(bx.iter().zip(expected).map(|(a, b)| a - b));
    rep.record(
        "B(X) = (1/4,1/4,1/4,3/4,3/4,3/4)",
        b_err <= TOL,
        format!("max error {b_err:.2e}"),
    );

    let diag_err = max_abs((0..6).map(|e| y[(e, e)] - bx[e]));
    rep.record("diag(Y) = B(X)", diag_err <= TOL, format!("max error {diag_err:.2e}"));

    let z = lift(y, &bx);
    let lz = linalg::lambda_min(&z)?;
    rep.record(
        "(Y B(X); B(X)^T 1) PSD",
        linalg::is_psd(&z)?,
        format!("lambda_min {lz:.3e}"),
    );

    let lmi = tree_lmi_matrix(xm)?;
    let ll = linalg::lambda_min(&lmi)?;
    rep.record(
        "Diag(X1) - X + aJ - bI PSD",
        linalg::is_psd(&lmi)?,
        format!("lambda_min {ll:.3e}"),
    );

    let asym = (y - y.transpose()).amax().max((xm - xm.transpose()).amax());
    rep.record("X and Y symmetric", asym <= TOL, format!("max asymmetry {asym:.2e}"));

    let total: f64 = xm.iter().sum();
    let in_box = xm.iter().all(|&v| (-TOL..=1.0 + TOL).contains(&v));
    let zero_diag = (0..n).all(|i| xm[(i, i)].abs() <= TOL);
    rep.record(
        "X in relaxed F",
        in_box && zero_diag && (total - 2.0 * (n - 1) as f64).abs() <= TOL,
        format!("<X, J> = {total:.6}, entries in [0,1]: {in_box}, zero diagonal: {zero_diag}"),
    );

    let s: f64 = g.delta(0)?.iter().map(|&e| bx[e]).sum();
    rep.record(
        "cut-set sum at vertex 0 is 3/4",
        (s - 0.75).abs() <= TOL && s < 1.0,
        format!("sum {s:.12}"),
    );
    Ok(rep)
}

/// `⌊|S|(|S|α − β)⌋ = −1` for every nonempty proper subset `S`, and the
/// cut-set and RLT constraints at every lifted spanning tree of `g` when
/// `n ≤ 8`.
pub fn check_cg_identities(g: &Graph) -> Result<CheckReport> {
    let n = g.n();
    let c = spectral_constants(n)?;
    let mut rep = CheckReport::new(&format!("CG identities on n = {n}, m = {}", g.m()));

    let mut subsets = 0u64;
    let mut worst = None;
    for mask in 1u64..(1 << n) - 1 {
        subsets += 1;
        let k = mask.count_ones() as f64;
        let v = (k * (k * c.alpha - c.beta)).floor();
        if v != -1.0 && worst.is_none() {
            worst = Some((mask, v));
        }
    }
    rep.record(
        "floor(|S|(|S|a - b)) = -1 for every nonempty proper S",
        worst.is_none(),
        match worst {
            None => format!("{subsets} subsets"),
            Some((mask, v)) => format!("S = {mask:b} gives {v}"),
        },
    );

    if n > 8 {
        return Ok(rep);
    }
    let m = g.m();
    let mut trees = 0u64;
    let mut cut_fail = None;
    let mut rlt_fail = None;
    let mut x = vec![0.0; m];
    for_each_spanning_tree(g, |tree| {
        trees += 1;
        x.iter_mut().for_each(|v| *v = 0.0);
        for &e in tree {
            x[e] = 1.0;
        }
        // only support edges contribute to cut sums
        if cut_fail.is_none() {
            for mask in 1u32..(1 << n) - 1 {
                let crossing = tree
                    .iter()
                    .filter(|&&e| {
                        let (u, w) = g.edge(e);
                        ((mask >> u) ^ (mask >> w)) & 1 == 1
                    })
                    .count();
                if crossing == 0 {
                    cut_fail = Some((tree.to_vec(), mask));
                    break;
                }
            }
        }
        // the lift of a 0/1 vector has y_fe = x_f x_e, so row f vanishes off the tree
        if rlt_fail.is_none() {
            'outer: for &f in tree {
                for i in 0..n {
                    let s: f64 = g.incident(i).iter().map(|&e| x[f] * x[e]).sum();
                    if s < x[f] * x[f] {
                        rlt_fail = Some((tree.to_vec(), i, f));
                        break 'outer;
                    }
                }
            }
        }
    });
    rep.record(
        "cut-set constraints at every spanning tree",
        cut_fail.is_none(),
        match &cut_fail {
            None => format!("{trees} trees"),
            Some((t, mask)) => format!("tree {t:?} violates S = {mask:b}"),
        },
    );
    rep.record(
        "RLT constraints at every lifted spanning tree",
        rlt_fail.is_none(),
        match &rlt_fail {
            None => format!("{trees} trees, {} (i, f) pairs each", n * m),
            Some((t, i, f)) => format!("tree {t:?} violates (i, f) = ({i}, {f})"),
        },
    );
    Ok(rep)
}

/// Runs [`check_cg_identities`] on `K_n` for every `n` in `range`.
pub fn check_cg_sweep(range: std::ops::RangeInclusive<usize>) -> Result<CheckReport> {
    let mut rep = CheckReport::new(&format!(
        "CG identities on complete graphs, n = {}..{}",
        range.start(),
        range.end()
    ));
    for n in range {
        let sub = check_cg_identities(&Graph::complete(n))?;
        for c in sub.checks {
            rep.record(format!("n = {n}: {}", c.name), c.passed, c.detail);
        }
    }
    Ok(rep)
}

/// All validation groups with the default settings.
pub fn run_all() -> Result<Vec<CheckReport>> {
    Ok(vec![
        check_counterexample_cutset_feasible()?,
        check_counterexample_misdp_feasible()?,
        check_cg_sweep(3..=8)?,
    ])
}
