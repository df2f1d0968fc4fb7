//! Randomized comparisons of each projection against its oracle. Each sweep
//! returns the number of cases and the worst deviation seen.

use nalgebra::DMatrix;
use qmst_core::graph::Graph;
use qmst_core::proj::{
    cluster_cuts, dykstra_project, project_capped_simplex, project_simplex, project_tkf, project_y,
    Cut,
};
use rand::Rng;

use super::{
    box_simplex_certificate, conic_projection_oracle, max_diff, random_graph,
    random_independent_set, random_matrix, rng, Qp,
};

#[derive(Debug, Clone, Copy, Default)]
pub struct Sweep {
    pub cases: usize,
    pub worst: f64,
}

impl Sweep {
    fn add(&mut self, err: f64) {
        self.cases += 1;
        self.worst = self.worst.max(err);
    }
}

fn simplex_qp(v: &[f64], s: f64, capped: bool) -> Qp {
    let p = v.len();
    let mut qp = Qp::projection(v);
    qp.eq.push((vec![1.0; p], s));
    for i in 0..p {
        let mut e = vec![0.0; p];
        e[i] = 1.0;
        qp.ineq.push((e.clone(), 0.0));
        if capped {
            e[i] = -1.0;
            qp.ineq.push((e, -1.0));
        }
    }
    qp
}

/// Active-set oracle for dims ≤ 10, KKT certificate for dims 11..=20.
pub fn simplex(cases: usize, seed: u64) -> Sweep {
    let mut r = rng(seed);
    let mut out = Sweep::default();
    for c in 0..cases {
        let p = if c % 2 == 0 { r.gen_range(1..=10) } else { r.gen_range(11..=20) };
        let v: Vec<f64> = (0..p).map(|_| r.gen_range(-2.0..2.0)).collect();
        let s = r.gen_range(0.2..4.0);
        let x = project_simplex(&v, s);
        let err = if p <= 10 {
            let oracle = simplex_qp(&v, s, false).solve_active_set().expect("oracle");
            max_diff(&x, &oracle)
        } else {
            box_simplex_certificate(&v, &x, s, 0.0, f64::INFINITY)
        };
        out.add(err);
    }
    out
}

/// Active-set oracle for dims ≤ 6, KKT certificate for dims 7..=20.
pub fn capped_simplex(cases: usize, seed: u64) -> Sweep {
    let mut r = rng(seed);
    let mut out = Sweep::default();
    for c in 0..cases {
        let p = if c % 2 == 0 { r.gen_range(1..=6) } else { r.gen_range(7..=20) };
        let v: Vec<f64> = (0..p).map(|_| r.gen_range(-1.5..2.5)).collect();
        // include the forced case s = p now and then
        let s = if c % 17 == 0 { p as f64 } else { r.gen_range(0.05..p as f64) };
        let x = project_capped_simplex(&v, s);
        let err = if p <= 6 {
            let oracle = simplex_qp(&v, s, true).solve_active_set().expect("oracle");
            max_diff(&x, &oracle)
        } else {
            box_simplex_certificate(&v, &x, s, 0.0, 1.0)
        };
        out.add(err);
    }
    out
}

/// Full-space conic QP oracle on small random graphs, symmetric and
/// nonsymmetric inputs.
pub fn lifted_y(cases: usize, seed: u64) -> Sweep {
    let mut r = rng(seed);
    let mut out = Sweep::default();
    for c in 0..cases {
        let n = r.gen_range(3..=5);
        let g = random_graph(&mut r, n, 0.7);
        let m = g.m();
        let mut mat = random_matrix(&mut r, m + 1, m + 1, -0.6, 1.6);
        if c % 2 == 0 {
            mat = 0.5 * (&mat + mat.transpose());
        }
        let x = project_y(&mat, n);
        let oracle = conic_projection_oracle(&mat, &g, n, &[]);
        out.add((&x.0 - &oracle).amax());
    }
    out
}

/// Active-set oracle over the cut inequalities of `T_f^K` on graphs n ≤ 8.
pub fn tkf(cases: usize, seed: u64) -> Sweep {
    let mut r = rng(seed);
    let mut out = Sweep::default();
    while out.cases < cases {
        let n = r.gen_range(3..=8);
        let density = r.gen_range(0.3..0.9);
        let g = random_graph(&mut r, n, density);
        let m = g.m();
        let f = r.gen_range(0..m);
        let all: Vec<usize> = (0..n).collect();
        let k = random_independent_set(&mut r, &g, &all);
        if k.is_empty() {
            continue;
        }
        let spread = if out.cases % 3 == 0 { 0.2 } else { 1.0 };
        let a: Vec<f64> = (0..m + 2).map(|_| r.gen_range(-spread..1.0)).collect();
        let z = project_tkf(&a, f, &k, &g).expect("valid input");

        let mut qp = Qp::projection(&a);
        let unit = |i: usize, s: f64| {
            let mut e = vec![0.0; m + 2];
            e[i] = s;
            e
        };
        let mut e1 = unit(f, 1.0);
        e1[m] = -1.0;
        let mut e2 = unit(m, 1.0);
        e2[m + 1] = -1.0;
        qp.eq.push((e1, 0.0));
        qp.eq.push((e2, 0.0));
        for &i in &k {
            let mut row = vec![0.0; m + 2];
            for (e, &(u, v)) in g.edges().iter().enumerate() {
                if u == i || v == i {
                    row[e] += 1.0;
                }
            }
            row[f] -= 1.0;
            qp.ineq.push((row, 0.0));
        }
        let oracle = qp.solve_active_set().expect("oracle");
        out.add(max_diff(&z, &oracle));
    }
    out
}

/// Dykstra against the conic oracle over the full polytope. Cases cycle
/// through `K4` with three cuts and random graphs on up to six vertices.
pub fn dykstra(cases: usize, seed: u64) -> Sweep {
    let mut r = rng(seed);
    let mut out = Sweep::default();
    for c in 0..cases {
        let g = if c % 2 == 0 {
            Graph::complete(4)
        } else {
            let n = r.gen_range(4..=6);
            random_graph(&mut r, n, 0.6)
        };
        let (n, m) = (g.n(), g.m());
        let ncuts = if c % 2 == 0 { 3 } else { r.gen_range(1..=6) };
        let mut cuts = Vec::new();
        while cuts.len() < ncuts {
            let f = r.gen_range(0..m);
            let (u, v) = g.edge(f);
            let i = r.gen_range(0..n);
            if i != u && i != v && !cuts.contains(&(i, f)) {
                cuts.push((i, f));
            }
        }
        // favour large diagonals and small off-diagonals so cuts bind
        let mut mat = random_matrix(&mut r, m + 1, m + 1, -0.3, 0.5);
        for e in 0..m {
            let d = r.gen_range(0.3..1.2);
            mat[(e, e)] = d;
            mat[(e, m)] = d;
            mat[(m, e)] = d;
        }
        let clusters =
            cluster_cuts(&cuts.iter().map(|&(i, f)| Cut::new(i, f)).collect::<Vec<_>>(), &g)
                .unwrap();
        let res = dykstra_project(&mat, &clusters, &g, n, 1e-5).unwrap();
        let oracle = conic_projection_oracle(&mat, &g, n, &cuts);
        let x: DMatrix<f64> = 0.5 * (&res.matrix.0 + res.matrix.0.transpose());
        out.add((&x - &oracle).amax());
    }
    out
}
