//! Closed-form projection onto the per-row RLT sets
//!
//! `T_f^K = { z ∈ ℝ^{m+2} : z_f = z_{m+1} = z_{m+2}, Σ_{e∈δ(i)} z_e ≥ z_f ∀ i ∈ K }`
//!
//! for an independent vertex set `K`. Positions `0..m` hold row `f` of `Y`,
//! position `m` holds `Ỹ_{f,m+1}` and position `m + 1` holds `Ỹ_{m+1,f}`.

use crate::error::{QmstError, Result};
use crate::graph::{first_adjacent_pair, Graph};

/// Checked projection onto `T_f^K`.
pub fn project_tkf(a: &[f64], f: usize, k: &[usize], g: &Graph) -> Result<Vec<f64>> {
    let m = g.m();
    if a.len() != m + 2 {
        return Err(QmstError::DimensionMismatch {
            expected: m + 2,
            got: a.len(),
        });
    }
    if f >= m {
        return Err(QmstError::InvalidEdge { edge: f, m });
    }
    if let Some(&v) = k.iter().find(|&&v| v >= g.n()) {
        return Err(QmstError::InvalidVertex { vertex: v, n: g.n() });
    }
    if let Some((u, v)) = first_adjacent_pair(g, k) {
        return Err(QmstError::NotIndependent(u, v));
    }
    let mut z = a.to_vec();
    project_tkf_in_place(&mut z, f, k, g);
    Ok(z)
}

/// Unchecked projection used inside Dykstra's loop. `K` must be independent.
pub(crate) fn project_tkf_in_place(z: &mut [f64], f: usize, k: &[usize], g: &Graph) {
    let m = g.m();
    let (fu, fv) = g.edge(f);
    // exact when the triple already agrees, so feasible points are fixed
    let avg = if z[f] == z[m] && z[m] == z[m + 1] {
        z[f]
    } else {
        (z[f] + z[m] + z[m + 1]) / 3.0
    };

    // vertices of K on f: Σ_{δ(i)\f} z_e ≥ 0, decoupled from the triple
    for &i in k.iter().filter(|&&i| i == fu || i == fv) {
        let inc = g.incident(i);
        if inc.len() <= 1 {
            continue;
        }
        let s: f64 = inc.iter().filter(|&&e| e != f).map(|&e| z[e]).sum();
        if s < 0.0 {
            let shift = s / (inc.len() - 1) as f64;
            for &e in inc.iter().filter(|&&e| e != f) {
                z[e] -= shift;
            }
        }
    }

    // remaining vertices: g_i = avg − Σ_{δ(i)} a_e, sorted non-increasing
    let mut cand: Vec<(f64, f64, usize)> = k
        .iter()
        .filter(|&&i| i != fu && i != fv)
        .map(|&i| {
            let inc = g.incident(i);
            let s: f64 = inc.iter().map(|&e| z[e]).sum();
            (avg - s, inc.len() as f64, i)
        })
        .collect();
    cand.sort_by(|a, b| b.0.total_cmp(&a.0).then(a.2.cmp(&b.2)));

    let mut num = 0.0;
    let mut den = 3.0;
    let mut p_star = 0;
    let mut omega_star = 0.0;
    if cand.first().is_some_and(|c| c.0 > 0.0) {
        for (p, &(gi, di, _)) in cand.iter().enumerate() {
            num += gi / di;
            den += 1.0 / di;
            let omega = num / den;
            if gi > omega {
                p_star = p + 1;
                omega_star = omega;
            }
        }
    }

    for &(gi, di, i) in &cand[..p_star] {
        let shift = (gi - omega_star) / di;
        for &e in g.incident(i) {
            z[e] += shift;
        }
    }
    let t = avg - omega_star;
    z[f] = t;
    z[m] = t;
    z[m + 1] = t;
}
