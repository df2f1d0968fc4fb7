//! Upper bounds from greedy construction plus 1-edge-exchange local search.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{QmstError, Result};
use crate::graph::Graph;
use crate::instances::{CostMatrix, Instance};

const HEURISTIC_SEED: u64 = 0x51_4d_53_54;

fn find(parent: &mut [usize], mut v: usize) -> usize {
    while parent[v] != v {
        parent[v] = parent[parent[v]];
        v = parent[v];
    }
    v
}

/// Greedy by marginal cost. With `noise > 0` the marginal costs are perturbed
/// multiplicatively to diversify restarts.
fn greedy_tree(g: &Graph, q: &CostMatrix, noise: f64, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let (n, m) = (g.n(), g.m());
    let qm = q.matrix();
    let mut parent: Vec<usize> = (0..n).collect();
    let mut inc: Vec<f64> = (0..m).map(|e| qm[(e, e)]).collect();
    let jitter: Vec<f64> = (0..m)
        .map(|_| 1.0 + noise * (rng.gen::<f64>() - 0.5))
        .collect();
    let mut tree = Vec::with_capacity(n - 1);
    while tree.len() + 1 < n {
        let mut best: Option<(f64, usize)> = None;
        for e in 0..m {
            let (u, v) = g.edge(e);
            if find(&mut parent, u) == find(&mut parent, v) {
                continue;
            }
            let score = inc[e] * jitter[e];
            if best.is_none_or(|(b, _)| score < b) {
                best = Some((score, e));
            }
        }
        let (_, e) = best.expect("connected graph has a crossing edge");
        let (u, v) = g.edge(e);
        let (ru, rv) = (find(&mut parent, u), find(&mut parent, v));
        parent[ru] = rv;
        for (f, val) in inc.iter_mut().enumerate() {
            *val += 2.0 * qm[(e, f)];
        }
        tree.push(e);
    }
    tree
}

/// Best-improvement 1-edge exchange until no improving move remains.
fn local_search(g: &Graph, q: &CostMatrix, tree: &mut [usize]) {
    let (n, m) = (g.n(), g.m());
    let qm = q.matrix();
    let mut in_tree = vec![false; m];
    for &e in tree.iter() {
        in_tree[e] = true;
    }
    // s[e] = Σ_{h∈T} q_eh
    let mut s: Vec<f64> = (0..m)
        .map(|e| tree.iter().map(|&h| qm[(e, h)]).sum())
        .collect();
    let mut label = vec![0usize; n];
    loop {
        let mut best: Option<(f64, usize, usize)> = None;
        for (pos, &f) in tree.iter().enumerate() {
            // components of T \ {f}
            let mut parent: Vec<usize> = (0..n).collect();
            for (p2, &h) in tree.iter().enumerate() {
                if p2 != pos {
                    let (u, v) = g.edge(h);
                    let (a, b) = (find(&mut parent, u), find(&mut parent, v));
                    parent[a] = b;
                }
            }
            for (v, l) in label.iter_mut().enumerate() {
                *l = find(&mut parent, v);
            }
            let remove = -2.0 * s[f] + qm[(f, f)];
            for e in 0..m {
                if in_tree[e] {
                    continue;
                }
                let (u, v) = g.edge(e);
                if label[u] == label[v] {
                    continue;
                }
                let delta = remove + qm[(e, e)] + 2.0 * (s[e] - qm[(e, f)]);
                if delta < -1e-9 * (1.0 + s[f].abs()) && best.is_none_or(|(b, _, _)| delta < b) {
                    best = Some((delta, pos, e));
                }
            }
        }
        let Some((_, pos, e)) = best else { break };
        let f = tree[pos];
        tree[pos] = e;
        in_tree[f] = false;
        in_tree[e] = true;
        for (h, sh) in s.iter_mut().enumerate() {
            *sh += qm[(h, e)] - qm[(h, f)];
        }
    }
}

/// Heuristic tree and its cost. `effort` is the number of restarts (at least
/// one); the first restart is the plain greedy tree.
pub fn heuristic_upper_bound(inst: &Instance, effort: usize) -> Result<(f64, Vec<usize>)> {
    let g = &inst.graph;
    if g.n() == 0 || !g.is_connected() {
        return Err(QmstError::Disconnected);
    }
    if g.n() == 1 {
        return Ok((0.0, Vec::new()));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(HEURISTIC_SEED);
    let mut best: Option<(f64, Vec<usize>)> = None;
    for round in 0..effort.max(1) {
        let noise = if round == 0 { 0.0 } else { 0.6 };
        let mut tree = greedy_tree(g, &inst.q, noise, &mut rng);
        local_search(g, &inst.q, &mut tree);
        tree.sort_unstable();
        let value = inst.q.tree_cost(&tree);
        if best.as_ref().is_none_or(|(b, _)| value < *b) {
            best = Some((value, tree));
        }
    }
    Ok(best.expect("at least one restart"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use nalgebra::DMatrix;

    #[test]
    fn ones_cost_gives_n_minus_one_squared() {
        let g = Graph::complete(4);
        let inst = Instance::new(g, CostMatrix::new(DMatrix::from_element(6, 6, 1.0)).unwrap(), None)
            .unwrap();
        let (v, t) = heuristic_upper_bound(&inst, 3).unwrap();
        assert_eq!(v, 9.0);
        assert_eq!(t.len(), 3);
    }

    #[test]
    fn diagonal_cost_finds_mst() {
        // path 0-1-2-3 is cheap; chords are expensive
        let g = Graph::complete(4);
        let mut d = DMatrix::zeros(6, 6);
        for e in 0..6 {
            let (u, v) = g.edge(e);
            d[(e, e)] = if v == u + 1 { 1.0 } else { 5.0 };
        }
        let inst = Instance::new(g, CostMatrix::new(d).unwrap(), None).unwrap();
        assert_eq!(heuristic_upper_bound(&inst, 1).unwrap().0, 3.0);
    }
}
