//! Euclidean projections onto the simplex `{x ≥ 0, Σx = s}` and the capped
//! simplex `{0 ≤ x ≤ 1, Σx = s}`.

/// Sort-based projection onto `{x ≥ 0, Σx = s}`.
pub fn project_simplex(v: &[f64], s: f64) -> Vec<f64> {
    if v.is_empty() {
        return Vec::new();
    }
    let mut order: Vec<usize> = (0..v.len()).collect();
    // descending, stable on index
    order.sort_by(|&a, &b| v[b].total_cmp(&v[a]).then(a.cmp(&b)));
    let mut cumsum = 0.0;
    let mut theta = 0.0;
    for (k, &i) in order.iter().enumerate() {
        cumsum += v[i];
        let t = (cumsum - s) / (k + 1) as f64;
        if v[i] - t > 0.0 {
            theta = t;
        } else {
            break;
        }
    }
    v.iter().map(|&x| (x - theta).max(0.0)).collect()
}

/// Projection onto `{0 ≤ x ≤ 1, Σx = s}` by bisection on the shift `θ` in
/// `x = clamp(v − θ, 0, 1)`, finished with an exact solve on the free set.
pub fn project_capped_simplex(v: &[f64], s: f64) -> Vec<f64> {
    let p = v.len();
    if p == 0 {
        return Vec::new();
    }
    if s >= p as f64 {
        return vec![1.0; p];
    }
    if s <= 0.0 {
        return vec![0.0; p];
    }
    let clamped_sum = |theta: f64| -> f64 { v.iter().map(|&x| (x - theta).clamp(0.0, 1.0)).sum() };
    let vmax = v.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let vmin = v.iter().copied().fold(f64::INFINITY, f64::min);
    // sum is nonincreasing in θ: p at vmin − 1, 0 at vmax
    let (mut lo, mut hi) = (vmin - 1.0, vmax);
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if clamped_sum(mid) > s {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo <= 1e-12 * (1.0 + hi.abs()) {
            break;
        }
    }
    let theta = 0.5 * (lo + hi);

    // exact θ on the free set identified by the bisection
    let mut free_sum = 0.0;
    let mut free_count = 0usize;
    let mut ones = 0usize;
    for &x in v {
        let t = x - theta;
        if t >= 1.0 {
            ones += 1;
        } else if t > 0.0 {
            free_sum += x;
            free_count += 1;
        }
    }
    let theta = if free_count > 0 {
        let exact = (free_sum + ones as f64 - s) / free_count as f64;
        // keep the refinement only if it is consistent with the bracket
        if (exact - theta).abs() <= 1e-9 * (1.0 + theta.abs()) {
            exact
        } else {
            theta
        }
    } else {
        theta
    };
    v.iter().map(|&x| (x - theta).clamp(0.0, 1.0)).collect()
}
