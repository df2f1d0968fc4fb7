use std::fmt;
use std::time::Instant;

use nalgebra::DMatrix;

use super::params::PrsmParams;
use crate::bounds::{valid_lower_bound, SafeBound};
use crate::error::{QmstError, Result};
use crate::graph::Graph;
use crate::instances::{pad_cost, CostMatrix, Instance};
use crate::linalg;
use crate::proj::{dykstra_project_capped, project_r, Cut, CutClusters};

/// Orthonormal basis of `{v : vᵀT = 0}`, `T = (1_m; −(n−1))`, from the QR
/// factorization of `((n−1) I_m; 1_mᵀ)`.
pub fn compute_w(m: usize, n: usize) -> Result<DMatrix<f64>> {
    if n < 3 || m + 1 < n {
        return Err(QmstError::InvalidParameter(format!(
            "facial reduction needs m >= n - 1 >= 2, got m = {m}, n = {n}"
        )));
    }
    let mut a = DMatrix::zeros(m + 1, m);
    for j in 0..m {
        a[(j, j)] = (n - 1) as f64;
        a[(m, j)] = 1.0;
    }
    let w = a.qr().q();
    debug_assert_eq!(w.shape(), (m + 1, m));
    Ok(w)
}

/// Penalty parameter from the trace and Frobenius norm of `Q`.
pub fn default_tau(q: &CostMatrix) -> f64 {
    let fro = q.matrix().norm();
    if fro == 0.0 {
        return 1.0;
    }
    let tr = q.matrix().trace();
    let (qmax, qmin) = (tr.max(fro), tr.min(fro));
    let ratio = qmax / qmin;
    // qmin <= 0 makes the ratio meaningless; fall through to the scale-only branch
    if qmin > 0.0 && ratio < 1.2 {
        (qmin / (q.m() + 1) as f64 * fro).sqrt()
    } else if qmin > 0.0 {
        (ratio * fro).sqrt()
    } else {
        fro.sqrt()
    }
}

/// Starting point: the barycenter of all lifted spanning trees of `K_n`
/// restricted to `m` edges.
pub fn initial_ytil(n: usize, m: usize) -> DMatrix<f64> {
    let (nf, mf) = ((n - 1) as f64, m as f64);
    let diag = nf / mf;
    let off = if m > 1 {
        nf * (n as f64 - 2.0) / (mf * (mf - 1.0))
    } else {
        0.0
    };
    let mut y = DMatrix::from_element(m + 1, m + 1, off);
    for e in 0..m {
        y[(e, e)] = diag;
        y[(e, m)] = diag;
        y[(m, e)] = diag;
    }
    y[(m, m)] = 1.0;
    y
}

/// Instance data shared by every iteration.
#[derive(Debug, Clone)]
pub struct PrsmSetup {
    pub graph: Graph,
    pub n: usize,
    pub m: usize,
    pub q_tilde: DMatrix<f64>,
    pub w: DMatrix<f64>,
    pub tau: f64,
    pub ncutsmax: usize,
}

impl PrsmSetup {
    pub fn new(inst: &Instance, params: &PrsmParams) -> Result<Self> {
        params.validate()?;
        inst.graph.check_solver_ready()?;
        let (n, m) = (inst.graph.n(), inst.graph.m());
        Ok(Self {
            graph: inst.graph.clone(),
            n,
            m,
            q_tilde: pad_cost(&inst.q),
            w: compute_w(m, n)?,
            tau: params.tau.unwrap_or_else(|| default_tau(&inst.q)),
            ncutsmax: params.ncutsmax.unwrap_or(m),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PrsmState {
    pub r: DMatrix<f64>,
    pub ytil: DMatrix<f64>,
    pub s: DMatrix<f64>,
    pub cuts: CutClusters,
    pub k: usize,
    pub outer: usize,
    pub best_valid_lb: f64,
}

impl PrsmState {
    pub fn initial(setup: &PrsmSetup) -> Self {
        let ytil = initial_ytil(setup.n, setup.m);
        Self {
            r: linalg::congruence_t(&setup.w, &ytil),
            ytil,
            s: DMatrix::zeros(setup.m + 1, setup.m + 1),
            cuts: CutClusters::empty(),
            k: 0,
            outer: 0,
            best_valid_lb: f64::NEG_INFINITY,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Residuals {
    pub primal: f64,
    pub dual: f64,
}

impl Residuals {
    pub fn max(&self) -> f64 {
        self.primal.max(self.dual)
    }
}

/// Primal and dual errors between consecutive iterates.
pub fn residuals(prev: &PrsmState, next: &PrsmState, tau: f64, w: &DMatrix<f64>) -> Residuals {
    let wrw = linalg::congruence(w, &next.r);
    let primal = (&next.ytil - wrw).norm() / (1.0 + next.ytil.norm());
    let diff = &prev.ytil - &next.ytil;
    let dual = tau * linalg::congruence_t(w, &diff).norm() / (1.0 + next.s.norm());
    Residuals { primal, dual }
}

/// One PRSM iteration. Dykstra output is symmetrized so that `S` stays
/// symmetric.
pub fn prsm_inner_step(
    state: &PrsmState,
    params: &PrsmParams,
    setup: &PrsmSetup,
) -> Result<PrsmState> {
    let tau = setup.tau;
    let w = &setup.w;
    let arg = linalg::congruence_t(w, &(&state.ytil + &state.s / tau));
    let r = project_r(&arg, setup.n)?;
    let wrw = linalg::congruence(w, &r);
    let mut s = &state.s + (&state.ytil - &wrw) * (params.gamma1 * tau);
    let target = &wrw - (&setup.q_tilde + &s) / tau;
    let out = dykstra_project_capped(
        &target,
        &state.cuts,
        &setup.graph,
        setup.n,
        params.eps_proj,
        params.dykstra_max_cycles,
    )?;
    let ytil = linalg::symmetrize(&out.matrix.0);
    s += (&ytil - &wrw) * (params.gamma2 * tau);
    linalg::symmetrize_in_place(&mut s);
    Ok(PrsmState {
        r,
        ytil,
        s,
        cuts: state.cuts.clone(),
        k: state.k + 1,
        outer: state.outer,
        best_valid_lb: state.best_valid_lb,
    })
}

/// Violated cuts `y_f − Σ_{e∈δ(i)} y_fe > eps` not yet in `existing`, most
/// violated first, at most `limit`. Returns the list and the number of
/// violated new cuts found before truncation.
pub fn separate_cuts(
    ytil: &DMatrix<f64>,
    g: &Graph,
    existing: &CutClusters,
    eps: f64,
    limit: usize,
) -> (Vec<(Cut, f64)>, usize) {
    let m = g.m();
    let mut found = Vec::new();
    for f in 0..m {
        let (a, b) = g.edge(f);
        let yf = ytil[(f, f)];
        for i in 0..g.n() {
            // for i on f the diagonal term cancels y_f, so the cut holds
            if i == a || i == b {
                continue;
            }
            let sum: f64 = g.incident(i).iter().map(|&e| ytil[(f, e)]).sum();
            let viol = yf - sum;
            if viol > eps {
                let cut = Cut::new(i, f);
                if !existing.contains(&cut) {
                    found.push((cut, viol));
                }
            }
        }
    }
    let total = found.len();
    // stable sort keeps (edge, vertex) order among ties
    found.sort_by(|x, y| y.1.total_cmp(&x.1));
    found.truncate(limit);
    (found, total)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TerminationReason {
    Residual,
    GapClosed,
    FewCuts,
    SmallImprovement,
    OuterCap,
    IterCap,
    TimeLimit,
}

impl fmt::Display for TerminationReason {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Residual => "residual",
            Self::GapClosed => "gap_closed",
            Self::FewCuts => "few_cuts",
            Self::SmallImprovement => "small_improvement",
            Self::OuterCap => "outer_cap",
            Self::IterCap => "iter_cap",
            Self::TimeLimit => "time_limit",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OuterRound {
    pub round: usize,
    pub bound: SafeBound,
    pub inner_iterations: usize,
    pub residuals: Residuals,
    pub cuts_active: usize,
    /// New violated cuts found after this round (before truncation).
    pub cuts_found: usize,
    pub cuts_added: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BoundResult {
    pub lb_dnn: f64,
    pub time_dnn: f64,
    pub lb_cuts: f64,
    pub time_total: f64,
    pub iterations: usize,
    pub cuts_added: usize,
    pub outer_log: Vec<OuterRound>,
    pub termination_reason: TerminationReason,
    pub tau: f64,
}

/// Runs the cutting-plane loop around the PRSM and returns the best valid
/// lower bound found.
pub fn solve_bound(inst: &Instance, params: &PrsmParams) -> Result<BoundResult> {
    let start = Instant::now();
    let setup = PrsmSetup::new(inst, params)?;
    let mut state = PrsmState::initial(&setup);
    let mut log_rounds = Vec::new();
    let mut lb_dnn = f64::NEG_INFINITY;
    let mut time_dnn = 0.0;
    let mut cuts_added = 0;
    let mut prev_round_lb: Option<f64> = None;

    let reason = loop {
        state.outer += 1;
        let round_start_k = state.k;
        let mut res = Residuals {
            primal: f64::INFINITY,
            dual: f64::INFINITY,
        };
        let mut inner_stop = None;
        loop {
            if state.k >= params.max_total_iters {
                inner_stop = Some(TerminationReason::IterCap);
                break;
            }
            if start.elapsed().as_secs_f64() >= params.time_limit_secs {
                inner_stop = Some(TerminationReason::TimeLimit);
                break;
            }
            let next = prsm_inner_step(&state, params, &setup)?;
            res = residuals(&state, &next, setup.tau, &setup.w);
            state = next;
            if res.max() <= params.eps_prsm {
                break;
            }
        }

        let bound = valid_lower_bound(
            &state.s,
            &setup.q_tilde,
            &setup.w,
            &state.cuts,
            &setup.graph,
            setup.n,
        )?;
        state.best_valid_lb = state.best_valid_lb.max(bound.value);
        if state.outer == 1 {
            lb_dnn = state.best_valid_lb;
            time_dnn = start.elapsed().as_secs_f64();
        }
        log::info!(
            "round {}: lb = {:.6}, best = {:.6}, inner = {}, primal = {:.2e}, dual = {:.2e}, cuts = {}",
            state.outer,
            bound.value,
            state.best_valid_lb,
            state.k - round_start_k,
            res.primal,
            res.dual,
            state.cuts.len()
        );
        let mut round = OuterRound {
            round: state.outer,
            bound,
            inner_iterations: state.k - round_start_k,
            residuals: res,
            cuts_active: state.cuts.len(),
            cuts_found: 0,
            cuts_added: 0,
        };

        let stop = (|| {
            if let Some(ub) = inst.ub {
                if ub - state.best_valid_lb <= 1e-6 * ub.abs().max(1.0) {
                    return Some(TerminationReason::GapClosed);
                }
            }
            if inner_stop.is_some() {
                return inner_stop;
            }
            if let Some(prev) = prev_round_lb {
                if bound.value - prev < params.epslbimprov {
                    return Some(TerminationReason::SmallImprovement);
                }
            }
            if state.outer >= params.noutermax {
                return Some(TerminationReason::OuterCap);
            }
            if !params.use_cuts {
                return Some(TerminationReason::Residual);
            }
            None
        })();
        if let Some(reason) = stop {
            log_rounds.push(round);
            break reason;
        }

        let (new_cuts, found) = separate_cuts(
            &state.ytil,
            &setup.graph,
            &state.cuts,
            params.cut_violation_eps,
            setup.ncutsmax,
        );
        round.cuts_found = found;
        if found < params.ncutsmin {
            log_rounds.push(round);
            break TerminationReason::FewCuts;
        }
        let cuts: Vec<Cut> = new_cuts.iter().map(|&(c, _)| c).collect();
        state.cuts = state.cuts.extended(&cuts, &setup.graph)?;
        round.cuts_added = cuts.len();
        cuts_added += cuts.len();
        log_rounds.push(round);
        prev_round_lb = Some(bound.value);
    };

    Ok(BoundResult {
        lb_dnn,
        time_dnn,
        lb_cuts: state.best_valid_lb,
        time_total: start.elapsed().as_secs_f64(),
        iterations: state.k,
        cuts_added,
        outer_log: log_rounds,
        termination_reason: reason,
        tau: setup.tau,
    })
}
