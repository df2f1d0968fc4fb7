use crate::error::{QmstError, Result};
use crate::proj::DEFAULT_MAX_CYCLES;

/// Solver knobs. `None` fields are resolved per instance (`tau` from the cost
/// matrix, `ncutsmax` to `m`).
#[derive(Debug, Clone, PartialEq)]
pub struct PrsmParams {
    pub tau: Option<f64>,
    pub gamma1: f64,
    pub gamma2: f64,
    pub eps_prsm: f64,
    pub eps_proj: f64,
    pub cut_violation_eps: f64,
    pub ncutsmax: Option<usize>,
    pub ncutsmin: usize,
    pub epslbimprov: f64,
    pub noutermax: usize,
    /// Cap on inner iterations summed over all outer rounds.
    pub max_total_iters: usize,
    pub time_limit_secs: f64,
    pub dykstra_max_cycles: usize,
    /// When false only the first round (no cuts) is run.
    pub use_cuts: bool,
}

impl Default for PrsmParams {
    fn default() -> Self {
        Self {
            tau: None,
            gamma1: 0.9,
            gamma2: 1.0,
            eps_prsm: 1e-4,
            eps_proj: 1e-5,
            cut_violation_eps: 1e-3,
            ncutsmax: None,
            ncutsmin: 10,
            epslbimprov: 1e-3,
            noutermax: 10,
            max_total_iters: 10_000,
            time_limit_secs: 10_800.0,
            dykstra_max_cycles: DEFAULT_MAX_CYCLES,
            use_cuts: true,
        }
    }
}

impl PrsmParams {
    /// Checks the step-length region that guarantees convergence and the
    /// positivity of all tolerances.
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(QmstError::InvalidParameter(msg));
        let (g1, g2) = (self.gamma1, self.gamma2);
        if !(g1 > -1.0 && g1 < 1.0) {
            return bad(format!("gamma1 = {g1} must lie in (-1, 1)"));
        }
        let golden = 0.5 * (1.0 + 5f64.sqrt());
        if !(g2 > 0.0 && g2 < golden) {
            return bad(format!("gamma2 = {g2} must lie in (0, {golden:.6})"));
        }
        if g1 + g2 <= 0.0 {
            return bad(format!("gamma1 + gamma2 = {} must be positive", g1 + g2));
        }
        if g1.abs() >= 1.0 + g2 - g2 * g2 {
            return bad(format!("|gamma1| must be below 1 + gamma2 - gamma2^2 = {}", 1.0 + g2 - g2 * g2));
        }
        if let Some(t) = self.tau {
            if !(t.is_finite() && t > 0.0) {
                return bad(format!("tau = {t} must be positive"));
            }
        }
        for (name, v) in [
            ("eps_prsm", self.eps_prsm),
            ("eps_proj", self.eps_proj),
            ("cut_violation_eps", self.cut_violation_eps),
            ("time_limit_secs", self.time_limit_secs),
        ] {
            if v.is_nan() || v <= 0.0 {
                return bad(format!("{name} = {v} must be positive"));
            }
        }
        if self.epslbimprov.is_nan() || self.epslbimprov < 0.0 {
            return bad(format!("epslbimprov = {} must be nonnegative", self.epslbimprov));
        }
        if self.noutermax == 0 || self.max_total_iters == 0 || self.dykstra_max_cycles == 0 {
            return bad("noutermax, max_total_iters and dykstra_max_cycles must be positive".into());
        }
        if self.ncutsmax == Some(0) {
            return bad("ncutsmax must be positive".into());
        }
        Ok(())
    }
}
